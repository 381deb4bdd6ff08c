use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quick_xml::events::Event;
use quick_xml::Reader;
use serde_json::Value;

use nestpack::document::TreeDocument;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nestpack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &Path, name: &str, per_level: &str) -> PathBuf {
    let out = path(dir, name);
    let levels = per_level.split(',').count().to_string();
    let o = run(&["build", "--levels", &levels, "--per-level", per_level, "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn single_disc_build() {
    let dir = tempfile::tempdir().unwrap();
    let f = build(dir.path(), "one.json", "1");
    let doc = TreeDocument::from_json(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(doc.levels.len(), 1);
    let d = &doc.levels[0][0];
    assert_eq!((d.cx, d.cy), (-1.0, -1.0));
    assert_eq!(d.r, 0.25 * (1.0 - (-20f64).exp2()));
    assert_eq!(d.parent_index, None);
}

#[test]
fn two_level_budget_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = build(dir.path(), "a.json", "50,10");
    let b = build(dir.path(), "b.json", "50,10");
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let doc = TreeDocument::from_json(std::str::from_utf8(&text).unwrap()).unwrap();
    assert_eq!(doc.levels[0].len(), 50);
    assert!(doc.levels[1].len() <= 500);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = build(dir.path(), "t.json", "20,3");
    let report = path(dir.path(), "report.json");
    let o = run(&["verify", s(&f), "--samples", "500", "--report", s(&report)]);
    assert_eq!(o.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["overall"], "pass");

    let o = run(&["verify", s(&f), "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["totals"]["skipped"], 5);

    // double one radius, in both coordinate systems
    let mut doc = TreeDocument::from_json(&std::fs::read_to_string(&f).unwrap()).unwrap();
    doc.levels[0][1].r *= 2.0;
    doc.levels[0][1].lr *= 2.0;
    let tampered = path(dir.path(), "tampered.json");
    std::fs::write(&tampered, doc.to_canonical_string()).unwrap();
    let o = run(&["verify", s(&tampered), "--samples", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let failed: Vec<String> = json(&o)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect();
    assert!(failed.contains(&"radius_decay".to_string()), "{failed:?}");

    let junk = path(dir.path(), "junk.json");
    std::fs::write(&junk, "{\"format_version\": 9}").unwrap();
    assert_eq!(run(&["verify", s(&junk)]).status.code(), Some(2));
    std::fs::write(&junk, "not json").unwrap();
    assert_eq!(run(&["verify", s(&junk)]).status.code(), Some(2));
}

#[test]
fn cap_exceeded_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "big.json");
    let o = run(&["build", "--levels", "2", "--per-level", "100,100", "--cap", "1000", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn disc_region_build() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "disc.json");
    let o = run(&["build", "--levels", "1", "--per-level", "40", "--region", "disc:-1,2,0.5", "--out", s(&out)]);
    assert!(o.status.success());
    assert_eq!(run(&["verify", s(&out), "--samples", "200"]).status.code(), Some(0));
    let o = run(&["build", "--levels", "1", "--per-level", "4", "--region", "disc:0,0", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn probes() {
    let dir = tempfile::tempdir().unwrap();
    let one = build(dir.path(), "one.json", "1");
    let two = build(dir.path(), "two.json", "50,10");

    let v = json(&run(&["probe", s(&two), "chi", "--point", "50,50"]));
    assert_eq!((v["value"].as_u64(), v["certainty"].as_str()), (Some(0), Some("exact")));

    let v = json(&run(&["probe", s(&one), "chi", "--point", "-1,-1"]));
    assert_eq!(v["value"], 1);

    let v = json(&run(&["probe", s(&two), "witness", "--point", "0,0", "--eps", "2"]));
    assert_eq!(v["found"], true);
    assert!(v["quotient"].as_f64().unwrap() >= 0.5);

    // a tiny disc, probed in its own frame: its first child sits at the
    // center, the rim is in the disc alone
    let v = json(&run(&["probe", s(&two), "chi", "--point", "0,0", "--frame", "1:50"]));
    assert_eq!((v["value"].as_u64(), v["certainty"].as_str()), (Some(0), Some("frontier")));
    let v = json(&run(&["probe", s(&two), "chi", "--point", "0,-0.99", "--frame", "1:50"]));
    assert_eq!((v["value"].as_u64(), v["certainty"].as_str()), (Some(1), Some("exact")));

    let v = json(&run(&["probe", s(&two), "blocked", "--point", "3,-3"]));
    assert!(v["total"].as_f64().unwrap() < std::f64::consts::PI);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);

    let v = json(&run(&[
        "probe", s(&two), "quotient", "--point", "-1,-1.24", "--dir", "0,-1", "--hmin", "1e-4", "--hmax", "0.5",
    ]));
    assert!(v["sup"].as_f64().unwrap() > 0.0);

    let o = run(&["probe", s(&two), "chi", "--point", "1;2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["probe", s(&two), "blocked", "--point", "-1,-1"]);
    assert_eq!(o.status.code(), Some(2));
}

fn circles(svg: &str) -> (usize, usize) {
    let mut reader = Reader::from_str(svg);
    let (mut all, mut dashed) = (0, 0);
    loop {
        match reader.read_event().expect("well-formed xml") {
            Event::Empty(e) | Event::Start(e) if e.name().as_ref() == b"circle" => {
                all += 1;
                if e.try_get_attribute("stroke-dasharray").unwrap().is_some() {
                    dashed += 1;
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    (all, dashed)
}

#[test]
fn render_svg() {
    let dir = tempfile::tempdir().unwrap();
    let one = build(dir.path(), "one.json", "1");
    let svg = path(dir.path(), "one.svg");
    assert!(run(&["render", s(&one), "--out", s(&svg)]).status.success());
    assert_eq!(circles(&std::fs::read_to_string(&svg).unwrap()), (1, 0));

    let two = build(dir.path(), "two.json", "50,10");
    let records: usize = TreeDocument::from_json(&std::fs::read_to_string(&two).unwrap())
        .unwrap()
        .levels
        .iter()
        .map(Vec::len)
        .sum();
    assert!(run(&["render", s(&two), "--out", s(&svg), "--show-enlarged"]).status.success());
    assert_eq!(circles(&std::fs::read_to_string(&svg).unwrap()), (2 * records, records));
}
