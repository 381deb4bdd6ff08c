use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use nestpack::analysis::{
    blocked_direction_measure, directional_quotients, dyadic_sample_count,
    relative_nonlipschitz_witness, AnalysisError,
};
use nestpack::document::{load_tree_from_path, save_tree_to_path, DocumentError};
use nestpack::geometry::{Frame, Point, Region, UnitDirection};
use nestpack::hierarchy::{
    build_hierarchy_in, DiscTree, FrameView, HierarchyError, LevelSpec, DEFAULT_DISC_CAP,
};
use nestpack::packing::enlarge;
use nestpack::render::{render_svg, RenderOptions};
use nestpack::verify::{verify_tree, VerifyOptions};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_MALFORMED: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "nestpack", version, about = "Build, certify, probe and draw nested disc packings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tree and write it as JSON.
    Build {
        #[arg(long)]
        levels: usize,
        /// Comma-separated disc budget per level.
        #[arg(long, value_delimiter = ',')]
        per_level: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
        /// `plane` or `disc:cx,cy,r`.
        #[arg(long, default_value = "plane", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = DEFAULT_DISC_CAP)]
        cap: usize,
    },
    /// Check a stored tree; exits 1 if any check fails.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run one probe against a stored tree and print JSON.
    Probe {
        file: PathBuf,
        #[command(subcommand)]
        probe: Probe,
    },
    /// Draw a stored tree as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        show_enlarged: bool,
    },
}

#[derive(clap::Args)]
struct Target {
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Pose the query in the unit frame of disc `LEVEL:INDEX` (index from 1).
    #[arg(long)]
    frame: Option<String>,
}

#[derive(Subcommand)]
enum Probe {
    /// Parity value and certainty at a point.
    Chi {
        #[command(flatten)]
        at: Target,
    },
    /// Difference quotients along a direction.
    Quotient {
        #[command(flatten)]
        at: Target,
        /// Direction `dx,dy`, normalized.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[arg(long, default_value_t = 1e-9)]
        hmin: f64,
        #[arg(long, default_value_t = 1.0)]
        hmax: f64,
        /// Defaults to one sample per halving of the step.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Nearby point of opposite parity.
    Witness {
        #[command(flatten)]
        at: Target,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        cutoff: usize,
    },
    /// Directions blocked by a packing, seen from a point outside it.
    Blocked {
        #[command(flatten)]
        at: Target,
    },
}

enum Failure {
    Malformed(String),
    Cap(String),
    Other(String),
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Io(e) => Failure::Other(e.to_string()),
            e => Failure::Malformed(e.to_string()),
        }
    }
}

// probe preconditions are properties of the input
impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        Failure::Malformed(e.to_string())
    }
}

fn parse_pair(s: &str) -> Result<Point, Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Malformed(format!("bad coordinates {s:?}: {e}")))?;
    match v[..] {
        [x, y] => Point::checked(x, y).map_err(|e| Failure::Malformed(e.to_string())),
        _ => Err(Failure::Malformed(format!("expected x,y, got {s:?}"))),
    }
}

fn parse_region(s: &str) -> Result<Region, Failure> {
    if s == "plane" {
        return Ok(Region::Plane);
    }
    let bad = || Failure::Malformed(format!("region must be plane or disc:cx,cy,r, got {s:?}"));
    let rest = s.strip_prefix("disc:").ok_or_else(bad)?;
    let v: Vec<f64> = rest
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match v[..] {
        [cx, cy, r] => nestpack::geometry::Disc::new(Point::new(cx, cy), r)
            .map(Region::disc)
            .map_err(|e| Failure::Malformed(e.to_string())),
        _ => Err(bad()),
    }
}

/// The view a probe runs in, and the similarity from the coordinates the
/// user gave to the view's coordinates: absolute for the root, the disc's
/// unit frame under `--frame`.
fn view<'t>(tree: &'t DiscTree, frame: &Option<String>) -> Result<(FrameView<'t>, Frame), Failure> {
    let Some(spec) = frame else {
        let v = tree.root_frame();
        return Ok((v, v.to_absolute()));
    };
    let bad = || Failure::Malformed(format!("frame must be LEVEL:INDEX, got {spec:?}"));
    let (l, i) = spec.split_once(':').ok_or_else(bad)?;
    let l: usize = l.parse().map_err(|_| bad())?;
    let i: usize = i.parse().map_err(|_| bad())?;
    if l == 0 || i == 0 || l > tree.depth() {
        return Err(bad());
    }
    let id = tree
        .node_at(l, i - 1)
        .map_err(|e| Failure::Malformed(e.to_string()))?;
    Ok((tree.frame(id), Frame::IDENTITY))
}

fn load(path: &Path) -> Result<DiscTree, Failure> {
    Ok(load_tree_from_path(path)?)
}

fn print(value: serde_json::Value) {
    let text = serde_json::to_string_pretty(&value).expect("json values serialize");
    // a closed pipe downstream is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Build { levels, per_level, out, region, cap } => {
            if per_level.len() != levels {
                return Err(Failure::Malformed(format!(
                    "--levels {levels} but {} budgets given",
                    per_level.len()
                )));
            }
            let spec = LevelSpec::new(per_level).map_err(|e| Failure::Malformed(e.to_string()))?;
            let tree = build_hierarchy_in(parse_region(&region)?, &spec, cap).map_err(|e| match e {
                HierarchyError::CapExceeded { .. } => Failure::Cap(e.to_string()),
                e => Failure::Other(e.to_string()),
            })?;
            save_tree_to_path(&tree, &out)?;
            eprintln!("wrote {} discs in {} levels to {}", tree.len(), tree.depth(), out.display());
            Ok(0)
        }
        Command::Verify { file, samples, seed, report } => {
            let tree = load(&file)?;
            let rep = verify_tree(&tree, &VerifyOptions { samples, seed });
            let text = rep.to_json();
            if let Some(path) = report {
                std::fs::write(&path, format!("{text}\n")).map_err(|e| Failure::Other(e.to_string()))?;
            }
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(if rep.passed() { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Probe { file, probe } => {
            let tree = load(&file)?;
            match probe {
                Probe::Chi { at } => {
                    let (v, q) = view(&tree, &at.frame)?;
                    let chi = v.chi_z(q.to_local(parse_pair(&at.point)?));
                    print(json!({ "value": chi.value, "certainty": chi.certainty.as_str() }));
                }
                Probe::Quotient { at, dir, hmin, hmax, samples } => {
                    let (v, q) = view(&tree, &at.frame)?;
                    let d = parse_pair(&dir)?;
                    let u = UnitDirection::normalize(d).map_err(|e| Failure::Malformed(e.to_string()))?;
                    let n = samples.unwrap_or_else(|| dyadic_sample_count(hmin, hmax));
                    let x = q.to_local(parse_pair(&at.point)?);
                    let qs = directional_quotients(&v, x, u, hmin / q.scale, hmax / q.scale, n)?;
                    let qs: Vec<(f64, f64)> = qs.iter().map(|s| (s.h * q.scale, s.quotient / q.scale)).collect();
                    let sup = qs.iter().map(|s| s.1).fold(0.0, f64::max);
                    print(json!({
                        "estimate": "sampled on a finite h-grid",
                        "sup": sup,
                        "samples": qs.iter().map(|(h, quotient)| json!({ "h": h, "quotient": quotient })).collect::<Vec<_>>(),
                    }));
                }
                Probe::Witness { at, eps, cutoff } => {
                    let (v, q) = view(&tree, &at.frame)?;
                    let x = q.to_local(parse_pair(&at.point)?);
                    match relative_nonlipschitz_witness(&v, x, eps / q.scale, cutoff) {
                        Ok(w) => {
                            let y = q.to_outer(w.y);
                            print(json!({
                                "found": true,
                                "y": [y.x, y.y],
                                "chi_x": w.chi_x,
                                "chi_y": w.chi_y,
                                "distance": w.distance * q.scale,
                                "quotient": w.quotient / q.scale,
                                "absolute_distance": w.absolute_distance(),
                                "absolute_quotient": w.absolute_quotient(),
                                "disc_level": tree.node(w.disc).level,
                            }))
                        }
                        Err(AnalysisError::NoWitness(miss)) => print(json!({
                            "found": false,
                            "truncation_miss": format!("{:?}", miss.reason),
                        })),
                        Err(e) => return Err(e.into()),
                    }
                }
                Probe::Blocked { at } => {
                    let (v, q) = view(&tree, &at.frame)?;
                    let ps = tree.packing_system(v.node());
                    let es = enlarge(&ps);
                    let y = v.to_absolute().to_outer(q.to_local(parse_pair(&at.point)?));
                    let rep = blocked_direction_measure(&ps, &es, y)?;
                    print(json!({
                        "total": rep.total,
                        "bound": std::f64::consts::PI,
                        "exempt": rep.exempt,
                        "violations": rep.violations,
                        "terms": rep.terms.iter().map(|t| json!({ "index": t.index, "angle": t.angle, "bound": t.bound })).collect::<Vec<_>>(),
                    }));
                }
            }
            Ok(0)
        }
        Command::Render { file, out, show_enlarged } => {
            let tree = load(&file)?;
            let svg = render_svg(&tree, &RenderOptions { show_enlarged, ..Default::default() });
            std::fs::write(&out, svg).map_err(|e| Failure::Other(e.to_string()))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Malformed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_MALFORMED)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CAP)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::FAILURE
        }
    }
}
