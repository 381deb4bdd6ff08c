// Certify a tree: structural invariants plus seeded sampling checks.

use nestpack::hierarchy::{build_hierarchy, LevelSpec};
use nestpack::verify::{verify_tree, VerifyOptions};

fn main() {
    let tree = build_hierarchy(&LevelSpec::new(vec![100, 6, 3]).unwrap()).unwrap();
    let report = verify_tree(&tree, &VerifyOptions { samples: 5000, seed: 1 });
    for c in &report.checks {
        println!("{:<24} {:?}  measured {:.6e}  bound {:.6e}", c.name, c.status, c.measured, c.bound);
    }
    println!("overall {:?} in {:.1} ms", report.overall, report.runtime_ms);
}
