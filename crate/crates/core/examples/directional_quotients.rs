// Difference quotients of the parity indicator along a direction, and a
// seeded sector probe.

use nestpack::analysis::{directional_quotients, dyadic_sample_count, sector_lipschitz_probe};
use nestpack::geometry::{Point, Sector, UnitDirection};
use nestpack::hierarchy::{build_hierarchy, LevelSpec};

fn main() {
    let tree = build_hierarchy(&LevelSpec::new(vec![50, 10]).unwrap()).unwrap();
    let b1 = tree.node(0).disc;
    let x = b1.center + Point::new(0.0, -0.96 * b1.radius);
    let down = UnitDirection::new(0.0, -1.0).unwrap();

    let n = dyadic_sample_count(1e-6, 0.5);
    for s in directional_quotients(&tree, x, down, 1e-6, 0.5, n).unwrap().iter().step_by(4) {
        println!("h = {:.3e}  quotient = {:.3e}", s.h, s.quotient);
    }

    let sector = Sector::new(x, down, 0.5, 0.1).unwrap();
    let probe = sector_lipschitz_probe(&tree, x, &sector, 5000, 0).unwrap();
    println!("sector sup estimate {:.3e} over {} samples", probe.sup, probe.samples);
}
