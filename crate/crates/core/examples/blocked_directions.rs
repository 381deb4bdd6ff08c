// How much of the circle of directions the packing blocks from a viewpoint.

use nestpack::analysis::{blocked_direction_measure, BlockedReport};
use nestpack::geometry::{Point, Region};
use nestpack::packing::{build_packing, enlarge};

fn main() {
    let ps = build_packing(&Region::Plane, 500).unwrap();
    let es = enlarge(&ps);
    for y in [Point::new(3.0, 3.0), Point::new(0.3, 0.2), Point::new(-1.2, -1.3)] {
        let rep = blocked_direction_measure(&ps, &es, y).unwrap();
        println!(
            "from {y}: blocked {:.6} of at most {:.6}, {} discs exempt, {} violations",
            rep.total,
            BlockedReport::series_bound(ps.len()),
            rep.exempt.len(),
            rep.violations.len()
        );
        for t in rep.terms.iter().take(3) {
            println!("  B_{}: {:.3e} < {:.3e}", t.index, t.angle, t.bound);
        }
    }
}
