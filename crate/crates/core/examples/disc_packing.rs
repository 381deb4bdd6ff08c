// Packing a disc: the construction is a similarity copy of the unit-disc
// packing, and it fills less than a fifteenth of the area.

use nestpack::geometry::{Disc, Point, Region};
use nestpack::packing::{area_sum, build_packing, PackingSystem};

fn main() {
    let unit = build_packing(&Region::unit_disc(), 300).unwrap();
    let ball = Disc::new(Point::new(2.0, -1.0), 0.5).unwrap();
    let small = build_packing(&Region::disc(ball), 300).unwrap();

    for (u, s) in unit.discs.iter().zip(&small.discs).take(4) {
        println!("unit {} r={:.4e}   scaled {} r={:.4e}", u.disc.center, u.disc.radius, s.disc.center, s.disc.radius);
    }

    let ratio = area_sum(small.absolute_discs()) / ball.area();
    println!("covered fraction {ratio:.6} <= 1/15 = {:.6}", 1.0 / 15.0);

    // a packing can be grown in place
    let mut grown = PackingSystem::from_discs(Region::unit_disc(), &[]);
    grown.extend(100).unwrap();
    grown.extend(200).unwrap();
    println!("grown to {} discs, same as built: {}", grown.len(), grown.discs == unit.discs);
}
