// The greedy packing of the plane: radii, gaps and the enlarged system.

use nestpack::geometry::Region;
use nestpack::packing::{area_sum, build_packing, dense_point, enlarge};

fn main() {
    println!("first dense points:");
    for n in 1..=6 {
        println!("  x_{n} = {}", dense_point(&Region::Plane, n).unwrap());
    }

    let ps = build_packing(&Region::Plane, 200).unwrap();
    for d in ps.discs.iter().take(6) {
        println!(
            "B_{} = B({}, {:.6e}), dense index {}",
            d.level_index, d.disc.center, d.disc.radius, d.seq_index
        );
    }

    let es = enlarge(&ps);
    println!("area(S) = {:.9}", area_sum(ps.absolute_discs()));
    println!("area(E) = {:.9} <= pi/3 = {:.9}", area_sum(&es.discs), std::f64::consts::PI / 3.0);
}
