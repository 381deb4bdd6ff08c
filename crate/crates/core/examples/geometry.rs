// Planar primitives: gaps between discs, subtended angles, sectors and rays.

use nestpack::geometry::{
    disc_gap, ray_hits_disc, subtended_angle, unit_diff, Disc, Point, Sector, UnitDirection,
};

fn main() {
    let a = Disc::new(Point::new(-1.0, -1.0), 0.25).unwrap();
    let b = Disc::new(Point::new(-1.0, 0.0), 0.0625).unwrap();
    println!("gap(a, b) = {}", disc_gap(&a, &b));

    let unit = Disc::new(Point::ORIGIN, 1.0).unwrap();
    for d in [2.0, 10.0, 100.0] {
        let p = Point::new(d, 0.0);
        let theta = subtended_angle(&unit, p).unwrap();
        println!("seen from {p}: theta = {theta:.9}, pi r / dist = {:.9}", std::f64::consts::PI / d);
    }

    let u = Point::new(1.0, 0.0);
    let v = Point::new(1.0, 0.1);
    println!("unit_diff = {:.6} <= {:.6}", unit_diff(u, v).unwrap(), 2.0 / v.norm() * (u - v).norm());

    let s = Sector::new(Point::ORIGIN, UnitDirection::new(1.0, 0.0).unwrap(), 0.5, 1.0).unwrap();
    println!("sector half angle {:.6} rad, contains (0.5, 0.1): {}", s.half_angle(), s.contains(Point::new(0.5, 0.1)));

    let from = Point::new(3.0, 0.0);
    for deg in [150.0f64, 170.0, 180.0] {
        let dir = UnitDirection::from_angle(deg.to_radians());
        println!("ray at {deg} deg hits unit disc: {}", ray_hits_disc(from, dir, &unit));
    }
}
