// The cone geometry behind the porosity argument: every point z of the ball
// B(x - 6mr v, r) sees x and y in directions within 1/m of v.

use nestpack::analysis::{porosity_geometry_check, PorosityInstance};
use nestpack::geometry::{Point, UnitDirection};

fn main() {
    let x = Point::new(0.2, -0.1);
    let y = Point::new(0.2003, -0.0996);
    let v = UnitDirection::from_angle(1.0);
    for m in [1, 3, 10] {
        let inst = PorosityInstance::new(x, y, m, v).unwrap();
        let ball = inst.ball();
        let mut worst: f64 = 0.0;
        for k in 0..64 {
            let a = k as f64 / 64.0 * std::f64::consts::TAU;
            let z = ball.center + UnitDirection::from_angle(a).as_point() * (0.999 * ball.radius);
            let rep = porosity_geometry_check(&inst, z).unwrap();
            assert!(rep.passed());
            worst = worst.max(rep.diff_x.max(rep.diff_y));
        }
        println!("m = {m}: ball radius {:.3e}, worst direction gap {worst:.4} < {:.4}", inst.r, 1.0 / m as f64);
    }
}
