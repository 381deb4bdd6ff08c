use proptest::prelude::*;

use nestpack::analysis::directional_quotients;
use nestpack::geometry::{
    disc_gap, ray_hits_disc, sector_contains, subtended_angle, unit_diff, Disc, Point, Sector,
    UnitDirection,
};
use nestpack::hierarchy::{build_hierarchy, linear_scan_depth, LevelSpec};

fn coord() -> impl Strategy<Value = f64> {
    -100.0..100.0f64
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

fn nonzero() -> impl Strategy<Value = Point> {
    point().prop_filter("nonzero", |p| p.norm() > 1e-6)
}

fn disc() -> impl Strategy<Value = Disc> {
    (point(), 1e-3..50.0f64).prop_map(|(c, r)| Disc::new(c, r).unwrap())
}

fn direction() -> impl Strategy<Value = UnitDirection> {
    (0.0..std::f64::consts::TAU).prop_map(UnitDirection::from_angle)
}

proptest! {
    #[test]
    fn unit_diff_bound(u in nonzero(), v in nonzero()) {
        let lhs = unit_diff(u, v).unwrap();
        prop_assert!(lhs <= 2.0 / v.norm() * (u - v).norm() + 1e-12);
        prop_assert!(lhs <= 2.0 + 1e-15);
    }

    #[test]
    fn subtended_angle_bound(d in disc(), dir in direction(), t in 1.0001..1e4f64) {
        let p = d.center + dir.as_point() * (d.radius * t);
        let theta = subtended_angle(&d, p).unwrap();
        prop_assert!(theta < std::f64::consts::PI * d.radius / p.dist(d.center));
    }

    #[test]
    fn gap_is_symmetric(a in disc(), b in disc()) {
        prop_assert_eq!(disc_gap(&a, &b), disc_gap(&b, &a));
    }

    #[test]
    fn sector_lies_in_its_disc(
        vertex in point(),
        axis in direction(),
        opening in 0.01..2.0f64,
        radius in 0.01..50.0f64,
        p in point(),
    ) {
        let s = Sector::new(vertex, axis, opening, radius).unwrap();
        if sector_contains(&s, p) {
            prop_assert!(p.dist(vertex) < radius);
        }
    }

    #[test]
    fn ray_hits_iff_within_half_angle(d in disc(), from in direction(), t in 1.01..100.0f64, dir in direction()) {
        let origin = d.center + from.as_point() * (d.radius * t);
        let half = subtended_angle(&d, origin).unwrap() / 2.0;
        let to_center = UnitDirection::normalize(d.center - origin).unwrap();
        let off = (dir.as_point().dot(to_center.as_point()).clamp(-1.0, 1.0)).acos();
        // stay clear of tangency, where rounding decides
        prop_assume!((off - half).abs() > 1e-9);
        prop_assert_eq!(ray_hits_disc(origin, dir, &d), off < half);
    }

    #[test]
    fn quotients_scale_with_dyadic_zoom(
        x in point(),
        dir in direction(),
        c in point(),
        r in 0.5..50.0f64,
        e in -8i32..8,
    ) {
        let lambda = (e as f64).exp2();
        let d = Disc::new(c, r).unwrap();
        let f = |p: Point| d.contains(p, false) as u8;
        let g = |p: Point| d.contains(p * (1.0 / lambda), false) as u8;
        let a = directional_quotients(&f, x, dir, 1e-6, 10.0, 12).unwrap();
        let b = directional_quotients(&g, x * lambda, dir, 1e-6 * lambda, 10.0 * lambda, 12).unwrap();
        for (qa, qb) in a.iter().zip(&b) {
            prop_assert_eq!(qa.quotient, qb.quotient * lambda);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descent_matches_scan_on_small_trees(
        m1 in 1usize..30,
        m2 in 1usize..5,
        m3 in 1usize..3,
        pts in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 50),
    ) {
        let t = build_hierarchy(&LevelSpec::new(vec![m1, m2, m3]).unwrap()).unwrap();
        for (x, y) in pts {
            let p = Point::new(x, y);
            prop_assert_eq!(t.chi_z(p).value as usize, linear_scan_depth(&t, p) % 2);
        }
    }
}
