// Nested packings and the parity set they define.

use nestpack::geometry::Point;
use nestpack::hierarchy::{build_hierarchy, linear_scan_depth, LevelSpec};

fn main() {
    let tree = build_hierarchy(&LevelSpec::new(vec![60, 8, 4, 2]).unwrap()).unwrap();
    for k in 1..=tree.depth() {
        println!("level {k}: {} discs, area {:.6e}", tree.level(k).len(), tree.level_union_area(k));
    }

    let b1 = tree.node(0).disc;
    for p in [
        Point::new(50.0, 50.0),
        b1.center + Point::new(0.0, 0.9 * b1.radius),
        b1.center,
    ] {
        let chi = tree.chi_z(p);
        println!(
            "chi_Z{p} = {} ({}), depth {} by exhaustive scan",
            chi.value,
            chi.certainty.as_str(),
            linear_scan_depth(&tree, p)
        );
    }

    // the 60th top-level disc is far below absolute resolution; its own
    // frame still resolves it
    let id = tree.node_at(1, 59).unwrap();
    let view = tree.frame(id);
    println!("disc 1:60 has radius {:.3e}", tree.node(id).disc.radius);
    println!("in its frame, chi at the rim = {}", view.chi_z(Point::new(0.0, -0.99)).value);
}
