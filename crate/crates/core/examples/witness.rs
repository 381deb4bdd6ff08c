// Points of opposite parity arbitrarily close to a good point: the search
// runs in the frame of each disc, so eps can be the disc's own radius.

use nestpack::analysis::{first_proxy_point, relative_nonlipschitz_witness};
use nestpack::hierarchy::{build_hierarchy, LevelSpec};

fn main() {
    let tree = build_hierarchy(&LevelSpec::new(vec![60, 8, 4, 2]).unwrap()).unwrap();
    for (k, i) in [(1, 1), (1, 60), (2, 5), (3, 100)] {
        let id = tree.node_at(k, i - 1).unwrap();
        let view = tree.frame(id);
        let x = first_proxy_point(&view, 2, 4096).expect("a good point");
        match relative_nonlipschitz_witness(&view, x, 1.0, 2) {
            Ok(w) => println!(
                "disc {k}:{i} (r = {:.3e}): chi {} -> {} at distance {:.3e}, quotient {:.3e} >= 1/r",
                tree.node(id).disc.radius,
                w.chi_x,
                w.chi_y,
                w.absolute_distance(),
                w.absolute_quotient()
            ),
            Err(e) => println!("disc {k}:{i}: {e}"),
        }
    }
}
