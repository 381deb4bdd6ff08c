// Draw a two-level tree, with the enlarged discs dashed, to packing.svg.

use nestpack::hierarchy::{build_hierarchy, LevelSpec};
use nestpack::render::{render_svg, RenderOptions};

fn main() {
    let tree = build_hierarchy(&LevelSpec::new(vec![30, 12]).unwrap()).unwrap();
    let svg = render_svg(&tree, &RenderOptions { show_enlarged: true, ..Default::default() });
    let out = std::env::args().nth(1).unwrap_or_else(|| "packing.svg".into());
    std::fs::write(&out, svg).unwrap();
    println!("wrote {} discs to {out}", tree.len());
}
