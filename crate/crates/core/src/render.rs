//! Static SVG pictures of a tree: odd levels filled, even levels drawn as
//! holes, parents before children.

use std::fmt::Write;

use crate::geometry::Disc;
use crate::hierarchy::DiscTree;
use crate::packing::pow2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// Also draw the enlarged discs `2^i r_i` as dashed outlines.
    pub show_enlarged: bool,
    /// Width of the picture in pixels; the height follows the aspect ratio.
    pub width: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            show_enlarged: false,
            width: 800.0,
        }
    }
}

const FILL: &str = "#1f3b73";
const HOLE: &str = "#ffffff";
const ENLARGED: &str = "#c0392b";

fn bounds<'a>(discs: impl Iterator<Item = &'a Disc>) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for d in discs {
        b.0 = b.0.min(d.center.x - d.radius);
        b.1 = b.1.min(d.center.y - d.radius);
        b.2 = b.2.max(d.center.x + d.radius);
        b.3 = b.3.max(d.center.y + d.radius);
    }
    b
}

/// Renders the tree as an SVG 1.1 document. The y axis points up, as in the
/// plane.
pub fn render_svg(tree: &DiscTree, opts: &RenderOptions) -> String {
    let enlarged: Vec<Disc> = if opts.show_enlarged {
        tree.nodes()
            .iter()
            .map(|n| Disc {
                center: n.disc.center,
                radius: n.disc.radius * pow2(n.level_index),
            })
            .collect()
    } else {
        Vec::new()
    };
    let (x0, y0, x1, y1) = bounds(tree.nodes().iter().map(|n| &n.disc).chain(&enlarged));
    let (w, h) = ((x1 - x0).max(f64::MIN_POSITIVE), (y1 - y0).max(f64::MIN_POSITIVE));
    let margin = 0.05 * w.max(h);
    // flip y: svg rows grow downward
    let (vx, vy, vw, vh) = (x0 - margin, -y1 - margin, w + 2.0 * margin, h + 2.0 * margin);
    let stroke = 0.002 * vw.max(vh);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{vx} {vy} {vw} {vh}\">",
        opts.width,
        opts.width * vh / vw
    );
    let _ = writeln!(s, "<rect x=\"{vx}\" y=\"{vy}\" width=\"{vw}\" height=\"{vh}\" fill=\"#f4f4f4\"/>");
    // node ids are already level by level, so parents come first
    for n in tree.nodes() {
        let fill = if n.level % 2 == 1 { FILL } else { HOLE };
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\" stroke=\"none\" data-level=\"{}\"/>",
            n.disc.center.x, -n.disc.center.y, n.disc.radius, n.level
        );
    }
    for d in &enlarged {
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{ENLARGED}\" stroke-width=\"{stroke}\" stroke-dasharray=\"{} {}\"/>",
            d.center.x,
            -d.center.y,
            d.radius,
            4.0 * stroke,
            2.0 * stroke
        );
    }
    s.push_str("</svg>\n");
    s
}
