//! Nested packings `D_1 = S(R^2)`, `D_{k+1} = union of S(B) over B in D_k`,
//! truncated to a per-level budget, and the parity indicator of
//!
//! ```text
//! Z = union over m of ( union D_{2m-1} \ union D_{2m} ).
//! ```
//!
//! A point's value is the parity of the number of nested discs containing
//! it. Each disc is stored in the unit frame of its parent, so queries can be
//! posed in the frame of any disc of the tree ([`FrameView`]) without losing
//! precision to absolute coordinates.

use std::f64::consts::PI;
use std::ops::Range;

use thiserror::Error;

use crate::geometry::{Disc, Frame, GeometryError, Point, Region};
use crate::packing::{build_packing, pow2, PackedDisc, PackingError, PackingSystem};

pub const DEFAULT_DISC_CAP: usize = 1_000_000;

/// Relative tolerance of the boundary test used by the good-set proxy.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HierarchyError {
    #[error("level spec needs at least one level")]
    NoLevels,
    #[error("level {level} has a disc budget of zero")]
    ZeroCount { level: usize },
    #[error("construction would hold {total} discs, above the cap of {cap}")]
    CapExceeded { total: u128, cap: usize },
    #[error("packing failed at level {level}: {source}")]
    Packing { level: usize, source: PackingError },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no disc at level {level}, index {index}")]
    NoSuchDisc { level: usize, index: usize },
}

/// Per-level disc budgets: `m_1` discs in the plane, then `m_{k+1}` discs in
/// every level-`k` disc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSpec {
    counts: Vec<usize>,
}

impl LevelSpec {
    pub fn new(counts: Vec<usize>) -> Result<Self, HierarchyError> {
        if counts.is_empty() {
            return Err(HierarchyError::NoLevels);
        }
        if let Some(i) = counts.iter().position(|&m| m == 0) {
            return Err(HierarchyError::ZeroCount { level: i + 1 });
        }
        Ok(LevelSpec { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn levels(&self) -> usize {
        self.counts.len()
    }

    /// Number of discs a full build materializes.
    pub fn total_discs(&self) -> u128 {
        let mut total = 0u128;
        let mut layer = 1u128;
        for &m in &self.counts {
            layer = layer.saturating_mul(m as u128);
            total = total.saturating_add(layer);
        }
        total
    }
}

/// One disc of the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// 1-based generation.
    pub level: usize,
    pub parent: Option<usize>,
    /// Disc in the parent's unit frame; for level 1, in the root frame.
    pub local: Disc,
    /// Absolute disc, `parent.disc.center + parent.disc.radius * local`.
    /// Rounded, so only meaningful while the radius is well above the
    /// resolution of its coordinates.
    pub disc: Disc,
    pub seq_index: usize,
    /// Position within the packing of the parent.
    pub level_index: usize,
    pub children: Range<usize>,
}

impl Node {
    pub fn parity(&self) -> u8 {
        (self.level % 2) as u8
    }
}

/// Truncated hierarchy `D_1, ..., D_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscTree {
    pub(crate) root_region: Region,
    pub(crate) spec: LevelSpec,
    pub(crate) nodes: Vec<Node>,
    pub(crate) levels: Vec<Range<usize>>,
}

pub fn build_hierarchy(spec: &LevelSpec) -> Result<DiscTree, HierarchyError> {
    build_hierarchy_in(Region::Plane, spec, DEFAULT_DISC_CAP)
}

/// Builds the hierarchy with level 1 packed into `root` instead of the plane.
pub fn build_hierarchy_in(
    root: Region,
    spec: &LevelSpec,
    cap: usize,
) -> Result<DiscTree, HierarchyError> {
    let total = spec.total_discs();
    if total > cap as u128 {
        return Err(HierarchyError::CapExceeded { total, cap });
    }
    let mut nodes: Vec<Node> = Vec::with_capacity(total as usize);
    let mut levels = Vec::with_capacity(spec.levels());

    let top = build_packing(&root, spec.counts[0])
        .map_err(|source| HierarchyError::Packing { level: 1, source })?;
    for pd in &top.discs {
        nodes.push(Node {
            level: 1,
            parent: None,
            local: pd.local,
            disc: pd.disc,
            seq_index: pd.seq_index,
            level_index: pd.level_index,
            children: 0..0,
        });
    }
    levels.push(0..nodes.len());

    for (depth, &m) in spec.counts.iter().enumerate().skip(1) {
        let level = depth + 1;
        let parents = levels[depth - 1].clone();
        let start = nodes.len();
        for parent in parents {
            let pdisc = nodes[parent].disc;
            let ps = build_packing(&Region::disc(pdisc), m)
                .map_err(|source| HierarchyError::Packing { level, source })?;
            let first = nodes.len();
            for pd in &ps.discs {
                if !(pd.disc.radius >= f64::MIN_POSITIVE) {
                    return Err(HierarchyError::Packing {
                        level,
                        source: PackingError::RadiusUnderflow {
                            index: pd.level_index,
                        },
                    });
                }
                nodes.push(Node {
                    level,
                    parent: Some(parent),
                    local: pd.local,
                    disc: pd.disc,
                    seq_index: pd.seq_index,
                    level_index: pd.level_index,
                    children: 0..0,
                });
            }
            nodes[parent].children = first..nodes.len();
        }
        levels.push(start..nodes.len());
    }

    Ok(DiscTree {
        root_region: root,
        spec: spec.clone(),
        nodes,
        levels,
    })
}

/// Chain of nested discs containing a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationPath {
    /// Node ids, one per level starting at level 1.
    pub chain: Vec<usize>,
    /// True when the deepest disc reached sits on the deepest materialized
    /// level, so a deeper truncation could extend the chain.
    pub frontier: bool,
    /// The descent stopped on a boundary circle.
    pub boundary: bool,
}

impl LocationPath {
    pub fn depth(&self) -> usize {
        self.chain.len()
    }

    pub fn deepest(&self) -> Option<usize> {
        self.chain.last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    /// The deepest disc reached has all its children materialized and the
    /// point avoids them.
    Exact,
    /// The point lies in a disc of the deepest materialized level.
    Frontier,
}

impl Certainty {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certainty::Exact => "exact",
            Certainty::Frontier => "frontier",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChiValue {
    pub value: u8,
    pub certainty: Certainty,
}

/// Result of descending through the tree.
#[derive(Debug, Clone)]
pub(crate) struct Descent {
    pub path: LocationPath,
    /// The query point in the unit frame of the deepest disc reached (or of
    /// the root when the chain is empty).
    pub local: Point,
    /// Some examined boundary circle passes within the relative tolerance.
    pub near_boundary: bool,
}

impl DiscTree {
    pub fn root_region(&self) -> &Region {
        &self.root_region
    }

    pub fn spec(&self) -> &LevelSpec {
        &self.spec
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Node ids of level `k` (1-based); empty past the deepest level.
    pub fn level(&self, k: usize) -> Range<usize> {
        if k == 0 || k > self.levels.len() {
            return 0..0;
        }
        self.levels[k - 1].clone()
    }

    /// Node id of the `index`-th (0-based) disc of level `k`.
    pub fn node_at(&self, k: usize, index: usize) -> Result<usize, HierarchyError> {
        let range = self.level(k);
        if index < range.len() {
            Ok(range.start + index)
        } else {
            Err(HierarchyError::NoSuchDisc { level: k, index })
        }
    }

    pub fn children(&self, node: Option<usize>) -> Range<usize> {
        match node {
            None => self.level(1),
            Some(id) => self.nodes[id].children.clone(),
        }
    }

    /// Ancestors of `id` from level 1 down to and including `id`.
    pub fn lineage(&self, id: usize) -> Vec<usize> {
        let mut chain = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }

    pub fn root_frame(&self) -> FrameView<'_> {
        FrameView {
            tree: self,
            node: None,
        }
    }

    /// View of the tree in the unit frame of disc `id`.
    pub fn frame(&self, id: usize) -> FrameView<'_> {
        FrameView {
            tree: self,
            node: Some(id),
        }
    }

    /// `p` in the root frame's coordinates (the root disc's unit frame, or
    /// unchanged for the plane).
    fn to_root(&self, p: Point) -> Point {
        self.root_frame().to_absolute().to_local(p)
    }

    /// Chain of discs containing the absolute point `p`.
    pub fn locate(&self, p: Point) -> LocationPath {
        self.root_frame().locate(self.to_root(p))
    }

    pub fn chi_z(&self, p: Point) -> ChiValue {
        self.root_frame().chi_z(self.to_root(p))
    }

    pub fn e_proxy_contains(&self, p: Point, cutoff: usize) -> bool {
        self.root_frame().e_proxy_contains(self.to_root(p), cutoff)
    }

    /// Area of `union D_k`; the discs of a level are disjoint, so this is a
    /// plain sum.
    pub fn level_union_area(&self, k: usize) -> f64 {
        self.level(k)
            .map(|id| {
                let r = self.nodes[id].disc.radius;
                PI * r * r
            })
            .sum()
    }

    /// Radius of the `2^i` enlargement of node `id`, `i` its packing index,
    /// in the parent's unit frame.
    pub fn enlarged_local(&self, id: usize) -> Disc {
        let n = &self.nodes[id];
        n.local.scaled(pow2(n.level_index))
    }

    /// The packing of level 1 (`None`) or of the children of `parent`, as a
    /// standalone system.
    pub fn packing_system(&self, parent: Option<usize>) -> PackingSystem {
        let region = match parent {
            None => self.root_region,
            Some(p) => Region::disc(self.nodes[p].disc),
        };
        PackingSystem {
            region,
            discs: self
                .children(parent)
                .map(|id| {
                    let n = &self.nodes[id];
                    PackedDisc {
                        disc: n.disc,
                        local: n.local,
                        seq_index: n.seq_index,
                        level_index: n.level_index,
                    }
                })
                .collect(),
            enumeration_cursor: 0,
        }
    }
}

/// Deepest level whose union contains `p`, by testing every absolute disc.
/// Serves as the reference for [`DiscTree::locate`].
pub fn linear_scan_depth(tree: &DiscTree, p: Point) -> usize {
    tree.nodes
        .iter()
        .filter(|n| n.disc.contains(p, false))
        .map(|n| n.level)
        .max()
        .unwrap_or(0)
}

/// The tree seen from the unit frame of one of its discs (or from the root).
#[derive(Debug, Clone, Copy)]
pub struct FrameView<'t> {
    tree: &'t DiscTree,
    node: Option<usize>,
}

impl<'t> FrameView<'t> {
    pub fn tree(&self) -> &'t DiscTree {
        self.tree
    }

    pub fn node(&self) -> Option<usize> {
        self.node
    }

    /// Generation of the frame disc; 0 for the root.
    pub fn level(&self) -> usize {
        self.node.map_or(0, |id| self.tree.nodes[id].level)
    }

    /// Similarity from this frame to absolute coordinates. Approximate for
    /// discs below absolute resolution.
    pub fn to_absolute(&self) -> Frame {
        match self.node {
            None => match self.tree.root_region {
                Region::Plane => Frame::IDENTITY,
                r => r.frame(),
            },
            Some(id) => Frame::of_disc(&self.tree.nodes[id].disc),
        }
    }

    /// Absolute length of one local unit.
    pub fn scale(&self) -> f64 {
        self.to_absolute().scale
    }

    /// Moves `p` outward until it lies inside the frame disc (or reaches the
    /// root). Returns the frame reached and the point in it.
    fn lift(&self, mut p: Point) -> (Option<usize>, Point) {
        let mut node = self.node;
        while let Some(id) = node {
            if p.norm_sq() < 1.0 {
                break;
            }
            let n = &self.tree.nodes[id];
            p = n.local.center + p * n.local.radius;
            node = n.parent;
        }
        (node, p)
    }

    pub(crate) fn descend(&self, p: Point, tolerance: f64) -> Descent {
        let tree = self.tree;
        let (start, mut local) = self.lift(p);
        let mut chain = start.map(|id| tree.lineage(id)).unwrap_or_default();
        let mut children = tree.children(start);
        let mut boundary = false;
        let mut near_boundary = false;
        loop {
            let mut found = None;
            for id in children.clone() {
                let d = &tree.nodes[id].local;
                let d2 = local.dist_sq(d.center);
                let r2 = d.radius * d.radius;
                if (d2 - r2).abs() <= tolerance * r2 {
                    near_boundary = true;
                }
                if d2 < r2 {
                    found = Some(id);
                } else if d2 == r2 {
                    boundary = true;
                }
            }
            if boundary {
                break;
            }
            match found {
                None => break,
                Some(id) => {
                    let d = &tree.nodes[id].local;
                    local = Frame::of_disc(d).to_local(local);
                    chain.push(id);
                    children = tree.nodes[id].children.clone();
                }
            }
        }
        let frontier = !chain.is_empty() && chain.len() == tree.depth();
        Descent {
            path: LocationPath {
                chain,
                frontier,
                boundary,
            },
            local,
            near_boundary,
        }
    }

    /// Chain of discs containing `p` (given in this frame's coordinates).
    pub fn locate(&self, p: Point) -> LocationPath {
        self.descend(p, 0.0).path
    }

    pub fn chi_z(&self, p: Point) -> ChiValue {
        let path = self.locate(p);
        ChiValue {
            value: (path.depth() % 2) as u8,
            certainty: if path.frontier {
                Certainty::Frontier
            } else {
                Certainty::Exact
            },
        }
    }

    /// Finite stand-in for membership in the good set: `p` is on no boundary
    /// circle (up to [`BOUNDARY_TOLERANCE`]) and avoids the closed `2^i`
    /// enlargements with `i > cutoff` of the packing inside the deepest disc
    /// containing it (the top-level packing at depth 0).
    pub fn e_proxy_contains(&self, p: Point, cutoff: usize) -> bool {
        let descent = self.descend(p, BOUNDARY_TOLERANCE);
        if descent.near_boundary || descent.path.boundary {
            return false;
        }
        let packing = self.tree.children(descent.path.deepest());
        for id in packing {
            let n = &self.tree.nodes[id];
            if n.level_index <= cutoff {
                continue;
            }
            if self.tree.enlarged_local(id).contains(descent.local, true) {
                return false;
            }
        }
        true
    }

    /// Nodes strictly below the frame, each with its disc expressed in this
    /// frame's coordinates, in breadth-first order.
    pub fn descendants(&self) -> Vec<(usize, Disc)> {
        let tree = self.tree;
        let mut out = Vec::new();
        let mut queue: std::collections::VecDeque<(usize, Frame)> = tree
            .children(self.node)
            .map(|id| (id, Frame::IDENTITY))
            .collect();
        while let Some((id, outer)) = queue.pop_front() {
            let n = &tree.nodes[id];
            let here = outer.disc_to_outer(&n.local);
            out.push((id, here));
            let inner = outer.compose(&Frame::of_disc(&n.local));
            for c in n.children.clone() {
                queue.push_back((c, inner));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::SAFETY_SHRINK;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const S: f64 = SAFETY_SHRINK;

    fn tree(counts: &[usize]) -> DiscTree {
        build_hierarchy(&LevelSpec::new(counts.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn single_disc_tree() {
        let t = tree(&[1]);
        assert_eq!(t.len(), 1);
        let n = t.node(0);
        assert_eq!(n.disc, Disc::new(Point::new(-1.0, -1.0), 0.25 * S).unwrap());
        assert!(n.children.is_empty());
    }

    #[test]
    fn one_child() {
        let t = tree(&[1, 1]);
        assert_eq!(t.len(), 2);
        let child = t.node(1);
        assert_eq!(child.parent, Some(0));
        // first dense point of the parent is its center, radius a quarter of it
        assert_eq!(child.local, Disc::new(Point::ORIGIN, 0.25 * S).unwrap());
        assert_eq!(child.disc.center, Point::new(-1.0, -1.0));
        assert_eq!(child.disc.radius, 0.25 * S * 0.25 * S);
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(LevelSpec::new(vec![]), Err(HierarchyError::NoLevels));
        assert_eq!(
            LevelSpec::new(vec![2, 0]),
            Err(HierarchyError::ZeroCount { level: 2 })
        );
        let big = LevelSpec::new(vec![1000, 1000]).unwrap();
        assert!(matches!(
            build_hierarchy(&big),
            Err(HierarchyError::CapExceeded { .. })
        ));
    }

    #[test]
    fn locate_examples() {
        let t = tree(&[20, 3]);
        assert_eq!(t.locate(Point::new(50.0, 50.0)).depth(), 0);
        // the center of a level-1 disc whose children avoid it: none here,
        // child 1 always sits at the center, so use a 1-level tree
        let flat = tree(&[20]);
        let c = flat.node(3).disc.center;
        let path = flat.locate(c);
        assert_eq!(path.chain, vec![3]);
        assert!(path.frontier);
    }

    #[test]
    fn chi_examples() {
        let t = tree(&[10, 4]);
        let far = t.chi_z(Point::new(50.0, 50.0));
        assert_eq!((far.value, far.certainty), (0, Certainty::Exact));

        // a point in disc 0 but outside its children
        let d = t.node(0).disc;
        let p = Point::new(d.center.x + 0.6 * d.radius, d.center.y + 0.6 * d.radius);
        assert_eq!(t.locate(p).depth(), 1);
        let v = t.chi_z(p);
        assert_eq!((v.value, v.certainty), (1, Certainty::Exact));

        let v = t.chi_z(d.center);
        assert_eq!((v.value, v.certainty), (0, Certainty::Frontier));
    }

    #[test]
    fn boundary_stops_descent() {
        let t = tree(&[3]);
        let p = Point::new(-1.0 + 0.25 * S, -1.0);
        let path = t.locate(p);
        // -1 + r may round; require either a clean boundary hit or a miss
        assert!(path.depth() <= 1);
        let exact = Point::new(-1.0, 0.0 + 0.0625 * S);
        let path = t.locate(exact);
        assert!(path.boundary);
        assert_eq!(path.depth(), 0);
        assert!(!t.e_proxy_contains(exact, 1));
    }

    #[test]
    fn locate_matches_linear_scan() {
        let t = tree(&[40, 6, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let p = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            assert_eq!(t.locate(p).depth(), linear_scan_depth(&t, p), "{p}");
        }
        // points sampled inside discs exercise deep descents
        for id in 0..t.len() {
            let d = t.node(id).disc;
            for _ in 0..5 {
                let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let s: f64 = rng.gen_range(0.0..1.0);
                let p = Point::new(
                    d.center.x + d.radius * s * a.cos(),
                    d.center.y + d.radius * s * a.sin(),
                );
                if d.radius > 1e-9 {
                    assert_eq!(t.locate(p).depth(), linear_scan_depth(&t, p), "{p}");
                }
            }
        }
    }

    #[test]
    fn framed_queries_agree_with_root() {
        let t = tree(&[8, 4, 3]);
        let id = t.node_at(2, 5).unwrap();
        let frame = t.frame(id);
        let abs = frame.to_absolute();
        for p in [Point::new(0.3, -0.2), Point::new(0.0, 0.0), Point::new(-0.7, 0.1)] {
            let framed = frame.locate(p);
            let root = t.locate(abs.to_outer(p));
            assert_eq!(framed.chain, root.chain);
        }
        // outside the frame disc the view lifts to the parent
        let outside = Point::new(1.5, 0.0);
        assert_eq!(frame.locate(outside).chain, t.locate(abs.to_outer(outside)).chain);
    }

    #[test]
    fn deep_frames_resolve_tiny_discs() {
        // the 40th level-1 disc has radius about 4^-40, far below the
        // spacing of doubles near its center
        let t = tree(&[40, 3, 2]);
        let id = t.node_at(1, 39).unwrap();
        assert!(t.node(id).disc.radius < 1e-20);
        let frame = t.frame(id);
        let v = frame.chi_z(Point::new(0.6, 0.0));
        assert_eq!(v.value, 1);
        let v = frame.chi_z(Point::new(0.1, 0.0));
        assert_eq!((v.value, v.certainty), (0, Certainty::Exact));
        let v = frame.chi_z(Point::ORIGIN);
        assert_eq!((v.value, v.certainty), (1, Certainty::Frontier));
        assert_eq!(frame.locate(Point::ORIGIN).depth(), 3);
    }

    #[test]
    fn level_area_examples() {
        let t = tree(&[1]);
        assert_eq!(t.level_union_area(1), PI * (0.25 * S) * (0.25 * S));
        assert_eq!(t.level_union_area(2), 0.0);
        let t = tree(&[30, 8, 4]);
        for k in 1..3 {
            assert!(t.level_union_area(k + 1) <= t.level_union_area(k) / 15.0);
        }
    }

    #[test]
    fn nesting_holds_in_local_frames() {
        let t = tree(&[25, 6, 3]);
        for n in t.nodes() {
            if n.parent.is_some() {
                assert!(n.local.center.norm() + n.local.radius < 1.0);
            }
        }
    }

    #[test]
    fn e_proxy_examples() {
        let t = tree(&[6, 3]);
        assert!(t.e_proxy_contains(Point::new(50.0, 50.0), 1));
        // inside the enlargement of B_3 (index 3 > cutoff 2) but outside B_3
        let b3 = t.node(2).disc;
        let p = Point::new(b3.center.x + 3.0 * b3.radius, b3.center.y);
        assert_eq!(t.locate(p).depth(), 0);
        assert!(!t.e_proxy_contains(p, 2));
        assert!(t.e_proxy_contains(p, 3));
    }

    #[test]
    fn descendants_in_frame_coordinates() {
        let t = tree(&[4, 3, 2]);
        let frame = t.frame(0);
        let desc = frame.descendants();
        assert_eq!(desc.len(), 3 + 6);
        let abs = frame.to_absolute();
        for (id, d) in desc {
            let want = t.node(id).disc;
            let got = abs.disc_to_outer(&d);
            assert!((got.radius - want.radius).abs() <= 1e-15 * want.radius);
            assert!(got.center.dist(want.center) <= 1e-15);
        }
    }

    #[test]
    fn disc_root_queries_take_absolute_points() {
        let root = Region::Disc { center: Point::new(-1.0, 2.0), radius: 0.5 };
        let t = build_hierarchy_in(root, &LevelSpec::new(vec![40, 3]).unwrap(), 1000).unwrap();
        let first = t.node(0).disc;
        assert_eq!(t.chi_z(first.center + Point::new(0.0, first.radius * 0.9)).value, 1);
        for i in 0..400 {
            let p = Point::new(-1.5 + (i % 20) as f64 * 0.05, 1.5 + (i / 20) as f64 * 0.05);
            assert_eq!(t.locate(p).depth(), linear_scan_depth(&t, p), "{p}");
        }
    }
}
