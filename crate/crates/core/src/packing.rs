//! The inductive packing operator `S(G)`.
//!
//! Given an open region `G` (the plane or a disc) and a dense sequence
//! `x_1, x_2, ...` in `G`, the packing places `B_1 = B(x_1, r_1)` and then
//! repeatedly centers the next disc at the first sequence point outside the
//! closure of everything placed so far, with radius
//!
//! ```text
//! r_1     = min{ 1/4, diam G / 8, dist(x_1, R^2 \ G) / 2 }
//! r_{k+1} = min{ min{1, diam G / 2} / 4^(k+1),
//!                dist(x_{n_{k+1}}, (R^2 \ G) u B_1 u ... u B_k) / 2 }
//! ```
//!
//! Every computation runs in the region's unit frame (the identity for the
//! plane, `p -> c + R p` for a disc region), so a packing of a very small
//! disc is exactly as well-conditioned as a packing of the unit disc. The
//! absolute discs are derived from the local ones.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{dist_to_region_complement, Disc, Frame, GeometryError, Point, Region};

/// Factor applied to every radius before it is stored, absorbing rounding in
/// the strict disjointness and containment invariants.
pub const SAFETY_SHRINK: f64 = 1.0 - 1.0 / (1u64 << 20) as f64;

/// Maximum number of dense candidates examined while searching for the next
/// center.
pub const SCAN_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PackingError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("a packing needs at least one disc")]
    EmptyPacking,
    #[error("dense index must be at least 1")]
    ZeroIndex,
    #[error("no uncovered dense point among the first {0} candidates")]
    ScanLimit(usize),
    #[error("point ({x}, {y}) lies in the closure of a packed disc")]
    Covered { x: f64, y: f64 },
    #[error("radius of disc {index} underflows double precision")]
    RadiusUnderflow { index: usize },
}

/// Domain of a dense enumeration, in unit-frame coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    Plane,
    UnitDisc,
}

impl Domain {
    fn of(region: &Region) -> Domain {
        match region {
            Region::Plane => Domain::Plane,
            Region::Disc { .. } => Domain::UnitDisc,
        }
    }
}

/// Deterministic dyadic enumeration of a dense subset of the plane or of the
/// open unit disc.
///
/// Level `l = 0, 1, 2, ...` contributes the grid points `(a, b) / 2^l` inside
/// the window `[-2^l, 2^l]^2`, in lexicographic order of `(x, y)`, minus the
/// points already produced by level `l - 1`. Points outside the domain are
/// filtered out.
#[derive(Debug, Clone)]
pub struct DenseSequence {
    domain: Domain,
    level: u32,
    a: i64,
    b: i64,
    b_max: i64,
    a_max: i64,
}

impl DenseSequence {
    /// Enumeration for `region`, expressed in the region's unit frame.
    pub fn local(region: &Region) -> Self {
        let mut seq = DenseSequence {
            domain: Domain::of(region),
            level: 0,
            a: 0,
            b: 0,
            b_max: 0,
            a_max: 0,
        };
        seq.start_level(0);
        seq
    }

    fn start_level(&mut self, level: u32) {
        self.level = level;
        let window = 1i64 << (2 * level);
        self.a_max = match self.domain {
            Domain::Plane => window,
            Domain::UnitDisc => (1i64 << level) - 1,
        };
        self.a = -self.a_max;
        self.start_column();
    }

    fn start_column(&mut self) {
        let window = 1i64 << (2 * self.level);
        self.b_max = match self.domain {
            Domain::Plane => window,
            Domain::UnitDisc => {
                // largest b with a^2 + b^2 < 4^level
                let limit = 1i128 << (2 * self.level);
                let a2 = (self.a as i128) * (self.a as i128);
                let rem = limit - a2;
                if rem <= 0 {
                    -1
                } else {
                    let mut b = ((rem as f64).sqrt()) as i128 + 1;
                    while b * b >= rem {
                        b -= 1;
                    }
                    b as i64
                }
            }
        };
        self.b = -self.b_max;
    }

    fn is_new(&self, a: i64, b: i64) -> bool {
        if self.level == 0 {
            return true;
        }
        if a % 2 != 0 || b % 2 != 0 {
            return true;
        }
        match self.domain {
            Domain::UnitDisc => false,
            Domain::Plane => {
                let prev_window = 2i64 << (2 * (self.level - 1));
                a.abs() > prev_window || b.abs() > prev_window
            }
        }
    }
}

impl Iterator for DenseSequence {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        loop {
            if self.a > self.a_max {
                self.start_level(self.level + 1);
                continue;
            }
            if self.b > self.b_max {
                self.a += 1;
                if self.a <= self.a_max {
                    self.start_column();
                }
                continue;
            }
            let (a, b) = (self.a, self.b);
            self.b += 1;
            if self.is_new(a, b) {
                let step = (-(self.level as f64)).exp2();
                return Some(Point::new(a as f64 * step, b as f64 * step));
            }
        }
    }
}

/// The `n`-th (1-based) point of the dense sequence of `g`.
pub fn dense_point(g: &Region, n: usize) -> Result<Point, PackingError> {
    if n == 0 {
        return Err(PackingError::ZeroIndex);
    }
    let local = DenseSequence::local(g)
        .nth(n - 1)
        .expect("dense sequence is infinite");
    Ok(g.frame().to_outer(local))
}

/// One disc of a packing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackedDisc {
    /// Absolute disc.
    pub disc: Disc,
    /// The same disc in the region's unit frame.
    pub local: Disc,
    /// Index `n_k` of the dense point used as center.
    pub seq_index: usize,
    /// Position `k` within the packing, starting at 1.
    pub level_index: usize,
}

/// A finite prefix of `S(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingSystem {
    pub region: Region,
    pub discs: Vec<PackedDisc>,
    /// Last dense index examined while building.
    pub enumeration_cursor: usize,
}

/// Radius caps of the construction, rescaled to the region's unit frame.
#[derive(Debug, Clone, Copy)]
struct LocalRules {
    domain: Domain,
    first_cap: f64,
    /// `min{1, diam G / 2}` divided by the frame scale.
    decay_base: f64,
}

impl LocalRules {
    fn new(region: &Region) -> Self {
        let scale = region.frame().scale;
        let diam = region.diameter();
        LocalRules {
            domain: Domain::of(region),
            first_cap: (0.25f64).min(diam / 8.0) / scale,
            decay_base: (1.0f64).min(diam / 2.0) / scale,
        }
    }

    fn complement_dist(&self, p: Point) -> f64 {
        match self.domain {
            Domain::Plane => f64::INFINITY,
            Domain::UnitDisc => 1.0 - p.norm(),
        }
    }

    fn inside(&self, p: Point) -> bool {
        match self.domain {
            Domain::Plane => p.is_finite(),
            Domain::UnitDisc => p.norm_sq() < 1.0,
        }
    }

    fn first_radius(&self, x1: Point) -> f64 {
        self.first_cap.min(0.5 * self.complement_dist(x1))
    }

    /// Radius of disc `k + 1` given the `k` discs placed so far.
    fn next_radius(&self, placed: &[Disc], center: Point) -> f64 {
        let k = placed.len() as i32;
        let cap = self.decay_base * (-2.0 * (k + 1) as f64).exp2();
        let mut dist = self.complement_dist(center);
        for d in placed {
            dist = dist.min(center.dist(d.center) - d.radius);
        }
        cap.min(0.5 * dist)
    }
}

fn covered(placed: &[Disc], p: Point) -> bool {
    placed.iter().any(|d| d.contains(p, true))
}

/// `r_1` for a first center `x1` inside `g`.
pub fn first_radius(g: &Region, x1: Point) -> Result<f64, PackingError> {
    dist_to_region_complement(g, x1)?;
    let frame = g.frame();
    let rules = LocalRules::new(g);
    Ok(rules.first_radius(frame.to_local(x1)) * frame.scale)
}

/// Smallest dense index whose point avoids the closure of every disc in
/// `current`. Scans from index 1.
pub fn next_center_index(g: &Region, current: &PackingSystem) -> Result<usize, PackingError> {
    let placed: Vec<Disc> = current.discs.iter().map(|d| d.local).collect();
    scan_uncovered(g, &placed, 1).map(|(n, _)| n)
}

fn scan_uncovered(
    g: &Region,
    placed: &[Disc],
    from: usize,
) -> Result<(usize, Point), PackingError> {
    let seq = DenseSequence::local(g).enumerate().skip(from - 1);
    for (i, p) in seq.take(SCAN_LIMIT) {
        if !covered(placed, p) {
            return Ok((i + 1, p));
        }
    }
    Err(PackingError::ScanLimit(SCAN_LIMIT))
}

/// `r_{k+1}` for a candidate `center`, where `current` holds `k` discs.
pub fn next_radius(
    g: &Region,
    current: &PackingSystem,
    center: Point,
) -> Result<f64, PackingError> {
    dist_to_region_complement(g, center)?;
    let frame = g.frame();
    let local = frame.to_local(center);
    let placed: Vec<Disc> = current.discs.iter().map(|d| d.local).collect();
    if covered(&placed, local) {
        return Err(PackingError::Covered {
            x: center.x,
            y: center.y,
        });
    }
    Ok(LocalRules::new(g).next_radius(&placed, local) * frame.scale)
}

impl PackingSystem {
    /// Wraps already-placed absolute discs, e.g. to evaluate the rules on a
    /// hand-made configuration. Sequence indices are left at 0.
    pub fn from_discs(region: Region, discs: &[Disc]) -> Self {
        let frame = region.frame();
        let discs = discs
            .iter()
            .enumerate()
            .map(|(i, d)| PackedDisc {
                disc: *d,
                local: Disc {
                    center: frame.to_local(d.center),
                    radius: d.radius / frame.scale,
                },
                seq_index: 0,
                level_index: i + 1,
            })
            .collect();
        PackingSystem {
            region,
            discs,
            enumeration_cursor: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.discs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discs.is_empty()
    }

    pub fn absolute_discs(&self) -> impl Iterator<Item = &Disc> + '_ {
        self.discs.iter().map(|d| &d.disc)
    }

    pub fn local_discs(&self) -> impl Iterator<Item = &Disc> + '_ {
        self.discs.iter().map(|d| &d.local)
    }

    /// Continues the induction by `additional` discs. Building `n` and then
    /// extending by `m` yields the same system as building `n + m`.
    pub fn extend(&mut self, additional: usize) -> Result<(), PackingError> {
        let frame = self.region.frame();
        let rules = LocalRules::new(&self.region);
        let mut placed: Vec<Disc> = self.discs.iter().map(|d| d.local).collect();
        for _ in 0..additional {
            let (index, center, radius) = if placed.is_empty() {
                let x1 = DenseSequence::local(&self.region)
                    .next()
                    .expect("dense sequence is infinite");
                debug_assert!(rules.inside(x1));
                (1, x1, rules.first_radius(x1))
            } else {
                // Covered points stay covered, so the scan can resume after
                // the previous center.
                let (n, p) = scan_uncovered(&self.region, &placed, self.enumeration_cursor + 1)?;
                (n, p, rules.next_radius(&placed, p))
            };
            let level_index = placed.len() + 1;
            let stored = radius * SAFETY_SHRINK;
            let local = Disc {
                center,
                radius: stored,
            };
            let disc = frame.disc_to_outer(&local);
            if !(stored >= f64::MIN_POSITIVE && disc.radius >= f64::MIN_POSITIVE) {
                return Err(PackingError::RadiusUnderflow { index: level_index });
            }
            placed.push(local);
            self.discs.push(PackedDisc {
                disc,
                local,
                seq_index: index,
                level_index,
            });
            self.enumeration_cursor = index;
        }
        Ok(())
    }
}

/// The first `count` discs of `S(g)`.
pub fn build_packing(g: &Region, count: usize) -> Result<PackingSystem, PackingError> {
    if count == 0 {
        return Err(PackingError::EmptyPacking);
    }
    if let Region::Disc { center, radius } = *g {
        Disc::new(center, radius)?;
    }
    let mut ps = PackingSystem {
        region: *g,
        discs: Vec::with_capacity(count),
        enumeration_cursor: 0,
    };
    ps.extend(count)?;
    Ok(ps)
}

/// `E(G)`: the `i`-th packed disc scaled by `2^i`, taken closed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnlargedSystem {
    /// Absolute closed discs.
    pub discs: Vec<Disc>,
    /// The same discs in the packing's unit frame.
    pub local: Vec<Disc>,
}

impl EnlargedSystem {
    pub fn len(&self) -> usize {
        self.discs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discs.is_empty()
    }
}

/// `2^i` as an exact double.
pub fn pow2(i: usize) -> f64 {
    (i as f64).exp2()
}

pub fn enlarge(ps: &PackingSystem) -> EnlargedSystem {
    let mut out = EnlargedSystem::default();
    for (i, d) in ps.discs.iter().enumerate() {
        let factor = pow2(i + 1);
        out.discs.push(d.disc.scaled(factor));
        out.local.push(d.local.scaled(factor));
    }
    out
}

/// Total area of a list of discs.
pub fn area_sum<'a>(discs: impl IntoIterator<Item = &'a Disc>) -> f64 {
    discs.into_iter().map(|d| PI * d.radius * d.radius).sum()
}

/// Frame of the `i`-th disc of a packing, relative to the packing's own frame.
pub fn disc_frame(d: &PackedDisc) -> Frame {
    Frame::of_disc(&d.local)
}
