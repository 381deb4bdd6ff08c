//! Numerical probes of the analytic claims around the construction.
//!
//! Every probe here evaluates finitely many quantities whose behaviour the
//! construction controls only in the limit (`limsup` over steps, directions
//! or nearby points). The reports are estimates over a finite sample and are
//! labelled as such.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{
    sector_contains, subtended_angle, unit_diff, Disc, GeometryError, Point, Sector,
    UnitDirection,
};
use crate::hierarchy::{DiscTree, FrameView};
use crate::packing::{EnlargedSystem, PackingSystem};

/// Halton points tried per candidate disc in the witness search.
pub const WITNESS_SAMPLES_PER_DISC: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("point ({x}, {y}) lies in the closure of packed disc {index}")]
    InsidePackedDisc { x: f64, y: f64, index: usize },
    #[error("packing and enlarged system differ in length ({0} vs {1})")]
    MismatchedSystems(usize, usize),
    #[error("step range must satisfy 0 < h_min < h_max, got [{0}, {1}]")]
    InvalidStepRange(f64, f64),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("sector vertex {vertex} differs from probe point {x}")]
    VertexMismatch { vertex: Point, x: Point },
    #[error("porosity instance needs y != x and m >= 1")]
    DegenerateInstance,
    #[error("point ({x}, {y}) is not inside the open ball of the instance")]
    OutsideBall { x: f64, y: f64 },
    #[error(transparent)]
    NoWitness(#[from] TruncationMiss),
}

/// A function on the plane with values in `{0, 1}`.
pub trait Indicator {
    fn value(&self, p: Point) -> u8;
}

impl<F: Fn(Point) -> u8> Indicator for F {
    fn value(&self, p: Point) -> u8 {
        self(p)
    }
}

impl Indicator for DiscTree {
    fn value(&self, p: Point) -> u8 {
        self.chi_z(p).value
    }
}

impl Indicator for FrameView<'_> {
    fn value(&self, p: Point) -> u8 {
        self.chi_z(p).value
    }
}

/// Low-discrepancy points of the open unit disc: the Halton sequence in
/// bases 2 and 3 on `[-1, 1]^2`, rejected outside the disc.
#[derive(Debug, Clone, Default)]
pub struct DiscSamples {
    index: u64,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut f = inv;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

impl Iterator for DiscSamples {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        loop {
            self.index += 1;
            let p = Point::new(
                2.0 * radical_inverse(self.index, 2) - 1.0,
                2.0 * radical_inverse(self.index, 3) - 1.0,
            );
            if p.norm_sq() < 1.0 {
                return Some(p);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Blocked directions

#[derive(Debug, Clone, PartialEq)]
pub struct BlockedTerm {
    /// 1-based index `i` of the packed disc.
    pub index: usize,
    pub angle: f64,
    /// `pi / 2^i`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlockedReport {
    /// Sum of the subtended angles over the non-exempt discs.
    pub total: f64,
    pub terms: Vec<BlockedTerm>,
    /// Indices whose enlarged disc contains the viewpoint.
    pub exempt: Vec<usize>,
    /// Indices where the per-disc bound failed.
    pub violations: Vec<usize>,
}

impl BlockedReport {
    /// `pi * sum_{i <= n} 2^-i` for the prefix length `n`.
    pub fn series_bound(prefix: usize) -> f64 {
        PI * (1.0 - (-(prefix as f64)).exp2())
    }
}

/// Angular measure of the directions from `y` blocked by the packing, with
/// the discs whose `2^i` enlargement contains `y` set aside.
pub fn blocked_direction_measure(
    ps: &PackingSystem,
    es: &EnlargedSystem,
    y: Point,
) -> Result<BlockedReport, AnalysisError> {
    if ps.len() != es.len() {
        return Err(AnalysisError::MismatchedSystems(ps.len(), es.len()));
    }
    let local_y = ps.region.frame().to_local(y);
    let mut report = BlockedReport::default();
    for (pd, enlarged) in ps.discs.iter().zip(&es.local) {
        if pd.local.contains(local_y, true) {
            return Err(AnalysisError::InsidePackedDisc {
                x: y.x,
                y: y.y,
                index: pd.level_index,
            });
        }
        if enlarged.contains(local_y, true) {
            report.exempt.push(pd.level_index);
            continue;
        }
        let angle = subtended_angle(&pd.local, local_y)?;
        let bound = PI * (-(pd.level_index as f64)).exp2();
        if !(angle < bound) {
            report.violations.push(pd.level_index);
        }
        report.total += angle;
        report.terms.push(BlockedTerm {
            index: pd.level_index,
            angle,
            bound,
        });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Directional difference quotients

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientSample {
    pub h: f64,
    pub quotient: f64,
}

/// Number of samples giving ratio-1/2 spacing between `h_max` and `h_min`.
pub fn dyadic_sample_count(h_min: f64, h_max: f64) -> usize {
    ((h_max / h_min).log2().floor() as usize + 1).max(2)
}

/// `|f(x + h u) - f(x)| / h` at `samples` geometrically spaced steps from
/// `h_max` down to `h_min`.
pub fn directional_quotients<F: Indicator + ?Sized>(
    oracle: &F,
    x: Point,
    u: UnitDirection,
    h_min: f64,
    h_max: f64,
    samples: usize,
) -> Result<Vec<QuotientSample>, AnalysisError> {
    if !(h_min > 0.0 && h_min < h_max && h_max.is_finite()) {
        return Err(AnalysisError::InvalidStepRange(h_min, h_max));
    }
    if samples < 2 {
        return Err(AnalysisError::TooFewSamples {
            needed: 2,
            got: samples,
        });
    }
    let fx = oracle.value(x) as f64;
    let span = (h_min / h_max).log2();
    let dir = u.as_point();
    Ok((0..samples)
        .map(|j| {
            let h = if j + 1 == samples {
                h_min
            } else {
                h_max * (span * j as f64 / (samples - 1) as f64).exp2()
            };
            let fy = oracle.value(x + dir * h) as f64;
            QuotientSample {
                h,
                quotient: (fy - fx).abs() / h,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Relative non-Lipschitz witnesses

/// A point `y` near `x` with `chi_Z(y) != chi_Z(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Witness point, in the coordinates of the frame the search ran in.
    pub y: Point,
    /// `|chi(y) - chi(x)| / |y - x|` in frame units.
    pub quotient: f64,
    /// `|y - x|` in frame units.
    pub distance: f64,
    /// Node id of the opposite-parity disc containing `y`.
    pub disc: usize,
    pub chi_x: u8,
    pub chi_y: u8,
    /// Absolute length of one frame unit.
    pub frame_scale: f64,
}

impl Witness {
    pub fn absolute_distance(&self) -> f64 {
        self.distance * self.frame_scale
    }

    pub fn absolute_quotient(&self) -> f64 {
        self.quotient / self.frame_scale
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MissReason {
    /// The materialized tree holds no disc of the opposite parity inside
    /// `B(x, eps)`.
    NoOppositeDisc,
    /// Such discs exist, but no sample point in them passed the good-set
    /// proxy.
    NoProxySample { candidates: usize },
}

/// The witness search came back empty; an artifact of truncation.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("no witness within eps = {eps} of {x} in the truncated tree ({reason:?})")]
pub struct TruncationMiss {
    pub x: Point,
    pub eps: f64,
    pub reason: MissReason,
}

/// First sample point of the frame disc that avoids its children and passes
/// the good-set proxy. `None` for the root frame or when the sample budget
/// runs out.
pub fn first_proxy_point(view: &FrameView<'_>, cutoff: usize, budget: usize) -> Option<Point> {
    let level = view.level();
    if level == 0 {
        return None;
    }
    DiscSamples::default()
        .take(budget)
        .find(|&s| view.locate(s).depth() == level && view.e_proxy_contains(s, cutoff))
}

/// Searches the frame disc and its descendants (the whole tree for the root
/// frame) for a disc `D` of the parity opposite to `chi_Z(x)` with
/// `D` inside `B(x, eps)`, then for a sample point of `D` minus its children
/// that passes the good-set proxy. Coordinates are those of `view`.
pub fn relative_nonlipschitz_witness(
    view: &FrameView<'_>,
    x: Point,
    eps: f64,
    cutoff: usize,
) -> Result<Witness, AnalysisError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(AnalysisError::InvalidRadius(eps));
    }
    let tree = view.tree();
    let chi_x = view.chi_z(x).value;

    let mut pool = view.descendants();
    if let Some(id) = view.node() {
        pool.push((id, Disc { center: Point::ORIGIN, radius: 1.0 }));
    }
    let mut candidates: Vec<(f64, usize, Disc)> = pool
        .into_iter()
        .filter(|(id, _)| tree.node(*id).parity() != chi_x)
        .filter_map(|(id, d)| {
            let reach = d.center.dist(x) + d.radius;
            (reach <= eps).then_some((reach - 2.0 * d.radius, id, d))
        })
        .collect();
    if candidates.is_empty() {
        return Err(TruncationMiss {
            x,
            eps,
            reason: MissReason::NoOppositeDisc,
        }
        .into());
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for &(_, id, d) in &candidates {
        let inner = tree.frame(id);
        for s in DiscSamples::default().take(WITNESS_SAMPLES_PER_DISC) {
            if inner.locate(s).depth() != tree.node(id).level {
                continue;
            }
            if !inner.e_proxy_contains(s, cutoff) {
                continue;
            }
            let chi_y = inner.chi_z(s).value;
            if chi_y == chi_x {
                continue;
            }
            let y = d.center + s * d.radius;
            let distance = y.dist(x);
            if !(distance > 0.0 && distance < eps) {
                continue;
            }
            return Ok(Witness {
                y,
                quotient: 1.0 / distance,
                distance,
                disc: id,
                chi_x,
                chi_y,
                frame_scale: view.scale(),
            });
        }
    }
    Err(TruncationMiss {
        x,
        eps,
        reason: MissReason::NoProxySample {
            candidates: candidates.len(),
        },
    }
    .into())
}

// ---------------------------------------------------------------------------
// Porosity geometry

/// One step of the porosity argument: a base point `x`, a nearby point `y`
/// with a large difference quotient, a dense direction `v` and an integer
/// `m`. The ball `B(x - 6 m r v, r)`, `r = |y - x|`, is claimed to avoid
/// every point whose quotients in the `v`-cone stay below the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PorosityInstance {
    pub x: Point,
    pub y: Point,
    pub m: u32,
    pub v: UnitDirection,
    pub r: f64,
    pub ball_center: Point,
    pub ball_radius: f64,
}

impl PorosityInstance {
    pub fn new(x: Point, y: Point, m: u32, v: UnitDirection) -> Result<Self, AnalysisError> {
        let r = y.dist(x);
        if m == 0 || !(r > 0.0) {
            return Err(AnalysisError::DegenerateInstance);
        }
        let offset = 6.0 * m as f64 * r;
        Ok(PorosityInstance {
            x,
            y,
            m,
            v,
            r,
            ball_center: x - v.as_point() * offset,
            ball_radius: r,
        })
    }

    pub fn ball(&self) -> Disc {
        Disc {
            center: self.ball_center,
            radius: self.ball_radius,
        }
    }

    /// Quotient level `k (12 m + 4)` that `y` has to exceed.
    pub fn quotient_threshold(&self, k: f64) -> f64 {
        k * (12.0 * self.m as f64 + 4.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PorosityReport {
    pub dist_xz: f64,
    pub dist_yz: f64,
    /// `6mr - r <= |x - z| <= 6mr + r`
    pub chain_x: bool,
    /// `6mr - 2r <= |y - z| <= 6mr + 2r`
    pub chain_y: bool,
    pub diff_x: f64,
    /// `2 |x_i - z| / |x - x_i|`
    pub bound_x: f64,
    pub diff_y: f64,
    /// `2 (|y - x| + |x_i - z|) / |x - x_i|`
    pub bound_y: f64,
    /// `1 / m`
    pub threshold: f64,
    /// `|x - z| + |y - z| < (12 m + 4) r`: the two small quotients through `z`
    /// cannot add up to the large one at `y`.
    pub contradiction: bool,
}

impl PorosityReport {
    pub fn cone_x(&self) -> bool {
        self.diff_x < self.threshold
    }

    pub fn cone_y(&self) -> bool {
        self.diff_y < self.threshold
    }

    pub fn passed(&self) -> bool {
        self.chain_x && self.chain_y && self.cone_x() && self.cone_y() && self.contradiction
    }
}

/// Checks the inequality chain for one point `z` of the instance's ball.
pub fn porosity_geometry_check(
    inst: &PorosityInstance,
    z: Point,
) -> Result<PorosityReport, AnalysisError> {
    if !inst.ball().contains(z, false) {
        return Err(AnalysisError::OutsideBall { x: z.x, y: z.y });
    }
    let m = inst.m as f64;
    let r = inst.r;
    let offset = 6.0 * m * r;
    let dist_xz = inst.x.dist(z);
    let dist_yz = inst.y.dist(z);
    let dist_center = inst.x.dist(inst.ball_center);
    let dist_ball = inst.ball_center.dist(z);
    let v = inst.v.as_point();
    Ok(PorosityReport {
        dist_xz,
        dist_yz,
        chain_x: offset - r <= dist_xz && dist_xz <= offset + r,
        chain_y: offset - 2.0 * r <= dist_yz && dist_yz <= offset + 2.0 * r,
        diff_x: unit_diff(inst.x - z, v)?,
        bound_x: 2.0 * dist_ball / dist_center,
        diff_y: unit_diff(inst.y - z, v)?,
        bound_y: 2.0 * (r + dist_ball) / dist_center,
        threshold: 1.0 / m,
        contradiction: dist_xz + dist_yz < (12.0 * m + 4.0) * r,
    })
}

// ---------------------------------------------------------------------------
// Sector probe

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorProbe {
    /// Largest sampled `|f(p) - f(x)| / |p - x|`; an estimate of the
    /// relative Lipschitz constant on the sector.
    pub sup: f64,
    pub argmax: Option<Point>,
    pub samples: usize,
}

/// Octaves spanned by the log-uniform radius distribution of the sector probe.
pub const SECTOR_OCTAVES: f64 = 40.0;

/// Samples the sector with a seeded generator: angles uniform within the
/// opening, radii log-uniform over [`SECTOR_OCTAVES`] octaves below the
/// sector radius, so samples accumulate near the vertex.
pub fn sector_lipschitz_probe<F: Indicator + ?Sized>(
    oracle: &F,
    x: Point,
    s: &Sector,
    sample_count: usize,
    rng_seed: u64,
) -> Result<SectorProbe, AnalysisError> {
    if s.vertex != x {
        return Err(AnalysisError::VertexMismatch { vertex: s.vertex, x });
    }
    if sample_count == 0 {
        return Err(AnalysisError::TooFewSamples {
            needed: 1,
            got: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let fx = oracle.value(x) as f64;
    let axis = s.axis.angle();
    let half = s.half_angle();
    let mut probe = SectorProbe {
        sup: 0.0,
        argmax: None,
        samples: 0,
    };
    while probe.samples < sample_count {
        let a = axis + half * rng.gen_range(-1.0..1.0);
        let t = s.radius * (-SECTOR_OCTAVES * rng.gen::<f64>()).exp2();
        let p = x + UnitDirection::from_angle(a).as_point() * t;
        if !sector_contains(s, p) {
            continue;
        }
        probe.samples += 1;
        let q = (oracle.value(p) as f64 - fx).abs() / p.dist(x);
        if q > probe.sup || probe.argmax.is_none() {
            probe.sup = q;
            probe.argmax = Some(p);
        }
    }
    Ok(probe)
}
