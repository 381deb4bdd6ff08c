//! Certification of a built (or loaded) tree against the inequalities the
//! construction promises, plus randomized checks of the supporting geometric
//! bounds.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    blocked_direction_measure, porosity_geometry_check, BlockedReport, PorosityInstance,
};
use crate::geometry::{subtended_angle, unit_diff, Disc, Frame, Point, Region, UnitDirection};
use crate::hierarchy::{linear_scan_depth, DiscTree};
use crate::packing::{area_sum, enlarge, pow2, PackingSystem};

/// Relative slack allowed on the gap and margin invariants.
pub const GAP_SLACK: f64 = 1e-9;
/// Absolute slack on the area-sum bounds.
pub const AREA_SLACK: f64 = 1e-9;
/// Absolute slack on the unit-difference bound.
pub const UNIT_DIFF_SLACK: f64 = 1e-12;
/// Interior points drawn per porosity instance.
pub const POROSITY_POINTS_PER_INSTANCE: usize = 100;
/// Exterior viewpoints used by the blocked-direction check.
pub const BLOCKED_VIEWPOINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    pub measured: f64,
    pub bound: f64,
    /// Distance from the bound in the passing direction; negative on failure.
    pub margin: f64,
    pub detail: String,
}

impl CheckResult {
    /// `measured <= bound` (or `<` when `strict`).
    fn at_most(name: &'static str, measured: f64, bound: f64, strict: bool, detail: String) -> Self {
        let ok = if strict { measured < bound } else { measured <= bound };
        CheckResult {
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            bound,
            margin: bound - measured,
            detail,
        }
    }

    fn at_least(name: &'static str, measured: f64, bound: f64, detail: String) -> Self {
        CheckResult {
            name,
            status: if measured >= bound { Status::Pass } else { Status::Fail },
            measured,
            bound,
            margin: measured - bound,
            detail,
        }
    }

    fn skipped(name: &'static str) -> Self {
        CheckResult {
            name,
            status: Status::Skipped,
            measured: 0.0,
            bound: 0.0,
            margin: 0.0,
            detail: "no samples requested".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub totals: Totals,
    pub overall: Status,
    pub samples: usize,
    pub seed: u64,
    pub runtime_ms: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Sample count of every randomized check; 0 runs structural checks only.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 10_000,
            seed: 0,
        }
    }
}

/// One packing of the tree: the region it fills and its discs, in the
/// region's unit frame.
struct Packing<'a> {
    tree: &'a DiscTree,
    /// Parent node, or `None` for the top level.
    parent: Option<usize>,
    ids: std::ops::Range<usize>,
}

impl Packing<'_> {
    fn region(&self) -> Region {
        match self.parent {
            None => *self.tree.root_region(),
            Some(p) => Region::disc(self.tree.node(p).disc),
        }
    }

    fn local(&self) -> impl Iterator<Item = &Disc> + '_ {
        self.ids.clone().map(|id| &self.tree.node(id).local)
    }

    fn system(&self) -> PackingSystem {
        self.tree.packing_system(self.parent)
    }
}

fn packings(tree: &DiscTree) -> Vec<Packing<'_>> {
    let mut out = vec![Packing {
        tree,
        parent: None,
        ids: tree.level(1),
    }];
    for (id, n) in tree.nodes().iter().enumerate() {
        if !n.children.is_empty() {
            out.push(Packing {
                tree,
                parent: Some(id),
                ids: n.children.clone(),
            });
        }
    }
    out
}

/// Runs every check and gathers the report.
pub fn verify_tree(tree: &DiscTree, opts: &VerifyOptions) -> VerifyReport {
    let started = Instant::now();
    let packs = packings(tree);
    let mut checks = vec![
        check_frame_consistency(tree),
        check_disjointness(&packs),
        check_containment(&packs),
        check_radius_decay(&packs),
        check_enlarged_bound(tree),
        check_top_area(tree, &packs[0]),
        check_child_areas(&packs),
        check_level_decay(tree),
    ];
    if opts.samples == 0 {
        for name in [
            "subtended_angle_bound",
            "blocked_direction_bound",
            "chi_z_linear_scan",
            "porosity_geometry",
            "unit_diff_bound",
        ] {
            checks.push(CheckResult::skipped(name));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        checks.push(check_subtended(tree, opts.samples, &mut rng));
        checks.push(check_blocked(&packs[0], BLOCKED_VIEWPOINTS.min(opts.samples), &mut rng));
        checks.push(check_chi_scan(tree, opts.samples, &mut rng));
        checks.push(check_porosity(
            (opts.samples / POROSITY_POINTS_PER_INSTANCE).max(1),
            POROSITY_POINTS_PER_INSTANCE,
            &mut rng,
        ));
        checks.push(check_unit_diff(opts.samples, &mut rng));
    }
    let count = |s| checks.iter().filter(|c| c.status == s).count();
    let totals = Totals {
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
    };
    VerifyReport {
        overall: if totals.failed == 0 { Status::Pass } else { Status::Fail },
        totals,
        checks,
        samples: opts.samples,
        seed: opts.seed,
        runtime_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

fn check_frame_consistency(tree: &DiscTree) -> CheckResult {
    let root = match tree.root_region() {
        Region::Plane => Frame::IDENTITY,
        r => r.frame(),
    };
    let mismatches = tree
        .nodes()
        .iter()
        .filter(|n| {
            let outer = match n.parent {
                None => root,
                Some(p) => Frame::of_disc(&tree.node(p).disc),
            };
            outer.disc_to_outer(&n.local) != n.disc
        })
        .count();
    CheckResult::at_most(
        "frame_consistency",
        mismatches as f64,
        0.0,
        false,
        "absolute discs recomputed from parent-frame discs".into(),
    )
}

fn check_disjointness(packs: &[Packing<'_>]) -> CheckResult {
    // min over packings and pairs i < j of gap(B_j, B_i) / r_j
    let mut worst = f64::INFINITY;
    let mut pairs = 0usize;
    for p in packs {
        let discs: Vec<&Disc> = p.local().collect();
        for j in 1..discs.len() {
            for i in 0..j {
                let gap = discs[j].center.dist(discs[i].center) - (discs[j].radius + discs[i].radius);
                worst = worst.min(gap / discs[j].radius);
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        worst = 1.0;
    }
    CheckResult::at_least(
        "disjointness_gap",
        worst,
        1.0 - GAP_SLACK,
        format!("min gap(B_j, B_i) / r_j over {pairs} pairs"),
    )
}

fn check_containment(packs: &[Packing<'_>]) -> CheckResult {
    // min over discs packed inside a disc of (1 - |c|) / (2 r), unit frame
    let mut worst = f64::INFINITY;
    let mut count = 0usize;
    for p in packs {
        if matches!(p.region(), Region::Plane) {
            continue;
        }
        for d in p.local() {
            worst = worst.min((1.0 - d.center.norm()) / (2.0 * d.radius));
            count += 1;
        }
    }
    if count == 0 {
        worst = 1.0;
    }
    CheckResult::at_least(
        "containment_margin",
        worst,
        1.0 - GAP_SLACK,
        format!("min dist(c, complement) / 2r over {count} discs"),
    )
}

fn check_radius_decay(packs: &[Packing<'_>]) -> CheckResult {
    // r_1 <= min{1/4, diam/8}, r_k <= min{1, diam/2} / 4^k, in absolute units
    let mut worst = 0.0f64;
    for p in packs {
        let region = p.region();
        let scale = region.frame().scale;
        let diam = region.diameter();
        for (k, d) in p.local().enumerate() {
            let k = k + 1;
            let cap = if k == 1 {
                0.25f64.min(diam / 8.0)
            } else {
                1.0f64.min(diam / 2.0) * (-2.0 * k as f64).exp2()
            };
            worst = worst.max(d.radius * scale / cap);
        }
    }
    CheckResult::at_most(
        "radius_decay",
        worst,
        1.0,
        false,
        "max r_k / cap_k with cap_1 = min{1/4, diam/8}, cap_k = min{1, diam/2} 4^-k".into(),
    )
}

fn check_enlarged_bound(tree: &DiscTree) -> CheckResult {
    let mut worst = 0.0f64;
    for n in tree.nodes() {
        let i = n.level_index;
        // 2^i r_i <= 2^-i  <=>  4^i r_i <= 1
        worst = worst.max(pow2(i) * pow2(i) * n.disc.radius);
    }
    CheckResult::at_most(
        "enlarged_bound",
        worst,
        1.0,
        false,
        "max 2^i r_i / 2^-i over all discs".into(),
    )
}

fn check_top_area(tree: &DiscTree, top: &Packing<'_>) -> CheckResult {
    let sys = top.system();
    let s_area = area_sum(sys.absolute_discs());
    let e_area = area_sum(&enlarge(&sys).discs);
    match tree.root_region() {
        Region::Plane => {
            let ok = s_area <= e_area;
            let mut c = CheckResult::at_most(
                "area_sum_top",
                e_area,
                PI / 3.0 + AREA_SLACK,
                false,
                format!("area(S) = {s_area:e} <= area(E) <= pi/3"),
            );
            if !ok {
                c.status = Status::Fail;
            }
            c
        }
        Region::Disc { radius, .. } => CheckResult::at_most(
            "area_sum_top",
            s_area,
            PI * radius * radius / 15.0 + AREA_SLACK,
            false,
            "area(S) <= pi R^2 / 15".into(),
        ),
    }
}

fn check_child_areas(packs: &[Packing<'_>]) -> CheckResult {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for p in packs.iter().filter(|p| p.parent.is_some()) {
        worst = worst.max(area_sum(p.local()));
        count += 1;
    }
    CheckResult::at_most(
        "area_sum_children",
        worst,
        PI / 15.0 + AREA_SLACK,
        false,
        format!("max area(S(B)) / (area(B) / pi) over {count} packings, bound pi/15 < pi/2"),
    )
}

fn check_level_decay(tree: &DiscTree) -> CheckResult {
    let mut worst = 0.0f64;
    for k in 1..tree.depth() {
        let a = tree.level_union_area(k);
        let b = tree.level_union_area(k + 1);
        if a > 0.0 {
            worst = worst.max(b / a);
        }
    }
    CheckResult::at_most(
        "level_area_decay",
        worst,
        1.0 / 15.0,
        false,
        "max |D_{k+1}| / |D_k|".into(),
    )
}

fn check_subtended<R: Rng>(tree: &DiscTree, samples: usize, rng: &mut R) -> CheckResult {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let n = tree.node(rng.gen_range(0..tree.len()));
        let d = n.local;
        let t = d.radius * (1.0 + rng.gen_range(1e-9..1e3f64));
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let p = d.center + UnitDirection::from_angle(a).as_point() * t;
        let Ok(theta) = subtended_angle(&d, p) else {
            continue;
        };
        worst = worst.max(theta / (PI * d.radius / p.dist(d.center)));
    }
    CheckResult::at_most(
        "subtended_angle_bound",
        worst,
        1.0,
        true,
        format!("max theta / (pi r / dist) over {samples} pairs"),
    )
}

fn check_blocked<R: Rng>(top: &Packing<'_>, points: usize, rng: &mut R) -> CheckResult {
    let sys = top.system();
    let es = enlarge(&sys);
    let local: Vec<Disc> = sys.local_discs().copied().collect();
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    let mut done = 0usize;
    let bound = BlockedReport::series_bound(sys.len());
    while done < points {
        // exterior viewpoints in the root frame's [-2, 2]^2
        let y = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if let Region::Disc { .. } = sys.region {
            if y.norm_sq() >= 1.0 {
                continue;
            }
        }
        if local.iter().any(|d| d.contains(y, true)) {
            continue;
        }
        let abs = sys.region.frame().to_outer(y);
        match blocked_direction_measure(&sys, &es, abs) {
            Ok(rep) => {
                violations += rep.violations.len();
                worst = worst.max(rep.total / PI);
                // the total must stay below the partial series sum
                if rep.total > 0.0 && rep.total >= bound {
                    violations += 1;
                }
            }
            Err(_) => continue,
        }
        done += 1;
    }
    let mut c = CheckResult::at_most(
        "blocked_direction_bound",
        worst,
        1.0,
        true,
        format!("max total / pi over {done} viewpoints; {violations} per-disc violations"),
    );
    if violations > 0 {
        c.status = Status::Fail;
    }
    c
}

fn check_chi_scan<R: Rng>(tree: &DiscTree, samples: usize, rng: &mut R) -> CheckResult {
    let frame = match tree.root_region() {
        Region::Plane => Frame::IDENTITY,
        r => r.frame(),
    };
    let mut disagreements = 0usize;
    for _ in 0..samples {
        let p = frame.to_outer(Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let descent = tree.chi_z(p).value as usize;
        if descent != linear_scan_depth(tree, p) % 2 {
            disagreements += 1;
        }
    }
    CheckResult::at_most(
        "chi_z_linear_scan",
        disagreements as f64,
        0.0,
        false,
        format!("descent vs exhaustive parity disagreements over {samples} points"),
    )
}

/// Random porosity instance: `x` and `y` in `[-1, 1]^2`, `m` in `1..=10`.
pub fn random_porosity_instance<R: Rng>(rng: &mut R) -> PorosityInstance {
    loop {
        let x = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let y = x + UnitDirection::from_angle(rng.gen_range(0.0..std::f64::consts::TAU)).as_point()
            * (-rng.gen_range(0.0..20.0f64)).exp2();
        let v = UnitDirection::from_angle(rng.gen_range(0.0..std::f64::consts::TAU));
        let m = rng.gen_range(1..=10);
        if let Ok(inst) = PorosityInstance::new(x, y, m, v) {
            return inst;
        }
    }
}

/// Uniform point of the instance's open ball.
pub fn random_ball_point<R: Rng>(inst: &PorosityInstance, rng: &mut R) -> Point {
    loop {
        let u = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if u.norm_sq() < 1.0 {
            let z = inst.ball_center + u * inst.ball_radius;
            if inst.ball().contains(z, false) {
                return z;
            }
        }
    }
}

fn check_porosity<R: Rng>(instances: usize, per: usize, rng: &mut R) -> CheckResult {
    let mut failures = 0usize;
    for _ in 0..instances {
        let inst = random_porosity_instance(rng);
        for _ in 0..per {
            let z = random_ball_point(&inst, rng);
            match porosity_geometry_check(&inst, z) {
                Ok(rep) if rep.passed() => {}
                _ => failures += 1,
            }
        }
    }
    CheckResult::at_most(
        "porosity_geometry",
        failures as f64,
        0.0,
        false,
        format!("{instances} instances x {per} interior points"),
    )
}

/// Random nonzero vector with magnitude spread over several decades.
pub fn random_vector<R: Rng>(rng: &mut R) -> Point {
    loop {
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let len = 10f64.powf(rng.gen_range(-3.0..3.0));
        let v = UnitDirection::from_angle(a).as_point() * len;
        if v.norm() > 0.0 {
            return v;
        }
    }
}

fn check_unit_diff<R: Rng>(samples: usize, rng: &mut R) -> CheckResult {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let u = random_vector(rng);
        let v = if rng.gen_bool(0.5) {
            random_vector(rng)
        } else {
            // near-parallel pairs stress the bound where it is tight
            u * rng.gen_range(0.5..2.0) + random_vector(rng) * 1e-3
        };
        let lhs = unit_diff(u, v).expect("nonzero vectors");
        let rhs = 2.0 / v.norm() * (u - v).norm();
        worst = worst.max(lhs - rhs);
    }
    CheckResult::at_most(
        "unit_diff_bound",
        worst,
        UNIT_DIFF_SLACK,
        false,
        format!("max unit_diff(u, v) - 2|u - v| / |v| over {samples} pairs"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::TreeDocument;
    use crate::hierarchy::{build_hierarchy, LevelSpec};

    fn tree(counts: &[usize]) -> DiscTree {
        build_hierarchy(&LevelSpec::new(counts.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn fresh_tree_passes() {
        let rep = verify_tree(&tree(&[40, 5, 3]), &VerifyOptions { samples: 2000, seed: 1 });
        for c in &rep.checks {
            assert_eq!(c.status, Status::Pass, "{c:?}");
        }
        assert!(rep.passed());
    }

    #[test]
    fn zero_samples_skips_sampling() {
        let rep = verify_tree(&tree(&[10, 2]), &VerifyOptions { samples: 0, seed: 0 });
        assert_eq!(rep.totals.skipped, 5);
        assert!(rep.passed());
    }

    #[test]
    fn doubled_radius_trips_named_checks() {
        let mut doc = TreeDocument::from_tree(&tree(&[5]));
        doc.levels[0][1].r *= 2.0;
        doc.levels[0][1].lr *= 2.0;
        let t = doc.into_tree().unwrap();
        let rep = verify_tree(&t, &VerifyOptions { samples: 0, seed: 0 });
        assert!(!rep.passed());
        assert_eq!(rep.check("radius_decay").unwrap().status, Status::Fail);
        assert_eq!(rep.check("enlarged_bound").unwrap().status, Status::Fail);
        assert_eq!(rep.check("disjointness_gap").unwrap().status, Status::Pass);
    }

    #[test]
    fn absolute_only_tampering_is_caught() {
        let mut doc = TreeDocument::from_tree(&tree(&[5, 2]));
        doc.levels[0][1].r *= 2.0;
        let rep = verify_tree(&doc.into_tree().unwrap(), &VerifyOptions { samples: 0, seed: 0 });
        assert_eq!(rep.check("frame_consistency").unwrap().status, Status::Fail);
    }

    #[test]
    fn overlapping_child_trips_containment() {
        let mut doc = TreeDocument::from_tree(&tree(&[3, 3]));
        doc.levels[1][0].lr = 0.9;
        let rep = verify_tree(&doc.into_tree().unwrap(), &VerifyOptions { samples: 0, seed: 0 });
        assert_eq!(rep.check("containment_margin").unwrap().status, Status::Fail);
        assert_eq!(rep.check("disjointness_gap").unwrap().status, Status::Fail);
    }
}
