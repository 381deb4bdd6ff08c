//! Planar primitives: points, open discs, circular sectors, unit directions,
//! and the handful of distance and angle computations the construction
//! relies on.
//!
//! All containment and disjointness decisions compare squared distances so
//! that boundary cases are not perturbed by a square root. Points lying
//! exactly on a boundary circle are outside the corresponding open disc.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on the norm of a unit direction.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinates must be finite, got ({0}, {1})")]
    NonFinitePoint(f64, f64),
    #[error("disc radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("direction ({0}, {1}) is not a unit vector")]
    NotUnit(f64, f64),
    #[error("sector opening must lie in (0, 2], got {0}")]
    InvalidOpening(f64),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("point ({x}, {y}) is not strictly outside the closed disc")]
    NotExterior { x: f64, y: f64 },
    #[error("point ({x}, {y}) is not inside the region")]
    OutsideRegion { x: f64, y: f64 },
}

/// A location (or displacement) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn checked(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(GeometryError::NonFinitePoint(x, y))
        }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        (self - other).norm_sq()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Open disc `B(center, radius)`. The closed disc is selected per query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Point,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !center.is_finite() {
            return Err(GeometryError::NonFinitePoint(center.x, center.y));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        Ok(Disc { center, radius })
    }

    /// `k * B(x, r) = B(x, k r)`.
    pub fn scaled(self, k: f64) -> Disc {
        Disc {
            center: self.center,
            radius: self.radius * k,
        }
    }

    pub fn contains(&self, p: Point, closed: bool) -> bool {
        disc_contains(self, p, closed)
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Membership in `B(center, radius)` or, with `closed`, in its closure.
pub fn disc_contains(d: &Disc, p: Point, closed: bool) -> bool {
    let d2 = p.dist_sq(d.center);
    let r2 = d.radius * d.radius;
    if closed {
        d2 <= r2
    } else {
        d2 < r2
    }
}

/// Signed separation `|c_a - c_b| - r_a - r_b`; positive iff the closures are
/// disjoint. Symmetric in its arguments bit for bit.
pub fn disc_gap(a: &Disc, b: &Disc) -> f64 {
    a.center.dist(b.center) - (a.radius + b.radius)
}

/// The ambient open set a packing lives in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Plane,
    Disc { center: Point, radius: f64 },
}

impl Region {
    pub fn disc(d: Disc) -> Self {
        Region::Disc {
            center: d.center,
            radius: d.radius,
        }
    }

    pub fn unit_disc() -> Self {
        Region::Disc {
            center: Point::ORIGIN,
            radius: 1.0,
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Region::Plane => f64::INFINITY,
            Region::Disc { radius, .. } => 2.0 * radius,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Region::Plane => p.is_finite(),
            Region::Disc { center, radius } => p.dist_sq(center) < radius * radius,
        }
    }

    /// Similarity mapping the region's unit frame to the plane: the identity
    /// for the plane, `p -> center + radius * p` for a disc.
    pub fn frame(&self) -> Frame {
        match *self {
            Region::Plane => Frame::IDENTITY,
            Region::Disc { center, radius } => Frame {
                origin: center,
                scale: radius,
            },
        }
    }
}

/// `dist(p, R^2 \ G)`: `+inf` for the plane, `R - |p - c|` for a disc region.
pub fn dist_to_region_complement(g: &Region, p: Point) -> Result<f64, GeometryError> {
    if !g.contains(p) {
        return Err(GeometryError::OutsideRegion { x: p.x, y: p.y });
    }
    Ok(match *g {
        Region::Plane => f64::INFINITY,
        Region::Disc { center, radius } => radius - p.dist(center),
    })
}

/// A similarity `p -> origin + scale * p` taking local coordinates to the
/// enclosing frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub origin: Point,
    pub scale: f64,
}

impl Frame {
    pub const IDENTITY: Frame = Frame {
        origin: Point::ORIGIN,
        scale: 1.0,
    };

    pub fn to_outer(&self, p: Point) -> Point {
        self.origin + p * self.scale
    }

    pub fn to_local(&self, p: Point) -> Point {
        let d = p - self.origin;
        Point::new(d.x / self.scale, d.y / self.scale)
    }

    pub fn disc_to_outer(&self, d: &Disc) -> Disc {
        Disc {
            center: self.to_outer(d.center),
            radius: d.radius * self.scale,
        }
    }

    /// `self` applied after `inner`.
    pub fn compose(&self, inner: &Frame) -> Frame {
        Frame {
            origin: self.to_outer(inner.origin),
            scale: self.scale * inner.scale,
        }
    }

    /// Frame whose unit disc is `d` (expressed in this frame's coordinates).
    pub fn of_disc(d: &Disc) -> Frame {
        Frame {
            origin: d.center,
            scale: d.radius,
        }
    }
}

/// A direction on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitDirection {
    ux: f64,
    uy: f64,
}

impl UnitDirection {
    pub fn new(ux: f64, uy: f64) -> Result<Self, GeometryError> {
        let n2 = ux * ux + uy * uy;
        if !(n2.is_finite() && (n2 - 1.0).abs() <= UNIT_NORM_TOLERANCE) {
            return Err(GeometryError::NotUnit(ux, uy));
        }
        Ok(UnitDirection { ux, uy })
    }

    pub fn from_angle(angle: f64) -> Self {
        UnitDirection {
            ux: angle.cos(),
            uy: angle.sin(),
        }
    }

    /// Normalizes a nonzero vector.
    pub fn normalize(v: Point) -> Result<Self, GeometryError> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(GeometryError::ZeroVector);
        }
        Ok(UnitDirection {
            ux: v.x / n,
            uy: v.y / n,
        })
    }

    pub fn as_point(&self) -> Point {
        Point::new(self.ux, self.uy)
    }

    pub fn ux(&self) -> f64 {
        self.ux
    }

    pub fn uy(&self) -> f64 {
        self.uy
    }

    /// Angle in `[0, 2pi)`.
    pub fn angle(&self) -> f64 {
        let a = self.uy.atan2(self.ux);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }
}

/// Open circular sector `C(vertex, axis, opening, radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub vertex: Point,
    pub axis: UnitDirection,
    pub opening: f64,
    pub radius: f64,
}

impl Sector {
    pub fn new(
        vertex: Point,
        axis: UnitDirection,
        opening: f64,
        radius: f64,
    ) -> Result<Self, GeometryError> {
        if !(opening > 0.0 && opening <= 2.0) {
            return Err(GeometryError::InvalidOpening(opening));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        Ok(Sector {
            vertex,
            axis,
            opening,
            radius,
        })
    }

    /// Largest angle between a member direction and the axis.
    pub fn half_angle(&self) -> f64 {
        // |a - u| = 2 sin(phi / 2) for unit a, u at angle phi.
        2.0 * (self.opening / 2.0).min(1.0).asin()
    }

    pub fn contains(&self, p: Point) -> bool {
        sector_contains(self, p)
    }
}

/// The angle a disc subtends seen from an exterior point, `2 asin(r / d)`.
pub fn subtended_angle(d: &Disc, p: Point) -> Result<f64, GeometryError> {
    let d2 = p.dist_sq(d.center);
    if d2 <= d.radius * d.radius {
        return Err(GeometryError::NotExterior { x: p.x, y: p.y });
    }
    let ratio = (d.radius / d2.sqrt()).min(1.0);
    Ok(2.0 * ratio.asin())
}

/// `| u/|u| - v/|v| |` for nonzero vectors.
pub fn unit_diff(u: Point, v: Point) -> Result<f64, GeometryError> {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    let a = Point::new(u.x / nu, u.y / nu);
    let b = Point::new(v.x / nv, v.y / nv);
    Ok((a - b).norm())
}

pub fn sector_contains(s: &Sector, p: Point) -> bool {
    let w = p - s.vertex;
    if w.x == 0.0 && w.y == 0.0 {
        return false;
    }
    if w.norm_sq() >= s.radius * s.radius {
        return false;
    }
    match unit_diff(w, s.axis.as_point()) {
        Ok(diff) => diff < s.opening,
        Err(_) => false,
    }
}

/// Whether the open ray `{origin + t dir : t > 0}` meets the open disc.
/// Tangent rays do not.
pub fn ray_hits_disc(origin: Point, dir: UnitDirection, d: &Disc) -> bool {
    let w = d.center - origin;
    let r2 = d.radius * d.radius;
    if w.norm_sq() < r2 {
        return true;
    }
    let u = dir.as_point();
    let along = w.dot(u);
    if along <= 0.0 {
        return false;
    }
    let perp = w.cross(u);
    perp * perp < r2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(x: f64, y: f64, r: f64) -> Disc {
        Disc::new(Point::new(x, y), r).unwrap()
    }

    #[test]
    fn containment_examples() {
        let d = disc(0.0, 0.0, 1.0);
        assert!(disc_contains(&d, Point::new(0.0, 0.0), false));
        assert!(!disc_contains(&d, Point::new(1.0, 0.0), false));
        assert!(disc_contains(&d, Point::new(1.0, 0.0), true));
        let e = disc(-1.0, -1.0, 0.25);
        assert!(!disc_contains(&e, Point::new(-1.0, 0.0), true));
    }

    #[test]
    fn gap_examples() {
        let a = disc(0.0, 0.0, 1.0);
        assert_eq!(disc_gap(&a, &disc(3.0, 0.0, 1.0)), 1.0);
        assert_eq!(disc_gap(&a, &disc(1.0, 0.0, 1.0)), -1.0);
        assert_eq!(disc_gap(&a, &disc(2.0, 0.0, 1.0)), 0.0);
    }

    #[test]
    fn complement_distance() {
        assert_eq!(
            dist_to_region_complement(&Region::Plane, Point::new(7.0, -3.0)).unwrap(),
            f64::INFINITY
        );
        let g = Region::unit_disc();
        assert_eq!(dist_to_region_complement(&g, Point::ORIGIN).unwrap(), 1.0);
        let d = dist_to_region_complement(&g, Point::new(0.6, 0.0)).unwrap();
        assert!((d - 0.4).abs() < 1e-15);
        assert!(dist_to_region_complement(&g, Point::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn subtended_angle_examples() {
        let d = disc(0.0, 0.0, 1.0);
        let t = subtended_angle(&d, Point::new(2.0, 0.0)).unwrap();
        assert!((t - PI / 3.0).abs() < 1e-12);
        assert!(t < PI / 2.0);
        let t = subtended_angle(&d, Point::new(2f64.sqrt(), 0.0)).unwrap();
        assert!((t - PI / 2.0).abs() < 1e-12);
        assert!(t < PI / 2f64.sqrt());
        let t = subtended_angle(&d, Point::new(100.0, 0.0)).unwrap();
        assert!((t - 0.020_000_333_348_334_23).abs() < 1e-15);
        assert!(t < PI / 100.0);
        assert!(subtended_angle(&d, Point::new(1.0, 0.0)).is_err());
        assert!(subtended_angle(&d, Point::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn unit_diff_examples() {
        assert_eq!(unit_diff(Point::new(2.0, 0.0), Point::new(5.0, 0.0)).unwrap(), 0.0);
        let u = Point::new(0.0, 3.0);
        let v = Point::new(4.0, 0.0);
        let got = unit_diff(u, v).unwrap();
        assert!((got - 2f64.sqrt()).abs() < 1e-15);
        assert!(got <= 2.0 / 4.0 * (u - v).norm());
        assert_eq!(unit_diff(Point::new(1.0, 1.0), Point::new(1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(
            unit_diff(Point::ORIGIN, Point::new(1.0, 0.0)),
            Err(GeometryError::ZeroVector)
        );
    }

    #[test]
    fn sector_examples() {
        let axis = UnitDirection::new(1.0, 0.0).unwrap();
        let s = Sector::new(Point::ORIGIN, axis, 0.5, 1.0).unwrap();
        assert!(sector_contains(&s, Point::new(0.5, 0.0)));
        assert!(!sector_contains(&s, Point::ORIGIN));
        assert!(!sector_contains(&s, Point::new(0.5, 0.4)));
        assert!(!sector_contains(&s, Point::new(1.0, 0.0)));
    }

    #[test]
    fn ray_examples() {
        let d = disc(5.0, 0.0, 1.0);
        assert!(ray_hits_disc(Point::ORIGIN, UnitDirection::new(1.0, 0.0).unwrap(), &d));
        assert!(!ray_hits_disc(Point::ORIGIN, UnitDirection::new(0.0, 1.0).unwrap(), &d));
        let tangent = UnitDirection::from_angle((1.0f64 / 5.0).asin());
        assert!(!ray_hits_disc(Point::ORIGIN, tangent, &d));
        // pointing away from a disc that contains the origin still enters it
        let around = disc(0.0, 0.0, 1.0);
        assert!(ray_hits_disc(Point::ORIGIN, UnitDirection::new(-1.0, 0.0).unwrap(), &around));
        // opposite direction misses
        assert!(!ray_hits_disc(Point::ORIGIN, UnitDirection::new(-1.0, 0.0).unwrap(), &d));
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(Disc::new(Point::ORIGIN, 0.0).is_err());
        assert!(Disc::new(Point::ORIGIN, f64::INFINITY).is_err());
        assert!(Point::checked(f64::NAN, 0.0).is_err());
        assert!(UnitDirection::new(1.0, 1e-5).is_err());
        assert!(Sector::new(Point::ORIGIN, UnitDirection::from_angle(0.0), 2.5, 1.0).is_err());
    }

    #[test]
    fn frames_compose() {
        let outer = Frame { origin: Point::new(1.0, 2.0), scale: 0.5 };
        let inner = Frame { origin: Point::new(-0.5, 0.0), scale: 0.25 };
        let p = Point::new(0.5, -1.0);
        let both = outer.compose(&inner);
        assert_eq!(both.to_outer(p), outer.to_outer(inner.to_outer(p)));
        assert_eq!(outer.to_local(outer.to_outer(p)), p);
    }
}
