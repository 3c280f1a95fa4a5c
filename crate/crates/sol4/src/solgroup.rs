//! The solvable Lie group underlying the geometry: global coordinates
//! (x, y, z, t), the group law, the left-invariant orthonormal frame
//! E_1 = e^t ∂_x, E_2 = e^t ∂_y, E_3 = e^{-2t} ∂_z, E_4 = ∂_t, and the
//! isometry group generated by left translations, rotations of the (x, y)
//! plane, and the reflections (x, y) -> (x, -y), z -> -z.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest |t| accepted by operations that evaluate e^{t} or e^{-2t}.
///
/// Beyond this the exponentials overflow or underflow f64 so drastically that
/// every downstream quantity is garbage; operations reject such points.
pub const T_COORD_LIMIT: f64 = 300.0;

fn guard_t(t: f64) -> Result<()> {
    if !t.is_finite() || t.abs() > T_COORD_LIMIT {
        return Err(Error::CoordinateRange {
            t,
            limit: T_COORD_LIMIT,
        });
    }
    Ok(())
}

/// A group element in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl Point {
    /// The group identity, used as the base point throughout.
    pub const IDENTITY: Point = Point {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        t: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Point {
        Point { x, y, z, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.t.is_finite()
    }

    /// Group product `self * q`: the left factor conjugates the translation
    /// part of the right one through its t-coordinate,
    /// (x, y, z, t)·(x', y', z', t') = (x + e^t x', y + e^t y', z + e^{-2t} z', t + t').
    pub fn compose(self, q: Point) -> Result<Point> {
        guard_t(self.t)?;
        let et = self.t.exp();
        let em2t = (-2.0 * self.t).exp();
        let p = Point {
            x: self.x + et * q.x,
            y: self.y + et * q.y,
            z: self.z + em2t * q.z,
            t: self.t + q.t,
        };
        if !p.is_finite() {
            return Err(Error::NonFinite {
                context: "group composition",
            });
        }
        Ok(p)
    }

    /// Group inverse: (x, y, z, t)^{-1} = (-e^{-t} x, -e^{-t} y, -e^{2t} z, -t).
    pub fn inverse(self) -> Result<Point> {
        guard_t(self.t)?;
        let emt = (-self.t).exp();
        let e2t = (2.0 * self.t).exp();
        let p = Point {
            x: -emt * self.x,
            y: -emt * self.y,
            z: -e2t * self.z,
            t: -self.t,
        };
        if !p.is_finite() {
            return Err(Error::NonFinite {
                context: "group inverse",
            });
        }
        Ok(p)
    }
}

/// Coefficients of a vector in the orthonormal left-invariant frame
/// (E_1, E_2, E_3, E_4), without a base point attached.
///
/// The metric is the Euclidean dot product on these coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector(pub [f64; 4]);

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector([0.0; 4]);
    pub const E1: FrameVector = FrameVector([1.0, 0.0, 0.0, 0.0]);
    pub const E2: FrameVector = FrameVector([0.0, 1.0, 0.0, 0.0]);
    pub const E3: FrameVector = FrameVector([0.0, 0.0, 1.0, 0.0]);
    pub const E4: FrameVector = FrameVector([0.0, 0.0, 0.0, 1.0]);

    /// The i-th frame field, 1-based to match the E_1..E_4 naming.
    pub fn basis(i: usize) -> Result<FrameVector> {
        match i {
            1 => Ok(Self::E1),
            2 => Ok(Self::E2),
            3 => Ok(Self::E3),
            4 => Ok(Self::E4),
            _ => Err(Error::FrameIndex { index: i }),
        }
    }

    pub fn dot(self, other: FrameVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Largest absolute coefficient; the residual norm used by self-checks.
    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for FrameVector {
    type Output = FrameVector;
    fn add(self, rhs: FrameVector) -> FrameVector {
        let mut out = [0.0; 4];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(rhs.0.iter())) {
            *o = a + b;
        }
        FrameVector(out)
    }
}

impl Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, rhs: FrameVector) -> FrameVector {
        self + (-rhs)
    }
}

impl Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        self * -1.0
    }
}

impl Mul<f64> for FrameVector {
    type Output = FrameVector;
    fn mul(self, rhs: f64) -> FrameVector {
        let mut out = self.0;
        for o in &mut out {
            *o *= rhs;
        }
        FrameVector(out)
    }
}

/// A tangent vector stored as frame coefficients at a base point.
///
/// Coefficients are always with respect to (E_1, E_2, E_3, E_4); conversions
/// from coordinate velocities happen at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub v: FrameVector,
}

impl TangentVector {
    pub fn new(base: Point, v: FrameVector) -> TangentVector {
        TangentVector { base, v }
    }

    /// Builds the tangent vector whose coordinate velocity at `base` is
    /// (dx, dy, dz, dt): the frame coefficients are
    /// (e^{-t} dx, e^{-t} dy, e^{2t} dz, dt).
    pub fn from_coordinate_velocity(base: Point, vel: [f64; 4]) -> Result<TangentVector> {
        guard_t(base.t)?;
        let emt = (-base.t).exp();
        let e2t = (2.0 * base.t).exp();
        let v = FrameVector([emt * vel[0], emt * vel[1], e2t * vel[2], vel[3]]);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "coordinate-to-frame conversion",
            });
        }
        Ok(TangentVector { base, v })
    }

    /// Inverse of [`TangentVector::from_coordinate_velocity`].
    pub fn coordinate_velocity(&self) -> Result<[f64; 4]> {
        guard_t(self.base.t)?;
        let et = self.base.t.exp();
        let em2t = (-2.0 * self.base.t).exp();
        let vel = [
            et * self.v.0[0],
            et * self.v.0[1],
            em2t * self.v.0[2],
            self.v.0[3],
        ];
        if vel.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "frame-to-coordinate conversion",
            });
        }
        Ok(vel)
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }
}

/// A sign, used for the two reflection generators of the isometry group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// An isometry: a point of the group together with a linear part from
/// O(2) × Z_2 acting on (x, y) and z.
///
/// Applying the isometry first acts linearly,
/// (x, y) -> R(theta)·diag(1, eps_xy)·(x, y) and z -> eps_z·z with t fixed,
/// then left-translates by `trans`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub trans: Point,
    pub theta: f64,
    pub eps_xy: Sign,
    pub eps_z: Sign,
}

fn normalize_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = theta.rem_euclid(two_pi);
    // rem_euclid can return exactly two_pi after rounding; fold it back.
    if r >= two_pi {
        0.0
    } else {
        r
    }
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        trans: Point::IDENTITY,
        theta: 0.0,
        eps_xy: Sign::Plus,
        eps_z: Sign::Plus,
    };

    pub fn new(trans: Point, theta: f64, eps_xy: Sign, eps_z: Sign) -> Isometry {
        Isometry {
            trans,
            theta: normalize_angle(theta),
            eps_xy,
            eps_z,
        }
    }

    /// Pure left translation by `p`.
    pub fn translation(p: Point) -> Isometry {
        Isometry::new(p, 0.0, Sign::Plus, Sign::Plus)
    }

    /// Pure rotation of the (x, y) plane.
    pub fn rotation(theta: f64) -> Isometry {
        Isometry::new(Point::IDENTITY, theta, Sign::Plus, Sign::Plus)
    }

    /// Builds the linear part from an orthogonal 2x2 matrix acting on (x, y),
    /// given row-major as [[m11, m12], [m21, m22]].
    pub fn from_o2(m: [[f64; 2]; 2], eps_z: Sign) -> Result<Isometry> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let col0 = m[0][0] * m[0][0] + m[1][0] * m[1][0];
        let col1 = m[0][1] * m[0][1] + m[1][1] * m[1][1];
        let orth = m[0][0] * m[0][1] + m[1][0] * m[1][1];
        let defect = (det.abs() - 1.0)
            .abs()
            .max((col0 - 1.0).abs())
            .max((col1 - 1.0).abs())
            .max(orth.abs());
        if !defect.is_finite() || defect > 1e-9 {
            return Err(Error::CaseConstraint {
                constraint: "orthogonality of a 2x2 linear part",
                defect,
            });
        }
        // R(theta)·diag(1, eps) has first column (cos theta, sin theta).
        let theta = m[1][0].atan2(m[0][0]);
        let eps_xy = Sign::of(det);
        Ok(Isometry::new(Point::IDENTITY, theta, eps_xy, eps_z))
    }

    /// The 2x2 matrix R(theta)·diag(1, eps_xy) acting on (x, y), row-major.
    pub fn linear_xy(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = self.eps_xy.value();
        [[c, -e * s], [s, e * c]]
    }

    fn linear_apply(&self, p: Point) -> Point {
        let m = self.linear_xy();
        Point {
            x: m[0][0] * p.x + m[0][1] * p.y,
            y: m[1][0] * p.x + m[1][1] * p.y,
            z: self.eps_z.value() * p.z,
            t: p.t,
        }
    }

    /// Applies the isometry to a point: linear part first, then translation.
    pub fn apply(&self, p: Point) -> Result<Point> {
        self.trans.compose(self.linear_apply(p))
    }

    /// The action on frame coefficients: (v1, v2) rotates/reflects like
    /// (x, y), v3 picks up eps_z, v4 is fixed. Left translation acts
    /// trivially on frame coefficients because the frame is left-invariant.
    pub fn coefficient_action(&self, v: FrameVector) -> FrameVector {
        let m = self.linear_xy();
        FrameVector([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
            self.eps_z.value() * v.0[2],
            v.0[3],
        ])
    }

    /// Pushes a tangent vector forward; the base point moves with the
    /// isometry and frame coefficients transform by the linear part only.
    pub fn differential(&self, v: &TangentVector) -> Result<TangentVector> {
        Ok(TangentVector {
            base: self.apply(v.base)?,
            v: self.coefficient_action(v.v),
        })
    }

    /// Composition `self ∘ other` (apply `other` first).
    ///
    /// The linear part acts on the group by automorphisms, so
    /// (τ1, L1)·(τ2, L2) = (τ1 · L1(τ2), L1 L2).
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        let trans = self.trans.compose(self.linear_apply(other.trans))?;
        let theta = self.theta + self.eps_xy.value() * other.theta;
        Ok(Isometry::new(
            trans,
            theta,
            self.eps_xy.mul(other.eps_xy),
            self.eps_z.mul(other.eps_z),
        ))
    }

    pub fn inverse(&self) -> Result<Isometry> {
        // (τ, L)^{-1} = (L^{-1} τ^{-1}, L^{-1}); for L = R(theta)·diag(1, eps)
        // the inverse linear part is R(-eps·theta)·diag(1, eps).
        let theta_inv = -self.eps_xy.value() * self.theta;
        let linear_inv = Isometry::new(Point::IDENTITY, theta_inv, self.eps_xy, self.eps_z);
        let trans = linear_inv.linear_apply(self.trans.inverse()?);
        Ok(Isometry::new(
            trans,
            theta_inv,
            self.eps_xy,
            self.eps_z,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIGHT: f64 = 1e-12;

    fn assert_point_close(p: Point, q: Point, tol: f64) {
        let scale = 1.0_f64
            .max(p.x.abs())
            .max(p.y.abs())
            .max(p.z.abs())
            .max(p.t.abs());
        assert!(
            (p.x - q.x).abs() <= tol * scale
                && (p.y - q.y).abs() <= tol * scale
                && (p.z - q.z).abs() <= tol * scale
                && (p.t - q.t).abs() <= tol * scale,
            "{p:?} != {q:?}"
        );
    }

    #[test]
    fn compose_scales_right_factor() {
        let p = Point::new(0.0, 0.0, 0.0, 1.0);
        let q = Point::new(1.0, 2.0, 3.0, 0.0);
        let r = p.compose(q).unwrap();
        let e = std::f64::consts::E;
        assert_point_close(r, Point::new(e, 2.0 * e, 3.0 * (-2.0f64).exp(), 1.0), TIGHT);
    }

    #[test]
    fn inverse_of_shifted_point() {
        let p = Point::new(1.0, 0.0, 0.0, 2.0f64.ln());
        let inv = p.inverse().unwrap();
        assert_point_close(inv, Point::new(-0.5, 0.0, 0.0, -(2.0f64.ln())), TIGHT);
        assert_point_close(p.compose(inv).unwrap(), Point::IDENTITY, TIGHT);
        assert_point_close(inv.compose(p).unwrap(), Point::IDENTITY, TIGHT);
    }

    #[test]
    fn associativity_spot_check() {
        let p = Point::new(0.3, -1.2, 0.7, 0.9);
        let q = Point::new(-0.5, 0.4, 2.0, -1.3);
        let r = Point::new(1.1, 0.2, -0.8, 0.5);
        let lhs = p.compose(q).unwrap().compose(r).unwrap();
        let rhs = p.compose(q.compose(r).unwrap()).unwrap();
        assert_point_close(lhs, rhs, TIGHT);
    }

    #[test]
    fn frame_conversion_round_trip() {
        let base = Point::new(0.4, -0.3, 1.2, -0.8);
        let vel = [0.9, -1.4, 0.25, 2.0];
        let v = TangentVector::from_coordinate_velocity(base, vel).unwrap();
        let back = v.coordinate_velocity().unwrap();
        for (a, b) in vel.iter().zip(back.iter()) {
            assert!((a - b).abs() < TIGHT);
        }
    }

    #[test]
    fn frame_conversion_shifts_by_exponentials() {
        let base = Point::new(0.0, 0.0, 0.0, 1.0);
        let v = TangentVector::from_coordinate_velocity(base, [1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((v.v.0[0] - (-1.0f64).exp()).abs() < TIGHT);
        assert_eq!(v.v.0[1], 0.0);
        assert_eq!(v.v.0[2], 0.0);
        assert_eq!(v.v.0[3], 0.0);
    }

    #[test]
    fn t_range_guard_rejects_overflowing_points() {
        let p = Point::new(0.0, 0.0, 0.0, 301.0);
        assert!(matches!(
            p.compose(Point::IDENTITY),
            Err(Error::CoordinateRange { .. })
        ));
        assert!(matches!(p.inverse(), Err(Error::CoordinateRange { .. })));
        assert!(matches!(
            TangentVector::from_coordinate_velocity(p, [1.0, 0.0, 0.0, 0.0]),
            Err(Error::CoordinateRange { .. })
        ));
    }

    #[test]
    fn isometry_moves_tube_base_point_along_its_tube() {
        // The image of a point with (x^2 + y^2) e^{-2t} = sinh^2 r under any
        // rotation + translation by (0, 0, z, t) keeps that combination.
        let r: f64 = 1.0;
        let base = Point::new(r.tanh(), 0.0, 0.0, (1.0 / r.cosh()).ln());
        let iso = Isometry::new(
            Point::new(0.0, 0.0, 1.0, 0.7),
            std::f64::consts::PI / 3.0,
            Sign::Plus,
            Sign::Plus,
        );
        let img = iso.apply(base).unwrap();
        let value = (img.x * img.x + img.y * img.y) * (-2.0 * img.t).exp();
        assert!((value - r.sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn differential_preserves_frame_norm() {
        let iso = Isometry::new(Point::new(0.4, -0.2, 0.9, -1.1), 1.234, Sign::Minus, Sign::Minus);
        let v = TangentVector::new(Point::new(0.1, 0.2, 0.3, 0.4), FrameVector([0.3, -0.7, 1.1, 0.5]));
        let w = iso.differential(&v).unwrap();
        assert!((w.norm() - v.norm()).abs() < TIGHT);
    }

    #[test]
    fn compose_matches_pointwise_application() {
        let i1 = Isometry::new(Point::new(0.2, -0.4, 0.6, 0.3), 0.9, Sign::Minus, Sign::Plus);
        let i2 = Isometry::new(Point::new(-1.0, 0.5, 0.1, -0.7), 2.4, Sign::Plus, Sign::Minus);
        let p = Point::new(0.8, 0.1, -0.5, 0.2);
        let via_compose = i1.compose(&i2).unwrap().apply(p).unwrap();
        let via_apply = i1.apply(i2.apply(p).unwrap()).unwrap();
        assert_point_close(via_compose, via_apply, TIGHT);
    }

    #[test]
    fn inverse_isometry_round_trips() {
        let iso = Isometry::new(Point::new(0.7, -0.3, 1.4, 0.6), 4.0, Sign::Minus, Sign::Minus);
        let inv = iso.inverse().unwrap();
        let p = Point::new(-0.2, 0.9, 0.4, -0.5);
        assert_point_close(inv.apply(iso.apply(p).unwrap()).unwrap(), p, TIGHT);
        assert_point_close(iso.apply(inv.apply(p).unwrap()).unwrap(), p, TIGHT);
    }

    #[test]
    fn o2_matrix_round_trip() {
        for &(theta, eps) in &[(0.3, Sign::Plus), (2.6, Sign::Minus), (5.9, Sign::Plus)] {
            let iso = Isometry::new(Point::IDENTITY, theta, eps, Sign::Plus);
            let back = Isometry::from_o2(iso.linear_xy(), Sign::Plus).unwrap();
            let m0 = iso.linear_xy();
            let m1 = back.linear_xy();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((m0[i][j] - m1[i][j]).abs() < TIGHT);
                }
            }
        }
    }
}
