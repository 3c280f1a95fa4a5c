//! Reconstruction of constant-angle hypersurfaces from their angle data.
//!
//! Given a case label (which frame components of the unit normal vanish and
//! which are constant), this module integrates the structure equations,
//! builds the model immersion in the commuting-frame coordinates, and
//! canonicalizes arbitrary constant-angle patches onto a catalog family by
//! fitting the aligning isometry.

use crate::ambient::geodesic;
use crate::catalog::{FamilyId, FamilyTag};
use crate::error::{Error, Result};
use crate::hypersurface::{unit_normal, FdSteps, HypersurfacePatch};
use crate::solgroup::{FrameVector, Isometry, Point, Sign, TangentVector};

/// Largest implicit residual accepted when declaring a canonical match.
pub const MATCH_TOLERANCE: f64 = 1e-8;

/// Largest deviation of the vertical angle functions (c, d) over the sample
/// grid for a patch to count as constant-angle.
pub const ANGLE_CONSTANCY_TOLERANCE: f64 = 1e-6;

/// Below this threshold on |c| the dispatch treats c as zero; between the
/// two thresholds the input is reported as ambiguous rather than guessed.
pub const CASE_BOUNDARY_LOW: f64 = 1e-8;
pub const CASE_BOUNDARY_HIGH: f64 = 1e-6;

/// How far constructor inputs may sit from their constraint manifold before
/// being rejected; inputs within this slack are renormalized exactly.
const INPUT_SLACK: f64 = 1e-6;

/// Geodesic step count used by the canonical matcher's foot-point fits.
const FOOT_STEPS: usize = 10_000;

/// Which configuration of the constant angle functions (a, b, c, d) holds:
/// the rotating-pair subcase `I1` (a, b vary, c = 0), the fixed-pair
/// subcase `I2` (a, b constant, b != 0, c = 0), the single-component
/// subcase `I3` (b = c = 0), the tilted-slice case `II` (a = b = 0,
/// c != 0), and the horizontal case `III` (d = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseLabel {
    I1 { d: f64, a0: f64, b0: f64 },
    I2 { a: f64, b: f64, d: f64 },
    I3 { a_sign: Sign, d: f64 },
    II { c: f64, d: f64 },
    III,
}

fn constraint_err(constraint: &'static str, defect: f64) -> Error {
    Error::CaseConstraint { constraint, defect }
}

/// Rescales (x, y) so that x^2 + y^2 equals `target_sq` exactly, provided
/// the defect is within the input slack.
fn renormalize_pair(x: f64, y: f64, target_sq: f64, constraint: &'static str) -> Result<(f64, f64)> {
    let norm_sq = x * x + y * y;
    let defect = (norm_sq - target_sq).abs();
    if !defect.is_finite() || defect > INPUT_SLACK {
        return Err(constraint_err(constraint, defect));
    }
    if target_sq == 0.0 {
        return Ok((0.0, 0.0));
    }
    if norm_sq == 0.0 {
        return Err(constraint_err(constraint, target_sq));
    }
    let scale = (target_sq / norm_sq).sqrt();
    Ok((x * scale, y * scale))
}

fn check_d_range(d: f64, strict_positive: bool) -> Result<()> {
    if !d.is_finite() || d < 0.0 || d >= 1.0 {
        return Err(constraint_err("0 <= d < 1", d));
    }
    if strict_positive && d == 0.0 {
        return Err(constraint_err("d > 0 in the rotating subcase", 0.0));
    }
    Ok(())
}

impl CaseLabel {
    /// Rotating-pair subcase: initial angle values (a0, b0), height d.
    pub fn case1i(d: f64, a0: f64, b0: f64) -> Result<CaseLabel> {
        check_d_range(d, true)?;
        let (a0, b0) = renormalize_pair(a0, b0, 1.0 - d * d, "a0^2 + b0^2 = 1 - d^2")?;
        if b0 == 0.0 {
            return Err(constraint_err("b0 != 0", 0.0));
        }
        Ok(CaseLabel::I1 { d, a0, b0 })
    }

    /// Fixed-pair subcase: constant angles (a, b) with b != 0.
    pub fn case1ii(a: f64, b: f64, d: f64) -> Result<CaseLabel> {
        check_d_range(d, false)?;
        let (a, b) = renormalize_pair(a, b, 1.0 - d * d, "a^2 + b^2 + d^2 = 1")?;
        if b == 0.0 {
            return Err(constraint_err("b != 0", 0.0));
        }
        Ok(CaseLabel::I2 { a, b, d })
    }

    /// Single-component subcase: a = ±sqrt(1 - d^2), b = 0.
    pub fn case1iii(a_sign: Sign, d: f64) -> Result<CaseLabel> {
        check_d_range(d, false)?;
        Ok(CaseLabel::I3 { a_sign, d })
    }

    /// Tilted-slice case: constant (c, d) with c > 0.
    pub fn case2(c: f64, d: f64) -> Result<CaseLabel> {
        let (c, d) = renormalize_pair(c, d, 1.0, "c^2 + d^2 = 1")?;
        if c <= 0.0 {
            return Err(constraint_err("c > 0", c));
        }
        if d < 0.0 || d >= 1.0 {
            return Err(constraint_err("0 <= d < 1", d));
        }
        Ok(CaseLabel::II { c, d })
    }

    pub fn case3() -> CaseLabel {
        CaseLabel::III
    }

    pub fn name(&self) -> &'static str {
        match self {
            CaseLabel::I1 { .. } => "I_i",
            CaseLabel::I2 { .. } => "I_ii",
            CaseLabel::I3 { .. } => "I_iii",
            CaseLabel::II { .. } => "II",
            CaseLabel::III => "III",
        }
    }

    /// Checks the stored parameters against their constraint manifold.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-10;
        match *self {
            CaseLabel::I1 { d, a0, b0 } => {
                check_d_range(d, true)?;
                let defect = (a0 * a0 + b0 * b0 - (1.0 - d * d)).abs();
                if defect > tol {
                    return Err(constraint_err("a0^2 + b0^2 = 1 - d^2", defect));
                }
                if b0 == 0.0 {
                    return Err(constraint_err("b0 != 0", 0.0));
                }
            }
            CaseLabel::I2 { a, b, d } => {
                check_d_range(d, false)?;
                let defect = (a * a + b * b + d * d - 1.0).abs();
                if defect > tol {
                    return Err(constraint_err("a^2 + b^2 + d^2 = 1", defect));
                }
                if b == 0.0 {
                    return Err(constraint_err("b != 0", 0.0));
                }
            }
            CaseLabel::I3 { d, .. } => check_d_range(d, false)?,
            CaseLabel::II { c, d } => {
                let defect = (c * c + d * d - 1.0).abs();
                if defect > tol {
                    return Err(constraint_err("c^2 + d^2 = 1", defect));
                }
                if c <= 0.0 {
                    return Err(constraint_err("c > 0", c));
                }
                check_d_range(d, false)?;
            }
            CaseLabel::III => {}
        }
        Ok(())
    }

    /// Builds the model patch for this case, together with the isometry
    /// that aligns a surface carrying these angles with the patch.
    pub fn build(&self) -> Result<(Isometry, HypersurfacePatch)> {
        match *self {
            CaseLabel::I1 { d, a0, b0 } => {
                // The closed-form constants are fixed by the initial values:
                // a(0) = c1, b(0) = -c2.
                let iso = case1i_rotation(d, a0, -b0)?;
                Ok((iso, case1i_closed_form(d, a0, -b0)?))
            }
            CaseLabel::I2 { a, b, d } => case1ii_patch(a, b, d),
            CaseLabel::I3 { a_sign, d } => case1iii_patch(a_sign, d),
            CaseLabel::II { c, d } => Ok((Isometry::IDENTITY, case2_patch(c, d)?)),
            CaseLabel::III => Ok((
                Isometry::IDENTITY,
                FamilyId::new(FamilyTag::M4, 0.0)?.patch(),
            )),
        }
    }
}

/// Integrates the rotating-pair system a' = -b sqrt(1-d^2)/d,
/// b' = a sqrt(1-d^2)/d with a classical Runge-Kutta scheme on a uniform
/// grid over [0, u_end]; returns rows (u, a, b).
pub fn integrate_case1i(
    d: f64,
    a0: f64,
    b0: f64,
    u_end: f64,
    steps: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    check_d_range(d, true)?;
    let (a0, b0) = renormalize_pair(a0, b0, 1.0 - d * d, "a0^2 + b0^2 = 1 - d^2")?;
    if steps == 0 || !u_end.is_finite() {
        return Err(Error::BadIntegration {
            reason: "need a finite interval and at least one step",
        });
    }
    let omega = (1.0 - d * d).sqrt() / d;
    let h = u_end / steps as f64;
    let rhs = |a: f64, b: f64| (-omega * b, omega * a);
    let mut table = Vec::with_capacity(steps + 1);
    let (mut a, mut b) = (a0, b0);
    table.push((0.0, a, b));
    for k in 0..steps {
        let (k1a, k1b) = rhs(a, b);
        let (k2a, k2b) = rhs(a + 0.5 * h * k1a, b + 0.5 * h * k1b);
        let (k3a, k3b) = rhs(a + 0.5 * h * k2a, b + 0.5 * h * k2b);
        let (k4a, k4b) = rhs(a + h * k3a, b + h * k3b);
        a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        table.push(((k + 1) as f64 * h, a, b));
    }
    Ok(table)
}

/// The rotating-pair model immersion (u, t, z) -> (x(u,t), y(u,t), z, t)
/// with integration constants set to zero. Its image lies on the rotation
/// tube of radius r = artanh d around the vertical axis through the origin.
pub fn case1i_closed_form(d: f64, c1: f64, c2: f64) -> Result<HypersurfacePatch> {
    check_d_range(d, true)?;
    let (c1, c2) = renormalize_pair(c1, c2, 1.0 - d * d, "c1^2 + c2^2 = 1 - d^2")?;
    let omega = (1.0 - d * d).sqrt() / d;
    let scale = -d / (1.0 - d * d);
    let root = (1.0 - d * d).sqrt();
    let sinh_r_sq = d * d / (1.0 - d * d);
    let ab = move |u: f64| {
        let (s, c) = (omega * u).sin_cos();
        (c1 * c + c2 * s, c1 * s - c2 * c)
    };
    Ok(HypersurfacePatch::new(
        move |q| {
            let (a, b) = ab(q[0]);
            let e = scale * q[1].exp();
            Point::new(e * a, e * b, q[2], q[1])
        },
        [[-2.0, 2.0], [-1.0, 1.0], [-1.0, 1.0]],
    )
    .with_jacobian(move |q| {
        let (a, b) = ab(q[0]);
        let et = q[1].exp();
        [
            [et * b / root, -et * a / root, 0.0, 0.0],
            [scale * et * a, scale * et * b, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    })
    .with_normal(move |q| {
        let (a, b) = ab(q[0]);
        FrameVector([a, b, 0.0, d])
    })
    .with_implicit(move |p| (p.x * p.x + p.y * p.y) * (-2.0 * p.t).exp() - sinh_r_sq))
}

/// The rotation that carries the rotating-pair model immersion onto the
/// standard tube parametrization.
pub fn case1i_rotation(d: f64, c1: f64, c2: f64) -> Result<Isometry> {
    check_d_range(d, true)?;
    let (c1, c2) = renormalize_pair(c1, c2, 1.0 - d * d, "c1^2 + c2^2 = 1 - d^2")?;
    let cosh_r = 1.0 / (1.0 - d * d).sqrt();
    Isometry::from_o2(
        [[-c1 * cosh_r, c2 * cosh_r], [-c2 * cosh_r, -c1 * cosh_r]],
        Sign::Plus,
    )
}

/// The aligned fixed-pair model immersion (x, t, z) -> (x, d e^t / sqrt(1-d^2), z, t),
/// whose unit normal is (0, -sqrt(1-d^2), 0, d).
fn aligned_graph_patch(d: f64) -> HypersurfacePatch {
    let root = (1.0 - d * d).sqrt();
    let slope = d / root;
    HypersurfacePatch::new(
        move |q| Point::new(q[0], slope * q[1].exp(), q[2], q[1]),
        [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
    )
    .with_jacobian(move |q| {
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, slope * q[1].exp(), 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    })
    .with_normal(move |_| FrameVector([0.0, -root, 0.0, d]))
    .with_implicit(move |p| p.y * (-p.t).exp() - slope)
}

/// Fixed-pair subcase: returns the rotation aligning the normal
/// (a, b, 0, d) with (0, -sqrt(1-d^2), 0, d), and the aligned model patch.
pub fn case1ii_patch(a: f64, b: f64, d: f64) -> Result<(Isometry, HypersurfacePatch)> {
    check_d_range(d, false)?;
    let (a, b) = renormalize_pair(a, b, 1.0 - d * d, "a^2 + b^2 + d^2 = 1")?;
    if b == 0.0 {
        return Err(constraint_err("b != 0 (the b = 0 configuration has its own subcase)", 0.0));
    }
    let root = (1.0 - d * d).sqrt();
    let iso = Isometry::from_o2(
        [[-b / root, a / root], [-a / root, -b / root]],
        Sign::Plus,
    )?;
    Ok((iso, aligned_graph_patch(d)))
}

/// Single-component subcase (b = 0, a = ±sqrt(1-d^2)): composes the
/// coordinate swap with the sign adjustment so the normal lands on
/// (0, -sqrt(1-d^2), 0, d), and returns the aligned model patch.
pub fn case1iii_patch(a_sign: Sign, d: f64) -> Result<(Isometry, HypersurfacePatch)> {
    check_d_range(d, false)?;
    let m = match a_sign {
        Sign::Minus => [[0.0, 1.0], [1.0, 0.0]],
        Sign::Plus => [[0.0, 1.0], [-1.0, 0.0]],
    };
    let iso = Isometry::from_o2(m, Sign::Plus)?;
    Ok((iso, aligned_graph_patch(d)))
}

/// Tilted-slice model immersion (x, y, t) -> (x, y, (d/2c) e^{-2t}, t),
/// lying on the distance-r graph with d = tanh 2r, c = sech 2r.
pub fn case2_patch(c: f64, d: f64) -> Result<HypersurfacePatch> {
    let (c, d) = renormalize_pair(c, d, 1.0, "c^2 + d^2 = 1")?;
    if c <= 0.0 {
        return Err(constraint_err("c > 0", c));
    }
    check_d_range(d, false)?;
    let half_slope = 0.5 * d / c;
    let sinh_2r = d / c;
    Ok(HypersurfacePatch::new(
        move |q| Point::new(q[0], q[1], half_slope * (-2.0 * q[2]).exp(), q[2]),
        [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
    )
    .with_jacobian(move |q| {
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -2.0 * half_slope * (-2.0 * q[2]).exp(), 1.0],
        ]
    })
    .with_normal(move |_| FrameVector([0.0, 0.0, c, d]))
    .with_implicit(move |p| 2.0 * p.z * (2.0 * p.t).exp() - sinh_2r))
}

/// The symmetry obstruction for a tilted normal with a horizontal
/// component: substitutes the closed forms for the two constrained
/// directional derivatives of b into the compatibility identity and
/// returns the left-hand side. The result does not depend on `t1b` (the
/// free derivative) and vanishes exactly when a·c = 0.
pub fn lemma48_residual(a: f64, b: f64, c: f64, d: f64, t1b: f64) -> Result<f64> {
    let norm_defect = (a * a + b * b + c * c + d * d - 1.0).abs();
    if norm_defect > INPUT_SLACK {
        return Err(constraint_err("a^2 + b^2 + c^2 + d^2 = 1", norm_defect));
    }
    if a == 0.0 {
        return Err(constraint_err("a != 0 (the derivation divides by a)", 0.0));
    }
    if c < 0.0 {
        return Err(constraint_err("c >= 0", c));
    }
    let ab2 = a * a + b * b;
    let t2b = (-3.0 * a * a * c * c + b * c * t1b + a * d * (3.0 * b * c + t1b)) / ab2;
    let t3b = (-3.0 * a * c * (b * c + a * d) + (b * d - a * c) * t1b) / ab2;
    Ok(3.0 * a * a * a * c + 3.0 * a * b * b * c + (b * d - a * c) * t2b - (b * c + a * d) * t3b)
}

/// Result of canonicalizing a constant-angle patch: the catalog family it
/// is congruent to, the isometry carrying the patch onto the family's
/// standard implicit set, and the worst implicit residual over the sample
/// grid after applying that isometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    pub family: FamilyId,
    pub fitted: Isometry,
    pub residual: f64,
}

/// Canonicalizes with the default match tolerance and step sizes.
pub fn canonicalize(patch: &HypersurfacePatch) -> Result<MatchResult> {
    canonicalize_with(patch, MATCH_TOLERANCE, FdSteps::default(), FOOT_STEPS)
}

/// Identifies which catalog family a constant-angle patch is congruent to
/// and fits the aligning isometry.
///
/// The dispatch reads the averaged angle functions over a sample grid:
/// c away from zero selects the tilted-slice family, d at one selects the
/// horizontal leaves, and c = 0 splits on whether the horizontal pair
/// (a, b) varies (rotation tubes) or stays constant (translated graphs).
/// Near the c = 0 boundary the input is reported ambiguous.
pub fn canonicalize_with(
    patch: &HypersurfacePatch,
    match_tolerance: f64,
    fd: FdSteps,
    geodesic_steps: usize,
) -> Result<MatchResult> {
    let samples = patch.grid(4, 0.15);
    let mut quads: Vec<([f64; 3], FrameVector)> = Vec::with_capacity(samples.len());
    for &w in &samples {
        let n = unit_normal(patch, w, fd)?;
        quads.push((w, n.v));
    }
    let mut mean = [0.0f64; 4];
    for (_, n) in &quads {
        for (m, v) in mean.iter_mut().zip(n.0.iter()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= quads.len() as f64;
    }
    // Constancy of the vertical components c and d.
    let mut deviation = 0.0f64;
    for (_, n) in &quads {
        deviation = deviation.max((n.0[2] - mean[2]).abs());
        deviation = deviation.max((n.0[3] - mean[3]).abs());
    }
    if deviation > ANGLE_CONSTANCY_TOLERANCE {
        return Err(Error::NonConstantAngles { deviation });
    }
    // Orientation normalization: represent the normal with d >= 0,
    // breaking ties by the sign of c.
    let flip = if mean[3] < -CASE_BOUNDARY_LOW {
        -1.0
    } else if mean[3].abs() <= CASE_BOUNDARY_LOW && mean[2] < 0.0 {
        -1.0
    } else {
        1.0
    };
    for m in &mut mean {
        *m *= flip;
    }
    let (a_bar, b_bar, c_bar, d_bar) = (mean[0], mean[1], mean[2], mean[3]);

    let c_mag = c_bar.abs();
    let (family, fitted) = if c_mag >= CASE_BOUNDARY_HIGH {
        fit_tilted_slice(&samples, patch, a_bar, b_bar, c_bar, d_bar)?
    } else if c_mag >= CASE_BOUNDARY_LOW {
        return Err(Error::AmbiguousCase {
            c: c_mag,
            lo: CASE_BOUNDARY_LOW,
            hi: CASE_BOUNDARY_HIGH,
        });
    } else if d_bar >= 1.0 - CASE_BOUNDARY_LOW {
        fit_horizontal_leaf(&samples, patch)?
    } else {
        // Does the horizontal pair (a, b) vary over the grid?
        let mut variation = 0.0f64;
        for (_, n) in &quads {
            variation = variation.max((flip * n.0[0] - a_bar).abs());
            variation = variation.max((flip * n.0[1] - b_bar).abs());
        }
        if variation > ANGLE_CONSTANCY_TOLERANCE {
            fit_rotation_tube(&quads, patch, flip, d_bar, geodesic_steps)?
        } else {
            fit_translated_graph(&samples, patch, a_bar, b_bar, d_bar)?
        }
    };

    let mut residual = 0.0f64;
    for &w in &samples {
        let image = fitted.apply(patch.point(w))?;
        residual = residual.max(family.implicit_residual(image).abs());
    }
    if !(residual <= match_tolerance) {
        return Err(Error::NoMatch {
            residual,
            tolerance: match_tolerance,
        });
    }
    Ok(MatchResult {
        family,
        fitted,
        residual,
    })
}

fn fit_horizontal_leaf(
    samples: &[[f64; 3]],
    patch: &HypersurfacePatch,
) -> Result<(FamilyId, Isometry)> {
    let mut t_mean = 0.0;
    for &w in samples {
        t_mean += patch.point(w).t;
    }
    t_mean /= samples.len() as f64;
    Ok((
        FamilyId::new(FamilyTag::M4, 0.0)?,
        Isometry::translation(Point::new(0.0, 0.0, 0.0, -t_mean)),
    ))
}

fn fit_rotation_tube(
    quads: &[([f64; 3], FrameVector)],
    patch: &HypersurfacePatch,
    flip: f64,
    d_bar: f64,
    geodesic_steps: usize,
) -> Result<(FamilyId, Isometry)> {
    if !(d_bar > CASE_BOUNDARY_LOW) {
        return Err(constraint_err("d > 0 in the rotating subcase", d_bar));
    }
    let r = d_bar.atanh();
    // The d >= 0 normal points toward the tube's axis; following it for
    // the tube radius lands on the axis, whose horizontal position is the
    // only translation degree of freedom the implicit function sees.
    let (mut x_sum, mut y_sum) = (0.0, 0.0);
    for &(w, n) in quads {
        let p = patch.point(w);
        let (foot, _) = geodesic(&TangentVector::new(p, n * flip), r, geodesic_steps)?;
        x_sum += foot.x;
        y_sum += foot.y;
    }
    let count = quads.len() as f64;
    let fitted = Isometry::translation(Point::new(-x_sum / count, -y_sum / count, 0.0, 0.0));
    Ok((FamilyId::new(FamilyTag::M1, r)?, fitted))
}

fn fit_translated_graph(
    samples: &[[f64; 3]],
    patch: &HypersurfacePatch,
    a_bar: f64,
    b_bar: f64,
    d_bar: f64,
) -> Result<(FamilyId, Isometry)> {
    let r = d_bar.atanh();
    let root = (1.0 - d_bar * d_bar).sqrt();
    let (a, b) = renormalize_pair(a_bar, b_bar, root * root, "a^2 + b^2 = 1 - d^2")?;
    let m = if b.abs() < CASE_BOUNDARY_LOW {
        if a < 0.0 {
            [[0.0, 1.0], [1.0, 0.0]]
        } else {
            [[0.0, 1.0], [-1.0, 0.0]]
        }
    } else {
        [[-b / root, a / root], [-a / root, -b / root]]
    };
    let rotate = Isometry::from_o2(m, Sign::Plus)?;
    // After rotation the surface is y = sinh(r) e^t + const; fit the
    // constant and remove it by a translation.
    let sinh_r = d_bar / root;
    let mut offset = 0.0;
    for &w in samples {
        let p = rotate.apply(patch.point(w))?;
        offset += p.y - sinh_r * p.t.exp();
    }
    offset /= samples.len() as f64;
    let fitted = Isometry::translation(Point::new(0.0, -offset, 0.0, 0.0)).compose(&rotate)?;
    Ok((FamilyId::new(FamilyTag::M2, r)?, fitted))
}

fn fit_tilted_slice(
    samples: &[[f64; 3]],
    patch: &HypersurfacePatch,
    a_bar: f64,
    b_bar: f64,
    c_bar: f64,
    d_bar: f64,
) -> Result<(FamilyId, Isometry)> {
    let horizontal = a_bar.abs().max(b_bar.abs());
    if horizontal > CASE_BOUNDARY_HIGH {
        return Err(constraint_err(
            "a = b = 0 when the normal has a nonzero third component",
            horizontal,
        ));
    }
    let z_flip = if c_bar < 0.0 {
        Isometry::new(Point::IDENTITY, 0.0, Sign::Plus, Sign::Minus)
    } else {
        Isometry::IDENTITY
    };
    let r = 0.5 * d_bar.atanh();
    let sinh_2r = d_bar / (1.0 - d_bar * d_bar).sqrt();
    // After the orientation fix the surface is z = (sinh 2r / 2) e^{-2t} + const.
    let mut offset = 0.0;
    for &w in samples {
        let p = z_flip.apply(patch.point(w))?;
        offset += p.z - 0.5 * sinh_2r * (-2.0 * p.t).exp();
    }
    offset /= samples.len() as f64;
    let fitted = Isometry::translation(Point::new(0.0, 0.0, -offset, 0.0)).compose(&z_flip)?;
    Ok((FamilyId::new(FamilyTag::M3, r)?, fitted))
}
