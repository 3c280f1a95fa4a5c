//! The catalog of distinguished constant-angle hypersurface families:
//! rotation tubes around a vertical axis (M1), planes parallel-displaced in
//! the first horizontal direction (M2), graphs displaced along the
//! contracting direction (M3), and horizontal leaves (M4). Each family
//! carries closed-form immersions, unit normals, implicit defining
//! functions, expected curvature invariants, and a transitive symmetry
//! subgroup.

use std::fmt;
use std::str::FromStr;

use crate::ambient::geodesic;
use crate::error::{Error, Result};
use crate::hypersurface::HypersurfacePatch;
use crate::solgroup::{FrameVector, Isometry, Point, Sign, TangentVector};

/// Which of the four model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    M1,
    M2,
    M3,
    M4,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 4] = [FamilyTag::M1, FamilyTag::M2, FamilyTag::M3, FamilyTag::M4];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::M1 => "M1",
            FamilyTag::M2 => "M2",
            FamilyTag::M3 => "M3",
            FamilyTag::M4 => "M4",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyTag> {
        match s.trim().to_ascii_uppercase().as_str() {
            "M1" | "1" => Ok(FamilyTag::M1),
            "M2" | "2" => Ok(FamilyTag::M2),
            "M3" | "3" => Ok(FamilyTag::M3),
            "M4" | "4" => Ok(FamilyTag::M4),
            _ => Err(Error::FamilyParameter {
                family: "?",
                r: f64::NAN,
                reason: "unknown family name (expected M1, M2, M3 or M4)",
            }),
        }
    }
}

/// A family member: the tag plus the distance parameter r.
///
/// Ranges: M1 needs r > 0 (the tube radius), M2 and M3 accept r >= 0
/// (r = 0 giving the totally geodesic core), M4 accepts any finite r
/// (the height of the leaf).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyId {
    tag: FamilyTag,
    r: f64,
}

impl FamilyId {
    pub fn new(tag: FamilyTag, r: f64) -> Result<FamilyId> {
        if !r.is_finite() {
            return Err(Error::FamilyParameter {
                family: tag.name(),
                r,
                reason: "parameter must be finite",
            });
        }
        match tag {
            FamilyTag::M1 if r <= 0.0 => Err(Error::FamilyParameter {
                family: tag.name(),
                r,
                reason: "tube radius must be positive",
            }),
            FamilyTag::M2 | FamilyTag::M3 if r < 0.0 => Err(Error::FamilyParameter {
                family: tag.name(),
                r,
                reason: "displacement distance must be nonnegative",
            }),
            _ => Ok(FamilyId { tag, r }),
        }
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// The standard parametrized patch of this member, with analytic
    /// Jacobian, closed-form unit normal, and implicit defining function
    /// attached.
    pub fn patch(&self) -> HypersurfacePatch {
        let r = self.r;
        match self.tag {
            FamilyTag::M1 => {
                let th = r.tanh();
                let sh = 1.0 / r.cosh();
                let lnsech = -r.cosh().ln();
                HypersurfacePatch::new(
                    move |q| {
                        let e3 = q[2].exp();
                        Point::new(e3 * q[0].cos() * th, e3 * q[0].sin() * th, q[1], q[2] + lnsech)
                    },
                    [[-std::f64::consts::PI, std::f64::consts::PI], [-1.0, 1.0], [-1.0, 1.0]],
                )
                .with_jacobian(move |q| {
                    let e3 = q[2].exp();
                    let (s, c) = q[0].sin_cos();
                    [
                        [-e3 * s * th, e3 * c * th, 0.0, 0.0],
                        [0.0, 0.0, 1.0, 0.0],
                        [e3 * c * th, e3 * s * th, 0.0, 1.0],
                    ]
                })
                .with_normal(move |q| {
                    let (s, c) = q[0].sin_cos();
                    FrameVector([-c * sh, -s * sh, 0.0, th])
                })
                .with_implicit(move |p| {
                    (p.x * p.x + p.y * p.y) * (-2.0 * p.t).exp() - r.sinh() * r.sinh()
                })
            }
            FamilyTag::M2 => {
                let th = r.tanh();
                let sh = 1.0 / r.cosh();
                let lnsech = -r.cosh().ln();
                HypersurfacePatch::new(
                    move |q| Point::new(q[0], q[2].exp() * th, q[1], q[2] + lnsech),
                    [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
                )
                .with_jacobian(move |q| {
                    [
                        [1.0, 0.0, 0.0, 0.0],
                        [0.0, 0.0, 1.0, 0.0],
                        [0.0, q[2].exp() * th, 0.0, 1.0],
                    ]
                })
                .with_normal(move |_| FrameVector([0.0, -sh, 0.0, th]))
                .with_implicit(move |p| p.y * (-p.t).exp() - r.sinh())
            }
            FamilyTag::M3 => {
                let th2 = (2.0 * r).tanh();
                let sh2 = 1.0 / (2.0 * r).cosh();
                let lncosh_half = 0.5 * (2.0 * r).cosh().ln();
                HypersurfacePatch::new(
                    move |q| {
                        Point::new(
                            q[0],
                            q[1],
                            0.5 * (-2.0 * q[2]).exp() * th2,
                            q[2] + lncosh_half,
                        )
                    },
                    [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
                )
                .with_jacobian(move |q| {
                    [
                        [1.0, 0.0, 0.0, 0.0],
                        [0.0, 1.0, 0.0, 0.0],
                        [0.0, 0.0, -(-2.0 * q[2]).exp() * th2, 1.0],
                    ]
                })
                .with_normal(move |_| FrameVector([0.0, 0.0, sh2, th2]))
                .with_implicit(move |p| 2.0 * p.z * (2.0 * p.t).exp() - (2.0 * r).sinh())
            }
            FamilyTag::M4 => HypersurfacePatch::new(
                move |q| Point::new(q[0], q[1], q[2], r),
                [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
            )
            .with_jacobian(|_| {
                [
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0],
                ]
            })
            .with_normal(|_| FrameVector([0.0, 0.0, 0.0, 1.0]))
            .with_implicit(move |p| p.t - r),
        }
    }

    /// The image of the parameter origin.
    pub fn base_point(&self) -> Point {
        self.patch().point([0.0, 0.0, 0.0])
    }

    /// Value of the implicit defining function at an ambient point.
    pub fn implicit_residual(&self, p: Point) -> f64 {
        self.patch()
            .implicit_value(p)
            .expect("catalog patches always carry an implicit function")
    }

    /// Closed-form curvature invariants of this member.
    pub fn expected(&self) -> ExpectedInvariants {
        let r = self.r;
        match self.tag {
            FamilyTag::M1 => {
                let th = r.tanh();
                let sech2 = 1.0 / (r.cosh() * r.cosh());
                ExpectedInvariants {
                    principal: sorted3([1.0 / th, th, -2.0 * th]),
                    mean: 1.0 / th - th,
                    ricci: sorted3([0.0, -4.0 * sech2, -4.0 * sech2]),
                    sectionals: SectionalProfile::PerPlane([0.0, 0.0, -4.0 * sech2]),
                    minimal: false,
                }
            }
            FamilyTag::M2 => {
                let th = r.tanh();
                let sech2 = 1.0 / (r.cosh() * r.cosh());
                ExpectedInvariants {
                    principal: sorted3([th, th, -2.0 * th]),
                    mean: 0.0,
                    ricci: sorted3([sech2, -5.0 * sech2, -2.0 * sech2]),
                    sectionals: SectionalProfile::PerPlane([-sech2, 2.0 * sech2, -4.0 * sech2]),
                    minimal: true,
                }
            }
            FamilyTag::M3 => {
                let th2 = (2.0 * r).tanh();
                let c = (2.0 * r).cosh();
                let sech2 = 1.0 / (c * c);
                ExpectedInvariants {
                    principal: sorted3([th2, th2, -2.0 * th2]),
                    mean: 0.0,
                    ricci: [-2.0 * sech2; 3],
                    sectionals: SectionalProfile::Constant(-sech2),
                    minimal: true,
                }
            }
            FamilyTag::M4 => ExpectedInvariants {
                principal: [-2.0, 1.0, 1.0],
                mean: 0.0,
                ricci: [0.0; 3],
                sectionals: SectionalProfile::Constant(0.0),
                minimal: true,
            },
        }
    }

    /// Element of the member's transitive symmetry subgroup for a parameter
    /// triple `w`, together with the patch parameter its action sends the
    /// parameter origin to.
    ///
    /// M1 takes (rotation angle, axial z, axial t); M2 translations
    /// (x, z, t); M3 translations (x, y, t); M4 translations (x, y, z).
    pub fn orbit_isometry(&self, w: [f64; 3]) -> Result<(Isometry, [f64; 3])> {
        let iso = match self.tag {
            FamilyTag::M1 => Isometry::new(
                Point::new(0.0, 0.0, w[1], w[2]),
                w[0],
                Sign::Plus,
                Sign::Plus,
            ),
            FamilyTag::M2 => Isometry::translation(Point::new(w[0], 0.0, w[1], w[2])),
            FamilyTag::M3 => Isometry::translation(Point::new(w[0], w[1], 0.0, w[2])),
            FamilyTag::M4 => Isometry::translation(Point::new(w[0], w[1], w[2], 0.0)),
        };
        Ok((iso, w))
    }

    /// Frame direction of the unit-speed normal geodesics that sweep the
    /// family out of its r = 0 member (only M2 and M3 arise this way).
    pub fn displacement_direction(tag: FamilyTag) -> Result<FrameVector> {
        match tag {
            FamilyTag::M2 => Ok(FrameVector([0.0, 1.0, 0.0, 0.0])),
            FamilyTag::M3 => Ok(FrameVector([0.0, 0.0, 1.0, 0.0])),
            _ => Err(Error::UnsupportedFamily {
                operation: "parallel displacement from the r = 0 member",
                family: tag.name(),
            }),
        }
    }
}

fn sorted3(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(f64::total_cmp);
    v
}

/// Sectional curvature fingerprint of a family member: either one value per
/// distinguished tangent plane (in the order of [`wedge_planes`]) or a
/// single constant curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectionalProfile {
    PerPlane([f64; 3]),
    Constant(f64),
}

/// Closed-form invariants of a family member at every point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedInvariants {
    /// Principal curvatures, ascending.
    pub principal: [f64; 3],
    /// Mean curvature (trace of the shape operator).
    pub mean: f64,
    /// Induced Ricci eigenvalues, ascending.
    pub ricci: [f64; 3],
    pub sectionals: SectionalProfile,
    pub minimal: bool,
}

/// The three distinguished tangent planes of a family member, as pairs of
/// parameter-coordinate coefficient vectors, ordered to match
/// [`SectionalProfile::PerPlane`].
pub fn wedge_planes(tag: FamilyTag) -> [([f64; 3], [f64; 3]); 3] {
    let e1 = [1.0, 0.0, 0.0];
    let e2 = [0.0, 1.0, 0.0];
    let e3 = [0.0, 0.0, 1.0];
    match tag {
        FamilyTag::M1 | FamilyTag::M2 => [(e1, e3), (e1, e2), (e3, e2)],
        FamilyTag::M3 | FamilyTag::M4 => [(e1, e2), (e1, e3), (e2, e3)],
    }
}

/// Default parameter sweep used by the verification suites.
pub fn default_r_grid(tag: FamilyTag) -> Vec<f64> {
    match tag {
        FamilyTag::M1 => vec![0.25, 0.5, 1.0, 2.0],
        FamilyTag::M2 => vec![0.0, 0.5, 1.0, 2.0],
        FamilyTag::M3 => vec![0.0, 0.25, 0.5, 1.0],
        FamilyTag::M4 => vec![0.0],
    }
}

/// Representative member used when a single r per family is needed.
pub fn orbit_representative_r(tag: FamilyTag) -> f64 {
    match tag {
        FamilyTag::M1 => 1.0,
        FamilyTag::M2 => 1.0,
        FamilyTag::M3 => 0.5,
        FamilyTag::M4 => 0.0,
    }
}

/// Shoots the unit-speed geodesic that leaves (0, 0, z0, t0) in the
/// horizontal direction cos(alpha) E1 + sin(alpha) E2, travels arclength r,
/// and returns the absolute value of the translated tube's implicit
/// function at the endpoint. Zero means distance-r spheres around axis
/// points lie on the corresponding rotation tube.
pub fn tube_residual(r: f64, z0: f64, t0: f64, alpha: f64, steps: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::FamilyParameter {
            family: FamilyTag::M1.name(),
            r,
            reason: "tube radius must be positive",
        });
    }
    let start = Point::new(0.0, 0.0, z0, t0);
    let (s, c) = alpha.sin_cos();
    let v0 = TangentVector::new(start, FrameVector([c, s, 0.0, 0.0]));
    let (end, _) = geodesic(&v0, r, steps)?;
    let relative = start.inverse()?.compose(end)?;
    let value =
        (relative.x * relative.x + relative.y * relative.y) * (-2.0 * relative.t).exp()
            - r.sinh() * r.sinh();
    Ok(value.abs())
}

/// Flows sample points of the r = 0 member along its unit normal geodesics
/// for arclength r and returns the worst implicit residual against the
/// distance-r member. Zero means the family is a parallel family.
pub fn parallel_residual(tag: FamilyTag, r: f64, steps: usize) -> Result<f64> {
    let direction = FamilyId::displacement_direction(tag)?;
    let core = FamilyId::new(tag, 0.0)?;
    let target = FamilyId::new(tag, r)?;
    let patch = core.patch();
    let mut worst = 0.0f64;
    for w in patch.grid(3, 0.2) {
        let p0 = patch.point(w);
        let (end, _) = geodesic(&TangentVector::new(p0, direction), r, steps)?;
        worst = worst.max(target.implicit_residual(end).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::{
        angle_functions, fundamental_residuals, induced_curvature, induced_ricci, shape_spectrum,
        tangent_basis, unit_normal, FdSteps,
    };

    fn sample_ids() -> Vec<FamilyId> {
        let mut out = Vec::new();
        for tag in FamilyTag::ALL {
            for r in default_r_grid(tag) {
                out.push(FamilyId::new(tag, r).unwrap());
            }
        }
        out
    }

    #[test]
    fn parameter_ranges_are_enforced() {
        assert!(FamilyId::new(FamilyTag::M1, 0.0).is_err());
        assert!(FamilyId::new(FamilyTag::M1, -1.0).is_err());
        assert!(FamilyId::new(FamilyTag::M2, -0.1).is_err());
        assert!(FamilyId::new(FamilyTag::M3, -0.1).is_err());
        assert!(FamilyId::new(FamilyTag::M4, -3.0).is_ok());
        assert!(FamilyId::new(FamilyTag::M2, f64::NAN).is_err());
        assert!("m3".parse::<FamilyTag>().unwrap() == FamilyTag::M3);
        assert!("M5".parse::<FamilyTag>().is_err());
    }

    #[test]
    fn immersions_satisfy_their_implicit_functions() {
        for id in sample_ids() {
            let patch = id.patch();
            for w in patch.grid(3, 0.1) {
                let res = id.implicit_residual(patch.point(w)).abs();
                assert!(res < 1e-12, "{} r={} residual {res}", id.tag(), id.r());
            }
        }
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        for id in sample_ids() {
            let patch = id.patch();
            for w in patch.grid(2, 0.2) {
                let analytic = patch.coordinate_jacobian(w, 1e-5);
                let plain = HypersurfacePatch::new(
                    {
                        let p = patch.clone();
                        move |q| p.point(q)
                    },
                    patch.domain(),
                );
                let fd = plain.coordinate_jacobian(w, 1e-5);
                for (ra, rf) in analytic.iter().zip(fd.iter()) {
                    for (a, f) in ra.iter().zip(rf.iter()) {
                        assert!((a - f).abs() < 1e-6, "{} r={}", id.tag(), id.r());
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_normals_are_unit_and_orthogonal() {
        let steps = FdSteps::default();
        for id in sample_ids() {
            let patch = id.patch();
            for w in patch.grid(2, 0.15) {
                let n = patch.closed_form_normal(w).unwrap();
                assert!((n.norm() - 1.0).abs() < 1e-12);
                for t in tangent_basis(&patch, w, steps).unwrap() {
                    assert!(n.dot(t.v).abs() < 1e-12, "{} r={}", id.tag(), id.r());
                }
                // The computed positive-determinant normal is the closed
                // form up to sign.
                let computed = unit_normal(&patch, w, steps).unwrap();
                let mismatch = (computed.v - n).max_abs().min((computed.v + n).max_abs());
                assert!(mismatch < 1e-9, "{} r={} mismatch {mismatch}", id.tag(), id.r());
            }
        }
    }

    #[test]
    fn angle_functions_are_constant_with_nonnegative_height() {
        let steps = FdSteps::default();
        for id in sample_ids() {
            let patch = id.patch();
            let mut d_values = Vec::new();
            for w in patch.grid(3, 0.15) {
                let angles = angle_functions(&patch, w, steps).unwrap();
                assert!(angles.unit_defect() < 1e-9);
                d_values.push(angles.d);
            }
            let first = d_values[0];
            for d in &d_values {
                assert!((d - first).abs() < 1e-10, "{} r={}", id.tag(), id.r());
            }
            assert!(first >= -1e-12, "{} r={} d={first}", id.tag(), id.r());
        }
    }

    #[test]
    fn principal_curvatures_match_closed_forms() {
        let steps = FdSteps::default();
        for id in sample_ids() {
            let patch = id.patch();
            let expected = id.expected();
            for w in patch.grid(2, 0.2) {
                let shape = shape_spectrum(&patch, w, steps).unwrap();
                for (k, e) in shape.principal.iter().zip(expected.principal.iter()) {
                    assert!(
                        (k - e).abs() < 1e-6,
                        "{} r={} got {:?} want {:?}",
                        id.tag(),
                        id.r(),
                        shape.principal,
                        expected.principal
                    );
                }
                assert!((shape.mean - expected.mean).abs() < 1e-6);
                if expected.minimal {
                    assert!(shape.mean.abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn ricci_eigenvalues_match_closed_forms() {
        let steps = FdSteps::default();
        for id in sample_ids() {
            let patch = id.patch();
            let expected = id.expected();
            for w in patch.grid(2, 0.25) {
                let ricci = induced_ricci(&patch, w, steps).unwrap();
                for (got, want) in ricci.iter().zip(expected.ricci.iter()) {
                    assert!(
                        (got - want).abs() < 1e-6,
                        "{} r={} got {:?} want {:?}",
                        id.tag(),
                        id.r(),
                        ricci,
                        expected.ricci
                    );
                }
            }
        }
    }

    #[test]
    fn tube_ricci_kernel_is_the_rotation_direction() {
        let id = FamilyId::new(FamilyTag::M1, 1.0).unwrap();
        let (values, vectors) =
            crate::hypersurface::induced_ricci_eigenpairs(&id.patch(), [0.0, 0.3, -0.2], FdSteps::default())
                .unwrap();
        assert!(values[2].abs() < 1e-7, "{values:?}");
        let kernel = vectors.column(2);
        assert!(
            kernel[0].abs() > 1e3 * (kernel[1].abs() + kernel[2].abs()),
            "kernel direction {kernel:?}"
        );
    }

    #[test]
    fn sectional_curvatures_match_closed_forms() {
        let steps = FdSteps::default();
        for id in sample_ids() {
            let patch = id.patch();
            let expected = id.expected();
            let planes = wedge_planes(id.tag());
            let w = [0.1, -0.2, 0.15];
            let curv = induced_curvature(&patch, w, steps).unwrap();
            let targets: [f64; 3] = match expected.sectionals {
                SectionalProfile::PerPlane(v) => v,
                SectionalProfile::Constant(k) => [k; 3],
            };
            for ((u, v), want) in planes.iter().zip(targets.iter()) {
                let got = curv.sectional(*u, *v).unwrap();
                assert!(
                    (got - want).abs() < 1e-4,
                    "{} r={} plane {u:?}^{v:?}: got {got}, want {want}",
                    id.tag(),
                    id.r()
                );
            }
        }
    }

    #[test]
    fn constant_curvature_member_is_isotropic() {
        // For M3 the sectional curvature must not depend on the plane.
        let id = FamilyId::new(FamilyTag::M3, 0.5).unwrap();
        let curv = induced_curvature(&id.patch(), [0.2, -0.1, 0.3], FdSteps::default()).unwrap();
        let k0 = curv.sectional([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
        let skew = curv
            .sectional([1.0, 0.4, -0.3], [0.2, -0.5, 1.0])
            .unwrap();
        assert!((k0 - skew).abs() < 1e-4, "{k0} vs {skew}");
    }

    #[test]
    fn horizontal_leaf_is_flat() {
        let id = FamilyId::new(FamilyTag::M4, 0.7).unwrap();
        let curv = induced_curvature(&id.patch(), [0.1, 0.2, -0.3], FdSteps::default()).unwrap();
        assert!(curv.max_abs() < 1e-6);
    }

    #[test]
    fn gauss_codazzi_hold_on_representatives() {
        let steps = FdSteps::default();
        for tag in FamilyTag::ALL {
            let id = FamilyId::new(tag, orbit_representative_r(tag).max(0.3)).unwrap();
            let res = fundamental_residuals(&id.patch(), [0.15, -0.1, 0.2], steps).unwrap();
            assert!(res.gauss < 1e-3, "{tag} gauss {}", res.gauss);
            assert!(res.codazzi < 1e-3, "{tag} codazzi {}", res.codazzi);
        }
    }

    #[test]
    fn symmetry_subgroups_act_transitively_on_patches() {
        for tag in FamilyTag::ALL {
            let id = FamilyId::new(tag, orbit_representative_r(tag)).unwrap();
            let patch = id.patch();
            let base = id.base_point();
            for w in [[0.3, -0.4, 0.2], [-0.7, 0.1, -0.5], [1.1, 0.6, 0.4]] {
                let (iso, target) = id.orbit_isometry(w).unwrap();
                let moved = iso.apply(base).unwrap();
                let direct = patch.point(target);
                assert!((moved.x - direct.x).abs() < 1e-12);
                assert!((moved.y - direct.y).abs() < 1e-12);
                assert!((moved.z - direct.z).abs() < 1e-12);
                assert!((moved.t - direct.t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetry_subgroups_preserve_the_implicit_set() {
        for tag in FamilyTag::ALL {
            let id = FamilyId::new(tag, orbit_representative_r(tag)).unwrap();
            let patch = id.patch();
            let (iso, _) = id.orbit_isometry([0.4, -0.3, 0.6]).unwrap();
            for w in patch.grid(2, 0.2) {
                let image = iso.apply(patch.point(w)).unwrap();
                assert!(id.implicit_residual(image).abs() < 1e-10, "{tag}");
            }
        }
    }

    #[test]
    fn equidistant_geodesics_land_on_tubes() {
        for (r, z0, t0, alpha) in [
            (0.8, 0.0, 0.0, 0.3),
            (1.5, 2.0, -0.7, 2.1),
            (0.4, -1.0, 0.5, 4.9),
        ] {
            let res = tube_residual(r, z0, t0, alpha, 20_000).unwrap();
            assert!(res < 1e-6, "r={r} residual {res}");
        }
        assert!(tube_residual(-1.0, 0.0, 0.0, 0.0, 100).is_err());
    }

    #[test]
    fn parallel_families_are_swept_by_normal_geodesics() {
        assert!(parallel_residual(FamilyTag::M2, 1.0, 20_000).unwrap() < 1e-6);
        assert!(parallel_residual(FamilyTag::M3, 0.5, 20_000).unwrap() < 1e-6);
        assert!(parallel_residual(FamilyTag::M1, 1.0, 100).is_err());
        assert!(parallel_residual(FamilyTag::M4, 1.0, 100).is_err());
    }

    #[test]
    fn base_points_sit_on_their_surfaces() {
        for id in sample_ids() {
            assert!(id.implicit_residual(id.base_point()).abs() < 1e-12);
        }
    }
}
