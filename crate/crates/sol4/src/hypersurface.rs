//! Extrinsic geometry of immersed hypersurfaces: tangent frames, oriented
//! unit normals, angle functions, the adapted tangent frame, the shape
//! operator and its spectrum, the induced Ricci operator, the induced
//! (intrinsic) curvature tensor, and Gauss/Codazzi consistency residuals.
//!
//! A patch is a parametrized immersion of a 3-dimensional box. Everything
//! downstream works from frame coefficients at the image point; derivatives
//! fall back to central differences when no closed form is attached.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::ambient::{connection_apply, curvature_frame, PLANE_DEGENERACY_THRESHOLD};
use crate::error::{Error, Result};
use crate::solgroup::{FrameVector, Isometry, Point, Sign, TangentVector};

/// Smallest singular value of the frame-coefficient Jacobian below which an
/// immersion counts as rank-deficient.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Asymmetry of the numerically built shape operator above which the normal
/// field or the difference steps are considered broken.
pub const ASYMMETRY_LIMIT: f64 = 1e-2;

/// Central-difference steps: `first` for first derivatives (tangents,
/// normal derivatives), `second` for the nested differences feeding
/// curvature-level quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub first: f64,
    pub second: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps {
            first: 1e-5,
            second: 1e-3,
        }
    }
}

type ImmersionFn = dyn Fn([f64; 3]) -> Point + Send + Sync;
type JacobianFn = dyn Fn([f64; 3]) -> [[f64; 4]; 3] + Send + Sync;
type NormalFn = dyn Fn([f64; 3]) -> FrameVector + Send + Sync;
type ImplicitFn = dyn Fn(Point) -> f64 + Send + Sync;

/// A parametrized hypersurface patch over a box domain.
///
/// Optional attachments: an analytic coordinate Jacobian (rows are the
/// coordinate partial velocities ∂Φ/∂u_a), a closed-form unit normal in
/// frame coefficients, and an implicit defining function whose zero set
/// contains the image.
#[derive(Clone)]
pub struct HypersurfacePatch {
    immersion: Arc<ImmersionFn>,
    jacobian: Option<Arc<JacobianFn>>,
    normal: Option<Arc<NormalFn>>,
    implicit: Option<Arc<ImplicitFn>>,
    domain: [[f64; 2]; 3],
}

impl HypersurfacePatch {
    pub fn new(
        immersion: impl Fn([f64; 3]) -> Point + Send + Sync + 'static,
        domain: [[f64; 2]; 3],
    ) -> HypersurfacePatch {
        HypersurfacePatch {
            immersion: Arc::new(immersion),
            jacobian: None,
            normal: None,
            implicit: None,
            domain,
        }
    }

    pub fn with_jacobian(
        mut self,
        jacobian: impl Fn([f64; 3]) -> [[f64; 4]; 3] + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn with_normal(
        mut self,
        normal: impl Fn([f64; 3]) -> FrameVector + Send + Sync + 'static,
    ) -> Self {
        self.normal = Some(Arc::new(normal));
        self
    }

    pub fn with_implicit(
        mut self,
        implicit: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.implicit = Some(Arc::new(implicit));
        self
    }

    /// Image of a parameter point.
    pub fn point(&self, q: [f64; 3]) -> Point {
        (self.immersion)(q)
    }

    pub fn domain(&self) -> [[f64; 2]; 3] {
        self.domain
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Closed-form unit normal at a parameter point, when attached.
    pub fn closed_form_normal(&self, q: [f64; 3]) -> Option<FrameVector> {
        self.normal.as_ref().map(|n| n(q))
    }

    /// Value of the implicit defining function at an ambient point, when attached.
    pub fn implicit_value(&self, p: Point) -> Option<f64> {
        self.implicit.as_ref().map(|f| f(p))
    }

    /// Coordinate partial velocities at `q`, analytic or by central differences.
    pub fn coordinate_jacobian(&self, q: [f64; 3], step: f64) -> [[f64; 4]; 3] {
        if let Some(jac) = &self.jacobian {
            return jac(q);
        }
        let mut rows = [[0.0; 4]; 3];
        for (a, row) in rows.iter_mut().enumerate() {
            let mut qp = q;
            let mut qm = q;
            qp[a] += step;
            qm[a] -= step;
            let pp = self.point(qp);
            let pm = self.point(qm);
            *row = [
                (pp.x - pm.x) / (2.0 * step),
                (pp.y - pm.y) / (2.0 * step),
                (pp.z - pm.z) / (2.0 * step),
                (pp.t - pm.t) / (2.0 * step),
            ];
        }
        rows
    }

    /// A uniform sampling grid, `n` points per axis, shrunk away from the
    /// boundary by the fraction `margin` on each side.
    pub fn grid(&self, n: usize, margin: f64) -> Vec<[f64; 3]> {
        let n = n.max(1);
        let mut axis = [[0.0; 2]; 3];
        for (i, bounds) in self.domain.iter().enumerate() {
            let len = bounds[1] - bounds[0];
            axis[i] = [bounds[0] + margin * len, bounds[1] - margin * len];
        }
        let coord = |bounds: [f64; 2], k: usize| {
            if n == 1 {
                0.5 * (bounds[0] + bounds[1])
            } else {
                bounds[0] + (bounds[1] - bounds[0]) * k as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push([coord(axis[0], i), coord(axis[1], j), coord(axis[2], k)]);
                }
            }
        }
        out
    }

    /// The congruent patch obtained by applying an isometry pointwise.
    ///
    /// Analytic attachments transform along: the Jacobian by the coordinate
    /// differential of the isometry, the normal by its frame-coefficient
    /// action, the implicit function by composition with the inverse.
    /// Parameter points whose image overflows the coordinate range surface
    /// as non-finite values in downstream operations.
    pub fn transform(&self, iso: &Isometry) -> Result<HypersurfacePatch> {
        let inv = iso.inverse()?;
        let nan = Point::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN);
        let imm = Arc::clone(&self.immersion);
        let iso_c = *iso;
        let mut out = HypersurfacePatch::new(
            move |q| iso_c.apply(imm(q)).unwrap_or(nan),
            self.domain,
        );
        if let Some(jac) = &self.jacobian {
            let imm = Arc::clone(&self.immersion);
            let jac = Arc::clone(jac);
            out = out.with_jacobian(move |q| {
                let p = imm(q);
                let rows = jac(q);
                let m = iso_c.linear_xy();
                let ez = iso_c.eps_z.value();
                // Coordinate differential of the isometry at p: the linear
                // part acts block-diagonally, the left translation scales
                // (dx, dy) by e^{tau_t} and dz by e^{-2 tau_t}.
                let et = iso_c.trans.t.exp();
                let em2t = (-2.0 * iso_c.trans.t).exp();
                let _ = p;
                let mut new_rows = [[0.0; 4]; 3];
                for (row, new_row) in rows.iter().zip(new_rows.iter_mut()) {
                    let rx = m[0][0] * row[0] + m[0][1] * row[1];
                    let ry = m[1][0] * row[0] + m[1][1] * row[1];
                    *new_row = [et * rx, et * ry, em2t * ez * row[2], row[3]];
                }
                new_rows
            });
        }
        if let Some(normal) = &self.normal {
            let normal = Arc::clone(normal);
            out = out.with_normal(move |q| iso_c.coefficient_action(normal(q)));
        }
        if let Some(implicit) = &self.implicit {
            let implicit = Arc::clone(implicit);
            let inv_c = inv;
            out = out.with_implicit(move |p| match inv_c.apply(p) {
                Ok(q) => implicit(q),
                Err(_) => f64::NAN,
            });
        }
        Ok(out)
    }

    /// Precomposes the patch with a parameter diffeomorphism `map`
    /// (new parameter -> old parameter) over the new domain.
    ///
    /// `map_jacobian`, when given, returns rows ∂map/∂u_a so the coordinate
    /// Jacobian can be chained analytically.
    pub fn reparametrize(
        &self,
        map: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static,
        map_jacobian: Option<Box<dyn Fn([f64; 3]) -> [[f64; 3]; 3] + Send + Sync>>,
        domain: [[f64; 2]; 3],
    ) -> HypersurfacePatch {
        let map = Arc::new(map);
        let imm = Arc::clone(&self.immersion);
        let map_c = Arc::clone(&map);
        let mut out = HypersurfacePatch::new(move |q| imm(map_c(q)), domain);
        if let (Some(jac), Some(mj)) = (&self.jacobian, map_jacobian) {
            let jac = Arc::clone(jac);
            let map_c = Arc::clone(&map);
            out = out.with_jacobian(move |q| {
                let v = map_c(q);
                let old = jac(v);
                let chain = mj(q);
                let mut rows = [[0.0; 4]; 3];
                for (a, row) in rows.iter_mut().enumerate() {
                    for b in 0..3 {
                        for (r, o) in row.iter_mut().zip(old[b].iter()) {
                            *r += chain[a][b] * o;
                        }
                    }
                }
                rows
            });
        }
        if let Some(normal) = &self.normal {
            let normal = Arc::clone(normal);
            let map_c = Arc::clone(&map);
            out = out.with_normal(move |q| normal(map_c(q)));
        }
        if let Some(implicit) = &self.implicit {
            let implicit = Arc::clone(implicit);
            out = out.with_implicit(move |p| implicit(p));
        }
        out
    }
}

/// Frame-coefficient tangent rows at a parameter point, with the image point.
fn frame_rows(patch: &HypersurfacePatch, q: [f64; 3], steps: FdSteps) -> Result<(Point, [FrameVector; 3])> {
    let p = patch.point(q);
    let jac = patch.coordinate_jacobian(q, steps.first);
    let mut rows = [FrameVector::ZERO; 3];
    for (row, vel) in rows.iter_mut().zip(jac.iter()) {
        *row = TangentVector::from_coordinate_velocity(p, *vel)?.v;
    }
    let g = gram_of(&rows);
    let sigma_min = smallest_singular_value(&g);
    if !(sigma_min > RANK_THRESHOLD) {
        return Err(Error::RankDeficient {
            u0: q[0],
            u1: q[1],
            u2: q[2],
            sigma: sigma_min,
        });
    }
    Ok((p, rows))
}

fn gram_of(rows: &[FrameVector; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|a, b| rows[a].dot(rows[b]))
}

/// Smallest singular value of the 3x4 frame Jacobian, via the Gram matrix.
fn smallest_singular_value(g: &Matrix3<f64>) -> f64 {
    let eig = g.symmetric_eigenvalues();
    eig.iter().fold(f64::INFINITY, |m, &l| m.min(l)).max(0.0).sqrt()
}

/// The three coordinate tangent vectors of the patch at `q`.
pub fn tangent_basis(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<[TangentVector; 3]> {
    let (p, rows) = frame_rows(patch, q, steps)?;
    Ok(rows.map(|v| TangentVector::new(p, v)))
}

/// Generalized cross product: the vector whose pairing with e_l is
/// det(rows t1, t2, t3, e_l); it is orthogonal to all three rows and makes
/// det(t1, t2, t3, n) > 0.
fn cross_normal(rows: &[FrameVector; 3]) -> FrameVector {
    let minor = |skip: usize| {
        let mut m = Matrix3::<f64>::zeros();
        for (a, row) in rows.iter().enumerate() {
            let mut c = 0;
            for (l, val) in row.0.iter().enumerate() {
                if l == skip {
                    continue;
                }
                m[(a, c)] = *val;
                c += 1;
            }
        }
        m.determinant()
    };
    let mut n = [0.0; 4];
    for (k, nk) in n.iter_mut().enumerate() {
        let sign = if (3 + k) % 2 == 0 { 1.0 } else { -1.0 };
        *nk = sign * minor(k);
    }
    FrameVector(n)
}

/// Unit normal with the positive-determinant orientation, plus its sign
/// relative to the closed-form normal when one is attached (+1 if none).
fn oriented_normal(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<(Point, [FrameVector; 3], FrameVector, f64)> {
    let (p, rows) = frame_rows(patch, q, steps)?;
    let raw = cross_normal(&rows);
    let norm = raw.norm();
    if !(norm > 0.0) || !raw.is_finite() {
        return Err(Error::NonFinite {
            context: "unit normal",
        });
    }
    let n = raw * (1.0 / norm);
    let sign = match patch.closed_form_normal(q) {
        Some(reference) => {
            if n.dot(reference) < 0.0 {
                -1.0
            } else {
                1.0
            }
        }
        None => 1.0,
    };
    Ok((p, rows, n, sign))
}

/// Unit normal at `q`, oriented so that det(t1, t2, t3, N) > 0.
pub fn unit_normal(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<TangentVector> {
    let (p, _, n, _) = oriented_normal(patch, q, steps)?;
    Ok(TangentVector::new(p, n))
}

/// Sign relating the computed positive-determinant normal to the patch's
/// closed-form normal: `closed_form = sign * computed`. `None` when the
/// patch carries no closed-form normal.
pub fn normal_alignment(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<Option<Sign>> {
    if patch.closed_form_normal(q).is_none() {
        return Ok(None);
    }
    let (_, _, _, sign) = oriented_normal(patch, q, steps)?;
    Ok(Some(Sign::of(sign)))
}

/// Frame coefficients (a, b, c, d) of the unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleFunctions {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl AngleFunctions {
    pub fn from_frame(n: FrameVector) -> AngleFunctions {
        AngleFunctions {
            a: n.0[0],
            b: n.0[1],
            c: n.0[2],
            d: n.0[3],
        }
    }

    pub fn as_frame(&self) -> FrameVector {
        FrameVector([self.a, self.b, self.c, self.d])
    }

    /// |a^2 + b^2 + c^2 + d^2 - 1|.
    pub fn unit_defect(&self) -> f64 {
        (self.as_frame().norm_squared() - 1.0).abs()
    }
}

/// Angle functions of the unit normal. Orientation follows the closed-form
/// normal when the patch carries one, and the positive-determinant
/// convention otherwise.
pub fn angle_functions(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<AngleFunctions> {
    let (_, _, n, sign) = oriented_normal(patch, q, steps)?;
    Ok(AngleFunctions::from_frame(n * sign))
}

/// The adapted tangent frame associated with angle functions (a, b, c, d):
/// three orthonormal vectors spanning the orthogonal complement of the
/// normal whenever (a, b) != (0, 0) or (c, d) != (0, 0) appropriately.
pub fn adapted_frame(angles: &AngleFunctions, base: Point) -> [TangentVector; 3] {
    let AngleFunctions { a, b, c, d } = *angles;
    [
        TangentVector::new(base, FrameVector([b, -a, d, -c])),
        TangentVector::new(base, FrameVector([c, -d, -a, b])),
        TangentVector::new(base, FrameVector([d, c, -b, -a])),
    ]
}

/// Shape operator data at a parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeData {
    /// Second fundamental form S_ab = g(-∇_{t_a} N, t_b), symmetrized.
    pub second_fundamental: Matrix3<f64>,
    /// Induced metric G_ab = g(t_a, t_b).
    pub gram: Matrix3<f64>,
    /// Principal curvatures, ascending.
    pub principal: [f64; 3],
    /// Mean curvature (trace of the shape operator, unnormalized).
    pub mean: f64,
    /// Largest entry of S - S^T before symmetrization.
    pub asymmetry: f64,
}

/// Second fundamental form and Gram matrix with a fixed normal-field sign.
fn shape_matrices(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
    sign: f64,
) -> Result<(Point, [FrameVector; 3], FrameVector, Matrix3<f64>, Matrix3<f64>, f64)> {
    let (p, rows, n_raw, _) = oriented_normal(patch, q, steps)?;
    let n = n_raw * sign;
    let h = steps.first;
    // Parameter derivative of the normal field, then the connection
    // correction: ∇_{t_a} N = Σ_i (∂ n_i / ∂ u_a) E_i + Σ_{k,j} t_a^k n_j ∇_{E_k} E_j.
    let mut s = Matrix3::<f64>::zeros();
    for a in 0..3 {
        let mut qp = q;
        let mut qm = q;
        qp[a] += h;
        qm[a] -= h;
        let (_, _, np, _) = oriented_normal(patch, qp, steps)?;
        let (_, _, nm, _) = oriented_normal(patch, qm, steps)?;
        let dn = (np - nm) * (sign * 0.5 / h);
        let grad = dn + connection_apply(rows[a], n);
        for b in 0..3 {
            s[(a, b)] = -grad.dot(rows[b]);
        }
    }
    let g = gram_of(&rows);
    let asymmetry = (s - s.transpose()).abs().max();
    let s_sym = (s + s.transpose()) * 0.5;
    Ok((p, rows, n, s_sym, g, asymmetry))
}

/// Solves the generalized symmetric eigenproblem S w = κ G w by Cholesky
/// reduction; returns eigenvalues ascending with matching eigenvectors
/// (columns, in the tangent-coordinate basis).
fn generalized_symmetric_eigen(
    s: &Matrix3<f64>,
    g: &Matrix3<f64>,
) -> Result<(Vector3<f64>, Matrix3<f64>)> {
    let chol = nalgebra::Cholesky::new(*g).ok_or(Error::LinearAlgebra {
        context: "Cholesky factorization of the induced metric",
    })?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(s)
        .ok_or(Error::LinearAlgebra {
            context: "lower-triangular solve",
        })?;
    let a_t = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(Error::LinearAlgebra {
            context: "lower-triangular solve",
        })?;
    let a = (a_t.transpose() + a_t) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(a);
    // Back-substitute eigenvectors: w = L^{-T} w̃.
    let vecs = l
        .transpose()
        .solve_upper_triangular(&eig.eigenvectors)
        .ok_or(Error::LinearAlgebra {
            context: "upper-triangular solve",
        })?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = Vector3::new(
        eig.eigenvalues[order[0]],
        eig.eigenvalues[order[1]],
        eig.eigenvalues[order[2]],
    );
    let vectors = Matrix3::from_columns(&[
        vecs.column(order[0]).into_owned(),
        vecs.column(order[1]).into_owned(),
        vecs.column(order[2]).into_owned(),
    ]);
    Ok((values, vectors))
}

/// Principal curvatures and mean curvature at a parameter point.
///
/// The normal field is differenced in the parameters; its orientation
/// follows the closed-form normal when the patch carries one.
pub fn shape_spectrum(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<ShapeData> {
    let (_, _, _, sign) = oriented_normal(patch, q, steps)?;
    let (_, _, _, s, g, asymmetry) = shape_matrices(patch, q, steps, sign)?;
    if !(asymmetry <= ASYMMETRY_LIMIT) {
        return Err(Error::AsymmetricShape {
            asymmetry,
            limit: ASYMMETRY_LIMIT,
        });
    }
    let (values, _) = generalized_symmetric_eigen(&s, &g)?;
    let g_inv = g.try_inverse().ok_or(Error::LinearAlgebra {
        context: "inverting the induced metric",
    })?;
    let mean = (g_inv * s).trace();
    Ok(ShapeData {
        second_fundamental: s,
        gram: g,
        principal: [values[0], values[1], values[2]],
        mean,
        asymmetry,
    })
}

/// Eigenvalues of the induced Ricci operator, ascending.
pub fn induced_ricci(patch: &HypersurfacePatch, q: [f64; 3], steps: FdSteps) -> Result<[f64; 3]> {
    induced_ricci_eigenpairs(patch, q, steps).map(|(values, _)| values)
}

/// Induced Ricci eigenvalues (ascending) with eigenvectors expressed in the
/// tangent-coordinate basis (columns of the returned matrix).
///
/// The Ricci form combines the ambient contribution — written through the
/// normal's angle functions and the images J_1 N, J_2 N — with the shape
/// terms (trace A)·S - S G^{-1} S.
pub fn induced_ricci_eigenpairs(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<([f64; 3], Matrix3<f64>)> {
    let (_, _, _, sign) = oriented_normal(patch, q, steps)?;
    let (_, rows, n, s, g, _) = shape_matrices(patch, q, steps, sign)?;
    let d = n.0[3];
    let j1n = crate::ambient::Structure::J1.apply(n);
    let j2n = crate::ambient::Structure::J2.apply(n);
    let j1: Vector3<f64> = Vector3::from_fn(|a, _| rows[a].dot(j1n));
    let j2: Vector3<f64> = Vector3::from_fn(|a, _| rows[a].dot(j2n));
    let p4: Vector3<f64> = Vector3::from_fn(|a, _| rows[a].0[3]);
    let g_inv = g.try_inverse().ok_or(Error::LinearAlgebra {
        context: "inverting the induced metric",
    })?;
    let mean = (g_inv * s).trace();
    let ric = g * (-2.0 + 3.0 * d * d)
        + j1 * j1.transpose() * 1.5
        + j2 * j2.transpose() * 1.5
        - p4 * p4.transpose() * 3.0
        + s * mean
        - s * g_inv * s;
    let (values, vectors) = generalized_symmetric_eigen(&ric, &g)?;
    Ok(([values[0], values[1], values[2]], vectors))
}

/// The induced curvature tensor of the patch metric at a point, computed
/// intrinsically from nested central differences of the Gram matrix, with
/// all four indices lowered: `component(a, b, c, d)` is
/// g(R(∂_a, ∂_b) ∂_c, ∂_d).
#[derive(Debug, Clone)]
pub struct InducedCurvature {
    riem: [[[[f64; 3]; 3]; 3]; 3],
    pub gram: Matrix3<f64>,
}

impl InducedCurvature {
    pub fn component(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riem[a][b][c][d]
    }

    /// Largest absolute component; zero for a flat metric.
    pub fn max_abs(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        worst = worst.max(self.riem[a][b][c][d].abs());
                    }
                }
            }
        }
        worst
    }

    /// Sectional curvature of the tangent plane spanned by coordinate
    /// coefficient vectors u, v.
    pub fn sectional(&self, u: [f64; 3], v: [f64; 3]) -> Result<f64> {
        let uu = quad(&self.gram, &u, &u);
        let vv = quad(&self.gram, &v, &v);
        let uv = quad(&self.gram, &u, &v);
        let denom = uu * vv - uv * uv;
        if !denom.is_finite() || denom < PLANE_DEGENERACY_THRESHOLD {
            return Err(Error::DegeneratePlane {
                gram: denom,
                threshold: PLANE_DEGENERACY_THRESHOLD,
            });
        }
        let mut num = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        num += self.riem[a][b][c][d] * u[a] * v[b] * v[c] * u[d];
                    }
                }
            }
        }
        Ok(num / denom)
    }
}

fn quad(g: &Matrix3<f64>, u: &[f64; 3], v: &[f64; 3]) -> f64 {
    let mut out = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            out += g[(a, b)] * u[a] * v[b];
        }
    }
    out
}

fn gram_at(patch: &HypersurfacePatch, q: [f64; 3], steps: FdSteps) -> Result<Matrix3<f64>> {
    let (_, rows) = frame_rows(patch, q, steps)?;
    Ok(gram_of(&rows))
}

/// Christoffel symbols Γ^c_{ab} of the induced metric at `q`.
fn christoffel(patch: &HypersurfacePatch, q: [f64; 3], steps: FdSteps) -> Result<[[[f64; 3]; 3]; 3]> {
    let h = steps.second;
    let g = gram_at(patch, q, steps)?;
    let g_inv = g.try_inverse().ok_or(Error::LinearAlgebra {
        context: "inverting the induced metric",
    })?;
    let mut dg = [Matrix3::<f64>::zeros(); 3];
    for (a, dga) in dg.iter_mut().enumerate() {
        let mut qp = q;
        let mut qm = q;
        qp[a] += h;
        qm[a] -= h;
        *dga = (gram_at(patch, qp, steps)? - gram_at(patch, qm, steps)?) * (0.5 / h);
    }
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut sum = 0.0;
                for d in 0..3 {
                    sum += g_inv[(c, d)] * (dg[a][(b, d)] + dg[b][(a, d)] - dg[d][(a, b)]);
                }
                gamma[a][b][c] = 0.5 * sum;
            }
        }
    }
    Ok(gamma)
}

/// Intrinsic curvature tensor of the induced metric by nested differences.
pub fn induced_curvature(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<InducedCurvature> {
    let h = steps.second;
    let g = gram_at(patch, q, steps)?;
    let gamma = christoffel(patch, q, steps)?;
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
    for (a, dga) in dgamma.iter_mut().enumerate() {
        let mut qp = q;
        let mut qm = q;
        qp[a] += h;
        qm[a] -= h;
        let gp = christoffel(patch, qp, steps)?;
        let gm = christoffel(patch, qm, steps)?;
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    dga[b][c][d] = (gp[b][c][d] - gm[b][c][d]) * (0.5 / h);
                }
            }
        }
    }
    // R(∂_a, ∂_b)∂_c = (∂_a Γ^d_{bc} - ∂_b Γ^d_{ac} + Γ^e_{bc} Γ^d_{ae} - Γ^e_{ac} Γ^d_{be}) ∂_d.
    let mut riem = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut up = [0.0; 3];
                for (d, updd) in up.iter_mut().enumerate() {
                    let mut val = dgamma[a][b][c][d] - dgamma[b][a][c][d];
                    for e in 0..3 {
                        val += gamma[b][c][e] * gamma[a][e][d] - gamma[a][c][e] * gamma[b][e][d];
                    }
                    *updd = val;
                }
                for d in 0..3 {
                    let mut low = 0.0;
                    for (e, upe) in up.iter().enumerate() {
                        low += upe * g[(e, d)];
                    }
                    riem[a][b][c][d] = low;
                }
            }
        }
    }
    Ok(InducedCurvature { riem, gram: g })
}

/// Worst-case Gauss and Codazzi residuals at a parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalResiduals {
    pub gauss: f64,
    pub codazzi: f64,
}

/// Compares the intrinsic curvature and the derivative of the shape
/// operator against their ambient predictions.
///
/// Gauss: R_{abcd} = g(R̃(t_a, t_b)t_c, t_d) + S_{bc} S_{ad} - S_{ac} S_{bd}.
/// Codazzi: g(R̃(t_a, t_b)t_c, N) = g((∇_a A)∂_b - (∇_b A)∂_a, ∂_c),
/// with A differenced in the parameters and corrected by the induced
/// Christoffel symbols.
pub fn fundamental_residuals(
    patch: &HypersurfacePatch,
    q: [f64; 3],
    steps: FdSteps,
) -> Result<FundamentalResiduals> {
    let (_, _, _, sign) = oriented_normal(patch, q, steps)?;
    let (_, rows, n, s, g, _) = shape_matrices(patch, q, steps, sign)?;
    let intrinsic = induced_curvature(patch, q, steps)?;

    let mut gauss: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let ambient = curvature_frame(rows[a], rows[b], rows[c]);
                for d in 0..3 {
                    let predicted =
                        ambient.dot(rows[d]) + s[(b, c)] * s[(a, d)] - s[(a, c)] * s[(b, d)];
                    gauss = gauss.max((intrinsic.component(a, b, c, d) - predicted).abs());
                }
            }
        }
    }

    // Shape-operator matrix field A^c_b(u) = (G^{-1} S)(u) with the normal
    // sign fixed at the center point.
    let h = steps.second;
    let a_field = |u: [f64; 3]| -> Result<Matrix3<f64>> {
        let (_, _, _, su, gu, _) = shape_matrices(patch, u, steps, sign)?;
        let gu_inv = gu.try_inverse().ok_or(Error::LinearAlgebra {
            context: "inverting the induced metric",
        })?;
        Ok(gu_inv * su)
    };
    let a_center = a_field(q)?;
    let mut da = [Matrix3::<f64>::zeros(); 3];
    for (a, daa) in da.iter_mut().enumerate() {
        let mut qp = q;
        let mut qm = q;
        qp[a] += h;
        qm[a] -= h;
        *daa = (a_field(qp)? - a_field(qm)?) * (0.5 / h);
    }
    let gamma = christoffel(patch, q, steps)?;
    // (∇_a A)^d_b = ∂_a A^d_b + Γ^d_{ae} A^e_b - Γ^e_{ab} A^d_e.
    let nabla_a = |a: usize, b: usize, d: usize| -> f64 {
        let mut val = da[a][(d, b)];
        for e in 0..3 {
            val += gamma[a][e][d] * a_center[(e, b)] - gamma[a][b][e] * a_center[(d, e)];
        }
        val
    };
    let mut codazzi: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let ambient_ab = |c: usize| curvature_frame(rows[a], rows[b], rows[c]).dot(n);
            for c in 0..3 {
                let mut predicted = 0.0;
                for d in 0..3 {
                    predicted += g[(d, c)] * (nabla_a(a, b, d) - nabla_a(b, a, d));
                }
                codazzi = codazzi.max((ambient_ab(c) - predicted).abs());
            }
        }
    }
    Ok(FundamentalResiduals { gauss, codazzi })
}
