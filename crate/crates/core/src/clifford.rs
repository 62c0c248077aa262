//! Sign operators, Clifford subspaces, synchronization and identification maps.

use nalgebra::{Matrix2, Matrix4, Matrix5, SymmetricEigen, Vector2};

use crate::error::{Error, Result};
use crate::gamma::{gamma5, standard_generators};
use crate::spin::{
    anticommutator, c, commutator, expm, max_abs, operator_norm, rank, spectrum, spin_adjoint,
    spin_orthonormalize, spin_product, trace_inner, SpinOperator, Spinor, C64, I,
};
use crate::tolerance::Tolerances;

const ALG_TOL: f64 = 1e-8;

/// A spin-symmetric operator with `v^2 = 1` whose form `<.|v.>` is positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignOperator(SpinOperator);

impl SignOperator {
    pub fn new(v: SpinOperator, tol: &Tolerances) -> Result<Self> {
        let scale = operator_norm(&v).max(1.0);
        if max_abs(&(spin_adjoint(&v) - v)) > ALG_TOL * scale
            || max_abs(&(v * v - SpinOperator::identity())) > ALG_TOL * scale * scale
        {
            return Err(Error::NotAdmissible("not an involutive spin-symmetric operator".into()));
        }
        let sv = crate::spin::signature() * v;
        let herm = (sv + sv.adjoint()) * c(0.5, 0.0);
        let min = herm.symmetric_eigenvalues().min();
        if min <= tol.definiteness_margin {
            return Err(Error::NotAdmissible("sign operator is not positive".into()));
        }
        Ok(Self(v))
    }

    /// Wraps without validation; for operators that are sign operators by construction.
    pub fn new_unchecked(v: SpinOperator) -> Self {
        Self(v)
    }

    /// The sign operator `diag(1, 1, -1, -1)` of the reference basis.
    pub fn standard() -> Self {
        Self(crate::spin::signature())
    }

    pub fn matrix(&self) -> &SpinOperator {
        &self.0
    }

    /// Projector onto the positive-definite eigenspace.
    pub fn positive_projector(&self) -> SpinOperator {
        (SpinOperator::identity() + self.0) * c(0.5, 0.0)
    }

    /// Conjugation `U v U^{-1}`.
    pub fn conjugated(&self, u: &SpinOperator) -> Self {
        let inv = u.try_inverse().expect("invertible conjugation");
        Self(u * self.0 * inv)
    }
}

/// `[v, w]` has full rank.
pub fn is_generically_separated(v: &SignOperator, w: &SignOperator, tol: &Tolerances) -> bool {
    rank(&commutator(v.matrix(), w.matrix()), tol.rank_threshold) == 4
}

/// Five spin-symmetric operators obeying `{e_i, e_j} = 2 g_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordSubspace {
    generators: [SpinOperator; 5],
    gram: Matrix5<f64>,
    gram_inv: Matrix5<f64>,
}

impl CliffordSubspace {
    pub fn new(generators: [SpinOperator; 5]) -> Result<Self> {
        let gram = Matrix5::from_fn(|i, j| trace_inner(&generators[i], &generators[j]).re);
        let scale = generators.iter().map(operator_norm).fold(1.0, f64::max);
        for (i, gi) in generators.iter().enumerate() {
            if max_abs(&(spin_adjoint(gi) - gi)) > ALG_TOL * scale {
                return Err(Error::NotAdmissible(format!("generator {i} is not spin-symmetric")));
            }
            for (j, gj) in generators.iter().enumerate() {
                let expect = SpinOperator::identity() * c(2.0 * gram[(i, j)], 0.0);
                if max_abs(&(anticommutator(gi, gj) - expect)) > ALG_TOL * scale * scale {
                    return Err(Error::NotAdmissible(format!(
                        "generators {i} and {j} violate the Clifford relations"
                    )));
                }
            }
        }
        let gram_inv = gram.try_inverse().ok_or(Error::DegenerateGram)?;
        let sv = gram.singular_values();
        if sv.min() <= 1e-10 * sv.max() {
            return Err(Error::DegenerateGram);
        }
        Ok(Self { generators, gram, gram_inv })
    }

    /// Span of `gamma^0, ..., gamma^3, i gamma^5`.
    pub fn standard() -> Self {
        Self::new(standard_generators()).expect("standard generators are admissible")
    }

    /// Builds `c_j M_j` from the fixed matrices `M_0 = diag(I, -I)`,
    /// `M_a = [[0, i sigma_a], [-i sigma_a, 0]]`, `M_4 = [[0, I], [I, 0]]`.
    pub fn from_coefficients(coeffs: [C64; 5]) -> Result<Self> {
        let g = standard_generators();
        let m = [
            g[0],
            g[1] * I,
            g[2] * I,
            g[3] * I,
            gamma5(),
        ];
        Self::new(std::array::from_fn(|j| m[j] * coeffs[j]))
    }

    pub fn generators(&self) -> &[SpinOperator; 5] {
        &self.generators
    }

    pub fn gram(&self) -> &Matrix5<f64> {
        &self.gram
    }

    /// Numbers of positive and negative eigenvalues of the Gram matrix.
    pub fn signature(&self) -> (usize, usize) {
        let ev = SymmetricEigen::new(self.gram).eigenvalues;
        let p = ev.iter().filter(|&&x| x > 0.0).count();
        (p, 5 - p)
    }

    /// Coefficients of the orthogonal projection (trace inner product).
    pub fn coefficients(&self, op: &SpinOperator) -> [C64; 5] {
        let rhs: [C64; 5] = std::array::from_fn(|j| trace_inner(&self.generators[j], op));
        std::array::from_fn(|i| (0..5).map(|j| rhs[j] * self.gram_inv[(i, j)]).sum())
    }

    pub fn project(&self, op: &SpinOperator) -> SpinOperator {
        let co = self.coefficients(op);
        (0..5).fold(SpinOperator::zeros(), |acc, j| acc + self.generators[j] * co[j])
    }

    pub fn residual(&self, op: &SpinOperator) -> f64 {
        max_abs(&(op - self.project(op)))
    }

    pub fn contains(&self, op: &SpinOperator, tol: f64) -> bool {
        self.residual(op) <= tol * operator_norm(op).max(1.0)
    }

    /// Largest residual of the generators of `other` relative to this span.
    pub fn distance(&self, other: &CliffordSubspace) -> f64 {
        other
            .generators
            .iter()
            .map(|g| self.residual(g) / operator_norm(g).max(1.0))
            .fold(0.0, f64::max)
    }

    /// `U e_j U^{-1}` for each generator.
    pub fn conjugated(&self, u: &SpinOperator) -> Self {
        let inv = u.try_inverse().expect("invertible conjugation");
        let generators = std::array::from_fn(|j| u * self.generators[j] * inv);
        Self { generators, gram: self.gram, gram_inv: self.gram_inv }
    }

    /// Orthonormal frame of the complement of `v` in this subspace,
    /// each element squaring to `-1`, ordered by the generator list.
    pub fn spatial_frame(&self, v: &SignOperator) -> Result<[SpinOperator; 4]> {
        let vm = v.matrix();
        if !self.contains(vm, ALG_TOL) {
            return Err(Error::HomeMismatch);
        }
        let mut frame: Vec<SpinOperator> = Vec::with_capacity(4);
        for g in &self.generators {
            let mut u = g - vm * trace_inner(vm, g);
            for f in &frame {
                u += f * trace_inner(f, &u);
            }
            let n = -trace_inner(&u, &u).re;
            if n > 1e-6 {
                frame.push(u / c(n.sqrt(), 0.0));
            }
            if frame.len() == 4 {
                break;
            }
        }
        frame.try_into().map_err(|_| Error::DegenerateGram)
    }
}

/// Pseudo-unitary basis change adapted to a sign operator and a Clifford subspace.
///
/// In the new basis `v = diag(1, 1, -1, -1)` and the chosen spatial generator
/// takes the form `i [[0, I], [I, 0]]`.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub basis: SpinOperator,
    pub inverse: SpinOperator,
}

impl AdaptedFrame {
    /// Expresses an operator in the adapted basis.
    pub fn to_frame(&self, a: &SpinOperator) -> SpinOperator {
        self.inverse * a * self.basis
    }

    pub fn from_frame(&self, a: &SpinOperator) -> SpinOperator {
        self.basis * a * self.inverse
    }
}

fn pseudo_inverse_of_basis(b: &SpinOperator) -> SpinOperator {
    spin_adjoint(b)
}

/// Pseudo-orthonormal eigenbasis of a sign operator: two positive, then two negative vectors.
fn sign_eigenbasis(v: &SignOperator, tol: &Tolerances) -> Result<[Spinor; 4]> {
    let sys = spectrum(v.matrix(), tol)?;
    let mut pos = None;
    let mut neg = None;
    for s in &sys.spaces {
        if s.multiplicity() != 2 {
            return Err(Error::NotAdmissible("sign operator eigenspaces must be two-dimensional".into()));
        }
        if s.value.re > 0.0 {
            pos = Some(s.vectors.clone());
        } else {
            neg = Some(s.vectors.clone());
        }
    }
    let (pos, neg) = match (pos, neg) {
        (Some(p), Some(n)) => (p, n),
        _ => return Err(Error::NotAdmissible("sign operator needs both eigenvalues".into())),
    };
    let p = spin_orthonormalize(&pos, 1.0)?;
    let n = spin_orthonormalize(&neg, -1.0)?;
    Ok([p[0], p[1], n[0], n[1]])
}

/// Adapted frame from a sign operator `v` and a spatial element `e4` with `e4^2 = -1`.
pub fn adapted_frame_from(v: &SignOperator, e4: &SpinOperator, tol: &Tolerances) -> Result<AdaptedFrame> {
    let f = sign_eigenbasis(v, tol)?;
    let b0 = SpinOperator::from_columns(&f);
    let b0inv = pseudo_inverse_of_basis(&b0);
    let e = b0inv * e4 * b0;
    let diag_part = e.fixed_view::<2, 2>(0, 0).norm() + e.fixed_view::<2, 2>(2, 2).norm();
    if diag_part > ALG_TOL * operator_norm(&e).max(1.0) {
        return Err(Error::NotSignature11);
    }
    let x: Matrix2<C64> = e.fixed_view::<2, 2>(0, 2).into_owned();
    let w = x.try_inverse().ok_or(Error::NotSignature11)? * I;
    let mut fix = SpinOperator::identity();
    fix.fixed_view_mut::<2, 2>(2, 2).copy_from(&w);
    let basis = b0 * fix;
    let inverse = pseudo_inverse_of_basis(&basis);
    Ok(AdaptedFrame { basis, inverse })
}

/// Adapted frame of `K` with distinguished element `v`.
pub fn adapted_frame(v: &SignOperator, k: &CliffordSubspace, tol: &Tolerances) -> Result<AdaptedFrame> {
    let frame = k.spatial_frame(v)?;
    adapted_frame_from(v, &frame[3], tol)
}

/// The unique Clifford subspace containing `e0` and `e4`.
pub fn extend_clifford(e0: &SpinOperator, e4: &SpinOperator, tol: &Tolerances) -> Result<CliffordSubspace> {
    let scale = operator_norm(e0).max(operator_norm(e4)).max(1.0);
    let id = SpinOperator::identity();
    let symmetric = max_abs(&(spin_adjoint(e0) - e0)) <= ALG_TOL * scale
        && max_abs(&(spin_adjoint(e4) - e4)) <= ALG_TOL * scale;
    if !symmetric
        || max_abs(&(e0 * e0 - id)) > ALG_TOL * scale
        || max_abs(&(e4 * e4 + id)) > ALG_TOL * scale
        || max_abs(&anticommutator(e0, e4)) > ALG_TOL * scale
    {
        return Err(Error::NotSignature11);
    }
    let sv = crate::spin::signature() * e0;
    let herm = (sv + sv.adjoint()) * c(0.5, 0.0);
    let ev = herm.symmetric_eigenvalues();
    let sign = if ev.min() > tol.definiteness_margin {
        1.0
    } else if ev.max() < -tol.definiteness_margin {
        -1.0
    } else {
        return Err(Error::NotSignature11);
    };
    let v = SignOperator::new_unchecked(e0 * c(sign, 0.0));
    let frame = adapted_frame_from(&v, e4, tol)?;
    let std = standard_generators();
    let gens = [
        *e0,
        frame.from_frame(&std[1]),
        frame.from_frame(&std[2]),
        frame.from_frame(&std[3]),
        *e4,
    ];
    CliffordSubspace::new(gens)
}

/// Output of the synchronization of two generically separated sign operators.
#[derive(Debug, Clone)]
pub struct SyncResult {
    /// Generator anticommuting with both sign operators.
    pub rho: SpinOperator,
    /// `exp(i rho)`, mapping `k_v` onto `k_w`.
    pub u: SpinOperator,
    /// Clifford subspace containing `v`.
    pub k_v: CliffordSubspace,
    /// Clifford subspace containing `w`.
    pub k_w: CliffordSubspace,
    pub alpha: f64,
    pub beta: f64,
    /// Basis in which `v` and `w` take their normal form.
    pub basis: SpinOperator,
}

/// Synchronizes the Clifford extensions of `v` and `w`.
pub fn synchronize(v: &SignOperator, w: &SignOperator, tol: &Tolerances) -> Result<SyncResult> {
    if !is_generically_separated(v, w, tol) {
        return Err(Error::NotGenericallySeparated);
    }
    let eb = sign_eigenbasis(v, tol)?;
    let g = [eb[0], eb[1]];
    let wm = w.matrix();
    let n = Matrix2::from_fn(|i, j| spin_product(&g[i], &(wm * g[j])));
    let n = (n + n.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(n);
    let (i1, i2) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let nu = [eig.eigenvalues[i1], eig.eigenvalues[i2]];
    if nu[1] <= 1.0 + tol.rank_threshold {
        return Err(Error::NotGenericallySeparated);
    }
    let coeff = |k: usize| -> Vector2<C64> { eig.eigenvectors.column(k).into_owned() };
    let f1 = g[0] * coeff(i1)[0] + g[1] * coeff(i1)[1];
    let f2 = g[0] * coeff(i2)[0] + g[1] * coeff(i2)[1];
    let alpha = nu[0].acosh();
    let beta = nu[1].acosh();
    let f3 = (wm * f1 - f1 * c(nu[0], 0.0)) * c(-1.0 / alpha.sinh(), 0.0);
    let f4 = (wm * f2 - f2 * c(nu[1], 0.0)) * c(1.0 / beta.sinh(), 0.0);
    let basis = SpinOperator::from_columns(&[f1, f2, f3, f4]);
    let inverse = pseudo_inverse_of_basis(&basis);
    let std = standard_generators();
    let k_v = CliffordSubspace::new(std::array::from_fn(|j| basis * std[j] * inverse))?;
    let rho = basis * std[4] * inverse * c((alpha - beta) / 4.0, 0.0);
    let u = expm(&(rho * I));
    let k_w = k_v.conjugated(&u);
    Ok(SyncResult { rho, u, k_v, k_w, alpha, beta, basis })
}

/// Identification `K -> K2` by conjugation with `exp(i beta v)`.
#[derive(Debug, Clone)]
pub struct Identification {
    pub beta: f64,
    pub u: SpinOperator,
}

/// Finds `beta` in `(-pi/2, pi/2)` with `exp(i beta v) K exp(-i beta v) = K2`.
///
/// Of the two solutions modulo `pi`, the one whose induced map on the
/// spatial frames has positive trace is returned.
pub fn identification_map(
    v: &SignOperator,
    k: &CliffordSubspace,
    k2: &CliffordSubspace,
    _tol: &Tolerances,
) -> Result<Identification> {
    let (a, b) = frame_overlaps(v, k, k2)?;
    let (ta, tb) = (a.trace(), b.trace());
    if ta.hypot(tb) < 1e-6 {
        return Err(Error::NoSolution);
    }
    let beta = 0.5 * tb.atan2(ta);
    let u = checked_rotation(v, k, k2, beta)?;
    if std::f64::consts::FRAC_PI_2 - beta.abs() < 1e-9 {
        return Err(Error::ParityObstruction);
    }
    Ok(Identification { beta, u })
}

/// Identification `K -> K2` by `exp(i beta v)` with the smallest `|beta|`.
///
/// Unlike [`identification_map`] this depends only on the two subspaces, not
/// on the orientation of their generator lists, so coinciding subspaces are
/// always identified by the identity.
pub fn nearest_identification(
    v: &SignOperator,
    k: &CliffordSubspace,
    k2: &CliffordSubspace,
    _tol: &Tolerances,
) -> Result<Identification> {
    let (a, b) = frame_overlaps(v, k, k2)?;
    let sign = if a.dot(&b) < 0.0 { -1.0 } else { 1.0 };
    let beta = 0.5 * (sign * b.norm()).atan2(a.norm());
    let u = checked_rotation(v, k, k2, beta)?;
    Ok(Identification { beta, u })
}

/// Overlaps `a_ij = -<f2_i, f_j>` and `b_ij = -<f2_i, i v f_j>` of the spatial frames.
fn frame_overlaps(v: &SignOperator, k: &CliffordSubspace, k2: &CliffordSubspace) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    let src = k.spatial_frame(v)?;
    let dst = k2.spatial_frame(v)?;
    let vm = v.matrix();
    let a = Matrix4::from_fn(|i, j| -trace_inner(&dst[i], &src[j]).re);
    let b = Matrix4::from_fn(|i, j| -trace_inner(&dst[i], &(vm * src[j] * I)).re);
    Ok((a, b))
}

fn checked_rotation(v: &SignOperator, k: &CliffordSubspace, k2: &CliffordSubspace, beta: f64) -> Result<SpinOperator> {
    let u = expm(&(v.matrix() * c(0.0, beta)));
    let image = k.conjugated(&u);
    if k2.distance(&image) > ALG_TOL || image.distance(k2) > ALG_TOL {
        return Err(Error::NoSolution);
    }
    Ok(u)
}

/// SO(4) rotation induced on the spatial frame of `K` by a stabilizer element.
pub fn stabilizer_rotation(
    v: &SignOperator,
    k: &CliffordSubspace,
    u: &SpinOperator,
    _tol: &Tolerances,
) -> Result<Matrix4<f64>> {
    if max_abs(&(spin_adjoint(u) * u - SpinOperator::identity())) > ALG_TOL {
        return Err(Error::NotInStabilizer);
    }
    let vm = v.matrix();
    let uinv = spin_adjoint(u);
    if max_abs(&(u * vm * uinv - vm)) > ALG_TOL {
        return Err(Error::NotInStabilizer);
    }
    let frame = k.spatial_frame(v)?;
    let image: Vec<SpinOperator> = frame.iter().map(|f| u * f * uinv).collect();
    if image.iter().any(|g| !k.contains(g, ALG_TOL)) {
        return Err(Error::NotInStabilizer);
    }
    let o = Matrix4::from_fn(|i, j| -trace_inner(&frame[i], &image[j]).re);
    if (o.transpose() * o - Matrix4::identity()).abs().max() > ALG_TOL || o.determinant() < 0.0 {
        return Err(Error::NotInStabilizer);
    }
    Ok(o)
}
