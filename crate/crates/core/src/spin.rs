//! Linear algebra on the four-dimensional spin space of signature (2,2).
//!
//! Operators are stored as 4x4 complex matrices with respect to a
//! pseudo-orthonormal basis, so the spin scalar product is
//! `<u|v> = u^† S v` with `S = diag(1, 1, -1, -1)`.

use nalgebra::{Complex, DMatrix, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex<f64>;
pub type SpinOperator = Matrix4<C64>;
pub type Spinor = Vector4<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Signature matrix of the spin scalar product.
pub fn signature() -> SpinOperator {
    SpinOperator::from_diagonal(&Vector4::new(ONE, ONE, -ONE, -ONE))
}

/// Spin space of signature (2,2) in a pseudo-orthonormal basis.
///
/// Only the standard signature is used; the struct exists so that callers
/// can carry the product around explicitly.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpinSpace;

impl SpinSpace {
    pub fn product(&self, u: &Spinor, v: &Spinor) -> C64 {
        spin_product(u, v)
    }

    pub fn adjoint(&self, a: &SpinOperator) -> SpinOperator {
        spin_adjoint(a)
    }
}

pub fn spin_product(u: &Spinor, v: &Spinor) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1] - u[2].conj() * v[2] - u[3].conj() * v[3]
}

/// Adjoint with respect to the spin scalar product, `S A^† S`.
pub fn spin_adjoint(a: &SpinOperator) -> SpinOperator {
    let mut out = a.adjoint();
    for i in 0..4 {
        for j in 0..4 {
            if (i < 2) != (j < 2) {
                out[(i, j)] = -out[(i, j)];
            }
        }
    }
    out
}

/// `Tr(AB) / 4`.
pub fn trace_inner(a: &SpinOperator, b: &SpinOperator) -> C64 {
    let mut acc = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc / 4.0
}

/// Largest singular value.
pub fn operator_norm(a: &SpinOperator) -> f64 {
    a.singular_values().max()
}

pub fn max_abs(a: &SpinOperator) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_spin_symmetric(a: &SpinOperator, tol: f64) -> bool {
    max_abs(&(a - spin_adjoint(a))) <= tol * operator_norm(a).max(1.0)
}

pub fn is_spin_unitary(u: &SpinOperator, tol: f64) -> bool {
    max_abs(&(spin_adjoint(u) * u - SpinOperator::identity())) <= tol
}

pub fn commutator(a: &SpinOperator, b: &SpinOperator) -> SpinOperator {
    a * b - b * a
}

pub fn anticommutator(a: &SpinOperator, b: &SpinOperator) -> SpinOperator {
    a * b + b * a
}

/// Numerical rank with singular values compared to `tol * sigma_max`.
pub fn rank(a: &SpinOperator, tol: f64) -> usize {
    let sv = a.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

pub fn expm(a: &SpinOperator) -> SpinOperator {
    a.exp()
}

/// Signature of a subspace with respect to the spin scalar product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
    /// Contains (numerically) null directions.
    Degenerate,
}

/// Classifies the span of orthonormal (Euclidean) columns.
pub fn definiteness(vectors: &[Spinor], margin: f64) -> Definiteness {
    let k = vectors.len();
    let gram = DMatrix::from_fn(k, k, |i, j| spin_product(&vectors[i], &vectors[j]));
    let ev = gram.symmetric_eigenvalues();
    let pos = ev.iter().filter(|&&x| x > margin).count();
    let neg = ev.iter().filter(|&&x| x < -margin).count();
    if pos + neg < k {
        Definiteness::Degenerate
    } else if neg == 0 {
        Definiteness::Positive
    } else if pos == 0 {
        Definiteness::Negative
    } else {
        Definiteness::Indefinite
    }
}

/// One cluster of (numerically) equal eigenvalues.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub value: C64,
    /// Euclidean-orthonormal basis of the eigenspace.
    pub vectors: Vec<Spinor>,
    pub definiteness: Definiteness,
}

impl Eigenspace {
    pub fn multiplicity(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

/// Eigen-decomposition of a diagonalizable 4x4 operator.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub spaces: Vec<Eigenspace>,
    pub scale: f64,
}

impl EigenSystem {
    /// All eigenvalues with multiplicity.
    pub fn values(&self) -> Vec<C64> {
        self.spaces
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.value, s.multiplicity()))
            .collect()
    }

    pub fn all_real(&self) -> bool {
        self.spaces.iter().all(|s| s.is_real())
    }

    /// Columns are the eigenvectors, grouped by eigenspace.
    pub fn basis(&self) -> SpinOperator {
        let cols: Vec<Spinor> = self
            .spaces
            .iter()
            .flat_map(|s| s.vectors.iter().copied())
            .collect();
        SpinOperator::from_columns(&cols)
    }

    /// Rebuilds `V f(D) V^{-1}` for a function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(C64) -> C64) -> Result<SpinOperator> {
        let v = self.basis();
        let vinv = v.try_inverse().ok_or(Error::DefectiveMatrix)?;
        let d: Vec<C64> = self
            .spaces
            .iter()
            .flat_map(|s| std::iter::repeat_n(f(s.value), s.multiplicity()))
            .collect();
        Ok(v * SpinOperator::from_diagonal(&Vector4::from_column_slice(&d)) * vinv)
    }
}

/// Raw eigenvalues of a general complex 4x4 matrix (complex Schur form).
pub fn eigenvalues(a: &SpinOperator) -> [C64; 4] {
    let schur = a.schur();
    let ev = schur
        .eigenvalues()
        .expect("complex Schur form is triangular");
    [ev[0], ev[1], ev[2], ev[3]]
}

/// Eigenvalues grouped into eigenspaces, with imaginary parts below
/// `real_threshold * |A|` snapped to zero.
pub fn spectrum(a: &SpinOperator, tol: &Tolerances) -> Result<EigenSystem> {
    let scale = operator_norm(a).max(f64::MIN_POSITIVE);
    let raw = eigenvalues(a);
    let cluster_tol = tol.real_threshold * scale;

    let mut groups: Vec<Vec<C64>> = Vec::new();
    for &l in &raw {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|&m| (m - l).norm() <= cluster_tol))
        {
            Some(g) => g.push(l),
            None => groups.push(vec![l]),
        }
    }

    let mut spaces = Vec::with_capacity(groups.len());
    for g in groups {
        let k = g.len();
        let mut mean = g.iter().sum::<C64>() / k as f64;
        if mean.im.abs() <= cluster_tol {
            mean.im = 0.0;
        }
        let shifted = a - SpinOperator::identity() * mean;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        if svd.singular_values[order[k - 1]] > tol.rank_threshold * scale {
            return Err(Error::DefectiveMatrix);
        }
        let vectors: Vec<Spinor> = order[..k]
            .iter()
            .map(|&i| v_t.row(i).adjoint())
            .collect();
        let definiteness = definiteness(&vectors, tol.definiteness_margin);
        spaces.push(Eigenspace {
            value: mean,
            vectors,
            definiteness,
        });
    }

    let sys = EigenSystem { spaces, scale };
    let basis_sv = sys.basis().singular_values();
    if basis_sv.min() <= tol.rank_threshold * basis_sv.max() {
        return Err(Error::DefectiveMatrix);
    }
    Ok(sys)
}

/// Principal inverse square root of an operator with positive spectrum.
pub fn principal_inv_sqrt(a: &SpinOperator, tol: &Tolerances) -> Result<SpinOperator> {
    let sys = positive_spectrum(a, tol)?;
    sys.apply(|l| C64::from(1.0 / l.re.sqrt()))
}

/// Principal square root of an operator with positive spectrum.
pub fn principal_sqrt(a: &SpinOperator, tol: &Tolerances) -> Result<SpinOperator> {
    let sys = positive_spectrum(a, tol)?;
    sys.apply(|l| C64::from(l.re.sqrt()))
}

fn positive_spectrum(a: &SpinOperator, tol: &Tolerances) -> Result<EigenSystem> {
    let sys = spectrum(a, tol)?;
    let ok = sys
        .spaces
        .iter()
        .all(|s| s.is_real() && s.value.re > tol.real_threshold * sys.scale);
    if ok {
        Ok(sys)
    } else {
        Err(Error::NotPositiveSpectrum)
    }
}

/// Gram-Schmidt with respect to the spin product on a definite subspace.
///
/// `sign` is +1 for a positive and -1 for a negative definite span.
pub fn spin_orthonormalize(vectors: &[Spinor], sign: f64) -> Result<Vec<Spinor>> {
    let mut out: Vec<Spinor> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = *v;
        for e in &out {
            let p = spin_product(e, &w) * sign;
            w -= e * p;
        }
        let n = spin_product(&w, &w).re * sign;
        if n <= 0.0 {
            return Err(Error::DegenerateGram);
        }
        out.push(w / C64::from(n.sqrt()));
    }
    Ok(out)
}
