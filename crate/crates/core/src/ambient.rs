//! Finite-dimensional causal fermion systems: point operators on `C^f`,
//! their spin spaces, and the kernel between two points.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::clifford::SignOperator;
use crate::error::{Error, Result};
use crate::geometry::{PairData, PairSource};
use crate::spin::{c, signature, SpinOperator, C64};
use crate::tolerance::Tolerances;

const HERMITIAN_TOL: f64 = 1e-12;

/// Self-adjoint operator `F(x)` on the particle space `C^f`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientOperator {
    entries: DMatrix<C64>,
}

impl AmbientOperator {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() < 4 {
            return Err(Error::NotAdmissible(format!(
                "point operator must be square with f >= 4, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&d| c(d, 0.0)))))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { entries: &self.entries * c(factor, 0.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PointDiagnostics {
    pub rank: usize,
    pub positive: usize,
    pub negative: usize,
    /// The spin space has the maximal dimension four.
    pub regular: bool,
}

fn hermitian_eigen(x: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = x.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn rank_cut(x: &DMatrix<C64>, tol: &Tolerances) -> f64 {
    tol.rank_threshold * x.norm().max(1.0)
}

/// Checks hermiticity, rank at most four and at most two eigenvalues of each sign.
pub fn validate_point(x: &AmbientOperator, tol: &Tolerances) -> Result<PointDiagnostics> {
    let m = x.matrix();
    let skew = (m - m.adjoint()).norm();
    if skew > HERMITIAN_TOL * m.norm().max(1.0) {
        return Err(Error::NotAdmissible(format!("not Hermitian (deviation {skew:e})")));
    }
    let (values, _) = hermitian_eigen(m);
    let cut = rank_cut(m, tol);
    let positive = values.iter().filter(|&&l| l > cut).count();
    let negative = values.iter().filter(|&&l| l < -cut).count();
    let rank = positive + negative;
    let mut violated = Vec::new();
    if rank > 4 {
        violated.push(format!("rank {rank} exceeds 4"));
    }
    if positive > 2 {
        violated.push(format!("{positive} positive eigenvalues"));
    }
    if negative > 2 {
        violated.push(format!("{negative} negative eigenvalues"));
    }
    if !violated.is_empty() {
        return Err(Error::NotAdmissible(violated.join("; ")));
    }
    Ok(PointDiagnostics { rank, positive, negative, regular: rank == 4 })
}

/// Spin space `S_x` of a regular point with its pseudo-orthonormal basis.
#[derive(Debug, Clone)]
pub struct LocalSpin {
    /// `f x 4` matrix whose columns satisfy `-<f_a | x f_b> = S_ab`.
    pub basis: DMatrix<C64>,
    /// Eigenvalues of `x` belonging to the basis columns: two negative, then two positive.
    pub eigenvalues: [f64; 4],
    pub sign: SignOperator,
    /// Euclidean operator `-x^{-1}` on `S_x` in the spin basis.
    pub euclidean: SpinOperator,
}

impl LocalSpin {
    /// Spin basis columns multiplied by `x`.
    pub fn image(&self) -> DMatrix<C64> {
        let mut out = self.basis.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            out.column_mut(j).scale_mut(l);
        }
        out
    }

    /// Coordinates of a vector of `S_x` in the spin basis.
    pub fn coordinates(&self, u: &DVector<C64>) -> DVector<C64> {
        let mut out = self.basis.adjoint() * u;
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            out[j] *= l.abs();
        }
        out
    }
}

fn orient(mut v: DVector<C64>) -> DVector<C64> {
    let k = v.icamax();
    let phase = v[k] / v[k].norm();
    v /= phase;
    v
}

pub fn localize(x: &AmbientOperator, tol: &Tolerances) -> Result<LocalSpin> {
    let diag = validate_point(x, tol)?;
    if !diag.regular {
        return Err(Error::NotRegular);
    }
    let (values, vectors) = hermitian_eigen(x.matrix());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let f = x.dim();
    // two most negative, then two most positive, largest first
    let picks = [order[0], order[1], order[f - 1], order[f - 2]];
    let mut basis = DMatrix::zeros(f, 4);
    let mut eigenvalues = [0.0; 4];
    for (j, &k) in picks.iter().enumerate() {
        let v = orient(vectors.column(k).into_owned());
        basis.set_column(j, &(v / c(values[k].abs().sqrt(), 0.0)));
        eigenvalues[j] = values[k];
    }
    let euclidean = SpinOperator::from_diagonal(&nalgebra::Vector4::from_fn(|j, _| c(-1.0 / eigenvalues[j], 0.0)));
    Ok(LocalSpin { basis, eigenvalues, sign: SignOperator::standard(), euclidean })
}

/// Kernel `P(x, y) = pi_x y : S_y -> S_x` in the two spin bases.
pub fn kernel(x: &LocalSpin, y: &LocalSpin) -> SpinOperator {
    let overlap = x.image().adjoint() * y.image();
    let m = SpinOperator::from_fn(|i, j| overlap[(i, j)]);
    -(signature() * m)
}

/// Eigenvalues of the `f x f` product `x y`, the four largest in modulus first.
pub fn product_spectrum(x: &AmbientOperator, y: &AmbientOperator) -> Vec<C64> {
    let prod = x.matrix() * y.matrix();
    let mut ev: Vec<C64> = prod.schur().eigenvalues().expect("complex Schur form is triangular").iter().copied().collect();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    ev
}

/// Finitely many points with the weights of a discrete universal measure.
#[derive(Debug, Clone)]
pub struct AmbientSystem {
    pub points: Vec<AmbientOperator>,
    pub weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SystemFile {
    f: usize,
    points: Vec<Vec<[f64; 2]>>,
    weights: Vec<f64>,
}

impl AmbientSystem {
    pub fn new(points: Vec<AmbientOperator>, weights: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::NotAdmissible(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::NotAdmissible(format!("weight {w} is not positive")));
        }
        if let Some(p) = points.first() {
            if points.iter().any(|q| q.dim() != p.dim()) {
                return Err(Error::NotAdmissible("points act on spaces of different dimension".into()));
            }
        }
        for (i, p) in points.iter().enumerate() {
            validate_point(p, tol).map_err(|e| Error::NotAdmissible(format!("point {i}: {e}")))?;
        }
        Ok(Self { points, weights })
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, AmbientOperator::dim)
    }

    pub fn from_json(text: &str, tol: &Tolerances) -> Result<Self> {
        let file: SystemFile =
            serde_json::from_str(text).map_err(|e| Error::NotAdmissible(format!("malformed system file: {e}")))?;
        let f = file.f;
        let points = file
            .points
            .iter()
            .enumerate()
            .map(|(i, entries)| {
                if entries.len() != f * f {
                    return Err(Error::NotAdmissible(format!(
                        "point {i} has {} entries, expected {}",
                        entries.len(),
                        f * f
                    )));
                }
                AmbientOperator::new(DMatrix::from_row_iterator(f, f, entries.iter().map(|e| c(e[0], e[1]))))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, file.weights, tol)
    }

    pub fn to_json(&self) -> String {
        let f = self.dim();
        let points = self
            .points
            .iter()
            .map(|p| {
                let m = p.matrix();
                (0..f).flat_map(|i| (0..f).map(move |j| [m[(i, j)].re, m[(i, j)].im])).collect()
            })
            .collect();
        serde_json::to_string(&SystemFile { f, points, weights: self.weights.clone() })
            .expect("plain numeric data serializes")
    }

    /// Localizes every point; fails with `NotRegular` if one is singular.
    pub fn localized(&self, tol: &Tolerances) -> Result<LocalizedSystem> {
        let spins = self.points.iter().map(|p| localize(p, tol)).collect::<Result<Vec<_>>>()?;
        Ok(LocalizedSystem { spins })
    }
}

/// Points `F = -iota S iota^*` with Gaussian injections `iota: C^4 -> C^f`.
pub fn random_system(f: usize, n_points: usize, seed: u64) -> Result<AmbientSystem> {
    if f < 4 {
        return Err(Error::OutOfDomain(format!("particle space dimension {f} is below 4")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = DMatrix::from_diagonal(&DVector::from_iterator(4, signature().diagonal().iter().copied()));
    let points = (0..n_points)
        .map(|_| {
            let iota = DMatrix::from_fn(f, 4, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                c(re, im) * std::f64::consts::FRAC_1_SQRT_2
            });
            let m = -(&iota * &s * iota.adjoint());
            AmbientOperator::new((&m + m.adjoint()) * c(0.5, 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    AmbientSystem::new(points, vec![1.0; n_points], &Tolerances::default())
}

/// Localized points of an ambient system, usable as a pair source.
#[derive(Debug, Clone)]
pub struct LocalizedSystem {
    pub spins: Vec<LocalSpin>,
}

impl PairSource for LocalizedSystem {
    fn len(&self) -> usize {
        self.spins.len()
    }

    fn pair(&self, x: usize, y: usize) -> Result<PairData> {
        let (sx, sy) = (&self.spins[x], &self.spins[y]);
        Ok(PairData { p_xy: kernel(sx, sy), s_x: sx.sign, s_y: sy.sign })
    }
}
