//! Vacuum Dirac sea in Minkowski space: kernel coefficients, closed chain,
//! spin connection phases and the regularized kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::SignOperator;
use crate::error::{ConnectReason, Error, Result};
use crate::gamma::{gamma, minkowski_square, slash};
use crate::geometry::{time_direction_angle, CausalType, PairData, PairSource};
use crate::special::bessel::{jy01, k01};
use crate::special::quadrature::{integrate_to_infinity, QuadOptions};
use crate::spin::{c, SpinOperator, C64};

/// Minkowski event `(t, x, y, z)`.
pub type Event = [f64; 4];

/// Relative distance from the light cone below which the kernel is refused.
const LIGHT_CONE_TOL: f64 = 1e-9;

pub fn separation(x: &Event, y: &Event) -> Event {
    [y[0] - x[0], y[1] - x[1], y[2] - x[2], y[3] - x[3]]
}

fn spatial_norm(xi: &Event) -> f64 {
    (xi[1] * xi[1] + xi[2] * xi[2] + xi[3] * xi[3]).sqrt()
}

/// Coefficients of `P(x, y) = alpha xi-slash + beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelCoefficients {
    pub alpha: C64,
    pub beta: C64,
}

/// Unregularized kernel coefficients at separation `xi = y - x`.
pub fn kernel_unregularized(xi: &Event, mass: f64) -> Result<KernelCoefficients> {
    if !(mass > 0.0) {
        return Err(Error::OutOfDomain(format!("mass must be positive, got {mass}")));
    }
    let xi2 = minkowski_square(xi);
    let euclid = xi.iter().map(|v| v * v).sum::<f64>();
    if xi2.abs() <= LIGHT_CONE_TOL * euclid || euclid == 0.0 {
        return Err(Error::OnLightCone);
    }
    let m3 = mass.powi(3);
    let m4 = mass.powi(4);
    if xi2 > 0.0 {
        let z = mass * xi2.sqrt();
        let eps = xi[0].signum();
        let (j0, j1, y0, y1) = jy01(z)?;
        let j2 = 2.0 * j1 / z - j0;
        let y2 = 2.0 * y1 / z - y0;
        let beta = c(y1, eps * j1) * (m3 / (16.0 * PI * PI * z));
        let alpha = c(0.0, 1.0) * c(y2, eps * j2) * (m4 / (16.0 * PI * PI * z * z));
        Ok(KernelCoefficients { alpha, beta })
    } else {
        let z = mass * (-xi2).sqrt();
        let (k0, k1) = k01(Complex64::new(z, 0.0))?;
        let k2 = k0.re + 2.0 * k1.re / z;
        let beta = c(m3 * k1.re / (8.0 * PI.powi(3) * z), 0.0);
        let alpha = c(0.0, -m4 * k2 / (8.0 * PI.powi(3) * z * z));
        Ok(KernelCoefficients { alpha, beta })
    }
}

/// Regularized coefficients with `P^eps = alpha (xi-slash - i eps gamma^0) + beta`.
pub fn kernel_regularized(xi: &Event, mass: f64, eps: f64) -> Result<KernelCoefficients> {
    if !(mass > 0.0) || !(eps > 0.0) {
        return Err(Error::OutOfDomain(format!("need mass > 0 and eps > 0, got {mass}, {eps}")));
    }
    let r = spatial_norm(xi);
    let w = Complex64::new(eps, xi[0]);
    let z = (w * w + r * r).sqrt() * mass;
    let (k0, k1) = k01(z)?;
    let pref = mass.powi(3) / (8.0 * PI.powi(3));
    let alpha = Complex64::new(0.0, -mass * pref) * (k0 / (z * z) + k1 * 2.0 / (z * z * z));
    let beta = k1 / z * pref;
    Ok(KernelCoefficients { alpha, beta })
}

/// `alpha (xi-slash - i eps gamma^0) + beta`; use `eps = 0` for the unregularized kernel.
pub fn assemble_kernel(xi: &Event, k: &KernelCoefficients, eps: f64) -> SpinOperator {
    let xs = slash(xi) - gamma(0) * c(0.0, eps);
    xs * k.alpha + SpinOperator::identity() * k.beta
}

/// Kernel data for the pair `(x, y)` with Euclidean sign operators `gamma^0`.
pub fn dirac_sea_pair(x: &Event, y: &Event, mass: f64, eps: Option<f64>) -> Result<PairData> {
    let xi = separation(x, y);
    let p_xy = match eps {
        None => assemble_kernel(&xi, &kernel_unregularized(&xi, mass)?, 0.0),
        Some(e) => assemble_kernel(&xi, &kernel_regularized(&xi, mass, e)?, e),
    };
    let s = SignOperator::standard();
    Ok(PairData { p_xy, s_x: s, s_y: s })
}

/// Closed-form analysis of the unregularized closed chain `A = a xi-slash + b`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainAnalysis {
    pub alpha: C64,
    pub beta: C64,
    pub a: f64,
    pub b: f64,
    /// Eigenvalues `b +- sqrt(a^2 xi^2)`, each twice degenerate.
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    pub causal: CausalType,
    /// Present for timelike separation.
    pub phases: Option<ChainPhases>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChainPhases {
    /// `arg` of the kernel on the eigenspaces `v = +1` and `v = -1`.
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub phi: f64,
    /// Phase of `D = exp(i kappa)`.
    pub kappa: f64,
    /// `kappa` computed on the `v = -1` block; agrees with `kappa` modulo `2 pi`.
    pub kappa_minus: f64,
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// `v = eps(xi^0) xi-slash / sqrt(xi^2)` for timelike `xi`.
pub fn directional_sign_closed_form(xi: &Event) -> Result<SpinOperator> {
    let xi2 = minkowski_square(xi);
    if xi2 <= 0.0 {
        return Err(Error::OutOfDomain("directional sign needs timelike separation".into()));
    }
    Ok(slash(xi) * c(xi[0].signum() / xi2.sqrt(), 0.0))
}

pub fn chain_analysis(xi: &Event, mass: f64) -> Result<ChainAnalysis> {
    let KernelCoefficients { alpha, beta } = kernel_unregularized(xi, mass)?;
    let xi2 = minkowski_square(xi);
    let a = 2.0 * (alpha * beta.conj()).re;
    let b = alpha.norm_sqr() * xi2 + beta.norm_sqr();
    let root = (Complex64::new(a * a * xi2, 0.0)).sqrt();
    let lambda_plus = Complex64::new(b, 0.0) + root;
    let lambda_minus = Complex64::new(b, 0.0) - root;
    let (causal, phases) = if xi2 > 0.0 {
        let s = xi2.sqrt() * xi[0].signum();
        let p_plus = beta + alpha * s;
        let p_minus = beta - alpha * s;
        let theta_plus = p_plus.arg();
        let theta_minus = p_minus.arg();
        let phi = time_direction_angle(theta_plus - theta_minus, 1e-12)
            .ok_or(Error::NotSpinConnectable(ConnectReason::NotTimeDirected))?;
        let kappa = wrap_angle(phi + theta_plus);
        let kappa_minus = wrap_angle(-phi + theta_minus);
        (CausalType::Timelike, Some(ChainPhases { theta_plus, theta_minus, phi, kappa, kappa_minus }))
    } else {
        (CausalType::Spacelike, None)
    };
    Ok(ChainAnalysis { alpha, beta, a, b, lambda_plus, lambda_minus, causal, phases })
}

/// Spin connection `exp(i kappa) 1` of the unregularized vacuum, valid also
/// when the generic construction is unavailable (`xi` purely temporal).
pub fn analytic_connection(xi: &Event, mass: f64) -> Result<SpinOperator> {
    let ca = chain_analysis(xi, mass)?;
    let ph = ca.phases.ok_or(Error::NotSpinConnectable(ConnectReason::NotProperlyTimelike))?;
    Ok(SpinOperator::identity() * Complex64::from_polar(1.0, ph.kappa))
}

/// `a = -eps(xi^0) m^3 / (64 pi^5 xi^4)` for timelike `xi`.
pub fn timelike_a_closed_form(xi: &Event, mass: f64) -> f64 {
    let xi2 = minkowski_square(xi);
    -xi[0].signum() * mass.powi(3) / (64.0 * PI.powi(5) * xi2 * xi2)
}

/// Closed chain of the regularized kernel and its coefficients.
#[derive(Debug, Clone)]
pub struct RegularizedChain {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub chain: SpinOperator,
    /// Closed-form directional sign operator; `None` when the normalization is not positive.
    pub v: Option<SpinOperator>,
}

pub fn regularized_chain(xi: &Event, mass: f64, eps: f64) -> Result<RegularizedChain> {
    let k = kernel_regularized(xi, mass, eps)?;
    let (alpha, beta) = (k.alpha, k.beta);
    let xi2 = minkowski_square(xi);
    let a = 2.0 * (alpha * beta.conj()).re;
    let b = alpha.norm_sqr() * (xi2 + eps * eps) + beta.norm_sqr();
    let cc = 2.0 * eps * (alpha * beta.conj()).im;
    let d = 2.0 * eps * alpha.norm_sqr();
    let g0 = gamma(0);
    let xg = (gamma(1) * c(xi[1], 0.0) + gamma(2) * c(xi[2], 0.0) + gamma(3) * c(xi[3], 0.0)) * g0;
    let traceless = slash(xi) * c(a, 0.0) + g0 * c(cc, 0.0) - xg * c(0.0, d);
    let chain = traceless + SpinOperator::identity() * c(b, 0.0);
    let r2 = xi[1] * xi[1] + xi[2] * xi[2] + xi[3] * xi[3];
    let norm2 = a * a * xi2 + 2.0 * a * cc * xi[0] + cc * cc - d * d * r2;
    // sign chosen so that v is +1 on the positive definite eigenspace, matching the eps = 0 limit
    let v = (norm2 > 0.0).then(|| traceless * c(-1.0 / norm2.sqrt(), 0.0));
    Ok(RegularizedChain { a, b, c: cc, d, chain, v })
}

/// Eigenvalues of the regularized fermion matrix on the mass shell.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NuEigenvalues {
    /// Eigenvalue on the two negative-definite directions.
    pub nu12: f64,
    /// Eigenvalue on the two positive-definite directions.
    pub nu34: f64,
}

/// `nu = int d^3k / (4 pi omega) e^{-eps omega} (-+ omega + m)`, reduced to a radial integral.
pub fn nu_eigenvalues(mass: f64, eps: f64) -> Result<NuEigenvalues> {
    if !(eps > 0.0) || !(mass >= 0.0) || !mass.is_finite() {
        return Err(Error::OutOfDomain(format!("need eps > 0 and mass >= 0, got {eps}, {mass}")));
    }
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 4000 };
    let radial = |sign: f64| {
        move |p: f64| {
            let omega = (p * p + mass * mass).sqrt();
            if omega == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(p * p / omega * (sign * omega + mass) * (-eps * omega).exp(), 0.0)
        }
    };
    let scale = 1.0 / eps;
    let nu12 = integrate_to_infinity(radial(-1.0), 0.0, scale, opts)
        .map_err(|_| Error::MassShellDegenerate)?
        .value
        .re;
    let nu34 = integrate_to_infinity(radial(1.0), 0.0, scale, opts)
        .map_err(|_| Error::MassShellDegenerate)?
        .value
        .re;
    if !nu12.is_finite() || !nu34.is_finite() {
        return Err(Error::MassShellDegenerate);
    }
    Ok(NuEigenvalues { nu12, nu34 })
}

/// Finite set of Minkowski events with the Dirac-sea kernel between them.
#[derive(Debug, Clone)]
pub struct MinkowskiSample {
    pub events: Vec<Event>,
    pub mass: f64,
    /// Regularization length; `None` for the unregularized kernel.
    pub eps: Option<f64>,
}

impl PairSource for MinkowskiSample {
    fn len(&self) -> usize {
        self.events.len()
    }

    fn pair(&self, x: usize, y: usize) -> Result<PairData> {
        dirac_sea_pair(&self.events[x], &self.events[y], self.mass, self.eps)
    }
}
