//! Parallel transport along timelike curves: products of spin connections
//! between neighbouring curve points, and the curvature correction to the
//! spinorial Levi-Civita transport.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordSubspace;
use crate::dirac_sea::{analytic_connection, dirac_sea_pair, Event};
use crate::error::{Error, Result};
use crate::gamma::{gamma, minkowski_square, slash};
use crate::geometry::{spin_connection, spliced_connection};
use crate::spin::{c, commutator, expm, max_abs, operator_norm, SpinOperator};
use crate::tolerance::Tolerances;

/// Resolution at which curves are checked for timelike, future-directed steps.
pub const CURVE_CHECK_RESOLUTION: usize = 1024;
const ARC_LENGTH_CELLS: usize = 8192;

/// Future-directed timelike curve, parametrized by proper length.
#[derive(Clone)]
pub struct TimelikeCurve {
    path: Arc<dyn Fn(f64) -> Event + Send + Sync>,
    /// Pairs (proper length, curve parameter), increasing in both.
    table: Vec<(f64, f64)>,
}

impl std::fmt::Debug for TimelikeCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimelikeCurve").field("length", &self.length()).finish()
    }
}

fn proper_step(a: &Event, b: &Event) -> Option<f64> {
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]];
    let d2 = minkowski_square(&d);
    (d[0] > 0.0 && d2 > 0.0).then(|| d2.sqrt())
}

impl TimelikeCurve {
    /// Reparametrizes `path` on `[a, b]` by proper length (chord sums on a fine grid).
    pub fn new(path: impl Fn(f64) -> Event + Send + Sync + 'static, a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::NotAdmissible(format!("empty parameter interval [{a}, {b}]")));
        }
        let mut table = Vec::with_capacity(ARC_LENGTH_CELLS + 1);
        let mut prev = path(a);
        let mut s = 0.0;
        table.push((0.0, a));
        for k in 1..=ARC_LENGTH_CELLS {
            let t = a + (b - a) * k as f64 / ARC_LENGTH_CELLS as f64;
            let p = path(t);
            let ds = proper_step(&prev, &p).ok_or_else(|| {
                Error::NotAdmissible(format!("curve is not future timelike near parameter {t}"))
            })?;
            s += ds;
            table.push((s, t));
            prev = p;
        }
        let curve = Self { path: Arc::new(path), table };
        let nodes = curve.nodes(CURVE_CHECK_RESOLUTION);
        for (i, w) in nodes.windows(2).enumerate() {
            if proper_step(&w[0], &w[1]).is_none() {
                return Err(Error::NotAdmissibleCurve { segment: i });
            }
        }
        Ok(curve)
    }

    /// Straight segment from `start` along the future timelike `velocity`.
    pub fn straight(start: Event, velocity: Event, length: f64) -> Result<Self> {
        let v2 = minkowski_square(&velocity);
        if !(v2 > 0.0) || velocity[0] <= 0.0 {
            return Err(Error::NotAdmissible("velocity must be future timelike".into()));
        }
        let n = v2.sqrt();
        let u = velocity.map(|x| x / n);
        Self::new(move |s| [start[0] + s * u[0], start[1] + s * u[1], start[2] + s * u[2], start[3] + s * u[3]], 0.0, length)
    }

    pub fn length(&self) -> f64 {
        self.table.last().map_or(0.0, |e| e.0)
    }

    /// Point at proper length `s` from the start.
    pub fn at(&self, s: f64) -> Event {
        let s = s.clamp(0.0, self.length());
        let k = self.table.partition_point(|e| e.0 < s).clamp(1, self.table.len() - 1);
        let (s0, t0) = self.table[k - 1];
        let (s1, t1) = self.table[k];
        let w = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        (self.path)(t0 + w * (t1 - t0))
    }

    /// `x_n = gamma(n L / N)` for `n = 0..=N`.
    pub fn nodes(&self, n: usize) -> Vec<Event> {
        let len = self.length();
        (0..=n).map(|k| self.at(len * k as f64 / n as f64)).collect()
    }
}

/// How the spin connection of each step is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TransportBackend {
    /// Closed form `exp(i kappa) 1` of the unregularized vacuum.
    Analytic,
    /// Generic construction on the unregularized kernel.
    Generic,
    /// Generic construction, spliced to the standard Clifford subspace at every point.
    Spliced,
    /// Generic construction on the regularized kernel, halving `eps` until every step connects.
    Regularized { eps: f64, min_eps: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct TransportOptions {
    pub mass: f64,
    pub backend: TransportBackend,
    pub tol: Tolerances,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self { mass: 1.0, backend: TransportBackend::Analytic, tol: Tolerances::default() }
    }
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub connection: SpinOperator,
    /// Phase `phi` of the generic construction; `None` for the analytic backend.
    pub phi: Option<f64>,
    pub future: bool,
}

#[derive(Debug, Clone)]
pub struct TransportResult {
    /// `D_{x_N x_{N-1}} ... D_{x_1 x_0}`.
    pub total: SpinOperator,
    /// Operator norm of `total - 1`.
    pub deviation: f64,
    pub steps: Vec<StepRecord>,
    /// Regularization length finally used by the regularized backend.
    pub eps: Option<f64>,
}

fn step_connection(x: &Event, y: &Event, opts: &TransportOptions, eps: Option<f64>) -> Result<StepRecord> {
    let xi = crate::dirac_sea::separation(y, x);
    match opts.backend {
        TransportBackend::Analytic => {
            let d = analytic_connection(&xi, opts.mass)?;
            Ok(StepRecord { connection: d, phi: None, future: xi[0] < 0.0 })
        }
        TransportBackend::Generic | TransportBackend::Regularized { .. } => {
            // D_{y x} maps the spin space at x to the one at y
            let pair = dirac_sea_pair(y, x, opts.mass, eps)?;
            let conn = spin_connection(&pair, &opts.tol)?;
            Ok(StepRecord { connection: conn.d, phi: Some(conn.phi), future: !conn.is_future() })
        }
        TransportBackend::Spliced => {
            let pair = dirac_sea_pair(y, x, opts.mass, None)?;
            let conn = spin_connection(&pair, &opts.tol)?;
            let k = CliffordSubspace::standard();
            let d = spliced_connection(&conn, &k, &k, &opts.tol)?;
            Ok(StepRecord { connection: d, phi: Some(conn.phi), future: !conn.is_future() })
        }
    }
}

fn run_steps(nodes: &[Event], opts: &TransportOptions, eps: Option<f64>) -> Result<Vec<StepRecord>> {
    nodes
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let step = step_connection(&w[0], &w[1], opts, eps).map_err(|_| Error::NotAdmissibleCurve { segment: i })?;
            if step.future {
                Ok(step)
            } else {
                Err(Error::NotAdmissibleCurve { segment: i })
            }
        })
        .collect()
}

/// Composes the spin connections between the `N + 1` nodes of the curve.
pub fn compose_transport(curve: &TimelikeCurve, n: usize, opts: &TransportOptions) -> Result<TransportResult> {
    if n == 0 {
        return Err(Error::OutOfDomain("transport needs at least one step".into()));
    }
    if !(opts.mass > 0.0) {
        return Err(Error::OutOfDomain(format!("mass must be positive, got {}", opts.mass)));
    }
    let nodes = curve.nodes(n);
    let (steps, eps) = match opts.backend {
        TransportBackend::Regularized { eps, min_eps } => {
            let mut e = eps;
            loop {
                match run_steps(&nodes, opts, Some(e)) {
                    Ok(steps) => break (steps, Some(e)),
                    Err(err) if e / 2.0 < min_eps => return Err(err),
                    Err(_) => e /= 2.0,
                }
            }
        }
        _ => (run_steps(&nodes, opts, None)?, None),
    };
    let total = steps.iter().fold(SpinOperator::identity(), |acc, s| s.connection * acc);
    let deviation = operator_norm(&(total - SpinOperator::identity()));
    Ok(TransportResult { total, deviation, steps, eps })
}

/// Curvature data seen from a point of the curve, in an orthonormal frame
/// `e_0 = gamma', e_1, e_2, e_3` that is parallel along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    /// Scalar curvature `s`.
    pub scalar: f64,
    /// Derivative of `s` along `gamma'`.
    pub scalar_derivative: f64,
    /// `Ric(gamma', e_j)`.
    pub ricci: [f64; 4],
    /// `(nabla_{gamma'} Ric)(gamma', gamma')`.
    pub ricci_derivative: f64,
    /// Components of `sum_j eps_j (nabla_{e_j} R)(gamma', e_j) gamma'`.
    pub w: [f64; 4],
    /// `(||R||, ||nabla R||, ||nabla^2 R||)` where known.
    pub norms: Option<[f64; 3]>,
}

impl CurvatureSample {
    pub fn flat() -> Self {
        Self { scalar: 0.0, scalar_derivative: 0.0, ricci: [0.0; 4], ricci_derivative: 0.0, w: [0.0; 4], norms: Some([0.0; 3]) }
    }
}

pub trait CurvatureField {
    /// Parameter interval on which the field is defined.
    fn domain(&self) -> (f64, f64);
    fn sample(&self, t: f64) -> Result<CurvatureSample>;
    /// Interior parameters where the field is not smooth; integration steps end there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

pub const DEFAULT_CURVATURE_BOUND: f64 = 0.5;

/// Checks `||R||/m^2 + ||nabla R||/m^3 + ||nabla^2 R||/m^4 < bound` where norms are supplied.
pub fn check_curvature_bound(sample: &CurvatureSample, mass: f64, bound: f64) -> Result<()> {
    if let Some([r, dr, ddr]) = sample.norms {
        let value = r / mass.powi(2) + dr / mass.powi(3) + ddr / mass.powi(4);
        if !(value < bound) {
            return Err(Error::OutOfDomain(format!("curvature bound {value:.3e} is not below {bound}")));
        }
    }
    Ok(())
}

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Riemann tensor and its covariant derivative at one point, in an
/// orthonormal frame with metric `diag(1, -1, -1, -1)`.
///
/// `riemann[a][b][c][d] = R^a_{bcd}` with `(R(X, Y) Z)^a = R^a_{bcd} Z^b X^c Y^d`,
/// and `nabla[e]` holds `(nabla_{e_e} R)^a_{bcd}` in the same layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCurvature {
    pub riemann: [[[[f64; 4]; 4]; 4]; 4],
    pub nabla: [[[[[f64; 4]; 4]; 4]; 4]; 4],
}

type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

fn ricci_of(r: &Tensor4) -> [[f64; 4]; 4] {
    let mut ric = [[0.0; 4]; 4];
    for (b, row) in ric.iter_mut().enumerate() {
        for (d, v) in row.iter_mut().enumerate() {
            *v = (0..4).map(|a| r[a][b][a][d]).sum();
        }
    }
    ric
}

fn frobenius(values: impl Iterator<Item = f64>) -> f64 {
    values.map(|v| v * v).sum::<f64>().sqrt()
}

impl PointCurvature {
    pub fn flat() -> Self {
        Self { riemann: [[[[0.0; 4]; 4]; 4]; 4], nabla: [[[[[0.0; 4]; 4]; 4]; 4]; 4] }
    }

    /// Largest violation of `R(X, Y) = -R(Y, X)` over the stored components.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for t in std::iter::once(&self.riemann).chain(self.nabla.iter()) {
            for a in 0..4 {
                for b in 0..4 {
                    for cc in 0..4 {
                        for d in 0..4 {
                            worst = worst.max((t[a][b][cc][d] + t[a][b][d][cc]).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn ricci(&self) -> [[f64; 4]; 4] {
        ricci_of(&self.riemann)
    }

    pub fn scalar(&self) -> f64 {
        let ric = self.ricci();
        (0..4).map(|b| ETA[b] * ric[b][b]).sum()
    }

    /// `(nabla_{e_e} Ric)_{bd}`.
    pub fn ricci_gradient(&self, e: usize) -> [[f64; 4]; 4] {
        ricci_of(&self.nabla[e])
    }

    /// Samples the tensors seen by an observer moving along the unit vector `e_0`.
    pub fn sample(&self) -> CurvatureSample {
        let ric = self.ricci();
        let d_ric = self.ricci_gradient(0);
        let scalar_derivative = (0..4).map(|b| ETA[b] * d_ric[b][b]).sum();
        let mut w = [0.0; 4];
        for (a, wa) in w.iter_mut().enumerate() {
            *wa = (0..4).map(|j| ETA[j] * self.nabla[j][a][0][0][j]).sum();
        }
        let norms = [
            frobenius(self.riemann.iter().flatten().flatten().flatten().copied()),
            frobenius(self.nabla.iter().flatten().flatten().flatten().flatten().copied()),
            0.0,
        ];
        CurvatureSample {
            scalar: self.scalar(),
            scalar_derivative,
            ricci: ric[0],
            ricci_derivative: d_ric[0][0],
            w,
            norms: Some(norms),
        }
    }
}

/// Field that is constant along the curve (frame components do not change).
#[derive(Debug, Clone)]
pub struct UniformField {
    pub curvature: PointCurvature,
    pub domain: (f64, f64),
}

impl CurvatureField for UniformField {
    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn sample(&self, t: f64) -> Result<CurvatureSample> {
        in_domain(self.domain, t)?;
        Ok(self.curvature.sample())
    }
}

fn in_domain((a, b): (f64, f64), t: f64) -> Result<()> {
    let slack = 1e-12 * (b - a).abs().max(1.0);
    if t < a - slack || t > b + slack {
        return Err(Error::OutOfDomain(format!("parameter {t} outside [{a}, {b}]")));
    }
    Ok(())
}

/// Curvature sampled on a uniform grid, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub t_start: f64,
    pub t_end: f64,
    pub scalar: Vec<f64>,
    pub ricci: Vec<[f64; 4]>,
    pub w: Vec<[f64; 4]>,
    #[serde(default)]
    pub ricci_derivative: Option<Vec<f64>>,
    #[serde(default)]
    pub norms: Option<Vec<[f64; 3]>>,
}

impl SampledField {
    pub fn from_json(text: &str) -> Result<Self> {
        let field: Self =
            serde_json::from_str(text).map_err(|e| Error::OutOfDomain(format!("malformed curvature file: {e}")))?;
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.scalar.len();
        let lengths_ok = n >= 2
            && self.ricci.len() == n
            && self.w.len() == n
            && self.ricci_derivative.as_ref().is_none_or(|v| v.len() == n)
            && self.norms.as_ref().is_none_or(|v| v.len() == n);
        if !lengths_ok || !(self.t_end > self.t_start) {
            return Err(Error::OutOfDomain("curvature samples need matching lengths >= 2 on a nonempty grid".into()));
        }
        Ok(())
    }

    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let n = self.scalar.len();
        let h = (self.t_end - self.t_start) / (n - 1) as f64;
        let x = ((t - self.t_start) / h).clamp(0.0, (n - 1) as f64);
        let k = (x.floor() as usize).min(n - 2);
        (k, x - k as f64, h)
    }
}

fn lerp(a: f64, b: f64, w: f64) -> f64 {
    a + w * (b - a)
}

fn lerp4(a: &[f64; 4], b: &[f64; 4], w: f64) -> [f64; 4] {
    std::array::from_fn(|i| lerp(a[i], b[i], w))
}

impl CurvatureField for SampledField {
    fn domain(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }

    fn sample(&self, t: f64) -> Result<CurvatureSample> {
        in_domain(self.domain(), t)?;
        let (k, w, h) = self.locate(t);
        Ok(CurvatureSample {
            scalar: lerp(self.scalar[k], self.scalar[k + 1], w),
            scalar_derivative: (self.scalar[k + 1] - self.scalar[k]) / h,
            ricci: lerp4(&self.ricci[k], &self.ricci[k + 1], w),
            ricci_derivative: self.ricci_derivative.as_ref().map_or(0.0, |v| lerp(v[k], v[k + 1], w)),
            w: lerp4(&self.w[k], &self.w[k + 1], w),
            norms: self.norms.as_ref().map(|v| {
                let (a, b) = (v[k], v[k + 1]);
                std::array::from_fn(|i| lerp(a[i], b[i], w))
            }),
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        let n = self.scalar.len();
        let h = (self.t_end - self.t_start) / (n - 1) as f64;
        (1..n - 1).map(|k| self.t_start + k as f64 * h).collect()
    }
}

/// Leading Hadamard coefficient and van Vleck factor along the curve direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HadamardLeading {
    pub v_scalar: f64,
    pub vleck: f64,
}

/// Evaluates at curve parameter `t` for a separation of proper length `dist` along `gamma'`.
pub fn hadamard_leading(field: &dyn CurvatureField, t: f64, mass: f64, dist: f64) -> Result<HadamardLeading> {
    let s = field.sample(t)?;
    Ok(HadamardLeading {
        v_scalar: mass * mass - s.scalar / 12.0 + s.scalar_derivative / 24.0,
        vleck: 1.0 + dist * dist / 12.0 * s.ricci[0] - dist.powi(3) / 24.0 * s.ricci_derivative,
    })
}

/// Increment `Delta u` of the tangent representative over a step of length `delta`.
#[derive(Debug, Clone, Copy)]
pub struct DeltaU {
    /// Frame components.
    pub vector: [f64; 4],
    /// Clifford product `(Delta u) . u` with `u = gamma^0` the unit tangent.
    pub action: SpinOperator,
}

fn mass_shell_factor(mass: f64, scalar: f64) -> Result<f64> {
    let d = mass * mass - scalar / 12.0;
    if d.abs() < 1e-12 * mass * mass {
        return Err(Error::MassShellDegenerate);
    }
    Ok(1.0 / d)
}

fn clifford_vector(v: &[f64; 4]) -> SpinOperator {
    slash(v)
}

pub fn delta_u(field: &dyn CurvatureField, t: f64, delta: f64, mass: f64) -> Result<DeltaU> {
    let s = field.sample(t)?;
    check_curvature_bound(&s, mass, DEFAULT_CURVATURE_BOUND)?;
    let k = mass_shell_factor(mass, s.scalar)?;
    let vector = s.w.map(|w| delta / 6.0 * k * w);
    let action = clifford_vector(&vector) * gamma(0);
    Ok(DeltaU { vector, action })
}

/// Generator of the curvature correction at parameter `t`.
pub fn texp_generator(field: &dyn CurvatureField, t: f64, mass: f64) -> Result<SpinOperator> {
    let s = field.sample(t)?;
    let k = mass_shell_factor(mass, s.scalar)?;
    Ok(clifford_vector(&s.w) * gamma(0) * c(k / 6.0, 0.0))
}

#[derive(Debug, Clone, Copy)]
pub struct TexpOptions {
    pub mass: f64,
    /// Local error per step (max entry) targeted by the step control.
    pub local_tol: f64,
    pub max_steps: usize,
    pub curvature_bound: f64,
}

impl Default for TexpOptions {
    fn default() -> Self {
        Self { mass: 1.0, local_tol: 1e-10, max_steps: 1_000_000, curvature_bound: DEFAULT_CURVATURE_BOUND }
    }
}

fn magnus4(g: &dyn Fn(f64) -> Result<SpinOperator>, t: f64, h: f64) -> Result<SpinOperator> {
    let off = 3f64.sqrt() / 6.0;
    let a1 = g(t + h * (0.5 - off))?;
    let a2 = g(t + h * (0.5 + off))?;
    let omega = (a1 + a2) * c(h / 2.0, 0.0) + commutator(&a2, &a1) * c(3f64.sqrt() / 12.0 * h * h, 0.0);
    Ok(expm(&omega))
}

/// Time-ordered exponential of the generator over a generator callback on `[a, b]`.
pub fn time_ordered_exp(
    g: &dyn Fn(f64) -> Result<SpinOperator>,
    a: f64,
    b: f64,
    local_tol: f64,
    max_steps: usize,
) -> Result<SpinOperator> {
    let span = b - a;
    let mut d = SpinOperator::identity();
    if span == 0.0 {
        return Ok(d);
    }
    let mut t = a;
    let mut h = span / 16.0;
    let mut steps = 0;
    while t < b {
        if steps >= max_steps {
            return Err(Error::IntegrationFailure(format!("step limit {max_steps} reached at t = {t}")));
        }
        h = h.min(b - t);
        let big = magnus4(g, t, h)?;
        let half = magnus4(g, t + h / 2.0, h / 2.0)? * magnus4(g, t, h / 2.0)?;
        let err = max_abs(&(big - half)) / 15.0;
        if err <= local_tol || h <= 1e-14 * span.abs() {
            if err > local_tol {
                return Err(Error::IntegrationFailure(format!("step size underflow at t = {t}")));
            }
            d = half * d;
            t += h;
            steps += 1;
            let grow = if err == 0.0 { 4.0 } else { (0.9 * (local_tol / err).powf(0.2)).clamp(0.2, 4.0) };
            h *= grow;
        } else {
            h *= (0.9 * (local_tol / err).powf(0.2)).clamp(0.1, 0.5);
        }
    }
    Ok(d)
}

/// Curvature correction `Texp((1/6) int (m^2 - s/12)^{-1} W . gamma' dt)` along the field's domain.
pub fn texp_correction(field: &dyn CurvatureField, opts: &TexpOptions) -> Result<SpinOperator> {
    let (a, b) = field.domain();
    let g = |t: f64| -> Result<SpinOperator> {
        let s = field.sample(t)?;
        check_curvature_bound(&s, opts.mass, opts.curvature_bound)?;
        texp_generator(field, t, opts.mass)
    };
    let mut knots = vec![a];
    knots.extend(field.breakpoints().into_iter().filter(|&t| t > a && t < b));
    knots.push(b);
    let mut d = SpinOperator::identity();
    for w in knots.windows(2) {
        d = time_ordered_exp(&g, w[0], w[1], opts.local_tol, opts.max_steps)? * d;
    }
    Ok(d)
}
