use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::io::Write;

use cfsgeom::ambient::{random_system, AmbientSystem};
use cfsgeom::dirac_sea::{chain_analysis, kernel_unregularized, nu_eigenvalues, Event, MinkowskiSample};
use cfsgeom::geometry::{
    check_causal_axioms, check_symmetries, classify_causal, closed_chain, properly_timelike, spin_connection,
    CausalAxiomReport, CausalType, PairSource,
};
use cfsgeom::spin::{c, max_abs, operator_norm, spin_adjoint, SpinOperator};
use cfsgeom::transport::{
    compose_transport, delta_u, texp_correction, texp_generator, CurvatureField, CurvatureSample, SampledField,
    TexpOptions, TimelikeCurve, TransportBackend, TransportOptions,
};
use cfsgeom::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{AuditArgs, Backend, Common, ConvergenceArgs, CurvedArgs, Failure};

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(common: &Common) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(common.writer()?))
}

fn finish(mut w: csv::Writer<Box<dyn Write>>) -> Result<(), Failure> {
    w.flush()?;
    Ok(())
}

pub fn phase_plot(common: &Common) -> Result<(), Failure> {
    if common.eps.iter().any(|&e| e != 0.0) {
        return Err(Failure::Validation("phase-plot uses the unregularized kernel; drop --eps".into()));
    }
    let m = common.single_mass()?;
    let grid = common.grid("0.1:20:400")?;
    let mut rows = Vec::with_capacity(grid.len());
    for z in grid {
        let xi = [z / m, 0.0, 0.0, 0.0];
        let ph = chain_analysis(&xi, m)?
            .phases
            .ok_or_else(|| Failure::Numeric(format!("no connection phases at m sqrt(xi^2) = {z}")))?;
        let off = (ph.phi / FRAC_PI_4 - (ph.phi / FRAC_PI_4).round()).abs() * FRAC_PI_4;
        if off < 1e-6 {
            return Err(Failure::Numeric(format!("phi = {} is within 1e-6 of a multiple of pi/4 at {z}", ph.phi)));
        }
        rows.push([z, ph.phi, ph.kappa]);
    }
    let mut w = csv_writer(common)?;
    w.write_record(["m_sqrt_xi2", "phi", "kappa"])?;
    for r in rows {
        w.write_record(r.map(num))?;
    }
    finish(w)
}

pub fn bessel_check(common: &Common) -> Result<(), Failure> {
    let grid = common.grid("0.05:50:200")?;
    let mut w = csv_writer(common)?;
    w.write_record(["z", "im_alpha_conj_beta"])?;
    let mut negative = None;
    for z in grid {
        let k = kernel_unregularized(&[z, 0.0, 0.0, 0.0], 1.0)?;
        let im = (k.alpha * k.beta.conj()).im;
        if im <= 0.0 && negative.is_none() {
            negative = Some(z);
        }
        w.write_record([num(z), num(im)])?;
    }
    finish(w)?;
    match negative {
        Some(z) => Err(Failure::Numeric(format!("Im(alpha conj beta) is not positive at z = {z}"))),
        None => Ok(()),
    }
}

pub fn convergence(common: &Common, args: &ConvergenceArgs) -> Result<(), Failure> {
    let m = common.single_mass()?;
    let tol = common.tolerances()?;
    let steps = common.steps(&[8, 16, 32, 64, 128, 256])?;
    let eps = match common.eps_list(&[0.0])?.as_slice() {
        [e] => *e,
        _ => return Err(Failure::Validation("convergence takes a single --eps".into())),
    };
    let backend = match (eps > 0.0, args.backend) {
        (true, Backend::Analytic | Backend::Generic) => TransportBackend::Regularized { eps, min_eps: eps * 1e-9 },
        (true, Backend::Spliced) => {
            return Err(Failure::Validation("the spliced backend is unregularized; drop --eps".into()))
        }
        (false, Backend::Analytic) => TransportBackend::Analytic,
        (false, Backend::Generic) => TransportBackend::Generic,
        (false, Backend::Spliced) => TransportBackend::Spliced,
    };
    let velocity: Event = args
        .velocity
        .as_slice()
        .try_into()
        .map_err(|_| Failure::Validation("--velocity needs four components".into()))?;
    let length = args.length.unwrap_or(1.0 / m);
    let curve = TimelikeCurve::straight([0.0; 4], velocity, length)?;
    let opts = TransportOptions { mass: m, backend, tol };
    let mut w = csv_writer(common)?;
    w.write_record(["N", "deviation", "ratio", "eps_used"])?;
    let mut last: Option<f64> = None;
    for n in steps {
        let r = compose_transport(&curve, n, &opts)?;
        let ratio = last.map(|d| num(d / r.deviation)).unwrap_or_default();
        w.write_record([n.to_string(), num(r.deviation), ratio, r.eps.map(num).unwrap_or_default()])?;
        last = Some(r.deviation);
    }
    finish(w)
}

pub fn nu_table(common: &Common) -> Result<(), Failure> {
    let masses = common.masses(&[0.5, 1.0, 2.0])?;
    let eps = common.eps_list(&[0.1, 1.0])?;
    if eps.contains(&0.0) {
        return Err(Failure::Validation("nu-table needs eps > 0".into()));
    }
    let mut rows = Vec::new();
    for &m in &masses {
        for &e in &eps {
            let nu = nu_eigenvalues(m, e)?;
            rows.push([m, e, nu.nu12, nu.nu34, e.powi(3) * nu.nu34]);
        }
    }
    let mut w = csv_writer(common)?;
    w.write_record(["mass", "eps", "nu12", "nu34", "eps3_nu34"])?;
    for r in rows {
        w.write_record(r.map(num))?;
    }
    finish(w)
}

#[derive(Serialize)]
struct AuditReport {
    schema: &'static str,
    source: String,
    points: usize,
    causal: CausalAxiomReport,
    symmetries: SymmetryFlags,
    /// Counts over ordered pairs of distinct points.
    classification: BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct SymmetryFlags {
    parity_preserving: bool,
    clifford_parallel: bool,
    chirally_symmetric: bool,
    max_splice_deviation: f64,
    chiral_residual: f64,
}

fn classification(src: &dyn PairSource, tol: &Tolerances) -> BTreeMap<String, usize> {
    let mut hist = BTreeMap::new();
    for x in 0..src.len() {
        for y in 0..src.len() {
            if x == y {
                continue;
            }
            let key = match src.pair(x, y) {
                Err(e) => format!("kernel_error: {e}"),
                Ok(p) => {
                    let a = closed_chain(&p.p_xy);
                    let kind = match classify_causal(&a, tol) {
                        CausalType::Timelike => "timelike",
                        CausalType::Spacelike => "spacelike",
                        CausalType::Lightlike => "lightlike",
                    };
                    *hist.entry(kind.to_string()).or_insert(0) += 1;
                    if properly_timelike(&a, tol) {
                        *hist.entry("properly_timelike".to_string()).or_insert(0) += 1;
                    }
                    match spin_connection(&p, tol) {
                        Ok(_) => "spin_connectable".to_string(),
                        Err(e) => format!("not_connectable: {e}"),
                    }
                }
            };
            *hist.entry(key).or_insert(0) += 1;
        }
    }
    hist
}

fn audit(src: &dyn PairSource, weights: Option<&[f64]>, source: String, tol: &Tolerances) -> AuditReport {
    let causal = check_causal_axioms(src, weights, tol);
    let s = check_symmetries(src, tol);
    AuditReport {
        schema: "cfs-report/1",
        source,
        points: src.len(),
        causal,
        symmetries: SymmetryFlags {
            parity_preserving: s.parity_preserving,
            clifford_parallel: s.clifford_parallel,
            chirally_symmetric: s.chirally_symmetric,
            max_splice_deviation: s.max_splice_deviation,
            chiral_residual: s.chiral_residual,
        },
        classification: classification(src, tol),
    }
}

pub fn audit_system(common: &Common, args: &AuditArgs) -> Result<(), Failure> {
    let tol = common.tolerances()?;
    let report = if args.minkowski {
        let m = common.single_mass()?;
        let eps = match common.eps_list(&[0.0])?.as_slice() {
            [e] => (*e > 0.0).then_some(*e),
            _ => return Err(Failure::Validation("audit-system takes a single --eps".into())),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        let events: Vec<Event> = (0..args.points)
            .map(|_| {
                [
                    rng.random_range(0.0..6.0),
                    rng.random_range(-1.5..1.5),
                    rng.random_range(-1.5..1.5),
                    rng.random_range(-1.5..1.5),
                ]
            })
            .collect();
        let sample = MinkowskiSample { events, mass: m, eps };
        audit(&sample, None, format!("minkowski seed={} mass={m}", common.seed), &tol)
    } else {
        let (system, source) = match (&args.system, args.f) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)?;
                (AmbientSystem::from_json(&text, &tol)?, format!("file {}", path.display()))
            }
            (None, Some(f)) => (random_system(f, args.points, common.seed)?, format!("random f={f} seed={}", common.seed)),
            (None, None) => {
                return Err(Failure::Validation("audit-system needs --system, --f or --minkowski".into()))
            }
        };
        let localized = system.localized(&tol)?;
        audit(&localized, Some(&system.weights), source, &tol)
    };
    let mut out = common.writer()?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::Io(e.into()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// The field restricted to `[start, end]`.
struct Prefix<'a> {
    inner: &'a dyn CurvatureField,
    end: f64,
}

impl CurvatureField for Prefix<'_> {
    fn domain(&self) -> (f64, f64) {
        (self.inner.domain().0, self.end)
    }

    fn sample(&self, t: f64) -> cfsgeom::Result<CurvatureSample> {
        self.inner.sample(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().into_iter().filter(|&t| t < self.end).collect()
    }
}

/// Classical RK4 with about `density` fixed steps per unit parameter, restarted at every breakpoint.
fn rk4_reference(field: &dyn CurvatureField, mass: f64, density: f64) -> Result<SpinOperator, Failure> {
    let (a, b) = field.domain();
    let mut knots = vec![a];
    knots.extend(field.breakpoints().into_iter().filter(|&t| t > a && t < b));
    knots.push(b);
    let g = |t: f64| texp_generator(field, t, mass);
    let mut d = SpinOperator::identity();
    for w in knots.windows(2) {
        let n = ((w[1] - w[0]) * density).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / n as f64;
        for i in 0..n {
            let t = w[0] + i as f64 * h;
            let k1 = g(t)? * d;
            let k2 = g(t + h / 2.0)? * (d + k1 * c(h / 2.0, 0.0));
            let k3 = g(t + h / 2.0)? * (d + k2 * c(h / 2.0, 0.0));
            let k4 = g(t + h)? * (d + k3 * c(h, 0.0));
            d += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
        }
    }
    Ok(d)
}

pub fn curved_correction(common: &Common, args: &CurvedArgs) -> Result<(), Failure> {
    let m = common.single_mass()?;
    let samples = match common.steps(&[10])?.as_slice() {
        [n] => *n,
        _ => return Err(Failure::Validation("curved-correction takes a single --N (number of output rows)".into())),
    };
    let text = std::fs::read_to_string(&args.field)?;
    let field = SampledField::from_json(&text)?;
    let (a, b) = field.domain();
    let opts = TexpOptions { mass: m, ..TexpOptions::default() };
    let id = SpinOperator::identity();
    let mut rows = Vec::with_capacity(samples);
    for k in 1..=samples {
        let t = a + (b - a) * k as f64 / samples as f64;
        let prefix = Prefix { inner: &field, end: t };
        let d = texp_correction(&prefix, &opts)?;
        let reference = rk4_reference(&prefix, m, 1000.0)?;
        let du = delta_u(&field, t, (b - a) / samples as f64, m)?;
        let du_norm = du.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        rows.push([
            t,
            operator_norm(&(d - id)),
            max_abs(&(d - reference)),
            max_abs(&(spin_adjoint(&d) * d - id)),
            du_norm,
        ]);
    }
    let mut w = csv_writer(common)?;
    w.write_record(["t", "correction_deviation", "texp_deviation", "spin_unitarity", "delta_u_norm"])?;
    for r in rows {
        w.write_record(r.map(num))?;
    }
    finish(w)
}
