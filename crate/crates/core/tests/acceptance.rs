//! Acceptance criteria, one PASS/FAIL line each. Run with `--nocapture` to see the table.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use cfsgeom::ambient::{kernel, product_spectrum, random_system};
use cfsgeom::clifford::{is_generically_separated, synchronize, CliffordSubspace, SignOperator};
use cfsgeom::dirac_sea::*;
use cfsgeom::gamma::{minkowski_square, slash};
use cfsgeom::geometry::*;
use cfsgeom::special::bessel::{jy01, k01};
use cfsgeom::spin::{c, eigenvalues, expm, max_abs, spin_adjoint, trace_inner, SpinOperator, C64};
use cfsgeom::synthetic::{random_connectable_pair, random_sign_operator, random_spin_unitary};
use cfsgeom::transport::*;
use cfsgeom::Tolerances;
use nalgebra::{Matrix4, Matrix5};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Timelike separation with proper time in `[0.1, 5]` and speed below 0.9.
fn random_timelike(rng: &mut ChaCha8Rng) -> Event {
    let tau: f64 = rng.random_range(0.1..5.0);
    let speed: f64 = rng.random_range(0.05..0.9);
    let dir = random_direction(rng);
    let gamma = 1.0 / (1.0 - speed * speed).sqrt();
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let r = tau * gamma * speed;
    [sign * tau * gamma, r * dir[0], r * dir[1], r * dir[2]]
}

fn random_spacelike(rng: &mut ChaCha8Rng) -> Event {
    let s: f64 = rng.random_range(0.1..5.0);
    let t: f64 = rng.random_range(-3.0..3.0);
    let r = (s * s + t * t).sqrt();
    let dir = random_direction(rng);
    [t, r * dir[0], r * dir[1], r * dir[2]]
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let cz: f64 = rng.random_range(-1.0..1.0);
    let az: f64 = rng.random_range(0.0..2.0 * PI);
    let sz = (1.0 - cz * cz).sqrt();
    [sz * az.cos(), sz * az.sin(), cz]
}

fn closed_form_sign(xi: &Event) -> SpinOperator {
    slash(xi) * c(xi[0].signum() / minkowski_square(xi).sqrt(), 0.0)
}

/// Phase `phi` picked from the window `pi/2 < |phi| < 3 pi/4` by the difference of block phases.
fn window_phi(delta: f64) -> f64 {
    let d0 = delta.rem_euclid(PI);
    let d = if d0 < PI / 2.0 { d0 + PI } else { d0 - 2.0 * PI };
    -d / 2.0
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = (0..b.len())
            .filter(|&k| !used[k])
            .map(|k| (k, (x - b[k]).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

fn c1_chain_coefficient() -> Outcome {
    let m = 1.3;
    let mut worst: f64 = 0.0;
    for z in [0.5, 1.0, 3.0, 10.0] {
        for orientation in [1.0, -1.0] {
            let tau = z / m;
            let xi = [orientation * tau * 1.25, 0.75 * tau, 0.0, 0.0];
            let ca = chain_analysis(&xi, m).unwrap();
            let oracle = -orientation * m.powi(3) / (64.0 * PI.powi(5) * tau.powi(4));
            worst = worst.max(((ca.a - oracle) / oracle).abs());
        }
    }
    ensure(worst < 1e-9, || format!("relative error {worst:.3e}"))?;
    Ok(format!("max relative error {worst:.2e}"))
}

fn c2_causal_dichotomy() -> Outcome {
    let tol = Tolerances::default();
    let m = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = Vec::new();
    for i in 0..500 {
        let xi = random_timelike(&mut rng);
        let a = closed_chain(&dirac_sea_pair(&[0.0; 4], &xi, m, None).unwrap().p_xy);
        let d = timelike_diagnostics(&a, &tol);
        let ev = eigenvalues(&a);
        let distinct = ev.iter().any(|l| (l - ev[0]).norm() > 1e-6 * ev[0].norm());
        if !(d.properly_timelike && d.real_spectrum && d.positive_spectrum && distinct) {
            bad.push(format!("timelike #{i}"));
        }
    }
    let eps = 1e-3 / m;
    for i in 0..500 {
        let xi = random_spacelike(&mut rng);
        let a = regularized_chain(&xi, m, eps).unwrap().chain;
        let ev = eigenvalues(&a);
        let scale = ev[0].norm();
        let conj_pair = ev.iter().all(|l| ev.iter().any(|k| (k - l.conj()).norm() < 1e-8 * scale));
        let modulus = ev.iter().all(|l| (l.norm() - scale).abs() < 1e-8 * scale);
        if classify_causal(&a, &tol) != CausalType::Spacelike || !conj_pair || !modulus {
            bad.push(format!("spacelike #{i}"));
        }
    }
    ensure(bad.is_empty(), || format!("{} misclassified: {:?}", bad.len(), &bad[..bad.len().min(5)]))?;
    Ok("1000 separations, 0 misclassified".into())
}

fn c3_directional_sign() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let xi = random_timelike(&mut rng);
        let a = closed_chain(&dirac_sea_pair(&[0.0; 4], &xi, 1.0, None).unwrap().p_xy);
        let v = directional_sign(&a, &tol).map_err(|e| format!("{e}"))?;
        worst = worst.max(max_abs(&(v.matrix() - closed_form_sign(&xi))));
    }
    ensure(worst < 1e-8, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("max deviation {worst:.2e}"))
}

fn c4_connection_closed_form() -> Outcome {
    let tol = Tolerances::default();
    let m = 0.8;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let xi = random_timelike(&mut rng);
        let conn = spin_connection(&dirac_sea_pair(&[0.0; 4], &xi, m, None).unwrap(), &tol).map_err(|e| format!("#{i}: {e}"))?;
        let k = kernel_unregularized(&xi, m).unwrap();
        let s = xi[0].signum() * minkowski_square(&xi).sqrt();
        let (p_plus, p_minus) = (k.beta + k.alpha * s, k.beta - k.alpha * s);
        let phi = window_phi(p_plus.arg() - p_minus.arg());
        let kappa = (Complex64::from_polar(1.0, phi) * p_plus).arg();
        worst = worst.max(max_abs(&(conn.d - SpinOperator::identity() * Complex64::from_polar(1.0, kappa))));
        ensure((conn.phi - phi).abs() < 1e-9, || format!("#{i}: phi {} vs {phi}", conn.phi))?;
        ensure(conn.phi.abs() > PI / 2.0 && conn.phi.abs() < 3.0 * PI / 4.0, || format!("#{i}: phi {}", conn.phi))?;
        ensure(conn.phi.signum() == xi[0].signum(), || format!("#{i}: sign of phi"))?;
    }
    ensure(worst < 1e-8, || format!("max entry error {worst:.3e}"))?;
    Ok(format!("max entry error {worst:.2e}"))
}

fn c5_connection_properties() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = [0.0f64; 4];
    for i in 0..200 {
        let pair = random_connectable_pair(&mut rng);
        let conn = spin_connection(&pair, &tol).map_err(|e| format!("#{i}: {e}"))?;
        let rev = spin_connection(&pair.reversed(), &tol).map_err(|e| format!("#{i} reversed: {e}"))?;
        let d_inv = conn.d.try_inverse().ok_or("singular connection")?;
        let a_xy = closed_chain(&pair.p_xy);
        let a_yx = pair.p_yx() * pair.p_xy;
        let r = [
            max_abs(&(spin_adjoint(&conn.d) - d_inv)),
            max_abs(&(a_xy - conn.d * a_yx * d_inv)) / max_abs(&a_xy),
            max_abs(&(conn.v_xy.matrix() - conn.d * conn.v_yx.matrix() * d_inv)),
            (rev.phi + conn.phi).abs(),
        ];
        for k in 0..4 {
            worst[k] = worst[k].max(r[k]);
        }
    }
    ensure(worst[0] < 1e-9 && worst[1] < 1e-8 && worst[2] < 1e-8 && worst[3] < 1e-9, || format!("residuals {}", sci(&worst)))?;
    Ok(format!("residuals {}", sci(&worst)))
}

fn c6_metric_isometry() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let gram = |f: &[SpinOperator]| Matrix5::from_fn(|i, j| trace_inner(&f[i], &f[j]).re);
    let eta = Matrix5::from_diagonal(&nalgebra::Vector5::new(1.0, -1.0, -1.0, -1.0, -1.0));
    let mut frame_err: f64 = 0.0;
    for _ in 0..50 {
        let conn = spin_connection(&random_connectable_pair(&mut rng), &tol).unwrap();
        let home = &conn.k_y_of_x;
        let moved: Vec<SpinOperator> = home
            .generators()
            .iter()
            .map(|g| metric_connection(&conn, &TangentVector { op: *g, home: home.clone() }).map(|t| t.op))
            .collect::<cfsgeom::Result<_>>()
            .map_err(|e| e.to_string())?;
        frame_err = frame_err.max((gram(&moved) - eta).abs().max());
    }
    let mut mink_err: f64 = 0.0;
    let events: Vec<Event> = (0..6).map(|i| {
        let t = 1.2 * i as f64;
        [t + rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)]
    }).collect();
    let sample = MinkowskiSample { events, mass: 1.0, eps: None };
    let k = CliffordSubspace::standard();
    for x in 0..6 {
        for y in 0..6 {
            if x == y {
                continue;
            }
            let conn = spin_connection(&sample.pair(x, y).unwrap(), &tol).unwrap();
            for g in k.generators() {
                let u = TangentVector { op: *g, home: k.clone() }.identify(&conn.s_y, &conn.k_y_of_x, &tol).map_err(|e| e.to_string())?;
                let ux = metric_connection(&conn, &u).and_then(|t| t.identify(&conn.s_x, &k, &tol)).map_err(|e| e.to_string())?;
                mink_err = mink_err.max(max_abs(&(ux.op - g)));
            }
        }
    }
    ensure(frame_err < 1e-8 && mink_err < 1e-9, || format!("frame {frame_err:.2e}, Minkowski {mink_err:.2e}"))?;
    Ok(format!("frame {frame_err:.1e}, Minkowski {mink_err:.1e}"))
}

/// Second sign operator in the basis where the first is `diag(1, 1, -1, -1)`.
fn normal_form(alpha: f64, beta: f64) -> SpinOperator {
    let (ca, sa, cb, sb) = (alpha.cosh(), alpha.sinh(), beta.cosh(), beta.sinh());
    Matrix4::new(ca, 0.0, sa, 0.0, 0.0, cb, 0.0, -sb, -sa, 0.0, -ca, 0.0, 0.0, sb, 0.0, -cb).map(|x| c(x, 0.0))
}

fn c7_synchronization() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut inv, mut round) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let v = random_sign_operator(&mut rng, 0.7);
        let w = random_sign_operator(&mut rng, 0.7);
        ensure(is_generically_separated(&v, &w, &tol), || format!("#{i} not generically separated"))?;
        let s = synchronize(&v, &w, &tol).map_err(|e| format!("#{i}: {e}"))?;
        let (vm, wm) = (v.matrix(), w.matrix());
        let conj = s.k_v.conjugated(&s.u);
        inv = inv
            .max(max_abs(&(s.rho * vm + vm * s.rho)))
            .max(max_abs(&(s.rho * wm + wm * s.rho)))
            .max(s.k_w.distance(&conj))
            .max(s.k_v.residual(vm))
            .max(s.k_w.residual(wm));
        let back = synchronize(&w, &v, &tol).map_err(|e| format!("#{i} reversed: {e}"))?;
        round = round.max(max_abs(&(back.u * s.u - SpinOperator::identity())));
    }
    let mut zero: f64 = 0.0;
    for _ in 0..20 {
        let u = random_spin_unitary(&mut rng, 0.5);
        let u_inv = u.try_inverse().unwrap();
        let a: f64 = rng.random_range(0.2..1.5);
        let v = SignOperator::new_unchecked(u * cfsgeom::spin::signature() * u_inv);
        let w = SignOperator::new_unchecked(u * normal_form(a, a) * u_inv);
        let s = synchronize(&v, &w, &tol).map_err(|e| e.to_string())?;
        zero = zero.max(max_abs(&s.rho));
    }
    ensure(inv <= 1e-8 && round < 1e-9 && zero <= 1e-8, || format!("invariants {inv:.2e}, inverse {round:.2e}, rho {zero:.2e}"))?;
    Ok(format!("invariants {inv:.1e}, inverse {round:.1e}, commuting rho {zero:.1e}"))
}

/// Deviations `||D^(N) - 1||` along a straight segment of length `1/m`.
fn convergence_table() -> Vec<(usize, f64)> {
    let m = 1.0;
    let curve = TimelikeCurve::straight([0.0; 4], [1.0, 0.6, 0.0, 0.0], 1.0 / m).unwrap();
    let opts = TransportOptions { mass: m, backend: TransportBackend::Analytic, tol: Tolerances::default() };
    [8, 16, 32, 64, 128, 256].iter().map(|&n| (n, compose_transport(&curve, n, &opts).unwrap().deviation)).collect()
}

fn c8_convergence() -> Outcome {
    let table = convergence_table();
    let ratios: Vec<f64> = table.windows(2).map(|w| w[0].1 / w[1].1).collect();
    let in_band = ratios.iter().all(|r| (1.7..=2.3).contains(r));
    let final_ok = table[5].1 < table[0].1 / 16.0;
    let detail = format!("deviations {}, ratios {:.2?}", sci(&table.iter().map(|p| p.1).collect::<Vec<_>>()), ratios);
    ensure(in_band && final_ok, || detail.clone())?;
    Ok(detail)
}

fn c9_kappa_order() -> Outcome {
    let m = 1.0;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..25 {
        let z = 10f64.powf(-3.0 + 2.0 * (i as f64 + 0.5) / 25.0);
        let tau = z / m;
        let xi = [tau * 1.25, 0.75 * tau, 0.0, 0.0];
        let kappa = chain_analysis(&xi, m).unwrap().phases.unwrap().kappa;
        xs.push(minkowski_square(&xi).ln());
        ys.push(kappa.abs().ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    ensure(slope >= 0.95, || format!("slope {slope:.4}"))?;
    Ok(format!("slope {slope:.3} in xi^2"))
}

fn c10_bessel_positivity() -> Outcome {
    let mut min = f64::INFINITY;
    for i in 0..200 {
        let z = (0.05f64.ln() + (50f64.ln() - 0.05f64.ln()) * (i as f64 + 0.5) / 200.0).exp();
        let k = kernel_unregularized(&[z, 0.0, 0.0, 0.0], 1.0).unwrap();
        let im = (k.alpha * k.beta.conj()).im;
        let (j0, j1, y0, y1) = jy01(z).unwrap();
        let (j2, y2) = (2.0 * j1 / z - j0, 2.0 * y1 / z - y0);
        let oracle = (j1 * j2 + y1 * y2) / (256.0 * PI.powi(4) * z.powi(3));
        ensure((im - oracle).abs() <= 1e-10 * oracle.abs(), || format!("z = {z}: {im} vs {oracle}"))?;
        ensure(im > 0.0, || format!("Im(alpha conj beta) = {im} at z = {z}"))?;
        min = min.min(im * z.powi(3));
    }
    Ok(format!("min z^3 Im(alpha conj beta) = {min:.3e}"))
}

fn c11_ambient_consistency() -> Outcome {
    let tol = Tolerances::default();
    let sys = random_system(16, 11, 11).map_err(|e| e.to_string())?;
    let loc = sys.localized(&tol).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    'outer: for i in 0..11 {
        for j in 0..11 {
            if i == j {
                continue;
            }
            let chain = eigenvalues(&closed_chain(&kernel(&loc.spins[i], &loc.spins[j])));
            let full = product_spectrum(&sys.points[i], &sys.points[j]);
            let scale = full[0].norm();
            worst = worst.max(multiset_distance(&chain, &full[..4]) / scale);
            worst = worst.max(full[4..].iter().map(|z| z.norm() / scale).fold(0.0, f64::max));
            count += 1;
            if count == 100 {
                break 'outer;
            }
        }
    }
    ensure(worst < 1e-8, || format!("relative spectrum error {worst:.3e}"))?;
    Ok(format!("{count} pairs, relative error {worst:.1e}"))
}

/// `K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt` by composite Simpson, cut where the integrand is below `e^-45`.
fn k_quadrature(z: Complex64, nu: f64) -> Complex64 {
    let t_max = (1.0 + 45.0 / z.re).acosh();
    let h = (0.005 / (z.norm() * t_max.sinh().max(1.0))).min(1e-3);
    let n = 2 * ((t_max / (2.0 * h)).ceil() as usize);
    let h = t_max / n as f64;
    let f = |t: f64| (-z * t.cosh()).exp() * (nu * t).cosh();
    let mut sum = f(0.0) + f(t_max);
    for k in 1..n {
        sum += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * (h / 3.0)
}

fn c12_special_functions() -> Outcome {
    let mut wr: f64 = 0.0;
    for i in 0..20 {
        let x = 0.1 * 500f64.powf(i as f64 / 19.0);
        let (j0, j1, y0, y1) = jy01(x).unwrap();
        let rhs = -2.0 / (PI * x);
        wr = wr.max(((j0 * y1 - j1 * y0) - rhs).abs() / rhs.abs());
    }
    let radii = [0.2, 0.7, 1.5, 3.0, 5.0, 8.5, 8.9, 9.0, 9.1, 9.5, 12.0, 16.0, 20.0, 25.0, 30.0];
    let mut kerr: f64 = 0.0;
    for (i, r) in radii.iter().enumerate() {
        for theta in [0.35 - 0.05 * i as f64, -1.1 + 0.03 * i as f64] {
            let z = Complex64::from_polar(*r, theta);
            let (k0, k1) = k01(z).unwrap();
            let (q0, q1) = (k_quadrature(z, 0.0), k_quadrature(z, 1.0));
            kerr = kerr.max((k0 - q0).norm() / q0.norm()).max((k1 - q1).norm() / q1.norm());
        }
    }
    ensure(wr < 1e-10 && kerr < 1e-9, || format!("Wronskian {wr:.2e}, K0/K1 {kerr:.2e}"))?;
    Ok(format!("Wronskian {wr:.1e}, K0/K1 vs quadrature {kerr:.1e} at 30 points"))
}

fn c13_nu_eigenvalues() -> Outcome {
    for m in [0.5, 1.0, 2.0] {
        for eps in [0.1, 1.0] {
            let nu = nu_eigenvalues(m, eps).map_err(|e| e.to_string())?;
            ensure(nu.nu12 < 0.0 && nu.nu34 > 0.0, || format!("m = {m}, eps = {eps}: {nu:?}"))?;
        }
    }
    let eps: f64 = 1e-3;
    let lead = eps.powi(3) * nu_eigenvalues(1.0, eps).map_err(|e| e.to_string())?.nu34;
    ensure((lead / 2.0 - 1.0).abs() < 0.02, || format!("eps^3 nu34 = {lead}"))?;
    Ok(format!("sign pattern on 6 grid points, eps^3 nu34 = {lead:.5}"))
}

fn c14_curved_corrector() -> Outcome {
    let flat = UniformField { curvature: PointCurvature::flat(), domain: (0.0, 3.0) };
    let d = texp_correction(&flat, &TexpOptions::default()).map_err(|e| e.to_string())?;
    let flat_err = max_abs(&(d - SpinOperator::identity()));

    let mut p = PointCurvature::flat();
    for (j, a, g) in [(1, 1, 0.15), (2, 3, -0.1), (3, 2, 0.05)] {
        p.nabla[j][a][0][0][j] = g;
        p.nabla[j][a][0][j][0] = -g;
    }
    let length = 1.7;
    let field = UniformField { curvature: p, domain: (0.0, length) };
    let g0 = texp_generator(&field, 0.0, 1.0).map_err(|e| e.to_string())?;
    let d = texp_correction(&field, &TexpOptions::default()).map_err(|e| e.to_string())?;
    let exp_err = max_abs(&(d - expm(&(g0 * c(length, 0.0)))));
    let unitarity = max_abs(&(spin_adjoint(&d) * d - SpinOperator::identity()));

    let a = delta_u(&field, 0.5, 0.01, 1.0).map_err(|e| e.to_string())?;
    let b = delta_u(&field, 0.5, 0.02, 1.0).map_err(|e| e.to_string())?;
    let norm = |v: &[f64; 4]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let ratio = norm(&b.vector) / norm(&a.vector);
    ensure(flat_err < 1e-12 && exp_err < 1e-9 && unitarity < 1e-8 && (ratio - 2.0).abs() <= 0.01, || {
        format!("flat {flat_err:.2e}, exp {exp_err:.2e}, unitarity {unitarity:.2e}, ratio {ratio}")
    })?;
    Ok(format!("flat {flat_err:.1e}, exp {exp_err:.1e}, unitarity {unitarity:.1e}, doubling ratio {ratio:.4}"))
}

fn c15_regularized_limit() -> Outcome {
    let m = 1.0;
    let xi = [1.1, 0.3, -0.2, 0.4];
    let p = assemble_kernel(&xi, &kernel_unregularized(&xi, m).unwrap(), 0.0);
    let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&e| {
            let eps = e / m;
            max_abs(&(assemble_kernel(&xi, &kernel_regularized(&xi, m, eps).unwrap(), eps) - p))
        })
        .collect();
    ensure(errs[0] > errs[1] && errs[1] > errs[2], || sci(&errs))?;
    Ok(format!("||P^eps - P|| = {}", sci(&errs)))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 15] = [
    Criterion { id: 1, name: "chain coefficient closed form", budget: Duration::from_secs(1), run: c1_chain_coefficient },
    Criterion { id: 2, name: "causal dichotomy", budget: Duration::from_secs(5), run: c2_causal_dichotomy },
    Criterion { id: 3, name: "directional sign oracle", budget: Duration::from_secs(5), run: c3_directional_sign },
    Criterion { id: 4, name: "spin connection closed form", budget: Duration::from_secs(10), run: c4_connection_closed_form },
    Criterion { id: 5, name: "spin connection properties", budget: Duration::from_secs(10), run: c5_connection_properties },
    Criterion { id: 6, name: "metric connection isometry", budget: Duration::from_secs(5), run: c6_metric_isometry },
    Criterion { id: 7, name: "synchronization", budget: Duration::from_secs(10), run: c7_synchronization },
    Criterion { id: 8, name: "discrete transport convergence", budget: Duration::from_secs(60), run: c8_convergence },
    Criterion { id: 9, name: "kappa small-distance order", budget: Duration::from_secs(5), run: c9_kappa_order },
    Criterion { id: 10, name: "Bessel positivity", budget: Duration::from_secs(1), run: c10_bessel_positivity },
    Criterion { id: 11, name: "ambient spectrum consistency", budget: Duration::from_secs(10), run: c11_ambient_consistency },
    Criterion { id: 12, name: "special functions", budget: Duration::from_secs(30), run: c12_special_functions },
    Criterion { id: 13, name: "nu eigenvalues", budget: Duration::from_secs(10), run: c13_nu_eigenvalues },
    Criterion { id: 14, name: "curved corrector", budget: Duration::from_secs(10), run: c14_curved_corrector },
    Criterion { id: 15, name: "regularized limit", budget: Duration::from_secs(5), run: c15_regularized_limit },
];

/// Criteria that cannot pass as stated; their failure is checked against the measured behaviour below.
const KNOWN_RED: [usize; 1] = [8];

#[test]
fn acceptance() {
    let mut unexpected = Vec::new();
    for cr in &CRITERIA {
        let start = Instant::now();
        let mut outcome = (cr.run)();
        let elapsed = start.elapsed();
        // wall-clock budgets are meaningful for optimized builds only
        if outcome.is_ok() && !cfg!(debug_assertions) && elapsed > cr.budget {
            outcome = Err(format!("took {elapsed:?}, budget {:?}", cr.budget));
        }
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} {status} [{:>8.3}s] {}: {detail}", cr.id, elapsed.as_secs_f64(), cr.name);
        if outcome.is_ok() == KNOWN_RED.contains(&cr.id) {
            unexpected.push(cr.id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected status: {unexpected:?}");
}

/// The composed transport converges at third order, not first: each step contributes
/// `kappa = O(xi^4)` and there are `N` steps.
#[test]
fn transport_convergence_is_third_order() {
    let table = convergence_table();
    for w in table.windows(2) {
        let ratio = w[0].1 / w[1].1;
        assert!((7.5..8.5).contains(&ratio), "N = {} -> {}: ratio {ratio}", w[0].0, w[1].0);
    }
    assert!(table[5].1 < table[0].1 / 16.0);
}
