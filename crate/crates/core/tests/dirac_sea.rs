use std::f64::consts::PI;

use cfsgeom::dirac_sea::*;
use cfsgeom::gamma::{gamma, minkowski_square, slash};
use cfsgeom::geometry::{classify_causal, directional_sign, spin_connection, CausalType};
use cfsgeom::special::bessel::k01;
use cfsgeom::spin::{c, expm, max_abs, spin_adjoint, SpinOperator};
use cfsgeom::{ConnectReason, Error, Tolerances};
use num_complex::Complex64;
use proptest::prelude::*;

fn timelike_event() -> impl Strategy<Value = Event> {
    (0.05f64..3.0, -0.9f64..0.9, 0.0f64..(2.0 * PI), -1.0f64..1.0, any::<bool>()).prop_map(
        |(tau, rapidity_like, az, cz, future)| {
            // spatial part strictly inside the cone
            let speed = rapidity_like.abs();
            let t = if future { tau } else { -tau };
            let r = speed * tau;
            let sz = (1.0 - cz * cz).sqrt();
            [t, r * sz * az.cos() + 1e-3, r * sz * az.sin(), r * cz]
        },
    )
}

#[test]
fn alpha_is_derivative_of_beta() {
    // alpha = -(2i/m) d beta / d(xi^2), checked by central differences in xi^2
    let m = 1.3;
    for (t, spacelike) in [(0.7, false), (2.5, false), (0.9, true), (3.0, true)] {
        let at = |s2: f64| {
            let xi = if spacelike { [0.0, s2.sqrt(), 0.0, 0.0] } else { [s2.sqrt(), 0.0, 0.0, 0.0] };
            kernel_unregularized(&xi, m).unwrap()
        };
        let s2 = t * t;
        let h = 1e-5 * s2;
        let sgn = if spacelike { -1.0 } else { 1.0 };
        let db = (at(s2 + h).beta - at(s2 - h).beta) / (2.0 * h * sgn);
        let oracle = Complex64::new(0.0, -2.0 / m) * db;
        let alpha = at(s2).alpha;
        assert!((alpha - oracle).norm() < 1e-6 * alpha.norm(), "{t} {spacelike}: {alpha} vs {oracle}");
    }
}

#[test]
fn alpha_small_distance_asymptotics() {
    let m = 1.0;
    let t = 0.01;
    let k = kernel_unregularized(&[t, 0.0, 0.0, 0.0], m).unwrap();
    let lead = Complex64::new(0.0, -1.0 / (4.0 * PI.powi(3) * t.powi(4)));
    assert!((k.alpha - lead).norm() < 0.05 * lead.norm());
}

#[test]
fn light_cone_threshold() {
    assert_eq!(kernel_unregularized(&[1.0, 1.0 - 1e-12, 0.0, 0.0], 1.0).unwrap_err(), Error::OnLightCone);
    assert!(kernel_unregularized(&[1.0, 0.99, 0.0, 0.0], 1.0).is_ok());
}

#[test]
fn regularized_converges_monotonically() {
    let xi = [1.1, 0.3, -0.2, 0.4];
    let m = 1.0;
    let p = assemble_kernel(&xi, &kernel_unregularized(&xi, m).unwrap(), 0.0);
    let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&e| max_abs(&(assemble_kernel(&xi, &kernel_regularized(&xi, m, e).unwrap(), e) - p)))
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn nu_eigenvalues_match_bessel_closed_form() {
    for m in [0.5, 1.0, 2.0] {
        for eps in [0.1, 1.0] {
            let nu = nu_eigenvalues(m, eps).unwrap();
            let (k0, k1) = k01(Complex64::new(m * eps, 0.0)).unwrap();
            let k2 = k0.re + 2.0 * k1.re / (m * eps);
            let oracle34 = m * m * (k2 + k1.re) / eps;
            let oracle12 = m * m * (k1.re - k2) / eps;
            assert!((nu.nu34 - oracle34).abs() < 1e-9 * oracle34.abs(), "{m} {eps}");
            assert!((nu.nu12 - oracle12).abs() < 1e-9 * oracle12.abs(), "{m} {eps}");
            assert!(nu.nu12 < 0.0 && nu.nu34 > 0.0);
        }
    }
    let massless = nu_eigenvalues(0.0, 0.5).unwrap();
    assert!((massless.nu34 - 16.0).abs() < 1e-9 && (massless.nu12 + 16.0).abs() < 1e-9);
    assert!(nu_eigenvalues(1.0, 0.0).is_err());
}

#[test]
fn purely_temporal_pair_falls_back_to_analytic() {
    let tol = Tolerances::default();
    let xi = [0.8, 0.0, 0.0, 0.0];
    let pair = dirac_sea_pair(&[0.0; 4], &xi, 1.0, None).unwrap();
    assert_eq!(
        spin_connection(&pair, &tol).unwrap_err(),
        Error::NotSpinConnectable(ConnectReason::NotGenericallySeparated)
    );
    let d = analytic_connection(&xi, 1.0).unwrap();
    assert!(max_abs(&(spin_adjoint(&d) * d - SpinOperator::identity())) < 1e-14);
}

#[test]
fn spacelike_pair_is_not_connectable() {
    let tol = Tolerances::default();
    let pair = dirac_sea_pair(&[0.0; 4], &[0.2, 1.0, 0.3, 0.0], 1.0, None).unwrap();
    assert_eq!(
        spin_connection(&pair, &tol).unwrap_err(),
        Error::NotSpinConnectable(ConnectReason::NotProperlyTimelike)
    );
    let ca = chain_analysis(&[0.2, 1.0, 0.3, 0.0], 1.0).unwrap();
    assert_eq!(ca.causal, CausalType::Spacelike);
    assert!(ca.phases.is_none());
    assert_eq!(ca.lambda_plus, ca.lambda_minus.conj());
}

#[test]
fn regularized_chain_matches_product() {
    let xi = [0.9, 0.2, 0.1, -0.3];
    let eps = 0.05;
    let rc = regularized_chain(&xi, 1.0, eps).unwrap();
    let pair = dirac_sea_pair(&[0.0; 4], &xi, 1.0, Some(eps)).unwrap();
    let a = pair.p_xy * pair.p_yx();
    assert!(max_abs(&(a - rc.chain)) < 1e-12 * max_abs(&a));
    let v = rc.v.expect("timelike chain has a normalizable sign operator");
    assert!(max_abs(&(v * v - SpinOperator::identity())) < 1e-9);
    let tol = Tolerances::default();
    let numeric = directional_sign(&a, &tol).unwrap();
    assert!(max_abs(&(numeric.matrix() - v)) < 1e-7);
    // v and gamma^0 span a (1,1) plane
    let s = gamma(0);
    let anti = v * s + s * v;
    assert!(max_abs(&(anti - SpinOperator::identity() * anti[(0, 0)])) < 1e-9);
    assert!(anti[(0, 0)].re.abs() > 2.0 + 1e-9, "{}", anti[(0, 0)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kappa_expressions_agree(xi in timelike_event(), m in 0.3f64..3.0) {
        let ca = chain_analysis(&xi, m).unwrap();
        let ph = ca.phases.unwrap();
        prop_assert!((wrap_angle(ph.kappa - ph.kappa_minus)).abs() < 1e-9);
        let half = 0.5 * (ca.beta * ca.beta - ca.alpha * ca.alpha * minkowski_square(&xi)).arg();
        let diff = (ph.kappa - half).rem_euclid(PI);
        prop_assert!(diff < 1e-9 || PI - diff < 1e-9);
        prop_assert!(ph.phi.signum() == xi[0].signum());
    }

    #[test]
    fn chain_spectrum_is_nonnegative(xi in timelike_event(), m in 0.3f64..3.0) {
        let ca = chain_analysis(&xi, m).unwrap();
        prop_assert!(ca.lambda_plus.re * ca.lambda_minus.re > 0.0);
        prop_assert!(ca.lambda_plus.re > 0.0);
        let a = timelike_a_closed_form(&xi, m);
        prop_assert!((ca.a - a).abs() < 1e-9 * a.abs());
    }

    #[test]
    fn numeric_sign_operator_matches_closed_form(xi in timelike_event()) {
        let tol = Tolerances::default();
        let pair = dirac_sea_pair(&[0.0; 4], &xi, 1.0, None).unwrap();
        let a = pair.p_xy * pair.p_yx();
        prop_assert_eq!(classify_causal(&a, &tol), CausalType::Timelike);
        let v = directional_sign(&a, &tol).unwrap();
        let oracle = directional_sign_closed_form(&xi).unwrap();
        prop_assert!(max_abs(&(v.matrix() - oracle)) < 1e-8);
    }

    #[test]
    fn regularized_kernel_adjoint_symmetry(xi in timelike_event(), eps in 0.01f64..0.5) {
        let minus = [-xi[0], -xi[1], -xi[2], -xi[3]];
        let p = assemble_kernel(&xi, &kernel_regularized(&xi, 1.0, eps).unwrap(), eps);
        let q = assemble_kernel(&minus, &kernel_regularized(&minus, 1.0, eps).unwrap(), eps);
        prop_assert!(max_abs(&(spin_adjoint(&p) - q)) < 1e-10 * max_abs(&p));
    }

    #[test]
    fn lorentz_covariance(xi in timelike_event(), eta in -1.0f64..1.0) {
        let (ch, sh) = (eta.cosh(), eta.sinh());
        let boosted = [ch * xi[0] + sh * xi[1], sh * xi[0] + ch * xi[1], xi[2], xi[3]];
        let u = expm(&(gamma(0) * gamma(1) * c(eta / 2.0, 0.0)));
        let u_inv = expm(&(gamma(0) * gamma(1) * c(-eta / 2.0, 0.0)));
        prop_assert!(max_abs(&(u * slash(&xi) * u_inv - slash(&boosted))) < 1e-9 * max_abs(&slash(&xi)));
        let p = assemble_kernel(&xi, &kernel_unregularized(&xi, 1.0).unwrap(), 0.0);
        let pb = assemble_kernel(&boosted, &kernel_unregularized(&boosted, 1.0).unwrap(), 0.0);
        prop_assert!(max_abs(&(u * p * u_inv - pb)) < 1e-8 * max_abs(&p));
    }
}
