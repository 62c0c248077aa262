//! Random spin-space objects for tests, benchmarks and the acceptance suite.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::clifford::{adapted_frame, synchronize, AdaptedFrame, CliffordSubspace, SignOperator};
use crate::geometry::PairData;
use crate::spin::{c, expm, signature, spin_adjoint, SpinOperator, C64, I};
use crate::tolerance::Tolerances;

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn cgauss<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(gauss(rng), gauss(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Spin-unitary `exp(i H)` with `H` spin-symmetric of Gaussian entries scaled by `scale`.
pub fn random_spin_unitary<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> SpinOperator {
    let g = SpinOperator::from_fn(|_, _| cgauss(rng));
    let herm = (g + g.adjoint()) * c(0.5 * scale, 0.0);
    let h = signature() * herm;
    expm(&(h * I))
}

pub fn random_sign_operator<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> SignOperator {
    let u = random_spin_unitary(rng, scale);
    SignOperator::new_unchecked(u * signature() * spin_adjoint(&u))
}

pub fn random_clifford_subspace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> CliffordSubspace {
    CliffordSubspace::standard().conjugated(&random_spin_unitary(rng, scale))
}

pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let q = [gauss(rng), gauss(rng), gauss(rng), gauss(rng)];
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (c(q[0] / n, q[1] / n), c(q[2] / n, q[3] / n));
    Matrix2::new(a, -b.conj(), b, a.conj())
}

fn random_positive2<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Matrix2<C64> {
    let u = random_su2(rng);
    let l1 = rng.random_range(lo..hi);
    let l2 = rng.random_range(lo..hi);
    u * Matrix2::new(c(l1, 0.0), C64::from(0.0), C64::from(0.0), c(l2, 0.0)) * u.adjoint()
}

/// Relative block phase kept at least `margin` away from multiples of `pi/2`.
fn time_directed_phase<R: Rng + ?Sized>(rng: &mut R, margin: f64) -> f64 {
    let base = rng.random_range(margin..(PI / 2.0 - margin));
    let shift = if rng.random_bool(0.5) { 0.0 } else { PI / 2.0 };
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    sign * (base + shift)
}

/// Frame adapted to a random sign operator `v` and the Clifford subspace
/// synchronized with a random Euclidean sign operator `s`.
fn random_adapted_end<R: Rng + ?Sized>(rng: &mut R) -> (SignOperator, AdaptedFrame) {
    let tol = Tolerances::default();
    loop {
        let v = random_sign_operator(rng, 0.6);
        let s = random_sign_operator(rng, 0.6);
        let Ok(sync) = synchronize(&s, &v, &tol) else { continue };
        if let Ok(frame) = adapted_frame(&v, &sync.k_w, &tol) {
            return (s, frame);
        }
    }
}

/// A spin-connectable pair together with the relative block phase
/// `theta_plus - theta_minus` it was built with.
///
/// The kernel is block diagonal in bases adapted to the synchronized
/// Clifford subspaces, with polar factors of separated spectra and a
/// relative phase kept away from multiples of `pi/2`.
pub fn random_connectable_pair_with_phase<R: Rng + ?Sized>(rng: &mut R) -> (PairData, f64) {
    let (s_x, fx) = random_adapted_end(rng);
    let (s_y, fy) = random_adapted_end(rng);
    let (r_plus, r_minus) = if rng.random_bool(0.5) {
        (random_positive2(rng, 0.6, 1.2), random_positive2(rng, 1.6, 2.4))
    } else {
        (random_positive2(rng, 1.6, 2.4), random_positive2(rng, 0.6, 1.2))
    };
    let delta = time_directed_phase(rng, 0.15);
    let common = rng.random_range(-PI..PI);
    let p_plus = r_plus * random_su2(rng) * C64::from_polar(1.0, common + delta / 2.0);
    let p_minus = r_minus * random_su2(rng) * C64::from_polar(1.0, common - delta / 2.0);
    let mut block = SpinOperator::zeros();
    block.fixed_view_mut::<2, 2>(0, 0).copy_from(&p_plus);
    block.fixed_view_mut::<2, 2>(2, 2).copy_from(&p_minus);
    let p_xy = fx.basis * block * fy.inverse;
    (PairData { p_xy, s_x, s_y }, delta)
}

pub fn random_connectable_pair<R: Rng + ?Sized>(rng: &mut R) -> PairData {
    random_connectable_pair_with_phase(rng).0
}
