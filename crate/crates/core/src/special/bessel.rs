//! Bessel functions `J_0, J_1, Y_0, Y_1` of real argument and `K_0, K_1, K_2`
//! of complex argument.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Below this argument the ascending series is used for `J` and `Y`.
const JY_SERIES_LIMIT: f64 = 14.0;
/// Below this modulus the ascending series is used for `K`.
const K_SERIES_LIMIT: f64 = 2.0;

fn jy_series(x: f64) -> (f64, f64, f64, f64) {
    let q = 0.25 * x * x;
    let half = 0.5 * x;
    let ln = half.ln() + EULER_GAMMA;

    // sums over t_k = (-q)^k / (k!)^2 and u_k = (-q)^k / (k! (k+1)!)
    let mut t = 1.0;
    let mut u = 1.0;
    let mut j0 = 1.0;
    let mut j1 = 1.0;
    let mut harmonic = 0.0;
    let mut y0_sum = 0.0;
    // psi(k+1) + psi(k+2) + 2 gamma = H_k + H_{k+1}
    let mut y1_sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        t *= -q / (kf * kf);
        u *= -q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        j0 += t;
        j1 += u;
        y0_sum += -t * harmonic;
        y1_sum += u * (2.0 * harmonic + 1.0 / (kf + 1.0));
        if t.abs() < 1e-18 * j0.abs().max(1e-300) && u.abs() < 1e-18 && k > 4 {
            break;
        }
    }
    let j1 = half * j1;
    let y0 = (2.0 / PI) * (ln * j0 + y0_sum);
    // Y1 = -2/(pi x) + (2/pi) ln(x/2) J1 - (1/pi)(x/2) sum (psi(k+1)+psi(k+2)) u_k
    let y1 = -2.0 / (PI * x) + (2.0 / PI) * (half.ln()) * j1
        - (half / PI) * (y1_sum - 2.0 * EULER_GAMMA * (j1 / half));
    (j0, j1, y0, y1)
}

/// Hankel expansion for order `nu` in {0, 1}; returns (P, Q).
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        // a_k / x^k with alternating signs within P (even k) and Q (odd k)
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn jy_asymptotic(x: f64) -> (f64, f64, f64, f64) {
    let amp = (2.0 / (PI * x)).sqrt();
    let (p0, q0) = hankel_pq(0.0, x);
    let (p1, q1) = hankel_pq(1.0, x);
    let chi0 = x - FRAC_PI_4;
    let chi1 = x - 3.0 * FRAC_PI_4;
    let (s0, c0) = chi0.sin_cos();
    let (s1, c1) = chi1.sin_cos();
    (
        amp * (p0 * c0 - q0 * s0),
        amp * (p1 * c1 - q1 * s1),
        amp * (p0 * s0 + q0 * c0),
        amp * (p1 * s1 + q1 * c1),
    )
}

/// `(J_0, J_1, Y_0, Y_1)` at `x > 0`.
pub fn jy01(x: f64) -> Result<(f64, f64, f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::OutOfDomain(format!("Bessel J/Y need x > 0, got {x}")));
    }
    Ok(if x < JY_SERIES_LIMIT { jy_series(x) } else { jy_asymptotic(x) })
}

pub fn j0(x: f64) -> Result<f64> {
    jy01(x).map(|r| r.0)
}

pub fn j1(x: f64) -> Result<f64> {
    jy01(x).map(|r| r.1)
}

pub fn y0(x: f64) -> Result<f64> {
    jy01(x).map(|r| r.2)
}

pub fn y1(x: f64) -> Result<f64> {
    jy01(x).map(|r| r.3)
}

fn k_series(z: Complex64) -> (Complex64, Complex64) {
    let q = z * z * 0.25;
    let half = z * 0.5;
    let ln = half.ln();
    let mut t = Complex64::new(1.0, 0.0);
    let mut u = Complex64::new(1.0, 0.0);
    let mut i0 = t;
    let mut i1 = u;
    let mut harmonic = 0.0;
    let mut k0_sum = Complex64::new(0.0, 0.0);
    let mut k1_sum = Complex64::new(1.0 - 2.0 * EULER_GAMMA, 0.0);
    for k in 1..200 {
        let kf = k as f64;
        t *= q / (kf * kf);
        u *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += t;
        i1 += u;
        k0_sum += t * harmonic;
        k1_sum += u * (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if t.norm() < 1e-18 * i0.norm() && k > 4 {
            break;
        }
    }
    let i1 = half * i1;
    let k0 = -(ln + EULER_GAMMA) * i0 + k0_sum;
    let k1 = z.inv() + ln * i1 - half * 0.5 * k1_sum;
    (k0, k1)
}

/// Steed's continued fraction with Temme's normalization.
fn k_continued_fraction(z: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let mut b = (one + z) * 2.0;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = Complex64::new(a1, 0.0);
    let mut cc = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 1..100_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        cc = -cc * a / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += cc * qnew;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - one) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            let h = h * a1;
            let k0 = (Complex64::new(PI, 0.0) / (z * 2.0)).sqrt() * (-z).exp() / s;
            let k1 = k0 * (z + 0.5 - h) / z;
            return Ok((k0, k1));
        }
    }
    Err(Error::QuadratureFailure("continued fraction for K did not converge".into()))
}

/// `(K_0(z), K_1(z))` for `Re z > 0`.
pub fn k01(z: Complex64) -> Result<(Complex64, Complex64)> {
    if !(z.re > 0.0) || !z.is_finite() {
        return Err(Error::OutOfDomain(format!("Bessel K needs Re z > 0, got {z}")));
    }
    if z.norm() <= K_SERIES_LIMIT {
        Ok(k_series(z))
    } else {
        k_continued_fraction(z)
    }
}

/// `K_2(z) = K_0(z) + 2 K_1(z) / z`.
pub fn k2(z: Complex64) -> Result<Complex64> {
    let (k0, k1) = k01(z)?;
    Ok(k0 + k1 * 2.0 / z)
}
