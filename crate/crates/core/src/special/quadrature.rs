//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Segment { a, b, value: kron * half, error: ((kron - gauss) * half).norm() }
}

/// Integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b);
    let mut total = first.value;
    let mut err = first.error;
    heap.push(first);
    let mut intervals = 1;
    while err > opts.abs_tol.max(opts.rel_tol * total.norm()) {
        if intervals >= opts.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "error estimate {err:e} after {intervals} intervals"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        intervals += 1;
        if intervals % 64 == 0 {
            // refresh the running sums against accumulated cancellation
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(QuadResult { value: total, error: err, intervals })
}

/// Integral of `f` over `[a, inf)` via `x = a + scale t / (1 - t)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    scale: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    let g = move |t: f64| {
        if t >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let one_minus = 1.0 - t;
        let x = a + scale * t / one_minus;
        let v = f(x);
        if v.norm() == 0.0 {
            v
        } else {
            v * (scale / (one_minus * one_minus))
        }
    };
    integrate(g, 0.0, 1.0, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| Complex64::new(x * x * x - 2.0 * x, x), 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_to_infinity(|x| Complex64::new((-x).exp() * x * x, 0.0), 0.0, 1.0, QuadOptions::default())
            .unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        let r = integrate(|x| Complex64::new((50.0 * x).cos(), 0.0), 0.0, 3.0, QuadOptions::default()).unwrap();
        assert!((r.value.re - (150.0f64).sin() / 50.0).abs() < 1e-13);
    }
}
