//! Dirac matrices in the Dirac representation.

use crate::spin::{c, SpinOperator, C64, I, ONE, ZERO};

/// Pauli matrices, indices 1..=3 stored at 0..=2.
pub fn pauli(k: usize) -> [[C64; 2]; 2] {
    match k {
        0 => [[ZERO, ONE], [ONE, ZERO]],
        1 => [[ZERO, -I], [I, ZERO]],
        2 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("Pauli index out of range"),
    }
}

fn blocks(a: [[C64; 2]; 2], b: [[C64; 2]; 2], cc: [[C64; 2]; 2], d: [[C64; 2]; 2]) -> SpinOperator {
    SpinOperator::from_fn(|i, j| {
        let m = match (i < 2, j < 2) {
            (true, true) => a,
            (true, false) => b,
            (false, true) => cc,
            (false, false) => d,
        };
        m[i % 2][j % 2]
    })
}

const ID2: [[C64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];
const Z2: [[C64; 2]; 2] = [[ZERO, ZERO], [ZERO, ZERO]];

fn scale2(m: [[C64; 2]; 2], s: C64) -> [[C64; 2]; 2] {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

/// `gamma(mu)` for `mu` in 0..=3, upper index.
pub fn gamma(mu: usize) -> SpinOperator {
    if mu == 0 {
        blocks(ID2, Z2, Z2, scale2(ID2, -ONE))
    } else {
        let s = pauli(mu - 1);
        blocks(Z2, s, scale2(s, -ONE), Z2)
    }
}

/// `i gamma^0 gamma^1 gamma^2 gamma^3`.
pub fn gamma5() -> SpinOperator {
    gamma(0) * gamma(1) * gamma(2) * gamma(3) * I
}

/// The standard Clifford generators `gamma^0, gamma^1, gamma^2, gamma^3, i gamma^5`.
pub fn standard_generators() -> [SpinOperator; 5] {
    [gamma(0), gamma(1), gamma(2), gamma(3), gamma5() * I]
}

/// `xi_j gamma^j` for a contravariant four-vector, metric (+,-,-,-).
pub fn slash(xi: &[f64; 4]) -> SpinOperator {
    gamma(0) * c(xi[0], 0.0) - gamma(1) * c(xi[1], 0.0) - gamma(2) * c(xi[2], 0.0)
        - gamma(3) * c(xi[3], 0.0)
}

pub fn minkowski_square(xi: &[f64; 4]) -> f64 {
    xi[0] * xi[0] - xi[1] * xi[1] - xi[2] * xi[2] - xi[3] * xi[3]
}
