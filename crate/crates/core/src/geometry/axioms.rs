use nalgebra::DMatrix;
use serde::Serialize;

use super::connection::{metric_connection, splice_map, spin_connection, tangent_vector, SpinConnection, TangentVector};
use super::PairSource;
use crate::clifford::{nearest_identification, CliffordSubspace};
use crate::error::{Error, Result};
use crate::spin::{max_abs, spin_adjoint, SpinOperator, C64};
use crate::tolerance::Tolerances;

/// Outcome of the causal-set checks on a finite point set.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CausalAxiomReport {
    pub points: usize,
    pub connectable_pairs: usize,
    /// Points reported spin-connectable to themselves.
    pub irreflexivity_violations: Vec<usize>,
    /// Pairwise spin-connectable triples with `x < y < z` but not `x < z`.
    pub transitivity_violations: Vec<[usize; 3]>,
    /// Per point: is the point together with its spin-connectable partners future-transitive.
    pub future_transitive: Vec<bool>,
    /// Largest total weight of a causal interval `{y : x < y < z}`.
    pub max_interval_weight: f64,
}

fn connection_table(src: &dyn PairSource, tol: &Tolerances) -> Vec<Vec<Option<SpinConnection>>> {
    let n = src.len();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    if x == y {
                        return None;
                    }
                    src.pair(x, y).ok().and_then(|p| spin_connection(&p, tol).ok())
                })
                .collect()
        })
        .collect()
}

/// Checks irreflexivity, transitivity and local finiteness of "lies in the future of".
///
/// `weights` defaults to unit weight per point.
pub fn check_causal_axioms(src: &dyn PairSource, weights: Option<&[f64]>, tol: &Tolerances) -> CausalAxiomReport {
    let n = src.len();
    let mut report = CausalAxiomReport { points: n, ..Default::default() };
    for x in 0..n {
        let self_connected = src.pair(x, x).ok().map(|p| spin_connection(&p, tol).is_ok()).unwrap_or(false);
        if self_connected {
            report.irreflexivity_violations.push(x);
        }
    }
    let table = connection_table(src, tol);
    let conn = |a: usize, b: usize| table[a][b].is_some();
    let future = |a: usize, b: usize| table[a][b].as_ref().map(|c| c.is_future()).unwrap_or(false);
    report.connectable_pairs = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| conn(a, b)).count();

    let mut bad_point = vec![false; n];
    for x in 0..n {
        for y in 0..n {
            if !future(x, y) {
                continue;
            }
            for z in 0..n {
                if z == x || !future(y, z) || !conn(x, z) {
                    continue;
                }
                if !future(x, z) {
                    report.transitivity_violations.push([x, y, z]);
                    for p in [x, y, z] {
                        bad_point[p] = true;
                    }
                }
            }
        }
    }
    report.future_transitive = (0..n)
        .map(|x| {
            let hood: Vec<usize> = std::iter::once(x).chain((0..n).filter(|&y| conn(x, y))).collect();
            !report
                .transitivity_violations
                .iter()
                .any(|t| t.iter().all(|p| hood.contains(p)))
        })
        .collect();

    let w = |i: usize| weights.map(|w| w[i]).unwrap_or(1.0);
    for x in 0..n {
        for z in 0..n {
            if !future(x, z) {
                continue;
            }
            let total: f64 = (0..n).filter(|&y| future(x, y) && future(y, z)).map(w).sum();
            report.max_interval_weight = report.max_interval_weight.max(total);
        }
    }
    report
}

/// Symmetry properties of the sampled representatives.
#[derive(Debug, Clone, Default)]
pub struct SymmetryReport {
    pub parity_preserving: bool,
    pub clifford_parallel: bool,
    pub chirally_symmetric: bool,
    /// Largest distance of a splice map from the identity.
    pub max_splice_deviation: f64,
    /// Least-squares residual of the chirality system.
    pub chiral_residual: f64,
    /// Spacelike parallel field orthogonal to all directions, one entry per point.
    pub witness: Option<Vec<Option<TangentVector>>>,
}

pub fn check_symmetries(src: &dyn PairSource, tol: &Tolerances) -> SymmetryReport {
    let n = src.len();
    let table = connection_table(src, tol);
    let mut report = SymmetryReport { parity_preserving: true, clifford_parallel: true, ..Default::default() };

    for x in 0..n {
        let partners: Vec<&SpinConnection> = table[x].iter().flatten().collect();
        // Parity holds when the identification angles compose up to a multiple of pi.
        let beta: Vec<Vec<Option<f64>>> = partners
            .iter()
            .map(|a| {
                partners
                    .iter()
                    .map(|b| nearest_identification(&a.s_x, &a.k_x_of_y, &b.k_x_of_y, tol).ok().map(|id| id.beta))
                    .collect()
            })
            .collect();
        for (i, row) in beta.iter().enumerate() {
            for (j, bij) in row.iter().enumerate() {
                for k in 0..partners.len() {
                    let consistent = match (bij, beta[j][k], beta[i][k]) {
                        (Some(ij), Some(jk), Some(ik)) => {
                            let r = (ij + jk - ik).rem_euclid(std::f64::consts::PI);
                            r.min(std::f64::consts::PI - r) < 1e-6
                        }
                        _ => false,
                    };
                    if !consistent {
                        report.parity_preserving = false;
                    }
                }
            }
        }
        for a in &partners {
            for b in &partners {
                match splice_map(a, b, tol) {
                    Ok(u) => {
                        let dev = max_abs(&(u - SpinOperator::identity()));
                        report.max_splice_deviation = report.max_splice_deviation.max(dev);
                    }
                    Err(_) => report.max_splice_deviation = f64::INFINITY,
                }
            }
        }
    }
    report.clifford_parallel = report.max_splice_deviation <= 1e-8;

    match chiral_witness(n, &table, tol) {
        Ok((residual, witness)) => {
            report.chiral_residual = residual;
            report.chirally_symmetric = witness.is_some();
            report.witness = witness;
        }
        Err(_) => {
            report.chiral_residual = f64::INFINITY;
        }
    }
    report
}

/// Coefficient matrix of the identification `from -> to` acting on generator coefficients.
fn identification_matrix(
    conn: &SpinConnection,
    from: &CliffordSubspace,
    to: &CliffordSubspace,
    tol: &Tolerances,
) -> Result<DMatrix<f64>> {
    let id = nearest_identification(&conn.s_x, from, to, tol)?;
    let uinv = spin_adjoint(&id.u);
    let mut m = DMatrix::zeros(5, 5);
    for (j, g) in from.generators().iter().enumerate() {
        let co = to.coefficients(&(id.u * g * uinv));
        for i in 0..5 {
            m[(i, j)] = co[i].re;
        }
    }
    Ok(m)
}

type Witness = Option<Vec<Option<TangentVector>>>;

fn chiral_witness(n: usize, table: &[Vec<Option<SpinConnection>>], tol: &Tolerances) -> Result<(f64, Witness)> {
    let homes: Vec<Option<CliffordSubspace>> = (0..n)
        .map(|x| table[x].iter().flatten().next().map(|c| c.k_x_of_y.clone()))
        .collect();
    let offset: Vec<usize> = (0..n).map(|x| 5 * x).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();

    for x in 0..n {
        let Some(home_x) = &homes[x] else { continue };
        for conn in table[x].iter().flatten() {
            let to_xy = identification_matrix(conn, home_x, &conn.k_x_of_y, tol)?;
            let dir = tangent_vector(conn, tol)?.direction;
            let g = conn.k_x_of_y.gram();
            let dco = conn.k_x_of_y.coefficients(&dir.op).map(|z| z.re);
            // <u, yhat> as a linear form on the coefficients of u(x).
            let form: Vec<f64> = (0..5).map(|i| (0..5).map(|k| g[(i, k)] * dco[k]).sum()).collect();
            let row: Vec<(usize, f64)> = (0..5)
                .map(|j| (offset[x] + j, (0..5).map(|i| form[i] * to_xy[(i, j)]).sum()))
                .collect();
            rows.push(row);
        }
    }

    for x in 0..n {
        let Some(home_x) = &homes[x] else { continue };
        for (y, entry) in table[x].iter().enumerate() {
            let Some(conn) = entry else { continue };
            let Some(home_y) = &homes[y] else { continue };
            let to_xy = identification_matrix(conn, home_x, &conn.k_x_of_y, tol)?;
            let reverse = table[y][x].as_ref().ok_or(Error::NoSolution)?;
            let to_yx = identification_matrix(reverse, home_y, &conn.k_y_of_x, tol)?;
            let mut transport = DMatrix::zeros(5, 5);
            for (j, g) in conn.k_y_of_x.generators().iter().enumerate() {
                let t = metric_connection(conn, &TangentVector { op: *g, home: conn.k_y_of_x.clone() })?;
                let co = conn.k_x_of_y.coefficients(&t.op);
                for i in 0..5 {
                    transport[(i, j)] = co[i].re;
                }
            }
            let moved = transport * to_yx;
            for i in 0..5 {
                let mut row = Vec::with_capacity(10);
                for j in 0..5 {
                    row.push((offset[x] + j, to_xy[(i, j)]));
                    row.push((offset[y] + j, -moved[(i, j)]));
                }
                rows.push(row);
            }
        }
    }

    let active: Vec<usize> = (0..n).filter(|&x| homes[x].is_some()).collect();
    if active.is_empty() {
        return Ok((0.0, Some(vec![None; n])));
    }
    let cols = 5 * n;
    let mut a = DMatrix::<f64>::zeros(rows.len().max(1), cols);
    for (r, row) in rows.iter().enumerate() {
        for &(cidx, val) in row {
            a[(r, cidx)] += val;
        }
    }
    // Unconstrained points get a zero column block; restrict to active ones.
    let keep: Vec<usize> = active.iter().flat_map(|&x| (0..5).map(move |j| 5 * x + j)).collect();
    let a = a.select_columns(&keep);
    let ata = a.transpose() * &a;
    let eig = ata.symmetric_eigen();
    let min_ev = eig.eigenvalues.min().max(0.0);
    let residual = min_ev.sqrt();

    let null: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i].max(0.0).sqrt() < 1e-6)
        .collect();
    if null.is_empty() {
        return Ok((residual, None));
    }
    let basis = DMatrix::from_fn(keep.len(), null.len(), |r, k| eig.eigenvectors[(r, null[k])]);
    let mut q = DMatrix::zeros(keep.len(), keep.len());
    for (b, &x) in active.iter().enumerate() {
        let g = homes[x].as_ref().expect("active point has a home").gram();
        for i in 0..5 {
            for j in 0..5 {
                q[(5 * b + i, 5 * b + j)] = g[(i, j)];
            }
        }
    }
    let reduced = basis.transpose() * q * &basis;
    let reig = reduced.symmetric_eigen();
    let (kmin, lmin) = reig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
    if lmin >= -1e-9 {
        return Ok((residual, None));
    }
    let coeffs = &basis * reig.eigenvectors.column(kmin);
    let mut witness = vec![None; n];
    for (b, &x) in active.iter().enumerate() {
        let home = homes[x].clone().expect("active point has a home");
        let op = (0..5).fold(SpinOperator::zeros(), |acc, j| acc + home.generators()[j] * C64::from(coeffs[5 * b + j]));
        let tv = TangentVector { op, home };
        if tv.square() >= 0.0 {
            return Ok((residual, None));
        }
        let scale = (-tv.square()).sqrt();
        witness[x] = Some(TangentVector { op: tv.op / C64::from(scale), home: tv.home });
    }
    Ok((residual, Some(witness)))
}
