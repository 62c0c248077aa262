use nalgebra::Matrix5;

use super::connection::{metric_connection, splice_map, spin_connection, SpinConnection, TangentVector};
use super::PairSource;
use crate::clifford::CliffordSubspace;
use crate::error::Result;
use crate::spin::{max_abs, spin_adjoint, SpinOperator};
use crate::tolerance::Tolerances;

/// Holonomies around the triangle `x -> z -> y -> x` (read right to left).
#[derive(Debug, Clone)]
pub struct Curvatures {
    /// Representative `K_x^{(z)}` on which the metric holonomy acts.
    pub home: CliffordSubspace,
    /// Column `j` holds the coefficients of the image of generator `j`.
    pub metric: Matrix5<f64>,
    /// `D_xy D_yz D_zx`.
    pub unspliced: SpinOperator,
    /// Spin holonomy with splice maps inserted at every corner.
    pub spliced: SpinOperator,
    /// Largest deviation between the metric holonomy and conjugation by the spliced one.
    pub compatibility_residual: f64,
}

impl Curvatures {
    pub fn apply_metric(&self, u: &TangentVector) -> TangentVector {
        let co = self.home.coefficients(&u.op);
        let g = self.home.generators();
        let mut op = SpinOperator::zeros();
        for j in 0..5 {
            for i in 0..5 {
                op += g[i] * (co[j] * self.metric[(i, j)]);
            }
        }
        TangentVector { op, home: self.home.clone() }
    }
}

/// Metric, unspliced and spliced holonomies of the triple `(x, y, z)`.
pub fn curvatures(src: &dyn PairSource, x: usize, y: usize, z: usize, tol: &Tolerances) -> Result<Curvatures> {
    let conn = |a: usize, b: usize| -> Result<SpinConnection> { spin_connection(&src.pair(a, b)?, tol) };
    let c_xy = conn(x, y)?;
    let c_yz = conn(y, z)?;
    let c_zx = conn(z, x)?;
    let c_xz = conn(x, z)?;
    let c_yx = conn(y, x)?;
    let c_zy = conn(z, y)?;

    let home = c_zx.k_y_of_x.clone();
    let transport = |u: &TangentVector| -> Result<TangentVector> {
        let t = metric_connection(&c_zx, u)?;
        let t = t.identify(&c_zx.s_x, &c_yz.k_y_of_x, tol)?;
        let t = metric_connection(&c_yz, &t)?;
        let t = t.identify(&c_yz.s_x, &c_xy.k_y_of_x, tol)?;
        let t = metric_connection(&c_xy, &t)?;
        t.identify(&c_xy.s_x, &home, tol)
    };

    let mut metric = Matrix5::zeros();
    let mut images = Vec::with_capacity(5);
    for (j, g) in home.generators().iter().enumerate() {
        let img = transport(&TangentVector { op: *g, home: home.clone() })?;
        let co = home.coefficients(&img.op);
        for i in 0..5 {
            metric[(i, j)] = co[i].re;
        }
        images.push(img.op);
    }

    let unspliced = c_xy.d * c_yz.d * c_zx.d;
    let spliced = splice_map(&c_xy, &c_xz, tol)?
        * c_xy.d
        * splice_map(&c_yz, &c_yx, tol)?
        * c_yz.d
        * splice_map(&c_zx, &c_zy, tol)?
        * c_zx.d;

    let u_xz = c_xz.u_xy;
    let u_xz_inv = spin_adjoint(&u_xz);
    let spliced_inv = spin_adjoint(&spliced);
    let mut compatibility_residual: f64 = 0.0;
    for (g, img) in home.generators().iter().zip(&images) {
        let lhs = u_xz * img * u_xz_inv;
        let rhs = spliced * (u_xz * g * u_xz_inv) * spliced_inv;
        compatibility_residual = compatibility_residual.max(max_abs(&(lhs - rhs)));
    }

    Ok(Curvatures { home, metric, unspliced, spliced, compatibility_residual })
}
