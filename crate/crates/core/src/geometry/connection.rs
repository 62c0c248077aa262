use std::f64::consts::{FRAC_PI_2, PI};

use super::{closed_chain, directional_sign_with_spectrum, not_connectable, PairData};
use crate::clifford::{
    adapted_frame, nearest_identification, is_generically_separated, synchronize, CliffordSubspace,
    SignOperator,
};
use crate::error::{ConnectReason, Error, Result};
use crate::spin::{c, expm, max_abs, spin_adjoint, trace_inner, SpinOperator, C64};
use crate::tolerance::Tolerances;

const HOME_TOL: f64 = 1e-8;

/// Spin connection `D_{x,y}` together with the data it was built from.
#[derive(Debug, Clone)]
pub struct SpinConnection {
    /// `D_{x,y}`, mapping the spin space at `y` to the one at `x`.
    pub d: SpinOperator,
    /// Time-direction angle; positive iff `y` lies in the future of `x`.
    pub phi: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub p_xy: SpinOperator,
    pub a_xy: SpinOperator,
    pub v_xy: SignOperator,
    pub v_yx: SignOperator,
    pub s_x: SignOperator,
    pub s_y: SignOperator,
    /// Clifford subspace at `x` containing `v_xy`.
    pub k_xy: CliffordSubspace,
    pub k_yx: CliffordSubspace,
    /// Clifford subspace at `x` containing `s_x`, synchronized with `k_xy`.
    pub k_x_of_y: CliffordSubspace,
    pub k_y_of_x: CliffordSubspace,
    /// Synchronization map at `x`, sending `k_x_of_y` onto `k_xy`.
    pub u_xy: SpinOperator,
    pub u_yx: SpinOperator,
}

impl SpinConnection {
    /// `y` lies in the future of `x`.
    pub fn is_future(&self) -> bool {
        self.phi > 0.0
    }
}

fn sync_error(e: Error) -> Error {
    match e {
        Error::NotGenericallySeparated => not_connectable(ConnectReason::NotGenericallySeparated),
        other => other,
    }
}

/// Phase `phi` of the spin connection from the relative block phase
/// `theta_plus - theta_minus`, or `None` when that phase is within `margin`
/// of a multiple of `pi/2`.
pub fn time_direction_angle(delta: f64, margin: f64) -> Option<f64> {
    let d0 = delta.rem_euclid(PI);
    if d0 < margin || (d0 - FRAC_PI_2).abs() < margin || PI - d0 < margin {
        return None;
    }
    let diff = if d0 < FRAC_PI_2 { d0 + PI } else { d0 - 2.0 * PI };
    Some(-diff / 2.0)
}

/// Builds the spin connection of a spin-connectable pair.
pub fn spin_connection(pair: &PairData, tol: &Tolerances) -> Result<SpinConnection> {
    let p_xy = pair.p_xy;
    let p_yx = pair.p_yx();
    let a_xy = closed_chain(&p_xy);
    let a_yx = p_yx * p_xy;
    let timelike_err = |_| not_connectable(ConnectReason::NotProperlyTimelike);
    let (v_xy, sys_xy) = directional_sign_with_spectrum(&a_xy, tol).map_err(timelike_err)?;
    let (v_yx, _) = directional_sign_with_spectrum(&a_yx, tol).map_err(timelike_err)?;

    if !is_generically_separated(&v_xy, &pair.s_x, tol)
        || !is_generically_separated(&v_yx, &pair.s_y, tol)
    {
        return Err(not_connectable(ConnectReason::NotGenericallySeparated));
    }
    let sync_x = synchronize(&pair.s_x, &v_xy, tol).map_err(sync_error)?;
    let sync_y = synchronize(&pair.s_y, &v_yx, tol).map_err(sync_error)?;
    let k_xy = sync_x.k_w.clone();
    let k_yx = sync_y.k_w.clone();

    let fx = adapted_frame(&v_xy, &k_xy, tol)?;
    let fy = adapted_frame(&v_yx, &k_yx, tol)?;
    let pf = fx.inverse * p_xy * fy.basis;
    let det_plus = pf[(0, 0)] * pf[(1, 1)] - pf[(0, 1)] * pf[(1, 0)];
    let det_minus = pf[(2, 2)] * pf[(3, 3)] - pf[(2, 3)] * pf[(3, 2)];
    let theta_plus = det_plus.arg() / 2.0;
    let theta_minus = det_minus.arg() / 2.0;

    let phi = time_direction_angle(theta_plus - theta_minus, tol.real_threshold.max(1e-12))
        .ok_or_else(|| not_connectable(ConnectReason::NotTimeDirected))?;

    let inv_sqrt = sys_xy.apply(|l| C64::from(1.0 / l.re.sqrt()))?;
    let d = expm(&(v_xy.matrix() * c(0.0, phi))) * inv_sqrt * p_xy;

    Ok(SpinConnection {
        d,
        phi,
        theta_plus,
        theta_minus,
        p_xy,
        a_xy,
        v_xy,
        v_yx,
        s_x: pair.s_x,
        s_y: pair.s_y,
        k_xy,
        k_yx,
        k_x_of_y: sync_x.k_v,
        k_y_of_x: sync_y.k_v,
        u_xy: sync_x.u,
        u_yx: sync_y.u,
    })
}

/// Element of a Clifford subspace representing a tangent space.
#[derive(Debug, Clone)]
pub struct TangentVector {
    pub op: SpinOperator,
    pub home: CliffordSubspace,
}

impl TangentVector {
    pub fn new(op: SpinOperator, home: CliffordSubspace) -> Result<Self> {
        if !home.contains(&op, HOME_TOL) {
            return Err(Error::HomeMismatch);
        }
        Ok(Self { op, home })
    }

    /// Lorentzian inner product `Tr(u v) / 4`.
    pub fn dot(&self, other: &TangentVector) -> f64 {
        trace_inner(&self.op, &other.op).re
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// Coefficients with respect to the generators of the home.
    pub fn coefficients(&self) -> [f64; 5] {
        self.home.coefficients(&self.op).map(|z| z.re)
    }

    /// Re-expresses the vector in another representative via `exp(i beta s)`.
    pub fn identify(&self, s: &SignOperator, target: &CliffordSubspace, tol: &Tolerances) -> Result<Self> {
        let id = nearest_identification(s, &self.home, target, tol)?;
        let op = id.u * self.op * spin_adjoint(&id.u);
        Ok(Self { op, home: target.clone() })
    }
}

fn same_home(a: &CliffordSubspace, b: &CliffordSubspace) -> bool {
    a.distance(b) <= HOME_TOL && b.distance(a) <= HOME_TOL
}

/// Parallel transport of a tangent vector from `y` to `x`.
///
/// The input must live in the representative at `y` synchronized with
/// `v_yx`; the output lives in the one at `x` synchronized with `v_xy`.
pub fn metric_connection(conn: &SpinConnection, u_y: &TangentVector) -> Result<TangentVector> {
    if !same_home(&u_y.home, &conn.k_y_of_x) {
        return Err(Error::HomeMismatch);
    }
    let lifted = conn.u_yx * u_y.op * spin_adjoint(&conn.u_yx);
    let moved = conn.d * lifted * spin_adjoint(&conn.d);
    let op = spin_adjoint(&conn.u_xy) * moved * conn.u_xy;
    Ok(TangentVector { op, home: conn.k_x_of_y.clone() })
}

/// Tangent vector pointing from `x` towards `y`.
#[derive(Debug, Clone)]
pub struct TangentData {
    /// `y_x`, in the representative at `x` synchronized with `v_xy`.
    pub vector: TangentVector,
    /// Unit direction `U_xy^{-1} v_xy U_xy`.
    pub direction: TangentVector,
    /// `(1/4) sin(phi) Tr(A^{1/2})`.
    pub length: f64,
}

pub fn tangent_vector(conn: &SpinConnection, tol: &Tolerances) -> Result<TangentData> {
    let sqrt_a = crate::spin::principal_sqrt(&conn.a_xy, tol)?;
    let l = conn.d * spin_adjoint(&conn.p_xy) * c(0.0, -1.0);
    let m = (l + spin_adjoint(&l)) * c(0.5, 0.0);
    let uinv = spin_adjoint(&conn.u_xy);
    let op = uinv * conn.k_xy.project(&m) * conn.u_xy;
    let dir = uinv * conn.v_xy.matrix() * conn.u_xy;
    let length = 0.25 * conn.phi.sin() * sqrt_a.trace().re;
    Ok(TangentData {
        vector: TangentVector { op, home: conn.k_x_of_y.clone() },
        direction: TangentVector { op: dir, home: conn.k_x_of_y.clone() },
        length,
    })
}

/// Splice map `U_x^{(z|y)}`, sending `K_xy` onto `K_xz`.
///
/// `from` is the connection `(x, y)` and `to` the connection `(x, z)`;
/// both must share the base point `x`.
pub fn splice_map(from: &SpinConnection, to: &SpinConnection, tol: &Tolerances) -> Result<SpinOperator> {
    if max_abs(&(from.s_x.matrix() - to.s_x.matrix())) > HOME_TOL {
        return Err(Error::HomeMismatch);
    }
    let id = nearest_identification(&from.s_x, &from.k_x_of_y, &to.k_x_of_y, tol)?;
    Ok(to.u_xy * id.u * spin_adjoint(&from.u_xy))
}

/// `D_(x,y) = U_x^{|y)} D_xy U_y^{(x|}` with distinguished representatives
/// `frame_x` at `x` and `frame_y` at `y`.
pub fn spliced_connection(
    conn: &SpinConnection,
    frame_x: &CliffordSubspace,
    frame_y: &CliffordSubspace,
    tol: &Tolerances,
) -> Result<SpinOperator> {
    let to_frame_x = nearest_identification(&conn.s_x, &conn.k_x_of_y, frame_x, tol)?;
    let from_frame_y = nearest_identification(&conn.s_y, frame_y, &conn.k_y_of_x, tol)?;
    let left = to_frame_x.u * spin_adjoint(&conn.u_xy);
    let right = conn.u_yx * from_frame_y.u;
    Ok(left * conn.d * right)
}

/// Orthogonal complement of a spacelike vector in its home, with the
/// pseudoscalar `-i u / sqrt(-<u,u>)`.
#[derive(Debug, Clone)]
pub struct ReducedTangent {
    /// Orthonormal basis of the complement, signature (1,3).
    pub frame: Vec<SpinOperator>,
    pub pseudoscalar: SpinOperator,
}

pub fn reduce_tangent(u: &TangentVector) -> Result<ReducedTangent> {
    let n = u.square();
    if n >= 0.0 {
        return Err(Error::NotSpacelike);
    }
    let mut frame: Vec<SpinOperator> = Vec::with_capacity(4);
    for g in u.home.generators() {
        let mut w = g - u.op * (trace_inner(&u.op, g) / n);
        for f in &frame {
            w -= f * (trace_inner(f, &w) / trace_inner(f, f));
        }
        let nw = trace_inner(&w, &w).re;
        if nw.abs() > 1e-6 {
            frame.push(w / C64::from(nw.abs().sqrt()));
        }
        if frame.len() == 4 {
            break;
        }
    }
    if frame.len() != 4 {
        return Err(Error::DegenerateGram);
    }
    let pseudoscalar = u.op * c(0.0, -1.0 / (-n).sqrt());
    Ok(ReducedTangent { frame, pseudoscalar })
}
