//! Causal structure, spin connection, metric connection and curvature
//! built from the kernel of the fermionic projector.

mod axioms;
mod connection;
mod curvature;

pub use axioms::{check_causal_axioms, check_symmetries, CausalAxiomReport, SymmetryReport};
pub use connection::{
    metric_connection, reduce_tangent, splice_map, spin_connection, spliced_connection, tangent_vector,
    time_direction_angle,
    ReducedTangent, SpinConnection, TangentData, TangentVector,
};
pub use curvature::{curvatures, Curvatures};

use crate::clifford::SignOperator;
use crate::error::{ConnectReason, Error, Result};
use crate::spin::{spectrum, spin_adjoint, Definiteness, EigenSystem, SpinOperator, C64};
use crate::tolerance::Tolerances;

/// Kernel `P(x, y)` between two points, expressed in pseudo-orthonormal
/// bases of the two spin spaces, together with the Euclidean sign operators.
#[derive(Debug, Clone)]
pub struct PairData {
    pub p_xy: SpinOperator,
    pub s_x: SignOperator,
    pub s_y: SignOperator,
}

impl PairData {
    /// `P(y, x)`, the spin adjoint of `P(x, y)`.
    pub fn p_yx(&self) -> SpinOperator {
        spin_adjoint(&self.p_xy)
    }

    /// The same pair with the roles of `x` and `y` exchanged.
    pub fn reversed(&self) -> Self {
        Self { p_xy: self.p_yx(), s_x: self.s_y, s_y: self.s_x }
    }
}

/// A finite collection of points with pairwise kernels.
pub trait PairSource {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn pair(&self, x: usize, y: usize) -> Result<PairData>;
}

/// `A_xy = P(x, y) P(y, x)`.
pub fn closed_chain(p_xy: &SpinOperator) -> SpinOperator {
    p_xy * spin_adjoint(p_xy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalType {
    Timelike,
    Spacelike,
    Lightlike,
}

/// Classification by the spectrum of the closed chain.
pub fn classify_causal(a: &SpinOperator, tol: &Tolerances) -> CausalType {
    let scale = crate::spin::operator_norm(a).max(f64::MIN_POSITIVE);
    let ev = crate::spin::eigenvalues(a);
    let snap = tol.real_threshold * scale;
    if ev.iter().all(|l| l.im.abs() <= snap) {
        return CausalType::Timelike;
    }
    let nonreal = ev.iter().all(|l| l.im.abs() > snap);
    let m0 = ev[0].norm();
    let equal = ev.iter().all(|l| (l.norm() - m0).abs() <= snap);
    if nonreal && equal {
        CausalType::Spacelike
    } else {
        CausalType::Lightlike
    }
}

/// Properties of the closed chain relevant for proper timelike separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TimelikeDiagnostics {
    pub properly_timelike: bool,
    pub real_spectrum: bool,
    pub positive_spectrum: bool,
    pub diagonalizable: bool,
    /// An eigenspace is indefinite, so no splitting into definite parts is singled out.
    pub degenerate_spectrum: bool,
}

pub fn timelike_diagnostics(a: &SpinOperator, tol: &Tolerances) -> TimelikeDiagnostics {
    let mut d = TimelikeDiagnostics::default();
    let sys = match spectrum(a, tol) {
        Ok(s) => s,
        Err(_) => return d,
    };
    d.diagonalizable = true;
    d.real_spectrum = sys.all_real();
    d.positive_spectrum =
        d.real_spectrum && sys.spaces.iter().all(|s| s.value.re > tol.real_threshold * sys.scale);
    d.degenerate_spectrum = sys
        .spaces
        .iter()
        .any(|s| s.definiteness == Definiteness::Indefinite);
    let definite = sys
        .spaces
        .iter()
        .all(|s| matches!(s.definiteness, Definiteness::Positive | Definiteness::Negative));
    d.properly_timelike = d.positive_spectrum && definite;
    d
}

/// Real positive spectrum with definite eigenspaces.
pub fn properly_timelike(a: &SpinOperator, tol: &Tolerances) -> bool {
    timelike_diagnostics(a, tol).properly_timelike
}

/// Sign operator that is `+1` on the positive-definite and `-1` on the
/// negative-definite invariant subspace of a properly timelike closed chain.
pub fn directional_sign(a: &SpinOperator, tol: &Tolerances) -> Result<SignOperator> {
    directional_sign_with_spectrum(a, tol).map(|(v, _)| v)
}

pub(crate) fn directional_sign_with_spectrum(
    a: &SpinOperator,
    tol: &Tolerances,
) -> Result<(SignOperator, EigenSystem)> {
    let sys = spectrum(a, tol).map_err(|_| Error::NotProperlyTimelike)?;
    let positive = sys.all_real() && sys.spaces.iter().all(|s| s.value.re > tol.real_threshold * sys.scale);
    if !positive {
        return Err(Error::NotProperlyTimelike);
    }
    let mut pos_dim = 0;
    for s in &sys.spaces {
        match s.definiteness {
            Definiteness::Positive => pos_dim += s.multiplicity(),
            Definiteness::Negative => {}
            Definiteness::Indefinite => return Err(Error::AmbiguousDirection),
            Definiteness::Degenerate => return Err(Error::NotProperlyTimelike),
        }
    }
    if pos_dim != 2 {
        return Err(Error::NotProperlyTimelike);
    }
    let v = sys.apply(|l| {
        let space = sys.spaces.iter().find(|s| s.value == l).expect("eigenvalue from system");
        if space.definiteness == Definiteness::Positive {
            C64::from(1.0)
        } else {
            C64::from(-1.0)
        }
    })?;
    let v = (v + spin_adjoint(&v)) * C64::from(0.5);
    Ok((SignOperator::new_unchecked(v), sys))
}

pub(crate) fn not_connectable(reason: ConnectReason) -> Error {
    Error::NotSpinConnectable(reason)
}
