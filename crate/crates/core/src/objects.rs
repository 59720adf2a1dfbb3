//! Validated quantum domain objects: states, effects, binary observables,
//! POVMs, Bloch-vector maps, the Bell basis, and the generalized Born rule.
//!
//! Validation tolerance on eigenvalue bounds is 1e-9, above the eigensolver
//! error and below anything physically meaningful.
//!
//! Conventions fixed here and used crate-wide:
//! - Pauli basis ordered (sigma_x, sigma_y, sigma_z), indexed 1..3.
//! - Bell phases: Phi+- = (|00> +- |11>)/sqrt(2), Psi+- = (|01> +- |10>)/sqrt(2).

use crate::linalg::{self, kron, CMat, CVec, OperatorMatrix, C64};
use crate::{Error, Result};

/// Eigenvalue-bound validation tolerance.
pub const TOL_VALID: f64 = 1e-9;

pub fn sigma_x() -> OperatorMatrix {
    let mut m = CMat::zeros(2, 2);
    m[(0, 1)] = C64::new(1.0, 0.0);
    m[(1, 0)] = C64::new(1.0, 0.0);
    OperatorMatrix::new(m).unwrap()
}

pub fn sigma_y() -> OperatorMatrix {
    let mut m = CMat::zeros(2, 2);
    m[(0, 1)] = C64::new(0.0, -1.0);
    m[(1, 0)] = C64::new(0.0, 1.0);
    OperatorMatrix::new(m).unwrap()
}

pub fn sigma_z() -> OperatorMatrix {
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = C64::new(1.0, 0.0);
    m[(1, 1)] = C64::new(-1.0, 0.0);
    OperatorMatrix::new(m).unwrap()
}

/// The Pauli triple in the fixed (x, y, z) order.
pub fn paulis() -> [OperatorMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// A density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    op: OperatorMatrix,
}

impl QuantumState {
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let dev = op.herm_deviation();
        if dev > linalg::TOL_HERM {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TOL_VALID || tr.im.abs() > TOL_VALID {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let eig = linalg::hermitian_eig(&op)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -TOL_VALID {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { op })
    }

    /// Pure state |v><v| from an unnormalized ket.
    pub fn pure(v: &CVec) -> Self {
        Self {
            op: OperatorMatrix::projector(v),
        }
    }

    pub fn op(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Declare a bipartite split on the underlying operator.
    pub fn split_as(self, d_a: usize, d_b: usize) -> Result<Self> {
        Ok(Self {
            op: self.op.split_as(d_a, d_b)?,
        })
    }
}

/// An effect: Hermitian operator with 0 <= X <= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    op: OperatorMatrix,
}

impl Effect {
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let dev = op.herm_deviation();
        if dev > linalg::TOL_HERM {
            return Err(Error::InvalidEffect(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let eig = linalg::hermitian_eig(&op)?;
        let max = eig.eigenvalues.first().copied().unwrap_or(0.0);
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -TOL_VALID {
            return Err(Error::InvalidEffect(format!("eigenvalue {min:.3e} < 0")));
        }
        if max > 1.0 + TOL_VALID {
            return Err(Error::InvalidEffect(format!("eigenvalue {max:.6} > 1")));
        }
        Ok(Self { op })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            op: OperatorMatrix::identity(dim),
        }
    }

    pub fn op(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    pub fn split_as(self, d_a: usize, d_b: usize) -> Result<Self> {
        Ok(Self {
            op: self.op.split_as(d_a, d_b)?,
        })
    }

    /// Complement effect 1 - X.
    pub fn complement(&self) -> Self {
        let id = OperatorMatrix::identity(self.dim());
        let mut op = id.sub(&self.op).unwrap();
        if let Some((da, db)) = self.op.split() {
            op = op.split_as(da, db).unwrap();
        }
        Self { op }
    }
}

/// A binary (+1 / -1) observable given by its two POVM elements.
///
/// The expectation operator is M = m_plus - m_minus = 2 m_plus - 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryObservable {
    m_plus: Effect,
    m_minus: Effect,
}

impl BinaryObservable {
    pub fn new(m_plus: Effect, m_minus: Effect) -> Result<Self> {
        if m_plus.dim() != m_minus.dim() {
            return Err(Error::DimMismatch {
                left: m_plus.dim(),
                right: m_minus.dim(),
            });
        }
        let sum = m_plus.op().add(m_minus.op())?;
        let dev = sum
            .sub(&OperatorMatrix::identity(m_plus.dim()))
            .unwrap()
            .max_entry_norm();
        if dev > TOL_VALID {
            return Err(Error::InvalidEffect(format!(
                "POVM elements do not sum to identity (deviation {dev:.3e})"
            )));
        }
        Ok(Self { m_plus, m_minus })
    }

    /// Build from the +1 element alone; the -1 element is its complement.
    pub fn from_effect(m_plus: Effect) -> Self {
        let m_minus = m_plus.complement();
        Self { m_plus, m_minus }
    }

    pub fn m_plus(&self) -> &Effect {
        &self.m_plus
    }

    pub fn m_minus(&self) -> &Effect {
        &self.m_minus
    }

    pub fn dim(&self) -> usize {
        self.m_plus.dim()
    }

    /// Expectation operator M = 2 m_plus - 1.
    pub fn expectation_operator(&self) -> OperatorMatrix {
        self.m_plus.op().sub(self.m_minus.op()).unwrap()
    }
}

/// Bloch vector (x, y, z); unit-ball norm when representing a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// rho = (1 + r . sigma) / 2.
pub fn bloch_to_state(r: &BlochVector) -> Result<QuantumState> {
    if r.norm() > 1.0 + TOL_VALID {
        return Err(Error::BlochNormExceeded(r.norm()));
    }
    let [sx, sy, sz] = paulis();
    let mat = (OperatorMatrix::identity(2)
        .add(&sx.scale_re(r.x))
        .unwrap()
        .add(&sy.scale_re(r.y))
        .unwrap()
        .add(&sz.scale_re(r.z))
        .unwrap())
    .scale_re(0.5);
    QuantumState::new(mat)
}

/// r_n = tr(rho sigma_n).
pub fn state_to_bloch(rho: &QuantumState) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit(rho.dim()));
    }
    let [sx, sy, sz] = paulis();
    let comp = |s: &OperatorMatrix| linalg::hs_inner(s, rho.op()).unwrap().re;
    Ok(BlochVector::new(comp(&sx), comp(&sy), comp(&sz)))
}

/// The four Bell states in the order (Phi+, Phi-, Psi+, Psi-).
pub fn bell_states() -> [QuantumState; 4] {
    bell_kets()
        .map(|v| QuantumState::new(OperatorMatrix::projector(&v).split_as(2, 2).unwrap()).unwrap())
}

/// Bell projectors as effects, same order as [`bell_states`].
pub fn bell_projectors() -> [Effect; 4] {
    bell_kets().map(|v| Effect::new(OperatorMatrix::projector(&v).split_as(2, 2).unwrap()).unwrap())
}

fn bell_kets() -> [CVec; 4] {
    let c = |r: f64| C64::new(r, 0.0);
    [
        CVec::from_vec(vec![c(1.0), c(0.0), c(0.0), c(1.0)]),
        CVec::from_vec(vec![c(1.0), c(0.0), c(0.0), c(-1.0)]),
        CVec::from_vec(vec![c(0.0), c(1.0), c(1.0), c(0.0)]),
        CVec::from_vec(vec![c(0.0), c(1.0), c(-1.0), c(0.0)]),
    ]
}

/// The completely mixed state 1/d.
pub fn maximally_mixed(d: usize) -> QuantumState {
    QuantumState::new(OperatorMatrix::identity(d).scale_re(1.0 / d as f64)).unwrap()
}

/// Generalized Born rule tr(rho E), clamped into [0, 1] after a sanity check.
pub fn born_probability(state: &QuantumState, effect: &Effect) -> Result<f64> {
    if state.dim() != effect.dim() {
        return Err(Error::DimMismatch {
            left: state.dim(),
            right: effect.dim(),
        });
    }
    let p = linalg::hs_inner(state.op(), effect.op())?.re;
    if !(-TOL_VALID..=1.0 + TOL_VALID).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// A positive operator valued measure: effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Effect>,
}

impl Povm {
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let dim = first.dim();
        let mut sum = OperatorMatrix::zeros(dim);
        for e in &effects {
            if e.dim() != dim {
                return Err(Error::DimMismatch {
                    left: e.dim(),
                    right: dim,
                });
            }
            sum = sum.add(e.op())?;
        }
        let dev = sum
            .sub(&OperatorMatrix::identity(dim))
            .unwrap()
            .max_entry_norm();
        if dev > TOL_VALID {
            return Err(Error::InvalidPovm(format!(
                "elements do not sum to identity (deviation {dev:.3e})"
            )));
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }
}

/// Postprocessing that enforces the trace condition.
///
/// If tr(m_plus) <= 1 or tr(m_minus) <= 1 already, the observable is returned
/// unchanged. Otherwise the +1 outcome is kept with probability
/// p = 1/tr(m_plus) and flipped to -1 with probability 1 - p, which replaces
/// m_plus by m_plus / tr(m_plus). The kept probability is returned alongside.
/// Separability is preserved (the set of separable effects is convex).
pub fn renormalize_effect(m: &BinaryObservable) -> (BinaryObservable, Option<f64>) {
    let tr_plus = m.m_plus().trace();
    let tr_minus = m.m_minus().trace();
    if tr_plus <= 1.0 + TOL_VALID || tr_minus <= 1.0 + TOL_VALID {
        return (m.clone(), None);
    }
    let scaled = Effect::new(m.m_plus().op().scale_re(1.0 / tr_plus)).unwrap();
    (BinaryObservable::from_effect(scaled), Some(1.0 / tr_plus))
}

/// kron wrapper that keeps the validated wrappers intact.
pub fn state_kron(a: &QuantumState, b: &QuantumState) -> QuantumState {
    QuantumState::new(kron(a.op(), b.op())).unwrap()
}

/// Haar-like random pure state from a normalized complex Gaussian vector.
pub fn random_pure_state(dim: usize, rng: &mut impl rand::Rng) -> QuantumState {
    QuantumState::pure(&random_gaussian_ket(dim, rng))
}

/// Random full-rank density matrix G G^dag / tr(G G^dag).
pub fn random_state(dim: usize, rng: &mut impl rand::Rng) -> QuantumState {
    let g = random_gaussian_matrix(dim, rng);
    let p = &g * g.adjoint();
    let tr: C64 = p.diagonal().sum();
    QuantumState::new(OperatorMatrix::new(p / tr).unwrap()).unwrap()
}

/// Random effect: a random positive matrix rescaled so its top eigenvalue is
/// uniform in (0, 1].
pub fn random_effect(dim: usize, rng: &mut impl rand::Rng) -> Effect {
    let g = random_gaussian_matrix(dim, rng);
    let p = OperatorMatrix::new(&g * g.adjoint()).unwrap();
    let top = crate::linalg::operator_norm(&p).unwrap();
    let u: f64 = rng.gen_range(1e-3..=1.0);
    Effect::new(p.scale_re(u / top)).unwrap()
}

pub(crate) fn random_gaussian_ket(dim: usize, rng: &mut impl rand::Rng) -> CVec {
    use rand_distr::StandardNormal;
    CVec::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn random_gaussian_matrix(dim: usize, rng: &mut impl rand::Rng) -> CMat {
    use rand_distr::StandardNormal;
    CMat::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn born_rule_examples() {
        let q = maximally_mixed(4);
        let phi_minus = bell_projectors()[1].clone();
        assert_relative_eq!(
            born_probability(&q, &phi_minus).unwrap(),
            0.25,
            epsilon = 1e-12
        );
        let phi_plus_state = bell_states()[0].clone();
        let phi_plus = bell_projectors()[0].clone();
        assert_relative_eq!(
            born_probability(&phi_plus_state, &phi_plus).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn bloch_round_trip_and_reference_state() {
        let s = bloch_to_state(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(s.op().mat()[(0, 0)].re, 1.0, epsilon = 1e-12);

        let mixed = bloch_to_state(&BlochVector::new(0.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(mixed.op().mat()[(0, 0)].re, 0.5, epsilon = 1e-12);

        let inv = 1.0 / 2f64.sqrt();
        let rho_b0 = bloch_to_state(&BlochVector::new(-inv, 0.0, inv)).unwrap();
        let rt2 = 2f64.sqrt();
        assert_relative_eq!(
            rho_b0.op().mat()[(0, 0)].re,
            (2.0 + rt2) / 4.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(rho_b0.op().mat()[(0, 1)].re, -rt2 / 4.0, epsilon = 1e-12);
        assert_relative_eq!(
            rho_b0.op().mat()[(1, 1)].re,
            (2.0 - rt2) / 4.0,
            epsilon = 1e-12
        );

        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let v = loop {
                let v = BlochVector::new(
                    rng.gen::<f64>() * 2.0 - 1.0,
                    rng.gen::<f64>() * 2.0 - 1.0,
                    rng.gen::<f64>() * 2.0 - 1.0,
                );
                if v.norm() <= 1.0 {
                    break v;
                }
            };
            let back = state_to_bloch(&bloch_to_state(&v).unwrap()).unwrap();
            assert_relative_eq!(back.x, v.x, epsilon = 1e-12);
            assert_relative_eq!(back.y, v.y, epsilon = 1e-12);
            assert_relative_eq!(back.z, v.z, epsilon = 1e-12);
        }
    }

    #[test]
    fn bloch_rejects_out_of_ball() {
        assert!(matches!(
            bloch_to_state(&BlochVector::new(1.0, 1.0, 0.0)),
            Err(Error::BlochNormExceeded(_))
        ));
    }

    #[test]
    fn bell_states_orthonormal_complete() {
        let states = bell_states();
        // <Phi+|Phi-> = 0 via tr(P+ P-).
        let overlap = states[0].op().matmul(states[1].op()).unwrap().trace();
        assert_relative_eq!(overlap.norm(), 0.0, epsilon = 1e-12);
        let mut sum = OperatorMatrix::zeros(4);
        for s in &states {
            sum = sum.add(s.op()).unwrap();
        }
        let dev = sum
            .sub(&OperatorMatrix::identity(4))
            .unwrap()
            .max_entry_norm();
        assert!(dev < 1e-12);
        for s in &states {
            let red = linalg::partial_trace(s.op(), linalg::Subsystem::A).unwrap();
            assert_relative_eq!(red.mat()[(0, 0)].re, 0.5, epsilon = 1e-12);
            assert_relative_eq!(red.mat()[(1, 1)].re, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_traces() {
        for d in [2usize, 4] {
            let s = maximally_mixed(d);
            assert_relative_eq!(s.op().trace().re, 1.0, epsilon = 1e-12);
            assert_relative_eq!(s.op().mat()[(0, 0)].re, 1.0 / d as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn validation_rejects_bad_objects() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(QuantumState::new(OperatorMatrix::new(m.clone()).unwrap()).is_err());
        assert!(Effect::new(OperatorMatrix::new(m).unwrap()).is_err());

        // Negative-eigenvalue "state": diag(1.5, -0.5) has unit trace.
        let bad = sigma_z()
            .add(&OperatorMatrix::identity(2).scale_re(0.5))
            .unwrap();
        assert!(QuantumState::new(bad).is_err());

        // Effect with top eigenvalue > 1.
        let big = OperatorMatrix::identity(2).scale_re(1.5);
        assert!(Effect::new(big).is_err());
    }

    #[test]
    fn binary_observable_probabilities_sum_to_one() {
        let mut rng = StdRng::seed_from_u64(11);
        let m1 = bell_projectors()[1].clone();
        let obs = BinaryObservable::from_effect(m1);
        for _ in 0..50 {
            let rho = random_state(4, &mut rng);
            let p = born_probability(&rho, obs.m_plus()).unwrap();
            let q = born_probability(&rho, obs.m_minus()).unwrap();
            assert_relative_eq!(p + q, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn renormalize_examples() {
        let phi_minus = bell_projectors()[1].clone();
        let obs = BinaryObservable::from_effect(phi_minus);
        let (out, p) = renormalize_effect(&obs);
        assert!(p.is_none());
        assert_eq!(out.m_plus(), obs.m_plus());

        // tr = 2 on both sides: renormalized to 1/4.
        let half = Effect::new(OperatorMatrix::identity(4).scale_re(0.5)).unwrap();
        let obs = BinaryObservable::from_effect(half);
        let (out, p) = renormalize_effect(&obs);
        assert_relative_eq!(p.unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(out.m_plus().op().mat()[(0, 0)].re, 0.25, epsilon = 1e-12);
        let tr_plus = out.m_plus().trace();
        let tr_minus = out.m_minus().trace();
        assert!(tr_plus <= 1.0 + 1e-9 || tr_minus <= 1.0 + 1e-9);

        // Small multiple of a Bell projector already satisfies the condition.
        let eps = Effect::new(bell_projectors()[0].op().scale_re(0.6)).unwrap();
        let obs = BinaryObservable::from_effect(eps);
        let (out, p) = renormalize_effect(&obs);
        assert!(p.is_none());
        assert_eq!(out.m_plus(), obs.m_plus());
    }
}
