//! Positivity classifiers for bipartite operators and an effect classifier.
//!
//! Three nested positivity notions: separable positive (nonnegative
//! combination of product positives) implies positive implies positive on
//! pure tensors (POPT). Separability testing is hard in general, so outside
//! 2x2 the classifier is one-sided: it only issues Entangled certificates
//! (NPT, or a dual-CHSH violation with the witnessing setting) and otherwise
//! reports Inconclusive. At 2x2 the PPT criterion is exact after trace
//! normalization and the classifier is decisive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chsh::{max_d_qubit, maximize_d_seesaw, ChshSetting, SeesawOptions};
use crate::linalg::{
    self, contract_a, contract_b, kron, partial_transpose, OperatorMatrix, Subsystem,
};
use crate::objects::{
    random_gaussian_ket, renormalize_effect, BinaryObservable, Effect, QuantumState,
};
use crate::{Error, Result};

/// Positivity tolerance on eigenvalues.
pub const TOL_POS: f64 = 1e-9;

/// Outcome of [`classify_effect`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Separable,
    Entangled,
    Inconclusive,
}

/// Certificate attached to a classification.
#[derive(Debug, Clone)]
pub enum Evidence {
    /// Explicit product decomposition (separable by construction).
    Decomposition(SeparableDecomposition),
    /// Min eigenvalue of the partial transpose of the trace-normalized
    /// operator; negative certifies entanglement, nonnegative certifies
    /// separability at 2x2.
    Ppt {
        min_eigenvalue: f64,
        normalization: f64,
    },
    /// A setting on which D exceeds 2.
    DualChshViolation {
        value: f64,
        setting: ChshSetting,
    },
    None,
}

/// Dual-CHSH diagnostics reported alongside the verdict for 2x2 effects.
#[derive(Debug, Clone, Copy)]
pub struct DualChshInfo {
    pub max_d: f64,
    pub violates_dual_chsh: bool,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub dual_chsh: Option<DualChshInfo>,
}

/// Weighted rank-1 product terms, sum_i lambda_i P_A^i (x) P_B^i with
/// sum lambda_i <= 1.
#[derive(Debug, Clone)]
pub struct SeparableDecomposition {
    pub terms: Vec<(f64, Effect, Effect)>,
}

impl SeparableDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|(l, _, _)| l).sum()
    }

    /// Rebuild the effect from the terms.
    pub fn reconstruct(&self) -> Result<Effect> {
        let (la, lb) = match self.terms.first() {
            Some((_, a, b)) => (a.dim(), b.dim()),
            None => return Err(Error::InvalidEffect("empty decomposition".into())),
        };
        let mut sum = OperatorMatrix::zeros(la * lb).split_as(la, lb)?;
        for (l, a, b) in &self.terms {
            sum = sum.add(&kron(a.op(), b.op()).scale_re(*l))?;
        }
        Effect::new(sum)
    }
}

/// Min eigenvalue >= -1e-9.
pub fn is_positive(x: &OperatorMatrix) -> Result<bool> {
    let eig = linalg::hermitian_eig(x)?;
    Ok(eig.eigenvalues.last().copied().unwrap_or(0.0) >= -TOL_POS)
}

/// PPT check: (positive partial transpose?, min eigenvalue of the PT).
pub fn ppt_check(x: &OperatorMatrix) -> Result<(bool, f64)> {
    let pt = partial_transpose(x, Subsystem::B)?;
    let eig = linalg::hermitian_eig(&pt)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    Ok((min >= -TOL_POS, min))
}

/// Heuristic minimum of <psi (x) phi| X |psi (x) phi> over product unit
/// vectors, by alternating bottom-eigenvector updates.
///
/// The result is an upper bound on the true minimum (the seesaw can stall in
/// local minima); it is diagnostics only, never an entanglement certificate.
pub fn popt_min(
    x: &OperatorMatrix,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<f64> {
    let (_, db) = x.split().ok_or(Error::MissingSplit)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts.max(1) {
        let mut phi = QuantumState::pure(&random_gaussian_ket(db, &mut rng));
        let mut prev = f64::INFINITY;
        for _ in 0..max_iters {
            let k_a = contract_b(x, phi.op())?.symmetrize();
            let psi = bottom_state(&k_a)?;
            let k_b = contract_a(x, psi.op())?.symmetrize();
            phi = bottom_state(&k_b)?;
            let val = linalg::hs_inner(&kron(psi.op(), phi.op()), x)?.re;
            if (prev - val).abs() < tol {
                prev = val;
                break;
            }
            prev = val;
        }
        if prev < best {
            best = prev;
        }
    }
    Ok(best)
}

fn bottom_state(k: &OperatorMatrix) -> Result<QuantumState> {
    let eig = linalg::hermitian_eig(k)?;
    Ok(QuantumState::pure(&eig.bottom_eigenvector()))
}

/// Decision cascade for a bipartite effect.
///
/// 1. Renormalize if the trace condition fails.
/// 2. At 2x2, PPT of the trace-normalized operator is decisive; the
///    dual-CHSH maximum is reported as extra diagnostics.
/// 3. Otherwise: NPT certifies Entangled; a seesaw D > 2 certifies Entangled
///    with the witnessing setting; anything else is Inconclusive.
pub fn classify_effect(m1: &Effect) -> Result<Classification> {
    let (da, db) = m1.op().split().ok_or(Error::MissingSplit)?;
    let trace = m1.trace();
    if trace <= TOL_POS {
        // The zero effect is trivially separable.
        return Ok(Classification {
            verdict: Verdict::Separable,
            evidence: Evidence::Decomposition(SeparableDecomposition { terms: vec![] }),
            dual_chsh: None,
        });
    }
    let normalized = m1.op().scale_re(1.0 / trace);
    let (ppt, min_eig) = ppt_check(&normalized)?;
    let (obs, _) = renormalize_effect(&BinaryObservable::from_effect(m1.clone()));

    if (da, db) == (2, 2) {
        let rep = max_d_qubit(obs.m_plus())?;
        let info = DualChshInfo {
            max_d: rep.max_d,
            violates_dual_chsh: rep.max_d > 2.0 + TOL_POS,
        };
        let verdict = if ppt {
            Verdict::Separable
        } else {
            Verdict::Entangled
        };
        return Ok(Classification {
            verdict,
            evidence: Evidence::Ppt {
                min_eigenvalue: min_eig,
                normalization: trace,
            },
            dual_chsh: Some(info),
        });
    }

    if !ppt {
        return Ok(Classification {
            verdict: Verdict::Entangled,
            evidence: Evidence::Ppt {
                min_eigenvalue: min_eig,
                normalization: trace,
            },
            dual_chsh: None,
        });
    }
    let rep = maximize_d_seesaw(&obs, &SeesawOptions::default())?;
    if rep.max_d > 2.0 + TOL_POS {
        return Ok(Classification {
            verdict: Verdict::Entangled,
            evidence: Evidence::DualChshViolation {
                value: rep.max_d,
                setting: rep.optimal_setting,
            },
            dual_chsh: None,
        });
    }
    Ok(Classification {
        verdict: Verdict::Inconclusive,
        evidence: Evidence::None,
        dual_chsh: None,
    })
}

/// Random separable effect with an explicit product decomposition.
///
/// Draws `n_terms` rank-1 product projectors and simplex-distributed weights
/// scaled by `trace_budget`; the result satisfies the effect invariants and
/// the trace condition by construction.
pub fn random_separable_effect(
    d_a: usize,
    d_b: usize,
    n_terms: usize,
    trace_budget: f64,
    seed: u64,
) -> Result<(Effect, SeparableDecomposition)> {
    if trace_budget > 1.0 {
        return Err(Error::BudgetExceeded(trace_budget));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Uniform simplex sample via normalized exponentials.
    let mut weights: Vec<f64> = (0..n_terms.max(1))
        .map(|_| -rng.gen::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w *= trace_budget / total;
    }
    let mut terms = Vec::with_capacity(weights.len());
    for w in weights {
        let pa = Effect::new(OperatorMatrix::projector(&random_gaussian_ket(
            d_a, &mut rng,
        )))?;
        let pb = Effect::new(OperatorMatrix::projector(&random_gaussian_ket(
            d_b, &mut rng,
        )))?;
        terms.push((w, pa, pb));
    }
    let decomp = SeparableDecomposition { terms };
    let effect = decomp.reconstruct()?;
    Ok((effect, decomp))
}
