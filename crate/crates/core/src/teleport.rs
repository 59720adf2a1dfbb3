//! Teleportation usefulness of a 4-outcome two-qubit measurement.
//!
//! Alice shares a maximally entangled pair with Bob and measures her unknown
//! qubit together with her half using the POVM {A_i}; Bob applies a feedback
//! unitary U_i on outcome i. The maximum of the sphere-averaged fidelity over
//! the feedback unitaries has the closed form
//!
//!   F_max = 1/2 (1 + (1/12) sum_i tr sqrt(T_i^T T_i))
//!
//! with T_i the correlation matrix of A_i. F_max > 2/3 (equivalently
//! sum of nuclear norms > 4) means the measurement beats every classical
//! strategy. An outcome that violates the dual Bell-CHSH inequality always
//! has nuclear norm > 1, linking entanglement detection to usefulness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::chsh::{max_d_qubit, t_matrix};
use crate::linalg::{
    self, kron, nuclear_norm, partial_trace, CVec, OperatorMatrix, RealMatrix3, Subsystem, C64,
};
use crate::objects::{
    bell_projectors, bell_states, bloch_to_state, renormalize_effect, BinaryObservable,
    BlochVector, Effect, Povm, QuantumState,
};
use crate::{Error, Result};

/// Usefulness threshold on the average fidelity.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// Closed-form teleportation figures for a POVM.
#[derive(Debug, Clone)]
pub struct FidelityReport {
    pub f_max: f64,
    pub per_outcome_nuclear_norms: [f64; 4],
    pub useful: bool,
    /// sum_i tr sqrt(T_i^T T_i) - 4; positive iff useful.
    pub threshold_margin: f64,
}

/// Per-outcome link between the dual inequality and usefulness.
#[derive(Debug, Clone, Copy)]
pub struct DualChshLink {
    pub violates_dual_chsh: bool,
    pub max_d: f64,
    /// Nuclear norm of the renormalized outcome effect.
    pub nuclear_norm: f64,
}

fn require_four_two_qubit(povm: &Povm) -> Result<()> {
    if povm.len() != 4 {
        return Err(Error::WrongOutcomeCount(povm.len(), 4));
    }
    for e in povm.effects() {
        if e.op().split() != Some((2, 2)) {
            return Err(Error::NotTwoQubit(e.op().split()));
        }
    }
    Ok(())
}

/// Correlation matrices t_i^{nm} = tr(sigma_n (x) sigma_m A_i).
pub fn t_matrices(povm: &Povm) -> Result<[RealMatrix3; 4]> {
    require_four_two_qubit(povm)?;
    let mut out = [RealMatrix3::zeros(); 4];
    for (k, e) in povm.effects().iter().enumerate() {
        out[k] = *t_matrix(e)?.matrix();
    }
    Ok(out)
}

/// F_max = 1/2 (1 + (1/12) sum_i tr sqrt(T_i^T T_i)).
pub fn max_average_fidelity(povm: &Povm) -> Result<FidelityReport> {
    let ts = t_matrices(povm)?;
    let mut norms = [0.0; 4];
    for (k, t) in ts.iter().enumerate() {
        norms[k] = nuclear_norm(t);
    }
    let total: f64 = norms.iter().sum();
    let f_max = 0.5 * (1.0 + total / 12.0);
    Ok(FidelityReport {
        f_max,
        per_outcome_nuclear_norms: norms,
        useful: total > 4.0,
        threshold_margin: total - 4.0,
    })
}

fn require_unitary(u: &OperatorMatrix) -> Result<()> {
    let gram = u.adjoint().matmul(u)?;
    let dev = gram
        .sub(&OperatorMatrix::identity(u.dim()))?
        .max_entry_norm();
    if dev > 1e-9 {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// Per-input fidelity sum_i p_i <phi|rho_i|phi> for a fixed input state.
///
/// Computed without normalizing by p_i: the unnormalized conditional output
/// sigma_i = tr_{12}[(1 (x) U_i) (phi (x) Phi+) (A_i (x) 1) (1 (x) U_i^dag)]
/// already carries the outcome probability.
fn fidelity_for_input(
    phi: &QuantumState,
    povm: &Povm,
    unitaries: &[OperatorMatrix; 4],
) -> Result<f64> {
    let shared = bell_states()[0].clone();
    let input = kron(phi.op(), shared.op()).split_as(4, 2)?;
    let mut total = 0.0;
    for (a_i, u_i) in povm.effects().iter().zip(unitaries) {
        let u_full = kron(&OperatorMatrix::identity(4), u_i);
        let a_full = kron(a_i.op(), &OperatorMatrix::identity(2));
        let evolved = u_full
            .matmul(&input)?
            .matmul(&a_full)?
            .matmul(&u_full.adjoint())?
            .split_as(4, 2)?;
        let out = partial_trace(&evolved, Subsystem::A)?;
        total += linalg::hs_inner(phi.op(), &out)?.re;
    }
    Ok(total)
}

/// Monte Carlo estimate of the average fidelity under the given feedback
/// unitaries, over inputs uniform on the Bloch sphere.
pub fn average_fidelity_mc(
    povm: &Povm,
    unitaries: &[OperatorMatrix; 4],
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    require_four_two_qubit(povm)?;
    for u in unitaries {
        require_unitary(u)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let phi = random_bloch_pure(&mut rng);
        let f = fidelity_for_input(&phi, povm, unitaries)?;
        sum += f;
        sum_sq += f * f;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Pure qubit state with Bloch vector uniform on the sphere.
fn random_bloch_pure(rng: &mut impl rand::Rng) -> QuantumState {
    loop {
        let v: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return bloch_to_state(&BlochVector::new(v[0] / n, v[1] / n, v[2] / n)).unwrap();
        }
    }
}

/// Per-outcome dual-CHSH violation and its implied nuclear-norm bound, each
/// outcome renormalized to the trace condition first.
pub fn dual_chsh_link(povm: &Povm) -> Result<[DualChshLink; 4]> {
    require_four_two_qubit(povm)?;
    let mut out = [DualChshLink {
        violates_dual_chsh: false,
        max_d: 0.0,
        nuclear_norm: 0.0,
    }; 4];
    for (k, e) in povm.effects().iter().enumerate() {
        let (obs, _) = renormalize_effect(&BinaryObservable::from_effect(e.clone()));
        let rep = max_d_qubit(obs.m_plus())?;
        let norm = t_matrix(obs.m_plus())?.nuclear_norm();
        out[k] = DualChshLink {
            violates_dual_chsh: rep.max_d > 2.0 + 1e-9,
            max_d: rep.max_d,
            nuclear_norm: norm,
        };
    }
    Ok(out)
}

/// The complete Bell measurement as a POVM (Phi+, Phi-, Psi+, Psi-).
pub fn bell_povm() -> Povm {
    Povm::new(bell_projectors().to_vec()).unwrap()
}

/// The computational-basis product measurement {|ij><ij|}.
pub fn product_povm() -> Povm {
    let mut effects = Vec::with_capacity(4);
    for k in 0..4 {
        let mut v = CVec::zeros(4);
        v[k] = C64::new(1.0, 0.0);
        effects.push(Effect::new(OperatorMatrix::projector(&v).split_as(2, 2).unwrap()).unwrap());
    }
    Povm::new(effects).unwrap()
}

/// Standard teleportation corrections for the Bell POVM in the
/// (Phi+, Phi-, Psi+, Psi-) outcome order: 1, sigma_z, sigma_x, sigma_z
/// sigma_x.
pub fn standard_corrections() -> [OperatorMatrix; 4] {
    use crate::objects::{sigma_x, sigma_z};
    [
        OperatorMatrix::identity(2),
        sigma_z(),
        sigma_x(),
        sigma_z().matmul(&sigma_x()).unwrap(),
    ]
}

/// Identity feedback on every outcome.
pub fn identity_corrections() -> [OperatorMatrix; 4] {
    [(); 4].map(|_| OperatorMatrix::identity(2))
}

/// Random 4-outcome two-qubit POVM: four random positive operators
/// symmetrized by the inverse square root of their sum, which preserves
/// completeness exactly.
pub fn random_povm(seed: u64) -> Povm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts: Vec<OperatorMatrix> = (0..4)
        .map(|_| {
            let g = nalgebra::DMatrix::from_fn(4, 4, |_, _| {
                C64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            });
            OperatorMatrix::new(&g * g.adjoint()).unwrap()
        })
        .collect();
    let mut sum = OperatorMatrix::zeros(4);
    for p in &parts {
        sum = sum.add(p).unwrap();
    }
    let inv_sqrt = inv_sqrt_psd(&sum);
    let effects = parts
        .into_iter()
        .map(|p| {
            let e = inv_sqrt.matmul(&p).unwrap().matmul(&inv_sqrt).unwrap();
            Effect::new(e.symmetrize().split_as(2, 2).unwrap()).unwrap()
        })
        .collect();
    Povm::new(effects).unwrap()
}

fn inv_sqrt_psd(x: &OperatorMatrix) -> OperatorMatrix {
    let eig = linalg::hermitian_eig(x).unwrap();
    let n = x.dim();
    let lam = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j && eig.eigenvalues[i] > 1e-12 {
            C64::new(1.0 / eig.eigenvalues[i].sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let m = &eig.eigenvectors * lam * eig.eigenvectors.adjoint();
    OperatorMatrix::new(m).unwrap()
}
