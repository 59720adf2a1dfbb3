//! Shot-based simulation of the dual Bell-CHSH experiment.
//!
//! The setup prepares product states, optionally applies depolarizing noise
//! per qubit and classical readout flips, performs a Bell measurement, and
//! estimates D from counts. Each E term expands into four preparations:
//!
//!   E = 4 [ p(rho_A, rho_B) - p(rho_A, 1/2) - p(1/2, rho_B) + p(1/2, 1/2) ]
//!
//! where p is the relative frequency of the target Bell outcome (expanding
//! tr[(rho_A - 1/2)(x)(rho_B - 1/2)(2 M1 - 1)]; the -1 part vanishes because
//! the deviation factors are traceless). D therefore uses 16 preparation
//! settings, treated as independent binomials for the error bars.
//!
//! The reference hardware run reported D = 2.573 +- 0.035 against the ideal
//! 2 sqrt(2); an isotropic depolarizing parameter reproducing that D can be
//! calibrated by bisection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::chsh::ChshSetting;
use crate::linalg::{kron, CVec, C64};
use crate::objects::{
    bell_projectors, bloch_to_state, born_probability, maximally_mixed, BinaryObservable,
    BlochVector, Effect, QuantumState,
};
use crate::{Error, Result};

/// Bell-outcome probabilities measured on hardware for the completely mixed
/// state, in (Phi+, Phi-, Psi+, Psi-) order. Reference data only; they embed
/// device-specific bias that no isotropic noise model reproduces.
pub const HARDWARE_BELL_PROBS: [f64; 4] = [0.2792, 0.2474, 0.2552, 0.2182];

/// The hardware D estimate and its reported error bar.
pub const HARDWARE_D: f64 = 2.573;
pub const HARDWARE_D_ERR: f64 = 0.035;

/// Per-qubit depolarizing strength plus classical per-bit readout flip
/// probability, both in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub depolarizing_p: f64,
    pub readout_flip: f64,
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel {
        depolarizing_p: 0.0,
        readout_flip: 0.0,
    };

    pub fn new(depolarizing_p: f64, readout_flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&depolarizing_p) {
            return Err(Error::NoiseOutOfRange {
                name: "depolarizing_p",
                value: depolarizing_p,
            });
        }
        if !(0.0..=1.0).contains(&readout_flip) {
            return Err(Error::NoiseOutOfRange {
                name: "readout_flip",
                value: readout_flip,
            });
        }
        Ok(Self {
            depolarizing_p,
            readout_flip,
        })
    }
}

/// Counts over the four Bell outcomes (Phi+, Phi-, Psi+, Psi-).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotCounts {
    pub counts: [u64; 4],
    pub shots: u64,
}

impl ShotCounts {
    pub fn frequency(&self, outcome: usize) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.counts[outcome] as f64 / self.shots as f64
        }
    }
}

/// D estimate with statistics, the four per-term E estimates, and the run
/// configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DEstimate {
    pub value: f64,
    pub std_error: f64,
    pub per_term: [(f64, f64); 4],
    pub shots_per_setting: u64,
    pub seed: u64,
}

/// One of the sixteen preparation settings of a run.
#[derive(Debug, Clone)]
pub struct SettingRecord {
    /// Which E term (0..4) in the (00, 01, 10, 11) order.
    pub term: usize,
    /// Which preparation within the term: (rho,rho), (rho,mix), (mix,rho),
    /// (mix,mix).
    pub slot: usize,
    pub probs: [f64; 4],
    pub counts: ShotCounts,
}

/// Full result record of a simulated run (consumed by the CLI).
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub estimate: DEstimate,
    pub settings: Vec<SettingRecord>,
    pub noise: NoiseModel,
    pub target_outcome: usize,
}

/// Run configuration.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentConfig {
    pub shots_per_setting: u64,
    pub noise: NoiseModel,
    pub seed: u64,
    /// Realize maximally mixed preparations as an equal-weight mixture of
    /// |0><0| and |1><1| (shot-split binomially) instead of exact density
    /// matrix arithmetic.
    pub mixture_mode: bool,
}

/// Bell-measurement outcome probabilities for a two-qubit state.
pub fn bell_measure_probs(rho_ab: &QuantumState) -> Result<[f64; 4]> {
    if rho_ab.dim() != 4 {
        return Err(Error::DimMismatch {
            left: rho_ab.dim(),
            right: 4,
        });
    }
    let projectors = bell_projectors();
    let mut out = [0.0; 4];
    for (k, p) in projectors.iter().enumerate() {
        out[k] = born_probability(rho_ab, p)?;
    }
    Ok(out)
}

/// (1 - p) rho + p 1/2 on a qubit.
pub fn apply_depolarizing(rho: &QuantumState, p: f64) -> Result<QuantumState> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit(rho.dim()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::NoiseOutOfRange {
            name: "depolarizing_p",
            value: p,
        });
    }
    let mixed = maximally_mixed(2);
    QuantumState::new(rho.op().scale_re(1.0 - p).add(&mixed.op().scale_re(p))?)
}

/// Classical readout confusion on the two measured bits.
///
/// Bell labels decode from bits (phase, parity): Phi+ = 00, Phi- = 10,
/// Psi+ = 01, Psi- = 11; each bit flips independently with probability `q`.
pub fn apply_readout_flip(probs: [f64; 4], q: f64) -> [f64; 4] {
    let bits = |o: usize| -> (u8, u8) { ((o as u8) & 1, (o as u8) >> 1) };
    let mut out = [0.0; 4];
    for (o_in, p_in) in probs.iter().enumerate() {
        let (b0, b1) = bits(o_in);
        for (o_out, slot) in out.iter_mut().enumerate() {
            let (c0, c1) = bits(o_out);
            let h = (b0 != c0) as u32 + (b1 != c1) as u32;
            *slot += p_in * q.powi(h as i32) * (1.0 - q).powi(2 - h as i32);
        }
    }
    out
}

/// Multinomial sample over the four Bell outcomes, by chained binomials.
pub fn sample_counts(probs: [f64; 4], shots: u64, rng: &mut impl Rng) -> ShotCounts {
    let mut counts = [0u64; 4];
    let mut remaining = shots;
    let mut mass = 1.0f64;
    for k in 0..3 {
        if remaining == 0 || mass <= 0.0 {
            break;
        }
        let p = (probs[k].max(0.0) / mass).clamp(0.0, 1.0);
        let n = Binomial::new(remaining, p).unwrap().sample(rng);
        counts[k] = n;
        remaining -= n;
        mass -= probs[k].max(0.0);
    }
    counts[3] = remaining;
    ShotCounts { counts, shots }
}

/// E estimate from the four preparation count records of one term.
///
/// Returns (value, standard error) with the error from independent binomial
/// propagation: sqrt(sum 16 p_k (1 - p_k) / shots_k).
pub fn estimate_e(counts: &[ShotCounts; 4], target_outcome: usize) -> Result<(f64, f64)> {
    let mut freqs = [0.0; 4];
    let mut var = 0.0;
    for (k, c) in counts.iter().enumerate() {
        if c.shots == 0 {
            return Err(Error::EmptyCounts);
        }
        let p = c.frequency(target_outcome);
        freqs[k] = p;
        var += 16.0 * p * (1.0 - p) / c.shots as f64;
    }
    let value = 4.0 * (freqs[0] - freqs[1] - freqs[2] + freqs[3]);
    Ok((value, var.sqrt()))
}

/// The explicit setting used in the reference experiment:
/// rho_0^A = |0><0|, rho_1^A = |+><+|, rho_0^B and rho_1^B at Bloch vectors
/// (-+1/sqrt(2), 0, 1/sqrt(2)), with M1 = |Phi-><Phi-|. D evaluates to
/// 2 sqrt(2) exactly.
pub fn paper_setting() -> ChshSetting {
    let inv = 1.0 / std::f64::consts::SQRT_2;
    let a0 = QuantumState::pure(&CVec::from_vec(vec![
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    ]));
    let a1 = QuantumState::pure(&CVec::from_vec(vec![
        C64::new(inv, 0.0),
        C64::new(inv, 0.0),
    ]));
    let b0 = bloch_to_state(&BlochVector::new(-inv, 0.0, inv)).unwrap();
    let b1 = bloch_to_state(&BlochVector::new(inv, 0.0, inv)).unwrap();
    let phi_minus = bell_projectors()[1].clone();
    ChshSetting::new([a0, a1], [b0, b1], BinaryObservable::from_effect(phi_minus)).unwrap()
}

/// Identify a two-qubit effect as one of the four Bell projectors.
fn bell_target(m1: &Effect) -> Result<usize> {
    for (k, p) in bell_projectors().iter().enumerate() {
        if m1.op().sub(p.op())?.max_entry_norm() <= 1e-9 {
            return Ok(k);
        }
    }
    Err(Error::UnsupportedMeasurement(
        "M1 must be one of the four Bell projectors".into(),
    ))
}

/// One preparation slot: a concrete state or the maximally mixed surrogate.
#[derive(Clone, Copy)]
enum Prep<'a> {
    State(&'a QuantumState),
    Mixed,
}

impl<'a> Prep<'a> {
    fn state(&self) -> QuantumState {
        match self {
            Prep::State(s) => (*s).clone(),
            Prep::Mixed => maximally_mixed(2),
        }
    }

    /// Mixture components for the shot-split preparation mode.
    fn components(&self, mixture_mode: bool) -> Vec<(f64, QuantumState)> {
        match (self, mixture_mode) {
            (Prep::Mixed, true) => {
                let zero = QuantumState::pure(&CVec::from_vec(vec![
                    C64::new(1.0, 0.0),
                    C64::new(0.0, 0.0),
                ]));
                let one = QuantumState::pure(&CVec::from_vec(vec![
                    C64::new(0.0, 0.0),
                    C64::new(1.0, 0.0),
                ]));
                vec![(0.5, zero), (0.5, one)]
            }
            _ => vec![(1.0, self.state())],
        }
    }
}

/// Exact Bell-outcome probabilities for a noisy product preparation.
fn exact_probs(
    prep_a: &QuantumState,
    prep_b: &QuantumState,
    noise: &NoiseModel,
) -> Result<[f64; 4]> {
    let a = apply_depolarizing(prep_a, noise.depolarizing_p)?;
    let b = apply_depolarizing(prep_b, noise.depolarizing_p)?;
    let joint = QuantumState::new(kron(a.op(), b.op()))?;
    let probs = bell_measure_probs(&joint)?;
    Ok(apply_readout_flip(probs, noise.readout_flip))
}

const TERM_PAIRS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

fn term_preps<'a>(setting: &'a ChshSetting, term: usize) -> [(Prep<'a>, Prep<'a>); 4] {
    let (i, j) = TERM_PAIRS[term];
    let ra = &setting.rho_a[i];
    let rb = &setting.rho_b[j];
    [
        (Prep::State(ra), Prep::State(rb)),
        (Prep::State(ra), Prep::Mixed),
        (Prep::Mixed, Prep::State(rb)),
        (Prep::Mixed, Prep::Mixed),
    ]
}

/// Exact (infinite-shot) D under the noise model, through the same
/// 16-preparation estimator identity used for counts.
pub fn exact_noisy_d(setting: &ChshSetting, noise: &NoiseModel) -> Result<f64> {
    let target = bell_target(setting.observable.m_plus())?;
    let mut d = 0.0;
    for term in 0..4 {
        let preps = term_preps(setting, term);
        let mut e = 0.0;
        for (slot, (pa, pb)) in preps.iter().enumerate() {
            let p = exact_probs(&pa.state(), &pb.state(), noise)?[target];
            let sign = if slot == 0 || slot == 3 { 1.0 } else { -1.0 };
            e += 4.0 * sign * p;
        }
        let term_sign = if term == 3 { -1.0 } else { 1.0 };
        d += term_sign * e;
    }
    Ok(d)
}

/// Simulate the full 16-setting experiment.
///
/// Deterministic for a fixed seed: setting `t * 4 + s` uses its own stream
/// derived from `seed`, so aggregation order cannot change the result.
pub fn run_dual_chsh_experiment(
    setting: &ChshSetting,
    config: &ExperimentConfig,
) -> Result<ExperimentRecord> {
    if setting.dims() != (2, 2) {
        return Err(Error::NotTwoQubit(Some(setting.dims())));
    }
    let target = bell_target(setting.observable.m_plus())?;
    if config.shots_per_setting == 0 {
        return Err(Error::EmptyCounts);
    }

    let mut records = Vec::with_capacity(16);
    let mut per_term = [(0.0, 0.0); 4];
    for term in 0..4 {
        let preps = term_preps(setting, term);
        let mut term_counts = Vec::with_capacity(4);
        for (slot, (pa, pb)) in preps.iter().enumerate() {
            let index = (term * 4 + slot) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(index));
            let counts = sample_preparation(pa, pb, config, &mut rng)?;
            let probs = exact_probs(&pa.state(), &pb.state(), &config.noise)?;
            records.push(SettingRecord {
                term,
                slot,
                probs,
                counts,
            });
            term_counts.push(counts);
        }
        let arr: [ShotCounts; 4] = [
            term_counts[0],
            term_counts[1],
            term_counts[2],
            term_counts[3],
        ];
        per_term[term] = estimate_e(&arr, target)?;
    }

    let value = per_term[0].0 + per_term[1].0 + per_term[2].0 - per_term[3].0;
    let std_error = per_term.iter().map(|(_, e)| e * e).sum::<f64>().sqrt();
    Ok(ExperimentRecord {
        estimate: DEstimate {
            value,
            std_error,
            per_term,
            shots_per_setting: config.shots_per_setting,
            seed: config.seed,
        },
        settings: records,
        noise: config.noise,
        target_outcome: target,
    })
}

/// Sample one preparation setting, splitting shots over mixture components
/// when the probabilistic-mixture mode is on.
fn sample_preparation(
    pa: &Prep,
    pb: &Prep,
    config: &ExperimentConfig,
    rng: &mut impl Rng,
) -> Result<ShotCounts> {
    let comps_a = pa.components(config.mixture_mode);
    let comps_b = pb.components(config.mixture_mode);
    let mut products = Vec::new();
    for (wa, sa) in &comps_a {
        for (wb, sb) in &comps_b {
            products.push((wa * wb, sa.clone(), sb.clone()));
        }
    }
    // Allocate shots among components by chained binomials.
    let mut allocations = vec![0u64; products.len()];
    let mut remaining = config.shots_per_setting;
    let mut mass = 1.0;
    for (k, (w, _, _)) in products.iter().enumerate() {
        if k + 1 == products.len() {
            allocations[k] = remaining;
            break;
        }
        let p = (w / mass).clamp(0.0, 1.0);
        let n = Binomial::new(remaining, p).unwrap().sample(rng);
        allocations[k] = n;
        remaining -= n;
        mass -= w;
    }

    let mut total = [0u64; 4];
    for ((_, sa, sb), n) in products.iter().zip(&allocations) {
        if *n == 0 {
            continue;
        }
        let probs = exact_probs(sa, sb, &config.noise)?;
        let c = sample_counts(probs, *n, rng);
        for k in 0..4 {
            total[k] += c.counts[k];
        }
    }
    Ok(ShotCounts {
        counts: total,
        shots: config.shots_per_setting,
    })
}

/// Find the depolarizing strength whose exact noisy D equals `target_d`, by
/// bisection on [0, 1]. The exact noisy D is monotone nonincreasing in p.
pub fn calibrate_depolarizing(setting: &ChshSetting, target_d: f64, tol: f64) -> Result<f64> {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let d_lo = exact_noisy_d(setting, &NoiseModel::new(lo, 0.0)?)?;
    let d_hi = exact_noisy_d(setting, &NoiseModel::new(hi, 0.0)?)?;
    if target_d > d_lo || target_d < d_hi {
        return Err(Error::UnsupportedMeasurement(format!(
            "target D {target_d} outside the reachable range [{d_hi}, {d_lo}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let d = exact_noisy_d(setting, &NoiseModel::new(mid, 0.0)?)?;
        if (d - target_d).abs() <= tol {
            return Ok(mid);
        }
        if d > target_d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::{bipartite_difference, check_trace_condition, d_value};
    use crate::linalg::OperatorMatrix;
    use crate::objects::{bell_states, state_to_bloch};
    use approx::assert_relative_eq;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn bell_measure_probs_examples() {
        let probs = bell_measure_probs(&maximally_mixed(4)).unwrap();
        for p in probs {
            assert_relative_eq!(p, 0.25, epsilon = 1e-12);
        }
        let probs = bell_measure_probs(&bell_states()[0]).unwrap();
        assert_relative_eq!(probs[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(probs[1] + probs[2] + probs[3], 0.0, epsilon = 1e-12);

        // Joint probability oracle: tr[(rho_0^A (x) rho_0^B) |Phi-><Phi-|]
        // computed as a direct 4x4 trace.
        let setting = paper_setting();
        let joint = QuantumState::new(kron(setting.rho_a[0].op(), setting.rho_b[0].op())).unwrap();
        let probs = bell_measure_probs(&joint).unwrap();
        let direct = crate::linalg::hs_inner(joint.op(), bell_projectors()[1].op())
            .unwrap()
            .re;
        assert_relative_eq!(probs[1], direct, epsilon = 1e-12);
        assert_relative_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn depolarizing_examples() {
        let zero = QuantumState::pure(&CVec::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]));
        let same = apply_depolarizing(&zero, 0.0).unwrap();
        assert_relative_eq!(same.op().mat()[(0, 0)].re, 1.0, epsilon = 1e-12);
        let flat = apply_depolarizing(&zero, 1.0).unwrap();
        assert_relative_eq!(flat.op().mat()[(0, 0)].re, 0.5, epsilon = 1e-12);
        let half = apply_depolarizing(&zero, 0.5).unwrap();
        assert_relative_eq!(half.op().mat()[(0, 0)].re, 0.75, epsilon = 1e-12);
        assert_relative_eq!(half.op().mat()[(1, 1)].re, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn sample_counts_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = sample_counts([1.0, 0.0, 0.0, 0.0], 100, &mut rng);
        assert_eq!(c.counts, [100, 0, 0, 0]);
        let c = sample_counts([0.25; 4], 0, &mut rng);
        assert_eq!(c.counts, [0, 0, 0, 0]);

        let c = sample_counts([0.25; 4], 1_000_000, &mut rng);
        let sigma = (1_000_000f64 * 0.25 * 0.75).sqrt();
        for k in 0..4 {
            let dev = (c.counts[k] as f64 - 250_000.0).abs();
            assert!(dev < 5.0 * sigma, "outcome {k}: deviation {dev}");
        }
        assert_eq!(c.counts.iter().sum::<u64>(), 1_000_000);
    }

    #[test]
    fn readout_flip_mixes_probabilities() {
        let probs = apply_readout_flip([1.0, 0.0, 0.0, 0.0], 0.1);
        assert_relative_eq!(probs[0], 0.81, epsilon = 1e-12);
        assert_relative_eq!(probs[1], 0.09, epsilon = 1e-12);
        assert_relative_eq!(probs[2], 0.09, epsilon = 1e-12);
        assert_relative_eq!(probs[3], 0.01, epsilon = 1e-12);
        assert_relative_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn estimator_matches_exact_e_on_probabilities() {
        // Feeding exact probabilities through the estimator reproduces the
        // bipartite difference from ignorance.
        let setting = paper_setting();
        for term in 0..4 {
            let (i, j) = TERM_PAIRS[term];
            let preps = term_preps(&setting, term);
            let mut e = 0.0;
            for (slot, (pa, pb)) in preps.iter().enumerate() {
                let p = exact_probs(&pa.state(), &pb.state(), &NoiseModel::NONE).unwrap()[1];
                let sign = if slot == 0 || slot == 3 { 1.0 } else { -1.0 };
                e += 4.0 * sign * p;
            }
            let expect =
                bipartite_difference(&setting.rho_a[i], &setting.rho_b[j], &setting.observable)
                    .unwrap();
            assert_relative_eq!(e, expect, epsilon = 1e-12);
        }
        // Marginals of a Bell projector are flat, so the three mixed
        // preparations contribute 1/4 each and E = 4 p_11 - 1.
        let preps = term_preps(&setting, 0);
        let p_mixed =
            exact_probs(&preps[3].0.state(), &preps[3].1.state(), &NoiseModel::NONE).unwrap()[1];
        assert_relative_eq!(p_mixed, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn exact_noisy_d_matches_d_value_at_zero_noise() {
        let setting = paper_setting();
        assert_relative_eq!(
            exact_noisy_d(&setting, &NoiseModel::NONE).unwrap(),
            d_value(&setting).unwrap(),
            epsilon = 1e-12
        );
        assert_relative_eq!(d_value(&setting).unwrap(), 2.0 * SQRT2, epsilon = 1e-12);
    }

    #[test]
    fn noise_monotonicity() {
        let setting = paper_setting();
        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let d = exact_noisy_d(&setting, &NoiseModel::new(p, 0.0).unwrap()).unwrap();
            assert!(d <= prev + 1e-12, "D increased at p = {p}");
            prev = d;
        }
        assert_relative_eq!(prev, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn paper_setting_properties() {
        let setting = paper_setting();
        let inv = 1.0 / SQRT2;
        let blochs = [
            state_to_bloch(&setting.rho_a[0]).unwrap(),
            state_to_bloch(&setting.rho_a[1]).unwrap(),
            state_to_bloch(&setting.rho_b[0]).unwrap(),
            state_to_bloch(&setting.rho_b[1]).unwrap(),
        ];
        let want = [
            (0.0, 0.0, 1.0),
            (1.0, 0.0, 0.0),
            (-inv, 0.0, inv),
            (inv, 0.0, inv),
        ];
        for (b, (x, y, z)) in blochs.iter().zip(want) {
            assert_relative_eq!(b.x, x, epsilon = 1e-12);
            assert_relative_eq!(b.y, y, epsilon = 1e-12);
            assert_relative_eq!(b.z, z, epsilon = 1e-12);
        }
        assert!(check_trace_condition(&setting.observable));
    }

    #[test]
    fn run_is_reproducible_and_consistent() {
        let setting = paper_setting();
        let config = ExperimentConfig {
            shots_per_setting: 20_000,
            noise: NoiseModel::NONE,
            seed: 99,
            mixture_mode: false,
        };
        let r1 = run_dual_chsh_experiment(&setting, &config).unwrap();
        let r2 = run_dual_chsh_experiment(&setting, &config).unwrap();
        assert_eq!(r1.estimate, r2.estimate);
        assert_eq!(r1.settings.len(), 16);
        assert!(
            (r1.estimate.value - 2.0 * SQRT2).abs() <= 5.0 * r1.estimate.std_error,
            "estimate {} +- {}",
            r1.estimate.value,
            r1.estimate.std_error
        );
    }

    #[test]
    fn mixture_mode_agrees_statistically() {
        let setting = paper_setting();
        let config = ExperimentConfig {
            shots_per_setting: 50_000,
            noise: NoiseModel::NONE,
            seed: 5,
            mixture_mode: true,
        };
        let r = run_dual_chsh_experiment(&setting, &config).unwrap();
        assert!(
            (r.estimate.value - 2.0 * SQRT2).abs() <= 5.0 * r.estimate.std_error,
            "mixture-mode estimate {} +- {}",
            r.estimate.value,
            r.estimate.std_error
        );
    }

    #[test]
    fn zero_shots_rejected() {
        let setting = paper_setting();
        let config = ExperimentConfig {
            shots_per_setting: 0,
            noise: NoiseModel::NONE,
            seed: 0,
            mixture_mode: false,
        };
        assert!(matches!(
            run_dual_chsh_experiment(&setting, &config),
            Err(Error::EmptyCounts)
        ));
    }

    #[test]
    fn non_bell_measurement_rejected() {
        let setting = paper_setting();
        let p00 = Effect::new(
            OperatorMatrix::projector(&CVec::from_vec(vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ]))
            .split_as(2, 2)
            .unwrap(),
        )
        .unwrap();
        let bad = ChshSetting::new(
            setting.rho_a.clone(),
            setting.rho_b.clone(),
            BinaryObservable::from_effect(p00),
        )
        .unwrap();
        let config = ExperimentConfig {
            shots_per_setting: 10,
            noise: NoiseModel::NONE,
            seed: 0,
            mixture_mode: false,
        };
        assert!(matches!(
            run_dual_chsh_experiment(&bad, &config),
            Err(Error::UnsupportedMeasurement(_))
        ));
    }

    #[test]
    fn calibration_hits_hardware_value() {
        let setting = paper_setting();
        let p = calibrate_depolarizing(&setting, HARDWARE_D, 1e-9).unwrap();
        let d = exact_noisy_d(&setting, &NoiseModel::new(p, 0.0).unwrap()).unwrap();
        assert_relative_eq!(d, HARDWARE_D, epsilon = 1e-6);
        // Per-qubit depolarizing scales each deviation factor by (1 - p).
        assert_relative_eq!(
            (1.0 - p) * (1.0 - p) * 2.0 * SQRT2,
            HARDWARE_D,
            epsilon = 1e-6
        );
    }
}
