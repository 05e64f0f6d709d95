//! Probabilistic fault-injection simulator.
//!
//! Stands in for a voltage-glitch rig at desk scale: any black-box
//! operation can be wrapped so that each invocation is independently
//! faulted with a configurable probability, using abstractions of the
//! physically observed fault classes (skipped stores, corrupted result
//! bits, wholesale result replacement, zeroized twiddle constants) plus a
//! chance that a triggered fault crashes the run instead.
//!
//! The glitch rig's two sweep axes map onto software terms: the glitch
//! offset becomes *which* inner invocation is targeted, and the glitch
//! intensity becomes the per-invocation fault probability. The campaign
//! machinery sweeps that grid and classifies each run as correct, faulty,
//! or reset.

mod campaign;

pub use campaign::{
    run_fault_campaign, run_paired_fault_campaign, CampaignGrid, CampaignReport, CampaignRow,
    CampaignTarget, PairedCampaignReport, TargetInputs,
};

use crate::arith::{self, ntt_forward, ntt_forward_with, PolyRing, RingParams};
use crate::protect::{c_secure_execute, ModBasis};
use crate::rng::Prng;
use crate::{Error, Result};

/// How a triggered fault perturbs an invocation's result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultMode {
    /// The result store is skipped: the stale first input argument comes
    /// back unchanged (truncated to the machine word for wide inputs).
    Skip,
    /// `k` uniformly chosen bit positions of the result flip; the value is
    /// then reduced back into its domain.
    CorruptBits(u32),
    /// The result is replaced by a uniform element of the output domain.
    CorruptUniform,
    /// All twiddle constants from the given butterfly stage onward read as
    /// zero for the faulted invocation. Only meaningful for transforms;
    /// other operations pass through unperturbed.
    ZeroizeTwiddles(u32),
}

/// Which invocations of the wrapped black box are exposed to faulting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultTarget {
    EveryInvocation,
    InvocationIndex(u64),
}

/// Fault environment for one run: per-invocation fault probability,
/// perturbation mode, targeting, and the probability that a triggered
/// fault resets the device instead of producing output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultModel {
    pub epsilon: f64,
    pub mode: FaultMode,
    pub target: FaultTarget,
    pub reset_prob: f64,
}

impl FaultModel {
    pub fn new(
        epsilon: f64,
        mode: FaultMode,
        target: FaultTarget,
        reset_prob: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || !(0.0..=1.0).contains(&reset_prob) {
            return Err(Error::InvalidParams("probabilities must lie in [0, 1]"));
        }
        if let FaultMode::CorruptBits(k) = mode {
            if k == 0 || k > 64 {
                return Err(Error::InvalidParams("bit-flip count must lie in 1..=64"));
            }
        }
        Ok(FaultModel { epsilon, mode, target, reset_prob })
    }

    /// No faulting at all; used for dry runs and expected-output passes.
    pub fn disabled() -> Self {
        FaultModel {
            epsilon: 0.0,
            mode: FaultMode::CorruptUniform,
            target: FaultTarget::EveryInvocation,
            reset_prob: 0.0,
        }
    }
}

enum Roll {
    Clean,
    Corrupt,
    Reset,
}

/// Per-run fault state: owns the model, the fault randomness, and the
/// invocation counter that targeting is matched against.
#[derive(Debug)]
pub struct FaultInjector {
    model: FaultModel,
    rng: Prng,
    invocations: u64,
}

impl FaultInjector {
    pub fn new(model: FaultModel, rng: Prng) -> Self {
        FaultInjector { model, rng, invocations: 0 }
    }

    /// Number of black-box invocations observed so far.
    pub fn invocations(&self) -> u64 {
        self.invocations
    }

    pub fn model(&self) -> &FaultModel {
        &self.model
    }

    fn roll(&mut self) -> Roll {
        let index = self.invocations;
        self.invocations += 1;
        let targeted = match self.model.target {
            FaultTarget::EveryInvocation => true,
            FaultTarget::InvocationIndex(i) => index == i,
        };
        if !targeted || !self.rng.chance(self.model.epsilon) {
            return Roll::Clean;
        }
        if self.rng.chance(self.model.reset_prob) {
            Roll::Reset
        } else {
            Roll::Corrupt
        }
    }

    fn flip_bits(&mut self, value: u64, k: u32, domain: u64) -> u64 {
        let mut v = value;
        for _ in 0..k {
            v ^= 1u64 << self.rng.below_u64(64);
        }
        v % domain
    }

    fn corrupt_vector_bits(&mut self, mut v: Vec<u64>, k: u32, q: u64) -> Vec<u64> {
        let bits = (64 - (q - 1).leading_zeros()).max(1);
        for _ in 0..k {
            let pos = self.rng.below_u64(v.len() as u64) as usize;
            let bit = self.rng.below_u64(bits as u64);
            v[pos] = (v[pos] ^ (1u64 << bit)) % q;
        }
        v
    }

    /// Outcome of one scalar invocation with correct result `correct` in
    /// `[0, domain)`; `stale` is what a skipped store leaves behind.
    pub fn scalar(&mut self, stale: u64, correct: u64, domain: u64) -> Result<u64> {
        match self.roll() {
            Roll::Clean => Ok(correct),
            Roll::Reset => Err(Error::Reset),
            Roll::Corrupt => Ok(match self.model.mode {
                FaultMode::Skip => stale,
                FaultMode::CorruptBits(k) => self.flip_bits(correct, k, domain),
                FaultMode::CorruptUniform => self.rng.below_u64(domain),
                FaultMode::ZeroizeTwiddles(_) => correct,
            }),
        }
    }

    /// Outcome of one coefficient-vector invocation, entries in `[0, q)`.
    pub fn vector(&mut self, stale: &[u64], correct: Vec<u64>, q: u64) -> Result<Vec<u64>> {
        match self.roll() {
            Roll::Clean => Ok(correct),
            Roll::Reset => Err(Error::Reset),
            Roll::Corrupt => Ok(match self.model.mode {
                FaultMode::Skip => stale.to_vec(),
                FaultMode::CorruptBits(k) => self.corrupt_vector_bits(correct, k, q),
                FaultMode::CorruptUniform => {
                    (0..correct.len()).map(|_| self.rng.below_u64(q)).collect()
                }
                FaultMode::ZeroizeTwiddles(_) => correct,
            }),
        }
    }
}

/// Twiddle table with every constant from butterfly stage `stage` onward
/// zeroed; the single-fault model of a wiped constant buffer.
pub fn zeroized_twiddles(ring: &PolyRing, stage: u32) -> Vec<u64> {
    let mut tw = ring.twiddles().to_vec();
    let start = 1usize << stage.min(ring.stages());
    for w in tw.iter_mut().skip(start) {
        *w = 0;
    }
    tw
}

/// Wrap an arbitrary scalar-valued black box with the fault layer.
/// `stale` extracts the value a skipped store would leave visible.
pub fn wrap_faulty_scalar<'a, Q, P, S>(
    mut black_box: P,
    mut stale: S,
    domain: u64,
    injector: &'a mut FaultInjector,
) -> impl FnMut(&Q) -> Result<u64> + 'a
where
    P: FnMut(&Q) -> u64 + 'a,
    S: FnMut(&Q) -> u64 + 'a,
    Q: 'a,
{
    move |q| {
        let correct = black_box(q);
        injector.scalar(stale(q), correct, domain)
    }
}

/// Faulted reduction black box `P(x, R) = x mod R`; a skipped store
/// leaves the (word-truncated) operand visible.
pub fn faulty_mod<'a>(
    injector: &'a mut FaultInjector,
    ring: &'a RingParams,
) -> impl FnMut(&u128) -> Result<u64> + 'a {
    wrap_faulty_scalar(
        |&x: &u128| arith::mod_reduce(x as i128, ring),
        |&x| x as u64,
        ring.modulus(),
        injector,
    )
}

/// Faulted modular multiplication black box `P(x, y, R)`.
pub fn faulty_mod_mul<'a>(
    injector: &'a mut FaultInjector,
    ring: &'a RingParams,
) -> impl FnMut(&(u128, u128)) -> Result<u64> + 'a {
    wrap_faulty_scalar(
        |&(x, y): &(u128, u128)| arith::mod_mul(x, y, ring),
        |&(x, _)| x as u64,
        ring.modulus(),
        injector,
    )
}

/// Faulted modular exponentiation black box `P(a, x, R)` with fixed base.
pub fn faulty_mod_exp<'a>(
    injector: &'a mut FaultInjector,
    ring: &'a RingParams,
    base: u128,
) -> impl FnMut(&u128) -> Result<u64> + 'a {
    wrap_faulty_scalar(
        move |&x: &u128| arith::mod_exp_square_multiply(base, x, ring),
        move |_| base as u64,
        ring.modulus(),
        injector,
    )
}

/// Faulted schoolbook polynomial multiplication black box.
pub fn faulty_poly_mul<'a>(
    injector: &'a mut FaultInjector,
    ring: &'a PolyRing,
) -> impl FnMut(&(Vec<u64>, Vec<u64>)) -> Result<Vec<u64>> + 'a {
    move |(p, q)| {
        let correct = arith::poly_mul_schoolbook(p, q, ring)?;
        injector.vector(p, correct, ring.modulus())
    }
}

/// Faulted forward NTT black box. Twiddle zeroization applies inside the
/// transform, the faulted invocation running against the wiped table; the
/// other modes perturb the transform output.
pub fn faulty_ntt<'a>(
    injector: &'a mut FaultInjector,
    ring: &'a PolyRing,
) -> impl FnMut(&Vec<u64>) -> Result<Vec<u64>> + 'a {
    move |input| match injector.roll() {
        Roll::Clean => ntt_forward(input, ring),
        Roll::Reset => Err(Error::Reset),
        Roll::Corrupt => match injector.model.mode {
            FaultMode::ZeroizeTwiddles(stage) => {
                ntt_forward_with(input, ring, &zeroized_twiddles(ring, stage))
            }
            FaultMode::Skip => Ok(input.clone()),
            FaultMode::CorruptBits(k) => {
                let correct = ntt_forward(input, ring)?;
                Ok(injector.corrupt_vector_bits(correct, k, ring.modulus()))
            }
            FaultMode::CorruptUniform => {
                Ok((0..ring.degree()).map(|_| injector.rng.below_u64(ring.modulus())).collect())
            }
        },
    }
}

/// Outcome classes of one run, matching what a glitch rig observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Correct,
    Faulty,
    Reset,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Correct => "correct",
            Outcome::Faulty => "faulty",
            Outcome::Reset => "reset",
        }
    }
}

/// Exact-comparison classification: anything that is not the correct
/// output counts as a fault; a propagated reset counts as a reset.
pub fn classify_outcome<T: PartialEq>(result: &Result<T>, expected: &T) -> Outcome {
    match result {
        Ok(v) if v == expected => Outcome::Correct,
        Ok(_) => Outcome::Faulty,
        Err(Error::Reset) => Outcome::Reset,
        Err(_) => Outcome::Faulty,
    }
}

/// Monte-Carlo estimate of the single-shot success rate of one hiding
/// evaluation when every program invocation faults independently with
/// probability `epsilon`: the empirical side of the `1 - eps*c` bound.
///
/// Runs the reduction rule over a faulted reduction program on random
/// operands and returns the fraction of trials whose recombined answer
/// was exactly correct.
pub fn single_shot_success_rate(epsilon: f64, c: u32, trials: u32, seed: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParams("epsilon must lie in [0, 1]"));
    }
    if c < 2 || trials == 0 {
        return Err(Error::InvalidParams("need c >= 2 and at least one trial"));
    }
    let ring = RingParams::new(257)?;
    let mut input_rng = Prng::substream(seed, 0);
    let model =
        FaultModel::new(epsilon, FaultMode::CorruptUniform, FaultTarget::EveryInvocation, 0.0)?;
    let mut successes = 0u64;
    for trial in 0..trials {
        let x = input_rng.below_u128(ring.share_modulus());
        let expected = arith::mod_reduce(x as i128, &ring);
        let mut injector = FaultInjector::new(model, Prng::substream(seed, 2 * trial as u64 + 1));
        let mut split_rng = Prng::substream(seed, 2 * trial as u64 + 2);
        let mut p = faulty_mod(&mut injector, &ring);
        let got = c_secure_execute(&ModBasis { ring: &ring, x }, &mut p, c, &mut split_rng)?;
        if got == expected {
            successes += 1;
        }
    }
    Ok(successes as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring17() -> RingParams {
        RingParams::new(17).unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(FaultModel::new(1.5, FaultMode::Skip, FaultTarget::EveryInvocation, 0.0).is_err());
        assert!(
            FaultModel::new(0.5, FaultMode::CorruptBits(0), FaultTarget::EveryInvocation, 0.0)
                .is_err()
        );
        assert!(FaultModel::new(0.5, FaultMode::Skip, FaultTarget::EveryInvocation, 2.0).is_err());
    }

    #[test]
    fn zero_epsilon_is_identity() {
        let ring = RingParams::new(3329).unwrap();
        let mut injector = FaultInjector::new(FaultModel::disabled(), Prng::from_seed(1));
        let mut rng = Prng::from_seed(2);
        {
            let mut p = faulty_mod(&mut injector, &ring);
            for _ in 0..10_000 {
                let x = rng.below_u128(ring.share_modulus());
                assert_eq!(p(&x).unwrap(), arith::mod_reduce(x as i128, &ring));
            }
        }
        assert_eq!(injector.invocations(), 10_000);
    }

    #[test]
    fn uniform_corruption_collision_rate() {
        // eps = 1 with uniform redraw over Z_17: the output only matches
        // the correct value with probability 1/17 per trial.
        let ring = ring17();
        let model =
            FaultModel::new(1.0, FaultMode::CorruptUniform, FaultTarget::EveryInvocation, 0.0)
                .unwrap();
        let mut injector = FaultInjector::new(model, Prng::from_seed(3));
        let mut p = faulty_mod(&mut injector, &ring);
        let mut rng = Prng::from_seed(4);
        let trials = 10_000;
        let mut mismatches = 0u32;
        for _ in 0..trials {
            let x = rng.below_u128(ring.share_modulus());
            if p(&x).unwrap() != arith::mod_reduce(x as i128, &ring) {
                mismatches += 1;
            }
        }
        // Binomial(10^4, 16/17): mean 9411.8, sd 23.5; allow 5 sigma.
        let expected = trials as f64 * 16.0 / 17.0;
        let sd = (trials as f64 * (16.0 / 17.0) * (1.0 / 17.0)).sqrt();
        assert!((mismatches as f64 - expected).abs() < 5.0 * sd, "mismatches {mismatches}");
    }

    #[test]
    fn skip_semantics() {
        let ring = RingParams::new(12).unwrap();
        let model =
            FaultModel::new(1.0, FaultMode::Skip, FaultTarget::EveryInvocation, 0.0).unwrap();
        let mut injector = FaultInjector::new(model, Prng::from_seed(5));
        let mut p = faulty_mod(&mut injector, &ring);
        // x < R: the skipped store is indistinguishable from the result.
        assert_eq!(p(&7).unwrap(), 7);
        // x >= R: the stale input is visibly not the reduction.
        assert_eq!(p(&100).unwrap(), 100);
        assert_ne!(p(&100).unwrap(), arith::mod_reduce(100, &ring));
    }

    #[test]
    fn reset_probability_splits_triggered_faults() {
        let ring = ring17();
        let model =
            FaultModel::new(1.0, FaultMode::CorruptUniform, FaultTarget::EveryInvocation, 0.3)
                .unwrap();
        let mut injector = FaultInjector::new(model, Prng::from_seed(6));
        let mut resets = 0u32;
        let trials = 10_000;
        {
            let mut p = faulty_mod(&mut injector, &ring);
            for _ in 0..trials {
                if p(&5).is_err() {
                    resets += 1;
                }
            }
        }
        let expected = trials as f64 * 0.3;
        let sd = (trials as f64 * 0.3 * 0.7).sqrt();
        assert!((resets as f64 - expected).abs() < 5.0 * sd, "resets {resets}");
    }

    #[test]
    fn targeting_hits_only_the_indexed_invocation() {
        let ring = ring17();
        let model =
            FaultModel::new(1.0, FaultMode::CorruptUniform, FaultTarget::InvocationIndex(3), 0.0)
                .unwrap();
        let mut injector = FaultInjector::new(model, Prng::from_seed(7));
        let mut p = faulty_mod(&mut injector, &ring);
        let x = 4242u128;
        let correct = arith::mod_reduce(x as i128, &ring);
        for i in 0..10 {
            let got = p(&x).unwrap();
            if i == 3 {
                assert_ne!(got, correct, "invocation 3 must be faulted under eps=1");
            } else {
                assert_eq!(got, correct);
            }
        }
    }

    #[test]
    fn corrupt_bits_stays_in_domain() {
        let ring = RingParams::new(97).unwrap();
        let model =
            FaultModel::new(1.0, FaultMode::CorruptBits(3), FaultTarget::EveryInvocation, 0.0)
                .unwrap();
        let mut injector = FaultInjector::new(model, Prng::from_seed(8));
        let mut p = faulty_mod(&mut injector, &ring);
        for x in 0..1000u128 {
            assert!(p(&x).unwrap() < 97);
        }
    }

    #[test]
    fn zeroized_table_collapses_transform() {
        let ring = PolyRing::new(8, 17, 3).unwrap();
        let tw = zeroized_twiddles(&ring, 0);
        assert!(tw[1..].iter().all(|&w| w == 0));
        let input = vec![5, 1, 2, 3, 4, 5, 6, 7];
        let out = ntt_forward_with(&input, &ring, &tw).unwrap();
        // Every butterfly adds a zero product: all outputs equal input[0].
        assert!(out.iter().all(|&c| c == 5), "{out:?}");

        // Zeroizing only the last stage still perturbs but keeps diversity.
        let tw_last = zeroized_twiddles(&ring, 2);
        let out_last = ntt_forward_with(&input, &ring, &tw_last).unwrap();
        assert_ne!(out_last, ntt_forward(&input, &ring).unwrap());
        assert!(out_last.iter().collect::<std::collections::HashSet<_>>().len() > 1);
    }

    #[test]
    fn fault_events_are_uncorrelated_across_invocations() {
        // Lag-1 autocorrelation of the fault indicator within 3 sigma of 0.
        let ring = ring17();
        let model =
            FaultModel::new(0.2, FaultMode::CorruptUniform, FaultTarget::EveryInvocation, 0.0)
                .unwrap();
        let mut injector = FaultInjector::new(model, Prng::from_seed(9));
        let n = 100_000usize;
        let mut hits = Vec::with_capacity(n);
        {
            let mut p = faulty_mod(&mut injector, &ring);
            for _ in 0..n {
                // 20 reduces to 3; any other output means the fault fired.
                // A uniform redraw collides with the truth 1/17 of the time,
                // thinning the indicator identically at every position.
                hits.push(f64::from(p(&20).unwrap() != 3));
            }
        }
        let mean = hits.iter().sum::<f64>() / n as f64;
        let var = hits.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>() / n as f64;
        let mut cov = 0.0;
        for i in 1..n {
            cov += (hits[i] - mean) * (hits[i - 1] - mean);
        }
        cov /= (n - 1) as f64;
        let rho = cov / var;
        let sigma = 1.0 / (n as f64).sqrt();
        assert!(rho.abs() < 3.0 * sigma, "lag-1 autocorrelation {rho}");
    }

    #[test]
    fn classify_outcome_cases() {
        assert_eq!(classify_outcome(&Ok(5u64), &5), Outcome::Correct);
        assert_eq!(classify_outcome(&Ok(6u64), &5), Outcome::Faulty);
        assert_eq!(classify_outcome::<u64>(&Err(Error::Reset), &5), Outcome::Reset);
        assert_eq!(classify_outcome::<u64>(&Err(Error::NoMajority), &5), Outcome::Faulty);
    }

    #[test]
    fn success_rate_with_no_faults_is_one() {
        assert_eq!(single_shot_success_rate(0.0, 2, 2000, 1).unwrap(), 1.0);
    }
}
