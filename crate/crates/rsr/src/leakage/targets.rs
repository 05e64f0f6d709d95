//! TVLA assessment harness: fixed-Hamming-weight input classes driven
//! through probed operations, unprotected or protected, and scored with
//! SOST-windowed Welch's t.

use super::{
    build_class_vectors, probed_mod_exp_ladder, probed_mod_mul, probed_mod_reduce,
    probed_ntt_forward, simulate_trace, sost_poi, total_power_t, tvla_welch_t, SostReport,
    TTestReport, TraceMatrix,
};
use crate::arith::{PolyRing, RingParams};
use crate::protect::{
    protected_mod, protected_mod_exp, protected_mod_mul, protected_ntt, Protection,
};
use crate::rng::Prng;
use crate::{Error, Result};

/// Operations the leakage harness can assess.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvlaTarget {
    Mod,
    ModMul,
    ModExp,
    Ntt,
}

impl TvlaTarget {
    pub fn all() -> [TvlaTarget; 4] {
        [TvlaTarget::Mod, TvlaTarget::ModMul, TvlaTarget::ModExp, TvlaTarget::Ntt]
    }

    pub fn name(&self) -> &'static str {
        match self {
            TvlaTarget::Mod => "mod",
            TvlaTarget::ModMul => "mod-mul",
            TvlaTarget::ModExp => "mod-exp",
            TvlaTarget::Ntt => "ntt",
        }
    }
}

impl std::str::FromStr for TvlaTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TvlaTarget::all()
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownTarget(s.to_string()))
    }
}

/// Class words are 32-bit; the scalar targets run in the Mersenne ring
/// 2^31 - 1 whose widened share domain (2^39) covers them.
const WORD_BITS: u32 = 32;
const SCALAR_MODULUS: u64 = 2_147_483_647;
/// Fixed second operand of the multiplication target.
const MUL_OPERAND: u64 = 0x1234_5678;
/// Fixed public base of the exponentiation target.
const EXP_BASE: u64 = 3;
/// Ladder budget covering the exponent share domain phi(R) * 2^8 < 2^39.
const EXP_BITS: u32 = 39;

struct Harness {
    scalar_ring: RingParams,
    poly_ring: PolyRing,
}

impl Harness {
    fn new() -> Result<Self> {
        Ok(Harness {
            scalar_ring: RingParams::prime(SCALAR_MODULUS)?,
            poly_ring: PolyRing::new(8, 17, 3)?,
        })
    }

    fn nibble_poly(&self, word: u64) -> Vec<u64> {
        (0..self.poly_ring.degree()).map(|i| (word >> (4 * i)) & 0xf).collect()
    }

    fn run(
        &self,
        target: TvlaTarget,
        word: u64,
        protection: &Protection,
        rec: &mut super::TraceRecorder,
        rng: &mut Prng,
    ) -> Result<()> {
        match target {
            TvlaTarget::Mod => {
                let ring = &self.scalar_ring;
                match protection {
                    Protection::Off => {
                        probed_mod_reduce(word as u128, ring, rec);
                    }
                    Protection::On(params) => {
                        let mut p = |x: &u128| Ok(probed_mod_reduce(*x, ring, rec));
                        protected_mod(&mut p, ring, word as u128, params, rng)?;
                    }
                }
            }
            TvlaTarget::ModMul => {
                let ring = &self.scalar_ring;
                match protection {
                    Protection::Off => {
                        probed_mod_mul(word as u128, MUL_OPERAND as u128, ring, rec);
                    }
                    Protection::On(params) => {
                        let mut p =
                            |q: &(u128, u128)| Ok(probed_mod_mul(q.0, q.1, ring, rec));
                        protected_mod_mul(
                            &mut p,
                            ring,
                            word as u128,
                            MUL_OPERAND as u128,
                            params,
                            rng,
                        )?;
                    }
                }
            }
            TvlaTarget::ModExp => {
                // The class word is the exponent; the ladder is the program.
                let ring = &self.scalar_ring;
                match protection {
                    Protection::Off => {
                        probed_mod_exp_ladder(EXP_BASE as u128, word as u128, EXP_BITS, ring, rec)?;
                    }
                    Protection::On(params) => {
                        let mut p = |x: &u128| {
                            probed_mod_exp_ladder(EXP_BASE as u128, *x, EXP_BITS, ring, rec)
                        };
                        protected_mod_exp(&mut p, ring, EXP_BASE as u128, word as u128, params, rng)?;
                    }
                }
            }
            TvlaTarget::Ntt => {
                let ring = &self.poly_ring;
                let input = self.nibble_poly(word);
                match protection {
                    Protection::Off => {
                        probed_ntt_forward(&input, ring, rec)?;
                    }
                    Protection::On(params) => {
                        let mut p = |v: &Vec<u64>| probed_ntt_forward(v, ring, rec);
                        protected_ntt(&mut p, &input, ring, params, rng)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn class_matrix(
        &self,
        target: TvlaTarget,
        label: &str,
        words: &[u64],
        protection: &Protection,
        sigma: f64,
        seed: u64,
    ) -> Result<TraceMatrix> {
        let mut rows = Vec::with_capacity(words.len());
        for (i, &word) in words.iter().enumerate() {
            let mut noise_rng = Prng::substream(seed, 2 * i as u64);
            let mut prot_rng = Prng::substream(seed, 2 * i as u64 + 1);
            rows.push(simulate_trace(
                |rec| self.run(target, word, protection, rec, &mut prot_rng),
                sigma,
                &mut noise_rng,
            )?);
        }
        TraceMatrix::from_rows(label, sigma, rows)
    }
}

/// Full assessment of one target arm.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    pub target: String,
    pub protected: bool,
    pub n_traces: usize,
    pub sigma: f64,
    pub ttest: TTestReport,
    pub sost: SostReport,
    /// Welch's t on per-trace total power, the whole-operation
    /// distinguishability statistic.
    pub total_power_t: f64,
}

impl LeakageReport {
    pub fn verdict(&self) -> &'static str {
        if self.ttest.leak {
            "leak"
        } else {
            "no-leak"
        }
    }

    /// One-line structured summary.
    pub fn text(&self) -> String {
        format!(
            "target={} protected={} max_t={:.4} verdict={} n_traces={} sigma={} \
             max_t_global={:.4} total_power_t={:.4}\n",
            self.target,
            self.protected,
            self.ttest.max_t_windowed,
            self.verdict(),
            self.n_traces,
            self.sigma,
            self.ttest.max_t_global,
            self.total_power_t
        )
    }
}

/// Build the two fixed-weight classes, trace the target over both, and
/// score distinguishability. Protected runs should use a repetition count
/// of 1; hiding, not correction, is what the trace sees.
pub fn run_tvla_assessment(
    target: TvlaTarget,
    protection: &Protection,
    traces_per_class: usize,
    sigma: f64,
    hw_a: u32,
    hw_b: u32,
    seed: u64,
) -> Result<LeakageReport> {
    let harness = Harness::new()?;
    let mut class_rng = Prng::substream(seed, 0xc1a5);
    let (words_a, words_b) =
        build_class_vectors(hw_a, hw_b, traces_per_class, WORD_BITS, &mut class_rng)?;
    let a = harness.class_matrix(target, "class-a", &words_a, protection, sigma, seed ^ 0xa)?;
    let b = harness.class_matrix(target, "class-b", &words_b, protection, sigma, seed ^ 0xb)?;
    let ttest = tvla_welch_t(&a, &b)?;
    let sost = sost_poi(&[&a, &b])?;
    Ok(LeakageReport {
        target: target.name().to_string(),
        protected: matches!(protection, Protection::On(_)),
        n_traces: traces_per_class,
        sigma,
        total_power_t: total_power_t(&a, &b),
        ttest,
        sost,
    })
}
