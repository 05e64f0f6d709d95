//! Grid fault campaigns: sweep (glitch offset, glitch intensity) cells,
//! run the target several times per cell under an independently seeded
//! fault stream, and tally correct / faulty / reset outcomes.

use super::{
    classify_outcome, faulty_mod, faulty_mod_exp, faulty_mod_mul, faulty_ntt, faulty_poly_mul,
    FaultInjector, FaultMode, FaultModel, FaultTarget, Outcome,
};
use crate::arith::{self, PolyRing, RingParams};
use crate::protect::{
    protected_mod, protected_mod_exp, protected_mod_mul, protected_ntt, protected_poly_mul,
    Protection, SecurityParams,
};
use crate::rng::Prng;
use crate::schemes::{flatten_keypair, kyber_keygen, rsa_crt_sign, KyberParams, RsaKey};
use crate::{Error, Result};

/// The sweep: which invocation indices are targeted, which fault
/// probabilities are applied, and how many runs land on each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignGrid {
    pub offsets: Vec<u64>,
    pub intensities: Vec<f64>,
    pub repetitions: u32,
}

impl CampaignGrid {
    /// 16 offsets x 16 log-spaced intensities in [1e-3, 0.5] x 5 runs:
    /// 1280 data points per campaign.
    pub fn standard() -> Self {
        CampaignGrid::with_dims(16, 16, 5)
    }

    /// Same spacing rules with custom dimensions.
    pub fn with_dims(offsets: usize, intensities: usize, repetitions: u32) -> Self {
        let lo = 1e-3f64.ln();
        let hi = 0.5f64.ln();
        let steps = (intensities.max(2) - 1) as f64;
        CampaignGrid {
            offsets: (0..offsets as u64).collect(),
            intensities: (0..intensities)
                .map(|i| (lo + (hi - lo) * i as f64 / steps).exp())
                .collect(),
            repetitions,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.offsets.is_empty() || self.intensities.is_empty() || self.repetitions == 0 {
            return Err(Error::InvalidParams("campaign grid must be non-empty"));
        }
        if self.intensities.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
            return Err(Error::InvalidParams("intensities must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn points(&self) -> usize {
        self.offsets.len() * self.intensities.len() * self.repetitions as usize
    }
}

impl Default for CampaignGrid {
    fn default() -> Self {
        CampaignGrid::standard()
    }
}

/// Operations the campaign machinery knows how to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CampaignTarget {
    Mod,
    ModMul,
    ModExp,
    PolyMul,
    Ntt,
    RsaCrt,
    KyberKeygen,
}

impl CampaignTarget {
    pub fn all() -> [CampaignTarget; 7] {
        [
            CampaignTarget::Mod,
            CampaignTarget::ModMul,
            CampaignTarget::ModExp,
            CampaignTarget::PolyMul,
            CampaignTarget::Ntt,
            CampaignTarget::RsaCrt,
            CampaignTarget::KyberKeygen,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            CampaignTarget::Mod => "mod",
            CampaignTarget::ModMul => "mod-mul",
            CampaignTarget::ModExp => "mod-exp",
            CampaignTarget::PolyMul => "poly-mul",
            CampaignTarget::Ntt => "ntt",
            CampaignTarget::RsaCrt => "rsa-crt",
            CampaignTarget::KyberKeygen => "kyber-keygen",
        }
    }
}

impl std::str::FromStr for CampaignTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CampaignTarget::all()
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownTarget(s.to_string()))
    }
}

/// Fixed per-target instances, derived deterministically from the seed so
/// every cell of a campaign (and both arms of a paired campaign) sees the
/// same inputs.
#[derive(Debug, Clone)]
pub struct TargetInputs {
    scalar_ring: RingParams,
    mod_x: u128,
    mul_x: u128,
    mul_y: u128,
    exp_ring: RingParams,
    exp_base: u64,
    exp_x: u128,
    poly_ring: PolyRing,
    poly_a: Vec<u64>,
    poly_b: Vec<u64>,
    ntt_input: Vec<u64>,
    rsa_key: RsaKey,
    rsa_msg: u64,
    kyber: KyberParams,
}

impl TargetInputs {
    pub fn derive(seed: u64) -> Result<Self> {
        let mut rng = Prng::substream(seed, 0x1297);
        let scalar_ring = RingParams::new(3329)?;
        let exp_ring = RingParams::prime(65_537)?;
        let poly_ring = PolyRing::new(8, 17, 3)?;
        let mod_x = rng.below_u128(scalar_ring.share_modulus());
        let mul_x = rng.below_u128(scalar_ring.share_modulus());
        let mul_y = rng.below_u128(scalar_ring.share_modulus());
        let exp_base = loop {
            let cand = 2 + rng.below_u64(exp_ring.modulus() - 2);
            if arith::gcd_u64(cand, exp_ring.modulus()) == 1 {
                break cand;
            }
        };
        let exp_x =
            rng.below_u128(exp_ring.exponent_share_modulus().expect("prime ring has a totient"));
        let uniform_poly = |rng: &mut Prng| -> Vec<u64> {
            (0..poly_ring.degree()).map(|_| rng.below_u64(poly_ring.modulus())).collect()
        };
        let poly_a = uniform_poly(&mut rng);
        let poly_b = uniform_poly(&mut rng);
        let ntt_input = uniform_poly(&mut rng);
        let rsa_key = RsaKey::generate(31, &mut rng)?;
        let rsa_msg = rng.below_u64(rsa_key.n);
        let kyber = KyberParams::standard(rng.next_u64(), rng.next_u64());
        Ok(TargetInputs {
            scalar_ring,
            mod_x,
            mul_x,
            mul_y,
            exp_ring,
            exp_base,
            exp_x,
            poly_ring,
            poly_a,
            poly_b,
            ntt_input,
            rsa_key,
            rsa_msg,
            kyber,
        })
    }
}

fn execute_target(
    target: CampaignTarget,
    inputs: &TargetInputs,
    protection: &Protection,
    injector: &mut FaultInjector,
    rng: &mut Prng,
) -> Result<Vec<u64>> {
    match target {
        CampaignTarget::Mod => {
            let ring = &inputs.scalar_ring;
            let mut p = faulty_mod(injector, ring);
            let v = match protection {
                Protection::Off => p(&inputs.mod_x)?,
                Protection::On(params) => {
                    protected_mod(&mut p, ring, inputs.mod_x, params, rng)?
                }
            };
            Ok(vec![v])
        }
        CampaignTarget::ModMul => {
            let ring = &inputs.scalar_ring;
            let mut p = faulty_mod_mul(injector, ring);
            let v = match protection {
                Protection::Off => p(&(inputs.mul_x, inputs.mul_y))?,
                Protection::On(params) => {
                    protected_mod_mul(&mut p, ring, inputs.mul_x, inputs.mul_y, params, rng)?
                }
            };
            Ok(vec![v])
        }
        CampaignTarget::ModExp => {
            let ring = &inputs.exp_ring;
            let mut p = faulty_mod_exp(injector, ring, inputs.exp_base as u128);
            let v = match protection {
                Protection::Off => p(&inputs.exp_x)?,
                Protection::On(params) => protected_mod_exp(
                    &mut p,
                    ring,
                    inputs.exp_base as u128,
                    inputs.exp_x,
                    params,
                    rng,
                )?,
            };
            Ok(vec![v])
        }
        CampaignTarget::PolyMul => {
            let ring = &inputs.poly_ring;
            let mut p = faulty_poly_mul(injector, ring);
            match protection {
                Protection::Off => p(&(inputs.poly_a.clone(), inputs.poly_b.clone())),
                Protection::On(params) => {
                    protected_poly_mul(&mut p, &inputs.poly_a, &inputs.poly_b, ring, params, rng)
                }
            }
        }
        CampaignTarget::Ntt => {
            let ring = &inputs.poly_ring;
            let mut p = faulty_ntt(injector, ring);
            match protection {
                Protection::Off => p(&inputs.ntt_input),
                Protection::On(params) => {
                    protected_ntt(&mut p, &inputs.ntt_input, ring, params, rng)
                }
            }
        }
        CampaignTarget::RsaCrt => {
            let s = rsa_crt_sign(inputs.rsa_msg, &inputs.rsa_key, protection, Some(injector), rng)?;
            Ok(vec![s])
        }
        CampaignTarget::KyberKeygen => {
            let (pk, sk) = kyber_keygen(&inputs.kyber, protection, false, Some(injector), rng)?;
            Ok(flatten_keypair(&pk, &sk))
        }
    }
}

/// One classified run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignRow {
    pub offset: u64,
    pub intensity: f64,
    pub rep: u32,
    pub outcome: Outcome,
}

/// All runs of one campaign arm plus the structural facts needed to read
/// them: how many invocations one run makes (offsets wrap around this
/// count, modeling a glitch retriggering across the run's timeline).
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub target: String,
    pub protected: bool,
    pub invocations_per_run: u64,
    pub rows: Vec<CampaignRow>,
}

impl CampaignReport {
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for row in &self.rows {
            match row.outcome {
                Outcome::Correct => c.0 += 1,
                Outcome::Faulty => c.1 += 1,
                Outcome::Reset => c.2 += 1,
            }
        }
        c
    }

    pub fn faulty_count(&self) -> usize {
        self.counts().1
    }

    /// Heatmap CSV, one row per run: `offset,intensity,rep,outcome`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("offset,intensity,rep,outcome\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.6},{},{}\n",
                row.offset,
                row.intensity,
                row.rep,
                row.outcome.label()
            ));
        }
        out
    }
}

/// Run one campaign arm. Every cell derives an independent fault stream
/// and an independent protection stream from `(seed, cell index)`, so the
/// report is a pure function of its arguments.
pub fn run_fault_campaign(
    target: CampaignTarget,
    grid: &CampaignGrid,
    mode: FaultMode,
    reset_prob: f64,
    protection: &Protection,
    seed: u64,
) -> Result<CampaignReport> {
    grid.validate()?;
    let inputs = TargetInputs::derive(seed)?;
    // Cell streams are shared between the unprotected and protected arms
    // of one target (paired campaigns) but distinct across targets.
    let stream_base = Prng::substream(seed, 0x7a60 + target as u64).next_u64();

    // Fault-free pass: the expected output and the invocation count per run.
    let mut dry = FaultInjector::new(FaultModel::disabled(), Prng::substream(stream_base, 1));
    let mut dry_rng = Prng::substream(stream_base, 2);
    let expected = execute_target(target, &inputs, protection, &mut dry, &mut dry_rng)?;
    let invocations_per_run = dry.invocations().max(1);

    let mut rows = Vec::with_capacity(grid.points());
    for (oi, &offset) in grid.offsets.iter().enumerate() {
        for (ii, &intensity) in grid.intensities.iter().enumerate() {
            for rep in 0..grid.repetitions {
                let cell = ((oi * grid.intensities.len() + ii) as u64) * grid.repetitions as u64
                    + rep as u64;
                let model = FaultModel::new(
                    intensity,
                    mode,
                    FaultTarget::InvocationIndex(offset % invocations_per_run),
                    reset_prob,
                )?;
                let mut injector =
                    FaultInjector::new(model, Prng::substream(stream_base, 3 + 2 * cell));
                let mut run_rng = Prng::substream(stream_base, 4 + 2 * cell);
                let result =
                    execute_target(target, &inputs, protection, &mut injector, &mut run_rng);
                rows.push(CampaignRow {
                    offset,
                    intensity,
                    rep,
                    outcome: classify_outcome(&result, &expected),
                });
            }
        }
    }
    Ok(CampaignReport {
        target: target.name().to_string(),
        protected: matches!(protection, Protection::On(_)),
        invocations_per_run,
        rows,
    })
}

/// Unprotected and protected arms under the same seed, with the headline
/// reduction figure.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedCampaignReport {
    pub unprotected: CampaignReport,
    pub protected: CampaignReport,
}

impl PairedCampaignReport {
    /// `1 - protected_faulty / unprotected_faulty`, as a percentage;
    /// undefined when the unprotected arm never faulted.
    pub fn reduction_pct(&self) -> Option<f64> {
        let u = self.unprotected.faulty_count();
        if u == 0 {
            return None;
        }
        Some(100.0 * (1.0 - self.protected.faulty_count() as f64 / u as f64))
    }

    /// Line-delimited summary: target, both fault counts, reduction.
    pub fn summary_text(&self) -> String {
        let reduction = match self.reduction_pct() {
            Some(v) => format!("{v:.2}"),
            None => "na".to_string(),
        };
        format!(
            "target={} unprotected_faulty={} protected_faulty={} reduction_pct={}\n",
            self.unprotected.target,
            self.unprotected.faulty_count(),
            self.protected.faulty_count(),
            reduction
        )
    }
}

pub fn run_paired_fault_campaign(
    target: CampaignTarget,
    grid: &CampaignGrid,
    mode: FaultMode,
    reset_prob: f64,
    params: &SecurityParams,
    seed: u64,
) -> Result<PairedCampaignReport> {
    Ok(PairedCampaignReport {
        unprotected: run_fault_campaign(target, grid, mode, reset_prob, &Protection::Off, seed)?,
        protected: run_fault_campaign(
            target,
            grid,
            mode,
            reset_prob,
            &Protection::On(*params),
            seed,
        )?,
    })
}
