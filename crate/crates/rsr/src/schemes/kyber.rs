//! CPA-style lattice key generation in the Kyber mold, built to exercise
//! the protected NTT: `t_hat = A_hat o NTT(s) + NTT(e)` over a module of
//! small-noise polynomials, with the secret transform `NTT(s)` being the
//! operation the twiddle-zeroization fault attack targets.
//!
//! The samplers are a documented counter-based expansion of the two seeds,
//! not the standardized XOF pipeline, and the ring runs the Kyber modulus
//! q = 3329 at degree 128 (the largest power of two whose complete
//! negacyclic NTT exists mod 3329, since 2n must divide q - 1; the
//! standard degree-256 ring only admits an incomplete transform). The
//! countermeasure, the attack, and the evaluation are insensitive to both
//! choices.

use crate::arith::{self, ntt_forward, PolyRing};
use crate::fault::{faulty_ntt, FaultInjector, FaultMode, FaultModel, FaultTarget};
use crate::protect::{protected_ntt, Protection, SecurityParams};
use crate::rng::Prng;
use crate::{Error, Result};

/// Module and ring parameters plus the two sampling seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KyberParams {
    pub degree: usize,
    pub modulus: u64,
    pub psi: u64,
    pub rank: usize,
    pub eta: u32,
    pub seed_a: u64,
    pub seed_b: u64,
}

impl KyberParams {
    /// Kyber-flavored defaults: q = 3329, psi = 17, rank 2, eta 2.
    pub fn standard(seed_a: u64, seed_b: u64) -> Self {
        KyberParams { degree: 128, modulus: 3329, psi: 17, rank: 2, eta: 2, seed_a, seed_b }
    }

    pub fn ring(&self) -> Result<PolyRing> {
        if self.rank == 0 || self.eta == 0 {
            return Err(Error::InvalidParams("rank and eta must be at least 1"));
        }
        PolyRing::new(self.degree, self.modulus, self.psi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KyberPublicKey {
    pub seed_a: u64,
    /// `rank` polynomials in the transform domain.
    pub t_hat: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KyberSecretKey {
    /// `NTT(s)`, one polynomial per module row.
    pub s_hat: Vec<Vec<u64>>,
}

/// Uniform transform-domain polynomial from a derived stream.
fn expand_uniform(ring: &PolyRing, stream: &mut Prng) -> Vec<u64> {
    (0..ring.degree()).map(|_| stream.below_u64(ring.modulus())).collect()
}

/// Centered binomial sample of width eta, stored as residues mod q.
fn sample_cbd(ring: &PolyRing, eta: u32, stream: &mut Prng) -> Vec<u64> {
    let q = ring.modulus();
    (0..ring.degree())
        .map(|_| {
            let mut acc: i64 = 0;
            for _ in 0..eta {
                acc += (stream.next_u64() & 1) as i64;
                acc -= (stream.next_u64() & 1) as i64;
            }
            ((acc.rem_euclid(q as i64)) as u64) % q
        })
        .collect()
}

/// The public matrix `A_hat`, expanded deterministically from `seed_a`
/// directly in the transform domain (row-major rank x rank).
pub fn expand_matrix(params: &KyberParams, ring: &PolyRing) -> Vec<Vec<Vec<u64>>> {
    (0..params.rank)
        .map(|i| {
            (0..params.rank)
                .map(|j| {
                    let mut stream =
                        Prng::substream(params.seed_a, (i * params.rank + j) as u64);
                    expand_uniform(ring, &mut stream)
                })
                .collect()
        })
        .collect()
}

/// The secret and error vectors in the coefficient domain.
pub fn sample_secret_and_error(
    params: &KyberParams,
    ring: &PolyRing,
) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    let s = (0..params.rank)
        .map(|j| {
            let mut stream = Prng::substream(params.seed_b, j as u64);
            sample_cbd(ring, params.eta, &mut stream)
        })
        .collect();
    let e = (0..params.rank)
        .map(|i| {
            let mut stream = Prng::substream(params.seed_b, (params.rank + i) as u64);
            sample_cbd(ring, params.eta, &mut stream)
        })
        .collect();
    (s, e)
}

fn run_ntt(
    input: &[u64],
    ring: &PolyRing,
    protection: &Protection,
    fault: &mut Option<&mut FaultInjector>,
    rng: &mut Prng,
) -> Result<Vec<u64>> {
    match fault {
        Some(injector) => {
            let mut p = faulty_ntt(injector, ring);
            match protection {
                Protection::Off => p(&input.to_vec()),
                Protection::On(params) => protected_ntt(&mut p, input, ring, params, rng),
            }
        }
        None => {
            let mut p = |v: &Vec<u64>| ntt_forward(v, ring);
            match protection {
                Protection::Off => p(&input.to_vec()),
                Protection::On(params) => protected_ntt(&mut p, input, ring, params, rng),
            }
        }
    }
}

/// Key generation. `protection` guards the secret transform `NTT(s)`;
/// `protect_both` extends the same guard to the error transform `NTT(e)`,
/// which is otherwise left bare (its transform is not the attack target,
/// but the asymmetry is a real exposure, hence the flag).
pub fn kyber_keygen(
    params: &KyberParams,
    protection: &Protection,
    protect_both: bool,
    mut fault: Option<&mut FaultInjector>,
    rng: &mut Prng,
) -> Result<(KyberPublicKey, KyberSecretKey)> {
    let ring = params.ring()?;
    let a_hat = expand_matrix(params, &ring);
    let (s, e) = sample_secret_and_error(params, &ring);

    let mut s_hat = Vec::with_capacity(params.rank);
    for s_j in &s {
        s_hat.push(run_ntt(s_j, &ring, protection, &mut fault, rng)?);
    }
    let e_protection = if protect_both { *protection } else { Protection::Off };
    let mut e_hat = Vec::with_capacity(params.rank);
    for e_i in &e {
        e_hat.push(run_ntt(e_i, &ring, &e_protection, &mut fault, rng)?);
    }

    let mut t_hat = Vec::with_capacity(params.rank);
    for i in 0..params.rank {
        let mut acc = e_hat[i].clone();
        for j in 0..params.rank {
            let prod = arith::poly_pointwise(&a_hat[i][j], &s_hat[j], &ring);
            acc = arith::poly_add(&acc, &prod, &ring);
        }
        t_hat.push(acc);
    }

    Ok((KyberPublicKey { seed_a: params.seed_a, t_hat }, KyberSecretKey { s_hat }))
}

/// Flatten a key pair to one coefficient vector for outcome comparison.
pub fn flatten_keypair(pk: &KyberPublicKey, sk: &KyberSecretKey) -> Vec<u64> {
    let mut out = Vec::new();
    for p in &pk.t_hat {
        out.extend_from_slice(p);
    }
    for p in &sk.s_hat {
        out.extend_from_slice(p);
    }
    out
}

/// Report of one twiddle-zeroization run against key generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwiddleAttackReport {
    /// Whether the attacked run's secret transform differs from the truth.
    pub s_hat_corrupted: bool,
    /// Distinct coefficient values in the correct `NTT(s)`.
    pub distinct_correct: usize,
    /// Distinct coefficient values in the attacked run's `NTT(s)`; the
    /// collapse of diffusion shows up as a sharp drop here.
    pub distinct_faulty: usize,
    /// Whether the attacked run still produced the correct secret key.
    pub restored: bool,
}

fn distinct_count(polys: &[Vec<u64>]) -> usize {
    let mut values: Vec<u64> = polys.iter().flatten().copied().collect();
    values.sort_unstable();
    values.dedup();
    values.len()
}

/// Zeroize every twiddle constant of exactly one NTT invocation (the first
/// one, which computes the secret transform) and compare against the
/// fault-free run.
pub fn twiddle_zeroization_attack(
    params: &KyberParams,
    protection: &Protection,
    rng: &mut Prng,
) -> Result<TwiddleAttackReport> {
    let (_, sk_correct) = kyber_keygen(params, protection, false, None, rng)?;

    let model = FaultModel::new(
        1.0,
        FaultMode::ZeroizeTwiddles(0),
        FaultTarget::InvocationIndex(0),
        0.0,
    )?;
    let mut injector = FaultInjector::new(model, Prng::substream(params.seed_b, 0xfa617));
    let (_, sk_attacked) = kyber_keygen(params, protection, false, Some(&mut injector), rng)?;

    Ok(TwiddleAttackReport {
        s_hat_corrupted: sk_attacked.s_hat != sk_correct.s_hat,
        distinct_correct: distinct_count(&sk_correct.s_hat),
        distinct_faulty: distinct_count(&sk_attacked.s_hat),
        restored: sk_attacked.s_hat == sk_correct.s_hat,
    })
}

/// Default protection setting used in the demos: c = 2 with ten nominal
/// repetitions (bumped to the next odd count).
pub fn demo_protection() -> SecurityParams {
    SecurityParams::new(2, 10).expect("static parameters are valid")
}
