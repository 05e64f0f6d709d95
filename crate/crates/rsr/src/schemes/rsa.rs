//! RSA-CRT signing at desk scale (31-bit primes) and the Bellcore
//! fault-attack oracle against it.
//!
//! The attack needs no large parameters: one faulted half-exponentiation
//! makes `gcd(S_faulty - S_correct, N)` a prime factor of `N` regardless of
//! key size, so small primes keep every intermediate in exact 128-bit
//! arithmetic without changing what is being demonstrated.

use crate::arith::{self, RingParams};
use crate::fault::{faulty_mod_exp, FaultInjector};
use crate::protect::{protected_mod_exp, Protection};
use crate::rng::Prng;
use crate::{Error, Result};

/// RSA key with the precomputed CRT constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaKey {
    pub p: u64,
    pub q: u64,
    pub n: u64,
    pub e: u64,
    pub d: u64,
    /// `d mod (p - 1)`
    pub d_p: u64,
    /// `d mod (q - 1)`
    pub d_q: u64,
    /// `q^{-1} mod p`
    pub u: u64,
}

/// Extended Euclid inverse for the (even, composite) totient used in key
/// setup; the library's two inverse routines cover prime and odd moduli.
fn mod_inverse_euclid(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        let tr = r;
        r = old_r - quot * r;
        old_r = tr;
        let ts = s;
        s = old_s - quot * s;
        old_s = ts;
    }
    if old_r != 1 {
        return None;
    }
    Some((((old_s % m as i128) + m as i128) % m as i128) as u64)
}

impl RsaKey {
    /// Build a key from two primes with `p > q` and public exponent `e`.
    pub fn from_primes(p: u64, q: u64, e: u64) -> Result<Self> {
        if !arith::is_prime(p) || !arith::is_prime(q) || p == q {
            return Err(Error::InvalidParams("p and q must be distinct primes"));
        }
        if p <= q {
            return Err(Error::InvalidParams("convention requires p > q"));
        }
        if p >= 1 << 31 || q >= 1 << 31 {
            return Err(Error::InvalidParams("primes are capped at 31 bits"));
        }
        let phi = (p - 1) * (q - 1);
        let d = mod_inverse_euclid(e % phi, phi)
            .ok_or(Error::InvalidParams("e must be invertible mod phi(N)"))?;
        let ring_p = RingParams::prime(p)?;
        let u = arith::mod_inverse_fermat(q as u128, &ring_p)?;
        Ok(RsaKey { p, q, n: p * q, e, d, d_p: d % (p - 1), d_q: d % (q - 1), u })
    }

    /// Naive random key generation: sample odd candidates of the given bit
    /// length until two distinct suitable primes turn up.
    pub fn generate(prime_bits: u32, rng: &mut Prng) -> Result<Self> {
        if !(16..=31).contains(&prime_bits) {
            return Err(Error::InvalidParams("prime size must lie in 16..=31 bits"));
        }
        let e = 65_537u64;
        let lo = 1u64 << (prime_bits - 1);
        let draw_prime = |rng: &mut Prng| loop {
            let cand = lo | rng.below_u64(lo) | 1;
            if arith::is_prime(cand) && !(cand - 1).is_multiple_of(e) {
                return cand;
            }
        };
        loop {
            let a = draw_prime(rng);
            let b = draw_prime(rng);
            if a == b {
                continue;
            }
            let (p, q) = if a > b { (a, b) } else { (b, a) };
            if let Ok(key) = RsaKey::from_primes(p, q, e) {
                return Ok(key);
            }
        }
    }

    pub fn ring_p(&self) -> RingParams {
        RingParams::prime(self.p).expect("validated at construction")
    }

    pub fn ring_q(&self) -> RingParams {
        RingParams::prime(self.q).expect("validated at construction")
    }

    pub fn ring_n(&self) -> RingParams {
        RingParams::new(self.n).expect("validated at construction")
    }
}

fn half_exponentiation<P>(
    black_box: &mut P,
    ring: &RingParams,
    base: u64,
    exp: u64,
    protection: &Protection,
    rng: &mut Prng,
) -> Result<u64>
where
    P: FnMut(&u128) -> Result<u64>,
{
    match protection {
        Protection::Off => black_box(&(exp as u128)),
        Protection::On(params) => {
            if base.is_multiple_of(ring.modulus()) {
                // gcd(base, prime) != 1 only for multiples of the prime;
                // the power is then 0 without touching the exponent.
                return Ok(0);
            }
            protected_mod_exp(black_box, ring, base as u128, exp as u128, params, rng)
        }
    }
}

fn run_half(
    ring: &RingParams,
    base: u64,
    exp: u64,
    protection: &Protection,
    fault: &mut Option<&mut FaultInjector>,
    rng: &mut Prng,
) -> Result<u64> {
    match fault {
        Some(injector) => {
            let mut p = faulty_mod_exp(injector, ring, base as u128);
            half_exponentiation(&mut p, ring, base, exp, protection, rng)
        }
        None => {
            let mut p = |&x: &u128| Ok(arith::mod_exp_square_multiply(base as u128, x, ring));
            half_exponentiation(&mut p, ring, base, exp, protection, rng)
        }
    }
}

/// CRT signature generation: the two half exponentiations (optionally
/// protected, optionally running under a fault injector) recombined by
/// Garner's formula with the negative-difference adjustment.
pub fn rsa_crt_sign(
    message: u64,
    key: &RsaKey,
    protection: &Protection,
    mut fault: Option<&mut FaultInjector>,
    rng: &mut Prng,
) -> Result<u64> {
    if message >= key.n {
        return Err(Error::InvalidParams("message must lie below the modulus"));
    }
    let ring_p = key.ring_p();
    let ring_q = key.ring_q();
    let s_p = run_half(&ring_p, message % key.p, key.d_p, protection, &mut fault, rng)?;
    let s_q = run_half(&ring_q, message % key.q, key.d_q, protection, &mut fault, rng)?;

    let mut t = s_p as i128 - s_q as i128;
    if t < 0 {
        t += key.p as i128;
    }
    let correction = arith::mod_mul(t as u128, key.u as u128, &ring_p);
    Ok(s_q + correction * key.q)
}

/// Signature check `S^e mod N == m`.
pub fn rsa_verify(signature: u64, message: u64, key: &RsaKey) -> bool {
    let ring_n = key.ring_n();
    arith::mod_exp_square_multiply(signature as u128, key.e as u128, &ring_n)
        == message % key.n
}

/// Factor recovery from a correct/faulty signature pair:
/// `gcd((S_faulty - S_correct) mod N, N)`. Returns the factor when the gcd
/// is a proper divisor, `None` otherwise.
pub fn bellcore_recover_factor(s_correct: u64, s_faulty: u64, n: u64) -> Option<u64> {
    let diff = ((s_faulty as i128 - s_correct as i128).rem_euclid(n as i128)) as u64;
    let g = arith::gcd_u64(diff, n);
    if g != 1 && g != n {
        Some(g)
    } else {
        None
    }
}

/// Single-signature variant when the signed message is known:
/// `gcd((S_faulty^e - m) mod N, N)`.
pub fn bellcore_recover_factor_from_message(
    message: u64,
    s_faulty: u64,
    e: u64,
    n: u64,
) -> Option<u64> {
    let ring_n = RingParams::new(n).ok()?;
    let pow = arith::mod_exp_square_multiply(s_faulty as u128, e as u128, &ring_n);
    let diff = ((pow as i128 - message as i128).rem_euclid(n as i128)) as u64;
    let g = arith::gcd_u64(diff, n);
    if g != 1 && g != n {
        Some(g)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::{FaultMode, FaultModel, FaultTarget};
    use crate::protect::SecurityParams;

    fn test_key(rng: &mut Prng) -> RsaKey {
        RsaKey::generate(31, rng).unwrap()
    }

    #[test]
    fn key_invariants() {
        let mut rng = Prng::from_seed(50);
        let key = test_key(&mut rng);
        assert!(key.p > key.q);
        assert_eq!(key.n, key.p * key.q);
        assert_eq!(key.e as u128 * key.d as u128 % ((key.p - 1) as u128 * (key.q - 1) as u128), 1);
        assert_eq!(arith::mod_mul(key.u as u128, key.q as u128, &key.ring_p()), 1);
    }

    #[test]
    fn sign_verify_round_trip() {
        let mut rng = Prng::from_seed(51);
        let key = test_key(&mut rng);
        for _ in 0..1000 {
            let m = rng.below_u64(key.n);
            let s = rsa_crt_sign(m, &key, &Protection::Off, None, &mut rng).unwrap();
            assert!(rsa_verify(s, m, &key));
        }
    }

    #[test]
    fn message_zero_signs_to_zero() {
        let mut rng = Prng::from_seed(52);
        let key = test_key(&mut rng);
        assert_eq!(rsa_crt_sign(0, &key, &Protection::Off, None, &mut rng).unwrap(), 0);
    }

    #[test]
    fn protected_signature_matches_unprotected() {
        let mut rng = Prng::from_seed(53);
        let key = test_key(&mut rng);
        let params = SecurityParams::new(2, 3).unwrap();
        for _ in 0..100 {
            let m = rng.below_u64(key.n);
            let plain = rsa_crt_sign(m, &key, &Protection::Off, None, &mut rng).unwrap();
            let prot = rsa_crt_sign(m, &key, &Protection::On(params), None, &mut rng).unwrap();
            assert_eq!(plain, prot);
        }
    }

    #[test]
    fn faulted_half_exponentiation_breaks_verification() {
        let mut rng = Prng::from_seed(54);
        let key = test_key(&mut rng);
        let m = rng.below_u64(key.n - 1) + 1;
        let model =
            FaultModel::new(1.0, FaultMode::CorruptUniform, FaultTarget::InvocationIndex(0), 0.0)
                .unwrap();
        let mut injector = FaultInjector::new(model, Prng::from_seed(55));
        let s_faulty =
            rsa_crt_sign(m, &key, &Protection::Off, Some(&mut injector), &mut rng).unwrap();
        assert!(!rsa_verify(s_faulty, m, &key));
    }

    #[test]
    fn bellcore_recovers_q_from_sp_fault() {
        let mut rng = Prng::from_seed(56);
        let key = test_key(&mut rng);
        for trial in 0..100 {
            let m = rng.below_u64(key.n - 2) + 1;
            let s = rsa_crt_sign(m, &key, &Protection::Off, None, &mut rng).unwrap();
            // Fault only the first half-exponentiation (s_p).
            let model = FaultModel::new(
                1.0,
                FaultMode::CorruptUniform,
                FaultTarget::InvocationIndex(0),
                0.0,
            )
            .unwrap();
            let mut injector = FaultInjector::new(model, Prng::from_seed(5700 + trial));
            let s_faulty =
                rsa_crt_sign(m, &key, &Protection::Off, Some(&mut injector), &mut rng).unwrap();
            // A faulted s_p leaves the signature intact mod q but wrong
            // mod p, so the gcd pulls out exactly q.
            let factor = bellcore_recover_factor(s, s_faulty, key.n);
            assert_eq!(factor, Some(key.q), "trial {trial}");
            let factor2 = bellcore_recover_factor_from_message(m, s_faulty, key.e, key.n);
            assert_eq!(factor2, Some(key.q), "trial {trial}");
        }
    }

    #[test]
    fn bellcore_recovers_p_from_sq_fault() {
        let mut rng = Prng::from_seed(57);
        let key = test_key(&mut rng);
        for trial in 0..100 {
            let m = rng.below_u64(key.n - 2) + 1;
            let s = rsa_crt_sign(m, &key, &Protection::Off, None, &mut rng).unwrap();
            // Fault only the second half-exponentiation (s_q): the dual
            // case, handing over p instead.
            let model = FaultModel::new(
                1.0,
                FaultMode::CorruptUniform,
                FaultTarget::InvocationIndex(1),
                0.0,
            )
            .unwrap();
            let mut injector = FaultInjector::new(model, Prng::from_seed(5900 + trial));
            let s_faulty =
                rsa_crt_sign(m, &key, &Protection::Off, Some(&mut injector), &mut rng).unwrap();
            assert_eq!(bellcore_recover_factor(s, s_faulty, key.n), Some(key.p), "trial {trial}");
        }
    }

    #[test]
    fn bellcore_fails_without_a_fault() {
        let mut rng = Prng::from_seed(58);
        let key = test_key(&mut rng);
        let m = rng.below_u64(key.n);
        let s = rsa_crt_sign(m, &key, &Protection::Off, None, &mut rng).unwrap();
        assert_eq!(bellcore_recover_factor(s, s, key.n), None);
    }

    #[test]
    fn bellcore_fails_on_unrelated_values() {
        let mut rng = Prng::from_seed(59);
        let key = test_key(&mut rng);
        let m = rng.below_u64(key.n);
        let s = rsa_crt_sign(m, &key, &Protection::Off, None, &mut rng).unwrap();
        let mut failures = 0u32;
        let trials = 1000;
        for _ in 0..trials {
            let junk = rng.below_u64(key.n);
            if bellcore_recover_factor(s, junk, key.n).is_none() {
                failures += 1;
            }
        }
        // A random difference shares a factor with N with probability
        // about 1/p + 1/q; virtually every trial must fail to factor.
        assert!(failures >= trials * 99 / 100, "failures {failures}");
    }
}
