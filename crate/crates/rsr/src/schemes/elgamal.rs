//! ElGamal decryption over a prime field, with both modular-inverse
//! routine choices; exercises the exponentiation + inverse +
//! multiplication composition.

use crate::arith::{self, RingParams};
use crate::fault::{faulty_mod_exp, faulty_mod_mul, FaultInjector};
use crate::protect::{protected_mod_exp, protected_mod_mul, Protection};
use crate::rng::Prng;
use crate::{Error, Result};

/// Which modular-inverse routine computes `s^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseMethod {
    /// `s^{R-2} mod R`.
    Fermat,
    /// Constant-iteration divstep inverse.
    FastGcd,
}

/// Test-side encryption: `c1 = g^k`, `c2 = m * y^k` for `y = g^x`.
pub fn elgamal_encrypt(m: u64, generator: u64, y: u64, k: u64, ring: &RingParams) -> (u64, u64) {
    let c1 = arith::mod_exp_square_multiply(generator as u128, k as u128, ring);
    let yk = arith::mod_exp_square_multiply(y as u128, k as u128, ring);
    let c2 = arith::mod_mul(m as u128, yk as u128, ring);
    (c1, c2)
}

/// Decryption `m = c2 * (c1^x)^{-1} mod R`.
///
/// The protected variant routes the exponentiation through the protected
/// exponent-splitting rule and the final multiplication through the
/// protected cross-term rule; the inverse itself runs bare with the
/// selected routine. A fault injector, when present, wraps the
/// exponentiation and multiplication programs.
#[allow(clippy::too_many_arguments)]
pub fn elgamal_decrypt(
    c1: u64,
    c2: u64,
    x: u64,
    ring: &RingParams,
    method: InverseMethod,
    protection: &Protection,
    mut fault: Option<&mut FaultInjector>,
    rng: &mut Prng,
) -> Result<u64> {
    let r = ring.modulus();
    if c1.is_multiple_of(r) {
        return Err(Error::NonInvertible);
    }
    let s = run_exp(ring, c1 % r, x, protection, &mut fault, rng)?;
    if s == 0 {
        return Err(Error::NonInvertible);
    }
    let l = match method {
        InverseMethod::Fermat => arith::mod_inverse_fermat(s as u128, ring)?,
        InverseMethod::FastGcd => arith::mod_inverse_fast_gcd(r, s)?,
    };
    run_mul(ring, c2 % r, l, protection, &mut fault, rng)
}

fn run_exp(
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
            dispatch_exp(&mut p, ring, base, exp, protection, rng)
        }
        None => {
            let mut p = |&x: &u128| Ok(arith::mod_exp_square_multiply(base as u128, x, ring));
            dispatch_exp(&mut p, ring, base, exp, protection, rng)
        }
    }
}

fn dispatch_exp<P>(
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
            protected_mod_exp(black_box, ring, base as u128, exp as u128, params, rng)
        }
    }
}

fn run_mul(
    ring: &RingParams,
    x: u64,
    y: u64,
    protection: &Protection,
    fault: &mut Option<&mut FaultInjector>,
    rng: &mut Prng,
) -> Result<u64> {
    match fault {
        Some(injector) => {
            let mut p = faulty_mod_mul(injector, ring);
            dispatch_mul(&mut p, ring, x, y, protection, rng)
        }
        None => {
            let mut p = |&(a, b): &(u128, u128)| Ok(arith::mod_mul(a, b, ring));
            dispatch_mul(&mut p, ring, x, y, protection, rng)
        }
    }
}

fn dispatch_mul<P>(
    black_box: &mut P,
    ring: &RingParams,
    x: u64,
    y: u64,
    protection: &Protection,
    rng: &mut Prng,
) -> Result<u64>
where
    P: FnMut(&(u128, u128)) -> Result<u64>,
{
    match protection {
        Protection::Off => black_box(&(x as u128, y as u128)),
        Protection::On(params) => {
            protected_mod_mul(black_box, ring, x as u128, y as u128, params, rng)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protect::SecurityParams;

    fn ring() -> RingParams {
        RingParams::prime(2_147_483_647).unwrap()
    }

    #[test]
    fn encrypt_decrypt_round_trip_both_methods() {
        let ring = ring();
        let r = ring.modulus();
        let mut rng = Prng::from_seed(60);
        let g = 7u64;
        for _ in 0..1000 {
            let x = 1 + rng.below_u64(r - 2);
            let y = arith::mod_exp_square_multiply(g as u128, x as u128, &ring);
            let m = 1 + rng.below_u64(r - 1);
            let k = 1 + rng.below_u64(r - 2);
            let (c1, c2) = elgamal_encrypt(m, g, y, k, &ring);
            let d1 = elgamal_decrypt(
                c1, c2, x, &ring, InverseMethod::Fermat, &Protection::Off, None, &mut rng,
            )
            .unwrap();
            let d2 = elgamal_decrypt(
                c1, c2, x, &ring, InverseMethod::FastGcd, &Protection::Off, None, &mut rng,
            )
            .unwrap();
            assert_eq!(d1, m);
            assert_eq!(d2, m);
        }
    }

    #[test]
    fn protected_matches_unprotected() {
        let ring = ring();
        let r = ring.modulus();
        let mut rng = Prng::from_seed(61);
        let params = SecurityParams::new(2, 3).unwrap();
        let g = 5u64;
        for _ in 0..50 {
            let x = 1 + rng.below_u64(r - 2);
            let y = arith::mod_exp_square_multiply(g as u128, x as u128, &ring);
            let m = 1 + rng.below_u64(r - 1);
            let k = 1 + rng.below_u64(r - 2);
            let (c1, c2) = elgamal_encrypt(m, g, y, k, &ring);
            let plain = elgamal_decrypt(
                c1, c2, x, &ring, InverseMethod::Fermat, &Protection::Off, None, &mut rng,
            )
            .unwrap();
            let prot = elgamal_decrypt(
                c1,
                c2,
                x,
                &ring,
                InverseMethod::Fermat,
                &Protection::On(params),
                None,
                &mut rng,
            )
            .unwrap();
            assert_eq!(plain, prot);
            assert_eq!(plain, m);
        }
    }

    #[test]
    fn degenerate_ciphertext_rejected() {
        let ring = ring();
        let mut rng = Prng::from_seed(62);
        let got = elgamal_decrypt(
            0, 5, 3, &ring, InverseMethod::Fermat, &Protection::Off, None, &mut rng,
        );
        assert_eq!(got, Err(Error::NonInvertible));
    }
}
