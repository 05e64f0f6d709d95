//! Additive secret splitting over a stated modulus domain.

use crate::rng::Prng;
use crate::{Error, Result};

/// Additive shares of a secret: `c` residues mod `m` whose sum is congruent
/// to the secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector {
    shares: Vec<u128>,
    modulus: u128,
}

impl ShareVector {
    pub fn shares(&self) -> &[u128] {
        &self.shares
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn count(&self) -> usize {
        self.shares.len()
    }

    /// Recombine: sum of shares mod m.
    pub fn sum(&self) -> u128 {
        self.shares.iter().fold(0u128, |acc, &s| (acc + s) % self.modulus)
    }

    pub fn into_shares(self) -> Vec<u128> {
        self.shares
    }
}

/// Split `x` into `c` additive shares mod `m`: the first `c - 1` shares are
/// uniform in `Z_m` and the last is the completion `x - sum (mod m)`.
pub fn random_split(m: u128, x: u128, c: u32, rng: &mut Prng) -> Result<ShareVector> {
    if c < 2 {
        return Err(Error::InvalidParams("share count must be at least 2"));
    }
    if m < 2 {
        return Err(Error::InvalidParams("share modulus must be at least 2"));
    }
    let mut shares = Vec::with_capacity(c as usize);
    let mut sum: u128 = 0;
    for _ in 0..c - 1 {
        let s = rng.below_u128(m);
        sum = (sum + s) % m;
        shares.push(s);
    }
    let completion = ((x % m) + m - sum) % m;
    shares.push(completion);
    Ok(ShareVector { shares, modulus: m })
}
