//! Exact, unprotected modular arithmetic: the black-box programs the
//! countermeasure wraps.
//!
//! Moduli are capped at 2^62 so every product of two reduced residues fits a
//! 128-bit intermediate; no arbitrary-precision arithmetic anywhere. All
//! reductions are Euclidean (results always land in `[0, R)`, including for
//! negative inputs), which keeps the share-recombination identities exact
//! when blinding subtraction goes negative.

mod matrix;
mod poly;

pub use matrix::{mat_det, mat_mul, mat_inverse, MatrixZq};
pub use poly::{
    ntt_forward, ntt_forward_with, ntt_inverse, poly_add, poly_mul_schoolbook, poly_pointwise,
    poly_sub, PolyRing,
};

use crate::{Error, Result};

/// Largest accepted modulus: squares of reduced residues must fit in u128.
pub const MAX_MODULUS: u64 = 1 << 62;

/// A modular ring `Z_R`, with the optional totient needed for exponent
/// splitting and the widening headroom used for share domains.
///
/// Shares of a residue live in `[0, R * 2^w)` where `w` is `widening_bits`;
/// the unprotected operations accept inputs from that widened domain and
/// reduce them first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingParams {
    modulus: u64,
    totient: Option<u64>,
    widening_bits: u32,
}

impl RingParams {
    /// Ring with unknown factorization; exponent splitting unavailable.
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidParams("modulus must be at least 2"));
        }
        if modulus > MAX_MODULUS {
            return Err(Error::InvalidParams("modulus exceeds the exact 128-bit range"));
        }
        Ok(RingParams { modulus, totient: None, widening_bits: 8 })
    }

    /// Ring with a known totient (composite moduli with known factorization).
    pub fn with_totient(modulus: u64, totient: u64) -> Result<Self> {
        let mut ring = RingParams::new(modulus)?;
        if totient == 0 || totient >= modulus {
            return Err(Error::InvalidParams("totient out of range"));
        }
        if is_prime(modulus) && totient != modulus - 1 {
            return Err(Error::InvalidParams("prime modulus must have totient R - 1"));
        }
        ring.totient = Some(totient);
        Ok(ring)
    }

    /// Prime ring; verifies primality and sets the totient to `R - 1`.
    pub fn prime(modulus: u64) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::InvalidParams("modulus is not prime"));
        }
        RingParams::with_totient(modulus, modulus - 1)
    }

    /// Adjust the share-domain headroom exponent (default 8 bits).
    pub fn with_widening(mut self, bits: u32) -> Result<Self> {
        if bits > 32 {
            return Err(Error::InvalidParams("widening headroom capped at 32 bits"));
        }
        self.widening_bits = bits;
        Ok(self)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn totient(&self) -> Option<u64> {
        self.totient
    }

    pub fn widening_bits(&self) -> u32 {
        self.widening_bits
    }

    /// Share domain `R * 2^w` for residue splitting.
    pub fn share_modulus(&self) -> u128 {
        (self.modulus as u128) << self.widening_bits
    }

    /// Share domain `phi(R) * 2^w` for exponent splitting, when known.
    pub fn exponent_share_modulus(&self) -> Option<u128> {
        self.totient.map(|t| (t as u128) << self.widening_bits)
    }
}

/// Euclidean reduction of a signed 128-bit value into `[0, R)`.
pub fn mod_reduce(x: i128, ring: &RingParams) -> u64 {
    let r = ring.modulus as i128;
    (((x % r) + r) % r) as u64
}

#[inline]
pub(crate) fn reduce_u128(x: u128, modulus: u64) -> u64 {
    (x % modulus as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, modulus: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % modulus as u128) as u64
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, modulus: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        modulus - (b - a)
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    (a as u128 * b as u128 % modulus as u128) as u64
}

/// Modular product of two (possibly share-domain) operands. Operands are
/// reduced before the widening multiply so the intermediate stays in u128.
pub fn mod_mul(x: u128, y: u128, ring: &RingParams) -> u64 {
    let r = ring.modulus;
    mul_mod(reduce_u128(x, r), reduce_u128(y, r), r)
}

/// `a^x mod R` by square-and-multiply, least-significant bit first.
///
/// A base congruent to 0 returns 0 unconditionally (the stated contract of
/// the routine this mirrors); otherwise an exponent of 0 yields 1.
pub fn mod_exp_square_multiply(a: u128, x: u128, ring: &RingParams) -> u64 {
    let p = ring.modulus;
    let mut base = reduce_u128(a, p);
    if base == 0 {
        return 0;
    }
    let mut res: u64 = 1;
    let mut y = x;
    while y > 0 {
        if y & 1 == 1 {
            res = mul_mod(res, base, p);
        }
        y >>= 1;
        base = mul_mod(base, base, p);
    }
    res
}

/// `a^x mod R` by the Montgomery ladder.
///
/// Agrees with [`mod_exp_square_multiply`] everywhere. Each ladder step
/// performs the same two multiplications whichever way the exponent bit
/// falls, so the multiplication sequence depends on the exponent only
/// through its bit length; that residual bit-length dependence is the
/// leakage surface the trace simulator instruments.
pub fn mod_exp_montgomery_ladder(a: u128, x: u128, ring: &RingParams) -> u64 {
    let p = ring.modulus;
    let base = reduce_u128(a, p);
    if base == 0 {
        return 0;
    }
    let mut r0: u64 = 1;
    let mut r1 = base;
    let bits = 128 - x.leading_zeros();
    for i in (0..bits).rev() {
        if (x >> i) & 1 == 0 {
            r1 = mul_mod(r0, r1, p);
            r0 = mul_mod(r0, r0, p);
        } else {
            r0 = mul_mod(r0, r1, p);
            r1 = mul_mod(r1, r1, p);
        }
    }
    r0
}

/// Modular inverse by Fermat's little theorem: `x^(R-2) mod R`, prime `R`.
pub fn mod_inverse_fermat(x: u128, ring: &RingParams) -> Result<u64> {
    let p = ring.modulus;
    let xr = reduce_u128(x, p);
    if xr == 0 {
        return Err(Error::NonInvertible);
    }
    Ok(mod_exp_square_multiply(xr as u128, (p - 2) as u128, ring))
}

/// Number of significant bits.
#[inline]
fn nbits(x: u64) -> u32 {
    64 - x.leading_zeros()
}

/// Modular inverse of `g` modulo an odd `f` by the constant-iteration
/// divstep (fast GCD) method.
///
/// The iteration count is `floor((49d + 80) / 17)` for bit lengths `d < 46`
/// and `floor((49d + 57) / 17)` otherwise, after which the remainder
/// sequence is guaranteed to have converged. The transition coefficients
/// `v, r` live in the rationals with power-of-two denominators; they are
/// tracked here as residues mod `f` (halving becomes multiplication by
/// `(f+1)/2`), and the final `((f+1)/2)^(m-1)` factor cancels the
/// accumulated scale exactly as in the reference formulation.
pub fn mod_inverse_fast_gcd(f: u64, g: u64) -> Result<u64> {
    if f < 3 || f & 1 == 0 {
        // Even moduli: halving is not invertible mod f, so the divstep
        // transition cannot be tracked in Z_f. Documented restriction.
        return Err(Error::InvalidParams("fast gcd inverse requires an odd modulus >= 3"));
    }
    let g = g % f;
    if g == 0 {
        return Err(Error::NonInvertible);
    }

    let d = nbits(f).max(nbits(g));
    let m: u64 = if d < 46 {
        (49 * d as u64 + 80) / 17
    } else {
        (49 * d as u64 + 57) / 17
    };

    let ring = RingParams::new(f)?;
    let inv2 = f.div_ceil(2);
    let precomp = mod_exp_square_multiply(inv2 as u128, (m - 1) as u128, &ring);

    let mut delta: i64 = 1;
    let mut fc: i128 = f as i128;
    let mut gc: i128 = g as i128;
    let mut v: u64 = 0;
    let mut r: u64 = 1;
    for _ in 0..=m {
        if delta > 0 && gc & 1 == 1 {
            delta = -delta;
            std::mem::swap(&mut fc, &mut gc);
            gc = -gc;
            let old_v = v;
            v = r;
            r = if old_v == 0 { 0 } else { f - old_v };
        }
        let g0 = gc & 1;
        delta += 1;
        gc = (gc + g0 * fc) / 2;
        if g0 == 1 {
            r = add_mod(r, v, f);
        }
        r = mul_mod(r, inv2, f);
    }

    if fc != 1 && fc != -1 {
        return Err(Error::NonInvertible);
    }
    let scaled = mul_mod(v, mod_exp_square_multiply(2, (m - 1) as u128, &ring), f);
    let mut inverse = mul_mod(scaled, precomp, f);
    if fc < 0 && inverse != 0 {
        inverse = f - inverse;
    }
    Ok(inverse)
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Deterministic Miller-Rabin, valid for the full u64 range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod_u64(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, modulus);
        }
        exp >>= 1;
        base = mul_mod(base, base, modulus);
    }
    acc
}
