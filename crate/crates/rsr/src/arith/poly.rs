//! Negacyclic polynomial arithmetic in `Z_q[x]/(x^n + 1)` and the butterfly
//! NTT that accelerates it.

use super::{add_mod, is_prime, mod_inverse_fermat, mul_mod, sub_mod, RingParams};
use crate::{Error, Result};

/// Parameters of a negacyclic polynomial ring: power-of-two degree `n`,
/// prime modulus `q` with `2n | q - 1`, and `psi` a primitive 2n-th root of
/// unity (`psi^n = -1 mod q`).
///
/// The forward and inverse twiddle tables hold the powers of `psi` and
/// `psi^{-1}` in bit-reversed order, precomputed at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    degree: usize,
    modulus: u64,
    psi: u64,
    twiddles: Vec<u64>,
    inv_twiddles: Vec<u64>,
    degree_inv: u64,
}

fn bit_reverse(i: usize, bits: u32) -> usize {
    i.reverse_bits() >> (usize::BITS - bits)
}

impl PolyRing {
    pub fn new(degree: usize, modulus: u64, psi: u64) -> Result<Self> {
        if !degree.is_power_of_two() || degree < 2 {
            return Err(Error::InvalidParams("degree must be a power of two, at least 2"));
        }
        if !is_prime(modulus) {
            return Err(Error::InvalidParams("coefficient modulus must be prime"));
        }
        if !(modulus - 1).is_multiple_of(2 * degree as u64) {
            return Err(Error::InvalidParams("2n must divide q - 1"));
        }
        if psi >= modulus {
            return Err(Error::InvalidParams("psi must be a residue mod q"));
        }
        let scalar = RingParams::new(modulus)?;
        let half_order = super::mod_exp_square_multiply(psi as u128, degree as u128, &scalar);
        if half_order != modulus - 1 {
            return Err(Error::InvalidParams("psi^n must equal -1 mod q"));
        }

        let bits = degree.trailing_zeros();
        let psi_inv = mod_inverse_fermat(psi as u128, &scalar)?;
        let mut twiddles = Vec::with_capacity(degree);
        let mut inv_twiddles = Vec::with_capacity(degree);
        for i in 0..degree {
            let e = bit_reverse(i, bits) as u128;
            twiddles.push(super::mod_exp_square_multiply(psi as u128, e, &scalar));
            inv_twiddles.push(super::mod_exp_square_multiply(psi_inv as u128, e, &scalar));
        }
        let degree_inv = mod_inverse_fermat(degree as u128, &scalar)?;
        Ok(PolyRing { degree, modulus, psi, twiddles, inv_twiddles, degree_inv })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn psi(&self) -> u64 {
        self.psi
    }

    /// Number of butterfly stages, `log2(n)`.
    pub fn stages(&self) -> u32 {
        self.degree.trailing_zeros()
    }

    /// Forward twiddle table (bit-reversed `psi` powers, length `n`).
    pub fn twiddles(&self) -> &[u64] {
        &self.twiddles
    }

    pub fn zero_poly(&self) -> Vec<u64> {
        vec![0; self.degree]
    }

    fn check_len(&self, p: &[u64]) -> Result<()> {
        if p.len() != self.degree {
            return Err(Error::InvalidParams("polynomial length must equal the ring degree"));
        }
        Ok(())
    }
}

/// Coefficientwise sum mod q.
pub fn poly_add(a: &[u64], b: &[u64], ring: &PolyRing) -> Vec<u64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| add_mod(x, y, ring.modulus)).collect()
}

/// Coefficientwise difference mod q.
pub fn poly_sub(a: &[u64], b: &[u64], ring: &PolyRing) -> Vec<u64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| sub_mod(x % ring.modulus, y % ring.modulus, ring.modulus))
        .collect()
}

/// Schoolbook product in `Z_q[x]/(x^n + 1)`: plain convolution with the
/// `x^n = -1` wraparound.
pub fn poly_mul_schoolbook(a: &[u64], b: &[u64], ring: &PolyRing) -> Result<Vec<u64>> {
    ring.check_len(a)?;
    ring.check_len(b)?;
    let n = ring.degree;
    let q = ring.modulus;
    let mut out = vec![0u64; n];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let prod = mul_mod(ai % q, bj % q, q);
            let k = i + j;
            if k < n {
                out[k] = add_mod(out[k], prod, q);
            } else {
                out[k - n] = sub_mod(out[k - n], prod, q);
            }
        }
    }
    Ok(out)
}

/// Forward negacyclic NTT: `log2(n)` Cooley-Tukey stages of `n/2`
/// butterflies each. Standard-order input, bit-reversed output.
pub fn ntt_forward(p: &[u64], ring: &PolyRing) -> Result<Vec<u64>> {
    ntt_forward_with(p, ring, &ring.twiddles)
}

/// Forward NTT against an explicit twiddle table. This is the hook the
/// fault simulator uses to model corrupted twiddle constants; `twiddles`
/// must have length `n`.
pub fn ntt_forward_with(p: &[u64], ring: &PolyRing, twiddles: &[u64]) -> Result<Vec<u64>> {
    ring.check_len(p)?;
    if twiddles.len() != ring.degree {
        return Err(Error::InvalidParams("twiddle table length must equal the ring degree"));
    }
    let n = ring.degree;
    let q = ring.modulus;
    let mut a: Vec<u64> = p.iter().map(|&c| c % q).collect();
    let mut t = n;
    let mut m = 1;
    while m < n {
        t /= 2;
        for i in 0..m {
            let j1 = 2 * i * t;
            let s = twiddles[m + i];
            for j in j1..j1 + t {
                let u = a[j];
                let v = mul_mod(a[j + t], s, q);
                a[j] = add_mod(u, v, q);
                a[j + t] = sub_mod(u, v, q);
            }
        }
        m *= 2;
    }
    Ok(a)
}

/// Inverse negacyclic NTT (Gentleman-Sande), undoing [`ntt_forward`]:
/// bit-reversed input, standard-order output, final `n^{-1}` scaling.
pub fn ntt_inverse(p: &[u64], ring: &PolyRing) -> Result<Vec<u64>> {
    ring.check_len(p)?;
    let n = ring.degree;
    let q = ring.modulus;
    let mut a: Vec<u64> = p.iter().map(|&c| c % q).collect();
    let mut t = 1;
    let mut m = n;
    while m > 1 {
        let h = m / 2;
        let mut j1 = 0;
        for i in 0..h {
            let s = ring.inv_twiddles[h + i];
            for j in j1..j1 + t {
                let u = a[j];
                let v = a[j + t];
                a[j] = add_mod(u, v, q);
                a[j + t] = mul_mod(sub_mod(u, v, q), s, q);
            }
            j1 += 2 * t;
        }
        t *= 2;
        m = h;
    }
    for c in &mut a {
        *c = mul_mod(*c, ring.degree_inv, q);
    }
    Ok(a)
}

/// Pointwise product in the transform domain.
pub fn poly_pointwise(a: &[u64], b: &[u64], ring: &PolyRing) -> Vec<u64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| mul_mod(x, y, ring.modulus)).collect()
}
