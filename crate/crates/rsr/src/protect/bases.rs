//! One self-reducible recombination rule per operation, and the protected
//! wrapper functions built on them.
//!
//! Univariate operations split their operand into `c` additive shares (so
//! `c` program invocations per evaluation); bivariate ones split each
//! operand into `c` shares and take all `c * c` cross terms, counting
//! invocations rather than shares. The blinding rules (modular and matrix
//! inverse, determinant) multiply the operand by an invertible random
//! element instead, which pins their invocation count regardless of `c`.

use super::{
    n_secure_execute, random_split, vote_over_repetitions, FunctionBasis,
    SecurityParams,
};
use crate::arith::{
    self, mat_mul, poly_add, poly_sub, MatrixZq, PolyRing, RingParams,
};
use crate::rng::Prng;
use crate::{Error, Result};

/// Share domain for the integer (non-modular) rules: a fixed power of two,
/// wide enough to hide 40-bit operands while keeping every cross product
/// exactly representable in i128.
pub const INT_SHARE_BITS: u32 = 48;

const INT_OPERAND_LIMIT: i128 = 1 << 40;

fn uniform_poly(ring: &PolyRing, rng: &mut Prng) -> Vec<u64> {
    (0..ring.degree()).map(|_| rng.below_u64(ring.modulus())).collect()
}

fn uniform_matrix(rows: usize, cols: usize, q: u64, rng: &mut Prng) -> MatrixZq {
    let data = (0..rows * cols).map(|_| rng.below_u64(q)).collect();
    MatrixZq::new(rows, cols, data).expect("dimensions are consistent")
}

fn invertible_matrix(n: usize, ring: &RingParams, rng: &mut Prng) -> Result<MatrixZq> {
    // Rejection sampling; for a prime field almost every draw lands.
    loop {
        let m = uniform_matrix(n, n, ring.modulus(), rng);
        if arith::mat_det(&m, ring)? != 0 {
            return Ok(m);
        }
    }
}

/// Split a polynomial into `c` additive shares mod q: `c - 1` uniform
/// polynomials plus the completion.
fn split_poly(p: &[u64], c: u32, ring: &PolyRing, rng: &mut Prng) -> Vec<Vec<u64>> {
    let mut shares = Vec::with_capacity(c as usize);
    let mut acc = p.to_vec();
    for _ in 0..c - 1 {
        let r = uniform_poly(ring, rng);
        acc = poly_sub(&acc, &r, ring);
        shares.push(r);
    }
    shares.push(acc);
    shares
}

/// Split a matrix into `c` additive shares mod q.
fn split_matrix(a: &MatrixZq, c: u32, ring: &RingParams, rng: &mut Prng) -> Result<Vec<MatrixZq>> {
    let mut shares = Vec::with_capacity(c as usize);
    let mut acc = a.clone();
    for _ in 0..c - 1 {
        let r = uniform_matrix(a.rows(), a.cols(), ring.modulus(), rng);
        acc = acc.sub(&r, ring)?;
        shares.push(r);
    }
    shares.push(acc);
    Ok(shares)
}

/// Split an integer additively over `[0, 2^INT_SHARE_BITS)`: uniform shares
/// plus a signed completion.
fn split_int(x: i128, c: u32, rng: &mut Prng) -> Vec<i128> {
    let domain = 1u128 << INT_SHARE_BITS;
    let mut shares = Vec::with_capacity(c as usize);
    let mut acc = x;
    for _ in 0..c - 1 {
        let r = rng.below_u128(domain) as i128;
        acc -= r;
        shares.push(r);
    }
    shares.push(acc);
    shares
}

// ---------------------------------------------------------------------------
// Reduction mod R
// ---------------------------------------------------------------------------

/// `f(x, R) = x mod R`, recombined by mod-R addition of the share results.
pub struct ModBasis<'a> {
    pub ring: &'a RingParams,
    pub x: u128,
}

impl FunctionBasis for ModBasis<'_> {
    type Query = u128;
    type Answer = u64;
    type Blind = ();

    fn derive(&self, c: u32, rng: &mut Prng) -> Result<(Vec<u128>, ())> {
        let shares = random_split(self.ring.share_modulus(), self.x, c, rng)?;
        Ok((shares.into_shares(), ()))
    }

    fn recombine(&self, _: &(), _: &[u128], answers: &[u64]) -> Result<u64> {
        let r = self.ring.modulus() as u128;
        Ok(answers.iter().fold(0u64, |acc, &a| ((acc as u128 + a as u128) % r) as u64))
    }
}

/// Protected `x mod R`; shares are drawn from the widened domain
/// `[0, R * 2^w)` so the program only ever reduces uniform values.
pub fn protected_mod<P>(
    black_box: &mut P,
    ring: &RingParams,
    x: u128,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<u64>
where
    P: FnMut(&u128) -> Result<u64>,
{
    if x >= ring.share_modulus() {
        return Err(Error::InvalidParams("operand outside the share domain"));
    }
    n_secure_execute(&ModBasis { ring, x }, black_box, params, rng)
}

// ---------------------------------------------------------------------------
// Modular multiplication
// ---------------------------------------------------------------------------

/// `f(x, y, R) = x * y mod R`: both operands split, all cross terms summed.
pub struct ModMulBasis<'a> {
    pub ring: &'a RingParams,
    pub x: u128,
    pub y: u128,
}

impl FunctionBasis for ModMulBasis<'_> {
    type Query = (u128, u128);
    type Answer = u64;
    type Blind = ();

    fn derive(&self, c: u32, rng: &mut Prng) -> Result<(Vec<(u128, u128)>, ())> {
        let m = self.ring.share_modulus();
        let xs = random_split(m, self.x, c, rng)?.into_shares();
        let ys = random_split(m, self.y, c, rng)?.into_shares();
        let mut queries = Vec::with_capacity((c * c) as usize);
        for &xi in &xs {
            for &yj in &ys {
                queries.push((xi, yj));
            }
        }
        Ok((queries, ()))
    }

    fn recombine(&self, _: &(), _: &[(u128, u128)], answers: &[u64]) -> Result<u64> {
        let r = self.ring.modulus() as u128;
        Ok(answers.iter().fold(0u64, |acc, &a| ((acc as u128 + a as u128) % r) as u64))
    }
}

pub fn protected_mod_mul<P>(
    black_box: &mut P,
    ring: &RingParams,
    x: u128,
    y: u128,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<u64>
where
    P: FnMut(&(u128, u128)) -> Result<u64>,
{
    let m = ring.share_modulus();
    if x >= m || y >= m {
        return Err(Error::InvalidParams("operand outside the share domain"));
    }
    n_secure_execute(&ModMulBasis { ring, x, y }, black_box, params, rng)
}

// ---------------------------------------------------------------------------
// Modular exponentiation
// ---------------------------------------------------------------------------

/// `f(a, x, R) = a^x mod R` with `gcd(a, R) = 1`: the exponent splits over
/// `phi(R) * 2^w` and the share results multiply back together mod R.
pub struct ModExpBasis<'a> {
    pub ring: &'a RingParams,
    pub x: u128,
}

impl FunctionBasis for ModExpBasis<'_> {
    type Query = u128;
    type Answer = u64;
    type Blind = ();

    fn derive(&self, c: u32, rng: &mut Prng) -> Result<(Vec<u128>, ())> {
        let m = self
            .ring
            .exponent_share_modulus()
            .ok_or(Error::InvalidParams("exponent splitting needs a known totient"))?;
        Ok((random_split(m, self.x, c, rng)?.into_shares(), ()))
    }

    fn recombine(&self, _: &(), _: &[u128], answers: &[u64]) -> Result<u64> {
        let r = self.ring.modulus();
        Ok(answers.iter().fold(1u64, |acc, &a| (acc as u128 * a as u128 % r as u128) as u64))
    }
}

fn check_exp_preconditions(ring: &RingParams, a: u128, x: u128) -> Result<()> {
    let m = ring
        .exponent_share_modulus()
        .ok_or(Error::InvalidParams("exponent splitting needs a known totient"))?;
    if x >= m {
        return Err(Error::InvalidParams("exponent outside the share domain"));
    }
    if arith::gcd_u128(a % ring.modulus() as u128, ring.modulus() as u128) != 1 {
        return Err(Error::InvalidParams("base must be coprime to the modulus"));
    }
    Ok(())
}

/// Protected `a^x mod R`. The base is public; only the exponent is treated
/// as sensitive and split. The recombining multiplication is performed
/// directly; see [`protected_mod_exp_nested`] to route it through the
/// protected multiplication as well.
pub fn protected_mod_exp<P>(
    black_box: &mut P,
    ring: &RingParams,
    a: u128,
    x: u128,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<u64>
where
    P: FnMut(&u128) -> Result<u64>,
{
    check_exp_preconditions(ring, a, x)?;
    n_secure_execute(&ModExpBasis { ring, x }, black_box, params, rng)
}

/// Protected exponentiation whose recombining multiplication itself runs
/// under the protected modular multiplication (extra hiding at the cost of
/// `c * c` more invocations per repetition).
pub fn protected_mod_exp_nested<PE, PM>(
    exp_box: &mut PE,
    mul_box: &mut PM,
    ring: &RingParams,
    a: u128,
    x: u128,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<u64>
where
    PE: FnMut(&u128) -> Result<u64>,
    PM: FnMut(&(u128, u128)) -> Result<u64>,
{
    check_exp_preconditions(ring, a, x)?;
    let basis = ModExpBasis { ring, x };
    let inner = SecurityParams::new(params.c(), 1)?;
    vote_over_repetitions(params.n(), rng, |rng| {
        let (queries, _) = basis.derive(params.c(), rng)?;
        let mut partials = Vec::with_capacity(queries.len());
        for q in &queries {
            partials.push(exp_box(q)?);
        }
        let mut acc = partials[0];
        for &p in &partials[1..] {
            acc = protected_mod_mul(mul_box, ring, acc as u128, p as u128, &inner, rng)?;
        }
        Ok(acc)
    })
}

// ---------------------------------------------------------------------------
// Modular inverse
// ---------------------------------------------------------------------------

/// `f(x, R) = x^{-1} mod R`, prime `R`: blind with an invertible random
/// factor, invert the blinded value, unblind by multiplying the factor back.
pub struct ModInvBasis<'a> {
    pub ring: &'a RingParams,
    pub x: u128,
}

impl FunctionBasis for ModInvBasis<'_> {
    type Query = u64;
    type Answer = u64;
    type Blind = u64;

    fn derive(&self, _c: u32, rng: &mut Prng) -> Result<(Vec<u64>, u64)> {
        let r = self.ring.modulus();
        let xr = (self.x % r as u128) as u64;
        let w = loop {
            let cand = 1 + rng.below_u64(r - 1);
            if arith::gcd_u64(cand, r) == 1 {
                break cand;
            }
        };
        Ok((vec![arith::mod_mul(xr as u128, w as u128, self.ring)], w))
    }

    fn recombine(&self, w: &u64, _: &[u64], answers: &[u64]) -> Result<u64> {
        Ok(arith::mod_mul(*w as u128, answers[0] as u128, self.ring))
    }
}

pub fn protected_mod_inverse<P>(
    black_box: &mut P,
    ring: &RingParams,
    x: u128,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<u64>
where
    P: FnMut(&u64) -> Result<u64>,
{
    if !arith::is_prime(ring.modulus()) {
        return Err(Error::InvalidParams("protected inverse requires a prime modulus"));
    }
    if x.is_multiple_of(ring.modulus() as u128) {
        return Err(Error::NonInvertible);
    }
    n_secure_execute(&ModInvBasis { ring, x }, black_box, params, rng)
}

// ---------------------------------------------------------------------------
// Polynomial multiplication
// ---------------------------------------------------------------------------

/// Negacyclic `f(p, q) = p * q`: both polynomials split additively, cross
/// products summed coefficientwise.
pub struct PolyMulBasis<'a> {
    pub ring: &'a PolyRing,
    pub p: &'a [u64],
    pub q: &'a [u64],
}

impl FunctionBasis for PolyMulBasis<'_> {
    type Query = (Vec<u64>, Vec<u64>);
    type Answer = Vec<u64>;
    type Blind = ();

    fn derive(&self, c: u32, rng: &mut Prng) -> Result<(Vec<Self::Query>, ())> {
        let ps = split_poly(self.p, c, self.ring, rng);
        let qs = split_poly(self.q, c, self.ring, rng);
        let mut queries = Vec::with_capacity((c * c) as usize);
        for pi in &ps {
            for qj in &qs {
                queries.push((pi.clone(), qj.clone()));
            }
        }
        Ok((queries, ()))
    }

    fn recombine(&self, _: &(), _: &[Self::Query], answers: &[Vec<u64>]) -> Result<Vec<u64>> {
        let mut acc = self.ring.zero_poly();
        for a in answers {
            if a.len() != acc.len() {
                return Err(Error::InvalidParams("answer length does not match the ring degree"));
            }
            acc = poly_add(&acc, a, self.ring);
        }
        Ok(acc)
    }
}

pub fn protected_poly_mul<P>(
    black_box: &mut P,
    p: &[u64],
    q: &[u64],
    ring: &PolyRing,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<Vec<u64>>
where
    P: FnMut(&(Vec<u64>, Vec<u64>)) -> Result<Vec<u64>>,
{
    if p.len() != ring.degree() || q.len() != ring.degree() {
        return Err(Error::InvalidParams("polynomial length must equal the ring degree"));
    }
    n_secure_execute(&PolyMulBasis { ring, p, q }, black_box, params, rng)
}

// ---------------------------------------------------------------------------
// NTT (any linear transform on coefficient vectors)
// ---------------------------------------------------------------------------

/// Linear-transform rule: mask the input with uniform vectors, transform
/// each piece, and subtract the masks' transforms back out. For `c = 2`
/// this is `P(x + r) - P(r)`.
pub struct NttBasis<'a> {
    pub ring: &'a PolyRing,
    pub input: &'a [u64],
}

impl FunctionBasis for NttBasis<'_> {
    type Query = Vec<u64>;
    type Answer = Vec<u64>;
    type Blind = ();

    fn derive(&self, c: u32, rng: &mut Prng) -> Result<(Vec<Vec<u64>>, ())> {
        let mut masks = Vec::with_capacity(c as usize - 1);
        let mut masked = self.input.to_vec();
        for _ in 0..c - 1 {
            let r = uniform_poly(self.ring, rng);
            masked = poly_add(&masked, &r, self.ring);
            masks.push(r);
        }
        let mut queries = Vec::with_capacity(c as usize);
        queries.push(masked);
        queries.extend(masks);
        Ok((queries, ()))
    }

    fn recombine(&self, _: &(), _: &[Vec<u64>], answers: &[Vec<u64>]) -> Result<Vec<u64>> {
        let mut acc = answers[0].clone();
        if acc.len() != self.ring.degree() {
            return Err(Error::InvalidParams("answer length does not match the ring degree"));
        }
        for a in &answers[1..] {
            if a.len() != acc.len() {
                return Err(Error::InvalidParams("answer length does not match the ring degree"));
            }
            acc = poly_sub(&acc, a, self.ring);
        }
        Ok(acc)
    }
}

/// Protected transform evaluation. `black_box` must be linear over `Z_q^n`
/// (the forward NTT is; so is the inverse).
pub fn protected_ntt<P>(
    black_box: &mut P,
    input: &[u64],
    ring: &PolyRing,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<Vec<u64>>
where
    P: FnMut(&Vec<u64>) -> Result<Vec<u64>>,
{
    if input.len() != ring.degree() {
        return Err(Error::InvalidParams("input length must equal the ring degree"));
    }
    n_secure_execute(&NttBasis { ring, input }, black_box, params, rng)
}

// ---------------------------------------------------------------------------
// Integer multiplication (two variants) and division
// ---------------------------------------------------------------------------

/// Exact `f(x, y) = x * y` by additive splitting with signed completion.
pub struct IntMulSplitBasis {
    pub x: i128,
    pub y: i128,
}

impl FunctionBasis for IntMulSplitBasis {
    type Query = (i128, i128);
    type Answer = i128;
    type Blind = ();

    fn derive(&self, c: u32, rng: &mut Prng) -> Result<(Vec<(i128, i128)>, ())> {
        let xs = split_int(self.x, c, rng);
        let ys = split_int(self.y, c, rng);
        let mut queries = Vec::with_capacity((c * c) as usize);
        for &xi in &xs {
            for &yj in &ys {
                queries.push((xi, yj));
            }
        }
        Ok((queries, ()))
    }

    fn recombine(&self, _: &(), _: &[(i128, i128)], answers: &[i128]) -> Result<i128> {
        answers
            .iter()
            .try_fold(0i128, |acc, &a| acc.checked_add(a))
            .ok_or(Error::Overflow)
    }
}

/// Exact `f(x, y) = x * y` by blinding both operands with independent
/// offsets: `P(x+r, y+s) - P(r, y+s) - P(x+t, s) + P(t, s)`.
pub struct IntMulBlindBasis {
    pub x: i128,
    pub y: i128,
}

impl FunctionBasis for IntMulBlindBasis {
    type Query = (i128, i128);
    type Answer = i128;
    type Blind = ();

    fn derive(&self, _c: u32, rng: &mut Prng) -> Result<(Vec<(i128, i128)>, ())> {
        let domain = 1u128 << INT_SHARE_BITS;
        let r = rng.below_u128(domain) as i128;
        let s = rng.below_u128(domain) as i128;
        let t = rng.below_u128(domain) as i128;
        Ok((
            vec![
                (self.x + r, self.y + s),
                (r, self.y + s),
                (self.x + t, s),
                (t, s),
            ],
            (),
        ))
    }

    fn recombine(&self, _: &(), _: &[(i128, i128)], answers: &[i128]) -> Result<i128> {
        if answers.len() != 4 {
            return Err(Error::InvalidParams("blinded product needs exactly four answers"));
        }
        answers[0]
            .checked_sub(answers[1])
            .and_then(|v| v.checked_sub(answers[2]))
            .and_then(|v| v.checked_add(answers[3]))
            .ok_or(Error::Overflow)
    }
}

fn check_int_operands(x: i128, y: i128) -> Result<()> {
    if x.abs() > INT_OPERAND_LIMIT || y.abs() > INT_OPERAND_LIMIT {
        return Err(Error::Overflow);
    }
    Ok(())
}

pub fn protected_int_mul_split<P>(
    black_box: &mut P,
    x: i128,
    y: i128,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<i128>
where
    P: FnMut(&(i128, i128)) -> Result<i128>,
{
    check_int_operands(x, y)?;
    n_secure_execute(&IntMulSplitBasis { x, y }, black_box, params, rng)
}

pub fn protected_int_mul_blind<P>(
    black_box: &mut P,
    x: i128,
    y: i128,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<i128>
where
    P: FnMut(&(i128, i128)) -> Result<i128>,
{
    check_int_operands(x, y)?;
    n_secure_execute(&IntMulBlindBasis { x, y }, black_box, params, rng)
}

/// Protected floor division `x / divisor` for `x >= 0`, `divisor >= 1`.
///
/// The dividend splits as `x = x1 + x2` with `x1` uniform and `x2` a signed
/// completion; the program must floor-divide (Euclidean convention for
/// negative dividends). The remainders needed for the correction term are
/// recovered from the program's own answers, `r_i = x_i - divisor * P(x_i)`,
/// so the whole evaluation runs against one black box.
pub fn protected_int_div<P>(
    black_box: &mut P,
    x: i128,
    divisor: i128,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<i128>
where
    P: FnMut(&i128) -> Result<i128>,
{
    if divisor == 0 {
        return Err(Error::DivisionByZero);
    }
    if divisor < 0 || x < 0 {
        return Err(Error::InvalidParams("division rule requires x >= 0 and divisor >= 1"));
    }
    if x > (1 << 61) {
        return Err(Error::Overflow);
    }
    vote_over_repetitions(params.n(), rng, |rng| {
        let x1 = rng.below_u128(1u128 << INT_SHARE_BITS) as i128;
        let x2 = x - x1;
        let q1 = black_box(&x1)?;
        let q2 = black_box(&x2)?;
        let r1 = x1 - divisor.checked_mul(q1).ok_or(Error::Overflow)?;
        let r2 = x2 - divisor.checked_mul(q2).ok_or(Error::Overflow)?;
        let q3 = black_box(&(r1.checked_add(r2).ok_or(Error::Overflow)?))?;
        q1.checked_add(q2).and_then(|v| v.checked_add(q3)).ok_or(Error::Overflow)
    })
}

// ---------------------------------------------------------------------------
// Matrix rules
// ---------------------------------------------------------------------------

/// `f(A, B) = A x B`: additive matrix shares, cross products summed.
pub struct MatMulBasis<'a> {
    pub ring: &'a RingParams,
    pub a: &'a MatrixZq,
    pub b: &'a MatrixZq,
}

impl FunctionBasis for MatMulBasis<'_> {
    type Query = (MatrixZq, MatrixZq);
    type Answer = MatrixZq;
    type Blind = ();

    fn derive(&self, c: u32, rng: &mut Prng) -> Result<(Vec<Self::Query>, ())> {
        let av = split_matrix(self.a, c, self.ring, rng)?;
        let bv = split_matrix(self.b, c, self.ring, rng)?;
        let mut queries = Vec::with_capacity((c * c) as usize);
        for ai in &av {
            for bj in &bv {
                queries.push((ai.clone(), bj.clone()));
            }
        }
        Ok((queries, ()))
    }

    fn recombine(&self, _: &(), _: &[Self::Query], answers: &[MatrixZq]) -> Result<MatrixZq> {
        let mut acc = MatrixZq::zero(self.a.rows(), self.b.cols());
        for m in answers {
            acc = acc.add(m, self.ring)?;
        }
        Ok(acc)
    }
}

/// `f(A) = A^{-1}`: right-blind with invertible `W`, invert the product,
/// left-multiply the blinder back: `W x P(A x W) = A^{-1}`.
pub struct MatInvBasis<'a> {
    pub ring: &'a RingParams,
    pub a: &'a MatrixZq,
}

impl FunctionBasis for MatInvBasis<'_> {
    type Query = MatrixZq;
    type Answer = MatrixZq;
    type Blind = MatrixZq;

    fn derive(&self, _c: u32, rng: &mut Prng) -> Result<(Vec<MatrixZq>, MatrixZq)> {
        let w = invertible_matrix(self.a.rows(), self.ring, rng)?;
        Ok((vec![mat_mul(self.a, &w, self.ring)?], w))
    }

    fn recombine(&self, w: &MatrixZq, _: &[MatrixZq], answers: &[MatrixZq]) -> Result<MatrixZq> {
        mat_mul(w, &answers[0], self.ring)
    }
}

/// `f(A) = det A`: determinants are multiplicative, so
/// `det A = P(A x W) / P(W)` for an invertible blinder `W`.
pub struct MatDetBasis<'a> {
    pub ring: &'a RingParams,
    pub a: &'a MatrixZq,
}

impl FunctionBasis for MatDetBasis<'_> {
    type Query = MatrixZq;
    type Answer = u64;
    type Blind = ();

    fn derive(&self, _c: u32, rng: &mut Prng) -> Result<(Vec<MatrixZq>, ())> {
        let w = invertible_matrix(self.a.rows(), self.ring, rng)?;
        Ok((vec![mat_mul(self.a, &w, self.ring)?, w], ()))
    }

    fn recombine(&self, _: &(), _: &[MatrixZq], answers: &[u64]) -> Result<u64> {
        if answers.len() != 2 {
            return Err(Error::InvalidParams("determinant rule needs exactly two answers"));
        }
        let w_det_inv = arith::mod_inverse_fermat(answers[1] as u128, self.ring)?;
        Ok(arith::mod_mul(answers[0] as u128, w_det_inv as u128, self.ring))
    }
}

pub fn protected_mat_mul<P>(
    black_box: &mut P,
    a: &MatrixZq,
    b: &MatrixZq,
    ring: &RingParams,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<MatrixZq>
where
    P: FnMut(&(MatrixZq, MatrixZq)) -> Result<MatrixZq>,
{
    if a.cols() != b.rows() {
        return Err(Error::InvalidParams("matrix product dimensions not conformable"));
    }
    n_secure_execute(&MatMulBasis { ring, a, b }, black_box, params, rng)
}

pub fn protected_mat_inverse<P>(
    black_box: &mut P,
    a: &MatrixZq,
    ring: &RingParams,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<MatrixZq>
where
    P: FnMut(&MatrixZq) -> Result<MatrixZq>,
{
    if !a.is_square() {
        return Err(Error::InvalidParams("inverse requires a square matrix"));
    }
    n_secure_execute(&MatInvBasis { ring, a }, black_box, params, rng)
}

pub fn protected_mat_det<P>(
    black_box: &mut P,
    a: &MatrixZq,
    ring: &RingParams,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<u64>
where
    P: FnMut(&MatrixZq) -> Result<u64>,
{
    if !a.is_square() {
        return Err(Error::InvalidParams("determinant requires a square matrix"));
    }
    n_secure_execute(&MatDetBasis { ring, a }, black_box, params, rng)
}
