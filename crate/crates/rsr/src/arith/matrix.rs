//! Small exact matrix algebra over a prime field `Z_q`.

use super::{add_mod, mod_inverse_fermat, mul_mod, sub_mod, RingParams};
use crate::{Error, Result};

/// Row-major matrix of residues mod q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixZq {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl MatrixZq {
    pub fn new(rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidParams("matrix dimensions do not match data length"));
        }
        Ok(MatrixZq { rows, cols, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixZq { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixZq::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    /// Entrywise sum mod q.
    pub fn add(&self, other: &MatrixZq, ring: &RingParams) -> Result<MatrixZq> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidParams("matrix sum requires equal dimensions"));
        }
        let q = ring.modulus();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| add_mod(a % q, b % q, q))
            .collect();
        Ok(MatrixZq { rows: self.rows, cols: self.cols, data })
    }

    /// Entrywise difference mod q.
    pub fn sub(&self, other: &MatrixZq, ring: &RingParams) -> Result<MatrixZq> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidParams("matrix difference requires equal dimensions"));
        }
        let q = ring.modulus();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| sub_mod(a % q, b % q, q))
            .collect();
        Ok(MatrixZq { rows: self.rows, cols: self.cols, data })
    }
}

/// Exact matrix product over Z_q.
pub fn mat_mul(a: &MatrixZq, b: &MatrixZq, ring: &RingParams) -> Result<MatrixZq> {
    if a.cols != b.rows {
        return Err(Error::InvalidParams("matrix product dimensions not conformable"));
    }
    let q = ring.modulus();
    let mut out = MatrixZq::zero(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k) % q;
            if aik == 0 {
                continue;
            }
            for j in 0..b.cols {
                let cur = out.get(i, j);
                out.set(i, j, add_mod(cur, mul_mod(aik, b.get(k, j) % q, q), q));
            }
        }
    }
    Ok(out)
}

/// Matrix inverse by Gauss-Jordan elimination with modular pivot inverses.
/// Requires a prime modulus and a nonzero determinant.
pub fn mat_inverse(a: &MatrixZq, ring: &RingParams) -> Result<MatrixZq> {
    if !a.is_square() {
        return Err(Error::InvalidParams("inverse requires a square matrix"));
    }
    let n = a.rows;
    let q = ring.modulus();
    let mut m = a.clone();
    for v in &mut m.data {
        *v %= q;
    }
    let mut inv = MatrixZq::identity(n);
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| m.get(r, col) != 0).ok_or(Error::Singular)?;
        if pivot_row != col {
            for j in 0..n {
                let a = m.get(col, j);
                m.set(col, j, m.get(pivot_row, j));
                m.set(pivot_row, j, a);
                let b = inv.get(col, j);
                inv.set(col, j, inv.get(pivot_row, j));
                inv.set(pivot_row, j, b);
            }
        }
        let pivot_inv = mod_inverse_fermat(m.get(col, col) as u128, ring)?;
        for j in 0..n {
            m.set(col, j, mul_mod(m.get(col, j), pivot_inv, q));
            inv.set(col, j, mul_mod(inv.get(col, j), pivot_inv, q));
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m.get(r, col);
            if factor == 0 {
                continue;
            }
            for j in 0..n {
                let mv = sub_mod(m.get(r, j), mul_mod(factor, m.get(col, j), q), q);
                m.set(r, j, mv);
                let iv = sub_mod(inv.get(r, j), mul_mod(factor, inv.get(col, j), q), q);
                inv.set(r, j, iv);
            }
        }
    }
    Ok(inv)
}

/// Determinant by Gaussian elimination, tracking row-swap signs.
pub fn mat_det(a: &MatrixZq, ring: &RingParams) -> Result<u64> {
    if !a.is_square() {
        return Err(Error::InvalidParams("determinant requires a square matrix"));
    }
    let n = a.rows;
    let q = ring.modulus();
    let mut m = a.clone();
    for v in &mut m.data {
        *v %= q;
    }
    let mut det: u64 = 1;
    let mut negate = false;
    for col in 0..n {
        let pivot_row = match (col..n).find(|&r| m.get(r, col) != 0) {
            Some(r) => r,
            None => return Ok(0),
        };
        if pivot_row != col {
            negate = !negate;
            for j in 0..n {
                let t = m.get(col, j);
                m.set(col, j, m.get(pivot_row, j));
                m.set(pivot_row, j, t);
            }
        }
        let pivot = m.get(col, col);
        det = mul_mod(det, pivot, q);
        let pivot_inv = mod_inverse_fermat(pivot as u128, ring)?;
        for r in col + 1..n {
            let factor = mul_mod(m.get(r, col), pivot_inv, q);
            if factor == 0 {
                continue;
            }
            for j in col..n {
                let v = sub_mod(m.get(r, j), mul_mod(factor, m.get(col, j), q), q);
                m.set(r, j, v);
            }
        }
    }
    if negate && det != 0 {
        det = q - det;
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;

    fn ring() -> RingParams {
        RingParams::prime(3329).unwrap()
    }

    fn random_matrix(n: usize, ring: &RingParams, rng: &mut Prng) -> MatrixZq {
        let data = (0..n * n).map(|_| rng.below_u64(ring.modulus())).collect();
        MatrixZq::new(n, n, data).unwrap()
    }

    fn random_invertible(n: usize, ring: &RingParams, rng: &mut Prng) -> MatrixZq {
        loop {
            let m = random_matrix(n, ring, rng);
            if mat_det(&m, ring).unwrap() != 0 {
                return m;
            }
        }
    }

    #[test]
    fn identity_laws() {
        let ring = ring();
        let mut rng = Prng::from_seed(31);
        let a = random_matrix(4, &ring, &mut rng);
        let i = MatrixZq::identity(4);
        assert_eq!(mat_mul(&a, &i, &ring).unwrap(), a);
        assert_eq!(mat_mul(&i, &a, &ring).unwrap(), a);
        assert_eq!(mat_det(&i, &ring).unwrap(), 1);
    }

    #[test]
    fn inverse_times_self_is_identity() {
        let ring = ring();
        let mut rng = Prng::from_seed(32);
        for _ in 0..200 {
            let a = random_invertible(4, &ring, &mut rng);
            let ainv = mat_inverse(&a, &ring).unwrap();
            assert_eq!(mat_mul(&a, &ainv, &ring).unwrap(), MatrixZq::identity(4));
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let ring = ring();
        // Two equal rows.
        let a = MatrixZq::new(2, 2, vec![1, 2, 1, 2]).unwrap();
        assert_eq!(mat_det(&a, &ring).unwrap(), 0);
        assert_eq!(mat_inverse(&a, &ring), Err(Error::Singular));
    }

    #[test]
    fn det_is_multiplicative() {
        let ring = ring();
        let mut rng = Prng::from_seed(33);
        for _ in 0..1000 {
            let a = random_matrix(3, &ring, &mut rng);
            let b = random_matrix(3, &ring, &mut rng);
            let ab = mat_mul(&a, &b, &ring).unwrap();
            assert_eq!(
                mat_det(&ab, &ring).unwrap(),
                mul_mod(mat_det(&a, &ring).unwrap(), mat_det(&b, &ring).unwrap(), 3329)
            );
        }
    }

    #[test]
    fn det_2x2_closed_form() {
        let ring = ring();
        let mut rng = Prng::from_seed(34);
        for _ in 0..1000 {
            let a = random_matrix(2, &ring, &mut rng);
            let expect = sub_mod(
                mul_mod(a.get(0, 0), a.get(1, 1), 3329),
                mul_mod(a.get(0, 1), a.get(1, 0), 3329),
                3329,
            );
            assert_eq!(mat_det(&a, &ring).unwrap(), expect);
        }
    }

    #[test]
    fn shape_errors() {
        let ring = ring();
        let a = MatrixZq::zero(2, 3);
        let b = MatrixZq::zero(2, 3);
        assert!(mat_mul(&a, &b, &ring).is_err());
        assert!(mat_inverse(&a, &ring).is_err());
        assert!(mat_det(&a, &ring).is_err());
        assert!(MatrixZq::new(2, 2, vec![1, 2, 3]).is_err());
    }
}
