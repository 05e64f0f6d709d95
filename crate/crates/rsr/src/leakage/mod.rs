//! Hamming-weight power-trace simulation.
//!
//! A probed operation emits every intermediate value it writes, in
//! execution order, into a [`TraceRecorder`]; a simulated power sample is
//! the Hamming weight of that value plus Gaussian noise. Probed variants
//! must emit an input-independent number of events for a given ring, so
//! traces of one operation always align sample-for-sample; the ladder pads
//! its loop to a fixed bit budget for exactly that reason (which is also
//! what makes its bit-length leakage visible).
//!
//! The probed functions are taps around the exact kernels in [`crate::arith`]
//! and return identical values; tests pin that equality.

mod assess;
mod targets;

pub use assess::{
    build_class_vectors, sost_poi, total_power_t, tvla_welch_t, SostReport, TTestReport,
    POI_WINDOW_HALFWIDTH, SOST_POI_FRACTION, TVLA_THRESHOLD, T_SENTINEL,
};
pub use targets::{run_tvla_assessment, LeakageReport, TvlaTarget};

use crate::arith::{add_mod, mul_mod, sub_mod, PolyRing, RingParams};
use crate::rng::Prng;
use crate::{Error, Result};

/// Population count of a machine word: the leakage model's per-write
/// power contribution.
pub fn hamming_weight(v: u64) -> u32 {
    v.count_ones()
}

/// Collects the intermediate values a probed operation writes.
#[derive(Debug, Default)]
pub struct TraceRecorder {
    values: Vec<u64>,
}

impl TraceRecorder {
    pub fn new() -> Self {
        TraceRecorder { values: Vec::new() }
    }

    #[inline]
    pub fn emit(&mut self, v: u64) {
        self.values.push(v);
    }

    pub fn emit_all(&mut self, vs: &[u64]) {
        self.values.extend_from_slice(vs);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Run a probed operation and turn its event stream into one noisy trace:
/// `sample_i = HW(value_i) + N(0, sigma)`.
pub fn simulate_trace<F>(mut op: F, sigma: f64, rng: &mut Prng) -> Result<Vec<f64>>
where
    F: FnMut(&mut TraceRecorder) -> Result<()>,
{
    let mut recorder = TraceRecorder::new();
    op(&mut recorder)?;
    Ok(recorder
        .values
        .iter()
        .map(|&v| hamming_weight(v) as f64 + rng.gaussian(sigma))
        .collect())
}

/// Probed Euclidean reduction: emits the loaded operand word and the
/// written result.
pub fn probed_mod_reduce(x: u128, ring: &RingParams, rec: &mut TraceRecorder) -> u64 {
    rec.emit(x as u64);
    let r = crate::arith::mod_reduce(x as i128, ring);
    rec.emit(r);
    r
}

/// Probed modular multiplication: emits both operand loads and the result.
pub fn probed_mod_mul(x: u128, y: u128, ring: &RingParams, rec: &mut TraceRecorder) -> u64 {
    rec.emit(x as u64);
    rec.emit(y as u64);
    let r = crate::arith::mod_mul(x, y, ring);
    rec.emit(r);
    r
}

/// Probed Montgomery ladder over a fixed bit budget.
///
/// Emits the base and exponent loads, then both ladder registers after
/// every step. The loop always runs `exponent_bits` steps whatever the
/// exponent, so the trace length is input-independent; exponents with
/// fewer significant bits idle in the initial register state for the
/// leading steps, which is precisely the bit-length leakage surface of
/// the unpadded ladder.
pub fn probed_mod_exp_ladder(
    a: u128,
    x: u128,
    exponent_bits: u32,
    ring: &RingParams,
    rec: &mut TraceRecorder,
) -> Result<u64> {
    if exponent_bits < 128 && (x >> exponent_bits) != 0 {
        return Err(Error::InvalidParams("exponent exceeds the ladder's bit budget"));
    }
    let p = ring.modulus();
    let base = (a % p as u128) as u64;
    rec.emit(base);
    rec.emit(x as u64);
    let mut r0: u64 = 1;
    let mut r1 = base;
    for i in (0..exponent_bits).rev() {
        if (x >> i) & 1 == 0 {
            r1 = mul_mod(r0, r1, p);
            r0 = mul_mod(r0, r0, p);
        } else {
            r0 = mul_mod(r0, r1, p);
            r1 = mul_mod(r1, r1, p);
        }
        rec.emit(r0);
        rec.emit(r1);
    }
    Ok(if base == 0 { 0 } else { r0 })
}

/// Probed forward NTT: emits the coefficient loads and every butterfly's
/// two written outputs, in execution order.
pub fn probed_ntt_forward(p: &[u64], ring: &PolyRing, rec: &mut TraceRecorder) -> Result<Vec<u64>> {
    if p.len() != ring.degree() {
        return Err(Error::InvalidParams("input length must equal the ring degree"));
    }
    let n = ring.degree();
    let q = ring.modulus();
    let twiddles = ring.twiddles();
    let mut a: Vec<u64> = p.iter().map(|&c| c % q).collect();
    rec.emit_all(&a);
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
                rec.emit(a[j]);
                rec.emit(a[j + t]);
            }
        }
        m *= 2;
    }
    Ok(a)
}

/// N traces of equal length with a class label and the noise level they
/// were generated at.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMatrix {
    pub label: String,
    pub sigma: f64,
    rows: Vec<Vec<f64>>,
}

impl TraceMatrix {
    /// Assemble from per-trace rows; every row must have the same length.
    pub fn from_rows(label: &str, sigma: f64, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty);
        }
        let expected = rows[0].len();
        for row in &rows {
            if row.len() != expected {
                return Err(Error::VariableLength { expected, got: row.len() });
            }
        }
        Ok(TraceMatrix { label: label.to_string(), sigma, rows })
    }

    pub fn traces(&self) -> usize {
        self.rows.len()
    }

    pub fn samples(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// One column of samples across traces.
    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[j])
    }
}
