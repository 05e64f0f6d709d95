//! Repetition-count lower bounds for the majority vote.
//!
//! Two formulas are exposed side by side and deliberately not reconciled.
//! [`min_repetitions_attack_bound`] evaluates the bound stated directly in
//! terms of the attack rate, `n = ln(1/delta) * 2(1 - eps*c) / (eps*c/2)^2`;
//! [`min_repetitions_chernoff`] evaluates the standard boosting bound
//! `n = ln(1/delta) * 2p / (p - 1/2)^2` at `p = 1 - eps*c`. The two
//! disagree numerically (the first is far more conservative); callers can
//! compare. Logarithms are natural.

use crate::{Error, Result};

fn ceil_odd(x: f64) -> u32 {
    let n = x.ceil().max(1.0) as u32;
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

/// Repetition count from the attack-rate form of the bound (rounded up,
/// forced odd). Requires `eps, delta` in `(0, 1)` and `eps * c < 1`.
pub fn min_repetitions_attack_bound(epsilon: f64, c: u32, delta: f64) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) || c == 0 {
        return Err(Error::InvalidParams("epsilon and delta must lie in (0, 1), c >= 1"));
    }
    let ec = epsilon * c as f64;
    if ec >= 1.0 {
        return Err(Error::InvalidParams("eps * c must stay below 1"));
    }
    let n = (1.0 / delta).ln() * 2.0 * (1.0 - ec) / ((ec / 2.0) * (ec / 2.0));
    Ok(ceil_odd(n))
}

/// Repetition count from Chernoff boosting of an algorithm that answers
/// correctly with probability `p > 1/2` (rounded up, forced odd). A perfect
/// program (`p >= 1`) needs no boosting and clamps to 1.
pub fn min_repetitions_chernoff(p: f64, delta: f64) -> Result<u32> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParams("delta must lie in (0, 1)"));
    }
    if p >= 1.0 {
        return Ok(1);
    }
    if p <= 0.5 {
        return Err(Error::InvalidParams("boosting requires success probability above 1/2"));
    }
    let n = (1.0 / delta).ln() * 2.0 * p / ((p - 0.5) * (p - 0.5));
    Ok(ceil_odd(n))
}
