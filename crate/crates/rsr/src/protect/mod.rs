//! The countermeasure: random splitting, share-and-recombine execution, and
//! fault-correcting repetition with majority voting.
//!
//! A protected evaluation never hands the secret operand to the underlying
//! program. It derives `c` randomized queries whose joint recombination
//! reproduces the true answer (the self-reducibility property of the
//! operation), runs the program on each query, and recombines. Against fault
//! injection, the whole evaluation repeats `n` times and a shuffled majority
//! vote picks the answer; a single-shot evaluation succeeds with probability
//! at least `1 - eps*c` when each program invocation is faulted
//! independently with probability at most `eps`, and the repetition count
//! for a target confidence comes from the bound helpers.

mod bases;
mod bounds;
mod split;
mod vote;

pub use bases::{
    protected_int_div, protected_int_mul_blind, protected_int_mul_split, protected_mat_det,
    protected_mat_inverse, protected_mat_mul, protected_mod, protected_mod_exp,
    protected_mod_exp_nested, protected_mod_inverse, protected_mod_mul, protected_ntt,
    protected_poly_mul, IntMulBlindBasis, IntMulSplitBasis, MatDetBasis, MatInvBasis,
    MatMulBasis, ModBasis, ModExpBasis, ModInvBasis, ModMulBasis, NttBasis, PolyMulBasis,
    INT_SHARE_BITS,
};
pub use bounds::{min_repetitions_attack_bound, min_repetitions_chernoff};
pub use split::{random_split, ShareVector};
pub use vote::{
    boyer_moore_majority, fisher_yates_shuffle, protected_majority_vote,
    protected_majority_vote_hooked, VoteHooks,
};

use crate::rng::Prng;
use crate::{Error, Result};

/// Security parameters of a protected evaluation.
///
/// `c` is the number of program invocations a single evaluation hides the
/// operand behind; `n` is the number of repeated evaluations fed to the
/// majority vote. They are independent knobs: `c` buys hiding (and bounds
/// the single-shot fault exposure at `eps*c`), `n` buys correction.
///
/// `n` is kept odd so a two-way vote cannot tie; an even request is bumped
/// up by one. Detected ambiguity still surfaces as [`Error::NoMajority`]
/// when three or more answers split the vote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecurityParams {
    c: u32,
    n: u32,
    epsilon: f64,
    delta: f64,
}

impl SecurityParams {
    pub fn new(c: u32, n: u32) -> Result<Self> {
        if c < 2 {
            return Err(Error::InvalidParams("share count c must be at least 2"));
        }
        if n < 1 {
            return Err(Error::InvalidParams("repetition count n must be at least 1"));
        }
        let n = if n.is_multiple_of(2) { n + 1 } else { n };
        Ok(SecurityParams { c, n, epsilon: 0.01, delta: 0.05 })
    }

    /// Record the assumed per-invocation fault rate and confidence target.
    /// Requires `eps * c < 1/2`, the regime where majority boosting works.
    pub fn with_attack_rate(mut self, epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParams("epsilon and delta must lie in (0, 1)"));
        }
        if epsilon * self.c as f64 >= 0.5 {
            return Err(Error::InvalidParams("eps * c must stay below 1/2 for boosting"));
        }
        self.epsilon = epsilon;
        self.delta = delta;
        Ok(self)
    }

    /// Size `n` from the Chernoff boosting bound for the given attack rate.
    pub fn for_bound(c: u32, epsilon: f64, delta: f64) -> Result<Self> {
        let base = SecurityParams::new(c, 1)?.with_attack_rate(epsilon, delta)?;
        let n = min_repetitions_chernoff(1.0 - epsilon * c as f64, delta)?;
        Ok(SecurityParams { n, ..base })
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Whether a scheme runs its sensitive operations protected or bare.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protection {
    Off,
    On(SecurityParams),
}

/// The recombination rule tying a protected operation to its program.
///
/// `derive` produces the randomized queries the program will see (plus any
/// blinding state the recombiner needs back), and `recombine` maps the
/// program's answers to the protected result. For a fault-free program the
/// recombination reproduces the unprotected operation exactly.
pub trait FunctionBasis {
    type Query;
    type Answer: Clone + PartialEq;
    type Blind;

    fn derive(&self, c: u32, rng: &mut Prng) -> Result<(Vec<Self::Query>, Self::Blind)>;

    fn recombine(
        &self,
        blind: &Self::Blind,
        queries: &[Self::Query],
        answers: &[Self::Answer],
    ) -> Result<Self::Answer>;
}

/// One hiding evaluation: derive queries, run the program on each, and
/// recombine. The program never sees the secret operand itself.
pub fn c_secure_execute<B, P>(
    basis: &B,
    black_box: &mut P,
    c: u32,
    rng: &mut Prng,
) -> Result<B::Answer>
where
    B: FunctionBasis,
    P: FnMut(&B::Query) -> Result<B::Answer>,
{
    let (queries, blind) = basis.derive(c, rng)?;
    let mut answers = Vec::with_capacity(queries.len());
    for q in &queries {
        answers.push(black_box(q)?);
    }
    basis.recombine(&blind, &queries, &answers)
}

/// Fault-correcting evaluation: `n` independent hiding evaluations followed
/// by a shuffled majority vote. The winner must hold a strict majority of
/// the `n` planned repetitions; a detected split returns
/// [`Error::NoMajority`] instead of a guess.
pub fn n_secure_execute<B, P>(
    basis: &B,
    black_box: &mut P,
    params: &SecurityParams,
    rng: &mut Prng,
) -> Result<B::Answer>
where
    B: FunctionBasis,
    P: FnMut(&B::Query) -> Result<B::Answer>,
{
    vote_over_repetitions(params.n(), rng, |rng| {
        c_secure_execute(basis, black_box, params.c(), rng)
    })
}

/// Run `rep` for each of `n` repetitions and majority-vote the answers.
///
/// A repetition that errors is a detected fault: it is logged out of the
/// vote rather than aborting the evaluation, except for [`Error::Reset`]
/// (the device crashed) which propagates immediately. The winner still
/// needs a strict majority of all `n` planned repetitions.
pub(crate) fn vote_over_repetitions<T, F>(n: u32, rng: &mut Prng, mut rep: F) -> Result<T>
where
    T: Clone + PartialEq,
    F: FnMut(&mut Prng) -> Result<T>,
{
    let mut answers = Vec::with_capacity(n as usize);
    let mut first_err = None;
    for _ in 0..n {
        match rep(rng) {
            Ok(a) => answers.push(a),
            Err(Error::Reset) => return Err(Error::Reset),
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    if answers.is_empty() {
        return Err(first_err.unwrap_or(Error::NoMajority));
    }
    let winner = protected_majority_vote(&answers, n, rng)?;
    let support = answers.iter().filter(|a| **a == winner).count();
    if 2 * support > n as usize {
        Ok(winner)
    } else {
        Err(Error::NoMajority)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(SecurityParams::new(1, 3).is_err());
        assert!(SecurityParams::new(2, 0).is_err());
        let p = SecurityParams::new(2, 10).unwrap();
        assert_eq!(p.n(), 11); // forced odd
        let p = SecurityParams::new(3, 7).unwrap();
        assert_eq!(p.n(), 7);
        assert!(SecurityParams::new(2, 3).unwrap().with_attack_rate(0.3, 0.05).is_err());
        assert!(SecurityParams::new(2, 3).unwrap().with_attack_rate(0.1, 0.05).is_ok());
    }

    #[test]
    fn for_bound_sizes_n() {
        // 1 - 0.05*2 = 0.9; the boosting bound gives 34, forced odd to 35.
        let p = SecurityParams::for_bound(2, 0.05, 0.05).unwrap();
        assert_eq!(p.n(), 35);
    }
}
