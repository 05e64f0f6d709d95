//! Majority voting: linear-scan candidate selection, unbiased shuffling,
//! and the loop-checked protected vote built from both.

use crate::rng::Prng;
use crate::{Error, Result};

/// Boyer-Moore linear majority scan.
///
/// If a strict majority element exists it is returned, whatever the order
/// of the list. Otherwise the canonical survivor of the scan is returned
/// and callers must treat it as unverified.
pub fn boyer_moore_majority<T: PartialEq>(items: &[T]) -> Result<&T> {
    if items.is_empty() {
        return Err(Error::Empty);
    }
    let mut candidate = &items[0];
    let mut count = 0usize;
    for item in items {
        if count == 0 {
            candidate = item;
            count = 1;
        } else if candidate == item {
            count += 1;
        } else {
            count -= 1;
        }
    }
    Ok(candidate)
}

/// Unbiased in-place shuffle: walks `i` from the last index down to 1,
/// swapping with a uniform `j` in `[0, i]`.
pub fn fisher_yates_shuffle<T>(mut items: Vec<T>, rng: &mut Prng) -> Vec<T> {
    if items.len() < 2 {
        return items;
    }
    for i in (1..items.len()).rev() {
        let j = rng.below_u64(i as u64 + 1) as usize;
        items.swap(i, j);
    }
    items
}

/// Fault hooks for [`protected_majority_vote_hooked`]; both `None` in
/// normal operation. `skip_round_store` drops one round's answer (a skipped
/// store), `skip_counter_update` drops one round's progress tick (a skipped
/// counter increment, which the completion check must catch).
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VoteHooks {
    pub skip_round_store: Option<u32>,
    pub skip_counter_update: Option<u32>,
}

/// Self-correcting majority vote: reshuffle the votes and rerun the scan in
/// each of `n` rounds, verify the loop actually completed `n` rounds, then
/// return the majority of the round answers.
///
/// The reshuffling decorrelates the scan order across rounds; the explicit
/// completion check turns a skipped loop iteration into
/// [`Error::LoopIntegrityFailure`] instead of a silently weaker vote.
pub fn protected_majority_vote<T: Clone + PartialEq>(
    items: &[T],
    n: u32,
    rng: &mut Prng,
) -> Result<T> {
    protected_majority_vote_hooked(items, n, rng, VoteHooks::default())
}

#[doc(hidden)]
pub fn protected_majority_vote_hooked<T: Clone + PartialEq>(
    items: &[T],
    n: u32,
    rng: &mut Prng,
    hooks: VoteHooks,
) -> Result<T> {
    if items.is_empty() {
        return Err(Error::Empty);
    }
    if n < 1 {
        return Err(Error::InvalidParams("vote round count must be at least 1"));
    }
    let mut working = items.to_vec();
    let mut round_answers: Vec<T> = Vec::with_capacity(n as usize);
    let mut completed: u32 = 0;
    for round in 0..n {
        working = fisher_yates_shuffle(working, rng);
        let answer = boyer_moore_majority(&working)?.clone();
        if hooks.skip_round_store != Some(round) {
            round_answers.push(answer);
        }
        if hooks.skip_counter_update != Some(round) {
            completed += 1;
        }
    }
    if completed != n {
        return Err(Error::LoopIntegrityFailure);
    }
    Ok(boyer_moore_majority(&round_answers)?.clone())
}
