//! Brute-force references used to validate the solvers. Exponential by
//! construction; every entry point refuses instances past its size guard.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{subchannels_needed, Scenario};
use crate::scalar::Scalar;
use crate::solution::{Budget, EdgeCosts};
use crate::tci::KnapsackInstance;

pub const MAX_SEARCH_OBJECTS: usize = 6;
pub const MAX_SEARCH_TYPES: usize = 3;
pub const MAX_COUNT_VECTORS: u128 = 50_000_000;
pub const MAX_PARTITION_ANNOTATORS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub value: usize,
    /// Type sequence (sequence search) or per-type counts (count enumeration).
    pub witness: Vec<usize>,
    pub states: u64,
}

/// Optimum over every length-M type sequence: the value of a sequence is its
/// longest prefix that fits both budgets.
pub fn exhaustive_search(budget: &Budget, costs: &impl EdgeCosts) -> Result<OracleReport> {
    let types = costs.type_count();
    if budget.objects > MAX_SEARCH_OBJECTS || types > MAX_SEARCH_TYPES {
        return Err(Error::TooLarge(format!(
            "{} objects x {} types exceeds {} x {}",
            budget.objects, types, MAX_SEARCH_OBJECTS, MAX_SEARCH_TYPES
        )));
    }
    let mut best = OracleReport {
        value: 0,
        witness: Vec::new(),
        states: 0,
    };
    if types == 0 {
        return Ok(best);
    }
    let mut seq = vec![0usize; budget.objects];
    loop {
        let (mut k, mut l, mut len) = (0usize, 0usize, 0usize);
        for &n in &seq {
            best.states += 1;
            let Some(c) = costs.edge_cost(k, n) else {
                break;
            };
            if !budget.admits(k + c.annotators, l + c.subchannels) {
                break;
            }
            k += c.annotators;
            l += c.subchannels;
            len += 1;
        }
        if len > best.value {
            best.value = len;
            best.witness = seq[..len].to_vec();
        }
        // odometer, last position fastest
        let mut pos = seq.len();
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < types {
                break;
            }
            seq[pos] = 0;
        }
    }
}

/// Optimum of the equalized problem by enumerating every count vector inside
/// the per-type caps, with at most `objects` objects in total.
pub fn exhaustive_counts(inst: &KnapsackInstance, objects: usize) -> Result<OracleReport> {
    let caps: Vec<usize> = (0..inst.types()).map(|n| inst.cap(n)).collect();
    let space = caps
        .iter()
        .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128 + 1));
    match space {
        Some(s) if s <= MAX_COUNT_VECTORS => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "count-vector space {caps:?} exceeds {MAX_COUNT_VECTORS}"
            )))
        }
    }
    let mut counts = vec![0usize; caps.len()];
    let mut best = OracleReport {
        value: 0,
        witness: counts.clone(),
        states: 0,
    };
    loop {
        best.states += 1;
        let total: usize = counts.iter().sum();
        if total > best.value && total <= objects && inst.admits(&counts) {
            best.value = total;
            best.witness = counts.clone();
        }
        let mut pos = counts.len();
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            counts[pos] += 1;
            if counts[pos] <= caps[pos] {
                break;
            }
            counts[pos] = 0;
        }
    }
}

/// Fewest total sub-channels for clusters of the given `(size, rate)` over
/// every assignment of annotators to clusters, sequential or not. `None` if
/// no assignment can be served.
pub fn partition_oracle<T: Scalar>(
    clusters: &[(usize, T)],
    snrs: &[T],
    scen: &Scenario<T>,
) -> Result<Option<usize>> {
    if clusters.len() > 2 || snrs.len() > MAX_PARTITION_ANNOTATORS {
        return Err(Error::TooLarge(format!(
            "{} clusters over {} annotators exceeds 2 over {}",
            clusters.len(),
            snrs.len(),
            MAX_PARTITION_ANNOTATORS
        )));
    }
    let needed: usize = clusters.iter().map(|c| c.0).sum();
    if needed > snrs.len() {
        return Err(Error::BudgetExceeded {
            needed,
            available: snrs.len(),
        });
    }
    let slots = clusters.len() + 1; // last slot = unused
    let total = slots.pow(snrs.len() as u32);
    let mut best: Option<usize> = None;
    let mut assign = vec![0usize; snrs.len()];
    for code in 0..total {
        let mut c = code;
        for a in assign.iter_mut() {
            *a = c % slots;
            c /= slots;
        }
        let mut cost = Some(0usize);
        for (ci, &(size, rate)) in clusters.iter().enumerate() {
            let members: Vec<T> = snrs
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == ci)
                .map(|(&g, _)| g)
                .collect();
            if members.len() != size {
                cost = None;
                break;
            }
            let worst = members.iter().copied().fold(T::infinity(), T::min);
            cost = match subchannels_needed(rate, scen, worst) {
                Ok(l) => cost.map(|x| x + l),
                Err(_) => None,
            };
            if cost.is_none() {
                break;
            }
        }
        if let Some(c) = cost {
            best = Some(best.map_or(c, |b| b.min(c)));
        }
    }
    Ok(best)
}

/// Fraction of `trials` in which a majority of `size` independent annotators,
/// each wrong with probability `e`, is wrong.
pub fn simulate_votes(e: f64, size: usize, trials: u64, seed: u64) -> Result<f64> {
    if size == 0 || size.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "cluster size {size} must be odd"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::InvalidArgument(format!(
            "probability {e} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let majority = size.div_ceil(2);
    let wrong = (0..trials)
        .filter(|_| (0..size).filter(|_| rng.random_bool(e)).count() >= majority)
        .count();
    Ok(wrong as f64 / trials as f64)
}
