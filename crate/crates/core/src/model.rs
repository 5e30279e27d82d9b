//! Labelling and multicast model: encoding-rate ladder, majority-vote error
//! probabilities, cluster sizing, link capacity and sub-channel sizing.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::scalar::{guarded_ceil, Scalar};

/// One rung of the encoding-rate ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEntry<T> {
    /// Compressed bits per source bit, in `(0, 1]`.
    pub rate: T,
    /// Per-annotator labelling error probability at this rate, in `(0, 0.5)`.
    pub lep: T,
}

/// The finite set of encoding rates with their labelling error probabilities.
///
/// Index 0 is the highest rate (type-1 cluster). Rates strictly decrease and
/// error probabilities strictly increase along the ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct RateLadder<T> {
    entries: Vec<RateEntry<T>>,
}

impl<T: Scalar> RateLadder<T> {
    pub fn new(entries: Vec<RateEntry<T>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument(
                "rate ladder must not be empty".into(),
            ));
        }
        let half = T::lit(0.5);
        for (i, e) in entries.iter().enumerate() {
            if !(e.rate > T::zero() && e.rate <= T::one()) {
                return Err(Error::InvalidArgument(format!(
                    "rate {} at index {i} outside (0, 1]",
                    e.rate
                )));
            }
            if !(e.lep > T::zero() && e.lep < half) {
                return Err(Error::InvalidArgument(format!(
                    "error probability {} at index {i} outside (0, 0.5)",
                    e.lep
                )));
            }
        }
        for (i, w) in entries.windows(2).enumerate() {
            if !(w[1].rate < w[0].rate) {
                return Err(Error::InvalidArgument(format!(
                    "rates must strictly decrease (index {})",
                    i + 1
                )));
            }
            if !(w[1].lep > w[0].lep) {
                return Err(Error::InvalidArgument(format!(
                    "error probabilities must strictly increase (index {})",
                    i + 1
                )));
            }
        }
        Ok(RateLadder { entries })
    }

    /// Build from `(rate, lep)` pairs.
    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(rate, lep)| RateEntry { rate, lep })
                .collect(),
        )
    }

    /// Three-rung ladder `{0.5·log2 3, 0.5, 0.5·log2 1.5}` with error
    /// probabilities `{0.1, 0.15, 0.2}`.
    pub fn reference() -> Self {
        let half = T::lit(0.5);
        Self::from_pairs(&[
            (half * T::lit(3.0).log2(), T::lit(0.1)),
            (half, T::lit(0.15)),
            (half * T::lit(1.5).log2(), T::lit(0.2)),
        ])
        .expect("reference ladder is valid")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[RateEntry<T>] {
        &self.entries
    }

    pub fn rate(&self, n: usize) -> T {
        self.entries[n].rate
    }

    pub fn lep(&self, n: usize) -> T {
        self.entries[n].lep
    }

    /// Cluster size for every rung under target `theta`.
    pub fn cluster_sizes(&self, theta: T, sizing: ClusterSizing) -> Result<Vec<usize>> {
        self.entries
            .iter()
            .map(|e| cluster_size_with(e.lep, theta, sizing))
            .collect()
    }
}

/// How cluster sizes are derived from the accuracy target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClusterSizing {
    /// Smallest size whose Stirling-approximated error meets the target.
    #[default]
    Stirling,
    /// Stirling size rounded up to the next odd integer, certified with the
    /// exact majority-vote error.
    ExactOdd,
}

/// Static description of one labelling campaign.
///
/// Zero annotator or sub-channel budgets are allowed; they simply admit no
/// labelled object.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    /// Number of objects waiting to be labelled (M).
    pub objects: usize,
    /// Bits per raw object (S).
    pub object_bits: u32,
    /// Target majority-vote error probability (θ).
    pub theta: T,
    /// Annotator budget (K).
    pub annotators: usize,
    /// Sub-channel budget (L).
    pub subchannels: usize,
    /// Bandwidth of a single sub-channel, B/L in Hz.
    pub subchannel_bandwidth: T,
    /// Transmission duration (T) in seconds.
    pub duration: T,
}

impl<T: Scalar> Scenario<T> {
    /// S = 10, B/L = 3, T = 1, θ = 0.1 with the given budgets.
    pub fn reference(objects: usize, annotators: usize, subchannels: usize) -> Self {
        Scenario {
            objects,
            object_bits: 10,
            theta: T::lit(0.1),
            annotators,
            subchannels,
            subchannel_bandwidth: T::lit(3.0),
            duration: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.object_bits == 0 {
            return Err(Error::InvalidArgument(
                "object size must be positive".into(),
            ));
        }
        if !(self.theta > T::zero() && self.theta < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "theta {} outside (0, 1)",
                self.theta
            )));
        }
        if !(self.subchannel_bandwidth > T::zero() && self.subchannel_bandwidth.is_finite()) {
            return Err(Error::InvalidArgument(
                "sub-channel bandwidth must be positive".into(),
            ));
        }
        if !(self.duration > T::zero() && self.duration.is_finite()) {
            return Err(Error::InvalidArgument("duration must be positive".into()));
        }
        Ok(())
    }

    /// Total bandwidth B.
    pub fn bandwidth(&self) -> T {
        self.subchannel_bandwidth * T::from_usize(self.subchannels).unwrap()
    }

    pub fn with_budgets(&self, annotators: usize, subchannels: usize) -> Self {
        Scenario {
            annotators,
            subchannels,
            ..self.clone()
        }
    }
}

/// A cluster assigned to one object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSpec {
    /// Ladder index (0 = type-1).
    pub cluster_type: usize,
    /// Annotators in decreasing-SNR order, 0-based half-open range.
    pub annotators: Range<usize>,
    pub subchannels: usize,
}

impl ClusterSpec {
    pub fn size(&self) -> usize {
        self.annotators.len()
    }
}

fn check_probability<T: Scalar>(e: T) -> Result<()> {
    if e >= T::zero() && e <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "probability {e} outside [0, 1]"
        )))
    }
}

/// Majority-vote error probability of `size` independent annotators that each
/// err with probability `e`. `size` must be odd.
pub fn exact_rlep<T: Scalar>(e: T, size: usize) -> Result<T> {
    check_probability(e)?;
    if size == 0 || size.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "majority vote needs an odd, positive cluster size (got {size})"
        )));
    }
    let q = T::one() - e;
    let mut total = T::zero();
    // running C(size, i)
    let mut binom = T::one();
    for i in 0..=size {
        if i > 0 {
            binom = binom * T::from_usize(size - i + 1).unwrap() / T::from_usize(i).unwrap();
        }
        if i >= size.div_ceil(2) {
            total = total + binom * e.powi(i as i32) * q.powi((size - i) as i32);
        }
    }
    Ok(total.min(T::one()))
}

/// Stirling approximation `(4e(1−e))^(size/2)` of the majority-vote error.
pub fn approx_rlep<T: Scalar>(e: T, size: usize) -> Result<T> {
    check_probability(e)?;
    if size == 0 {
        return Err(Error::InvalidArgument(
            "cluster size must be positive".into(),
        ));
    }
    let base = T::lit(4.0) * e * (T::one() - e);
    Ok(base.powf(T::from_usize(size).unwrap() / T::lit(2.0)))
}

/// Smallest cluster (at least one annotator) whose approximate majority-vote
/// error does not exceed `theta`.
pub fn cluster_size<T: Scalar>(e: T, theta: T) -> Result<usize> {
    if !(e > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "error probability {e} must be positive"
        )));
    }
    if !(e < T::lit(0.5)) {
        return Err(Error::InvalidArgument(format!(
            "error probability {e} >= 0.5: no finite cluster reaches the target"
        )));
    }
    if !(theta > T::zero() && theta < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "theta {theta} outside (0, 1)"
        )));
    }
    let ratio = T::lit(2.0) * theta.ln() / (T::lit(4.0) * e * (T::one() - e)).ln();
    let k = guarded_ceil(ratio)
        .ok_or_else(|| Error::InvalidArgument("cluster size overflow".into()))?;
    Ok((k as usize).max(1))
}

pub fn cluster_size_with<T: Scalar>(e: T, theta: T, sizing: ClusterSizing) -> Result<usize> {
    let k = cluster_size(e, theta)?;
    match sizing {
        ClusterSizing::Stirling => Ok(k),
        ClusterSizing::ExactOdd => {
            let odd = if k % 2 == 0 { k + 1 } else { k };
            let p = exact_rlep(e, odd)?;
            if p > theta {
                return Err(Error::Infeasible(format!(
                    "odd cluster of {odd} has majority error {p} above target {theta}"
                )));
            }
            Ok(odd)
        }
    }
}

/// Bits deliverable to an annotator at SNR `gamma` over `subchannels` sub-channels.
pub fn capacity<T: Scalar>(subchannels: usize, scen: &Scenario<T>, gamma: T) -> T {
    T::from_usize(subchannels).unwrap()
        * scen.subchannel_bandwidth
        * scen.duration
        * (T::one() + gamma).log2()
}

/// Minimum sub-channel count that delivers an object encoded at `rate` to an
/// annotator with SNR `gamma`.
pub fn subchannels_needed<T: Scalar>(rate: T, scen: &Scenario<T>, gamma: T) -> Result<usize> {
    if !(rate > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "rate {rate} must be positive"
        )));
    }
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(Error::Infeasible(format!(
            "SNR {gamma} cannot carry any payload"
        )));
    }
    let per_subchannel = scen.subchannel_bandwidth * scen.duration * (T::one() + gamma).log2();
    let payload = rate * T::from_u32(scen.object_bits).unwrap();
    let count = guarded_ceil(payload / per_subchannel)
        .ok_or_else(|| Error::Infeasible("sub-channel count overflow".into()))?;
    Ok((count as usize).max(1))
}

/// `(L_min, L_max)`: sub-channel needs at the best and the worst SNR.
pub fn subchannel_bounds<T: Scalar>(
    rate: T,
    scen: &Scenario<T>,
    gamma_best: T,
    gamma_worst: T,
) -> Result<(usize, usize)> {
    if gamma_best < gamma_worst {
        return Err(Error::InvalidArgument(format!(
            "best SNR {gamma_best} below worst SNR {gamma_worst}"
        )));
    }
    Ok((
        subchannels_needed(rate, scen, gamma_best)?,
        subchannels_needed(rate, scen, gamma_worst)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scen() -> Scenario<f64> {
        Scenario::reference(10, 10, 10)
    }

    /// Sum of probabilities of all 2^size vote patterns that leave the
    /// majority wrong.
    fn brute_force_rlep(e: f64, size: usize) -> f64 {
        (0u32..1 << size)
            .filter(|p| p.count_ones() as usize > size / 2)
            .map(|p| {
                let wrong = p.count_ones() as i32;
                e.powi(wrong) * (1.0 - e).powi(size as i32 - wrong)
            })
            .sum()
    }

    #[test]
    fn exact_rlep_examples() {
        assert_eq!(exact_rlep(0.0, 5).unwrap(), 0.0);
        assert!((exact_rlep(0.1_f64, 1).unwrap() - 0.1).abs() < 1e-15);
        let oracle = brute_force_rlep(0.1, 3);
        assert!((oracle - 0.028).abs() < 1e-12);
        assert!((exact_rlep(0.1, 3).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn exact_rlep_rejects_even_sizes() {
        assert!(matches!(exact_rlep(0.1, 4), Err(Error::InvalidArgument(_))));
        assert!(matches!(exact_rlep(0.1, 0), Err(Error::InvalidArgument(_))));
        assert!(exact_rlep(1.5, 3).is_err());
    }

    #[test]
    fn approx_rlep_examples() {
        for k in 1..20 {
            assert!((approx_rlep(0.5_f64, k).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((approx_rlep(0.1_f64, 2).unwrap() - 0.36).abs() < 1e-12);
        assert!((approx_rlep(0.2_f64, 4).unwrap() - 0.4096).abs() < 1e-12);
    }

    fn smallest_size_by_search(e: f64, theta: f64) -> usize {
        (1..)
            .find(|&k| approx_rlep(e, k).unwrap() <= theta)
            .unwrap()
    }

    #[test]
    fn cluster_size_examples() {
        assert_eq!(smallest_size_by_search(0.1, 0.1), 5);
        assert_eq!(smallest_size_by_search(0.2, 0.1), 11);
        assert_eq!(cluster_size(0.1, 0.1).unwrap(), 5);
        assert_eq!(cluster_size(0.15, 0.1).unwrap(), 7);
        assert_eq!(cluster_size(0.2, 0.1).unwrap(), 11);
        assert_eq!(cluster_size(0.1, 0.9).unwrap(), 1);
    }

    #[test]
    fn cluster_size_rejects_hopeless_annotators() {
        assert!(cluster_size(0.5, 0.1).is_err());
        assert!(cluster_size(0.7, 0.1).is_err());
        assert!(cluster_size(0.0, 0.1).is_err());
        assert!(cluster_size(0.1, 1.0).is_err());
    }

    #[test]
    fn exact_odd_sizing_rounds_up_and_certifies() {
        assert_eq!(
            cluster_size_with(0.1, 0.1, ClusterSizing::ExactOdd).unwrap(),
            5
        );
        // Stirling gives 2 for e = 0.1, theta = 0.4
        assert_eq!(cluster_size(0.1, 0.4).unwrap(), 2);
        let k = cluster_size_with(0.1, 0.4, ClusterSizing::ExactOdd).unwrap();
        assert_eq!(k, 3);
        assert!(exact_rlep(0.1, k).unwrap() <= 0.4);
    }

    #[test]
    fn reference_ladder_sizes() {
        let ladder = RateLadder::<f64>::reference();
        assert_eq!(
            ladder.cluster_sizes(0.1, ClusterSizing::Stirling).unwrap(),
            vec![5, 7, 11]
        );
        assert!((ladder.rate(0) - 0.792_481_250_360_578).abs() < 1e-12);
    }

    #[test]
    fn ladder_validation() {
        assert!(RateLadder::<f64>::new(vec![]).is_err());
        assert!(RateLadder::from_pairs(&[(0.5, 0.1), (0.6, 0.2)]).is_err());
        assert!(RateLadder::from_pairs(&[(0.6, 0.2), (0.5, 0.1)]).is_err());
        assert!(RateLadder::from_pairs(&[(0.6, 0.5)]).is_err());
        assert!(RateLadder::from_pairs(&[(1.2, 0.1)]).is_err());
        assert!(RateLadder::from_pairs(&[(1.0, 0.1)]).is_ok());
    }

    #[test]
    fn capacity_examples() {
        let s = scen();
        assert_eq!(capacity(0, &s, 5.0), 0.0);
        assert!((capacity(2, &s, 3.0) - 12.0).abs() < 1e-12);
        assert!((capacity(1, &s, 1.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn subchannels_needed_examples() {
        let s = scen();
        assert_eq!(subchannels_needed(0.5, &s, 1.0).unwrap(), 2);
        assert_eq!(subchannels_needed(0.6, &s, 1.0).unwrap(), 2);
        assert_eq!(subchannels_needed(0.792, &s, 0.5).unwrap(), 5);
        assert!(matches!(
            subchannels_needed(0.5, &s, 0.0),
            Err(Error::Infeasible(_))
        ));
        assert!(subchannels_needed(0.0, &s, 1.0).is_err());
    }

    #[test]
    fn subchannel_bounds_examples() {
        let s = scen();
        assert_eq!(subchannel_bounds(0.5, &s, 3.0, 1.0).unwrap(), (1, 2));
        assert_eq!(subchannel_bounds(0.292, &s, 1.0, 0.1).unwrap(), (1, 8));
        let (lo, hi) = subchannel_bounds(0.5, &s, 0.7, 0.7).unwrap();
        assert_eq!(lo, hi);
        assert!(subchannel_bounds(0.5, &s, 1.0, 3.0).is_err());
    }

    #[test]
    fn scenario_validation() {
        let mut s = scen();
        assert!(s.validate().is_ok());
        s.theta = 1.0;
        assert!(s.validate().is_err());
        let mut s = scen();
        s.object_bits = 0;
        assert!(s.validate().is_err());
        assert!((scen().bandwidth() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_agrees() {
        assert_eq!(cluster_size(0.2_f32, 0.1).unwrap(), 11);
        let s = Scenario::<f32>::reference(1, 1, 10);
        assert_eq!(subchannels_needed(0.6_f32, &s, 1.0).unwrap(), 2);
        assert!((exact_rlep(0.1_f32, 3).unwrap() - 0.028).abs() < 1e-6);
    }
}
