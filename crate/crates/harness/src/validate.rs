//! Oracle-equivalence suite on seeded random instances.

use std::fmt;

use jasa_core::channel::ChannelRealization;
use jasa_core::fading::{jasa_bb_fading, sequential_clustering, FadingProblem, SearchOptions};
use jasa_core::model::{subchannels_needed, ClusterSizing, RateLadder, Scenario};
use jasa_core::oracle::{exhaustive_counts, exhaustive_search, partition_oracle};
use jasa_core::tci::{merged_tree_bb, solve_dp, KnapsackInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, Result};

/// Random ladder with `types` rungs: rates fall and error rates rise.
fn random_ladder(rng: &mut impl Rng, types: usize) -> RateLadder<f64> {
    let mut rate = 1.0;
    let mut lep = 0.0;
    let pairs: Vec<(f64, f64)> = (0..types)
        .map(|n| {
            if n > 0 {
                rate -= rng.random_range(0.02..0.3);
            }
            lep += rng.random_range(0.02..0.15);
            (rate, lep)
        })
        .collect();
    RateLadder::from_pairs(&pairs).expect("steps keep the ladder valid")
}

/// Faded instance with `M ≤ 4`, `N ≤ 3`, `K ≤ 12`, `L ≤ 12`.
pub fn random_fading_problem(seed: u64) -> FadingProblem<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let types = rng.random_range(1..=3);
    let ladder = random_ladder(&mut rng, types);
    let mut s = Scenario::reference(
        rng.random_range(1..=4),
        rng.random_range(2..=12),
        rng.random_range(2..=12),
    );
    s.theta = rng.random_range(0.15..0.6);
    let ch = ChannelRealization::draw_rayleigh(s.annotators, rng.random())
        .with_power(1.0, rng.random_range(1.0..8.0))
        .expect("positive power");
    FadingProblem::new(s, ladder, &ch, ClusterSizing::Stirling).expect("valid random instance")
}

/// Equalized instance after inversion to a random target SNR, plus an
/// object cap.
pub fn random_knapsack_instance(seed: u64) -> (KnapsackInstance, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let types = rng.random_range(1..=3);
    let ladder = random_ladder(&mut rng, types);
    let mut s = Scenario::reference(
        rng.random_range(1..=20),
        rng.random_range(2..=15),
        rng.random_range(2..=15),
    );
    s.theta = rng.random_range(0.15..0.6);
    let gamma0 = rng.random_range(0.5..4.0);
    let available = rng.random_range(s.annotators / 2..=s.annotators);
    let inst =
        KnapsackInstance::from_model(&s, &ladder, ClusterSizing::Stirling, gamma0, available)
            .expect("valid random instance");
    (inst, s.objects)
}

/// Two clusters `(size, rate)` with `size_a + size_b ≤ K ≤ 8` and a draw.
#[derive(Debug, Clone)]
pub struct PartitionCase {
    pub clusters: [(usize, f64); 2],
    pub scenario: Scenario<f64>,
    pub snrs: Vec<f64>,
}

pub fn random_partition_case(seed: u64) -> PartitionCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(2..=8);
    let a = rng.random_range(1..k);
    let b = rng.random_range(1..=k - a);
    let clusters = [
        (a, rng.random_range(0.05..1.0)),
        (b, rng.random_range(0.05..1.0)),
    ];
    let ch = ChannelRealization::<f64>::draw_rayleigh(k, rng.random());
    PartitionCase {
        clusters,
        scenario: Scenario::reference(2, k, 1000),
        snrs: ch.snrs().to_vec(),
    }
}

/// Tree search against the exhaustive sequence oracle.
pub fn check_fading(problem: &FadingProblem<f64>) -> Result<bool> {
    let budget = problem.budget();
    let bb = jasa_bb_fading(&budget, problem, SearchOptions::default());
    let es = exhaustive_search(&budget, problem)?;
    Ok(bb.solution.throughput == es.value && problem.verify(&bb.solution).is_ok())
}

/// Dynamic program, merged tree search and count enumeration all agree.
pub fn check_knapsack(inst: &KnapsackInstance, objects: usize) -> Result<bool> {
    let dp = solve_dp(inst, objects);
    let bb = merged_tree_bb(inst, objects);
    let es = exhaustive_counts(inst, objects)?;
    Ok(dp.throughput == es.value
        && bb.throughput == es.value
        && inst.admits(&dp.counts)
        && inst.admits(&bb.counts))
}

/// Best of the two sequential orders, or `None` if neither can be served.
pub fn sequential_partition_cost(case: &PartitionCase) -> Option<usize> {
    let order = |first: (usize, f64), second: (usize, f64)| -> Option<usize> {
        let placed = sequential_clustering(&[first.0, second.0], &case.snrs).ok()?;
        placed
            .iter()
            .zip([first.1, second.1])
            .map(|(p, r)| subchannels_needed(r, &case.scenario, p.worst_snr).ok())
            .sum()
    };
    let [a, b] = case.clusters;
    match (order(a, b), order(b, a)) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

pub fn check_partition(case: &PartitionCase) -> Result<bool> {
    let best = partition_oracle(&case.clusters, &case.snrs, &case.scenario)?;
    Ok(best == sequential_partition_cost(case))
}

/// Agreement counts per family.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub fading: (usize, usize),
    pub tci: (usize, usize),
    pub partition: (usize, usize),
    /// Seeds of disagreeing instances, by family.
    pub failures: Vec<(&'static str, u64)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |f: &mut fmt::Formatter<'_>, name: &str, (ok, n): (usize, usize)| {
            writeln!(
                f,
                "{name:<10} {ok}/{n} {}",
                if ok == n { "PASS" } else { "FAIL" }
            )
        };
        line(f, "fading", self.fading)?;
        line(f, "tci", self.tci)?;
        line(f, "partition", self.partition)?;
        for (family, seed) in &self.failures {
            writeln!(f, "mismatch: {family} seed {seed}")?;
        }
        Ok(())
    }
}

/// `cases` instances per family, seeds `seed, seed+1, …`.
pub fn run_validation(cases: u64, seed: u64) -> Result<ValidationReport> {
    let mut rep = ValidationReport::default();
    for i in 0..cases {
        let s = seed.wrapping_add(i);
        let tally = |slot: &mut (usize, usize), ok: bool, fails: &mut Vec<_>, name| {
            slot.1 += 1;
            if ok {
                slot.0 += 1;
            } else {
                fails.push((name, s));
            }
        };
        let ok = check_fading(&random_fading_problem(s))?;
        tally(&mut rep.fading, ok, &mut rep.failures, "fading");
        let (inst, m) = random_knapsack_instance(s);
        let ok = check_knapsack(&inst, m)?;
        tally(&mut rep.tci, ok, &mut rep.failures, "tci");
        let ok = check_partition(&random_partition_case(s))?;
        tally(&mut rep.partition, ok, &mut rep.failures, "partition");
    }
    Ok(rep)
}

/// [`run_validation`], failing on any disagreement.
pub fn validate(cases: u64, seed: u64) -> Result<ValidationReport> {
    let rep = run_validation(cases, seed)?;
    if rep.passed() {
        Ok(rep)
    } else {
        Err(HarnessError::Validation(rep.to_string()))
    }
}
