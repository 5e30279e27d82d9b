//! Exact throughput maximization over heterogeneous (faded) links.
//!
//! Annotators are clustered sequentially in decreasing-SNR order, so a plan is
//! fully described by the sequence of cluster types. The search grows that
//! sequence one object per level and deletes every node that breaks the
//! annotator or sub-channel budget; the deepest non-empty level is the optimum.

use std::ops::Range;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::model::{
    approx_rlep, capacity, cluster_size_with, subchannels_needed, ClusterSizing, RateLadder,
    Scenario,
};
use crate::scalar::Scalar;
use crate::solution::{greedy_single_type, Budget, EdgeCost, EdgeCosts, Solution};

/// Annotator range of one cluster and the SNR of its weakest member.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPlacement<T> {
    pub annotators: Range<usize>,
    pub worst_snr: T,
}

/// Place clusters of the given sizes on consecutive blocks of the
/// decreasing-SNR annotator list.
pub fn sequential_clustering<T: Scalar>(
    sizes: &[usize],
    snrs: &[T],
) -> Result<Vec<ClusterPlacement<T>>> {
    let needed: usize = sizes.iter().sum();
    if needed > snrs.len() {
        return Err(Error::BudgetExceeded {
            needed,
            available: snrs.len(),
        });
    }
    let mut start = 0;
    let mut out = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size == 0 {
            return Err(Error::InvalidArgument(
                "cluster size must be positive".into(),
            ));
        }
        let end = start + size;
        out.push(ClusterPlacement {
            annotators: start..end,
            worst_snr: snrs[end - 1],
        });
        start = end;
    }
    Ok(out)
}

/// A faded instance: scenario, ladder, cluster sizes and sorted SNRs.
///
/// Implements [`EdgeCosts`]: a type-n cluster placed after `used` annotators
/// takes `K_n` annotators and enough sub-channels for its weakest member,
/// annotator `used + K_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingProblem<T> {
    scenario: Scenario<T>,
    ladder: RateLadder<T>,
    cluster_sizes: Vec<usize>,
    snrs: Vec<T>,
}

impl<T: Scalar> FadingProblem<T> {
    pub fn new(
        scenario: Scenario<T>,
        ladder: RateLadder<T>,
        channel: &ChannelRealization<T>,
        sizing: ClusterSizing,
    ) -> Result<Self> {
        let sizes = ladder
            .entries()
            .iter()
            .map(|e| cluster_size_with(e.lep, scenario.theta, sizing))
            .collect::<Result<Vec<_>>>()?;
        Self::with_cluster_sizes(scenario, ladder, sizes, channel.snrs().to_vec())
    }

    /// Explicit cluster sizes (one per rung) and SNRs sorted decreasingly.
    pub fn with_cluster_sizes(
        scenario: Scenario<T>,
        ladder: RateLadder<T>,
        cluster_sizes: Vec<usize>,
        snrs: Vec<T>,
    ) -> Result<Self> {
        scenario.validate()?;
        if cluster_sizes.len() != ladder.len() {
            return Err(Error::InvalidArgument(format!(
                "{} cluster sizes for a ladder of {} rates",
                cluster_sizes.len(),
                ladder.len()
            )));
        }
        if cluster_sizes.contains(&0) {
            return Err(Error::InvalidArgument(
                "cluster sizes must be positive".into(),
            ));
        }
        if snrs.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "SNRs must be sorted decreasingly".into(),
            ));
        }
        if snrs.iter().any(|g| !(*g >= T::zero())) {
            return Err(Error::InvalidArgument("SNRs must be non-negative".into()));
        }
        Ok(FadingProblem {
            scenario,
            ladder,
            cluster_sizes,
            snrs,
        })
    }

    pub fn scenario(&self) -> &Scenario<T> {
        &self.scenario
    }

    pub fn ladder(&self) -> &RateLadder<T> {
        &self.ladder
    }

    pub fn cluster_sizes(&self) -> &[usize] {
        &self.cluster_sizes
    }

    pub fn snrs(&self) -> &[T] {
        &self.snrs
    }

    pub fn budget(&self) -> Budget {
        Budget::from(&self.scenario)
    }

    /// Sub-channel need of type `n` at the best and at the worst SNR; `None`
    /// stands for "cannot be served at all".
    pub fn subchannel_bounds(&self, n: usize) -> (Option<usize>, Option<usize>) {
        let rate = self.ladder.rate(n);
        let at = |g: Option<&T>| g.and_then(|&g| subchannels_needed(rate, &self.scenario, g).ok());
        (at(self.snrs.first()), at(self.snrs.last()))
    }

    /// `max_n K_n·⌊L / L_n^min⌋`.
    pub fn spectrum_threshold(&self) -> usize {
        let lmin: Vec<usize> = (0..self.ladder.len())
            .map(|n| self.subchannel_bounds(n).0.unwrap_or(usize::MAX))
            .collect();
        spectrum_threshold(&self.cluster_sizes, &lmin, self.scenario.subchannels)
    }

    /// `max_n L_n^max·⌊K / K_n⌋`.
    pub fn annotator_threshold(&self) -> usize {
        let lmax: Vec<usize> = (0..self.ladder.len())
            .map(|n| self.subchannel_bounds(n).1.unwrap_or(usize::MAX))
            .collect();
        annotator_threshold(&self.cluster_sizes, &lmax, self.scenario.annotators)
    }

    /// Enough annotators that only the spectrum limits the throughput.
    pub fn is_spectrum_constrained(&self) -> bool {
        self.scenario.annotators >= self.spectrum_threshold()
    }

    /// Enough sub-channels that only the annotators limit the throughput.
    pub fn is_annotator_constrained(&self) -> bool {
        self.scenario.subchannels >= self.annotator_threshold()
    }

    /// Check a plan against the full model: sequential disjoint clusters of
    /// the right size, accuracy target met, every member able to decode the
    /// object on its sub-channels, and both budgets respected.
    pub fn verify(&self, sol: &Solution) -> Result<()> {
        let fail = |msg: String| Err(Error::PreconditionViolated(msg));
        let budget = self.budget();
        if !sol.within(&budget) || sol.throughput != sol.clusters.len() {
            return fail(format!("plan {sol:?} breaks the budget {budget:?}"));
        }
        let mut next = 0;
        let (mut k_total, mut l_total) = (0, 0);
        let tol = T::lit(1e-9);
        for (m, c) in sol.clusters.iter().enumerate() {
            if c.cluster_type >= self.ladder.len() {
                return fail(format!("object {m}: unknown type {}", c.cluster_type));
            }
            if c.annotators.start != next || c.annotators.end > self.snrs.len() {
                return fail(format!(
                    "object {m}: non-sequential cluster {:?}",
                    c.annotators
                ));
            }
            if c.size() != self.cluster_sizes[c.cluster_type] {
                return fail(format!("object {m}: cluster size {}", c.size()));
            }
            let entry = self.ladder.entries()[c.cluster_type];
            // overridden sizes below the model's size are taken as given
            let model_size =
                cluster_size_with(entry.lep, self.scenario.theta, ClusterSizing::Stirling)?;
            if c.size() >= model_size {
                let p = approx_rlep(entry.lep, c.size())?;
                if p > self.scenario.theta * (T::one() + tol) {
                    return fail(format!("object {m}: error {p} above target"));
                }
            }
            let worst = self.snrs[c.annotators.end - 1];
            let payload = entry.rate * T::from_u32(self.scenario.object_bits).unwrap();
            if capacity(c.subchannels, &self.scenario, worst) < payload * (T::one() - tol) {
                return fail(format!(
                    "object {m}: {} sub-channels cannot carry it",
                    c.subchannels
                ));
            }
            next = c.annotators.end;
            k_total += c.size();
            l_total += c.subchannels;
        }
        if k_total != sol.annotators_used || l_total != sol.subchannels_used {
            return fail("resource totals do not add up".into());
        }
        Ok(())
    }
}

impl<T: Scalar> EdgeCosts for FadingProblem<T> {
    fn type_count(&self) -> usize {
        self.ladder.len()
    }

    fn edge_cost(&self, used: usize, cluster_type: usize) -> Option<EdgeCost> {
        let size = self.cluster_sizes[cluster_type];
        let last = used.checked_add(size)?;
        let gamma = *self.snrs.get(last - 1)?;
        let l = subchannels_needed(self.ladder.rate(cluster_type), &self.scenario, gamma).ok()?;
        Some(EdgeCost::new(size, l))
    }
}

/// `max_n K_n·⌊L / L_n^min⌋`; `usize::MAX` in `lmin` means unservable.
pub fn spectrum_threshold(sizes: &[usize], lmin: &[usize], subchannels: usize) -> usize {
    sizes
        .iter()
        .zip(lmin)
        .map(|(&k, &l)| k.saturating_mul(subchannels / l.max(1)))
        .max()
        .unwrap_or(0)
}

/// `max_n L_n^max·⌊K / K_n⌋`; `usize::MAX` in `lmax` means unservable.
pub fn annotator_threshold(sizes: &[usize], lmax: &[usize], annotators: usize) -> usize {
    sizes
        .iter()
        .zip(lmax)
        .map(|(&k, &l)| l.saturating_mul(annotators / k.max(1)))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Drop nodes whose cumulative use is matched or beaten on both resources
    /// by another node of the same level. Leaves the optimum unchanged when
    /// costs are monotone in the annotators used.
    pub dominance_pruning: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Nodes created per level, before deletion. Index 0 is level 1.
    pub created: Vec<usize>,
    /// Nodes that survived budget checks (and pruning) per level.
    pub survived: Vec<usize>,
}

impl SearchStats {
    pub fn nodes_created(&self) -> usize {
        self.created.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub solution: Solution,
    /// 1-based position of each path node within its level, numbering every
    /// node created on that level (including deleted ones). Level 0 is the root.
    pub path_labels: Vec<usize>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    annotators: usize,
    subchannels: usize,
    parent: usize,
    cluster_type: usize,
    label: usize,
}

/// Level-by-level tree search for the largest number of labelled objects.
///
/// Nodes on each level are kept in creation order (parent-major, type-minor),
/// so the first survivor on the deepest level is the lexicographically
/// smallest optimal type sequence; that path is returned.
pub fn jasa_bb_fading(
    budget: &Budget,
    costs: &impl EdgeCosts,
    options: SearchOptions,
) -> SearchOutcome {
    let types = costs.type_count();
    let root = Node {
        annotators: 0,
        subchannels: 0,
        parent: usize::MAX,
        cluster_type: usize::MAX,
        label: 1,
    };
    let mut levels: Vec<Vec<Node>> = vec![vec![root]];
    let mut stats = SearchStats::default();

    for _ in 1..=budget.objects {
        let prev = levels.last().unwrap();
        let mut created = 0;
        let mut next = Vec::new();
        for (pi, parent) in prev.iter().enumerate() {
            for n in 0..types {
                created += 1;
                let Some(c) = costs.edge_cost(parent.annotators, n) else {
                    continue;
                };
                let node = Node {
                    annotators: parent.annotators + c.annotators,
                    subchannels: parent.subchannels + c.subchannels,
                    parent: pi,
                    cluster_type: n,
                    label: created,
                };
                if budget.admits(node.annotators, node.subchannels) {
                    next.push(node);
                }
            }
        }
        if options.dominance_pruning {
            next = pareto_front(next);
        }
        stats.created.push(created);
        stats.survived.push(next.len());
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }

    let depth = levels.len() - 1;
    let mut types_rev = Vec::with_capacity(depth);
    let mut labels_rev = Vec::with_capacity(depth + 1);
    let mut idx = 0;
    for level in levels.iter().rev() {
        let node = level[idx];
        labels_rev.push(node.label);
        if node.parent != usize::MAX {
            types_rev.push(node.cluster_type);
            idx = node.parent;
        }
    }
    types_rev.reverse();
    labels_rev.reverse();
    let solution =
        Solution::from_types(&types_rev, costs).expect("surviving path only uses available edges");
    SearchOutcome {
        solution,
        path_labels: labels_rev,
        stats,
    }
}

/// Keep nodes not dominated in (annotators, sub-channels); among identical
/// pairs the first one survives. Creation order is preserved.
fn pareto_front(nodes: Vec<Node>) -> Vec<Node> {
    let mut idx: Vec<usize> = (0..nodes.len()).collect();
    idx.sort_by_key(|&i| (nodes[i].annotators, nodes[i].subchannels, i));
    let mut keep = Vec::new();
    let mut best_l = usize::MAX;
    for i in idx {
        if nodes[i].subchannels < best_l {
            best_l = nodes[i].subchannels;
            keep.push(i);
        }
    }
    keep.sort_unstable();
    keep.into_iter().map(|i| nodes[i]).collect()
}

/// Use only type-`n` clusters, greedily, until a budget fails.
pub fn fixed_type_policy(cluster_type: usize, budget: &Budget, costs: &impl EdgeCosts) -> Solution {
    greedy_single_type(cluster_type, budget, costs)
}

/// Plan and throughput bounds in the spectrum-constrained regime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumPolicy {
    pub solution: Solution,
    pub lower: usize,
    pub upper: usize,
}

/// Spectrum-constrained regime: only the cheapest-in-spectrum (last) type is
/// used. Returns the greedy plan and `⌊L/L_N^max⌋ ≤ M* ≤ ⌊L/L_N^min⌋`, both
/// capped at the object count.
pub fn policy_spectrum_constrained<T: Scalar>(
    problem: &FadingProblem<T>,
) -> Result<SpectrumPolicy> {
    if !problem.is_spectrum_constrained() {
        return Err(Error::PreconditionViolated(format!(
            "not spectrum constrained: K = {} below {}",
            problem.scenario.annotators,
            problem.spectrum_threshold()
        )));
    }
    let last = problem.ladder.len() - 1;
    let budget = problem.budget();
    let (lmin, lmax) = problem.subchannel_bounds(last);
    let bound = |l: Option<usize>| l.map_or(0, |l| budget.subchannels / l).min(budget.objects);
    Ok(SpectrumPolicy {
        solution: greedy_single_type(last, &budget, problem),
        lower: bound(lmax),
        upper: bound(lmin),
    })
}

/// Annotator-constrained regime: only type-1 clusters, `M* = ⌊K/K_1⌋`
/// (capped at the object count).
pub fn policy_annotator_constrained<T: Scalar>(problem: &FadingProblem<T>) -> Result<Solution> {
    if !problem.is_annotator_constrained() {
        return Err(Error::PreconditionViolated(format!(
            "not annotator constrained: L = {} below {}",
            problem.scenario.subchannels,
            problem.annotator_threshold()
        )));
    }
    let budget = problem.budget();
    let sol = greedy_single_type(0, &budget, problem);
    debug_assert_eq!(
        sol.throughput,
        (budget.annotators / problem.cluster_sizes[0]).min(budget.objects)
    );
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::TableCosts;

    fn example_one() -> TableCosts {
        TableCosts::new(2)
            .with(0, 0, EdgeCost::new(3, 1))
            .with(0, 1, EdgeCost::new(1, 3))
            .with(3, 0, EdgeCost::new(3, 1))
            .with(3, 1, EdgeCost::new(1, 3))
            .with(1, 0, EdgeCost::new(3, 2))
            .with(1, 1, EdgeCost::new(1, 4))
            .with(6, 0, EdgeCost::new(3, 1))
            .with(6, 1, EdgeCost::new(1, 5))
    }

    #[test]
    fn example_one_search() {
        let out = jasa_bb_fading(
            &Budget::new(3, 6, 3),
            &example_one(),
            SearchOptions::default(),
        );
        assert_eq!(out.solution.throughput, 2);
        assert_eq!(out.path_labels, vec![1, 1, 1]);
        assert_eq!(out.solution.types(), vec![0, 0]);
        assert_eq!(out.stats.created, vec![2, 4, 2]);
        assert_eq!(out.stats.survived, vec![2, 1, 0]);
    }

    #[test]
    fn zero_budgets_label_nothing() {
        for b in [
            Budget::new(3, 0, 3),
            Budget::new(3, 6, 0),
            Budget::new(0, 6, 3),
        ] {
            let out = jasa_bb_fading(&b, &example_one(), SearchOptions::default());
            assert_eq!(out.solution.throughput, 0);
            assert_eq!(out.path_labels, vec![1]);
        }
    }

    #[test]
    fn fixed_type_on_example_one() {
        let sol = fixed_type_policy(0, &Budget::new(3, 6, 3), &example_one());
        assert_eq!(sol.throughput, 2);
    }

    #[test]
    fn sequential_clustering_examples() {
        let snrs = [6.0, 5.0, 4.0, 3.0, 2.0, 1.0];
        let p = sequential_clustering(&[3, 1], &snrs).unwrap();
        assert_eq!(p[0].annotators, 0..3);
        assert_eq!(p[1].annotators, 3..4);
        assert!(sequential_clustering::<f64>(&[], &snrs).unwrap().is_empty());
        let p = sequential_clustering(&[2, 2], &[4.0, 3.0, 2.0, 1.0]).unwrap();
        assert_eq!((p[0].worst_snr, p[1].worst_snr), (3.0, 1.0));
        assert!(matches!(
            sequential_clustering(&[4, 3], &snrs),
            Err(Error::BudgetExceeded {
                needed: 7,
                available: 6
            })
        ));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(spectrum_threshold(&[5, 7, 11], &[3, 2, 1], 12), 132);
        assert_eq!(spectrum_threshold(&[5, 7, 11], &[3, 2, 1], 0), 0);
        assert_eq!(spectrum_threshold(&[5], &[2], 7), 15);
        assert_eq!(annotator_threshold(&[5, 7, 11], &[8, 5, 3], 10), 16);
        assert_eq!(annotator_threshold(&[5, 7, 11], &[8, 5, 3], 0), 0);
        assert_eq!(annotator_threshold(&[5], &[3], 12), 6);
        assert_eq!(spectrum_threshold(&[5], &[usize::MAX], 12), 0);
    }

    #[test]
    fn pareto_front_keeps_first_of_ties() {
        let n = |k, l, label| Node {
            annotators: k,
            subchannels: l,
            parent: 0,
            cluster_type: 0,
            label,
        };
        let kept = pareto_front(vec![
            n(3, 3, 1),
            n(2, 4, 2),
            n(3, 3, 3),
            n(4, 4, 4),
            n(1, 9, 5),
        ]);
        let labels: Vec<usize> = kept.iter().map(|x| x.label).collect();
        assert_eq!(labels, vec![1, 2, 5]);
    }

    fn reference_problem(k: usize, l: usize, m: usize, seed: u64) -> FadingProblem<f64> {
        let ch = ChannelRealization::draw_rayleigh(k, seed);
        FadingProblem::new(
            Scenario::reference(m, k, l),
            RateLadder::reference(),
            &ch,
            ClusterSizing::Stirling,
        )
        .unwrap()
    }

    #[test]
    fn model_costs_follow_the_sorted_snrs() {
        let p = reference_problem(30, 10, 5, 3);
        let c = p.edge_cost(0, 0).unwrap();
        assert_eq!(c.annotators, 5);
        let expected = subchannels_needed(p.ladder().rate(0), p.scenario(), p.snrs()[4]).unwrap();
        assert_eq!(c.subchannels, expected);
        assert!(p.edge_cost(25, 2).is_none());
        // deeper placement never gets cheaper
        for n in 0..3 {
            let costs: Vec<usize> = (0..15)
                .filter_map(|u| p.edge_cost(u, n))
                .map(|c| c.subchannels)
                .collect();
            assert!(costs.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn search_output_verifies_against_the_model() {
        for seed in 0..20 {
            let p = reference_problem(25, 12, 6, seed);
            let out = jasa_bb_fading(&p.budget(), &p, SearchOptions::default());
            p.verify(&out.solution).unwrap();
        }
    }

    #[test]
    fn verify_rejects_bad_plans() {
        let p = reference_problem(25, 12, 6, 1);
        let mut sol = Solution::from_types(&[0], &p).unwrap();
        sol.clusters[0].subchannels = 0;
        sol.subchannels_used = 0;
        assert!(p.verify(&sol).is_err());
        let mut sol = Solution::from_types(&[0, 0], &p).unwrap();
        sol.clusters[1].annotators = 6..11;
        assert!(p.verify(&sol).is_err());
    }

    #[test]
    fn annotator_policy_closed_form() {
        // L large enough for any plan
        let p = reference_problem(10, 100_000, 10, 4);
        assert!(p.is_annotator_constrained());
        assert_eq!(policy_annotator_constrained(&p).unwrap().throughput, 2);
        let p = reference_problem(4, 100_000, 10, 4);
        assert_eq!(policy_annotator_constrained(&p).unwrap().throughput, 0);
        let p = reference_problem(10, 1, 10, 4);
        assert!(matches!(
            policy_annotator_constrained(&p),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn spectrum_policy_bounds_collapse_on_equal_channels() {
        let snrs = vec![1.0; 200];
        let p = FadingProblem::with_cluster_sizes(
            Scenario::reference(50, 200, 10),
            RateLadder::reference(),
            vec![5, 7, 11],
            snrs,
        )
        .unwrap();
        let pol = policy_spectrum_constrained(&p).unwrap();
        assert_eq!(pol.lower, pol.upper);
        assert_eq!(pol.solution.throughput, pol.lower);
        assert_eq!(pol.lower, 10);
    }
}
