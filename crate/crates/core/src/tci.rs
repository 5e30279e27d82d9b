//! Exact throughput maximization once truncated channel inversion has
//! equalized every served link.
//!
//! With all SNRs equal to the target, a type-n cluster always costs the same
//! `(K_n, L_n)`, the order of objects no longer matters and the problem is a
//! bounded two-dimensional knapsack with unit profits.

use crate::channel::tci_subchannels;
use crate::error::{Error, Result};
use crate::fading::SearchStats;
use crate::model::{cluster_size_with, ClusterSizing, RateLadder, Scenario};
use crate::scalar::Scalar;
use crate::solution::{EdgeCost, EdgeCosts, Solution};

/// Per-type `(K_n, L_n)` weights and the two budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    weights: Vec<EdgeCost>,
    annotators: usize,
    subchannels: usize,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<EdgeCost>, annotators: usize, subchannels: usize) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one cluster type is required".into(),
            ));
        }
        if weights
            .iter()
            .any(|w| w.annotators == 0 || w.subchannels == 0)
        {
            return Err(Error::InvalidArgument("weights must be at least 1".into()));
        }
        Ok(KnapsackInstance {
            weights,
            annotators,
            subchannels,
        })
    }

    /// Instance after inversion to `gamma0` left `available` annotators.
    pub fn from_inversion<T: Scalar>(
        scenario: &Scenario<T>,
        ladder: &RateLadder<T>,
        cluster_sizes: &[usize],
        gamma0: T,
        available: usize,
    ) -> Result<Self> {
        if cluster_sizes.len() != ladder.len() {
            return Err(Error::InvalidArgument(
                "one cluster size per rate is required".into(),
            ));
        }
        let weights = ladder
            .entries()
            .iter()
            .zip(cluster_sizes)
            .map(|(e, &k)| Ok(EdgeCost::new(k, tci_subchannels(e.rate, scenario, gamma0)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            weights,
            available.min(scenario.annotators),
            scenario.subchannels,
        )
    }

    /// As [`KnapsackInstance::from_inversion`] with cluster sizes derived from the ladder.
    pub fn from_model<T: Scalar>(
        scenario: &Scenario<T>,
        ladder: &RateLadder<T>,
        sizing: ClusterSizing,
        gamma0: T,
        available: usize,
    ) -> Result<Self> {
        let sizes = ladder
            .entries()
            .iter()
            .map(|e| cluster_size_with(e.lep, scenario.theta, sizing))
            .collect::<Result<Vec<_>>>()?;
        Self::from_inversion(scenario, ladder, &sizes, gamma0, available)
    }

    pub fn weights(&self) -> &[EdgeCost] {
        &self.weights
    }

    pub fn types(&self) -> usize {
        self.weights.len()
    }

    pub fn annotators(&self) -> usize {
        self.annotators
    }

    pub fn subchannels(&self) -> usize {
        self.subchannels
    }

    /// Most type-`n` clusters that fit on their own.
    pub fn cap(&self, n: usize) -> usize {
        cap_within(self.weights[n], self.annotators, self.subchannels)
    }

    /// Whether a count vector fits both budgets.
    pub fn admits(&self, counts: &[usize]) -> bool {
        let (k, l) = counts
            .iter()
            .zip(&self.weights)
            .fold((0usize, 0usize), |(k, l), (&x, w)| {
                (k + x * w.annotators, l + x * w.subchannels)
            });
        k <= self.annotators && l <= self.subchannels
    }

    fn ordered_by_tradeoff(&self) -> bool {
        self.weights
            .windows(2)
            .all(|w| w[0].annotators <= w[1].annotators && w[0].subchannels >= w[1].subchannels)
    }

    /// `max_n K_n·⌊L/L_n⌋`.
    pub fn spectrum_threshold(&self) -> usize {
        self.weights
            .iter()
            .map(|w| w.annotators * (self.subchannels / w.subchannels))
            .max()
            .unwrap_or(0)
    }

    /// `max_n L_n·⌊K/K_n⌋`.
    pub fn annotator_threshold(&self) -> usize {
        self.weights
            .iter()
            .map(|w| w.subchannels * (self.annotators / w.annotators))
            .max()
            .unwrap_or(0)
    }

    pub fn is_spectrum_constrained(&self) -> bool {
        self.annotators >= self.spectrum_threshold()
    }

    pub fn is_annotator_constrained(&self) -> bool {
        self.subchannels >= self.annotator_threshold()
    }
}

fn cap_within(w: EdgeCost, k: usize, l: usize) -> usize {
    (k / w.annotators).min(l / w.subchannels)
}

impl EdgeCosts for KnapsackInstance {
    fn type_count(&self) -> usize {
        self.weights.len()
    }

    fn edge_cost(&self, _used: usize, cluster_type: usize) -> Option<EdgeCost> {
        self.weights.get(cluster_type).copied()
    }
}

/// `f[n][k][ℓ]`: most objects labelled with types `0..n` under budgets `(k, ℓ)`.
/// Row `n = 0` is identically zero.
#[derive(Debug, Clone)]
pub struct DpTable {
    types: usize,
    k_max: usize,
    l_max: usize,
    values: Vec<u32>,
    /// Copies of type `n − 1` taken in the optimum of cell `(n, k, ℓ)`.
    choice: Vec<u32>,
    /// Transitions evaluated (one per filled cell).
    pub transitions: u64,
}

impl DpTable {
    fn index(&self, n: usize, k: usize, l: usize) -> usize {
        (n * (self.k_max + 1) + k) * (self.l_max + 1) + l
    }

    pub fn value(&self, n: usize, k: usize, l: usize) -> usize {
        self.values[self.index(n, k, l)] as usize
    }

    pub fn types(&self) -> usize {
        self.types
    }

    /// Number of `(n, k, ℓ)` cells filled, `N·(K+1)·(L+1)`.
    pub fn cells(&self) -> usize {
        self.types * (self.k_max + 1) * (self.l_max + 1)
    }

    /// Copy counts per type achieving `f[N][k][ℓ]`.
    pub fn counts(&self, k: usize, l: usize, weights: &[EdgeCost]) -> Vec<usize> {
        let mut counts = vec![0; self.types];
        let (mut k, mut l) = (k, l);
        for n in (1..=self.types).rev() {
            let m = self.choice[self.index(n, k, l)] as usize;
            counts[n - 1] = m;
            k -= m * weights[n - 1].annotators;
            l -= m * weights[n - 1].subchannels;
        }
        counts
    }
}

/// Fill the whole table, one type at a time.
///
/// Copy caps follow from the budgets and every copy is worth one object, so
/// `f[n][k][ℓ] = max(f[n−1][k][ℓ], f[n][k−K_n][ℓ−L_n] + 1)`: one transition per
/// cell instead of a loop over copy counts. Ties keep fewer copies of type `n`.
pub fn fill_dp_table(inst: &KnapsackInstance) -> DpTable {
    let (k_max, l_max, types) = (inst.annotators, inst.subchannels, inst.types());
    let cells = (types + 1) * (k_max + 1) * (l_max + 1);
    let mut table = DpTable {
        types,
        k_max,
        l_max,
        values: vec![0; cells],
        choice: vec![0; cells],
        transitions: 0,
    };
    for n in 1..=types {
        let w = inst.weights[n - 1];
        for k in 0..=k_max {
            for l in 0..=l_max {
                let skip = table.values[table.index(n - 1, k, l)];
                let mut best = (skip, 0u32);
                if k >= w.annotators && l >= w.subchannels {
                    let j = table.index(n, k - w.annotators, l - w.subchannels);
                    let take = table.values[j] + 1;
                    if take > skip {
                        best = (take, table.choice[j] + 1);
                    }
                }
                table.transitions += 1;
                let i = table.index(n, k, l);
                table.values[i] = best.0;
                table.choice[i] = best.1;
            }
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackOutcome {
    pub throughput: usize,
    /// Copies of each type.
    pub counts: Vec<usize>,
}

impl KnapsackOutcome {
    /// Objects labelled in type order (all type-1 clusters first).
    pub fn to_solution(&self, inst: &KnapsackInstance) -> Solution {
        let types: Vec<usize> = self
            .counts
            .iter()
            .enumerate()
            .flat_map(|(n, &x)| std::iter::repeat_n(n, x))
            .collect();
        Solution::from_types(&types, inst).expect("constant costs are always available")
    }
}

/// Optimal count vector of the two-dimensional knapsack, ignoring any object cap.
pub fn knapsack_dp(inst: &KnapsackInstance) -> KnapsackOutcome {
    let table = fill_dp_table(inst);
    let throughput = table.value(inst.types(), inst.annotators, inst.subchannels);
    let counts = table.counts(inst.annotators, inst.subchannels, &inst.weights);
    KnapsackOutcome { throughput, counts }
}

/// [`knapsack_dp`] with at most `objects` objects. Surplus copies are
/// dropped from the last type backwards; any subset of a feasible plan is
/// feasible, so the result stays optimal.
pub fn solve_dp(inst: &KnapsackInstance, objects: usize) -> KnapsackOutcome {
    let mut out = knapsack_dp(inst);
    let mut excess = out.throughput.saturating_sub(objects);
    for c in out.counts.iter_mut().rev() {
        let d = excess.min(*c);
        *c -= d;
        excess -= d;
    }
    out.throughput = out.throughput.min(objects);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeOutcome {
    pub throughput: usize,
    pub counts: Vec<usize>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy)]
struct MergedNode {
    annotators: usize,
    subchannels: usize,
    last_type: usize,
    parent: usize,
}

/// Tree search over multisets of cluster types.
///
/// Level m holds each multiset of size m once: a node only spawns children of
/// its own last type or later, which keeps the first of every set of
/// identical edges. Nodes over budget are deleted and the search stops at an
/// empty level or after `objects` levels.
pub fn merged_tree_bb(inst: &KnapsackInstance, objects: usize) -> TreeOutcome {
    let types = inst.types();
    let mut levels = vec![vec![MergedNode {
        annotators: 0,
        subchannels: 0,
        last_type: 0,
        parent: usize::MAX,
    }]];
    let mut stats = SearchStats::default();
    for _ in 1..=objects {
        let prev = levels.last().unwrap();
        let mut created = 0;
        let mut next = Vec::new();
        for (pi, p) in prev.iter().enumerate() {
            for n in p.last_type..types {
                created += 1;
                let w = inst.weights[n];
                let (k, l) = (p.annotators + w.annotators, p.subchannels + w.subchannels);
                if k <= inst.annotators && l <= inst.subchannels {
                    next.push(MergedNode {
                        annotators: k,
                        subchannels: l,
                        last_type: n,
                        parent: pi,
                    });
                }
            }
        }
        stats.created.push(created);
        stats.survived.push(next.len());
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    let throughput = levels.len() - 1;
    let mut counts = vec![0; types];
    let mut idx = 0;
    for level in levels.iter().rev() {
        let node = level[idx];
        if node.parent == usize::MAX {
            break;
        }
        counts[node.last_type] += 1;
        idx = node.parent;
    }
    TreeOutcome {
        throughput,
        counts,
        stats,
    }
}

/// All size-`m` multisets over `0..types`, as non-decreasing sequences in
/// lexicographic order.
pub fn enumerate_level(m: usize, types: usize) -> Vec<Vec<usize>> {
    fn extend(
        prefix: &mut Vec<usize>,
        from: usize,
        left: usize,
        types: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for n in from..types {
            prefix.push(n);
            extend(prefix, n, left - 1, types, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(m), 0, m, types, &mut out);
    out
}

/// `C(n, k)` in `u128`; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn check_policy(inst: &KnapsackInstance, holds: bool, what: &str) -> Result<()> {
    if !inst.ordered_by_tradeoff() {
        return Err(Error::PreconditionViolated(
            "types must trade annotators for sub-channels (K_n non-decreasing, L_n non-increasing)"
                .into(),
        ));
    }
    if !holds {
        return Err(Error::PreconditionViolated(format!(
            "instance is not {what} constrained"
        )));
    }
    Ok(())
}

/// Spectrum-constrained closed form: only the last type, `M* = ⌊L/L_N⌋`
/// (capped at `objects`).
pub fn tci_spectrum_policy(inst: &KnapsackInstance, objects: usize) -> Result<Solution> {
    check_policy(inst, inst.is_spectrum_constrained(), "spectrum")?;
    let last = inst.types() - 1;
    let m = (inst.subchannels / inst.weights[last].subchannels).min(objects);
    Ok(Solution::from_types(&vec![last; m], inst).expect("constant costs"))
}

/// Annotator-constrained closed form: only type-1, `M* = ⌊K/K_1⌋` (capped at
/// `objects`).
pub fn tci_annotator_policy(inst: &KnapsackInstance, objects: usize) -> Result<Solution> {
    check_policy(inst, inst.is_annotator_constrained(), "annotator")?;
    let m = (inst.annotators / inst.weights[0].annotators).min(objects);
    Ok(Solution::from_types(&vec![0; m], inst).expect("constant costs"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(w: &[(usize, usize)], k: usize, l: usize) -> KnapsackInstance {
        KnapsackInstance::new(w.iter().map(|&(a, b)| EdgeCost::new(a, b)).collect(), k, l).unwrap()
    }

    #[test]
    fn first_row_matches_closed_form() {
        let i = inst(&[(3, 1)], 6, 3);
        let t = fill_dp_table(&i);
        for k in 0..=6 {
            for l in 0..=3 {
                assert_eq!(t.value(1, k, l), (k / 3).min(l));
            }
        }
        assert_eq!(t.value(1, 6, 3), 2);
    }

    #[test]
    fn two_types_example() {
        // every (X1, X2) with X1 + 2 X2 <= 3 and 2 X1 + X2 <= 3 enumerated by hand:
        // (0,0) (1,0) (0,1) (1,1) -> best 2
        let i = inst(&[(1, 2), (2, 1)], 3, 3);
        let out = knapsack_dp(&i);
        assert_eq!(out.throughput, 2);
        assert_eq!(out.counts, vec![1, 1]);
        let tree = merged_tree_bb(&i, 10);
        assert_eq!(tree.throughput, 2);
        assert_eq!(tree.counts, vec![1, 1]);
    }

    #[test]
    fn empty_budgets() {
        for (k, l) in [(0, 5), (5, 0), (0, 0)] {
            let i = inst(&[(1, 1), (2, 1)], k, l);
            assert_eq!(knapsack_dp(&i).throughput, 0);
            assert_eq!(merged_tree_bb(&i, 5).throughput, 0);
        }
    }

    #[test]
    fn object_cap() {
        let i = inst(&[(1, 1), (2, 1)], 10, 10);
        assert_eq!(knapsack_dp(&i).throughput, 10);
        let capped = solve_dp(&i, 4);
        assert_eq!(capped.throughput, 4);
        assert_eq!(capped.counts.iter().sum::<usize>(), 4);
        assert!(i.admits(&capped.counts));
        assert_eq!(merged_tree_bb(&i, 4).throughput, 4);
    }

    #[test]
    fn level_enumeration() {
        assert_eq!(
            enumerate_level(2, 2),
            vec![vec![0, 0], vec![0, 1], vec![1, 1]]
        );
        assert_eq!(enumerate_level(0, 3), vec![Vec::<usize>::new()]);
        assert_eq!(binomial(3, 2), Some(3));
        assert_eq!(2usize.pow(2) - enumerate_level(2, 2).len(), 1);
    }

    #[test]
    fn first_node_of_each_level_is_all_type_one() {
        let i = inst(&[(3, 1), (1, 2)], 1000, 1000);
        let t = merged_tree_bb(&i, 4);
        assert_eq!(t.counts, vec![4, 0]);
        for m in 1..=4 {
            let first = &enumerate_level(m, 2)[0];
            assert!(first.iter().all(|&n| n == 0));
        }
    }

    #[test]
    fn policies() {
        // L_N = 1, K plentiful
        let i = inst(&[(5, 3), (7, 2), (11, 1)], 200, 10);
        assert!(i.is_spectrum_constrained());
        assert_eq!(tci_spectrum_policy(&i, 100).unwrap().throughput, 10);
        assert_eq!(knapsack_dp(&i).throughput, 10);

        let i = inst(&[(5, 3), (7, 2), (11, 1)], 10, 100);
        assert!(i.is_annotator_constrained());
        assert_eq!(tci_annotator_policy(&i, 100).unwrap().throughput, 2);
        assert!(matches!(
            tci_spectrum_policy(&i, 100),
            Err(Error::PreconditionViolated(_))
        ));

        let single = inst(&[(2, 2)], 9, 8);
        let a = tci_annotator_policy(&single, 100).unwrap();
        let s = tci_spectrum_policy(&single, 100).unwrap();
        assert_eq!(a, s);
        assert_eq!(a.throughput, 4);

        let unordered = inst(&[(7, 1), (5, 3)], 100, 100);
        assert!(tci_spectrum_policy(&unordered, 10).is_err());
    }

    #[test]
    fn instance_from_model() {
        let s = Scenario::<f64>::reference(10, 20, 10);
        let ladder = RateLadder::reference();
        let i =
            KnapsackInstance::from_model(&s, &ladder, ClusterSizing::Stirling, 1.0, 15).unwrap();
        assert_eq!(i.annotators(), 15);
        let w: Vec<(usize, usize)> = i
            .weights()
            .iter()
            .map(|w| (w.annotators, w.subchannels))
            .collect();
        assert_eq!(w, vec![(5, 3), (7, 2), (11, 1)]);
    }
}
