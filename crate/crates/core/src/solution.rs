//! Allocation plans shared by every solver: edge costs, budgets and solutions.

use std::collections::BTreeMap;

use crate::model::{ClusterSpec, Scenario};

/// Resources consumed by labelling one more object with a given cluster type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeCost {
    pub annotators: usize,
    pub subchannels: usize,
}

impl EdgeCost {
    pub const fn new(annotators: usize, subchannels: usize) -> Self {
        EdgeCost {
            annotators,
            subchannels,
        }
    }
}

/// Cost of the next cluster as a function of how many annotators the earlier
/// clusters already took and of the cluster type.
///
/// Annotators are consumed in decreasing-SNR order, so for a fixed type the
/// sub-channel cost must not decrease as `used` grows. `None` means the
/// cluster cannot be formed at all (not enough annotators, zero SNR, missing
/// table entry).
pub trait EdgeCosts {
    fn type_count(&self) -> usize;

    fn edge_cost(&self, used: usize, cluster_type: usize) -> Option<EdgeCost>;
}

impl<C: EdgeCosts + ?Sized> EdgeCosts for &C {
    fn type_count(&self) -> usize {
        (**self).type_count()
    }

    fn edge_cost(&self, used: usize, cluster_type: usize) -> Option<EdgeCost> {
        (**self).edge_cost(used, cluster_type)
    }
}

/// Edge costs replayed from an explicit table keyed by `(used, type)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableCosts {
    types: usize,
    table: BTreeMap<(usize, usize), EdgeCost>,
}

impl TableCosts {
    pub fn new(types: usize) -> Self {
        TableCosts {
            types,
            table: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, used: usize, cluster_type: usize, cost: EdgeCost) -> &mut Self {
        assert!(cluster_type < self.types, "cluster type out of range");
        self.table.insert((used, cluster_type), cost);
        self
    }

    pub fn with(mut self, used: usize, cluster_type: usize, cost: EdgeCost) -> Self {
        self.insert(used, cluster_type, cost);
        self
    }
}

impl EdgeCosts for TableCosts {
    fn type_count(&self) -> usize {
        self.types
    }

    fn edge_cost(&self, used: usize, cluster_type: usize) -> Option<EdgeCost> {
        self.table.get(&(used, cluster_type)).copied()
    }
}

/// Object count and the two resource budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub objects: usize,
    pub annotators: usize,
    pub subchannels: usize,
}

impl Budget {
    pub const fn new(objects: usize, annotators: usize, subchannels: usize) -> Self {
        Budget {
            objects,
            annotators,
            subchannels,
        }
    }

    pub fn admits(&self, annotators: usize, subchannels: usize) -> bool {
        annotators <= self.annotators && subchannels <= self.subchannels
    }
}

impl<T> From<&Scenario<T>> for Budget {
    fn from(s: &Scenario<T>) -> Self {
        Budget::new(s.objects, s.annotators, s.subchannels)
    }
}

/// Labelled objects `o_1 .. o_{throughput}` with their clusters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub throughput: usize,
    pub clusters: Vec<ClusterSpec>,
    pub annotators_used: usize,
    pub subchannels_used: usize,
}

impl Solution {
    pub fn empty() -> Self {
        Solution::default()
    }

    /// Expand a type sequence into sequential clusters. `None` if some edge
    /// is unavailable.
    pub fn from_types(types: &[usize], costs: &impl EdgeCosts) -> Option<Solution> {
        let mut sol = Solution::empty();
        for &n in types {
            let c = costs.edge_cost(sol.annotators_used, n)?;
            let start = sol.annotators_used;
            sol.annotators_used += c.annotators;
            sol.subchannels_used += c.subchannels;
            sol.clusters.push(ClusterSpec {
                cluster_type: n,
                annotators: start..sol.annotators_used,
                subchannels: c.subchannels,
            });
        }
        sol.throughput = sol.clusters.len();
        Some(sol)
    }

    pub fn types(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.cluster_type).collect()
    }

    pub fn within(&self, budget: &Budget) -> bool {
        self.throughput <= budget.objects
            && budget.admits(self.annotators_used, self.subchannels_used)
    }

    /// Count of clusters per type.
    pub fn type_counts(&self, types: usize) -> Vec<usize> {
        let mut counts = vec![0; types];
        for c in &self.clusters {
            counts[c.cluster_type] += 1;
        }
        counts
    }
}

/// Keep adding clusters of one type until the next one breaks a budget.
pub fn greedy_single_type(
    cluster_type: usize,
    budget: &Budget,
    costs: &impl EdgeCosts,
) -> Solution {
    let mut sol = Solution::empty();
    while sol.throughput < budget.objects {
        let Some(c) = costs.edge_cost(sol.annotators_used, cluster_type) else {
            break;
        };
        let (k, l) = (
            sol.annotators_used + c.annotators,
            sol.subchannels_used + c.subchannels,
        );
        if !budget.admits(k, l) {
            break;
        }
        sol.clusters.push(ClusterSpec {
            cluster_type,
            annotators: sol.annotators_used..k,
            subchannels: c.subchannels,
        });
        sol.annotators_used = k;
        sol.subchannels_used = l;
        sol.throughput += 1;
    }
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_types_lays_clusters_out_sequentially() {
        let costs =
            TableCosts::new(2)
                .with(0, 0, EdgeCost::new(3, 1))
                .with(3, 1, EdgeCost::new(1, 3));
        let sol = Solution::from_types(&[0, 1], &costs).unwrap();
        assert_eq!(sol.throughput, 2);
        assert_eq!(sol.clusters[0].annotators, 0..3);
        assert_eq!(sol.clusters[1].annotators, 3..4);
        assert_eq!((sol.annotators_used, sol.subchannels_used), (4, 4));
        assert_eq!(sol.type_counts(2), vec![1, 1]);
        assert!(Solution::from_types(&[1, 1], &costs).is_none());
    }

    #[test]
    fn greedy_stops_at_first_budget_violation() {
        let costs = TableCosts::new(1)
            .with(0, 0, EdgeCost::new(3, 1))
            .with(3, 0, EdgeCost::new(3, 1))
            .with(6, 0, EdgeCost::new(3, 1));
        assert_eq!(
            greedy_single_type(0, &Budget::new(3, 6, 3), &costs).throughput,
            2
        );
        assert_eq!(
            greedy_single_type(0, &Budget::new(1, 6, 3), &costs).throughput,
            1
        );
        assert_eq!(
            greedy_single_type(0, &Budget::new(3, 0, 3), &costs).throughput,
            0
        );
    }
}
