//! Single-instance dispatch: build the instance for one channel draw, run
//! the selected solver, report the plan.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use jasa_core::channel::{truncated_inversion, ChannelRealization};
use jasa_core::fading::{
    fixed_type_policy, jasa_bb_fading, policy_annotator_constrained, policy_spectrum_constrained,
    FadingProblem, SearchOptions,
};
use jasa_core::oracle::{exhaustive_counts, exhaustive_search};
use jasa_core::tci::{merged_tree_bb, solve_dp, KnapsackInstance, KnapsackOutcome};
use jasa_core::{Budget, EdgeCosts, Solution};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::mode::Mode;

/// Result of one solver run on one channel draw.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub mode: Mode,
    pub seed: u64,
    pub budget: Budget,
    pub solution: Solution,
    /// Mode-specific facts, printed in order.
    pub details: Vec<(&'static str, String)>,
    /// Solver wall-time, excluding instance construction.
    pub elapsed: Duration,
}

impl Outcome {
    pub fn throughput(&self) -> usize {
        self.solution.throughput
    }

    pub fn detail(&self, key: &str) -> Option<&str> {
        self.details
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Plain-text report; deterministic for a given config and seed.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let b = &self.budget;
        let _ = writeln!(s, "mode: {}", self.mode);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(
            s,
            "budget: M={} K={} L={}",
            b.objects, b.annotators, b.subchannels
        );
        let _ = writeln!(s, "M* = {}", self.solution.throughput);
        let _ = writeln!(s, "annotators used: {}", self.solution.annotators_used);
        let _ = writeln!(s, "subchannels used: {}", self.solution.subchannels_used);
        for (k, v) in &self.details {
            let _ = writeln!(s, "{k}: {v}");
        }
        let _ = writeln!(s, "clusters:");
        for (i, c) in self.solution.clusters.iter().enumerate() {
            let _ = writeln!(
                s,
                "  object {}: type {}, annotators {}-{}, subchannels {}",
                i + 1,
                c.cluster_type + 1,
                c.annotators.start + 1,
                c.annotators.end,
                c.subchannels
            );
        }
        s
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

/// Faded-channel instance for one draw: `K` Rayleigh links sharing the total
/// power evenly.
pub fn fading_problem(cfg: &ExperimentConfig, seed: u64) -> Result<FadingProblem<f64>> {
    let k = cfg.annotators;
    let ch = ChannelRealization::<f64>::draw_rayleigh(k, seed)
        .with_total_power(cfg.noise, cfg.total_power.resolve(k).max(f64::MIN_POSITIVE))?;
    Ok(FadingProblem::with_cluster_sizes(
        cfg.scenario(),
        cfg.ladder()?,
        cfg.cluster_sizes()?,
        ch.snrs().to_vec(),
    )?)
}

/// Equalized instance for one draw after truncated inversion to `gamma0`.
/// Returns the instance and the number of invertible annotators.
pub fn tci_instance(cfg: &ExperimentConfig, seed: u64) -> Result<(KnapsackInstance, usize)> {
    let k = cfg.annotators;
    let available = if k == 0 {
        0
    } else {
        let ch = ChannelRealization::<f64>::draw_rayleigh(k, seed).with_power(cfg.noise, 1.0)?;
        truncated_inversion(&ch, cfg.gamma0, cfg.total_power.resolve(k))?.available
    };
    let inst = KnapsackInstance::from_inversion(
        &cfg.scenario(),
        &cfg.ladder()?,
        &cfg.cluster_sizes()?,
        cfg.gamma0,
        available,
    )?;
    Ok((inst, available))
}

/// Run `mode` on the instance drawn with `seed`.
pub fn solve(cfg: &ExperimentConfig, mode: Mode, seed: u64) -> Result<Outcome> {
    cfg.check_mode(mode)?;
    if mode.is_tci() {
        return solve_tci(cfg, mode, seed);
    }
    let options = SearchOptions {
        dominance_pruning: cfg.dominance_pruning,
    };
    if let Some(table) = &cfg.edge_table {
        let costs = table.to_costs()?;
        let budget = Budget::new(cfg.objects, cfg.annotators, cfg.subchannels);
        return run_fading(mode, seed, &budget, &costs, options);
    }
    let problem = fading_problem(cfg, seed)?;
    let out = if mode == Mode::AutoSpecialCase {
        auto_special_case(&problem, seed, options)?
    } else {
        run_fading(mode, seed, &problem.budget(), &problem, options)?
    };
    problem.verify(&out.solution).map_err(|e| {
        HarnessError::Validation(format!("{mode} returned an infeasible plan: {e}"))
    })?;
    Ok(out)
}

fn run_fading(
    mode: Mode,
    seed: u64,
    budget: &Budget,
    costs: &impl EdgeCosts,
    options: SearchOptions,
) -> Result<Outcome> {
    let start = Instant::now();
    let mut details = Vec::new();
    let solution = match mode {
        Mode::FadingBb => {
            let out = jasa_bb_fading(budget, costs, options);
            let path: Vec<String> = out
                .path_labels
                .iter()
                .enumerate()
                .map(|(m, l)| format!("S{m}:{l}"))
                .collect();
            details.push(("path", path.join(" -> ")));
            details.push(("nodes created", join(&out.stats.created, " ")));
            details.push(("nodes kept", join(&out.stats.survived, " ")));
            out.solution
        }
        Mode::FadingEs => {
            let rep = exhaustive_search(budget, costs)?;
            details.push(("states", rep.states.to_string()));
            Solution::from_types(&rep.witness, costs).expect("oracle witness is feasible")
        }
        Mode::TypeOnly(n) => {
            let n = n.unwrap_or(costs.type_count());
            fixed_type_policy(n - 1, budget, costs)
        }
        other => unreachable!("{other} is not a fading mode"),
    };
    let elapsed = start.elapsed();
    Ok(Outcome {
        mode,
        seed,
        budget: *budget,
        solution,
        details,
        elapsed,
    })
}

fn auto_special_case(
    problem: &FadingProblem<f64>,
    seed: u64,
    options: SearchOptions,
) -> Result<Outcome> {
    let budget = problem.budget();
    let start = Instant::now();
    let mut details = Vec::new();
    let solution = if problem.is_annotator_constrained() {
        details.push(("regime", "annotator-constrained".to_string()));
        policy_annotator_constrained(problem)?
    } else if problem.is_spectrum_constrained() {
        let p = policy_spectrum_constrained(problem)?;
        details.push(("regime", "spectrum-constrained".to_string()));
        details.push(("bounds", format!("{} <= M* <= {}", p.lower, p.upper)));
        p.solution
    } else {
        details.push(("regime", "general (tree search)".to_string()));
        jasa_bb_fading(&budget, problem, options).solution
    };
    let elapsed = start.elapsed();
    Ok(Outcome {
        mode: Mode::AutoSpecialCase,
        seed,
        budget,
        solution,
        details,
        elapsed,
    })
}

fn solve_tci(cfg: &ExperimentConfig, mode: Mode, seed: u64) -> Result<Outcome> {
    let (inst, available) = tci_instance(cfg, seed)?;
    let m = cfg.objects;
    let mut details = vec![
        ("available annotators", available.to_string()),
        (
            "type costs",
            join(
                &inst
                    .weights()
                    .iter()
                    .map(|w| format!("({},{})", w.annotators, w.subchannels))
                    .collect::<Vec<_>>(),
                " ",
            ),
        ),
    ];
    let start = Instant::now();
    let counts = match mode {
        Mode::TciDp => solve_dp(&inst, m).counts,
        Mode::TciBb => {
            let out = merged_tree_bb(&inst, m);
            details.push(("nodes created", join(&out.stats.created, " ")));
            out.counts
        }
        Mode::TciEs => {
            let rep = exhaustive_counts(&inst, m)?;
            details.push(("states", rep.states.to_string()));
            rep.witness
        }
        other => unreachable!("{other} is not a TCI mode"),
    };
    let elapsed = start.elapsed();
    details.push(("counts", join(&counts, " ")));
    let solution = KnapsackOutcome {
        throughput: counts.iter().sum(),
        counts,
    }
    .to_solution(&inst);
    Ok(Outcome {
        mode,
        seed,
        budget: Budget::new(m, cfg.annotators, cfg.subchannels),
        solution,
        details,
        elapsed,
    })
}
