//! Monte-Carlo parameter sweeps and CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use jasa_core::channel::trial_seed;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::solve::solve;

pub const CSV_HEADER: &str =
    "sweep_var,value,algorithm,mean_throughput,trials,seed,mean_runtime_ms";

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "JASA_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Annotators,
    Subchannels,
    Gamma0,
}

impl SweepVar {
    fn is_integer(self) -> bool {
        !matches!(self, SweepVar::Gamma0)
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::Annotators => "annotators",
            SweepVar::Subchannels => "subchannels",
            SweepVar::Gamma0 => "gamma0",
        })
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "annotators" | "K" => Ok(SweepVar::Annotators),
            "subchannels" | "L" => Ok(SweepVar::Subchannels),
            "gamma0" => Ok(SweepVar::Gamma0),
            _ => Err(format!(
                "unknown sweep variable `{s}` (annotators, subchannels, gamma0)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl SweepSpec {
    pub fn new(var: SweepVar, from: f64, to: f64, step: f64) -> Self {
        SweepSpec {
            var,
            from,
            to,
            step,
        }
    }

    /// Grid points `from, from+step, …` up to and including `to`.
    pub fn values(&self) -> Result<Vec<f64>> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(self.step > 0.0) || !self.step.is_finite() {
            return bad(format!("step must be positive, got {}", self.step));
        }
        if !self.from.is_finite() || !self.to.is_finite() || self.from > self.to {
            return bad(format!("empty range {}..{}", self.from, self.to));
        }
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        // snap to 1e-9 so accumulated steps print cleanly
        let values: Vec<f64> = (0..count)
            .map(|i| ((self.from + i as f64 * self.step) * 1e9).round() / 1e9)
            .collect();
        if self.var.is_integer() {
            if values
                .iter()
                .any(|v| *v < 0.0 || (v - v.round()).abs() > 1e-9)
            {
                return bad(format!("{} takes non-negative integer values", self.var));
            }
            return Ok(values.into_iter().map(f64::round).collect());
        }
        Ok(values)
    }

    fn apply(&self, cfg: &ExperimentConfig, value: f64) -> ExperimentConfig {
        let mut c = cfg.clone();
        match self.var {
            SweepVar::Annotators => c.annotators = value as usize,
            SweepVar::Subchannels => c.subchannels = value as usize,
            SweepVar::Gamma0 => c.gamma0 = value,
        }
        c
    }

    fn format_value(&self, value: f64) -> String {
        if self.var.is_integer() {
            format!("{}", value as usize)
        } else {
            format!("{value}")
        }
    }
}

/// Mean over `trials` draws of one algorithm at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_var: String,
    pub value: String,
    pub algorithm: String,
    pub mean_throughput: f64,
    pub trials: u64,
    pub seed: u64,
    pub mean_runtime_ms: f64,
}

/// Thread cap from `JASA_THREADS`, else rayon's default.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Run every algorithm of `cfg` at every grid point. Trial `i` uses seed
/// `seed + i` for all algorithms and points, so curves share channel draws.
/// Rows are sorted by (value, algorithm).
pub fn run_sweep(
    cfg: &ExperimentConfig,
    spec: &SweepSpec,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>> {
    let values = spec.values()?;
    let algorithms = cfg.algorithms();
    for &a in &algorithms {
        cfg.check_mode(a)?;
    }
    for &v in &values {
        spec.apply(cfg, v).validate()?;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;

    let mut rows = Vec::with_capacity(values.len() * algorithms.len());
    for &v in &values {
        let point = spec.apply(cfg, v);
        let mut algs = algorithms.clone();
        algs.sort_by_key(|a| a.to_string());
        algs.dedup();
        for mode in algs {
            let results: Vec<(usize, u128)> = pool.install(|| {
                (0..cfg.trials)
                    .into_par_iter()
                    .map(|i| {
                        let out = solve(&point, mode, trial_seed(cfg.seed, i))?;
                        Ok((out.throughput(), out.elapsed.as_nanos()))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let total: u64 = results.iter().map(|r| r.0 as u64).sum();
            let nanos: u128 = results.iter().map(|r| r.1).sum();
            let trials = cfg.trials;
            rows.push(SweepRow {
                sweep_var: spec.var.to_string(),
                value: spec.format_value(v),
                algorithm: mode.to_string(),
                mean_throughput: total as f64 / trials as f64,
                trials,
                seed: cfg.seed,
                mean_runtime_ms: if cfg.timing {
                    nanos as f64 / trials as f64 / 1e6
                } else {
                    0.0
                },
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_the_end_point() {
        let s = SweepSpec::new(SweepVar::Annotators, 5.0, 20.0, 5.0);
        assert_eq!(s.values().unwrap(), vec![5.0, 10.0, 15.0, 20.0]);
        let g = SweepSpec::new(SweepVar::Gamma0, 0.1, 0.3, 0.1);
        assert_eq!(g.values().unwrap(), vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn bad_ranges_are_config_errors() {
        for s in [
            SweepSpec::new(SweepVar::Annotators, 5.0, 1.0, 1.0),
            SweepSpec::new(SweepVar::Annotators, 1.0, 5.0, 0.0),
            SweepSpec::new(SweepVar::Subchannels, 1.0, 2.0, 0.5),
        ] {
            assert_eq!(s.values().unwrap_err().exit_code(), 2);
        }
    }

    #[test]
    fn header_is_exact() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }
}
