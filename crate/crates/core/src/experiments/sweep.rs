//! Monte Carlo sweep over the sensor budget grid.
//!
//! Every trial owns a ChaCha stream keyed by the master seed and the trial
//! index, and results are gathered in trial order, so the output does not
//! depend on how many workers ran it.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{PlacementMode, ScenarioConfig};
use super::scenario::{build_problem, draw_layout, place_sensors, Placement};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::strategy::AllocationStrategy;

/// Stream reserved for the fixed base layout.
const LAYOUT_STREAM: u64 = u64::MAX;

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn base_layout(cfg: &ScenarioConfig) -> Option<Placement> {
    match cfg.placement {
        PlacementMode::Permutation => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(LAYOUT_STREAM);
            Some(draw_layout(&mut rng, cfg))
        }
        PlacementMode::Resample => None,
    }
}

/// Problem for trial `trial`, identical to what the sweep uses.
pub fn trial_problem(cfg: &ScenarioConfig, base: Option<&Placement>, trial: usize) -> Result<(Placement, Problem)> {
    let mut rng = trial_rng(cfg.seed, trial);
    let placement = place_sensors(&mut rng, cfg, base);
    let problem = build_problem(&mut rng, cfg, &placement)?;
    Ok((placement, problem))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub p_t: f64,
    pub method: String,
    pub mse: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedTrial {
    pub trial: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p_t: f64,
    pub method: String,
    pub mean_mse: f64,
    pub std_err: f64,
    pub trials: usize,
    pub converged_fraction: f64,
}

/// Aggregates per (budget, method), budgets ascending, methods in the
/// order they were requested. Trial counts agree across methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseCurve {
    pub points: Vec<CurvePoint>,
    pub excluded: Vec<ExcludedTrial>,
}

impl MseCurve {
    pub fn point(&self, p_t: f64, method: &str) -> Option<&CurvePoint> {
        self.points.iter().find(|c| c.p_t == p_t && c.method == method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub curve: MseCurve,
    /// Included trials only, ordered by trial, budget, method.
    pub results: Vec<TrialResult>,
}

fn run_trial(cfg: &ScenarioConfig, base: Option<&Placement>, methods: &[Arc<dyn AllocationStrategy>], trial: usize) -> Result<Vec<TrialResult>> {
    let (_, problem) = trial_problem(cfg, base, trial)?;
    let mut out = Vec::with_capacity(cfg.p_t_grid.len() * methods.len());
    for &p_t in &cfg.p_t_grid {
        let budgets = cfg.budgets(p_t)?;
        for method in methods {
            let r = method.allocate(&problem, &budgets, &cfg.optimizer).map_err(|e| {
                Error::Numerical(format!("trial {trial}, P_T={p_t}, method {}: {e}", method.name()))
            })?;
            if !(r.mse.is_finite() && r.mse >= 0.0) {
                return Err(Error::Numerical(format!(
                    "trial {trial}, P_T={p_t}, method {}: invalid MSE {}",
                    method.name(),
                    r.mse
                )));
            }
            out.push(TrialResult {
                trial,
                p_t,
                method: method.name().to_string(),
                mse: r.mse,
                iterations: r.iterations,
                converged: r.converged,
            });
        }
    }
    Ok(out)
}

/// Runs all trials on `workers` threads. A trial in which any method
/// fails is excluded for every method, keeping the comparison paired.
pub fn run_sweep(cfg: &ScenarioConfig, methods: &[Arc<dyn AllocationStrategy>], workers: usize) -> Result<SweepOutput> {
    cfg.validate().map_err(|e| Error::InvalidInput(e.to_string()))?;
    if methods.is_empty() {
        return Err(Error::InvalidInput("no methods selected".into()));
    }
    let base = base_layout(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    let per_trial: Vec<Result<Vec<TrialResult>>> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, base.as_ref(), methods, t)).collect());

    let mut results = Vec::new();
    let mut excluded = Vec::new();
    for (trial, r) in per_trial.into_iter().enumerate() {
        match r {
            Ok(rs) => results.extend(rs),
            Err(e) => excluded.push(ExcludedTrial { trial, reason: e.to_string() }),
        }
    }
    if excluded.len() == cfg.trials {
        return Err(Error::Numerical(format!("every trial failed; first: {}", excluded[0].reason)));
    }
    let curve = aggregate(cfg, methods, &results, excluded);
    Ok(SweepOutput { curve, results })
}

fn aggregate(cfg: &ScenarioConfig, methods: &[Arc<dyn AllocationStrategy>], results: &[TrialResult], excluded: Vec<ExcludedTrial>) -> MseCurve {
    let mut points = Vec::new();
    let stride = cfg.p_t_grid.len() * methods.len();
    for (bi, &p_t) in cfg.p_t_grid.iter().enumerate() {
        for (mi, method) in methods.iter().enumerate() {
            let offset = bi * methods.len() + mi;
            let cell: Vec<&TrialResult> = results.iter().skip(offset).step_by(stride).collect();
            let n = cell.len();
            let mean = cell.iter().map(|r| r.mse).sum::<f64>() / n as f64;
            let std_err = if n > 1 {
                let var = cell.iter().map(|r| (r.mse - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            let converged = cell.iter().filter(|r| r.converged).count();
            points.push(CurvePoint {
                p_t,
                method: method.name().to_string(),
                mean_mse: mean,
                std_err,
                trials: n,
                converged_fraction: converged as f64 / n as f64,
            });
        }
    }
    MseCurve { points, excluded }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{StrategyRegistry, TWO_HOP_OPT, TWO_HOP_UNIFORM};

    fn small_config(trials: usize) -> ScenarioConfig {
        ScenarioConfig { trials, seed: 11, ..ScenarioConfig::default() }
    }

    #[test]
    fn one_trial_yields_forty_results() {
        let reg = StrategyRegistry::builtin();
        let methods = reg.select(&small_config(1).methods).unwrap();
        let out = run_sweep(&small_config(1), &methods, 1).unwrap();
        assert_eq!(out.results.len(), 40);
        assert_eq!(out.curve.points.len(), 40);
        assert!(out.curve.points.iter().all(|p| p.trials == 1 && p.std_err == 0.0));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let reg = StrategyRegistry::builtin();
        let cfg = small_config(12);
        let methods = reg.select(&cfg.methods).unwrap();
        let a = run_sweep(&cfg, &methods, 1).unwrap();
        let b = run_sweep(&cfg, &methods, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn optimized_dominates_uniform_per_trial() {
        let reg = StrategyRegistry::builtin();
        let cfg = small_config(8);
        let methods = reg.select(&[TWO_HOP_OPT, TWO_HOP_UNIFORM]).unwrap();
        let out = run_sweep(&cfg, &methods, 2).unwrap();
        for pair in out.results.chunks(2) {
            assert_eq!(pair[0].trial, pair[1].trial);
            assert!(pair[0].mse <= pair[1].mse, "{pair:?}");
        }
    }

    #[test]
    fn trial_problem_is_reproducible() {
        let cfg = small_config(3);
        let base = base_layout(&cfg);
        let (p1, a) = trial_problem(&cfg, base.as_ref(), 2).unwrap();
        let (p2, b) = trial_problem(&cfg, base.as_ref(), 2).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(a.relay, b.relay);
    }
}
