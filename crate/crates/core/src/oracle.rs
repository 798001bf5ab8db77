//! Brute-force and finite-difference references used to check the
//! optimizer and the scenario linearization.
//!
//! The grid search evaluates only the direct posterior-covariance path and
//! never touches optimizer code.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{mse_trace, JointMoments};
use crate::error::{Error, Result};
use crate::relay::{posterior_cov_relay_direct, Allocation, Budgets, RelaySpec};

pub const MAX_GRID_CHANNELS: usize = 3;

/// Points per free axis on each budget-equality surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 10 {
            return Err(Error::InvalidInput(format!("grid resolution must be at least 10, got {resolution}")));
        }
        Ok(Self { resolution })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub alloc: Allocation,
    pub trace: f64,
    pub evaluated: usize,
}

/// Budget shares on the open simplex with `m` parts: the first `m − 1`
/// coordinates are multiples of `1/res`, all parts strictly positive.
fn simplex_shares(m: usize, res: usize) -> Vec<Vec<f64>> {
    fn rec(m: usize, res: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() + 1 == m {
            if left > 0 {
                let mut v: Vec<f64> = prefix.iter().map(|&k| k as f64 / res as f64).collect();
                v.push(left as f64 / res as f64);
                out.push(v);
            }
            return;
        }
        for k in 1..left {
            prefix.push(k);
            rec(m, res, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, res, res, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Minimizes the true posterior trace over both budget-equality surfaces.
///
/// Shares are multiples of `1/resolution`, so doubling the resolution
/// nests the coarser grid and never raises the minimum found.
pub fn grid_search_mse(moments: &JointMoments, spec: &RelaySpec, budgets: &Budgets, grid: GridSpec) -> Result<GridResult> {
    GridSpec::new(grid.resolution)?;
    let m = spec.channel_count();
    if m > MAX_GRID_CHANNELS {
        return Err(Error::UnsupportedSize(format!(
            "grid search supports at most {MAX_GRID_CHANNELS} channels, got {m}"
        )));
    }
    if moments.channel_count() != m {
        return Err(Error::DimensionMismatch("moments and relay spec disagree on M".into()));
    }
    let shares = simplex_shares(m, grid.resolution);
    let w = &spec.channel_powers;
    let candidates: Vec<(usize, usize)> =
        (0..shares.len()).flat_map(|i| (0..shares.len()).map(move |k| (i, k))).collect();

    let evaluate = |&(i, k): &(usize, usize)| -> Result<(usize, f64)> {
        let alloc = Allocation {
            alpha: shares[i].iter().zip(w).map(|(s, wj)| s * budgets.p_t / wj).collect(),
            beta: shares[k].iter().map(|s| s * budgets.p_r).collect(),
        };
        let t = mse_trace(&posterior_cov_relay_direct(moments, spec, &alloc)?);
        Ok((i * shares.len() + k, t))
    };
    let values: Vec<(usize, f64)> = candidates.par_iter().map(evaluate).collect::<Result<_>>()?;
    // ties resolve to the lowest index, independent of thread scheduling
    let (best_idx, best) = values
        .into_iter()
        .filter(|(_, t)| t.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::Numerical("grid search found no finite objective".into()))?;
    let (i, k) = (best_idx / shares.len(), best_idx % shares.len());
    let alloc = Allocation {
        alpha: shares[i].iter().zip(w).map(|(s, wj)| s * budgets.p_t / wj).collect(),
        beta: shares[k].iter().map(|s| s * budgets.p_r).collect(),
    };
    Ok(GridResult { alloc, trace: best, evaluated: candidates.len() })
}

fn fd_step(x: f64, step: Option<f64>) -> f64 {
    step.unwrap_or(1e-5) * (1.0 + x.abs())
}

/// Central-difference gradient; `step` is relative, default `1e-5`.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, point: &[f64], step: Option<f64>) -> Vec<f64> {
    let mut x = point.to_vec();
    (0..point.len())
        .map(|i| {
            let h = fd_step(point[i], step);
            x[i] = point[i] + h;
            let up = f(&x);
            x[i] = point[i] - h;
            let down = f(&x);
            x[i] = point[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Jacobian, one row per output component.
pub fn fd_jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: F, point: &[f64], step: Option<f64>) -> DMatrix<f64> {
    let rows = f(point).len();
    let mut jac = DMatrix::zeros(rows, point.len());
    let mut x = point.to_vec();
    for i in 0..point.len() {
        let h = fd_step(point[i], step);
        x[i] = point[i] + h;
        let up = f(&x);
        x[i] = point[i] - h;
        let down = f(&x);
        x[i] = point[i];
        for r in 0..rows {
            jac[(r, i)] = (up[r] - down[r]) / (2.0 * h);
        }
    }
    jac
}
