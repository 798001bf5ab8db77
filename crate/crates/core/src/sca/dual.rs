//! Budget-matching search for the Lagrange multipliers `λ_T` and `λ_R`.
//!
//! For a fixed multiplier every active channel solves
//! `λ w_j x³ = lin_j x + cst_j`; the implied spend `Σ w_j x_j(λ)` is strictly
//! decreasing in `λ`. The search seeds a lower multiplier, doubles until the
//! spend drops under the budget, then bisects the bracket.

use serde::{Deserialize, Serialize};

use super::cubic::cubic_positive_root;
use super::MajorantCoeffs;
use crate::error::{Error, Result};

/// Result of one multiplier search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    pub lambda: f64,
    pub values: Vec<f64>,
    /// `Σ w_j x_j` at the returned values.
    pub spend: f64,
    pub bisection_steps: usize,
    /// False when the step cap was hit before the budget tolerance.
    pub converged: bool,
    /// True when no channel carried weight and the budget was split uniformly.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchSettings {
    pub rel_tol: f64,
    pub max_bisection: usize,
    pub floor: f64,
}

const MAX_BRACKET_MOVES: usize = 4000;

fn spend_at(lambda: f64, lin: &[f64], cst: &[f64], weights: &[f64], active: &[bool], floor: f64) -> Result<(f64, Vec<f64>)> {
    let mut values = Vec::with_capacity(lin.len());
    let mut total = 0.0;
    for j in 0..lin.len() {
        let x = if active[j] {
            cubic_positive_root(lambda * weights[j], lin[j], cst[j])?.max(floor)
        } else {
            floor
        };
        total += weights[j] * x;
        values.push(x);
    }
    Ok((total, values))
}

/// Generic search; `weights` are `‖y_j‖²` for the sensors and ones for the relay.
pub fn search_multiplier(lin: &[f64], cst: &[f64], weights: &[f64], budget: f64, settings: SearchSettings) -> Result<DualSolution> {
    let m = lin.len();
    if cst.len() != m || weights.len() != m {
        return Err(Error::DimensionMismatch("multiplier search inputs disagree in length".into()));
    }
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::InvalidInput(format!("budget must be positive, got {budget}")));
    }
    let active: Vec<bool> = lin.iter().zip(cst).map(|(&l, &c)| l + c > 0.0).collect();
    let n_active = active.iter().filter(|&&a| a).count();
    let floor = settings.floor;

    if n_active == 0 {
        let values: Vec<f64> = weights.iter().map(|w| budget / (m as f64 * w)).collect();
        return Ok(DualSolution {
            lambda: 0.0,
            values,
            spend: budget,
            bisection_steps: 0,
            converged: true,
            degenerate: true,
        });
    }

    let idle: f64 = (0..m).filter(|&j| !active[j]).map(|j| weights[j] * floor).sum();
    let target = budget - idle;
    if target <= 0.0 {
        return Err(Error::InvalidInput("positivity floor exhausts the budget".into()));
    }

    if n_active == 1 {
        // the equality constraint pins the lone active channel
        let j = active.iter().position(|&a| a).unwrap();
        let x = target / weights[j];
        let mut values = vec![floor; m];
        values[j] = x;
        let lambda = (lin[j] * x + cst[j]) / (weights[j] * x * x * x);
        let spend = values.iter().zip(weights).map(|(v, w)| v * w).sum();
        return Ok(DualSolution { lambda, values, spend, bisection_steps: 0, converged: true, degenerate: false });
    }

    let within = |s: f64| (s - budget).abs() <= settings.rel_tol * budget;

    // lower multiplier seed: the largest λ at which some channel alone
    // would take the whole budget at unit weight
    let mut lam_lo = (0..m)
        .filter(|&j| active[j])
        .map(|j| (lin[j] / (budget * budget) + cst[j] / (budget * budget * budget)) / weights[j])
        .fold(0.0_f64, f64::max);
    let (mut s_lo, values) = spend_at(lam_lo, lin, cst, weights, &active, floor)?;
    if within(s_lo) {
        return Ok(DualSolution { lambda: lam_lo, values, spend: s_lo, bisection_steps: 0, converged: true, degenerate: false });
    }
    let mut moves = 0;
    while s_lo < budget {
        lam_lo *= 0.5;
        s_lo = spend_at(lam_lo, lin, cst, weights, &active, floor)?.0;
        moves += 1;
        if moves > MAX_BRACKET_MOVES || lam_lo == 0.0 {
            return Err(Error::Numerical("could not bracket the multiplier from below".into()));
        }
    }

    let mut lam_hi = 2.0 * lam_lo;
    let mut s_hi;
    loop {
        let (s, values) = spend_at(lam_hi, lin, cst, weights, &active, floor)?;
        if within(s) {
            return Ok(DualSolution { lambda: lam_hi, values, spend: s, bisection_steps: 0, converged: true, degenerate: false });
        }
        if s > budget {
            if s > s_lo {
                return Err(Error::Numerical(format!(
                    "spend increased with the multiplier ({s_lo} -> {s} at λ={lam_hi})"
                )));
            }
            lam_lo = lam_hi;
            s_lo = s;
            lam_hi *= 2.0;
            moves += 1;
            if moves > MAX_BRACKET_MOVES || !lam_hi.is_finite() {
                return Err(Error::Numerical("could not bracket the multiplier from above".into()));
            }
        } else {
            s_hi = s;
            break;
        }
    }

    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for step in 1..=settings.max_bisection {
        let lam = 0.5 * (lam_lo + lam_hi);
        if lam <= lam_lo || lam >= lam_hi {
            break;
        }
        let (s, values) = spend_at(lam, lin, cst, weights, &active, floor)?;
        if s > s_lo || s < s_hi {
            return Err(Error::Numerical(format!(
                "spend not monotone in the multiplier: {s} outside [{s_hi}, {s_lo}]"
            )));
        }
        if within(s) {
            return Ok(DualSolution { lambda: lam, values, spend: s, bisection_steps: step, converged: true, degenerate: false });
        }
        let err = (s - budget).abs();
        if best.as_ref().is_none_or(|b| err < (b.1 - budget).abs()) {
            best = Some((lam, s, values));
        }
        if s > budget {
            lam_lo = lam;
            s_lo = s;
        } else {
            lam_hi = lam;
            s_hi = s;
        }
    }
    let (lambda, spend, values) = best.ok_or_else(|| Error::Numerical("multiplier bracket collapsed".into()))?;
    Ok(DualSolution {
        lambda,
        values,
        spend,
        bisection_steps: settings.max_bisection,
        converged: false,
        degenerate: false,
    })
}

/// Sensor multiplier `λ_T` and scale factors `α` meeting `Σ ‖y_j‖² α_j = P_T`.
pub fn golden_search_sensors(coeffs: &MajorantCoeffs, channel_powers: &[f64], p_t: f64, settings: SearchSettings) -> Result<DualSolution> {
    search_multiplier(&coeffs.a, &coeffs.c, channel_powers, p_t, settings)
}

/// Relay multiplier `λ_R` and power levels `β` meeting `Σ β_j = P_R`.
pub fn golden_search_relay(coeffs: &MajorantCoeffs, p_r: f64, settings: SearchSettings) -> Result<DualSolution> {
    let ones = vec![1.0; coeffs.b.len()];
    search_multiplier(&coeffs.b, &coeffs.d, &ones, p_r, settings)
}
