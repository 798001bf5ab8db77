//! One-hop baseline: sensors reach the fusion center directly, so
//! `φ_j = h_j α_j / σ_j` and only the sensor budget is allocated.
//!
//! The same concave-in-`1/φ` bound applies; its surrogate is
//! `Σ ρ_j σ_j / (h_j α_j)`, whose budget-constrained minimiser is
//! `α_j ∝ √(ρ_j σ_j / h_j) / ‖y_j‖`.

use serde::{Deserialize, Serialize};

use super::{ScaOptions, StopReason};
use crate::error::{Error, Result};
use crate::relay::{DirectLink, MseObjective};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneHopOutcome {
    pub alpha: Vec<f64>,
    pub objectives: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl OneHopOutcome {
    pub fn iterations(&self) -> usize {
        self.objectives.len().saturating_sub(1)
    }

    pub fn objective(&self) -> f64 {
        *self.objectives.last().expect("initial objective recorded")
    }
}

fn phis(links: &[DirectLink], alpha: &[f64]) -> Vec<f64> {
    links.iter().zip(alpha).map(|(l, &a)| l.phi(a)).collect()
}

pub fn one_hop_optimize(
    obj: &MseObjective,
    links: &[DirectLink],
    channel_powers: &[f64],
    p_t: f64,
    opts: &ScaOptions,
) -> Result<OneHopOutcome> {
    opts.validate()?;
    let m = links.len();
    if channel_powers.len() != m || obj.channel_count() != m {
        return Err(Error::DimensionMismatch("one-hop inputs disagree on M".into()));
    }
    if !(p_t.is_finite() && p_t > 0.0) {
        return Err(Error::InvalidInput(format!("P_T must be positive, got {p_t}")));
    }
    let mut alpha: Vec<f64> = channel_powers.iter().map(|w| p_t / (m as f64 * w)).collect();
    let mut objectives = vec![obj.objective(&phis(links, &alpha))?];
    let mut lambdas = Vec::new();
    let mut stop_reason = StopReason::MaxIterations;
    let mut converged = false;
    if objectives[0] == 0.0 {
        return Ok(OneHopOutcome { alpha, objectives, lambdas, converged: true, stop_reason: StopReason::ToleranceMet });
    }

    let mut stalls = 0;
    for _ in 0..opts.max_iterations {
        let rho = obj.rho(&phis(links, &alpha))?;
        let weight: Vec<f64> = rho.iter().zip(links).map(|(r, l)| (r * l.noise / l.gain).sqrt()).collect();
        let idle: f64 = (0..m).filter(|&j| weight[j] == 0.0).map(|j| channel_powers[j] * opts.floor).sum();
        let denom: f64 = weight.iter().zip(channel_powers).map(|(w, pw)| w * pw.sqrt()).sum();
        let next: Vec<f64> = if denom > 0.0 {
            let share = p_t - idle;
            lambdas.push((denom / share).powi(2));
            (0..m)
                .map(|j| {
                    if weight[j] == 0.0 {
                        opts.floor
                    } else {
                        (share * weight[j] / (channel_powers[j].sqrt() * denom)).max(opts.floor)
                    }
                })
                .collect()
        } else {
            lambdas.push(0.0);
            alpha.clone()
        };
        let prev = *objectives.last().unwrap();
        let value = obj.objective(&phis(links, &next))?;
        if !value.is_finite() {
            return Err(Error::Numerical(format!("non-finite one-hop objective at {next:?}")));
        }
        if value > prev {
            lambdas.pop();
            converged = true;
            stop_reason = StopReason::ToleranceMet;
            break;
        }
        alpha = next;
        objectives.push(value);
        let decrease = (prev - value) / prev;
        if decrease < 1e-14 {
            stalls += 1;
            if stalls >= 2 {
                converged = true;
                stop_reason = StopReason::Stalled;
                break;
            }
        } else {
            stalls = 0;
        }
        if decrease <= opts.epsilon {
            converged = true;
            stop_reason = StopReason::ToleranceMet;
            break;
        }
    }
    Ok(OneHopOutcome { alpha, objectives, lambdas, converged, stop_reason })
}
