//! Signal-level simulation of the relayed network and the fusion-center
//! estimator, used to confirm the analytic posterior MSE empirically.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bayes::MmseEstimator;
use crate::error::{Error, Result};
use crate::linalg::psd_sqrt;
use crate::problem::Problem;
use crate::relay::{relayed_moments, Allocation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMse {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

fn normal_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Draws target, sensor noise, relay noise and fusion-center noise, passes
/// the signals through both hops, and averages `‖x − x̂‖²`.
pub fn simulate_realization<R: Rng + ?Sized>(problem: &Problem, alloc: &Allocation, rng: &mut R, samples: usize) -> Result<EmpiricalMse> {
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let m = problem.channel_count();
    if alloc.len() != m {
        return Err(Error::DimensionMismatch(format!("allocation has {} channels, problem has {m}", alloc.len())));
    }
    let estimator = MmseEstimator::new(&relayed_moments(&problem.moments, &problem.relay, alloc)?)?;
    let prior_root = psd_sqrt(&problem.prior.cov);
    let noise_root = psd_sqrt(&problem.network.r_n);
    let n = problem.prior.dim();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut z = DVector::zeros(m);
    for _ in 0..samples {
        let x = &problem.prior.mean + &prior_root * normal_vec(rng, n);
        let y = &problem.network.g * &x + &noise_root * normal_vec(rng, m);
        for j in 0..m {
            let link = &problem.relay.links[j];
            let (a, b) = (alloc.alpha[j], alloc.beta[j]);
            let n_r: f64 = StandardNormal.sample(rng);
            let n_d: f64 = StandardNormal.sample(rng);
            let at_relay = (link.h_sr * a).sqrt() * y[j] + link.sigma_sr.sqrt() * n_r;
            // the relay normalises to average power β_j
            let amp = (b / (link.h_sr * a * problem.relay.channel_powers[j] + link.sigma_sr)).sqrt();
            z[j] = link.h_rd.sqrt() * amp * at_relay + link.sigma_rd.sqrt() * n_d;
        }
        let err = (&x - estimator.estimate(&z)?).norm_squared();
        sum += err;
        sum_sq += err * err;
    }
    let k = samples as f64;
    let mean = sum / k;
    let var = if samples > 1 { (sum_sq - k * mean * mean).max(0.0) / (k - 1.0) } else { 0.0 };
    Ok(EmpiricalMse { mean, std_err: (var / k).sqrt(), samples })
}
