//! Linear-Gaussian Bayesian fusion.
//!
//! A Gaussian target `X ~ N(m_X, C_X)` is observed through a linear sensor
//! network `y = G x + n` with `n ~ N(0, R_n)`. The joint moments of
//! `(X, Y)` fully determine the conditional-mean (MMSE) estimator and its
//! error covariance.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, spd_factor, symmetrize};

/// Mean and covariance of a Gaussian random vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBelief {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianBelief {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let belief = Self { mean, cov };
        belief.validate()?;
        Ok(belief)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.mean.len();
        if n == 0 {
            return Err(Error::InvalidInput("target dimension must be at least 1".into()));
        }
        if self.cov.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "prior covariance is {}x{}, mean has length {n}",
                self.cov.nrows(),
                self.cov.ncols()
            )));
        }
        if !linalg::is_psd(&self.cov) {
            return Err(Error::InvalidInput(
                "prior covariance is not symmetric positive semidefinite".into(),
            ));
        }
        Ok(())
    }
}

/// First and second moments of the jointly Gaussian pair `(X, Y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointMoments {
    pub mean_x: DVector<f64>,
    pub mean_y: DVector<f64>,
    pub cov_x: DMatrix<f64>,
    pub cov_y: DMatrix<f64>,
    /// `C_XY`, N×M.
    pub cov_xy: DMatrix<f64>,
}

impl JointMoments {
    pub fn target_dim(&self) -> usize {
        self.mean_x.len()
    }

    pub fn channel_count(&self) -> usize {
        self.mean_y.len()
    }

    pub fn check_shapes(&self) -> Result<()> {
        let (n, m) = (self.mean_x.len(), self.mean_y.len());
        let ok = self.cov_x.shape() == (n, n)
            && self.cov_y.shape() == (m, m)
            && self.cov_xy.shape() == (n, m);
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "joint moments inconsistent with N={n}, M={m}"
            )))
        }
    }

    /// Condition number of `C_Y`.
    pub fn cov_y_condition(&self) -> f64 {
        linalg::condition_number(&self.cov_y)
    }
}

/// Linear sensor network `y = G x + n`, `n ~ N(0, R_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorNetwork {
    /// Observation matrix, M×N.
    pub g: DMatrix<f64>,
    /// Observation noise covariance, M×M.
    pub r_n: DMatrix<f64>,
}

impl SensorNetwork {
    pub fn new(g: DMatrix<f64>, r_n: DMatrix<f64>) -> Result<Self> {
        let (m, n) = g.shape();
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("sensor network needs M >= 1 and N >= 1".into()));
        }
        if r_n.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!(
                "R_n is {}x{}, expected {m}x{m}",
                r_n.nrows(),
                r_n.ncols()
            )));
        }
        if !linalg::is_symmetric(&r_n, 1e-9) || spd_factor(&r_n, "R_n").is_err() {
            return Err(Error::InvalidInput("R_n must be symmetric positive definite".into()));
        }
        Ok(Self { g, r_n })
    }

    /// Network with white unit-power observation noise.
    pub fn with_unit_noise(g: DMatrix<f64>) -> Result<Self> {
        let m = g.nrows();
        Self::new(g, DMatrix::identity(m, m))
    }

    pub fn channel_count(&self) -> usize {
        self.g.nrows()
    }

    pub fn target_dim(&self) -> usize {
        self.g.ncols()
    }
}

/// Joint moments of the target and the raw sensor observations.
pub fn observation_moments(prior: &GaussianBelief, net: &SensorNetwork) -> Result<JointMoments> {
    if net.target_dim() != prior.dim() {
        return Err(Error::DimensionMismatch(format!(
            "G has {} columns but the prior is {}-dimensional",
            net.target_dim(),
            prior.dim()
        )));
    }
    prior.validate()?;
    let g = &net.g;
    let cov_xy = &prior.cov * g.transpose();
    let cov_y = symmetrize(&(g * &cov_xy + &net.r_n));
    Ok(JointMoments {
        mean_x: prior.mean.clone(),
        mean_y: g * &prior.mean,
        cov_x: prior.cov.clone(),
        cov_y,
        cov_xy,
    })
}

/// Transmit power `‖y_j‖² = C_Y(j,j) + m_Y(j)²` of channel `j` (zero-based).
///
/// Panics if `j` is out of range.
pub fn channel_power(moments: &JointMoments, j: usize) -> f64 {
    assert!(
        j < moments.channel_count(),
        "channel index {j} out of range for {} channels",
        moments.channel_count()
    );
    moments.cov_y[(j, j)] + moments.mean_y[j] * moments.mean_y[j]
}

/// All channel powers in channel order.
pub fn channel_powers(moments: &JointMoments) -> Vec<f64> {
    (0..moments.channel_count()).map(|j| channel_power(moments, j)).collect()
}

/// Conditional-mean estimator with the gain `C_XY C_Y⁻¹` precomputed.
#[derive(Debug, Clone)]
pub struct MmseEstimator {
    mean_x: DVector<f64>,
    mean_y: DVector<f64>,
    gain: DMatrix<f64>,
}

impl MmseEstimator {
    pub fn new(moments: &JointMoments) -> Result<Self> {
        moments.check_shapes()?;
        let chol = spd_factor(&moments.cov_y, "C_Y")?;
        // gain = C_XY C_Y⁻¹ = (C_Y⁻¹ C_YX)ᵀ
        let gain = chol.solve(&moments.cov_xy.transpose()).transpose();
        Ok(Self {
            mean_x: moments.mean_x.clone(),
            mean_y: moments.mean_y.clone(),
            gain,
        })
    }

    pub fn gain(&self) -> &DMatrix<f64> {
        &self.gain
    }

    pub fn estimate(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        if z.len() != self.mean_y.len() {
            return Err(Error::DimensionMismatch(format!(
                "observation has length {}, expected {}",
                z.len(),
                self.mean_y.len()
            )));
        }
        Ok(&self.mean_x + &self.gain * (z - &self.mean_y))
    }
}

/// `x̂ = m_X + C_XY C_Y⁻¹ (z − m_Y)`.
pub fn mmse_estimate(moments: &JointMoments, z: &DVector<f64>) -> Result<DVector<f64>> {
    MmseEstimator::new(moments)?.estimate(z)
}

/// `C_X − C_XY C_Y⁻¹ C_YX`, symmetrized.
pub fn posterior_cov_direct(moments: &JointMoments) -> Result<DMatrix<f64>> {
    moments.check_shapes()?;
    let chol = spd_factor(&moments.cov_y, "C_Y")?;
    Ok(residual_cov(moments, &chol))
}

pub(crate) fn residual_cov(moments: &JointMoments, cov_y_chol: &Cholesky<f64, Dyn>) -> DMatrix<f64> {
    let solved = cov_y_chol.solve(&moments.cov_xy.transpose());
    symmetrize(&(&moments.cov_x - &moments.cov_xy * solved))
}

/// Scalar MSE of a posterior covariance.
pub fn mse_trace(cov: &DMatrix<f64>) -> f64 {
    linalg::trace(cov)
}
