//! Two-hop amplify-and-forward channel model.
//!
//! Sensor `j` transmits `√(h_jR α_j) y_j` to the relay, which normalises the
//! received signal to power `β_j` and forwards it to the fusion center. The
//! fusion center sees `z = H y + w` with diagonal gain `H` and diagonal
//! noise covariance `C`, and the whole allocation dependence of the
//! posterior collapses into the per-channel factor
//! `φ_j = H(j,j)² / C(j,j) = p α β / (q α + r β + σ)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bayes::{self, JointMoments};
use crate::error::{Error, Result};
use crate::linalg::{self, spd_factor, symmetrize};

/// Per-channel link parameters of the relayed path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelLink {
    /// Sensor→relay power gain `h_jR`.
    pub h_sr: f64,
    /// Relay→fusion-center power gain `h_jD`.
    pub h_rd: f64,
    /// Noise power at the relay `σ_jR`.
    pub sigma_sr: f64,
    /// Noise power at the fusion center `σ_jD`.
    pub sigma_rd: f64,
}

impl ChannelLink {
    pub fn new(h_sr: f64, h_rd: f64, sigma_sr: f64, sigma_rd: f64) -> Result<Self> {
        let link = Self { h_sr, h_rd, sigma_sr, sigma_rd };
        link.validate()?;
        Ok(link)
    }

    /// Link with unit noise powers at relay and fusion center.
    pub fn unit_noise(h_sr: f64, h_rd: f64) -> Result<Self> {
        Self::new(h_sr, h_rd, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("h_sr", self.h_sr),
            ("h_rd", self.h_rd),
            ("sigma_sr", self.sigma_sr),
            ("sigma_rd", self.sigma_rd),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Link data for all channels plus the transmit powers `‖y_j‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaySpec {
    pub links: Vec<ChannelLink>,
    pub channel_powers: Vec<f64>,
}

impl RelaySpec {
    pub fn new(links: Vec<ChannelLink>, channel_powers: Vec<f64>) -> Result<Self> {
        if links.len() != channel_powers.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} links but {} channel powers",
                links.len(),
                channel_powers.len()
            )));
        }
        for l in &links {
            l.validate()?;
        }
        if let Some(bad) = channel_powers.iter().find(|&&p| !(p.is_finite() && p > 0.0)) {
            return Err(Error::InvalidInput(format!("channel powers must be positive, got {bad}")));
        }
        Ok(Self { links, channel_powers })
    }

    pub fn channel_count(&self) -> usize {
        self.links.len()
    }

    pub fn phi_coefficients(&self) -> Vec<PhiCoefficients> {
        self.links
            .iter()
            .zip(&self.channel_powers)
            .map(|(l, &pw)| PhiCoefficients::from_link(l, pw))
            .collect()
    }

    /// `φ_j(α_j, β_j)` for every channel.
    pub fn phis(&self, alloc: &Allocation) -> Vec<f64> {
        self.phi_coefficients()
            .iter()
            .zip(alloc.alpha.iter().zip(&alloc.beta))
            .map(|(c, (&a, &b))| phi_value(a, b, c))
            .collect()
    }
}

/// Coefficients of `φ_j(α, β) = p α β / (q α + r β + σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiCoefficients {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub sigma: f64,
}

impl PhiCoefficients {
    fn from_link(link: &ChannelLink, channel_power: f64) -> Self {
        Self {
            p: link.h_sr * link.h_rd,
            q: link.h_sr * link.sigma_rd * channel_power,
            // relay-noise power σ_jR scales the forwarded noise, hence r = h_jD σ_jR
            r: link.h_rd * link.sigma_sr,
            sigma: link.sigma_rd * link.sigma_sr,
        }
    }
}

pub fn phi_coefficients(link: &ChannelLink, channel_power: f64) -> Result<PhiCoefficients> {
    link.validate()?;
    if !(channel_power.is_finite() && channel_power > 0.0) {
        return Err(Error::InvalidInput(format!(
            "channel power must be positive, got {channel_power}"
        )));
    }
    Ok(PhiCoefficients::from_link(link, channel_power))
}

pub fn phi_value(alpha: f64, beta: f64, c: &PhiCoefficients) -> f64 {
    if alpha <= 0.0 || beta <= 0.0 {
        return 0.0;
    }
    c.p * alpha * beta / (c.q * alpha + c.r * beta + c.sigma)
}

/// Sum-power budgets of the sensors (`P_T`) and of the relay (`P_R`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub p_t: f64,
    pub p_r: f64,
}

impl Budgets {
    pub fn new(p_t: f64, p_r: f64) -> Result<Self> {
        if !(p_t.is_finite() && p_t > 0.0 && p_r.is_finite() && p_r > 0.0) {
            return Err(Error::InvalidInput(format!(
                "budgets must be positive, got P_T={p_t}, P_R={p_r}"
            )));
        }
        Ok(Self { p_t, p_r })
    }
}

/// Sensor scale factors `α` and relay power levels `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Allocation {
    pub fn zeros(m: usize) -> Self {
        Self { alpha: vec![0.0; m], beta: vec![0.0; m] }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `Σ ‖y_j‖² α_j`.
    pub fn sensor_power(&self, channel_powers: &[f64]) -> f64 {
        self.alpha.iter().zip(channel_powers).map(|(a, p)| a * p).sum()
    }

    pub fn relay_power(&self) -> f64 {
        self.beta.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|&v| v >= 0.0 && v.is_finite())
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|&v| v > 0.0 && v.is_finite())
    }

    /// Budget check with a relative slack `rel_tol` on both constraints.
    pub fn is_feasible(&self, channel_powers: &[f64], budgets: &Budgets, rel_tol: f64) -> bool {
        self.alpha.len() == channel_powers.len()
            && self.beta.len() == channel_powers.len()
            && self.is_nonnegative()
            && self.sensor_power(channel_powers) <= budgets.p_t * (1.0 + rel_tol)
            && self.relay_power() <= budgets.p_r * (1.0 + rel_tol)
    }

    fn check_len(&self, m: usize) -> Result<()> {
        if self.alpha.len() != m || self.beta.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "allocation has {}/{} entries, expected {m}",
                self.alpha.len(),
                self.beta.len()
            )));
        }
        if !self.is_nonnegative() {
            return Err(Error::InvalidInput("allocation entries must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Diagonal `H_{α,β}`.
pub fn effective_gain(spec: &RelaySpec, alloc: &Allocation) -> Result<DMatrix<f64>> {
    alloc.check_len(spec.channel_count())?;
    let entries: Vec<f64> = spec
        .links
        .iter()
        .zip(&spec.channel_powers)
        .zip(alloc.alpha.iter().zip(&alloc.beta))
        .map(|((l, &pw), (&a, &b))| {
            (l.h_rd * l.h_sr * b * a / (l.h_sr * pw * a + l.sigma_sr)).sqrt()
        })
        .collect();
    Ok(linalg::diag(&entries))
}

/// Diagonal `C_{α,β}`: forwarded relay noise plus fusion-center noise.
pub fn total_noise_cov(spec: &RelaySpec, alloc: &Allocation) -> Result<DMatrix<f64>> {
    alloc.check_len(spec.channel_count())?;
    let entries: Vec<f64> = spec
        .links
        .iter()
        .zip(&spec.channel_powers)
        .zip(alloc.alpha.iter().zip(&alloc.beta))
        .map(|((l, &pw), (&a, &b))| {
            l.h_rd * b * l.sigma_sr / (l.h_sr * pw * a + l.sigma_sr) + l.sigma_rd
        })
        .collect();
    Ok(linalg::diag(&entries))
}

/// Joint moments of `(X, Z)` where `Z = H Y + W` is what the fusion center
/// receives under `alloc`.
pub fn relayed_moments(moments: &JointMoments, spec: &RelaySpec, alloc: &Allocation) -> Result<JointMoments> {
    moments.check_shapes()?;
    if moments.channel_count() != spec.channel_count() {
        return Err(Error::DimensionMismatch(format!(
            "moments have {} channels, relay spec has {}",
            moments.channel_count(),
            spec.channel_count()
        )));
    }
    let h = effective_gain(spec, alloc)?;
    let noise = total_noise_cov(spec, alloc)?;
    Ok(JointMoments {
        mean_x: moments.mean_x.clone(),
        mean_y: &h * &moments.mean_y,
        cov_x: moments.cov_x.clone(),
        cov_y: symmetrize(&(&h * &moments.cov_y * &h + noise)),
        cov_xy: &moments.cov_xy * &h,
    })
}

/// Posterior covariance given the fusion-center output, computed directly
/// from `H` and `C` (no φ reparametrisation).
pub fn posterior_cov_relay_direct(moments: &JointMoments, spec: &RelaySpec, alloc: &Allocation) -> Result<DMatrix<f64>> {
    let relayed = relayed_moments(moments, spec, alloc)?;
    bayes::posterior_cov_direct(&relayed)
}

/// `Ψ = C_Y⁻¹ C_YX` (M×N) and `Φ = C_Y⁻¹` (M×M).
pub fn psi_phi(moments: &JointMoments) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    moments.check_shapes()?;
    let chol = spd_factor(&moments.cov_y, "C_Y")?;
    let psi = chol.solve(&moments.cov_xy.transpose());
    let phi = symmetrize(&chol.inverse());
    Ok((psi, phi))
}

/// The allocation-dependent part of the posterior MSE,
/// `f(φ) = Trace(Ψᵀ (Φ + diag φ)⁻¹ Ψ)`, plus the constant residual
/// `C_X − C_XY C_Y⁻¹ C_YX` that completes the posterior covariance.
#[derive(Debug, Clone)]
pub struct MseObjective {
    psi: DMatrix<f64>,
    phi: DMatrix<f64>,
    residual: DMatrix<f64>,
    residual_trace: f64,
}

impl MseObjective {
    pub fn new(moments: &JointMoments) -> Result<Self> {
        moments.check_shapes()?;
        let chol = spd_factor(&moments.cov_y, "C_Y")?;
        let psi = chol.solve(&moments.cov_xy.transpose());
        let phi = symmetrize(&chol.inverse());
        let residual = bayes::residual_cov(moments, &chol);
        let residual_trace = linalg::trace(&residual);
        Ok(Self { psi, phi, residual, residual_trace })
    }

    pub fn from_parts(psi: DMatrix<f64>, phi: DMatrix<f64>) -> Result<Self> {
        if phi.nrows() != psi.nrows() || !phi.is_square() {
            return Err(Error::DimensionMismatch("Ψ and Φ disagree on M".into()));
        }
        let n = psi.ncols();
        Ok(Self { psi, phi, residual: DMatrix::zeros(n, n), residual_trace: 0.0 })
    }

    pub fn channel_count(&self) -> usize {
        self.phi.nrows()
    }

    pub fn psi(&self) -> &DMatrix<f64> {
        &self.psi
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    /// Trace of the full-observation posterior, the floor of any allocation.
    pub fn residual_trace(&self) -> f64 {
        self.residual_trace
    }

    /// `(Φ + diag φ)⁻¹ Ψ`.
    fn weighted_psi(&self, phis: &[f64]) -> Result<DMatrix<f64>> {
        if phis.len() != self.channel_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} φ values for {} channels",
                phis.len(),
                self.channel_count()
            )));
        }
        let mut a = self.phi.clone();
        for (j, &v) in phis.iter().enumerate() {
            a[(j, j)] += v;
        }
        let chol = spd_factor(&a, "Φ + diag(φ)")?;
        Ok(chol.solve(&self.psi))
    }

    pub fn objective(&self, phis: &[f64]) -> Result<f64> {
        let v = self.weighted_psi(phis)?;
        Ok(self.psi.component_mul(&v).sum())
    }

    /// Posterior covariance `residual + Ψᵀ (Φ + diag φ)⁻¹ Ψ`.
    pub fn posterior_cov(&self, phis: &[f64]) -> Result<DMatrix<f64>> {
        let v = self.weighted_psi(phis)?;
        Ok(symmetrize(&(&self.residual + self.psi.transpose() * v)))
    }

    pub fn posterior_trace(&self, phis: &[f64]) -> Result<f64> {
        Ok(self.residual_trace + self.objective(phis)?)
    }

    /// Diagonal of `Θ = diag φ (Φ + diag φ)⁻¹ Ψ Ψᵀ (Φ + diag φ)⁻¹ diag φ`.
    ///
    /// `ρ_j` is also `∂f/∂(1/φ_j)`.
    pub fn rho(&self, phis: &[f64]) -> Result<Vec<f64>> {
        let v = self.weighted_psi(phis)?;
        Ok(phis
            .iter()
            .enumerate()
            .map(|(j, &p)| p * p * v.row(j).norm_squared())
            .collect())
    }

    /// `∂f/∂φ_j = −‖row_j((Φ + diag φ)⁻¹ Ψ)‖²`.
    pub fn phi_gradient(&self, phis: &[f64]) -> Result<Vec<f64>> {
        let v = self.weighted_psi(phis)?;
        Ok((0..phis.len()).map(|j| -v.row(j).norm_squared()).collect())
    }
}

/// Posterior MSE trace and covariance under `alloc`, via the φ form.
pub fn posterior_mse(moments: &JointMoments, spec: &RelaySpec, alloc: &Allocation) -> Result<(f64, DMatrix<f64>)> {
    alloc.check_len(spec.channel_count())?;
    let obj = MseObjective::new(moments)?;
    let cov = obj.posterior_cov(&spec.phis(alloc))?;
    Ok((linalg::trace(&cov), cov))
}

/// Gradient of the allocation-dependent objective with respect to
/// `(α, β)`, returned as `(∂f/∂α, ∂f/∂β)`.
pub fn objective_gradient(obj: &MseObjective, spec: &RelaySpec, alloc: &Allocation) -> Result<(Vec<f64>, Vec<f64>)> {
    alloc.check_len(spec.channel_count())?;
    let dphi = obj.phi_gradient(&spec.phis(alloc))?;
    let coeffs = spec.phi_coefficients();
    let mut ga = Vec::with_capacity(dphi.len());
    let mut gb = Vec::with_capacity(dphi.len());
    for (j, c) in coeffs.iter().enumerate() {
        let (a, b) = (alloc.alpha[j], alloc.beta[j]);
        let den = c.q * a + c.r * b + c.sigma;
        ga.push(dphi[j] * c.p * b * (c.r * b + c.sigma) / (den * den));
        gb.push(dphi[j] * c.p * a * (c.q * a + c.sigma) / (den * den));
    }
    Ok((ga, gb))
}

/// Direct sensor→fusion-center link used by the one-hop baseline, with
/// `φ_j = h_j α_j / σ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectLink {
    pub gain: f64,
    pub noise: f64,
}

impl DirectLink {
    pub fn new(gain: f64, noise: f64) -> Result<Self> {
        if !(gain.is_finite() && gain > 0.0 && noise.is_finite() && noise > 0.0) {
            return Err(Error::InvalidInput(format!(
                "direct link needs positive gain and noise, got {gain}, {noise}"
            )));
        }
        Ok(Self { gain, noise })
    }

    pub fn phi(&self, alpha: f64) -> f64 {
        if alpha <= 0.0 {
            0.0
        } else {
            self.gain * alpha / self.noise
        }
    }
}

/// One-hop posterior MSE trace for sensor scale factors `alpha`.
pub fn one_hop_mse(obj: &MseObjective, links: &[DirectLink], alpha: &[f64]) -> Result<f64> {
    if links.len() != alpha.len() {
        return Err(Error::DimensionMismatch("one-hop links vs alpha".into()));
    }
    let phis: Vec<f64> = links.iter().zip(alpha).map(|(l, &a)| l.phi(a)).collect();
    obj.posterior_trace(&phis)
}
