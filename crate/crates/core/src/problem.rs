//! Everything an allocation method needs about one channel realization.

use serde::{Deserialize, Serialize};

use crate::bayes::{self, GaussianBelief, JointMoments, SensorNetwork};
use crate::error::{Error, Result};
use crate::relay::{ChannelLink, DirectLink, MseObjective, RelaySpec};

/// Target prior, sensor network, and both the relayed and the direct
/// links for a single realization.
#[derive(Debug, Clone)]
pub struct Problem {
    pub prior: GaussianBelief,
    pub network: SensorNetwork,
    pub moments: JointMoments,
    pub objective: MseObjective,
    pub relay: RelaySpec,
    /// Sensor→fusion-center links for the one-hop baseline.
    pub direct: Vec<DirectLink>,
}

impl Problem {
    pub fn new(prior: GaussianBelief, network: SensorNetwork, links: Vec<ChannelLink>, direct: Vec<DirectLink>) -> Result<Self> {
        let moments = bayes::observation_moments(&prior, &network)?;
        let m = network.channel_count();
        if links.len() != m || direct.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{m} channels but {} relay links and {} direct links",
                links.len(),
                direct.len()
            )));
        }
        let relay = RelaySpec::new(links, bayes::channel_powers(&moments))?;
        let objective = MseObjective::new(&moments)?;
        Ok(Self { prior, network, moments, objective, relay, direct })
    }

    pub fn channel_count(&self) -> usize {
        self.relay.channel_count()
    }

    pub fn channel_powers(&self) -> &[f64] {
        &self.relay.channel_powers
    }

    pub fn prior_trace(&self) -> f64 {
        bayes::mse_trace(&self.prior.cov)
    }

    pub fn summary(&self) -> ProblemSummary {
        ProblemSummary {
            target_dim: self.prior.dim(),
            channels: self.channel_count(),
            channel_powers: self.relay.channel_powers.clone(),
            links: self.relay.links.clone(),
            direct: self.direct.clone(),
            cov_y_condition: self.moments.cov_y_condition(),
        }
    }
}

/// Serializable snapshot used in diagnostics and replay records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub target_dim: usize,
    pub channels: usize,
    pub channel_powers: Vec<f64>,
    pub links: Vec<ChannelLink>,
    pub direct: Vec<DirectLink>,
    pub cov_y_condition: f64,
}
