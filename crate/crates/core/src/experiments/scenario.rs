//! Geometry, path loss and problem construction for one channel realization.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::{PlacementMode, ScenarioConfig, ScenarioKind};
use crate::bayes::SensorNetwork;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::relay::{ChannelLink, DirectLink};

/// Sensors closer than this fraction of the radius to the vertical plane
/// through the center are redrawn; the angle rows blow up there.
const MIN_OFFSET_FRACTION: f64 = 0.1;

/// Path-loss power gain `snr·(λ/(4πd))²`.
pub fn channel_gain(distance: f64, wavelength: f64, snr: f64) -> Result<f64> {
    for (name, v) in [("distance", distance), ("wavelength", wavelength), ("snr", snr)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(snr * (wavelength / (4.0 * PI * distance)).powi(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub sensor_coords: Vec<[f64; 3]>,
    pub relay_coord: [f64; 3],
    pub fc_coord: [f64; 3],
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (Vector3::from(*a) - Vector3::from(*b)).norm()
}

impl Placement {
    pub fn sensor_relay_distances(&self) -> Vec<f64> {
        self.sensor_coords.iter().map(|s| dist(s, &self.relay_coord)).collect()
    }

    pub fn sensor_fc_distances(&self) -> Vec<f64> {
        self.sensor_coords.iter().map(|s| dist(s, &self.fc_coord)).collect()
    }

    pub fn relay_fc_distance(&self) -> f64 {
        dist(&self.relay_coord, &self.fc_coord)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |d: f64| !(d.is_finite() && d > 0.0);
        if let Some(j) = self.sensor_relay_distances().into_iter().position(bad) {
            return Err(Error::Scenario(format!("sensor {j} coincides with the relay")));
        }
        if bad(self.relay_fc_distance()) {
            return Err(Error::Scenario("relay coincides with the fusion center".into()));
        }
        Ok(())
    }
}

/// Center of the sensor sphere: the prior mean in the vector case, the
/// origin for a scalar target.
fn placement_center(cfg: &ScenarioConfig) -> Vector3<f64> {
    match cfg.kind {
        ScenarioKind::Vector => Vector3::new(cfg.prior_mean[0], cfg.prior_mean[1], cfg.prior_mean[2]),
        ScenarioKind::Scalar => Vector3::zeros(),
    }
}

fn draw_sphere_point<R: Rng + ?Sized>(rng: &mut R, center: &Vector3<f64>, radius: f64) -> [f64; 3] {
    loop {
        let v = Vector3::<f64>::from_fn(|_, _| StandardNormal.sample(rng));
        let n = v.norm();
        if n == 0.0 {
            continue;
        }
        let u = v / n;
        if u.x.abs() < MIN_OFFSET_FRACTION {
            continue;
        }
        return (center + u * radius).into();
    }
}

/// Sensor positions on the placement sphere with relay and fusion center
/// on the +x axis at the two-hop and one-hop distances.
pub fn draw_layout<R: Rng + ?Sized>(rng: &mut R, cfg: &ScenarioConfig) -> Placement {
    let c = placement_center(cfg);
    let sensor_coords = (0..cfg.sensor_count).map(|_| draw_sphere_point(rng, &c, cfg.placement_radius)).collect();
    Placement {
        sensor_coords,
        relay_coord: (c + Vector3::x() * cfg.two_hop_distance).into(),
        fc_coord: (c + Vector3::x() * cfg.one_hop_distance).into(),
    }
}

/// Placement for one realization. In permutation mode `base` is the fixed
/// layout and only its assignment to channel indices is randomized.
pub fn place_sensors<R: Rng + ?Sized>(rng: &mut R, cfg: &ScenarioConfig, base: Option<&Placement>) -> Placement {
    match (cfg.placement, base) {
        (PlacementMode::Permutation, Some(base)) => {
            let mut p = base.clone();
            p.sensor_coords.shuffle(rng);
            p
        }
        (PlacementMode::Permutation, None) => {
            let mut p = draw_layout(rng, cfg);
            p.sensor_coords.shuffle(rng);
            p
        }
        (PlacementMode::Resample, _) => draw_layout(rng, cfg),
    }
}

/// Relay and direct link gains per physical sensor, before any fading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkGains {
    pub h_sr: Vec<f64>,
    pub h_rd: Vec<f64>,
    pub h_direct: Vec<f64>,
}

pub fn link_gains(cfg: &ScenarioConfig, placement: &Placement) -> Result<LinkGains> {
    placement.validate()?;
    let g = |d: f64| channel_gain(d, cfg.wavelength, cfg.snr);
    let h_rd = g(placement.relay_fc_distance())?;
    Ok(LinkGains {
        h_sr: placement.sensor_relay_distances().into_iter().map(g).collect::<Result<_>>()?,
        h_rd: vec![h_rd; placement.sensor_coords.len()],
        h_direct: placement.sensor_fc_distances().into_iter().map(g).collect::<Result<_>>()?,
    })
}

/// Scales every gain by an independent unit-mean exponential factor.
pub fn apply_fading<R: Rng + ?Sized>(rng: &mut R, gains: &mut LinkGains) {
    for h in gains.h_sr.iter_mut().chain(gains.h_rd.iter_mut()).chain(gains.h_direct.iter_mut()) {
        let f: f64 = Exp1.sample(rng);
        *h *= f;
    }
}

/// Range, azimuth-ratio and elevation-ratio of `x` seen from `s`.
pub fn measurement(x: &[f64; 3], s: &[f64; 3]) -> [f64; 3] {
    let d = [x[0] - s[0], x[1] - s[1], x[2] - s[2]];
    let horiz = d[0].hypot(d[1]);
    [(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt(), d[1] / d[0], d[2] / horiz]
}

/// Analytic Jacobian of [`measurement`] with respect to `x`, rows in the
/// same order.
pub fn measurement_jacobian(x: &[f64; 3], s: &[f64; 3], sensor: usize) -> Result<[[f64; 3]; 3]> {
    let d = [x[0] - s[0], x[1] - s[1], x[2] - s[2]];
    let range = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let horiz2 = d[0] * d[0] + d[1] * d[1];
    let horiz = horiz2.sqrt();
    let scale = 1e-12 * (1.0 + x.iter().chain(s).fold(0.0f64, |m, v| m.max(v.abs())));
    if range <= scale {
        return Err(Error::Scenario(format!("sensor {sensor} coincides with the target mean (zero range)")));
    }
    if d[0].abs() <= scale || horiz <= scale {
        return Err(Error::Scenario(format!("sensor {sensor} has zero horizontal offset from the target mean")));
    }
    let h3 = horiz2 * horiz;
    Ok([
        [d[0] / range, d[1] / range, d[2] / range],
        [-d[1] / (d[0] * d[0]), 1.0 / d[0], 0.0],
        [-d[2] * d[0] / h3, -d[2] * d[1] / h3, 1.0 / horiz],
    ])
}

fn build_links(cfg: &ScenarioConfig, gains: &LinkGains, per_sensor: usize) -> Result<(Vec<ChannelLink>, Vec<DirectLink>)> {
    let mut links = Vec::new();
    let mut direct = Vec::new();
    for j in 0..gains.h_sr.len() {
        let link = ChannelLink::new(gains.h_sr[j], gains.h_rd[j], cfg.relay_noise, cfg.fc_noise)?;
        let d = DirectLink::new(gains.h_direct[j], cfg.fc_noise)?;
        for _ in 0..per_sensor {
            links.push(link);
            direct.push(d);
        }
    }
    Ok((links, direct))
}

pub fn build_scalar_scenario(cfg: &ScenarioConfig, gains: &LinkGains) -> Result<Problem> {
    if cfg.kind != ScenarioKind::Scalar {
        return Err(Error::Scenario("scalar builder needs kind = scalar".into()));
    }
    if gains.h_sr.len() != cfg.gains.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} channel gains for {} link sets",
            cfg.gains.len(),
            gains.h_sr.len()
        )));
    }
    let m = cfg.gains.len();
    let g = DMatrix::from_column_slice(m, 1, &cfg.gains);
    let network = SensorNetwork::new(g, DMatrix::identity(m, m) * cfg.observation_noise)?;
    let (links, direct) = build_links(cfg, gains, 1)?;
    Problem::new(cfg.prior()?, network, links, direct)
}

/// Stacks each sensor's linearized measurement rows at the prior mean;
/// every row is its own channel and shares its sensor's links.
pub fn build_vector_scenario(cfg: &ScenarioConfig, placement: &Placement, gains: &LinkGains) -> Result<Problem> {
    if cfg.kind != ScenarioKind::Vector {
        return Err(Error::Scenario("vector builder needs kind = vector".into()));
    }
    let prior = cfg.prior()?;
    let x = [prior.mean[0], prior.mean[1], prior.mean[2]];
    let m = placement.sensor_coords.len();
    let mut g = DMatrix::zeros(3 * m, 3);
    for (j, s) in placement.sensor_coords.iter().enumerate() {
        let jac = measurement_jacobian(&x, s, j)?;
        for (r, row) in jac.iter().enumerate() {
            for c in 0..3 {
                g[(3 * j + r, c)] = row[c];
            }
        }
    }
    let network = SensorNetwork::new(g, DMatrix::identity(3 * m, 3 * m) * cfg.observation_noise)?;
    let (links, direct) = build_links(cfg, gains, 3)?;
    Problem::new(prior, network, links, direct)
}

/// Builds the problem for `placement`, applying fading when configured.
pub fn build_problem<R: Rng + ?Sized>(rng: &mut R, cfg: &ScenarioConfig, placement: &Placement) -> Result<Problem> {
    let mut gains = link_gains(cfg, placement)?;
    if cfg.fading {
        apply_fading(rng, &mut gains);
    }
    match cfg.kind {
        ScenarioKind::Scalar => build_scalar_scenario(cfg, &gains),
        ScenarioKind::Vector => build_vector_scenario(cfg, placement, &gains),
    }
}
