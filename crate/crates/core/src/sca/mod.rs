//! Successive convex approximation of the joint sensor/relay power problem.
//!
//! At an expansion point `(α⁽ᵏ⁾, β⁽ᵏ⁾)` the nonconvex objective
//! `f(α, β) = Trace(Ψᵀ (Φ + diag φ(α, β))⁻¹ Ψ)` is bounded above by a
//! separable convex majorant that is tight at the expansion point. The
//! majorant is minimised in closed form (one depressed cubic per channel
//! and a scalar multiplier per budget), which yields a feasible point with
//! a lower objective. Iterating gives a monotone descent sequence.

pub mod cubic;
pub mod dual;
pub mod one_hop;

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relay::{Allocation, Budgets, MseObjective, PhiCoefficients, RelaySpec};

pub use cubic::cubic_positive_root;
pub use dual::{golden_search_relay, golden_search_sensors, DualSolution, SearchSettings};
pub use one_hop::{one_hop_optimize, OneHopOutcome};

/// Relative decrease below which a step counts as stalled.
const STALL_DECREASE: f64 = 1e-14;

/// Coefficients of the per-channel surrogate
/// `a/α + b/β + c/(2α²) + d/(2β²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl MajorantCoeffs {
    pub fn surrogate(&self, alloc: &Allocation) -> f64 {
        (0..self.a.len())
            .map(|j| {
                let (x, y) = (alloc.alpha[j], alloc.beta[j]);
                self.a[j] / x + self.b[j] / y + self.c[j] / (2.0 * x * x) + self.d[j] / (2.0 * y * y)
            })
            .sum()
    }
}

/// One iterate of the SCA loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaState {
    pub iteration: usize,
    pub alloc: Allocation,
    /// `φ_j` at `alloc`.
    pub phi: Vec<f64>,
    /// Diagonal of `Θ` at `alloc`.
    pub rho: Vec<f64>,
    /// `f(alloc)`, the allocation-dependent part of the posterior MSE.
    pub objective: f64,
}

impl ScaState {
    pub fn at(obj: &MseObjective, spec: &RelaySpec, alloc: Allocation, iteration: usize) -> Result<Self> {
        let phi = spec.phis(&alloc);
        let objective = obj.objective(&phi)?;
        let rho = obj.rho(&phi)?;
        Ok(Self { iteration, alloc, phi, rho, objective })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ToleranceMet,
    MaxIterations,
    Stalled,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::ToleranceMet => "tolerance_met",
            StopReason::MaxIterations => "max_iterations",
            StopReason::Stalled => "stalled",
        })
    }
}

/// Record of an optimisation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaTrace {
    pub states: Vec<ScaState>,
    /// `(λ_T, λ_R)` of the step that produced `states[k + 1]`.
    pub duals: Vec<(f64, f64)>,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Objective of a final step that came out higher than its predecessor
    /// by round-off; such a step is dropped from `states`.
    pub rejected_ascent: Option<f64>,
}

impl ScaTrace {
    pub fn objectives(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.objective).collect()
    }

    pub fn iterations(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn last(&self) -> &ScaState {
        self.states.last().expect("trace holds the initial state")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    /// Equal transmit power per sensor and equal relay power per channel.
    Uniform,
    Custom(Allocation),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScaOptions {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub bisection_tolerance: f64,
    pub max_bisection_steps: usize,
    pub floor: f64,
    pub initialization: Initialization,
}

impl Default for ScaOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_iterations: 200,
            bisection_tolerance: 1e-13,
            max_bisection_steps: 200,
            floor: 1e-12,
            initialization: Initialization::Uniform,
        }
    }
}

impl ScaOptions {
    pub fn search_settings(&self) -> SearchSettings {
        SearchSettings {
            rel_tol: self.bisection_tolerance,
            max_bisection: self.max_bisection_steps,
            floor: self.floor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon must be nonnegative, got {}", self.epsilon)));
        }
        if !(self.bisection_tolerance > 0.0 && self.bisection_tolerance < 1.0) {
            return Err(Error::InvalidInput("bisection tolerance must lie in (0, 1)".into()));
        }
        if !(self.floor > 0.0 && self.floor.is_finite()) {
            return Err(Error::InvalidInput("positivity floor must be positive".into()));
        }
        Ok(())
    }
}

/// Diagonal of `Θ` for given `Ψ`, `Φ` and `φ`.
pub fn rho_weights(psi: &DMatrix<f64>, phi: &DMatrix<f64>, phis: &[f64]) -> Result<Vec<f64>> {
    if phis.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidInput("φ values must be nonnegative".into()));
    }
    MseObjective::from_parts(psi.clone(), phi.clone())?.rho(phis)
}

fn check_positive(alloc: &Allocation, what: &str) -> Result<()> {
    if !alloc.is_strictly_positive() {
        return Err(Error::InvalidInput(format!("{what} must be strictly positive")));
    }
    Ok(())
}

/// Convex majorant of `f` expanded at `state`, evaluated at `alloc`.
pub fn majorant_eval(state: &ScaState, alloc: &Allocation, coeffs: &[PhiCoefficients]) -> Result<f64> {
    check_positive(alloc, "majorant argument")?;
    check_positive(&state.alloc, "expansion point")?;
    let mut total = state.objective;
    for (j, c) in coeffs.iter().enumerate() {
        let rho = state.rho[j];
        if rho == 0.0 {
            continue;
        }
        let (x, y) = (alloc.alpha[j], alloc.beta[j]);
        let (xk, yk) = (state.alloc.alpha[j], state.alloc.beta[j]);
        let bound = c.r / (c.p * x)
            + c.q / (c.p * y)
            + c.sigma / (2.0 * c.p) * (xk / (yk * x * x) + yk / (xk * y * y));
        total += rho * (bound - 1.0 / state.phi[j]);
    }
    Ok(total)
}

/// Surrogate coefficients at the expansion point.
pub fn majorant_coeffs(state: &ScaState, coeffs: &[PhiCoefficients]) -> Result<MajorantCoeffs> {
    check_positive(&state.alloc, "expansion point")?;
    let m = coeffs.len();
    let mut out = MajorantCoeffs { a: vec![0.0; m], b: vec![0.0; m], c: vec![0.0; m], d: vec![0.0; m] };
    for (j, k) in coeffs.iter().enumerate() {
        let rho = state.rho[j];
        let (xk, yk) = (state.alloc.alpha[j], state.alloc.beta[j]);
        out.a[j] = rho * k.r / k.p;
        out.b[j] = rho * k.q / k.p;
        out.c[j] = rho * k.sigma * xk / (k.p * yk);
        out.d[j] = rho * k.sigma * yk / (k.p * xk);
    }
    Ok(out)
}

/// The same majorant written through its surrogate coefficients.
pub fn majorant_from_coeffs(state: &ScaState, k: &MajorantCoeffs, alloc: &Allocation) -> f64 {
    let offset: f64 = state
        .rho
        .iter()
        .zip(&state.phi)
        .filter(|(&r, _)| r != 0.0)
        .map(|(r, p)| r / p)
        .sum();
    state.objective + k.surrogate(alloc) - offset
}

/// Equal per-sensor transmit power `P_T / M` and equal relay power `P_R / M`.
pub fn uniform_allocation(channel_powers: &[f64], budgets: &Budgets) -> Allocation {
    let m = channel_powers.len() as f64;
    Allocation {
        alpha: channel_powers.iter().map(|w| budgets.p_t / (m * w)).collect(),
        beta: vec![budgets.p_r / m; channel_powers.len()],
    }
}

/// Output of one majorant minimisation.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub state: ScaState,
    pub sensors: DualSolution,
    pub relay: DualSolution,
}

pub fn sca_step(obj: &MseObjective, spec: &RelaySpec, budgets: &Budgets, state: &ScaState, opts: &ScaOptions) -> Result<StepOutput> {
    let coeffs = spec.phi_coefficients();
    let k = majorant_coeffs(state, &coeffs)?;
    let settings = opts.search_settings();
    let sensors = golden_search_sensors(&k, &spec.channel_powers, budgets.p_t, settings)?;
    let relay = golden_search_relay(&k, budgets.p_r, settings)?;
    let alloc = Allocation {
        alpha: sensors.values.iter().map(|v| v.max(opts.floor)).collect(),
        beta: relay.values.iter().map(|v| v.max(opts.floor)).collect(),
    };
    let state = ScaState::at(obj, spec, alloc, state.iteration + 1)?;
    if !state.objective.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite objective after step: {}",
            serde_json::to_string(&state).unwrap_or_default()
        )));
    }
    Ok(StepOutput { state, sensors, relay })
}

#[derive(Debug, Clone)]
pub struct ScaOutcome {
    pub alloc: Allocation,
    pub trace: ScaTrace,
}

impl ScaOutcome {
    pub fn objective(&self) -> f64 {
        self.trace.last().objective
    }
}

/// Iterates majorant minimisations from a feasible start until the
/// relative objective decrease drops to `opts.epsilon`.
pub fn optimize(obj: &MseObjective, spec: &RelaySpec, budgets: &Budgets, opts: &ScaOptions) -> Result<ScaOutcome> {
    opts.validate()?;
    if obj.channel_count() != spec.channel_count() {
        return Err(Error::DimensionMismatch("objective and relay spec disagree on M".into()));
    }
    let init = match &opts.initialization {
        Initialization::Uniform => uniform_allocation(&spec.channel_powers, budgets),
        Initialization::Custom(a) => {
            if a.len() != spec.channel_count() || !a.is_strictly_positive() || !a.is_feasible(&spec.channel_powers, budgets, 1e-9) {
                return Err(Error::InvalidInput("initial allocation must be strictly positive and feasible".into()));
            }
            a.clone()
        }
    };
    let first = ScaState::at(obj, spec, init, 0)?;
    if !first.objective.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite objective at initialization: {}",
            serde_json::to_string(&first).unwrap_or_default()
        )));
    }

    let mut trace = ScaTrace {
        states: vec![first],
        duals: Vec::new(),
        converged: false,
        stop_reason: StopReason::MaxIterations,
        rejected_ascent: None,
    };
    if trace.last().objective == 0.0 {
        // nothing to estimate beyond the residual
        trace.converged = true;
        trace.stop_reason = StopReason::ToleranceMet;
        let alloc = trace.last().alloc.clone();
        return Ok(ScaOutcome { alloc, trace });
    }

    let mut stalls = 0;
    for _ in 0..opts.max_iterations {
        let current = trace.last();
        let prev = current.objective;
        let step = sca_step(obj, spec, budgets, current, opts)?;
        let next = step.state.objective;
        let decrease = (prev - next) / prev;

        if next > prev {
            trace.rejected_ascent = Some(next);
            trace.converged = true;
            trace.stop_reason = StopReason::ToleranceMet;
            break;
        }
        trace.duals.push((step.sensors.lambda, step.relay.lambda));
        trace.states.push(step.state);

        if decrease < STALL_DECREASE {
            stalls += 1;
            if stalls >= 2 {
                trace.converged = true;
                trace.stop_reason = StopReason::Stalled;
                break;
            }
        } else {
            stalls = 0;
        }
        if decrease <= opts.epsilon {
            trace.converged = true;
            trace.stop_reason = StopReason::ToleranceMet;
            break;
        }
    }
    let alloc = trace.last().alloc.clone();
    Ok(ScaOutcome { alloc, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{self, observation_moments, GaussianBelief, SensorNetwork};
    use crate::relay::ChannelLink;
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_problem(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (MseObjective, RelaySpec) {
        let a = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
        let cov = (&a * a.transpose() + DMatrix::identity(n, n) * 0.1 + (&a * a.transpose()).transpose()) * 0.5;
        let mean = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let g = DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(rng));
        let moments = observation_moments(
            &GaussianBelief::new(mean, cov).unwrap(),
            &SensorNetwork::with_unit_noise(g).unwrap(),
        )
        .unwrap();
        let links = (0..m)
            .map(|_| ChannelLink::unit_noise(10f64.powf(rng.random_range(-0.5..1.5)), 10f64.powf(rng.random_range(-0.5..1.5))).unwrap())
            .collect();
        let spec = RelaySpec::new(links, bayes::channel_powers(&moments)).unwrap();
        (MseObjective::new(&moments).unwrap(), spec)
    }

    fn scalar_state() -> ScaState {
        ScaState {
            iteration: 0,
            alloc: Allocation { alpha: vec![2.0], beta: vec![1.0] },
            phi: vec![1.0],
            rho: vec![0.25],
            objective: 0.3,
        }
    }

    #[test]
    fn rho_examples() {
        let one = DMatrix::from_element(1, 1, 1.0);
        assert_relative_eq!(rho_weights(&one, &one, &[1.0]).unwrap()[0], 0.25);
        let psi = DMatrix::from_row_slice(2, 1, &[0.3, -0.7]);
        let phi = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 2.0]);
        assert_eq!(rho_weights(&psi, &phi, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn rho_matches_dense_triple_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (obj, spec) = random_problem(&mut rng, 2, 3);
        let phis = spec.phis(&uniform_allocation(&spec.channel_powers, &Budgets::new(1.0, 5.0).unwrap()));
        let d = crate::linalg::diag(&phis);
        let inv = (obj.phi() + &d).try_inverse().unwrap();
        let theta = &d * &inv * obj.psi() * obj.psi().transpose() * &inv * &d;
        let rho = rho_weights(obj.psi(), obj.phi(), &phis).unwrap();
        for j in 0..3 {
            assert_relative_eq!(rho[j], theta[(j, j)], max_relative = 1e-12);
        }
    }

    #[test]
    fn coefficient_examples() {
        let ones = [PhiCoefficients { p: 1.0, q: 1.0, r: 1.0, sigma: 1.0 }];
        let st = ScaState { alloc: Allocation { alpha: vec![1.0], beta: vec![1.0] }, rho: vec![1.0], ..scalar_state() };
        let k = majorant_coeffs(&st, &ones).unwrap();
        assert_eq!((k.a[0], k.b[0], k.c[0], k.d[0]), (1.0, 1.0, 1.0, 1.0));

        let c = [PhiCoefficients { p: 6.0, q: 4.0, r: 3.0, sigma: 1.0 }];
        let k = majorant_coeffs(&scalar_state(), &c).unwrap();
        assert_relative_eq!(k.a[0], 0.125);
        assert_relative_eq!(k.b[0], 1.0 / 6.0);
        assert_relative_eq!(k.c[0], 1.0 / 12.0);
        assert_relative_eq!(k.d[0], 1.0 / 48.0);

        let zero = ScaState { rho: vec![0.0], ..scalar_state() };
        let k = majorant_coeffs(&zero, &c).unwrap();
        assert_eq!((k.a[0], k.b[0], k.c[0], k.d[0]), (0.0, 0.0, 0.0, 0.0));

        let bad = ScaState { alloc: Allocation { alpha: vec![0.0], beta: vec![1.0] }, ..scalar_state() };
        assert!(majorant_coeffs(&bad, &c).is_err());
    }

    #[test]
    fn majorant_tight_and_dominating() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (obj, spec) = random_problem(&mut rng, 2, 4);
        let budgets = Budgets::new(0.8, 5.0).unwrap();
        let coeffs = spec.phi_coefficients();
        let state = ScaState::at(&obj, &spec, uniform_allocation(&spec.channel_powers, &budgets), 0).unwrap();
        let at = majorant_eval(&state, &state.alloc, &coeffs).unwrap();
        assert_relative_eq!(at, state.objective, max_relative = 1e-12);
        let k = majorant_coeffs(&state, &coeffs).unwrap();
        assert_relative_eq!(majorant_from_coeffs(&state, &k, &state.alloc), state.objective, max_relative = 1e-12);
        for _ in 0..500 {
            let alloc = Allocation {
                alpha: (0..4).map(|_| rng.random_range(1e-3..1.0)).collect(),
                beta: (0..4).map(|_| rng.random_range(1e-3..3.0)).collect(),
            };
            let maj = majorant_eval(&state, &alloc, &coeffs).unwrap();
            let truth = obj.objective(&spec.phis(&alloc)).unwrap();
            assert!(maj - truth >= -1e-10 * truth.abs().max(1.0), "{maj} < {truth}");
            assert_relative_eq!(majorant_from_coeffs(&state, &k, &alloc), maj, max_relative = 1e-10);
        }
        let degenerate = ScaState { rho: vec![0.0; 4], ..state.clone() };
        let alloc = Allocation { alpha: vec![0.3; 4], beta: vec![0.1; 4] };
        assert_eq!(majorant_eval(&degenerate, &alloc, &coeffs).unwrap(), state.objective);
    }

    #[test]
    fn step_descends_and_saturates_budgets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let opts = ScaOptions::default();
        for _ in 0..200 {
            let (obj, spec) = random_problem(&mut rng, 1, 2);
            let budgets = Budgets::new(rng.random_range(0.1..2.0), rng.random_range(1.0..8.0)).unwrap();
            let state = ScaState::at(&obj, &spec, uniform_allocation(&spec.channel_powers, &budgets), 0).unwrap();
            let out = sca_step(&obj, &spec, &budgets, &state, &opts).unwrap();
            assert!(out.state.objective <= state.objective);
            assert_relative_eq!(out.state.alloc.sensor_power(&spec.channel_powers), budgets.p_t, max_relative = 1e-8);
            assert_relative_eq!(out.state.alloc.relay_power(), budgets.p_r, max_relative = 1e-8);
        }
    }

    #[test]
    fn single_channel_saturates_both_budgets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (obj, spec) = random_problem(&mut rng, 1, 1);
        let budgets = Budgets::new(0.6, 5.0).unwrap();
        let out = optimize(&obj, &spec, &budgets, &ScaOptions::default()).unwrap();
        assert!(out.trace.iterations() <= 2);
        assert_relative_eq!(out.alloc.alpha[0], 0.6 / spec.channel_powers[0], max_relative = 1e-12);
        assert_relative_eq!(out.alloc.beta[0], 5.0, max_relative = 1e-12);
    }

    #[test]
    fn symmetric_channels_stay_symmetric() {
        let g = DMatrix::from_element(4, 1, 1.3);
        let moments = observation_moments(
            &GaussianBelief::new(DVector::from_element(1, 1.0), DMatrix::identity(1, 1)).unwrap(),
            &SensorNetwork::with_unit_noise(g).unwrap(),
        )
        .unwrap();
        let spec = RelaySpec::new(vec![ChannelLink::unit_noise(3.0, 2.0).unwrap(); 4], bayes::channel_powers(&moments)).unwrap();
        let obj = MseObjective::new(&moments).unwrap();
        let out = optimize(&obj, &spec, &Budgets::new(0.5, 5.0).unwrap(), &ScaOptions::default()).unwrap();
        for j in 1..4 {
            assert_relative_eq!(out.alloc.alpha[j], out.alloc.alpha[0], max_relative = 1e-6);
            assert_relative_eq!(out.alloc.beta[j], out.alloc.beta[0], max_relative = 1e-6);
        }
    }

    #[test]
    fn converged_point_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (obj, spec) = random_problem(&mut rng, 2, 3);
        let budgets = Budgets::new(0.7, 5.0).unwrap();
        let opts = ScaOptions { epsilon: 0.0, max_iterations: 5000, ..ScaOptions::default() };
        let out = optimize(&obj, &spec, &budgets, &opts).unwrap();
        assert!(out.trace.converged);
        let step = sca_step(&obj, &spec, &budgets, out.trace.last(), &opts).unwrap();
        for j in 0..3 {
            assert_relative_eq!(step.state.alloc.alpha[j], out.alloc.alpha[j], max_relative = 1e-6);
            assert_relative_eq!(step.state.alloc.beta[j], out.alloc.beta[j], max_relative = 1e-6);
        }
        assert_relative_eq!(step.state.objective, out.objective(), max_relative = 1e-12);
    }

    #[test]
    fn trace_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let m = rng.random_range(1..=8);
            let (obj, spec) = random_problem(&mut rng, 2, m);
            let out = optimize(&obj, &spec, &Budgets::new(1.0, 5.0).unwrap(), &ScaOptions::default()).unwrap();
            let f = out.trace.objectives();
            assert!(f.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(out.trace.duals.len(), out.trace.iterations());
        }
    }

    #[test]
    fn permuting_channels_permutes_allocation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 2;
        let m = 4;
        let a = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        let cov = crate::linalg::symmetrize(&(&a * a.transpose() + DMatrix::identity(n, n)));
        let g = DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
        let links: Vec<ChannelLink> = (0..m).map(|j| ChannelLink::unit_noise(1.0 + j as f64, 4.0 - j as f64 * 0.5).unwrap()).collect();
        let perm = [2usize, 0, 3, 1];
        let solve = |g: DMatrix<f64>, links: Vec<ChannelLink>| {
            let moments = observation_moments(
                &GaussianBelief::new(DVector::from_element(n, 0.5), cov.clone()).unwrap(),
                &SensorNetwork::with_unit_noise(g).unwrap(),
            )
            .unwrap();
            let spec = RelaySpec::new(links, bayes::channel_powers(&moments)).unwrap();
            let obj = MseObjective::new(&moments).unwrap();
            optimize(&obj, &spec, &Budgets::new(0.9, 5.0).unwrap(), &ScaOptions::default()).unwrap().alloc
        };
        let base = solve(g.clone(), links.clone());
        let g_perm = DMatrix::from_fn(m, n, |i, k| g[(perm[i], k)]);
        let links_perm: Vec<ChannelLink> = perm.iter().map(|&i| links[i]).collect();
        let permuted = solve(g_perm, links_perm);
        for (i, &src) in perm.iter().enumerate() {
            assert_relative_eq!(permuted.alpha[i], base.alpha[src], max_relative = 1e-9);
            assert_relative_eq!(permuted.beta[i], base.beta[src], max_relative = 1e-9);
        }
    }

    #[test]
    fn custom_initialization_validated() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (obj, spec) = random_problem(&mut rng, 1, 2);
        let budgets = Budgets::new(1.0, 5.0).unwrap();
        let opts = ScaOptions {
            initialization: Initialization::Custom(Allocation { alpha: vec![10.0, 10.0], beta: vec![1.0, 1.0] }),
            ..ScaOptions::default()
        };
        assert!(matches!(optimize(&obj, &spec, &budgets, &opts), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn uniform_examples() {
        let b = Budgets::new(1.0, 5.0).unwrap();
        let u = uniform_allocation(&[2.0; 10], &b);
        assert!(u.alpha.iter().all(|&a| (a - 0.05).abs() < 1e-15));
        assert_relative_eq!(u.sensor_power(&[2.0; 10]), 1.0);
        assert!(u.beta.iter().all(|&v| v == 0.5));
        let single = uniform_allocation(&[4.0], &b);
        assert_eq!(single.alpha, vec![0.25]);
        assert_eq!(single.beta, vec![5.0]);
    }
}
