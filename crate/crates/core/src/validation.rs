//! Oracle-backed self checks run by `relaypower validate`.
//!
//! Each check draws seeded random instances, compares the production path
//! against an independent reference and reports the first violating
//! instance in a replayable JSON form.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bayes::{self, mse_trace, observation_moments, GaussianBelief, JointMoments, SensorNetwork};
use crate::error::Result;
use crate::experiments::{simulate_realization, ScenarioConfig, ScenarioKind};
use crate::experiments::sweep::{base_layout, trial_problem};
use crate::linalg::symmetrize;
use crate::oracle::{grid_search_mse, GridSpec};
use crate::relay::{posterior_cov_relay_direct, posterior_mse, Allocation, Budgets, ChannelLink, MseObjective, PhiCoefficients, RelaySpec};
use crate::sca::cubic::scaled_residual;
use crate::sca::{self, cubic_positive_root, golden_search_relay, golden_search_sensors, majorant_coeffs, majorant_from_coeffs, MajorantCoeffs, ScaOptions, ScaState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    pub detail: String,
    /// First violating instance, serialized for replay.
    pub failure: Option<Value>,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<24} {:>7}  {}", self.name, self.instances, self.detail)
    }
}

/// Source of majorant coefficients for the dominance check; swapped out
/// by tests to confirm a corrupted bound is caught.
pub type CoeffFn = fn(&ScaState, &[PhiCoefficients]) -> Result<MajorantCoeffs>;

pub struct Suite {
    pub scale: Scale,
    pub seed: u64,
    pub coeff_fn: CoeffFn,
}

struct Sizes {
    form: usize,
    states: usize,
    perturbations: usize,
    cubics: usize,
    searches: usize,
    descents: usize,
    scenarios: usize,
    samples: usize,
    grid_instances: usize,
}

impl Suite {
    pub fn new(scale: Scale, seed: u64) -> Self {
        Self { scale, seed, coeff_fn: majorant_coeffs }
    }

    fn sizes(&self) -> Sizes {
        match self.scale {
            Scale::Quick => Sizes {
                form: 20,
                states: 5,
                perturbations: 200,
                cubics: 1_000,
                searches: 100,
                descents: 30,
                scenarios: 3,
                samples: 20_000,
                grid_instances: 0,
            },
            Scale::Full => Sizes {
                form: 100,
                states: 20,
                perturbations: 1_000,
                cubics: 10_000,
                searches: 1_000,
                descents: 1_000,
                scenarios: 10,
                samples: 100_000,
                grid_instances: 50,
            },
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(salt);
        rng
    }

    pub fn run(&self) -> Vec<CheckOutcome> {
        let mut out = vec![
            self.form_equivalence(),
            self.majorant_dominance(),
            self.cubic_residuals(),
            self.golden_search_budget(),
            self.descent(),
            self.empirical_vs_analytic(),
        ];
        if self.scale == Scale::Full {
            out.push(self.grid_agreement());
        }
        out
    }

    pub fn form_equivalence(&self) -> CheckOutcome {
        let n_inst = self.sizes().form;
        let mut rng = self.rng(1);
        let mut worst = 0.0f64;
        for i in 0..n_inst {
            let n = rng.random_range(1..=4);
            let m = rng.random_range(1..=6);
            let (mom, spec) = random_instance(&mut rng, n, m);
            let alloc = random_allocation(&mut rng, &spec.channel_powers, &Budgets { p_t: 1.0, p_r: 5.0 });
            let r = (|| -> Result<f64> {
                let direct = mse_trace(&posterior_cov_relay_direct(&mom, &spec, &alloc)?);
                let phi_form = MseObjective::new(&mom)?.posterior_trace(&spec.phis(&alloc))?;
                Ok((direct - phi_form).abs() / direct.abs().max(f64::MIN_POSITIVE))
            })();
            match r {
                Ok(rel) if rel <= 1e-8 => worst = worst.max(rel),
                other => {
                    return fail("form_equivalence", i + 1, format!("{other:?}"), json!({"instance": i, "moments": mom, "spec": spec, "alloc": alloc}));
                }
            }
        }
        pass("form_equivalence", n_inst, format!("max rel diff {worst:.1e} (tol 1e-8)"))
    }

    pub fn majorant_dominance(&self) -> CheckOutcome {
        let s = self.sizes();
        let mut rng = self.rng(2);
        let mut worst_gap = f64::INFINITY;
        let mut worst_tight = 0.0f64;
        for i in 0..s.states {
            let n = rng.random_range(1..=3);
            let m = rng.random_range(1..=6);
            let (mom, spec) = random_instance(&mut rng, n, m);
            let budgets = Budgets { p_t: rng.random_range(0.1..2.0), p_r: 5.0 };
            let obj = MseObjective::new(&mom).expect("random instance is well conditioned");
            let start = random_allocation(&mut rng, &spec.channel_powers, &budgets);
            let state = ScaState::at(&obj, &spec, start, 0).expect("positive allocation");
            let coeffs = spec.phi_coefficients();
            let k = match (self.coeff_fn)(&state, &coeffs) {
                Ok(k) => k,
                Err(e) => return fail("majorant_dominance", i + 1, e.to_string(), json!({"state": state})),
            };
            let tight = (majorant_from_coeffs(&state, &k, &state.alloc) - state.objective).abs() / state.objective.max(f64::MIN_POSITIVE);
            worst_tight = worst_tight.max(tight);
            if tight > 1e-12 {
                return fail("majorant_dominance", i + 1, format!("not tight at expansion point: rel gap {tight:.3e}"), json!({"spec": spec, "state": state}));
            }
            for _ in 0..s.perturbations {
                let alloc = random_allocation(&mut rng, &spec.channel_powers, &budgets);
                let truth = obj.objective(&spec.phis(&alloc)).expect("positive allocation");
                let gap = majorant_from_coeffs(&state, &k, &alloc) - truth;
                worst_gap = worst_gap.min(gap);
                if gap < -1e-10 {
                    return fail("majorant_dominance", i + 1, format!("majorant below objective by {:.3e}", -gap), json!({"spec": spec, "state": state, "alloc": alloc}));
                }
            }
        }
        pass("majorant_dominance", s.states * s.perturbations, format!("min gap {worst_gap:.1e}, max tightness err {worst_tight:.1e}"))
    }

    pub fn cubic_residuals(&self) -> CheckOutcome {
        let n = self.sizes().cubics;
        let mut rng = self.rng(3);
        let mut worst = 0.0f64;
        for i in 0..n {
            let (a, c, d) = random_cubic(&mut rng);
            let ok = cubic_positive_root(a, c, d).map(|x| {
                let res = scaled_residual(a, c, d, x);
                let oracle = bisect_cubic(a, c, d);
                (x, res, (x - oracle).abs() / oracle)
            });
            match ok {
                Ok((x, res, rel)) if x > 0.0 && res <= 1e-12 && rel <= 1e-10 => worst = worst.max(res),
                other => return fail("cubic_residuals", i + 1, format!("{other:?}"), json!({"cube": a, "lin": c, "const": d})),
            }
        }
        pass("cubic_residuals", n, format!("max scaled residual {worst:.1e} (tol 1e-12)"))
    }

    pub fn golden_search_budget(&self) -> CheckOutcome {
        let n = self.sizes().searches;
        let mut rng = self.rng(4);
        let settings = ScaOptions::default().search_settings();
        let mut worst = 0.0f64;
        for i in 0..n {
            let m = rng.random_range(1..=10);
            let pos = |rng: &mut ChaCha8Rng| 10f64.powf(rng.random_range(-3.0..2.0));
            let k = MajorantCoeffs {
                a: (0..m).map(|_| pos(&mut rng)).collect(),
                b: (0..m).map(|_| pos(&mut rng)).collect(),
                c: (0..m).map(|_| pos(&mut rng)).collect(),
                d: (0..m).map(|_| pos(&mut rng)).collect(),
            };
            let w: Vec<f64> = (0..m).map(|_| pos(&mut rng)).collect();
            let p_t = rng.random_range(0.05..2.0);
            let p_r = rng.random_range(0.5..10.0);
            let r = golden_search_sensors(&k, &w, p_t, settings).and_then(|s| Ok((s, golden_search_relay(&k, p_r, settings)?)));
            match r {
                Ok((s, rl)) => {
                    let spend_t: f64 = s.values.iter().zip(&w).map(|(x, wj)| x * wj).sum();
                    let spend_r: f64 = rl.values.iter().sum();
                    let err = ((spend_t - p_t) / p_t).abs().max(((spend_r - p_r) / p_r).abs());
                    worst = worst.max(err);
                    if err > 1e-8 {
                        return fail("golden_search_budget", i + 1, format!("budget off by {err:.3e}"), json!({"coeffs": k, "weights": w, "p_t": p_t, "p_r": p_r}));
                    }
                }
                Err(e) => return fail("golden_search_budget", i + 1, e.to_string(), json!({"coeffs": k, "weights": w, "p_t": p_t, "p_r": p_r})),
            }
        }
        pass("golden_search_budget", n, format!("max rel budget error {worst:.1e} (tol 1e-8)"))
    }

    pub fn descent(&self) -> CheckOutcome {
        let n = self.sizes().descents;
        let mut rng = self.rng(5);
        let opts = ScaOptions::default();
        let mut converged = 0;
        for i in 0..n {
            let nd = rng.random_range(1..=3);
            let m = rng.random_range(1..=10);
            let (mom, spec) = random_instance(&mut rng, nd, m);
            let budgets = Budgets { p_t: rng.random_range(0.1..2.0), p_r: rng.random_range(1.0..10.0) };
            let replay = || json!({"moments": mom, "spec": spec, "budgets": budgets});
            let out = match MseObjective::new(&mom).and_then(|obj| sca::optimize(&obj, &spec, &budgets, &opts)) {
                Ok(o) => o,
                Err(e) => return fail("descent", i + 1, e.to_string(), replay()),
            };
            let f = out.trace.objectives();
            if f.windows(2).any(|w| w[1] > w[0]) {
                return fail("descent", i + 1, "objective increased".into(), replay());
            }
            if f.len() > 2 && f[..f.len() - 1].windows(2).any(|w| w[1] >= w[0]) {
                return fail("descent", i + 1, "objective flat before stop".into(), replay());
            }
            if out.trace.converged {
                converged += 1;
            }
        }
        let frac = converged as f64 / n as f64;
        let detail = format!("monotone on all, converged {:.1}% (need 99%)", 100.0 * frac);
        if frac >= 0.99 {
            pass("descent", n, detail)
        } else {
            fail("descent", n, detail, Value::Null)
        }
    }

    pub fn empirical_vs_analytic(&self) -> CheckOutcome {
        let s = self.sizes();
        let mut rng = self.rng(6);
        let mut worst = 0.0f64;
        for i in 0..s.scenarios {
            let kind = if i % 2 == 0 { ScenarioKind::Scalar } else { ScenarioKind::Vector };
            let mut cfg = ScenarioConfig::defaults(kind);
            cfg.seed = self.seed.wrapping_add(i as u64);
            if kind == ScenarioKind::Vector {
                cfg.sensor_count = 3;
            }
            let base = base_layout(&cfg);
            let p_t = cfg.p_t_grid[(i * 3) % cfg.p_t_grid.len()];
            let r = (|| -> Result<(f64, f64, f64)> {
                let (_, problem) = trial_problem(&cfg, base.as_ref(), i)?;
                let budgets = cfg.budgets(p_t)?;
                let alloc = if i % 3 == 2 {
                    sca::uniform_allocation(problem.channel_powers(), &budgets)
                } else {
                    sca::optimize(&problem.objective, &problem.relay, &budgets, &cfg.optimizer)?.alloc
                };
                let (analytic, _) = posterior_mse(&problem.moments, &problem.relay, &alloc)?;
                let emp = simulate_realization(&problem, &alloc, &mut rng, s.samples)?;
                Ok((analytic, emp.mean, emp.std_err))
            })();
            match r {
                Ok((a, e, se)) if (a - e).abs() <= 3.0 * se => worst = worst.max((a - e).abs() / se),
                other => return fail("empirical_vs_analytic", i + 1, format!("{other:?}"), json!({"config": cfg, "trial": i, "p_t": p_t})),
            }
        }
        pass("empirical_vs_analytic", s.scenarios, format!("max |diff| {worst:.2} SE at {} samples (tol 3)", s.samples))
    }

    pub fn grid_agreement(&self) -> CheckOutcome {
        let n = self.sizes().grid_instances;
        let mut rng = self.rng(7);
        let grid = GridSpec::new(200).expect("resolution above minimum");
        let mut worst = 0.0f64;
        for i in 0..n {
            let (mom, spec) = random_instance(&mut rng, 1, 2);
            let budgets = Budgets { p_t: rng.random_range(0.1..1.0), p_r: 5.0 };
            let r = (|| -> Result<(f64, f64)> {
                let obj = MseObjective::new(&mom)?;
                let out = sca::optimize(&obj, &spec, &budgets, &ScaOptions::default())?;
                let g = grid_search_mse(&mom, &spec, &budgets, grid)?;
                Ok((obj.residual_trace() + out.objective(), g.trace))
            })();
            match r {
                Ok((s, g)) if (s - g).abs() <= 5e-3 * g => worst = worst.max((s - g).abs() / g),
                other => return fail("grid_agreement", i + 1, format!("{other:?}"), json!({"moments": mom, "spec": spec, "budgets": budgets})),
            }
        }
        pass("grid_agreement", n, format!("max rel diff {worst:.1e} vs 200x200 grid (tol 5e-3)"))
    }
}

fn pass(name: &str, instances: usize, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.into(), passed: true, instances, detail, failure: None }
}

fn fail(name: &str, instances: usize, detail: String, replay: Value) -> CheckOutcome {
    CheckOutcome { name: name.into(), passed: false, instances, detail, failure: Some(replay) }
}

/// Random well-conditioned Gaussian model with log-uniform link gains.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> (JointMoments, RelaySpec) {
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let cov = symmetrize(&(&a * a.transpose() + DMatrix::identity(n, n) * 0.2));
    let mean = DVector::<f64>::from_fn(n, |_, _| StandardNormal.sample(rng));
    let g = DMatrix::<f64>::from_fn(m, n, |_, _| StandardNormal.sample(rng));
    let noise = DVector::<f64>::from_fn(m, |_, _| rng.random_range(0.2..2.0));
    let moments = observation_moments(
        &GaussianBelief::new(mean, cov).expect("SPD by construction"),
        &SensorNetwork::new(g, DMatrix::from_diagonal(&noise)).expect("positive noise"),
    )
    .expect("consistent shapes");
    let mut gain = || 10f64.powf(rng.random_range(-1.0..1.5));
    let links = (0..m)
        .map(|_| ChannelLink::new(gain(), gain(), 1.0, 1.0).expect("positive"))
        .collect::<Vec<_>>();
    let spec = RelaySpec::new(links, bayes::channel_powers(&moments)).expect("positive powers");
    (moments, spec)
}

/// Random strictly positive allocation on both budget surfaces.
pub fn random_allocation<R: Rng + ?Sized>(rng: &mut R, channel_powers: &[f64], budgets: &Budgets) -> Allocation {
    let m = channel_powers.len();
    let shares = |rng: &mut R| {
        let e: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect::<Vec<f64>>();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|v| v / s).collect::<Vec<f64>>()
    };
    let sa = shares(rng);
    let sb = shares(rng);
    Allocation {
        alpha: sa.iter().zip(channel_powers).map(|(s, w)| s * budgets.p_t / w).collect(),
        beta: sb.iter().map(|s| s * budgets.p_r).collect(),
    }
}

/// Log-uniform cubic coefficients; at most one of the lower two is zero.
pub fn random_cubic<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, f64) {
    let mut lu = || 10f64.powf(rng.random_range(-6.0..6.0));
    let (a, mut c, mut d) = (lu(), lu(), lu());
    match rng.random_range(0..10) {
        0 => c = 0.0,
        1 => d = 0.0,
        _ => {}
    }
    (a, c, d)
}

/// Plain bisection for the positive root of `a x³ = c x + d`.
pub fn bisect_cubic(a: f64, c: f64, d: f64) -> f64 {
    let g = |x: f64| a * x * x * x - c * x - d;
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while g(lo) > 0.0 {
        lo *= 0.5;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
