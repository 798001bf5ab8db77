//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Reference values come from oracles written here, not from the
//! code under test.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use relaypower::bayes::{self, observation_moments, GaussianBelief, JointMoments, SensorNetwork};
use relaypower::cli::write_curve_csv;
use relaypower::experiments::{run_sweep, simulate_realization, ScenarioConfig, ScenarioKind, SweepOutput};
use relaypower::experiments::sweep::{base_layout, trial_problem};
use relaypower::oracle::{grid_search_mse, GridSpec};
use relaypower::problem::Problem;
use relaypower::relay::{posterior_mse, Allocation, Budgets, ChannelLink, DirectLink, MseObjective, RelaySpec};
use relaypower::sca::{self, cubic_positive_root, golden_search_relay, golden_search_sensors, majorant_eval, MajorantCoeffs, ScaOptions, ScaState};
use relaypower::strategy::{StrategyRegistry, ONE_HOP_OPT, ONE_HOP_UNIFORM, TWO_HOP_OPT, TWO_HOP_UNIFORM};

type Check = Result<String, String>;

struct Instance {
    moments: JointMoments,
    spec: RelaySpec,
    /// Raw link parameters `(h_sr, h_rd, sigma_sr, sigma_rd)` per channel.
    raw: Vec<(f64, f64, f64, f64)>,
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let cov = &a * a.transpose() + DMatrix::identity(n, n) * 0.3;
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = DVector::<f64>::from_fn(n, |_, _| StandardNormal.sample(rng));
    let g = DMatrix::<f64>::from_fn(m, n, |_, _| StandardNormal.sample(rng));
    let noise = DVector::<f64>::from_fn(m, |_, _| rng.random_range(0.3..2.0));
    let moments = observation_moments(
        &GaussianBelief::new(mean, cov).unwrap(),
        &SensorNetwork::new(g, DMatrix::from_diagonal(&noise)).unwrap(),
    )
    .unwrap();
    let raw: Vec<_> = (0..m)
        .map(|_| {
            (
                10f64.powf(rng.random_range(-1.0..1.5)),
                10f64.powf(rng.random_range(-1.0..1.5)),
                rng.random_range(0.5..2.0),
                rng.random_range(0.5..2.0),
            )
        })
        .collect();
    let links = raw.iter().map(|&(a, b, c, d)| ChannelLink::new(a, b, c, d).unwrap()).collect();
    let spec = RelaySpec::new(links, bayes::channel_powers(&moments)).unwrap();
    Instance { moments, spec, raw }
}

fn random_allocation(rng: &mut ChaCha8Rng, powers: &[f64], b: &Budgets) -> Allocation {
    let mut shares = || {
        let e: Vec<f64> = powers.iter().map(|_| Exp1.sample(&mut *rng)).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(move |v| v / s).collect::<Vec<f64>>()
    };
    let sa = shares();
    let sb = shares();
    Allocation {
        alpha: sa.iter().zip(powers).map(|(s, w)| s * b.p_t / w).collect(),
        beta: sb.iter().map(|s| s * b.p_r).collect(),
    }
}

/// Posterior trace from the signal model written out by hand: the fusion
/// center sees `H y + w` with `H` and `Cov(w)` diagonal.
fn direct_trace(inst: &Instance, alloc: &Allocation) -> f64 {
    let m = inst.raw.len();
    let mut h = DMatrix::zeros(m, m);
    let mut c = DMatrix::zeros(m, m);
    for j in 0..m {
        let (h_sr, h_rd, s_sr, s_rd) = inst.raw[j];
        let pw = inst.moments.cov_y[(j, j)] + inst.moments.mean_y[j].powi(2);
        let (a, b) = (alloc.alpha[j], alloc.beta[j]);
        let amp2 = b / (h_sr * a * pw + s_sr);
        h[(j, j)] = (h_rd * amp2 * h_sr * a).sqrt();
        c[(j, j)] = h_rd * amp2 * s_sr + s_rd;
    }
    let mom = &inst.moments;
    let cz = &h * &mom.cov_y * &h + c;
    let cxz = &mom.cov_xy * &h;
    let post = &mom.cov_x - &cxz * cz.try_inverse().unwrap() * cxz.transpose();
    post.trace()
}

fn residual_trace(inst: &Instance) -> f64 {
    let mom = &inst.moments;
    (&mom.cov_x - &mom.cov_xy * mom.cov_y.clone().try_inverse().unwrap() * mom.cov_xy.transpose()).trace()
}

fn bisect_root(a: f64, c: f64, d: f64) -> f64 {
    let g = |x: f64| a * x * x * x - c * x - d;
    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..3000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid
        } else {
            lo = mid
        }
    }
    0.5 * (lo + hi)
}

fn c1_form_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=6);
        let inst = random_instance(&mut rng, n, m);
        let b = Budgets::new(rng.random_range(0.1..2.0), rng.random_range(1.0..10.0)).unwrap();
        let alloc = random_allocation(&mut rng, &inst.spec.channel_powers, &b);
        let direct = direct_trace(&inst, &alloc);
        let phi = MseObjective::new(&inst.moments).unwrap().posterior_trace(&inst.spec.phis(&alloc)).unwrap();
        let rel = (direct - phi).abs() / direct;
        worst = worst.max(rel);
        if rel > 1e-8 {
            return Err(format!("instance {i}: rel diff {rel:.3e}"));
        }
    }
    Ok(format!("100 instances, max rel diff {worst:.2e} (tol 1e-8)"))
}

fn c2_majorant() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let (mut worst_tight, mut worst_gap) = (0.0f64, f64::INFINITY);
    for s in 0..20 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=6);
        let inst = random_instance(&mut rng, n, m);
        let b = Budgets::new(rng.random_range(0.1..2.0), rng.random_range(1.0..10.0)).unwrap();
        let obj = MseObjective::new(&inst.moments).unwrap();
        let start = random_allocation(&mut rng, &inst.spec.channel_powers, &b);
        let state = ScaState::at(&obj, &inst.spec, start.clone(), 0).unwrap();
        let coeffs = inst.spec.phi_coefficients();
        let resid = residual_trace(&inst);
        let truth_at = |a: &Allocation| direct_trace(&inst, a) - resid;

        let at_point = majorant_eval(&state, &start, &coeffs).unwrap();
        let tight = (at_point - truth_at(&start)).abs() / truth_at(&start).abs();
        worst_tight = worst_tight.max(tight);
        if tight > 1e-12 && (at_point - state.objective).abs() / state.objective > 1e-12 {
            return Err(format!("state {s}: majorant not tight ({tight:.3e})"));
        }
        for _ in 0..1000 {
            let alloc = random_allocation(&mut rng, &inst.spec.channel_powers, &b);
            let gap = majorant_eval(&state, &alloc, &coeffs).unwrap() - truth_at(&alloc);
            worst_gap = worst_gap.min(gap);
            if gap < -1e-10 {
                return Err(format!("state {s}: majorant below objective by {:.3e}", -gap));
            }
        }
    }
    Ok(format!("20 states x 1000 allocations, tightness {worst_tight:.1e} (tol 1e-12), min gap {worst_gap:.1e} (tol -1e-10)"))
}

fn c3_descent() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let opts = ScaOptions::default();
    let (mut converged, mut max_iter) = (0, 0);
    for i in 0..1000 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=10);
        let inst = random_instance(&mut rng, n, m);
        let b = Budgets::new(rng.random_range(0.1..2.0), rng.random_range(1.0..10.0)).unwrap();
        let obj = MseObjective::new(&inst.moments).unwrap();
        let out = sca::optimize(&obj, &inst.spec, &b, &opts).map_err(|e| format!("problem {i}: {e}"))?;
        let f = out.trace.objectives();
        if f.windows(2).any(|w| w[1] > w[0]) {
            return Err(format!("problem {i}: objective increased"));
        }
        // every accepted step before the stopping step strictly decreases
        if f.len() > 2 && f[..f.len() - 1].windows(2).any(|w| w[1] >= w[0]) {
            return Err(format!("problem {i}: flat step before stop"));
        }
        if out.trace.converged && out.trace.iterations() <= 200 {
            converged += 1;
        }
        max_iter = max_iter.max(out.trace.iterations());
    }
    let frac = converged as f64 / 1000.0;
    let detail = format!("1000 problems monotone, converged within 200 iterations {:.1}% (need 99%), max {max_iter} iterations", 100.0 * frac);
    if frac >= 0.99 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c4_cubic() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut worst_res, mut worst_rel) = (0.0f64, 0.0f64);
    for i in 0..10_000 {
        let mut lu = || 10f64.powf(rng.random_range(-6.0..6.0));
        let (a, c, d) = (lu(), lu(), lu());
        let x = cubic_positive_root(a, c, d).map_err(|e| format!("triple {i}: {e}"))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(format!("triple {i}: root {x}"));
        }
        let g = |t: f64| a * t * t * t - c * t - d;
        let res = g(x).abs() / (a * x * x * x);
        // g(t)/t is strictly increasing on t > 0, so one sign change means one root
        if !(g(x * (1.0 - 1e-9)) < 0.0 && g(x * (1.0 + 1e-9)) > 0.0) {
            return Err(format!("triple {i}: no sign change around {x}"));
        }
        let rel = (x - bisect_root(a, c, d)).abs() / x;
        worst_res = worst_res.max(res);
        worst_rel = worst_rel.max(rel);
        if res > 1e-12 || rel > 1e-10 {
            return Err(format!("triple {i} ({a:e}, {c:e}, {d:e}): residual {res:.2e}, oracle diff {rel:.2e}"));
        }
    }
    Ok(format!("10^4 triples, max scaled residual {worst_res:.1e} (tol 1e-12), max oracle diff {worst_rel:.1e} (tol 1e-10)"))
}

fn c5_golden() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let settings = ScaOptions::default().search_settings();
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let m = rng.random_range(1..=10);
        let mut lu = || 10f64.powf(rng.random_range(-3.0..2.0));
        let k = MajorantCoeffs {
            a: (0..m).map(|_| lu()).collect(),
            b: (0..m).map(|_| lu()).collect(),
            c: (0..m).map(|_| lu()).collect(),
            d: (0..m).map(|_| lu()).collect(),
        };
        let w: Vec<f64> = (0..m).map(|_| lu()).collect();
        let (p_t, p_r) = (rng.random_range(0.05..2.0), rng.random_range(0.5..10.0));
        let s = golden_search_sensors(&k, &w, p_t, settings).map_err(|e| format!("set {i}: {e}"))?;
        let r = golden_search_relay(&k, p_r, settings).map_err(|e| format!("set {i}: {e}"))?;
        let et = (s.values.iter().zip(&w).map(|(x, wj)| x * wj).sum::<f64>() - p_t).abs() / p_t;
        let er = (r.values.iter().sum::<f64>() - p_r).abs() / p_r;
        worst = worst.max(et.max(er));
        if et.max(er) > 1e-8 {
            return Err(format!("set {i}: budget error {:.3e}", et.max(er)));
        }
    }
    let mut closed = 0.0f64;
    for _ in 0..100 {
        let mut lu = || 10f64.powf(rng.random_range(-3.0..2.0));
        let one = MajorantCoeffs { a: vec![lu()], b: vec![lu()], c: vec![lu()], d: vec![lu()] };
        let (w, p_t, p_r) = (lu(), lu(), lu());
        let s = golden_search_sensors(&one, &[w], p_t, settings).map_err(|e| e.to_string())?;
        let r = golden_search_relay(&one, p_r, settings).map_err(|e| e.to_string())?;
        closed = closed.max(((s.values[0] - p_t / w) / (p_t / w)).abs()).max(((r.values[0] - p_r) / p_r).abs());

        let (a, b, c, d, w) = (lu(), lu(), lu(), lu(), lu());
        let m = rng.random_range(2..=8);
        let sym = MajorantCoeffs { a: vec![a; m], b: vec![b; m], c: vec![c; m], d: vec![d; m] };
        let s = golden_search_sensors(&sym, &vec![w; m], p_t, settings).map_err(|e| e.to_string())?;
        let r = golden_search_relay(&sym, p_r, settings).map_err(|e| e.to_string())?;
        let (ea, eb) = (p_t / (m as f64 * w), p_r / m as f64);
        for j in 0..m {
            closed = closed.max(((s.values[j] - ea) / ea).abs()).max(((r.values[j] - eb) / eb).abs());
        }
    }
    if closed > 1e-12 {
        return Err(format!("closed forms off by {closed:.3e}"));
    }
    Ok(format!("10^3 sets, max budget error {worst:.1e} (tol 1e-8); M=1 and symmetric closed forms within {closed:.1e} (tol 1e-12)"))
}

fn c6_grid() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let grid = GridSpec::new(200).unwrap();
    let (mut worst, mut best_gain) = (0.0f64, 0.0f64);
    for i in 0..50 {
        let inst = random_instance(&mut rng, 1, 2);
        let b = Budgets::new(rng.random_range(0.1..1.0), 5.0).unwrap();
        let obj = MseObjective::new(&inst.moments).unwrap();
        let out = sca::optimize(&obj, &inst.spec, &b, &ScaOptions::default()).map_err(|e| format!("instance {i}: {e}"))?;
        let sca_mse = direct_trace(&inst, &out.alloc);
        let g = grid_search_mse(&inst.moments, &inst.spec, &b, grid).map_err(|e| format!("instance {i}: {e}"))?;
        let rel = (sca_mse - g.trace) / g.trace;
        worst = worst.max(rel.abs());
        best_gain = best_gain.min(rel);
        if rel.abs() > 5e-3 {
            return Err(format!("instance {i}: optimizer {sca_mse:.6e} vs grid {:.6e}", g.trace));
        }
    }
    Ok(format!("50 instances, max |rel diff| {worst:.2e} (tol 5e-3); optimizer beats grid by up to {:.2e}", -best_gain))
}

fn c7_empirical() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = 0.0f64;
    let mut problems: Vec<(String, Problem, Allocation)> = Vec::new();
    // scenario-built realizations at several budgets
    for (idx, (kind, sensors, p_t)) in [(ScenarioKind::Scalar, 10, 0.1), (ScenarioKind::Scalar, 10, 1.0), (ScenarioKind::Vector, 10, 0.5), (ScenarioKind::Vector, 4, 0.2)]
        .into_iter()
        .enumerate()
    {
        let mut cfg = ScenarioConfig::defaults(kind);
        cfg.sensor_count = sensors;
        if kind == ScenarioKind::Scalar {
            cfg.gains.truncate(sensors);
        }
        let base = base_layout(&cfg);
        let (_, p) = trial_problem(&cfg, base.as_ref(), idx).unwrap();
        let b = cfg.budgets(p_t).unwrap();
        let alloc = sca::optimize(&p.objective, &p.relay, &b, &cfg.optimizer).unwrap().alloc;
        problems.push((format!("{kind:?} M={} P_T={p_t} optimized", p.channel_count()), p, alloc));
    }
    // random models with random, uniform, zero and optimized allocations
    for k in 0..6 {
        let n = 1 + k % 3;
        let m = 2 + k;
        let inst = random_instance(&mut rng, n, m);
        let b = Budgets::new(0.5, 5.0).unwrap();
        let prior = GaussianBelief::new(inst.moments.mean_x.clone(), inst.moments.cov_x.clone()).unwrap();
        let mut r2 = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        let a = DMatrix::<f64>::from_fn(m, n, |_, _| StandardNormal.sample(&mut r2));
        let net = SensorNetwork::new(a, DMatrix::identity(m, m) * 0.7).unwrap();
        let links = inst.spec.links.clone();
        let direct = vec![DirectLink::new(1.0, 1.0).unwrap(); m];
        let p = Problem::new(prior, net, links, direct).unwrap();
        let (label, alloc) = match k % 4 {
            0 => ("random", random_allocation(&mut rng, p.channel_powers(), &b)),
            1 => ("uniform", sca::uniform_allocation(p.channel_powers(), &b)),
            2 => ("zero", Allocation::zeros(m)),
            _ => ("optimized", sca::optimize(&p.objective, &p.relay, &b, &ScaOptions::default()).unwrap().alloc),
        };
        problems.push((format!("random N={n} M={m} {label}"), p, alloc));
    }
    for (label, p, alloc) in &problems {
        let (analytic, _) = posterior_mse(&p.moments, &p.relay, alloc).unwrap();
        let e = simulate_realization(p, alloc, &mut rng, 100_000).unwrap();
        let z = (e.mean - analytic).abs() / e.std_err;
        worst = worst.max(z);
        if z > 3.0 {
            return Err(format!("{label}: empirical {:.6e} +- {:.2e} vs analytic {analytic:.6e}", e.mean, e.std_err));
        }
    }
    Ok(format!("{} scenarios x 10^5 samples, max deviation {worst:.2} SE (tol 3)", problems.len()))
}

fn sweep(kind: ScenarioKind, workers: usize) -> (ScenarioConfig, SweepOutput, Vec<u8>) {
    let mut cfg = ScenarioConfig::defaults(kind);
    cfg.trials = 500;
    let methods = StrategyRegistry::builtin().select(&cfg.methods).unwrap();
    let out = run_sweep(&cfg, &methods, workers).unwrap();
    let mut csv = Vec::new();
    write_curve_csv(&mut csv, &out).unwrap();
    (cfg, out, csv)
}

fn mse_of(out: &SweepOutput, trial: usize, p_t: f64, method: &str) -> f64 {
    out.results
        .iter()
        .find(|r| r.trial == trial && r.p_t == p_t && r.method == method)
        .map(|r| r.mse)
        .expect("paired result present")
}

fn c8_shape(scalar: &(ScenarioConfig, SweepOutput, Vec<u8>), vector: &(ScenarioConfig, SweepOutput, Vec<u8>)) -> Check {
    let (cfg, out, _) = scalar;
    if !out.curve.excluded.is_empty() {
        return Err(format!("{} scalar trials excluded", out.curve.excluded.len()));
    }
    let trials: Vec<usize> = (0..cfg.trials).collect();
    // (a) paired dominance in every trial
    let mut violations = 0;
    for &p_t in &cfg.p_t_grid {
        for &t in &trials {
            if mse_of(out, t, p_t, TWO_HOP_OPT) > mse_of(out, t, p_t, TWO_HOP_UNIFORM) {
                violations += 1;
            }
        }
    }
    if violations > 0 {
        return Err(format!("(a) {violations} paired trials where optimized exceeds uniform"));
    }
    // (b) paired budget response at 3 sigma
    let mut worst_z = f64::NEG_INFINITY;
    for method in [TWO_HOP_OPT, TWO_HOP_UNIFORM, ONE_HOP_OPT, ONE_HOP_UNIFORM] {
        for w in cfg.p_t_grid.windows(2) {
            let d: Vec<f64> = trials.iter().map(|&t| mse_of(out, t, w[1], method) - mse_of(out, t, w[0], method)).collect();
            let n = d.len() as f64;
            let mean = d.iter().sum::<f64>() / n;
            let se = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
            let z = if se > 0.0 { mean / se } else if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
            worst_z = worst_z.max(z);
            if z > 3.0 {
                return Err(format!("(b) {method}: mean MSE rises from P_T={} to {} ({mean:.3e}, z={z:.2})", w[0], w[1]));
            }
        }
    }
    // (c) vector ordering
    let (vcfg, vout, _) = vector;
    if !vout.curve.excluded.is_empty() {
        return Err(format!("{} vector trials excluded", vout.curve.excluded.len()));
    }
    let mut margin = f64::INFINITY;
    for &p_t in &vcfg.p_t_grid {
        let best = vout.curve.point(p_t, TWO_HOP_OPT).unwrap().mean_mse;
        for other in [TWO_HOP_UNIFORM, ONE_HOP_OPT, ONE_HOP_UNIFORM] {
            let o = vout.curve.point(p_t, other).unwrap().mean_mse;
            margin = margin.min((o - best) / o);
            if best >= o {
                return Err(format!("(c) P_T={p_t}: two_hop_opt {best:.4e} not below {other} {o:.4e}"));
            }
        }
    }
    Ok(format!(
        "500 trials; (a) 0 violations; (b) max paired z {worst_z:.2} (tol 3); (c) two_hop_opt lowest at all budgets, min margin {:.1}%",
        100.0 * margin
    ))
}

fn c9_determinism(scalar: &[u8], vector: &[u8]) -> Check {
    let (_, _, s2) = sweep(ScenarioKind::Scalar, 3);
    let (_, _, v2) = sweep(ScenarioKind::Vector, 3);
    if s2 != scalar {
        return Err("scalar CSV differs between runs".into());
    }
    if v2 != vector {
        return Err("vector CSV differs between runs".into());
    }
    Ok(format!("scalar ({} bytes) and vector ({} bytes) CSVs byte-identical across runs with 1 and 3 workers", scalar.len(), vector.len()))
}

fn report(id: usize, name: &str, limit_s: Option<f64>, run: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = run();
    let secs = start.elapsed().as_secs_f64();
    let (mut ok, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    let timing = match limit_s {
        Some(limit) => {
            if secs >= limit {
                ok = false;
                detail = format!("{detail}; runtime over limit");
            }
            format!("{secs:.1} s / {limit} s")
        }
        None => format!("{secs:.1} s"),
    };
    println!("{} criterion {id}: {name} [{timing}] {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn main() -> ExitCode {
    let mut all = true;
    all &= report(1, "posterior-form equivalence", Some(5.0), c1_form_equivalence);
    all &= report(2, "majorant tightness and dominance", Some(30.0), c2_majorant);
    all &= report(3, "monotone descent and convergence", Some(120.0), c3_descent);
    all &= report(4, "cubic solver", Some(5.0), c4_cubic);
    all &= report(5, "golden search budgets", Some(10.0), c5_golden);
    all &= report(6, "grid-search oracle agreement", Some(120.0), c6_grid);
    all &= report(7, "empirical vs analytic MSE", Some(120.0), c7_empirical);

    let mut runs = None;
    all &= report(8, "shape reproduction at 500 trials", Some(600.0), || {
        let scalar = sweep(ScenarioKind::Scalar, 1);
        let vector = sweep(ScenarioKind::Vector, 1);
        let r = c8_shape(&scalar, &vector);
        runs = Some((scalar, vector));
        r
    });
    let (scalar, vector) = runs.expect("criterion 8 ran the sweeps");
    all &= report(9, "determinism", None, || c9_determinism(&scalar.2, &vector.2));

    if all {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
