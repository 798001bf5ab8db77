//! Allocation methods behind a common trait, looked up by name at runtime.
//!
//! The built-in registry carries the two-hop SCA allocator, the two-hop
//! uniform split, and their one-hop counterparts. Additional methods can be
//! registered under new names and selected from the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::relay::{self, Allocation, Budgets};
use crate::sca::{self, ScaOptions};

/// Which path the fusion center's observations travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    TwoHop,
    OneHop,
}

/// What a method produced for one realization and budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub route: Route,
    /// For one-hop methods `beta` is empty.
    pub allocation: Allocation,
    /// Posterior MSE trace at the fusion center.
    pub mse: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub trait AllocationStrategy: Send + Sync {
    fn name(&self) -> &str;

    fn description(&self) -> &str {
        ""
    }

    fn allocate(&self, problem: &Problem, budgets: &Budgets, opts: &ScaOptions) -> Result<MethodOutcome>;
}

impl fmt::Debug for dyn AllocationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AllocationStrategy({})", self.name())
    }
}

pub const TWO_HOP_OPT: &str = "two_hop_opt";
pub const TWO_HOP_UNIFORM: &str = "two_hop_uniform";
pub const ONE_HOP_OPT: &str = "one_hop_opt";
pub const ONE_HOP_UNIFORM: &str = "one_hop_uniform";

/// Joint sensor/relay allocation by successive convex approximation.
pub struct TwoHopOptimized;

impl AllocationStrategy for TwoHopOptimized {
    fn name(&self) -> &str {
        TWO_HOP_OPT
    }

    fn description(&self) -> &str {
        "two-hop relay, jointly optimized sensor and relay powers"
    }

    fn allocate(&self, problem: &Problem, budgets: &Budgets, opts: &ScaOptions) -> Result<MethodOutcome> {
        let out = sca::optimize(&problem.objective, &problem.relay, budgets, opts)?;
        let mse = problem.objective.residual_trace() + out.objective();
        Ok(MethodOutcome {
            route: Route::TwoHop,
            allocation: out.alloc,
            mse,
            iterations: out.trace.iterations(),
            converged: out.trace.converged,
        })
    }
}

pub struct TwoHopUniform;

impl AllocationStrategy for TwoHopUniform {
    fn name(&self) -> &str {
        TWO_HOP_UNIFORM
    }

    fn description(&self) -> &str {
        "two-hop relay, equal per-sensor and per-channel relay power"
    }

    fn allocate(&self, problem: &Problem, budgets: &Budgets, _opts: &ScaOptions) -> Result<MethodOutcome> {
        let alloc = sca::uniform_allocation(problem.channel_powers(), budgets);
        let mse = problem.objective.posterior_trace(&problem.relay.phis(&alloc))?;
        Ok(MethodOutcome { route: Route::TwoHop, allocation: alloc, mse, iterations: 0, converged: true })
    }
}

pub struct OneHopOptimized;

impl AllocationStrategy for OneHopOptimized {
    fn name(&self) -> &str {
        ONE_HOP_OPT
    }

    fn description(&self) -> &str {
        "direct links to the fusion center, optimized sensor powers"
    }

    fn allocate(&self, problem: &Problem, budgets: &Budgets, opts: &ScaOptions) -> Result<MethodOutcome> {
        let out = sca::one_hop_optimize(&problem.objective, &problem.direct, problem.channel_powers(), budgets.p_t, opts)?;
        let mse = problem.objective.residual_trace() + out.objective();
        Ok(MethodOutcome {
            route: Route::OneHop,
            allocation: Allocation { alpha: out.alpha.clone(), beta: Vec::new() },
            mse,
            iterations: out.iterations(),
            converged: out.converged,
        })
    }
}

pub struct OneHopUniform;

impl AllocationStrategy for OneHopUniform {
    fn name(&self) -> &str {
        ONE_HOP_UNIFORM
    }

    fn description(&self) -> &str {
        "direct links to the fusion center, equal per-sensor power"
    }

    fn allocate(&self, problem: &Problem, budgets: &Budgets, _opts: &ScaOptions) -> Result<MethodOutcome> {
        let alpha = sca::uniform_allocation(problem.channel_powers(), budgets).alpha;
        let mse = relay::one_hop_mse(&problem.objective, &problem.direct, &alpha)?;
        Ok(MethodOutcome {
            route: Route::OneHop,
            allocation: Allocation { alpha, beta: Vec::new() },
            mse,
            iterations: 0,
            converged: true,
        })
    }
}

/// Name-keyed collection of strategies; iteration follows registration order.
#[derive(Default)]
pub struct StrategyRegistry {
    order: Vec<String>,
    entries: BTreeMap<String, Arc<dyn AllocationStrategy>>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding the four built-in methods.
    pub fn builtin() -> Self {
        let mut reg = Self::new();
        reg.register(Arc::new(TwoHopOptimized)).expect("unique builtin name");
        reg.register(Arc::new(TwoHopUniform)).expect("unique builtin name");
        reg.register(Arc::new(OneHopOptimized)).expect("unique builtin name");
        reg.register(Arc::new(OneHopUniform)).expect("unique builtin name");
        reg
    }

    pub fn register(&mut self, strategy: Arc<dyn AllocationStrategy>) -> Result<()> {
        let name = strategy.name().to_string();
        if self.entries.contains_key(&name) {
            return Err(Error::InvalidInput(format!("strategy {name:?} already registered")));
        }
        self.order.push(name.clone());
        self.entries.insert(name, strategy);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn AllocationStrategy>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Resolves names in the given order; unknown names are an error.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Arc<dyn AllocationStrategy>>> {
        if names.is_empty() {
            return Err(Error::InvalidInput("no methods selected".into()));
        }
        names
            .iter()
            .map(|n| {
                self.get(n.as_ref()).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "unknown method {:?}; available: {}",
                        n.as_ref(),
                        self.order.join(", ")
                    ))
                })
            })
            .collect()
    }
}
