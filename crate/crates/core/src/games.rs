//! Value functions `ν(S) = E[Y | do(S = x_S)]` and the caching oracle that
//! routes every query through the coalition's basis.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use parking_lot::Mutex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{CausalGraph, Coalition};
use crate::lattice::ClassInventory;

/// A deterministic value function over irreducible coalitions.
pub trait Game: Send + Sync {
    /// Value of the coalition `basis`, which is always its own basis when
    /// called through a [`ValueOracle`].
    fn value(&self, basis: Coalition) -> Result<f64>;
}

impl<G: Game + ?Sized> Game for Box<G> {
    fn value(&self, basis: Coalition) -> Result<f64> {
        (**self).value(basis)
    }
}

impl<G: Game + ?Sized> Game for &G {
    fn value(&self, basis: Coalition) -> Result<f64> {
        (**self).value(basis)
    }
}

/// Wraps a closure as a game.
pub struct FnGame<F>(pub F);

impl<F: Fn(Coalition) -> f64 + Send + Sync> Game for FnGame<F> {
    fn value(&self, basis: Coalition) -> Result<f64> {
        Ok((self.0)(basis))
    }
}

/// Query counting, basis-keyed cache in front of a [`Game`].
///
/// Concurrent callers observe as-if-serialized cache semantics: the cache lock
/// is held across a miss, so each basis is computed and counted once.
pub struct ValueOracle<'g, G> {
    graph: &'g CausalGraph,
    game: G,
    cache: Option<Mutex<HashMap<Coalition, f64>>>,
    queries: AtomicUsize,
}

impl<'g, G: Game> ValueOracle<'g, G> {
    pub fn new(graph: &'g CausalGraph, game: G) -> Self {
        ValueOracle {
            graph,
            game,
            cache: Some(Mutex::new(HashMap::new())),
            queries: AtomicUsize::new(0),
        }
    }

    /// An oracle that forwards every call to the game and counts each one.
    pub fn uncached(graph: &'g CausalGraph, game: G) -> Self {
        ValueOracle {
            graph,
            game,
            cache: None,
            queries: AtomicUsize::new(0),
        }
    }

    pub fn graph(&self) -> &'g CausalGraph {
        self.graph
    }

    pub fn game(&self) -> &G {
        &self.game
    }

    /// `ν(S)`, computed as `ν(basis(S))`.
    pub fn evaluate(&self, s: Coalition) -> Result<f64> {
        let basis = self.graph.find_class(s).basis;
        self.evaluate_irreducible(basis)
    }

    /// Evaluates a coalition already known to be irreducible, skipping the
    /// graph traversal.
    pub fn evaluate_irreducible(&self, basis: Coalition) -> Result<f64> {
        match &self.cache {
            None => {
                self.queries.fetch_add(1, Ordering::Relaxed);
                self.game.value(basis)
            }
            Some(cache) => {
                let mut cache = cache.lock();
                if let Some(&v) = cache.get(&basis) {
                    return Ok(v);
                }
                let v = self.game.value(basis)?;
                self.queries.fetch_add(1, Ordering::Relaxed);
                cache.insert(basis, v);
                Ok(v)
            }
        }
    }

    /// Number of game evaluations performed so far (cache misses).
    pub fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Explicit table of values keyed by irreducible coalition.
#[derive(Clone, Debug, Default)]
pub struct TableGame {
    values: HashMap<Coalition, f64>,
}

impl TableGame {
    pub fn new(values: HashMap<Coalition, f64>) -> Self {
        TableGame { values }
    }

    pub fn insert(&mut self, s: Coalition, v: f64) {
        self.values.insert(s, v);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Class bases of `inventory` that have no table entry.
    pub fn missing_bases(&self, inventory: &ClassInventory) -> Vec<Coalition> {
        inventory
            .iter()
            .map(|c| c.basis)
            .filter(|b| !self.values.contains_key(b))
            .collect()
    }
}

impl Game for TableGame {
    fn value(&self, basis: Coalition) -> Result<f64> {
        self.values
            .get(&basis)
            .copied()
            .ok_or_else(|| Error::MissingEntry(format!("{basis:?}")))
    }
}

/// Linear-Gaussian structural causal model explained at the point `x`.
#[derive(Clone, Debug)]
pub struct LinearScm {
    graph: CausalGraph,
    /// Per node: `(parent, coefficient)`.
    coefficients: Vec<Vec<(usize, f64)>>,
    intercepts: Vec<f64>,
    x: Vec<f64>,
    noise_std: Vec<f64>,
}

impl LinearScm {
    /// `coefficients` are `(parent, child, weight)` triples over node indices
    /// (players `0..d`, target `d`). Edges without a coefficient get weight 0.
    pub fn new(graph: CausalGraph, coefficients: &[(usize, usize, f64)], intercepts: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        let n = graph.num_players() + 1;
        if intercepts.len() != n {
            return Err(Error::InvalidGame(format!("expected {n} intercepts, got {}", intercepts.len())));
        }
        if x.len() != n - 1 {
            return Err(Error::InvalidGame(format!("expected {} instance values, got {}", n - 1, x.len())));
        }
        let mut coef = vec![Vec::new(); n];
        for &(parent, child, w) in coefficients {
            if child >= n || !graph.parents(child).contains(&parent) {
                return Err(Error::InvalidGame(format!(
                    "coefficient on non-edge {}→{}",
                    graph.name(parent.min(n - 1)),
                    graph.name(child.min(n - 1))
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGame("coefficients must be finite".into()));
            }
            coef[child].push((parent, w));
        }
        Ok(LinearScm {
            graph,
            coefficients: coef,
            intercepts,
            x,
            noise_std: vec![1.0; n],
        })
    }

    /// Sets per-node noise variances (used only by Monte Carlo evaluation).
    pub fn with_noise_variances(mut self, variances: Vec<f64>) -> Result<Self> {
        if variances.len() != self.noise_std.len() || variances.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidGame("noise variances must be non-negative, one per node".into()));
        }
        self.noise_std = variances.into_iter().map(f64::sqrt).collect();
        Ok(self)
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn instance(&self) -> &[f64] {
        &self.x
    }

    fn linear_part(&self, v: usize, values: &[f64]) -> f64 {
        self.intercepts[v] + self.coefficients[v].iter().map(|&(p, w)| w * values[p]).sum::<f64>()
    }
}

/// Exact `E[Y | do(S = x_S)]` by mean propagation in topological order.
pub fn linear_scm_mean(scm: &LinearScm, s: Coalition) -> f64 {
    let d = scm.graph.num_players();
    let mut mean = vec![0.0; d + 1];
    for &v in scm.graph.topological_order() {
        mean[v] = if v < d && s.contains(v) { scm.x[v] } else { scm.linear_part(v, &mean) };
    }
    mean[d]
}

impl Game for LinearScm {
    fn value(&self, basis: Coalition) -> Result<f64> {
        Ok(linear_scm_mean(self, basis))
    }
}

/// Link applied to a node's linear predictor in the Monte Carlo model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Activation {
    #[default]
    Identity,
    Tanh,
    Relu,
    Sigmoid,
}

impl Activation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "identity" | "linear" => Ok(Activation::Identity),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            _ => Err(Error::InvalidGame(format!("unknown activation `{s}`"))),
        }
    }

    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }
}

/// Default number of Monte Carlo draws per coalition.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Sampled interventional mean for structural equations
/// `X_v = act_v(b_v + Σ w·parents) + ε_v`.
///
/// Every evaluation replays the same seeded noise stream, so values are
/// deterministic and coalitions share common random numbers.
#[derive(Clone, Debug)]
pub struct MonteCarloScm {
    scm: LinearScm,
    activations: Vec<Activation>,
    samples: usize,
    seed: u64,
}

impl MonteCarloScm {
    pub fn new(scm: LinearScm, activations: Vec<Activation>, samples: usize, seed: u64) -> Result<Self> {
        if activations.len() != scm.intercepts.len() {
            return Err(Error::InvalidGame("one activation per node is required".into()));
        }
        if samples == 0 {
            return Err(Error::InvalidGame("sample count must be positive".into()));
        }
        Ok(MonteCarloScm {
            scm,
            activations,
            samples,
            seed,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }
}

impl Game for MonteCarloScm {
    fn value(&self, basis: Coalition) -> Result<f64> {
        let scm = &self.scm;
        let d = scm.graph.num_players();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut values = vec![0.0; d + 1];
        let mut total = 0.0;
        for _ in 0..self.samples {
            for &v in scm.graph.topological_order() {
                // drawn even for intervened nodes to keep streams aligned
                let eps: f64 = StandardNormal.sample(&mut rng);
                values[v] = if v < d && basis.contains(v) {
                    scm.x[v]
                } else {
                    self.activations[v].apply(scm.linear_part(v, &values)) + scm.noise_std[v] * eps
                };
            }
            total += values[d];
        }
        Ok(total / self.samples as f64)
    }
}
