//! Budgeted estimation: boundary sampling, simulated coalition batches, and
//! the base estimators that consume them.

pub mod base;
pub mod boundary;
pub mod simulated;
pub mod stratified;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use base::{base_regression, mc_msr};
pub use boundary::{boundary_sampler, BoundarySample, SamplerState};
pub use simulated::{simulated_sampler, SampleBatch, SampleRow, SizeWeights};
pub use stratified::{class_sampler, count_seen, sample_unseen_by_size};

use crate::error::{Error, Result};
use crate::exact::Attribution;
use crate::games::{Game, ValueOracle};
use crate::graph::{Coalition, CoalitionClass};
use crate::weights::{class_weight_pair, Neumaier, SchemeKind, WeightScheme};

/// Default sampling multiplier `k` (batch size `k · m`).
pub const DEFAULT_MULTIPLIER: usize = 8;

/// Independent ChaCha stream per sampler so that one component's draws never
/// shift another's.
pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseEstimator {
    #[default]
    Regression,
    McMsr,
}

impl fmt::Display for BaseEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseEstimator::Regression => "regression",
            BaseEstimator::McMsr => "mc-msr",
        })
    }
}

impl FromStr for BaseEstimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regression" => Ok(BaseEstimator::Regression),
            "mc-msr" => Ok(BaseEstimator::McMsr),
            other => Err(Error::UnknownBase(other.to_string())),
        }
    }
}

/// Result of [`do_estimator`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub attribution: Attribution,
    pub all_sampled: bool,
    /// Oracle queries issued, one per distinct class.
    pub queries: usize,
    pub budget: usize,
    /// Rows handed to the base estimator; zero on the exact path.
    pub batch_rows: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct EstimatorConfig {
    pub budget: usize,
    pub base: BaseEstimator,
    pub multiplier: usize,
    pub seed: u64,
}

impl EstimatorConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        EstimatorConfig {
            budget,
            base: BaseEstimator::default(),
            multiplier: DEFAULT_MULTIPLIER,
            seed,
        }
    }
}

fn is_shapley(scheme: &WeightScheme) -> bool {
    match scheme.kind() {
        SchemeKind::Shapley => true,
        SchemeKind::Beta { alpha, beta } => alpha == 1.0 && beta == 1.0,
        SchemeKind::Banzhaf => scheme.num_players() <= 2,
    }
}

/// Estimates attributions with at most `budget` oracle queries.
///
/// If the boundary walk exhausts the lattice the class sum is exact.
/// Otherwise the classes of `∅` and `[d]` are forced into the queried set
/// (still within the budget), a coalition batch is simulated from the
/// queried classes and handed to the base estimator.
pub fn do_estimator<G: Game>(oracle: &ValueOracle<'_, G>, scheme: &WeightScheme, config: EstimatorConfig) -> Result<Estimate> {
    let EstimatorConfig {
        budget,
        base,
        multiplier,
        seed,
    } = config;
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if multiplier == 0 {
        return Err(Error::ZeroMultiplier);
    }
    if base == BaseEstimator::Regression && !is_shapley(scheme) {
        return Err(Error::InvalidScheme(format!(
            "the regression base estimator targets Shapley values, not `{}`; use mc-msr",
            scheme.name()
        )));
    }
    let graph = oracle.graph();
    let d = graph.num_players();
    let sample = boundary_sampler(budget, graph, scheme, seed)?;

    if sample.all_sampled {
        let mut acc = vec![Neumaier::default(); d];
        for class in &sample.classes {
            let v = oracle.evaluate_irreducible(class.basis)?;
            let (w_in, w_out) = class_weight_pair(scheme, class);
            for i in class.basis {
                acc[i].add(v * w_in);
            }
            for i in graph.players().difference(class.closure) {
                acc[i].add(v * w_out);
            }
        }
        return Ok(Estimate {
            attribution: Attribution {
                values: acc.iter().map(Neumaier::total).collect(),
                scheme: scheme.name(),
                exact: true,
            },
            all_sampled: true,
            queries: sample.classes.len(),
            budget,
            batch_rows: 0,
        });
    }

    let classes = with_endpoints(&sample.classes, graph.find_class(Coalition::EMPTY), graph.find_class(graph.players()), budget);
    let mut valued = Vec::with_capacity(classes.len());
    for class in classes {
        valued.push((class, oracle.evaluate_irreducible(class.basis)?));
    }
    if valued.len() < 2 {
        // a single value pins down nothing about individual players
        return Ok(Estimate {
            attribution: Attribution::zeros(d, scheme, false),
            all_sampled: false,
            queries: valued.len(),
            budget,
            batch_rows: 0,
        });
    }
    let batch = simulated_sampler(&valued, multiplier * budget, &SizeWeights::shapley_kernel(d), seed)?;
    let attribution = match base {
        BaseEstimator::Regression => base_regression(&batch)?,
        BaseEstimator::McMsr => mc_msr(&batch, scheme)?,
    };
    Ok(Estimate {
        attribution: Attribution {
            scheme: scheme.name(),
            ..attribution
        },
        all_sampled: false,
        queries: valued.len(),
        budget,
        batch_rows: batch.len(),
    })
}

/// Grand-coalition class, empty class, then the sampled classes in order,
/// without duplicates and truncated to the budget.
fn with_endpoints(sampled: &[CoalitionClass], empty: CoalitionClass, full: CoalitionClass, budget: usize) -> Vec<CoalitionClass> {
    let mut out: Vec<CoalitionClass> = Vec::with_capacity(budget);
    for class in [full, empty].into_iter().chain(sampled.iter().copied()) {
        if out.len() == budget {
            break;
        }
        if !out.iter().any(|c| c.closure == class.closure) {
            out.push(class);
        }
    }
    out
}
