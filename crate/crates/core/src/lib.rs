//! Causal attribution over the intervention lattice of a DAG.
//!
//! Interventional coalition games only depend on a coalition through its
//! *basis*, the members that still reach the target after cutting their
//! incoming edges. Coalitions sharing a basis form an interval of the
//! boolean lattice, so semivalues can be summed class by class instead of
//! coalition by coalition.

pub mod error;
pub mod estimators;
pub mod exact;
pub mod format;
pub mod games;
pub mod graph;
pub mod identify;
pub mod lattice;
pub mod weights;

pub use error::{Error, Result};
pub use estimators::{do_estimator, BaseEstimator, Estimate, EstimatorConfig};
pub use exact::{brute_force_values, exact_values, interaction_index, interactions, n_shapley, Attribution, InteractionAttribution};
pub use format::{GameSpec, GraphSpec, LoadedGame};
pub use games::{FnGame, Game, LinearScm, MonteCarloScm, TableGame, ValueOracle};
pub use graph::{latent_projection, Admg, CausalGraph, Coalition, CoalitionClass, LatentDag};
pub use identify::{c_components, do_shapley_identifiable, id_identifiable, CComponentPartition, Identifiability};
pub use lattice::{all_classes, ClassInventory};
pub use weights::{class_weight, mean_abs_weight, SchemeKind, WeightScheme};
