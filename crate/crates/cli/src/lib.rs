//! Command-line front end for `doshap-core`.

pub mod args;
pub mod error;
pub mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use doshap_core::estimators::{do_estimator, EstimatorConfig};
use doshap_core::exact::{interactions, n_shapley};
use doshap_core::format::parse_coalition;
use doshap_core::graph::Coalition;
use doshap_core::{
    all_classes, c_components, do_shapley_identifiable, exact_values, Admg, CausalGraph, ClassInventory, GameSpec,
    GraphSpec, LoadedGame, TableGame, ValueOracle, WeightScheme,
};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use args::{ClassesArgs, Command, EstimateArgs, ExactArgs, GameArgs, IdentifyArgs, InteractionArgs, ReportArgs};
pub use error::{CliError, ErrorKind};
use output::{float_text, Report};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))
}

pub fn load_graph(path: &Path) -> Result<Admg, CliError> {
    let spec = GraphSpec::from_json(&read(path)?).map_err(CliError::from_load)?;
    spec.build().map_err(CliError::from_load)
}

pub fn load_game(path: &Path, graph: &CausalGraph) -> Result<LoadedGame, CliError> {
    let spec = GameSpec::from_json(&read(path)?).map_err(CliError::from_load)?;
    spec.build(graph).map_err(CliError::from_load)
}

/// Names of a coalition's members, sorted.
fn names(graph: &CausalGraph, s: Coalition) -> Vec<String> {
    let mut out: Vec<String> = s.iter().map(|i| graph.name(i).to_string()).collect();
    out.sort();
    out
}

fn key(graph: &CausalGraph, s: Coalition) -> String {
    names(graph, s).join(",")
}

/// Per-player values by name, pruned players fixed at zero.
fn named_values(graph: &CausalGraph, values: &[f64]) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = graph.player_names().iter().cloned().zip(values.iter().copied()).collect();
    for p in graph.pruned() {
        out.insert(p.clone(), 0.0);
    }
    out
}

fn value_rows(values: &BTreeMap<String, f64>) -> Vec<Vec<String>> {
    let mut table = vec![vec!["player".to_string(), "value".to_string()]];
    table.extend(values.iter().map(|(k, v)| vec![k.clone(), float_text(*v)]));
    table
}

fn base_report(graph: &CausalGraph, command: &str, seed: Option<u64>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("d".into(), json!(graph.num_players()));
    m.insert("seed".into(), json!(seed));
    m.insert("target".into(), json!(graph.target_name()));
    m.insert("pruned".into(), json!(graph.pruned()));
    m
}

/// Fails with the non-identifiable exit code if any singleton query fails.
fn check_identifiable(admg: &Admg) -> Result<(), CliError> {
    let verdict = do_shapley_identifiable(admg);
    if verdict.identifiable {
        return Ok(());
    }
    let failing: Vec<&str> = verdict.failing.iter().map(|&j| admg.graph().name(j)).collect();
    let mut err = CliError::new(ErrorKind::NotIdentifiable, "some coalition values are not identifiable");
    err.details = Some(json!({ "failing_singletons": failing }));
    Err(err)
}

/// Table games must cover every basis; other games are total.
fn check_table(game: &LoadedGame, inventory: &ClassInventory, graph: &CausalGraph) -> Result<(), CliError> {
    let LoadedGame::Table(table) = game else {
        return Ok(());
    };
    let missing = missing_keys(table, inventory, graph);
    if missing.is_empty() {
        return Ok(());
    }
    let mut err = CliError::validation(format!("table game is missing {} basis value(s)", missing.len()));
    err.details = Some(json!({ "missing_bases": missing }));
    Err(err)
}

fn missing_keys(table: &TableGame, inventory: &ClassInventory, graph: &CausalGraph) -> Vec<String> {
    table.missing_bases(inventory).into_iter().map(|s| key(graph, s)).collect()
}

struct Loaded {
    admg: Admg,
    game: LoadedGame,
    scheme: WeightScheme,
}

fn load(args: &GameArgs) -> Result<Loaded, CliError> {
    let admg = load_graph(&args.graph)?;
    if args.require_identifiable {
        check_identifiable(&admg)?;
    }
    let game = load_game(&args.game, admg.graph())?;
    let scheme = WeightScheme::new(args.scheme, admg.graph().num_players())?;
    Ok(Loaded { admg, game, scheme })
}

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Classes(a) => classes(a),
        Command::Exact(a) => exact(a),
        Command::Estimate(a) => estimate(a),
        Command::Identify(a) => identify(a),
        Command::Interactions(a) => interaction_report(a),
        Command::Report(a) => plot_data(a),
    }
}

/// Runs and writes the report where the command asks.
pub fn execute(command: &Command) -> Result<(), CliError> {
    let report = run(command)?;
    let output = match command {
        Command::Classes(a) => &a.output,
        Command::Exact(a) => &a.output,
        Command::Estimate(a) => &a.output,
        Command::Identify(a) => &a.output,
        Command::Interactions(a) => &a.output,
        Command::Report(a) => &a.output,
    };
    report.emit(output.format, output.out.as_deref())
}

fn classes(args: &ClassesArgs) -> Result<Report, CliError> {
    let admg = load_graph(&args.graph)?;
    let g = admg.graph();
    let inv = all_classes(g);
    let records: Vec<Value> = inv
        .iter()
        .map(|c| json!({ "basis": names(g, c.basis), "closure": names(g, c.closure), "simple": c.is_simple() }))
        .collect();
    let mut m = base_report(g, "classes", args.seed);
    m.insert("r".into(), json!(inv.r()));
    m.insert("queries".into(), json!(0));
    m.insert("find_class_calls".into(), json!(inv.find_class_calls()));
    m.insert("classes".into(), Value::Array(records));
    let mut table = vec![vec!["basis".to_string(), "closure".to_string(), "simple".to_string()]];
    for c in &inv {
        table.push(vec![key(g, c.basis), key(g, c.closure), c.is_simple().to_string()]);
    }
    Ok(Report {
        json: Value::Object(m),
        table,
    })
}

fn exact(args: &ExactArgs) -> Result<Report, CliError> {
    let Loaded { admg, game, scheme } = load(&args.game)?;
    let g = admg.graph();
    let inv = all_classes(g);
    check_table(&game, &inv, g)?;
    let oracle = ValueOracle::new(g, &game);
    let phi = exact_values(&inv, &oracle, &scheme)?;
    let total = oracle.evaluate(g.players())? - oracle.evaluate(Coalition::EMPTY)?;
    let values = named_values(g, &phi.values);
    let mut m = base_report(g, "exact", args.seed);
    m.insert("r".into(), json!(inv.r()));
    m.insert("queries".into(), json!(oracle.queries()));
    m.insert("scheme".into(), json!(scheme.name()));
    m.insert("efficiency_gap".into(), json!(phi.sum() - total));
    m.insert("values".into(), json!(values));
    Ok(Report {
        json: Value::Object(m),
        table: value_rows(&values),
    })
}

fn estimate(args: &EstimateArgs) -> Result<Report, CliError> {
    let Loaded { admg, game, scheme } = load(&args.game)?;
    let g = admg.graph();
    let oracle = ValueOracle::new(g, &game);
    let config = EstimatorConfig {
        budget: args.budget,
        base: args.base,
        multiplier: args.multiplier,
        seed: args.seed,
    };
    let est = do_estimator(&oracle, &scheme, config)?;
    let values = named_values(g, &est.attribution.values);
    let mut m = base_report(g, "estimate", Some(args.seed));
    m.insert("queries".into(), json!(oracle.queries()));
    m.insert("budget".into(), json!(args.budget));
    m.insert("all_sampled".into(), json!(est.all_sampled));
    m.insert("base".into(), json!(args.base.to_string()));
    m.insert("multiplier".into(), json!(args.multiplier));
    m.insert("batch_rows".into(), json!(est.batch_rows));
    m.insert("scheme".into(), json!(scheme.name()));
    m.insert("values".into(), json!(values));
    Ok(Report {
        json: Value::Object(m),
        table: value_rows(&values),
    })
}

fn identify(args: &IdentifyArgs) -> Result<Report, CliError> {
    let admg = load_graph(&args.graph)?;
    let g = admg.graph();
    let verdict = do_shapley_identifiable(&admg);
    let failing: Vec<&str> = verdict.failing.iter().map(|&j| g.name(j)).collect();
    let components: Vec<Vec<&str>> = c_components(&admg)
        .components
        .iter()
        .map(|c| c.iter().map(|&v| g.name(v)).collect())
        .collect();
    let mut m = base_report(g, "identify", args.seed);
    m.insert("queries".into(), json!(0));
    m.insert("identifiable".into(), json!(verdict.identifiable));
    m.insert("failing_singletons".into(), json!(failing));
    m.insert("c_components".into(), json!(components));
    let mut table = vec![vec!["player".to_string(), "identifiable".to_string()]];
    for (j, name) in g.player_names().iter().enumerate() {
        table.push(vec![name.clone(), (!verdict.failing.contains(&j)).to_string()]);
    }
    Ok(Report {
        json: Value::Object(m),
        table,
    })
}

fn interaction_report(args: &InteractionArgs) -> Result<Report, CliError> {
    let Loaded { admg, game, .. } = load(&args.game)?;
    let g = admg.graph();
    let d = g.num_players();
    let inv = all_classes(g);
    check_table(&game, &inv, g)?;
    let oracle = ValueOracle::new(g, &game);
    let phi = interactions(&inv, &oracle, args.order, d)?;
    let ns = n_shapley(&phi, args.order, d, oracle.evaluate(Coalition::EMPTY)?)?;
    let named = |m: &BTreeMap<Coalition, f64>| -> BTreeMap<String, f64> { m.iter().map(|(u, v)| (key(g, *u), *v)).collect() };
    let (phi_named, ns_named) = (named(&phi), named(&ns.values));
    let mut m = base_report(g, "interactions", args.seed);
    m.insert("r".into(), json!(inv.r()));
    m.insert("queries".into(), json!(oracle.queries()));
    m.insert("order".into(), json!(args.order));
    m.insert("interactions".into(), json!(phi_named));
    m.insert("n_shapley".into(), json!(ns_named));
    let mut table = vec![vec!["coalition".to_string(), "interaction".to_string(), "n_shapley".to_string()]];
    for (k, v) in &ns_named {
        let inter = phi_named.get(k).map(|x| float_text(*x)).unwrap_or_default();
        table.push(vec![k.clone(), inter, float_text(*v)]);
    }
    Ok(Report {
        json: Value::Object(m),
        table,
    })
}

/// `‖φ̂ − φ‖² / ‖φ‖²`, or the plain squared error when `φ = 0`.
pub fn relative_mse(estimate: &[f64], truth: &[f64]) -> f64 {
    let err: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum();
    let norm: f64 = truth.iter().map(|b| b * b).sum();
    if norm > 0.0 {
        err / norm
    } else {
        err
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn plot_data(args: &ReportArgs) -> Result<Report, CliError> {
    if !args.plot_data {
        return Err(CliError::parse("report needs a projection; pass --plot-data"));
    }
    if args.seeds == 0 {
        return Err(CliError::validation("--seeds must be at least 1"));
    }
    let ratios: Vec<f64> = if args.ratios.is_empty() {
        (1..=10).map(|k| k as f64 / 10.0).collect()
    } else {
        args.ratios.clone()
    };
    if let Some(bad) = ratios.iter().find(|r| !r.is_finite() || **r <= 0.0) {
        return Err(CliError::validation(format!("budget ratio {bad} must be positive")));
    }
    let Loaded { admg, game, scheme } = load(&args.game)?;
    let g = admg.graph();
    let inv = all_classes(g);
    check_table(&game, &inv, g)?;
    let oracle = ValueOracle::new(g, &game);
    let truth = exact_values(&inv, &oracle, &scheme)?.values;
    let r = inv.r();
    let mut rows = Vec::new();
    let mut table = vec![["ratio", "m", "median_relative_mse", "mean_relative_mse"].map(String::from).to_vec()];
    for &ratio in &ratios {
        let m = ((ratio * r as f64).round() as usize).max(1);
        let errors: Vec<f64> = (0..args.seeds)
            .into_par_iter()
            .map(|k| {
                let config = EstimatorConfig {
                    budget: m,
                    base: args.base,
                    multiplier: args.multiplier,
                    seed: args.seed.wrapping_add(k),
                };
                do_estimator(&oracle, &scheme, config).map(|e| relative_mse(&e.attribution.values, &truth))
            })
            .collect::<Result<_, _>>()?;
        let mean = errors.iter().sum::<f64>() / errors.len() as f64;
        let med = median(errors);
        rows.push(json!({ "ratio": ratio, "m": m, "median_relative_mse": med, "mean_relative_mse": mean }));
        table.push(vec![float_text(ratio), m.to_string(), float_text(med), float_text(mean)]);
    }
    let mut out = base_report(g, "report", Some(args.seed));
    out.insert("r".into(), json!(r));
    out.insert("queries".into(), json!(oracle.queries()));
    out.insert("seeds".into(), json!(args.seeds));
    out.insert("base".into(), json!(args.base.to_string()));
    out.insert("multiplier".into(), json!(args.multiplier));
    out.insert("scheme".into(), json!(scheme.name()));
    out.insert("rows".into(), Value::Array(rows));
    Ok(Report {
        json: Value::Object(out),
        table,
    })
}

/// Applies `DOSHAP_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("DOSHAP_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::parse(format!("DOSHAP_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::validation(e.to_string()))
}

/// Resolves a comma-joined list of player names against `graph`.
pub fn coalition_from_names(graph: &CausalGraph, text: &str) -> Result<Option<Coalition>, CliError> {
    parse_coalition(text, graph).map_err(CliError::from_load)
}
