mod common;

use std::collections::{BTreeMap, HashMap, HashSet};

use common::*;
use doshap_core::estimators::{
    boundary_sampler, class_sampler, do_estimator, simulated_sampler, BaseEstimator, EstimatorConfig, SizeWeights,
};
use doshap_core::exact::{interactions, n_shapley, n_shapley_with, BernoulliConvention};
use doshap_core::games::linear_scm_mean;
use doshap_core::graph::Coalition;
use doshap_core::identify::{id_identifiable, id_identifiable_with_depth, non_ancestors_after_cut};
use doshap_core::weights::SchemeKind;
use doshap_core::{
    all_classes, brute_force_values, exact_values, Admg, CausalGraph, FnGame, LinearScm, TableGame, ValueOracle,
    WeightScheme,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, d: usize) -> (CausalGraph, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = rng.random_range(0.1..0.7);
    (random_dag(&mut rng, d, density), rng)
}

fn random_table(g: &CausalGraph, rng: &mut ChaCha8Rng) -> TableGame {
    let values = all_classes(g).iter().map(|c| (c.basis, rng.random_range(-1.0..1.0))).collect();
    TableGame::new(values)
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn find_class_matches_path_enumeration(seed: u64, d in 1usize..=7) {
        let (g, _) = instance(seed, d);
        for bits in 0..1u64 << d {
            let s = Coalition::from_bits(bits);
            let class = g.find_class(s);
            prop_assert_eq!((class.basis, class.closure), path_class(&g, s));
            prop_assert!(class.basis.is_subset(s) && s.is_subset(class.closure));
            // the class is a fixed point of its own endpoints
            prop_assert_eq!(g.find_class(class.basis), class);
            prop_assert_eq!(g.find_class(class.closure), class);
        }
        prop_assert_eq!(g.ancestors_of_target(Coalition::EMPTY), g.players());
    }

    #[test]
    fn classes_tile_the_powerset(seed: u64, d in 1usize..=8) {
        let (g, _) = instance(seed, d);
        let inv = all_classes(&g);
        let mut hits = vec![0u32; 1 << d];
        for class in &inv {
            for extra in class.closure.difference(class.basis).subsets() {
                hits[class.basis.union(extra).bits() as usize] += 1;
            }
        }
        prop_assert!(hits.iter().all(|&h| h == 1));
        prop_assert!(inv.find_class_calls() <= inv.r());
    }

    #[test]
    fn exact_matches_brute_force_for_every_scheme(seed: u64, d in 1usize..=8) {
        let (g, mut rng) = instance(seed, d);
        let table = random_table(&g, &mut rng);
        let inv = all_classes(&g);
        let values = value_table(&g, &table);
        for kind in [SchemeKind::Shapley, SchemeKind::Banzhaf, SchemeKind::Beta { alpha: 4.0, beta: 1.0 }] {
            let scheme = WeightScheme::new(kind, d).unwrap();
            let oracle = ValueOracle::new(&g, &table);
            let exact = exact_values(&inv, &oracle, &scheme).unwrap();
            prop_assert_eq!(oracle.queries(), inv.r());
            let brute = brute_semivalue(&values, d, |s| scheme.p(s as isize));
            prop_assert!(close(&exact.values, &brute, 1e-12), "{kind}: {:?} vs {:?}", exact.values, brute);
        }
        let shapley = exact_values(&inv, &ValueOracle::new(&g, &table), &WeightScheme::shapley(d)).unwrap();
        let gap = shapley.sum() - (values[(1 << d) - 1] - values[0]);
        prop_assert!(gap.abs() <= 1e-10 * values[(1 << d) - 1].abs().max(1.0));
    }

    #[test]
    fn cache_never_changes_values(seed: u64, d in 1usize..=8) {
        let (g, mut rng) = instance(seed, d);
        let table = random_table(&g, &mut rng);
        let cached = ValueOracle::new(&g, &table);
        let plain = ValueOracle::uncached(&g, &table);
        for _ in 0..100 {
            let s = Coalition::from_bits(rng.random_range(0..1u64 << d));
            prop_assert_eq!(cached.evaluate(s).unwrap().to_bits(), plain.evaluate(s).unwrap().to_bits());
        }
    }

    #[test]
    fn linear_scm_is_constant_on_classes(seed: u64, d in 1usize..=7) {
        let (g, mut rng) = instance(seed, d);
        let coefficients: Vec<_> = g.edges().map(|(a, b)| (a, b, rng.random_range(-2.0..2.0))).collect();
        let intercepts = (0..=d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let scm = LinearScm::new(g.clone(), &coefficients, intercepts, x).unwrap();
        for bits in 0..1u64 << d {
            let s = Coalition::from_bits(bits);
            let class = g.find_class(s);
            let v = linear_scm_mean(&scm, s);
            prop_assert!((v - linear_scm_mean(&scm, class.closure)).abs() < 1e-9);
            prop_assert!((v - linear_scm_mean(&scm, class.basis)).abs() < 1e-9);
        }
    }

    #[test]
    fn interactions_match_the_discrete_derivative_index(seed: u64, d in 1usize..=6) {
        let (g, mut rng) = instance(seed, d);
        let table = random_table(&g, &mut rng);
        let values = value_table(&g, &table);
        let inv = all_classes(&g);
        let order = d.min(3);
        let got = interactions(&inv, &ValueOracle::new(&g, &table), order, d).unwrap();
        for (u, v) in &got {
            let brute = brute_interaction(&values, d, u.bits());
            prop_assert!((v - brute).abs() <= 1e-10, "U={u:?}: {v} vs {brute}");
        }
        // singletons are the Shapley values
        let phi = brute_shapley(&values, d);
        for i in 0..d {
            prop_assert!((got[&Coalition::singleton(i)] - phi[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn n_shapley_efficiency_and_mobius(seed: u64, d in 1usize..=6) {
        let (g, mut rng) = instance(seed, d);
        let table = random_table(&g, &mut rng);
        let values = value_table(&g, &table);
        let inv = all_classes(&g);
        let all = interactions(&inv, &ValueOracle::new(&g, &table), d, d).unwrap();
        let full = values[(1 << d) - 1];
        for n in 1..=d {
            let ns = n_shapley(&all, n, d, values[0]).unwrap();
            prop_assert!((ns.total() - full).abs() <= 1e-10 * full.abs().max(1.0), "n={n}");
            prop_assert!(ns.values.keys().all(|u| u.len() <= n));
        }
        let top = n_shapley(&all, d, d, values[0]).unwrap();
        for (u, v) in &top.values {
            if !u.is_empty() {
                prop_assert!((v - mobius(&values, u.bits())).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn boundary_sampler_is_distinct_and_budgeted(seed: u64, d in 1usize..=7) {
        let (g, _) = instance(seed, d);
        let r = all_classes(&g).r();
        let scheme = WeightScheme::shapley(d);
        for m in [1, r / 2 + 1, r, r + 3] {
            let s = boundary_sampler(m, &g, &scheme, seed).unwrap();
            let keys: HashSet<_> = s.classes.iter().map(|c| c.closure).collect();
            prop_assert_eq!(keys.len(), s.classes.len());
            prop_assert_eq!(s.classes.len(), m.min(r));
            prop_assert_eq!(s.all_sampled, m >= r);
        }
    }

    #[test]
    fn do_estimator_query_law(seed: u64, d in 1usize..=6) {
        let (g, mut rng) = instance(seed, d);
        let table = random_table(&g, &mut rng);
        let r = all_classes(&g).r();
        let scheme = WeightScheme::shapley(d);
        for m in 1..=2 * r {
            let oracle = ValueOracle::new(&g, &table);
            let est = do_estimator(&oracle, &scheme, EstimatorConfig::new(m, seed ^ m as u64)).unwrap();
            prop_assert_eq!(oracle.queries(), m.min(r));
            prop_assert!(est.attribution.values.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn simulated_rows_stay_in_their_classes(seed: u64, d in 2usize..=7) {
        let (g, mut rng) = instance(seed, d);
        let r = all_classes(&g).r();
        let m = rng.random_range(1..=r);
        let sampled = boundary_sampler(m, &g, &WeightScheme::shapley(d), seed).unwrap();
        let valued: Vec<_> = sampled.classes.iter().map(|c| (*c, 1.0)).collect();
        let batch = simulated_sampler(&valued, 4 * m, &SizeWeights::shapley_kernel(d), seed).unwrap();
        let mut seen = HashSet::new();
        for row in &batch.rows {
            prop_assert!(valued[row.class].0.contains(row.coalition));
            prop_assert!(row.probability > 0.0 && row.probability <= 1.0);
            prop_assert!(seen.insert(row.coalition));
        }
    }

    #[test]
    fn class_sampler_finds_everything(seed: u64, d in 1usize..=6) {
        let (g, _) = instance(seed, d);
        let inv = all_classes(&g);
        let got = class_sampler(inv.r(), &g, &WeightScheme::shapley(d), seed).unwrap();
        let a: HashSet<_> = got.iter().map(|c| c.closure).collect();
        let b: HashSet<_> = inv.iter().map(|c| c.closure).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn observed_dags_are_always_identifiable(seed: u64, d in 1usize..=4) {
        let (g, _) = instance(seed, d);
        let n = d + 1;
        let admg = Admg::new(g, &[]).unwrap();
        // every disjoint (T, S) pair: each node goes to T, S, or neither
        for code in 0..3usize.pow(n as u32) {
            let (mut t, mut s, mut c) = (Vec::new(), Vec::new(), code);
            for v in 0..n {
                match c % 3 {
                    1 => t.push(v),
                    2 => s.push(v),
                    _ => {}
                }
                c /= 3;
            }
            prop_assert!(id_identifiable(&admg, &t, &s).unwrap());
        }
    }

    #[test]
    fn singleton_criterion(seed: u64, d in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let admg = random_admg(&mut rng, d, 0.4, 0.3);
        let y = d;
        let singles: Vec<bool> = (0..d).map(|j| id_identifiable(&admg, &[y], &[j]).unwrap()).collect();
        for bits in 0..1u64 << d {
            let s: Vec<usize> = Coalition::from_bits(bits).iter().collect();
            let (ok, depth) = id_identifiable_with_depth(&admg, &[y], &s).unwrap();
            prop_assert!(depth <= 3 * d + 3, "depth {depth} for d={d}");
            if !ok {
                let mut candidates = s.clone();
                candidates.extend(non_ancestors_after_cut(&admg, &s).unwrap());
                prop_assert!(candidates.iter().any(|&j| !singles[j]));
            }
            if singles.iter().all(|&b| b) {
                prop_assert!(ok);
            }
        }
    }

    #[test]
    fn ancestral_restriction_keeps_the_verdict(seed: u64, d in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let admg = random_admg(&mut rng, d, 0.4, 0.3);
        let g = admg.graph();
        // every node already reaches the target, so the restriction to
        // An(Y) is the identity on players; restrict to An(Y) ∩ An(T') for
        // a random extra query instead
        let t = rng.random_range(0..=d);
        let anc = ancestors_in(g, t);
        let names: Vec<&str> = (0..d).filter(|v| anc.contains(v)).map(|v| g.name(v)).collect();
        if anc.contains(&d) || t == d {
            return Ok(());
        }
        let edges: Vec<(&str, &str)> = g
            .edges()
            .filter(|(a, b)| anc.contains(a) && anc.contains(b))
            .map(|(a, b)| (g.name(a), g.name(b)))
            .collect();
        let bidirected: Vec<(&str, &str)> = admg
            .bidirected()
            .iter()
            .filter(|(a, b)| anc.contains(a) && anc.contains(b))
            .map(|&(a, b)| (g.name(a), g.name(b)))
            .collect();
        // re-root the ancestral subgraph at t so it forms a valid graph
        let players: Vec<&str> = names.iter().copied().filter(|n| *n != g.name(t)).collect();
        let sub = Admg::from_named(&players, g.name(t), &edges, &bidirected).unwrap();
        let sub_t = sub.graph().target();
        for bits in 0..1u64 << d {
            let s: Vec<usize> = Coalition::from_bits(bits).iter().filter(|&v| v != t).collect();
            let full = id_identifiable(&admg, &[t], &s).unwrap();
            let mapped: Vec<usize> = s
                .iter()
                .filter(|&&v| anc.contains(&v))
                .filter_map(|&v| sub.graph().node_index(g.name(v)))
                .collect();
            prop_assert_eq!(full, id_identifiable(&sub, &[sub_t], &mapped).unwrap());
        }
    }
}

fn ancestors_in(g: &CausalGraph, t: usize) -> HashSet<usize> {
    let mut seen = HashSet::from([t]);
    let mut stack = vec![t];
    while let Some(v) = stack.pop() {
        for &p in g.parents(v) {
            if seen.insert(p) {
                stack.push(p);
            }
        }
    }
    seen
}

#[test]
fn plus_half_bernoulli_breaks_efficiency() {
    // a pure pair interaction on three players
    let g = star(3);
    let game = |s: Coalition| if s.contains(0) && s.contains(1) { 1.0 } else { 0.0 };
    let inv = all_classes(&g);
    let all = interactions(&inv, &ValueOracle::new(&g, FnGame(game)), 3, 3).unwrap();
    let minus = n_shapley_with(&all, 2, 3, 0.0, BernoulliConvention::Minus).unwrap();
    let plus = n_shapley_with(&all, 2, 3, 0.0, BernoulliConvention::Plus).unwrap();
    assert!((minus.total() - 1.0).abs() < 1e-12);
    assert!((plus.total() - 1.0).abs() > 0.5);
}

#[test]
fn chain3_table_example() {
    let g = chain(3);
    let table = TableGame::new(HashMap::from([
        (Coalition::EMPTY, 0.0),
        (Coalition::singleton(0), 1.0),
        (Coalition::singleton(1), 2.0),
        (Coalition::singleton(2), 3.0),
    ]));
    let oracle = ValueOracle::new(&g, &table);
    assert_eq!(oracle.evaluate(Coalition::from_players([0, 1])).unwrap(), 2.0);
    let phi = exact_values(&all_classes(&g), &oracle, &WeightScheme::shapley(3)).unwrap();
    let truth = brute_shapley(&value_table(&g, &table), 3);
    assert!(close(&phi.values, &truth, 1e-12));
    let brute = brute_force_values(&ValueOracle::new(&g, &table), 3, &WeightScheme::shapley(3)).unwrap();
    assert!(close(&brute.values, &truth, 1e-12));
}

#[test]
fn chain3_estimates_improve_with_budget() {
    let g = chain(3);
    let table = TableGame::new(HashMap::from([
        (Coalition::EMPTY, 0.0),
        (Coalition::singleton(0), 1.0),
        (Coalition::singleton(1), 2.0),
        (Coalition::singleton(2), 3.0),
    ]));
    let truth = brute_shapley(&value_table(&g, &table), 3);
    let scheme = WeightScheme::shapley(3);
    let mean_mse = |m: usize| -> f64 {
        (0..100)
            .map(|seed| {
                let est = do_estimator(&ValueOracle::new(&g, &table), &scheme, EstimatorConfig::new(m, seed)).unwrap();
                relative_mse(&est.attribution.values, &truth)
            })
            .sum::<f64>()
            / 100.0
    };
    let (m1, m2, m3) = (mean_mse(1), mean_mse(2), mean_mse(3));
    assert!(m1 > m2 && m2 > m3, "{m1} {m2} {m3}");
}

#[test]
fn mc_msr_supports_other_semivalues() {
    let g = diamond();
    let table: TableGame = {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        random_table(&g, &mut rng)
    };
    let scheme = WeightScheme::banzhaf(4);
    let r = all_classes(&g).r();
    let config = EstimatorConfig {
        base: BaseEstimator::McMsr,
        ..EstimatorConfig::new(r, 0)
    };
    let est = do_estimator(&ValueOracle::new(&g, &table), &scheme, config).unwrap();
    let truth = brute_banzhaf(&value_table(&g, &table), 4);
    assert!(close(&est.attribution.values, &truth, 1e-12));
    let partial = EstimatorConfig {
        base: BaseEstimator::McMsr,
        ..EstimatorConfig::new(r - 2, 0)
    };
    let est = do_estimator(&ValueOracle::new(&g, &table), &scheme, partial).unwrap();
    assert!(est.attribution.values.iter().all(|v| v.is_finite()));
}

#[test]
fn class_sampler_completion_is_uniform() {
    // on STAR3 every size-1 class is symmetric; with a budget of one and the
    // player and side marginalised, the first draw must be uniform within
    // each size level
    let g = star(3);
    let scheme = WeightScheme::shapley(3);
    let runs = 10_000;
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for seed in 0..runs {
        let got = class_sampler(1, &g, &scheme, seed).unwrap();
        *counts.entry(got[0].closure.bits()).or_default() += 1;
    }
    for size in 0..=3u32 {
        let group: Vec<usize> = counts.iter().filter(|(b, _)| b.count_ones() == size).map(|(_, &n)| n).collect();
        let total: usize = group.iter().sum();
        let k = group.len() as f64;
        if group.len() < 2 {
            continue;
        }
        let p = 1.0 / k;
        let sigma = (total as f64 * p * (1.0 - p)).sqrt();
        for &n in &group {
            assert!((n as f64 - total as f64 * p).abs() <= 3.0 * sigma, "size {size}: {group:?}");
        }
    }
}
