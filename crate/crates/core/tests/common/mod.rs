//! Brute-force reference implementations and random instance generators
//! shared by the integration suites. Nothing here uses the class machinery.

#![allow(dead_code)]

use doshap_core::graph::{Admg, CausalGraph, Coalition};
use doshap_core::{Game, ValueOracle};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random DAG over `d` players and a target. Every player gets at least one
/// child, so nothing is pruned. Player labels are shuffled so index order
/// carries no topological information.
pub fn random_dag<R: Rng>(rng: &mut R, d: usize, density: f64) -> CausalGraph {
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for a in 0..d {
        let mut has_child = false;
        for b in a + 1..d {
            if rng.random::<f64>() < density {
                edges.push((order[a], order[b]));
                has_child = true;
            }
        }
        if !has_child || rng.random::<f64>() < density {
            edges.push((order[a], d));
        }
    }
    CausalGraph::from_edges(d, &edges).expect("generated DAG is valid")
}

/// Random DAG plus each bidirected pair independently with probability `p`.
pub fn random_admg<R: Rng>(rng: &mut R, d: usize, density: f64, p: f64) -> Admg {
    let g = random_dag(rng, d, density);
    let mut pairs = Vec::new();
    for a in 0..=d {
        for b in a + 1..=d {
            if rng.random::<f64>() < p {
                pairs.push((a, b));
            }
        }
    }
    Admg::new(g, &pairs).expect("pairs are in range")
}

/// `ν` at every coalition, indexed by bit pattern.
pub fn value_table<G: Game>(graph: &CausalGraph, game: G) -> Vec<f64> {
    let oracle = ValueOracle::uncached(graph, game);
    (0..1u64 << graph.num_players())
        .map(|s| oracle.evaluate(Coalition::from_bits(s)).expect("game defined everywhere"))
        .collect()
}

/// Direct semivalue sum with weight `p(|S|)` on `ν(S ∪ i) − ν(S)`.
pub fn brute_semivalue(table: &[f64], d: usize, p: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..d)
        .map(|i| {
            let bit = 1usize << i;
            (0..table.len())
                .filter(|s| s & bit == 0)
                .map(|s| p(s.count_ones() as usize) * (table[s | bit] - table[s]))
                .sum()
        })
        .collect()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        0.0
    } else {
        factorial(n) / (factorial(k) * factorial(n - k))
    }
}

/// `|S|! (d-|S|-1)! / d!`
pub fn shapley_p(d: usize) -> impl Fn(usize) -> f64 {
    move |s| factorial(s) * factorial(d - s - 1) / factorial(d)
}

pub fn brute_shapley(table: &[f64], d: usize) -> Vec<f64> {
    brute_semivalue(table, d, shapley_p(d))
}

pub fn brute_banzhaf(table: &[f64], d: usize) -> Vec<f64> {
    brute_semivalue(table, d, |_| 0.5f64.powi(d as i32 - 1))
}

/// Discrete derivative `Δ_U ν(S) = Σ_{L⊆U} (−1)^{|U|−|L|} ν(S ∪ L)`.
pub fn discrete_derivative(table: &[f64], u: u64, s: u64) -> f64 {
    let ul = u.count_ones();
    let mut total = 0.0;
    let mut l = u;
    loop {
        let sign = if (ul - l.count_ones()).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * table[(s | l) as usize];
        if l == 0 {
            break;
        }
        l = (l - 1) & u;
    }
    total
}

/// Shapley interaction index from its definition:
/// `Σ_{S⊆[d]∖U} Δ_U ν(S) / ((d−u+1) C(d−u, |S|))`.
pub fn brute_interaction(table: &[f64], d: usize, u: u64) -> f64 {
    let k = u.count_ones() as usize;
    (0..1u64 << d)
        .filter(|s| s & u == 0)
        .map(|s| discrete_derivative(table, u, s) / ((d - k + 1) as f64 * binom(d - k, s.count_ones() as usize)))
        .sum()
}

/// Möbius coefficient `m(U) = Δ_U ν(∅)`.
pub fn mobius(table: &[f64], u: u64) -> f64 {
    discrete_derivative(table, u, 0)
}

/// Closure and basis by enumerating directed paths: `j` is in the basis of
/// `S` iff some path from `j` to the target avoids the rest of `S`; a
/// non-member is in the closure iff all its paths hit `S`.
pub fn path_class(g: &CausalGraph, s: Coalition) -> (Coalition, Coalition) {
    let d = g.num_players();
    // reaches[v]: v reaches the target along a path whose intermediate nodes avoid S
    fn reaches(g: &CausalGraph, v: usize, s: Coalition, d: usize) -> bool {
        g.children(v).iter().any(|&c| c == d || (!s.contains(c) && reaches(g, c, s, d)))
    }
    let mut basis = Coalition::EMPTY;
    let mut closure = s;
    for j in 0..d {
        let free = reaches(g, j, s, d);
        if s.contains(j) && free {
            basis = basis.with(j);
        }
        if !s.contains(j) && !free {
            closure = closure.with(j);
        }
    }
    (basis, closure)
}

pub fn is_closed(g: &CausalGraph, s: Coalition) -> bool {
    path_class(g, s).1 == s
}

pub fn chain(d: usize) -> CausalGraph {
    let edges: Vec<_> = (0..d).map(|i| (i, i + 1)).collect();
    CausalGraph::from_edges(d, &edges).unwrap()
}

pub fn star(d: usize) -> CausalGraph {
    let edges: Vec<_> = (0..d).map(|i| (i, d)).collect();
    CausalGraph::from_edges(d, &edges).unwrap()
}

/// `X1 → {X2, X3} → X4 → Y`.
pub fn diamond() -> CausalGraph {
    CausalGraph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]).unwrap()
}

pub fn relative_mse(estimate: &[f64], truth: &[f64]) -> f64 {
    let err: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum();
    let norm: f64 = truth.iter().map(|b| b * b).sum();
    err / norm
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
