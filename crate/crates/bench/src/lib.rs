//! Graph and game fixtures for the benchmarks.

use doshap_core::{Admg, CausalGraph, LinearScm};

/// `X0 → X1 → … → Y`.
pub fn chain(d: usize) -> CausalGraph {
    let edges: Vec<_> = (0..d).map(|i| (i, i + 1)).collect();
    CausalGraph::from_edges(d, &edges).expect("chain is acyclic")
}

/// Every player points straight at `Y`; `r = 2^d`.
pub fn star(d: usize) -> CausalGraph {
    let edges: Vec<_> = (0..d).map(|i| (i, d)).collect();
    CausalGraph::from_edges(d, &edges).expect("star is acyclic")
}

/// Each player feeds the next two and every third player also feeds `Y`,
/// giving a class count between the chain and the star.
pub fn braid(d: usize) -> CausalGraph {
    let mut edges = Vec::new();
    for i in 0..d {
        edges.push((i, (i + 1).min(d)));
        if i + 2 < d {
            edges.push((i, i + 2));
        }
        if i % 3 == 0 && i + 1 < d {
            edges.push((i, d));
        }
    }
    CausalGraph::from_edges(d, &edges).expect("braid is acyclic")
}

/// Braid with bidirected arcs between every fourth player and `Y`.
pub fn confounded_braid(d: usize) -> Admg {
    let pairs: Vec<_> = (0..d).step_by(4).map(|i| (i, d)).collect();
    Admg::new(braid(d), &pairs).expect("pairs are in range")
}

/// Linear SCM with alternating-sign coefficients on every edge.
pub fn linear_game(graph: &CausalGraph) -> LinearScm {
    let d = graph.num_players();
    let coefficients: Vec<_> = graph
        .edges()
        .enumerate()
        .map(|(k, (a, b))| (a, b, if k % 2 == 0 { 0.8 } else { -0.6 }))
        .collect();
    let intercepts = (0..=d).map(|i| 0.1 * i as f64).collect();
    let x = (0..d).map(|i| 1.0 + (i % 3) as f64).collect();
    LinearScm::new(graph.clone(), &coefficients, intercepts, x).expect("coefficients lie on edges")
}
