//! Enumeration of the closed sets of the intervention lattice.
//!
//! Starting from the grand coalition, every closed set `C` with basis `B`
//! yields the closed children `C ∖ {j}` for `j ∈ B`; every closed set of size
//! `ℓ - 1` is reached this way from some closed set of size `ℓ`. Each closed
//! set is expanded once, so the whole walk costs `O(r (d + e))`.

use std::collections::HashMap;

use serde::Serialize;

use crate::graph::{CausalGraph, Coalition, CoalitionClass};

/// All equivalence classes of a graph, in canonical order: closure size
/// descending, then closure bits ascending.
#[derive(Clone, Debug, Serialize)]
pub struct ClassInventory {
    classes: Vec<CoalitionClass>,
    #[serde(skip)]
    find_class_calls: usize,
}

impl ClassInventory {
    /// Number of classes `r`, the empty class included.
    pub fn r(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[CoalitionClass] {
        &self.classes
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CoalitionClass> {
        self.classes.iter()
    }

    /// How many graph traversals the enumeration needed; never more than `r`.
    pub fn find_class_calls(&self) -> usize {
        self.find_class_calls
    }

    pub fn simple_count(&self) -> usize {
        self.classes.iter().filter(|c| c.is_simple()).count()
    }
}

impl<'a> IntoIterator for &'a ClassInventory {
    type Item = &'a CoalitionClass;
    type IntoIter = std::slice::Iter<'a, CoalitionClass>;

    fn into_iter(self) -> Self::IntoIter {
        self.classes.iter()
    }
}

/// Enumerates every closed set of `graph` exactly once.
///
/// Subsets of a simple closed set are simple and closed, so once a simple
/// class is reached its descendants are emitted without another traversal.
pub fn all_classes(graph: &CausalGraph) -> ClassInventory {
    let d = graph.num_players();
    let mut classes = Vec::new();
    let mut calls = 0;
    // closure bits -> known to be simple (inherited from a simple ancestor)
    let mut level: HashMap<u64, bool> = HashMap::from([(Coalition::full(d).bits(), false)]);
    while !level.is_empty() {
        let mut current: Vec<(u64, bool)> = level.drain().collect();
        current.sort_unstable_by_key(|&(bits, _)| bits);
        let mut next: HashMap<u64, bool> = HashMap::new();
        for (bits, known_simple) in current {
            let closure = Coalition::from_bits(bits);
            let class = if known_simple {
                CoalitionClass { basis: closure, closure }
            } else {
                calls += 1;
                graph.find_class(closure)
            };
            debug_assert_eq!(class.closure, closure, "lattice walk produced a non-closed set");
            let simple = class.is_simple();
            for j in class.basis {
                let flag = next.entry(closure.without(j).bits()).or_insert(false);
                *flag |= simple;
            }
            classes.push(class);
        }
        level = next;
    }
    ClassInventory { classes, find_class_calls: calls }
}

/// Lower and upper lattice neighbours of a class.
///
/// Lower: the closure minus each basis member (closed by construction).
/// Upper: the closure plus each non-member (not necessarily closed).
pub fn lattice_neighbors(class: &CoalitionClass, graph: &CausalGraph) -> (Vec<Coalition>, Vec<Coalition>) {
    let lower = class.basis.iter().map(|j| class.closure.without(j)).collect();
    let upper = graph
        .players()
        .difference(class.closure)
        .iter()
        .map(|j| class.closure.with(j))
        .collect();
    (lower, upper)
}
