//! Non-parametric identifiability of interventional queries on ADMGs.
//!
//! Node sets are bit masks over the ADMG's nodes (players `0..d`, target `d`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Admg, NodeMask};

fn bits(mask: NodeMask) -> impl Iterator<Item = usize> {
    (0..128).filter(move |&v| mask & (1 << v) != 0)
}

fn mask_of(nodes: &[usize], n: usize) -> Result<NodeMask> {
    nodes.iter().try_fold(0, |m, &v| {
        if v >= n {
            Err(Error::PlayerOutOfRange { index: v, players: n - 1 })
        } else {
            Ok(m | 1 << v)
        }
    })
}

/// Maximal bidirected-connected node sets, each sorted, ordered by their
/// smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CComponentPartition {
    pub components: Vec<Vec<usize>>,
}

impl CComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Index of the component holding node `v`.
    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.components.iter().position(|c| c.contains(&v))
    }
}

/// C-components of the whole ADMG.
pub fn c_components(admg: &Admg) -> CComponentPartition {
    let all = (1 << admg.num_nodes()) - 1;
    CComponentPartition {
        components: components_within(admg, all).into_iter().map(|c| bits(c).collect()).collect(),
    }
}

/// C-components of the induced subgraph on `nodes`, by smallest member.
fn components_within(admg: &Admg, nodes: NodeMask) -> Vec<NodeMask> {
    let mut left = nodes;
    let mut out = Vec::new();
    while left != 0 {
        let start = left.trailing_zeros() as usize;
        let mut comp: NodeMask = 1 << start;
        let mut frontier = comp;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = admg.spouses(v) & nodes & !comp;
            comp |= new;
            frontier |= new;
        }
        left &= !comp;
        out.push(comp);
    }
    out
}

/// Ancestors of `targets` (inclusive) inside the induced subgraph on
/// `nodes`, ignoring edges into `cut`.
fn ancestors(admg: &Admg, nodes: NodeMask, targets: NodeMask, cut: NodeMask) -> NodeMask {
    let mut seen = targets & nodes;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        if cut & (1 << v) != 0 {
            continue;
        }
        let new = admg.parent_mask(v) & nodes & !seen;
        seen |= new;
        frontier |= new;
    }
    seen
}

struct Id<'a> {
    admg: &'a Admg,
    max_depth: usize,
}

impl Id<'_> {
    fn run(&mut self, t: NodeMask, s: NodeMask, v: NodeMask, depth: usize) -> bool {
        self.max_depth = self.max_depth.max(depth);
        // 1
        if s == 0 {
            return true;
        }
        // 2
        let an = ancestors(self.admg, v, t, 0);
        if an != v {
            return self.run(t, s & an, an, depth + 1);
        }
        // 3
        let w = (v & !s) & !ancestors(self.admg, v, t, s);
        if w != 0 {
            return self.run(t, s | w, v, depth + 1);
        }
        // 4
        let rest = v & !s;
        let parts = components_within(self.admg, rest);
        if parts.len() > 1 {
            return parts.into_iter().all(|c| self.run(c, v & !c, v, depth + 1));
        }
        // 5
        let whole = components_within(self.admg, v);
        if whole.len() == 1 {
            return false;
        }
        // 6
        if whole.contains(&rest) {
            return true;
        }
        // 7
        let c = whole
            .into_iter()
            .find(|&c| rest & !c == 0)
            .expect("a C-component of G[V \\ S] lies inside one of G");
        self.run(t, s & c, c, depth + 1)
    }
}

/// Whether `P_S(T)` is identifiable, together with the deepest recursion level
/// reached.
pub fn id_identifiable_with_depth(admg: &Admg, t: &[usize], s: &[usize]) -> Result<(bool, usize)> {
    let n = admg.num_nodes();
    let (t, s) = (mask_of(t, n)?, mask_of(s, n)?);
    if t & s != 0 {
        return Err(Error::OverlappingQuery);
    }
    let mut id = Id { admg, max_depth: 0 };
    let all = (1 << n) - 1;
    let verdict = id.run(t, s, all, 0);
    Ok((verdict, id.max_depth))
}

/// Whether `P_S(T)` is identifiable from observational data on `admg`.
pub fn id_identifiable(admg: &Admg, t: &[usize], s: &[usize]) -> Result<bool> {
    id_identifiable_with_depth(admg, t, s).map(|(v, _)| v)
}

/// Outcome of the per-player identifiability check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Identifiability {
    pub identifiable: bool,
    /// Players whose singleton intervention is not identifiable.
    pub failing: Vec<usize>,
}

/// Every coalition value is identifiable iff every singleton one is, so `d`
/// calls settle all `2^d` queries.
pub fn do_shapley_identifiable(admg: &Admg) -> Identifiability {
    let graph = admg.graph();
    let y = graph.target();
    let failing: Vec<usize> = (0..graph.num_players())
        .filter(|&j| !id_identifiable(admg, &[y], &[j]).expect("player and target are distinct nodes"))
        .collect();
    Identifiability {
        identifiable: failing.is_empty(),
        failing,
    }
}

/// Nodes outside `An_{G_S̄}(Y)`, i.e. players whose value does not depend on
/// the intervention once `S` is fixed.
pub fn non_ancestors_after_cut(admg: &Admg, s: &[usize]) -> Result<Vec<usize>> {
    let n = admg.num_nodes();
    let s = mask_of(s, n)?;
    let y = admg.graph().target();
    let an = ancestors(admg, (1 << n) - 1, 1 << y, s);
    Ok(bits(!an & ((1 << n) - 1) & !(1 << y)).collect())
}
