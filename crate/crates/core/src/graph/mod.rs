//! Causal graphs over players plus a single target node `Y`.
//!
//! Players are indexed densely `0..d`; the target always sits at index `d`.
//! Every constructor prunes players that are not ancestors of the target, so
//! all downstream code may assume `ancestors_of_target(∅) = [d]`.

mod coalition;
mod latent;

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

pub use coalition::{Coalition, Members, Subsets, MAX_PLAYERS};
pub use latent::{latent_projection, Admg, LatentDag};

use crate::error::{Error, Result};

/// Node sets over players and the target (up to 65 nodes).
pub type NodeMask = u128;

/// A directed acyclic graph whose sinks include the target `Y`.
#[derive(Clone, Debug)]
pub struct CausalGraph {
    /// Names of players `0..d` followed by the target's name at index `d`.
    names: Vec<String>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    edge_count: usize,
    topo: Vec<usize>,
    pruned: Vec<String>,
}

/// One equivalence class of the intervention lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CoalitionClass {
    pub basis: Coalition,
    pub closure: Coalition,
}

impl CoalitionClass {
    /// A class is simple when its basis and closure coincide.
    pub fn is_simple(&self) -> bool {
        self.basis == self.closure
    }

    /// Number of optional members, `|closure| - |basis|`.
    pub fn free(&self) -> usize {
        self.closure.len() - self.basis.len()
    }

    /// Whether `s` lies in the interval `[basis, closure]`.
    pub fn contains(&self, s: Coalition) -> bool {
        self.basis.is_subset(s) && s.is_subset(self.closure)
    }

    /// Number of coalitions in the class, `2^free`.
    pub fn volume(&self) -> u128 {
        1u128 << self.free()
    }
}

impl CausalGraph {
    /// Builds a graph from named nodes and edges.
    ///
    /// `players` must not include `target`. Players with no directed path to
    /// the target are dropped and listed in [`CausalGraph::pruned`].
    pub fn new<P: AsRef<str>, E: AsRef<str>>(players: &[P], target: &str, edges: &[(E, E)]) -> Result<Self> {
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(players.len() + 1);
        for name in players.iter().map(AsRef::as_ref).chain(std::iter::once(target)) {
            if index.insert(name.to_string(), names.len()).is_some() {
                return Err(Error::DuplicateNode(name.to_string()));
            }
            names.push(name.to_string());
        }
        let lookup = |n: &str| index.get(n).copied().ok_or_else(|| Error::UnknownNode(n.to_string()));
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (from, to) in edges {
            idx_edges.push((lookup(from.as_ref())?, lookup(to.as_ref())?));
        }
        Self::build(names, &idx_edges)
    }

    /// Builds a graph over players named `X1..Xd` and target `Y`.
    ///
    /// Edge endpoints are player indices; the index `d` denotes the target.
    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut names: Vec<String> = (1..=d).map(|i| format!("X{i}")).collect();
        names.push("Y".to_string());
        for &(a, b) in edges {
            if a > d || b > d {
                return Err(Error::PlayerOutOfRange { index: a.max(b), players: d });
            }
        }
        Self::build(names, edges)
    }

    fn build(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let target = n - 1;
        let mut children = vec![Vec::new(); n];
        let mut parents = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a == target {
                return Err(Error::TargetHasChildren(names[target].clone()));
            }
            if a == b {
                return Err(Error::Cyclic(names[a].clone()));
            }
            if !children[a].contains(&b) {
                children[a].push(b);
                parents[b].push(a);
            }
        }
        topological_order(&children, &parents).map_err(|v| Error::Cyclic(names[v].clone()))?;

        // prune players that cannot reach the target
        let mut reach = vec![false; n];
        let mut stack = vec![target];
        reach[target] = true;
        while let Some(v) = stack.pop() {
            for &p in &parents[v] {
                if !reach[p] {
                    reach[p] = true;
                    stack.push(p);
                }
            }
        }
        let kept: Vec<usize> = (0..n).filter(|&v| reach[v]).collect();
        let pruned: Vec<String> = (0..target).filter(|&v| !reach[v]).map(|v| names[v].clone()).collect();
        if kept.len() - 1 > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(kept.len() - 1));
        }
        let mut remap = vec![usize::MAX; n];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new;
        }
        let m = kept.len();
        let mut kept_children = vec![Vec::new(); m];
        let mut kept_parents = vec![Vec::new(); m];
        let mut edge_count = 0;
        for &old in &kept {
            for &c in &children[old] {
                if reach[c] {
                    kept_children[remap[old]].push(remap[c]);
                    kept_parents[remap[c]].push(remap[old]);
                    edge_count += 1;
                }
            }
        }
        let topo = topological_order(&kept_children, &kept_parents).expect("subgraph of a DAG is acyclic");
        Ok(CausalGraph {
            names: kept.iter().map(|&v| names[v].clone()).collect(),
            children: kept_children,
            parents: kept_parents,
            edge_count,
            topo,
            pruned,
        })
    }

    /// Number of players `d`.
    pub fn num_players(&self) -> usize {
        self.names.len() - 1
    }

    /// Index of the target node (always `d`).
    pub fn target(&self) -> usize {
        self.names.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn players(&self) -> Coalition {
        Coalition::full(self.num_players())
    }

    /// Name of node `v` (players `0..d`, target `d`).
    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    /// Player names in index order (target excluded).
    pub fn player_names(&self) -> &[String] {
        &self.names[..self.num_players()]
    }

    pub fn target_name(&self) -> &str {
        &self.names[self.target()]
    }

    /// Index of a node by name, target included.
    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Players removed at construction because they do not reach the target.
    pub fn pruned(&self) -> &[String] {
        &self.pruned
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    /// Nodes `0..=d` in a topological order (parents before children).
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Directed edges as `(from, to)` index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children.iter().enumerate().flat_map(|(a, cs)| cs.iter().map(move |&b| (a, b)))
    }

    /// Players with a directed path to `Y` once every edge *into* `removed_incoming`
    /// is deleted. The target itself is never part of the result.
    pub fn ancestors_of_target(&self, removed_incoming: Coalition) -> Coalition {
        let target = self.target();
        let mut seen: NodeMask = 1 << target;
        let mut stack = Vec::with_capacity(self.names.len());
        stack.push(target);
        while let Some(v) = stack.pop() {
            if v != target && removed_incoming.contains(v) {
                continue;
            }
            for &p in &self.parents[v] {
                if seen & (1 << p) == 0 {
                    seen |= 1 << p;
                    stack.push(p);
                }
            }
        }
        Coalition::from_bits((seen & !(1 << target)) as u64)
    }

    /// Basis and closure of `s` in `O(d + e)`.
    pub fn find_class(&self, s: Coalition) -> CoalitionClass {
        let anc = self.ancestors_of_target(s);
        CoalitionClass {
            basis: s.intersection(anc),
            closure: s.union(self.players().difference(anc)),
        }
    }

    /// Renders a coalition with player names, e.g. `{X1,X3}`.
    pub fn format_coalition(&self, s: Coalition) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Kahn's algorithm; on failure returns a node that lies on a cycle.
fn topological_order(children: &[Vec<usize>], parents: &[Vec<usize>]) -> std::result::Result<Vec<usize>, usize> {
    let n = children.len();
    let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &c in &children[v] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push_back(c);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).find(|&v| indeg[v] > 0).unwrap_or(0))
    }
}

pub(crate) fn is_acyclic(children: &[Vec<usize>], parents: &[Vec<usize>]) -> std::result::Result<(), usize> {
    topological_order(children, parents).map(|_| ())
}
