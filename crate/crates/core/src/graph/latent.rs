use std::collections::{BTreeSet, HashMap};

use super::{is_acyclic, CausalGraph, NodeMask};
use crate::error::{Error, Result};

/// Acyclic directed mixed graph: a [`CausalGraph`] plus bidirected edges.
///
/// Node indices follow the underlying graph: players `0..d`, target `d`.
#[derive(Clone, Debug)]
pub struct Admg {
    graph: CausalGraph,
    bidirected: Vec<(usize, usize)>,
    /// Bidirected neighbours per node.
    spouses: Vec<NodeMask>,
}

impl Admg {
    /// Wraps `graph` with bidirected pairs given as node indices.
    pub fn new(graph: CausalGraph, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = graph.num_players() + 1;
        let mut set = BTreeSet::new();
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::PlayerOutOfRange { index: a.max(b), players: n - 1 });
            }
            if a == b {
                return Err(Error::InvalidGraph(format!(
                    "bidirected edge must join distinct nodes, got `{}` twice",
                    graph.name(a)
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut spouses = vec![0; n];
        for &(a, b) in &set {
            spouses[a] |= 1 << b;
            spouses[b] |= 1 << a;
        }
        Ok(Admg {
            graph,
            bidirected: set.into_iter().collect(),
            spouses,
        })
    }

    /// Builds from names. Bidirected pairs touching pruned players are dropped.
    pub fn from_named<P: AsRef<str>, E: AsRef<str>, B: AsRef<str>>(
        players: &[P],
        target: &str,
        edges: &[(E, E)],
        bidirected: &[(B, B)],
    ) -> Result<Self> {
        let declared: BTreeSet<&str> = players.iter().map(AsRef::as_ref).chain([target]).collect();
        let graph = CausalGraph::new(players, target, edges)?;
        let mut pairs = Vec::new();
        for (a, b) in bidirected {
            let (a, b) = (a.as_ref(), b.as_ref());
            for n in [a, b] {
                if !declared.contains(n) {
                    return Err(Error::UnknownNode(n.to_string()));
                }
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("bidirected edge must join distinct nodes, got `{a}` twice")));
            }
            if let (Some(i), Some(j)) = (graph.node_index(a), graph.node_index(b)) {
                pairs.push((i, j));
            }
        }
        Admg::new(graph, &pairs)
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    /// Unordered bidirected pairs `(a, b)` with `a < b`, sorted.
    pub fn bidirected(&self) -> &[(usize, usize)] {
        &self.bidirected
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_players() + 1
    }

    pub(crate) fn spouses(&self, v: usize) -> NodeMask {
        self.spouses[v]
    }

    pub(crate) fn parent_mask(&self, v: usize) -> NodeMask {
        self.graph.parents(v).iter().fold(0, |m, &p| m | (1 << p))
    }

    pub fn has_bidirected(&self, a: usize, b: usize) -> bool {
        self.spouses[a] & (1 << b) != 0
    }
}

/// A DAG whose nodes are partly unobserved, prior to latent projection.
#[derive(Clone, Debug, Default)]
pub struct LatentDag {
    pub nodes: Vec<String>,
    pub target: String,
    pub edges: Vec<(String, String)>,
    pub latent: BTreeSet<String>,
}

/// Projects out the latent nodes of `dag`.
///
/// Measured `a → b` survives when `b` is reachable from `a` through latent
/// intermediates only; measured `a ↔ b` appears when some latent node reaches
/// both through latent-only directed paths.
pub fn latent_projection(dag: &LatentDag) -> Result<Admg> {
    let mut index = HashMap::new();
    let mut names: Vec<&str> = Vec::new();
    for name in dag.nodes.iter().map(String::as_str).chain([dag.target.as_str()]) {
        if !index.contains_key(name) {
            index.insert(name, names.len());
            names.push(name);
        }
    }
    for l in &dag.latent {
        if !index.contains_key(l.as_str()) {
            return Err(Error::UnknownNode(l.clone()));
        }
    }
    if dag.latent.contains(&dag.target) {
        return Err(Error::InvalidGraph("target must be a measured node".into()));
    }
    let n = names.len();
    let mut children = vec![Vec::new(); n];
    let mut parents = vec![Vec::new(); n];
    for (a, b) in &dag.edges {
        let ia = *index.get(a.as_str()).ok_or_else(|| Error::UnknownNode(a.clone()))?;
        let ib = *index.get(b.as_str()).ok_or_else(|| Error::UnknownNode(b.clone()))?;
        if ia == ib {
            return Err(Error::Cyclic(a.clone()));
        }
        children[ia].push(ib);
        parents[ib].push(ia);
    }
    is_acyclic(&children, &parents).map_err(|v| Error::Cyclic(names[v].to_string()))?;

    let is_latent: Vec<bool> = names.iter().map(|n| dag.latent.contains(*n)).collect();

    // measured nodes reachable from v through latent-only intermediates
    let measured_reach = |start: usize| -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = children[start].clone();
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if is_latent[v] {
                stack.extend(children[v].iter().copied());
            } else {
                out.insert(v);
            }
        }
        out
    };

    let mut edges: Vec<(&str, &str)> = Vec::new();
    let mut bidirected: Vec<(&str, &str)> = Vec::new();
    for v in 0..n {
        let reach = measured_reach(v);
        if is_latent[v] {
            let r: Vec<usize> = reach.into_iter().collect();
            for (k, &a) in r.iter().enumerate() {
                for &b in &r[k + 1..] {
                    bidirected.push((names[a], names[b]));
                }
            }
        } else {
            edges.extend(reach.into_iter().map(|b| (names[v], names[b])));
        }
    }

    let players: Vec<&str> = names
        .iter()
        .enumerate()
        .filter(|&(i, name)| !is_latent[i] && *name != dag.target)
        .map(|(_, name)| *name)
        .collect();
    Admg::from_named(&players, &dag.target, &edges, &bidirected)
}
