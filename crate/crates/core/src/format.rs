//! JSON descriptions of graphs and games.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{Activation, Game, LinearScm, MonteCarloScm, TableGame, DEFAULT_SAMPLES};
use crate::graph::{latent_projection, Admg, CausalGraph, Coalition, LatentDag};

/// `{"nodes": [...], "target": "Y", "edges": [[a, b], ...],
/// "bidirected": [[a, b], ...], "latent": [...]}`. The target may or may not
/// be listed among the nodes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub nodes: Vec<String>,
    pub target: String,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub bidirected: Vec<(String, String)>,
    #[serde(default)]
    pub latent: Vec<String>,
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph: {e}")))
    }

    /// Measured players in declaration order.
    fn players(&self) -> Vec<&str> {
        let latent: BTreeSet<&str> = self.latent.iter().map(String::as_str).collect();
        self.nodes
            .iter()
            .map(String::as_str)
            .filter(|n| *n != self.target && !latent.contains(n))
            .collect()
    }

    /// Builds the measured ADMG, projecting out latent nodes first.
    pub fn build(&self) -> Result<Admg> {
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateNode(n.clone()));
            }
        }
        if self.latent.is_empty() {
            return Admg::from_named(&self.players(), &self.target, &self.edges, &self.bidirected);
        }
        let projected = latent_projection(&LatentDag {
            nodes: self.nodes.clone(),
            target: self.target.clone(),
            edges: self.edges.clone(),
            latent: self.latent.iter().cloned().collect(),
        })?;
        let g = projected.graph();
        let name = |v: usize| g.name(v).to_string();
        let edges: Vec<(String, String)> = g.edges().map(|(a, b)| (name(a), name(b))).collect();
        let mut bidirected: Vec<(String, String)> = projected.bidirected().iter().map(|&(a, b)| (name(a), name(b))).collect();
        for (a, b) in &self.bidirected {
            if self.latent.contains(a) || self.latent.contains(b) {
                return Err(Error::InvalidGraph(format!("bidirected edge {a}↔{b} touches a latent node")));
            }
            bidirected.push((a.clone(), b.clone()));
        }
        // keep non-ancestor players declared so they are reported as pruned
        Admg::from_named(&self.players(), &self.target, &edges, &bidirected)
    }
}

/// A table entry given either as a JSON number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableValue {
    Number(f64),
    Text(String),
}

impl TableValue {
    fn to_f64(&self) -> Result<f64> {
        match self {
            TableValue::Number(v) => Ok(*v),
            TableValue::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidGame(format!("`{s}` is not a decimal number"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GameSpec {
    /// Keys are comma-joined player names; the empty string is `∅`.
    Table { values: BTreeMap<String, TableValue> },
    /// `coefficients[child][parent]`; intercepts, instance values and noise
    /// variances default to 0, 0 and 1. Sampling is used when `samples` or
    /// any non-identity activation is given.
    LinearScm {
        coefficients: BTreeMap<String, BTreeMap<String, f64>>,
        #[serde(default)]
        intercepts: BTreeMap<String, f64>,
        #[serde(default)]
        x: BTreeMap<String, f64>,
        #[serde(default)]
        noise: BTreeMap<String, f64>,
        #[serde(default)]
        activation: BTreeMap<String, String>,
        #[serde(default)]
        samples: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

/// A game built from a [`GameSpec`].
#[derive(Clone, Debug)]
pub enum LoadedGame {
    Table(TableGame),
    Linear(LinearScm),
    MonteCarlo(MonteCarloScm),
}

impl Game for LoadedGame {
    fn value(&self, basis: Coalition) -> Result<f64> {
        match self {
            LoadedGame::Table(g) => g.value(basis),
            LoadedGame::Linear(g) => g.value(basis),
            LoadedGame::MonteCarlo(g) => g.value(basis),
        }
    }
}

/// Parses a comma-joined list of player names. Returns `None` when the
/// coalition mentions a pruned player (it can never be a basis).
pub fn parse_coalition(key: &str, graph: &CausalGraph) -> Result<Option<Coalition>> {
    let mut s = Coalition::EMPTY;
    for name in key.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        match graph.node_index(name) {
            Some(i) if i < graph.num_players() => s = s.with(i),
            Some(_) => return Err(Error::InvalidGame(format!("target `{name}` cannot be part of a coalition"))),
            None if graph.pruned().iter().any(|p| p == name) => return Ok(None),
            None => return Err(Error::UnknownNode(name.to_string())),
        }
    }
    Ok(Some(s))
}

impl GameSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("game: {e}")))
    }

    pub fn build(&self, graph: &CausalGraph) -> Result<LoadedGame> {
        match self {
            GameSpec::Table { values } => {
                let mut table = HashMap::new();
                for (key, value) in values {
                    let Some(s) = parse_coalition(key, graph)? else {
                        continue;
                    };
                    if table.insert(s, value.to_f64()?).is_some() {
                        return Err(Error::InvalidGame(format!("coalition `{key}` is listed twice")));
                    }
                }
                Ok(LoadedGame::Table(TableGame::new(table)))
            }
            GameSpec::LinearScm {
                coefficients,
                intercepts,
                x,
                noise,
                activation,
                samples,
                seed,
            } => {
                let d = graph.num_players();
                let node = |name: &str| -> Result<Option<usize>> {
                    match graph.node_index(name) {
                        Some(i) => Ok(Some(i)),
                        None if graph.pruned().iter().any(|p| p == name) => Ok(None),
                        None => Err(Error::UnknownNode(name.to_string())),
                    }
                };
                let per_node = |map: &BTreeMap<String, f64>, default: f64, players_only: bool| -> Result<Vec<f64>> {
                    let mut out = vec![default; if players_only { d } else { d + 1 }];
                    for (name, &v) in map {
                        if let Some(i) = node(name)? {
                            if i >= out.len() {
                                return Err(Error::InvalidGame(format!("`{name}` is not a player")));
                            }
                            out[i] = v;
                        }
                    }
                    Ok(out)
                };
                let mut triples = Vec::new();
                for (child, parents) in coefficients {
                    let Some(c) = node(child)? else { continue };
                    for (parent, &w) in parents {
                        if let Some(p) = node(parent)? {
                            triples.push((p, c, w));
                        }
                    }
                }
                let scm = LinearScm::new(graph.clone(), &triples, per_node(intercepts, 0.0, false)?, per_node(x, 0.0, true)?)?;
                let mut acts = vec![Activation::Identity; d + 1];
                for (name, a) in activation {
                    if let Some(i) = node(name)? {
                        acts[i] = Activation::parse(a)?;
                    }
                }
                let sampled = samples.is_some() || acts.iter().any(|a| *a != Activation::Identity);
                if !sampled {
                    return Ok(LoadedGame::Linear(scm));
                }
                let seed = seed.ok_or_else(|| Error::InvalidGame("a seed is required for sampled evaluation".into()))?;
                let scm = scm.with_noise_variances(per_node(noise, 1.0, false)?)?;
                Ok(LoadedGame::MonteCarlo(MonteCarloScm::new(scm, acts, samples.unwrap_or(DEFAULT_SAMPLES), seed)?))
            }
        }
    }
}
