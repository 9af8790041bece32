//! Budgeted lattice exploration from a random warm start.

use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::seeded_rng;
use crate::error::{Error, Result};
use crate::graph::{CausalGraph, Coalition, CoalitionClass};
use crate::lattice::lattice_neighbors;
use crate::weights::{mean_abs_weight, WeightScheme};

/// Added to every queue priority so zero-weight classes stay reachable.
pub const QUEUE_EPSILON: f64 = 1e-12;

const STREAM: u64 = 1;

/// Classes discovered by [`boundary_sampler`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySample {
    pub classes: Vec<CoalitionClass>,
    /// The queue emptied, so `classes` is the full inventory.
    pub all_sampled: bool,
}

/// Sum tree over queue slots. Parents are recomputed from their children on
/// every update, so removed slots contribute exactly zero.
#[derive(Clone, Debug, Default)]
struct SumTree {
    cap: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    fn set(&mut self, slot: usize, w: f64) {
        if slot >= self.cap {
            self.grow(slot + 1);
        }
        let mut k = self.cap + slot;
        self.nodes[k] = w;
        while k > 1 {
            k /= 2;
            self.nodes[k] = self.nodes[2 * k] + self.nodes[2 * k + 1];
        }
    }

    fn grow(&mut self, min_cap: usize) {
        let cap = min_cap.next_power_of_two().max(8);
        let mut nodes = vec![0.0; 2 * cap];
        nodes[cap..cap + self.cap].copy_from_slice(&self.nodes[self.cap..]);
        for k in (1..cap).rev() {
            nodes[k] = nodes[2 * k] + nodes[2 * k + 1];
        }
        self.cap = cap;
        self.nodes = nodes;
    }

    fn total(&self) -> f64 {
        self.nodes.get(1).copied().unwrap_or(0.0)
    }

    /// Slot whose cumulative weight interval contains `u`.
    fn find(&self, mut u: f64) -> usize {
        let mut k = 1;
        while k < self.cap {
            let (l, r) = (self.nodes[2 * k], self.nodes[2 * k + 1]);
            if r == 0.0 || (u < l && l > 0.0) {
                k *= 2;
            } else {
                u -= l;
                k = 2 * k + 1;
            }
        }
        k - self.cap
    }
}

/// State of the boundary walk: sampled classes, the weighted queue, and the
/// set of classes seen so far (sampled or queued).
#[derive(Debug)]
pub struct SamplerState<'g> {
    graph: &'g CausalGraph,
    scheme: &'g WeightScheme,
    rng: ChaCha8Rng,
    sampled: Vec<CoalitionClass>,
    slots: Vec<Option<CoalitionClass>>,
    tree: SumTree,
    queued: usize,
    seen: HashSet<Coalition>,
}

impl<'g> SamplerState<'g> {
    pub fn new(graph: &'g CausalGraph, scheme: &'g WeightScheme, seed: u64) -> Self {
        SamplerState {
            graph,
            scheme,
            rng: seeded_rng(seed, STREAM),
            sampled: Vec::new(),
            slots: Vec::new(),
            tree: SumTree::default(),
            queued: 0,
            seen: HashSet::new(),
        }
    }

    fn enqueue(&mut self, s: Coalition) {
        let class = self.graph.find_class(s);
        if !self.seen.insert(class.closure) {
            return;
        }
        let w = mean_abs_weight(self.scheme, &class, self.graph.num_players()) + QUEUE_EPSILON;
        self.tree.set(self.slots.len(), w);
        self.slots.push(Some(class));
        self.queued += 1;
    }

    /// Enqueues the class of one uniformly random coalition of every size `1..=d`.
    pub fn warm_start(&mut self) {
        let d = self.graph.num_players();
        for size in 1..=d {
            let s: Coalition = index::sample(&mut self.rng, d, size).into_iter().collect();
            self.enqueue(s);
        }
    }

    /// Moves one queued class to the output and enqueues its unseen
    /// neighbours. Returns `None` once the queue is empty.
    pub fn step(&mut self) -> Option<&CoalitionClass> {
        if self.queued == 0 {
            return None;
        }
        let u = self.rng.random::<f64>() * self.tree.total();
        let mut slot = self.tree.find(u);
        if self.slots[slot].is_none() {
            // rounding landed past the last live slot
            slot = self.slots.iter().rposition(Option::is_some)?;
        }
        let class = self.slots[slot].take().expect("live queue slot");
        self.tree.set(slot, 0.0);
        self.queued -= 1;
        let (lower, upper) = lattice_neighbors(&class, self.graph);
        for s in lower.into_iter().chain(upper) {
            self.enqueue(s);
        }
        self.sampled.push(class);
        self.sampled.last()
    }

    pub fn sampled(&self) -> &[CoalitionClass] {
        &self.sampled
    }

    pub fn queue_len(&self) -> usize {
        self.queued
    }

    /// Number of distinct classes sampled or queued.
    pub fn seen_len(&self) -> usize {
        self.seen.len()
    }

    pub fn into_sample(self) -> BoundarySample {
        BoundarySample {
            all_sampled: self.queued == 0,
            classes: self.sampled,
        }
    }
}

/// Samples `min(m, r)` distinct classes, favouring those with large weights.
pub fn boundary_sampler(m: usize, graph: &CausalGraph, scheme: &WeightScheme, seed: u64) -> Result<BoundarySample> {
    if m == 0 {
        return Err(Error::ZeroBudget);
    }
    let mut state = SamplerState::new(graph, scheme, seed);
    state.warm_start();
    while state.sampled().len() < m && state.step().is_some() {}
    Ok(state.into_sample())
}
