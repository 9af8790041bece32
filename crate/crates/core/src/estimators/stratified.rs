//! Stratified class sampling without replacement.
//!
//! Keeps, for every size `ℓ` and player `i`, the number of not-yet-seen
//! coalitions of size `ℓ` that contain `i` (and that do not). A player, a
//! side and a size are drawn in proportion to the semivalue mass of those
//! unseen coalitions, then an unseen coalition is completed uniformly at
//! random.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::seeded_rng;
use crate::error::{Error, Result};
use crate::graph::{CausalGraph, Coalition, CoalitionClass};
use crate::weights::{binomial_exact, WeightScheme};

const STREAM: u64 = 3;

/// Unseen coalition counts per `(size, player)`, split on membership.
#[derive(Clone, Debug)]
struct UnseenCounts {
    d: usize,
    /// `with[ℓ][i]`: unseen size-`ℓ` coalitions containing `i`.
    with: Vec<Vec<u128>>,
    /// `without[ℓ][i]`: unseen size-`ℓ` coalitions not containing `i`.
    without: Vec<Vec<u128>>,
}

impl UnseenCounts {
    fn new(d: usize) -> Self {
        let with = (0..=d).map(|l| vec![binomial_exact(d - 1, l as isize - 1); d]).collect();
        let without = (0..=d).map(|l| vec![binomial_exact(d - 1, l as isize); d]).collect();
        UnseenCounts { d, with, without }
    }

    fn remove(&mut self, class: &CoalitionClass) {
        let (b, f) = (class.basis.len(), class.free());
        for l in b..=b + f {
            let j = (l - b) as isize;
            for i in 0..self.d {
                let (plus, minus) = if class.basis.contains(i) {
                    (binomial_exact(f, j), 0)
                } else if class.closure.contains(i) {
                    (binomial_exact(f - 1, j - 1), binomial_exact(f - 1, j))
                } else {
                    (0, binomial_exact(f, j))
                };
                self.with[l][i] -= plus;
                self.without[l][i] -= minus;
            }
        }
    }
}

/// Semivalue mass of the unseen coalitions, `μ^(+)_{ℓ,i}` and `μ^(−)_{ℓ,i}`.
pub fn residual_masses(counts_with: &[Vec<u128>], counts_without: &[Vec<u128>], scheme: &WeightScheme) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let with = counts_with
        .iter()
        .enumerate()
        .map(|(l, row)| row.iter().map(|&c| scheme.p(l as isize - 1) * c as f64).collect())
        .collect();
    let without = counts_without
        .iter()
        .enumerate()
        .map(|(l, row)| row.iter().map(|&c| scheme.p(l as isize) * c as f64).collect())
        .collect();
    (with, without)
}

/// Initial masses `μ^(+)_{ℓ,i} = p_{ℓ-1} C(d-1, ℓ-1)` and
/// `μ^(−)_{ℓ,i} = p_ℓ C(d-1, ℓ)`.
pub fn initial_masses(scheme: &WeightScheme) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let counts = UnseenCounts::new(scheme.num_players());
    residual_masses(&counts.with, &counts.without, scheme)
}

/// Number of coalitions `T` of size `size` with `current ⊆ T ⊆ current ∪
/// remaining` lying in some class of `seen`, plus the indices of the classes
/// still consistent with that partial assignment.
pub fn count_seen(size: usize, current: Coalition, remaining: Coalition, seen: &[CoalitionClass]) -> (u128, Vec<usize>) {
    let mut total = 0;
    let mut applicable = Vec::new();
    for (k, class) in seen.iter().enumerate() {
        if !class.basis.is_subset(current.union(remaining)) || !current.is_subset(class.closure) {
            continue;
        }
        applicable.push(k);
        let options = remaining.intersection(class.closure.difference(class.basis)).len();
        let spaces = size as isize - current.len() as isize - remaining.intersection(class.basis).len() as isize;
        total += binomial_exact(options, spaces);
    }
    (total, applicable)
}

/// Completes `start` to a uniformly random size-`size` coalition inside
/// `start ∪ candidates` that lies in none of the `seen` classes.
pub fn sample_unseen_by_size<R: Rng>(
    rng: &mut R,
    size: usize,
    start: Coalition,
    candidates: Coalition,
    seen: &[CoalitionClass],
) -> Option<Coalition> {
    let mut s = start;
    let mut remaining = candidates.difference(start);
    let mut relevant: Vec<CoalitionClass> = seen
        .iter()
        .filter(|c| c.basis.len() <= size && size <= c.closure.len())
        .copied()
        .collect();
    while s.len() < size {
        let pool: Vec<usize> = remaining.iter().collect();
        if pool.is_empty() {
            return None;
        }
        let j = pool[rng.random_range(0..pool.len())];
        let rest = remaining.without(j);
        let need = size - s.len();
        let (n_in, in_classes) = count_seen(size, s.with(j), rest, &relevant);
        let (n_out, out_classes) = count_seen(size, s, rest, &relevant);
        let u_in = binomial_exact(rest.len(), need as isize - 1) - n_in;
        let u_out = binomial_exact(rest.len(), need as isize) - n_out;
        if u_in + u_out == 0 {
            return None;
        }
        let keep: Vec<usize> = if rng.random_range(0..u_in + u_out) < u_in {
            s = s.with(j);
            in_classes
        } else {
            out_classes
        };
        relevant = keep.into_iter().map(|k| relevant[k]).collect();
        remaining = rest;
    }
    Some(s)
}

/// Draws `min(m, r)` distinct classes, weighting each draw by the semivalue
/// mass of the coalitions not yet covered.
pub fn class_sampler(m: usize, graph: &CausalGraph, scheme: &WeightScheme, seed: u64) -> Result<Vec<CoalitionClass>> {
    if m == 0 {
        return Err(Error::ZeroBudget);
    }
    let d = graph.num_players();
    let mut rng: ChaCha8Rng = seeded_rng(seed, STREAM);
    let mut counts = UnseenCounts::new(d);
    let mut seen: Vec<CoalitionClass> = Vec::new();
    while seen.len() < m {
        let (with, without) = residual_masses(&counts.with, &counts.without, scheme);
        let side_mass = |mu: &[Vec<f64>], i: usize| -> f64 { mu.iter().map(|row| row[i]).sum() };
        let players: Vec<usize> = (0..d).filter(|&i| side_mass(&with, i) + side_mass(&without, i) > 0.0).collect();
        if players.is_empty() {
            break;
        }
        let i = players[rng.random_range(0..players.len())];
        let (plus, minus) = (side_mass(&with, i), side_mass(&without, i));
        let include = rng.random::<f64>() * (plus + minus) < plus;
        let mu: Vec<f64> = if include { &with } else { &without }.iter().map(|row| row[i]).collect();
        let size = pick_weighted(&mut rng, &mu);
        let start = if include { Coalition::singleton(i) } else { Coalition::EMPTY };
        // the excluded side must never pick `i` back up
        let candidates = graph.players().without(i);
        let Some(s) = sample_unseen_by_size(&mut rng, size, start, candidates.union(start), &seen) else {
            break;
        };
        let class = graph.find_class(s);
        counts.remove(&class);
        seen.push(class);
    }
    Ok(seen)
}

fn pick_weighted<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if u < w {
                return k;
            }
            u -= w;
            last = k;
        }
    }
    last
}
