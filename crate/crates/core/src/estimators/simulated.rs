//! Inverse-probability sampling of coalitions from known classes.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use super::seeded_rng;
use crate::error::{Error, Result};
use crate::graph::{Coalition, CoalitionClass};
use crate::weights::{binomial, binomial_exact};

const STREAM: u64 = 2;
const CALIBRATION_TOLERANCE: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;

/// One sampled coalition with the value of its class and the probability
/// with which it was included.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub coalition: Coalition,
    pub value: f64,
    pub probability: f64,
    /// Index of the originating class in the sampler input.
    pub class: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SampleBatch {
    pub players: usize,
    pub rows: Vec<SampleRow>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Value of the first row equal to `s`, if any.
    pub fn value_of(&self, s: Coalition) -> Option<f64> {
        self.rows.iter().find(|r| r.coalition == s).map(|r| r.value)
    }
}

/// Relative sampling weight per coalition size; `f64::INFINITY` forces a
/// size to be taken with probability one.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeWeights(pub Vec<f64>);

impl SizeWeights {
    /// Shapley kernel mass per size, `(d-1) / (s (d-s))`, with both
    /// endpoints forced. Dividing by `C(d, s)` in the sampler then makes each
    /// coalition's inclusion probability proportional to its kernel weight.
    pub fn shapley_kernel(d: usize) -> Self {
        SizeWeights(
            (0..=d)
                .map(|s| {
                    if s == 0 || s == d {
                        f64::INFINITY
                    } else {
                        (d - 1) as f64 / (s * (d - s)) as f64
                    }
                })
                .collect(),
        )
    }

    fn probability(&self, gamma: f64, s: usize, d: usize) -> f64 {
        let w = self.0[s];
        if w.is_infinite() {
            1.0
        } else {
            (gamma * w / binomial(d, s as isize)).min(1.0)
        }
    }
}

/// Per-size inclusion probabilities chosen so the expected number of rows is
/// `budget`, or every available coalition if that is fewer.
pub fn calibrate(available: &[f64], weights: &SizeWeights, budget: f64) -> f64 {
    let d = available.len() - 1;
    let expected = |gamma: f64| -> f64 { (0..=d).map(|s| available[s] * weights.probability(gamma, s, d)).sum() };
    // smallest gamma at which every finite-weight size saturates
    let hi_sat = (0..=d)
        .filter(|&s| available[s] > 0.0 && weights.0[s].is_finite() && weights.0[s] > 0.0)
        .map(|s| binomial(d, s as isize) / weights.0[s])
        .fold(0.0, f64::max);
    if expected(hi_sat) <= budget {
        return hi_sat;
    }
    let (mut lo, mut hi) = (0.0, hi_sat);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let e = expected(mid);
        if ((e - budget) / budget).abs() <= CALIBRATION_TOLERANCE {
            return mid;
        }
        if e < budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Draws a batch of about `budget` distinct coalitions from the intervals of
/// `classes`, each tagged with its class value and inclusion probability.
pub fn simulated_sampler(classes: &[(CoalitionClass, f64)], budget: usize, weights: &SizeWeights, seed: u64) -> Result<SampleBatch> {
    if classes.is_empty() {
        return Err(Error::EmptyClassList);
    }
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let d = weights.0.len() - 1;
    let mut available = vec![0.0; d + 1];
    for (class, _) in classes {
        let (b, f) = (class.basis.len(), class.free());
        for j in 0..=f {
            available[b + j] += binomial(f, j as isize);
        }
    }
    let gamma = calibrate(&available, weights, budget as f64);

    let mut rng = seeded_rng(seed, STREAM);
    let mut rows = Vec::new();
    for (index, (class, value)) in classes.iter().enumerate() {
        let free: Vec<usize> = class.closure.difference(class.basis).iter().collect();
        let b = class.basis.len();
        for j in 0..=free.len() {
            let p = weights.probability(gamma, b + j, d);
            if p <= 0.0 {
                continue;
            }
            let total = binomial_exact(free.len(), j as isize);
            let mu = total as f64 * p;
            let whole = mu.floor();
            let mut draws = whole as u128 + u128::from(rng.random::<f64>() < mu - whole);
            draws = draws.min(total);
            for rank in distinct_ranks(&mut rng, total, draws) {
                let sigma = unrank_combination(rank, free.len(), j);
                let coalition = sigma.iter().fold(class.basis, |s, k| s.with(free[k]));
                rows.push(SampleRow {
                    coalition,
                    value: *value,
                    probability: p,
                    class: index,
                });
            }
        }
    }
    Ok(SampleBatch { players: d, rows })
}

/// `count` distinct integers from `0..total` (Floyd's algorithm), in
/// generation order.
fn distinct_ranks<R: Rng>(rng: &mut R, total: u128, count: u128) -> Vec<u128> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count as usize);
    for t in total - count..total {
        let r = rng.random_range(0..=t);
        let pick = if seen.contains(&r) { t } else { r };
        seen.insert(pick);
        out.push(pick);
    }
    out
}

/// The `rank`-th `k`-subset of `0..n` in colexicographic order.
pub(crate) fn unrank_combination(mut rank: u128, n: usize, k: usize) -> Coalition {
    let mut out = Coalition::EMPTY;
    let mut top = n;
    for left in (1..=k).rev() {
        // largest c < top with C(c, left) <= rank
        let mut c = top - 1;
        while binomial_exact(c, left as isize) > rank {
            c -= 1;
        }
        rank -= binomial_exact(c, left as isize);
        out = out.with(c);
        top = c;
    }
    out
}
