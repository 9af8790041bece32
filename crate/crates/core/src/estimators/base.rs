//! Base estimators turning a weighted coalition batch into attributions.

use nalgebra::{DMatrix, DVector};

use super::simulated::SampleBatch;
use crate::error::{Error, Result};
use crate::exact::Attribution;
use crate::graph::Coalition;
use crate::weights::{binomial, Neumaier, WeightScheme};

/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-12;

fn endpoints(batch: &SampleBatch) -> Result<(f64, f64)> {
    let d = batch.players;
    let empty = batch
        .value_of(Coalition::EMPTY)
        .ok_or_else(|| Error::UnderDetermined("batch has no row for the empty coalition".into()))?;
    let full = batch
        .value_of(Coalition::full(d))
        .ok_or_else(|| Error::UnderDetermined("batch has no row for the grand coalition".into()))?;
    Ok((empty, full))
}

/// Per-coalition Shapley kernel `(d-1) / (C(d,s) s (d-s))` for `0 < s < d`.
pub fn shapley_kernel(d: usize, s: usize) -> f64 {
    (d - 1) as f64 / (binomial(d, s as isize) * (s * (d - s)) as f64)
}

/// Orthonormal basis of the complement of the all-ones vector (Helmert).
fn helmert(d: usize) -> DMatrix<f64> {
    let mut n = DMatrix::zeros(d, d - 1);
    for k in 1..d {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            n[(i, k - 1)] = 1.0 / norm;
        }
        n[(k, k - 1)] = -(k as f64) / norm;
    }
    n
}

/// Kernel-weighted least squares with the efficiency constraint enforced
/// exactly.
///
/// Minimises `Σ κ(|S|)/p · (ν(∅) + Σ_{i∈S} φ_i − ν(S))²` over interior rows
/// subject to `Σ φ_i = ν([d]) − ν(∅)`. When the interior rows do not pin
/// down `φ`, the minimum-norm deviation from the equal split is returned.
pub fn base_regression(batch: &SampleBatch) -> Result<Attribution> {
    let d = batch.players;
    let (empty, full) = endpoints(batch)?;
    let delta = full - empty;
    let scheme = WeightScheme::shapley(d);
    if d == 1 {
        return Ok(Attribution {
            values: vec![delta],
            scheme: scheme.name(),
            exact: false,
        });
    }
    let interior: Vec<_> = batch.rows.iter().filter(|r| !r.coalition.is_empty() && r.coalition.len() < d).collect();
    let mut values = vec![delta / d as f64; d];
    if !interior.is_empty() {
        let basis = helmert(d);
        let mut a = DMatrix::zeros(interior.len(), d - 1);
        let mut b = DVector::zeros(interior.len());
        for (k, row) in interior.iter().enumerate() {
            let s = row.coalition.len();
            let w = (shapley_kernel(d, s) / row.probability).sqrt();
            for i in row.coalition {
                for col in 0..d - 1 {
                    a[(k, col)] += w * basis[(i, col)];
                }
            }
            b[k] = w * (row.value - empty - s as f64 * delta / d as f64);
        }
        let svd = a.svd(true, true);
        let eps = RANK_TOLERANCE * svd.singular_values.max();
        let z = svd.solve(&b, eps).map_err(|e| Error::UnderDetermined(e.to_string()))?;
        let correction = basis * z;
        for (v, c) in values.iter_mut().zip(correction.iter()) {
            *v += c;
        }
    }
    Ok(Attribution {
        values,
        scheme: scheme.name(),
        exact: false,
    })
}

/// Self-normalised inverse-probability mean difference.
///
/// Every row is reused for every player: as a "with `i`" sample when it
/// contains `i` and as a "without `i`" sample otherwise. Exact on constant
/// games and on batches covering every coalition.
pub fn mc_msr(batch: &SampleBatch, scheme: &WeightScheme) -> Result<Attribution> {
    let d = batch.players;
    endpoints(batch)?;
    // total semivalue weight on either side: Σ_ℓ C(d-1, ℓ) p_ℓ
    let mass: f64 = (0..d).map(|l| binomial(d - 1, l as isize) * scheme.p(l as isize)).sum();
    let mut values = Vec::with_capacity(d);
    for i in 0..d {
        let (mut with_num, mut with_den) = (Neumaier::default(), Neumaier::default());
        let (mut out_num, mut out_den) = (Neumaier::default(), Neumaier::default());
        for row in &batch.rows {
            let s = row.coalition.len() as isize;
            if row.coalition.contains(i) {
                let w = scheme.p(s - 1) / row.probability;
                with_num.add(w * row.value);
                with_den.add(w);
            } else {
                let w = scheme.p(s) / row.probability;
                out_num.add(w * row.value);
                out_den.add(w);
            }
        }
        values.push(mass * (with_num.total() / with_den.total() - out_num.total() / out_den.total()));
    }
    Ok(Attribution {
        values,
        scheme: scheme.name(),
        exact: false,
    })
}
