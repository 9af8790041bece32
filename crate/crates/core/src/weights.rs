//! Cardinality-based weighting schemes and closed-form class weights.
//!
//! A scheme assigns a weight `p_ℓ` to every marginal contribution
//! `ν(S ∪ {i}) − ν(S)` with `|S| = ℓ`. Because the weight depends on `|S|`
//! only, the contribution of a whole class `[basis, closure]` to player `i`
//! collapses to a sum over at most `|closure| − |basis| + 1` sizes.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::{CoalitionClass, MAX_PLAYERS};

/// Pascal rows `0..=64` as floats.
fn pascal() -> &'static Vec<Vec<f64>> {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(MAX_PLAYERS + 1);
        for n in 0..=MAX_PLAYERS {
            let mut row = vec![1.0; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        rows
    })
}

/// `C(n, k)` as a float; zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: usize, k: isize) -> f64 {
    if k < 0 || k as usize > n {
        return 0.0;
    }
    pascal()[n][k as usize]
}

/// Exact `C(n, k)` for `n ≤ 64`; zero outside `0 ≤ k ≤ n`.
pub fn binomial_exact(n: usize, k: isize) -> u128 {
    if k < 0 || k as usize > n {
        return 0;
    }
    let k = (k as usize).min(n - k as usize);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Which semivalue to compute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchemeKind {
    Shapley,
    Banzhaf,
    /// Beta-Shapley with `p_ℓ ∝ B(ℓ + β, d − 1 − ℓ + α)`.
    Beta { alpha: f64, beta: f64 },
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::Shapley => f.write_str("shapley"),
            SchemeKind::Banzhaf => f.write_str("banzhaf"),
            SchemeKind::Beta { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    /// Parses `shapley`, `banzhaf` or `beta:α,β`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shapley" => Ok(SchemeKind::Shapley),
            "banzhaf" => Ok(SchemeKind::Banzhaf),
            _ => {
                let params = s
                    .strip_prefix("beta:")
                    .ok_or_else(|| Error::InvalidScheme(format!("unknown scheme `{s}`")))?;
                let (a, b) = params
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidScheme(format!("expected beta:α,β, got `{s}`")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidScheme(format!("bad beta parameter `{v}`")))
                };
                let (alpha, beta) = (parse(a)?, parse(b)?);
                if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                    return Err(Error::InvalidScheme("beta parameters must be positive".into()));
                }
                Ok(SchemeKind::Beta { alpha, beta })
            }
        }
    }
}

/// Size weights `p_0 .. p_{d-1}` for a fixed number of players.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightScheme {
    kind: SchemeKind,
    p: Vec<f64>,
}

impl WeightScheme {
    pub fn new(kind: SchemeKind, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidScheme("at least one player is required".into()));
        }
        if d > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(d));
        }
        let p: Vec<f64> = match kind {
            SchemeKind::Shapley => (0..d).map(|l| 1.0 / (d as f64 * binomial(d - 1, l as isize))).collect(),
            SchemeKind::Banzhaf => vec![0.5f64.powi(d as i32 - 1); d],
            SchemeKind::Beta { alpha, beta } => {
                let norm = statrs::function::beta::ln_beta(alpha, beta);
                let p: Vec<f64> = (0..d)
                    .map(|l| {
                        let a = l as f64 + beta;
                        let b = (d - 1 - l) as f64 + alpha;
                        (statrs::function::beta::ln_beta(a, b) - norm).exp()
                    })
                    .collect();
                let total: f64 = p.iter().enumerate().map(|(l, w)| w * binomial(d - 1, l as isize)).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidScheme(format!(
                        "beta weights do not normalise (sum = {total}) for d = {d}"
                    )));
                }
                p
            }
        };
        Ok(WeightScheme { kind, p })
    }

    pub fn shapley(d: usize) -> Self {
        Self::new(SchemeKind::Shapley, d).expect("valid player count")
    }

    pub fn banzhaf(d: usize) -> Self {
        Self::new(SchemeKind::Banzhaf, d).expect("valid player count")
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    pub fn num_players(&self) -> usize {
        self.p.len()
    }

    /// `p_ℓ`, or zero when `ℓ` lies outside `0..d`.
    pub fn p(&self, size: isize) -> f64 {
        if size < 0 {
            return 0.0;
        }
        self.p.get(size as usize).copied().unwrap_or(0.0)
    }

    pub fn sizes(&self) -> &[f64] {
        &self.p
    }

    /// Sum of class weights for a player inside the basis (`positive`) or
    /// outside the closure (`!positive`), before the sign is applied.
    fn interval_sum(&self, class: &CoalitionClass, positive: bool) -> f64 {
        let lo = class.basis.len();
        let free = class.free();
        let mut sum = Neumaier::default();
        for j in 0..=free {
            let size = (lo + j) as isize;
            let w = if positive { self.p(size - 1) } else { self.p(size) };
            sum.add(w * binomial(free, j as isize));
        }
        sum.total()
    }
}

/// Closed-form weight `w_i(c)` of class `c` in player `i`'s attribution.
pub fn class_weight(scheme: &WeightScheme, class: &CoalitionClass, player: usize, d: usize) -> Result<f64> {
    if player >= d {
        return Err(Error::PlayerOutOfRange { index: player, players: d });
    }
    Ok(if class.basis.contains(player) {
        scheme.interval_sum(class, true)
    } else if !class.closure.contains(player) {
        -scheme.interval_sum(class, false)
    } else {
        0.0
    })
}

/// The two non-zero weights of a class: `(w_in, w_out)` where players in the
/// basis receive `w_in` and players outside the closure receive `w_out`.
pub(crate) fn class_weight_pair(scheme: &WeightScheme, class: &CoalitionClass) -> (f64, f64) {
    (scheme.interval_sum(class, true), -scheme.interval_sum(class, false))
}

/// `E_i |w_i(c)|`, the priority mass used by the boundary sampler.
pub fn mean_abs_weight(scheme: &WeightScheme, class: &CoalitionClass, d: usize) -> f64 {
    let inside = class.basis.len() as f64;
    let outside = (d - class.closure.len()) as f64;
    let mut total = 0.0;
    if inside > 0.0 {
        total += inside * scheme.interval_sum(class, true);
    }
    if outside > 0.0 {
        total += outside * scheme.interval_sum(class, false);
    }
    total / d as f64
}

/// Compensated summation.
#[derive(Default, Clone, Copy, Debug)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
