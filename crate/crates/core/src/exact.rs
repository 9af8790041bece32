//! Exact attribution from a class inventory, plus direct reference sums.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{Game, ValueOracle};
use crate::graph::Coalition;
use crate::lattice::ClassInventory;
use crate::weights::{binomial, class_weight_pair, Neumaier, WeightScheme};

/// Largest player count accepted by [`brute_force_values`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Per-player attribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Attribution {
    pub values: Vec<f64>,
    pub scheme: String,
    pub exact: bool,
}

impl Attribution {
    pub fn zeros(d: usize, scheme: &WeightScheme, exact: bool) -> Self {
        Attribution {
            values: vec![0.0; d],
            scheme: scheme.name(),
            exact,
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Interaction values `Φ_U` for subsets `U` up to some order.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionAttribution {
    pub order: usize,
    pub values: BTreeMap<Coalition, f64>,
}

impl InteractionAttribution {
    pub fn get(&self, u: Coalition) -> f64 {
        self.values.get(&u).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.values.values().sum()
    }
}

/// `φ_i = Σ_j ν(c_j) w_i(c_j)`: one oracle query per class.
pub fn exact_values<G: Game>(inventory: &ClassInventory, oracle: &ValueOracle<'_, G>, scheme: &WeightScheme) -> Result<Attribution> {
    let d = oracle.graph().num_players();
    let mut acc = vec![Neumaier::default(); d];
    for class in inventory {
        let v = oracle.evaluate_irreducible(class.basis)?;
        let (w_in, w_out) = class_weight_pair(scheme, class);
        for i in class.basis {
            acc[i].add(v * w_in);
        }
        for i in oracle.graph().players().difference(class.closure) {
            acc[i].add(v * w_out);
        }
    }
    Ok(Attribution {
        values: acc.iter().map(Neumaier::total).collect(),
        scheme: scheme.name(),
        exact: true,
    })
}

/// Direct marginal-contribution sum over all `2^d` coalitions.
pub fn brute_force_values<G: Game>(oracle: &ValueOracle<'_, G>, d: usize, scheme: &WeightScheme) -> Result<Attribution> {
    if d > BRUTE_FORCE_LIMIT {
        return Err(Error::BruteForceTooLarge {
            players: d,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let table = value_table(oracle, d)?;
    let mut values = vec![0.0; d];
    for (i, phi) in values.iter_mut().enumerate() {
        let bit = 1usize << i;
        let mut acc = Neumaier::default();
        for s in 0..table.len() {
            if s & bit == 0 {
                let size = s.count_ones() as isize;
                acc.add(scheme.p(size) * (table[s | bit] - table[s]));
            }
        }
        *phi = acc.total();
    }
    Ok(Attribution {
        values,
        scheme: scheme.name(),
        exact: true,
    })
}

fn value_table<G: Game>(oracle: &ValueOracle<'_, G>, d: usize) -> Result<Vec<f64>> {
    (0..1u64 << d).map(|s| oracle.evaluate(Coalition::from_bits(s))).collect()
}

/// `ω_{a,b} = 1 / ((a + b + 1) C(a + b, a))`.
#[derive(Clone, Debug)]
pub struct OmegaTable {
    n: usize,
    w: Vec<f64>,
}

impl OmegaTable {
    pub fn new(d: usize) -> Self {
        let n = d + 1;
        let mut w = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                let s = a + b;
                w[a * n + b] = if s <= 64 {
                    1.0 / ((s + 1) as f64 * binomial(s, a as isize))
                } else {
                    // a! b! / (a + b + 1)! via log-gamma outside the Pascal table
                    (ln_factorial(a) + ln_factorial(b) - ln_factorial(s + 1)).exp()
                };
            }
        }
        OmegaTable { n, w }
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.w[a * self.n + b]
    }
}

fn ln_factorial(k: usize) -> f64 {
    statrs::function::gamma::ln_gamma(k as f64 + 1.0)
}

/// Contribution of a unit class game `1[basis ⊆ S ⊆ closure]` to `φ_U`.
fn unit_interaction(omega: &OmegaTable, basis: Coalition, closure: Coalition, u: Coalition, d: usize) -> f64 {
    let outside = Coalition::full(d).difference(closure);
    if !u.is_subset(basis.union(outside)) {
        return 0.0;
    }
    let sign = if u.intersection(outside).len().is_multiple_of(2) { 1.0 } else { -1.0 };
    let a = basis.len() - closure.intersection(u).len();
    let b = outside.difference(u).len();
    sign * omega.get(a, b)
}

/// Shapley interaction index `φ_U` from the class inventory.
pub fn interaction_index<G: Game>(inventory: &ClassInventory, oracle: &ValueOracle<'_, G>, u: Coalition, d: usize) -> Result<f64> {
    if !u.is_subset(Coalition::full(d)) {
        return Err(Error::PlayerOutOfRange {
            index: 63 - u.bits().leading_zeros() as usize,
            players: d,
        });
    }
    let omega = OmegaTable::new(d);
    let mut acc = Neumaier::default();
    for class in inventory {
        let w = unit_interaction(&omega, class.basis, class.closure, u, d);
        if w != 0.0 {
            acc.add(oracle.evaluate_irreducible(class.basis)? * w);
        }
    }
    Ok(acc.total())
}

/// `φ_U` for every `1 ≤ |U| ≤ order`.
pub fn interactions<G: Game>(
    inventory: &ClassInventory,
    oracle: &ValueOracle<'_, G>,
    order: usize,
    d: usize,
) -> Result<BTreeMap<Coalition, f64>> {
    if order == 0 || order > d {
        return Err(Error::InvalidOrder { order, players: d });
    }
    let omega = OmegaTable::new(d);
    let values: Vec<f64> = inventory
        .iter()
        .map(|c| oracle.evaluate_irreducible(c.basis))
        .collect::<Result<_>>()?;
    let mut out = BTreeMap::new();
    for u in subsets_up_to(d, order) {
        let mut acc = Neumaier::default();
        for (class, &v) in inventory.iter().zip(&values) {
            let w = unit_interaction(&omega, class.basis, class.closure, u, d);
            if w != 0.0 {
                acc.add(v * w);
            }
        }
        out.insert(u, acc.total());
    }
    Ok(out)
}

/// All subsets of `0..d` with `1 ≤ |U| ≤ order`, by size then bits.
pub fn subsets_up_to(d: usize, order: usize) -> Vec<Coalition> {
    let mut out = Vec::new();
    for size in 1..=order.min(d) {
        combinations(d, size, &mut |c| out.push(c));
    }
    out
}

fn combinations(d: usize, k: usize, f: &mut dyn FnMut(Coalition)) {
    fn rec(start: usize, d: usize, left: usize, cur: Coalition, f: &mut dyn FnMut(Coalition)) {
        if left == 0 {
            f(cur);
            return;
        }
        for i in start..=d - left {
            rec(i + 1, d, left - 1, cur.with(i), f);
        }
    }
    if k <= d {
        rec(0, d, k, Coalition::EMPTY, f);
    }
}

/// Sign convention for the first Bernoulli number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BernoulliConvention {
    /// `B_1 = -1/2`.
    Minus,
    /// `B_1 = +1/2`.
    Plus,
}

/// Bernoulli numbers `B_0..=B_64` from the recurrence
/// `Σ_{k=0}^{m} C(m+1, k) B_k = 0`, in exact rational arithmetic.
pub fn bernoulli_numbers(convention: BernoulliConvention) -> Vec<f64> {
    static MINUS: OnceLock<Vec<f64>> = OnceLock::new();
    let minus = MINUS.get_or_init(|| {
        let mut b: Vec<BigRational> = vec![BigRational::one()];
        for m in 1..=64usize {
            let mut acc = BigRational::zero();
            let mut binom = BigInt::one(); // C(m+1, k), starting at k = 0
            for (k, bk) in b.iter().enumerate() {
                acc += bk * BigRational::from_integer(binom.clone());
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            // the k = m term has coefficient C(m+1, m) = m + 1
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b.iter().map(|r| r.to_f64().expect("finite Bernoulli number")).collect()
    });
    let mut out = minus.clone();
    if convention == BernoulliConvention::Plus {
        out[1] = 0.5;
    }
    out
}

/// n-Shapley values from interaction indices.
///
/// `interactions` must hold `φ_U` for every `1 ≤ |U| ≤ n`; `empty_value` is
/// `ν(∅)`, reported as `Φ_∅`. Uses `B_1 = -1/2`.
pub fn n_shapley(interactions: &BTreeMap<Coalition, f64>, n: usize, d: usize, empty_value: f64) -> Result<InteractionAttribution> {
    n_shapley_with(interactions, n, d, empty_value, BernoulliConvention::Minus)
}

pub fn n_shapley_with(
    interactions: &BTreeMap<Coalition, f64>,
    n: usize,
    d: usize,
    empty_value: f64,
    convention: BernoulliConvention,
) -> Result<InteractionAttribution> {
    if n == 0 || n > d {
        return Err(Error::InvalidOrder { order: n, players: d });
    }
    let bern = bernoulli_numbers(convention);
    let phi = |u: Coalition| interactions.get(&u).copied().unwrap_or(0.0);

    // order 1: Φ_i = φ_i
    let mut current: BTreeMap<Coalition, f64> = (0..d).map(|i| (Coalition::singleton(i), phi(Coalition::singleton(i)))).collect();
    for k in 2..=n {
        let mut next = current.clone();
        for (&t, &value) in interactions.iter().filter(|(t, _)| t.len() == k) {
            next.insert(t, value);
            // every non-empty proper subset U of T receives B_{k-|U|} φ_T
            for u in t.subsets() {
                if !u.is_empty() && u != t {
                    *next.entry(u).or_insert(0.0) += bern[k - u.len()] * value;
                }
            }
        }
        current = next;
    }
    current.insert(Coalition::EMPTY, empty_value);
    Ok(InteractionAttribution { order: n, values: current })
}
