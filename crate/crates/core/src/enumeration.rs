//! Exhaustive search for baskets inside a `lambda` window.
//!
//! For fixed `chi(O_X)`, `lambda > N` (or `>= N`) is equivalent to
//! `24 chi < sigma < 24 chi + 12 chi(O_F) / N` (resp. `<=`). Since `sigma`
//! only depends on the indices, the search first walks multisets of indices
//! in nondecreasing order, cutting a branch as soon as its partial `sigma`
//! leaves the window, and only expands residue choices for the index
//! multisets that land inside. Each expanded basket is then filtered by the
//! plurigenus non-negativity condition.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baskets::{
    basket_sigma, chi_mk_values, e3_horizon, first_negative_m, lambda_from_basket, Basket,
    BasketEntry,
};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const BRUTE_FORCE_MAX_INDEX: i64 = 12;
pub const BRUTE_FORCE_MAX_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `lambda > N`
    Strict,
    /// `lambda >= N`
    Closed,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Strict => "strict",
            Comparison::Closed => "closed",
        })
    }
}

/// Surface type of the general fiber for the K3/Enriques searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceFiber {
    K3,
    Enriques,
}

impl SurfaceFiber {
    pub fn chi_f(self) -> i64 {
        match self {
            SurfaceFiber::K3 => 2,
            SurfaceFiber::Enriques => 1,
        }
    }

    pub fn chi_x_values(self) -> BTreeSet<i64> {
        match self {
            SurfaceFiber::K3 => BTreeSet::from([0, 1, 2]),
            SurfaceFiber::Enriques => BTreeSet::from([1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchWindow {
    chi_f: i64,
    chi_x_values: BTreeSet<i64>,
    threshold: Rational,
    comparison: Comparison,
}

impl SearchWindow {
    /// A window over `chi(O_X)` values in `0..=2`.
    pub fn new(
        chi_f: i64,
        chi_x_values: impl IntoIterator<Item = i64>,
        threshold: Rational,
        comparison: Comparison,
    ) -> Result<Self> {
        let window = Self::with_any_chi(chi_f, chi_x_values, threshold, comparison)?;
        if let Some(&bad) = window.chi_x_values.iter().find(|c| !(0..=2).contains(*c)) {
            return Err(Error::InvalidChiX(bad));
        }
        Ok(window)
    }

    /// Like [`SearchWindow::new`] but allows any `chi(O_X) >= 0`.
    pub fn with_any_chi(
        chi_f: i64,
        chi_x_values: impl IntoIterator<Item = i64>,
        threshold: Rational,
        comparison: Comparison,
    ) -> Result<Self> {
        if !(1..=2).contains(&chi_f) {
            return Err(Error::InvalidChiF(chi_f));
        }
        if !threshold.is_positive() {
            return Err(Error::NonPositiveThreshold(threshold.to_string()));
        }
        let chi_x_values: BTreeSet<i64> = chi_x_values.into_iter().collect();
        if chi_x_values.is_empty() {
            return Err(Error::EmptyChiSet);
        }
        if let Some(&bad) = chi_x_values.iter().find(|c| **c < 0) {
            return Err(Error::InvalidChiX(bad));
        }
        Ok(SearchWindow {
            chi_f,
            chi_x_values,
            threshold,
            comparison,
        })
    }

    pub fn preset(
        fiber: SurfaceFiber,
        threshold: Rational,
        comparison: Comparison,
    ) -> Result<Self> {
        Self::new(fiber.chi_f(), fiber.chi_x_values(), threshold, comparison)
    }

    pub fn chi_f(&self) -> i64 {
        self.chi_f
    }

    pub fn chi_x_values(&self) -> &BTreeSet<i64> {
        &self.chi_x_values
    }

    pub fn threshold(&self) -> &Rational {
        &self.threshold
    }

    pub fn comparison(&self) -> Comparison {
        self.comparison
    }

    /// Endpoints `(24 chi, 24 chi + 12 chi_F / N)` of the sigma window.
    pub fn sigma_bounds(&self, chi_x: i64) -> (Rational, Rational) {
        let lower = Rational::integer(24 * chi_x);
        let upper = &lower + &(Rational::integer(12 * self.chi_f) / &self.threshold);
        (lower, upper)
    }

    pub fn contains_sigma(&self, chi_x: i64, sigma: &Rational) -> bool {
        let (lower, upper) = self.sigma_bounds(chi_x);
        *sigma > lower
            && match self.comparison {
                Comparison::Strict => *sigma < upper,
                Comparison::Closed => *sigma <= upper,
            }
    }

    /// Stable textual description, used as a cache key.
    pub fn describe(&self) -> String {
        format!(
            "chi_f={};chi_x={};threshold={};comparison={}",
            self.chi_f,
            self.chi_x_values.iter().join(","),
            self.threshold,
            self.comparison
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub basket: Basket,
    pub sigma: Rational,
    pub lambda: Rational,
}

impl SearchResult {
    /// Computes `sigma` and `lambda` for a basket; fails when `lambda` is undefined.
    pub fn from_basket(basket: Basket, chi_f: i64) -> Result<Self> {
        let sigma = basket_sigma(&basket);
        let lambda = lambda_from_basket(&basket, chi_f)?;
        Ok(SearchResult {
            basket,
            sigma,
            lambda,
        })
    }
}

/// Re-checks a result against a window without trusting how it was found:
/// canonical form, sigma, window membership, the lambda identity and the
/// non-negativity condition.
pub fn verify_result(window: &SearchWindow, result: &SearchResult) -> Result<()> {
    let fail = |what: &str| {
        Err(Error::BoundNotVerified(format!(
            "result {} (chi={}): {what}",
            result.basket,
            result.basket.chi_x()
        )))
    };
    let basket = &result.basket;
    if !window.chi_x_values.contains(&basket.chi_x()) {
        return fail("chi outside window");
    }
    if basket.normalize() != *basket {
        return fail("not canonical");
    }
    let sigma = basket_sigma(basket);
    if sigma != result.sigma {
        return fail("sigma mismatch");
    }
    if !window.contains_sigma(basket.chi_x(), &sigma) {
        return fail("sigma outside window");
    }
    let excess = &sigma - &Rational::integer(24 * basket.chi_x());
    if &result.lambda * &excess != Rational::integer(12 * window.chi_f) {
        return fail("lambda identity");
    }
    if !crate::baskets::satisfies_e3(basket)? {
        return fail("chi(mK) negative");
    }
    Ok(())
}

/// All canonical baskets in the window that pass the non-negativity filter,
/// sorted by `(chi, points)`.
///
/// Work is split by `chi` and by the smallest index and runs on the current
/// rayon pool; the output does not depend on the number of threads.
pub fn enumerate_baskets(window: &SearchWindow) -> Result<Vec<SearchResult>> {
    let tasks: Vec<(i64, usize)> = window
        .chi_x_values
        .iter()
        .flat_map(|&chi| {
            let n = index_candidates(window, chi).len();
            (0..n).map(move |i| (chi, i))
        })
        .collect();
    let chunks: Vec<Vec<SearchResult>> = tasks
        .par_iter()
        .map(|&(chi, first)| search_subtree(window, chi, first))
        .collect::<Result<_>>()?;
    let mut results: Vec<SearchResult> = chunks.into_iter().flatten().collect();
    results.sort_by(|a, b| a.basket.cmp(&b.basket));
    Ok(results)
}

/// Indices `r >= 2` whose single-point weight `r - 1/r` fits in the window.
fn index_candidates(window: &SearchWindow, chi: i64) -> Vec<i64> {
    let (_, upper) = window.sigma_bounds(chi);
    let fits = |r: i64| {
        let w = Rational::integer(r) - Rational::new(1, r);
        match window.comparison {
            Comparison::Strict => w < upper,
            Comparison::Closed => w <= upper,
        }
    };
    (2..).take_while(|&r| fits(r)).collect()
}

/// Index multisets as `(r, count)` runs with `r` increasing.
type IndexMultiset = Vec<(i64, u32)>;

fn search_subtree(window: &SearchWindow, chi: i64, first: usize) -> Result<Vec<SearchResult>> {
    let indices = index_candidates(window, chi);
    let hits = index_hits(window, chi, &indices, first);
    let mut out = Vec::new();
    for hit in hits {
        expand_residues(&hit, chi, window.chi_f, &mut out)?;
    }
    Ok(out)
}

/// Walks index multisets whose smallest index is `indices[first]`, with all
/// sums scaled by `D = lcm(indices)` so comparisons are exact integer ones.
fn index_hits(
    window: &SearchWindow,
    chi: i64,
    indices: &[i64],
    first: usize,
) -> Vec<IndexMultiset> {
    let scale = indices
        .iter()
        .fold(BigInt::one(), |acc, &r| acc.lcm(&BigInt::from(r)));
    let weights: Vec<BigInt> = indices
        .iter()
        .map(|&r| BigInt::from(r) * &scale - &scale / BigInt::from(r))
        .collect();
    let (lower, upper) = window.sigma_bounds(chi);
    let lo = (lower * Rational::from(scale.clone())).floor();
    let hi_exact = upper * Rational::from(scale.clone());
    let hi = match window.comparison {
        Comparison::Closed => hi_exact.floor(),
        Comparison::Strict => hi_exact.ceil() - 1,
    };

    let headroom = &hi + weights.last().cloned().unwrap_or_default();
    if headroom.to_i128().is_some_and(|h| h < i128::MAX / 2) {
        let weights: Vec<i128> = weights.iter().map(|w| w.to_i128().unwrap()).collect();
        let mut walk = IndexWalk::new(
            indices,
            &weights,
            lo.to_i128().unwrap(),
            hi.to_i128().unwrap(),
        );
        walk.start(first);
        walk.hits
    } else {
        let mut walk = IndexWalk::new(indices, &weights, lo, hi);
        walk.start(first);
        walk.hits
    }
}

struct IndexWalk<'a, T> {
    indices: &'a [i64],
    weights: &'a [T],
    lo: T,
    hi: T,
    stack: Vec<usize>,
    hits: Vec<IndexMultiset>,
}

impl<'a, T> IndexWalk<'a, T>
where
    T: Clone + Ord + for<'b> std::ops::Add<&'b T, Output = T>,
{
    fn new(indices: &'a [i64], weights: &'a [T], lo: T, hi: T) -> Self {
        IndexWalk {
            indices,
            weights,
            lo,
            hi,
            stack: Vec::new(),
            hits: Vec::new(),
        }
    }

    fn start(&mut self, first: usize) {
        let sum = self.weights[first].clone();
        if sum > self.hi {
            return;
        }
        self.stack.push(first);
        self.visit(first, sum);
        self.stack.pop();
    }

    fn visit(&mut self, last: usize, sum: T) {
        if sum > self.lo {
            self.record();
        }
        for i in last..self.weights.len() {
            let next = sum.clone() + &self.weights[i];
            // Weights increase with the index, so later siblings only get heavier.
            if next > self.hi {
                break;
            }
            self.stack.push(i);
            self.visit(i, next);
            self.stack.pop();
        }
    }

    fn record(&mut self) {
        let runs = self
            .stack
            .iter()
            .chunk_by(|&&i| i)
            .into_iter()
            .map(|(i, run)| (self.indices[i], run.count() as u32))
            .collect();
        self.hits.push(runs);
    }
}

/// Canonical residues `1 <= b <= r/2` prime to `r`.
pub fn canonical_residues(r: i64) -> Vec<i64> {
    (1..=r / 2).filter(|b| b.gcd(&r) == 1).collect()
}

fn expand_residues(
    hit: &IndexMultiset,
    chi: i64,
    chi_f: i64,
    out: &mut Vec<SearchResult>,
) -> Result<()> {
    let index_lcm = hit
        .iter()
        .fold(BigInt::one(), |acc, &(r, _)| acc.lcm(&BigInt::from(r)));
    let horizon = index_lcm
        .to_u64()
        .and_then(|l| l.checked_add(1))
        .ok_or_else(|| Error::OutOfRange {
            what: "index lcm",
            detail: index_lcm.to_string(),
        })?;

    // For each index, every multiset of residues of the right size.
    let per_index: Vec<Vec<Vec<BasketEntry>>> = hit
        .iter()
        .map(|&(r, count)| {
            canonical_residues(r)
                .into_iter()
                .combinations_with_replacement(count as usize)
                .map(|bs| {
                    bs.into_iter()
                        .chunk_by(|&b| b)
                        .into_iter()
                        .map(|(b, run)| BasketEntry::new(r, b, run.count() as u32))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    for choice in per_index.iter().map(|v| v.iter()).multi_cartesian_product() {
        let basket = Basket::new(choice.into_iter().flatten().copied(), chi);
        if first_negative_m(&basket, horizon).is_none() {
            out.push(SearchResult::from_basket(basket, chi_f)?);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaCheck {
    /// No basket has `lambda > claimed_bound`.
    pub empty_above: bool,
    /// Results of the strict window; empty exactly when `empty_above`.
    pub above: Vec<SearchResult>,
    /// Results of the closed window `lambda >= claimed_bound`.
    pub witnesses_at_bound: Vec<SearchResult>,
}

/// Runs the strict and closed windows at `claimed_bound` for a fiber preset.
pub fn max_lambda_check(fiber: SurfaceFiber, claimed_bound: &Rational) -> Result<LambdaCheck> {
    let strict = SearchWindow::preset(fiber, claimed_bound.clone(), Comparison::Strict)?;
    let closed = SearchWindow::preset(fiber, claimed_bound.clone(), Comparison::Closed)?;
    let (above, witnesses_at_bound) =
        rayon::join(|| enumerate_baskets(&strict), || enumerate_baskets(&closed));
    let (above, witnesses_at_bound) = (above?, witnesses_at_bound?);
    Ok(LambdaCheck {
        empty_above: above.is_empty(),
        above,
        witnesses_at_bound,
    })
}

/// Naive cross-check: every multiset of at most `count_cap` canonical
/// entries with index at most `r_cap`, filtered by the window and by a
/// direct evaluation of `chi(mK)` over one period. Exponential; tiny caps only.
pub fn brute_force_oracle(
    window: &SearchWindow,
    r_cap: i64,
    count_cap: usize,
) -> Result<Vec<SearchResult>> {
    if r_cap > BRUTE_FORCE_MAX_INDEX {
        return Err(Error::CapExceeded {
            what: "r_cap",
            value: r_cap,
            limit: BRUTE_FORCE_MAX_INDEX,
        });
    }
    if count_cap > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::CapExceeded {
            what: "count_cap",
            value: count_cap as i64,
            limit: BRUTE_FORCE_MAX_POINTS as i64,
        });
    }
    let types: Vec<(i64, i64)> = (2..=r_cap)
        .flat_map(|r| canonical_residues(r).into_iter().map(move |b| (r, b)))
        .collect();
    let mut out = Vec::new();
    for k in 1..=count_cap {
        for points in types.iter().combinations_with_replacement(k) {
            let entries: Vec<BasketEntry> = points
                .iter()
                .map(|&&(r, b)| BasketEntry::single(r, b))
                .collect::<Result<_>>()?;
            for &chi in &window.chi_x_values {
                let basket = Basket::new(entries.iter().copied(), chi);
                let sigma = basket_sigma(&basket);
                if !window.contains_sigma(chi, &sigma) {
                    continue;
                }
                let horizon = e3_horizon(&basket)?;
                let e3 = chi_mk_values(&basket)
                    .take(horizon as usize)
                    .skip(1)
                    .all(|v| !v.is_negative());
                if e3 {
                    out.push(SearchResult::from_basket(basket, window.chi_f)?);
                }
            }
        }
    }
    out.sort_by(|a, b| a.basket.cmp(&b.basket));
    Ok(out)
}
