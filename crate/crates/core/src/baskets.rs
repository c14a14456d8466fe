//! Reid baskets and the plurigenus formula for `D = mK`.
//!
//! A basket is a multiset of terminal cyclic quotient data `(r, b)` with
//! `gcd(b, r) = 1`. Everything computed here is symmetric under
//! `b <-> r - b`, so baskets are normally stored with `b <= r / 2`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// One singularity type `(r, b)` together with how many times it occurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasketEntry {
    r: i64,
    b: i64,
    multiplicity: u32,
}

impl BasketEntry {
    pub fn new(r: i64, b: i64, multiplicity: u32) -> Result<Self> {
        let invalid = |reason| Error::InvalidEntry { r, b, reason };
        if r < 2 {
            return Err(invalid("index r must be at least 2"));
        }
        if b < 1 || b > r - 1 {
            return Err(invalid("b must satisfy 1 <= b <= r-1"));
        }
        if b.gcd(&r) != 1 {
            return Err(invalid("gcd(b, r) must be 1"));
        }
        if multiplicity == 0 {
            return Err(invalid("multiplicity must be at least 1"));
        }
        Ok(BasketEntry { r, b, multiplicity })
    }

    pub fn single(r: i64, b: i64) -> Result<Self> {
        Self::new(r, b, 1)
    }

    pub fn index(&self) -> i64 {
        self.r
    }

    pub fn residue(&self) -> i64 {
        self.b
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    /// Same singularity with `b` replaced by `min(b, r - b)`.
    pub fn canonical(&self) -> Self {
        BasketEntry {
            b: self.b.min(self.r - self.b),
            ..*self
        }
    }

    pub fn is_canonical(&self) -> bool {
        2 * self.b <= self.r
    }

    /// `r - 1/r`, the weight of one point of this type in `K.c2`.
    pub fn weight(&self) -> Rational {
        Rational::integer(self.r) - Rational::new(1, self.r)
    }
}

/// Formal basket `B(X)` together with `chi(O_X)` and `K_X^3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Basket {
    entries: Vec<BasketEntry>,
    chi_x: i64,
    k_cubed: Rational,
}

impl Basket {
    /// Canonical basket: residues reflected to `b <= r/2`, sorted by `(r, b)`,
    /// equal types merged.
    pub fn new(entries: impl IntoIterator<Item = BasketEntry>, chi_x: i64) -> Self {
        Self::raw(entries.into_iter().map(|e| e.canonical()), chi_x)
    }

    /// Sorted and merged, but residues kept exactly as given.
    pub fn raw(entries: impl IntoIterator<Item = BasketEntry>, chi_x: i64) -> Self {
        Basket {
            entries: merge_sorted(entries),
            chi_x,
            k_cubed: Rational::zero(),
        }
    }

    pub fn empty(chi_x: i64) -> Self {
        Self::raw([], chi_x)
    }

    /// Parses the `r,b[xK];...` grammar into a canonical basket.
    pub fn parse(text: &str, chi_x: i64) -> Result<Self> {
        Ok(Self::new(parse_entries(text)?, chi_x))
    }

    pub fn with_k_cubed(mut self, k_cubed: Rational) -> Self {
        self.k_cubed = k_cubed;
        self
    }

    pub fn entries(&self) -> &[BasketEntry] {
        &self.entries
    }

    pub fn chi_x(&self) -> i64 {
        self.chi_x
    }

    pub fn k_cubed(&self) -> &Rational {
        &self.k_cubed
    }

    /// Number of points, counted with multiplicity.
    pub fn point_count(&self) -> u64 {
        self.entries.iter().map(|e| u64::from(e.multiplicity)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.entries.iter().all(BasketEntry::is_canonical)
    }

    /// `L`, the least common multiple of all indices (1 for the empty basket).
    pub fn index_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(&BigInt::from(e.r)))
    }

    /// The canonical form of this basket.
    pub fn normalize(&self) -> Basket {
        Basket {
            entries: merge_sorted(self.entries.iter().map(BasketEntry::canonical)),
            chi_x: self.chi_x,
            k_cubed: self.k_cubed.clone(),
        }
    }

    /// Every point listed individually, in sorted order.
    pub fn points(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n((e.r, e.b), e.multiplicity as usize))
    }

    fn require_k_cubed_zero(&self) -> Result<()> {
        if self.k_cubed.is_zero() {
            Ok(())
        } else {
            Err(Error::NonZeroKCubed(self.k_cubed.to_string()))
        }
    }
}

impl PartialOrd for Basket {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Basket {
    fn cmp(&self, other: &Self) -> Ordering {
        self.chi_x
            .cmp(&other.chi_x)
            .then_with(|| self.points().cmp(other.points()))
            .then_with(|| self.k_cubed.cmp(&other.k_cubed))
    }
}

/// Basket text form, e.g. `2,1x8;3,1x6;7,1;7,2;7,3`. Does not include `chi`.
impl fmt::Display for Basket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{},{}", e.r, e.b)?;
            if e.multiplicity > 1 {
                write!(f, "x{}", e.multiplicity)?;
            }
        }
        Ok(())
    }
}

fn merge_sorted(entries: impl IntoIterator<Item = BasketEntry>) -> Vec<BasketEntry> {
    let mut v: Vec<BasketEntry> = entries.into_iter().collect();
    v.sort_by_key(|e| (e.r, e.b));
    let mut out: Vec<BasketEntry> = Vec::with_capacity(v.len());
    for e in v {
        match out.last_mut() {
            Some(last) if last.r == e.r && last.b == e.b => last.multiplicity += e.multiplicity,
            _ => out.push(e),
        }
    }
    out
}

/// Parses `r,b` items joined by `;`, each optionally suffixed by `xK`.
/// Whitespace is ignored and an empty string is the empty basket.
pub fn parse_entries(text: &str) -> Result<Vec<BasketEntry>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Ok(Vec::new());
    }
    let syntax = |reason: String| Error::BasketSyntax {
        input: text.to_string(),
        reason,
    };
    compact
        .split(';')
        .map(|item| {
            let (pair, mult) = match item.split_once('x') {
                Some((pair, k)) => {
                    let k: u32 = k
                        .parse()
                        .map_err(|_| syntax(format!("bad multiplicity in {item:?}")))?;
                    (pair, k)
                }
                None => (item, 1),
            };
            let (r, b) = pair
                .split_once(',')
                .ok_or_else(|| syntax(format!("expected \"r,b\" in {item:?}")))?;
            let r: i64 = r
                .parse()
                .map_err(|_| syntax(format!("bad index in {item:?}")))?;
            let b: i64 = b
                .parse()
                .map_err(|_| syntax(format!("bad residue in {item:?}")))?;
            BasketEntry::new(r, b, mult)
        })
        .collect()
}

/// `c (r - c) / (2r)` with `c = jb mod r`; multiplicity is not applied.
pub fn local_contribution(entry: &BasketEntry, j: u64) -> Rational {
    let r = entry.r;
    let c = ((j % r as u64) as i64 * entry.b).rem_euclid(r);
    Rational::new(c * (r - c), 2 * r)
}

/// `l(m)`: the sum of local contributions for `j = 1..m-1` over all points.
pub fn l_of_m(basket: &Basket, m: u64) -> Rational {
    let mut total = Rational::zero();
    for e in basket.entries() {
        let r = e.r;
        // Sum of c(r - c) over j, divided by 2r once at the end.
        let mut numer: i128 = 0;
        let mut c = 0i64;
        for _ in 1..m {
            c = (c + e.b) % r;
            numer += i128::from(c * (r - c));
        }
        let numer = BigInt::from(numer) * BigInt::from(e.multiplicity);
        total += Rational::from_bigints(numer, BigInt::from(2 * r)).expect("r >= 2");
    }
    total
}

/// `chi(mK_X) = m(m-1)(2m-1)/12 K^3 + (1 - 2m) chi(O_X) + l(m)`.
pub fn chi_mk(basket: &Basket, m: u64) -> Rational {
    let m_big = BigInt::from(m);
    let cubic_coeff =
        Rational::from_bigints(&m_big * (&m_big - 1) * (2 * &m_big - 1), BigInt::from(12))
            .expect("nonzero");
    let linear = Rational::from((1 - 2 * &m_big) * BigInt::from(basket.chi_x));
    cubic_coeff * basket.k_cubed() + linear + l_of_m(basket, m)
}

/// `chi(mK_X)` for `m = 1..=m_max`, computed incrementally.
pub fn chi_mk_table(basket: &Basket, m_max: u64) -> Vec<Rational> {
    chi_mk_values(basket).take(m_max as usize).collect()
}

/// Unbounded sequence `chi(K_X), chi(2K_X), ...`.
pub fn chi_mk_values(basket: &Basket) -> impl Iterator<Item = Rational> + '_ {
    let mut l = Rational::zero();
    let mut residues: Vec<i64> = vec![0; basket.entries().len()];
    (1i64..).map(move |m| {
        if m > 1 {
            for (c, e) in residues.iter_mut().zip(basket.entries()) {
                *c = (*c + e.b) % e.r;
                l += Rational::new(*c * (e.r - *c) * i64::from(e.multiplicity), 2 * e.r);
            }
        }
        let cubic = Rational::new(m * (m - 1) * (2 * m - 1), 12) * basket.k_cubed();
        cubic + Rational::integer((1 - 2 * m) * basket.chi_x) + &l
    })
}

/// `sigma = sum over points of (r - 1/r)`.
pub fn basket_sigma(basket: &Basket) -> Rational {
    basket
        .entries()
        .iter()
        .map(|e| e.weight() * i64::from(e.multiplicity))
        .sum()
}

/// `K_X . c_2(X) = -24 chi(O_X) + sigma`.
pub fn k_dot_c2(basket: &Basket) -> Rational {
    basket_sigma(basket) - 24 * basket.chi_x
}

fn positive_excess(basket: &Basket) -> Result<Rational> {
    basket.require_k_cubed_zero()?;
    let excess = k_dot_c2(basket);
    if !excess.is_positive() {
        return Err(Error::NonPositiveExcess(excess.to_string()));
    }
    Ok(excess)
}

/// `lambda = 12 chi(O_F) / (sigma - 24 chi(O_X))`.
pub fn lambda_from_basket(basket: &Basket, chi_f: i64) -> Result<Rational> {
    if !(1..=2).contains(&chi_f) {
        return Err(Error::InvalidChiF(chi_f));
    }
    let excess = positive_excess(basket)?;
    Ok(Rational::integer(12 * chi_f) / excess)
}

/// Last `m` that needs checking: `L + 1`.
pub fn e3_horizon(basket: &Basket) -> Result<u64> {
    let l = basket.index_lcm();
    l.to_u64()
        .and_then(|l| l.checked_add(1))
        .ok_or_else(|| Error::OutOfRange {
            what: "index lcm",
            detail: l.to_string(),
        })
}

/// Whether `chi(mK_X) >= 0` for every `m > 1`.
///
/// Over one full period of length `L` the value grows by `L (sigma - 24 chi) / 12`,
/// which is positive under the precondition, so `m` in `2..=L+1` suffices.
pub fn satisfies_e3(basket: &Basket) -> Result<bool> {
    positive_excess(basket)?;
    let horizon = e3_horizon(basket)?;
    Ok(first_negative_m(basket, horizon).is_none())
}

/// Smallest `m` in `2..=L+1` with `chi(mK) < 0`, without requiring
/// `sigma > 24 chi`. When that inequality fails the finite range is not
/// known to be sufficient, but a hit is still a genuine violation.
pub fn e3_first_failure(basket: &Basket) -> Result<Option<u64>> {
    basket.require_k_cubed_zero()?;
    Ok(first_negative_m(basket, e3_horizon(basket)?))
}

/// Smallest `m` in `2..=horizon` with `chi(mK) < 0`, assuming `K^3 = 0`.
pub(crate) fn first_negative_m(basket: &Basket, horizon: u64) -> Option<u64> {
    match first_negative_m_scaled(basket, horizon) {
        Some(found) => found,
        None => first_negative_m_exact(basket, horizon),
    }
}

/// Integer fast path: everything scaled by `2L`. Returns `None` on overflow.
fn first_negative_m_scaled(basket: &Basket, horizon: u64) -> Option<Option<u64>> {
    let l = basket.index_lcm().to_i128()?;
    let scale = l.checked_mul(2)?;
    let chi_scaled = scale.checked_mul(i128::from(basket.chi_x))?;
    // Per entry: step b, modulus r, factor mult * L / r.
    let factors: Vec<(i64, i64, i128)> = basket
        .entries()
        .iter()
        .map(|e| {
            Some((
                e.b,
                e.r,
                (l / i128::from(e.r)).checked_mul(i128::from(e.multiplicity))?,
            ))
        })
        .collect::<Option<_>>()?;
    let mut residues = vec![0i64; factors.len()];
    let mut acc: i128 = 0;
    for m in 2..=horizon {
        for (c, &(b, r, factor)) in residues.iter_mut().zip(&factors) {
            *c = (*c + b) % r;
            let term = i128::from(*c * (r - *c)).checked_mul(factor)?;
            acc = acc.checked_add(term)?;
        }
        let linear = i128::from(1 - 2 * m as i64).checked_mul(chi_scaled)?;
        if acc.checked_add(linear)? < 0 {
            return Some(Some(m));
        }
    }
    Some(None)
}

fn first_negative_m_exact(basket: &Basket, horizon: u64) -> Option<u64> {
    let mut residues = vec![0i64; basket.entries().len()];
    let mut l = Rational::zero();
    for m in 2..=horizon {
        for (c, e) in residues.iter_mut().zip(basket.entries()) {
            *c = (*c + e.b) % e.r;
            l += Rational::new(*c * (e.r - *c), 2 * e.r) * i64::from(e.multiplicity);
        }
        let value = Rational::from(BigInt::from(1 - 2 * m as i64) * basket.chi_x) + &l;
        if value.is_negative() {
            return Some(m);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(r: i64, b: i64) -> BasketEntry {
        BasketEntry::single(r, b).unwrap()
    }

    fn extremal() -> Basket {
        Basket::parse("2,1x8;3,1x6;7,1;7,2;7,3", 2).unwrap()
    }

    #[test]
    fn local_contribution_values() {
        assert_eq!(local_contribution(&entry(7, 2), 1), Rational::new(5, 7));
        assert_eq!(local_contribution(&entry(7, 2), 0), Rational::zero());
        assert_eq!(local_contribution(&entry(2, 1), 3), Rational::new(1, 4));
    }

    #[test]
    fn l_of_m_values() {
        assert_eq!(l_of_m(&extremal(), 1), Rational::zero());
        assert_eq!(
            l_of_m(&Basket::parse("2,1", 0).unwrap(), 5),
            Rational::new(1, 2)
        );
        assert_eq!(l_of_m(&extremal(), 2), Rational::integer(6));
    }

    #[test]
    fn chi_mk_values() {
        assert_eq!(chi_mk(&extremal(), 2), Rational::zero());
        assert_eq!(
            chi_mk(&Basket::parse("3,1;5,2", 7).unwrap(), 1),
            Rational::integer(-7)
        );
        assert_eq!(
            chi_mk(&Basket::parse("2,1", 1).unwrap(), 2),
            Rational::new(-11, 4)
        );
    }

    #[test]
    fn chi_mk_cubic_term() {
        // K^3 = 1, empty basket, chi = 0: m(m-1)(2m-1)/12.
        let b = Basket::empty(0).with_k_cubed(Rational::integer(1));
        assert_eq!(chi_mk(&b, 3), Rational::new(30, 12));
        assert_eq!(chi_mk_table(&b, 3)[2], Rational::new(30, 12));
    }

    #[test]
    fn table_matches_direct_formula() {
        let b = extremal();
        let table = chi_mk_table(&b, 50);
        for (i, v) in table.iter().enumerate() {
            assert_eq!(v, &chi_mk(&b, i as u64 + 1));
        }
    }

    #[test]
    fn sigma_and_k_c2() {
        assert_eq!(basket_sigma(&Basket::empty(0)), Rational::zero());
        assert_eq!(
            basket_sigma(&Basket::parse("2,1", 0).unwrap()),
            Rational::new(3, 2)
        );
        assert_eq!(basket_sigma(&extremal()), Rational::new(340, 7));
        assert_eq!(k_dot_c2(&extremal()), Rational::new(4, 7));
        assert_eq!(k_dot_c2(&Basket::empty(0)), Rational::zero());
        assert_eq!(
            k_dot_c2(&Basket::parse("2,1", 1).unwrap()),
            Rational::new(-45, 2)
        );
    }

    #[test]
    fn lambda_values() {
        assert_eq!(
            lambda_from_basket(&extremal(), 2).unwrap(),
            Rational::integer(42)
        );
        assert!(matches!(
            lambda_from_basket(&Basket::empty(0), 2),
            Err(Error::NonPositiveExcess(_))
        ));
        let b = Basket::parse("2,1x17", 1).unwrap();
        assert_eq!(lambda_from_basket(&b, 1).unwrap(), Rational::integer(8));
        assert!(matches!(
            lambda_from_basket(&b, 3),
            Err(Error::InvalidChiF(3))
        ));
        let cubed = extremal().with_k_cubed(Rational::integer(1));
        assert!(matches!(
            lambda_from_basket(&cubed, 2),
            Err(Error::NonZeroKCubed(_))
        ));
    }

    #[test]
    fn e3_values() {
        assert!(satisfies_e3(&extremal()).unwrap());
        assert_eq!(e3_horizon(&extremal()).unwrap(), 43);
        // sigma - 24 chi = -45/2: precondition fails.
        assert!(satisfies_e3(&Basket::parse("2,1", 1).unwrap()).is_err());
        // l(2) = l(3) = 17/4, so chi(3K) = -5 + 17/4 < 0.
        let b = Basket::parse("2,1x17", 1).unwrap();
        assert_eq!(chi_mk(&b, 2), Rational::new(5, 4));
        assert_eq!(chi_mk(&b, 3), Rational::new(-3, 4));
        assert!(!satisfies_e3(&b).unwrap());
    }

    #[test]
    fn e3_negative_at_two() {
        // chi(2K) = 3/2 but chi(3K) = -5 + 9/2 < 0.
        let b = Basket::parse("2,1x18", 1).unwrap();
        assert_eq!(first_negative_m(&b, 3), Some(3));
        // Twenty (2,1) points: chi(3K) = 0, then +1/2 per period.
        assert!(satisfies_e3(&Basket::parse("2,1x20", 1).unwrap()).unwrap());
        // One (25,1) point: sigma = 624/25 > 24 but l(2) = 12/25 < 3.
        let bad = Basket::parse("25,1", 1).unwrap();
        assert!(!satisfies_e3(&bad).unwrap());
        assert_eq!(first_negative_m(&bad, 26), Some(2));
        assert_eq!(first_negative_m_exact(&bad, 26), Some(2));
    }

    #[test]
    fn exact_fallback_agrees_with_fast_path() {
        for text in [
            "2,1x8;3,1x6;7,1;7,2;7,3",
            "5,2x4;7,3x2",
            "2,1x17",
            "11,4;13,5",
        ] {
            let b = Basket::parse(text, 1).unwrap();
            let h = e3_horizon(&b).unwrap();
            assert_eq!(
                first_negative_m_scaled(&b, h).unwrap(),
                first_negative_m_exact(&b, h),
                "{text}"
            );
        }
    }

    #[test]
    fn normalize_examples() {
        let b = Basket::raw([entry(7, 5)], 0).normalize();
        assert_eq!(b.entries(), &[entry(7, 2)]);
        let b = Basket::raw([entry(7, 2), entry(7, 2)], 0).normalize();
        assert_eq!(b.entries(), &[BasketEntry::new(7, 2, 2).unwrap()]);
        let b = Basket::raw([entry(5, 3), entry(2, 1)], 0).normalize();
        assert_eq!(b.entries(), &[entry(2, 1), entry(5, 2)]);
    }

    #[test]
    fn entry_validation() {
        assert!(BasketEntry::single(4, 2).is_err());
        assert!(BasketEntry::single(1, 0).is_err());
        assert!(BasketEntry::single(5, 5).is_err());
        assert!(BasketEntry::single(5, 0).is_err());
        assert!(BasketEntry::new(5, 2, 0).is_err());
    }

    #[test]
    fn text_form() {
        let b = extremal();
        assert_eq!(b.to_string(), "2,1x8;3,1x6;7,1;7,2;7,3");
        assert_eq!(
            Basket::parse(" 2 , 1 x 8 ; 3,1x6;7,1;7,2;7,3 ", 2).unwrap(),
            b
        );
        assert_eq!(Basket::parse("7,5;7,2", 0).unwrap().to_string(), "7,2x2");
        assert!(Basket::parse("", 0).unwrap().is_empty());
        for bad in ["2", "2,1;", "2,1x", "2,1x0", "a,b", "4,2", "2,1,1"] {
            assert!(Basket::parse(bad, 0).is_err(), "accepted {bad:?}");
        }
    }
}
