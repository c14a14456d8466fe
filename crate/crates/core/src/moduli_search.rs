//! Lower bounds for `deg A` where `K_X = f^* A` over a rational base curve.
//!
//! The only searched object is the reduced expression
//!
//! ```text
//! deg A = alpha/(b u n) + beta/(b m) + gamma/(b m') - 1/u
//! ```
//!
//! with `(n, m, m')` a permutation of `(8, 10, 12)`, `2 <= u <= 12` and
//! `b` the fiber index (`1` for abelian fibers, `4` or `6` for bielliptic
//! ones). The expression is strictly increasing in each numerator, and once a
//! numerator reaches its cap (`b u n`, `b m`, `b m'`) that term alone is at
//! least `1 > 1/u`, so the capped grid contains the minimum positive value.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Admissible moduli indices `n_P > 1` that survive for abelian fibers.
pub const MODULI_DENOMINATORS: [i64; 3] = [8, 10, 12];
pub const FIBER_INDICES: [i64; 3] = [1, 4, 6];
pub const MIN_LOCAL_ORDER: i64 = 2;
pub const MAX_LOCAL_ORDER: i64 = 12;

/// `dim H^2_prim` of an abelian surface; bounds `phi(n_P)`.
pub const ABELIAN_PRIMITIVE_BETTI: u64 = 5;

pub const HURWITZ_DEFAULT_ORDER_CAP: i64 = 84;
pub const HURWITZ_DEFAULT_COUNT_CAP: usize = 4;

/// One point of the reduced search grid, without its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegAParams {
    pub u: i64,
    pub denoms: [i64; 3],
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub b: i64,
}

impl DegAParams {
    pub fn new(
        u: i64,
        denoms: [i64; 3],
        alpha: i64,
        beta: i64,
        gamma: i64,
        b: i64,
    ) -> Result<Self> {
        let out_of_range = |what, detail: String| Err(Error::OutOfRange { what, detail });
        if !(MIN_LOCAL_ORDER..=MAX_LOCAL_ORDER).contains(&u) {
            return out_of_range("u", format!("{u} not in [2, 12]"));
        }
        let mut sorted = denoms;
        sorted.sort_unstable();
        if sorted != MODULI_DENOMINATORS {
            return out_of_range(
                "denoms",
                format!("{denoms:?} is not a permutation of (8, 10, 12)"),
            );
        }
        if alpha < 1 || beta < 1 || gamma < 1 {
            return out_of_range(
                "numerators",
                format!("({alpha}, {beta}, {gamma}) must be >= 1"),
            );
        }
        if !FIBER_INDICES.contains(&b) {
            return out_of_range("b", format!("{b} not in {{1, 4, 6}}"));
        }
        Ok(DegAParams {
            u,
            denoms,
            alpha,
            beta,
            gamma,
            b,
        })
    }

    /// Ordering used to pick a single witness among equal minima. The pair
    /// `(m, beta), (m', gamma)` enters symmetrically, so the larger `m` wins.
    fn tie_key(&self) -> (i64, i64, i64, Reverse<i64>, i64, i64, i64) {
        let [n, m, _] = self.denoms;
        (
            self.b,
            self.u,
            n,
            Reverse(m),
            self.alpha,
            self.beta,
            self.gamma,
        )
    }
}

/// Exact value of the reduced expression.
pub fn eval_dega_expr(p: &DegAParams) -> Rational {
    let [n, m, m_prime] = p.denoms;
    Rational::new(p.alpha, p.b * p.u * n)
        + Rational::new(p.beta, p.b * m)
        + Rational::new(p.gamma, p.b * m_prime)
        - Rational::new(1, p.u)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegAWitness {
    #[serde(flatten)]
    pub params: DegAParams,
    pub value: Rational,
}

impl fmt::Display for DegAWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let [n, m, m_prime] = p.denoms;
        write!(
            f,
            "b={}, u={}, (n,m,m')=({n},{m},{m_prime}), (alpha,beta,gamma)=({},{},{}) -> {}",
            p.b, p.u, p.alpha, p.beta, p.gamma, self.value
        )
    }
}

/// Minimum strictly positive value of the reduced expression over the capped
/// grid for the given fiber indices.
///
/// For each `(b, u, denoms, alpha, beta)` only the smallest `gamma` making the
/// value positive can be minimal, so it is solved for directly.
pub fn min_positive_dega(b_values: &[i64]) -> Result<DegAWitness> {
    let bs: BTreeSet<i64> = b_values.iter().copied().collect();
    if bs.is_empty() {
        return Err(Error::EmptyFiberIndexSet);
    }
    if let Some(&b) = bs.iter().find(|b| !FIBER_INDICES.contains(b)) {
        return Err(Error::OutOfRange {
            what: "b",
            detail: format!("{b} not in {{1, 4, 6}}"),
        });
    }

    // Best value so far as (numerator, denominator) over a per-cell common denominator.
    let mut best: Option<(i128, i128, DegAParams)> = None;
    for &b in &bs {
        for u in MIN_LOCAL_ORDER..=MAX_LOCAL_ORDER {
            for perm in MODULI_DENOMINATORS.iter().copied().permutations(3) {
                let [n, m, m_prime] = [perm[0], perm[1], perm[2]];
                let common = (b * u * n).lcm(&(b * m)).lcm(&(b * m_prime)).lcm(&u);
                let (ca, cb, cg, cu) = (
                    common / (b * u * n),
                    common / (b * m),
                    common / (b * m_prime),
                    common / u,
                );
                for alpha in 1..=b * u * n {
                    for beta in 1..=b * m {
                        let base = alpha * ca + beta * cb - cu;
                        let gamma = if base >= 0 { 1 } else { -base / cg + 1 };
                        if gamma > b * m_prime {
                            continue;
                        }
                        let numer = i128::from(base + gamma * cg);
                        debug_assert!(numer > 0);
                        let params = DegAParams {
                            u,
                            denoms: [n, m, m_prime],
                            alpha,
                            beta,
                            gamma,
                            b,
                        };
                        let denom = i128::from(common);
                        let better = match &best {
                            None => true,
                            Some((bn, bd, bp)) => {
                                let lhs = numer * bd;
                                let rhs = bn * denom;
                                lhs < rhs || (lhs == rhs && params.tie_key() < bp.tie_key())
                            }
                        };
                        if better {
                            best = Some((numer, denom, params));
                        }
                    }
                }
            }
        }
    }
    let (_, _, params) = best.ok_or(Error::NoPositiveValue)?;
    Ok(DegAWitness {
        value: eval_dega_expr(&params),
        params,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuliFiber {
    Abelian,
    Bielliptic,
}

impl ModuliFiber {
    /// Fiber indices `b` with `|bK_F|` non-empty that the search ranges over.
    pub fn fiber_indices(self) -> &'static [i64] {
        match self {
            ModuliFiber::Abelian => &[1],
            ModuliFiber::Bielliptic => &[4, 6],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseBound {
    pub case_label: String,
    pub bound: Rational,
    pub witness: Option<DegAWitness>,
}

impl CaseBound {
    fn closed_form(label: &str, bound: Rational) -> Self {
        CaseBound {
            case_label: label.to_string(),
            bound,
            witness: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegALowerBound {
    pub overall: Rational,
    pub cases: Vec<CaseBound>,
}

impl DegALowerBound {
    pub fn case(&self, label: &str) -> Option<&CaseBound> {
        self.cases.iter().find(|c| c.case_label == label)
    }
}

pub const CASE_NO_ORBIFOLD_POINT: &str = "|I|=0";
pub const CASE_MANY_POINTS: &str = "|I|>=3 or some u>=3";
pub const CASE_TWO_POINTS: &str = "|I|=2, u=2";
pub const CASE_ONE_POINT_LARGE_U: &str = "|I|=1, u>=13";
pub const CASE_ONE_POINT_SMALL_U: &str = "|I|=1, u<=12";

/// Case-by-case lower bound for `deg A`, following the split on the set `I`
/// of points with `u_P > 1`. The closed-form cases are evaluated from the
/// admissible moduli indices; the last case runs [`min_positive_dega`].
pub fn dega_lower_bound(fiber: ModuliFiber) -> Result<DegALowerBound> {
    let indices = admissible_indices(ABELIAN_PRIMITIVE_BETTI)?;
    let moduli_lcm = indices.iter().fold(1i64, |acc, &n| acc.lcm(&(n as i64)));
    let largest_n = *indices.last().expect("non-empty") as i64;
    let largest_b = *fiber.fiber_indices().last().expect("non-empty");

    // No orbifold point: (b * lcm) (M + B) is integral.
    let no_point = Rational::new(1, moduli_lcm * largest_b);
    // deg floor(M) >= 1 plus two orbifold points, one of order >= 3.
    let many_points = Rational::integer(-1) + Rational::new(1, 2) + Rational::new(2, 3);
    // Two points with u = 2: at least 1/n_P + 1/n_Q.
    let two_points = Rational::new(2, largest_n);
    // One point with u >= 13: at least 1/n - 1/u.
    let large_u = Rational::new(1, largest_n) - Rational::new(1, MAX_LOCAL_ORDER + 1);
    let searched = min_positive_dega(fiber.fiber_indices())?;

    let two_points_label = match fiber {
        ModuliFiber::Abelian => CASE_TWO_POINTS,
        ModuliFiber::Bielliptic => "|I|=2",
    };
    let cases = vec![
        CaseBound::closed_form(CASE_NO_ORBIFOLD_POINT, no_point),
        CaseBound::closed_form(CASE_MANY_POINTS, many_points),
        CaseBound::closed_form(two_points_label, two_points),
        CaseBound::closed_form(CASE_ONE_POINT_LARGE_U, large_u),
        CaseBound {
            case_label: CASE_ONE_POINT_SMALL_U.to_string(),
            bound: searched.value.clone(),
            witness: Some(searched),
        },
    ];
    let overall = cases
        .iter()
        .map(|c| c.bound.clone())
        .min()
        .expect("five cases");
    Ok(DegALowerBound { overall, cases })
}

/// Orbifold signature of a curve quotient and its `delta = -2 + sum(1 - 1/m_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzSignature {
    pub orders: Vec<i64>,
    pub delta: Rational,
}

impl HurwitzSignature {
    pub fn new(mut orders: Vec<i64>) -> Result<Self> {
        if let Some(&bad) = orders.iter().find(|&&m| m < 2) {
            return Err(Error::OutOfRange {
                what: "orbifold order",
                detail: format!("{bad} < 2"),
            });
        }
        orders.sort_unstable();
        let delta = orbifold_delta(&orders);
        Ok(HurwitzSignature { orders, delta })
    }
}

pub fn orbifold_delta(orders: &[i64]) -> Rational {
    orders.iter().fold(Rational::integer(-2), |acc, &m| {
        acc + Rational::new(m - 1, m)
    })
}

/// Signature with the smallest positive `delta` among multisets of at most
/// `count_cap` orders, each at most `order_cap`.
pub fn hurwitz_min_positive(order_cap: i64, count_cap: usize) -> Result<HurwitzSignature> {
    if order_cap < 7 {
        return Err(Error::CapTooSmall {
            what: "order_cap",
            value: order_cap,
            min: 7,
        });
    }
    if count_cap < 3 {
        return Err(Error::CapTooSmall {
            what: "count_cap",
            value: count_cap as i64,
            min: 3,
        });
    }
    let mut search = HurwitzSearch {
        order_cap,
        count_cap,
        stack: Vec::new(),
        best: None,
    };
    search.visit(MIN_LOCAL_ORDER, Rational::integer(-2));
    let (orders, delta) = search.best.ok_or(Error::NoPositiveValue)?;
    Ok(HurwitzSignature { orders, delta })
}

struct HurwitzSearch {
    order_cap: i64,
    count_cap: usize,
    stack: Vec<i64>,
    best: Option<(Vec<i64>, Rational)>,
}

impl HurwitzSearch {
    fn visit(&mut self, first: i64, delta: Rational) {
        if self.stack.len() == self.count_cap {
            return;
        }
        for m in first..=self.order_cap {
            let next = &delta + &Rational::new(m - 1, m);
            // Larger orders and longer signatures only increase delta.
            if matches!(&self.best, Some((_, best)) if next >= *best) {
                break;
            }
            self.stack.push(m);
            if next.is_positive() {
                self.best = Some((self.stack.clone(), next.clone()));
            }
            self.visit(m, next);
            self.stack.pop();
        }
    }
}

/// Euler's totient by trial division.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// `{ n >= 1 : phi(n) <= betti_bound }`. Finite since `phi(n) >= sqrt(n/2)`,
/// so only `n <= 2 betti_bound^2` need to be tested.
pub fn admissible_indices(betti_bound: u64) -> Result<BTreeSet<u64>> {
    if betti_bound < 1 {
        return Err(Error::CapTooSmall {
            what: "betti_bound",
            value: betti_bound as i64,
            min: 1,
        });
    }
    let limit = 2 * betti_bound * betti_bound;
    Ok((1..=limit)
        .filter(|&n| euler_phi(n) <= betti_bound)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(u: i64, denoms: [i64; 3], a: i64, b_: i64, g: i64, b: i64) -> DegAParams {
        DegAParams::new(u, denoms, a, b_, g, b).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(
            eval_dega_expr(&params(3, [12, 10, 8], 4, 1, 1, 1)),
            Rational::new(1, 360)
        );
        assert_eq!(
            eval_dega_expr(&params(3, [12, 10, 8], 19, 6, 7, 6)),
            Rational::new(1, 2160)
        );
        // 8/16 + 5/10 + 6/12 - 1/2
        assert_eq!(
            eval_dega_expr(&params(2, [8, 10, 12], 8, 5, 6, 1)),
            Rational::integer(1)
        );
    }

    #[test]
    fn params_validation() {
        assert!(DegAParams::new(1, [8, 10, 12], 1, 1, 1, 1).is_err());
        assert!(DegAParams::new(13, [8, 10, 12], 1, 1, 1, 1).is_err());
        assert!(DegAParams::new(3, [8, 10, 10], 1, 1, 1, 1).is_err());
        assert!(DegAParams::new(3, [8, 10, 12], 0, 1, 1, 1).is_err());
        assert!(DegAParams::new(3, [8, 10, 12], 1, 1, 1, 2).is_err());
    }

    #[test]
    fn abelian_minimum() {
        let w = min_positive_dega(&[1]).unwrap();
        assert_eq!(w.value, Rational::new(1, 360));
        assert_eq!(w.params, params(3, [12, 10, 8], 4, 1, 1, 1));
    }

    #[test]
    fn empty_or_bad_fiber_index_set() {
        assert_eq!(min_positive_dega(&[]), Err(Error::EmptyFiberIndexSet));
        assert!(min_positive_dega(&[2]).is_err());
    }

    #[test]
    fn abelian_case_table() {
        let t = dega_lower_bound(ModuliFiber::Abelian).unwrap();
        assert_eq!(t.overall, Rational::new(1, 360));
        assert_eq!(
            t.case(CASE_NO_ORBIFOLD_POINT).unwrap().bound,
            Rational::new(1, 120)
        );
        assert_eq!(t.case(CASE_MANY_POINTS).unwrap().bound, Rational::new(1, 6));
        assert_eq!(t.case(CASE_TWO_POINTS).unwrap().bound, Rational::new(1, 6));
        assert_eq!(
            t.case(CASE_ONE_POINT_LARGE_U).unwrap().bound,
            Rational::new(1, 156)
        );
    }

    #[test]
    fn bielliptic_closed_form_cases() {
        let t = dega_lower_bound(ModuliFiber::Bielliptic).unwrap();
        assert_eq!(
            t.case(CASE_NO_ORBIFOLD_POINT).unwrap().bound,
            Rational::new(1, 720)
        );
        assert_eq!(t.case("|I|=2").unwrap().bound, Rational::new(1, 6));
        assert_eq!(
            t.case(CASE_ONE_POINT_LARGE_U).unwrap().bound,
            Rational::new(1, 156)
        );
        let searched = t.case(CASE_ONE_POINT_SMALL_U).unwrap();
        assert_eq!(t.overall, searched.bound.clone().min(Rational::new(1, 720)));
    }

    #[test]
    fn hurwitz_examples() {
        let s = hurwitz_min_positive(HURWITZ_DEFAULT_ORDER_CAP, HURWITZ_DEFAULT_COUNT_CAP).unwrap();
        assert_eq!(s.orders, vec![2, 3, 7]);
        assert_eq!(s.delta, Rational::new(1, 42));
        assert_eq!(orbifold_delta(&[2, 2]), Rational::integer(-1));
        assert_eq!(orbifold_delta(&[2, 3, 8]), Rational::new(1, 24));
        assert!(hurwitz_min_positive(6, 4).is_err());
        assert!(hurwitz_min_positive(84, 2).is_err());
        assert!(HurwitzSignature::new(vec![1, 3]).is_err());
        assert_eq!(
            HurwitzSignature::new(vec![7, 2, 3]).unwrap().delta,
            Rational::new(1, 42)
        );
    }

    #[test]
    fn totient() {
        let phis: Vec<u64> = (1..=12).map(euler_phi).collect();
        assert_eq!(phis, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn admissible_examples() {
        let set = |v: &[u64]| v.iter().copied().collect::<BTreeSet<u64>>();
        assert_eq!(
            admissible_indices(5).unwrap(),
            set(&[1, 2, 3, 4, 5, 6, 8, 10, 12])
        );
        assert_eq!(admissible_indices(1).unwrap(), set(&[1, 2]));
        assert_eq!(admissible_indices(2).unwrap(), set(&[1, 2, 3, 4, 6]));
        assert!(admissible_indices(0).is_err());
    }
}
