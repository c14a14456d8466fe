//! Published values the reports are compared against. Nothing here feeds a
//! computation; these only decide the `status` field.

use iitaka_core::bounds::FiberType;
use iitaka_core::enumeration::{Comparison, SearchWindow, SurfaceFiber};
use iitaka_core::moduli_search::{
    ModuliFiber, CASE_MANY_POINTS, CASE_NO_ORBIFOLD_POINT, CASE_ONE_POINT_LARGE_U,
};
use iitaka_core::Rational;

use crate::report::Check;

pub const K3_LAMBDA: i64 = 42;
pub const ENRIQUES_LAMBDA: i64 = 20;

pub const EXTREMAL_BASKET: &str = "2,1x8;3,1x6;7,1;7,2;7,3";
pub const EXTREMAL_CHI: i64 = 2;
pub const EXTREMAL_SIGMA: &str = "340/7";
pub const EXTREMAL_K_DOT_C2: &str = "4/7";

pub struct DegAExpectation {
    pub overall: &'static str,
    /// `(b, u, n, m, m', alpha, beta, gamma)`
    pub witness: (i64, i64, i64, i64, i64, i64, i64, i64),
    pub cases: &'static [(&'static str, &'static str)],
}

pub const ABELIAN_DEGA: DegAExpectation = DegAExpectation {
    overall: "1/360",
    witness: (1, 3, 12, 10, 8, 4, 1, 1),
    cases: &[
        (CASE_NO_ORBIFOLD_POINT, "1/120"),
        (CASE_MANY_POINTS, "1/6"),
        (CASE_ONE_POINT_LARGE_U, "1/156"),
    ],
};

pub const BIELLIPTIC_DEGA: DegAExpectation = DegAExpectation {
    overall: "1/2160",
    witness: (6, 3, 12, 10, 8, 19, 6, 7),
    cases: &[(CASE_NO_ORBIFOLD_POINT, "1/720")],
};

pub const HURWITZ_DELTA: &str = "1/42";
pub const HURWITZ_ORDERS: [i64; 3] = [2, 3, 7];

/// `(m_min, divisibility)` for each fiber type.
pub fn theorem_entry(fiber: FiberType) -> (i64, i64) {
    match fiber {
        FiberType::K3 => (86, 1),
        FiberType::Enriques => (42, 2),
        FiberType::AbelianNonIsotrivial => (722, 1),
        FiberType::AbelianIsotrivial => (86, 1),
        FiberType::BiellipticIsotrivial => (96, 12),
        FiberType::BiellipticNonIsotrivial => (4332, 12),
        FiberType::NonRationalBase => (24, 12),
    }
}

pub fn dega_expectation(fiber: ModuliFiber) -> &'static DegAExpectation {
    match fiber {
        ModuliFiber::Abelian => &ABELIAN_DEGA,
        ModuliFiber::Bielliptic => &BIELLIPTIC_DEGA,
    }
}

pub fn witness_text(w: (i64, i64, i64, i64, i64, i64, i64, i64)) -> String {
    let (b, u, n, m, mp, alpha, beta, gamma) = w;
    format!("b={b};u={u};denoms={n},{m},{mp};alpha={alpha};beta={beta};gamma={gamma}")
}

fn claimed_lambda(fiber: SurfaceFiber) -> Rational {
    Rational::integer(match fiber {
        SurfaceFiber::K3 => K3_LAMBDA,
        SurfaceFiber::Enriques => ENRIQUES_LAMBDA,
    })
}

/// Checks for a search: emptiness above the published bound and, for the
/// K3 closed window at or below 42 containing `chi = 2`, the extremal basket.
/// `found` holds `(basket, chi)` pairs.
pub fn search_checks(
    fiber: SurfaceFiber,
    window: &SearchWindow,
    found: &[(String, i64)],
) -> Vec<Check> {
    let mut checks = Vec::new();
    let in_range = window.chi_x_values().is_subset(&fiber.chi_x_values());
    let claim = claimed_lambda(fiber);
    let n = window.threshold();
    let above_claim = match window.comparison() {
        Comparison::Strict => *n >= claim,
        Comparison::Closed => *n > claim,
    };
    if in_range && above_claim {
        checks.push(Check::new("count_above_bound", 0, found.len()));
    }
    if fiber == SurfaceFiber::K3
        && window.comparison() == Comparison::Closed
        && *n <= claim
        && window.chi_x_values().contains(&EXTREMAL_CHI)
    {
        let present = found
            .iter()
            .any(|(b, chi)| b == EXTREMAL_BASKET && *chi == EXTREMAL_CHI);
        checks.push(Check::new(
            "contains_extremal_basket",
            EXTREMAL_BASKET,
            if present { EXTREMAL_BASKET } else { "absent" },
        ));
    }
    checks
}

/// Extra checks when the basket is the extremal one.
pub fn verify_checks(
    basket: &str,
    chi: i64,
    chi_f: i64,
    sigma: &str,
    k_dot_c2: &str,
    lambda: Option<&str>,
) -> Vec<Check> {
    if basket != EXTREMAL_BASKET || chi != EXTREMAL_CHI || chi_f != 2 {
        return Vec::new();
    }
    vec![
        Check::new("sigma", EXTREMAL_SIGMA, sigma),
        Check::new("k_dot_c2", EXTREMAL_K_DOT_C2, k_dot_c2),
        Check::new("lambda", K3_LAMBDA, lambda.unwrap_or("undefined")),
    ]
}
