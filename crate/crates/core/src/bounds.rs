//! Effective pluricanonical thresholds per fiber type.
//!
//! Over a rational base, `h^0(mK_X) >= 2` as soon as `m > 2 lambda + 1`, and
//! two sections already define the Iitaka fibration. Each certificate takes
//! its `lambda` bound from the search that proves it, computed in the same
//! call; nothing in this module knows the final numbers.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumeration::{max_lambda_check, SurfaceFiber};
use crate::error::{Error, Result};
use crate::moduli_search::{
    dega_lower_bound, hurwitz_min_positive, ModuliFiber, HURWITZ_DEFAULT_COUNT_CAP,
    HURWITZ_DEFAULT_ORDER_CAP,
};
use crate::rational::Rational;

/// Number of independent sections needed before the linear system maps
/// onto the base curve.
pub const SECTIONS: i64 = 2;

/// Bounds handed to the basket enumeration for verification.
pub const K3_LAMBDA_CLAIM: i64 = 42;
pub const ENRIQUES_LAMBDA_CLAIM: i64 = 20;

/// Fiber indices `b >= 2` possible for a non-rational base.
pub const NONRATIONAL_FIBER_INDICES: [i64; 4] = [2, 3, 4, 6];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberType {
    K3,
    Enriques,
    AbelianNonIsotrivial,
    AbelianIsotrivial,
    BiellipticIsotrivial,
    BiellipticNonIsotrivial,
    NonRationalBase,
}

impl FiberType {
    pub const ALL: [FiberType; 7] = [
        FiberType::K3,
        FiberType::Enriques,
        FiberType::AbelianNonIsotrivial,
        FiberType::AbelianIsotrivial,
        FiberType::BiellipticIsotrivial,
        FiberType::BiellipticNonIsotrivial,
        FiberType::NonRationalBase,
    ];

    /// Possible least `b >= 1` with `|bK_F|` non-empty.
    pub fn fiber_indices(self) -> &'static [i64] {
        match self {
            FiberType::K3 | FiberType::AbelianNonIsotrivial | FiberType::AbelianIsotrivial => &[1],
            FiberType::Enriques => &[2],
            FiberType::BiellipticIsotrivial | FiberType::BiellipticNonIsotrivial => &[4, 6],
            FiberType::NonRationalBase => &NONRATIONAL_FIBER_INDICES,
        }
    }

    /// `m` must be divisible by every possible fiber index.
    pub fn divisibility(self) -> i64 {
        self.fiber_indices().iter().fold(1, |acc, b| acc.lcm(b))
    }

    pub fn tag(self) -> &'static str {
        match self {
            FiberType::K3 => "k3",
            FiberType::Enriques => "enriques",
            FiberType::AbelianNonIsotrivial => "abelian-non-isotrivial",
            FiberType::AbelianIsotrivial => "abelian-isotrivial",
            FiberType::BiellipticIsotrivial => "bielliptic-isotrivial",
            FiberType::BiellipticNonIsotrivial => "bielliptic-non-isotrivial",
            FiberType::NonRationalBase => "non-rational-base",
        }
    }
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FiberType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FiberType::ALL
            .into_iter()
            .find(|t| t.tag() == s)
            .ok_or_else(|| Error::OutOfRange {
                what: "fiber type",
                detail: s.to_string(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub fiber: FiberType,
    /// `None` for a non-rational base, where the threshold does not come
    /// from a `lambda` bound.
    pub lambda_bound: Option<Rational>,
    pub divisibility: i64,
    pub m_min: i64,
    pub provenance: Vec<String>,
}

impl BoundCertificate {
    /// `m_min` is divisible by `divisibility`, exceeds `2 lambda + 1`, and is
    /// the least such value.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::BoundNotVerified(format!("{}: {what}", self.fiber)));
        if self.divisibility < 1 || self.m_min % self.divisibility != 0 {
            return fail("m_min not divisible");
        }
        if let Some(lambda) = &self.lambda_bound {
            let line = Rational::integer(SECTIONS) * lambda + 1;
            if Rational::integer(self.m_min) <= line {
                return fail("m_min does not exceed 2 lambda + 1");
            }
            if Rational::integer(self.m_min - self.divisibility) > line {
                return fail("m_min is not minimal");
            }
        }
        Ok(())
    }
}

/// Least `m` with `m > sections * lambda + 1` and `divisibility | m`.
fn threshold_for_sections(
    lambda_bound: &Rational,
    sections: i64,
    divisibility: i64,
) -> Result<i64> {
    if lambda_bound.is_negative() {
        return Err(Error::OutOfRange {
            what: "lambda_bound",
            detail: format!("{lambda_bound} is negative"),
        });
    }
    if divisibility < 1 {
        return Err(Error::OutOfRange {
            what: "divisibility",
            detail: format!("{divisibility} < 1"),
        });
    }
    let line = lambda_bound * sections + 1;
    let least = (line.floor() + 1u32)
        .to_i64()
        .ok_or_else(|| Error::OutOfRange {
            what: "lambda_bound",
            detail: format!("{lambda_bound} is too large"),
        })?;
    Ok(round_up(least, divisibility))
}

/// Least multiple of `step` that is `>= value`, for `value >= 0`, `step >= 1`.
fn round_up(value: i64, step: i64) -> i64 {
    (value + step - 1) / step * step
}

/// Least `m > 2 lambda + 1` divisible by `divisibility`.
pub fn pluricanonical_threshold(lambda_bound: &Rational, divisibility: i64) -> Result<i64> {
    threshold_for_sections(lambda_bound, SECTIONS, divisibility)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonRationalBound {
    /// `3b`: `|3bK_X|` defines the Iitaka fibration.
    pub m_min_with_b_divisibility: i64,
    /// Least multiple of 12 that works for every possible `b`.
    pub div12_statement: i64,
}

/// Thresholds over a base curve of positive genus.
pub fn nonrational_bound(b_fiber: i64) -> Result<NonRationalBound> {
    if !NONRATIONAL_FIBER_INDICES.contains(&b_fiber) {
        return Err(Error::OutOfRange {
            what: "b_fiber",
            detail: format!("{b_fiber} not in {{2, 3, 4, 6}}"),
        });
    }
    let step = NONRATIONAL_FIBER_INDICES
        .iter()
        .fold(1, |acc, b| acc.lcm(b));
    let needed = NONRATIONAL_FIBER_INDICES
        .iter()
        .map(|b| 3 * b)
        .max()
        .expect("non-empty");
    Ok(NonRationalBound {
        m_min_with_b_divisibility: 3 * b_fiber,
        div12_statement: round_up(needed, step),
    })
}

fn certificate(
    fiber: FiberType,
    lambda: Rational,
    mut provenance: Vec<String>,
) -> Result<BoundCertificate> {
    let divisibility = fiber.divisibility();
    let m_min = pluricanonical_threshold(&lambda, divisibility)?;
    provenance.push(format!(
        "pluricanonical_threshold(lambda={lambda}, d={divisibility}) = {m_min}"
    ));
    Ok(BoundCertificate {
        fiber,
        lambda_bound: Some(lambda),
        divisibility,
        m_min,
        provenance,
    })
}

fn surface_certificate(
    fiber: FiberType,
    surface: SurfaceFiber,
    claim: i64,
) -> Result<BoundCertificate> {
    let claim = Rational::integer(claim);
    let check = max_lambda_check(surface, &claim)?;
    if !check.empty_above {
        return Err(Error::BoundNotVerified(format!(
            "{surface:?}: {} basket(s) with lambda > {claim}",
            check.above.len()
        )));
    }
    let mut provenance = vec![format!(
        "max_lambda_check({surface:?}, {claim}): empty_above=true, witnesses_at_bound={}",
        check.witnesses_at_bound.len()
    )];
    for w in &check.witnesses_at_bound {
        provenance.push(format!(
            "witness basket {} chi={} sigma={} lambda={}",
            w.basket,
            w.basket.chi_x(),
            w.sigma,
            w.lambda
        ));
    }
    certificate(fiber, claim, provenance)
}

fn moduli_certificate(fiber: FiberType, moduli: ModuliFiber) -> Result<BoundCertificate> {
    let table = dega_lower_bound(moduli)?;
    let mut provenance: Vec<String> = table
        .cases
        .iter()
        .map(|c| match &c.witness {
            Some(w) => format!("deg A case {}: >= {} at {w}", c.case_label, c.bound),
            None => format!("deg A case {}: >= {}", c.case_label, c.bound),
        })
        .collect();
    provenance.push(format!("dega_lower_bound({moduli:?}) = {}", table.overall));
    certificate(fiber, table.overall.recip()?, provenance)
}

fn isotrivial_certificate(fiber: FiberType) -> Result<BoundCertificate> {
    let signature = hurwitz_min_positive(HURWITZ_DEFAULT_ORDER_CAP, HURWITZ_DEFAULT_COUNT_CAP)?;
    let provenance = vec![
        format!(
            "hurwitz_min_positive({HURWITZ_DEFAULT_ORDER_CAP}, {HURWITZ_DEFAULT_COUNT_CAP}): orders {:?}, delta = {}",
            signature.orders, signature.delta
        ),
        "threshold applies to every m >= m_min".to_string(),
    ];
    certificate(fiber, signature.delta.recip()?, provenance)
}

fn nonrational_certificate() -> Result<BoundCertificate> {
    let fiber = FiberType::NonRationalBase;
    let mut provenance = Vec::new();
    let mut m_min = None;
    for &b in fiber.fiber_indices() {
        let bound = nonrational_bound(b)?;
        provenance.push(format!(
            "nonrational_bound(b={b}): |{}K_X| defines the fibration; all-b multiple of 12 = {}",
            bound.m_min_with_b_divisibility, bound.div12_statement
        ));
        m_min = Some(bound.div12_statement);
    }
    Ok(BoundCertificate {
        fiber,
        lambda_bound: None,
        divisibility: fiber.divisibility(),
        m_min: m_min.expect("non-empty"),
        provenance,
    })
}

/// Certificate for one fiber type, recomputing every search it depends on.
pub fn fiber_bound(fiber: FiberType) -> Result<BoundCertificate> {
    let cert = match fiber {
        FiberType::K3 => surface_certificate(fiber, SurfaceFiber::K3, K3_LAMBDA_CLAIM)?,
        FiberType::Enriques => {
            surface_certificate(fiber, SurfaceFiber::Enriques, ENRIQUES_LAMBDA_CLAIM)?
        }
        FiberType::AbelianNonIsotrivial => moduli_certificate(fiber, ModuliFiber::Abelian)?,
        FiberType::BiellipticNonIsotrivial => moduli_certificate(fiber, ModuliFiber::Bielliptic)?,
        FiberType::AbelianIsotrivial | FiberType::BiellipticIsotrivial => {
            isotrivial_certificate(fiber)?
        }
        FiberType::NonRationalBase => nonrational_certificate()?,
    };
    cert.check_invariants()?;
    Ok(cert)
}

/// Certificates for all fiber types, in [`FiberType::ALL`] order.
pub fn theorem_table() -> Result<Vec<BoundCertificate>> {
    FiberType::ALL.par_iter().map(|&f| fiber_bound(f)).collect()
}
