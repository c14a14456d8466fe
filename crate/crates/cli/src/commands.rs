use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use iitaka_core::baskets::{
    basket_sigma, chi_mk_table, e3_first_failure, e3_horizon, k_dot_c2, lambda_from_basket, Basket,
};
use iitaka_core::bounds::{fiber_bound, BoundCertificate, FiberType};
use iitaka_core::enumeration::{
    brute_force_oracle, enumerate_baskets, verify_result, SearchResult, SearchWindow, SurfaceFiber,
};
use iitaka_core::moduli_search::{
    dega_lower_bound, hurwitz_min_positive, DegAWitness, ModuliFiber,
};
use iitaka_core::Rational;
use itertools::join;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::args::{
    BoundsArgs, Cli, Command, MinDegaArgs, OracleArgs, SearchArgs, ThresholdArgs, VerifyArgs,
};
use crate::cache::Cache;
use crate::expected;
use crate::report::{status_of, Check, Report, Status};

/// Input problems surface as status `error` (exit 2); everything else is a
/// comparison outcome.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Inputs = BTreeMap<String, String>;

struct Outcome {
    results: Value,
    checks: Vec<Check>,
}

impl Outcome {
    fn new(payload: impl Serialize, checks: Vec<Check>) -> Self {
        Outcome {
            results: serde_json::to_value(payload).expect("payload serializes"),
            checks,
        }
    }
}

pub fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Search(_) => "search",
        Command::VerifyBasket(_) => "verify-basket",
        Command::MinDega(_) => "min-dega",
        Command::Bounds(_) => "bounds",
        Command::Oracle(_) => "oracle",
    }
}

/// Runs the parsed command on a pool of `--jobs` workers and builds the report.
pub fn execute(cli: &Cli) -> Report {
    let start = Instant::now();
    let command = &cli.command;
    let inputs = inputs_of(command);
    let outcome = rayon::ThreadPoolBuilder::new()
        .num_threads(usize::from(cli.output.jobs))
        .build()
        .map_err(InputError::from)
        .and_then(|pool| pool.install(|| dispatch(cli)));
    let (status, results) = match outcome {
        Ok(Outcome {
            mut results,
            checks,
        }) => {
            let status = status_of(&checks);
            results["checks"] = serde_json::to_value(&checks).expect("checks serialize");
            (status, results)
        }
        Err(InputError(message)) => (Status::Error, serde_json::json!({ "error": message })),
    };
    Report {
        command: command_name(command).to_string(),
        inputs,
        status,
        results,
        timing_ms: u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, InputError> {
    let cache = cli.output.cache.as_deref().map(Cache::open).transpose()?;
    match &cli.command {
        Command::Search(a) => search(a, cache.as_ref()),
        Command::VerifyBasket(a) => verify_basket(a),
        Command::MinDega(a) => min_dega(a),
        Command::Bounds(a) => bounds(a),
        Command::Oracle(a) => oracle(a),
    }
}

fn threshold_inputs(inputs: &mut Inputs, t: &ThresholdArgs) {
    let (n, comparison) = t.resolve();
    inputs.insert("threshold".into(), n.to_string());
    inputs.insert("comparison".into(), comparison.to_string());
}

fn inputs_of(command: &Command) -> Inputs {
    let mut inputs = Inputs::new();
    let mut put = |k: &str, v: String| {
        inputs.insert(k.to_string(), v);
    };
    match command {
        Command::Search(a) => {
            let fiber = SurfaceFiber::from(a.fiber);
            put("fiber", format!("{:?}", a.fiber).to_lowercase());
            put("chi_f", fiber.chi_f().to_string());
            put("chi", join(search_chis(a), ","));
            put("chi_override", a.chi_override.to_string());
            threshold_inputs(&mut inputs, &a.threshold);
        }
        Command::VerifyBasket(a) => {
            put("basket", a.basket.clone());
            put("chi", a.chi.to_string());
            put("chi_f", a.chi_f.to_string());
        }
        Command::MinDega(a) => match a.fiber {
            Some(f) => put("fiber", format!("{f:?}").to_lowercase()),
            None => {
                put("hurwitz", "true".into());
                put("order_cap", a.order_cap.to_string());
                put("count_cap", a.count_cap.to_string());
            }
        },
        Command::Bounds(a) => put(
            "fiber",
            a.fiber.map_or("all".into(), |f| f.tag().to_string()),
        ),
        Command::Oracle(a) => {
            put("chi_f", a.chi_f.to_string());
            put(
                "chi",
                join(a.chi.iter().copied().collect::<BTreeSet<_>>(), ","),
            );
            put("r_cap", a.r_cap.to_string());
            put("count_cap", a.count_cap.to_string());
            threshold_inputs(&mut inputs, &a.threshold);
        }
    }
    inputs
}

fn search_chis(a: &SearchArgs) -> BTreeSet<i64> {
    if a.chi.is_empty() {
        SurfaceFiber::from(a.fiber).chi_x_values()
    } else {
        a.chi.iter().copied().collect()
    }
}

#[derive(Serialize)]
struct BasketRow {
    basket: String,
    chi: i64,
    sigma: String,
    k_dot_c2: String,
    lambda: String,
}

impl From<&SearchResult> for BasketRow {
    fn from(r: &SearchResult) -> Self {
        BasketRow {
            basket: r.basket.to_string(),
            chi: r.basket.chi_x(),
            sigma: r.sigma.to_string(),
            k_dot_c2: k_dot_c2(&r.basket).to_string(),
            lambda: r.lambda.to_string(),
        }
    }
}

#[derive(Serialize)]
struct SearchPayload {
    window: String,
    count: usize,
    baskets: Vec<BasketRow>,
}

fn verification_check(window: &SearchWindow, results: &[SearchResult]) -> Check {
    let failure = results
        .par_iter()
        .find_map_first(|r| verify_result(window, r).err());
    Check::new(
        "results_verified",
        true,
        failure.map_or_else(|| "true".to_string(), |e| e.to_string()),
    )
}

fn search(a: &SearchArgs, cache: Option<&Cache>) -> Result<Outcome, InputError> {
    let fiber = SurfaceFiber::from(a.fiber);
    let (threshold, comparison) = a.threshold.resolve();
    let chis = search_chis(a);
    let window = if a.chi_override {
        SearchWindow::with_any_chi(fiber.chi_f(), chis, threshold, comparison)?
    } else {
        SearchWindow::new(fiber.chi_f(), chis, threshold, comparison)?
    };
    let results = match cache {
        Some(cache) => cache.enumerate(&window)?.0,
        None => enumerate_baskets(&window)?,
    };
    let rows: Vec<BasketRow> = results.iter().map(BasketRow::from).collect();
    let found: Vec<(String, i64)> = rows.iter().map(|r| (r.basket.clone(), r.chi)).collect();
    let mut checks = vec![verification_check(&window, &results)];
    checks.extend(expected::search_checks(fiber, &window, &found));
    let payload = SearchPayload {
        window: window.describe(),
        count: rows.len(),
        baskets: rows,
    };
    Ok(Outcome::new(payload, checks))
}

#[derive(Serialize)]
struct TableRow {
    m: u64,
    chi_mk: String,
}

#[derive(Serialize)]
struct VerifyPayload {
    basket: String,
    chi: i64,
    chi_f: i64,
    sigma: String,
    k_dot_c2: String,
    lambda: Option<String>,
    e3: bool,
    first_negative_m: Option<u64>,
    /// `sigma >= 24 chi`, so that the values over `m <= horizon` decide e3.
    horizon_sufficient: bool,
    horizon: u64,
    table: Vec<TableRow>,
}

fn verify_basket(a: &VerifyArgs) -> Result<Outcome, InputError> {
    let basket = Basket::parse(&a.basket, a.chi)?;
    let sigma = basket_sigma(&basket);
    let excess = k_dot_c2(&basket);
    let lambda = lambda_from_basket(&basket, a.chi_f)
        .ok()
        .map(|l| l.to_string());
    let horizon = e3_horizon(&basket)?;
    let first_negative_m = e3_first_failure(&basket)?;
    // Each period adds L (sigma - 24 chi) / 12, so a negative excess forces a
    // negative value eventually even when none shows up before the horizon.
    let horizon_sufficient = !excess.is_negative();
    let e3 = horizon_sufficient && first_negative_m.is_none();
    let table = chi_mk_table(&basket, horizon)
        .into_iter()
        .zip(1..)
        .map(|(v, m)| TableRow {
            m,
            chi_mk: v.to_string(),
        })
        .collect();
    let text = basket.to_string();
    let mut checks = vec![Check::new("e3", true, e3)];
    checks.extend(expected::verify_checks(
        &text,
        a.chi,
        a.chi_f,
        &sigma.to_string(),
        &excess.to_string(),
        lambda.as_deref(),
    ));
    let payload = VerifyPayload {
        basket: text,
        chi: a.chi,
        chi_f: a.chi_f,
        sigma: sigma.to_string(),
        k_dot_c2: excess.to_string(),
        lambda,
        e3,
        first_negative_m,
        horizon_sufficient,
        horizon,
        table,
    };
    Ok(Outcome::new(payload, checks))
}

#[derive(Serialize)]
struct WitnessRow {
    b: i64,
    u: i64,
    denoms: [i64; 3],
    alpha: i64,
    beta: i64,
    gamma: i64,
    value: String,
}

impl WitnessRow {
    fn key(&self) -> String {
        let [n, m, mp] = self.denoms;
        expected::witness_text((self.b, self.u, n, m, mp, self.alpha, self.beta, self.gamma))
    }
}

impl From<&DegAWitness> for WitnessRow {
    fn from(w: &DegAWitness) -> Self {
        let p = &w.params;
        WitnessRow {
            b: p.b,
            u: p.u,
            denoms: p.denoms,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            value: w.value.to_string(),
        }
    }
}

#[derive(Serialize)]
struct CaseRow {
    case: String,
    bound: String,
    witness: Option<WitnessRow>,
}

#[derive(Serialize)]
struct DegAPayload {
    fiber: String,
    fiber_indices: Vec<i64>,
    overall: String,
    witness: Option<WitnessRow>,
    cases: Vec<CaseRow>,
}

#[derive(Serialize)]
struct HurwitzPayload {
    order_cap: i64,
    count_cap: usize,
    orders: Vec<i64>,
    delta: String,
}

fn min_dega(a: &MinDegaArgs) -> Result<Outcome, InputError> {
    let Some(fiber) = a.fiber.map(ModuliFiber::from) else {
        let sig = hurwitz_min_positive(a.order_cap, a.count_cap)?;
        let checks = vec![
            Check::new("delta", expected::HURWITZ_DELTA, &sig.delta),
            Check::new(
                "orders",
                join(expected::HURWITZ_ORDERS, ","),
                join(&sig.orders, ","),
            ),
        ];
        let payload = HurwitzPayload {
            order_cap: a.order_cap,
            count_cap: a.count_cap,
            orders: sig.orders,
            delta: sig.delta.to_string(),
        };
        return Ok(Outcome::new(payload, checks));
    };
    let table = dega_lower_bound(fiber)?;
    let cases: Vec<CaseRow> = table
        .cases
        .iter()
        .map(|c| CaseRow {
            case: c.case_label.clone(),
            bound: c.bound.to_string(),
            witness: c.witness.as_ref().map(WitnessRow::from),
        })
        .collect();
    let witness = table
        .cases
        .iter()
        .find(|c| c.bound == table.overall && c.witness.is_some())
        .and_then(|c| c.witness.as_ref())
        .map(WitnessRow::from);

    let want = expected::dega_expectation(fiber);
    let mut checks = vec![
        Check::new("overall", want.overall, &table.overall),
        Check::new(
            "witness",
            expected::witness_text(want.witness),
            witness.as_ref().map_or("none".to_string(), WitnessRow::key),
        ),
    ];
    for (label, bound) in want.cases {
        let observed = table
            .case(label)
            .map_or("missing".to_string(), |c| c.bound.to_string());
        checks.push(Check::new(format!("case {label}"), bound, observed));
    }
    let payload = DegAPayload {
        fiber: format!("{fiber:?}").to_lowercase(),
        fiber_indices: fiber.fiber_indices().to_vec(),
        overall: table.overall.to_string(),
        witness,
        cases,
    };
    Ok(Outcome::new(payload, checks))
}

#[derive(Serialize)]
struct CertificateRow {
    fiber: String,
    m_min: Option<i64>,
    divisibility: Option<i64>,
    lambda_bound: Option<String>,
    provenance: Vec<String>,
    error: Option<String>,
}

impl CertificateRow {
    fn new(fiber: FiberType, cert: &iitaka_core::Result<BoundCertificate>) -> Self {
        match cert {
            Ok(c) => CertificateRow {
                fiber: fiber.tag().into(),
                m_min: Some(c.m_min),
                divisibility: Some(c.divisibility),
                lambda_bound: c.lambda_bound.as_ref().map(Rational::to_string),
                provenance: c.provenance.clone(),
                error: None,
            },
            Err(e) => CertificateRow {
                fiber: fiber.tag().into(),
                m_min: None,
                divisibility: None,
                lambda_bound: None,
                provenance: Vec::new(),
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Serialize)]
struct BoundsPayload {
    certificates: Vec<CertificateRow>,
}

fn bounds(a: &BoundsArgs) -> Result<Outcome, InputError> {
    let fibers: Vec<FiberType> = match a.fiber {
        Some(f) => vec![f],
        None => FiberType::ALL.to_vec(),
    };
    let certs: Vec<_> = fibers.par_iter().map(|&f| fiber_bound(f)).collect();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (&fiber, cert) in fibers.iter().zip(&certs) {
        let (m_min, d) = expected::theorem_entry(fiber);
        let show = |v: Option<i64>| v.map_or_else(|| "error".to_string(), |v| v.to_string());
        let row = CertificateRow::new(fiber, cert);
        checks.push(Check::new(
            format!("m_min[{fiber}]"),
            m_min,
            show(row.m_min),
        ));
        checks.push(Check::new(
            format!("divisibility[{fiber}]"),
            d,
            show(row.divisibility),
        ));
        rows.push(row);
    }
    Ok(Outcome::new(BoundsPayload { certificates: rows }, checks))
}

#[derive(Serialize)]
struct OraclePayload {
    window: String,
    r_cap: i64,
    count_cap: usize,
    enumerated: usize,
    brute_force: usize,
    baskets: Vec<BasketRow>,
    only_enumerated: Vec<String>,
    only_brute_force: Vec<String>,
}

fn oracle(a: &OracleArgs) -> Result<Outcome, InputError> {
    let (threshold, comparison) = a.threshold.resolve();
    let window = SearchWindow::new(a.chi_f, a.chi.iter().copied(), threshold, comparison)?;
    let slow = brute_force_oracle(&window, a.r_cap, a.count_cap)?;
    let fast: Vec<SearchResult> = enumerate_baskets(&window)?
        .into_iter()
        .filter(|r| {
            r.basket.point_count() <= a.count_cap as u64
                && r.basket.entries().iter().all(|e| e.index() <= a.r_cap)
        })
        .collect();
    let key = |r: &SearchResult| format!("{} chi={}", r.basket, r.basket.chi_x());
    let fast_keys: BTreeSet<String> = fast.iter().map(key).collect();
    let slow_keys: BTreeSet<String> = slow.iter().map(key).collect();
    let only_enumerated: Vec<String> = fast_keys.difference(&slow_keys).cloned().collect();
    let only_brute_force: Vec<String> = slow_keys.difference(&fast_keys).cloned().collect();
    let checks = vec![
        Check::new("count", slow.len(), fast.len()),
        Check::new("only_enumerated", 0, only_enumerated.len()),
        Check::new("only_brute_force", 0, only_brute_force.len()),
    ];
    let payload = OraclePayload {
        window: window.describe(),
        r_cap: a.r_cap,
        count_cap: a.count_cap,
        enumerated: fast.len(),
        brute_force: slow.len(),
        baskets: slow.iter().map(BasketRow::from).collect(),
        only_enumerated,
        only_brute_force,
    };
    Ok(Outcome::new(payload, checks))
}
