use std::path::PathBuf;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use iitaka_core::bounds::FiberType;
use iitaka_core::enumeration::{Comparison, SurfaceFiber};
use iitaka_core::moduli_search::{
    ModuliFiber, HURWITZ_DEFAULT_COUNT_CAP, HURWITZ_DEFAULT_ORDER_CAP,
};
use iitaka_core::Rational;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "iitaka",
    version,
    about = "Exact searches behind effective Iitaka fibration bounds"
)]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json, value_name = "FMT")]
    pub emit: Emit,
    /// Directory for cached search results.
    #[arg(long, global = true, value_name = "DIR")]
    pub cache: Option<PathBuf>,
    /// Worker threads for the kernels.
    #[arg(long, global = true, default_value_t = 1, value_name = "N",
          value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Json,
    Csv,
    Md,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Enumerate baskets with lambda above a threshold.
    Search(SearchArgs),
    /// Evaluate one basket: sigma, K.c2, lambda, non-negativity and the chi(mK) table.
    VerifyBasket(VerifyArgs),
    /// Least positive deg A, or the least positive orbifold delta.
    MinDega(MinDegaArgs),
    /// Assemble the pluricanonical bounds for every fiber type.
    Bounds(BoundsArgs),
    /// Cross-check the enumeration against the brute-force oracle on a capped window.
    Oracle(OracleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceArg {
    K3,
    Enriques,
}

impl From<SurfaceArg> for SurfaceFiber {
    fn from(arg: SurfaceArg) -> Self {
        match arg {
            SurfaceArg::K3 => SurfaceFiber::K3,
            SurfaceArg::Enriques => SurfaceFiber::Enriques,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuliArg {
    Abelian,
    Bielliptic,
}

impl From<ModuliArg> for ModuliFiber {
    fn from(arg: ModuliArg) -> Self {
        match arg {
            ModuliArg::Abelian => ModuliFiber::Abelian,
            ModuliArg::Bielliptic => ModuliFiber::Bielliptic,
        }
    }
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct ThresholdArgs {
    /// Keep baskets with lambda > N.
    #[arg(long, value_name = "N")]
    pub lambda_gt: Option<Rational>,
    /// Keep baskets with lambda >= N.
    #[arg(long, value_name = "N")]
    pub lambda_ge: Option<Rational>,
}

impl ThresholdArgs {
    pub fn resolve(&self) -> (Rational, Comparison) {
        match (&self.lambda_gt, &self.lambda_ge) {
            (Some(n), _) => (n.clone(), Comparison::Strict),
            (None, Some(n)) => (n.clone(), Comparison::Closed),
            (None, None) => unreachable!("clap requires one threshold"),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub fiber: SurfaceArg,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// chi(O_X) values to search; defaults to the fiber's range. Repeatable.
    #[arg(long, value_name = "CHI")]
    pub chi: Vec<i64>,
    /// Allow chi(O_X) values outside 0..=2.
    #[arg(long)]
    pub chi_override: bool,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Basket as "r,b[xK];..."
    #[arg(long)]
    pub basket: String,
    #[arg(long, allow_negative_numbers = true)]
    pub chi: i64,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=2))]
    pub chi_f: i64,
}

#[derive(Args, Debug, Clone)]
pub struct MinDegaArgs {
    #[arg(
        long,
        value_enum,
        required_unless_present = "hurwitz",
        conflicts_with = "hurwitz"
    )]
    pub fiber: Option<ModuliArg>,
    /// Minimize delta over orbifold signatures instead.
    #[arg(long)]
    pub hurwitz: bool,
    #[arg(long, default_value_t = HURWITZ_DEFAULT_ORDER_CAP, requires = "hurwitz")]
    pub order_cap: i64,
    #[arg(long, default_value_t = HURWITZ_DEFAULT_COUNT_CAP, requires = "hurwitz")]
    pub count_cap: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    #[arg(long, value_parser = fiber_type_parser())]
    pub fiber: Option<FiberType>,
}

fn fiber_type_parser() -> impl TypedValueParser<Value = FiberType> {
    PossibleValuesParser::new(FiberType::ALL.map(FiberType::tag))
        .map(|tag| tag.parse::<FiberType>().expect("listed tag"))
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=2))]
    pub chi_f: i64,
    /// Repeatable.
    #[arg(long, required = true, value_name = "CHI")]
    pub chi: Vec<i64>,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[arg(long, default_value_t = 8)]
    pub r_cap: i64,
    #[arg(long, default_value_t = 5)]
    pub count_cap: usize,
}
