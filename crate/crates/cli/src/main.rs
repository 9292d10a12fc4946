//! `subring`: exact subring counts, closed forms and fit probes from the
//! command line.

mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use subring_core::census::{count_subgroups_direct, DEFAULT_BUDGET};
use subring_core::fitfind::{probe_polynomiality, ProbeTarget, DEFAULT_MAX_DEGREE, DEFAULT_MAX_MODULUS};
use subring_core::formulas::{eval_formula, p_binomial, zeta_local_coefficients, FormulaId, FormulaName};
use subring_core::types::first_primes;
use subring_core::varieties::{count_points, load_system, PolySystem};
use subring_core::{
    BigCount, Census, CensusConfig, CensusError, Composition, FitError, FormulaError, InputError, PairSubset, Pins,
    Prime, ProbeError, TargetError, VarietyError,
};

use report::{Emitter, Report};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "subring", version, about = "Exact counts of subrings of Z^n of prime-power index")]
struct Cli {
    /// Output format, one record per line.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Worker threads; defaults to available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest search space a single count may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FnMethod {
    Recurrence,
    Direct,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SubgroupMethod {
    Formula,
    Direct,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FitTarget {
    GAlpha,
    #[value(name = "g-n")]
    GN,
    #[value(name = "f-n")]
    FN,
    Subgroups,
    SubsetCensus,
    Variety,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Basic,
    Lemmas,
    Zeta,
    All,
}

/// `first:K` or a comma-separated list of primes.
#[derive(Clone, Debug)]
pub struct PrimeList(pub Vec<Prime>);

impl FromStr for PrimeList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(k) = s.strip_prefix("first:") {
            let k: usize = k.parse().map_err(|_| format!("bad prime count {k:?}"))?;
            return Ok(PrimeList(first_primes(k)));
        }
        s.split(',').map(parse_prime).collect::<Result<Vec<_>, _>>().map(PrimeList)
    }
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let v: u64 = s.trim().parse().map_err(|_| format!("{s:?} is not an integer"))?;
    Prime::new(v).map_err(|e| e.to_string())
}

/// `row:col=value`
fn parse_pin(s: &str) -> Result<((usize, usize), u64), String> {
    let (slot, v) = s.split_once('=').ok_or_else(|| format!("pin {s:?} is not of the form i:j=v"))?;
    let (r, c) = slot.split_once(':').ok_or_else(|| format!("pin {s:?} is not of the form i:j=v"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad index {t:?}"));
    Ok(((num(r)?, num(c)?), v.trim().parse().map_err(|_| format!("bad value {v:?}"))?))
}

#[derive(Args, Clone, Debug)]
struct PrimeArg {
    /// One or more primes, comma-separated.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_prime)]
    prime: Vec<Prime>,
}

#[derive(Args, Clone, Debug)]
#[group(multiple = false)]
struct SystemArg {
    /// A builtin system, e.g. `builtin:qp-pair`.
    #[arg(long)]
    system: Option<String>,
    /// A polynomial document in JSON.
    #[arg(long)]
    poly_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Irreducible subring matrices with a fixed diagonal.
    GAlpha {
        #[arg(long)]
        alpha: Composition,
        #[command(flatten)]
        primes: PrimeArg,
    },
    /// All irreducible subring matrices of index p^e.
    #[command(name = "g-n")]
    GN {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        e: u32,
        #[command(flatten)]
        primes: PrimeArg,
    },
    /// All subrings of index p^e.
    #[command(name = "f-n")]
    FN {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        e: u32,
        #[arg(long, value_enum, default_value = "recurrence")]
        method: FnMethod,
        #[command(flatten)]
        primes: PrimeArg,
    },
    /// Subgroups of index p^e.
    Subgroups {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        e: u32,
        #[arg(long, value_enum, default_value = "formula")]
        method: SubgroupMethod,
        #[command(flatten)]
        primes: PrimeArg,
    },
    /// Evaluate a named closed form.
    Formula {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        l: Option<i64>,
        #[arg(long)]
        beta: Option<i64>,
        #[arg(long)]
        e: Option<i64>,
        #[command(flatten)]
        primes: PrimeArg,
    },
    /// Series coefficients of the local zeta factor.
    Zeta {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_e: usize,
        #[command(flatten)]
        primes: PrimeArg,
    },
    /// F_p-points of a polynomial system.
    Variety {
        #[command(flatten)]
        source: SystemArg,
        #[command(flatten)]
        primes: PrimeArg,
    },
    /// Count a target at several primes and classify the sequence.
    Fit {
        /// What to count at each prime.
        #[arg(long, value_enum)]
        target: FitTarget,
        /// Diagonal exponents for g-alpha and subset-census.
        #[arg(long)]
        alpha: Option<Composition>,
        /// Column pairs for subset-census.
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long = "pin", value_parser = parse_pin)]
        pins: Vec<((usize, usize), u64)>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        e: Option<u32>,
        #[command(flatten)]
        source: SystemArg,
        /// `first:K` or a comma-separated list.
        #[arg(long, default_value = "first:10")]
        primes: PrimeList,
        /// Highest degree tried per class, after removing a common power of p.
        #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
        max_degree: usize,
        /// Largest modulus tried for residue-class splits.
        #[arg(long, default_value_t = DEFAULT_MAX_MODULUS)]
        max_modulus: u64,
    },
    /// Matrices with a fixed diagonal satisfying only the listed closure
    /// conditions.
    SubsetCensus {
        #[arg(long)]
        alpha: Composition,
        /// Column pairs `i:j`, 1-based; `all` for every pair.
        #[arg(long)]
        pairs: String,
        /// Hold slot `i:j` at a value, e.g. `1:2=0`.
        #[arg(long = "pin", value_parser = parse_pin)]
        pins: Vec<((usize, usize), u64)>,
        #[command(flatten)]
        primes: PrimeArg,
    },
    /// Cross-check closed forms against exhaustive counts.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value = "2,3,5")]
        primes: PrimeList,
        /// Largest zeta coefficient checked.
        #[arg(long, default_value_t = 6)]
        max_e: usize,
        /// Checks not started within this many seconds are skipped.
        #[arg(long)]
        budget_seconds: Option<f64>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("interrupted; no count was emitted for the pending job")]
    Cancelled,
    #[error("{0}")]
    Failure(String),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FormulaError> for CliError {
    fn from(e: FormulaError) -> Self {
        match e {
            FormulaError::OutOfRange { .. } | FormulaError::Unknown(_) | FormulaError::UnsupportedDimension(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<VarietyError> for CliError {
    fn from(e: VarietyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Accumulated outcome across emitted records.
#[derive(Default, Debug, Clone, Copy)]
pub struct Status {
    pub mismatch: bool,
    pub budget: bool,
}

impl Status {
    fn code(self) -> ExitCode {
        if self.mismatch {
            ExitCode::from(1)
        } else if self.budget {
            ExitCode::from(3)
        } else {
            ExitCode::SUCCESS
        }
    }
}

pub struct Ctx {
    pub census: Census,
    pub out: Emitter,
    pub status: Status,
    pub budget: u128,
}

impl Ctx {
    /// Emits a count, or a budget record when the search was too large.
    fn count(
        &mut self,
        kind: &str,
        params: &Value,
        p: Prime,
        f: impl FnOnce(&Census) -> Result<BigCount, CensusError>,
    ) -> Result<(), CliError> {
        let start = Instant::now();
        match f(&self.census) {
            Ok(c) => self.out.emit(&Report::new(kind, params.clone()).prime(p.get()).count(&c).elapsed(start))?,
            Err(e) => self.census_error(kind, params, p, e, start)?,
        }
        Ok(())
    }

    pub fn census_error(
        &mut self,
        kind: &str,
        params: &Value,
        p: Prime,
        e: CensusError,
        start: Instant,
    ) -> Result<(), CliError> {
        match e {
            CensusError::BudgetExceeded { search_space, budget } => {
                self.status.budget = true;
                self.out.emit(
                    &Report::new(kind, params.clone())
                        .prime(p.get())
                        .verdict("budget_exceeded")
                        .detail(json!({"search_space": search_space.to_string(), "budget": budget.to_string()}))
                        .elapsed(start),
                )?;
                Ok(())
            }
            CensusError::Cancelled => Err(CliError::Cancelled),
            CensusError::Input(e) => Err(e.into()),
        }
    }
}

fn load_source(src: &SystemArg) -> Result<(String, PolySystem), CliError> {
    match (&src.system, &src.poly_file) {
        (Some(name), None) => Ok((name.clone(), load_system(name)?)),
        (None, Some(path)) => {
            let doc = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
            Ok((path.display().to_string(), PolySystem::from_json_str(&doc)?))
        }
        _ => Err(CliError::Usage("give exactly one of --system or --poly-file".into())),
    }
}

fn pair_subset(s: &str) -> Result<PairSubset, CliError> {
    if s.trim() == "all" {
        Ok(PairSubset::All)
    } else {
        Ok(PairSubset::parse(s)?)
    }
}

fn pairs_json(s: &PairSubset) -> Value {
    match s {
        PairSubset::All => json!("all"),
        PairSubset::Pairs(set) => json!(set.iter().map(|(i, j)| format!("{i}:{j}")).collect::<Vec<_>>()),
    }
}

fn pins_json(pins: &Pins) -> Value {
    json!(pins.iter().map(|((r, c), v)| format!("{r}:{c}={v}")).collect::<Vec<_>>())
}

fn run(cli: Cli, cancel: Arc<AtomicBool>) -> Result<Status, CliError> {
    let mut config = CensusConfig::default().with_budget(cli.budget);
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        config = config.with_threads(t);
    }
    config.cancel = Some(cancel);
    let mut ctx = Ctx { census: Census::new(config), out: Emitter::new(cli.format), status: Status::default(), budget: cli.budget };

    match cli.command {
        Command::GAlpha { alpha, primes } => {
            let params = json!({"alpha": alpha.parts()});
            for p in primes.prime {
                ctx.count("g_alpha", &params, p, |c| c.g_alpha(&alpha, p))?;
            }
        }
        Command::GN { n, e, primes } => {
            let params = json!({"n": n, "e": e});
            for p in primes.prime {
                ctx.count("g_n", &params, p, |c| c.g_n(n, e, p))?;
            }
        }
        Command::FN { n, e, method, primes } => {
            let params = json!({"n": n, "e": e, "method": format!("{method:?}").to_lowercase()});
            for p in primes.prime {
                ctx.count("f_n", &params, p, |c| match method {
                    FnMethod::Recurrence => c.f_n_recurrence(n, e, p),
                    FnMethod::Direct => c.f_n_direct(n, e, p),
                })?;
            }
        }
        Command::Subgroups { n, e, method, primes } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let params = json!({"n": n, "e": e, "method": format!("{method:?}").to_lowercase()});
            for p in primes.prime {
                let start = Instant::now();
                let c = match method {
                    SubgroupMethod::Formula => p_binomial(n as u32 - 1 + e, e, p)?,
                    SubgroupMethod::Direct => count_subgroups_direct(n, e, p),
                };
                ctx.out.emit(&Report::new("subgroups", params.clone()).prime(p.get()).count(&c).elapsed(start))?;
            }
        }
        Command::Formula { name, n, k, l, beta, e, primes } => {
            let mut id = FormulaId::new(name.parse::<FormulaName>()?, n);
            id.k = k;
            id.l = l;
            id.beta = beta;
            id.e = e;
            let params = serde_json::to_value(&id).expect("serializable");
            for p in primes.prime {
                let start = Instant::now();
                let c = eval_formula(&id, p)?;
                ctx.out.emit(&Report::new("formula", params.clone()).prime(p.get()).count(&c).elapsed(start))?;
            }
        }
        Command::Zeta { n, max_e, primes } => {
            for p in primes.prime {
                let start = Instant::now();
                let series = zeta_local_coefficients(n, p, max_e)?;
                for (e, c) in series.iter().enumerate() {
                    ctx.out.emit(
                        &Report::new("zeta", json!({"n": n, "e": e})).prime(p.get()).count(c).elapsed(start),
                    )?;
                }
            }
        }
        Command::Variety { source, primes } => {
            let (name, system) = load_source(&source)?;
            let params = json!({"system": name, "vars": system.var_count(), "polys": system.polys().len()});
            for p in primes.prime {
                let start = Instant::now();
                match count_points(&system, p, ctx.budget) {
                    Ok(c) => ctx.out.emit(&Report::new("variety", params.clone()).prime(p.get()).count(&c).elapsed(start))?,
                    Err(VarietyError::BudgetExceeded { search_space, budget }) => {
                        ctx.status.budget = true;
                        ctx.out.emit(
                            &Report::new("variety", params.clone())
                                .prime(p.get())
                                .verdict("budget_exceeded")
                                .detail(json!({"search_space": search_space.to_string(), "budget": budget.to_string()}))
                                .elapsed(start),
                        )?;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Command::Fit { target, alpha, pairs, pins, n, e, source, primes, max_degree, max_modulus } => {
            let need_alpha = || alpha.clone().ok_or_else(|| CliError::Usage("--alpha is required for this target".into()));
            let need_ne = || match (n, e) {
                (Some(n), Some(e)) => Ok((n, e)),
                _ => Err(CliError::Usage("--n and --e are required for this target".into())),
            };
            let probe = match target {
                FitTarget::GAlpha => ProbeTarget::GAlpha(need_alpha()?),
                FitTarget::GN => need_ne().map(|(n, e)| ProbeTarget::GN { n, e })?,
                FitTarget::FN => need_ne().map(|(n, e)| ProbeTarget::FN { n, e })?,
                FitTarget::Subgroups => need_ne().map(|(n, e)| ProbeTarget::Subgroups { n, e })?,
                FitTarget::SubsetCensus => ProbeTarget::Subset {
                    alpha: need_alpha()?,
                    pairs: pair_subset(pairs.as_deref().ok_or_else(|| CliError::Usage("--pairs is required".into()))?)?,
                    pins: pins.into_iter().collect(),
                },
                FitTarget::Variety => {
                    let (name, system) = load_source(&source)?;
                    ProbeTarget::Variety { name, system }
                }
            };
            let mut params = serde_json::to_value(probe.descriptor()).expect("serializable");
            if let ProbeTarget::Subset { pins, .. } = &probe {
                if !pins.is_empty() {
                    params["pins"] = pins_json(pins);
                }
            }
            params["primes"] = json!(primes.0.iter().map(|p| p.get()).collect::<Vec<_>>());
            let start = Instant::now();
            match probe_polynomiality(&ctx.census, &probe, &primes.0, max_degree, max_modulus) {
                Ok(r) => {
                    let shape = r.polynomial.as_ref().map(|p| p.to_string());
                    let mut detail = serde_json::to_value(&r).expect("serializable");
                    if let Some(s) = shape {
                        detail["polynomial_text"] = json!(s);
                    }
                    ctx.out.emit(&Report::new("fit", params).verdict(r.verdict).detail(detail).elapsed(start))?;
                }
                Err(ProbeError::Evaluation { prime, partial, source }) => match source {
                    TargetError::Census(CensusError::Cancelled) => return Err(CliError::Cancelled),
                    TargetError::Census(CensusError::BudgetExceeded { .. })
                    | TargetError::Variety(VarietyError::BudgetExceeded { .. }) => {
                        ctx.status.budget = true;
                        ctx.out.emit(
                            &Report::new("fit", params)
                                .prime(prime)
                                .verdict("budget_exceeded")
                                .detail(json!({"error": source.to_string(), "partial": partial}))
                                .elapsed(start),
                        )?;
                    }
                    other => return Err(CliError::Usage(other.to_string())),
                },
                Err(ProbeError::Fit(e)) => return Err(e.into()),
            }
        }
        Command::SubsetCensus { alpha, pairs, pins, primes } => {
            let subset = pair_subset(&pairs)?;
            let pins: Pins = pins.into_iter().collect();
            let mut params = json!({"alpha": alpha.parts(), "pairs": pairs_json(&subset)});
            if !pins.is_empty() {
                params["pins"] = pins_json(&pins);
            }
            for p in primes.prime {
                ctx.count("subset_census", &params, p, |c| c.g_alpha_with(&alpha, p, &subset, &pins))?;
            }
        }
        Command::Verify { suite, max_n, primes, max_e, budget_seconds } => {
            verify::run(&mut ctx, suite, max_n, &primes.0, max_e, budget_seconds)?;
        }
    }
    Ok(ctx.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cancel = Arc::new(AtomicBool::new(false));
    let flag = cancel.clone();
    if let Err(e) = ctrlc::set_handler(move || flag.store(true, Ordering::SeqCst)) {
        eprintln!("warning: could not install interrupt handler: {e}");
    }
    match run(cli, cancel) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Cancelled => 130,
                CliError::Failure(_) | CliError::Io(_) => 1,
            })
        }
    }
}
