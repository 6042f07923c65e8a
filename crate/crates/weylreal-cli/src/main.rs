//! `weylreal` — exact verification of truncated Lie-algebra realizations.
//!
//! Subcommands: `verify` runs a bracket suite and reports residuals,
//! `realize` dumps a truncated realization, `matrix` dumps the operator
//! matrices the realizations are built from, `bernoulli` prints one series
//! coefficient, and `oracle` runs the independent closed-form cross-checks
//! (including the randomized coefficient-perturbation trials).
//!
//! Exit status: 0 when every requested check passes, 1 when a verification
//! fails, 2 on usage errors. All output is buffered and printed at the end so
//! runs are deterministic at every concurrency level; every number is an
//! exact rational string.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use weylreal::exactnum::{bernoulli, GaussianRational};
use weylreal::ncalgebra::{Algebra, Metric};
use weylreal::opmatrix::{exp_partial, k_matrix, partial_power, OpMatrix};
use weylreal::realize::{GammaCoeffs, StructureConstants};
use weylreal::verify::{
    binomial_collapse_oracle, check_bracket, commutator_expansion_oracle, k_power_oracle,
    mutation_campaign, BracketReport, MutationOutcome, OracleReport, Presentation,
};

#[derive(Parser)]
#[command(
    name = "weylreal",
    version,
    about = "Exact order-by-order verification of truncated Lie-algebra realizations"
)]
struct Cli {
    /// Bound the number of worker threads used for independent pair checks.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a bracket verification suite and report every residual.
    Verify(VerifyArgs),
    /// Print a truncated realization of the selected generator family.
    Realize(RealizeArgs),
    /// Print one of the operator matrices the realizations are built from.
    Matrix(MatrixArgs),
    /// Print a Bernoulli number (second convention: B1 = -1/2).
    Bernoulli(BernoulliArgs),
    /// Run the independent closed-form and perturbation cross-checks.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Euclidean,
    Minkowski,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgebraArg {
    /// Rotation generators over the definite metric.
    So,
    /// Rotation-boost generators over the indefinite metric.
    Lorentz,
    /// Rotations extended by the quantum-angle entries.
    ExtendedSo,
    /// Rotation-boosts extended by the quantum-angle entries.
    ExtendedLorentz,
    /// Rotations and translations in the momentum-extended mode.
    Poincare,
    /// Rotations, translations and quantum angles together.
    ExtendedPoincare,
    /// Deformed coordinates from a rational deformation vector.
    Kappa,
    /// Vector-mode realization from a structure-constant table.
    WeylGeneric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct SelectArgs {
    /// Number of vector indices (at least 2).
    #[arg(long, default_value_t = 3)]
    n: u8,

    /// Metric signature; defaults to the natural one for the family.
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,

    /// Truncation degree in the derivative generators.
    #[arg(long, default_value_t = 4)]
    degree: u32,

    /// Generator family.
    #[arg(long, value_enum, default_value_t = AlgebraArg::So)]
    algebra: AlgebraArg,

    /// Comma-separated deformation vector for `--algebra kappa`,
    /// e.g. "0,0,1/5" (entries may be Gaussian rationals such as "1/2*i").
    #[arg(long)]
    kappa_vector: Option<String>,

    /// JSON file with a structure-constant table for `--algebra weyl-generic`:
    /// {"dim": N, "values": [N^3 rational strings, row-major (mu,nu,alpha)]}.
    #[arg(long)]
    constants: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    select: SelectArgs,

    /// Run the whole fixed battery of suites instead of a single family.
    #[arg(long)]
    all: bool,

    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Args)]
struct RealizeArgs {
    #[command(flatten)]
    select: SelectArgs,

    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixKind {
    /// The pair-space operator with the metric-weighted entries.
    K,
    /// A contracted power of the pair-space operator.
    KPower,
    /// A contracted power of the vector-indexed derivative matrix.
    PartialPower,
    /// The truncated exponential of the derivative matrix.
    Exp,
}

#[derive(Args)]
struct MatrixArgs {
    /// Which matrix to print.
    #[arg(long, value_enum)]
    which: MatrixKind,

    /// Number of vector indices.
    #[arg(long, default_value_t = 3)]
    n: u8,

    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    metric: MetricArg,

    /// Power for the k-power and partial-power variants.
    #[arg(long, default_value_t = 2)]
    power: u32,

    /// Truncation degree for the exponential variant.
    #[arg(long, default_value_t = 4)]
    degree: u32,

    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Args)]
struct BernoulliArgs {
    /// Index of the coefficient to print.
    #[arg(long)]
    k: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    /// Closed matrix power of the pair-space operator vs the recursive one.
    KPower,
    /// Both closed forms of the coordinate/power commutator vs the engine.
    Commutators,
    /// The alternating binomial collapse the split expansion rests on.
    Binomial,
    /// Randomized coefficient-perturbation trials against a bracket suite.
    Mutation,
    /// The three closed-form oracles in sequence.
    All,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum, default_value_t = OracleKind::All)]
    which: OracleKind,

    #[command(flatten)]
    select: SelectArgs,

    /// Largest matrix power exercised by the closed-form oracles.
    #[arg(long, default_value_t = 4)]
    max_power: u32,

    /// Number of perturbation trials.
    #[arg(long, default_value_t = 10)]
    trials: u32,

    /// Seed for the randomized trials; fixed seed, fixed outcome.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

/// A failure that should terminate with a usage error (exit 2).
struct UsageError(String);

impl<E: std::error::Error> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn metric_for(select: &SelectArgs) -> Result<Metric, UsageError> {
    let pick = |default: MetricArg| select.metric.unwrap_or(default);
    let arg = match select.algebra {
        AlgebraArg::So | AlgebraArg::ExtendedSo => pick(MetricArg::Euclidean),
        AlgebraArg::Poincare | AlgebraArg::ExtendedPoincare => pick(MetricArg::Minkowski),
        AlgebraArg::Lorentz | AlgebraArg::ExtendedLorentz => {
            if select.metric == Some(MetricArg::Euclidean) {
                return Err(UsageError(
                    "the boost families are defined over the indefinite metric".into(),
                ));
            }
            MetricArg::Minkowski
        }
        AlgebraArg::Kappa | AlgebraArg::WeylGeneric => {
            if select.metric.is_some() {
                return Err(UsageError(
                    "the vector-mode families do not take a metric".into(),
                ));
            }
            MetricArg::Euclidean
        }
    };
    Ok(match arg {
        MetricArg::Euclidean => Metric::euclidean(select.n)?,
        MetricArg::Minkowski => Metric::minkowski(select.n)?,
    })
}

fn kappa_vector(select: &SelectArgs) -> Result<Vec<GaussianRational>, UsageError> {
    let raw = select.kappa_vector.as_deref().ok_or_else(|| {
        UsageError("--algebra kappa requires --kappa-vector".into())
    })?;
    let entries: Vec<GaussianRational> = raw
        .split(',')
        .map(|s| GaussianRational::from_str(s.trim()))
        .collect::<Result<_, _>>()?;
    if entries.len() != select.n as usize {
        return Err(UsageError(format!(
            "--kappa-vector has {} entries but --n is {}",
            entries.len(),
            select.n
        )));
    }
    Ok(entries)
}

#[derive(Deserialize)]
struct ConstantsFile {
    dim: u8,
    values: Vec<String>,
}

fn constants_for(select: &SelectArgs) -> Result<StructureConstants, UsageError> {
    match &select.constants {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let file: ConstantsFile = serde_json::from_str(&text)?;
            if file.dim != select.n {
                return Err(UsageError(format!(
                    "constants file is for dimension {} but --n is {}",
                    file.dim, select.n
                )));
            }
            let values: Vec<GaussianRational> = file
                .values
                .iter()
                .map(|s| GaussianRational::from_str(s))
                .collect::<Result<_, _>>()?;
            Ok(StructureConstants::new(file.dim, values)?)
        }
        None => {
            // Default table: the rotation algebra through the identity
            // relabelling of the canonical pair basis.
            let gamma = GammaCoeffs::canonical(select.n)?;
            Ok(StructureConstants::from_gamma(&gamma)?)
        }
    }
}

fn presentation_for(select: &SelectArgs) -> Result<Presentation, UsageError> {
    if select.n < 2 {
        return Err(UsageError("--n must be at least 2".into()));
    }
    if select.kappa_vector.is_some() && select.algebra != AlgebraArg::Kappa {
        return Err(UsageError("--kappa-vector only applies to --algebra kappa".into()));
    }
    if select.constants.is_some() && select.algebra != AlgebraArg::WeylGeneric {
        return Err(UsageError("--constants only applies to --algebra weyl-generic".into()));
    }
    Ok(match select.algebra {
        AlgebraArg::So | AlgebraArg::Lorentz => Presentation::Rotations(metric_for(select)?),
        AlgebraArg::ExtendedSo | AlgebraArg::ExtendedLorentz => {
            Presentation::RotationsAngles(metric_for(select)?)
        }
        AlgebraArg::Poincare => Presentation::Poincare(metric_for(select)?),
        AlgebraArg::ExtendedPoincare => Presentation::PoincareAngles(metric_for(select)?),
        AlgebraArg::Kappa => {
            metric_for(select)?;
            Presentation::Custom(StructureConstants::kappa(&kappa_vector(select)?)?)
        }
        AlgebraArg::WeylGeneric => {
            metric_for(select)?;
            Presentation::Custom(constants_for(select)?)
        }
    })
}

fn metric_word(metric: Option<Metric>) -> String {
    match metric {
        Some(m) => format!("{:?}", m.kind()).to_lowercase(),
        None => "none".into(),
    }
}

fn render_report_text(out: &mut String, report: &BracketReport) {
    let _ = writeln!(
        out,
        "suite {} n={} metric={} degree={} cmp={}",
        report.suite,
        report.n,
        metric_word(report.metric),
        report.degree,
        report.cmp_degree
    );
    for pair in &report.pairs {
        let cmp = pair
            .cmp_degree
            .map(|d| d.to_string())
            .unwrap_or_else(|| "full".into());
        let _ = writeln!(
            out,
            "  [{}, {}] cmp={} residual terms: {}",
            pair.g1, pair.g2, cmp, pair.residual_terms
        );
    }
    let _ = writeln!(
        out,
        "{} ({} pairs, {} ms)",
        if report.pass { "PASS" } else { "FAIL" },
        report.pairs.len(),
        report.elapsed_ms
    );
}

/// The fixed verification battery: every bracket family the engine
/// constructs, at the degrees the full check is expected to complete in.
fn battery() -> Result<Vec<(Presentation, u32)>, UsageError> {
    let mut suites = Vec::new();
    for n in [2u8, 3, 4] {
        suites.push((Presentation::Rotations(Metric::euclidean(n)?), 4));
    }
    suites.push((Presentation::Rotations(Metric::minkowski(4)?), 4));
    for n in [3u8, 4] {
        suites.push((Presentation::RotationsAngles(Metric::euclidean(n)?), 4));
        suites.push((Presentation::RotationsAngles(Metric::minkowski(n)?), 4));
    }
    suites.push((Presentation::Poincare(Metric::minkowski(4)?), 3));
    suites.push((Presentation::PoincareAngles(Metric::minkowski(4)?), 3));
    Ok(suites)
}

fn run_verify(args: &VerifyArgs) -> Result<(String, bool), UsageError> {
    let mut out = String::new();
    let mut reports = Vec::new();
    if args.all {
        for (presentation, degree) in battery()? {
            let realization = presentation.realize(degree)?;
            reports.push(check_bracket(&realization, &presentation)?);
        }
    } else {
        let presentation = presentation_for(&args.select)?;
        let realization = presentation.realize(args.select.degree)?;
        reports.push(check_bracket(&realization, &presentation)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    match args.format {
        FormatArg::Json => {
            if args.all {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&reports)?);
            } else {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&reports[0])?);
            }
        }
        FormatArg::Text => {
            for report in &reports {
                render_report_text(&mut out, report);
            }
            if args.all {
                let _ = writeln!(
                    out,
                    "battery: {}/{} suites pass",
                    reports.iter().filter(|r| r.pass).count(),
                    reports.len()
                );
            }
        }
    }
    Ok((out, pass))
}

fn run_realize(args: &RealizeArgs) -> Result<(String, bool), UsageError> {
    let presentation = presentation_for(&args.select)?;
    let realization = presentation.realize(args.select.degree)?;
    let mut out = String::new();
    match args.format {
        FormatArg::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&realization)?);
        }
        FormatArg::Text => {
            for (label, poly) in realization.iter() {
                let _ = writeln!(out, "{label} = {poly}");
            }
        }
    }
    Ok((out, true))
}

fn run_matrix(args: &MatrixArgs) -> Result<(String, bool), UsageError> {
    let metric = match args.metric {
        MetricArg::Euclidean => Metric::euclidean(args.n)?,
        MetricArg::Minkowski => Metric::minkowski(args.n)?,
    };
    let algebra = Algebra::heisenberg(metric)?;
    let matrix: OpMatrix = match args.which {
        MatrixKind::K => k_matrix(algebra)?,
        MatrixKind::KPower => k_matrix(algebra)?.pow(args.power)?,
        MatrixKind::PartialPower => partial_power(algebra, args.power)?,
        MatrixKind::Exp => exp_partial(algebra, args.degree)?,
    };
    let mut out = String::new();
    match args.format {
        FormatArg::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&matrix)?);
        }
        FormatArg::Text => {
            let _ = writeln!(out, "{matrix}");
        }
    }
    Ok((out, true))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MutationReport {
    oracle: String,
    suite: String,
    n: u8,
    degree: u32,
    trials: u32,
    seed: u64,
    all_detected: bool,
    outcomes: Vec<MutationOutcome>,
}

fn run_oracle(args: &OracleArgs) -> Result<(String, bool), UsageError> {
    let mut out = String::new();
    let select = &args.select;
    if matches!(args.which, OracleKind::Mutation) {
        let presentation = presentation_for(select)?;
        let outcomes = mutation_campaign(
            &[(presentation.clone(), select.degree)],
            args.trials,
            args.seed,
        )?;
        let all_detected = outcomes.iter().all(|o| o.detected);
        let report = MutationReport {
            oracle: "coefficient-perturbation".into(),
            suite: presentation.name().into(),
            n: presentation.n(),
            degree: select.degree,
            trials: args.trials,
            seed: args.seed,
            all_detected,
            outcomes,
        };
        match args.format {
            FormatArg::Json => {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report)?);
            }
            FormatArg::Text => {
                for o in &report.outcomes {
                    let _ = writeln!(
                        out,
                        "perturb {} at {} by {}: {}",
                        o.label,
                        o.monomial,
                        o.delta,
                        if o.detected { "detected" } else { "NOT DETECTED" }
                    );
                }
                let _ = writeln!(
                    out,
                    "{} ({} trials)",
                    if all_detected { "PASS" } else { "FAIL" },
                    report.trials
                );
            }
        }
        return Ok((out, all_detected));
    }

    let metric = metric_for(select)?;
    let mut reports: Vec<OracleReport> = Vec::new();
    if matches!(args.which, OracleKind::KPower | OracleKind::All) {
        reports.push(k_power_oracle(metric, args.max_power)?);
    }
    if matches!(args.which, OracleKind::Commutators | OracleKind::All) {
        reports.push(commutator_expansion_oracle(metric, args.max_power)?);
    }
    if matches!(args.which, OracleKind::Binomial | OracleKind::All) {
        reports.push(binomial_collapse_oracle(args.max_power.max(8))?);
    }
    let pass = reports.iter().all(|r| r.pass);
    match args.format {
        FormatArg::Json => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&reports)?);
        }
        FormatArg::Text => {
            for r in &reports {
                let _ = writeln!(
                    out,
                    "oracle {} metric={} max-power={} cases={}: {}{}",
                    r.oracle,
                    metric_word(r.metric),
                    r.max_power,
                    r.cases,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.note
                        .as_deref()
                        .map(|n| format!(" ({n})"))
                        .unwrap_or_default()
                );
            }
        }
    }
    Ok((out, pass))
}

fn dispatch(cli: &Cli) -> Result<(String, bool), UsageError> {
    match &cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Realize(args) => run_realize(args),
        Command::Matrix(args) => run_matrix(args),
        Command::Bernoulli(args) => Ok((format!("{}\n", bernoulli(args.k)), true)),
        Command::Oracle(args) => run_oracle(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || dispatch(&cli);
    let result = match cli.jobs {
        Some(jobs) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            pool.install(run)
        }
        None => run(),
    };
    match result {
        Ok((output, pass)) => {
            print!("{output}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
