mod geometry;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use comp_fkg::arith::{format_rational, parse_rational};
use comp_fkg::averaging::{verify_fkg_exhaustive, verify_homogeneous_pair, DEFAULT_FILTER_CAP};
use comp_fkg::interval::START_PRECISION;
use comp_fkg::lattice::DEFAULT_ENUMERATION_CAP;
use comp_fkg::report::{Report, RunConfig};
use comp_fkg::suite::fkg_random_campaign;
use comp_fkg::CompositionLattice;

#[derive(Parser, Debug)]
#[command(name = "comp-fkg", version, about = "Composition lattices, averaging inequalities and mixed (co)volumes")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Largest lattice that may be enumerated.
    #[arg(long, env = "COMP_FKG_CAP", default_value_t = DEFAULT_ENUMERATION_CAP, global = true)]
    cap: usize,
    /// Largest number of quotient filters that may be enumerated.
    #[arg(long, default_value_t = DEFAULT_FILTER_CAP, global = true)]
    filter_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate K(n, r): size, strata sizes, quotient size; optional exports.
    Enumerate {
        n: u32,
        r: usize,
        /// Hasse diagram in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Lattice JSON document.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Export the quotient poset instead of the lattice.
        #[arg(long)]
        quotient: bool,
    },
    /// Verify the averaging inequality on K(n, r).
    VerifyFkg {
        n: u32,
        r: usize,
        #[arg(long, value_enum, default_value_t = FkgMode::Exhaustive)]
        mode: FkgMode,
        /// Weights for the homogeneous mode, comma separated rationals.
        #[arg(long, value_delimiter = ',')]
        d: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
    },
    /// Verify the mixed volume and covolume inequalities.
    VerifyGeometry(geometry::GeometryArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FkgMode {
    Exhaustive,
    Random,
    Homogeneous,
}

impl FkgMode {
    fn name(self) -> &'static str {
        match self {
            FkgMode::Exhaustive => "exhaustive",
            FkgMode::Random => "random",
            FkgMode::Homogeneous => "homogeneous",
        }
    }
}

pub(crate) struct Outcome {
    config: RunConfig,
    passed: bool,
    summary: Vec<String>,
    results: serde_json::Value,
}

impl Outcome {
    pub(crate) fn new(config: RunConfig, passed: bool, summary: Vec<String>, results: serde_json::Value) -> Self {
        Self { config, passed, summary, results }
    }
}

pub(crate) fn base_config(cli_cap: usize, filter_cap: usize, format: Format, command: &str) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        enumeration_cap: cli_cap,
        filter_cap,
        precision_start_bits: START_PRECISION,
        output_format: match format {
            Format::Json => "json".into(),
            Format::Markdown => "markdown".into(),
        },
        ..Default::default()
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn enumerate(cli: &Cli, n: u32, r: usize, dot: &Option<PathBuf>, json_path: &Option<PathBuf>, quotient: bool) -> Result<Outcome> {
    let mut config = base_config(cli.cap, cli.filter_cap, cli.format, "enumerate");
    config.n = Some(n);
    config.r = Some(r);
    let lattice = CompositionLattice::with_cap(n, r, cli.cap)?;
    let q = lattice.quotient();
    let max_s = if n == 0 { r } else { r - 1 };
    let strata: Vec<usize> = (0..=max_s)
        .map(|s| lattice.stratum_indices(s).map(|x| x.len()))
        .collect::<comp_fkg::Result<_>>()?;
    if let Some(path) = dot {
        write_file(path, &if quotient { q.to_dot() } else { lattice.to_dot() })?;
    }
    if let Some(path) = json_path {
        let doc = if quotient {
            serde_json::to_string_pretty(&q.to_json())?
        } else {
            serde_json::to_string_pretty(&lattice.to_json())?
        };
        write_file(path, &doc)?;
    }
    let summary = vec![
        format!("|K({n},{r})| = {}", lattice.len()),
        format!("strata sizes (s = 0..) = {strata:?}"),
        format!("quotient size = {}", q.len()),
    ];
    let results = json!({
        "size": lattice.len(),
        "strata": strata,
        "quotient_size": q.len(),
        "classes": q.classes(),
        "orbit_sizes": q.orbit_sizes(),
        "covers": lattice.covers().len(),
    });
    Ok(Outcome::new(config, true, summary, results))
}

#[allow(clippy::too_many_arguments)]
fn verify_fkg(cli: &Cli, n: u32, r: usize, mode: FkgMode, d: &[String], seed: u64, budget: u64) -> Result<Outcome> {
    let mut config = base_config(cli.cap, cli.filter_cap, cli.format, "verify-fkg");
    config.n = Some(n);
    config.r = Some(r);
    config.mode = Some(mode.name().into());
    config.seed = seed;
    let lattice = Arc::new(CompositionLattice::with_cap(n, r, cli.cap)?);
    match mode {
        FkgMode::Exhaustive => {
            let rep = verify_fkg_exhaustive(&lattice, cli.filter_cap)?;
            let summary = vec![format!(
                "{} filters, {} ordered pairs, {} violations, {} equality mismatches",
                rep.filters, rep.pairs, rep.violations, rep.equality_mismatches
            )];
            Ok(Outcome::new(config, rep.passed(), summary, serde_json::to_value(&rep)?))
        }
        FkgMode::Random => {
            config.budget = budget;
            let rep = fkg_random_campaign(lattice, seed, budget)?;
            let summary = vec![format!("{} random instances, {} violations", rep.instances, rep.violations)];
            Ok(Outcome::new(config, rep.passed(), summary, serde_json::to_value(&rep)?))
        }
        FkgMode::Homogeneous => {
            if d.is_empty() {
                bail!("--mode homogeneous needs --d with {r} weights");
            }
            let weights = d.iter().map(|s| parse_rational(s)).collect::<comp_fkg::Result<Vec<_>>>()?;
            let rep = verify_homogeneous_pair(lattice, &weights)?;
            let summary = vec![format!(
                "(Σ g)(Σ f) = {} vs |K| Σ g f = {}: {}",
                format_rational(&rep.lhs),
                format_rational(&rep.rhs),
                if rep.strict { "strict" } else { "equality" }
            )];
            Ok(Outcome::new(config, rep.correlation.passed(), summary, serde_json::to_value(&rep)?))
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Enumerate { n, r, dot, json, quotient } => enumerate(cli, *n, *r, dot, json, *quotient),
        Command::VerifyFkg { n, r, mode, d, seed, budget } => verify_fkg(cli, *n, *r, *mode, d, *seed, *budget),
        Command::VerifyGeometry(args) => geometry::run(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let passed = outcome.passed;
    let report = Report::new(outcome.config, outcome.passed, outcome.summary, outcome.results);
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Markdown => report.to_markdown(),
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = write_file(path, &text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("violation: see the report for the witness");
        ExitCode::from(2)
    }
}
