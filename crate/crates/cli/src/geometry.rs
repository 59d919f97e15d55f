use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use comp_fkg::arith::format_rational;
use comp_fkg::averaging::LatticeFunction;
use comp_fkg::geometry::{
    verify_af, verify_teissier, AbstractTable, MixedVolumeTable, NewtonPolyhedron, RationalPolytope,
};
use comp_fkg::report::InputDigest;
use comp_fkg::suite::{
    af_campaign, corollary1_campaign, corollary2_campaign, durfee_campaign, exponent_campaign,
    invariant_function_from_classes, jensen_counterexample_search, jensen_sides, product_campaign,
    sum_of_squares_function, symmetrized_monotone_campaign, teissier_campaign, verify_corollary_part1,
    verify_corollary_part2, verify_durfee_inequality, verify_durfee_table, verify_exponent_example,
    verify_product_inequality, verify_symmetrized_monotone, CampaignReport, MixData, MixFunctionSpec,
};
use comp_fkg::CompositionLattice;

use crate::{base_config, Cli, Outcome};

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("input").args(["bodies", "newton", "table"])))]
pub(crate) struct GeometryArgs {
    /// JSON array of polytopes `{"dim", "vertices"}`.
    #[arg(long)]
    bodies: Option<PathBuf>,
    /// JSON array of Newton polyhedra `{"dim", "generators"}`.
    #[arg(long)]
    newton: Option<PathBuf>,
    /// Abstract covolume table `{"n", "r", "covol"}`.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, value_enum)]
    check: Check,
    /// Invariant weight function `{"classes": {"k1,…,kr": "p/q", …}}`;
    /// defaults to `Σ k_i^2`.
    #[arg(long = "C", value_name = "FILE")]
    c: Option<PathBuf>,
    /// Number of varying inputs `r`; defaults to all of them.
    #[arg(long)]
    r: Option<usize>,
    /// Constants `a >= b >= c` of the exponent example.
    #[arg(long, value_delimiter = ',', default_value = "3,2,1")]
    abc: Vec<i64>,
    /// Refuse to rescale inputs when a mixed value is below 1.
    #[arg(long)]
    no_rescale: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    budget: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Af,
    Teissier,
    Product,
    Corollary1,
    Corollary2,
    Durfee,
    Exponent,
    Symmetrized,
    Jensen,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Af => "af",
            Check::Teissier => "teissier",
            Check::Product => "product",
            Check::Corollary1 => "corollary1",
            Check::Corollary2 => "corollary2",
            Check::Durfee => "durfee",
            Check::Exponent => "exponent",
            Check::Symmetrized => "symmetrized",
            Check::Jensen => "jensen",
        }
    }
}

enum Input {
    Random,
    Bodies(Vec<RationalPolytope>),
    Newton(Vec<NewtonPolyhedron>),
    Table(MixedVolumeTable),
}

fn read(path: &Path, role: &str, digests: &mut Vec<InputDigest>) -> Result<Vec<u8>> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    digests.push(InputDigest::new(role, &path.display().to_string(), &bytes));
    Ok(bytes)
}

fn parse<T: serde::de::DeserializeOwned>(bytes: &[u8], path: &Path) -> Result<T> {
    serde_json::from_slice(bytes).with_context(|| format!("invalid input {}", path.display()))
}

#[derive(serde::Deserialize)]
struct ClassFile {
    classes: BTreeMap<String, String>,
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn campaign_outcome(rep: CampaignReport) -> Result<(bool, Vec<String>, serde_json::Value)> {
    let summary = vec![format!(
        "{}: {} seeded instances, {} violations, {} equalities",
        rep.check, rep.instances, rep.violations, rep.equalities
    )];
    Ok((rep.passed(), summary, to_value(&rep)?))
}

fn verdict(name: &str, holds: bool, equality: bool) -> String {
    let state = match (holds, equality) {
        (true, true) => "holds with equality",
        (true, false) => "holds strictly",
        (false, _) => "VIOLATED",
    };
    format!("{name}: {state}")
}

pub(crate) fn run(cli: &Cli, args: &GeometryArgs) -> Result<Outcome> {
    let mut config = base_config(cli.cap, cli.filter_cap, cli.format, "verify-geometry");
    config.mode = Some(args.check.name().into());
    let mut digests = Vec::new();
    let input = if let Some(p) = &args.bodies {
        Input::Bodies(parse(&read(p, "bodies", &mut digests)?, p)?)
    } else if let Some(p) = &args.newton {
        Input::Newton(parse(&read(p, "newton", &mut digests)?, p)?)
    } else if let Some(p) = &args.table {
        let t: AbstractTable = parse(&read(p, "table", &mut digests)?, p)?;
        Input::Table(MixedVolumeTable::from_abstract(&t)?)
    } else {
        config.seed = args.seed;
        config.budget = args.budget;
        Input::Random
    };
    let class_map = match &args.c {
        Some(p) => Some(parse::<ClassFile>(&read(p, "C", &mut digests)?, p)?.classes),
        None => None,
    };
    config.inputs = digests;
    let (passed, summary, results) = match input {
        Input::Random => {
            if class_map.is_some() {
                bail!("--C needs an input file: random specs vary in shape");
            }
            random(args)?
        }
        input => fixed(args, input, class_map)?,
    };
    Ok(Outcome::new(config, passed, summary, results))
}

fn random(args: &GeometryArgs) -> Result<(bool, Vec<String>, serde_json::Value)> {
    let (seed, budget) = (args.seed, args.budget);
    match args.check {
        Check::Af => campaign_outcome(af_campaign(seed, budget, 3)?),
        Check::Teissier => campaign_outcome(teissier_campaign(seed, budget, 3)?),
        Check::Product => campaign_outcome(product_campaign(seed, budget)?),
        Check::Corollary1 => campaign_outcome(corollary1_campaign(seed, budget)?),
        Check::Corollary2 => campaign_outcome(corollary2_campaign(seed, budget)?),
        Check::Durfee => campaign_outcome(durfee_campaign(seed, budget)?),
        Check::Exponent => campaign_outcome(exponent_campaign(seed, budget)?),
        Check::Symmetrized => campaign_outcome(symmetrized_monotone_campaign(seed, budget)?),
        Check::Jensen => {
            let rep = jensen_counterexample_search(seed, budget)?;
            let summary = vec![format!(
                "jensen: {} instances searched, {} witnesses of the cyclic inequality failing (reported, not a failure)",
                rep.instances, rep.witnesses_found
            )];
            Ok((true, summary, to_value(&rep)?))
        }
    }
}

fn weight_function(
    class_map: &Option<BTreeMap<String, String>>,
    spec: &MixFunctionSpec,
) -> Result<LatticeFunction> {
    let lattice = Arc::new(CompositionLattice::new(spec.n(), spec.r())?);
    Ok(match class_map {
        Some(m) => invariant_function_from_classes(lattice, m)?,
        None => sum_of_squares_function(lattice)?,
    })
}

fn spec_from(input: Input, r: Option<usize>) -> Result<MixFunctionSpec> {
    let data = match input {
        Input::Bodies(b) => MixData::Bodies(b),
        Input::Newton(p) => MixData::Polyhedra(p),
        Input::Table(t) => MixData::Table(t),
        Input::Random => unreachable!("handled by the random branch"),
    };
    let count = match &data {
        MixData::Bodies(b) => b.len(),
        MixData::Polyhedra(p) => p.len(),
        MixData::Table(t) => t.r(),
    };
    Ok(MixFunctionSpec::new(r.unwrap_or(count), data)?)
}

fn fixed(
    args: &GeometryArgs,
    input: Input,
    class_map: Option<BTreeMap<String, String>>,
) -> Result<(bool, Vec<String>, serde_json::Value)> {
    let wrong = |what: &str| anyhow::anyhow!("--check {} needs {what}", args.check.name());
    Ok(match (args.check, input) {
        (Check::Af, Input::Bodies(b)) => {
            let rep = verify_af(&b)?;
            (rep.holds, vec![verdict("Alexandrov-Fenchel", rep.holds, rep.equality)], to_value(&rep)?)
        }
        (Check::Af, _) => return Err(wrong("--bodies")),
        (Check::Teissier, Input::Newton(p)) => {
            let rep = verify_teissier(&p)?;
            (rep.holds, vec![verdict("Teissier", rep.holds, rep.equality)], to_value(&rep)?)
        }
        (Check::Teissier, _) => return Err(wrong("--newton")),
        (Check::Product, Input::Bodies(b)) => {
            let rep = verify_product_inequality(&b)?;
            (rep.passed(), vec![verdict("product of six", rep.holds, rep.equality)], to_value(&rep)?)
        }
        (Check::Product, _) => return Err(wrong("--bodies")),
        (Check::Exponent, Input::Bodies(b)) => {
            let [a, bb, c] = args.abc[..] else {
                bail!("--abc needs exactly three integers");
            };
            let rep = verify_exponent_example(&b, a, bb, c)?;
            (rep.passed(), vec![verdict("exponent example", rep.holds, rep.equality)], to_value(&rep)?)
        }
        (Check::Exponent, _) => return Err(wrong("--bodies")),
        (Check::Jensen, Input::Bodies(b)) => {
            let (lhs, rhs) = jensen_sides(&b)?;
            let witness = lhs < rhs;
            let summary = vec![format!(
                "cyclic comparison: Vol^3 = {} vs product = {}{}",
                format_rational(&lhs),
                format_rational(&rhs),
                if witness { " (witness: the cyclic inequality fails)" } else { "" }
            )];
            let results = json!({
                "lhs": format_rational(&lhs),
                "rhs": format_rational(&rhs),
                "witness": witness,
            });
            (true, summary, results)
        }
        (Check::Jensen, _) => return Err(wrong("--bodies")),
        (Check::Durfee, Input::Newton(p)) => {
            let rep = verify_durfee_inequality(&p)?;
            (rep.passed(), vec![verdict("multinomial-weighted covolumes", rep.holds, rep.equality)], to_value(&rep)?)
        }
        (Check::Durfee, Input::Table(t)) => {
            let rep = verify_durfee_table(&t)?;
            (rep.passed(), vec![verdict("multinomial-weighted covolumes", rep.holds, rep.equality)], to_value(&rep)?)
        }
        (Check::Durfee, _) => return Err(wrong("--newton or --table")),
        (Check::Corollary1, input @ (Input::Newton(_) | Input::Table(_))) => {
            let spec = spec_from(input, args.r)?;
            let c = weight_function(&class_map, &spec)?;
            let rep = verify_corollary_part1(&spec, &c)?;
            let summary = vec![verdict("corollary part 1", rep.correlation.holds, rep.correlation.equality)];
            (rep.passed(), summary, to_value(&rep)?)
        }
        (Check::Corollary1, _) => return Err(wrong("--newton or --table")),
        (Check::Corollary2, input) => {
            let spec = spec_from(input, args.r)?;
            let c = weight_function(&class_map, &spec)?;
            let rep = verify_corollary_part2(&spec, &c, !args.no_rescale)?;
            let summary = vec![format!("corollary part 2: {:?} (rescale factor {})", rep.status, rep.rescale_factor)];
            (rep.passed(), summary, to_value(&rep)?)
        }
        (Check::Symmetrized, input) => {
            let spec = spec_from(input, args.r)?;
            let rep = verify_symmetrized_monotone(&spec)?;
            let summary = vec![format!(
                "symmetrization: {:?}, log symmetrization: {:?}, {} quadratic and {} convexity failures",
                rep.direction, rep.log_direction, rep.quadratic_failures, rep.convexity_failures
            )];
            (rep.passed(), summary, to_value(&rep)?)
        }
    })
}
