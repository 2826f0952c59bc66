mod commands;
mod input;
mod report;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use attriscore::circuit::CircuitError;
use attriscore::dbcause::CauseError;
use attriscore::mlscore::ScoreError;
use attriscore::relcore::RelError;
use attriscore::repair::RepairError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::input::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] attriscore::Error),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}: {msg}")]
    Csv { path: String, msg: String },
    #[error("{path}: {msg}")]
    Json { path: String, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Entity(String),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("{0}")]
    Usage(String),
    #[error("expected exactly one query, found {0}")]
    QueryCount(usize),
    #[error("instance has {found} tuples, more than the cap of {cap}")]
    TooManyTuples { found: usize, cap: usize },
    #[error("model count {count} differs from 2^n (L(e) - sum of Shap) = {rhs}")]
    IdentityMismatch { count: String, rhs: String },
    #[error("{count} selftest checks failed: {detail}")]
    Selftest { count: usize, detail: String },
}

macro_rules! core_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}
core_error!(RelError, RepairError, CauseError, CircuitError, ScoreError);

impl CliError {
    pub fn code(&self) -> String {
        let local = match self {
            CliError::Core(e) => return e.code(),
            CliError::Io { .. } => "io",
            CliError::Csv { .. } => "csv",
            CliError::Json { .. } => "json",
            CliError::Config(_) => "config",
            CliError::Entity(_) => "entity",
            CliError::Distribution(_) => "distribution",
            CliError::Usage(_) => "usage",
            CliError::QueryCount(_) => "query_count",
            CliError::TooManyTuples { .. } => "too_many_tuples",
            CliError::IdentityMismatch { .. } => "identity_mismatch",
            CliError::Selftest { .. } => "selftest_failed",
        };
        format!("cli.{local}")
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Exact causal attribution scores for query answers and classifiers.
#[derive(Debug, Parser)]
#[command(name = "attriscore", version)]
struct Cli {
    /// Run configuration (JSON): caps, output format, seed.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides the configuration.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Directory of relation CSV files.
    #[arg(long)]
    data: PathBuf,
    /// Query file.
    #[arg(long)]
    query: PathBuf,
}

#[derive(Debug, Args)]
struct DcArgs {
    /// Directory of relation CSV files.
    #[arg(long)]
    data: PathBuf,
    /// Denial constraint file.
    #[arg(long)]
    dc: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ModelArgs {
    /// Decision tree JSON.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Circuit JSON.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EntityArgs {
    /// Inline entity (`x1=1,x2=0` or `1,0`), or a 1-based row of --entities.
    #[arg(long)]
    entity: Option<String>,
    /// Entity CSV; without --entity every row is scored.
    #[arg(long)]
    entities: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Ddbc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    S,
    C,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every query in the file.
    Eval(QueryArgs),
    /// Actual causes with responsibilities and contingency sets.
    Causes(QueryArgs),
    /// Responsibility of one tuple.
    Resp {
        #[command(flatten)]
        q: QueryArgs,
        #[arg(long)]
        tuple: String,
    },
    /// Attribute-level causes via NULL change-sets.
    AttrCauses {
        #[command(flatten)]
        q: QueryArgs,
        /// Only consider cells bound to these query variables.
        #[arg(long, value_delimiter = ',')]
        focus: Option<Vec<String>>,
    },
    /// Subset (s) or cardinality (c) repairs.
    Repairs {
        #[command(flatten)]
        dc: DcArgs,
        #[arg(long, value_enum, default_value = "s")]
        kind: KindArg,
    },
    /// Inconsistency degree.
    IncDeg {
        #[command(flatten)]
        dc: DcArgs,
        /// Greedy upper bound instead of the exact value.
        #[arg(long)]
        approx: bool,
    },
    /// Compile a decision tree into a circuit.
    CompileDt {
        #[arg(long)]
        tree: PathBuf,
        /// Binarize non-Boolean features first.
        #[arg(long)]
        binarize: bool,
    },
    /// Check that a circuit is deterministic and decomposable.
    Validate {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        trust_determinism: bool,
    },
    /// Number of satisfying assignments.
    ModelCount {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "ddbc")]
        method: Method,
        #[arg(long)]
        trust_determinism: bool,
    },
    /// Shap scores of an entity's feature values.
    Shap {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        entity: EntityArgs,
        /// Distribution JSON; uniform when absent.
        #[arg(long)]
        dist: Option<PathBuf>,
        /// Defaults to ddbc when the model compiles to a dDBC and the
        /// distribution is not empirical.
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Score only this feature.
        #[arg(long)]
        feature: Option<String>,
        #[arg(long)]
        trust_determinism: bool,
    },
    /// Generalized responsibility of a feature value.
    RespMl {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        entity: EntityArgs,
        #[arg(long)]
        dist: Option<PathBuf>,
        #[arg(long)]
        feature: String,
        /// Score this contingency (`x2=0,x3=1`) instead of searching.
        #[arg(long)]
        contingency: Option<String>,
    },
    /// Check #SAT = 2^n (L(e) - sum of Shap) under the uniform distribution.
    CheckEq8 {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        entity: EntityArgs,
    },
    /// Run the built-in worked examples.
    Selftest,
}

fn read(p: &Path) -> Result<String, CliError> {
    input::read(p)
}

fn run(cli: Cli) -> Result<(Value, Format), CliError> {
    let cfg: RunConfig = input::load_config(cli.config.as_deref())?;
    let format = cli.format.unwrap_or(cfg.format);
    let caps = &cfg.caps;
    let out = match cli.command {
        Command::Eval(q) => {
            let d = input::load_instance(&q.data, caps)?;
            commands::eval(&d, &input::queries(&read(&q.query)?, d.schema())?)
        }
        Command::Causes(q) => {
            let d = input::load_instance(&q.data, caps)?;
            commands::causes(&d, &input::single_query(&read(&q.query)?, d.schema())?, caps)?
        }
        Command::Resp { q, tuple } => {
            let d = input::load_instance(&q.data, caps)?;
            commands::resp(&d, &input::single_query(&read(&q.query)?, d.schema())?, &tuple, caps)?
        }
        Command::AttrCauses { q, focus } => {
            let d = input::load_instance(&q.data, caps)?;
            commands::attr_causes(&d, &input::single_query(&read(&q.query)?, d.schema())?, focus, caps)?
        }
        Command::Repairs { dc, kind } => {
            let d = input::load_instance(&dc.data, caps)?;
            commands::repairs(&d, &input::constraints(&read(&dc.dc)?, d.schema())?, kind == KindArg::C, caps)?
        }
        Command::IncDeg { dc, approx } => {
            let d = input::load_instance(&dc.data, caps)?;
            commands::inc_deg(&d, &input::constraints(&read(&dc.dc)?, d.schema())?, approx, caps)?
        }
        Command::CompileDt { tree, binarize } => {
            commands::compile_dt(&input::tree_from_text(&read(&tree)?, &tree.display().to_string())?, binarize)?
        }
        Command::Validate { circuit, trust_determinism } => {
            let c = input::circuit_from_text(&read(&circuit)?, &circuit.display().to_string())?;
            commands::validate(&c, trust_determinism, caps)?
        }
        Command::ModelCount { circuit, method, trust_determinism } => {
            let c = input::circuit_from_text(&read(&circuit)?, &circuit.display().to_string())?;
            commands::model_count(&c, method, trust_determinism, caps)?
        }
        Command::Shap { model, entity, dist, method, feature, trust_determinism } => {
            let m = commands::Model::load(model.tree.as_deref(), model.circuit.as_deref(), trust_determinism, caps)?;
            let dist_text = dist.as_deref().map(read).transpose()?;
            let method = m.shap_method(method, dist_text.as_deref())?;
            let cl = m.classifier(method)?;
            let es = select_entities(&entity, cl.space())?;
            let dist = load_dist(dist.as_deref(), dist_text.as_deref(), cl.space())?;
            commands::shap(&m, method, &dist, &es, feature.as_deref(), caps)?
        }
        Command::RespMl { model, entity, dist, feature, contingency } => {
            let m = commands::Model::load(model.tree.as_deref(), model.circuit.as_deref(), false, caps)?;
            let cl = m.classifier(Method::Brute)?;
            let es = select_entities(&entity, cl.space())?;
            let dist_text = dist.as_deref().map(read).transpose()?;
            let dist = load_dist(dist.as_deref(), dist_text.as_deref(), cl.space())?;
            commands::resp_ml(&cl, &dist, &es, &feature, contingency.as_deref(), caps)?
        }
        Command::CheckEq8 { model, entity } => {
            let m = commands::Model::load(model.tree.as_deref(), model.circuit.as_deref(), false, caps)?;
            let c = m.boolean_circuit()?;
            let cl = attriscore::mlscore::Classifier::circuit(c.clone());
            let es = select_entities(&entity, cl.space())?;
            commands::check_eq8(&c, &cl, &es, caps)?
        }
        Command::Selftest => selftest::run()?,
    };
    Ok((out, format))
}

fn load_dist(
    path: Option<&Path>,
    text: Option<&str>,
    space: &attriscore::mlscore::FeatureSpace,
) -> Result<attriscore::mlscore::Distribution, CliError> {
    match (path, text) {
        (Some(p), Some(t)) => {
            let base = p.parent().unwrap_or(Path::new("."));
            input::distribution_from_text(t, &p.display().to_string(), base, space)
        }
        _ => Ok(attriscore::mlscore::Distribution::Uniform),
    }
}

/// `(display, entity)` pairs chosen by --entity / --entities.
fn select_entities(
    args: &EntityArgs,
    space: &attriscore::mlscore::FeatureSpace,
) -> Result<Vec<attriscore::mlscore::Entity>, CliError> {
    let rows = match &args.entities {
        Some(p) => Some(input::entities_from_csv(&read(p)?, &p.display().to_string(), space)?),
        None => None,
    };
    match (&args.entity, rows) {
        (Some(spec), Some(rows)) if !spec.is_empty() && spec.bytes().all(|b| b.is_ascii_digit()) => {
            let i: usize = spec.parse().map_err(|_| CliError::Entity(format!("bad row index `{spec}`")))?;
            match i.checked_sub(1).and_then(|i| rows.get(i)) {
                Some(e) => Ok(vec![e.clone()]),
                None => Err(CliError::Entity(format!("row {i} out of range (1..={})", rows.len()))),
            }
        }
        (Some(spec), _) => Ok(vec![input::entity_inline(spec, space)?]),
        (None, Some(rows)) => Ok(rows),
        (None, None) => Err(CliError::Usage("one of --entity or --entities is required".into())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", report::error_json("cli.usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok((v, format)) => {
            println!("{}", report::render(v, format));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", report::error_json(&e.code(), &e.to_string()));
            ExitCode::from(e.exit_code())
        }
    }
}
