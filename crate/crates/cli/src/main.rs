use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use explora::bayes::{fit_naive_bayes, BayesNet};
use explora::dataset::{
    case_study_patterns, discretize, generate_contribuyentes, load_csv, min_max_normalize, prepare, read_schema_json,
    schema_to_json, write_csv, BinMethod, ImputePolicy, PlantedPattern,
};
use explora::induction::{extract_rules, induce, rules_table, Criterion, InduceConfig, Variant};
use explora::pipeline::{parse_strategy, run, Plan};
use explora::som::{self, SomParams};
use explora::{Error, Relation};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "explora",
    version,
    about = "Taxpayer data exploration: SOM clustering, decision-tree rules and Bayesian tables"
)]
struct Cli {
    /// Leave wall-clock timings out of every report.
    #[arg(long, global = true)]
    no_timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic taxpayer relation.
    Gen(GenArgs),
    /// Handle nulls, discretize and normalize columns.
    Prepare(PrepareArgs),
    /// Train a self-organizing map and append the cell label.
    Som(SomArgs),
    /// Induce a decision tree and extract its rules.
    Tree(TreeArgs),
    /// Fit a naive Bayes model on a pivot attribute.
    Bayes(BayesArgs),
    /// Query a declared Bayesian network.
    Net(NetArgs),
    /// Run a SOM/TDIDT/RB strategy end to end.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    rows: u64,
    /// JSON array of planted patterns; the case-study patterns by default.
    #[arg(long, conflicts_with = "no_patterns")]
    patterns: Option<PathBuf>,
    /// Plant nothing: every record is background.
    #[arg(long)]
    no_patterns: bool,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct Input {
    /// CSV file, or a directory holding `augmented.csv` or `contribuyentes.csv`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Schema sidecar; `schema.json` next to the data by default.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    DropRows,
    Impute,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinArg {
    EqualWidth,
    EqualFrequency,
}

#[derive(Args)]
struct PrepareArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    /// `ATTR=K`: replace ATTR with K interval labels.
    #[arg(long, value_name = "ATTR=K")]
    discretize: Vec<String>,
    #[arg(long, value_enum, default_value = "equal-width")]
    bins: BinArg,
    /// Comma-separated continuous attributes to map onto [0,1].
    #[arg(long, value_delimiter = ',')]
    normalize: Vec<String>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SomArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    features: Vec<String>,
    /// Grid as ROWSxCOLS.
    #[arg(long, default_value = "2x2")]
    grid: String,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    #[arg(long, default_value_t = 0.1)]
    rate: f64,
    /// Initial radius; half the longer grid side by default.
    #[arg(long)]
    radius: Option<f64>,
    /// Map radius in the time constant; the initial radius by default.
    #[arg(long)]
    map_radius: Option<f64>,
    #[arg(long, default_value = "CSOM")]
    out_attr: String,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Id3,
    C45,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    GainRatio,
    Gain,
}

#[derive(Args)]
struct TreeArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long = "class")]
    class_attr: String,
    #[arg(long, value_delimiter = ',')]
    predictors: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "c45")]
    variant: VariantArg,
    /// Defaults to gain ratio for C4.5 and gain for ID3.
    #[arg(long, value_enum)]
    criterion: Option<CriterionArg>,
    #[arg(long, default_value_t = 2)]
    min_support: usize,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct BayesArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    pivot: String,
    #[arg(long, value_delimiter = ',', required = true)]
    features: Vec<String>,
    #[arg(long, default_value_t = 0.0)]
    smoothing: f64,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum NetFormat {
    Json,
    Text,
    Dot,
}

#[derive(Args)]
struct NetArgs {
    /// Network declaration (JSON).
    #[arg(long)]
    net: PathBuf,
    /// Node whose posterior is printed.
    #[arg(long)]
    query: Option<String>,
    /// `NODE=STATE` pairs, comma-separated.
    #[arg(long, value_delimiter = ',')]
    evidence: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: NetFormat,
}

#[derive(Args)]
struct PipelineArgs {
    /// Plan file (JSON).
    #[arg(long, required_unless_present = "strategy")]
    plan: Option<PathBuf>,
    /// Strategy such as SOM>TDIDT>RB, run with default stage settings.
    #[arg(long, conflicts_with = "plan")]
    strategy: Option<String>,
    /// Seed for --strategy, or an override of the plan's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    input: Input,
    #[arg(short, long)]
    out: PathBuf,
}

enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow::anyhow!(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Prepare(a) => cmd_prepare(a),
        Command::Som(a) => cmd_som(a),
        Command::Tree(a) => cmd_tree(a),
        Command::Bayes(a) => cmd_bayes(a),
        Command::Net(a) => cmd_net(a),
        Command::Pipeline(a) => cmd_pipeline(a, !cli.no_timings),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn resolve_input(input: &Input) -> Result<(PathBuf, PathBuf), Failure> {
    let data = if input.input.is_dir() {
        ["augmented.csv", "contribuyentes.csv"]
            .iter()
            .map(|f| input.input.join(f))
            .find(|p| p.is_file())
            .ok_or_else(|| {
                usage(format!(
                    "{} holds neither augmented.csv nor contribuyentes.csv",
                    input.input.display()
                ))
            })?
    } else {
        input.input.clone()
    };
    let schema = match &input.schema {
        Some(s) => s.clone(),
        None => data.parent().unwrap_or(Path::new(".")).join("schema.json"),
    };
    Ok((data, schema))
}

fn load(input: &Input) -> Result<Relation, Failure> {
    let (data, schema_path) = resolve_input(input)?;
    let schema_file =
        File::open(&schema_path).with_context(|| format!("cannot open schema {}", schema_path.display()))?;
    let schema =
        read_schema_json(BufReader::new(schema_file)).with_context(|| format!("in {}", schema_path.display()))?;
    let file = File::open(&data).with_context(|| format!("cannot open {}", data.display()))?;
    let rel = load_csv(BufReader::new(file), &schema).with_context(|| format!("in {}", data.display()))?;
    Ok(rel)
}

fn write_relation(rel: &Relation, dir: &Path, name: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    write_csv(rel, BufWriter::new(file))?;
    write_text(dir, "schema.json", &schema_to_json(rel.schema()))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    // going through Value sorts object keys
    let value = serde_json::to_value(value).context("serializing output")?;
    let mut text = serde_json::to_string_pretty(&value).context("serializing output")?;
    text.push('\n');
    write_text(dir, name, &text)
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let patterns: Vec<PlantedPattern> = match (&a.patterns, a.no_patterns) {
        (_, true) => Vec::new(),
        (Some(path), false) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read pattern file {}", path.display()))
                .map_err(Failure::Usage)?;
            serde_json::from_str(&text)
                .with_context(|| format!("bad pattern file {}", path.display()))
                .map_err(Failure::Usage)?
        }
        (None, false) => case_study_patterns(),
    };
    let rows = usize::try_from(a.rows).map_err(|_| usage("row count too large"))?;
    let rel = generate_contribuyentes(a.seed, rows, &patterns).map_err(|e| match e {
        Error::Pattern(_) => Failure::Usage(anyhow::Error::from(e).context("bad pattern file")),
        other => other.into(),
    })?;
    write_relation(&rel, &a.out, "contribuyentes.csv")?;
    println!(
        "wrote {} records to {}",
        rel.len(),
        a.out.join("contribuyentes.csv").display()
    );
    Ok(())
}

fn cmd_prepare(a: PrepareArgs) -> CmdResult {
    let mut rel = load(&a.input)?;
    if let Some(policy) = a.policy {
        let policy = match policy {
            PolicyArg::DropRows => ImputePolicy::DropRows,
            PolicyArg::Impute => ImputePolicy::Impute,
        };
        rel = prepare(&rel, policy)?;
    }
    let method = match a.bins {
        BinArg::EqualWidth => BinMethod::EqualWidth,
        BinArg::EqualFrequency => BinMethod::EqualFrequency,
    };
    let mut bins = BTreeMap::new();
    for spec in &a.discretize {
        let (attr, k) = spec
            .split_once('=')
            .ok_or_else(|| usage(format!("--discretize expects ATTR=K, got {spec:?}")))?;
        let k: usize = k
            .parse()
            .map_err(|_| usage(format!("--discretize {spec:?}: K must be a positive integer")))?;
        let d = discretize(&rel, attr, k, method)?;
        bins.insert(
            attr.to_string(),
            serde_json::json!({"edges": d.edges, "labels": d.labels}),
        );
        rel = d.relation;
    }
    if !a.normalize.is_empty() {
        let attrs: Vec<&str> = a.normalize.iter().map(String::as_str).collect();
        let (scaled, params) = min_max_normalize(&rel, &attrs)?;
        rel = scaled;
        write_json(&a.out, "scaler.json", &params)?;
    }
    if !bins.is_empty() {
        write_json(&a.out, "bins.json", &bins)?;
    }
    write_relation(&rel, &a.out, "augmented.csv")?;
    println!(
        "wrote {} records to {}",
        rel.len(),
        a.out.join("augmented.csv").display()
    );
    Ok(())
}

fn parse_grid(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || usage(format!("--grid expects ROWSxCOLS, got {text:?}"));
    let (r, c) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    let c: usize = c.trim().parse().map_err(|_| bad())?;
    if r == 0 || c == 0 {
        return Err(bad());
    }
    Ok((r, c))
}

fn cmd_som(a: SomArgs) -> CmdResult {
    let (rows, cols) = parse_grid(&a.grid)?;
    let rel = load(&a.input)?;
    let features: Vec<&str> = a.features.iter().map(String::as_str).collect();
    for f in &features {
        let attr = rel.attribute(f)?;
        if !attr.is_continuous() {
            return Err(Error::KindMismatch {
                attr: f.to_string(),
                expected: "continuous (the map only takes continuous features)",
                found: attr.kind.name(),
            }
            .into());
        }
    }
    let (_, scaler) = min_max_normalize(&rel, &features)?;
    let data = som::feature_matrix::<f64>(&rel, &features, &scaler)?;
    let mut params = SomParams::<f64>::new(cols, rows, a.seed);
    params.iterations = a.iterations;
    params.initial_rate = a.rate;
    if let Some(r) = a.radius {
        params.initial_radius = r;
        params.map_radius = r;
    }
    if let Some(rm) = a.map_radius {
        params.map_radius = rm;
    }
    params.validate().map_err(|e| Failure::Usage(e.into()))?;
    let grid = som::train(&data, &params)?;
    let qe = som::quantization_error(&grid, &data)?;
    let (out, assignment) = som::assign(&grid, &rel, &features, &scaler, &a.out_attr)?;
    write_relation(&out, &a.out, "augmented.csv")?;
    write_text(&a.out, "csom_counts.txt", &assignment.table())?;
    write_json(
        &a.out,
        "som.json",
        &serde_json::json!({
            "grid": grid,
            "scaler": scaler,
            "assignment": assignment,
            "quantization_error": qe,
        }),
    )?;
    print!("{}", assignment.table());
    Ok(())
}

fn cmd_tree(a: TreeArgs) -> CmdResult {
    let rel = load(&a.input)?;
    let variant = match a.variant {
        VariantArg::Id3 => Variant::Id3,
        VariantArg::C45 => Variant::C45,
    };
    let criterion = match (a.criterion, variant) {
        (Some(CriterionArg::Gain), _) | (None, Variant::Id3) => Criterion::Gain,
        (Some(CriterionArg::GainRatio), _) | (None, Variant::C45) => Criterion::GainRatio,
    };
    let config = InduceConfig {
        variant,
        criterion,
        min_support: a.min_support,
        max_depth: a.max_depth,
        predictors: a.predictors,
    };
    let tree = induce::<f64>(&rel, &a.class_attr, &config)?;
    let rules = extract_rules(&tree);
    let table = rules_table(&rules);
    write_json(&a.out, "tree.json", &tree)?;
    write_json(&a.out, "rules.json", &rules)?;
    write_text(&a.out, "rules.txt", &table)?;
    write_text(&a.out, "tree.dot", &tree.to_dot())?;
    print!("{table}");
    Ok(())
}

fn cmd_bayes(a: BayesArgs) -> CmdResult {
    let rel = load(&a.input)?;
    let features: Vec<&str> = a.features.iter().map(String::as_str).collect();
    let model = fit_naive_bayes::<f64>(&rel, &a.pivot, &features, a.smoothing)?;
    let net = model.to_bayes_net()?;
    let report = model.report();
    write_json(&a.out, "model.json", &model)?;
    write_json(&a.out, "net.json", &net.to_spec())?;
    write_text(&a.out, "cpt.txt", &report)?;
    write_text(&a.out, "net.dot", &net.to_dot())?;
    print!("{report}");
    Ok(())
}

fn cmd_net(a: NetArgs) -> CmdResult {
    let text = fs::read_to_string(&a.net).with_context(|| format!("cannot read {}", a.net.display()))?;
    let net = BayesNet::<f64>::from_json(&text).with_context(|| format!("in {}", a.net.display()))?;
    let mut evidence = BTreeMap::new();
    for pair in &a.evidence {
        let (node, state) = pair
            .split_once('=')
            .ok_or_else(|| usage(format!("--evidence expects NODE=STATE, got {pair:?}")))?;
        evidence.insert(node.to_string(), state.to_string());
    }
    let posterior = match &a.query {
        Some(q) => Some((q, net.infer(q, &evidence)?)),
        None if !evidence.is_empty() => return Err(usage("--evidence needs --query")),
        None => None,
    };
    match a.format {
        NetFormat::Dot => print!("{}", net.to_dot()),
        NetFormat::Json => {
            let mut out = serde_json::json!({ "factorization": net.factorization() });
            if let Some((q, p)) = &posterior {
                let states = &net.dag().nodes()[net.dag().index_of(q)?].states;
                let dist: BTreeMap<&String, f64> = states.iter().zip(p.iter().copied()).collect();
                out["query"] = serde_json::json!(q);
                out["evidence"] = serde_json::json!(evidence);
                out["posterior"] = serde_json::json!(dist);
            }
            println!("{}", serde_json::to_string_pretty(&out).context("serializing output")?);
        }
        NetFormat::Text => {
            println!("{}", net.factorization().concat());
            if let Some((q, p)) = &posterior {
                let states = &net.dag().nodes()[net.dag().index_of(q)?].states;
                for (s, v) in states.iter().zip(p) {
                    println!("P({q}={s}) = {v:.6}");
                }
            }
        }
    }
    Ok(())
}

fn cmd_pipeline(a: PipelineArgs, timings: bool) -> CmdResult {
    let mut plan = match (&a.plan, &a.strategy) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read plan {}", path.display()))
                .map_err(Failure::Usage)?;
            Plan::from_json(&text)
                .with_context(|| format!("bad plan file {}", path.display()))
                .map_err(Failure::Usage)?
        }
        (None, Some(text)) => {
            let seed = a.seed.ok_or_else(|| usage("--strategy requires --seed"))?;
            let strategy = parse_strategy(text).map_err(|e| Failure::Usage(e.into()))?;
            Plan::for_strategy(&strategy, seed)
        }
        (None, None) => return Err(usage("either --plan or --strategy is required")),
    };
    if let Some(seed) = a.seed {
        plan.seed = seed;
    }
    if let Err(e @ Error::Strategy(_)) = plan.strategy() {
        return Err(Failure::Usage(e.into()));
    }
    let rel = load(&a.input)?;
    let checked = plan.check(rel.schema())?;
    if !checked.strategy.canonical {
        eprintln!("note: {} is not one of the six canonical chains", checked.strategy);
    }
    let report = run(&checked, &rel)?;
    let files = report
        .write_dir(&a.out, timings)
        .with_context(|| format!("writing {}", a.out.display()))?;
    for stage in &report.stages {
        println!("{}", stage.table());
    }
    println!("wrote {} to {}", files.join(", "), a.out.display());
    Ok(())
}
