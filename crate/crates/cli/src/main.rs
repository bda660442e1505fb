use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alcq::pcfg::PoolName;
use alcq::pipeline::{
    check_queries, check_shape, complexity_histogram, merge_pools, read_jsonl, run_generation, stats_report,
    verify_records, write_generated, write_jsonl, Dataset, PipelineConfig, SymbolicVariant,
};
use alcq::syntax::{parse_axioms, parse_kb, Level};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "alcq", version, about = "ALCQ entailment dataset generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PoolArg {
    A,
    B,
    Both,
}

impl PoolArg {
    fn pools(self) -> Vec<PoolName> {
        match self {
            PoolArg::A => vec![PoolName::A],
            PoolArg::B => vec![PoolName::B],
            PoolArg::Both => PoolName::all().to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SymbolicArg {
    None,
    Soft,
    Hard,
}

impl From<SymbolicArg> for SymbolicVariant {
    fn from(s: SymbolicArg) -> Self {
        match s {
            SymbolicArg::None => SymbolicVariant::None,
            SymbolicArg::Soft => SymbolicVariant::Soft,
            SymbolicArg::Hard => SymbolicVariant::Hard,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset and write train/validation/test JSONL files.
    Generate(GenerateArgs),
    /// Re-check the label, depth and justification of every record.
    Verify {
        files: Vec<PathBuf>,
        /// Expected largest depth; inferred from the records when omitted.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Balance and complexity statistics as JSON.
    Stats {
        files: Vec<PathBuf>,
        /// Restrict the complexity histogram to one level.
        #[arg(long)]
        level: Option<u8>,
    },
    /// Answer queries against a KB; one JSON line per query.
    Check {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        queries: PathBuf,
    },
    /// Merge datasets of the same depth and level.
    Merge {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// TOML config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pool: Option<PoolArg>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    level: Option<u8>,
    /// KBs per pool.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, env = "DELTA_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Production probability, e.g. Restriction.forall=0.7. Repeatable.
    #[arg(long = "override", value_name = "PROD=P")]
    overrides: Vec<String>,
    #[arg(long, value_enum)]
    symbolic: Option<SymbolicArg>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    max_retries: Option<usize>,
}

fn parse_override(s: &str) -> Result<(String, f64)> {
    let (k, v) = s.split_once('=').with_context(|| format!("override {s:?} is not PROD=P"))?;
    let p: f64 = v.trim().parse().with_context(|| format!("override {s:?}: bad probability"))?;
    Ok((k.trim().to_string(), p))
}

fn config_from(args: &GenerateArgs) -> Result<PipelineConfig> {
    let mut cfg = match &args.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::new(PoolName::all().to_vec(), 5, Level::MAX, 20, 0),
    };
    if let Some(p) = args.pool {
        cfg.pools = p.pools();
    }
    if let Some(d) = args.depth {
        cfg.depth = d;
    }
    if let Some(l) = args.level {
        cfg.level = Level::new(l)?;
    }
    if let Some(c) = args.count {
        cfg.count = c;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out_dir = Some(o.clone());
    }
    for o in &args.overrides {
        let (k, p) = parse_override(o)?;
        cfg.overrides.insert(k, p);
    }
    if let Some(s) = args.symbolic {
        cfg.symbolic = s.into();
    }
    if args.jobs.is_some() {
        cfg.jobs = args.jobs;
    }
    if let Some(r) = args.max_retries {
        cfg.max_retries = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_all(files: &[PathBuf]) -> Result<Dataset> {
    if files.is_empty() {
        bail!("no input files");
    }
    let mut out = Vec::new();
    for f in files {
        out.extend(read_jsonl(f)?);
    }
    Ok(out)
}

fn generate(args: &GenerateArgs) -> Result<ExitCode> {
    let cfg = config_from(args)?;
    let out = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let g = run_generation(&cfg)?;
    for path in write_generated(&out, &g)? {
        eprintln!("wrote {}", path.display());
    }
    let s = &g.stats;
    eprintln!("{} records from {} KBs", s.total, cfg.count * cfg.pools.len());
    for (answer, a) in &s.per_answer {
        eprintln!("  {answer}: {} records, not-rate {:.2}%, {:.2} words", a.count, 100.0 * a.not_rate, a.mean_length);
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(files: &[PathBuf], depth: Option<u32>) -> Result<ExitCode> {
    let records = read_all(files)?;
    let m = depth.unwrap_or_else(|| records.iter().map(|r| r.slot).max().unwrap_or(0));
    let shape = check_shape(&records, m);
    let report = verify_records(&records);
    for p in &shape {
        println!("shape: {p}");
    }
    for f in &report.failures {
        println!("record {} ({}): {}", f.index, f.kb_id, f.message);
    }
    println!(
        "verified {} records: {} label failures, {} shape problems",
        report.checked,
        report.failures.len(),
        shape.len()
    );
    Ok(if report.failures.is_empty() && shape.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn stats(files: &[PathBuf], level: Option<u8>) -> Result<ExitCode> {
    let records = read_all(files)?;
    let mut report = stats_report(&records);
    if let Some(l) = level {
        report.complexity = complexity_histogram(&records, Some(Level::new(l)?));
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn check(kb: &Path, queries: &Path) -> Result<ExitCode> {
    let kb = parse_kb(&read(kb)?).with_context(|| format!("parsing {}", kb.display()))?;
    let queries = parse_axioms(&read(queries)?).with_context(|| format!("parsing {}", queries.display()))?;
    for outcome in check_queries(&kb, &queries)? {
        println!("{}", serde_json::to_string(&outcome)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn merge(inputs: &[PathBuf], out: &Path) -> Result<ExitCode> {
    let datasets = inputs.iter().map(|f| read_jsonl(f)).collect::<Result<Vec<_>, _>>()?;
    let merged = merge_pools(datasets)?;
    write_jsonl(out, &merged)?;
    let kbs: BTreeMap<&str, ()> = merged.iter().map(|r| (r.kb_id.as_str(), ())).collect();
    eprintln!("wrote {} records from {} KBs to {}", merged.len(), kbs.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Generate(args) => generate(args),
        Command::Verify { files, depth } => verify(files, *depth),
        Command::Stats { files, level } => stats(files, *level),
        Command::Check { kb, queries } => check(kb, queries),
        Command::Merge { inputs, out } => merge(inputs, out),
    }
}
