//! Dataset generation end to end: per-KB generation, rendering, splits,
//! merging, JSONL files, statistics and re-verification.

mod stats;
mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nl::{example_to_text, hard_symbolic, soft_symbolic, Lexicalization, NlError, RenamingMap};
use crate::pcfg::{
    derive_seed, generate_kb, pool, GenConfig, Grammar, PcfgError, PoolName, Range, Sampler, Vocabulary,
    DEFAULT_MAX_RETRIES, MAX_TARGET_DEPTH,
};
use crate::query::{Query, QueryGen, Route};
use crate::reasoner::{Answer, Depth, Reasoner, ReasonerError};
use crate::syntax::{axiom_to_line, Axiom, KnowledgeBase, Level, SyntaxError};

pub use stats::{complexity_histogram, stats_report, AnswerStats, ComplexityHistogram, StatsReport};
pub use verify::{check_queries, check_shape, verify_records, CheckOutcome, VerifyFailure, VerifyReport};

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "DELTA_SEED";

/// Seed tag for the train/validation/test shuffle.
const SPLIT_TAG: u64 = 0x5917;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{} of {total} KBs failed; first: {}", failures.len(), failures.first().map(|f| format!("{}: {}", f.kb_id, f.message)).unwrap_or_default())]
    GenerationFailed { total: usize, failures: Vec<KbFailure> },
    #[error("cannot merge: {0}")]
    MismatchedConfig(String),
    #[error(transparent)]
    Pcfg(#[from] PcfgError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error(transparent)]
    Nl(#[from] NlError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbFailure {
    pub kb_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolicVariant {
    #[default]
    None,
    Soft,
    Hard,
}

impl std::str::FromStr for SymbolicVariant {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(SymbolicVariant::None),
            "soft" => Ok(SymbolicVariant::Soft),
            "hard" => Ok(SymbolicVariant::Hard),
            _ => Err(PipelineError::Config(format!("unknown symbolic variant {s:?}"))),
        }
    }
}

/// Axioms behind a record in the KB text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formal {
    pub context: Vec<String>,
    pub question: String,
}

/// One line of a dataset file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub kb_id: String,
    pub pool: PoolName,
    pub context: Vec<String>,
    pub question: String,
    pub answer: Answer,
    pub depth: Depth,
    pub level: Level,
    /// Indices into `context`.
    pub justification: Vec<usize>,
    pub route: Route,
    pub symbolic_variant: SymbolicVariant,
    pub formal: Formal,
    /// Depth slot the record fills; unknowns have depth "na".
    pub slot: u32,
}

pub type Dataset = Vec<DatasetRecord>;

/// Settings for [`run_generation`], read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub pools: Vec<PoolName>,
    /// Largest inference depth `m`.
    pub depth: u32,
    pub level: Level,
    /// KBs per pool.
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Production probabilities keyed `Head.label` or `Head.index`.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub symbolic: SymbolicVariant,
    /// Worker threads; the CPU count when absent.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
    #[serde(default)]
    pub rule_range: Option<Range>,
    #[serde(default)]
    pub fact_range: Option<Range>,
}

fn default_retries() -> usize {
    DEFAULT_MAX_RETRIES
}

impl PipelineConfig {
    pub fn new(pools: Vec<PoolName>, depth: u32, level: Level, count: usize, seed: u64) -> PipelineConfig {
        PipelineConfig {
            pools,
            depth,
            level,
            count,
            seed,
            out_dir: None,
            overrides: BTreeMap::new(),
            symbolic: SymbolicVariant::None,
            jobs: None,
            max_retries: DEFAULT_MAX_RETRIES,
            rule_range: None,
            fact_range: None,
        }
    }

    /// Parses a TOML config and applies the seed override from the
    /// environment.
    pub fn from_toml(text: &str) -> Result<PipelineConfig> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.apply_env()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| PipelineError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.pools.is_empty() {
            return bad("no pools".into());
        }
        if BTreeSet::from_iter(&self.pools).len() != self.pools.len() {
            return bad("a pool is listed twice".into());
        }
        if self.depth > MAX_TARGET_DEPTH {
            return bad(format!("depth {} exceeds {MAX_TARGET_DEPTH}", self.depth));
        }
        if self.jobs == Some(0) {
            return bad("jobs must be positive".into());
        }
        self.gen_config(0).validate()?;
        Grammar::builtin(self.level).with_overrides(&self.overrides)?;
        Ok(())
    }

    fn gen_config(&self, seed: u64) -> GenConfig {
        let mut g = GenConfig::new(self.depth, self.level, seed);
        g.probability_overrides = self.overrides.clone();
        g.max_retries = self.max_retries;
        if let Some(r) = self.rule_range {
            g.rule_range = r;
        }
        if let Some(r) = self.fact_range {
            g.fact_range = r;
        }
        g
    }
}

/// Train, validation and test records, each in kb_id order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Splits {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

impl Splits {
    pub fn named(&self) -> [(&'static str, &Dataset); 3] {
        [("train", &self.train), ("validation", &self.validation), ("test", &self.test)]
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub dataset: Dataset,
    pub splits: Splits,
    pub stats: StatsReport,
    pub renaming: BTreeMap<PoolName, RenamingMap>,
}

pub fn kb_id(pool: PoolName, level: Level, depth: u32, index: usize) -> String {
    format!("{pool}-L{level}-D{depth}-{index:05}")
}

/// Generates, renders and re-checks the records of one KB.
pub fn generate_records(cfg: &PipelineConfig, pool_name: PoolName, index: usize) -> Result<Dataset> {
    let seed = derive_seed(cfg.seed, &[pool_name as u64, index as u64]);
    let gen = cfg.gen_config(seed);
    let pool = pool(pool_name);
    let grammar = Grammar::builtin(cfg.level);
    let tuned = grammar.with_overrides(&cfg.overrides)?;
    let unknowns = Sampler::new(&tuned, Vocabulary::full(&pool));
    let reasoner = Reasoner::default();
    let id = kb_id(pool_name, cfg.level, cfg.depth, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kept = generate_kb(&gen, &grammar, &pool, &mut rng, &id, |kb, _, rng| {
        QueryGen::for_kb(&reasoner, kb, &tuned)
            .and_then(|mut qg| qg.example_set(cfg.depth, &unknowns, rng))
            .map_err(|e| e.to_string())
    })?;
    let kb = kept.kb;
    let queries = kept.certificate;
    recheck(&reasoner, &kb, &queries)?;
    log::debug!("{id}: kept after {} attempts", kept.attempts);

    let lex = Lexicalization::builtin().with_kind(pool.kind);
    let text = example_to_text(&kb, &queries, &lex, &mut rng);
    let map = RenamingMap::for_pool(&pool);
    let render = |sentence: &str, ax: &Axiom| -> Result<String> {
        Ok(match cfg.symbolic {
            SymbolicVariant::None => sentence.to_string(),
            SymbolicVariant::Soft => soft_symbolic(sentence, &map, &lex)?,
            SymbolicVariant::Hard => hard_symbolic(ax, &map)?,
        })
    };
    let context = text
        .context
        .iter()
        .zip(kb.axioms())
        .map(|(s, ax)| render(s, ax))
        .collect::<Result<Vec<_>>>()?;
    let formal_context: Vec<String> = kb.axioms().iter().map(axiom_to_line).collect();
    queries
        .iter()
        .zip(&text.items)
        .map(|(q, (sentence, _, _))| {
            Ok(DatasetRecord {
                kb_id: id.clone(),
                pool: pool_name,
                context: context.clone(),
                question: render(sentence, &q.axiom)?,
                answer: q.answer,
                depth: q.depth,
                level: cfg.level,
                justification: q.justification.as_ref().map(|j| j.axioms.clone()).unwrap_or_default(),
                route: q.route,
                symbolic_variant: cfg.symbolic,
                formal: Formal {
                    context: formal_context.clone(),
                    question: axiom_to_line(&q.axiom),
                },
                slot: q.slot,
            })
        })
        .collect()
}

/// Independent answer check with a fresh reasoner, plus a replay of each
/// justification on its own.
fn recheck(reasoner: &Reasoner, kb: &KnowledgeBase, queries: &[Query]) -> Result<()> {
    let mut session = reasoner.session(kb)?;
    for q in queries {
        let fail = |m: &str| {
            Err(PipelineError::GenerationFailed {
                total: 1,
                failures: vec![KbFailure {
                    kb_id: kb.id.clone(),
                    message: format!("{m} for {}", axiom_to_line(&q.axiom)),
                }],
            })
        };
        if session.answer(&q.axiom)? != q.answer {
            return fail("answer changed on re-check");
        }
        if let Some(j) = &q.justification {
            if j.depth() != q.depth || !session.derives(&q.axiom, &j.axioms, q.answer)? {
                return fail("justification does not replay");
            }
        }
    }
    Ok(())
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| PipelineError::Config(e.to_string()))
}

/// Generates every KB of every pool, merges the pools and splits by KB.
/// Output depends only on the config.
pub fn run_generation(cfg: &PipelineConfig) -> Result<Generated> {
    cfg.validate()?;
    let tasks: Vec<(PoolName, usize)> = cfg
        .pools
        .iter()
        .flat_map(|&p| (0..cfg.count).map(move |i| (p, i)))
        .collect();
    let results: Vec<(String, Result<Dataset>)> = thread_pool(cfg.jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(p, i)| {
                let out = generate_records(cfg, p, i);
                match &out {
                    Ok(_) => log::info!("{} done", kb_id(p, cfg.level, cfg.depth, i)),
                    Err(e) => log::warn!("{} failed: {e}", kb_id(p, cfg.level, cfg.depth, i)),
                }
                (kb_id(p, cfg.level, cfg.depth, i), out)
            })
            .collect()
    });
    let mut per_pool: BTreeMap<PoolName, Dataset> = BTreeMap::new();
    let mut failures = Vec::new();
    for ((pool, _), (id, out)) in tasks.iter().zip(results) {
        match out {
            Ok(records) => per_pool.entry(*pool).or_default().extend(records),
            Err(e) => failures.push(KbFailure {
                kb_id: id,
                message: e.to_string(),
            }),
        }
    }
    if !failures.is_empty() {
        return Err(PipelineError::GenerationFailed {
            total: tasks.len(),
            failures,
        });
    }
    let dataset = merge_pools(cfg.pools.iter().map(|p| per_pool.remove(p).unwrap_or_default()).collect())?;
    let splits = split_by_kb(&dataset, cfg.seed);
    let stats = stats_report(&dataset);
    let renaming = if cfg.symbolic == SymbolicVariant::None {
        BTreeMap::new()
    } else {
        cfg.pools.iter().map(|&p| (p, RenamingMap::for_pool(&pool(p)))).collect()
    };
    Ok(Generated {
        dataset,
        splits,
        stats,
        renaming,
    })
}

fn kb_order(records: &[DatasetRecord]) -> Vec<String> {
    let mut ids = Vec::new();
    for r in records {
        if ids.last() != Some(&r.kb_id) {
            ids.push(r.kb_id.clone());
        }
    }
    ids
}

/// Interleaves KBs from each input in turn. Inputs must agree on depth and
/// level and must not share kb_ids; empty inputs are ignored.
pub fn merge_pools(datasets: Vec<Dataset>) -> Result<Dataset> {
    let mut shape: Option<(u32, Level)> = None;
    let mut ids = BTreeSet::new();
    let mut groups: Vec<Vec<Dataset>> = Vec::new();
    for ds in datasets {
        if ds.is_empty() {
            continue;
        }
        let m = ds.iter().map(|r| r.slot).max().unwrap_or(0);
        let levels: BTreeSet<Level> = ds.iter().map(|r| r.level).collect();
        if levels.len() > 1 {
            return Err(PipelineError::MismatchedConfig("an input mixes levels".into()));
        }
        let this = (m, ds[0].level);
        match shape {
            Some(s) if s != this => {
                return Err(PipelineError::MismatchedConfig(format!(
                    "depth {} level {} against depth {} level {}",
                    this.0, this.1, s.0, s.1
                )))
            }
            _ => shape = Some(this),
        }
        let order = kb_order(&ds);
        for id in &order {
            if !ids.insert(id.clone()) {
                return Err(PipelineError::MismatchedConfig(format!("kb_id {id} appears twice")));
            }
        }
        let mut by_kb: BTreeMap<String, Dataset> = BTreeMap::new();
        for r in ds {
            by_kb.entry(r.kb_id.clone()).or_default().push(r);
        }
        groups.push(order.into_iter().map(|id| by_kb.remove(&id).unwrap_or_default()).collect());
    }
    let longest = groups.iter().map(Vec::len).max().unwrap_or(0);
    let mut iters: Vec<_> = groups.into_iter().map(Vec::into_iter).collect();
    let mut out = Vec::new();
    for _ in 0..longest {
        for it in iters.iter_mut() {
            if let Some(kb) = it.next() {
                out.extend(kb);
            }
        }
    }
    Ok(out)
}

/// 70/10/20 partition of whole KBs, shuffled under `seed`.
pub fn split_by_kb(records: &[DatasetRecord], seed: u64) -> Splits {
    let mut ids: Vec<String> = kb_order(records).into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let n = ids.len();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(seed, &[SPLIT_TAG])));
    let n_train = (n as f64 * 0.7).round() as usize;
    let n_val = ((n as f64 * 0.1).round() as usize).min(n - n_train);
    let mut which: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        which.insert(id, usize::from(i >= n_train) + usize::from(i >= n_train + n_val));
    }
    let mut sorted: Vec<&DatasetRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.kb_id.cmp(&b.kb_id));
    let mut splits = Splits::default();
    for r in sorted {
        let target = match which[r.kb_id.as_str()] {
            0 => &mut splits.train,
            1 => &mut splits.validation,
            _ => &mut splits.test,
        };
        target.push(r.clone());
    }
    splits
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_jsonl(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("records serialize");
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Decodes one JSONL line.
pub fn parse_record(line: &str) -> std::result::Result<DatasetRecord, serde_json::Error> {
    serde_json::from_str(line)
}

pub fn read_jsonl(path: &Path) -> Result<Dataset> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(&line).map_err(|source| PipelineError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?);
    }
    Ok(out)
}

/// Writes `train.jsonl`, `validation.jsonl`, `test.jsonl`, `stats.json`
/// and, for symbolic variants, `renaming.json`. Returns the paths written.
pub fn write_generated(dir: &Path, g: &Generated) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for (name, records) in g.splits.named() {
        let path = dir.join(format!("{name}.jsonl"));
        write_jsonl(&path, records)?;
        written.push(path);
    }
    let path = dir.join("stats.json");
    fs::write(&path, serde_json::to_string_pretty(&g.stats).expect("stats serialize") + "\n").map_err(io_err(&path))?;
    written.push(path);
    if !g.renaming.is_empty() {
        let path = dir.join("renaming.json");
        fs::write(&path, serde_json::to_string_pretty(&g.renaming).expect("maps serialize") + "\n")
            .map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
