//! Level-graded probabilistic grammars, vocabulary pools and KB sampling.

mod generate;
mod grammar;
mod sampler;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reasoner::ReasonerError;
use crate::syntax::{Level, SyntaxError};

pub use generate::{generate_kb, generate_kb_uncertified, GeneratedKb};
pub use grammar::{GSymbol, Grammar, Production};
pub use sampler::{derive_seed, Derivation, Sampler, Vocabulary};

#[derive(Debug, Error)]
pub enum PcfgError {
    #[error("unknown pool {0:?} (expected A or B)")]
    UnknownPool(String),
    #[error("grammar line {line}: {message}")]
    Grammar { line: usize, message: String },
    #[error("probabilities of {head} sum to {sum}")]
    Probabilities { head: String, sum: f64 },
    #[error("no production matches {0:?}")]
    UnknownProduction(String),
    #[error("derivation exceeded {0} expansions")]
    DepthRunaway(usize),
    #[error("no admissible axiom after {0} attempts")]
    ExhaustedAttempts(usize),
    #[error("no KB kept after {retries} attempts: {diagnostics}")]
    GenerationFailed { retries: usize, diagnostics: String },
    #[error("invalid generation config: {0}")]
    Config(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
}

pub type Result<T> = std::result::Result<T, PcfgError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PoolName {
    A,
    B,
}

impl PoolName {
    pub fn all() -> [PoolName; 2] {
        [PoolName::A, PoolName::B]
    }
}

impl fmt::Display for PoolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolName::A => "A",
            PoolName::B => "B",
        })
    }
}

impl FromStr for PoolName {
    type Err = PcfgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(PoolName::A),
            "B" | "b" => Ok(PoolName::B),
            _ => Err(PcfgError::UnknownPool(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolKind {
    People,
    Things,
}

/// A vocabulary of concept words, roles and individuals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pool {
    #[serde(skip_deserializing, default = "default_pool_name")]
    pub name: PoolName,
    pub kind: PoolKind,
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
    pub individuals: Vec<String>,
}

fn default_pool_name() -> PoolName {
    PoolName::A
}

const POOLS: &str = include_str!("../../data/pools.toml");

/// The published pools, by name ("A" or "B").
pub fn load_pool(name: &str) -> Result<Pool> {
    let name: PoolName = name.parse()?;
    Ok(pool(name))
}

pub fn pool(name: PoolName) -> Pool {
    let mut all: BTreeMap<String, Pool> = toml::from_str(POOLS).expect("bundled pools parse");
    let mut p = all.remove(&name.to_string()).expect("bundled pool present");
    p.name = name;
    p
}

impl Pool {
    /// KB symbol of a concept word: "red" becomes "Red".
    pub fn concept_symbol(word: &str) -> String {
        let mut c = word.chars();
        match c.next() {
            Some(f) => f.to_uppercase().chain(c).collect(),
            None => String::new(),
        }
    }

    /// Spoken word for a concept symbol: "Red" becomes "red".
    pub fn concept_word(symbol: &str) -> String {
        let mut c = symbol.chars();
        match c.next() {
            Some(f) => f.to_lowercase().chain(c).collect(),
            None => String::new(),
        }
    }

    pub fn concept_symbols(&self) -> Vec<String> {
        self.concepts.iter().map(|w| Pool::concept_symbol(w)).collect()
    }
}

/// Inclusive integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Range {
    pub min: usize,
    pub max: usize,
}

impl Range {
    pub const fn new(min: usize, max: usize) -> Range {
        Range { min, max }
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }
}

/// Parameters for generating one KB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub target_depth: u32,
    pub level: Level,
    pub rule_range: Range,
    pub fact_range: Range,
    pub seed: u64,
    #[serde(default)]
    pub probability_overrides: BTreeMap<String, f64>,
    pub max_retries: usize,
    pub concepts_per_kb: Range,
    pub roles_per_kb: Range,
    pub individuals_per_kb: Range,
    /// See [`Sampler::with_chain_bias`].
    #[serde(default)]
    pub chain_bias: f64,
}

pub const MAX_TARGET_DEPTH: u32 = 5;
pub const DEFAULT_MAX_RETRIES: usize = 500;

/// Default (rules, facts) size ranges for a target depth. Depth 4 sits
/// between the published depth 3 and depth 5 ranges.
pub fn default_ranges(depth: u32) -> (Range, Range) {
    match depth {
        0 => (Range::new(3, 8), Range::new(1, 5)),
        1 => (Range::new(3, 8), Range::new(2, 6)),
        2 => (Range::new(3, 8), Range::new(3, 8)),
        3 => (Range::new(4, 8), Range::new(5, 10)),
        4 => (Range::new(5, 11), Range::new(5, 11)),
        _ => (Range::new(6, 14), Range::new(6, 12)),
    }
}

impl GenConfig {
    pub fn new(target_depth: u32, level: Level, seed: u64) -> GenConfig {
        let (rule_range, fact_range) = default_ranges(target_depth);
        GenConfig {
            target_depth,
            level,
            rule_range,
            fact_range,
            seed,
            probability_overrides: BTreeMap::new(),
            max_retries: DEFAULT_MAX_RETRIES,
            concepts_per_kb: Range::new(3, 6),
            roles_per_kb: Range::new(1, 3),
            individuals_per_kb: Range::new(2, 4),
            chain_bias: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PcfgError::Config(m));
        if self.target_depth > MAX_TARGET_DEPTH {
            return bad(format!("target depth {} exceeds {MAX_TARGET_DEPTH}", self.target_depth));
        }
        for (name, r) in [
            ("rule_range", self.rule_range),
            ("fact_range", self.fact_range),
            ("concepts_per_kb", self.concepts_per_kb),
            ("roles_per_kb", self.roles_per_kb),
            ("individuals_per_kb", self.individuals_per_kb),
        ] {
            if r.min > r.max {
                return bad(format!("{name} is empty ({}..{})", r.min, r.max));
            }
        }
        if self.fact_range.min == 0 {
            return bad("at least one fact is required".into());
        }
        for k in [self.concepts_per_kb.min, self.roles_per_kb.min, self.individuals_per_kb.min] {
            if k == 0 {
                return bad("sub-vocabulary sizes must be positive".into());
            }
        }
        if !(0.0..=1.0).contains(&self.chain_bias) {
            return bad(format!("chain_bias {} is not a probability", self.chain_bias));
        }
        if self.max_retries == 0 {
            return bad("max_retries must be positive".into());
        }
        for (k, p) in &self.probability_overrides {
            if !(0.0..=1.0).contains(p) {
                return bad(format!("override {k}={p} is not a probability"));
            }
        }
        Ok(())
    }
}

/// Override probabilities of the universal quantifier and of disjunction.
pub fn delta_t_overrides() -> BTreeMap<String, f64> {
    BTreeMap::from([("Restriction.forall".to_string(), 0.70), ("Connective.or".to_string(), 0.80)])
}
