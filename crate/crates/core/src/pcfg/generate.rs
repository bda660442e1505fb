//! Whole-KB sampling with the keep-rule: consistent, every concept name
//! satisfiable, and accepted by a caller-supplied certifier.

use std::collections::BTreeMap;

use rand::Rng;

use super::{GenConfig, Grammar, PcfgError, Pool, Result, Sampler, Vocabulary};
use crate::reasoner::{Answer, Reasoner, ReasonerError};
use crate::syntax::{Axiom, Concept, KnowledgeBase};

/// A kept KB, the vocabulary it was drawn from, the attempt that produced
/// it (1-based) and whatever the certifier returned.
#[derive(Debug, Clone)]
pub struct GeneratedKb<T> {
    pub kb: KnowledgeBase,
    pub vocabulary: Vocabulary,
    pub attempts: usize,
    pub certificate: T,
}

enum Rejection {
    Sampling(String),
    Inconsistent,
    Unsatisfiable,
    Reasoner(String),
    Certifier(String),
}

impl Rejection {
    fn key(&self) -> String {
        match self {
            Rejection::Sampling(m) => format!("sampling ({m})"),
            Rejection::Inconsistent => "inconsistent KB".into(),
            Rejection::Unsatisfiable => "unsatisfiable concept".into(),
            Rejection::Reasoner(m) => format!("reasoner ({m})"),
            Rejection::Certifier(m) => m.clone(),
        }
    }
}

fn sample_kb<R: Rng>(
    cfg: &GenConfig,
    sampler: &Sampler,
    id: &str,
    rng: &mut R,
) -> std::result::Result<KnowledgeBase, Rejection> {
    let facts = rng.gen_range(cfg.fact_range.min..=cfg.fact_range.max);
    let rules = rng.gen_range(cfg.rule_range.min..=cfg.rule_range.max);
    let mut kb = KnowledgeBase::new(id);
    let mut tries = 0;
    while kb.fact_count() < facts {
        tries += 1;
        if tries > 50 * facts {
            return Err(Rejection::Sampling("too few distinct facts".into()));
        }
        let ax = sampler.fact(rng).map_err(|e| Rejection::Sampling(e.to_string()))?;
        let _ = kb.insert(ax);
    }
    for _ in 0..rules {
        let ax = sampler.axiom(rng, &kb).map_err(|e| Rejection::Sampling(e.to_string()))?;
        kb.insert(ax).map_err(|e| Rejection::Sampling(e.to_string()))?;
    }
    Ok(kb)
}

fn keep(reasoner: &Reasoner, kb: &KnowledgeBase) -> std::result::Result<(), Rejection> {
    let mut session = match reasoner.session(kb) {
        Ok(s) => s,
        Err(ReasonerError::InconsistentKB) => return Err(Rejection::Inconsistent),
        Err(e) => return Err(Rejection::Reasoner(e.to_string())),
    };
    for name in &kb.signature().concepts {
        let empty = Axiom::subsumption(Concept::Atomic(name.clone()), Concept::Bottom);
        match session.answer(&empty) {
            Ok(Answer::True) => return Err(Rejection::Unsatisfiable),
            Ok(_) => {}
            Err(e) => return Err(Rejection::Reasoner(e.to_string())),
        }
    }
    Ok(())
}

/// Samples KBs until one passes the keep-rule and `certify`, or
/// `cfg.max_retries` attempts are used up.
pub fn generate_kb<R, T, F>(
    cfg: &GenConfig,
    grammar: &Grammar,
    pool: &Pool,
    rng: &mut R,
    id: &str,
    mut certify: F,
) -> Result<GeneratedKb<T>>
where
    R: Rng,
    F: FnMut(&KnowledgeBase, &Vocabulary, &mut R) -> std::result::Result<T, String>,
{
    cfg.validate()?;
    if grammar.level != cfg.level {
        return Err(PcfgError::Config(format!(
            "grammar level {} does not match config level {}",
            grammar.level, cfg.level
        )));
    }
    let grammar = grammar.with_overrides(&cfg.probability_overrides)?;
    let reasoner = Reasoner::default();
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    for attempt in 1..=cfg.max_retries {
        let vocab = Vocabulary::sample(pool, cfg, rng);
        let sampler = Sampler::new(&grammar, vocab.clone()).with_chain_bias(cfg.chain_bias);
        let outcome = sample_kb(cfg, &sampler, id, rng)
            .and_then(|kb| keep(&reasoner, &kb).map(|_| kb))
            .and_then(|kb| {
                certify(&kb, &vocab, rng)
                    .map(|t| (kb, t))
                    .map_err(Rejection::Certifier)
            });
        match outcome {
            Ok((kb, certificate)) => {
                return Ok(GeneratedKb {
                    kb,
                    vocabulary: vocab,
                    attempts: attempt,
                    certificate,
                })
            }
            Err(r) => *failures.entry(r.key()).or_default() += 1,
        }
    }
    let diagnostics = failures
        .iter()
        .map(|(k, n)| format!("{k}: {n}"))
        .collect::<Vec<_>>()
        .join(", ");
    Err(PcfgError::GenerationFailed {
        retries: cfg.max_retries,
        diagnostics,
    })
}

/// [`generate_kb`] with only the consistency and satisfiability checks.
pub fn generate_kb_uncertified<R: Rng>(
    cfg: &GenConfig,
    grammar: &Grammar,
    pool: &Pool,
    rng: &mut R,
    id: &str,
) -> Result<GeneratedKb<()>> {
    generate_kb(cfg, grammar, pool, rng, id, |_, _, _| Ok(()))
}
