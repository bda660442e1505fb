//! True, false and unknown queries per inference depth.
//!
//! True queries come from the inferred consequences of a KB. False ones
//! negate a true assertion or inject a rule that clashes with the KB.
//! Unknown ones are random statements the KB neither entails nor refutes.
//! Every label and depth is recomputed before a query is returned.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pcfg::{Grammar, Sampler, Vocabulary};
use crate::reasoner::{
    Answer, CandidateBounds, Depth, Explanation, Justification, Reasoner, ReasonerError, Session,
};
use crate::syntax::{negate_axiom, Axiom, Concept, KnowledgeBase};

/// Statements sampled per unknown slot before giving up.
pub const UNKNOWN_ATTEMPTS: usize = 500;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("no {answer} candidate at depth {depth}")]
    NoCandidateAtDepth { depth: u32, answer: Answer },
    #[error("depth {depth} {answer}: slot cannot be filled")]
    SlotUnfillable { depth: u32, answer: Answer },
    #[error("no unknown statement after {0} samples")]
    ExhaustedAttempts(usize),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
}

pub type Result<T> = std::result::Result<T, QueryError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    FromClosure,
    NegatedTrue,
    InconsistencyInjection,
    RandomUnknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub axiom: Axiom,
    pub answer: Answer,
    pub depth: Depth,
    pub justification: Option<Justification>,
    pub route: Route,
    /// Depth slot the query fills. Equals `depth` except for unknowns.
    pub slot: u32,
}

/// Query construction against one KB, sharing a compiled session.
pub struct QueryGen<'a> {
    session: Session<'a>,
    consequences: Vec<(Axiom, Depth)>,
    /// Probability of the negation route for false queries.
    pub negation_share: f64,
}

impl<'a> QueryGen<'a> {
    pub fn new(reasoner: &Reasoner, kb: &'a KnowledgeBase, consequences: Vec<(Axiom, Depth)>) -> Result<Self> {
        Ok(QueryGen {
            session: reasoner.session(kb)?,
            consequences,
            negation_share: 0.5,
        })
    }

    /// Sweeps the consequences of `kb` at `grammar`'s level first.
    pub fn for_kb(reasoner: &Reasoner, kb: &'a KnowledgeBase, grammar: &Grammar) -> Result<Self> {
        let consequences = reasoner.inferred_consequences(kb, grammar.level, &CandidateBounds::default())?;
        Self::new(reasoner, kb, consequences)
    }

    pub fn consequences(&self) -> &[(Axiom, Depth)] {
        &self.consequences
    }

    /// Consequences at depth `d`, shuffled.
    fn at_depth<R: Rng>(&self, d: u32, rng: &mut R, keep: impl Fn(&Axiom) -> bool) -> Vec<Axiom> {
        let mut out: Vec<Axiom> = self
            .consequences
            .iter()
            .filter(|(ax, depth)| *depth == Depth::Value(d) && keep(ax))
            .map(|(ax, _)| ax.clone())
            .collect();
        out.shuffle(rng);
        out
    }

    /// Recomputes answer and depth; `None` unless they match or when the
    /// checks run over budget.
    fn confirm(&mut self, ax: &Axiom, answer: Answer, d: u32) -> Result<Option<Explanation>> {
        match self.session.explain(ax) {
            Ok(e) => Ok((e.answer == answer && e.depth == Depth::Value(d)).then_some(e)),
            Err(ReasonerError::ResourceLimit(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn query(e: Explanation, axiom: Axiom, route: Route, slot: u32) -> Query {
        Query {
            axiom,
            answer: e.answer,
            depth: e.depth,
            justification: e.justification,
            route,
            slot,
        }
    }

    pub fn true_query<R: Rng>(&mut self, d: u32, rng: &mut R, seen: &mut HashSet<Axiom>) -> Result<Query> {
        for ax in self.at_depth(d, rng, |_| true) {
            if seen.contains(&ax.canonical()) {
                continue;
            }
            if let Some(e) = self.confirm(&ax, Answer::True, d)? {
                seen.insert(ax.canonical());
                return Ok(Self::query(e, ax, Route::FromClosure, d));
            }
        }
        Err(QueryError::NoCandidateAtDepth {
            depth: d,
            answer: Answer::True,
        })
    }

    pub fn false_query<R: Rng>(&mut self, d: u32, rng: &mut R, seen: &mut HashSet<Axiom>) -> Result<Query> {
        let negate_first = rng.gen_bool(self.negation_share);
        let order = if negate_first {
            [Route::NegatedTrue, Route::InconsistencyInjection]
        } else {
            [Route::InconsistencyInjection, Route::NegatedTrue]
        };
        for route in order {
            let found = match route {
                Route::NegatedTrue => self.negated(d, rng, seen)?,
                _ => self.injected(d, rng, seen)?,
            };
            if let Some(q) = found {
                seen.insert(q.axiom.canonical());
                return Ok(q);
            }
        }
        Err(QueryError::NoCandidateAtDepth {
            depth: d,
            answer: Answer::False,
        })
    }

    fn negated<R: Rng>(&mut self, d: u32, rng: &mut R, seen: &HashSet<Axiom>) -> Result<Option<Query>> {
        for source in self.at_depth(d, rng, |a| matches!(a, Axiom::ConceptAssertion { .. })) {
            let Ok(ax) = negate_axiom(&source) else {
                continue;
            };
            if seen.contains(&ax.canonical()) {
                continue;
            }
            if let Some(e) = self.confirm(&ax, Answer::False, d)? {
                return Ok(Some(Self::query(e, ax, Route::NegatedTrue, d)));
            }
        }
        Ok(None)
    }

    /// `C ⊑ nnf(¬D)` from a true `C ⊑ D`, falling back to `nnf(¬C)(a)`
    /// from a true `C(a)` when no rule-shaped candidate qualifies.
    fn injected<R: Rng>(&mut self, d: u32, rng: &mut R, seen: &HashSet<Axiom>) -> Result<Option<Query>> {
        let mut sources = self.at_depth(d, rng, |a| a.is_rule());
        sources.extend(self.at_depth(d, rng, |a| matches!(a, Axiom::ConceptAssertion { .. })));
        for source in sources {
            let ax = match &source {
                Axiom::Subsumption { lhs, rhs } => Axiom::subsumption(lhs.clone(), Concept::not(rhs.clone()).nnf()),
                other => match negate_axiom(other) {
                    Ok(ax) => ax,
                    Err(_) => continue,
                },
            };
            if seen.contains(&ax.canonical()) {
                continue;
            }
            if let Some(e) = self.confirm(&ax, Answer::False, d)? {
                return Ok(Some(Self::query(e, ax, Route::InconsistencyInjection, d)));
            }
        }
        Ok(None)
    }

    /// A statement from `sampler` whose answer is unknown.
    pub fn unknown_query<R: Rng>(
        &mut self,
        sampler: &Sampler,
        slot: u32,
        rng: &mut R,
        seen: &mut HashSet<Axiom>,
    ) -> Result<Query> {
        self.unknown_query_like(sampler, None, slot, rng, seen)
    }

    /// Like [`Self::unknown_query`], but drawn with the same kind (rule,
    /// concept or role assertion) as `like` for the first half of the
    /// attempts, so unknowns read like the true query of their slot.
    pub fn unknown_query_like<R: Rng>(
        &mut self,
        sampler: &Sampler,
        like: Option<&Axiom>,
        slot: u32,
        rng: &mut R,
        seen: &mut HashSet<Axiom>,
    ) -> Result<Query> {
        for attempt in 0..UNKNOWN_ATTEMPTS {
            let drawn = match like {
                Some(l) if attempt < UNKNOWN_ATTEMPTS / 2 => sampler.statement_like(l, rng),
                _ => sampler.statement(rng),
            };
            let Ok(ax) = drawn else {
                continue;
            };
            if seen.contains(&ax.canonical()) {
                continue;
            }
            match self.session.answer(&ax) {
                Ok(Answer::Unknown) => {
                    seen.insert(ax.canonical());
                    return Ok(Query {
                        axiom: ax,
                        answer: Answer::Unknown,
                        depth: Depth::NA,
                        justification: None,
                        route: Route::RandomUnknown,
                        slot,
                    });
                }
                Ok(_) | Err(ReasonerError::ResourceLimit(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        Err(QueryError::ExhaustedAttempts(UNKNOWN_ATTEMPTS))
    }

    /// One true, false and unknown query for each depth `0..=m`, in that
    /// order per depth.
    pub fn example_set<R: Rng>(&mut self, m: u32, sampler: &Sampler, rng: &mut R) -> Result<Vec<Query>> {
        // fail fast on the slots that reject most KBs
        for d in 0..=m {
            if !self.consequences.iter().any(|(_, depth)| *depth == Depth::Value(d)) {
                return Err(QueryError::SlotUnfillable {
                    depth: d,
                    answer: Answer::True,
                });
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(3 * (m as usize + 1));
        for d in 0..=m {
            let slot = |answer| move |e: QueryError| match e {
                QueryError::Reasoner(r) => QueryError::Reasoner(r),
                _ => QueryError::SlotUnfillable { depth: d, answer },
            };
            let t = self.true_query(d, rng, &mut seen).map_err(slot(Answer::True))?;
            let f = self.false_query(d, rng, &mut seen).map_err(slot(Answer::False))?;
            let u = self
                .unknown_query_like(sampler, Some(&t.axiom), d, rng, &mut seen)
                .map_err(slot(Answer::Unknown))?;
            out.extend([t, f, u]);
        }
        Ok(out)
    }
}

/// Uniform choice among the depth-`d` consequences, re-verified.
pub fn make_true_query<R: Rng>(
    kb: &KnowledgeBase,
    consequences: &[(Axiom, Depth)],
    d: u32,
    rng: &mut R,
) -> Result<Query> {
    QueryGen::new(&Reasoner::default(), kb, consequences.to_vec())?.true_query(d, rng, &mut HashSet::new())
}

/// A false query of depth `d` by negation or injection, chosen 50/50.
pub fn make_false_query<R: Rng>(
    kb: &KnowledgeBase,
    consequences: &[(Axiom, Depth)],
    d: u32,
    rng: &mut R,
) -> Result<Query> {
    QueryGen::new(&Reasoner::default(), kb, consequences.to_vec())?.false_query(d, rng, &mut HashSet::new())
}

/// A random statement over `vocab` with answer unknown.
pub fn make_unknown_query<R: Rng>(
    kb: &KnowledgeBase,
    grammar: &Grammar,
    vocab: &Vocabulary,
    rng: &mut R,
) -> Result<Query> {
    let sampler = Sampler::new(grammar, vocab.clone());
    QueryGen::new(&Reasoner::default(), kb, Vec::new())?.unknown_query(&sampler, 0, rng, &mut HashSet::new())
}

/// The `3·(m+1)` queries of a KB. Unknowns are drawn over `vocab`, which
/// is normally the whole pool.
pub fn build_example_set<R: Rng>(
    kb: &KnowledgeBase,
    m: u32,
    grammar: &Grammar,
    vocab: &Vocabulary,
    rng: &mut R,
) -> Result<Vec<Query>> {
    let reasoner = Reasoner::default();
    let sampler = Sampler::new(grammar, vocab.clone());
    QueryGen::for_kb(&reasoner, kb, grammar)?.example_set(m, &sampler, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcfg::{pool, PoolName};
    use crate::syntax::{parse_axiom, parse_kb, Level};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kb(text: &str) -> KnowledgeBase {
        parse_kb(text).unwrap()
    }

    fn cons(k: &KnowledgeBase) -> Vec<(Axiom, Depth)> {
        crate::reasoner::inferred_consequences(k, Level::new(0).unwrap(), &CandidateBounds::default()).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(3)
    }

    #[test]
    fn chain_gives_true_at_depth_one() {
        let k = kb("A subclassof B\nA(a)\n");
        let q = make_true_query(&k, &cons(&k), 1, &mut rng()).unwrap();
        assert_eq!(q.answer, Answer::True);
        assert_eq!(q.depth, Depth::Value(1));
        assert_eq!(q.route, Route::FromClosure);
        let q0 = make_true_query(&k, &cons(&k), 0, &mut rng()).unwrap();
        assert_eq!(q0.depth, Depth::Value(0));
        assert!(make_true_query(&k, &cons(&k), 3, &mut rng()).is_err());
    }

    #[test]
    fn k1_true_query_uses_both_axioms() {
        let k = kb("(only admires . bottom)(Anne)\nonly admires . bottom subclassof only likes . Quiet\n");
        let want = parse_axiom("(only likes . Quiet)(Anne)").unwrap();
        let c = cons(&k);
        assert!(c.contains(&(want, Depth::Value(1))));
    }

    #[test]
    fn negation_route_flips_a_true_assertion() {
        let k = kb("A subclassof B\nA(a)\n");
        let mut g = QueryGen::new(&Reasoner::default(), &k, cons(&k)).unwrap();
        g.negation_share = 1.0;
        let q = g.false_query(1, &mut rng(), &mut HashSet::new()).unwrap();
        assert_eq!(q.route, Route::NegatedTrue);
        assert_eq!(q.answer, Answer::False);
        assert_eq!(q.depth, Depth::Value(1));
        assert!(matches!(q.axiom, Axiom::ConceptAssertion { .. }));
    }

    #[test]
    fn injection_route_is_inconsistent_with_the_kb() {
        let k = kb("A subclassof B\nB subclassof C\nA(a)\n");
        let mut g = QueryGen::new(&Reasoner::default(), &k, cons(&k)).unwrap();
        g.negation_share = 0.0;
        for d in 0..=2 {
            let q = g.false_query(d, &mut rng(), &mut HashSet::new()).unwrap();
            assert_eq!(q.route, Route::InconsistencyInjection);
            assert!(!crate::reasoner::is_consistent(&k.with(q.axiom.clone())).unwrap());
        }
    }

    #[test]
    fn unknowns_are_unknown() {
        let k = kb("(some eats . top) subclassof Blue\neats(Anne, Bob)\nGreen(Bob)\n");
        let level = Level::new(0).unwrap();
        let q = make_unknown_query(&k, &Grammar::builtin(level), &Vocabulary::full(&pool(PoolName::A)), &mut rng()).unwrap();
        assert_eq!(q.answer, Answer::Unknown);
        assert_eq!(q.depth, Depth::NA);
        assert!(q.justification.is_none());
        assert_eq!(crate::reasoner::answer(&k, &parse_axiom("Green(Anne)").unwrap()).unwrap(), Answer::Unknown);
    }

    #[test]
    fn example_set_has_three_per_depth() {
        let k = kb("A subclassof B\nB subclassof C\nA(a)\nD(b)\n");
        let level = Level::new(0).unwrap();
        let set = build_example_set(&k, 2, &Grammar::builtin(level), &Vocabulary::full(&pool(PoolName::A)), &mut rng()).unwrap();
        assert_eq!(set.len(), 9);
        for d in 0..=2u32 {
            let slot: Vec<_> = set.iter().filter(|q| q.slot == d).map(|q| q.answer).collect();
            assert_eq!(slot, vec![Answer::True, Answer::False, Answer::Unknown]);
        }
        let keys: HashSet<_> = set.iter().map(|q| q.axiom.canonical()).collect();
        assert_eq!(keys.len(), 9);
        let err = build_example_set(&k, 3, &Grammar::builtin(level), &Vocabulary::full(&pool(PoolName::A)), &mut rng());
        assert_eq!(
            err,
            Err(QueryError::SlotUnfillable {
                depth: 3,
                answer: Answer::True
            })
        );
    }
}
