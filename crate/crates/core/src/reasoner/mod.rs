//! Consistency, entailment and three-valued answers for ALCQ, with minimum
//! justifications, inference depth and a model-enumeration oracle.
//!
//! Individuals are interpreted under the unique name assumption. Entailment
//! is reduced to consistency: `C(a)` follows when `¬C(a)` is inconsistent
//! with the KB, `C ⊑ D` when a fresh element in `C ⊓ ¬D` is.

mod consequences;
mod justify;
mod oracle;
mod pool;
mod tableau;

use std::cell::Cell;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::syntax::{axiom_to_line, Axiom, Concept, KnowledgeBase, Symbol};
use tableau::Problem;

pub use consequences::{candidate_axioms, CandidateBounds};
pub use justify::exhaustive_min_justification;
pub use oracle::{oracle_check, ModelSet, OracleVerdict, DEFAULT_ORACLE_BITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReasonerError {
    #[error("tableau exceeded its budget of {0} nodes")]
    ResourceLimit(usize),
    #[error("knowledge base is inconsistent")]
    InconsistentKB,
    #[error("query is neither entailed nor refuted")]
    NotDerivable,
    #[error("oracle needs {bits} bits of interpretation, budget is {limit}")]
    BudgetExceeded { bits: usize, limit: usize },
    #[error("more than 64 role names")]
    TooManyRoles,
}

pub type Result<T> = std::result::Result<T, ReasonerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    True,
    False,
    Unknown,
}

impl Answer {
    pub fn letter(self) -> char {
        match self {
            Answer::True => 'T',
            Answer::False => 'F',
            Answer::Unknown => 'U',
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::True => "true",
            Answer::False => "false",
            Answer::Unknown => "unknown",
        })
    }
}

/// Inference depth: justification size minus one, or `NA` for unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depth {
    Value(u32),
    NA,
}

impl Depth {
    pub fn value(self) -> Option<u32> {
        match self {
            Depth::Value(d) => Some(d),
            Depth::NA => None,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Value(d) => write!(f, "{d}"),
            Depth::NA => f.write_str("na"),
        }
    }
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Value(d) => s.serialize_u32(*d),
            Depth::NA => s.serialize_str("na"),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Depth::Value(n)),
            Raw::Text(t) if t == "na" => Ok(Depth::NA),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad depth {t:?}"))),
        }
    }
}

/// Axioms of a KB (by index) that suffice for an answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justification {
    pub axioms: Vec<usize>,
    pub for_answer: Answer,
}

impl Justification {
    pub fn depth(&self) -> Depth {
        Depth::Value(self.axioms.len().saturating_sub(1) as u32)
    }
}

/// Answer with its minimum justification and depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub answer: Answer,
    pub justification: Option<Justification>,
    pub depth: Depth,
}

/// Reasoner settings. Each tableau check gets a fresh `node_budget`.
#[derive(Debug, Clone, Copy)]
pub struct Reasoner {
    pub node_budget: usize,
    /// Bound on consistency checks spent enumerating justifications.
    pub justification_budget: usize,
    /// Per-check node budget inside [`Reasoner::inferred_consequences`].
    /// Candidates that exceed it are left out of the result.
    pub sweep_budget: usize,
    /// Total work allowed for one sweep; past it the sweep fails with
    /// [`ReasonerError::ResourceLimit`].
    pub sweep_work: Option<usize>,
}

impl Default for Reasoner {
    fn default() -> Self {
        Reasoner {
            node_budget: 100_000,
            justification_budget: 20_000,
            sweep_budget: 10_000,
            sweep_work: Some(2_000_000),
        }
    }
}

impl Reasoner {
    pub fn is_consistent(&self, kb: &KnowledgeBase) -> Result<bool> {
        let session = Session::new(*self, kb)?;
        session.sat(&session.all())
    }

    pub fn entails(&self, kb: &KnowledgeBase, ax: &Axiom) -> Result<bool> {
        Ok(self.answer(kb, ax)? == Answer::True)
    }

    pub fn answer(&self, kb: &KnowledgeBase, ax: &Axiom) -> Result<Answer> {
        Session::new(*self, kb)?.checked()?.answer(ax)
    }

    pub fn min_justification(&self, kb: &KnowledgeBase, ax: &Axiom) -> Result<Justification> {
        self.explain(kb, ax)?.justification.ok_or(ReasonerError::NotDerivable)
    }

    pub fn depth(&self, kb: &KnowledgeBase, ax: &Axiom) -> Result<Depth> {
        Ok(self.explain(kb, ax)?.depth)
    }

    pub fn explain(&self, kb: &KnowledgeBase, ax: &Axiom) -> Result<Explanation> {
        Session::new(*self, kb)?.checked()?.explain(ax)
    }

    /// Reasoning context compiled once for many queries against `kb`.
    pub fn session<'a>(&self, kb: &'a KnowledgeBase) -> Result<Session<'a>> {
        Session::new(*self, kb)?.checked()
    }

    /// True consequences from a bounded candidate space, with their depths,
    /// in candidate order. Tautologies (empty justification) are skipped, as
    /// are candidates whose checks run past `sweep_budget`.
    pub fn inferred_consequences(
        &self,
        kb: &KnowledgeBase,
        level: crate::syntax::Level,
        bounds: &CandidateBounds,
    ) -> Result<Vec<(Axiom, Depth)>> {
        let mut session = self.session(kb)?;
        session.cfg.node_budget = self.sweep_budget.min(self.node_budget);
        session.work_limit = self.sweep_work;
        let mut found: Vec<(Axiom, Vec<usize>)> = Vec::new();
        let mut skipped = 0usize;
        for ax in candidate_axioms(kb, level, bounds) {
            match session.support(&ax, false)? {
                Some(Some(j)) => found.push((ax, j)),
                Some(None) => {}
                None => skipped += 1,
            }
        }
        let base = found.len();
        for ax in compositions(&found, level, bounds.max_compositions) {
            match session.support(&ax, true)? {
                Some(Some(j)) => found.push((ax, j)),
                Some(None) => {}
                None => skipped += 1,
            }
        }
        if skipped > 0 {
            log::debug!("{}: {skipped} candidates over the sweep budget", kb.id);
        }
        let mut seen = BTreeSet::new();
        Ok(found
            .into_iter()
            .enumerate()
            .filter(|(i, (ax, _))| *i < base || seen.insert(ax.clone()))
            .map(|(_, (ax, j))| (ax, Depth::Value(j.len() as u32 - 1)))
            .collect())
    }
}

/// Conjunctions of two found assertions about the same individual whose
/// justifications are disjoint, up to `limit`, largest combined
/// justifications first.
fn compositions(found: &[(Axiom, Vec<usize>)], level: crate::syntax::Level, limit: usize) -> Vec<Axiom> {
    let asserted: Vec<(&Concept, &Symbol, &Vec<usize>)> = found
        .iter()
        .filter_map(|(ax, j)| match ax {
            Axiom::ConceptAssertion { concept, individual } => Some((concept, individual, j)),
            _ => None,
        })
        .collect();
    let have: BTreeSet<&Axiom> = found.iter().map(|(ax, _)| ax).collect();
    let mut pairs = Vec::new();
    for (i, (c, a, j)) in asserted.iter().enumerate() {
        for (d, b, k) in &asserted[i + 1..] {
            if a != b || j.iter().any(|x| k.contains(x)) {
                continue;
            }
            let conj = Concept::and((*c).clone(), (*d).clone());
            if !consequences::admissible(&conj, level) {
                continue;
            }
            let ax = Axiom::ConceptAssertion {
                concept: conj,
                individual: (*a).clone(),
            };
            if !have.contains(&ax) {
                pairs.push((j.len() + k.len(), pairs.len(), ax));
            }
        }
    }
    pairs.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    pairs.into_iter().take(limit).map(|(_, _, ax)| ax).collect()
}

pub fn is_consistent(kb: &KnowledgeBase) -> Result<bool> {
    Reasoner::default().is_consistent(kb)
}

pub fn entails(kb: &KnowledgeBase, ax: &Axiom) -> Result<bool> {
    Reasoner::default().entails(kb, ax)
}

pub fn answer(kb: &KnowledgeBase, ax: &Axiom) -> Result<Answer> {
    Reasoner::default().answer(kb, ax)
}

pub fn min_justification(kb: &KnowledgeBase, ax: &Axiom) -> Result<Justification> {
    Reasoner::default().min_justification(kb, ax)
}

pub fn depth(kb: &KnowledgeBase, ax: &Axiom) -> Result<Depth> {
    Reasoner::default().depth(kb, ax)
}

pub fn inferred_consequences(
    kb: &KnowledgeBase,
    level: crate::syntax::Level,
    bounds: &CandidateBounds,
) -> Result<Vec<(Axiom, Depth)>> {
    Reasoner::default().inferred_consequences(kb, level, bounds)
}

/// Query items compiled into a session's problem.
#[derive(Clone, Copy, Debug)]
struct Compiled {
    holds: usize,
    refutes: Option<usize>,
    asserted: Option<usize>,
}

/// A KB compiled for repeated checks. Queries are compiled on demand.
pub struct Session<'a> {
    cfg: Reasoner,
    kb: &'a KnowledgeBase,
    problem: Problem,
    symbols: Vec<BTreeSet<Symbol>>,
    /// Nodes and alternatives spent by all checks so far.
    spent: Cell<usize>,
    /// Cap on `spent`, after which every check fails.
    work_limit: Option<usize>,
}

impl<'a> Session<'a> {
    fn new(cfg: Reasoner, kb: &'a KnowledgeBase) -> Result<Self> {
        let mut problem = Problem::new();
        for ax in kb.axioms() {
            problem.push_axiom(ax);
        }
        problem.finish();
        if problem.role_count() > 64 {
            return Err(ReasonerError::TooManyRoles);
        }
        let symbols = kb
            .axioms()
            .iter()
            .map(|a| a.symbols().into_iter().collect())
            .collect();
        Ok(Session {
            cfg,
            kb,
            problem,
            symbols,
            spent: Cell::new(0),
            work_limit: None,
        })
    }

    fn checked(self) -> Result<Self> {
        if self.sat(&self.all())? {
            Ok(self)
        } else {
            Err(ReasonerError::InconsistentKB)
        }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        self.kb
    }

    fn all(&self) -> Vec<usize> {
        (0..self.kb.len()).collect()
    }

    /// Work spent by this session's checks, in tableau nodes and
    /// alternatives.
    pub fn work(&self) -> usize {
        self.spent.get()
    }

    fn sat(&self, items: &[usize]) -> Result<bool> {
        let mut limit = self.cfg.node_budget;
        if let Some(cap) = self.work_limit {
            if self.spent.get() >= cap {
                return Err(ReasonerError::ResourceLimit(cap));
            }
            limit = limit.min(cap - self.spent.get());
        }
        let mut budget = limit;
        let out = self.problem.satisfiable(items, &mut budget);
        let used = if out.is_ok() { limit - budget } else { limit };
        self.spent.set(self.spent.get() + used);
        out.map_err(|_| ReasonerError::ResourceLimit(limit))
    }

    fn compile(&mut self, ax: &Axiom) -> Result<Compiled> {
        let holds = self.problem.push_axiom(ax);
        let refutes = self.problem.push_refutation(ax);
        self.problem.finish();
        if self.problem.role_count() > 64 {
            return Err(ReasonerError::TooManyRoles);
        }
        let asserted = match ax {
            Axiom::RoleAssertion { .. } => self.kb.position(ax),
            _ => None,
        };
        Ok(Compiled {
            holds,
            refutes,
            asserted,
        })
    }

    /// Whether the KB axioms at `subset` derive `answer` for the query.
    fn proves(&self, q: Compiled, subset: &[usize], answer: Answer) -> Result<bool> {
        match answer {
            Answer::True => match q.refutes {
                Some(r) => {
                    let mut items = subset.to_vec();
                    items.push(r);
                    Ok(!self.sat(&items)?)
                }
                None => Ok(q.asserted.is_some_and(|i| subset.contains(&i))),
            },
            Answer::False => {
                let mut items = subset.to_vec();
                items.push(q.holds);
                Ok(!self.sat(&items)?)
            }
            Answer::Unknown => Ok(false),
        }
    }

    fn answer_compiled(&self, q: Compiled, subset: &[usize]) -> Result<Answer> {
        if self.proves(q, subset, Answer::True)? {
            Ok(Answer::True)
        } else if self.proves(q, subset, Answer::False)? {
            Ok(Answer::False)
        } else {
            Ok(Answer::Unknown)
        }
    }

    pub fn answer(&mut self, ax: &Axiom) -> Result<Answer> {
        let q = self.compile(ax)?;
        let module = self.module(ax);
        self.answer_compiled(q, &module)
    }

    /// Answer of the query against the sub-KB at `subset`, which must be
    /// consistent.
    pub fn answer_within(&mut self, ax: &Axiom, subset: &[usize]) -> Result<Answer> {
        let q = self.compile(ax)?;
        self.answer_compiled(q, subset)
    }

    /// Whether the sub-KB at `subset` is consistent.
    pub fn consistent_within(&self, subset: &[usize]) -> Result<bool> {
        self.sat(subset)
    }

    /// Whether the sub-KB at `subset` derives `answer` for `ax`.
    pub fn derives(&mut self, ax: &Axiom, subset: &[usize], answer: Answer) -> Result<bool> {
        let q = self.compile(ax)?;
        self.proves(q, subset, answer)
    }

    pub fn explain(&mut self, ax: &Axiom) -> Result<Explanation> {
        let q = self.compile(ax)?;
        let module = self.module(ax);
        let answer = self.answer_compiled(q, &module)?;
        if answer == Answer::Unknown {
            return Ok(Explanation {
                answer,
                justification: None,
                depth: Depth::NA,
            });
        }
        let mut calls = 0usize;
        let limit = self.cfg.justification_budget;
        let all = justify::all_minimal(&module, |s| {
            calls += 1;
            if calls > limit {
                return Err(ReasonerError::ResourceLimit(limit));
            }
            self.proves(q, s, answer)
        })?;
        let best = self.pick_minimum(all);
        let j = Justification {
            axioms: best,
            for_answer: answer,
        };
        Ok(Explanation {
            answer,
            depth: j.depth(),
            justification: Some(j),
        })
    }

    /// Non-empty minimum justification of a true query; `Some(None)` when
    /// the query is not true or is a tautology, `None` when over budget.
    fn support(&mut self, ax: &Axiom, known_true: bool) -> Result<Option<Option<Vec<usize>>>> {
        let e = if known_true {
            self.explain(ax)
        } else {
            match self.answer(ax) {
                Ok(Answer::True) => self.explain(ax),
                Ok(_) => return Ok(Some(None)),
                Err(e) => Err(e),
            }
        };
        match e {
            Ok(e) => Ok(Some(
                e.justification
                    .filter(|j| j.for_answer == Answer::True && !j.axioms.is_empty())
                    .map(|j| j.axioms),
            )),
            Err(ReasonerError::ResourceLimit(n)) if self.work_limit.is_some_and(|cap| self.spent.get() >= cap) => {
                Err(ReasonerError::ResourceLimit(n))
            }
            Err(ReasonerError::ResourceLimit(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Smallest set; ties go to the lexicographically least sorted list of
    /// serialized axioms. Returned indices are ascending.
    fn pick_minimum(&self, sets: Vec<Vec<usize>>) -> Vec<usize> {
        let key = |s: &Vec<usize>| {
            let mut lines: Vec<String> = s.iter().map(|&i| axiom_to_line(&self.kb.axioms()[i])).collect();
            lines.sort();
            (s.len(), lines)
        };
        let mut best = sets
            .into_iter()
            .map(|s| (key(&s), s))
            .min()
            .map(|(_, s)| s)
            .unwrap_or_default();
        best.sort_unstable();
        best
    }

    /// Axioms connected to the query through shared names. Axioms without
    /// names are always kept. The rest of a consistent KB cannot affect the
    /// answer.
    fn module(&self, ax: &Axiom) -> Vec<usize> {
        let mut reach: BTreeSet<Symbol> = ax.symbols().into_iter().collect();
        let mut taken = vec![false; self.kb.len()];
        loop {
            let mut grew = false;
            for (i, syms) in self.symbols.iter().enumerate() {
                if taken[i] {
                    continue;
                }
                if syms.is_empty() || syms.iter().any(|s| reach.contains(s)) {
                    taken[i] = true;
                    reach.extend(syms.iter().cloned());
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        (0..self.kb.len()).filter(|&i| taken[i]).collect()
    }
}
