//! Brute-force entailment by enumerating every interpretation over small
//! domains. Independent of the tableau; used to cross-check it.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{ReasonerError, Result};
use crate::syntax::{Axiom, Concept, KnowledgeBase, Signature, Symbol};

/// Default cap on the bits describing one interpretation.
pub const DEFAULT_ORACLE_BITS: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Entailed,
    /// A model of the KB violating the axiom.
    Countermodel(String),
    /// No countermodel up to this domain size, and no finite-model bound
    /// makes that conclusive.
    Inconclusive(usize),
}

impl OracleVerdict {
    pub fn is_conclusive(&self) -> bool {
        !matches!(self, OracleVerdict::Inconclusive(_))
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Top,
    Bottom,
    Atom(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Exists(usize, Box<Expr>),
    Forall(usize, Box<Expr>),
    AtLeast(u32, usize, Box<Expr>),
    AtMost(u32, usize, Box<Expr>),
}

#[derive(Debug, Clone)]
enum Formula {
    Sub(Expr, Expr),
    Member(Expr, usize),
    Edge(usize, usize, usize),
}

#[derive(Debug, Clone, Copy)]
struct Interp {
    k: usize,
    code: u64,
    nc: usize,
}

impl Interp {
    fn full(&self) -> u8 {
        ((1u16 << self.k) - 1) as u8
    }

    fn concept(&self, i: usize) -> u8 {
        ((self.code >> (i * self.k)) as u8) & self.full()
    }

    fn succ(&self, role: usize, e: usize) -> u8 {
        let off = self.nc * self.k + (role * self.k + e) * self.k;
        ((self.code >> off) as u8) & self.full()
    }

    fn eval(&self, e: &Expr) -> u8 {
        let full = self.full();
        match e {
            Expr::Top => full,
            Expr::Bottom => 0,
            Expr::Atom(i) => self.concept(*i),
            Expr::Not(c) => !self.eval(c) & full,
            Expr::And(l, r) => self.eval(l) & self.eval(r),
            Expr::Or(l, r) => self.eval(l) | self.eval(r),
            Expr::Exists(r, c) => self.count(*r, c, |n| n >= 1),
            Expr::Forall(r, c) => {
                let m = self.eval(c);
                let mut out = 0;
                for x in 0..self.k {
                    if self.succ(*r, x) & !m == 0 {
                        out |= 1 << x;
                    }
                }
                out
            }
            Expr::AtLeast(n, r, c) => self.count(*r, c, |m| m >= *n),
            Expr::AtMost(n, r, c) => self.count(*r, c, |m| m <= *n),
        }
    }

    fn count(&self, role: usize, filler: &Expr, ok: impl Fn(u32) -> bool) -> u8 {
        let m = self.eval(filler);
        let mut out = 0;
        for x in 0..self.k {
            if ok((self.succ(role, x) & m).count_ones()) {
                out |= 1 << x;
            }
        }
        out
    }

    fn holds(&self, f: &Formula) -> bool {
        match f {
            Formula::Sub(l, r) => self.eval(l) & !self.eval(r) & self.full() == 0,
            Formula::Member(c, a) => self.eval(c) & (1 << a) != 0,
            Formula::Edge(r, a, b) => self.succ(*r, *a) & (1 << b) != 0,
        }
    }
}

/// Every model of a KB over domains `1..=bound`, with individuals mapped
/// injectively onto the first elements.
#[derive(Debug, Clone)]
pub struct ModelSet {
    concepts: Vec<Symbol>,
    roles: Vec<Symbol>,
    individuals: Vec<Symbol>,
    concept_ix: HashMap<Symbol, usize>,
    role_ix: HashMap<Symbol, usize>,
    ind_ix: HashMap<Symbol, usize>,
    bound: usize,
    quantifier_free: bool,
    models: Vec<(usize, u64)>,
}

impl ModelSet {
    /// Enumerates the models of `kb` over the joint signature of `kb` and
    /// `extra` (the axioms that will be checked later).
    pub fn new(kb: &KnowledgeBase, extra: &[Axiom], bound: usize, max_bits: usize) -> Result<ModelSet> {
        let mut sig = kb.signature();
        for ax in extra {
            sig.add(ax);
        }
        let Signature {
            concepts,
            roles,
            individuals,
        } = sig;
        let concepts: Vec<Symbol> = concepts.into_iter().collect();
        let roles: Vec<Symbol> = roles.into_iter().collect();
        let individuals: Vec<Symbol> = individuals.into_iter().collect();
        let bits = concepts.len() * bound + roles.len() * bound * bound;
        if bits > max_bits.min(63) || bound > 8 {
            return Err(ReasonerError::BudgetExceeded {
                bits,
                limit: max_bits.min(63),
            });
        }
        let index = |v: &[Symbol]| v.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut set = ModelSet {
            concept_ix: index(&concepts),
            role_ix: index(&roles),
            ind_ix: index(&individuals),
            concepts,
            roles,
            individuals,
            bound,
            quantifier_free: kb.axioms().iter().chain(extra).all(|a| a.quantifier_depth() == 0),
            models: Vec::new(),
        };
        let formulas: Vec<Formula> = kb.axioms().iter().map(|a| set.formula(a)).collect();
        for k in 1..=bound {
            if k < set.individuals.len() {
                continue;
            }
            let nbits = set.concepts.len() * k + set.roles.len() * k * k;
            for code in 0..(1u64 << nbits) {
                let i = set.interp(k, code);
                if formulas.iter().all(|f| i.holds(f)) {
                    set.models.push((k, code));
                }
            }
        }
        Ok(set)
    }

    fn interp(&self, k: usize, code: u64) -> Interp {
        Interp {
            k,
            code,
            nc: self.concepts.len(),
        }
    }

    pub fn model_count(&self) -> usize {
        self.models.len()
    }

    fn expr(&self, c: &Concept) -> Expr {
        let b = |c: &Concept| Box::new(self.expr(c));
        match c {
            Concept::Top => Expr::Top,
            Concept::Bottom => Expr::Bottom,
            Concept::Atomic(a) => Expr::Atom(self.concept_ix[a]),
            Concept::Not(x) => Expr::Not(b(x)),
            Concept::And(l, r) => Expr::And(b(l), b(r)),
            Concept::Or(l, r) => Expr::Or(b(l), b(r)),
            Concept::Exists(r, x) => Expr::Exists(self.role_ix[r], b(x)),
            Concept::Forall(r, x) => Expr::Forall(self.role_ix[r], b(x)),
            Concept::AtLeast(n, r, x) => Expr::AtLeast(n.n, self.role_ix[r], b(x)),
            Concept::AtMost(n, r, x) => Expr::AtMost(n.n, self.role_ix[r], b(x)),
        }
    }

    fn formula(&self, ax: &Axiom) -> Formula {
        match ax {
            Axiom::Subsumption { lhs, rhs } => Formula::Sub(self.expr(lhs), self.expr(rhs)),
            Axiom::ConceptAssertion {
                concept,
                individual,
            } => Formula::Member(self.expr(concept), self.ind_ix[individual]),
            Axiom::RoleAssertion {
                role,
                subject,
                object,
            } => Formula::Edge(self.role_ix[role], self.ind_ix[subject], self.ind_ix[object]),
        }
    }

    fn covers(&self, ax: &Axiom) -> bool {
        ax.concept_names().iter().all(|c| self.concept_ix.contains_key(c))
            && ax.role_names().iter().all(|r| self.role_ix.contains_key(r))
            && ax.individuals().iter().all(|i| self.ind_ix.contains_key(i))
    }

    /// Checks `ax` against every enumerated model. Axioms over names outside
    /// the enumerated signature are reported as exceeding the budget.
    pub fn check(&self, ax: &Axiom) -> Result<OracleVerdict> {
        if !self.covers(ax) {
            return Err(ReasonerError::BudgetExceeded { bits: 0, limit: 0 });
        }
        let f = self.formula(ax);
        for &(k, code) in &self.models {
            let i = self.interp(k, code);
            if !i.holds(&f) {
                return Ok(OracleVerdict::Countermodel(self.describe(&i)));
            }
        }
        // Without quantifiers every axiom is checked element-wise, so any
        // model restricts to the named elements plus one witness.
        let needed = (self.individuals.len() + usize::from(ax.is_rule())).max(1);
        if self.quantifier_free && ax.quantifier_depth() == 0 && self.bound >= needed {
            Ok(OracleVerdict::Entailed)
        } else {
            Ok(OracleVerdict::Inconclusive(self.bound))
        }
    }

    fn describe(&self, i: &Interp) -> String {
        let mut s = format!("domain {}", i.k);
        for (a, name) in self.individuals.iter().enumerate() {
            let _ = write!(s, "; {name}={a}");
        }
        for (c, name) in self.concepts.iter().enumerate() {
            let m = i.concept(c);
            let elems: Vec<String> = (0..i.k).filter(|x| m & (1 << x) != 0).map(|x| x.to_string()).collect();
            let _ = write!(s, "; {name}={{{}}}", elems.join(","));
        }
        for (r, name) in self.roles.iter().enumerate() {
            let mut pairs = Vec::new();
            for x in 0..i.k {
                let m = i.succ(r, x);
                for y in 0..i.k {
                    if m & (1 << y) != 0 {
                        pairs.push(format!("({x},{y})"));
                    }
                }
            }
            let _ = write!(s, "; {name}={{{}}}", pairs.join(","));
        }
        s
    }
}

/// Enumerates interpretations of size up to `domain_bound` looking for a
/// model of `kb` that violates `ax`.
pub fn oracle_check(kb: &KnowledgeBase, ax: &Axiom, domain_bound: usize) -> Result<OracleVerdict> {
    ModelSet::new(kb, std::slice::from_ref(ax), domain_bound, DEFAULT_ORACLE_BITS)?.check(ax)
}
