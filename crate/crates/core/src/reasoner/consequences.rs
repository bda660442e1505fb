//! The bounded candidate space swept by `inferred_consequences`.

use std::collections::HashSet;

use crate::syntax::{Axiom, Concept, Level, LevelPair, KnowledgeBase, MAX_ATOMS_PER_SIDE, MAX_QUANTIFIER_NESTING};

/// Limits on the candidate sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateBounds {
    /// Add `∃R.C` and `∀R.C` over every base concept.
    pub wrappers: bool,
    pub max_assertions: usize,
    pub max_subsumptions: usize,
    /// Conjunctions `(C ⊓ D)(a)` of two true assertions with disjoint
    /// justifications, tried after the main sweep.
    pub max_compositions: usize,
}

impl Default for CandidateBounds {
    fn default() -> Self {
        CandidateBounds {
            wrappers: true,
            max_assertions: 2000,
            max_subsumptions: 800,
            max_compositions: 300,
        }
    }
}

pub(crate) fn admissible(c: &Concept, level: Level) -> bool {
    let mut names = Vec::new();
    c.concept_names(&mut names);
    c.quantifier_depth() <= MAX_QUANTIFIER_NESTING
        && names.len() <= MAX_ATOMS_PER_SIDE
        && c.linguistic_level().is_ok_and(|l| l <= level)
}

struct Unique {
    seen: HashSet<Concept>,
    items: Vec<Concept>,
}

impl Unique {
    fn push(&mut self, c: Concept) {
        if self.seen.insert(c.canonical()) {
            self.items.push(c);
        }
    }
}

/// Candidate facts and rules over the signature of `kb`, capped by `level`,
/// in a deterministic order: concept assertions, asserted role facts, then
/// subsumptions.
pub fn candidate_axioms(kb: &KnowledgeBase, level: Level, bounds: &CandidateBounds) -> Vec<Axiom> {
    let sig = kb.signature();
    let mut base = Unique {
        seen: HashSet::new(),
        items: Vec::new(),
    };
    for a in &sig.concepts {
        base.push(Concept::Atomic(a.clone()));
        base.push(Concept::not(Concept::Atomic(a.clone())));
    }
    for ax in kb.axioms() {
        for side in ax.sides() {
            for sub in side.subconcepts() {
                if !matches!(sub, Concept::Top | Concept::Bottom) && admissible(sub, level) {
                    base.push(sub.clone());
                }
            }
        }
    }
    let bases = base.items.clone();
    let mut concepts = base;
    if bounds.wrappers {
        for role in &sig.roles {
            for c in &bases {
                for w in [
                    Concept::Exists(role.clone(), Box::new(c.clone())),
                    Concept::Forall(role.clone(), Box::new(c.clone())),
                ] {
                    if admissible(&w, level) {
                        concepts.push(w);
                    }
                }
            }
        }
    }

    let mut out = Vec::new();
    let mut assertions = 0;
    'outer: for ind in &sig.individuals {
        for c in &concepts.items {
            if assertions >= bounds.max_assertions {
                break 'outer;
            }
            out.push(Axiom::ConceptAssertion {
                concept: c.clone(),
                individual: ind.clone(),
            });
            assertions += 1;
        }
    }
    out.extend(kb.axioms().iter().filter(|a| matches!(a, Axiom::RoleAssertion { .. })).cloned());

    let mut rules = 0;
    'rules: for lhs in &bases {
        for rhs in &bases {
            if rules >= bounds.max_subsumptions {
                break 'rules;
            }
            if lhs.canonical() == rhs.canonical() {
                continue;
            }
            let ax = Axiom::subsumption(lhs.clone(), rhs.clone());
            if let Ok(Some(pair)) = ax.level_pair() {
                if legal(pair, level) {
                    out.push(ax);
                    rules += 1;
                }
            }
        }
    }
    out
}

fn legal(pair: LevelPair, level: Level) -> bool {
    pair.is_legal_at(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_axiom, parse_kb};

    #[test]
    fn sweep_covers_atoms_negations_and_wrappers() {
        let kb = parse_kb("A subclassof B\nA(a)\nr(a, b)\n").unwrap();
        let c = candidate_axioms(&kb, Level::new(0).unwrap(), &CandidateBounds::default());
        for want in ["B(a)", "(not B)(b)", "A subclassof B", "r(a, b)", "(some r . A)(a)"] {
            assert!(c.contains(&parse_axiom(want).unwrap()), "{want}");
        }
        assert!(c.iter().all(|a| a.level().unwrap().value() == 0));
    }
}
