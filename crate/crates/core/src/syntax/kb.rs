use std::collections::BTreeSet;

use super::axiom::Axiom;
use super::concept::Symbol;
use super::SyntaxError;

/// Names occurring in a knowledge base.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<Symbol>,
    pub roles: BTreeSet<Symbol>,
    pub individuals: BTreeSet<Symbol>,
}

impl Signature {
    pub fn of<'a>(axioms: impl IntoIterator<Item = &'a Axiom>) -> Signature {
        let mut sig = Signature::default();
        for ax in axioms {
            sig.add(ax);
        }
        sig
    }

    pub fn add(&mut self, ax: &Axiom) {
        self.concepts.extend(ax.concept_names());
        self.roles.extend(ax.role_names());
        self.individuals.extend(ax.individuals());
    }

    pub fn size(&self) -> usize {
        self.concepts.len() + self.roles.len() + self.individuals.len()
    }
}

/// A set of rules and facts kept in insertion order.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    pub id: String,
    axioms: Vec<Axiom>,
    keys: Vec<Axiom>,
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.axioms == other.axioms
    }
}

impl Eq for KnowledgeBase {}

impl KnowledgeBase {
    pub fn new(id: impl Into<String>) -> Self {
        KnowledgeBase {
            id: id.into(),
            ..Default::default()
        }
    }

    /// Builds a KB, rejecting structural duplicates.
    pub fn from_axioms(
        id: impl Into<String>,
        axioms: impl IntoIterator<Item = Axiom>,
    ) -> Result<Self, SyntaxError> {
        let mut kb = KnowledgeBase::new(id);
        for ax in axioms {
            kb.insert(ax)?;
        }
        Ok(kb)
    }

    pub fn insert(&mut self, ax: Axiom) -> Result<usize, SyntaxError> {
        let key = ax.canonical();
        if self.keys.contains(&key) {
            return Err(SyntaxError::DuplicateAxiom(super::text::axiom_to_line(&ax)));
        }
        self.keys.push(key);
        self.axioms.push(ax);
        Ok(self.axioms.len() - 1)
    }

    pub fn contains(&self, ax: &Axiom) -> bool {
        self.keys.contains(&ax.canonical())
    }

    pub fn position(&self, ax: &Axiom) -> Option<usize> {
        let key = ax.canonical();
        self.keys.iter().position(|k| *k == key)
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn rules(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(|a| a.is_rule())
    }

    pub fn facts(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(|a| a.is_fact())
    }

    pub fn rule_count(&self) -> usize {
        self.rules().count()
    }

    pub fn fact_count(&self) -> usize {
        self.facts().count()
    }

    pub fn signature(&self) -> Signature {
        Signature::of(&self.axioms)
    }

    /// KB made of the axioms at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> KnowledgeBase {
        KnowledgeBase {
            id: self.id.clone(),
            axioms: indices.iter().map(|&i| self.axioms[i].clone()).collect(),
            keys: indices.iter().map(|&i| self.keys[i].clone()).collect(),
        }
    }

    /// Copy of this KB with `ax` appended (duplicates are not added twice).
    pub fn with(&self, ax: Axiom) -> KnowledgeBase {
        let mut kb = self.clone();
        let _ = kb.insert(ax);
        kb
    }
}
