#![allow(dead_code)]

use alcq::syntax::{sym, Axiom, Cardinality, Concept, KnowledgeBase, MAX_QUANTIFIER_NESTING};
use proptest::prelude::*;
use proptest::sample::select;

pub const ATOMS: &[&str] = &["A", "B", "C"];
pub const ROLES: &[&str] = &["r"];
pub const INDIVIDUALS: &[&str] = &["a", "b"];

fn count(restrict: bool) -> impl Strategy<Value = Cardinality> {
    (0u32..3, any::<bool>()).prop_map(move |(n, strict)| match (restrict, strict) {
        // "more than n" is at least n + 1
        (true, true) => Cardinality { n: n + 1, strict: true },
        (false, true) => Cardinality { n, strict: true },
        (_, false) => Cardinality::new(n),
    })
}

/// Concepts over `atoms` and `roles` within the nesting limit.
pub fn concept_over(atoms: &'static [&'static str], roles: &'static [&'static str]) -> impl Strategy<Value = Concept> {
    let leaf = prop_oneof![
        6 => select(atoms).prop_map(Concept::atom),
        1 => Just(Concept::Top),
        1 => Just(Concept::Bottom),
    ];
    leaf.prop_recursive(3, 12, 2, move |inner| {
        let role = select(roles);
        prop_oneof![
            inner.clone().prop_map(Concept::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Concept::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Concept::or(l, r)),
            (role.clone(), inner.clone()).prop_map(|(r, c)| Concept::exists(r, c)),
            (role.clone(), inner.clone()).prop_map(|(r, c)| Concept::forall(r, c)),
            (count(true), role.clone(), inner.clone()).prop_map(|(k, r, c)| Concept::AtLeast(k, sym(r), Box::new(c))),
            (count(false), role, inner).prop_map(|(k, r, c)| Concept::AtMost(k, sym(r), Box::new(c))),
        ]
    })
    .prop_filter("nesting limit", |c| c.quantifier_depth() <= MAX_QUANTIFIER_NESTING)
}

pub fn concept() -> impl Strategy<Value = Concept> {
    concept_over(ATOMS, ROLES)
}

pub fn assertion() -> impl Strategy<Value = Axiom> {
    (concept(), select(INDIVIDUALS)).prop_map(|(c, a)| Axiom::assertion(c, a))
}

pub fn axiom() -> impl Strategy<Value = Axiom> {
    prop_oneof![
        3 => (concept(), concept()).prop_map(|(l, r)| Axiom::subsumption(l, r)),
        3 => assertion(),
        1 => (select(ROLES), select(INDIVIDUALS), select(INDIVIDUALS)).prop_map(|(r, a, b)| Axiom::role(r, a, b)),
    ]
}

/// KBs of one to `max` distinct axioms.
pub fn kb(max: usize) -> impl Strategy<Value = KnowledgeBase> {
    prop::collection::vec(axiom(), 1..=max).prop_map(|axioms| {
        let mut kb = KnowledgeBase::new("prop");
        for ax in axioms {
            let _ = kb.insert(ax);
        }
        kb
    })
}
