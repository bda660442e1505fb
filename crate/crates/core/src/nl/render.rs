//! Template rendering of concepts and axioms as English.

use rand::Rng;

use super::Lexicalization;
use crate::syntax::{Axiom, Concept};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Num {
    Sg,
    Pl,
}

/// The four ways of saying `C ⊑ D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phrasing {
    /// "If someone is C, then they are D"
    IfThen,
    /// "People that are C are D", or "C people are D" for a named C
    PeopleThat,
    /// "All people that are C are D"
    AllPeopleThat,
    /// "Someone can R only people that are C", for `⊤ ⊑ ∀R.C` only
    CanOnly,
}

impl Phrasing {
    /// Phrasings available for a rule. `⊤ ⊑ ∀R.C` always uses
    /// [`Phrasing::CanOnly`].
    pub fn choices(ax: &Axiom) -> &'static [Phrasing] {
        match ax {
            Axiom::Subsumption {
                lhs: Concept::Top,
                rhs: Concept::Forall(..),
            } => &[Phrasing::CanOnly],
            Axiom::Subsumption { .. } => &[Phrasing::IfThen, Phrasing::PeopleThat, Phrasing::AllPeopleThat],
            _ => &[],
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// A conjunct or disjunct that can share a copula with its neighbours.
fn adjectival(lex: &Lexicalization, c: &Concept) -> Option<String> {
    match c {
        Concept::Atomic(a) if !lex.is_noun(a) => Some(lex.adjective(a)),
        Concept::Not(inner) => match &**inner {
            Concept::Atomic(a) if !lex.is_noun(a) => Some(format!("{} {}", lex.not, lex.adjective(a))),
            _ => None,
        },
        _ => None,
    }
}

fn flatten<'c>(c: &'c Concept, conj: bool, out: &mut Vec<&'c Concept>) {
    match (c, conj) {
        (Concept::And(l, r), true) | (Concept::Or(l, r), false) => {
            flatten(l, conj, out);
            flatten(r, conj, out);
        }
        _ => out.push(c),
    }
}

impl Lexicalization {
    fn copula(&self, n: Num) -> &'static str {
        match n {
            Num::Sg => "is",
            Num::Pl => "are",
        }
    }

    fn verb(&self, role: &str, n: Num) -> String {
        match n {
            Num::Sg => role.to_string(),
            Num::Pl => self.base_verb(role),
        }
    }

    /// Spoken number, with digits past the word list.
    pub fn number(&self, n: u32) -> String {
        self.numbers.get(n as usize).cloned().unwrap_or_else(|| n.to_string())
    }

    fn noun_phrase(&self, a: &str, n: Num) -> String {
        match (self.nouns.get(a), n) {
            (Some(noun), Num::Sg) => format!("a {}", noun.singular),
            (Some(noun), Num::Pl) => noun.plural.clone(),
            (None, Num::Sg) => format!("{} {}", self.words().someone, self.adjective(a)),
            (None, Num::Pl) => format!("{} {}", self.adjective(a), self.words().plural),
        }
    }

    /// Predicate phrase for a subject of number `n`.
    pub(crate) fn vp(&self, c: &Concept, n: Num) -> String {
        let w = self.words();
        match c {
            Concept::Atomic(a) if self.is_noun(a) => format!("{} {}", self.copula(n), self.noun_phrase(a, n)),
            Concept::Atomic(a) => format!("{} {}", self.copula(n), self.adjective(a)),
            Concept::Top => format!("{} {}", self.copula(n), w.someone),
            Concept::Bottom => format!("{} {}", self.copula(n), self.nothing),
            Concept::Not(inner) => match &**inner {
                Concept::Atomic(a) if self.is_noun(a) => {
                    format!("{} {} {}", self.copula(n), self.not, self.noun_phrase(a, n))
                }
                Concept::Atomic(a) => format!("{} {} {}", self.copula(n), self.not, self.adjective(a)),
                q if q.is_quantifier() => {
                    let aux = if n == Num::Sg { "does" } else { "do" };
                    format!("{aux} {} {}", self.not, self.vp(q, Num::Pl))
                }
                _ => self.vp(&c.nnf(), n),
            },
            Concept::And(..) => self.coordinate(c, true, n, false),
            Concept::Or(..) => self.coordinate(c, false, n, false),
            Concept::Exists(r, f) => format!("{} {}", self.verb(r, n), self.some_object(f)),
            Concept::Forall(r, f) => format!("{} {}", self.verb(r, n), self.only_object(f)),
            Concept::AtLeast(k, r, f) => {
                let q = if k.strict {
                    format!("{} {}", self.more_than, self.number(k.n - 1))
                } else {
                    format!("{} {}", self.at_least, self.number(k.n))
                };
                format!("{} {q} {}", self.verb(r, n), self.counted(f))
            }
            Concept::AtMost(k, r, f) => {
                let q = if k.strict {
                    format!("{} {}", self.less_than, self.number(k.n + 1))
                } else {
                    format!("{} {}", self.at_most, self.number(k.n))
                };
                format!("{} {q} {}", self.verb(r, n), self.counted(f))
            }
        }
    }

    /// "that ..." clauses describing a head of number `n`.
    fn relative(&self, c: &Concept, n: Num) -> String {
        match c {
            Concept::And(..) => self.coordinate(c, true, n, true),
            Concept::Or(..) => self.coordinate(c, false, n, true),
            _ => format!("{} {}", self.that, self.vp(c, n)),
        }
    }

    /// Joins the items of a junction. Neighbouring adjectives share one
    /// copula: "is red and not green", "that are confident or not kind".
    fn coordinate(&self, c: &Concept, conj: bool, n: Num, rel: bool) -> String {
        let mut items = Vec::new();
        flatten(c, conj, &mut items);
        let op = if conj { &self.and } else { &self.or };
        let mut parts: Vec<String> = Vec::new();
        let mut adjectives: Vec<String> = Vec::new();
        let flush = |adjectives: &mut Vec<String>, parts: &mut Vec<String>| {
            if !adjectives.is_empty() {
                let phrase = format!("{} {}", self.copula(n), adjectives.join(&format!(" {op} ")));
                parts.push(if rel { format!("{} {phrase}", self.that) } else { phrase });
                adjectives.clear();
            }
        };
        for item in items {
            if let Some(adj) = adjectival(self, item) {
                adjectives.push(adj);
                continue;
            }
            flush(&mut adjectives, &mut parts);
            parts.push(if rel { self.relative(item, n) } else { self.vp(item, n) });
        }
        flush(&mut adjectives, &mut parts);
        parts.join(&format!(" {op} "))
    }

    fn some_object(&self, f: &Concept) -> String {
        let w = self.words();
        match f {
            Concept::Top => w.someone.clone(),
            Concept::Atomic(a) => self.noun_phrase(a, Num::Sg),
            _ => format!("{} {}", w.someone, self.relative(f, Num::Sg)),
        }
    }

    fn only_object(&self, f: &Concept) -> String {
        let w = self.words();
        match f {
            Concept::Bottom => self.none.clone(),
            Concept::Top => format!("{} {}", self.only, w.plural),
            Concept::Atomic(a) => format!("{} {}", self.only, self.noun_phrase(a, Num::Pl)),
            _ => format!("{} {} {}", self.only, w.plural, self.relative(f, Num::Pl)),
        }
    }

    fn counted(&self, f: &Concept) -> String {
        let w = self.words();
        match f {
            Concept::Top => w.plural.clone(),
            Concept::Atomic(a) => self.noun_phrase(a, Num::Pl),
            _ => format!("{} {}", w.plural, self.relative(f, Num::Pl)),
        }
    }

    /// Subject for the left side of a rule in the "people that" phrasing.
    fn people_that(&self, c: &Concept) -> String {
        let w = self.words();
        match c {
            Concept::Atomic(a) => capitalize(&self.noun_phrase(a, Num::Pl)),
            _ => format!("{} {}", capitalize(&w.plural), self.relative(c, Num::Pl)),
        }
    }

    pub(crate) fn rule(&self, lhs: &Concept, rhs: &Concept, phrasing: Phrasing) -> String {
        let w = self.words();
        if *lhs == Concept::Top {
            if let (Phrasing::CanOnly, Concept::Forall(r, f)) = (phrasing, rhs) {
                let object = match &**f {
                    Concept::Bottom => self.none.clone(),
                    f => format!("{} {} {}", self.only, w.plural, self.relative(f, Num::Pl)),
                };
                return format!("{} can {} {object}", capitalize(&w.someone), self.base_verb(r));
            }
            return format!("{} {}", capitalize(&w.everyone), self.vp(rhs, Num::Sg));
        }
        match phrasing {
            Phrasing::IfThen | Phrasing::CanOnly => format!(
                "If {} {}, then they {}",
                w.someone,
                self.vp(lhs, Num::Sg),
                self.vp(rhs, Num::Pl)
            ),
            Phrasing::PeopleThat => format!("{} {}", self.people_that(lhs), self.vp(rhs, Num::Pl)),
            Phrasing::AllPeopleThat => format!(
                "All {} {} {}",
                w.plural,
                self.relative(lhs, Num::Pl),
                self.vp(rhs, Num::Pl)
            ),
        }
    }
}

/// The predicate a concept says of a single subject: for `∀admires.⊥`,
/// "admires none".
pub fn concept_to_text(c: &Concept, lex: &Lexicalization) -> String {
    lex.vp(c, Num::Sg)
}

/// A sentence for `ax` with the given phrasing. Phrasings only matter for
/// rules. The result is not passed through [`super::fixup_grammar`].
pub fn axiom_to_text_as(ax: &Axiom, lex: &Lexicalization, phrasing: Phrasing) -> String {
    match ax {
        Axiom::Subsumption { lhs, rhs } => {
            let allowed = Phrasing::choices(ax);
            let p = if allowed.contains(&phrasing) { phrasing } else { allowed[0] };
            lex.rule(lhs, rhs, p)
        }
        Axiom::ConceptAssertion { concept, individual } => format!("{individual} {}", lex.vp(concept, Num::Sg)),
        Axiom::RoleAssertion { role, subject, object } => format!("{subject} {role} {object}"),
    }
}

/// A sentence for `ax`, choosing a phrasing uniformly for rules.
pub fn axiom_to_text<R: Rng>(ax: &Axiom, lex: &Lexicalization, rng: &mut R) -> String {
    let choices = Phrasing::choices(ax);
    let p = match choices.len() {
        0 => Phrasing::IfThen,
        1 => choices[0],
        n => choices[rng.gen_range(0..n)],
    };
    axiom_to_text_as(ax, lex, p)
}
