//! Soft and hard symbolic forms.
//!
//! Soft: pool words in a sentence become `a_i`, `C_j`, `R_k`, everything
//! else stays. Hard: the axiom itself written with `+`, `not`, `exists`,
//! `only`, comparison symbols and "is subsumed by", over the same names.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Lexicalization, NlError, Result};
use crate::pcfg::Pool;
use crate::syntax::{parse_axiom, sym, Axiom, Concept, Symbol};

/// Individual, concept and role names mapped to `a_i`, `C_j`, `R_k`.
/// Concepts are keyed by KB symbol ("Confident").
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RenamingMap {
    pub individuals: BTreeMap<String, String>,
    pub concepts: BTreeMap<String, String>,
    pub roles: BTreeMap<String, String>,
}

impl RenamingMap {
    /// Numbers the pool's words from 1 in pool order.
    pub fn for_pool(pool: &Pool) -> RenamingMap {
        let number = |items: Vec<String>, prefix: &str| {
            items
                .into_iter()
                .enumerate()
                .map(|(i, w)| (w, format!("{prefix}{}", i + 1)))
                .collect()
        };
        RenamingMap {
            individuals: number(pool.individuals.clone(), "a"),
            concepts: number(pool.concept_symbols(), "C"),
            roles: number(pool.roles.clone(), "R"),
        }
    }

    /// Every name mapped to its own spoken form.
    pub fn identity(pool: &Pool) -> RenamingMap {
        let same = |items: Vec<String>, words: &[String]| items.into_iter().zip(words.iter().cloned()).collect();
        RenamingMap {
            individuals: same(pool.individuals.clone(), &pool.individuals),
            concepts: same(pool.concept_symbols(), &pool.concepts),
            roles: same(pool.roles.clone(), &pool.roles),
        }
    }

    fn inverse(&self) -> RenamingMap {
        let flip = |m: &BTreeMap<String, String>| m.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
        RenamingMap {
            individuals: flip(&self.individuals),
            concepts: flip(&self.concepts),
            roles: flip(&self.roles),
        }
    }

    fn get(m: &BTreeMap<String, String>, s: &Symbol) -> Result<Symbol> {
        m.get(&**s).map(|v| sym(v)).ok_or_else(|| NlError::UnmappedTerm(s.to_string()))
    }

    fn concept(&self, c: &Concept) -> Result<Concept> {
        use Concept::*;
        let b = |c: &Concept| self.concept(c).map(Box::new);
        Ok(match c {
            Atomic(a) => Atomic(Self::get(&self.concepts, a)?),
            Top => Top,
            Bottom => Bottom,
            Not(x) => Not(b(x)?),
            And(l, r) => And(b(l)?, b(r)?),
            Or(l, r) => Or(b(l)?, b(r)?),
            Exists(r, f) => Exists(Self::get(&self.roles, r)?, b(f)?),
            Forall(r, f) => Forall(Self::get(&self.roles, r)?, b(f)?),
            AtLeast(k, r, f) => AtLeast(*k, Self::get(&self.roles, r)?, b(f)?),
            AtMost(k, r, f) => AtMost(*k, Self::get(&self.roles, r)?, b(f)?),
        })
    }

    /// The axiom over the mapped names.
    pub fn rename(&self, ax: &Axiom) -> Result<Axiom> {
        Ok(match ax {
            Axiom::Subsumption { lhs, rhs } => Axiom::subsumption(self.concept(lhs)?, self.concept(rhs)?),
            Axiom::ConceptAssertion { concept, individual } => Axiom::ConceptAssertion {
                concept: self.concept(concept)?,
                individual: Self::get(&self.individuals, individual)?,
            },
            Axiom::RoleAssertion { role, subject, object } => Axiom::RoleAssertion {
                role: Self::get(&self.roles, role)?,
                subject: Self::get(&self.individuals, subject)?,
                object: Self::get(&self.individuals, object)?,
            },
        })
    }
}

/// Replaces the pool words of an English sentence. Role verbs map to the
/// same name in either inflection. A word whose name is the word itself
/// (as in [`RenamingMap::identity`]) is left as written.
pub fn soft_symbolic(sentence: &str, map: &RenamingMap, lex: &Lexicalization) -> Result<String> {
    let function = lex.function_words();
    let mut verbs: BTreeMap<String, (&String, &String)> = BTreeMap::new();
    for (role, name) in &map.roles {
        verbs.insert(role.clone(), (role, name));
        verbs.insert(lex.base_verb(role), (role, name));
    }
    let keep = |word: &str, spoken: &str, name: &str| if spoken == name { word.to_string() } else { name.to_string() };
    let mut out = Vec::new();
    for token in sentence.split_whitespace() {
        let word = token.trim_end_matches([',', '.']);
        let tail = &token[word.len()..];
        let lower = word.to_lowercase();
        let symbol = Pool::concept_symbol(&lower);
        let replaced = if let Some(a) = map.individuals.get(word) {
            keep(word, word, a)
        } else if let Some(c) = map.concepts.get(&symbol) {
            keep(word, &lower, c)
        } else if let Some((role, name)) = verbs.get(&lower) {
            keep(word, role, name)
        } else if function.contains(&lower) || word.chars().all(|c| c.is_ascii_digit()) {
            word.to_string()
        } else {
            return Err(NlError::UnmappedTerm(word.to_string()));
        };
        out.push(format!("{replaced}{tail}"));
    }
    Ok(out.join(" "))
}

/// Undoes [`soft_symbolic`]. Role names come back in the third person, so
/// the round trip is exact up to verb inflection.
pub fn soft_symbolic_inverse(text: &str, map: &RenamingMap) -> Result<String> {
    let inv = map.inverse();
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let word = token.trim_end_matches([',', '.']);
        let tail = &token[word.len()..];
        let replaced = if let Some(a) = inv.individuals.get(word) {
            a.clone()
        } else if let Some(c) = inv.concepts.get(word) {
            Pool::concept_word(c)
        } else if let Some(r) = inv.roles.get(word) {
            r.clone()
        } else {
            word.to_string()
        };
        out.push(format!("{replaced}{tail}"));
    }
    Ok(out.join(" "))
}

fn term(c: &Concept, out: &mut String) {
    let group = |c: &Concept, out: &mut String| {
        out.push_str("( ");
        term(c, out);
        out.push_str(" )");
    };
    match c {
        Concept::Atomic(a) => {
            out.push_str("+ ");
            out.push_str(a);
        }
        Concept::Top => out.push('⊤'),
        Concept::Bottom => out.push('⊥'),
        Concept::Not(inner) => match &**inner {
            Concept::Atomic(a) => {
                out.push_str("not ");
                out.push_str(a);
            }
            other => {
                out.push_str("not ");
                group(other, out);
            }
        },
        Concept::And(l, r) | Concept::Or(l, r) => {
            group(l, out);
            out.push_str(if matches!(c, Concept::And(..)) { " and " } else { " or " });
            group(r, out);
        }
        Concept::Exists(r, f) => restriction("exists".into(), r, f, out),
        Concept::Forall(r, f) => restriction("only".into(), r, f, out),
        Concept::AtLeast(k, r, f) => {
            let head = if k.strict { format!("> {}", k.n - 1) } else { format!("≥ {}", k.n) };
            restriction(head, r, f, out)
        }
        Concept::AtMost(k, r, f) => {
            let head = if k.strict { format!("< {}", k.n + 1) } else { format!("≤ {}", k.n) };
            restriction(head, r, f, out)
        }
    }
}

fn restriction(head: String, role: &str, filler: &Concept, out: &mut String) {
    out.push_str(&head);
    out.push(' ');
    out.push_str(role);
    out.push_str(" . ( ");
    term(filler, out);
    out.push_str(" )");
}

/// Hard-symbolic line for `ax` over the names of `map`.
pub fn hard_symbolic(ax: &Axiom, map: &RenamingMap) -> Result<String> {
    let ax = map.rename(ax)?;
    let mut out = String::new();
    match &ax {
        Axiom::Subsumption { lhs, rhs } => {
            term(lhs, &mut out);
            out.push_str(" is subsumed by ");
            term(rhs, &mut out);
        }
        Axiom::ConceptAssertion { concept, individual } => {
            out.push_str("( ");
            term(concept, &mut out);
            out.push_str(&format!(" ) ( {individual} )"));
        }
        Axiom::RoleAssertion { role, subject, object } => out.push_str(&format!("{role} ( {subject} , {object} )")),
    }
    Ok(out)
}

/// Parses a hard-symbolic line and maps its names back through `map`.
pub fn read_hard_symbolic(text: &str, map: &RenamingMap) -> Result<Axiom> {
    let ax = parse_axiom(text).map_err(|e| NlError::Unreadable(e.to_string()))?;
    map.inverse().rename(&ax).map_err(|e| match e {
        NlError::UnmappedTerm(s) => NlError::UnknownSymbol(s),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcfg::{pool, PoolName};

    fn b() -> RenamingMap {
        RenamingMap::for_pool(&pool(PoolName::B))
    }

    #[test]
    fn pool_order_numbering() {
        let m = b();
        assert_eq!(m.individuals["Maria"], "a4");
        assert_eq!(m.concepts["Confident"], "C2");
        assert_eq!(m.concepts["Persevering"], "C8");
        assert_eq!(m.roles["supports"], "R8");
        assert_eq!(m.roles["mentors"], "R6");
    }

    #[test]
    fn soft_table_rows() {
        let lex = Lexicalization::builtin();
        assert_eq!(
            soft_symbolic("Maria supports less than one people that are confident or not persevering.", &b(), &lex).unwrap(),
            "a4 R8 less than one people that are C2 or not C8."
        );
        assert_eq!(
            soft_symbolic(
                "If someone mentors someone that is ambitious and that supervises less than one creative people, then they guide only people that are not persevering or that consult at most two confident people.",
                &b(),
                &lex
            )
            .unwrap(),
            "If someone R6 someone that is C1 and that R7 less than one C3 people, then they R3 only people that are not C8 or that R2 at most two C2 people."
        );
        let s = "If someone mentors someone that is ambitious, then they support only confident people.";
        assert_eq!(soft_symbolic(s, &RenamingMap::identity(&pool(PoolName::B)), &lex).unwrap(), s);
        assert_eq!(
            soft_symbolic("Maria likes Bob.", &b(), &lex),
            Err(NlError::UnmappedTerm("likes".into()))
        );
    }

    #[test]
    fn hard_table_rows() {
        let ax = parse_axiom("(lessthan 1 supports . (Confident or not Persevering))(Maria)").unwrap();
        assert_eq!(hard_symbolic(&ax, &b()).unwrap(), "( < 1 R8 . ( ( + C2 ) or ( not C8 ) ) ) ( a4 )");
        let ax = parse_axiom("not Confident subclassof some mentors . (Ambitious and lessthan 1 supervises . Creative)").unwrap();
        assert_eq!(
            hard_symbolic(&ax, &b()).unwrap(),
            "not C2 is subsumed by exists R6 . ( ( + C1 ) and ( < 1 R7 . ( + C3 ) ) )"
        );
        let ax = parse_axiom(
            "some mentors . (Ambitious and lessthan 1 supervises . Creative) subclassof only guides . (not Persevering or atmost 2 consults . Confident)",
        )
        .unwrap();
        assert_eq!(
            hard_symbolic(&ax, &b()).unwrap(),
            "exists R6 . ( ( + C1 ) and ( < 1 R7 . ( + C3 ) ) ) is subsumed by only R3 . ( ( not C8 ) or ( ≤ 2 R2 . ( + C2 ) ) )"
        );
        let ax = parse_axiom("Ambitious(Ioanna)").unwrap();
        assert_eq!(hard_symbolic(&ax, &b()).unwrap(), "( + C1 ) ( a1 )");
    }

    #[test]
    fn hard_form_reads_back() {
        for src in [
            "(lessthan 1 supports . (Confident or not Persevering))(Maria)",
            "top subclassof only leads . bottom",
            "leads(Maria, Panos)",
            "(not (some leads . Creative))(Anna)",
            "morethan 2 guides . top subclassof Logical and not Creative",
        ] {
            let ax = parse_axiom(src).unwrap();
            let line = hard_symbolic(&ax, &b()).unwrap();
            assert_eq!(read_hard_symbolic(&line, &b()).unwrap().canonical(), ax.canonical(), "{line}");
        }
    }
}
