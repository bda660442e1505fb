//! KB text format: one axiom per line, `#` comments.
//!
//! ```text
//! # id: k1
//! # facts
//! (only admires . bottom)(Anne)
//! # rules
//! only admires . bottom subclassof only likes . Quiet
//! ```
//!
//! A leading `# id: NAME` comment names the KB. Section comments are
//! informational; each axiom is classified by its own shape.

use std::collections::BTreeSet;

use super::concept::{Concept, Symbol};
use super::reader::parse_axiom_at;
use super::{Axiom, KnowledgeBase, SyntaxError};

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Or,
    And,
    Unary,
}

fn write_concept(c: &Concept, ctx: Prec, out: &mut String) {
    let own = match c {
        Concept::Or(..) => Prec::Or,
        Concept::And(..) => Prec::And,
        _ => Prec::Unary,
    };
    let paren = own < ctx;
    if paren {
        out.push('(');
    }
    match c {
        Concept::Atomic(name) => out.push_str(name),
        Concept::Top => out.push_str("top"),
        Concept::Bottom => out.push_str("bottom"),
        Concept::Not(inner) => {
            out.push_str("not ");
            write_concept(inner, Prec::Unary, out);
        }
        Concept::And(l, r) => {
            write_concept(l, Prec::And, out);
            out.push_str(" and ");
            write_concept(r, Prec::Unary, out);
        }
        Concept::Or(l, r) => {
            write_concept(l, Prec::Or, out);
            out.push_str(" or ");
            write_concept(r, Prec::And, out);
        }
        Concept::Exists(role, f) => restriction("some", role, f, out),
        Concept::Forall(role, f) => restriction("only", role, f, out),
        Concept::AtLeast(k, role, f) => {
            let head = if k.strict {
                format!("morethan {}", k.n - 1)
            } else {
                format!("atleast {}", k.n)
            };
            restriction(&head, role, f, out)
        }
        Concept::AtMost(k, role, f) => {
            let head = if k.strict {
                format!("lessthan {}", k.n + 1)
            } else {
                format!("atmost {}", k.n)
            };
            restriction(&head, role, f, out)
        }
    }
    if paren {
        out.push(')');
    }
}

fn restriction(head: &str, role: &Symbol, filler: &Concept, out: &mut String) {
    out.push_str(head);
    out.push(' ');
    out.push_str(role);
    out.push_str(" . ");
    write_concept(filler, Prec::Unary, out);
}

/// Concept in KB text syntax.
pub fn concept_to_line(c: &Concept) -> String {
    let mut s = String::new();
    write_concept(c, Prec::Or, &mut s);
    s
}

/// Axiom in KB text syntax.
pub fn axiom_to_line(ax: &Axiom) -> String {
    match ax {
        Axiom::Subsumption { lhs, rhs } => {
            format!("{} subclassof {}", concept_to_line(lhs), concept_to_line(rhs))
        }
        Axiom::ConceptAssertion {
            concept,
            individual,
        } => format!("({})({})", concept_to_line(concept), individual),
        Axiom::RoleAssertion {
            role,
            subject,
            object,
        } => format!("{role}({subject}, {object})"),
    }
}

/// Deterministic text form: id line, then facts and rules sections, each in
/// KB order.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    if !kb.id.is_empty() {
        out.push_str(&format!("# id: {}\n", kb.id));
    }
    let facts: Vec<&Axiom> = kb.facts().collect();
    let rules: Vec<&Axiom> = kb.rules().collect();
    // Rules and facts may interleave in insertion order; keep that order so
    // that parse(serialize(kb)) == kb.
    let interleaved = {
        let mut seen_rule = false;
        kb.axioms().iter().any(|a| {
            if a.is_rule() {
                seen_rule = true;
                false
            } else {
                seen_rule
            }
        })
    };
    if interleaved {
        for ax in kb.axioms() {
            out.push_str(&axiom_to_line(ax));
            out.push('\n');
        }
        return out;
    }
    if !facts.is_empty() {
        out.push_str("# facts\n");
        for ax in facts {
            out.push_str(&axiom_to_line(ax));
            out.push('\n');
        }
    }
    if !rules.is_empty() {
        out.push_str("# rules\n");
        for ax in rules {
            out.push_str(&axiom_to_line(ax));
            out.push('\n');
        }
    }
    out
}

/// Parses a KB. Empty input (no axioms) is an error.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, SyntaxError> {
    let mut kb = KnowledgeBase::new("");
    let mut lines_of = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if kb.is_empty() && kb.id.is_empty() {
                if let Some(id) = comment.trim().strip_prefix("id:") {
                    kb.id = id.trim().to_string();
                }
            }
            continue;
        }
        let body = match trimmed.find('#') {
            Some(pos) => trimmed[..pos].trim_end(),
            None => trimmed,
        };
        if body.is_empty() {
            continue;
        }
        let ax = parse_axiom_at(body, line)?;
        kb.insert(ax).map_err(|e| match e {
            SyntaxError::DuplicateAxiom(s) => SyntaxError::Parse {
                line,
                column: 1,
                message: format!("duplicate axiom {s}"),
            },
            other => other,
        })?;
        lines_of.push(line);
    }
    if kb.is_empty() {
        return Err(SyntaxError::Parse {
            line: 1,
            column: 1,
            message: "knowledge base has no axioms".into(),
        });
    }
    check_roles_are_not_concepts(&kb, &lines_of)?;
    Ok(kb)
}

fn check_roles_are_not_concepts(kb: &KnowledgeBase, lines: &[usize]) -> Result<(), SyntaxError> {
    let roles: BTreeSet<Symbol> = kb.axioms().iter().flat_map(|a| a.role_names()).collect();
    for (ax, &line) in kb.axioms().iter().zip(lines) {
        if let Some(name) = ax.concept_names().into_iter().find(|c| roles.contains(c)) {
            return Err(SyntaxError::Arity {
                line,
                message: format!("{name} is a role and needs two individuals"),
            });
        }
    }
    Ok(())
}

/// Parses a file of queries: one axiom per line, comments allowed.
pub fn parse_axioms(text: &str) -> Result<Vec<Axiom>, SyntaxError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        let body = match trimmed.find('#') {
            Some(pos) => trimmed[..pos].trim_end(),
            None => trimmed,
        };
        if body.is_empty() {
            continue;
        }
        out.push(parse_axiom_at(body, i + 1)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1() -> KnowledgeBase {
        KnowledgeBase::from_axioms(
            "k1",
            [
                Axiom::assertion(Concept::forall("admires", Concept::Bottom), "Anne"),
                Axiom::subsumption(
                    Concept::forall("admires", Concept::Bottom),
                    Concept::forall("likes", Concept::atom("Quiet")),
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn k1_round_trips() {
        let kb = k1();
        let text = serialize_kb(&kb);
        let axiom_lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(
            axiom_lines,
            vec![
                "(only admires . bottom)(Anne)",
                "only admires . bottom subclassof only likes . Quiet"
            ]
        );
        let back = parse_kb(&text).unwrap();
        assert_eq!(back, kb);
        assert_eq!(back.id, "k1");
    }

    #[test]
    fn rules_only_kb_has_single_section() {
        let kb = KnowledgeBase::from_axioms(
            "r",
            [Axiom::subsumption(Concept::atom("A"), Concept::atom("B"))],
        )
        .unwrap();
        let text = serialize_kb(&kb);
        assert!(text.contains("# rules"));
        assert!(!text.contains("# facts"));
    }

    #[test]
    fn empty_text_is_rejected() {
        assert!(matches!(parse_kb(""), Err(SyntaxError::Parse { .. })));
        assert!(matches!(parse_kb("# only a comment\n"), Err(SyntaxError::Parse { .. })));
    }

    #[test]
    fn binary_shapes_survive() {
        for src in [
            "(A and (B and C))(a)",
            "((A or B) and C)(a)",
            "(A or (B or C))(a)",
            "(not (A and B))(a)",
            "(some r . (A or B))(a)",
            "(lessthan 1 r . A)(a)",
            "(morethan 2 r . top)(a)",
        ] {
            let ax = parse_axiom_at(src, 1).unwrap();
            let again = parse_axiom_at(&axiom_to_line(&ax), 1).unwrap();
            assert_eq!(ax, again, "{src}");
        }
    }

    #[test]
    fn role_used_as_concept_is_an_arity_error() {
        let text = "likes(Anne, Bob)\nlikes(Carl)\n";
        assert!(matches!(parse_kb(text), Err(SyntaxError::Arity { line: 2, .. })));
    }

    #[test]
    fn duplicate_lines_are_rejected() {
        let text = "Red(Anne)\n(not not Red)(Anne)\n";
        assert!(matches!(parse_kb(text), Err(SyntaxError::Parse { line: 2, .. })));
    }
}
