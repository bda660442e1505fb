//! Tokenizer and recursive-descent reader for axioms.
//!
//! One reader accepts three surface dialects that share a structure:
//!
//! * the KB text format (`some likes . Quiet subclassof Red`),
//! * the symbolic token strings emitted by the grammars (`∃ likes . ( + Quiet ) ⊑ ...`),
//! * the hard-symbolic rendering (`exists R1 . ( + C2 ) is subsumed by ...`).
//!
//! Precedence from loosest to tightest: `subclassof`, `or`, `and`, unary
//! (`not`, quantifiers). A quantifier filler is a unary expression.

use super::concept::{sym, Cardinality, Concept};
use super::{Axiom, SyntaxError, MAX_QUANTIFIER_NESTING};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Dot,
    Comma,
    Plus,
    Subsumed,
    And,
    Or,
    Not,
    Some,
    Only,
    Top,
    Bottom,
    Cmp(Bound),
    Number(u32),
    Ident(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Bound {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "subclassof" => Tok::Subsumed,
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "some" | "exists" => Tok::Some,
        "only" | "forall" => Tok::Only,
        "top" => Tok::Top,
        "bottom" => Tok::Bottom,
        "atleast" => Tok::Cmp(Bound::Ge),
        "atmost" => Tok::Cmp(Bound::Le),
        "morethan" => Tok::Cmp(Bound::Gt),
        "lessthan" => Tok::Cmp(Bound::Lt),
        "exactly" => Tok::Cmp(Bound::Eq),
        _ => return None,
    })
}

/// Words that cannot be used as names.
pub fn is_reserved(word: &str) -> bool {
    keyword(word).is_some() || word == "is"
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| SyntaxError::Parse {
        line,
        column: col,
        message: msg,
    };
    while i < chars.len() {
        let (_, c) = chars[i];
        let col = i + 1;
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '.' => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '⊑' => Some(Tok::Subsumed),
            '⊓' => Some(Tok::And),
            '⊔' => Some(Tok::Or),
            '¬' => Some(Tok::Not),
            '∃' => Some(Tok::Some),
            '∀' => Some(Tok::Only),
            '⊤' => Some(Tok::Top),
            '⊥' => Some(Tok::Bottom),
            '≥' => Some(Tok::Cmp(Bound::Ge)),
            '≤' => Some(Tok::Cmp(Bound::Le)),
            '=' => Some(Tok::Cmp(Bound::Eq)),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, col });
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '<' || c == '>' {
            let eq = chars.get(i + 1).map(|&(_, n)| n == '=').unwrap_or(false);
            let bound = match (c, eq) {
                ('<', true) => Bound::Le,
                ('<', false) => Bound::Lt,
                ('>', true) => Bound::Ge,
                _ => Bound::Gt,
            };
            out.push(Spanned {
                tok: Tok::Cmp(bound),
                col,
            });
            i += if eq { 2 } else { 1 };
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            let n = digits
                .parse::<u32>()
                .map_err(|_| err(col, format!("number out of range: {digits}")))?;
            if n > 64 {
                return Err(err(col, format!("cardinality {n} is too large")));
            }
            out.push(Spanned {
                tok: Tok::Number(n),
                col,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            let tok = keyword(&word).unwrap_or(Tok::Ident(word));
            out.push(Spanned { tok, col });
            continue;
        }
        return Err(err(col, format!("unexpected character {c:?}")));
    }
    // "is subsumed by" is a single operator.
    let mut merged: Vec<Spanned> = Vec::with_capacity(out.len());
    let mut j = 0;
    while j < out.len() {
        let is_word = |k: usize, w: &str| matches!(out.get(k), Some(Spanned { tok: Tok::Ident(s), .. }) if s == w);
        if is_word(j, "is") && is_word(j + 1, "subsumed") && is_word(j + 2, "by") {
            merged.push(Spanned {
                tok: Tok::Subsumed,
                col: out[j].col,
            });
            j += 3;
        } else {
            merged.push(out[j].clone());
            j += 1;
        }
    }
    Ok(merged)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|s| s.col).unwrap_or(self.end_col)
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::Parse {
            line: self.line,
            column: self.col(),
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s != "is" => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn axiom(&mut self) -> Result<Axiom, SyntaxError> {
        // role(a, b)
        if let (Some(Tok::Ident(_)), Some(Tok::LParen)) = (self.peek(), self.peek_at(1)) {
            let mut k = 2;
            let mut depth = 1;
            let mut commas = 0;
            while let Some(t) = self.peek_at(k) {
                match t {
                    Tok::LParen => depth += 1,
                    Tok::RParen => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    Tok::Comma if depth == 1 => commas += 1,
                    _ => {}
                }
                k += 1;
            }
            if commas > 0 || matches!(self.peek_at(2), Some(Tok::RParen)) {
                return self.role_assertion();
            }
        }
        let lhs = self.concept()?;
        match self.peek() {
            Some(Tok::Subsumed) => {
                self.pos += 1;
                let rhs = self.concept()?;
                Ok(Axiom::Subsumption { lhs, rhs })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let ind = self.name("individual name")?;
                if self.peek() == Some(&Tok::Comma) {
                    return Err(SyntaxError::Arity {
                        line: self.line,
                        message: "a concept assertion takes exactly one individual".into(),
                    });
                }
                self.expect(Tok::RParen, "')'")?;
                Ok(Axiom::ConceptAssertion {
                    concept: lhs,
                    individual: sym(&ind),
                })
            }
            None => Err(self.error("expected 'subclassof' or an individual")),
            Some(_) => Err(self.error("unexpected token after concept")),
        }
    }

    fn role_assertion(&mut self) -> Result<Axiom, SyntaxError> {
        let role = self.name("role name")?;
        self.expect(Tok::LParen, "'('")?;
        let mut args = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                args.push(self.name("individual name")?);
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "')'")?;
        if args.len() != 2 {
            return Err(SyntaxError::Arity {
                line: self.line,
                message: format!("role {role} takes 2 individuals, got {}", args.len()),
            });
        }
        Ok(Axiom::RoleAssertion {
            role: sym(&role),
            subject: sym(&args[0]),
            object: sym(&args[1]),
        })
    }

    fn concept(&mut self) -> Result<Concept, SyntaxError> {
        let mut left = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let right = self.conjunction()?;
            left = Concept::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Concept, SyntaxError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let right = self.unary()?;
            left = Concept::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Concept, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Concept::not(self.unary()?))
            }
            Some(Tok::Top) => {
                self.pos += 1;
                Ok(Concept::Top)
            }
            Some(Tok::Bottom) => {
                self.pos += 1;
                Ok(Concept::Bottom)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let c = self.concept()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(c)
            }
            Some(Tok::Some) | Some(Tok::Only) => {
                let q = self.bump().unwrap();
                let role = self.name("role name")?;
                let filler = self.filler()?;
                Ok(match q {
                    Tok::Some => Concept::Exists(sym(&role), Box::new(filler)),
                    _ => Concept::Forall(sym(&role), Box::new(filler)),
                })
            }
            Some(Tok::Cmp(bound)) => {
                self.pos += 1;
                let n = match self.bump() {
                    Some(Tok::Number(n)) => n,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("expected a number"));
                    }
                };
                let role = self.name("role name")?;
                let filler = self.filler()?;
                restriction(bound, n, &role, filler).ok_or_else(|| self.error("'> n'/'< n' needs a representable bound"))
            }
            Some(Tok::Ident(name)) if name != "is" => {
                self.pos += 1;
                Ok(Concept::Atomic(sym(&name)))
            }
            _ => Err(self.error("expected a concept")),
        }
    }

    fn filler(&mut self) -> Result<Concept, SyntaxError> {
        if self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
        } else if self.peek() != Some(&Tok::LParen) {
            return Err(self.error("expected '.' after role name"));
        }
        self.unary()
    }
}

fn restriction(bound: Bound, n: u32, role: &str, filler: Concept) -> Option<Concept> {
    let role = sym(role);
    let f = Box::new(filler);
    Some(match bound {
        Bound::Ge => Concept::AtLeast(Cardinality::new(n), role, f),
        Bound::Le => Concept::AtMost(Cardinality::new(n), role, f),
        Bound::Gt => Concept::AtLeast(Cardinality::strict(n + 1), role, f),
        Bound::Lt => {
            if n == 0 {
                return None;
            }
            Concept::AtMost(Cardinality::strict(n - 1), role, f)
        }
        Bound::Eq => Concept::and(
            Concept::AtLeast(Cardinality::new(n), role.clone(), f.clone()),
            Concept::AtMost(Cardinality::new(n), role, f),
        ),
    })
}

fn check_nesting(ax: &Axiom, line: usize) -> Result<(), SyntaxError> {
    let depth = ax.quantifier_depth();
    if depth > MAX_QUANTIFIER_NESTING {
        return Err(SyntaxError::NestingLimit { line, depth });
    }
    Ok(())
}

/// Parses one axiom written on `line` (1-based, used for error positions).
pub fn parse_axiom_at(text: &str, line: usize) -> Result<Axiom, SyntaxError> {
    let toks = tokenize(text, line)?;
    let end_col = text.chars().count() + 1;
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        end_col,
    };
    if p.at_end() {
        return Err(p.error("empty axiom"));
    }
    let ax = p.axiom()?;
    if !p.at_end() {
        return Err(p.error("trailing input"));
    }
    check_nesting(&ax, line)?;
    Ok(ax)
}

pub fn parse_axiom(text: &str) -> Result<Axiom, SyntaxError> {
    parse_axiom_at(text, 1)
}

/// Parses a standalone concept expression.
pub fn parse_concept(text: &str) -> Result<Concept, SyntaxError> {
    let toks = tokenize(text, 1)?;
    let mut p = Parser {
        toks,
        pos: 0,
        line: 1,
        end_col: text.chars().count() + 1,
    };
    let c = p.concept()?;
    if !p.at_end() {
        return Err(p.error("trailing input"));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_kb_dialect() {
        let ax = parse_axiom("(forall admires . bottom)(Anne)").unwrap();
        assert_eq!(ax, Axiom::assertion(Concept::forall("admires", Concept::Bottom), "Anne"));
        let ax = parse_axiom("top subclassof forall likes . (Quiet)").unwrap();
        assert_eq!(
            ax,
            Axiom::subsumption(Concept::Top, Concept::forall("likes", Concept::atom("Quiet")))
        );
        let ax = parse_axiom("likes(Anne, Bob)").unwrap();
        assert_eq!(ax, Axiom::role("likes", "Anne", "Bob"));
    }

    #[test]
    fn reads_grammar_tokens() {
        let ax = parse_axiom("+ ⊤ ⊑ ∀ likes . ( + Nice )").unwrap();
        assert_eq!(ax, Axiom::subsumption(Concept::Top, Concept::forall("likes", Concept::atom("Nice"))));
        let c = parse_concept("∀ admires ( + ⊥ )").unwrap();
        assert_eq!(c, Concept::forall("admires", Concept::Bottom));
        let c = parse_concept("> 2 likes . ( + ⊤ )").unwrap();
        assert_eq!(c, Concept::AtLeast(Cardinality::strict(3), sym("likes"), Box::new(Concept::Top)));
    }

    #[test]
    fn reads_hard_symbolic() {
        let ax = parse_axiom("( < 1 R8 . ( ( + C2 ) or ( not C8 ) ) ) ( a4 )").unwrap();
        let expected = Axiom::assertion(
            Concept::AtMost(
                Cardinality::strict(0),
                sym("R8"),
                Box::new(Concept::or(Concept::atom("C2"), Concept::not(Concept::atom("C8")))),
            ),
            "a4",
        );
        assert_eq!(ax, expected);
        let ax = parse_axiom("not C2 is subsumed by exists R6 . ( ( + C1 ) and ( < 1 R7 . ( + C3 ) ) )").unwrap();
        assert!(ax.is_rule());
    }

    #[test]
    fn precedence_and_binding() {
        let c = parse_concept("A or B and C").unwrap();
        assert_eq!(
            c,
            Concept::or(Concept::atom("A"), Concept::and(Concept::atom("B"), Concept::atom("C")))
        );
        let c = parse_concept("some r . A and B").unwrap();
        assert_eq!(c, Concept::and(Concept::exists("r", Concept::atom("A")), Concept::atom("B")));
    }

    #[test]
    fn equality_desugars() {
        let c = parse_concept("exactly 2 likes . top").unwrap();
        assert_eq!(
            c,
            Concept::and(Concept::at_least(2, "likes", Concept::Top), Concept::at_most(2, "likes", Concept::Top))
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse_axiom_at("Red subclassof", 4) {
            Err(SyntaxError::Parse { line, column, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(column, 15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_axiom("likes()"), Err(SyntaxError::Arity { .. })));
        assert!(matches!(parse_axiom("likes(Anne, Bob, Carl)"), Err(SyntaxError::Arity { .. })));
        assert!(matches!(
            parse_axiom("(some r . some r . some r . A)(a)"),
            Err(SyntaxError::NestingLimit { depth: 3, .. })
        ));
        assert!(parse_axiom("(lessthan 0 r . A)(a)").is_err());
    }
}
