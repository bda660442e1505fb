//! Grammar files: one production list per level.
//!
//! ```text
//! Head -> Sym 'terminal' [0.6] @label | Other
//!       | continued alternatives
//! ```
//!
//! Alternatives without `[p]` split whatever mass the explicit ones leave.

use std::collections::BTreeMap;
use std::fmt;

use super::{PcfgError, Result};
use crate::syntax::Level;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GSymbol {
    Terminal(String),
    Nonterminal(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub head: String,
    pub body: Vec<GSymbol>,
    pub probability: f64,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    pub level: Level,
    productions: Vec<Production>,
    by_head: BTreeMap<String, Vec<usize>>,
}

const SOURCES: [&str; 4] = [
    include_str!("../../data/grammar/l0.pcfg"),
    include_str!("../../data/grammar/l1.pcfg"),
    include_str!("../../data/grammar/l2.pcfg"),
    include_str!("../../data/grammar/l3.pcfg"),
];

/// Heads bound to the per-KB vocabulary when one is active.
pub const LEXICAL_SLOTS: [&str; 3] = ["ConceptName", "RoleName", "IndividualName"];

const EPS: f64 = 1e-9;

struct Alt {
    body: Vec<GSymbol>,
    probability: Option<f64>,
    label: Option<String>,
}

fn parse_alt(text: &str, line: usize) -> Result<Alt> {
    let err = |m: String| PcfgError::Grammar { line, message: m };
    let mut alt = Alt {
        body: Vec::new(),
        probability: None,
        label: None,
    };
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '\'' {
            chars.next();
            let mut lit = String::new();
            loop {
                match chars.next() {
                    Some((_, '\'')) => break,
                    Some((_, ch)) => lit.push(ch),
                    None => return Err(err(format!("unterminated terminal at byte {i}"))),
                }
            }
            if lit.is_empty() {
                return Err(err("empty terminal".into()));
            }
            alt.body.push(GSymbol::Terminal(lit));
        } else if c == '[' {
            chars.next();
            let mut num = String::new();
            loop {
                match chars.next() {
                    Some((_, ']')) => break,
                    Some((_, ch)) => num.push(ch),
                    None => return Err(err("unterminated probability".into())),
                }
            }
            let p: f64 = num.trim().parse().map_err(|_| err(format!("bad probability {num:?}")))?;
            if !(0.0..=1.0).contains(&p) || alt.probability.replace(p).is_some() {
                return Err(err(format!("bad probability {num:?}")));
            }
        } else if c == '@' {
            chars.next();
            let mut label = String::new();
            while let Some(&(_, ch)) = chars.peek() {
                if ch.is_alphanumeric() || ch == '_' {
                    label.push(ch);
                    chars.next();
                } else {
                    break;
                }
            }
            if label.is_empty() || alt.label.replace(label).is_some() {
                return Err(err("bad label".into()));
            }
        } else if c.is_alphabetic() {
            let mut name = String::new();
            while let Some(&(_, ch)) = chars.peek() {
                if ch.is_alphanumeric() || ch == '_' {
                    name.push(ch);
                    chars.next();
                } else {
                    break;
                }
            }
            alt.body.push(GSymbol::Nonterminal(name));
        } else {
            return Err(err(format!("unexpected {c:?}")));
        }
    }
    if alt.body.is_empty() {
        return Err(err("empty alternative".into()));
    }
    Ok(alt)
}

/// Splits on `|` outside quotes.
fn split_alts(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut quoted = false;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '\'' => quoted = !quoted,
            '|' if !quoted => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '\'' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

impl Grammar {
    pub fn parse(text: &str, level: Level) -> Result<Grammar> {
        // Join continuation lines onto their rule.
        let mut rules: Vec<(usize, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('|') {
                match rules.last_mut() {
                    Some((_, r)) => {
                        r.push(' ');
                        r.push_str(line);
                    }
                    None => {
                        return Err(PcfgError::Grammar {
                            line: i + 1,
                            message: "continuation without a rule".into(),
                        })
                    }
                }
            } else {
                rules.push((i + 1, line.to_string()));
            }
        }

        let mut g = Grammar {
            level,
            productions: Vec::new(),
            by_head: BTreeMap::new(),
        };
        for (line, rule) in rules {
            let (head, body) = rule.split_once("->").ok_or_else(|| PcfgError::Grammar {
                line,
                message: "expected 'Head -> ...'".into(),
            })?;
            let head = head.trim().to_string();
            if head.is_empty() || !head.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(PcfgError::Grammar {
                    line,
                    message: format!("bad head {head:?}"),
                });
            }
            if g.by_head.contains_key(&head) {
                return Err(PcfgError::Grammar {
                    line,
                    message: format!("{head} defined twice"),
                });
            }
            let alts = split_alts(body)
                .into_iter()
                .map(|a| parse_alt(a, line))
                .collect::<Result<Vec<_>>>()?;
            let fixed: f64 = alts.iter().filter_map(|a| a.probability).sum();
            let free = alts.iter().filter(|a| a.probability.is_none()).count();
            let share = if free > 0 { (1.0 - fixed) / free as f64 } else { 0.0 };
            if share < -EPS || (free == 0 && (fixed - 1.0).abs() > EPS) || (free > 0 && share <= 0.0) {
                return Err(PcfgError::Probabilities { head, sum: fixed });
            }
            let mut ids = Vec::new();
            for a in alts {
                ids.push(g.productions.len());
                g.productions.push(Production {
                    head: head.clone(),
                    body: a.body,
                    probability: a.probability.unwrap_or(share),
                    label: a.label,
                });
            }
            g.by_head.insert(head, ids);
        }
        for p in &g.productions {
            for s in &p.body {
                if let GSymbol::Nonterminal(n) = s {
                    if !g.by_head.contains_key(n) {
                        return Err(PcfgError::Grammar {
                            line: 0,
                            message: format!("{n} used in {} but never defined", p.head),
                        });
                    }
                }
            }
        }
        Ok(g)
    }

    /// The bundled grammar for a level.
    pub fn builtin(level: Level) -> Grammar {
        Grammar::parse(SOURCES[level.value() as usize], level).expect("bundled grammar parses")
    }

    pub fn source(level: Level) -> &'static str {
        SOURCES[level.value() as usize]
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.by_head.keys().map(String::as_str)
    }

    /// Production indices for `head`, in file order.
    pub fn alternatives(&self, head: &str) -> &[usize] {
        self.by_head.get(head).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn production(&self, i: usize) -> &Production {
        &self.productions[i]
    }

    /// Resolves `Head.label` or `Head.N` (0-based position) to a production.
    pub fn find(&self, key: &str) -> Result<usize> {
        let missing = || PcfgError::UnknownProduction(key.to_string());
        let (head, which) = key.split_once('.').ok_or_else(missing)?;
        let alts = self.by_head.get(head).ok_or_else(missing)?;
        if let Some(&i) = alts
            .iter()
            .find(|&&i| self.productions[i].label.as_deref() == Some(which))
        {
            return Ok(i);
        }
        which
            .parse::<usize>()
            .ok()
            .and_then(|n| alts.get(n).copied())
            .ok_or_else(missing)
    }

    /// Sets one alternative's probability and rescales its siblings so the
    /// head still sums to one.
    pub fn set_probability(&mut self, key: &str, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(PcfgError::Probabilities {
                head: key.to_string(),
                sum: p,
            });
        }
        let target = self.find(key)?;
        let head = self.productions[target].head.clone();
        let siblings: Vec<usize> = self.by_head[&head].iter().copied().filter(|&i| i != target).collect();
        let rest: f64 = siblings.iter().map(|&i| self.productions[i].probability).sum();
        if siblings.is_empty() && (p - 1.0).abs() > EPS {
            return Err(PcfgError::Probabilities { head, sum: p });
        }
        for &i in &siblings {
            let q = &mut self.productions[i].probability;
            *q = if rest > 0.0 {
                *q * (1.0 - p) / rest
            } else {
                (1.0 - p) / siblings.len() as f64
            };
        }
        self.productions[target].probability = p;
        Ok(())
    }

    pub fn with_overrides<'a>(&self, overrides: impl IntoIterator<Item = (&'a String, &'a f64)>) -> Result<Grammar> {
        let mut g = self.clone();
        for (k, p) in overrides {
            g.set_probability(k, *p)?;
        }
        Ok(g)
    }

    pub fn probability(&self, key: &str) -> Result<f64> {
        Ok(self.productions[self.find(key)?].probability)
    }
}

impl fmt::Display for GSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GSymbol::Terminal(t) => write!(f, "'{t}'"),
            GSymbol::Nonterminal(n) => f.write_str(n),
        }
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (head, alts) in &self.by_head {
            write!(f, "{head} ->")?;
            for (k, &i) in alts.iter().enumerate() {
                let p = &self.productions[i];
                if k > 0 {
                    f.write_str(" |")?;
                }
                for s in &p.body {
                    write!(f, " {s}")?;
                }
                write!(f, " [{}]", p.probability)?;
                if let Some(l) = &p.label {
                    write!(f, " @{l}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: u8) -> Level {
        Level::new(n).unwrap()
    }

    #[test]
    fn every_head_sums_to_one() {
        for level in Level::all() {
            let g = Grammar::builtin(level);
            for head in g.nonterminals() {
                let s: f64 = g.alternatives(head).iter().map(|&i| g.production(i).probability).sum();
                assert!((s - 1.0).abs() < EPS, "{head} at {level}: {s}");
            }
        }
    }

    #[test]
    fn level_zero_inclusion_weights() {
        let g = Grammar::builtin(l(0));
        assert_eq!(g.probability("InclusionL0.plain").unwrap(), 0.6);
        assert_eq!(g.probability("InclusionL0.special").unwrap(), 0.4);
        assert!((g.probability("Restriction.forall").unwrap() - 1.0 / 3.0).abs() < EPS);
        assert_eq!(g.probability("Connective.or").unwrap(), 0.5);
        let body: Vec<String> = g.production(g.find("RestrictionD0.none").unwrap()).body.iter().map(|s| s.to_string()).collect();
        assert_eq!(body, ["'∀'", "RoleName", "'('", "'+'", "'⊥'", "')'"]);
        assert_eq!(g.alternatives("ConceptName").len(), 8);
    }

    #[test]
    fn overrides_rescale_siblings() {
        let mut g = Grammar::builtin(l(2));
        g.set_probability("Restriction.forall", 0.7).unwrap();
        assert!((g.probability("Restriction.exists").unwrap() - 0.15).abs() < EPS);
        assert!((g.probability("Restriction.count").unwrap() - 0.15).abs() < EPS);
        g.set_probability("Number.0", 0.5).unwrap();
        assert!((g.probability("Number.2").unwrap() - 0.25).abs() < EPS);
        assert!(matches!(g.set_probability("Nope.x", 0.1), Err(PcfgError::UnknownProduction(_))));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(Grammar::parse("A -> B", l(0)).is_err());
        assert!(Grammar::parse("A -> 'x' [0.7] | 'y' [0.7]", l(0)).is_err());
        assert!(Grammar::parse("A -> 'x\n", l(0)).is_err());
        assert!(Grammar::parse("| 'x'", l(0)).is_err());
        let g = Grammar::parse("A -> 'x' [0.5] | 'y' | 'z' # comment\n", l(0)).unwrap();
        assert_eq!(g.probability("A.1").unwrap(), 0.25);
    }
}
