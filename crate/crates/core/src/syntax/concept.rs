use std::fmt;
use std::sync::Arc;

use super::SyntaxError;

/// Interned-ish name of a concept, role or individual.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// Maximum nesting of quantifiers inside a single concept expression.
pub const MAX_QUANTIFIER_NESTING: usize = 2;
/// Maximum number of atomic concept occurrences on one side of a rule.
pub const MAX_ATOMS_PER_SIDE: usize = 7;

/// Cardinality of a qualified number restriction.
///
/// `strict` records that the surface form used `>`/`<`: `> n` is stored as
/// `AtLeast(n + 1)` and `< n` as `AtMost(n - 1)`. The flag only affects
/// rendering; [`Concept::canonical`] drops it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cardinality {
    pub n: u32,
    pub strict: bool,
}

impl Cardinality {
    pub fn new(n: u32) -> Self {
        Cardinality { n, strict: false }
    }

    pub fn strict(n: u32) -> Self {
        Cardinality { n, strict: true }
    }
}

/// An ALCQ concept expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Atomic(Symbol),
    Top,
    Bottom,
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(Symbol, Box<Concept>),
    Forall(Symbol, Box<Concept>),
    AtLeast(Cardinality, Symbol, Box<Concept>),
    AtMost(Cardinality, Symbol, Box<Concept>),
}

/// Linguistic complexity level, 0 through 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(u8);

impl Level {
    pub const MAX: Level = Level(3);

    pub fn new(value: u8) -> Result<Self, SyntaxError> {
        if value <= 3 {
            Ok(Level(value))
        } else {
            Err(SyntaxError::LevelOverflow {
                booleans: value as usize,
                quantifiers: 0,
            })
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Level> {
        (0..=3).map(Level)
    }
}

impl serde::Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.0)
    }
}

impl<'de> serde::Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Level::new(v).map_err(|_| serde::de::Error::custom(format!("level {v} is not in 0..=3")))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Concept {
    pub fn atom(name: &str) -> Concept {
        Concept::Atomic(sym(name))
    }

    pub fn not(c: Concept) -> Concept {
        Concept::Not(Box::new(c))
    }

    pub fn and(l: Concept, r: Concept) -> Concept {
        Concept::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Concept, r: Concept) -> Concept {
        Concept::Or(Box::new(l), Box::new(r))
    }

    pub fn exists(role: &str, c: Concept) -> Concept {
        Concept::Exists(sym(role), Box::new(c))
    }

    pub fn forall(role: &str, c: Concept) -> Concept {
        Concept::Forall(sym(role), Box::new(c))
    }

    pub fn at_least(n: u32, role: &str, c: Concept) -> Concept {
        Concept::AtLeast(Cardinality::new(n), sym(role), Box::new(c))
    }

    pub fn at_most(n: u32, role: &str, c: Concept) -> Concept {
        Concept::AtMost(Cardinality::new(n), sym(role), Box::new(c))
    }

    /// Right-nested conjunction of `items`; `Top` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Concept>) -> Concept {
        let mut items: Vec<Concept> = items.into_iter().collect();
        match items.len() {
            0 => Concept::Top,
            _ => {
                let mut acc = items.pop().unwrap();
                while let Some(c) = items.pop() {
                    acc = Concept::and(c, acc);
                }
                acc
            }
        }
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => true,
            Concept::Not(inner) => matches!(**inner, Concept::Atomic(_)),
            _ => false,
        }
    }

    pub fn is_quantifier(&self) -> bool {
        matches!(
            self,
            Concept::Exists(..) | Concept::Forall(..) | Concept::AtLeast(..) | Concept::AtMost(..)
        )
    }

    /// Direct children of this node.
    pub fn children(&self) -> Vec<&Concept> {
        match self {
            Concept::Atomic(_) | Concept::Top | Concept::Bottom => vec![],
            Concept::Not(c)
            | Concept::Exists(_, c)
            | Concept::Forall(_, c)
            | Concept::AtLeast(_, _, c)
            | Concept::AtMost(_, _, c) => vec![c],
            Concept::And(l, r) | Concept::Or(l, r) => vec![l, r],
        }
    }

    /// All sub-expressions including `self`, pre-order.
    pub fn subconcepts(&self) -> Vec<&Concept> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let node = out[i];
            out.extend(node.children());
            i += 1;
        }
        out
    }

    /// Negation normal form: `Not` only directly above atomic concepts.
    pub fn nnf(&self) -> Concept {
        self.nnf_with(true)
    }

    fn nnf_with(&self, positive: bool) -> Concept {
        use Concept::*;
        match (self, positive) {
            (Atomic(_), true) => self.clone(),
            (Atomic(_), false) => Not(Box::new(self.clone())),
            (Top, true) | (Bottom, false) => Top,
            (Top, false) | (Bottom, true) => Bottom,
            (Not(c), _) => c.nnf_with(!positive),
            (And(l, r), true) => Concept::and(l.nnf_with(true), r.nnf_with(true)),
            (And(l, r), false) => Concept::or(l.nnf_with(false), r.nnf_with(false)),
            (Or(l, r), true) => Concept::or(l.nnf_with(true), r.nnf_with(true)),
            (Or(l, r), false) => Concept::and(l.nnf_with(false), r.nnf_with(false)),
            (Exists(role, c), true) => Exists(role.clone(), Box::new(c.nnf_with(true))),
            (Exists(role, c), false) => Forall(role.clone(), Box::new(c.nnf_with(false))),
            (Forall(role, c), true) => Forall(role.clone(), Box::new(c.nnf_with(true))),
            (Forall(role, c), false) => Exists(role.clone(), Box::new(c.nnf_with(false))),
            (AtLeast(k, role, c), true) => AtLeast(*k, role.clone(), Box::new(c.nnf_with(true))),
            (AtMost(k, role, c), true) => AtMost(*k, role.clone(), Box::new(c.nnf_with(true))),
            (AtLeast(k, role, c), false) => {
                let filler = Box::new(c.nnf_with(true));
                if k.n == 0 {
                    Bottom
                } else {
                    // ¬(≥n R.C) = ≤(n-1) R.C; a strict "> m" surface flips to "< m+1".
                    AtMost(
                        Cardinality {
                            n: k.n - 1,
                            strict: k.strict,
                        },
                        role.clone(),
                        filler,
                    )
                }
            }
            (AtMost(k, role, c), false) => AtLeast(
                Cardinality {
                    n: k.n + 1,
                    strict: k.strict,
                },
                role.clone(),
                Box::new(c.nnf_with(true)),
            ),
        }
    }

    /// NNF with surface annotations removed; used for structural identity.
    pub fn canonical(&self) -> Concept {
        self.nnf().strip_surface()
    }

    fn strip_surface(&self) -> Concept {
        use Concept::*;
        match self {
            Atomic(_) | Top | Bottom => self.clone(),
            Not(c) => Not(Box::new(c.strip_surface())),
            And(l, r) => Concept::and(l.strip_surface(), r.strip_surface()),
            Or(l, r) => Concept::or(l.strip_surface(), r.strip_surface()),
            Exists(role, c) => Exists(role.clone(), Box::new(c.strip_surface())),
            Forall(role, c) => Forall(role.clone(), Box::new(c.strip_surface())),
            AtLeast(k, role, c) => AtLeast(Cardinality::new(k.n), role.clone(), Box::new(c.strip_surface())),
            AtMost(k, role, c) => AtMost(Cardinality::new(k.n), role.clone(), Box::new(c.strip_surface())),
        }
    }

    /// Number of `⊓`/`⊔` nodes. Negation is not counted.
    pub fn boolean_count(&self) -> usize {
        self.subconcepts()
            .into_iter()
            .filter(|c| matches!(c, Concept::And(..) | Concept::Or(..)))
            .count()
    }

    /// Number of `∃`/`∀`/`≥`/`≤` nodes.
    pub fn quantifier_count(&self) -> usize {
        self.subconcepts()
            .into_iter()
            .filter(|c| c.is_quantifier())
            .count()
    }

    /// Deepest chain of nested quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        let below = self
            .children()
            .into_iter()
            .map(Concept::quantifier_depth)
            .max()
            .unwrap_or(0);
        below + usize::from(self.is_quantifier())
    }

    /// Number of atomic concept occurrences.
    pub fn atom_occurrences(&self) -> usize {
        self.subconcepts()
            .into_iter()
            .filter(|c| matches!(c, Concept::Atomic(_)))
            .count()
    }

    /// Smallest level `L` with `booleans <= L` and `quantifiers <= L + 1`.
    pub fn linguistic_level(&self) -> Result<Level, SyntaxError> {
        level_for(self.boolean_count(), self.quantifier_count())
    }

    pub fn concept_names(&self, out: &mut Vec<Symbol>) {
        for c in self.subconcepts() {
            if let Concept::Atomic(name) = c {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        }
    }

    pub fn role_names(&self, out: &mut Vec<Symbol>) {
        for c in self.subconcepts() {
            match c {
                Concept::Exists(r, _)
                | Concept::Forall(r, _)
                | Concept::AtLeast(_, r, _)
                | Concept::AtMost(_, r, _) => {
                    if !out.contains(r) {
                        out.push(r.clone());
                    }
                }
                _ => {}
            }
        }
    }
}

pub(crate) fn level_for(booleans: usize, quantifiers: usize) -> Result<Level, SyntaxError> {
    let needed = booleans.max(quantifiers.saturating_sub(1));
    if needed > 3 {
        Err(SyntaxError::LevelOverflow {
            booleans,
            quantifiers,
        })
    } else {
        Ok(Level(needed as u8))
    }
}
