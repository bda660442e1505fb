//! ALCQ abstract syntax, normal forms, complexity levels and the KB text codec.

mod axiom;
mod concept;
mod kb;
pub mod reader;
mod text;

pub use axiom::{negate_axiom, Axiom, LevelPair};
pub use concept::{sym, Cardinality, Concept, Level, Symbol, MAX_ATOMS_PER_SIDE, MAX_QUANTIFIER_NESTING};
pub use kb::{KnowledgeBase, Signature};
pub use reader::{parse_axiom, parse_concept};
pub use text::{axiom_to_line, concept_to_line, parse_axioms, parse_kb, serialize_kb};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyntaxError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: quantifier nesting {depth} exceeds the limit of 2")]
    NestingLimit { line: usize, depth: usize },
    #[error("line {line}: {message}")]
    Arity { line: usize, message: String },
    #[error("expression with {booleans} connectives and {quantifiers} quantifiers exceeds level 3")]
    LevelOverflow { booleans: usize, quantifiers: usize },
    #[error("level pair {lhs} ⊑ {rhs} is not allowed at any KB level")]
    IllegalLevelPair { lhs: u8, rhs: u8 },
    #[error("cannot negate a {0} in ALCQ")]
    UnsupportedNegation(&'static str),
    #[error("duplicate axiom: {0}")]
    DuplicateAxiom(String),
}
