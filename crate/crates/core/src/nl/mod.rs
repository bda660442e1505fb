//! English and symbolic renderings of axioms.
//!
//! Rules and facts become sentences through fixed templates: `⊓`/`⊔` are
//! "and"/"or", `∃` is "someone", `∀` is "only", number restrictions are
//! "at least"/"at most" (or "more than"/"less than" when written with a
//! strict bound), and "that" introduces nested descriptions. Symbolic forms
//! replace pool words with `a_i`/`C_j`/`R_k` names.

mod render;
mod symbolic;

use std::collections::BTreeMap;

use rand::Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::pcfg::PoolKind;
use crate::query::Query;
use crate::reasoner::{Answer, Depth};
use crate::syntax::KnowledgeBase;

pub use render::{axiom_to_text, axiom_to_text_as, concept_to_text, Phrasing};
pub use symbolic::{hard_symbolic, read_hard_symbolic, soft_symbolic, soft_symbolic_inverse, RenamingMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NlError {
    #[error("word {0:?} has no symbol in the renaming map")]
    UnmappedTerm(String),
    #[error("symbol {0:?} is not in the renaming map")]
    UnknownSymbol(String),
    #[error("cannot read hard-symbolic text: {0}")]
    Unreadable(String),
    #[error("lexicon: {0}")]
    Lexicon(String),
}

pub type Result<T> = std::result::Result<T, NlError>;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct KindWords {
    /// Existential object: "someone" or "something".
    pub someone: String,
    /// Head noun for groups: "people" or "things".
    pub plural: String,
    pub everyone: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Noun {
    pub singular: String,
    pub plural: String,
}

/// Function words and inflections used by the templates.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Lexicalization {
    #[serde(skip, default = "people")]
    pub kind: PoolKind,
    pub and: String,
    pub or: String,
    pub not: String,
    pub that: String,
    pub only: String,
    pub none: String,
    pub nothing: String,
    pub at_least: String,
    pub at_most: String,
    pub more_than: String,
    pub less_than: String,
    pub numbers: Vec<String>,
    pub people: KindWords,
    pub things: KindWords,
    /// Third-person role name to base form.
    pub verbs: BTreeMap<String, String>,
    /// Concept symbols spoken as nouns.
    #[serde(default)]
    pub nouns: BTreeMap<String, Noun>,
}

fn people() -> PoolKind {
    PoolKind::People
}

const LEXICON: &str = include_str!("../../data/lexicon.toml");

impl Lexicalization {
    pub fn builtin() -> Lexicalization {
        Lexicalization::parse(LEXICON).expect("bundled lexicon parses")
    }

    pub fn parse(text: &str) -> Result<Lexicalization> {
        toml::from_str(text).map_err(|e| NlError::Lexicon(e.to_string()))
    }

    pub fn with_kind(mut self, kind: PoolKind) -> Lexicalization {
        self.kind = kind;
        self
    }

    pub fn words(&self) -> &KindWords {
        match self.kind {
            PoolKind::People => &self.people,
            PoolKind::Things => &self.things,
        }
    }

    pub fn is_noun(&self, symbol: &str) -> bool {
        self.nouns.contains_key(symbol)
    }

    /// Spoken form of a concept symbol: "Red" becomes "red".
    pub fn adjective(&self, symbol: &str) -> String {
        crate::pcfg::Pool::concept_word(symbol)
    }

    /// Base form of a role verb: "likes" becomes "like". Unlisted verbs
    /// drop a final "s".
    pub fn base_verb(&self, role: &str) -> String {
        if let Some(v) = self.verbs.get(role) {
            return v.clone();
        }
        role.strip_suffix('s').unwrap_or(role).to_string()
    }

    /// Every word the templates can emit on their own.
    pub fn function_words(&self) -> Vec<String> {
        let mut out: Vec<String> = [
            "if", "then", "they", "is", "are", "all", "can", "does", "do", "a", "an",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for phrase in [
            &self.and,
            &self.or,
            &self.not,
            &self.that,
            &self.only,
            &self.none,
            &self.nothing,
            &self.at_least,
            &self.at_most,
            &self.more_than,
            &self.less_than,
        ] {
            out.extend(phrase.split_whitespace().map(str::to_string));
        }
        for w in [&self.people, &self.things] {
            out.extend([w.someone.clone(), w.plural.clone(), w.everyone.clone()]);
        }
        out.extend(self.numbers.iter().cloned());
        out.sort();
        out.dedup();
        out
    }
}

fn is_vowel_sound(word: &str) -> bool {
    word.chars().next().is_some_and(|c| "aeiouAEIOU".contains(c))
}

/// Surface repairs that never touch content words: first letter upper
/// case, a terminal period, "a"/"an" agreement and "people that is".
pub fn fixup_grammar(sentence: &str) -> String {
    let words: Vec<&str> = sentence.split_whitespace().collect();
    let mut out: Vec<String> = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let next = words.get(i + 1).copied().unwrap_or("");
        let fixed = match *w {
            "a" | "A" if is_vowel_sound(next) => if *w == "a" { "an" } else { "An" }.to_string(),
            "an" | "An" if !next.is_empty() && !is_vowel_sound(next) => if *w == "an" { "a" } else { "A" }.to_string(),
            "is" if i >= 2 && words[i - 1] == "that" && matches!(words[i - 2], "people" | "things") => "are".to_string(),
            other => other.to_string(),
        };
        out.push(fixed);
    }
    let mut s = out.join(" ");
    if let Some(first) = s.chars().next() {
        if first.is_lowercase() {
            s = first.to_uppercase().chain(s.chars().skip(1)).collect();
        }
    }
    if !s.is_empty() && !s.ends_with(['.', '?', '!']) {
        s.push('.');
    }
    s
}

/// Rendered context and questions of one KB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleText {
    pub context: Vec<String>,
    pub items: Vec<(String, Answer, Depth)>,
}

/// Renders every KB axiom in order, then each query once.
pub fn example_to_text<R: Rng>(kb: &KnowledgeBase, queries: &[Query], lex: &Lexicalization, rng: &mut R) -> ExampleText {
    let context = kb
        .axioms()
        .iter()
        .map(|ax| fixup_grammar(&axiom_to_text(ax, lex, rng)))
        .collect();
    let items = queries
        .iter()
        .map(|q| (fixup_grammar(&axiom_to_text(&q.axiom, lex, rng)), q.answer, q.depth))
        .collect();
    ExampleText { context, items }
}
