//! Leftmost derivations from a grammar, and the admissibility filters
//! applied to sampled concepts and axioms.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::grammar::LEXICAL_SLOTS;
use super::{GSymbol, GenConfig, Grammar, PcfgError, Pool, Range, Result};
use crate::syntax::{
    parse_axiom, parse_concept, Axiom, Concept, KnowledgeBase, Level, Symbol, MAX_ATOMS_PER_SIDE,
    MAX_QUANTIFIER_NESTING,
};

/// Expansions allowed in a single derivation.
pub const MAX_EXPANSIONS: usize = 10_000;
/// Samples drawn before giving up on an admissible one.
pub const MAX_ATTEMPTS: usize = 1_000;

/// Mixes a root seed with stream coordinates (pool, level, index, ...).
pub fn derive_seed(root: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts.iter().fold(splitmix(root), |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// The names a KB may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    /// KB symbols, e.g. "Red".
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
    pub individuals: Vec<String>,
}

fn pick<R: Rng>(items: &[String], size: Range, rng: &mut R) -> Vec<String> {
    let hi = size.max.min(items.len());
    let lo = size.min.min(hi);
    let k = rng.gen_range(lo..=hi);
    let mut chosen: Vec<usize> = (0..items.len()).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
    chosen.sort_unstable();
    chosen.into_iter().map(|i| items[i].clone()).collect()
}

impl Vocabulary {
    pub fn full(pool: &Pool) -> Vocabulary {
        Vocabulary {
            concepts: pool.concept_symbols(),
            roles: pool.roles.clone(),
            individuals: pool.individuals.clone(),
        }
    }

    /// Equiprobable subsets of the pool, sized per `cfg`. Kept in pool order.
    pub fn sample<R: Rng>(pool: &Pool, cfg: &GenConfig, rng: &mut R) -> Vocabulary {
        Vocabulary {
            concepts: pick(&pool.concept_symbols(), cfg.concepts_per_kb, rng),
            roles: pick(&pool.roles, cfg.roles_per_kb, rng),
            individuals: pick(&pool.individuals, cfg.individuals_per_kb, rng),
        }
    }

    fn slot(&self, head: &str) -> Option<&[String]> {
        match head {
            "ConceptName" => Some(&self.concepts),
            "RoleName" => Some(&self.roles),
            "IndividualName" => Some(&self.individuals),
            _ => None,
        }
    }
}

/// The productions chosen by one derivation, and the terminals it produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Derivation {
    /// Production indices, in expansion order. Vocabulary-bound slots are
    /// not grammar choices and do not appear here.
    pub choices: Vec<usize>,
    pub tokens: Vec<String>,
}

impl Derivation {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

pub struct Sampler<'g> {
    grammar: &'g Grammar,
    vocab: Option<Vocabulary>,
    chain_bias: f64,
}

/// Structural limits on a sampled axiom at `level`.
pub fn admissible(ax: &Axiom, level: Level) -> bool {
    if ax.quantifier_depth() > MAX_QUANTIFIER_NESTING {
        return false;
    }
    if ax.sides().iter().any(|s| s.atom_occurrences() > MAX_ATOMS_PER_SIDE) {
        return false;
    }
    match ax.level_pair() {
        Ok(Some(pair)) => pair.is_legal_at(level),
        Ok(None) => ax.level().is_ok_and(|l| l <= level),
        Err(_) => false,
    }
}

fn concept_admissible(c: &Concept, level: Level) -> bool {
    c.quantifier_depth() <= MAX_QUANTIFIER_NESTING
        && c.atom_occurrences() <= MAX_ATOMS_PER_SIDE
        && c.linguistic_level().is_ok_and(|l| l <= level)
}

/// Whether a rule's LHS is anchored in the facts or rule RHSs of `kb`:
/// it mentions one of their concept names, or, when it names no concept,
/// one of their roles. `⊤` on the left is always anchored.
pub fn anchored(rule: &Axiom, kb: &KnowledgeBase) -> bool {
    anchored_in(rule, kb.axioms())
}

fn anchored_in(rule: &Axiom, axioms: &[Axiom]) -> bool {
    let Axiom::Subsumption { lhs, .. } = rule else {
        return true;
    };
    if lhs.canonical() == Concept::Top {
        return true;
    }
    let mut concepts: HashSet<Symbol> = HashSet::new();
    let mut roles: HashSet<Symbol> = HashSet::new();
    for ax in axioms {
        match ax {
            Axiom::Subsumption { rhs, .. } => {
                let mut c = Vec::new();
                rhs.concept_names(&mut c);
                concepts.extend(c);
                let mut r = Vec::new();
                rhs.role_names(&mut r);
                roles.extend(r);
            }
            fact => {
                concepts.extend(fact.concept_names());
                roles.extend(fact.role_names());
            }
        }
    }
    let mut names = Vec::new();
    lhs.concept_names(&mut names);
    if !names.is_empty() {
        return names.iter().any(|n| concepts.contains(n));
    }
    let mut used = Vec::new();
    lhs.role_names(&mut used);
    used.iter().any(|r| roles.contains(r))
}

impl<'g> Sampler<'g> {
    pub fn new(grammar: &'g Grammar, vocab: Vocabulary) -> Self {
        Sampler {
            grammar,
            vocab: Some(vocab),
            chain_bias: 0.0,
        }
    }

    /// Uses the grammar's own lexical alternatives.
    pub fn unbound(grammar: &'g Grammar) -> Self {
        Sampler {
            grammar,
            vocab: None,
            chain_bias: 0.0,
        }
    }

    /// Probability that a new rule must be anchored in the most recently
    /// added axiom rather than anywhere in the KB.
    pub fn with_chain_bias(mut self, p: f64) -> Self {
        self.chain_bias = p;
        self
    }

    pub fn grammar(&self) -> &Grammar {
        self.grammar
    }

    pub fn level(&self) -> Level {
        self.grammar.level
    }

    fn choose<R: Rng>(&self, head: &str, rng: &mut R) -> Result<usize> {
        let alts = self.grammar.alternatives(head);
        if alts.is_empty() {
            return Err(PcfgError::UnknownProduction(head.to_string()));
        }
        let mut r: f64 = rng.gen();
        for &i in alts {
            r -= self.grammar.production(i).probability;
            if r < 0.0 {
                return Ok(i);
            }
        }
        Ok(*alts.iter().rev().find(|&&i| self.grammar.production(i).probability > 0.0).unwrap_or(&alts[0]))
    }

    /// Leftmost derivation from `start`.
    pub fn expand<R: Rng>(&self, start: &str, rng: &mut R) -> Result<Derivation> {
        let mut d = Derivation::default();
        let mut stack = vec![GSymbol::Nonterminal(start.to_string())];
        let mut steps = 0;
        while let Some(sym) = stack.pop() {
            let head = match sym {
                GSymbol::Terminal(t) => {
                    d.tokens.push(t);
                    continue;
                }
                GSymbol::Nonterminal(h) => h,
            };
            steps += 1;
            if steps > MAX_EXPANSIONS {
                return Err(PcfgError::DepthRunaway(MAX_EXPANSIONS));
            }
            if let Some(words) = self.vocab.as_ref().and_then(|v| v.slot(&head)) {
                let w = words
                    .choose(rng)
                    .ok_or_else(|| PcfgError::UnknownProduction(format!("{head} (empty vocabulary)")))?;
                d.tokens.push(w.clone());
                continue;
            }
            let i = self.choose(&head, rng)?;
            d.choices.push(i);
            let p = self.grammar.production(i);
            if head == LEXICAL_SLOTS[0] {
                // Grammar words are spoken forms; KB symbols are capitalized.
                if let [GSymbol::Terminal(t)] = p.body.as_slice() {
                    d.tokens.push(Pool::concept_symbol(t));
                    continue;
                }
            }
            stack.extend(p.body.iter().rev().cloned());
        }
        Ok(d)
    }

    /// An admissible concept from the `Concept` nonterminal.
    pub fn concept<R: Rng>(&self, rng: &mut R) -> Result<(Concept, Derivation)> {
        for _ in 0..MAX_ATTEMPTS {
            let d = self.expand("Concept", rng)?;
            if let Ok(c) = parse_concept(&d.text()) {
                if concept_admissible(&c, self.level()) {
                    return Ok((c, d));
                }
            }
        }
        Err(PcfgError::ExhaustedAttempts(MAX_ATTEMPTS))
    }

    /// An admissible axiom derived from `start`.
    pub fn axiom_from<R: Rng>(&self, start: &str, rng: &mut R) -> Result<(Axiom, Derivation)> {
        for _ in 0..MAX_ATTEMPTS {
            let d = self.expand(start, rng)?;
            if let Ok(ax) = parse_axiom(&d.text()) {
                if admissible(&ax, self.level()) {
                    return Ok((ax, d));
                }
            }
        }
        Err(PcfgError::ExhaustedAttempts(MAX_ATTEMPTS))
    }

    pub fn fact<R: Rng>(&self, rng: &mut R) -> Result<Axiom> {
        Ok(self.axiom_from("ABoxAssertion", rng)?.0)
    }

    pub fn rule<R: Rng>(&self, rng: &mut R) -> Result<Axiom> {
        Ok(self.axiom_from("TBoxAxiom", rng)?.0)
    }

    /// A fact or a rule, with even odds.
    pub fn statement<R: Rng>(&self, rng: &mut R) -> Result<Axiom> {
        if rng.gen_bool(0.5) {
            self.fact(rng)
        } else {
            self.rule(rng)
        }
    }

    /// A statement of the same kind as `like`.
    pub fn statement_like<R: Rng>(&self, like: &Axiom, rng: &mut R) -> Result<Axiom> {
        let start = match like {
            Axiom::Subsumption { .. } => "TBoxAxiom",
            Axiom::ConceptAssertion { .. } => "ConceptAssertion",
            Axiom::RoleAssertion { .. } => "RoleAssertion",
        };
        Ok(self.axiom_from(start, rng)?.0)
    }

    /// The next axiom for a KB under construction. With no facts yet this
    /// is a concept assertion; otherwise a new rule whose LHS is anchored
    /// in `kb`.
    pub fn axiom<R: Rng>(&self, rng: &mut R, kb: &KnowledgeBase) -> Result<Axiom> {
        if kb.fact_count() == 0 {
            return Ok(self.axiom_from("ConceptAssertion", rng)?.0);
        }
        let last = kb.axioms().len() - 1;
        let recent = &kb.axioms()[last..];
        let chained = self.chain_bias > 0.0 && rng.gen_bool(self.chain_bias.min(1.0));
        for attempt in 0..MAX_ATTEMPTS {
            let ax = self.rule(rng)?;
            if let Axiom::Subsumption { lhs, rhs } = &ax {
                if lhs.canonical() == rhs.canonical() {
                    continue;
                }
            }
            // fall back to plain anchoring if the chain cannot be extended
            let strict = chained && attempt < MAX_ATTEMPTS / 2;
            let ok = if strict { anchored_in(&ax, recent) } else { anchored(&ax, kb) };
            if ok && !kb.contains(&ax) {
                return Ok(ax);
            }
        }
        Err(PcfgError::ExhaustedAttempts(MAX_ATTEMPTS))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcfg::pool;
    use crate::pcfg::PoolName;
    use crate::syntax::parse_kb;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vocab() -> Vocabulary {
        Vocabulary {
            concepts: vec!["Red".into(), "Blue".into(), "Kind".into()],
            roles: vec!["likes".into()],
            individuals: vec!["Anne".into(), "Bob".into()],
        }
    }

    #[test]
    fn level_zero_concepts_are_flat() {
        let g = Grammar::builtin(Level::new(0).unwrap());
        let s = Sampler::new(&g, vocab());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut saw_some_top = false;
        for _ in 0..500 {
            let (c, d) = s.concept(&mut rng).unwrap();
            assert_eq!(c.boolean_count(), 0, "{}", d.text());
            assert!(c.quantifier_count() <= 1);
            saw_some_top |= d.text().contains("∃ likes . ( + ⊤ )");
        }
        assert!(saw_some_top);
    }

    #[test]
    fn empty_kb_gets_a_concept_assertion() {
        let g = Grammar::builtin(Level::new(1).unwrap());
        let s = Sampler::new(&g, vocab());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ax = s.axiom(&mut rng, &KnowledgeBase::new("k")).unwrap();
        assert!(matches!(ax, Axiom::ConceptAssertion { .. }));
    }

    #[test]
    fn rules_are_anchored() {
        let kb = parse_kb("Red(Anne)\n").unwrap();
        let g = Grammar::builtin(Level::new(0).unwrap());
        let s = Sampler::new(&g, vocab());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let ax = s.axiom(&mut rng, &kb).unwrap();
            assert!(anchored(&ax, &kb));
        }
        assert!(anchored(&parse_axiom("Red subclassof Blue").unwrap(), &kb));
        assert!(!anchored(&parse_axiom("Kind subclassof Blue").unwrap(), &kb));
        assert!(anchored(&parse_axiom("top subclassof only likes . Kind").unwrap(), &kb));
        assert!(!anchored(&parse_axiom("(some likes . top) subclassof Kind").unwrap(), &kb));
    }

    #[test]
    fn unbound_sampler_uses_grammar_words() {
        let g = Grammar::builtin(Level::new(0).unwrap());
        let s = Sampler::unbound(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let names = Vocabulary::full(&pool(PoolName::B));
        for _ in 0..50 {
            let ax = s.fact(&mut rng).unwrap();
            for c in ax.concept_names() {
                assert!(names.concepts.contains(&c.to_string()), "{c}");
            }
        }
    }

    #[test]
    fn seeds_mix() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(7, &[3]), derive_seed(7, &[3]));
    }
}
