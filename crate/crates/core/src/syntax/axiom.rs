use super::concept::{level_for, Concept, Level, Symbol};
use super::SyntaxError;

/// A rule (`C ⊑ D`) or a fact (`C(a)`, `R(a, b)`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Subsumption { lhs: Concept, rhs: Concept },
    ConceptAssertion { concept: Concept, individual: Symbol },
    RoleAssertion { role: Symbol, subject: Symbol, object: Symbol },
}

impl Axiom {
    pub fn subsumption(lhs: Concept, rhs: Concept) -> Axiom {
        Axiom::Subsumption { lhs, rhs }
    }

    pub fn assertion(concept: Concept, individual: &str) -> Axiom {
        Axiom::ConceptAssertion {
            concept,
            individual: individual.into(),
        }
    }

    pub fn role(role: &str, subject: &str, object: &str) -> Axiom {
        Axiom::RoleAssertion {
            role: role.into(),
            subject: subject.into(),
            object: object.into(),
        }
    }

    pub fn is_rule(&self) -> bool {
        matches!(self, Axiom::Subsumption { .. })
    }

    pub fn is_fact(&self) -> bool {
        !self.is_rule()
    }

    /// Concept expressions occurring at the top of this axiom.
    pub fn sides(&self) -> Vec<&Concept> {
        match self {
            Axiom::Subsumption { lhs, rhs } => vec![lhs, rhs],
            Axiom::ConceptAssertion { concept, .. } => vec![concept],
            Axiom::RoleAssertion { .. } => vec![],
        }
    }

    /// Identity key: NNF of every side with surface annotations dropped.
    pub fn canonical(&self) -> Axiom {
        match self {
            Axiom::Subsumption { lhs, rhs } => Axiom::Subsumption {
                lhs: lhs.canonical(),
                rhs: rhs.canonical(),
            },
            Axiom::ConceptAssertion {
                concept,
                individual,
            } => Axiom::ConceptAssertion {
                concept: concept.canonical(),
                individual: individual.clone(),
            },
            Axiom::RoleAssertion { .. } => self.clone(),
        }
    }

    /// Connective and quantifier totals over both sides.
    pub fn complexity_profile(&self) -> (usize, usize) {
        self.sides().iter().fold((0, 0), |(b, q), c| {
            (b + c.boolean_count(), q + c.quantifier_count())
        })
    }

    pub fn quantifier_depth(&self) -> usize {
        self.sides()
            .iter()
            .map(|c| c.quantifier_depth())
            .max()
            .unwrap_or(0)
    }

    /// Level of the axiom. Subsumptions must use a side pair listed in
    /// [`LevelPair::is_legal_at`] for some KB level.
    pub fn level(&self) -> Result<Level, SyntaxError> {
        match self {
            Axiom::Subsumption { lhs, rhs } => {
                let pair = LevelPair {
                    lhs: lhs.linguistic_level()?,
                    rhs: rhs.linguistic_level()?,
                };
                if !pair.is_legal_at(Level::MAX) {
                    return Err(SyntaxError::IllegalLevelPair {
                        lhs: pair.lhs.value(),
                        rhs: pair.rhs.value(),
                    });
                }
                Ok(pair.lhs.max(pair.rhs))
            }
            Axiom::ConceptAssertion { concept, .. } => concept.linguistic_level(),
            Axiom::RoleAssertion { .. } => level_for(0, 0),
        }
    }

    /// The level pair of a subsumption, `None` for facts.
    pub fn level_pair(&self) -> Result<Option<LevelPair>, SyntaxError> {
        match self {
            Axiom::Subsumption { lhs, rhs } => Ok(Some(LevelPair {
                lhs: lhs.linguistic_level()?,
                rhs: rhs.linguistic_level()?,
            })),
            _ => Ok(None),
        }
    }

    pub fn concept_names(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for side in self.sides() {
            side.concept_names(&mut out);
        }
        out
    }

    pub fn role_names(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for side in self.sides() {
            side.role_names(&mut out);
        }
        if let Axiom::RoleAssertion { role, .. } = self {
            if !out.contains(role) {
                out.push(role.clone());
            }
        }
        out
    }

    pub fn individuals(&self) -> Vec<Symbol> {
        match self {
            Axiom::Subsumption { .. } => vec![],
            Axiom::ConceptAssertion { individual, .. } => vec![individual.clone()],
            Axiom::RoleAssertion {
                subject, object, ..
            } => {
                if subject == object {
                    vec![subject.clone()]
                } else {
                    vec![subject.clone(), object.clone()]
                }
            }
        }
    }

    /// Concept names, role names and individuals together.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = self.concept_names();
        out.extend(self.role_names().into_iter().map(|r| format!("role:{r}").into()));
        out.extend(self.individuals().into_iter().map(|i| format!("ind:{i}").into()));
        out
    }
}

/// Negates a concept assertion: `C(a)` becomes `nnf(¬C)(a)`.
pub fn negate_axiom(ax: &Axiom) -> Result<Axiom, SyntaxError> {
    match ax {
        Axiom::ConceptAssertion {
            concept,
            individual,
        } => Ok(Axiom::ConceptAssertion {
            concept: Concept::not(concept.clone()).nnf(),
            individual: individual.clone(),
        }),
        Axiom::RoleAssertion { .. } => Err(SyntaxError::UnsupportedNegation("role assertion")),
        Axiom::Subsumption { .. } => Err(SyntaxError::UnsupportedNegation("subsumption")),
    }
}

/// Levels of the two sides of a subsumption.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelPair {
    pub lhs: Level,
    pub rhs: Level,
}

impl LevelPair {
    /// Pairs introduced by a KB of exactly `level`.
    pub fn introduced_at(level: Level) -> &'static [(u8, u8)] {
        match level.value() {
            0 => &[(0, 0)],
            1 => &[(0, 1), (1, 0), (1, 1)],
            2 => &[(0, 2), (2, 0), (1, 2), (2, 1)],
            _ => &[(0, 3), (1, 3), (2, 3), (3, 0), (3, 1), (3, 2)],
        }
    }

    /// Whether a KB of `kb_level` may contain an axiom of this pair. A KB
    /// also contains the simpler pairs of every lower level.
    pub fn is_legal_at(&self, kb_level: Level) -> bool {
        Level::all()
            .filter(|l| *l <= kb_level)
            .any(|l| {
                LevelPair::introduced_at(l)
                    .iter()
                    .any(|&(a, b)| a == self.lhs.value() && b == self.rhs.value())
            })
    }
}
