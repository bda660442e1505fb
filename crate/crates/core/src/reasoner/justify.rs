//! Minimal justifications of a monotone test via a hitting-set tree, and an
//! exhaustive search used as a cross-check.

use std::collections::HashSet;

use itertools::Itertools;

use super::{Answer, Justification, Reasoner, ReasonerError, Result};
use crate::syntax::{axiom_to_line, Axiom, KnowledgeBase};

/// Deletion-based shrinking of a set accepted by `test` to a minimal one.
fn shrink<F>(mut set: Vec<usize>, test: &mut F) -> Result<Vec<usize>>
where
    F: FnMut(&[usize]) -> Result<bool>,
{
    let mut i = 0;
    while i < set.len() {
        let mut without = set.clone();
        without.remove(i);
        if test(&without)? {
            set = without;
        } else {
            i += 1;
        }
    }
    Ok(set)
}

/// Every minimal subset of `universe` accepted by the monotone `test`.
/// Returns an empty list when `universe` itself is rejected.
pub(crate) fn all_minimal<F>(universe: &[usize], mut test: F) -> Result<Vec<Vec<usize>>>
where
    F: FnMut(&[usize]) -> Result<bool>,
{
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut closed: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: std::collections::VecDeque<Vec<usize>> = [Vec::new()].into();
    while let Some(path) = queue.pop_front() {
        if closed.iter().any(|c| c.iter().all(|x| path.contains(x))) {
            continue;
        }
        let reuse = found
            .iter()
            .find(|j| j.iter().all(|x| !path.contains(x)))
            .cloned();
        let just = match reuse {
            Some(j) => j,
            None => {
                let rest: Vec<usize> = universe.iter().copied().filter(|x| !path.contains(x)).collect();
                if !test(&rest)? {
                    closed.push(path);
                    continue;
                }
                let j = shrink(rest, &mut test)?;
                found.push(j.clone());
                j
            }
        };
        for &x in &just {
            let mut child = path.clone();
            child.push(x);
            child.sort_unstable();
            if seen.insert(child.clone()) {
                queue.push_back(child);
            }
        }
    }
    Ok(found)
}

/// Minimum justification by trying every subset of the whole KB in order of
/// size. Exponential; meant for checking small cases.
pub fn exhaustive_min_justification(
    reasoner: &Reasoner,
    kb: &KnowledgeBase,
    ax: &Axiom,
) -> Result<Justification> {
    let mut session = reasoner.session(kb)?;
    let q = session.compile(ax)?;
    let answer = session.answer_compiled(q, &(0..kb.len()).collect::<Vec<_>>())?;
    if answer == Answer::Unknown {
        return Err(ReasonerError::NotDerivable);
    }
    for size in 0..=kb.len() {
        let mut hits: Vec<Vec<usize>> = Vec::new();
        for subset in (0..kb.len()).combinations(size) {
            if session.proves(q, &subset, answer)? {
                hits.push(subset);
            }
        }
        let best = hits
            .into_iter()
            .map(|s| {
                let mut lines: Vec<String> = s.iter().map(|&i| axiom_to_line(&kb.axioms()[i])).collect();
                lines.sort();
                (lines, s)
            })
            .min()
            .map(|(_, s)| s);
        if let Some(best) = best {
            return Ok(Justification {
                axioms: best,
                for_answer: answer,
            });
        }
    }
    Err(ReasonerError::NotDerivable)
}
