//! Replaying records against the reasoner, and ad-hoc queries.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{DatasetRecord, Result};
use crate::reasoner::{Answer, Depth, Reasoner};
use crate::syntax::{axiom_to_line, parse_axiom, Axiom, KnowledgeBase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyFailure {
    /// Position of the record in the input.
    pub index: usize,
    pub kb_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    pub failures: Vec<VerifyFailure>,
}

fn formal_kb(r: &DatasetRecord) -> std::result::Result<KnowledgeBase, String> {
    let axioms = r
        .formal
        .context
        .iter()
        .map(|l| parse_axiom(l))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| format!("formal context: {e}"))?;
    KnowledgeBase::from_axioms(r.kb_id.clone(), axioms).map_err(|e| e.to_string())
}

/// Recomputes answer, depth and minimum justification of every record
/// from its formal fields.
pub fn verify_records(records: &[DatasetRecord]) -> VerifyReport {
    let reasoner = Reasoner::default();
    let mut by_kb: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_kb.entry(&r.kb_id).or_default().push(i);
    }
    let mut report = VerifyReport::default();
    for (kb_id, indices) in by_kb {
        let fail = |index: usize, message: String| VerifyFailure {
            index,
            kb_id: kb_id.to_string(),
            message,
        };
        let first = &records[indices[0]];
        let kb = match formal_kb(first) {
            Ok(kb) => kb,
            Err(m) => {
                report.failures.extend(indices.iter().map(|&i| fail(i, m.clone())));
                continue;
            }
        };
        let mut session = match reasoner.session(&kb) {
            Ok(s) => s,
            Err(e) => {
                report.failures.extend(indices.iter().map(|&i| fail(i, e.to_string())));
                continue;
            }
        };
        for i in indices {
            report.checked += 1;
            let r = &records[i];
            if r.formal.context != first.formal.context || r.context.len() != kb.len() {
                report.failures.push(fail(i, "context differs within the KB".into()));
                continue;
            }
            if let Some(&bad) = r.justification.iter().find(|&&j| j >= kb.len()) {
                report.failures.push(fail(i, format!("justification index {bad} out of range")));
                continue;
            }
            let q = match parse_axiom(&r.formal.question) {
                Ok(q) => q,
                Err(e) => {
                    report.failures.push(fail(i, format!("formal question: {e}")));
                    continue;
                }
            };
            match session.explain(&q) {
                Ok(e) => {
                    let j = e.justification.map(|j| j.axioms).unwrap_or_default();
                    if e.answer != r.answer {
                        report.failures.push(fail(i, format!("answer is {}, record says {}", e.answer, r.answer)));
                    } else if e.depth != r.depth {
                        report.failures.push(fail(i, format!("depth is {}, record says {}", e.depth, r.depth)));
                    } else if j != r.justification {
                        report.failures.push(fail(i, format!("justification is {j:?}, record says {:?}", r.justification)));
                    }
                }
                Err(e) => report.failures.push(fail(i, e.to_string())),
            }
        }
    }
    report
}

/// Structural problems: per KB exactly one true, false and unknown record
/// for each slot `0..=m`, with depths matching their slots.
pub fn check_shape(records: &[DatasetRecord], m: u32) -> Vec<String> {
    let mut problems = Vec::new();
    let mut by_kb: BTreeMap<&str, Vec<&DatasetRecord>> = BTreeMap::new();
    for r in records {
        by_kb.entry(&r.kb_id).or_default().push(r);
    }
    for (kb, rs) in by_kb {
        let expected = 3 * (m as usize + 1);
        if rs.len() != expected {
            problems.push(format!("{kb}: {} records, expected {expected}", rs.len()));
        }
        let mut seen = BTreeSet::new();
        for r in &rs {
            if !seen.insert((r.slot, r.answer)) {
                problems.push(format!("{kb}: slot {} has two {} records", r.slot, r.answer));
            }
            let want = match r.answer {
                Answer::Unknown => Depth::NA,
                _ => Depth::Value(r.slot),
            };
            if r.depth != want || r.slot > m {
                problems.push(format!("{kb}: {} record in slot {} has depth {}", r.answer, r.slot, r.depth));
            }
        }
    }
    problems
}

/// Answer of one ad-hoc query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub query: String,
    pub answer: Answer,
    pub depth: Depth,
    /// Justification axioms in the KB text format.
    pub justification: Vec<String>,
}

pub fn check_queries(kb: &KnowledgeBase, queries: &[Axiom]) -> Result<Vec<CheckOutcome>> {
    let mut session = Reasoner::default().session(kb)?;
    queries
        .iter()
        .map(|q| {
            let e = session.explain(q)?;
            Ok(CheckOutcome {
                query: axiom_to_line(q),
                answer: e.answer,
                depth: e.depth,
                justification: e
                    .justification
                    .map(|j| j.axioms.iter().map(|&i| axiom_to_line(&kb.axioms()[i])).collect())
                    .unwrap_or_default(),
            })
        })
        .collect()
}
