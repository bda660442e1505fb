//! Balance and complexity statistics of a dataset.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::DatasetRecord;
use crate::reasoner::Answer;
use crate::syntax::{parse_axiom, Level};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerStats {
    pub count: usize,
    /// Share of questions containing the word "not".
    pub not_rate: f64,
    /// Mean question length in words.
    pub mean_length: f64,
}

/// Justification axioms binned by (connectives, quantifiers).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexityHistogram {
    pub axioms: usize,
    /// Keyed "c,q"; values are percentages.
    pub bins: BTreeMap<String, f64>,
    /// Percentage with at least two connectives and at least two quantifiers.
    pub both_at_least_two: f64,
    /// Percentage with at least two connectives or at least two quantifiers.
    pub either_at_least_two: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub total: usize,
    /// Keyed "true", "false", "unknown".
    pub per_answer: BTreeMap<String, AnswerStats>,
    /// Keyed by depth or "na".
    pub per_depth: BTreeMap<String, usize>,
    pub per_level: BTreeMap<String, usize>,
    pub per_route: BTreeMap<String, usize>,
    pub complexity: ComplexityHistogram,
}

fn has_not(sentence: &str) -> bool {
    sentence
        .split_whitespace()
        .any(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).eq_ignore_ascii_case("not"))
}

pub fn stats_report(records: &[DatasetRecord]) -> StatsReport {
    let mut report = StatsReport {
        total: records.len(),
        ..Default::default()
    };
    for answer in [Answer::True, Answer::False, Answer::Unknown] {
        let qs: Vec<&str> = records.iter().filter(|r| r.answer == answer).map(|r| r.question.as_str()).collect();
        if qs.is_empty() {
            continue;
        }
        let n = qs.len() as f64;
        report.per_answer.insert(
            answer.to_string(),
            AnswerStats {
                count: qs.len(),
                not_rate: qs.iter().filter(|q| has_not(q)).count() as f64 / n,
                mean_length: qs.iter().map(|q| q.split_whitespace().count()).sum::<usize>() as f64 / n,
            },
        );
    }
    for r in records {
        *report.per_depth.entry(r.depth.to_string()).or_default() += 1;
        *report.per_level.entry(r.level.to_string()).or_default() += 1;
        let route = serde_json::to_value(r.route).expect("route serializes");
        *report.per_route.entry(route.as_str().unwrap_or_default().to_string()).or_default() += 1;
    }
    report.complexity = complexity_histogram(records, None);
    report
}

/// Bins each distinct justification axiom (per KB) of the records at
/// `level`, or of all records.
pub fn complexity_histogram(records: &[DatasetRecord], level: Option<Level>) -> ComplexityHistogram {
    let mut seen = BTreeSet::new();
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for r in records.iter().filter(|r| level.map_or(true, |l| r.level == l)) {
        for &i in &r.justification {
            if !seen.insert((r.kb_id.as_str(), i)) {
                continue;
            }
            let Some(Ok(ax)) = r.formal.context.get(i).map(|l| parse_axiom(l)) else {
                continue;
            };
            *counts.entry(ax.complexity_profile()).or_default() += 1;
        }
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return ComplexityHistogram::default();
    }
    let pct = |n: usize| 100.0 * n as f64 / total as f64;
    let share = |keep: fn(usize, usize) -> bool| pct(counts.iter().filter(|((c, q), _)| keep(*c, *q)).map(|(_, n)| n).sum());
    ComplexityHistogram {
        axioms: total,
        bins: counts.iter().map(|((c, q), &n)| (format!("{c},{q}"), pct(n))).collect(),
        both_at_least_two: share(|c, q| c >= 2 && q >= 2),
        either_at_least_two: share(|c, q| c >= 2 || q >= 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcfg::PoolName;
    use crate::pipeline::{Formal, SymbolicVariant};
    use crate::query::Route;
    use crate::reasoner::Depth;

    fn record(question: &str, answer: Answer, context: &[&str], justification: Vec<usize>) -> DatasetRecord {
        DatasetRecord {
            kb_id: "k".into(),
            pool: PoolName::A,
            context: context.iter().map(|s| s.to_string()).collect(),
            question: question.into(),
            answer,
            depth: Depth::Value(0),
            level: Level::new(3).unwrap(),
            justification,
            route: Route::FromClosure,
            symbolic_variant: SymbolicVariant::None,
            formal: Formal {
                context: context.iter().map(|s| s.to_string()).collect(),
                question: "Red(Anne)".into(),
            },
            slot: 0,
        }
    }

    #[test]
    fn single_record_rates_are_zero_or_one() {
        let s = stats_report(&[record("Anne is not red.", Answer::True, &["Red(Anne)"], vec![])]);
        assert_eq!(s.per_answer["true"].not_rate, 1.0);
        assert_eq!(s.per_answer["true"].mean_length, 4.0);
        assert_eq!(s.total, 1);
        assert_eq!(s.per_depth["0"], 1);
    }

    #[test]
    fn atomic_facts_fill_the_origin_bin() {
        let ctx = ["Red(Anne)", "Green(Anne)"];
        let h = complexity_histogram(&[record("q", Answer::True, &ctx, vec![0, 1])], None);
        assert_eq!(h.axioms, 2);
        assert_eq!(h.bins["0,0"], 100.0);
        assert_eq!(h.both_at_least_two, 0.0);
    }

    #[test]
    fn complex_axioms_count_towards_both_shares() {
        let ctx = [
            "(some likes . (Red and Green) or only likes . Kind)(Anne)",
            "Red subclassof some likes . Kind",
        ];
        let h = complexity_histogram(&[record("q", Answer::True, &ctx, vec![0, 1])], None);
        assert_eq!(h.both_at_least_two, 50.0);
        assert_eq!(h.either_at_least_two, 50.0);
        assert!(complexity_histogram(&[record("q", Answer::True, &ctx, vec![0])], Some(Level::new(1).unwrap()))
            .bins
            .is_empty());
    }
}
