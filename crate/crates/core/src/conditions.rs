//! Waiting-condition extraction from abstraction placeholders.
//!
//! One left-to-right pass over the placeholder sequence of a comment:
//!
//! - a date is a condition by itself;
//! - a product followed by one or more versions is a product-version
//!   condition, taking the whole run of versions;
//! - a product followed by one or more bug ids is a product-bug condition,
//!   likewise;
//! - everything else is ignored.
//!
//! "Followed by" refers to the placeholder sequence, so ordinary words in
//! between do not matter (`Camel 3.0` and `Camel, fixed in 3.0` group the
//! same way). URL placeholders are always ignored and skipped over, which
//! lets the bug id of a tracker link join a product named just before it.

use std::collections::HashMap;

use serde::Serialize;

use crate::eval::Metric;
use crate::preprocess::{AbstractedComment, AbstractionSpan, Placeholder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    Date,
    ProductVersion,
    ProductBug,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub kind: ConditionKind,
    /// Original text of each placeholder, product first.
    pub parts: Vec<String>,
    /// Raw comment text from the first part to the last.
    pub raw_comment_excerpt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub comment_id: String,
    pub conditions: Vec<Condition>,
    pub ignored_placeholders: Vec<AbstractionSpan>,
}

fn condition(kind: ConditionKind, spans: &[&AbstractionSpan], raw: &str) -> Condition {
    let start = spans[0].source.start;
    let end = spans[spans.len() - 1].source.end;
    Condition {
        kind,
        parts: spans.iter().map(|s| s.original.clone()).collect(),
        raw_comment_excerpt: raw.get(start..end).unwrap_or_default().to_string(),
    }
}

pub fn detect_conditions(c: &AbstractedComment) -> ConditionReport {
    let mut conditions = Vec::new();
    let mut ignored = Vec::new();
    let mut seq: Vec<&AbstractionSpan> = Vec::with_capacity(c.spans.len());
    for s in &c.spans {
        if s.placeholder == Placeholder::Url {
            ignored.push(s.clone());
        } else {
            seq.push(s);
        }
    }
    let mut i = 0;
    while i < seq.len() {
        let head = seq[i];
        match head.placeholder {
            Placeholder::Date => {
                conditions.push(condition(ConditionKind::Date, &seq[i..=i], &c.raw));
                i += 1;
            }
            Placeholder::Product => {
                let follower = seq.get(i + 1).map(|s| s.placeholder);
                let kind = match follower {
                    Some(Placeholder::Version) => Some(ConditionKind::ProductVersion),
                    Some(Placeholder::BugId) => Some(ConditionKind::ProductBug),
                    _ => None,
                };
                match (kind, follower) {
                    (Some(kind), Some(ph)) => {
                        let mut j = i + 1;
                        while j < seq.len() && seq[j].placeholder == ph {
                            j += 1;
                        }
                        conditions.push(condition(kind, &seq[i..j], &c.raw));
                        i = j;
                    }
                    _ => {
                        ignored.push(head.clone());
                        i += 1;
                    }
                }
            }
            _ => {
                ignored.push(head.clone());
                i += 1;
            }
        }
    }
    ignored.sort_by_key(|s| s.position);
    ConditionReport {
        comment_id: c.comment_id.clone(),
        conditions,
        ignored_placeholders: ignored,
    }
}

/// Annotated conditions of one comment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldConditions {
    pub comment_id: String,
    pub conditions: Vec<(ConditionKind, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionAccuracy {
    pub correct: u64,
    pub spurious: u64,
    /// `correct / (correct + spurious)`
    pub ratio: Metric,
}

/// Score detected conditions against annotations. A detection is correct
/// when an unused annotated condition of the same comment has the same kind
/// and parts; otherwise it is spurious.
pub fn condition_accuracy(reports: &[ConditionReport], gold: &[GoldConditions]) -> ConditionAccuracy {
    let mut remaining: HashMap<&str, Vec<(ConditionKind, &[String])>> = HashMap::new();
    for g in gold {
        remaining
            .entry(g.comment_id.as_str())
            .or_default()
            .extend(g.conditions.iter().map(|(k, p)| (*k, p.as_slice())));
    }
    let (mut correct, mut spurious) = (0u64, 0u64);
    for r in reports {
        let pool = remaining.entry(r.comment_id.as_str()).or_default();
        for c in &r.conditions {
            match pool
                .iter()
                .position(|(k, p)| *k == c.kind && *p == c.parts.as_slice())
            {
                Some(at) => {
                    pool.swap_remove(at);
                    correct += 1;
                }
                None => spurious += 1,
            }
        }
    }
    ConditionAccuracy {
        correct,
        spurious,
        ratio: Metric::ratio(correct, correct + spurious),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{preprocess_text, ProductDictionary};
    use proptest::prelude::*;

    fn detect(text: &str) -> ConditionReport {
        detect_conditions(&preprocess_text("c", text, &ProductDictionary::default()))
    }

    fn kinds_parts(r: &ConditionReport) -> Vec<(ConditionKind, Vec<&str>)> {
        r.conditions
            .iter()
            .map(|c| (c.kind, c.parts.iter().map(String::as_str).collect()))
            .collect()
    }

    #[test]
    fn golden_rows() {
        assert_eq!(
            kinds_parts(&detect("Can be removed after 26 June 2013")),
            [(ConditionKind::Date, vec!["26 June 2013"])]
        );
        assert_eq!(
            kinds_parts(&detect("remove the httpBindingRef look up in Camel 3.0")),
            [(ConditionKind::ProductVersion, vec!["Camel", "3.0"])]
        );
        assert_eq!(
            kinds_parts(&detect("FIXME (CAMEL-3091): @Test")),
            [(ConditionKind::ProductBug, vec!["CAMEL", "3091"])]
        );
        let r = detect("TODO: After YARN-2 is committed, we should call containerResource.getCpus()");
        assert_eq!(kinds_parts(&r), [(ConditionKind::ProductBug, vec!["YARN", "2"])]);
        assert_eq!(r.conditions[0].raw_comment_excerpt, "YARN-2");
    }

    #[test]
    fn lone_product_is_ignored() {
        let r = detect("works on Linux only");
        assert!(r.conditions.is_empty());
        assert_eq!(r.ignored_placeholders.len(), 1);
        assert_eq!(r.ignored_placeholders[0].original, "Linux");
    }

    #[test]
    fn maximal_runs_and_orphans() {
        let r = detect("needs Hadoop 2.7.1 or 2.8.0, not 1.0.4 on 23 June 2013");
        assert_eq!(
            kinds_parts(&r),
            [
                (
                    ConditionKind::ProductVersion,
                    vec!["Hadoop", "2.7.1", "2.8.0", "1.0.4"]
                ),
                (ConditionKind::Date, vec!["23 June 2013"]),
            ]
        );
        let orphan = detect("since 1.2.3 see http://example.org/x");
        assert!(orphan.conditions.is_empty());
        assert_eq!(orphan.ignored_placeholders.len(), 2);
    }

    #[test]
    fn tracker_link_after_product() {
        let r = detect("waiting on Jira https://issues.apache.org/jira/browse/CAMEL-12");
        assert_eq!(r.conditions.len(), 1);
        assert_eq!(r.conditions[0].kind, ConditionKind::ProductBug);
        assert_eq!(r.conditions[0].parts[0], "Jira");
        assert_eq!(r.ignored_placeholders[0].placeholder, Placeholder::Url);
    }

    #[test]
    fn accuracy_accounting() {
        let det = |id: &str, parts: &[&str]| ConditionReport {
            comment_id: id.to_string(),
            conditions: vec![Condition {
                kind: ConditionKind::ProductBug,
                parts: parts.iter().map(|s| s.to_string()).collect(),
                raw_comment_excerpt: String::new(),
            }],
            ignored_placeholders: vec![],
        };
        let mut reports = Vec::new();
        let mut gold = Vec::new();
        for i in 0..89 {
            let id = i.to_string();
            let num = i.to_string();
            gold.push(GoldConditions {
                comment_id: id.clone(),
                conditions: vec![(ConditionKind::ProductBug, vec!["CAMEL".to_string(), num.clone()])],
            });
            let parts = if i < 80 {
                ["CAMEL", num.as_str()]
            } else {
                ["CAMEL", "0000"]
            };
            reports.push(det(&id, &parts));
        }
        let a = condition_accuracy(&reports, &gold);
        assert_eq!((a.correct, a.spurious), (80, 9));
        assert!((a.ratio.value - 80.0 / 89.0).abs() < 1e-9);
        let empty = condition_accuracy(&[], &[]);
        assert!(empty.ratio.undefined);
        let one = condition_accuracy(&reports[..1], &gold[..1]);
        assert_eq!(one.ratio, Metric::defined(1.0));
        // a gold condition can only be matched once
        let twice = [reports[0].clone(), reports[0].clone()];
        assert_eq!(condition_accuracy(&twice, &gold[..1]).spurious, 1);
    }

    fn text() -> impl Strategy<Value = String> {
        let atoms = prop_oneof![
            Just("Camel".to_string()),
            Just("CAMEL-3091".to_string()),
            Just("3.0".to_string()),
            Just("1.9.3".to_string()),
            Just("26 June 2013".to_string()),
            Just("http://x.org/browse/ABC-12".to_string()),
            Just("https://example.com/a".to_string()),
            Just("Linux".to_string()),
            "[a-z ,.]{0,8}",
        ];
        proptest::collection::vec(atoms, 0..10).prop_map(|v| v.join(" "))
    }

    proptest! {
        #[test]
        fn placeholders_are_partitioned(t in text()) {
            let a = preprocess_text("c", &t, &ProductDictionary::default());
            let r = detect_conditions(&a);
            let in_conditions: usize = r.conditions.iter().map(|c| c.parts.len()).sum();
            prop_assert_eq!(in_conditions + r.ignored_placeholders.len(), a.spans.len());
            for c in &r.conditions {
                match c.kind {
                    ConditionKind::Date => prop_assert_eq!(c.parts.len(), 1),
                    _ => prop_assert!(c.parts.len() >= 2),
                }
                for p in &c.parts {
                    prop_assert!(t.contains(p.as_str()));
                }
                prop_assert!(t.contains(c.raw_comment_excerpt.as_str()));
            }
        }

        #[test]
        fn ordinary_tokens_do_not_matter(t in text()) {
            let a = preprocess_text("c", &t, &ProductDictionary::default());
            let mut b = a.clone();
            let plain: Vec<usize> = (0..b.tokens.len()).filter(|&i| !AbstractedComment::is_placeholder(&b.tokens[i])).collect();
            let rev: Vec<String> = plain.iter().rev().map(|&i| a.tokens[i].clone()).collect();
            for (slot, tok) in plain.iter().zip(rev) {
                b.tokens[*slot] = tok;
            }
            prop_assert_eq!(detect_conditions(&a), detect_conditions(&b));
        }
    }
}
