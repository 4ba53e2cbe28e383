//! Metrics, fold planning and cross-validation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::Label;
use crate::model::{
    fit, CommentClassifier, FeatureSpec, Hyperparams, KeywordBaseline, ModelError, Prediction,
};
use crate::ngram::{NGramTable, NgramError};
use crate::preprocess::AbstractedComment;

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_TEST_FRACTION: f64 = 0.1;
pub const DEFAULT_MIN_ON_HOLD_RATIO: f64 = 0.02;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("both on-hold and other comments are required")]
    SingleClass,
    #[error("too few {class} comments for a {n_folds}-fold plan with test fraction {test_fraction}")]
    TooFewInstances {
        class: Label,
        n_folds: usize,
        test_fraction: f64,
    },
    #[error("test fraction must be in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("fold count must be at least 1")]
    InvalidFolds,
    #[error("{0} vs {1}: inputs are not aligned")]
    LengthMismatch(usize, usize),
    #[error("cross-project evaluation needs at least 2 eligible projects, found {eligible}")]
    TooFewProjects { eligible: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ngram(#[from] NgramError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// A metric value. Zero-denominator cases report 0 with `undefined` set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metric {
    pub value: f64,
    pub undefined: bool,
}

impl Metric {
    pub fn defined(value: f64) -> Self {
        Metric {
            value,
            undefined: false,
        }
    }

    pub fn undefined() -> Self {
        Metric {
            value: 0.0,
            undefined: true,
        }
    }

    pub fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Metric::undefined()
        } else {
            Metric::defined(num as f64 / den as f64)
        }
    }
}

/// Count outcomes, treating `score >= threshold` as an on-hold prediction.
pub fn confusion(preds: &[Prediction], truth: &[Label], threshold: f64) -> ConfusionCounts {
    assert_eq!(preds.len(), truth.len(), "predictions and labels must align");
    let mut c = ConfusionCounts::default();
    for (p, t) in preds.iter().zip(truth) {
        match (p.score >= threshold, t.is_on_hold()) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    c
}

pub fn precision(c: &ConfusionCounts) -> Metric {
    Metric::ratio(c.tp, c.tp + c.fp)
}

pub fn recall(c: &ConfusionCounts) -> Metric {
    Metric::ratio(c.tp, c.tp + c.fn_)
}

pub fn f1(c: &ConfusionCounts) -> Metric {
    let p = precision(c);
    let r = recall(c);
    if p.undefined || r.undefined || p.value + r.value == 0.0 {
        return Metric::undefined();
    }
    Metric::defined(2.0 * (p.value * r.value) / (p.value + r.value))
}

/// Probability that a random on-hold comment scores above a random other
/// one, ties counting one half.
///
/// Computed from average ranks. Ranks are kept doubled so every
/// intermediate value is an integer, and the result is a single division.
pub fn auc(scores: &[f64], truth: &[Label]) -> Result<f64, EvalError> {
    if scores.len() != truth.len() {
        return Err(EvalError::LengthMismatch(scores.len(), truth.len()));
    }
    let pos = truth.iter().filter(|l| l.is_on_hold()).count() as u128;
    let neg = truth.len() as u128 - pos;
    if pos == 0 || neg == 0 {
        return Err(EvalError::SingleClass);
    }
    // +0.0 folds -0.0 into 0.0 so total_cmp agrees with ==
    let mut order: Vec<(f64, bool)> = scores
        .iter()
        .map(|s| s + 0.0)
        .zip(truth.iter().map(|l| l.is_on_hold()))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && order[j].0.total_cmp(&order[i].0).is_eq() {
            j += 1;
        }
        // ranks i+1..=j, doubled average i+1+j
        let positives = order[i..j].iter().filter(|e| e.1).count() as u128;
        rank_sum2 += positives * (i + 1 + j) as u128;
        i = j;
    }
    let numerator = rank_sum2 - pos * (pos + 1);
    Ok(numerator as f64 / (2 * pos * neg) as f64)
}

/// Train and test indices of one split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Repeated random splits. An index may be tested in several folds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldPlan {
    pub folds: Vec<Fold>,
    pub seed: u64,
    pub n_folds: usize,
    pub test_fraction: f64,
    pub stratified: bool,
}

fn check_plan_args(n_folds: usize, test_fraction: f64) -> Result<(), EvalError> {
    if n_folds == 0 {
        return Err(EvalError::InvalidFolds);
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(EvalError::InvalidFraction(test_fraction));
    }
    Ok(())
}

/// Per-class test counts: `round(N * f)` in total, shared out by largest
/// remainder so each class is within one instance of its exact share.
pub fn stratified_test_counts(pos: usize, neg: usize, test_fraction: f64) -> (usize, usize) {
    let n = pos + neg;
    let n_test = (n as f64 * test_fraction).round() as usize;
    let ideal_pos = n_test as f64 * pos as f64 / n as f64;
    let ideal_neg = n_test as f64 * neg as f64 / n as f64;
    let (mut p, mut q) = (ideal_pos.floor() as usize, ideal_neg.floor() as usize);
    if p + q < n_test {
        if ideal_pos - p as f64 >= ideal_neg - q as f64 {
            p += 1;
        } else {
            q += 1;
        }
    }
    if p + q < n_test {
        q += 1;
    }
    (p, q)
}

pub fn stratified_folds(
    labels: &[Label],
    n_folds: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<FoldPlan, EvalError> {
    check_plan_args(n_folds, test_fraction)?;
    let (pos_idx, neg_idx): (Vec<usize>, Vec<usize>) =
        (0..labels.len()).partition(|&i| labels[i].is_on_hold());
    if pos_idx.is_empty() || neg_idx.is_empty() {
        return Err(EvalError::SingleClass);
    }
    let (tp, tn) = stratified_test_counts(pos_idx.len(), neg_idx.len(), test_fraction);
    for (class, take, have) in [
        (Label::OnHold, tp, pos_idx.len()),
        (Label::NotOnHold, tn, neg_idx.len()),
    ] {
        if take == 0 || take >= have {
            return Err(EvalError::TooFewInstances {
                class,
                n_folds,
                test_fraction,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = Vec::with_capacity(n_folds);
    let (mut pos_idx, mut neg_idx) = (pos_idx, neg_idx);
    for _ in 0..n_folds {
        pos_idx.shuffle(&mut rng);
        neg_idx.shuffle(&mut rng);
        let test: Vec<usize> = pos_idx[..tp].iter().chain(&neg_idx[..tn]).copied().collect();
        let train: Vec<usize> = pos_idx[tp..].iter().chain(&neg_idx[tn..]).copied().collect();
        folds.push(sorted_fold(train, test));
    }
    Ok(FoldPlan {
        folds,
        seed,
        n_folds,
        test_fraction,
        stratified: true,
    })
}

/// Plain shuffle splits that ignore class balance.
pub fn shuffle_folds(n: usize, n_folds: usize, test_fraction: f64, seed: u64) -> Result<FoldPlan, EvalError> {
    check_plan_args(n_folds, test_fraction)?;
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(EvalError::TooFewInstances {
            class: Label::NotOnHold,
            n_folds,
            test_fraction,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    let folds = (0..n_folds)
        .map(|_| {
            idx.shuffle(&mut rng);
            sorted_fold(idx[n_test..].to_vec(), idx[..n_test].to_vec())
        })
        .collect();
    Ok(FoldPlan {
        folds,
        seed,
        n_folds,
        test_fraction,
        stratified: false,
    })
}

fn sorted_fold(mut train: Vec<usize>, mut test: Vec<usize>) -> Fold {
    train.sort_unstable();
    test.sort_unstable();
    Fold { train, test }
}

/// The three classifiers compared in an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Baseline,
    Unigram,
    Ngram,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [
        ClassifierKind::Baseline,
        ClassifierKind::Unigram,
        ClassifierKind::Ngram,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Baseline => "baseline",
            ClassifierKind::Unigram => "unigram",
            ClassifierKind::Ngram => "ngram",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub n_folds: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
    pub hyperparams: Hyperparams,
    pub ngram: FeatureSpec,
    pub classifiers: Vec<ClassifierKind>,
    /// Cross-project eligibility: on-hold share strictly above this. `None`
    /// admits every project.
    pub min_on_hold_ratio: Option<f64>,
    #[serde(skip)]
    pub baseline: KeywordBaseline,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            n_folds: DEFAULT_FOLDS,
            test_fraction: DEFAULT_TEST_FRACTION,
            seed: 0,
            stratified: true,
            hyperparams: Hyperparams::default(),
            ngram: FeatureSpec::NGRAM,
            classifiers: ClassifierKind::ALL.to_vec(),
            min_on_hold_ratio: Some(DEFAULT_MIN_ON_HOLD_RATIO),
            baseline: KeywordBaseline::default(),
        }
    }
}

/// Metrics of one classifier on one test set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitMetrics {
    /// Fold number (from 1) or project name.
    pub split: String,
    pub n_test: usize,
    pub confusion: ConfusionCounts,
    pub precision: Metric,
    pub recall: Metric,
    pub f1: Metric,
    pub auc: Metric,
}

impl SplitMetrics {
    fn new(split: String, preds: &[Prediction], truth: &[Label], threshold: f64) -> Self {
        let c = confusion(preds, truth, threshold);
        let scores: Vec<f64> = preds.iter().map(|p| p.score).collect();
        SplitMetrics {
            split,
            n_test: preds.len(),
            confusion: c,
            precision: precision(&c),
            recall: recall(&c),
            f1: f1(&c),
            auc: auc(&scores, truth).map_or(Metric::undefined(), Metric::defined),
        }
    }
}

/// Means over splits. Undefined values are left out of a mean; a mean with
/// no defined values is itself undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanMetrics {
    pub precision: Metric,
    pub recall: Metric,
    pub f1: Metric,
    pub auc: Metric,
}

fn mean_of(splits: &[SplitMetrics], get: impl Fn(&SplitMetrics) -> Metric) -> Metric {
    let vals: Vec<f64> = splits
        .iter()
        .map(&get)
        .filter(|m| !m.undefined)
        .map(|m| m.value)
        .collect();
    if vals.is_empty() {
        Metric::undefined()
    } else {
        Metric::defined(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

impl MeanMetrics {
    fn of(splits: &[SplitMetrics]) -> Self {
        MeanMetrics {
            precision: mean_of(splits, |s| s.precision),
            recall: mean_of(splits, |s| s.recall),
            f1: mean_of(splits, |s| s.f1),
            auc: mean_of(splits, |s| s.auc),
        }
    }
}

/// How one comment fared over every split that tested it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub comment_id: String,
    pub label: Label,
    pub appearances: usize,
    pub correct: usize,
    /// Correct in every appearance.
    pub identified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierReport {
    pub classifier: ClassifierKind,
    pub splits: Vec<SplitMetrics>,
    pub mean: MeanMetrics,
    /// On-hold comments tested at least once.
    pub on_hold_tested: usize,
    /// On-hold comments classified correctly in every appearance.
    pub on_hold_identified: usize,
    pub verdicts: Vec<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub n_comments: usize,
    pub n_on_hold: usize,
    pub seed: u64,
    pub n_folds: usize,
    pub test_fraction: f64,
    pub stratified: bool,
    pub classifiers: Vec<ClassifierReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    CrossValidation,
    CrossProject,
}

impl EvalReport {
    pub fn classifier(&self, kind: ClassifierKind) -> Option<&ClassifierReport> {
        self.classifiers.iter().find(|c| c.classifier == kind)
    }
}

/// Feature table for a fold, built from its training comments only.
pub fn fold_table(
    corpus: &[AbstractedComment],
    train: &[usize],
    spec: FeatureSpec,
) -> Result<NGramTable, NgramError> {
    let docs: Vec<AbstractedComment> = train.iter().map(|&i| corpus[i].clone()).collect();
    spec.build_table(&docs)
}

/// Predictions of one classifier on `test` after training on `train`.
fn run_split(
    kind: ClassifierKind,
    corpus: &[AbstractedComment],
    labels: &[Label],
    train: &[usize],
    test: &[usize],
    cfg: &EvalConfig,
) -> Result<(Vec<Prediction>, f64), EvalError> {
    let test_docs: Vec<AbstractedComment> = test.iter().map(|&i| corpus[i].clone()).collect();
    let spec = match kind {
        ClassifierKind::Baseline => {
            let b = &cfg.baseline;
            let threshold = 1.0 / b.keywords.len().max(1) as f64;
            return Ok((b.classify_all(&test_docs), threshold));
        }
        ClassifierKind::Unigram => FeatureSpec {
            max_n: 1,
            ..cfg.ngram
        },
        ClassifierKind::Ngram => cfg.ngram,
    };
    let train_docs: Vec<AbstractedComment> = train.iter().map(|&i| corpus[i].clone()).collect();
    let train_labels: Vec<Label> = train.iter().map(|&i| labels[i]).collect();
    let model = fit(&train_docs, &train_labels, spec, &cfg.hyperparams)?;
    Ok((model.classify_all(&test_docs), model.threshold))
}

type SplitOutcome = Vec<(ClassifierKind, Vec<Prediction>, f64)>;

fn run_splits(
    corpus: &[AbstractedComment],
    labels: &[Label],
    splits: &[(String, Fold)],
    cfg: &EvalConfig,
) -> Result<Vec<SplitOutcome>, EvalError> {
    splits
        .par_iter()
        .map(|(_, fold)| {
            cfg.classifiers
                .iter()
                .map(|&k| run_split(k, corpus, labels, &fold.train, &fold.test, cfg).map(|(p, t)| (k, p, t)))
                .collect()
        })
        .collect()
}

fn assemble(
    corpus: &[AbstractedComment],
    labels: &[Label],
    splits: &[(String, Fold)],
    outcomes: Vec<SplitOutcome>,
    cfg: &EvalConfig,
) -> Vec<ClassifierReport> {
    cfg.classifiers
        .iter()
        .enumerate()
        .map(|(ci, &kind)| {
            let mut metrics = Vec::new();
            let mut tally: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
            for ((name, fold), outcome) in splits.iter().zip(&outcomes) {
                let (_, preds, threshold) = &outcome[ci];
                let truth: Vec<Label> = fold.test.iter().map(|&i| labels[i]).collect();
                metrics.push(SplitMetrics::new(name.clone(), preds, &truth, *threshold));
                for ((&i, p), t) in fold.test.iter().zip(preds).zip(&truth) {
                    let e = tally.entry(i).or_default();
                    e.0 += 1;
                    e.1 += ((p.score >= *threshold) == t.is_on_hold()) as usize;
                }
            }
            let verdicts: Vec<Verdict> = tally
                .into_iter()
                .map(|(i, (appearances, correct))| Verdict {
                    comment_id: corpus[i].comment_id.clone(),
                    label: labels[i],
                    appearances,
                    correct,
                    identified: correct == appearances,
                })
                .collect();
            let on_hold: Vec<&Verdict> = verdicts.iter().filter(|v| v.label.is_on_hold()).collect();
            ClassifierReport {
                classifier: kind,
                mean: MeanMetrics::of(&metrics),
                splits: metrics,
                on_hold_tested: on_hold.len(),
                on_hold_identified: on_hold.iter().filter(|v| v.identified).count(),
                verdicts,
            }
        })
        .collect()
}

fn check_aligned(corpus: &[AbstractedComment], labels: &[Label]) -> Result<(), EvalError> {
    if corpus.len() != labels.len() {
        return Err(EvalError::LengthMismatch(corpus.len(), labels.len()));
    }
    Ok(())
}

/// Repeated-split evaluation. Each fold builds its feature table from its
/// own training comments.
pub fn cross_validate(
    corpus: &[AbstractedComment],
    labels: &[Label],
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    check_aligned(corpus, labels)?;
    let plan = if cfg.stratified {
        stratified_folds(labels, cfg.n_folds, cfg.test_fraction, cfg.seed)?
    } else {
        shuffle_folds(labels.len(), cfg.n_folds, cfg.test_fraction, cfg.seed)?
    };
    let splits: Vec<(String, Fold)> = plan
        .folds
        .into_iter()
        .enumerate()
        .map(|(i, f)| ((i + 1).to_string(), f))
        .collect();
    let outcomes = run_splits(corpus, labels, &splits, cfg)?;
    Ok(EvalReport {
        mode: EvalMode::CrossValidation,
        n_comments: corpus.len(),
        n_on_hold: labels.iter().filter(|l| l.is_on_hold()).count(),
        seed: cfg.seed,
        n_folds: cfg.n_folds,
        test_fraction: cfg.test_fraction,
        stratified: cfg.stratified,
        classifiers: assemble(corpus, labels, &splits, outcomes, cfg),
    })
}

/// Projects whose on-hold share is above `min_ratio`, sorted by name.
pub fn eligible_projects(labels: &[Label], projects: &[String], min_ratio: Option<f64>) -> Vec<String> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (l, p) in labels.iter().zip(projects) {
        let e = counts.entry(p.as_str()).or_default();
        e.0 += l.is_on_hold() as usize;
        e.1 += 1;
    }
    counts
        .into_iter()
        .filter(|(_, (pos, n))| min_ratio.is_none_or(|r| *pos as f64 / *n as f64 > r))
        .map(|(p, _)| p.to_string())
        .collect()
}

/// Leave-one-project-out over the eligible projects: each one is the test
/// set once, the other eligible projects form the training set.
pub fn cross_project_validate(
    corpus: &[AbstractedComment],
    labels: &[Label],
    projects: &[String],
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    check_aligned(corpus, labels)?;
    if projects.len() != labels.len() {
        return Err(EvalError::LengthMismatch(projects.len(), labels.len()));
    }
    let eligible = eligible_projects(labels, projects, cfg.min_on_hold_ratio);
    if eligible.len() < 2 {
        return Err(EvalError::TooFewProjects {
            eligible: eligible.len(),
        });
    }
    let splits: Vec<(String, Fold)> = eligible
        .iter()
        .map(|p| {
            let (test, train) = (0..labels.len())
                .filter(|&i| eligible.contains(&projects[i]))
                .partition(|&i| &projects[i] == p);
            (p.clone(), Fold { train, test })
        })
        .collect();
    let outcomes = run_splits(corpus, labels, &splits, cfg)?;
    let used: Vec<usize> = splits[0]
        .1
        .train
        .iter()
        .chain(&splits[0].1.test)
        .copied()
        .collect();
    Ok(EvalReport {
        mode: EvalMode::CrossProject,
        n_comments: used.len(),
        n_on_hold: used.iter().filter(|&&i| labels[i].is_on_hold()).count(),
        seed: cfg.seed,
        n_folds: splits.len(),
        test_fraction: 0.0,
        stratified: false,
        classifiers: assemble(corpus, labels, &splits, outcomes, cfg),
    })
}
