//! One function per subcommand. Each returns the bytes of its single
//! output artifact; writing them is left to the caller.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use onhold::corpus::{write_dataset, Dataset};
use onhold::eval::ClassifierReport;
use onhold::model::KeywordBaseline;
use onhold::{
    auc, confusion, cross_project_validate, cross_validate, detect_conditions, f1, fit, load_dataset,
    load_unlabeled, mine_comments, precision, preprocess_all, recall, top_features, ClassifierKind,
    CommentClassifier, Condition, ConditionReport, ConfusionCounts, EvalConfig, EvalReport, Label,
    LinearModel, Metric,
};
use serde::Serialize;

use crate::config::{check_file, RunConfig};
use crate::error::CliError;

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn labels(ds: &Dataset) -> Vec<Label> {
    ds.comments.iter().map(|c| c.label).collect()
}

fn load_labeled(path: &Path) -> Result<Dataset, CliError> {
    let ds = load_dataset(path)?.classification_subset();
    if ds.is_empty() {
        return Err(CliError::input(format!(
            "{} has no on-hold or not-on-hold rows",
            path.display()
        )));
    }
    Ok(ds)
}

pub fn mine(cfg: &RunConfig, root: &Path, ext: &[String]) -> Result<Vec<u8>, CliError> {
    cfg.check_paths()?;
    if !root.is_dir() {
        return Err(CliError::input(format!(
            "source root {} is not a directory",
            root.display()
        )));
    }
    let outcome = mine_comments(root, ext)?;
    for skipped in &outcome.skipped {
        eprintln!("skipped non-UTF-8 file {}", skipped.display());
    }
    eprintln!("mined {} comments", outcome.dataset.len());
    let mut buf = Vec::new();
    write_dataset(&outcome.dataset, &mut buf)?;
    Ok(buf)
}

pub fn train(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    cfg.require_seed()?;
    let path = cfg.require_dataset()?;
    cfg.check_paths()?;
    let dict = cfg.dictionary()?;
    let ds = load_labeled(path)?;
    let corpus = preprocess_all(&ds.comments, &dict);
    let model = fit(&corpus, &labels(&ds), cfg.features, &cfg.hyperparams)?;
    eprintln!(
        "trained on {} comments ({} on-hold), {} features",
        ds.len(),
        ds.count(Label::OnHold),
        model.table.len()
    );
    Ok(model.to_text().into_bytes())
}

#[derive(Serialize)]
struct ComparisonRow {
    metric: &'static str,
    values: Vec<Metric>,
}

#[derive(Serialize)]
struct Comparison {
    columns: Vec<&'static str>,
    rows: Vec<ComparisonRow>,
}

impl Comparison {
    fn of(report: &EvalReport) -> Self {
        let cs = &report.classifiers;
        let row = |metric, get: fn(&ClassifierReport) -> Metric| ComparisonRow {
            metric,
            values: cs.iter().map(get).collect(),
        };
        Comparison {
            columns: cs.iter().map(|c| c.classifier.name()).collect(),
            rows: vec![
                row("precision", |c| c.mean.precision),
                row("recall", |c| c.mean.recall),
                row("f1", |c| c.mean.f1),
                row("auc", |c| c.mean.auc),
            ],
        }
    }

    fn print(&self) {
        let mut head = format!("{:<10}", "");
        for c in &self.columns {
            head.push_str(&format!("{c:>14}"));
        }
        eprintln!("{head}");
        for r in &self.rows {
            let mut line = format!("{:<10}", r.metric);
            for m in &r.values {
                if m.undefined {
                    line.push_str(&format!("{:>14}", "n/a"));
                } else {
                    line.push_str(&format!("{:>14.4}", m.value));
                }
            }
            eprintln!("{line}");
        }
    }
}

#[derive(Serialize)]
struct EvaluateOutput<'a> {
    config: &'a EvalConfig,
    comparison: Comparison,
    report: &'a EvalReport,
}

pub fn evaluate(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let seed = cfg.require_seed()?;
    let path = cfg.require_dataset()?;
    cfg.check_paths()?;
    let dict = cfg.dictionary()?;
    let ds = load_labeled(path)?;
    let corpus = preprocess_all(&ds.comments, &dict);
    let truth = labels(&ds);
    let classifiers = if cfg.unigram_only {
        vec![ClassifierKind::Baseline, ClassifierKind::Unigram]
    } else {
        ClassifierKind::ALL.to_vec()
    };
    let ecfg = EvalConfig {
        n_folds: cfg.n_folds,
        test_fraction: cfg.test_fraction,
        seed,
        stratified: cfg.stratified,
        hyperparams: cfg.hyperparams.clone(),
        ngram: cfg.features,
        classifiers,
        min_on_hold_ratio: cfg.min_on_hold_ratio,
        ..EvalConfig::default()
    };
    let report = if cfg.cross_project {
        let projects: Vec<String> = ds.comments.iter().map(|c| c.project.clone()).collect();
        cross_project_validate(&corpus, &truth, &projects, &ecfg)?
    } else {
        cross_validate(&corpus, &truth, &ecfg)?
    };
    let comparison = Comparison::of(&report);
    comparison.print();
    json(&EvaluateOutput {
        config: &ecfg,
        comparison,
        report: &report,
    })
}

#[derive(Serialize)]
struct Classified {
    comment_id: String,
    project: String,
    score: f64,
    predicted: Label,
    conditions: Vec<Condition>,
}

#[derive(Serialize)]
struct ClassifyOutput {
    threshold: f64,
    n_comments: usize,
    n_on_hold: usize,
    predictions: Vec<Classified>,
}

pub fn classify(
    cfg: &RunConfig,
    model_path: &Path,
    source: Option<&Path>,
    ext: &[String],
) -> Result<Vec<u8>, CliError> {
    check_file(model_path, "model")?;
    let ds = match (source, &cfg.dataset) {
        (Some(_), Some(_)) => return Err(CliError::input("give either --dataset or --source, not both")),
        (None, None) => return Err(CliError::input("classify needs --dataset or --source")),
        (Some(root), None) => {
            cfg.check_paths()?;
            if !root.is_dir() {
                return Err(CliError::input(format!(
                    "source root {} is not a directory",
                    root.display()
                )));
            }
            mine_comments(root, ext)?.dataset
        }
        (None, Some(_)) => {
            let path = cfg.require_dataset()?;
            cfg.check_paths()?;
            load_unlabeled(path)?
        }
    };
    let file = File::open(model_path)
        .map_err(|e| CliError::input(format!("cannot open model {}: {e}", model_path.display())))?;
    let model = LinearModel::load(BufReader::new(file))?;
    let dict = cfg.dictionary()?;
    let corpus = preprocess_all(&ds.comments, &dict);
    let preds = model.classify_all(&corpus);
    let predictions: Vec<Classified> = preds
        .into_iter()
        .zip(&corpus)
        .zip(&ds.comments)
        .map(|((p, c), raw)| Classified {
            conditions: if p.predicted.is_on_hold() {
                detect_conditions(c).conditions
            } else {
                Vec::new()
            },
            comment_id: p.comment_id,
            project: raw.project.clone(),
            score: p.score,
            predicted: p.predicted,
        })
        .collect();
    let n_on_hold = predictions.iter().filter(|p| p.predicted.is_on_hold()).count();
    eprintln!(
        "{} of {} comments classified on-hold",
        n_on_hold,
        predictions.len()
    );
    json(&ClassifyOutput {
        threshold: model.threshold,
        n_comments: predictions.len(),
        n_on_hold,
        predictions,
    })
}

#[derive(Serialize)]
struct ConditionsOutput {
    n_comments: usize,
    n_conditions: usize,
    reports: Vec<ConditionReport>,
}

pub fn detect(cfg: &RunConfig, on_hold_only: bool) -> Result<Vec<u8>, CliError> {
    let path = cfg.require_dataset()?;
    cfg.check_paths()?;
    let dict = cfg.dictionary()?;
    let mut ds = load_unlabeled(path)?;
    if on_hold_only {
        ds.comments.retain(|c| c.label.is_on_hold());
    }
    let reports: Vec<ConditionReport> = preprocess_all(&ds.comments, &dict)
        .iter()
        .map(detect_conditions)
        .collect();
    let n_conditions = reports.iter().map(|r| r.conditions.len()).sum();
    eprintln!("{n_conditions} conditions in {} comments", reports.len());
    json(&ConditionsOutput {
        n_comments: reports.len(),
        n_conditions,
        reports,
    })
}

#[derive(Serialize)]
struct BaselineRow<'a> {
    comment_id: &'a str,
    label: Label,
    score: f64,
    predicted: Label,
    matched: Vec<&'a str>,
}

#[derive(Serialize)]
struct BaselineOutput<'a> {
    keywords: Vec<&'a str>,
    confusion: ConfusionCounts,
    precision: Metric,
    recall: Metric,
    f1: Metric,
    auc: Metric,
    predictions: Vec<BaselineRow<'a>>,
}

pub fn baseline(cfg: &RunConfig, keywords: &[String]) -> Result<Vec<u8>, CliError> {
    let path = cfg.require_dataset()?;
    cfg.check_paths()?;
    let dict = cfg.dictionary()?;
    let ds = load_labeled(path)?;
    let kb = if keywords.is_empty() {
        KeywordBaseline::default()
    } else {
        KeywordBaseline::new(keywords.iter().map(|k| k.trim()).filter(|k| !k.is_empty()))
    };
    if kb.keywords.is_empty() {
        return Err(CliError::input("--keywords is empty"));
    }
    let corpus = preprocess_all(&ds.comments, &dict);
    let truth = labels(&ds);
    let preds = kb.classify_all(&corpus);
    // one keyword is enough to flag a comment
    let c = confusion(&preds, &truth, 1.0 / kb.keywords.len() as f64);
    let scores: Vec<f64> = preds.iter().map(|p| p.score).collect();
    let out = BaselineOutput {
        keywords: kb.keywords.iter().map(String::as_str).collect(),
        confusion: c,
        precision: precision(&c),
        recall: recall(&c),
        f1: f1(&c),
        auc: auc(&scores, &truth).map_or(Metric::undefined(), Metric::defined),
        predictions: preds
            .iter()
            .zip(&corpus)
            .zip(&truth)
            .map(|((p, a), l)| BaselineRow {
                comment_id: &a.comment_id,
                label: *l,
                score: p.score,
                predicted: p.predicted,
                matched: kb.matches(a),
            })
            .collect(),
    };
    eprintln!(
        "baseline: precision {:.4} recall {:.4} f1 {:.4}",
        out.precision.value, out.recall.value, out.f1.value
    );
    json(&out)
}

#[derive(Serialize)]
struct FeatureRow {
    rank: usize,
    gram: String,
    n: usize,
    gtf: u64,
    sdf: u64,
    weight: f64,
}

#[derive(Serialize)]
struct FeaturesOutput {
    docs: u64,
    max_n: usize,
    n_grams: usize,
    top: Vec<FeatureRow>,
}

pub fn features(cfg: &RunConfig, top: usize) -> Result<Vec<u8>, CliError> {
    let path = cfg.require_dataset()?;
    cfg.check_paths()?;
    let dict = cfg.dictionary()?;
    let ds = load_unlabeled(path)?.classification_subset();
    let corpus = preprocess_all(&ds.comments, &dict);
    let table = cfg.features.build_table(&corpus)?;
    let rows: Vec<FeatureRow> = top_features(&table, top)
        .into_iter()
        .enumerate()
        .map(|(i, e)| FeatureRow {
            rank: i + 1,
            gram: e.text(),
            n: e.gram.len(),
            gtf: e.gtf,
            sdf: e.sdf,
            weight: e.weight,
        })
        .collect();
    for r in &rows {
        eprintln!("{:>3}  {:>10.3}  {}", r.rank, r.weight, r.gram);
    }
    json(&FeaturesOutput {
        docs: table.docs(),
        max_n: table.max_n(),
        n_grams: table.len(),
        top: rows,
    })
}
