//! Classifiers: class-weighted L2 logistic regression over n-gram features,
//! and the keyword baseline.
//!
//! Training minimizes
//!
//! ```text
//! L(w, b) = (1 / C) * sum_i c_i * (log(1 + e^z_i) - y_i * z_i) + (lambda / 2) * |w|^2
//! z_i = w . x_i + b
//! ```
//!
//! where `c_i` is the positive class weight for on-hold rows and 1
//! otherwise, and `C = sum_i c_i`. Optimization is full-batch gradient
//! descent with a backtracking (Armijo) step, so the loss never increases
//! from one epoch to the next.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::Label;
use crate::ngram::{enumerate_ngrams, FeatureVector, GramId, NGramTable, NgramError, DEFAULT_MIN_FREQ};
use crate::preprocess::{lemma_word, AbstractedComment};

pub const MODEL_MAGIC: &str = "onhold-linear-model";
pub const MODEL_VERSION: u32 = 1;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training data needs both on-hold and other comments")]
    DegenerateTraining,
    #[error("loss became non-finite at epoch {epoch}; lower the learning rate")]
    NonFiniteLoss { epoch: usize },
    #[error("{vectors} vectors but {labels} labels")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparams(String),
    #[error("unsupported model file version {0:?}")]
    UnsupportedVersion(String),
    #[error("model file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Ngram(#[from] NgramError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperparams {
    pub l2_lambda: f64,
    /// Initial step of the line search.
    pub learning_rate: f64,
    pub epochs: usize,
    /// Weight of on-hold rows. `None` means negatives / positives.
    pub class_weight_positive: Option<f64>,
    pub seed: u64,
    /// Scale each feature vector to unit length before use.
    pub normalize: bool,
    /// Stop once the gradient norm drops below this.
    pub tolerance: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            l2_lambda: 1e-4,
            learning_rate: 8.0,
            epochs: 300,
            class_weight_positive: None,
            seed: 0,
            normalize: true,
            tolerance: 1e-6,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidHyperparams(m.to_string()));
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return bad("l2_lambda must be finite and >= 0");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and > 0");
        }
        if self
            .class_weight_positive
            .is_some_and(|w| !(w > 0.0 && w.is_finite()))
        {
            return bad("class_weight_positive must be finite and > 0");
        }
        Ok(())
    }
}

/// Which n-gram lengths a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureSpec {
    pub max_n: usize,
    pub min_freq: u64,
}

impl FeatureSpec {
    pub const NGRAM: FeatureSpec = FeatureSpec {
        max_n: crate::ngram::DEFAULT_MAX_N,
        min_freq: DEFAULT_MIN_FREQ,
    };
    pub const UNIGRAM: FeatureSpec = FeatureSpec {
        max_n: 1,
        min_freq: DEFAULT_MIN_FREQ,
    };

    pub fn build_table(&self, corpus: &[AbstractedComment]) -> Result<NGramTable, NgramError> {
        enumerate_ngrams(corpus, self.max_n, self.min_freq)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub comment_id: String,
    pub score: f64,
    pub predicted: Label,
}

impl Prediction {
    pub fn new(comment_id: impl Into<String>, score: f64, threshold: f64) -> Self {
        Prediction {
            comment_id: comment_id.into(),
            score,
            predicted: if score >= threshold {
                Label::OnHold
            } else {
                Label::NotOnHold
            },
        }
    }
}

/// Anything that can score a preprocessed comment.
pub trait CommentClassifier: Sync {
    fn classify(&self, c: &AbstractedComment) -> Prediction;

    fn classify_all(&self, corpus: &[AbstractedComment]) -> Vec<Prediction> {
        use rayon::prelude::*;
        corpus.par_iter().map(|c| self.classify(c)).collect()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

type Row = Vec<(GramId, f64)>;

fn prepare(v: &FeatureVector, normalize: bool) -> Row {
    let norm = v.norm();
    if normalize && norm > 0.0 {
        v.weights.iter().map(|&(g, w)| (g, w / norm)).collect()
    } else {
        v.weights.clone()
    }
}

/// The training objective over a fixed data set. Parameters are laid out as
/// `[w_0, ..., w_{d-1}, b]`.
#[derive(Debug, Clone)]
pub struct LogisticObjective {
    rows: Vec<Row>,
    targets: Vec<f64>,
    costs: Vec<f64>,
    total_cost: f64,
    dim: usize,
    l2_lambda: f64,
}

impl LogisticObjective {
    /// `rows` are sparse `(feature, value)` lists over `dim` features;
    /// `positive[i]` marks on-hold rows.
    pub fn new(
        rows: Vec<Row>,
        positive: &[bool],
        dim: usize,
        class_weight_positive: f64,
        l2_lambda: f64,
    ) -> Self {
        let targets: Vec<f64> = positive.iter().map(|&p| p as u8 as f64).collect();
        let costs: Vec<f64> = positive
            .iter()
            .map(|&p| if p { class_weight_positive } else { 1.0 })
            .collect();
        let total_cost = costs.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        LogisticObjective {
            rows,
            targets,
            costs,
            total_cost,
            dim,
            l2_lambda,
        }
    }

    /// Number of parameters, bias included.
    pub fn n_params(&self) -> usize {
        self.dim + 1
    }

    fn margin(&self, params: &[f64], row: &Row) -> f64 {
        params[self.dim] + row.iter().map(|&(g, x)| params[g] * x).sum::<f64>()
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        let data: f64 = self
            .rows
            .iter()
            .zip(&self.targets)
            .zip(&self.costs)
            .map(|((row, &y), &c)| {
                let z = self.margin(params, row);
                c * (softplus(z) - y * z)
            })
            .sum();
        let reg: f64 = params[..self.dim].iter().map(|w| w * w).sum();
        data / self.total_cost + 0.5 * self.l2_lambda * reg
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n_params()];
        for ((row, &y), &c) in self.rows.iter().zip(&self.targets).zip(&self.costs) {
            let r = c * (sigmoid(self.margin(params, row)) - y) / self.total_cost;
            for &(j, x) in row {
                g[j] += r * x;
            }
            g[self.dim] += r;
        }
        for (gj, wj) in g[..self.dim].iter_mut().zip(&params[..self.dim]) {
            *gj += self.l2_lambda * wj;
        }
        g
    }
}

/// A trained linear model together with the feature table it scores
/// against.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub table: NGramTable,
    /// One weight per table entry.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyperparams: Hyperparams,
    pub threshold: f64,
}

impl LinearModel {
    pub fn from_parts(table: NGramTable, weights: Vec<f64>, bias: f64, hyperparams: Hyperparams) -> Self {
        assert_eq!(weights.len(), table.len(), "one weight per gram");
        LinearModel {
            table,
            weights,
            bias,
            hyperparams,
            threshold: DEFAULT_THRESHOLD,
        }
    }

    /// `w . x + b` on the (optionally normalized) vector.
    pub fn decision(&self, v: &FeatureVector) -> f64 {
        self.bias
            + prepare(v, self.hyperparams.normalize)
                .iter()
                .map(|&(g, x)| self.weights[g] * x)
                .sum::<f64>()
    }

    pub fn score(&self, v: &FeatureVector) -> f64 {
        sigmoid(self.decision(v))
    }

    pub fn predict(&self, v: &FeatureVector) -> Prediction {
        Prediction::new(v.comment_id.clone(), self.score(v), self.threshold)
    }

    pub fn save<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let h = &self.hyperparams;
        writeln!(w, "{MODEL_MAGIC} v{MODEL_VERSION}")?;
        writeln!(w, "max_n {}", self.table.max_n())?;
        writeln!(w, "docs {}", self.table.docs())?;
        writeln!(w, "normalize {}", h.normalize)?;
        writeln!(w, "threshold {}", self.threshold)?;
        writeln!(w, "l2_lambda {}", h.l2_lambda)?;
        writeln!(w, "learning_rate {}", h.learning_rate)?;
        writeln!(w, "epochs {}", h.epochs)?;
        match h.class_weight_positive {
            Some(c) => writeln!(w, "class_weight_positive {c}")?,
            None => writeln!(w, "class_weight_positive auto")?,
        }
        writeln!(w, "seed {}", h.seed)?;
        writeln!(w, "bias {}", self.bias)?;
        writeln!(w, "grams {}", self.table.len())?;
        for (e, wt) in self.table.entries().iter().zip(&self.weights) {
            writeln!(w, "{}\t{}\t{}\t{}", e.text(), wt, e.gtf, e.sdf)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.save(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("model text is UTF-8")
    }

    pub fn load<R: BufRead>(r: R) -> Result<LinearModel, ModelError> {
        let mut lines = r.lines().enumerate();
        let first = lines.next().map(|(_, l)| l).transpose()?.unwrap_or_default();
        let version = first
            .strip_prefix(MODEL_MAGIC)
            .map(str::trim)
            .ok_or_else(|| ModelError::Parse {
                line: 1,
                reason: "not a model file".to_string(),
            })?;
        if version != format!("v{MODEL_VERSION}") {
            return Err(ModelError::UnsupportedVersion(version.to_string()));
        }
        let mut h = Hyperparams::default();
        let mut threshold = DEFAULT_THRESHOLD;
        let (mut max_n, mut docs, mut bias, mut grams) = (None, None, None, None);
        for (i, line) in lines.by_ref() {
            let line = line?;
            let bad = |reason: String| ModelError::Parse { line: i + 1, reason };
            let (key, value) = line
                .split_once(' ')
                .ok_or_else(|| bad(format!("expected `key value`, got {line:?}")))?;
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("bad number for {key}")));
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| bad(format!("bad integer for {key}")))
            };
            match key {
                "max_n" => max_n = Some(int(value)? as usize),
                "docs" => docs = Some(int(value)?),
                "normalize" => h.normalize = value.parse().map_err(|_| bad("bad boolean".to_string()))?,
                "threshold" => threshold = num(value)?,
                "l2_lambda" => h.l2_lambda = num(value)?,
                "learning_rate" => h.learning_rate = num(value)?,
                "epochs" => h.epochs = int(value)? as usize,
                "class_weight_positive" => {
                    h.class_weight_positive = if value == "auto" { None } else { Some(num(value)?) }
                }
                "seed" => h.seed = int(value)?,
                "bias" => bias = Some(num(value)?),
                "grams" => {
                    grams = Some(int(value)? as usize);
                    break;
                }
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        let missing = |k: &str| ModelError::Parse {
            line: 0,
            reason: format!("missing {k}"),
        };
        let max_n = max_n.ok_or_else(|| missing("max_n"))?;
        let docs = docs.ok_or_else(|| missing("docs"))?;
        let bias = bias.ok_or_else(|| missing("bias"))?;
        let grams = grams.ok_or_else(|| missing("grams"))?;
        let mut rows = Vec::with_capacity(grams);
        for (i, line) in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| ModelError::Parse {
                line: i + 1,
                reason: reason.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(bad("expected gram, weight, gtf, sdf"));
            }
            let weight: f64 = cols[1].parse().map_err(|_| bad("bad weight"))?;
            let gtf: u64 = cols[2].parse().map_err(|_| bad("bad gtf"))?;
            let sdf: u64 = cols[3].parse().map_err(|_| bad("bad sdf"))?;
            if !weight.is_finite() || sdf == 0 || sdf > docs {
                return Err(bad("value out of range"));
            }
            let gram: Vec<String> = cols[0].split(' ').map(str::to_string).collect();
            rows.push((gram, weight, gtf, sdf));
        }
        if rows.len() != grams {
            return Err(missing(&format!("{grams} gram rows, found {}", rows.len())));
        }
        // table order is lexicographic, which is how rows were written
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let weights = rows.iter().map(|r| r.1).collect();
        let table = NGramTable::from_counts(
            docs,
            max_n,
            rows.into_iter().map(|(g, _, gtf, sdf)| (g, gtf, sdf)),
        );
        if table.len() != grams {
            return Err(missing("distinct gram rows"));
        }
        let mut m = LinearModel::from_parts(table, weights, bias, h);
        m.threshold = threshold;
        Ok(m)
    }
}

impl CommentClassifier for LinearModel {
    fn classify(&self, c: &AbstractedComment) -> Prediction {
        self.predict(&self.table.vectorize(c))
    }
}

/// Loss value after each accepted step, starting with the initial loss.
pub type LossTrace = Vec<f64>;

pub fn train(
    table: NGramTable,
    vectors: &[FeatureVector],
    labels: &[Label],
    h: &Hyperparams,
) -> Result<LinearModel, ModelError> {
    train_with_trace(table, vectors, labels, h).map(|(m, _)| m)
}

pub fn train_with_trace(
    table: NGramTable,
    vectors: &[FeatureVector],
    labels: &[Label],
    h: &Hyperparams,
) -> Result<(LinearModel, LossTrace), ModelError> {
    h.validate()?;
    if vectors.len() != labels.len() {
        return Err(ModelError::LengthMismatch {
            vectors: vectors.len(),
            labels: labels.len(),
        });
    }
    let positive: Vec<bool> = labels.iter().map(|l| l.is_on_hold()).collect();
    let pos = positive.iter().filter(|&&p| p).count();
    let neg = positive.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(ModelError::DegenerateTraining);
    }
    let cw = h.class_weight_positive.unwrap_or(neg as f64 / pos as f64);
    let rows = vectors.iter().map(|v| prepare(v, h.normalize)).collect();
    let obj = LogisticObjective::new(rows, &positive, table.len(), cw, h.l2_lambda);

    let mut rng = ChaCha8Rng::seed_from_u64(h.seed);
    let mut params: Vec<f64> = (0..obj.n_params()).map(|_| rng.gen_range(-1e-3..1e-3)).collect();
    let (params, trace) = descend(&obj, &mut params, h)?;
    let bias = params[table.len()];
    let weights = params[..table.len()].to_vec();
    Ok((LinearModel::from_parts(table, weights, bias, h.clone()), trace))
}

fn descend(
    obj: &LogisticObjective,
    params: &mut [f64],
    h: &Hyperparams,
) -> Result<(Vec<f64>, LossTrace), ModelError> {
    const ARMIJO: f64 = 1e-4;
    const MAX_HALVINGS: usize = 60;
    let mut loss = obj.loss(params);
    if !loss.is_finite() {
        return Err(ModelError::NonFiniteLoss { epoch: 0 });
    }
    let mut trace = vec![loss];
    let mut step = h.learning_rate;
    let mut candidate = vec![0.0; params.len()];
    for epoch in 1..=h.epochs {
        let g = obj.gradient(params);
        let gnorm2: f64 = g.iter().map(|x| x * x).sum();
        if !gnorm2.is_finite() {
            return Err(ModelError::NonFiniteLoss { epoch });
        }
        if gnorm2.sqrt() < h.tolerance {
            break;
        }
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            for ((c, p), gi) in candidate.iter_mut().zip(params.iter()).zip(&g) {
                *c = p - step * gi;
            }
            let next = obj.loss(&candidate);
            if next.is_finite() && next <= loss - ARMIJO * step * gnorm2 {
                params.copy_from_slice(&candidate);
                loss = next;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        trace.push(loss);
        step = (step * 2.0).min(h.learning_rate);
    }
    Ok((params.to_vec(), trace))
}

/// Build the feature table from `corpus`, vectorize it and train.
pub fn fit(
    corpus: &[AbstractedComment],
    labels: &[Label],
    features: FeatureSpec,
    h: &Hyperparams,
) -> Result<LinearModel, ModelError> {
    let table = features.build_table(corpus)?;
    let vectors = table.vectorize_all(corpus);
    train(table, &vectors, labels, h)
}

/// Flags a comment when any keyword occurs among its tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeywordBaseline {
    pub keywords: BTreeSet<String>,
}

pub const DEFAULT_KEYWORDS: [&str; 8] = [
    "should",
    "when",
    "once",
    "remove",
    "workaround",
    "fixed",
    "after",
    "will",
];

impl Default for KeywordBaseline {
    fn default() -> Self {
        KeywordBaseline::new(DEFAULT_KEYWORDS)
    }
}

impl KeywordBaseline {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        KeywordBaseline {
            keywords: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    /// Keywords found in the token stream. Tokens are lemmatized, so a
    /// keyword also matches through its lemma (`fixed` through `fix`).
    pub fn matches<'a>(&'a self, c: &AbstractedComment) -> Vec<&'a str> {
        self.keywords
            .iter()
            .filter(|k| {
                let lemma = lemma_word(k);
                c.tokens.iter().any(|t| t == *k || *t == lemma)
            })
            .map(String::as_str)
            .collect()
    }
}

impl CommentClassifier for KeywordBaseline {
    /// Score is the fraction of keywords present.
    fn classify(&self, c: &AbstractedComment) -> Prediction {
        let found = self.matches(c).len();
        let score = if self.keywords.is_empty() {
            0.0
        } else {
            found as f64 / self.keywords.len() as f64
        };
        Prediction {
            comment_id: c.comment_id.clone(),
            score,
            predicted: if found > 0 {
                Label::OnHold
            } else {
                Label::NotOnHold
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{preprocess_text, ProductDictionary};
    use proptest::prelude::*;

    fn ac(id: &str, text: &str) -> AbstractedComment {
        AbstractedComment {
            comment_id: id.to_string(),
            raw: text.to_string(),
            tokens: text.split_whitespace().map(str::to_string).collect(),
            spans: Vec::new(),
        }
    }

    fn one_feature_table() -> NGramTable {
        NGramTable::from_counts(4, 1, [(vec!["g".to_string()], 2, 2)])
    }

    #[test]
    fn separable_one_dimensional() {
        let table = NGramTable::from_counts(2, 1, [(vec!["x".to_string()], 2, 1)]);
        let h = Hyperparams {
            normalize: false,
            ..Default::default()
        };
        let vs = [
            FeatureVector::new("p", vec![(0, 1.0)]),
            FeatureVector::new("n", vec![(0, -1.0)]),
        ];
        let m = train(table, &vs, &[Label::OnHold, Label::NotOnHold], &h).unwrap();
        assert!(m.score(&vs[0]) > m.score(&vs[1]));
        assert_eq!(m.predict(&vs[0]).predicted, Label::OnHold);
        assert_eq!(m.predict(&vs[1]).predicted, Label::NotOnHold);
    }

    #[test]
    fn single_class_is_degenerate() {
        let vs = [FeatureVector::new("a", vec![(0, 1.0)])];
        assert!(matches!(
            train(
                one_feature_table(),
                &vs,
                &[Label::OnHold],
                &Hyperparams::default()
            ),
            Err(ModelError::DegenerateTraining)
        ));
        assert!(matches!(
            train(one_feature_table(), &vs, &[], &Hyperparams::default()),
            Err(ModelError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn bad_hyperparams_rejected() {
        let vs = [FeatureVector::new("a", vec![]), FeatureVector::new("b", vec![])];
        let h = Hyperparams {
            learning_rate: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            train(one_feature_table(), &vs, &[Label::OnHold, Label::NotOnHold], &h),
            Err(ModelError::InvalidHyperparams(_))
        ));
    }

    #[test]
    fn xor_loss_is_monotone() {
        // four corners of the unit square with XOR labels; two features
        let table = NGramTable::from_counts(
            4,
            1,
            [(vec!["a".to_string()], 2, 2), (vec!["b".to_string()], 2, 2)],
        );
        let vs = [
            FeatureVector::new("00", vec![]),
            FeatureVector::new("01", vec![(1, 1.0)]),
            FeatureVector::new("10", vec![(0, 1.0)]),
            FeatureVector::new("11", vec![(0, 1.0), (1, 1.0)]),
        ];
        let labels = [Label::NotOnHold, Label::OnHold, Label::OnHold, Label::NotOnHold];
        let h = Hyperparams {
            learning_rate: 0.1,
            normalize: false,
            l2_lambda: 0.01,
            ..Default::default()
        };
        let (_, trace) = train_with_trace(table, &vs, &labels, &h).unwrap();
        assert!(trace.len() > 10);
        assert!(trace.windows(2).all(|w| w[1] <= w[0]), "{trace:?}");
    }

    #[test]
    fn score_examples() {
        let table = one_feature_table();
        let v = FeatureVector::new("c", vec![(0, 1.0)]);
        let zero = LinearModel::from_parts(table.clone(), vec![0.0], 0.0, Hyperparams::default());
        assert_eq!(zero.score(&v), 0.5);
        assert_eq!(zero.score(&FeatureVector::new("e", vec![])), 0.5);
        let big = LinearModel::from_parts(table.clone(), vec![1e6], 0.0, Hyperparams::default());
        assert_eq!(big.score(&v), 1.0);
        let m = LinearModel::from_parts(table, vec![3f64.ln()], 0.0, Hyperparams::default());
        assert!((m.score(&v) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn threshold_rule() {
        assert_eq!(Prediction::new("a", 0.5, 0.5).predicted, Label::OnHold);
        assert_eq!(Prediction::new("a", 0.4999, 0.5).predicted, Label::NotOnHold);
    }

    #[test]
    fn model_file_round_trip() {
        let table = NGramTable::from_counts(
            5,
            2,
            [
                (vec!["b".to_string()], 3, 2),
                (vec!["a".to_string(), "b".to_string()], 2, 2),
                (vec!["@abstractproduct".to_string()], 2, 1),
            ],
        );
        let m = LinearModel::from_parts(
            table,
            vec![0.1, -2.5e-7, 1.0 / 3.0],
            -0.75,
            Hyperparams::default(),
        );
        let text = m.to_text();
        assert!(text.starts_with("onhold-linear-model v1\n"));
        let back = LinearModel::load(text.as_bytes()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);

        let future = text.replacen("v1", "v9", 1);
        assert!(matches!(
            LinearModel::load(future.as_bytes()),
            Err(ModelError::UnsupportedVersion(v)) if v == "v9"
        ));
        assert!(LinearModel::load("hello\n".as_bytes()).is_err());
        let truncated: String = text
            .lines()
            .take(text.lines().count() - 1)
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(LinearModel::load(truncated.as_bytes()).is_err());
    }

    #[test]
    fn baseline_examples() {
        let b = KeywordBaseline::default();
        assert_eq!(b.keywords.len(), 8);
        let dict = ProductDictionary::default();
        let codemirror = preprocess_text(
            "cm",
            "Ugly workaround because CodeMirror never hides lines completely.\nTODO: Change to use CodeMirror's official workaround after\nupdating the library to latest HEAD.",
            &dict,
        );
        assert_eq!(b.classify(&codemirror).predicted, Label::OnHold);
        assert_eq!(b.matches(&codemirror), ["after", "workaround"]);
        assert_eq!(
            b.classify(&ac("n", "todo add javadoc")).predicted,
            Label::NotOnHold
        );
        assert_eq!(b.classify(&ac("n", "todo add javadoc")).score, 0.0);
        let two = b.classify(&ac("w", "check it when ready and after lunch"));
        assert_eq!(two.score, 2.0 / 8.0);
        // "fixed" is lemmatized to "fix" by preprocessing
        let fixed = preprocess_text("x", "Fixed upstream", &dict);
        assert_eq!(b.matches(&fixed), ["fixed"]);
    }

    fn instance() -> impl Strategy<Value = (Vec<Row>, Vec<bool>, usize, f64, f64, Vec<f64>)> {
        (1usize..6).prop_flat_map(|dim| {
            let row = proptest::collection::vec((0..dim, -2.0f64..2.0), 0..4);
            (
                proptest::collection::vec(row, 2..10),
                proptest::collection::vec(any::<bool>(), 10),
                Just(dim),
                0.2f64..5.0,
                0.0f64..0.5,
                proptest::collection::vec(-1.5f64..1.5, dim + 1),
            )
        })
    }

    proptest! {
        #[test]
        fn gradient_matches_finite_differences((rows, pos, dim, cw, lambda, params) in instance()) {
            let mut rows = rows;
            for r in &mut rows {
                r.sort_by_key(|e| e.0);
                r.dedup_by_key(|e| e.0);
            }
            let pos = &pos[..rows.len()];
            let obj = LogisticObjective::new(rows, pos, dim, cw, lambda);
            let g = obj.gradient(&params);
            let eps = 1e-5;
            for j in 0..obj.n_params() {
                let mut p = params.clone();
                p[j] += eps;
                let up = obj.loss(&p);
                p[j] -= 2.0 * eps;
                let down = obj.loss(&p);
                let fd = (up - down) / (2.0 * eps);
                let err = (g[j] - fd).abs() / g[j].abs().max(fd.abs()).max(1e-3);
                prop_assert!(err < 1e-6, "param {j}: analytic {} vs fd {}", g[j], fd);
            }
        }

        #[test]
        fn score_monotone_in_decision(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            if a < b {
                prop_assert!(sigmoid(a) <= sigmoid(b));
            }
            prop_assert!(sigmoid(a) > 0.0 && sigmoid(a) < 1.0 || a.abs() > 36.0);
        }
    }

    #[test]
    fn training_is_reproducible() {
        let texts = [
            "remove after a b",
            "remove after c",
            "plain x y",
            "plain z",
            "x y z",
            "after c",
        ];
        let corpus: Vec<AbstractedComment> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| ac(&i.to_string(), t))
            .collect();
        let labels = [
            Label::OnHold,
            Label::OnHold,
            Label::NotOnHold,
            Label::NotOnHold,
            Label::NotOnHold,
            Label::NotOnHold,
        ];
        let h = Hyperparams {
            seed: 42,
            ..Default::default()
        };
        let a = fit(&corpus, &labels, FeatureSpec::NGRAM, &h).unwrap();
        let b = fit(&corpus, &labels, FeatureSpec::NGRAM, &h).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert_eq!(a.classify_all(&corpus), b.classify_all(&corpus));
        assert!(a.classify(&corpus[0]).score > a.classify(&corpus[2]).score);
    }
}
