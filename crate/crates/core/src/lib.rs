//! Detection of on-hold technical debt in source code comments.
//!
//! The pipeline: [`corpus`] loads or mines comments, [`preprocess`] turns
//! them into abstracted, lemmatized token streams, [`ngram`] builds the
//! weighted n-gram table, [`model`] trains and applies classifiers, [`eval`]
//! measures them, and [`conditions`] extracts the waited-on date, release or
//! bug from comments classified as on-hold.

pub mod conditions;
pub mod corpus;
pub mod eval;
pub mod model;
pub mod ngram;
pub mod preprocess;
pub mod synthetic;

pub use conditions::{
    condition_accuracy, detect_conditions, Condition, ConditionAccuracy, ConditionKind, ConditionReport,
    GoldConditions,
};
pub use corpus::{
    deduplicate, load_dataset, load_unlabeled, mine_comments, save_dataset, Comment, CorpusError, Dataset,
    Label,
};
pub use eval::{
    auc, confusion, cross_project_validate, cross_validate, f1, precision, recall, stratified_folds,
    ClassifierKind, ConfusionCounts, EvalConfig, EvalError, EvalReport, FoldPlan, Metric,
};
pub use model::{
    fit, train, CommentClassifier, FeatureSpec, Hyperparams, KeywordBaseline, LinearModel, ModelError,
    Prediction,
};
pub use ngram::{
    build_unigram_table, enumerate_ngrams, top_features, FeatureVector, GramId, NGramEntry, NGramTable,
    NgramError,
};
pub use preprocess::{
    abstract_terms, lemmatize, preprocess, preprocess_all, AbstractedComment, AbstractionSpan,
    DictionaryError, Placeholder, ProductDictionary,
};

/// Any error the library can return.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Dictionary(#[from] DictionaryError),
    #[error(transparent)]
    Ngram(#[from] NgramError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
