//! Shared inputs for the benchmarks.

use onhold::synthetic::{generate, SyntheticConfig};
use onhold::{preprocess_all, AbstractedComment, Comment, Label, ProductDictionary};

/// Synthetic comments of the given size, seeded so every run sees the
/// same text.
pub fn comments(n: usize) -> Vec<Comment> {
    generate(&SyntheticConfig {
        n_comments: n,
        ..SyntheticConfig::default()
    })
    .comments
}

pub fn corpus(n: usize) -> (Vec<AbstractedComment>, Vec<Label>) {
    let raw = comments(n);
    let labels = raw.iter().map(|c| c.label).collect();
    (preprocess_all(&raw, &ProductDictionary::default()), labels)
}
