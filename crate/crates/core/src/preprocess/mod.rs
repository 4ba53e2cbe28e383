//! Comment text to token stream: term abstraction, lemmatization and
//! special-character removal. Stop words are kept; words such as `when` and
//! `until` carry most of the on-hold signal.

mod abstraction;
mod lemma;
mod lexicon;
mod products;

use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::corpus::Comment;

pub use abstraction::{abstract_terms, AbstractionSpan, Placeholder};
pub use lemma::{irregular_count, lemma_word, lemmatize};
pub use products::{DictionaryError, ProductDictionary, DEFAULT_PRODUCTS};

use abstraction::{abstract_pieces, Piece};

/// A comment after preprocessing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbstractedComment {
    pub comment_id: String,
    /// Raw comment text the spans point into.
    pub raw: String,
    pub tokens: Vec<String>,
    /// One span per placeholder token, `position` indexing into `tokens`.
    pub spans: Vec<AbstractionSpan>,
}

impl AbstractedComment {
    pub fn is_placeholder(token: &str) -> bool {
        Placeholder::from_token(token).is_some()
    }
}

static TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@abstract[a-z]+|[A-Za-z0-9]+").unwrap());

static ALNUM: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[A-Za-z0-9]+").unwrap());

/// Split on runs of characters outside `[A-Za-z0-9]`, lowercasing the
/// pieces. Placeholder strings survive intact.
pub fn clean(text: &str) -> Vec<String> {
    TOKEN
        .find_iter(text)
        .map(|m| {
            let t = m.as_str();
            if Placeholder::from_token(t).is_some() {
                t.to_string()
            } else {
                t.trim_start_matches('@').to_ascii_lowercase()
            }
        })
        .collect()
}

/// Like [`clean`] but without placeholder protection, for text that came
/// from the source comment rather than from abstraction.
fn clean_plain(text: &str, out: &mut Vec<String>) {
    out.extend(ALNUM.find_iter(text).map(|m| m.as_str().to_ascii_lowercase()));
}

/// Full pipeline for one comment. Deterministic; span positions refer to
/// the returned token list.
pub fn preprocess(comment: &Comment, dict: &ProductDictionary) -> AbstractedComment {
    preprocess_text(&comment.id, &comment.text, dict)
}

pub fn preprocess_text(id: &str, text: &str, dict: &ProductDictionary) -> AbstractedComment {
    let mut tokens = Vec::new();
    let mut spans = Vec::new();
    for piece in abstract_pieces(text, dict) {
        match piece {
            Piece::Text(r) | Piece::Literal(r) => clean_plain(&lemmatize(&text[r]), &mut tokens),
            Piece::Term(ph, src) => {
                spans.push(AbstractionSpan {
                    placeholder: ph,
                    original: text[src.clone()].to_string(),
                    source: src,
                    position: tokens.len(),
                });
                tokens.push(ph.token().to_string());
            }
        }
    }
    AbstractedComment {
        comment_id: id.to_string(),
        raw: text.to_string(),
        tokens,
        spans,
    }
}

pub fn preprocess_all(comments: &[Comment], dict: &ProductDictionary) -> Vec<AbstractedComment> {
    use rayon::prelude::*;
    comments.par_iter().map(|c| preprocess(c, dict)).collect()
}
