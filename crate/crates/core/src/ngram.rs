//! N-gram enumeration and N-gram IDF weighting.
//!
//! All comments are concatenated into one token string with a distinct
//! separator after each comment, and a suffix array with LCP values is built
//! over it. Occurrences of a gram of length `n` are then a maximal run of
//! adjacent suffixes whose pairwise LCP is at least `n`, so counting is a
//! single scan per length. Separators are unique, so no run crosses a
//! comment boundary.
//!
//! `sdf` is the number of comments that contain every token of the gram,
//! in any order and position. It is computed by intersecting per-token
//! posting lists, and cached by token set since many grams share one.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::Serialize;
use thiserror::Error;

use crate::preprocess::AbstractedComment;

pub const DEFAULT_MAX_N: usize = 10;
pub const DEFAULT_MIN_FREQ: u64 = 2;

/// Index of an entry in an [`NGramTable`].
pub type GramId = usize;

#[derive(Debug, Error)]
pub enum NgramError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("max_n must be at least 1")]
    InvalidMaxN,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NGramEntry {
    pub gram: Vec<String>,
    pub gtf: u64,
    pub sdf: u64,
    /// `gtf * ln(D / sdf)`
    pub weight: f64,
}

impl NGramEntry {
    pub fn text(&self) -> String {
        self.gram.join(" ")
    }
}

/// Valid n-grams of a corpus, in lexicographic order of their token
/// sequences.
#[derive(Debug, Clone)]
pub struct NGramTable {
    entries: Vec<NGramEntry>,
    docs: u64,
    max_n: usize,
    vocab: HashMap<String, u32>,
    index: HashMap<Vec<u32>, GramId>,
}

impl PartialEq for NGramTable {
    fn eq(&self, other: &Self) -> bool {
        self.docs == other.docs && self.max_n == other.max_n && self.entries == other.entries
    }
}

/// Sparse feature vector of one comment, sorted by gram id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureVector {
    pub comment_id: String,
    pub weights: Vec<(GramId, f64)>,
}

impl FeatureVector {
    pub fn new(comment_id: impl Into<String>, mut weights: Vec<(GramId, f64)>) -> Self {
        weights.sort_by_key(|&(id, _)| id);
        FeatureVector {
            comment_id: comment_id.into(),
            weights,
        }
    }

    pub fn get(&self, id: GramId) -> Option<f64> {
        self.weights
            .binary_search_by_key(&id, |&(g, _)| g)
            .ok()
            .map(|i| self.weights[i].1)
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }
}

pub fn idf(docs: u64, sdf: u64) -> f64 {
    (docs as f64 / sdf as f64).ln()
}

impl NGramTable {
    /// Build a table from precomputed `(gram, gtf, sdf)` triples. Weights
    /// are recomputed.
    pub fn from_counts(
        docs: u64,
        max_n: usize,
        counts: impl IntoIterator<Item = (Vec<String>, u64, u64)>,
    ) -> Self {
        let mut entries: Vec<NGramEntry> = counts
            .into_iter()
            .map(|(gram, gtf, sdf)| NGramEntry {
                weight: gtf as f64 * idf(docs, sdf),
                gram,
                gtf,
                sdf,
            })
            .collect();
        entries.sort_by(|a, b| a.gram.cmp(&b.gram));
        entries.dedup_by(|a, b| a.gram == b.gram);
        let mut vocab = HashMap::new();
        for e in &entries {
            for t in &e.gram {
                let next = vocab.len() as u32;
                vocab.entry(t.clone()).or_insert(next);
            }
        }
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.gram.iter().map(|t| vocab[t]).collect(), i))
            .collect();
        NGramTable {
            entries,
            docs,
            max_n,
            vocab,
            index,
        }
    }

    pub fn entries(&self) -> &[NGramEntry] {
        &self.entries
    }

    pub fn entry(&self, id: GramId) -> &NGramEntry {
        &self.entries[id]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of comments the table was built from.
    pub fn docs(&self) -> u64 {
        self.docs
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn lookup(&self, gram: &[&str]) -> Option<GramId> {
        let ids: Option<Vec<u32>> = gram.iter().map(|t| self.vocab.get(*t).copied()).collect();
        self.index.get(&ids?).copied()
    }

    /// Per-comment features: `tf * ln(D / sdf)` for each table gram that
    /// occurs in the comment.
    pub fn vectorize(&self, c: &AbstractedComment) -> FeatureVector {
        let ids: Vec<Option<u32>> = c.tokens.iter().map(|t| self.vocab.get(t).copied()).collect();
        let mut tf: HashMap<GramId, u64> = HashMap::new();
        let mut window: Vec<u32> = Vec::with_capacity(self.max_n);
        for start in 0..ids.len() {
            window.clear();
            for id in ids[start..].iter().take(self.max_n) {
                let Some(id) = id else { break };
                window.push(*id);
                if let Some(&g) = self.index.get(window.as_slice()) {
                    *tf.entry(g).or_default() += 1;
                }
            }
        }
        let weights = tf
            .into_iter()
            .map(|(g, n)| (g, n as f64 * idf(self.docs, self.entries[g].sdf)))
            .collect();
        FeatureVector::new(c.comment_id.clone(), weights)
    }

    pub fn vectorize_all(&self, corpus: &[AbstractedComment]) -> Vec<FeatureVector> {
        use rayon::prelude::*;
        corpus.par_iter().map(|c| self.vectorize(c)).collect()
    }

    /// The table restricted to grams of at most `n` tokens.
    pub fn truncated(&self, n: usize) -> NGramTable {
        NGramTable::from_counts(
            self.docs,
            n.min(self.max_n),
            self.entries
                .iter()
                .filter(|e| e.gram.len() <= n)
                .map(|e| (e.gram.clone(), e.gtf, e.sdf)),
        )
    }

    /// Write the tab-separated form: a `# docs=D max_n=N` header, then one
    /// `gram \t gtf \t sdf \t weight` row per entry.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# docs={} max_n={}", self.docs, self.max_n)?;
        for e in &self.entries {
            writeln!(w, "{}\t{}\t{}\t{}", e.text(), e.gtf, e.sdf, e.weight)?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut s = format!("# docs={} max_n={}\n", self.docs, self.max_n);
        for e in &self.entries {
            let _ = writeln!(s, "{}\t{}\t{}\t{}", e.text(), e.gtf, e.sdf, e.weight);
        }
        s
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<NGramTable, NgramError> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        let (docs, max_n) = parse_header(&header).ok_or_else(|| NgramError::Parse {
            line: 1,
            reason: format!("bad header {header:?}"),
        })?;
        let mut counts = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| NgramError::Parse {
                line: i + 2,
                reason: reason.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(bad("expected 4 tab-separated columns"));
            }
            let gram: Vec<String> = cols[0].split(' ').map(str::to_string).collect();
            let gtf = cols[1].parse().map_err(|_| bad("bad gtf"))?;
            let sdf: u64 = cols[2].parse().map_err(|_| bad("bad sdf"))?;
            if sdf == 0 || sdf > docs {
                return Err(bad("sdf out of range"));
            }
            counts.push((gram, gtf, sdf));
        }
        Ok(NGramTable::from_counts(docs, max_n, counts))
    }
}

fn parse_header(h: &str) -> Option<(u64, usize)> {
    let mut docs = None;
    let mut max_n = None;
    for part in h.strip_prefix('#')?.split_whitespace() {
        match part.split_once('=')? {
            ("docs", v) => docs = v.parse().ok(),
            ("max_n", v) => max_n = v.parse().ok(),
            _ => return None,
        }
    }
    Some((docs?, max_n?))
}

/// Enumerate every contiguous gram of length `1..=max_n` occurring at least
/// `min_freq` times.
pub fn enumerate_ngrams(
    corpus: &[AbstractedComment],
    max_n: usize,
    min_freq: u64,
) -> Result<NGramTable, NgramError> {
    let docs: Vec<&[String]> = corpus.iter().map(|c| c.tokens.as_slice()).collect();
    enumerate_token_docs(&docs, max_n, min_freq)
}

/// [`enumerate_ngrams`] over bare token lists.
pub fn enumerate_token_docs<S: AsRef<str>>(
    docs: &[&[S]],
    max_n: usize,
    min_freq: u64,
) -> Result<NGramTable, NgramError> {
    if docs.is_empty() {
        return Err(NgramError::EmptyCorpus);
    }
    if max_n == 0 {
        return Err(NgramError::InvalidMaxN);
    }
    let min_freq = min_freq.max(1);

    // sorted vocabulary, so id order is string order
    let words: BTreeSet<&str> = docs.iter().flat_map(|d| d.iter().map(AsRef::as_ref)).collect();
    let words: Vec<&str> = words.into_iter().collect();
    let id_of: HashMap<&str, u32> = words.iter().enumerate().map(|(i, w)| (*w, i as u32)).collect();
    let v = words.len() as u32;

    let mut text: Vec<u32> = Vec::new();
    let mut doc_of: Vec<u32> = Vec::new();
    // tokens left before the separator, counting the current one
    let mut run: Vec<u32> = Vec::new();
    let mut postings: Vec<Vec<u32>> = vec![Vec::new(); words.len()];
    for (d, toks) in docs.iter().enumerate() {
        let n = toks.len() as u32;
        for (i, t) in toks.iter().enumerate() {
            let id = id_of[t.as_ref()];
            text.push(id);
            doc_of.push(d as u32);
            run.push(n - i as u32);
            let p = &mut postings[id as usize];
            if p.last() != Some(&(d as u32)) {
                p.push(d as u32);
            }
        }
        text.push(v + d as u32);
        doc_of.push(d as u32);
        run.push(0);
    }

    let sa = suffix_array(&text);
    let lcp = lcp_array(&text, &sa);

    let mut sdf_cache: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut counts: Vec<(Vec<String>, u64, u64)> = Vec::new();
    for n in 1..=max_n {
        let mut i = 0;
        while i < sa.len() {
            let mut j = i + 1;
            while j < sa.len() && lcp[j] as usize >= n {
                j += 1;
            }
            let start = sa[i] as usize;
            let gtf = (j - i) as u64;
            if run[start] as usize >= n && gtf >= min_freq {
                let gram = &text[start..start + n];
                let mut key: Vec<u32> = gram.to_vec();
                key.sort_unstable();
                key.dedup();
                let sdf = *sdf_cache
                    .entry(key)
                    .or_insert_with_key(|k| intersect_count(k, &postings));
                counts.push((
                    gram.iter().map(|&t| words[t as usize].to_string()).collect(),
                    gtf,
                    sdf,
                ));
            }
            i = j;
        }
    }
    Ok(NGramTable::from_counts(docs.len() as u64, max_n, counts))
}

/// Unigram table with the same settings as the full table.
pub fn build_unigram_table(corpus: &[AbstractedComment]) -> Result<NGramTable, NgramError> {
    enumerate_ngrams(corpus, 1, DEFAULT_MIN_FREQ)
}

fn intersect_count(tokens: &[u32], postings: &[Vec<u32>]) -> u64 {
    let mut lists: Vec<&Vec<u32>> = tokens.iter().map(|&t| &postings[t as usize]).collect();
    lists.sort_by_key(|l| l.len());
    let mut acc: Vec<u32> = lists[0].clone();
    for l in &lists[1..] {
        acc.retain(|d| l.binary_search(d).is_ok());
        if acc.is_empty() {
            break;
        }
    }
    acc.len() as u64
}

/// Suffix array by prefix doubling.
fn suffix_array(text: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u64> = text.iter().map(|&c| c as u64).collect();
    let mut next = vec![0u64; n];
    let mut k = 1;
    loop {
        let key = |i: u32| {
            let i = i as usize;
            let second = if i + k < n { rank[i + k] + 1 } else { 0 };
            (rank[i], second)
        };
        sa.sort_unstable_by_key(|&i| key(i));
        next[sa[0] as usize] = 0;
        for w in 1..n {
            let bump = (key(sa[w - 1]) != key(sa[w])) as u64;
            next[sa[w] as usize] = next[sa[w - 1] as usize] + bump;
        }
        std::mem::swap(&mut rank, &mut next);
        if n == 0 || rank[sa[n - 1] as usize] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

/// Kasai's algorithm. `lcp[i]` is the common prefix length of the suffixes
/// at `sa[i - 1]` and `sa[i]`; `lcp[0] = 0`.
fn lcp_array(text: &[u32], sa: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut rank = vec![0usize; n];
    for (i, &s) in sa.iter().enumerate() {
        rank[s as usize] = i;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1] as usize;
            while i + h < n && j + h < n && text[i + h] == text[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h as u32;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// The `k` heaviest entries by `gtf * ln(D / sdf)`, ties broken by gram.
pub fn top_features(t: &NGramTable, k: usize) -> Vec<&NGramEntry> {
    let mut all: Vec<&NGramEntry> = t.entries.iter().collect();
    all.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.gram.cmp(&b.gram)));
    all.truncate(k);
    all
}
