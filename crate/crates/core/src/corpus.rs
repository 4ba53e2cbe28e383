//! Labeled comment datasets: CSV loading and saving, deduplication, and
//! mining of Java-style comments from source trees.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

/// Header every dataset CSV must carry.
pub const CSV_HEADER: [&str; 4] = ["project", "id", "text", "label"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate comment id `{0}`")]
    DuplicateId(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    OnHold,
    NotOnHold,
    NotSatd,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::OnHold => "on_hold",
            Label::NotOnHold => "not_on_hold",
            Label::NotSatd => "not_satd",
        }
    }

    pub fn is_on_hold(self) -> bool {
        self == Label::OnHold
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "on_hold" => Ok(Label::OnHold),
            "not_on_hold" => Ok(Label::NotOnHold),
            "not_satd" => Ok(Label::NotSatd),
            other => Err(CorpusError::UnknownLabel(other.to_string())),
        }
    }
}

/// One SATD comment with its annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub id: String,
    pub project: String,
    pub text: String,
    pub label: Label,
}

impl Comment {
    pub fn new(
        project: impl Into<String>,
        id: impl Into<String>,
        text: impl Into<String>,
        label: Label,
    ) -> Self {
        Comment {
            id: id.into(),
            project: project.into(),
            text: text.into(),
            label,
        }
    }

    /// Key used for duplicate detection: project plus case-folded,
    /// whitespace-collapsed text.
    pub fn dedup_key(&self) -> (String, String) {
        let text = self
            .text
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join(" ");
        (self.project.clone(), text)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub source: PathBuf,
    /// Seconds since the Unix epoch at load time.
    pub loaded_at: u64,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub comments: Vec<Comment>,
    pub provenance: Provenance,
}

/// Datasets compare field-wise on their comments; provenance records where a
/// copy came from and does not take part in equality.
impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.comments == other.comments
    }
}

impl Dataset {
    pub fn new(comments: Vec<Comment>) -> Self {
        Dataset {
            comments,
            provenance: Provenance::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.comments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comments.is_empty()
    }

    /// Comments usable for training and evaluation (`NotSatd` excluded).
    pub fn classification_subset(&self) -> Dataset {
        Dataset {
            comments: self
                .comments
                .iter()
                .filter(|c| c.label != Label::NotSatd)
                .cloned()
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn count(&self, label: Label) -> usize {
        self.comments.iter().filter(|c| c.label == label).count()
    }

    /// Distinct project names in first-appearance order.
    pub fn projects(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.comments
            .iter()
            .filter(|c| seen.insert(c.project.as_str()))
            .map(|c| c.project.clone())
            .collect()
    }
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Load a labeled dataset from a CSV file.
pub fn load_dataset(path: &Path) -> Result<Dataset, CorpusError> {
    let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut ds = read_dataset(file, true)?;
    ds.provenance = Provenance {
        source: path.to_path_buf(),
        loaded_at: now_secs(),
    };
    Ok(ds)
}

/// Load a dataset for inference. The `label` column may be absent or empty;
/// missing labels become `NotOnHold` placeholders.
pub fn load_unlabeled(path: &Path) -> Result<Dataset, CorpusError> {
    let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut ds = read_dataset(file, false)?;
    ds.provenance = Provenance {
        source: path.to_path_buf(),
        loaded_at: now_secs(),
    };
    Ok(ds)
}

/// Parse dataset CSV from any reader. With `require_labels` the header must
/// be exactly `project,id,text,label` and every label must parse.
pub fn read_dataset<R: Read>(reader: R, require_labels: bool) -> Result<Dataset, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let headers = rdr.headers().map_err(|e| malformed(1, e))?.clone();
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    let has_label = match names.as_slice() {
        ["project", "id", "text", "label"] => true,
        ["project", "id", "text"] if !require_labels => false,
        _ => {
            return Err(CorpusError::MalformedRow {
                line: 1,
                reason: format!("expected header `{}`", CSV_HEADER.join(",")),
            })
        }
    };

    let mut comments = Vec::new();
    let mut ids = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            malformed(line, e)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let project = record[0].trim();
        let id = record[1].trim();
        let text = &record[2];
        if id.is_empty() {
            return Err(CorpusError::MalformedRow {
                line,
                reason: "empty id".into(),
            });
        }
        if text.trim().is_empty() {
            return Err(CorpusError::MalformedRow {
                line,
                reason: "empty comment text".into(),
            });
        }
        let label = if has_label {
            let raw = record[3].trim();
            if raw.is_empty() && !require_labels {
                Label::NotOnHold
            } else {
                raw.parse()?
            }
        } else {
            Label::NotOnHold
        };
        if !ids.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId(id.to_string()));
        }
        comments.push(Comment::new(project, id, text, label));
    }
    Ok(Dataset::new(comments))
}

fn malformed(line: u64, e: csv::Error) -> CorpusError {
    CorpusError::MalformedRow {
        line,
        reason: e.to_string(),
    }
}

/// Serialize a dataset as CSV. Output depends only on the comments, so the
/// same dataset always yields the same bytes.
pub fn write_dataset<W: Write>(ds: &Dataset, writer: W) -> Result<(), CorpusError> {
    let mut wtr = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let io_err = |e: csv::Error| CorpusError::Io {
        path: PathBuf::from("<csv>"),
        source: std::io::Error::other(e),
    };
    wtr.write_record(CSV_HEADER).map_err(io_err)?;
    for c in &ds.comments {
        wtr.write_record([
            c.project.as_str(),
            c.id.as_str(),
            c.text.as_str(),
            c.label.as_str(),
        ])
        .map_err(io_err)?;
    }
    wtr.flush().map_err(|e| CorpusError::Io {
        path: PathBuf::from("<csv>"),
        source: e,
    })
}

pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<(), CorpusError> {
    let mut buf = Vec::new();
    write_dataset(ds, &mut buf)?;
    fs::write(path, buf).map_err(|e| CorpusError::io(path, e))
}

/// Drop repeated comments, keeping the first occurrence of each
/// `(project, normalized text)` key in input order.
pub fn deduplicate(ds: &Dataset) -> Dataset {
    let mut seen = HashSet::new();
    Dataset {
        comments: ds
            .comments
            .iter()
            .filter(|c| seen.insert(c.dedup_key()))
            .cloned()
            .collect(),
        provenance: ds.provenance.clone(),
    }
}

/// A comment found by [`mine_comments`], before it becomes a dataset row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedComment {
    /// Byte offset of the opening delimiter.
    pub offset: usize,
    /// 1-based line of the opening delimiter.
    pub line: usize,
    pub text: String,
}

/// Result of mining a source tree.
#[derive(Debug, Default)]
pub struct MineOutcome {
    pub dataset: Dataset,
    /// Files that were not valid UTF-8 and were skipped.
    pub skipped: Vec<PathBuf>,
}

/// Walk `root` and extract comments from every file whose extension is in
/// `extensions` (compared without the leading dot, case-insensitive).
pub fn mine_comments(root: &Path, extensions: &[String]) -> Result<MineOutcome, CorpusError> {
    let meta = fs::metadata(root).map_err(|e| CorpusError::io(root, e))?;
    if !meta.is_dir() {
        return Err(CorpusError::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        ));
    }
    let wanted: HashSet<String> = extensions
        .iter()
        .map(|e| e.trim_start_matches('.').to_ascii_lowercase())
        .collect();
    let project = root
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "unknown".to_string());

    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            CorpusError::Io {
                path,
                source: std::io::Error::other(e.to_string()),
            }
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let matches = entry
            .path()
            .extension()
            .map(|e| wanted.contains(&e.to_string_lossy().to_ascii_lowercase()))
            .unwrap_or(false);
        if matches {
            files.push(entry.into_path());
        }
    }
    files.sort();

    let mut out = MineOutcome::default();
    for path in files {
        let bytes = fs::read(&path).map_err(|e| CorpusError::io(&path, e))?;
        let Ok(source) = String::from_utf8(bytes) else {
            out.skipped.push(path);
            continue;
        };
        let rel = path
            .strip_prefix(root)
            .unwrap_or(&path)
            .to_string_lossy()
            .replace('\\', "/");
        for c in extract_comments(&source) {
            out.dataset.comments.push(Comment::new(
                project.clone(),
                format!("{rel}:{}", c.line),
                c.text,
                Label::NotOnHold,
            ));
        }
    }
    out.dataset.provenance = Provenance {
        source: root.to_path_buf(),
        loaded_at: now_secs(),
    };
    Ok(out)
}

#[derive(Debug)]
struct RawComment {
    offset: usize,
    line: usize,
    column: usize,
    end_line: usize,
    standalone: bool,
    block: bool,
    body: String,
}

/// Extract comments from Java-style source text, in byte-offset order.
///
/// Line comments that sit alone on consecutive lines at the same column are
/// merged into one comment. Delimiters and leading `*` gutters are removed;
/// comments that are empty after stripping are dropped.
pub fn extract_comments(source: &str) -> Vec<ExtractedComment> {
    let raw = scan_comments(source);
    let mut out: Vec<ExtractedComment> = Vec::new();
    let mut prev: Option<&RawComment> = None;
    let mut pending: Option<(usize, usize, Vec<String>)> = None;

    let flush = |pending: &mut Option<(usize, usize, Vec<String>)>, out: &mut Vec<ExtractedComment>| {
        if let Some((offset, line, lines)) = pending.take() {
            let text = lines.join("\n").trim().to_string();
            if !text.is_empty() {
                out.push(ExtractedComment { offset, line, text });
            }
        }
    };

    for rc in &raw {
        if rc.block {
            flush(&mut pending, &mut out);
            let text = strip_block(&rc.body);
            if !text.is_empty() {
                out.push(ExtractedComment {
                    offset: rc.offset,
                    line: rc.line,
                    text,
                });
            }
            prev = Some(rc);
            continue;
        }
        let body = strip_line(&rc.body);
        let continues = match (prev, pending.as_mut()) {
            (Some(p), Some(_)) => {
                !p.block
                    && p.standalone
                    && rc.standalone
                    && p.column == rc.column
                    && p.end_line + 1 == rc.line
            }
            _ => false,
        };
        if continues {
            if let Some((_, _, lines)) = pending.as_mut() {
                lines.push(body);
            }
        } else {
            flush(&mut pending, &mut out);
            pending = Some((rc.offset, rc.line, vec![body]));
        }
        prev = Some(rc);
    }
    flush(&mut pending, &mut out);
    out
}

fn strip_line(body: &str) -> String {
    strip_markers(body)
}

/// Trim whitespace and any comment markers left at either edge, such as a
/// `//` nested inside a block comment.
fn strip_markers(text: &str) -> String {
    let mut t = text.trim();
    loop {
        let before = t.len();
        t = t.trim_start_matches(['/', '*']).trim_start();
        while let Some(rest) = t.strip_suffix("*/") {
            t = rest.trim_end();
        }
        if t.len() == before {
            return t.to_string();
        }
    }
}

fn strip_block(body: &str) -> String {
    let body = body.trim_start_matches('*');
    let lines: Vec<&str> = body
        .lines()
        .map(|l| {
            let t = l.trim();
            let t = t.trim_start_matches('*');
            t.trim()
        })
        .collect();
    let start = lines.iter().position(|l| !l.is_empty());
    let end = lines.iter().rposition(|l| !l.is_empty());
    match (start, end) {
        (Some(s), Some(e)) => strip_markers(&lines[s..=e].join("\n")),
        _ => String::new(),
    }
}

/// Lexer that skips string, text-block and char literals and records the
/// raw bodies of `//` and `/* */` comments.
fn scan_comments(src: &str) -> Vec<RawComment> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let mut code_on_line = false;

    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'\n' => {
                line += 1;
                line_start = i + 1;
                code_on_line = false;
                i += 1;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                let end = src[i..].find('\n').map(|p| i + p).unwrap_or(bytes.len());
                out.push(RawComment {
                    offset: i,
                    line,
                    column: src[line_start..i].chars().count(),
                    end_line: line,
                    standalone: !code_on_line,
                    block: false,
                    body: src[i + 2..end].trim_end_matches('\r').to_string(),
                });
                i = end;
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let body_start = i + 2;
                let (body_end, next) = match src[body_start..].find("*/") {
                    Some(p) => (body_start + p, body_start + p + 2),
                    None => (bytes.len(), bytes.len()),
                };
                let body = &src[body_start..body_end];
                let newlines = body.matches('\n').count();
                out.push(RawComment {
                    offset: i,
                    line,
                    column: src[line_start..i].chars().count(),
                    end_line: line + newlines,
                    standalone: !code_on_line,
                    block: true,
                    body: body.to_string(),
                });
                if newlines > 0 {
                    line += newlines;
                    line_start = body_start + body.rfind('\n').unwrap_or(0) + 1;
                }
                i = next;
            }
            b'"' => {
                code_on_line = true;
                let (next, newlines, last_nl) = skip_string(bytes, i);
                if newlines > 0 {
                    line += newlines;
                    line_start = last_nl + 1;
                }
                i = next;
            }
            b'\'' => {
                code_on_line = true;
                i = skip_char_literal(bytes, i);
            }
            b' ' | b'\t' | b'\r' => i += 1,
            _ => {
                code_on_line = true;
                i += 1;
            }
        }
    }
    out
}

/// Skip a string literal or `"""` text block starting at `start`. Returns
/// the index after it, the number of newlines crossed, and the index of the
/// last newline crossed.
fn skip_string(bytes: &[u8], start: usize) -> (usize, usize, usize) {
    let text_block = bytes[start..].starts_with(b"\"\"\"");
    let mut i = if text_block { start + 3 } else { start + 1 };
    let mut newlines = 0;
    let mut last_nl = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'\n' if !text_block => break,
            b'\n' => {
                newlines += 1;
                last_nl = i;
                i += 1;
            }
            b'"' if text_block => {
                if bytes[i..].starts_with(b"\"\"\"") {
                    return (i + 3, newlines, last_nl);
                }
                i += 1;
            }
            b'"' => return (i + 1, newlines, last_nl),
            _ => i += 1,
        }
    }
    (i.min(bytes.len()), newlines, last_nl)
}

fn skip_char_literal(bytes: &[u8], start: usize) -> usize {
    let mut i = start + 1;
    while i < bytes.len() && i < start + 12 {
        match bytes[i] {
            b'\\' => i += 2,
            b'\'' => return i + 1,
            b'\n' => return i,
            _ => i += 1,
        }
    }
    start + 1
}
