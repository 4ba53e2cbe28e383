//! Placeholder abstraction of dates, versions, bug ids, URLs and product
//! names.
//!
//! Replacements run in a fixed order over the parts of the text that have
//! not been replaced yet:
//!
//! 1. URLs whose tail is an issue key or number become
//!    `@abstracturl @abstractbugid`;
//! 2. other URLs become `@abstracturl`;
//! 3. dates become `@abstractdate`;
//! 4. dictionary words become `@abstractproduct`;
//! 5. release versions become `@abstractversion`;
//! 6. a number that follows a product (`CAMEL-1475`, `jetty-9.3`,
//!    `Java 6`) becomes `@abstractbugid`.
//!
//! Bug ids are defined relative to an already abstracted product, so
//! products must be known before step 6, and URLs must be gone before
//! products are searched or their path segments would match. A version that
//! is glued to a product by a hyphen is left for step 6.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use super::products::ProductDictionary;

/// The five abstraction placeholders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Placeholder {
    Date,
    Version,
    BugId,
    Url,
    Product,
}

impl Placeholder {
    pub const ALL: [Placeholder; 5] = [
        Placeholder::Date,
        Placeholder::Version,
        Placeholder::BugId,
        Placeholder::Url,
        Placeholder::Product,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Placeholder::Date => "@abstractdate",
            Placeholder::Version => "@abstractversion",
            Placeholder::BugId => "@abstractbugid",
            Placeholder::Url => "@abstracturl",
            Placeholder::Product => "@abstractproduct",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.token() == token)
    }
}

/// Record of one replacement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbstractionSpan {
    pub placeholder: Placeholder,
    /// Exact text that was replaced.
    pub original: String,
    /// Byte range of `original` in the source text.
    pub source: Range<usize>,
    /// Where the placeholder sits in the output. For [`abstract_terms`] this
    /// is a byte offset into the abstracted string; after full preprocessing
    /// it is an index into the token stream.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Piece {
    /// Untouched source text.
    Text(Range<usize>),
    /// A replacement made in this pass.
    Term(Placeholder, Range<usize>),
    /// A placeholder string that was already present in the input.
    Literal(Range<usize>),
}

static PLACEHOLDER_LITERAL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"@abstract(?:date|version|bugid|url|product)").unwrap());

static URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"https?://(?:www\.)?[-a-zA-Z0-9@:%._+~#=]{2,256}\.[a-z]{2,6}\b[-a-zA-Z0-9@:%_+.~#?&/=]*")
        .unwrap()
});

static URL_BUG_TAIL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?:/(?P<key>[A-Za-z][A-Za-z0-9_]*-[0-9]+)|[?&](?:id|bug|bug_id)=(?P<qid>[0-9]+)|/(?:issues?|bugs?|pull|tickets?|browse)/(?P<num>[0-9]+))/?$",
    )
    .unwrap()
});

static DATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(concat!(
        // day.month.year
        r"(?:0[1-9]|[12][0-9]|3[01])\.(?:0[1-9]|1[0-2])\.[12][0-9]{3}",
        // day/month(/year)
        r"|(?:0[1-9]|[12][0-9]|3[01])/(?:0[1-9]|1[0-2])(?:/[12][0-9]{3})*",
        // day month year
        r"|(?:[0-2][0-9]|3[01]|[0-9])\s+(?:Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec)\w*\s+[0-9]{4}",
        // timestamp with zone offset
        r"|[0-9]+-[0-9]+-[0-9]+ [0-9]+:[0-9]+:[0-9]+ [-+|][0-9]+",
    ))
    .unwrap()
});

static VERSION: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"[0-9]{1,2}\.[0-9]{1,2}(?:[+-]|\.[0-9]{1,3}|\.[A-Za-z]{1,2})*(?:_[0-9]{1,3})*").unwrap()
});

static HYPHEN_LEAD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[ \t]*-[ \t]*$").unwrap());

static BUG_AFTER_PRODUCT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:[ \t]*-[ \t]*(?P<dotted>[0-9]+(?:\.[0-9]+)*)|[ \t]*(?P<plain>[0-9]+))").unwrap()
});

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

fn char_before(s: &str, at: usize) -> Option<char> {
    s[..at].chars().next_back()
}

fn char_at(s: &str, at: usize) -> Option<char> {
    s[at..].chars().next()
}

/// `.` followed by a letter or digit, as in `java.util` or `1.2`.
fn dotted_continuation(s: &str, at: usize) -> bool {
    let mut it = s[at..].chars();
    it.next() == Some('.') && it.next().is_some_and(is_word)
}

/// Scan `seg` for matches of `re`, keeping those `accept` approves (possibly
/// narrowed). A rejected candidate is retried one character later.
fn bounded_matches(
    re: &Regex,
    seg: &str,
    accept: impl Fn(&str, Range<usize>) -> Option<Range<usize>>,
) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start <= seg.len() {
        let Some(m) = re.find_at(seg, start) else {
            break;
        };
        if m.is_empty() {
            start = m.end() + char_at(seg, m.end()).map_or(1, char::len_utf8);
            continue;
        }
        match accept(seg, m.range()) {
            Some(r) if !r.is_empty() => {
                start = r.end;
                out.push(r);
            }
            _ => start = m.start() + char_at(seg, m.start()).map_or(1, char::len_utf8),
        }
    }
    out
}

/// Replacement produced by one step: the range consumed in the segment and
/// the placeholders that stand in for it, with their source ranges.
type Replacement = (Range<usize>, Vec<(Placeholder, Range<usize>)>);

/// Apply `find` to every text piece and splice in its replacements.
fn rewrite(
    text: &str,
    pieces: Vec<Piece>,
    mut find: impl FnMut(&str, Option<&Piece>) -> Vec<Replacement>,
) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let Piece::Text(range) = piece else {
            out.push(piece);
            continue;
        };
        let seg = &text[range.clone()];
        let reps = find(seg, out.last());
        if reps.is_empty() {
            out.push(Piece::Text(range));
            continue;
        }
        let base = range.start;
        let mut cursor = 0;
        for (consumed, terms) in reps {
            if consumed.start > cursor {
                out.push(Piece::Text(base + cursor..base + consumed.start));
            }
            for (ph, src) in terms {
                out.push(Piece::Term(ph, base + src.start..base + src.end));
            }
            cursor = consumed.end;
        }
        if cursor < seg.len() {
            out.push(Piece::Text(base + cursor..range.end));
        }
    }
    out
}

fn split_literals(text: &str) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let mut cursor = 0;
    for m in PLACEHOLDER_LITERAL.find_iter(text) {
        if char_at(text, m.end()).is_some_and(is_word) {
            continue;
        }
        if m.start() > cursor {
            pieces.push(Piece::Text(cursor..m.start()));
        }
        pieces.push(Piece::Literal(m.range()));
        cursor = m.end();
    }
    if cursor < text.len() {
        pieces.push(Piece::Text(cursor..text.len()));
    }
    pieces
}

fn url_step(seg: &str, _prev: Option<&Piece>) -> Vec<Replacement> {
    bounded_matches(&URL, seg, |s, r| {
        let trimmed = s[r.clone()].trim_end_matches(['.', ',', ';', ':', '?', '!']);
        Some(r.start..r.start + trimmed.len())
    })
    .into_iter()
    .map(|r| {
        let url = &seg[r.clone()];
        let mut terms = vec![(Placeholder::Url, r.clone())];
        if let Some(caps) = URL_BUG_TAIL.captures(url) {
            let id = caps
                .name("key")
                .or_else(|| caps.name("qid"))
                .or_else(|| caps.name("num"))
                .expect("one alternative matched");
            terms.push((Placeholder::BugId, r.start + id.start()..r.start + id.end()));
        }
        (r, terms)
    })
    .collect()
}

fn date_step(seg: &str, _prev: Option<&Piece>) -> Vec<Replacement> {
    bounded_matches(&DATE, seg, |s, r| {
        let left_ok = !char_before(s, r.start).is_some_and(is_word);
        let right_ok = !char_at(s, r.end).is_some_and(is_word);
        (left_ok && right_ok).then_some(r)
    })
    .into_iter()
    .map(|r| (r.clone(), vec![(Placeholder::Date, r)]))
    .collect()
}

fn product_step(dict: &ProductDictionary) -> impl Fn(&str, Option<&Piece>) -> Vec<Replacement> + '_ {
    move |seg, _prev| {
        bounded_matches(dict.pattern(), seg, |s, r| {
            let left_ok = !char_before(s, r.start).is_some_and(|c| is_word(c) || "._@$".contains(c));
            let right_ok =
                !char_at(s, r.end).is_some_and(|c| is_word(c) || c == '_') && !dotted_continuation(s, r.end);
            (left_ok && right_ok).then_some(r)
        })
        .into_iter()
        .map(|r| (r.clone(), vec![(Placeholder::Product, r)]))
        .collect()
    }
}

fn version_step(seg: &str, prev: Option<&Piece>) -> Vec<Replacement> {
    let after_product = matches!(prev, Some(Piece::Term(Placeholder::Product, _)));
    bounded_matches(&VERSION, seg, |s, r| {
        if char_before(s, r.start).is_some_and(|c| is_word(c) || c == '.' || c == '_') {
            return None;
        }
        if after_product && HYPHEN_LEAD.is_match(&s[..r.start]) {
            return None;
        }
        let mut end = r.end;
        loop {
            let blocked =
                char_at(s, end).is_some_and(|c| is_word(c) || c == '_') || dotted_continuation(s, end);
            if !blocked {
                break;
            }
            // a trailing `-` or `+` may belong to what follows, e.g. `1.2-1.3`
            match s[r.start..end].chars().next_back() {
                Some('-' | '+') => end -= 1,
                _ => return None,
            }
        }
        Some(r.start..end)
    })
    .into_iter()
    .map(|r| (r.clone(), vec![(Placeholder::Version, r)]))
    .collect()
}

fn bug_after_product_step(seg: &str, prev: Option<&Piece>) -> Vec<Replacement> {
    if !matches!(prev, Some(Piece::Term(Placeholder::Product, _))) {
        return Vec::new();
    }
    let Some(caps) = BUG_AFTER_PRODUCT.captures(seg) else {
        return Vec::new();
    };
    let whole = caps.get(0).expect("group 0");
    let (digits, plain) = match (caps.name("dotted"), caps.name("plain")) {
        (Some(d), _) => (d, false),
        (None, Some(p)) => (p, true),
        (None, None) => return Vec::new(),
    };
    let end = whole.end();
    if char_at(seg, end).is_some_and(|c| is_word(c) || c == '_') {
        return Vec::new();
    }
    if plain && dotted_continuation(seg, end) {
        return Vec::new();
    }
    vec![(0..end, vec![(Placeholder::BugId, digits.range())])]
}

/// Run all replacement steps and return the resulting pieces.
pub(crate) fn abstract_pieces(text: &str, dict: &ProductDictionary) -> Vec<Piece> {
    let pieces = split_literals(text);
    let pieces = rewrite(text, pieces, url_step);
    let pieces = rewrite(text, pieces, date_step);
    let pieces = rewrite(text, pieces, product_step(dict));
    let pieces = rewrite(text, pieces, version_step);
    rewrite(text, pieces, bug_after_product_step)
}

/// Replace dates, versions, bug ids, URLs and product names with their
/// placeholders. Returns the abstracted text and one span per replacement,
/// positioned by byte offset in the returned string.
pub fn abstract_terms(text: &str, dict: &ProductDictionary) -> (String, Vec<AbstractionSpan>) {
    let pieces = abstract_pieces(text, dict);
    let mut out = String::with_capacity(text.len());
    let mut spans = Vec::new();
    let mut prev_was_placeholder = false;
    for piece in &pieces {
        match piece {
            Piece::Text(r) => {
                out.push_str(&text[r.clone()]);
                prev_was_placeholder = false;
            }
            Piece::Term(ph, src) => {
                if prev_was_placeholder {
                    out.push(' ');
                }
                spans.push(AbstractionSpan {
                    placeholder: *ph,
                    original: text[src.clone()].to_string(),
                    source: src.clone(),
                    position: out.len(),
                });
                out.push_str(ph.token());
                prev_was_placeholder = true;
            }
            Piece::Literal(r) => {
                if prev_was_placeholder {
                    out.push(' ');
                }
                out.push_str(&text[r.clone()]);
                prev_was_placeholder = true;
            }
        }
    }
    (out, spans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abs(text: &str) -> String {
        abstract_terms(text, &ProductDictionary::default()).0
    }

    fn with_jetty() -> ProductDictionary {
        ProductDictionary::default().with_words(["jetty"])
    }

    #[test]
    fn issue_key_becomes_product_and_bug() {
        let (out, spans) = abstract_terms("TODO: CAMEL-1475 should fix this", &ProductDictionary::default());
        assert_eq!(out, "TODO: @abstractproduct @abstractbugid should fix this");
        let originals: Vec<_> = spans.iter().map(|s| s.original.as_str()).collect();
        assert_eq!(originals, ["CAMEL", "1475"]);
    }

    #[test]
    fn date_forms() {
        for d in [
            "21.02.2011",
            "25/05",
            "22/05/2012",
            "23 June 2013",
            "2006-03-06 23:16:24 +0100",
        ] {
            assert_eq!(abs(d), "@abstractdate", "{d}");
        }
        assert_eq!(
            abs("Can be removed after 26 June 2013"),
            "Can be removed after @abstractdate"
        );
    }

    #[test]
    fn version_forms() {
        for v in ["1.9.3", "4.0", "8.0.x", "1.0.12_25"] {
            assert_eq!(abs(v), "@abstractversion", "{v}");
        }
        assert_eq!(abs("UML 2.x"), "UML 2.x");
        assert_eq!(abs("192.168.0.1"), "192.168.0.1");
        assert_eq!(
            abs("workaround for Java 1.2-1.3"),
            "workaround for @abstractproduct @abstractversion-@abstractversion"
        );
    }

    #[test]
    fn hyphenated_product_number_is_bug_id() {
        let (out, spans) = abstract_terms("jetty-9.3", &with_jetty());
        assert_eq!(out, "@abstractproduct @abstractbugid");
        assert_eq!(spans[1].original, "9.3");
        assert_eq!(abs("in Camel 3.0"), "in @abstractproduct @abstractversion");
        assert_eq!(
            abs("fixed in Java 6."),
            "fixed in @abstractproduct @abstractbugid."
        );
    }

    #[test]
    fn urls() {
        assert_eq!(
            abs("see https://www.example.org/docs/page.html"),
            "see @abstracturl"
        );
        let (out, spans) = abstract_terms(
            "or the Spring bug http://jira.springframework.org/browse/SPR-4599 is resolved",
            &ProductDictionary::default(),
        );
        assert_eq!(out, "or the Spring bug @abstracturl @abstractbugid is resolved");
        assert_eq!(spans[1].original, "SPR-4599");
        assert_eq!(
            abs("https://bz.apache.org/bugzilla/show_bug.cgi?id=47165."),
            "@abstracturl @abstractbugid."
        );
        // product names inside URLs are not products
        assert_eq!(abs("https://camel.apache.org/x"), "@abstracturl");
    }

    #[test]
    fn product_boundaries() {
        assert_eq!(abs("works on Linux only"), "works on @abstractproduct only");
        assert_eq!(abs("org.apache.camel.Foo"), "org.apache.camel.Foo");
        assert_eq!(abs("see log4j.properties"), "see log4j.properties");
        assert_eq!(abs("Servlets and JDK."), "@abstractproduct and @abstractproduct.");
        assert_eq!(abs("camelCase"), "camelCase");
    }

    #[test]
    fn untouched_text() {
        let (out, spans) = abstract_terms("no markers here", &ProductDictionary::default());
        assert_eq!(out, "no markers here");
        assert!(spans.is_empty());
    }

    #[test]
    fn table_eight_rows() {
        assert_eq!(
            abs("// TODO cmueller:, remove the \"httpBindingRef\" look up in Camel 3.0"),
            "// TODO cmueller:, remove the \"httpBindingRef\" look up in @abstractproduct @abstractversion"
        );
        assert_eq!(
            abs("// FIXME (CAMEL-3091): @Test"),
            "// FIXME (@abstractproduct @abstractbugid): @Test"
        );
    }

    fn noisy_text() -> impl Strategy<Value = String> {
        let atoms = prop_oneof![
            Just("CAMEL-1475".to_string()),
            Just("jetty-9.3".to_string()),
            Just("Camel 3.0".to_string()),
            Just("21.02.2011".to_string()),
            Just("25/05".to_string()),
            Just("23 June 2013".to_string()),
            Just("1.0.12_25".to_string()),
            Just("8.0.x".to_string()),
            Just("http://issues.apache.org/jira/browse/CAMEL-5553".to_string()),
            Just("https://example.com/a?b=c".to_string()),
            Just("Java 6".to_string()),
            Just("@abstractproduct".to_string()),
            "[a-zA-Z0-9 .,:/_+-]{0,8}",
        ];
        proptest::collection::vec(atoms, 0..10).prop_map(|v| v.join(" "))
    }

    proptest! {
        #[test]
        fn idempotent(text in noisy_text()) {
            let dict = with_jetty();
            let (once, _) = abstract_terms(&text, &dict);
            let (twice, spans) = abstract_terms(&once, &dict);
            prop_assert_eq!(&twice, &once);
            prop_assert!(spans.is_empty());
        }

        #[test]
        fn spans_are_exact_substrings(text in noisy_text()) {
            let (out, spans) = abstract_terms(&text, &with_jetty());
            let mut last = None;
            for s in &spans {
                prop_assert!(!s.original.is_empty());
                prop_assert_eq!(&text[s.source.clone()], s.original.as_str());
                prop_assert!(out[s.position..].starts_with(s.placeholder.token()));
                prop_assert!(last.is_none_or(|p| p < s.position));
                last = Some(s.position);
            }
        }
    }
}
