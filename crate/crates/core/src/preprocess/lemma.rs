//! Rule-plus-lexicon English lemmatizer.
//!
//! Irregular forms are looked up first. Regular inflections (`-s`, `-es`,
//! `-ies`, `-ed`, `-ing`, `-er`, `-est`) are undone by suffix rules, with a
//! list of known base words deciding the ambiguous cases (`removed` ->
//! `remove` but `added` -> `add`). Comparative endings are only stripped when
//! the result is a known adjective, since most `-er` words are nouns.

use std::collections::{HashMap, HashSet};
use std::sync::LazyLock;

use regex::Regex;

use super::lexicon::{ADJECTIVES, BASE_WORDS, E_WORDS, IRREGULAR};

struct Lexicon {
    irregular: HashMap<&'static str, &'static str>,
    base: HashSet<&'static str>,
    adjectives: HashSet<&'static str>,
}

static LEXICON: LazyLock<Lexicon> = LazyLock::new(|| {
    let mut irregular = HashMap::new();
    let mut base: HashSet<&'static str> = HashSet::new();
    for line in IRREGULAR.lines() {
        let mut words = line.split_whitespace();
        let Some(lemma) = words.next() else { continue };
        base.insert(lemma);
        for form in words {
            irregular.insert(form, lemma);
        }
    }
    base.extend(BASE_WORDS.split_whitespace());
    base.extend(E_WORDS.split_whitespace());
    Lexicon {
        irregular,
        base,
        adjectives: ADJECTIVES.split_whitespace().collect(),
    }
});

static WORD: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"@abstract(?:date|version|bugid|url|product)|[A-Za-z0-9]+(?:'[A-Za-z]+)?").unwrap()
});

/// Number of entries in the irregular-form lexicon.
pub fn irregular_count() -> usize {
    LEXICON.irregular.len()
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(|b| b"aeiouy".contains(&b))
}

fn is_vowel(b: u8) -> bool {
    b"aeiou".contains(&b)
}

/// Guess whether a stem lost a final `e` (`remov` -> `remove`).
fn wants_final_e(stem: &str) -> bool {
    let b = stem.as_bytes();
    let n = b.len();
    if n < 2 {
        return false;
    }
    let last = b[n - 1];
    let prev = b[n - 2];
    // vowel preceded by a consonant (treating the `u` of `qu` as one)
    let single_vowel = |v: u8| {
        is_vowel(v) && (n < 3 || !is_vowel(b[n - 3]) || (b[n - 3] == b'u' && n >= 4 && b[n - 4] == b'q'))
    };
    match last {
        b'v' | b'z' | b'c' => true,
        b's' => prev != b's',
        b'l' => {
            matches!(prev, b'b' | b'd' | b'g' | b'p' | b't' | b'k' | b'f' | b'z')
                || (matches!(prev, b'i' | b'u') && single_vowel(prev))
        }
        b'g' => {
            matches!(prev, b'r' | b'd')
                || (prev == b'a' && single_vowel(prev))
                || stem.ends_with("ang")
                || stem.ends_with("eng")
        }
        b't' | b'd' | b'm' | b'n' | b'p' | b'k' => {
            let allowed: &[u8] = match last {
                b't' => b"aou",
                b'n' | b'd' | b'm' | b'p' | b'k' => b"aiou",
                _ => b"",
            };
            allowed.contains(&prev) && single_vowel(prev)
        }
        b'r' => matches!(prev, b'a' | b'u' | b'i') && single_vowel(prev) || stem.ends_with("uir"),
        b'b' => matches!(prev, b'i' | b'o') && single_vowel(prev),
        _ => false,
    }
}

fn undo_verbal(word: &str, suffix: &str) -> Option<String> {
    let lex = &*LEXICON;
    let stem = word.strip_suffix(suffix)?;
    if stem.len() < 2 || !has_vowel(stem) {
        return None;
    }
    let with_e = format!("{stem}e");
    if lex.base.contains(with_e.as_str()) {
        return Some(with_e);
    }
    if lex.base.contains(stem) {
        return Some(stem.to_string());
    }
    let b = stem.as_bytes();
    let n = b.len();
    if suffix == "ed" && b[n - 1] == b'i' {
        return Some(format!("{}y", &stem[..n - 1]));
    }
    if n >= 3 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !b"lsz".contains(&b[n - 1]) {
        return Some(stem[..n - 1].to_string());
    }
    if wants_final_e(stem) {
        return Some(with_e);
    }
    Some(stem.to_string())
}

fn undo_plural(word: &str) -> Option<String> {
    let lex = &*LEXICON;
    let n = word.len();
    if n <= 3 || word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        return None;
    }
    let stem = &word[..n - 1];
    if lex.base.contains(stem) {
        return Some(stem.to_string());
    }
    if let Some(s) = word.strip_suffix("ies") {
        if n > 4 {
            return Some(format!("{s}y"));
        }
    }
    if let Some(s) = word.strip_suffix("es") {
        if lex.base.contains(s) {
            return Some(s.to_string());
        }
        if word.ends_with("sses")
            || word.ends_with("shes")
            || word.ends_with("ches")
            || word.ends_with("xes")
            || word.ends_with("zzes")
        {
            return Some(s.to_string());
        }
    }
    Some(stem.to_string())
}

fn undo_comparative(word: &str) -> Option<String> {
    let lex = &*LEXICON;
    let stem = word.strip_suffix("est").or_else(|| word.strip_suffix("er"))?;
    let n = stem.len();
    if n < 2 {
        return None;
    }
    let mut candidates = vec![stem.to_string(), format!("{stem}e")];
    if stem.ends_with('i') {
        candidates.push(format!("{}y", &stem[..n - 1]));
    }
    if stem.as_bytes()[n - 1] == stem.as_bytes()[n - 2] {
        candidates.push(stem[..n - 1].to_string());
    }
    candidates
        .into_iter()
        .find(|c| lex.adjectives.contains(c.as_str()))
}

/// Lemma of a single lowercase alphabetic word.
pub fn lemma_word(word: &str) -> String {
    let lex = &*LEXICON;
    if let Some(lemma) = lex.irregular.get(word) {
        return lemma.to_string();
    }
    if lex.base.contains(word) || lex.adjectives.contains(word) {
        return word.to_string();
    }
    let rule = if word.ends_with("ing") {
        undo_verbal(word, "ing")
    } else if word.ends_with("ed") {
        if word.ends_with("eed") {
            // agreed -> agree, but need stays need
            let stem = &word[..word.len() - 1];
            return if lex.base.contains(stem) {
                stem.to_string()
            } else {
                word.to_string()
            };
        }
        undo_verbal(word, "ed")
    } else if word.ends_with('s') {
        undo_plural(word)
    } else if word.ends_with("er") || word.ends_with("est") {
        undo_comparative(word)
    } else {
        None
    };
    rule.unwrap_or_else(|| word.to_string())
}

fn expand_contraction(word: &str) -> String {
    let (head, tail) = word.split_once('\'').expect("caller checked");
    match tail {
        "t" if head.ends_with('n') => {
            let stem = &head[..head.len() - 1];
            let stem = match stem {
                "ca" => "can",
                "wo" => "will",
                "sha" => "shall",
                s => s,
            };
            format!("{} not", lemma_word(stem))
        }
        "ll" => format!("{} will", lemma_word(head)),
        "re" | "m" => format!("{} be", lemma_word(head)),
        "ve" => format!("{} have", lemma_word(head)),
        "d" => format!("{} would", lemma_word(head)),
        _ => lemma_word(head),
    }
}

/// Lowercase `text` and replace each alphabetic word with its lemma.
/// Placeholders, numbers and punctuation pass through unchanged.
pub fn lemmatize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for m in WORD.find_iter(text) {
        out.push_str(&text[cursor..m.start()].to_lowercase());
        let w = m.as_str();
        if w.starts_with('@') {
            out.push_str(w);
        } else {
            let lower = w.to_ascii_lowercase();
            if lower.contains('\'') {
                out.push_str(&expand_contraction(&lower));
            } else if lower.bytes().all(|b| b.is_ascii_alphabetic()) {
                out.push_str(&lemma_word(&lower));
            } else {
                out.push_str(&lower);
            }
        }
        cursor = m.end();
    }
    out.push_str(&text[cursor..].to_lowercase());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_rules() {
        let cases = [
            ("methods", "method"),
            ("removed", "remove"),
            ("added", "add"),
            ("fixed", "fix"),
            ("stopped", "stop"),
            ("copied", "copy"),
            ("committed", "commit"),
            ("using", "use"),
            ("handling", "handle"),
            ("calling", "call"),
            ("setting", "set"),
            ("classes", "class"),
            ("matches", "match"),
            ("caches", "cache"),
            ("dependencies", "dependency"),
            ("databases", "database"),
            ("uses", "use"),
            ("generated", "generate"),
            ("resolved", "resolve"),
            ("configured", "configure"),
            ("required", "require"),
            ("defined", "define"),
            ("provided", "provide"),
            ("parsing", "parse"),
            ("invoked", "invoke"),
            ("needed", "need"),
            ("agreed", "agree"),
            ("faster", "fast"),
            ("bigger", "big"),
            ("easiest", "easy"),
        ];
        for (w, l) in cases {
            assert_eq!(lemma_word(w), l, "{w}");
        }
    }

    #[test]
    fn words_left_alone() {
        for w in [
            "this", "status", "class", "string", "thing", "user", "server", "never", "after", "when",
            "until", "need", "always", "its", "bus", "focus", "develop", "todo", "x",
        ] {
            assert_eq!(lemma_word(w), w, "{w}");
        }
    }

    #[test]
    fn irregular_forms() {
        for (w, l) in [
            ("was", "be"),
            ("is", "be"),
            ("were", "be"),
            ("has", "have"),
            ("did", "do"),
            ("written", "write"),
            ("children", "child"),
            ("making", "make"),
            ("taking", "take"),
            ("better", "good"),
        ] {
            assert_eq!(lemma_word(w), l, "{w}");
        }
        assert!(irregular_count() >= 200, "{}", irregular_count());
    }

    #[test]
    fn whole_text() {
        assert_eq!(
            lemmatize("// TODO: Removed from UML 2.x"),
            "// todo: remove from uml 2.x"
        );
        assert_eq!(
            lemmatize("Fixes @abstractproduct @abstractbugid"),
            "fix @abstractproduct @abstractbugid"
        );
        assert_eq!(lemmatize("doesn't work, can't fix"), "do not work, can not fix");
    }
}
