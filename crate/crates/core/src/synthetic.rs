//! Seeded generator of labeled comments with planted on-hold phrases.
//!
//! Three kinds of comment are produced:
//!
//! - on-hold comments built from phrases such as `remove in <product>
//!   <version>` or `workaround for <PRODUCT>-<number>`;
//! - decoys, which use the same words as an on-hold phrase but in an order
//!   that breaks its multi-word pattern;
//! - ordinary debt comments, heavy in words like `should`, `when` and
//!   `will`, plus IDE boilerplate.
//!
//! Decoys make single words useless for separating the classes, and the
//! ordinary comments make keyword search noisy.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Comment, Dataset, Label};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_comments: usize,
    pub on_hold_fraction: f64,
    pub decoy_fraction: f64,
    pub projects: Vec<String>,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_comments: 600,
            on_hold_fraction: 0.15,
            decoy_fraction: 0.25,
            projects: ["alpha", "beta", "gamma"].iter().map(|s| s.to_string()).collect(),
            seed: 2020,
        }
    }
}

const PRODUCTS: &[&str] = &[
    "Camel",
    "Hadoop",
    "Maven",
    "Tomcat",
    "Hibernate",
    "Solr",
    "Xerces",
    "Jruby",
];
const TRACKERS: &[&str] = &["CAMEL", "HADOOP", "YARN", "HDFS", "SOLR", "JRUBY"];
const MONTHS: &[&str] = &["January", "March", "June", "July", "September", "Dec"];

const OPENERS: &[&str] = &["TODO", "TODO:", "FIXME", "FIXME:", "XXX", "TODO -"];

const FILLERS: &[&str] = &[
    "the parser keeps its own copy of the buffer",
    "this duplicates the logic in the base class",
    "the cache key ignores the locale",
    "keep the old constructor for callers",
    "the default value is hard coded",
    "this method is too long",
    "the loop runs twice for empty input",
    "names are compared without trimming",
    "the listener is registered on every call",
    "order of the entries matters here",
];

/// Ordinary debt: keyword-heavy but with no condition.
const ORDINARY: &[&str] = &[
    "we should check the cache when the user logs in",
    "this will break once the list is empty",
    "should handle null after close",
    "when the stream is closed we will leak the handle",
    "remove this ugly hack",
    "we will need a better workaround for the retry logic",
    "should be fixed when someone has time",
    "after the refactoring this class should move",
    "once this works remove the debug output",
    "handle the error case when parsing fails",
    "this should use a builder",
    "will fail after midnight in some time zones",
    "Auto-generated method stub",
    "Auto-generated catch block",
    "Auto-generated constructor stub",
    "add javadoc",
    "works on Linux only",
    "this is not thread safe on Solaris",
    "make this configurable",
    "clean up the imports",
    "fixed size buffer is too small",
    "use a proper logger instead of System.out",
    "see {U} for the discussion",
    "copied from the reference code, see {U}",
    "slow path, details in {U}",
];

struct Slots {
    product: String,
    tracker: String,
    version: String,
    number: u32,
    bugs: String,
    url: String,
    date: String,
}

impl Slots {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let version = match rng.gen_range(0..3) {
            0 => format!("{}.{}", rng.gen_range(1..10), rng.gen_range(0..10)),
            1 => format!(
                "{}.{}.{}",
                rng.gen_range(1..10),
                rng.gen_range(0..10),
                rng.gen_range(0..20)
            ),
            _ => format!("{}.{}.x", rng.gen_range(1..10), rng.gen_range(0..10)),
        };
        let tracker = TRACKERS.choose(rng).unwrap().to_string();
        let number = rng.gen_range(100..9999);
        // most conditions cite two related issues
        let bugs = if rng.gen_bool(0.8) {
            let other = TRACKERS.choose(rng).unwrap();
            format!("{tracker}-{number} and {other}-{}", rng.gen_range(100..9999))
        } else {
            format!("{tracker}-{number}")
        };
        let url = format!(
            "https://issues.example.org/browse/{}-{}",
            TRACKERS.choose(rng).unwrap(),
            rng.gen_range(100..9999)
        );
        Slots {
            product: PRODUCTS.choose(rng).unwrap().to_string(),
            tracker,
            version,
            number,
            bugs,
            url,
            date: format!(
                "{} {} {}",
                rng.gen_range(1..29),
                MONTHS.choose(rng).unwrap(),
                rng.gen_range(2008..2021)
            ),
        }
    }

    fn fill(&self, s: &str) -> String {
        s.replace("{P}", &self.product)
            .replace("{T}", &self.tracker)
            .replace("{V}", &self.version)
            .replace("{N}", &self.number.to_string())
            .replace("{B}", &self.bugs)
            .replace("{U}", &self.url)
            .replace("{D}", &self.date)
    }
}

/// On-hold phrase segments, and the order the decoy puts them in.
const PLANTED: &[(&[&str], &[usize])] = &[
    (&["remove", "in {P} {V}"], &[1, 0]),
    (&["this can be removed", "in {P} {V}"], &[1, 0]),
    (&["workaround for", "{B}"], &[1, 0]),
    (&["remove this workaround", "for {B}"], &[1, 0]),
    (&["after {B} is fixed", "we can drop this"], &[1, 0]),
    (&["can be removed", "after {D}"], &[1, 0]),
];

fn sentence(rng: &mut ChaCha8Rng, core: String) -> String {
    let opener = OPENERS.choose(rng).unwrap();
    let mut s = format!("{opener} {core}");
    if rng.gen_bool(0.6) {
        s.push_str(". ");
        s.push_str(FILLERS.choose(rng).unwrap());
    }
    s
}

fn planted(rng: &mut ChaCha8Rng, decoy: bool) -> String {
    let (segments, decoy_order) = PLANTED.choose(rng).unwrap();
    let slots = Slots::draw(rng);
    let order: Vec<usize> = if decoy {
        decoy_order.to_vec()
    } else {
        (0..segments.len()).collect()
    };
    let core = order
        .iter()
        .map(|&i| slots.fill(segments[i]))
        .collect::<Vec<_>>()
        .join(" ");
    sentence(rng, core)
}

/// Generate a labeled dataset. Identical configs give identical datasets.
pub fn generate(cfg: &SyntheticConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_pos = (cfg.n_comments as f64 * cfg.on_hold_fraction).round() as usize;
    let n_decoy = (cfg.n_comments as f64 * cfg.decoy_fraction).round() as usize;
    let mut kinds: Vec<u8> = std::iter::repeat_n(0u8, n_pos)
        .chain(std::iter::repeat_n(1u8, n_decoy.min(cfg.n_comments - n_pos)))
        .collect();
    kinds.resize(cfg.n_comments, 2);
    kinds.shuffle(&mut rng);
    let mut seen = HashSet::new();
    let mut comments = Vec::with_capacity(kinds.len());
    for (i, kind) in kinds.iter().enumerate() {
        let project = if cfg.projects.is_empty() {
            "synthetic".to_string()
        } else {
            cfg.projects[i % cfg.projects.len()].clone()
        };
        // redraw until the comment survives deduplication
        let comment = loop {
            let (text, label) = match kind {
                0 => (planted(&mut rng, false), Label::OnHold),
                1 => (planted(&mut rng, true), Label::NotOnHold),
                _ => {
                    let core = Slots::draw(&mut rng).fill(ORDINARY.choose(&mut rng).unwrap());
                    (sentence(&mut rng, core), Label::NotOnHold)
                }
            };
            let c = Comment::new(project.clone(), format!("s{i:04}"), text, label);
            if seen.insert(c.dedup_key()) {
                break c;
            }
        };
        comments.push(comment);
    }
    Dataset::new(comments)
}
