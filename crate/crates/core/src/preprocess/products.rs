use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use regex::Regex;
use thiserror::Error;

/// Product and project names treated as `@abstractproduct`. Matching is
/// case-insensitive.
pub const DEFAULT_PRODUCTS: &[&str] = &[
    "4813",
    "Ant",
    "Apache",
    "Applet",
    "Argouml",
    "Auths",
    "Bzip2",
    "Camel",
    "Columba",
    "Command.com",
    "Crlf",
    "Cvs",
    "Cxf",
    "Distribution",
    "Ebcdic",
    "Ejb",
    "Emf",
    "File1",
    "Foo.bar",
    "Gerrit",
    "Git",
    "Hadoop",
    "Hdfs",
    "Hibernate",
    "I18n",
    "Inetd",
    "Java",
    "Jaxb",
    "Jdk",
    "Jedit",
    "Jfreechart",
    "Jira",
    "Jmeter",
    "Jpa",
    "Jruby",
    "Jsp",
    "Jsps",
    "Junit",
    "Jvm",
    "Jws",
    "Kaffe",
    "Launchd",
    "Linux",
    "Log4j",
    "Mapreduce",
    "Maven",
    "Memcache",
    "Myisam",
    "Namespaced",
    "Nls",
    "Ocl",
    "Openssl",
    "Passwd",
    "Pojo",
    "Postgres",
    "Prepending",
    "Pwd",
    "Readline",
    "Rmi",
    "Servlet",
    "Servlets",
    "Solaris",
    "Solr",
    "Squirrel",
    "Ssh",
    "Svn",
    "Symlink",
    "Symlinks",
    "Tmp",
    "Tomcat",
    "Unix",
    "Usecase",
    "Utf",
    "Vim",
    "Webapp",
    "Webapps",
    "Xerces",
    "Xinetd",
    "Yarn",
];

#[derive(Debug, Error)]
pub enum DictionaryError {
    #[error("product dictionary is empty")]
    Empty,
    #[error("cannot read product dictionary {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Set of case-insensitive product names.
#[derive(Debug, Clone)]
pub struct ProductDictionary {
    names: BTreeSet<String>,
    pattern: Regex,
}

impl Default for ProductDictionary {
    fn default() -> Self {
        Self::from_words(DEFAULT_PRODUCTS.iter().copied()).expect("default list is non-empty")
    }
}

impl ProductDictionary {
    pub fn from_words<I, S>(words: I) -> Result<Self, DictionaryError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let names: BTreeSet<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        if names.is_empty() {
            return Err(DictionaryError::Empty);
        }
        Ok(ProductDictionary {
            pattern: build_pattern(&names),
            names,
        })
    }

    /// Parse the plain-text format: one word per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, DictionaryError> {
        Self::from_words(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty()),
        )
    }

    pub fn load(path: &Path) -> Result<Self, DictionaryError> {
        let text = fs::read_to_string(path).map_err(|source| DictionaryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// A copy with extra words added.
    pub fn with_words<I, S>(&self, extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::from_words(
            self.names
                .iter()
                .map(String::as_str)
                .map(str::to_string)
                .chain(extra.into_iter().map(|s| s.as_ref().to_string())),
        )
        .expect("non-empty base")
    }

    pub fn contains(&self, word: &str) -> bool {
        self.names.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub(crate) fn pattern(&self) -> &Regex {
        &self.pattern
    }
}

fn build_pattern(names: &BTreeSet<String>) -> Regex {
    let mut sorted: Vec<&String> = names.iter().collect();
    // longest first so `servlets` wins over `servlet`
    sorted.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let alternation = sorted
        .iter()
        .map(|w| regex::escape(w))
        .collect::<Vec<_>>()
        .join("|");
    Regex::new(&format!("(?i)(?:{alternation})")).expect("escaped alternation compiles")
}
