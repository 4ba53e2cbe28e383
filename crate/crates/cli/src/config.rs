//! Run configuration: command-line flags layered over an optional
//! `key = value` file. A flag that is given always wins over the file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use onhold::eval::{DEFAULT_FOLDS, DEFAULT_MIN_ON_HOLD_RATIO, DEFAULT_TEST_FRACTION};
use onhold::{FeatureSpec, Hyperparams, ProductDictionary};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Dataset CSV with columns project,id,text[,label]
    #[arg(long, global = true, value_name = "CSV")]
    pub dataset: Option<PathBuf>,
    /// Output file (written atomically); stdout when omitted
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for every random choice; required by train and evaluate
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of shuffle-split folds
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    /// Product dictionary, one name per line
    #[arg(long, global = true, value_name = "FILE")]
    pub products: Option<PathBuf>,
    /// Split without preserving the class ratio
    #[arg(long, global = true)]
    pub no_stratify: bool,
    /// Use single-word features only
    #[arg(long, global = true)]
    pub unigram: bool,
    /// Leave-one-project-out instead of shuffle splits
    #[arg(long, global = true)]
    pub cross_project: bool,
    /// Plain-text `key = value` config file; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub products: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n_folds: usize,
    pub test_fraction: f64,
    pub stratified: bool,
    pub unigram_only: bool,
    pub cross_project: bool,
    pub min_on_hold_ratio: Option<f64>,
    pub hyperparams: Hyperparams,
    pub features: FeatureSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            products: None,
            out: None,
            seed: None,
            n_folds: DEFAULT_FOLDS,
            test_fraction: DEFAULT_TEST_FRACTION,
            stratified: true,
            unigram_only: false,
            cross_project: false,
            min_on_hold_ratio: Some(DEFAULT_MIN_ON_HOLD_RATIO),
            hyperparams: Hyperparams::default(),
            features: FeatureSpec::NGRAM,
        }
    }
}

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::input(format!("config line {line}: bad value `{value}` for `{key}`")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, CliError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::input(format!(
            "config line {line}: `{key}` expects true or false"
        ))),
    }
}

impl RunConfig {
    /// Apply `key = value` lines. Blank lines and `#` comments are skipped.
    /// Relative paths are taken relative to `base`.
    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(CliError::input(format!(
                    "config line {line}: expected `key = value`"
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            let path = || base.join(value);
            let h = &mut self.hyperparams;
            match key {
                "dataset" => self.dataset = Some(path()),
                "products" => self.products = Some(path()),
                "out" => self.out = Some(path()),
                "seed" => self.seed = Some(parse(line, key, value)?),
                "folds" => self.n_folds = parse(line, key, value)?,
                "test_fraction" => self.test_fraction = parse(line, key, value)?,
                "stratified" => self.stratified = parse_bool(line, key, value)?,
                "unigram" => self.unigram_only = parse_bool(line, key, value)?,
                "cross_project" => self.cross_project = parse_bool(line, key, value)?,
                "min_on_hold_ratio" => {
                    self.min_on_hold_ratio = match value {
                        "none" => None,
                        v => Some(parse(line, key, v)?),
                    }
                }
                "l2_lambda" => h.l2_lambda = parse(line, key, value)?,
                "learning_rate" => h.learning_rate = parse(line, key, value)?,
                "epochs" => h.epochs = parse(line, key, value)?,
                "class_weight_positive" => {
                    h.class_weight_positive = match value {
                        "auto" => None,
                        v => Some(parse(line, key, v)?),
                    }
                }
                "normalize" => h.normalize = parse_bool(line, key, value)?,
                "tolerance" => h.tolerance = parse(line, key, value)?,
                "max_n" => self.features.max_n = parse(line, key, value)?,
                "min_freq" => self.features.min_freq = parse(line, key, value)?,
                _ => {
                    return Err(CliError::input(format!(
                        "config line {line}: unknown key `{key}`"
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn resolve(args: &GlobalArgs) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new(""));
            cfg.apply_text(&text, base)?;
        }
        if args.dataset.is_some() {
            cfg.dataset = args.dataset.clone();
        }
        if args.products.is_some() {
            cfg.products = args.products.clone();
        }
        if args.out.is_some() {
            cfg.out = args.out.clone();
        }
        if args.seed.is_some() {
            cfg.seed = args.seed;
        }
        if let Some(f) = args.folds {
            cfg.n_folds = f;
        }
        if args.no_stratify {
            cfg.stratified = false;
        }
        if args.unigram {
            cfg.unigram_only = true;
        }
        if args.cross_project {
            cfg.cross_project = true;
        }
        if cfg.unigram_only {
            cfg.features.max_n = 1;
        }
        if let Some(seed) = cfg.seed {
            cfg.hyperparams.seed = seed;
        }
        cfg.hyperparams.validate()?;
        if cfg.n_folds == 0 {
            return Err(CliError::input("--folds must be at least 1"));
        }
        if cfg.features.max_n == 0 {
            return Err(CliError::input("max_n must be at least 1"));
        }
        Ok(cfg)
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::input("--seed is required for this command (no clock-based default)"))
    }

    pub fn require_dataset(&self) -> Result<&Path, CliError> {
        let p = self
            .dataset
            .as_deref()
            .ok_or_else(|| CliError::input("--dataset is required for this command"))?;
        check_file(p, "dataset")?;
        Ok(p)
    }

    /// Check the paths every command shares, before any real work starts.
    pub fn check_paths(&self) -> Result<(), CliError> {
        if let Some(p) = &self.products {
            check_file(p, "product dictionary")?;
        }
        if let Some(out) = &self.out {
            let dir = out_dir(out);
            if !dir.is_dir() {
                return Err(CliError::input(format!(
                    "output directory {} does not exist",
                    dir.display()
                )));
            }
            if out.is_dir() {
                return Err(CliError::input(format!(
                    "output path {} is a directory",
                    out.display()
                )));
            }
        }
        Ok(())
    }

    pub fn dictionary(&self) -> Result<ProductDictionary, CliError> {
        match &self.products {
            Some(p) => Ok(ProductDictionary::load(p)?),
            None => Ok(ProductDictionary::default()),
        }
    }
}

pub fn check_file(p: &Path, what: &str) -> Result<(), CliError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::input(format!("{what} {} not found", p.display())))
    }
}

pub fn out_dir(out: &Path) -> &Path {
    match out.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    }
}
