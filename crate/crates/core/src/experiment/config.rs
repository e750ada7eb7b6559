//! Flat `key = value` experiment configs.
//!
//! Keys are dotted (`train.max_steps`). Blank lines and `#` comments are
//! ignored. The network comes either from `generate.*` keys or from
//! `load.*` keys, never both. Relative paths resolve against the directory
//! of the config file. Problems are collected and reported together.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::engagement::{CascadeConfig, DEFAULT_EPSILON, DEFAULT_GRID_POINTS};
use crate::graph::PlacementStrategy;
use crate::netgen::{GeneratorConfig, OpinionProfile};
use crate::policy::DEFAULT_QUERY;
use crate::ransac::RansacConfig;
use crate::trainer::TrainConfig;

pub const DEFAULT_CHECKPOINT_EVERY: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl ConfigError {
    fn single(msg: impl Into<String>) -> Self {
        Self {
            problems: vec![msg.into()],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.problems.join("; "))
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    Generate(GeneratorConfig),
    Load {
        edges: PathBuf,
        opinions: PathBuf,
        /// Louvain communities are used when absent.
        communities: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub source: NetworkSource,
    pub placement: PlacementStrategy,
    pub epsilon: f64,
    pub sweep_points: usize,
    pub train: TrainConfig,
    pub checkpoint_every: usize,
    pub query: String,
    pub templates: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// Program and arguments of an external scorer, split on whitespace.
    pub scorer_command: Option<String>,
    pub compare_texts: Option<PathBuf>,
    pub ransac: RansacConfig,
    pub ransac_input: Option<PathBuf>,
    pub ransac_x: String,
    pub ransac_y: String,
    /// Default output directory; `--out` and `RLSF_OUT` take precedence.
    pub output: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "seed",
    "network",
    "generate.n",
    "generate.profile",
    "generate.alpha",
    "generate.beta",
    "generate.homophily",
    "generate.mixing",
    "generate.avg_degree",
    "generate.max_degree",
    "generate.degree_exponent",
    "generate.community_exponent",
    "generate.min_community",
    "generate.max_community",
    "load.edges",
    "load.opinions",
    "load.communities",
    "placement.strategy",
    "cascade.epsilon",
    "sweep.points",
    "train.max_steps",
    "train.kl_threshold",
    "train.beta_kl",
    "train.batch_size",
    "train.learning_rate",
    "train.clip_ratio",
    "train.inner_epochs",
    "train.checkpoint_every",
    "policy.query",
    "policy.templates",
    "scoring.lexicon",
    "scoring.command",
    "compare.texts",
    "ransac.input",
    "ransac.x",
    "ransac.y",
    "ransac.iterations",
    "ransac.threshold",
    "ransac.min_inliers",
    "output.dir",
];

/// Raw `key → value` pairs in file order.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut pairs = BTreeMap::new();
    let mut problems = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            problems.push(format!("line {}: expected `key = value`, got {body:?}", i + 1));
            continue;
        };
        let key = key.trim().to_owned();
        let value = value.trim().to_owned();
        if !KEYS.contains(&key.as_str()) {
            problems.push(format!("line {}: unknown key {key:?}", i + 1));
        } else if pairs.insert(key.clone(), value).is_some() {
            problems.push(format!("line {}: duplicate key {key:?}", i + 1));
        }
    }
    if problems.is_empty() {
        Ok(pairs)
    } else {
        Err(ConfigError { problems })
    }
}

struct Reader<'a> {
    pairs: &'a BTreeMap<String, String>,
    base: &'a Path,
    problems: Vec<String>,
}

impl Reader<'_> {
    fn get<T: std::str::FromStr>(&mut self, key: &str, default: T) -> T {
        match self.pairs.get(key) {
            None => default,
            Some(raw) => raw.parse().unwrap_or_else(|_| {
                self.problems.push(format!("{key}: cannot parse {raw:?}"));
                default
            }),
        }
    }

    fn optional<T: std::str::FromStr>(&mut self, key: &str) -> Option<T> {
        let raw = self.pairs.get(key)?;
        match raw.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.problems.push(format!("{key}: cannot parse {raw:?}"));
                None
            }
        }
    }

    fn path(&mut self, key: &str, required: bool) -> Option<PathBuf> {
        let Some(raw) = self.pairs.get(key) else {
            if required {
                self.problems.push(format!("{key} is required"));
            }
            return None;
        };
        let joined = self.base.join(raw);
        match joined.canonicalize() {
            Ok(p) => Some(p),
            Err(_) => {
                self.problems.push(format!("{key}: file {} does not exist", joined.display()));
                None
            }
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::single(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses and validates; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let pairs = parse_pairs(text)?;
        Self::from_pairs(&pairs, base)
    }

    pub fn from_pairs(pairs: &BTreeMap<String, String>, base: &Path) -> Result<Self, ConfigError> {
        let mut r = Reader {
            pairs,
            base,
            problems: Vec::new(),
        };
        let seed: u64 = r.get("seed", 0);

        let has_generate = pairs.keys().any(|k| k.starts_with("generate."));
        let has_load = pairs.keys().any(|k| k.starts_with("load."));
        let declared = pairs.get("network").map(String::as_str);
        let kind = match (declared, has_generate, has_load) {
            (_, true, true) => {
                r.problems.push(
                    "conflicting network sources: both generate.* and load.* keys are set".into(),
                );
                None
            }
            (Some("generate"), _, false) | (None, true, false) => Some("generate"),
            (Some("load"), false, _) | (None, false, true) => Some("load"),
            (Some("generate"), _, true) | (Some("load"), true, _) => {
                r.problems.push(format!(
                    "conflicting network sources: network = {} but keys of the other source are set",
                    declared.unwrap()
                ));
                None
            }
            (Some(other), _, _) => {
                r.problems.push(format!("network: expected generate or load, got {other:?}"));
                None
            }
            (None, false, false) => {
                r.problems
                    .push("no network source: set network = generate or network = load".into());
                None
            }
        };

        let source = match kind {
            Some("generate") => {
                let n: usize = r.get("generate.n", 300);
                let mut g = GeneratorConfig::new(n, seed);
                if let Some(profile) = r.optional::<OpinionProfile>("generate.profile") {
                    g = g.with_profile(profile);
                }
                g.alpha = r.get("generate.alpha", g.alpha);
                g.beta = r.get("generate.beta", g.beta);
                g.homophily = r.get("generate.homophily", g.homophily);
                g.mixing = r.get("generate.mixing", g.mixing);
                g.avg_degree = r.get("generate.avg_degree", g.avg_degree);
                g.max_degree = r.get("generate.max_degree", g.max_degree);
                g.degree_exponent = r.get("generate.degree_exponent", g.degree_exponent);
                g.community_exponent = r.get("generate.community_exponent", g.community_exponent);
                g.min_community = r.optional("generate.min_community");
                g.max_community = r.optional("generate.max_community");
                if let Err(e) = g.validate() {
                    r.problems.push(e.to_string());
                }
                Some(NetworkSource::Generate(g))
            }
            Some(_) => {
                let edges = r.path("load.edges", true);
                let opinions = r.path("load.opinions", true);
                let communities = r.path("load.communities", false);
                edges.zip(opinions).map(|(edges, opinions)| NetworkSource::Load {
                    edges,
                    opinions,
                    communities,
                })
            }
            None => None,
        };

        let placement = r.get("placement.strategy", PlacementStrategy::Central);
        let epsilon = r.get("cascade.epsilon", DEFAULT_EPSILON);
        if let Err(e) = CascadeConfig::new(epsilon) {
            r.problems.push(e.to_string());
        }
        let sweep_points = r.get("sweep.points", DEFAULT_GRID_POINTS);
        if sweep_points < 2 {
            r.problems.push("sweep.points must be at least 2".into());
        }
        let d = TrainConfig::default();
        let train = TrainConfig {
            max_steps: r.get("train.max_steps", d.max_steps),
            kl_threshold: r.get("train.kl_threshold", d.kl_threshold),
            beta_kl: r.get("train.beta_kl", d.beta_kl),
            batch_size: r.get("train.batch_size", d.batch_size),
            learning_rate: r.get("train.learning_rate", d.learning_rate),
            clip_ratio: r.get("train.clip_ratio", d.clip_ratio),
            inner_epochs: r.get("train.inner_epochs", d.inner_epochs),
            seed,
        };
        if let Err(e) = train.validate() {
            r.problems.push(e.to_string());
        }
        let checkpoint_every = r.get("train.checkpoint_every", DEFAULT_CHECKPOINT_EVERY);
        if checkpoint_every == 0 {
            r.problems.push("train.checkpoint_every must be at least 1".into());
        }
        let query: String = r.get("policy.query", DEFAULT_QUERY.to_owned());
        let templates = r.path("policy.templates", false);
        let lexicon = r.path("scoring.lexicon", false);
        let scorer_command = pairs.get("scoring.command").cloned();
        if lexicon.is_some() && scorer_command.is_some() {
            r.problems.push("scoring.lexicon and scoring.command are mutually exclusive".into());
        }
        let compare_texts = r.path("compare.texts", false);
        let ransac_input = r.path("ransac.input", false);
        let ransac = RansacConfig {
            iterations: r.get("ransac.iterations", RansacConfig::default().iterations),
            threshold: r.optional("ransac.threshold"),
            min_inliers: r.optional("ransac.min_inliers"),
            seed,
        };
        if ransac.iterations == 0 {
            r.problems.push("ransac.iterations must be at least 1".into());
        }
        if let Some(t) = ransac.threshold {
            if t.is_nan() || t <= 0.0 {
                r.problems.push(format!("ransac.threshold = {t} must be positive"));
            }
        }
        let ransac_x = r.get("ransac.x", "simulated".to_owned());
        let ransac_y = r.get("ransac.y", "observed".to_owned());
        let output = pairs.get("output.dir").map(|d| base.join(d));

        if !r.problems.is_empty() {
            return Err(ConfigError { problems: r.problems });
        }
        Ok(Self {
            seed,
            source: source.expect("validated"),
            placement,
            epsilon,
            sweep_points,
            train,
            checkpoint_every,
            query,
            templates,
            lexicon,
            scorer_command,
            compare_texts,
            ransac,
            ransac_input,
            ransac_x,
            ransac_y,
            output,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.train.seed = seed;
        self.ransac.seed = seed;
        if let NetworkSource::Generate(g) = &mut self.source {
            g.seed = seed;
        }
        self
    }

    pub fn cascade(&self) -> CascadeConfig {
        CascadeConfig::new(self.epsilon).expect("validated")
    }

    /// Every resolved parameter as a config document that parses back to
    /// `self`. The output directory is not part of it.
    pub fn manifest(&self) -> String {
        let mut out = Vec::new();
        let mut put = |k: &str, v: String| out.push(format!("{k} = {v}"));
        put("seed", self.seed.to_string());
        match &self.source {
            NetworkSource::Generate(g) => {
                put("network", "generate".into());
                put("generate.n", g.n.to_string());
                put("generate.alpha", g.alpha.to_string());
                put("generate.beta", g.beta.to_string());
                put("generate.homophily", g.homophily.to_string());
                put("generate.mixing", g.mixing.to_string());
                put("generate.avg_degree", g.avg_degree.to_string());
                put("generate.max_degree", g.max_degree.to_string());
                put("generate.degree_exponent", g.degree_exponent.to_string());
                put("generate.community_exponent", g.community_exponent.to_string());
                if let Some(v) = g.min_community {
                    put("generate.min_community", v.to_string());
                }
                if let Some(v) = g.max_community {
                    put("generate.max_community", v.to_string());
                }
            }
            NetworkSource::Load {
                edges,
                opinions,
                communities,
            } => {
                put("network", "load".into());
                put("load.edges", edges.display().to_string());
                put("load.opinions", opinions.display().to_string());
                if let Some(c) = communities {
                    put("load.communities", c.display().to_string());
                }
            }
        }
        put("placement.strategy", self.placement.to_string());
        put("cascade.epsilon", self.epsilon.to_string());
        put("sweep.points", self.sweep_points.to_string());
        let t = &self.train;
        put("train.max_steps", t.max_steps.to_string());
        put("train.kl_threshold", t.kl_threshold.to_string());
        put("train.beta_kl", t.beta_kl.to_string());
        put("train.batch_size", t.batch_size.to_string());
        put("train.learning_rate", t.learning_rate.to_string());
        put("train.clip_ratio", t.clip_ratio.to_string());
        put("train.inner_epochs", t.inner_epochs.to_string());
        put("train.checkpoint_every", self.checkpoint_every.to_string());
        put("policy.query", self.query.clone());
        if let Some(p) = &self.templates {
            put("policy.templates", p.display().to_string());
        }
        if let Some(p) = &self.lexicon {
            put("scoring.lexicon", p.display().to_string());
        }
        if let Some(c) = &self.scorer_command {
            put("scoring.command", c.clone());
        }
        if let Some(p) = &self.compare_texts {
            put("compare.texts", p.display().to_string());
        }
        if let Some(p) = &self.ransac_input {
            put("ransac.input", p.display().to_string());
        }
        put("ransac.x", self.ransac_x.clone());
        put("ransac.y", self.ransac_y.clone());
        put("ransac.iterations", self.ransac.iterations.to_string());
        if let Some(v) = self.ransac.threshold {
            put("ransac.threshold", v.to_string());
        }
        if let Some(v) = self.ransac.min_inliers {
            put("ransac.min_inliers", v.to_string());
        }
        let mut text = out.join("\n");
        text.push('\n');
        text
    }
}
