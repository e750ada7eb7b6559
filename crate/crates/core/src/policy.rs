//! Content policy over discrete sentiment bins.
//!
//! The policy is a softmax over `K` logits; bin `j` stands for sentiment
//! `j / (K − 1)`. Because the support is finite, KL divergence, expected
//! reward and the objective gradient are computed exactly by enumeration.
//! Text comes from a [`TemplateRealizer`] that appends a bin-specific
//! completion to the query.

use std::io::{BufRead, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use thiserror::Error;

pub const DEFAULT_BINS: usize = 21;
/// Logit gap between the most positive and the most negative bin in the
/// reference policy.
pub const REFERENCE_RAMP: f64 = 2.0;
pub const DEFAULT_QUERY: &str = "Cats are the most";
const BUNDLED_TEMPLATES: &str = include_str!("../assets/templates.tsv");

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("a policy needs at least two bins, got {0}")]
    TooFewBins(usize),
    #[error("logit {index} is not finite")]
    NonFinite { index: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("template line {line}: expected `bin<TAB>text`, got {content:?}")]
    MalformedTemplate { line: usize, content: String },
    #[error("template line {line}: bin {bin} outside 0..{bins}")]
    BinOutOfRange { line: usize, bin: usize, bins: usize },
    #[error("no templates for bin {0}")]
    MissingTemplates(usize),
    #[error("checkpoint line {line}: cannot parse {content:?}")]
    MalformedCheckpoint { line: usize, content: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PolicyError>;

/// Sentiment represented by bin `j` of `bins`.
pub fn bin_center(j: usize, bins: usize) -> f64 {
    j as f64 / (bins - 1) as f64
}

fn check_logits(logits: &[f64]) -> Result<()> {
    if logits.len() < 2 {
        return Err(PolicyError::TooFewBins(logits.len()));
    }
    if let Some(index) = logits.iter().position(|x| !x.is_finite()) {
        return Err(PolicyError::NonFinite { index });
    }
    Ok(())
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(PolicyError::LengthMismatch { expected, actual });
    }
    Ok(())
}

fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    logits.iter().map(|x| x - lse).collect()
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    log_softmax(logits).into_iter().map(f64::exp).collect()
}

/// `Σ p log(p / q)` from two logit vectors of equal length.
fn kl_logits(p: &[f64], q: &[f64]) -> f64 {
    let lp = log_softmax(p);
    let lq = log_softmax(q);
    lp.iter()
        .zip(&lq)
        .map(|(a, b)| {
            let pa = a.exp();
            if pa == 0.0 { 0.0 } else { pa * (a - b) }
        })
        .sum::<f64>()
        .max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentPolicy {
    logits: Vec<f64>,
}

impl SentimentPolicy {
    pub fn new(logits: Vec<f64>) -> Result<Self> {
        check_logits(&logits)?;
        Ok(Self { logits })
    }

    pub fn uniform(bins: usize) -> Result<Self> {
        Self::new(vec![0.0; bins])
    }

    /// Linear ramp favouring positive bins.
    pub fn reference(bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(PolicyError::TooFewBins(bins));
        }
        Self::new((0..bins).map(|j| REFERENCE_RAMP * bin_center(j, bins)).collect())
    }

    pub fn from_snapshot(snapshot: &PolicySnapshot) -> Self {
        Self {
            logits: snapshot.logits.clone(),
        }
    }

    pub fn bins(&self) -> usize {
        self.logits.len()
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn set_logits(&mut self, logits: Vec<f64>) -> Result<()> {
        check_len(self.bins(), logits.len())?;
        check_logits(&logits)?;
        self.logits = logits;
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        softmax(&self.logits)
    }

    pub fn log_probabilities(&self) -> Vec<f64> {
        log_softmax(&self.logits)
    }

    pub fn center(&self, bin: usize) -> f64 {
        bin_center(bin, self.bins())
    }

    pub fn entropy(&self) -> f64 {
        self.log_probabilities()
            .iter()
            .map(|l| {
                let p = l.exp();
                if p == 0.0 { 0.0 } else { -p * l }
            })
            .sum()
    }

    /// Bin with the largest probability; ties resolve to the lower bin.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (j, &x) in self.logits.iter().enumerate() {
            if x > self.logits[best] {
                best = j;
            }
        }
        best
    }

    pub fn snapshot(&self) -> PolicySnapshot {
        PolicySnapshot {
            logits: self.logits.clone(),
        }
    }

    /// One logit per line.
    pub fn write_checkpoint(&self, mut out: impl Write) -> Result<()> {
        for x in &self.logits {
            writeln!(out, "{x}")?;
        }
        Ok(())
    }

    pub fn read_checkpoint(reader: impl BufRead) -> Result<Self> {
        let mut logits = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let content = line.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let x: f64 = content.parse().map_err(|_| PolicyError::MalformedCheckpoint {
                line: i + 1,
                content: content.to_owned(),
            })?;
            logits.push(x);
        }
        Self::new(logits)
    }
}

/// Frozen logits of a reference policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySnapshot {
    logits: Vec<f64>,
}

impl PolicySnapshot {
    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn bins(&self) -> usize {
        self.logits.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        softmax(&self.logits)
    }

    pub fn log_probabilities(&self) -> Vec<f64> {
        log_softmax(&self.logits)
    }
}

/// Exact `KL(policy ‖ reference)`.
pub fn kl_reference(policy: &SentimentPolicy, reference: &PolicySnapshot) -> Result<f64> {
    check_len(policy.bins(), reference.bins())?;
    Ok(kl_logits(&policy.logits, &reference.logits))
}

/// `∂ KL / ∂ logits`, i.e. `p_j (log(p_j / q_j) − KL)`.
pub fn kl_gradient(policy: &SentimentPolicy, reference: &PolicySnapshot) -> Result<Vec<f64>> {
    check_len(policy.bins(), reference.bins())?;
    let lp = policy.log_probabilities();
    let lq = reference.log_probabilities();
    let kl = kl_logits(&policy.logits, &reference.logits);
    Ok(lp
        .iter()
        .zip(&lq)
        .map(|(a, b)| a.exp() * (a - b - kl))
        .collect())
}

/// `Σ p_j r_j`.
pub fn expected_reward(policy: &SentimentPolicy, reward_per_bin: &[f64]) -> Result<f64> {
    check_len(policy.bins(), reward_per_bin.len())?;
    Ok(policy
        .probabilities()
        .iter()
        .zip(reward_per_bin)
        .map(|(p, r)| p * r)
        .sum())
}

/// `E[r] − β KL(policy ‖ reference)`.
pub fn objective(
    policy: &SentimentPolicy,
    reference: &PolicySnapshot,
    reward_per_bin: &[f64],
    beta_kl: f64,
) -> Result<f64> {
    Ok(expected_reward(policy, reward_per_bin)? - beta_kl * kl_reference(policy, reference)?)
}

/// Exact gradient of [`objective`] with respect to the logits.
pub fn analytic_objective_gradient(
    policy: &SentimentPolicy,
    reference: &PolicySnapshot,
    reward_per_bin: &[f64],
    beta_kl: f64,
) -> Result<Vec<f64>> {
    let mean = expected_reward(policy, reward_per_bin)?;
    let kl_grad = kl_gradient(policy, reference)?;
    Ok(policy
        .probabilities()
        .iter()
        .zip(reward_per_bin)
        .zip(&kl_grad)
        .map(|((p, r), g)| p * (r - mean) - beta_kl * g)
        .collect())
}

/// Per-bin completions appended to a fixed query.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateRealizer {
    query: String,
    templates: Vec<Vec<String>>,
}

impl TemplateRealizer {
    pub fn bundled() -> Self {
        Self::bundled_with_query(DEFAULT_QUERY)
    }

    /// Bundled completions after a custom query.
    pub fn bundled_with_query(query: &str) -> Self {
        Self::from_reader(query, DEFAULT_BINS, BUNDLED_TEMPLATES.as_bytes())
            .expect("bundled templates are well formed")
    }

    /// Reads `bin<TAB>completion` lines. Every bin needs a template.
    pub fn from_reader(query: &str, bins: usize, reader: impl BufRead) -> Result<Self> {
        if bins < 2 {
            return Err(PolicyError::TooFewBins(bins));
        }
        let mut templates = vec![Vec::new(); bins];
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = || PolicyError::MalformedTemplate {
                line: i + 1,
                content: line.clone(),
            };
            let (bin, text) = line.split_once('\t').ok_or_else(malformed)?;
            let bin: usize = bin.trim().parse().map_err(|_| malformed())?;
            let text = text.trim();
            if text.is_empty() {
                return Err(malformed());
            }
            if bin >= bins {
                return Err(PolicyError::BinOutOfRange { line: i + 1, bin, bins });
            }
            templates[bin].push(text.to_owned());
        }
        if let Some(bin) = templates.iter().position(Vec::is_empty) {
            return Err(PolicyError::MissingTemplates(bin));
        }
        Ok(Self {
            query: query.trim().to_owned(),
            templates,
        })
    }

    pub fn load(query: &str, bins: usize, path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(query, bins, std::io::BufReader::new(file))
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn bins(&self) -> usize {
        self.templates.len()
    }

    pub fn templates(&self, bin: usize) -> &[String] {
        &self.templates[bin]
    }

    /// Query followed by template `index` of `bin`.
    pub fn realize(&self, bin: usize, index: usize) -> String {
        format!("{} {}", self.query, self.templates[bin][index])
    }

    /// Every realised text of every bin, bin-major.
    pub fn all_texts(&self) -> impl Iterator<Item = (usize, String)> + '_ {
        (0..self.bins())
            .flat_map(move |b| (0..self.templates[b].len()).map(move |i| (b, self.realize(b, i))))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSample {
    pub bin: usize,
    /// Bin center.
    pub sentiment: f64,
    pub template: usize,
    pub text: String,
    pub log_prob: f64,
    pub ref_log_prob: f64,
}

/// Draws a bin from the policy and a template uniformly within it.
pub fn sample(
    policy: &SentimentPolicy,
    reference: &PolicySnapshot,
    realizer: &TemplateRealizer,
    rng: &mut impl Rng,
) -> Result<GenerationSample> {
    check_len(policy.bins(), realizer.bins())?;
    check_len(policy.bins(), reference.bins())?;
    let probs = policy.probabilities();
    let bin = WeightedIndex::new(&probs)
        .expect("softmax weights are finite and positive")
        .sample(rng);
    let template = rng.random_range(0..realizer.templates(bin).len());
    Ok(GenerationSample {
        bin,
        sentiment: policy.center(bin),
        template,
        text: realizer.realize(bin, template),
        log_prob: policy.log_probabilities()[bin],
        ref_log_prob: reference.log_probabilities()[bin],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{fk_grade, LexiconScorer, SentimentScorer};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_policy(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> SentimentPolicy {
        SentimentPolicy::new((0..k).map(|_| rng.random_range(-scale..scale)).collect()).unwrap()
    }

    #[test]
    fn centers_are_exact() {
        assert_eq!(bin_center(0, 21), 0.0);
        assert_eq!(bin_center(16, 21), 0.8);
        assert_eq!(bin_center(20, 21), 1.0);
        assert_eq!(bin_center(1, 21), 0.05);
    }

    #[test]
    fn reference_ramp() {
        let r = SentimentPolicy::reference(21).unwrap();
        assert_abs_diff_eq!(r.logits()[20] - r.logits()[0], 2.0, epsilon = 1e-12);
        let p = r.probabilities();
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_eq!(r.mode(), 20);
    }

    #[test]
    fn invalid_logits() {
        assert!(matches!(SentimentPolicy::new(vec![1.0]), Err(PolicyError::TooFewBins(1))));
        assert!(matches!(
            SentimentPolicy::new(vec![0.0, f64::NAN]),
            Err(PolicyError::NonFinite { index: 1 })
        ));
        let mut p = SentimentPolicy::uniform(3).unwrap();
        assert!(p.set_logits(vec![0.0; 4]).is_err());
    }

    #[test]
    fn one_hot_dominant_samples_its_bin() {
        let mut logits = vec![0.0; 21];
        logits[16] = 20.0;
        let p = SentimentPolicy::new(logits).unwrap();
        let reference = p.snapshot();
        let realizer = TemplateRealizer::bundled();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hits = (0..10_000)
            .filter(|_| sample(&p, &reference, &realizer, &mut rng).unwrap().bin == 16)
            .count();
        assert!(hits as f64 / 10_000.0 > 0.999);
    }

    #[test]
    fn uniform_sampling_within_three_sigma() {
        let p = SentimentPolicy::uniform(21).unwrap();
        let reference = p.snapshot();
        let realizer = TemplateRealizer::bundled();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 10_000;
        let mut counts = [0usize; 21];
        for _ in 0..n {
            counts[sample(&p, &reference, &realizer, &mut rng).unwrap().bin] += 1;
        }
        let q = 1.0 / 21.0;
        let sigma = (n as f64 * q * (1.0 - q)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * q).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn sampling_is_deterministic_and_consistent() {
        let p = SentimentPolicy::reference(21).unwrap();
        let reference = SentimentPolicy::uniform(21).unwrap().snapshot();
        let realizer = TemplateRealizer::bundled();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| sample(&p, &reference, &realizer, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        let a = run(9);
        assert_eq!(a, run(9));
        for s in &a {
            assert_abs_diff_eq!(s.log_prob, p.probabilities()[s.bin].ln(), epsilon = 1e-12);
            assert_abs_diff_eq!(s.ref_log_prob, (1.0f64 / 21.0).ln(), epsilon = 1e-12);
            assert_eq!(s.text, realizer.realize(s.bin, s.template));
            assert_eq!(s.sentiment, p.center(s.bin));
        }
    }

    #[test]
    fn kl_examples() {
        let p = SentimentPolicy::new(vec![0.9f64.ln(), 0.1f64.ln()]).unwrap();
        let q = SentimentPolicy::uniform(2).unwrap().snapshot();
        let expected = 0.9 * 1.8f64.ln() + 0.1 * 0.2f64.ln();
        assert_abs_diff_eq!(kl_reference(&p, &q).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.368, epsilon = 5e-4);
        assert_eq!(kl_reference(&p, &p.snapshot()).unwrap(), 0.0);
        assert!(kl_reference(&p, &SentimentPolicy::uniform(3).unwrap().snapshot()).is_err());
    }

    #[test]
    fn gibbs_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let p = random_policy(&mut rng, 21, 4.0);
            let q = random_policy(&mut rng, 21, 4.0);
            assert!(kl_reference(&p, &q.snapshot()).unwrap() >= 0.0);
        }
    }

    #[test]
    fn expected_reward_examples() {
        let mut logits = vec![-50.0; 21];
        logits[7] = 50.0;
        let det = SentimentPolicy::new(logits).unwrap();
        let r: Vec<f64> = (0..21).map(|j| j as f64 * 1.5).collect();
        assert_abs_diff_eq!(expected_reward(&det, &r).unwrap(), r[7], epsilon = 1e-9);
        let mut spike = vec![0.0; 21];
        spike[20] = 21.0;
        let uni = SentimentPolicy::uniform(21).unwrap();
        assert_abs_diff_eq!(expected_reward(&uni, &spike).unwrap(), 1.0, epsilon = 1e-12);
        assert!(expected_reward(&uni, &[1.0]).is_err());
    }

    #[test]
    fn expected_reward_matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_policy(&mut rng, 21, 1.5);
        let r: Vec<f64> = (0..21).map(|_| rng.random_range(1.0..10.0)).collect();
        let exact = expected_reward(&p, &r).unwrap();
        let dist = WeightedIndex::new(p.probabilities()).unwrap();
        let n = 1_000_000;
        let mc = (0..n).map(|_| r[dist.sample(&mut rng)]).sum::<f64>() / n as f64;
        assert!((mc - exact).abs() < 0.01 * exact, "mc {mc} exact {exact}");
    }

    #[test]
    fn gradient_zero_at_reference_with_flat_reward() {
        let p = SentimentPolicy::reference(21).unwrap();
        let g = analytic_objective_gradient(&p, &p.snapshot(), &[3.0; 21], 0.7).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = random_policy(&mut rng, 21, 2.0);
            let q = random_policy(&mut rng, 21, 2.0).snapshot();
            let r: Vec<f64> = (0..21).map(|_| rng.random_range(0.0..10.0)).collect();
            let beta = rng.random_range(0.0..1.0);
            let g = analytic_objective_gradient(&p, &q, &r, beta).unwrap();
            assert_abs_diff_eq!(g.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
            let h = 1e-5;
            for j in 0..21 {
                let mut up = p.logits().to_vec();
                let mut down = up.clone();
                up[j] += h;
                down[j] -= h;
                let f = |l: Vec<f64>| objective(&SentimentPolicy::new(l).unwrap(), &q, &r, beta).unwrap();
                let fd = (f(up) - f(down)) / (2.0 * h);
                assert!((fd - g[j]).abs() < 1e-6, "bin {j}: fd {fd} analytic {}", g[j]);
            }
        }
    }

    #[test]
    fn score_function_estimator_is_unbiased() {
        let p = SentimentPolicy::new(vec![0.3, -0.2, 0.5, 0.0, -0.4]).unwrap();
        let r = [0.0, 10.0, 1.0, 9.0, 10.0];
        let exact = analytic_objective_gradient(&p, &p.snapshot(), &r, 0.0).unwrap();
        let probs = p.probabilities();
        let dist = WeightedIndex::new(&probs).unwrap();
        let baseline = expected_reward(&p, &r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 100_000;
        let mut est = [0.0; 5];
        for _ in 0..n {
            let b = dist.sample(&mut rng);
            let adv = r[b] - baseline;
            for j in 0..5 {
                let score = if j == b { 1.0 } else { 0.0 } - probs[j];
                est[j] += adv * score / n as f64;
            }
        }
        for j in 0..5 {
            let rel = (est[j] - exact[j]).abs() / exact[j].abs();
            assert!(rel < 0.02, "bin {j}: est {} exact {} rel {rel}", est[j], exact[j]);
        }
    }

    #[test]
    fn gradient_ascent_increases_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut p = random_policy(&mut rng, 21, 1.0);
            let q = p.snapshot();
            let r: Vec<f64> = (0..21).map(|_| rng.random_range(0.0..10.0)).collect();
            let beta = 0.1;
            let mut last = objective(&p, &q, &r, beta).unwrap();
            for _ in 0..50 {
                let g = analytic_objective_gradient(&p, &q, &r, beta).unwrap();
                let next: Vec<f64> = p.logits().iter().zip(&g).map(|(x, d)| x + 0.1 * d).collect();
                p.set_logits(next).unwrap();
                let value = objective(&p, &q, &r, beta).unwrap();
                assert!(value > last, "{value} <= {last}");
                last = value;
            }
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let p = SentimentPolicy::new(vec![0.1, -2.5, 1.0 / 3.0]).unwrap();
        let mut buf = Vec::new();
        p.write_checkpoint(&mut buf).unwrap();
        assert_eq!(SentimentPolicy::read_checkpoint(buf.as_slice()).unwrap(), p);
        assert!(SentimentPolicy::read_checkpoint("0.1\nabc\n".as_bytes()).is_err());
    }

    #[test]
    fn template_parsing() {
        let r = TemplateRealizer::from_reader("Q", 2, "0\tlow one\n1\thigh one\n1\thigh two\n".as_bytes())
            .unwrap();
        assert_eq!(r.realize(1, 1), "Q high two");
        assert!(matches!(
            TemplateRealizer::from_reader("Q", 2, "0\tlow\n".as_bytes()),
            Err(PolicyError::MissingTemplates(1))
        ));
        assert!(matches!(
            TemplateRealizer::from_reader("Q", 2, "0 low\n".as_bytes()),
            Err(PolicyError::MalformedTemplate { line: 1, .. })
        ));
        assert!(matches!(
            TemplateRealizer::from_reader("Q", 2, "5\tx\n".as_bytes()),
            Err(PolicyError::BinOutOfRange { bin: 5, .. })
        ));
    }

    #[test]
    fn bundled_templates_are_faithful_and_readable() {
        let realizer = TemplateRealizer::bundled();
        let lex = LexiconScorer::bundled();
        assert_eq!(realizer.bins(), DEFAULT_BINS);
        for b in 0..realizer.bins() {
            assert!(realizer.templates(b).len() >= 5);
        }
        for (b, text) in realizer.all_texts() {
            let s = lex.score(&text).unwrap();
            assert!((s - bin_center(b, DEFAULT_BINS)).abs() <= 0.05, "{text}: {s}");
            assert!(fk_grade(&text).unwrap().grade >= 2.0, "{text}");
        }
    }

    #[test]
    fn bundled_fluency_is_bin_independent() {
        let realizer = TemplateRealizer::bundled();
        let mean = |b: usize| {
            let t = realizer.templates(b);
            (0..t.len()).map(|i| fk_grade(&realizer.realize(b, i)).unwrap().grade).sum::<f64>()
                / t.len() as f64
        };
        let first = mean(0);
        for b in 1..realizer.bins() {
            assert_abs_diff_eq!(mean(b), first, epsilon = 1e-9);
        }
    }

    proptest! {
        #[test]
        fn shift_invariance(logits in prop::collection::vec(-5.0f64..5.0, 21), c in -50.0f64..50.0,
                            reference in prop::collection::vec(-5.0f64..5.0, 21)) {
            let p = SentimentPolicy::new(logits.clone()).unwrap();
            let shifted = SentimentPolicy::new(logits.iter().map(|x| x + c).collect()).unwrap();
            let q = SentimentPolicy::new(reference).unwrap().snapshot();
            let r: Vec<f64> = (0..21).map(|j| j as f64).collect();
            for (a, b) in p.probabilities().iter().zip(shifted.probabilities()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            prop_assert!((kl_reference(&p, &q).unwrap() - kl_reference(&shifted, &q).unwrap()).abs() < 1e-9);
            prop_assert!((expected_reward(&p, &r).unwrap() - expected_reward(&shifted, &r).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn probabilities_are_a_distribution(logits in prop::collection::vec(-30.0f64..30.0, 2..40)) {
            let p = SentimentPolicy::new(logits).unwrap().probabilities();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&x| x > 0.0));
        }
    }
}
