//! Fine-tuning loop: sample, score, propagate, reward, clipped update.
//!
//! Each step draws a batch from the current policy, scores each realised
//! text for sentiment and fluency, runs the cascade from the injection node
//! and rewards the sample with `sqrt(max(f, 0) · |A|)`. Advantages are taken
//! against an exponential moving average of past rewards, updated once per
//! sample in batch order and seeded with the first batch mean. Training stops at
//! `max_steps` or once the exact KL to the reference reaches the threshold.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engagement::{propagate, CascadeConfig, EngagementError};
use crate::graph::{NodeId, OpinionVector, SocialNetwork};
use crate::policy::{
    kl_gradient, kl_reference, sample, GenerationSample, PolicyError, PolicySnapshot,
    SentimentPolicy, TemplateRealizer,
};
use crate::scoring::{fk_grade, reward, score_sentiment, ScoringError, SentimentScorer};

pub const DEFAULT_KL_THRESHOLD: f64 = 5.0;
pub const BASELINE_DECAY: f64 = 0.9;
pub const MOVING_AVERAGE_WINDOW: usize = 15;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("scoring sample {text:?} failed")]
    Scoring {
        text: String,
        #[source]
        source: ScoringError,
    },
    #[error("propagating sample {text:?} (sentiment {sentiment}) failed")]
    Propagation {
        text: String,
        sentiment: f64,
        #[source]
        source: EngagementError,
    },
    #[error("non-finite gradient at epoch {epoch}: {gradient:?} (logits {logits:?})")]
    NonFiniteGradient {
        epoch: usize,
        gradient: Vec<f64>,
        logits: Vec<f64>,
    },
    #[error("moving average needs a non-empty series and a positive window")]
    EmptySeries,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TrainError>;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub max_steps: usize,
    pub kl_threshold: f64,
    pub beta_kl: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub clip_ratio: f64,
    pub inner_epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_steps: 80,
            kl_threshold: DEFAULT_KL_THRESHOLD,
            beta_kl: 0.05,
            batch_size: 8,
            learning_rate: 0.05,
            clip_ratio: 0.2,
            inner_epochs: 4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// `kl_threshold = 0` is accepted and stops after the first step.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TrainError::Config(m));
        if self.max_steps < 1 {
            return bad("max_steps must be at least 1".into());
        }
        if self.kl_threshold.is_nan() || self.kl_threshold < 0.0 {
            return bad(format!("kl_threshold = {} must be non-negative", self.kl_threshold));
        }
        if !(self.beta_kl >= 0.0 && self.beta_kl.is_finite()) {
            return bad(format!("beta_kl = {} must be non-negative", self.beta_kl));
        }
        if self.batch_size < 1 {
            return bad("batch_size must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate = {} must be positive", self.learning_rate));
        }
        if !(self.clip_ratio > 0.0 && self.clip_ratio < 1.0) {
            return bad(format!("clip_ratio = {} must lie in (0, 1)", self.clip_ratio));
        }
        if self.inner_epochs < 1 {
            return bad("inner_epochs must be at least 1".into());
        }
        Ok(())
    }
}

/// Everything a rollout needs; read-only during training.
#[derive(Clone, Copy)]
pub struct Environment<'a> {
    pub network: &'a SocialNetwork,
    pub opinions: &'a OpinionVector,
    pub source: NodeId,
    pub cascade: CascadeConfig,
    pub scorer: &'a dyn SentimentScorer,
    pub realizer: &'a TemplateRealizer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub sentiment: f64,
    pub fluency: f64,
    pub engagement: usize,
    pub reward: f64,
}

impl Environment<'_> {
    /// Scores `text` and runs its cascade.
    pub fn evaluate(&self, text: &str) -> Result<Outcome> {
        let scoring = |source| TrainError::Scoring {
            text: text.to_owned(),
            source,
        };
        let sentiment = score_sentiment(self.scorer, text).map_err(scoring)?;
        let fluency = fk_grade(text).map_err(scoring)?.grade;
        let cascade = propagate(self.network, self.opinions, self.source, sentiment, &self.cascade)
            .map_err(|source| TrainError::Propagation {
                text: text.to_owned(),
                sentiment,
                source,
            })?;
        let r = reward(fluency, cascade.count());
        Ok(Outcome {
            sentiment,
            fluency,
            engagement: r.engagement,
            reward: r.value,
        })
    }

    /// Mean reward of each bin over its templates.
    pub fn bin_rewards(&self) -> Result<Vec<f64>> {
        (0..self.realizer.bins())
            .map(|b| {
                let n = self.realizer.templates(b).len();
                let total = (0..n)
                    .map(|i| self.evaluate(&self.realizer.realize(b, i)).map(|o| o.reward))
                    .sum::<Result<f64>>()?;
                Ok(total / n as f64)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub bin: usize,
    pub template: usize,
    pub text: String,
    pub sentiment: f64,
    pub fluency: f64,
    pub engagement: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepLog {
    pub step: usize,
    pub mean_reward: f64,
    pub mean_engagement: f64,
    pub mean_sentiment: f64,
    pub mean_fluency: f64,
    /// Exact KL of the policy that produced this batch.
    pub kl: f64,
    pub entropy: f64,
    pub samples: Vec<SampleRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxSteps,
    KlThreshold,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MaxSteps => "max-steps",
            Self::KlThreshold => "kl-threshold",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub policy: SentimentPolicy,
    pub logs: Vec<StepLog>,
    pub stop_reason: StopReason,
}

/// A sampled bin and its advantage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub bin: usize,
    pub advantage: f64,
}

fn check_gradient(epoch: usize, gradient: &[f64], logits: &[f64]) -> Result<()> {
    if gradient.iter().all(|g| g.is_finite()) {
        Ok(())
    } else {
        Err(TrainError::NonFiniteGradient {
            epoch,
            gradient: gradient.to_vec(),
            logits: logits.to_vec(),
        })
    }
}

/// `inner_epochs` ascent steps on the clipped surrogate minus `β · KL`.
/// The ratio is taken against `old`, the policy that drew the batch.
pub fn ppo_clip_update(
    policy: &SentimentPolicy,
    old: &PolicySnapshot,
    reference: &PolicySnapshot,
    batch: &[Scored],
    config: &TrainConfig,
) -> Result<SentimentPolicy> {
    let mut current = policy.clone();
    if batch.is_empty() {
        return Ok(current);
    }
    let old_probs = old.probabilities();
    let c = config.clip_ratio;
    let scale = 1.0 / batch.len() as f64;
    for epoch in 0..config.inner_epochs {
        let probs = current.probabilities();
        let mut grad = vec![0.0; probs.len()];
        for s in batch {
            let rho = probs[s.bin] / old_probs[s.bin];
            let a = s.advantage;
            if (a > 0.0 && rho > 1.0 + c) || (a < 0.0 && rho < 1.0 - c) {
                continue;
            }
            let w = rho * a * scale;
            for (j, g) in grad.iter_mut().enumerate() {
                *g -= w * probs[j];
            }
            grad[s.bin] += w;
        }
        if config.beta_kl > 0.0 {
            for (g, k) in grad.iter_mut().zip(kl_gradient(&current, reference)?) {
                *g -= config.beta_kl * k;
            }
        }
        check_gradient(epoch, &grad, current.logits())?;
        let next = current
            .logits()
            .iter()
            .zip(&grad)
            .map(|(x, g)| x + config.learning_rate * g)
            .collect();
        current.set_logits(next)?;
    }
    Ok(current)
}

/// Plain score-function step: `θ += lr · (1/B) Σ Â (e_b − p)`.
pub fn reinforce_update(
    policy: &SentimentPolicy,
    batch: &[Scored],
    learning_rate: f64,
) -> Result<SentimentPolicy> {
    let probs = policy.probabilities();
    let mut grad = vec![0.0; probs.len()];
    for s in batch {
        let w = s.advantage / batch.len() as f64;
        for (j, g) in grad.iter_mut().enumerate() {
            let indicator = if j == s.bin { 1.0 } else { 0.0 };
            *g += w * (indicator - probs[j]);
        }
    }
    check_gradient(0, &grad, policy.logits())?;
    let mut next = policy.clone();
    next.set_logits(
        policy
            .logits()
            .iter()
            .zip(&grad)
            .map(|(x, g)| x + learning_rate * g)
            .collect(),
    )?;
    Ok(next)
}

/// Trailing mean; the first `window − 1` entries average the available prefix.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if series.is_empty() || window == 0 {
        return Err(TrainError::EmptySeries);
    }
    let out = (0..series.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            series[lo..=i].iter().sum::<f64>() / (i + 1 - lo) as f64
        })
        .collect();
    Ok(out)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

fn rollout(env: &Environment<'_>, drawn: Vec<GenerationSample>) -> Result<Vec<SampleRecord>> {
    drawn
        .into_par_iter()
        .map(|g| {
            let o = env.evaluate(&g.text)?;
            Ok(SampleRecord {
                bin: g.bin,
                template: g.template,
                text: g.text,
                sentiment: o.sentiment,
                fluency: o.fluency,
                engagement: o.engagement,
                reward: o.reward,
            })
        })
        .collect()
}

pub fn train(
    env: &Environment<'_>,
    policy: SentimentPolicy,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    train_with(env, policy, config, |_, _| Ok(()))
}

/// Like [`train`], calling `observer` after every update.
pub fn train_with(
    env: &Environment<'_>,
    initial: SentimentPolicy,
    config: &TrainConfig,
    mut observer: impl FnMut(&StepLog, &SentimentPolicy) -> Result<()>,
) -> Result<TrainOutcome> {
    config.validate()?;
    if initial.bins() != env.realizer.bins() {
        return Err(PolicyError::LengthMismatch {
            expected: env.realizer.bins(),
            actual: initial.bins(),
        }
        .into());
    }
    let reference = initial.snapshot();
    let mut policy = initial;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut baseline: Option<f64> = None;
    let mut logs = Vec::new();
    for step in 0.. {
        if step == config.max_steps {
            return Ok(TrainOutcome {
                policy,
                logs,
                stop_reason: StopReason::MaxSteps,
            });
        }
        let kl = kl_reference(&policy, &reference)?;
        let old = policy.snapshot();
        let drawn = (0..config.batch_size)
            .map(|_| sample(&policy, &reference, env.realizer, &mut rng))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let samples = rollout(env, drawn)?;

        let batch_mean = mean(samples.iter().map(|s| s.reward));
        let b = baseline.unwrap_or(batch_mean);
        let batch: Vec<Scored> = samples
            .iter()
            .map(|s| Scored {
                bin: s.bin,
                advantage: s.reward - b,
            })
            .collect();
        baseline = Some(
            samples
                .iter()
                .fold(b, |acc, s| BASELINE_DECAY * acc + (1.0 - BASELINE_DECAY) * s.reward),
        );

        let log = StepLog {
            step,
            mean_reward: batch_mean,
            mean_engagement: mean(samples.iter().map(|s| s.engagement as f64)),
            mean_sentiment: mean(samples.iter().map(|s| s.sentiment)),
            mean_fluency: mean(samples.iter().map(|s| s.fluency)),
            kl,
            entropy: policy.entropy(),
            samples,
        };
        policy = ppo_clip_update(&policy, &old, &reference, &batch, config)?;
        log::debug!(
            "step {step}: reward {:.3} engagement {:.1} sentiment {:.3} kl {:.4}",
            log.mean_reward,
            log.mean_engagement,
            log.mean_sentiment,
            log.kl
        );
        observer(&log, &policy)?;
        logs.push(log);
        if kl >= config.kl_threshold {
            return Ok(TrainOutcome {
                policy,
                logs,
                stop_reason: StopReason::KlThreshold,
            });
        }
    }
    unreachable!("the step loop only exits by returning")
}

/// `step,reward,engagement,sentiment,fluency,kl,entropy`, one row per step.
pub fn write_steps_csv(logs: &[StepLog], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "step,reward,engagement,sentiment,fluency,kl,entropy")?;
    for l in logs {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            l.step, l.mean_reward, l.mean_engagement, l.mean_sentiment, l.mean_fluency, l.kl, l.entropy
        )?;
    }
    Ok(())
}
