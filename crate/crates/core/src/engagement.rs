//! Bounded-confidence cascade.
//!
//! Content with sentiment `s` is posted by a source node. In each round every
//! contagious node exposes its followers; a follower `w` that is not yet
//! active engages iff `|s − x_w| ≤ ε`, becoming active and contagious for the
//! next round. The cascade is deterministic: the active set is exactly the
//! source plus every node reachable through eligible followers.

use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{NodeId, OpinionVector, SocialNetwork};

pub const DEFAULT_EPSILON: f64 = 0.2;
pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngagementError {
    #[error("source node {node} out of range for {node_count} nodes")]
    SourceOutOfRange { node: NodeId, node_count: usize },
    #[error("sentiment {0} is outside [0, 1]")]
    SentimentOutOfRange(f64),
    #[error("epsilon {0} is outside [0, 1]")]
    EpsilonOutOfRange(f64),
    #[error("opinion vector has {actual} entries for {expected} nodes")]
    OpinionLength { expected: usize, actual: usize },
    #[error("sentiment grid is empty")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeConfig {
    epsilon: f64,
}

impl CascadeConfig {
    pub fn new(epsilon: f64) -> Result<Self, EngagementError> {
        if (0.0..=1.0).contains(&epsilon) {
            Ok(Self { epsilon })
        } else {
            Err(EngagementError::EpsilonOutOfRange(epsilon))
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn admits(&self, sentiment: f64, opinion: f64) -> bool {
        (sentiment - opinion).abs() <= self.epsilon
    }
}

impl Default for CascadeConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    /// Active nodes, ascending; always contains the source.
    pub active: Vec<NodeId>,
    /// Nodes activated in each round after the source, each sorted.
    pub rounds: Vec<Vec<NodeId>>,
    pub source: NodeId,
    pub sentiment: f64,
}

impl CascadeResult {
    /// `|A|`, source included.
    pub fn count(&self) -> usize {
        self.active.len()
    }
}

fn validate(
    network: &SocialNetwork,
    opinions: &OpinionVector,
    source: NodeId,
    sentiment: f64,
) -> Result<(), EngagementError> {
    if opinions.len() != network.node_count() {
        return Err(EngagementError::OpinionLength {
            expected: network.node_count(),
            actual: opinions.len(),
        });
    }
    if source >= network.node_count() {
        return Err(EngagementError::SourceOutOfRange {
            node: source,
            node_count: network.node_count(),
        });
    }
    if !(0.0..=1.0).contains(&sentiment) {
        return Err(EngagementError::SentimentOutOfRange(sentiment));
    }
    Ok(())
}

/// Runs the cascade round by round until no node is contagious.
pub fn propagate(
    network: &SocialNetwork,
    opinions: &OpinionVector,
    source: NodeId,
    sentiment: f64,
    config: &CascadeConfig,
) -> Result<CascadeResult, EngagementError> {
    validate(network, opinions, source, sentiment)?;
    let mut active = vec![false; network.node_count()];
    active[source] = true;
    let mut contagious = vec![source];
    let mut rounds = Vec::new();
    while !contagious.is_empty() {
        let mut next = Vec::new();
        for &v in &contagious {
            for &w in network.followers(v) {
                if !active[w] && config.admits(sentiment, opinions.get(w)) {
                    active[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        rounds.push(next.clone());
        contagious = next;
    }
    let active = active
        .iter()
        .enumerate()
        .filter_map(|(i, &a)| a.then_some(i))
        .collect();
    Ok(CascadeResult {
        active,
        rounds,
        source,
        sentiment,
    })
}

/// Independent check of [`propagate`]: depth-first search over followers
/// restricted to nodes within `ε` of the sentiment. The source itself is
/// never filtered.
pub fn reachability_oracle(
    network: &SocialNetwork,
    opinions: &OpinionVector,
    source: NodeId,
    sentiment: f64,
    config: &CascadeConfig,
) -> Result<Vec<NodeId>, EngagementError> {
    validate(network, opinions, source, sentiment)?;
    let eligible: Vec<bool> = opinions
        .values()
        .iter()
        .map(|&x| config.admits(sentiment, x))
        .collect();
    let mut seen = vec![false; network.node_count()];
    seen[source] = true;
    let mut stack = vec![source];
    while let Some(v) = stack.pop() {
        for &w in network.followers(v) {
            if eligible[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    Ok((0..seen.len()).filter(|&i| seen[i]).collect())
}

/// `n` evenly spaced sentiments on `[0, 1]`, endpoints included.
pub fn default_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Engagement count for each sentiment in `grid`, in grid order.
pub fn sentiment_sweep(
    network: &SocialNetwork,
    opinions: &OpinionVector,
    source: NodeId,
    config: &CascadeConfig,
    grid: &[f64],
) -> Result<Vec<(f64, usize)>, EngagementError> {
    if grid.is_empty() {
        return Err(EngagementError::EmptyGrid);
    }
    grid.par_iter()
        .map(|&s| propagate(network, opinions, source, s, config).map(|r| (s, r.count())))
        .collect()
}

/// Best sentiment on the grid and its engagement; ties go to the smallest
/// sentiment.
pub fn engagement_upper_bound(
    network: &SocialNetwork,
    opinions: &OpinionVector,
    source: NodeId,
    config: &CascadeConfig,
    grid: &[f64],
) -> Result<(f64, usize), EngagementError> {
    let sweep = sentiment_sweep(network, opinions, source, config, grid)?;
    Ok(best_of_sweep(&sweep))
}

/// Argmax of a non-empty sweep, first occurrence on ties.
pub fn best_of_sweep(sweep: &[(f64, usize)]) -> (f64, usize) {
    let mut best = sweep[0];
    for &(s, c) in &sweep[1..] {
        if c > best.1 || (c == best.1 && s < best.0) {
            best = (s, c);
        }
    }
    best
}

pub fn write_sweep_csv<W: Write>(sweep: &[(f64, usize)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "sentiment,count")?;
    for (s, c) in sweep {
        writeln!(out, "{s},{c}")?;
    }
    Ok(())
}
