//! LFR-style synthetic networks with planted communities and opinions.
//!
//! Degrees and community sizes follow truncated power laws. Each node splits
//! its degree into an internal share `≈ (1 − μ)` and an external share `≈ μ`;
//! stubs are matched inside communities and across communities separately,
//! rejecting self-loops and repeated pairs. Every undirected pair becomes one
//! directed edge with a uniformly random orientation.
//!
//! Opinions come from a separate random stream, so two configs differing only
//! in homophily or Beta shape share the same graph for the same seed.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use thiserror::Error;

use crate::graph::{CommunityPartition, GraphError, NodeId, OpinionVector, SocialNetwork};

const MATCH_ROUNDS: usize = 50;
/// Maximum share of stubs that may stay unmatched.
const MAX_UNMATCHED: f64 = 0.05;
const GRAPH_STREAM: u64 = 1;
const OPINION_STREAM: u64 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetgenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("unknown opinion profile {0:?} (expected positive, negative, neutral or uniform)")]
    UnknownProfile(String),
    #[error("degree sequence infeasible after {retries} matching rounds: {unmatched} of {total} stubs unmatched")]
    Infeasible {
        retries: usize,
        unmatched: usize,
        total: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Probability that a node adopts its community's opinion.
    pub homophily: f64,
    /// Fraction of each node's edges that leave its community.
    pub mixing: f64,
    pub alpha: f64,
    pub beta: f64,
    pub avg_degree: f64,
    pub degree_exponent: f64,
    pub community_exponent: f64,
    pub max_degree: usize,
    /// Defaults to one more than the minimum degree.
    pub min_community: Option<usize>,
    /// Defaults to `max(max_degree + 1, n / 5)`.
    pub max_community: Option<usize>,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Standard benchmark regime for `n` nodes: degree exponent 2.5,
    /// community exponent 1.5, average degree 10, maximum degree `n / 10`.
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            homophily: 0.75,
            mixing: 0.05,
            alpha: 1.0,
            beta: 1.0,
            avg_degree: 10.0,
            degree_exponent: 2.5,
            community_exponent: 1.5,
            max_degree: (n / 10).max(2),
            min_community: None,
            max_community: None,
            seed,
        }
    }

    pub fn with_profile(mut self, profile: OpinionProfile) -> Self {
        (self.alpha, self.beta) = profile.beta_params();
        self
    }

    pub fn validate(&self) -> Result<(), NetgenError> {
        let bad = |msg: String| Err(NetgenError::InvalidConfig(msg));
        if self.n < 10 {
            return bad(format!("n = {} (need at least 10)", self.n));
        }
        if !(0.0..=1.0).contains(&self.homophily) {
            return bad(format!("homophily = {} (need [0, 1])", self.homophily));
        }
        if !(self.mixing > 0.0 && self.mixing < 1.0) {
            return bad(format!("mixing = {} (need (0, 1))", self.mixing));
        }
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return bad(format!("beta shape ({}, {}) must be positive", self.alpha, self.beta));
        }
        if self.avg_degree.is_nan() || self.avg_degree < 2.0 {
            return bad(format!("avg_degree = {} (need at least 2)", self.avg_degree));
        }
        if self.max_degree >= self.n || (self.max_degree as f64) < self.avg_degree {
            return bad(format!(
                "max_degree = {} (need avg_degree <= max_degree < n)",
                self.max_degree
            ));
        }
        if !(self.degree_exponent > 1.0 && self.community_exponent > 1.0) {
            return bad("power-law exponents must exceed 1".into());
        }
        if let (Some(lo), Some(hi)) = (self.min_community, self.max_community) {
            if lo > hi || hi > self.n || lo == 0 {
                return bad(format!("community size range [{lo}, {hi}] invalid"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpinionProfile {
    Positive,
    Negative,
    Neutral,
    Uniform,
}

impl OpinionProfile {
    pub const ALL: [OpinionProfile; 4] = [Self::Positive, Self::Negative, Self::Neutral, Self::Uniform];

    /// Beta shape parameters `(alpha, beta)`.
    pub fn beta_params(self) -> (f64, f64) {
        match self {
            Self::Uniform => (1.0, 1.0),
            Self::Positive => (8.0, 2.0),
            Self::Negative => (2.0, 8.0),
            Self::Neutral => (10.0, 10.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
            Self::Neutral => "neutral",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for OpinionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OpinionProfile {
    type Err = NetgenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(Self::Positive),
            "negative" => Ok(Self::Negative),
            "neutral" => Ok(Self::Neutral),
            "uniform" => Ok(Self::Uniform),
            _ => Err(NetgenError::UnknownProfile(s.to_owned())),
        }
    }
}

/// `(alpha, beta)` for a named profile.
pub fn opinion_profile(name: &str) -> Result<(f64, f64), NetgenError> {
    Ok(name.parse::<OpinionProfile>()?.beta_params())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedNetwork {
    pub network: SocialNetwork,
    pub opinions: OpinionVector,
    pub planted: CommunityPartition,
    /// Opinion drawn for each planted community.
    pub community_opinions: Vec<f64>,
}

/// Mean of a continuous power law `p(x) ∝ x^-γ` on `[lo, hi]`.
fn power_law_mean(gamma: f64, lo: f64, hi: f64) -> f64 {
    let moment = |k: f64| {
        let e = k + 1.0 - gamma;
        if e.abs() < 1e-12 {
            (hi / lo).ln()
        } else {
            (hi.powf(e) - lo.powf(e)) / e
        }
    };
    moment(1.0) / moment(0.0)
}

/// Inverse-CDF draw from `p(x) ∝ x^-γ` on `[lo, hi]`.
fn power_law_draw(rng: &mut impl Rng, gamma: f64, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    let e = 1.0 - gamma;
    (lo.powf(e) + u * (hi.powf(e) - lo.powf(e))).powf(1.0 / e)
}

/// Lower cut-off that gives the requested mean degree.
fn solve_min_degree(gamma: f64, mean: f64, hi: f64) -> f64 {
    let (mut lo, mut up) = (1e-3, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if power_law_mean(gamma, mid, hi) < mean {
            lo = mid;
        } else {
            up = mid;
        }
    }
    0.5 * (lo + up)
}

fn community_sizes(
    rng: &mut impl Rng,
    n: usize,
    gamma: f64,
    lo: usize,
    hi: usize,
) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < n {
        let s = power_law_draw(rng, gamma, lo as f64, hi as f64 + 0.5).floor() as usize;
        let s = s.clamp(lo, hi);
        sizes.push(s);
        total += s;
    }
    let excess = total - n;
    let last = sizes.len() - 1;
    if sizes[last] - excess >= lo || sizes.len() == 1 {
        sizes[last] -= excess;
    } else {
        // Fold the short remainder into the other communities.
        let remainder = sizes.pop().unwrap() - excess;
        let k = sizes.len();
        for i in 0..remainder {
            sizes[i % k] += 1;
        }
    }
    sizes
}

/// Pairs stubs at random, retrying rejected pairs. Leftover pairs are placed
/// by swapping with an already matched edge. Returns the number of stubs that
/// stayed unmatched.
fn match_stubs(
    rng: &mut impl Rng,
    mut stubs: Vec<NodeId>,
    edges: &mut HashSet<(NodeId, NodeId)>,
    allowed: impl Fn(NodeId, NodeId) -> bool,
) -> usize {
    let key = |a: NodeId, b: NodeId| (a.min(b), a.max(b));
    let mut local: Vec<(NodeId, NodeId)> = Vec::new();
    for _ in 0..MATCH_ROUNDS {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(rng);
        let mut rejected = Vec::new();
        for pair in stubs.chunks(2) {
            let &[a, b] = pair else {
                rejected.push(pair[0]);
                continue;
            };
            if a != b && allowed(a, b) && edges.insert(key(a, b)) {
                local.push((a, b));
            } else {
                rejected.extend([a, b]);
            }
        }
        stubs = rejected;
    }
    // Degree-preserving swaps: (a, b) + (c, d) -> (a, c) + (b, d).
    let mut left = Vec::new();
    for pair in stubs.chunks(2) {
        let &[a, b] = pair else {
            left.push(pair[0]);
            continue;
        };
        let mut placed = false;
        for _ in 0..MATCH_ROUNDS * 4 {
            if local.is_empty() {
                break;
            }
            let i = rng.random_range(0..local.len());
            let (c, d) = local[i];
            let (c, d) = if rng.random_bool(0.5) { (c, d) } else { (d, c) };
            let ok = a != c
                && b != d
                && allowed(a, c)
                && allowed(b, d)
                && key(a, c) != key(b, d)
                && !edges.contains(&key(a, c))
                && !edges.contains(&key(b, d));
            if ok {
                edges.remove(&key(c, d));
                edges.insert(key(a, c));
                edges.insert(key(b, d));
                local[i] = (a, c);
                local.push((b, d));
                placed = true;
                break;
            }
        }
        if !placed {
            left.extend([a, b]);
        }
    }
    left.len()
}

pub fn generate(config: &GeneratorConfig) -> Result<GeneratedNetwork, NetgenError> {
    config.validate()?;
    let n = config.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(GRAPH_STREAM);

    // Degree sequence.
    let k_max = config.max_degree as f64;
    let k_min = solve_min_degree(config.degree_exponent, config.avg_degree, k_max);
    let degrees: Vec<usize> = (0..n)
        .map(|_| {
            power_law_draw(&mut rng, config.degree_exponent, k_min, k_max)
                .round()
                .clamp(1.0, k_max) as usize
        })
        .collect();

    // Community sizes.
    let hi = config
        .max_community
        .unwrap_or_else(|| (config.max_degree + 1).max(n / 5))
        .min(n);
    let lo = config
        .min_community
        .unwrap_or_else(|| (k_min.ceil() as usize + 1).max(3))
        .min(hi);
    let sizes = community_sizes(&mut rng, n, config.community_exponent, lo, hi);

    // Internal / external split.
    let mut internal: Vec<usize> = degrees
        .iter()
        .map(|&k| ((1.0 - config.mixing) * k as f64).round() as usize)
        .collect();

    // Assign nodes to communities, largest internal degree first.
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);
    order.sort_by(|a, b| internal[*b].cmp(&internal[*a]));
    let mut free: Vec<usize> = sizes.clone();
    let mut community = vec![0usize; n];
    for &u in &order {
        let fits: Vec<usize> = (0..sizes.len())
            .filter(|&c| free[c] > 0 && sizes[c] > internal[u])
            .collect();
        let c = if let Some(&c) = fits.as_slice().choose(&mut rng) {
            c
        } else {
            let c = (0..sizes.len())
                .filter(|&c| free[c] > 0)
                .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
                .expect("community capacity equals n");
            internal[u] = internal[u].min(sizes[c] - 1);
            c
        };
        community[u] = c;
        free[c] -= 1;
    }
    let mut external: Vec<usize> = degrees
        .iter()
        .zip(&internal)
        .map(|(k, i)| k.saturating_sub(*i))
        .collect();

    // Parity: every community needs an even number of internal stubs.
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); sizes.len()];
    for u in 0..n {
        members[community[u]].push(u);
    }
    for group in &members {
        let total: usize = group.iter().map(|&u| internal[u]).sum();
        if total % 2 == 1 {
            let &u = group.iter().max_by_key(|&&u| (internal[u], std::cmp::Reverse(u))).unwrap();
            internal[u] -= 1;
            external[u] += 1;
        }
    }
    if external.iter().sum::<usize>() % 2 == 1 {
        let u = (0..n).max_by_key(|&u| (external[u], std::cmp::Reverse(u))).unwrap();
        external[u] -= 1;
    }

    // Stub matching.
    let mut undirected: HashSet<(NodeId, NodeId)> = HashSet::new();
    let total_stubs: usize = internal.iter().chain(&external).sum();
    let mut unmatched = 0;
    for group in &members {
        let stubs: Vec<NodeId> = group
            .iter()
            .flat_map(|&u| std::iter::repeat_n(u, internal[u]))
            .collect();
        unmatched += match_stubs(&mut rng, stubs, &mut undirected, |_, _| true);
    }
    let stubs: Vec<NodeId> = (0..n)
        .flat_map(|u| std::iter::repeat_n(u, external[u]))
        .collect();
    unmatched += match_stubs(&mut rng, stubs, &mut undirected, |a, b| {
        community[a] != community[b]
    });
    if unmatched as f64 > MAX_UNMATCHED * total_stubs as f64 {
        return Err(NetgenError::Infeasible {
            retries: MATCH_ROUNDS,
            unmatched,
            total: total_stubs,
        });
    }

    let mut pairs: Vec<(NodeId, NodeId)> = undirected.into_iter().collect();
    pairs.sort_unstable();
    let directed: Vec<(NodeId, NodeId)> = pairs
        .into_iter()
        .map(|(a, b)| if rng.random_bool(0.5) { (a, b) } else { (b, a) })
        .collect();
    let (network, _) = SocialNetwork::from_edges(n, directed)?;
    let planted = CommunityPartition::new(community)?;

    let (community_opinions, opinions) = draw_opinions(config, &planted)?;
    Ok(GeneratedNetwork {
        network,
        opinions,
        planted,
        community_opinions,
    })
}

fn draw_opinions(
    config: &GeneratorConfig,
    planted: &CommunityPartition,
) -> Result<(Vec<f64>, OpinionVector), NetgenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(OPINION_STREAM);
    let dist = Beta::new(config.alpha, config.beta)
        .map_err(|e| NetgenError::InvalidConfig(format!("beta distribution: {e}")))?;
    let community: Vec<f64> = (0..planted.community_count())
        .map(|_| dist.sample(&mut rng).clamp(0.0, 1.0))
        .collect();
    // Both draws are taken for every node so that the stream stays aligned
    // across homophily levels.
    let values = (0..planted.node_count())
        .map(|u| {
            let trial: f64 = rng.random();
            let own = dist.sample(&mut rng).clamp(0.0, 1.0);
            if trial < config.homophily {
                community[planted.community_of(u)]
            } else {
                own
            }
        })
        .collect();
    Ok((community, OpinionVector::new(values)?))
}

/// `1 − mean |x_u − x_v|` over edges.
pub fn measure_homophily(
    network: &SocialNetwork,
    opinions: &OpinionVector,
) -> Result<f64, GraphError> {
    if network.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let gap: f64 = network
        .edges()
        .map(|(u, v)| (opinions.get(u) - opinions.get(v)).abs())
        .sum();
    Ok(1.0 - gap / network.edge_count() as f64)
}
