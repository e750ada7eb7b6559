//! Directed betweenness centrality (Brandes accumulation).

use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{NodeId, SocialNetwork};

/// Graphs up to this many nodes get exact scores.
pub const EXACT_BETWEENNESS_LIMIT: usize = 20_000;
/// Number of BFS sources used above [`EXACT_BETWEENNESS_LIMIT`].
pub const SAMPLED_SOURCES: usize = 2_000;

const SAMPLE_SEED: u64 = 0x5eed_b7c0;
const SOURCES_PER_TASK: usize = 64;

/// Unnormalised directed betweenness, indexed by node id.
///
/// Exact for graphs with at most [`EXACT_BETWEENNESS_LIMIT`] nodes. Larger
/// graphs accumulate from [`SAMPLED_SOURCES`] sources drawn with a fixed seed
/// and rescale by `N / samples`. Work is split into fixed chunks of sources
/// and summed in chunk order, so the output is identical across runs and
/// thread counts.
pub fn betweenness_centrality(network: &SocialNetwork) -> Vec<f64> {
    let n = network.node_count();
    let (sources, scale): (Vec<NodeId>, f64) = if n <= EXACT_BETWEENNESS_LIMIT {
        ((0..n).collect(), 1.0)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        let mut picked = sample(&mut rng, n, SAMPLED_SOURCES).into_vec();
        picked.sort_unstable();
        (picked, n as f64 / SAMPLED_SOURCES as f64)
    };

    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCES_PER_TASK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut scratch = Scratch::new(n);
            for &s in chunk {
                scratch.accumulate(network, s, &mut acc);
            }
            acc
        })
        .collect();

    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    if scale != 1.0 {
        total.iter_mut().for_each(|b| *b *= scale);
    }
    total
}

struct Scratch {
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
    preds: Vec<Vec<NodeId>>,
    stack: Vec<NodeId>,
    queue: VecDeque<NodeId>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            stack: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, network: &SocialNetwork, s: NodeId, acc: &mut [f64]) {
        self.sigma[s] = 1.0;
        self.dist[s] = 0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for &w in network.followers(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
        while let Some(w) = self.stack.pop() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] * coeff;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
            // reset for the next source
            self.preds[w].clear();
            self.sigma[w] = 0.0;
            self.dist[w] = -1;
            self.delta[w] = 0.0;
        }
    }
}
