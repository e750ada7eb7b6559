//! Louvain community detection on the directed modularity.
//!
//! Local moving uses the directed gain
//! `ΔQ = (w_iC + w_Ci)/m − (k_i^out Σ_C^in + k_i^in Σ_C^out)/m²`
//! and communities are collapsed into weighted super-nodes between levels.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CommunityPartition, GraphError, SocialNetwork};

const MAX_PASSES: usize = 100;
const MAX_LEVELS: usize = 32;
const MIN_GAIN: f64 = 1e-12;

/// Weighted directed graph used between aggregation levels.
struct Level {
    out: Vec<Vec<(usize, f64)>>,
    inc: Vec<Vec<(usize, f64)>>,
    k_out: Vec<f64>,
    k_in: Vec<f64>,
    total: f64,
}

impl Level {
    fn from_network(network: &SocialNetwork) -> Self {
        let n = network.node_count();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (u, v) in network.edges() {
            out[u].push((v, 1.0));
            inc[v].push((u, 1.0));
        }
        Self::finish(out, inc)
    }

    fn finish(out: Vec<Vec<(usize, f64)>>, inc: Vec<Vec<(usize, f64)>>) -> Self {
        let k_out: Vec<f64> = out.iter().map(|a| a.iter().map(|e| e.1).sum()).collect();
        let k_in: Vec<f64> = inc.iter().map(|a| a.iter().map(|e| e.1).sum()).collect();
        let total = k_out.iter().sum();
        Self {
            out,
            inc,
            k_out,
            k_in,
            total,
        }
    }

    fn len(&self) -> usize {
        self.out.len()
    }

    /// Collapses communities (dense ids `0..c`) into super-nodes.
    fn aggregate(&self, community: &[usize], c: usize) -> Self {
        let mut pairs: Vec<(usize, usize, f64)> = self
            .out
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().map(move |&(v, w)| (u, v, w)))
            .map(|(u, v, w)| (community[u], community[v], w))
            .collect();
        pairs.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let mut out = vec![Vec::new(); c];
        let mut inc = vec![Vec::new(); c];
        let mut iter = pairs.into_iter().peekable();
        while let Some((a, b, mut w)) = iter.next() {
            while let Some(&(a2, b2, w2)) = iter.peek() {
                if (a2, b2) != (a, b) {
                    break;
                }
                w += w2;
                iter.next();
            }
            out[a].push((b, w));
            inc[b].push((a, w));
        }
        Self::finish(out, inc)
    }

    /// One round of local moving. Returns dense community ids and whether
    /// any node moved.
    fn local_moving(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize, bool) {
        let n = self.len();
        let m = self.total;
        let mut community: Vec<usize> = (0..n).collect();
        let mut sigma_out = self.k_out.clone();
        let mut sigma_in = self.k_in.clone();
        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut moved_any = false;

        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for &i in &order {
                let home = community[i];
                let (ko, ki) = (self.k_out[i], self.k_in[i]);

                for &(j, w) in self.out[i].iter().chain(&self.inc[i]) {
                    if j == i {
                        continue;
                    }
                    let cj = community[j];
                    if link[cj] == 0.0 {
                        touched.push(cj);
                    }
                    link[cj] += w;
                }

                sigma_out[home] -= ko;
                sigma_in[home] -= ki;

                let gain = |c: usize, l: f64| l / m - (ko * sigma_in[c] + ki * sigma_out[c]) / (m * m);
                let mut best = home;
                let mut best_gain = gain(home, link[home]);
                touched.sort_unstable();
                for &c in &touched {
                    if c == home {
                        continue;
                    }
                    let g = gain(c, link[c]);
                    if g > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = g;
                    }
                }
                sigma_out[best] += ko;
                sigma_in[best] += ki;
                if best != home {
                    community[i] = best;
                    moved = true;
                    moved_any = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
        }

        let mut relabel = vec![usize::MAX; n];
        let mut next = 0;
        for c in community.iter_mut() {
            if relabel[*c] == usize::MAX {
                relabel[*c] = next;
                next += 1;
            }
            *c = relabel[*c];
        }
        (community, next, moved_any)
    }
}

/// Multi-level Louvain. Deterministic for a fixed `rng_seed`; the returned
/// ids are dense and ordered by the smallest node id in each community.
pub fn louvain(network: &SocialNetwork, rng_seed: u64) -> Result<CommunityPartition, GraphError> {
    if network.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut level = Level::from_network(network);
    let mut membership: Vec<usize> = (0..network.node_count()).collect();

    for _ in 0..MAX_LEVELS {
        let (community, count, moved) = level.local_moving(&mut rng);
        if !moved {
            break;
        }
        for c in membership.iter_mut() {
            *c = community[*c];
        }
        if count == level.len() {
            break;
        }
        level = level.aggregate(&community, count);
    }
    CommunityPartition::compact(&membership)
}
