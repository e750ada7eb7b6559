//! Directed Newman modularity.

use super::{CommunityPartition, GraphError, SocialNetwork};

/// `Q = (1/m) Σ_c [ e_c − K_c^out · K_c^in / m ]`, where `e_c` counts edges
/// inside community `c` and `K_c^out`, `K_c^in` sum the out- and in-degrees
/// of its members.
pub fn newman_modularity(
    network: &SocialNetwork,
    partition: &CommunityPartition,
) -> Result<f64, GraphError> {
    if partition.node_count() != network.node_count() {
        return Err(GraphError::LengthMismatch {
            expected: network.node_count(),
            actual: partition.node_count(),
        });
    }
    let m = network.edge_count() as f64;
    if m == 0.0 {
        return Err(GraphError::NoEdges);
    }
    let c = partition.community_count();
    let mut internal = vec![0.0; c];
    let mut k_out = vec![0.0; c];
    let mut k_in = vec![0.0; c];
    for (u, v) in network.edges() {
        let (cu, cv) = (partition.community_of(u), partition.community_of(v));
        k_out[cu] += 1.0;
        k_in[cv] += 1.0;
        if cu == cv {
            internal[cu] += 1.0;
        }
    }
    let q: f64 = (0..c)
        .map(|i| internal[i] / m - k_out[i] * k_in[i] / (m * m))
        .sum();
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_triangles() -> SocialNetwork {
        SocialNetwork::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
            .unwrap()
            .0
    }

    #[test]
    fn disjoint_cycles_by_component() {
        // m = 6; each cycle: e_c = 3, K_out = K_in = 3 -> 2 * (3/6 - 9/36) = 0.5
        let g = two_triangles();
        let p = CommunityPartition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let q = newman_modularity(&g, &p).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
        assert!(q > 0.4);
    }

    #[test]
    fn single_community_is_zero() {
        let g = two_triangles();
        let p = CommunityPartition::new(vec![0; 6]).unwrap();
        assert!(newman_modularity(&g, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_edges_rejected() {
        let (g, _) = SocialNetwork::from_edges(3, []).unwrap();
        let p = CommunityPartition::new(vec![0, 0, 0]).unwrap();
        assert_eq!(newman_modularity(&g, &p), Err(GraphError::NoEdges));
    }

    #[test]
    fn random_partitions_average_near_zero() {
        let mut total = 0.0;
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 200;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.random_bool(0.05) {
                        edges.push((u, v));
                    }
                }
            }
            let (g, _) = SocialNetwork::from_edges(n, edges).unwrap();
            let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
            let p = CommunityPartition::compact(&raw).unwrap();
            let q = newman_modularity(&g, &p).unwrap();
            assert!((-1.0..=1.0).contains(&q));
            total += q;
        }
        assert!((total / 5.0).abs() < 0.1);
    }
}
