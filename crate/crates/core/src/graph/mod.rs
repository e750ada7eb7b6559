//! Directed follower graphs and the per-node data attached to them.
//!
//! An edge `(u, v)` means `v` follows `u`: content posted by `u` reaches `v`.
//! Node ids are dense `0..N`; the external labels seen at ingestion are kept
//! alongside so artifacts can be written back with the original names.

mod betweenness;
mod io;
mod louvain;
mod modularity;
mod placement;

use std::collections::HashMap;

use thiserror::Error;

pub use betweenness::{betweenness_centrality, EXACT_BETWEENNESS_LIMIT, SAMPLED_SOURCES};
pub use io::{
    load_communities, load_edge_list, load_opinions, write_communities, write_edge_list,
    write_opinions, LoadReport,
};
pub use louvain::louvain;
pub use modularity::newman_modularity;
pub use placement::{select_injection, PlacementStrategy};

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("input contains no edges")]
    EmptyInput,
    #[error("line {line}: expected two tokens `source,target`, got {content:?}")]
    MalformedEdge { line: usize, content: String },
    #[error("line {line}: expected `node,value`, got {content:?}")]
    MalformedOpinion { line: usize, content: String },
    #[error("line {line}: opinion {value} for node {label:?} is outside [0, 1]")]
    OpinionOutOfRange { line: usize, label: String, value: f64 },
    #[error("line {line}: unknown node label {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: node {label:?} listed twice")]
    DuplicateLabel { line: usize, label: String },
    #[error("node {label:?} has no opinion")]
    MissingOpinion { label: String },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("opinion {value} at node {node} is outside [0, 1]")]
    InvalidOpinion { node: NodeId, value: f64 },
    #[error("partition is empty")]
    EmptyPartition,
    #[error("community ids are not dense: id {missing} is unused")]
    SparseCommunityIds { missing: usize },
    #[error("graph has no edges")]
    NoEdges,
}

/// Directed follower graph in compressed adjacency form.
///
/// Out-neighbours of every node are stored sorted ascending, without
/// duplicates and without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialNetwork {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

/// Self-loops and repeated pairs removed while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeCleanup {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl SocialNetwork {
    /// Builds a graph on `node_count` nodes labelled `"0".."N-1"`.
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<(Self, EdgeCleanup), GraphError> {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::from_labeled_edges(labels, edges)
    }

    /// Builds a graph whose node `i` carries `labels[i]`.
    pub fn from_labeled_edges(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<(Self, EdgeCleanup), GraphError> {
        let node_count = labels.len();
        let mut cleanup = EdgeCleanup::default();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                cleanup.self_loops += 1;
            } else {
                pairs.push((u, v));
            }
        }
        let before = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        cleanup.duplicates = before - pairs.len();

        let mut offsets = vec![0usize; node_count + 1];
        for &(u, _) in &pairs {
            offsets[u + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok((
            Self {
                offsets,
                targets,
                labels,
                index,
            },
            cleanup,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Followers of `node`, ascending.
    pub fn followers(&self, node: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count()];
        for &v in &self.targets {
            deg[v] += 1;
        }
        deg
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.followers(u).binary_search(&v).is_ok()
    }

    /// All edges in `(source, follower)` order, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| self.followers(u).iter().map(move |&v| (u, v)))
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn check_node(&self, node: NodeId) -> Result<(), GraphError> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node,
                node_count: self.node_count(),
            })
        }
    }
}

/// One opinion in `[0, 1]` per node.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        if let Some((node, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(GraphError::InvalidOpinion { node, value });
        }
        Ok(Self(values))
    }

    /// Validates the vector against the graph it belongs to.
    pub fn for_network(values: Vec<f64>, network: &SocialNetwork) -> Result<Self, GraphError> {
        if values.len() != network.node_count() {
            return Err(GraphError::LengthMismatch {
                expected: network.node_count(),
                actual: values.len(),
            });
        }
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, node: NodeId) -> f64 {
        self.0[node]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Non-overlapping assignment of nodes to communities `0..C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityPartition {
    assignment: Vec<usize>,
    count: usize,
}

impl CommunityPartition {
    /// Accepts an assignment whose ids are already dense.
    pub fn new(assignment: Vec<usize>) -> Result<Self, GraphError> {
        if assignment.is_empty() {
            return Err(GraphError::EmptyPartition);
        }
        let count = assignment.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; count];
        for &c in &assignment {
            used[c] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(GraphError::SparseCommunityIds { missing });
        }
        Ok(Self { assignment, count })
    }

    /// Relabels arbitrary ids densely by order of first appearance.
    pub fn compact(raw: &[usize]) -> Result<Self, GraphError> {
        let mut map = HashMap::new();
        let assignment = raw
            .iter()
            .map(|&c| {
                let next = map.len();
                *map.entry(c).or_insert(next)
            })
            .collect();
        Self::new(assignment)
    }

    pub fn singletons(node_count: usize) -> Result<Self, GraphError> {
        Self::new((0..node_count).collect())
    }

    pub fn community_of(&self, node: NodeId) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, community: usize) -> Vec<NodeId> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == community)
            .map(|(n, _)| n)
            .collect()
    }

    /// Mean opinion per community.
    pub fn mean_opinions(&self, opinions: &OpinionVector) -> Vec<f64> {
        let mut sums = vec![0.0; self.count];
        for (node, &c) in self.assignment.iter().enumerate() {
            sums[c] += opinions.get(node);
        }
        sums.iter()
            .zip(self.sizes())
            .map(|(s, n)| s / n as f64)
            .collect()
    }
}
