//! Choosing the injection node for generated content.

use std::fmt;
use std::str::FromStr;

use super::{betweenness_centrality, CommunityPartition, GraphError, NodeId, OpinionVector, SocialNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlacementStrategy {
    /// Community with the lowest mean opinion.
    EchoLow,
    /// Community with the highest mean opinion.
    EchoHigh,
    CommLargest,
    CommSmallest,
    /// Global betweenness maximiser.
    Central,
}

impl PlacementStrategy {
    pub const ALL: [PlacementStrategy; 5] = [
        Self::EchoLow,
        Self::EchoHigh,
        Self::CommLargest,
        Self::CommSmallest,
        Self::Central,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::EchoLow => "echo-low",
            Self::EchoHigh => "echo-high",
            Self::CommLargest => "comm-largest",
            Self::CommSmallest => "comm-smallest",
            Self::Central => "central",
        }
    }
}

impl fmt::Display for PlacementStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown placement strategy {0:?} (expected echo-low, echo-high, comm-largest, comm-smallest or central)")]
pub struct UnknownStrategy(pub String);

impl FromStr for PlacementStrategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        match key.as_str() {
            "echolow" => Ok(Self::EchoLow),
            "echohigh" => Ok(Self::EchoHigh),
            "commlargest" => Ok(Self::CommLargest),
            "commsmallest" => Ok(Self::CommSmallest),
            "central" => Ok(Self::Central),
            _ => Err(UnknownStrategy(s.to_owned())),
        }
    }
}

/// First index maximising `key`; ties go to the smallest index.
fn argmax_by<T: PartialOrd + Copy>(items: impl Iterator<Item = (usize, T)>) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in items {
        match best {
            Some((_, b)) if v.partial_cmp(&b) != Some(std::cmp::Ordering::Greater) => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Member of `community` with the most followers inside that community.
fn community_representative(
    network: &SocialNetwork,
    partition: &CommunityPartition,
    community: usize,
) -> NodeId {
    let members = partition.members(community);
    let degree = |u: NodeId| {
        network
            .followers(u)
            .iter()
            .filter(|&&v| partition.community_of(v) == community)
            .count()
    };
    let pos = argmax_by(members.iter().map(|&u| degree(u)).enumerate())
        .expect("dense partition ids are never empty");
    members[pos]
}

/// Picks the node that posts generated content.
///
/// Community strategies first select a community (by mean opinion or by
/// size) and then its member with maximum in-community out-degree. `Central`
/// picks the global betweenness maximiser. Every tie goes to the smaller id.
pub fn select_injection(
    network: &SocialNetwork,
    opinions: &OpinionVector,
    partition: &CommunityPartition,
    strategy: PlacementStrategy,
) -> Result<NodeId, GraphError> {
    let n = network.node_count();
    if partition.node_count() == 0 || n == 0 {
        return Err(GraphError::EmptyPartition);
    }
    for len in [partition.node_count(), opinions.len()] {
        if len != n {
            return Err(GraphError::LengthMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    let community = match strategy {
        PlacementStrategy::Central => {
            let bc = betweenness_centrality(network);
            return Ok(argmax_by(bc.into_iter().enumerate()).expect("non-empty graph"));
        }
        PlacementStrategy::EchoLow => {
            argmax_by(partition.mean_opinions(opinions).into_iter().map(|m| -m).enumerate())
        }
        PlacementStrategy::EchoHigh => argmax_by(partition.mean_opinions(opinions).into_iter().enumerate()),
        PlacementStrategy::CommLargest => argmax_by(partition.sizes().into_iter().enumerate()),
        PlacementStrategy::CommSmallest => {
            argmax_by(partition.sizes().into_iter().map(|s| -(s as i64)).enumerate())
        }
    }
    .ok_or(GraphError::EmptyPartition)?;
    Ok(community_representative(network, partition, community))
}
