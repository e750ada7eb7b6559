//! Plain-text edge lists, opinion files and community files.
//!
//! All three are line-oriented UTF-8. Fields are separated by a comma or by
//! whitespace and `#` starts a comment that runs to the end of the line.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use super::{CommunityPartition, GraphError, OpinionVector, SocialNetwork};

/// Lines dropped while loading an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl LoadReport {
    pub fn dropped(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

fn io_err(line: usize, e: std::io::Error) -> GraphError {
    GraphError::MalformedEdge {
        line,
        content: format!("<read error: {e}>"),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Reads `source,target` pairs into a graph with dense ids.
///
/// When every label is a non-negative integer, ids follow numeric order so
/// that a file labelled `0..N-1` maps onto itself; otherwise labels are
/// ordered lexicographically. Either way the result does not depend on the
/// order of lines in the file.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<(SocialNetwork, LoadReport), GraphError> {
    let mut raw = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| io_err(line_no, e))?;
        let body = strip_comment(&line);
        let toks = fields(body);
        match toks.as_slice() {
            [] => continue,
            [u, v] => raw.push((u.to_string(), v.to_string())),
            _ => {
                return Err(GraphError::MalformedEdge {
                    line: line_no,
                    content: line.clone(),
                })
            }
        }
    }
    if raw.is_empty() {
        return Err(GraphError::EmptyInput);
    }

    let distinct: BTreeSet<&str> = raw
        .iter()
        .flat_map(|(u, v)| [u.as_str(), v.as_str()])
        .collect();
    let mut labels: Vec<String> = distinct.into_iter().map(str::to_owned).collect();
    let numeric: Option<Vec<u64>> = labels.iter().map(|l| l.parse::<u64>().ok()).collect();
    if let Some(nums) = numeric {
        let mut paired: Vec<(u64, String)> = nums.into_iter().zip(labels).collect();
        paired.sort();
        labels = paired.into_iter().map(|(_, l)| l).collect();
    }
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let edges: Vec<(usize, usize)> = raw
        .iter()
        .map(|(u, v)| (index[u.as_str()], index[v.as_str()]))
        .collect();

    let (network, cleanup) = SocialNetwork::from_labeled_edges(labels, edges)?;
    let report = LoadReport {
        self_loops: cleanup.self_loops,
        duplicates: cleanup.duplicates,
    };
    if report.dropped() > 0 {
        log::warn!(
            "edge list: dropped {} self-loops and {} duplicate edges",
            report.self_loops,
            report.duplicates
        );
    }
    Ok((network, report))
}

fn load_node_values<T: Clone, R: BufRead>(
    source: R,
    network: &SocialNetwork,
    mut parse: impl FnMut(usize, &str, &str) -> Result<T, GraphError>,
) -> Result<Vec<T>, GraphError> {
    let mut values: Vec<Option<T>> = vec![None; network.node_count()];
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| GraphError::MalformedOpinion {
            line: line_no,
            content: format!("<read error: {e}>"),
        })?;
        let toks = fields(strip_comment(&line));
        let (label, value) = match toks.as_slice() {
            [] => continue,
            [l, v] => (*l, *v),
            _ => {
                return Err(GraphError::MalformedOpinion {
                    line: line_no,
                    content: line.clone(),
                })
            }
        };
        let node = network
            .node_by_label(label)
            .ok_or_else(|| GraphError::UnknownLabel {
                line: line_no,
                label: label.to_owned(),
            })?;
        let parsed = parse(line_no, label, value)?;
        if values[node].replace(parsed).is_some() {
            return Err(GraphError::DuplicateLabel {
                line: line_no,
                label: label.to_owned(),
            });
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(node, v)| {
            v.ok_or_else(|| GraphError::MissingOpinion {
                label: network.label(node).to_owned(),
            })
        })
        .collect()
}

/// Reads `node,value` lines into an opinion vector aligned with `network`.
pub fn load_opinions<R: BufRead>(
    source: R,
    network: &SocialNetwork,
) -> Result<OpinionVector, GraphError> {
    let values = load_node_values(source, network, |line, label, raw| {
        let value: f64 = raw.parse().map_err(|_| GraphError::MalformedOpinion {
            line,
            content: format!("{label},{raw}"),
        })?;
        if !(0.0..=1.0).contains(&value) {
            return Err(GraphError::OpinionOutOfRange {
                line,
                label: label.to_owned(),
                value,
            });
        }
        Ok(value)
    })?;
    OpinionVector::for_network(values, network)
}

/// Reads `node,community` lines; community ids are compacted densely.
pub fn load_communities<R: BufRead>(
    source: R,
    network: &SocialNetwork,
) -> Result<CommunityPartition, GraphError> {
    let values = load_node_values(source, network, |line, label, raw| {
        raw.parse::<usize>()
            .map_err(|_| GraphError::MalformedOpinion {
                line,
                content: format!("{label},{raw}"),
            })
    })?;
    CommunityPartition::compact(&values)
}

pub fn write_edge_list<W: Write>(network: &SocialNetwork, mut out: W) -> std::io::Result<()> {
    for (u, v) in network.edges() {
        writeln!(out, "{},{}", network.label(u), network.label(v))?;
    }
    Ok(())
}

pub fn write_opinions<W: Write>(
    network: &SocialNetwork,
    opinions: &OpinionVector,
    mut out: W,
) -> std::io::Result<()> {
    for (node, value) in opinions.values().iter().enumerate() {
        writeln!(out, "{},{}", network.label(node), value)?;
    }
    Ok(())
}

pub fn write_communities<W: Write>(
    network: &SocialNetwork,
    partition: &CommunityPartition,
    mut out: W,
) -> std::io::Result<()> {
    for (node, c) in partition.assignment().iter().enumerate() {
        writeln!(out, "{},{}", network.label(node), c)?;
    }
    Ok(())
}
