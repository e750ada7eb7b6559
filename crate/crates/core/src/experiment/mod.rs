//! Experiment orchestration and artifacts.
//!
//! Every command resolves an [`ExperimentConfig`], writes `manifest.txt`
//! (the resolved config, which replays the run) and then its own artifacts
//! into the output directory. Failures map onto stable exit codes through
//! [`ExperimentError::exit_code`].

mod config;

pub use config::{parse_pairs, ConfigError, ExperimentConfig, NetworkSource, DEFAULT_CHECKPOINT_EVERY};

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engagement::{best_of_sweep, default_grid, propagate, sentiment_sweep, write_sweep_csv, EngagementError};
use crate::graph::{
    betweenness_centrality, load_communities, load_edge_list, load_opinions, louvain, select_injection,
    write_communities, write_edge_list, write_opinions, CommunityPartition, GraphError, NodeId, OpinionVector,
    PlacementStrategy, SocialNetwork,
};
use crate::netgen::{generate, NetgenError};
use crate::policy::{PolicyError, SentimentPolicy, TemplateRealizer, DEFAULT_BINS};
use crate::ransac::{ransac_fit, RansacError, RansacFit};
use crate::scoring::{score_sentiment, LexiconScorer, ProcessScorer, ScoringError, SentimentScorer};
use crate::trainer::{moving_average, train_with, write_steps_csv, Environment, TrainError, TrainOutcome, MOVING_AVERAGE_WINDOW};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Graph {
        path: PathBuf,
        #[source]
        source: GraphError,
    },
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error(transparent)]
    Placement(GraphError),
    #[error(transparent)]
    Netgen(#[from] NetgenError),
    #[error(transparent)]
    Engagement(#[from] EngagementError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Ransac(#[from] RansacError),
    #[error("scorer: {0}")]
    Scorer(#[source] ScoringError),
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ExperimentError {
    /// 2 config, 3 input data, 4 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Graph { .. } | Self::Data { .. } | Self::Ransac(_) => EXIT_DATA,
            Self::Placement(_)
            | Self::Netgen(_)
            | Self::Engagement(_)
            | Self::Train(_)
            | Self::Scorer(_)
            | Self::Output { .. } => EXIT_RUNTIME,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Place,
    Sweep,
    Train,
    Compare,
    Ransac,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Generate => "generate",
            Self::Place => "place",
            Self::Sweep => "sweep",
            Self::Train => "train",
            Self::Compare => "compare",
            Self::Ransac => "ransac",
        }
    }
}

fn write_artifact(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let wrap = |source| ExperimentError::Output {
        path: path.to_owned(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
    body(&mut w).map_err(wrap)?;
    w.flush().map_err(wrap)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| ExperimentError::Data {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

/// A network with opinions and the partition used for placement.
#[derive(Debug, Clone)]
pub struct Network {
    pub network: SocialNetwork,
    pub opinions: OpinionVector,
    pub partition: CommunityPartition,
    pub generated: bool,
}

/// Generated networks use their planted partition; loaded networks use the
/// communities file or else Louvain.
pub fn build_network(config: &ExperimentConfig) -> Result<Network> {
    match &config.source {
        NetworkSource::Generate(g) => {
            let out = generate(g)?;
            Ok(Network {
                network: out.network,
                opinions: out.opinions,
                partition: out.planted,
                generated: true,
            })
        }
        NetworkSource::Load {
            edges,
            opinions,
            communities,
        } => {
            let graph_err = |path: &Path| {
                let path = path.to_owned();
                move |source| ExperimentError::Graph { path, source }
            };
            let (network, report) = load_edge_list(open(edges)?).map_err(graph_err(edges))?;
            if report.dropped() > 0 {
                log::warn!(
                    "{}: dropped {} self-loops and {} duplicate edges",
                    edges.display(),
                    report.self_loops,
                    report.duplicates
                );
            }
            let x = load_opinions(open(opinions)?, &network).map_err(graph_err(opinions))?;
            let partition = match communities {
                Some(path) => load_communities(open(path)?, &network).map_err(graph_err(path))?,
                None => louvain(&network, config.seed).map_err(graph_err(edges))?,
            };
            Ok(Network {
                network,
                opinions: x,
                partition,
                generated: false,
            })
        }
    }
}

pub fn build_scorer(config: &ExperimentConfig) -> Result<Box<dyn SentimentScorer>> {
    if let Some(path) = &config.lexicon {
        let lex = LexiconScorer::load(path).map_err(|e| ExperimentError::Data {
            path: path.clone(),
            message: e.to_string(),
        })?;
        return Ok(Box::new(lex));
    }
    if let Some(cmd) = &config.scorer_command {
        let mut parts = cmd.split_whitespace();
        let program = parts.next().unwrap_or_default();
        let mut command = std::process::Command::new(program);
        command.args(parts);
        return Ok(Box::new(ProcessScorer::spawn(command).map_err(ExperimentError::Scorer)?));
    }
    Ok(Box::new(LexiconScorer::bundled()))
}

pub fn build_realizer(config: &ExperimentConfig) -> Result<TemplateRealizer> {
    match &config.templates {
        None => Ok(TemplateRealizer::bundled_with_query(&config.query)),
        Some(path) => TemplateRealizer::load(&config.query, DEFAULT_BINS, path).map_err(|e: PolicyError| {
            ExperimentError::Data {
                path: path.clone(),
                message: e.to_string(),
            }
        }),
    }
}

fn write_manifest(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let text = config.manifest();
    write_artifact(&out.join("manifest.txt"), |w| w.write_all(text.as_bytes()))
}

fn prepare(config: &ExperimentConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|source| ExperimentError::Output {
        path: out.to_owned(),
        source,
    })?;
    write_manifest(config, out)
}

fn write_network(net: &Network, out: &Path) -> Result<()> {
    write_artifact(&out.join("edges.csv"), |w| write_edge_list(&net.network, w))?;
    write_artifact(&out.join("opinions.csv"), |w| write_opinions(&net.network, &net.opinions, w))?;
    write_artifact(&out.join("communities.csv"), |w| write_communities(&net.network, &net.partition, w))
}

/// The injection node and the facts printed in `placement.txt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub strategy: PlacementStrategy,
    pub node: NodeId,
    pub label: String,
    pub community: usize,
    pub community_size: usize,
    pub community_mean_opinion: f64,
    pub opinion: f64,
    pub out_degree: usize,
    pub betweenness: f64,
}

pub fn place(net: &Network, strategy: PlacementStrategy) -> Result<Placement> {
    let node = select_injection(&net.network, &net.opinions, &net.partition, strategy)
        .map_err(ExperimentError::Placement)?;
    let community = net.partition.community_of(node);
    let betweenness = betweenness_centrality(&net.network)[node];
    Ok(Placement {
        strategy,
        node,
        label: net.network.label(node).to_owned(),
        community,
        community_size: net.partition.sizes()[community],
        community_mean_opinion: net.partition.mean_opinions(&net.opinions)[community],
        opinion: net.opinions.get(node),
        out_degree: net.network.out_degree(node),
        betweenness,
    })
}

fn write_placement(p: &Placement, out: &Path) -> Result<()> {
    write_artifact(&out.join("placement.txt"), |w| {
        writeln!(w, "strategy = {}", p.strategy)?;
        writeln!(w, "node = {}", p.label)?;
        writeln!(w, "community = {}", p.community)?;
        writeln!(w, "community_size = {}", p.community_size)?;
        writeln!(w, "community_mean_opinion = {}", p.community_mean_opinion)?;
        writeln!(w, "opinion = {}", p.opinion)?;
        writeln!(w, "out_degree = {}", p.out_degree)?;
        writeln!(w, "betweenness = {}", p.betweenness)
    })
}

/// Sweep counts plus the best grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub sweep: Vec<(f64, usize)>,
    pub best_sentiment: f64,
    pub max_count: usize,
}

pub fn sweep(net: &Network, source: NodeId, config: &ExperimentConfig) -> Result<SweepReport> {
    let sweep = sentiment_sweep(
        &net.network,
        &net.opinions,
        source,
        &config.cascade(),
        &default_grid(config.sweep_points),
    )?;
    let (best_sentiment, max_count) = best_of_sweep(&sweep);
    Ok(SweepReport {
        sweep,
        best_sentiment,
        max_count,
    })
}

fn write_sweep(report: &SweepReport, out: &Path) -> Result<()> {
    write_artifact(&out.join("sweep.csv"), |w| write_sweep_csv(&report.sweep, w))?;
    write_artifact(&out.join("upper_bound.txt"), |w| {
        writeln!(w, "best_sentiment = {}", report.best_sentiment)?;
        writeln!(w, "max_count = {}", report.max_count)?;
        writeln!(w, "grid_points = {}", report.sweep.len())
    })
}

/// Result of a full training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub placement: Placement,
    pub sweep: SweepReport,
    pub outcome: TrainOutcome,
    /// Moving averages at the last step.
    pub final_engagement: f64,
    pub final_sentiment: f64,
}

fn checkpoint_path(out: &Path, step: usize) -> PathBuf {
    out.join("checkpoints").join(format!("step_{step:04}.txt"))
}

/// Generates or loads the network, places, sweeps and trains.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<TrainReport> {
    prepare(config, out)?;
    let net = build_network(config)?;
    if net.generated {
        write_network(&net, out)?;
    }
    let placement = place(&net, config.placement)?;
    write_placement(&placement, out)?;
    let sweep_report = sweep(&net, placement.node, config)?;
    write_sweep(&sweep_report, out)?;

    let scorer = build_scorer(config)?;
    let realizer = build_realizer(config)?;
    let env = Environment {
        network: &net.network,
        opinions: &net.opinions,
        source: placement.node,
        cascade: config.cascade(),
        scorer: scorer.as_ref(),
        realizer: &realizer,
    };
    let checkpoints = out.join("checkpoints");
    std::fs::create_dir_all(&checkpoints).map_err(|source| ExperimentError::Output {
        path: checkpoints.clone(),
        source,
    })?;
    let every = config.checkpoint_every;
    let reference = SentimentPolicy::reference(DEFAULT_BINS).expect("default bins");
    let outcome = train_with(&env, reference, &config.train, |log, policy| {
        if (log.step + 1) % every == 0 {
            let path = checkpoint_path(out, log.step + 1);
            let file = File::create(&path)?;
            policy
                .write_checkpoint(BufWriter::new(file))
                .map_err(|e| TrainError::Io(std::io::Error::other(e.to_string())))?;
        }
        Ok(())
    })?;
    write_artifact(&out.join("steps.csv"), |w| write_steps_csv(&outcome.logs, w))?;
    write_artifact(&out.join("policy_final.txt"), |w| {
        outcome
            .policy
            .write_checkpoint(w)
            .map_err(|e| std::io::Error::other(e.to_string()))
    })?;

    let engagement: Vec<f64> = outcome.logs.iter().map(|l| l.mean_engagement).collect();
    let sentiment: Vec<f64> = outcome.logs.iter().map(|l| l.mean_sentiment).collect();
    let last = |s: &[f64]| *moving_average(s, MOVING_AVERAGE_WINDOW).expect("at least one step").last().unwrap();
    let final_engagement = last(&engagement);
    let final_sentiment = last(&sentiment);
    let final_kl = outcome.logs.last().map(|l| l.kl).unwrap_or(0.0);
    write_artifact(&out.join("training.txt"), |w| {
        writeln!(w, "stop_reason = {}", outcome.stop_reason)?;
        writeln!(w, "steps = {}", outcome.logs.len())?;
        writeln!(w, "final_kl = {final_kl}")?;
        writeln!(w, "final_engagement_ma = {final_engagement}")?;
        writeln!(w, "final_sentiment_ma = {final_sentiment}")?;
        writeln!(w, "modal_sentiment = {}", outcome.policy.center(outcome.policy.mode()))
    })?;
    log::info!(
        "{} after {} steps: engagement {:.1} of {} (sentiment {:.3}, best {})",
        outcome.stop_reason,
        outcome.logs.len(),
        final_engagement,
        sweep_report.max_count,
        final_sentiment,
        sweep_report.best_sentiment
    );
    Ok(TrainReport {
        placement,
        sweep: sweep_report,
        outcome,
        final_engagement,
        final_sentiment,
    })
}

/// One simulated-vs-observed row of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub text: String,
    pub source: String,
    pub sentiment: f64,
    pub simulated: usize,
    pub observed: f64,
}

/// Scores each `text,source,observed` row and runs its cascade.
pub fn compare_engagement(
    net: &Network,
    texts: &Path,
    scorer: &dyn SentimentScorer,
    config: &ExperimentConfig,
) -> Result<Vec<ComparisonRow>> {
    let data_err = |message: String| ExperimentError::Data {
        path: texts.to_owned(),
        message,
    };
    let mut reader = csv::Reader::from_reader(open(texts)?);
    let headers = reader.headers().map_err(|e| data_err(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| data_err(format!("missing column {name:?}")))
    };
    let (ti, si, oi) = (column("text")?, column("source")?, column("observed")?);
    let cascade = config.cascade();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| data_err(format!("row {line}: {e}")))?;
        let field = |j: usize| record.get(j).unwrap_or("").trim().to_owned();
        let (text, source) = (field(ti), field(si));
        let observed: f64 = field(oi)
            .parse()
            .map_err(|_| data_err(format!("row {line}: observed {:?} is not a number", field(oi))))?;
        let node = net
            .network
            .node_by_label(&source)
            .ok_or_else(|| data_err(format!("row {line}: unknown source node {source:?}")))?;
        let sentiment = score_sentiment(scorer, &text).map_err(|e| data_err(format!("row {line}: {e}")))?;
        let simulated = propagate(&net.network, &net.opinions, node, sentiment, &cascade)?.count();
        rows.push(ComparisonRow {
            text,
            source,
            sentiment,
            simulated,
            observed,
        });
    }
    Ok(rows)
}

fn write_comparison(rows: &[ComparisonRow], path: &Path) -> Result<()> {
    let wrap = |e: csv::Error| ExperimentError::Output {
        path: path.to_owned(),
        source: std::io::Error::other(e.to_string()),
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(["text", "source", "sentiment", "simulated", "observed"])
        .map_err(wrap)?;
    for r in rows {
        w.write_record([
            r.text.clone(),
            r.source.clone(),
            r.sentiment.to_string(),
            r.simulated.to_string(),
            r.observed.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|source| ExperimentError::Output {
        path: path.to_owned(),
        source,
    })
}

/// Reads two numeric columns of a headed CSV.
pub fn read_points(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    let data_err = |message: String| ExperimentError::Data {
        path: path.to_owned(),
        message,
    };
    let mut reader = csv::Reader::from_reader(open(path)?);
    let headers = reader.headers().map_err(|e| data_err(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| data_err(format!("missing column {name:?}")))
    };
    let (xi, yi) = (column(x)?, column(y)?);
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data_err(format!("row {}: {e}", i + 2)))?;
        let num = |j: usize| -> Result<f64> {
            let raw = record.get(j).unwrap_or("").trim();
            raw.parse()
                .map_err(|_| data_err(format!("row {}: {raw:?} is not a number", i + 2)))
        };
        points.push((num(xi)?, num(yi)?));
    }
    Ok(points)
}

fn write_ransac(fit: &RansacFit, points: usize, path: &Path) -> Result<()> {
    write_artifact(path, |w| {
        writeln!(w, "slope = {}", fit.slope)?;
        writeln!(w, "intercept = {}", fit.intercept)?;
        writeln!(w, "inliers = {}", fit.inlier_count())?;
        writeln!(w, "points = {points}")?;
        writeln!(w, "threshold = {}", fit.threshold)?;
        writeln!(w, "iterations = {}", fit.iterations)
    })
}

fn missing(key: &str) -> ExperimentError {
    ExperimentError::Config(ConfigError {
        problems: vec![format!("{key} is required for this command")],
    })
}

/// Runs one subcommand, writing its artifacts into `out`.
pub fn run_command(command: Command, config: &ExperimentConfig, out: &Path) -> Result<()> {
    match command {
        Command::Generate => {
            if !matches!(config.source, NetworkSource::Generate(_)) {
                return Err(ExperimentError::Config(ConfigError {
                    problems: vec!["generate needs a generate.* network source".into()],
                }));
            }
            prepare(config, out)?;
            let net = build_network(config)?;
            write_network(&net, out)?;
            log::info!(
                "generated {} nodes, {} edges, {} communities",
                net.network.node_count(),
                net.network.edge_count(),
                net.partition.community_count()
            );
        }
        Command::Place => {
            prepare(config, out)?;
            let net = build_network(config)?;
            write_placement(&place(&net, config.placement)?, out)?;
        }
        Command::Sweep => {
            prepare(config, out)?;
            let net = build_network(config)?;
            let p = place(&net, config.placement)?;
            write_placement(&p, out)?;
            write_sweep(&sweep(&net, p.node, config)?, out)?;
        }
        Command::Train => {
            run_experiment(config, out)?;
        }
        Command::Compare => {
            let texts = config.compare_texts.clone().ok_or_else(|| missing("compare.texts"))?;
            prepare(config, out)?;
            let net = build_network(config)?;
            let scorer = build_scorer(config)?;
            let rows = compare_engagement(&net, &texts, scorer.as_ref(), config)?;
            write_comparison(&rows, &out.join("compare.csv"))?;
        }
        Command::Ransac => {
            let input = config.ransac_input.clone().ok_or_else(|| missing("ransac.input"))?;
            prepare(config, out)?;
            let points = read_points(&input, &config.ransac_x, &config.ransac_y)?;
            let fit = ransac_fit(&points, &config.ransac)?;
            write_ransac(&fit, points.len(), &out.join("ransac.txt"))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text, Path::new(".")).unwrap()
    }

    #[test]
    fn exit_codes() {
        let config = ExperimentError::Config(ConfigError { problems: vec!["x".into()] });
        assert_eq!(config.exit_code(), EXIT_CONFIG);
        let data = ExperimentError::Data {
            path: "a".into(),
            message: "b".into(),
        };
        assert_eq!(data.exit_code(), EXIT_DATA);
        let runtime = ExperimentError::Train(TrainError::EmptySeries);
        assert_eq!(runtime.exit_code(), EXIT_RUNTIME);
    }

    #[test]
    fn minimal_run_writes_every_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg("generate.n = 100\ntrain.max_steps = 12\n");
        let report = run_experiment(&c, dir.path()).unwrap();
        for name in [
            "manifest.txt",
            "edges.csv",
            "opinions.csv",
            "communities.csv",
            "placement.txt",
            "sweep.csv",
            "upper_bound.txt",
            "steps.csv",
            "policy_final.txt",
            "training.txt",
            "checkpoints/step_0010.txt",
        ] {
            assert!(dir.path().join(name).is_file(), "{name}");
        }
        let steps = std::fs::read_to_string(dir.path().join("steps.csv")).unwrap();
        assert_eq!(steps.lines().count(), 13);
        let sweep = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(sweep.lines().count(), 102);
        let policy = SentimentPolicy::read_checkpoint(open(&dir.path().join("policy_final.txt")).unwrap()).unwrap();
        assert_eq!(policy, report.outcome.policy);
        let (g, _) = load_edge_list(open(&dir.path().join("edges.csv")).unwrap()).unwrap();
        assert!(g.edge_count() > 0);
    }

    #[test]
    fn compare_and_ransac() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("e.csv"), "a,b\nb,c\nc,d\nx,y\n").unwrap();
        std::fs::write(dir.path().join("o.csv"), "a,0.9\nb,0.85\nc,0.8\nd,0.1\nx,0.5\ny,0.2\n").unwrap();
        std::fs::write(
            dir.path().join("t.csv"),
            "text,source,observed\n\"Wonderful, truly.\",a,3\nplain words,x,2\n\"Wonderful, truly.\",a,3\nhorrible,b,1\n",
        )
        .unwrap();
        let c = ExperimentConfig::parse(
            "network = load\nload.edges = e.csv\nload.opinions = o.csv\ncompare.texts = t.csv\n",
            dir.path(),
        )
        .unwrap();
        let out = dir.path().join("out");
        run_command(Command::Compare, &c, &out).unwrap();
        let rows = read_points(&out.join("compare.csv"), "simulated", "observed").unwrap();
        assert_eq!(rows, vec![(3.0, 3.0), (2.0, 2.0), (3.0, 3.0), (1.0, 1.0)]);

        let c2 = ExperimentConfig::parse(
            &format!("network = generate\nransac.input = {}\n", out.join("compare.csv").display()),
            dir.path(),
        )
        .unwrap();
        run_command(Command::Ransac, &c2, &out).unwrap();
        let fit = std::fs::read_to_string(out.join("ransac.txt")).unwrap();
        assert!(fit.starts_with("slope = 1\nintercept = 0\n"), "{fit}");
    }

    #[test]
    fn compare_rejects_unknown_source() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("e.csv"), "a,b\n").unwrap();
        std::fs::write(dir.path().join("o.csv"), "a,0.9\nb,0.85\n").unwrap();
        std::fs::write(dir.path().join("t.csv"), "text,source,observed\nhello,zz,3\n").unwrap();
        let c = ExperimentConfig::parse(
            "load.edges = e.csv\nload.opinions = o.csv\ncompare.texts = t.csv\n",
            dir.path(),
        )
        .unwrap();
        let err = run_command(Command::Compare, &c, &dir.path().join("out")).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_DATA);
        assert!(err.to_string().contains("unknown source node"), "{err}");
    }

    #[test]
    fn malformed_edge_file_is_a_data_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("e.csv"), "a,b,c\n").unwrap();
        std::fs::write(dir.path().join("o.csv"), "a,0.9\n").unwrap();
        let c = ExperimentConfig::parse("load.edges = e.csv\nload.opinions = o.csv\n", dir.path()).unwrap();
        let err = run_command(Command::Place, &c, &dir.path().join("out")).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_DATA);
    }
}
