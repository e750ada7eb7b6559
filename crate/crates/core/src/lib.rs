//! Engagement-driven content generation on simulated social networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: directed follower graphs, opinion vectors, community
//!   partitions, betweenness, modularity, Louvain and injection placement.
//! - [`netgen`]: LFR-style synthetic networks with planted communities and
//!   Beta-distributed opinions.
//! - [`engagement`]: the bounded-confidence cascade and sentiment sweeps.
//! - [`scoring`]: Flesch–Kincaid fluency, sentiment scorers and the reward.
//! - [`policy`]: the categorical sentiment policy and its text realizer.
//! - [`trainer`]: the simulated-feedback fine-tuning loop with PPO updates.
//! - [`ransac`]: robust line fitting for simulated-vs-observed comparisons.
//! - [`experiment`]: config files, orchestration and CSV artifacts.

pub mod engagement;
pub mod experiment;
pub mod graph;
pub mod netgen;
pub mod policy;
pub mod ransac;
pub mod scoring;
pub mod trainer;

pub use engagement::{propagate, CascadeConfig, CascadeResult};
pub use experiment::{run_command, run_experiment, Command, ExperimentConfig, ExperimentError};
pub use graph::{CommunityPartition, NodeId, OpinionVector, PlacementStrategy, SocialNetwork};
pub use netgen::{generate, GeneratorConfig, OpinionProfile};
pub use policy::{PolicySnapshot, SentimentPolicy, TemplateRealizer};
pub use ransac::{ransac_fit, RansacConfig, RansacFit};
pub use scoring::{fk_grade, reward, LexiconScorer, SentimentScorer};
pub use trainer::{train, Environment, StopReason, TrainConfig};
