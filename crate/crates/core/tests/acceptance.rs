//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Normal};

use rlsf_core::engagement::{
    best_of_sweep, default_grid, propagate, reachability_oracle, sentiment_sweep, CascadeConfig,
};
use rlsf_core::experiment::{run_experiment, ExperimentConfig};
use rlsf_core::graph::{louvain, newman_modularity, select_injection, OpinionVector, PlacementStrategy, SocialNetwork};
use rlsf_core::netgen::{generate, measure_homophily, GeneratedNetwork, GeneratorConfig, OpinionProfile};
use rlsf_core::policy::{analytic_objective_gradient, expected_reward, objective, SentimentPolicy, TemplateRealizer};
use rlsf_core::ransac::{ransac_fit, RansacConfig};
use rlsf_core::scoring::{fk_grade, LexiconScorer};
use rlsf_core::trainer::{moving_average, reinforce_update, train, Environment, Scored, StepLog, StopReason, TrainConfig};

const SEEDS: u64 = 5;
const WINDOW: usize = 15;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> (SocialNetwork, OpinionVector) {
    let n = rng.random_range(2..=50);
    let p = rng.random_range(0.02..0.3);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let (net, _) = SocialNetwork::from_edges(n, edges).unwrap();
    let x = OpinionVector::new((0..n).map(|_| rng.random::<f64>()).collect()).unwrap();
    (net, x)
}

fn cascade_oracle(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let (mut cases, mut agree) = (0, 0);
    for _ in 0..200 {
        let (net, x) = random_instance(&mut rng);
        for eps in [0.1, 0.2, 0.5] {
            let cfg = CascadeConfig::new(eps).unwrap();
            for _ in 0..10 {
                let source = rng.random_range(0..net.node_count());
                let s = rng.random::<f64>();
                let a = propagate(&net, &x, source, s, &cfg).unwrap().active;
                let b = reachability_oracle(&net, &x, source, s, &cfg).unwrap();
                cases += 1;
                agree += (a == b) as usize;
            }
        }
    }
    let elapsed = start.elapsed();
    r.check(
        "cascade oracle equivalence",
        agree == cases && elapsed < Duration::from_secs(10),
        format!("{agree}/{cases} cases agree in {:.2}s", elapsed.as_secs_f64()),
    );
}

fn epsilon_monotonicity(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut ok = 0;
    for _ in 0..100 {
        let (net, x) = random_instance(&mut rng);
        let source = rng.random_range(0..net.node_count());
        let s = rng.random::<f64>();
        let mut eps: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
        eps.sort_by(f64::total_cmp);
        let sets: Vec<BTreeSet<usize>> = eps
            .iter()
            .map(|&e| {
                let cfg = CascadeConfig::new(e).unwrap();
                propagate(&net, &x, source, s, &cfg).unwrap().active.into_iter().collect()
            })
            .collect();
        ok += sets.windows(2).all(|w| w[0].is_subset(&w[1])) as usize;
    }
    r.check("epsilon monotonicity", ok == 100, format!("{ok}/100 instances nested"));
}

fn gradient_correctness(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let bins = rng.random_range(2..=21);
        let logits: Vec<f64> = (0..bins).map(|_| rng.random_range(-2.0..2.0)).collect();
        let reference: Vec<f64> = (0..bins).map(|_| rng.random_range(-2.0..2.0)).collect();
        let rewards: Vec<f64> = (0..bins).map(|_| rng.random_range(0.0..10.0)).collect();
        let beta = rng.random_range(0.0..1.0);
        let p = SentimentPolicy::new(logits.clone()).unwrap();
        let q = SentimentPolicy::new(reference).unwrap().snapshot();
        let g = analytic_objective_gradient(&p, &q, &rewards, beta).unwrap();
        for j in 0..bins {
            let shifted = |d: f64| {
                let mut l = logits.clone();
                l[j] += d;
                objective(&SentimentPolicy::new(l).unwrap(), &q, &rewards, beta).unwrap()
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            worst = worst.max((fd - g[j]).abs());
        }
    }
    let fd_ok = worst < 1e-6;

    let p = SentimentPolicy::new(vec![0.3, -0.2, 0.5, 0.0, -0.4]).unwrap();
    let rewards = [0.0, 10.0, 1.0, 9.0, 10.0];
    let exact = analytic_objective_gradient(&p, &p.snapshot(), &rewards, 0.0).unwrap();
    let baseline = expected_reward(&p, &rewards).unwrap();
    let dist = WeightedIndex::new(p.probabilities()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let batch: Vec<Scored> = (0..100_000)
        .map(|_| {
            let bin = dist.sample(&mut rng);
            Scored {
                bin,
                advantage: rewards[bin] - baseline,
            }
        })
        .collect();
    let stepped = reinforce_update(&p, &batch, 1.0).unwrap();
    let worst_rel = stepped
        .logits()
        .iter()
        .zip(p.logits())
        .zip(&exact)
        .map(|((a, b), e)| ((a - b) - e).abs() / e.abs())
        .fold(0.0, f64::max);
    r.check(
        "gradient correctness",
        fd_ok && worst_rel < 0.02,
        format!("finite-difference max error {worst:.2e}, score-function max relative error {:.2}%", 100.0 * worst_rel),
    );
}

struct Run {
    seed: u64,
    upper_bound: usize,
    best_sentiment: f64,
    final_engagement: f64,
    final_sentiment: f64,
    mode: f64,
    stop_reason: StopReason,
    logs: Vec<StepLog>,
    elapsed: Duration,
}

fn fixture(profile: OpinionProfile, seed: u64) -> GeneratedNetwork {
    let mut c = GeneratorConfig::new(300, seed).with_profile(profile);
    c.homophily = 0.75;
    c.mixing = 0.05;
    generate(&c).unwrap()
}

fn run(profile: OpinionProfile, seed: u64, cfg: TrainConfig) -> Run {
    let start = Instant::now();
    let g = fixture(profile, seed);
    let source = select_injection(&g.network, &g.opinions, &g.planted, PlacementStrategy::Central).unwrap();
    let cascade = CascadeConfig::new(0.2).unwrap();
    let sweep = sentiment_sweep(&g.network, &g.opinions, source, &cascade, &default_grid(101)).unwrap();
    let (best_sentiment, upper_bound) = best_of_sweep(&sweep);
    let (scorer, realizer) = (LexiconScorer::bundled(), TemplateRealizer::bundled());
    let env = Environment {
        network: &g.network,
        opinions: &g.opinions,
        source,
        cascade,
        scorer: &scorer,
        realizer: &realizer,
    };
    let out = train(&env, SentimentPolicy::reference(21).unwrap(), &cfg).unwrap();
    let last = |f: fn(&StepLog) -> f64| {
        let series: Vec<f64> = out.logs.iter().map(f).collect();
        *moving_average(&series, WINDOW).unwrap().last().unwrap()
    };
    Run {
        seed,
        upper_bound,
        best_sentiment,
        final_engagement: last(|l| l.mean_engagement),
        final_sentiment: last(|l| l.mean_sentiment),
        mode: out.policy.center(out.policy.mode()),
        stop_reason: out.stop_reason,
        logs: out.logs,
        elapsed: start.elapsed(),
    }
}

fn convergence_runs(profile: OpinionProfile, max_steps: usize) -> Vec<Run> {
    (0..SEEDS)
        .map(|seed| {
            run(
                profile,
                seed,
                TrainConfig {
                    max_steps,
                    seed,
                    ..TrainConfig::default()
                },
            )
        })
        .collect()
}

fn ratio(run: &Run) -> f64 {
    run.final_engagement / run.upper_bound as f64
}

fn convergence(r: &mut Report) {
    let positive = convergence_runs(OpinionProfile::Positive, 80);
    let negative = convergence_runs(OpinionProfile::Negative, 200);

    let mut worst_identity: f64 = 0.0;
    let mut rows = 0;
    for run in positive.iter().chain(&negative) {
        for log in &run.logs {
            for s in &log.samples {
                let expected = s.fluency.max(0.0) * s.engagement as f64;
                worst_identity = worst_identity.max((s.reward * s.reward - expected).abs());
                rows += 1;
            }
        }
    }
    r.check(
        "reward identity",
        worst_identity <= 1e-9,
        format!("{rows} logged samples, max |reward^2 - fluency*engagement| = {worst_identity:.1e}"),
    );

    let slowest = positive.iter().map(|run| run.elapsed).max().unwrap();
    let pass1 = positive.iter().filter(|run| ratio(run) >= 0.9).count();
    let detail: Vec<String> = positive
        .iter()
        .map(|run| format!("seed {} {:.2}", run.seed, ratio(run)))
        .collect();
    r.check(
        "positive environment convergence",
        pass1 >= 4 && slowest < Duration::from_secs(120),
        format!(
            "{pass1}/{SEEDS} seeds reach 0.9 of the upper bound [{}], slowest seed {:.2}s",
            detail.join(", "),
            slowest.as_secs_f64()
        ),
    );

    let pass2 = negative
        .iter()
        .filter(|run| run.mode <= 0.3 && ratio(run) >= 0.8)
        .count();
    let detail: Vec<String> = negative
        .iter()
        .map(|run| format!("seed {} mode {} ratio {:.2}", run.seed, run.mode, ratio(run)))
        .collect();
    r.check(
        "adversarial environment convergence",
        pass2 >= 4,
        format!("{pass2}/{SEEDS} seeds [{}]", detail.join(", ")),
    );

    let gaps: Vec<f64> = positive
        .iter()
        .chain(&negative)
        .map(|run| (run.final_sentiment - run.best_sentiment).abs())
        .collect();
    let worst_gap = gaps.iter().copied().fold(0.0, f64::max);
    r.check(
        "learned sentiment matches the best sentiment",
        worst_gap <= 0.15,
        format!("{} runs, max |final sentiment - best sentiment| = {worst_gap:.3}", gaps.len()),
    );
}

fn kl_stopping(r: &mut Report) {
    let max_steps = 200;
    let run = run(
        OpinionProfile::Negative,
        0,
        TrainConfig {
            max_steps,
            kl_threshold: 0.5,
            ..TrainConfig::default()
        },
    );
    let final_kl = run.logs.last().unwrap().kl;
    r.check(
        "kl stopping",
        run.stop_reason == StopReason::KlThreshold && run.logs.len() < max_steps && final_kl >= 0.5,
        format!("{} after {} of {max_steps} steps, final kl {final_kl:.3}", run.stop_reason, run.logs.len()),
    );
}

fn generator_properties(r: &mut Report) {
    let (mut homophily_wins, mut modularity_wins) = (0, 0);
    for seed in 0..SEEDS {
        let build = |eta: f64, mu: f64| {
            let mut c = GeneratorConfig::new(300, seed);
            c.homophily = eta;
            c.mixing = mu;
            generate(&c).unwrap()
        };
        let (hi, lo) = (build(0.75, 0.05), build(0.25, 0.05));
        let h = |g: &GeneratedNetwork| measure_homophily(&g.network, &g.opinions).unwrap();
        homophily_wins += (h(&hi) > h(&lo)) as usize;
        let mixed = build(0.75, 0.40);
        let q = |g: &GeneratedNetwork| newman_modularity(&g.network, &g.planted).unwrap();
        modularity_wins += (q(&hi) > q(&mixed)) as usize;
    }
    r.check(
        "generator properties",
        homophily_wins >= 4 && modularity_wins >= 4,
        format!("homophily higher at 0.75 for {homophily_wins}/{SEEDS}, modularity higher at mixing 0.05 for {modularity_wins}/{SEEDS}"),
    );
}

fn fk_arithmetic(r: &mut Report) {
    let a = fk_grade("The cat sat on the mat.").unwrap().grade;
    let b = fk_grade("Cats. Cats. Cats.").unwrap().grade;
    r.check(
        "fk arithmetic",
        (a - -1.45).abs() < 1e-9 && (b - -3.40).abs() < 1e-9,
        format!("{a:.12} and {b:.12}"),
    );
}

fn ransac_recovery(r: &mut Report) {
    let mut recovered = 0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let points: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                if i < 60 {
                    (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0))
                } else {
                    let x = rng.random_range(0.0..10.0);
                    (x, 2.0 * x + 1.0 + noise.sample(&mut rng))
                }
            })
            .collect();
        let cfg = RansacConfig {
            seed,
            ..RansacConfig::default()
        };
        if let Ok(fit) = ransac_fit(&points, &cfg) {
            recovered += ((1.9..=2.1).contains(&fit.slope) && (0.8..=1.2).contains(&fit.intercept)) as usize;
        }
    }
    r.check("ransac recovery", recovered >= 19, format!("{recovered}/20 seeds recover y = 2x + 1"));
}

fn louvain_sanity(r: &mut Report) {
    let mut edges = Vec::new();
    for offset in [0, 10] {
        for u in 0..10 {
            for v in 0..10 {
                if u != v {
                    edges.push((offset + u, offset + v));
                }
            }
        }
    }
    edges.push((9, 10));
    let (net, _) = SocialNetwork::from_edges(20, edges).unwrap();
    let exact = (0..10)
        .filter(|&seed| {
            let p = louvain(&net, seed).unwrap();
            p.community_count() == 2
                && (0..10).all(|i| p.community_of(i) == p.community_of(0))
                && (10..20).all(|i| p.community_of(i) == p.community_of(10))
                && p.community_of(0) != p.community_of(10)
        })
        .count();
    r.check("louvain sanity", exact == 10, format!("{exact}/10 seeds recover both cliques"));
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((name, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn reproducibility(r: &mut Report) {
    let tmp = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::parse(
        "seed = 3\nnetwork = generate\ngenerate.n = 300\ngenerate.profile = negative\ntrain.max_steps = 40\n",
        tmp.path(),
    )
    .unwrap();
    let original = tmp.path().join("original");
    run_experiment(&config, &original).unwrap();
    let manifest = original.join("manifest.txt");
    let replays: Vec<_> = ["replay-a", "replay-b"]
        .iter()
        .map(|name| {
            let out = tmp.path().join(name);
            run_experiment(&ExperimentConfig::load(&manifest).unwrap(), &out).unwrap();
            artifacts(&out)
        })
        .collect();
    let base = artifacts(&original);
    let identical = replays.iter().all(|files| *files == base);
    r.check(
        "reproducibility",
        identical,
        format!("{} artifacts compared across the original run and two manifest replays", base.len()),
    );
}

fn main() {
    let mut report = Report { failures: 0 };
    cascade_oracle(&mut report);
    epsilon_monotonicity(&mut report);
    gradient_correctness(&mut report);
    convergence(&mut report);
    kl_stopping(&mut report);
    generator_properties(&mut report);
    fk_arithmetic(&mut report);
    ransac_recovery(&mut report);
    louvain_sanity(&mut report);
    reproducibility(&mut report);
    if report.failures > 0 {
        println!("{} acceptance criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
