//! Robust straight-line fit by random two-point hypotheses.
//!
//! With no explicit threshold the fit runs twice: first with `1.5 ×` the
//! median absolute residual of ordinary least squares, then with `1.5 ×` the
//! median absolute residual of the first robust model. The first stage is
//! enough to shed gross outliers; the second tightens the band around the
//! recovered line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DEFAULT_ITERATIONS: usize = 1000;
pub const THRESHOLD_FACTOR: f64 = 1.5;
pub const MIN_INLIER_FRACTION: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RansacError {
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("all points share x = {0}; slope is undefined")]
    Vertical(f64),
    #[error("point {0} is not finite")]
    NonFinite(usize),
    #[error("residual threshold {0} must be positive")]
    BadThreshold(f64),
    #[error("min_inliers {min} exceeds the {points} points")]
    BadMinInliers { min: usize, points: usize },
    #[error("no hypothesis reached {min} inliers (best {best}) in {iterations} iterations")]
    NoConsensus {
        min: usize,
        best: usize,
        iterations: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RansacConfig {
    pub iterations: usize,
    /// `None` selects the two-stage median rule.
    pub threshold: Option<f64>,
    /// `None` selects half of the points, rounded up.
    pub min_inliers: Option<usize>,
    pub seed: u64,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            threshold: None,
            min_inliers: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RansacFit {
    pub slope: f64,
    pub intercept: f64,
    pub inliers: Vec<bool>,
    pub threshold: f64,
    pub iterations: usize,
}

impl RansacFit {
    pub fn inlier_count(&self) -> usize {
        self.inliers.iter().filter(|&&b| b).count()
    }
}

/// Ordinary least squares; `None` when all x coincide.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn residual(p: (f64, f64), slope: f64, intercept: f64) -> f64 {
    (p.1 - slope * p.0 - intercept).abs()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn median_threshold(points: &[(f64, f64)], slope: f64, intercept: f64) -> f64 {
    let scale = 1.0 + points.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let m = median(points.iter().map(|&p| residual(p, slope, intercept)).collect());
    (THRESHOLD_FACTOR * m).max(1e-9 * scale)
}

fn consensus(
    points: &[(f64, f64)],
    slope: f64,
    intercept: f64,
    threshold: f64,
) -> (Vec<bool>, usize, f64) {
    let mut mask = vec![false; points.len()];
    let (mut count, mut total) = (0, 0.0);
    for (i, &p) in points.iter().enumerate() {
        let r = residual(p, slope, intercept);
        if r <= threshold {
            mask[i] = true;
            count += 1;
            total += r;
        }
    }
    (mask, count, total)
}

fn single_stage(
    points: &[(f64, f64)],
    iterations: usize,
    threshold: f64,
    min_inliers: usize,
    rng: &mut ChaCha8Rng,
) -> Result<RansacFit, RansacError> {
    let n = points.len();
    let mut best: Option<(f64, f64, usize, f64)> = None;
    for _ in 0..iterations {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (points[i], points[j]);
        if a.0 == b.0 {
            continue;
        }
        let slope = (b.1 - a.1) / (b.0 - a.0);
        let intercept = a.1 - slope * a.0;
        let (_, count, total) = consensus(points, slope, intercept, threshold);
        let better = match best {
            None => true,
            Some((_, _, c, t)) => count > c || (count == c && total < t),
        };
        if better {
            best = Some((slope, intercept, count, total));
        }
    }
    let (slope, intercept, count, _) = best.unwrap_or((0.0, 0.0, 0, 0.0));
    if count < min_inliers || best.is_none() {
        return Err(RansacError::NoConsensus {
            min: min_inliers,
            best: count,
            iterations,
        });
    }
    let (mask, _, _) = consensus(points, slope, intercept, threshold);
    let chosen: Vec<(f64, f64)> = points
        .iter()
        .zip(&mask)
        .filter_map(|(&p, &m)| m.then_some(p))
        .collect();
    if let Some((s, c)) = least_squares(&chosen) {
        let (refit_mask, refit_count, _) = consensus(points, s, c, threshold);
        if refit_count >= min_inliers {
            return Ok(RansacFit {
                slope: s,
                intercept: c,
                inliers: refit_mask,
                threshold,
                iterations,
            });
        }
    }
    Ok(RansacFit {
        slope,
        intercept,
        inliers: mask,
        threshold,
        iterations,
    })
}

pub fn ransac_fit(points: &[(f64, f64)], config: &RansacConfig) -> Result<RansacFit, RansacError> {
    let n = points.len();
    if n < 2 {
        return Err(RansacError::TooFewPoints(n));
    }
    if let Some(i) = points.iter().position(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(RansacError::NonFinite(i));
    }
    let Some((ols_slope, ols_intercept)) = least_squares(points) else {
        return Err(RansacError::Vertical(points[0].0));
    };
    let min_inliers = config
        .min_inliers
        .unwrap_or_else(|| (MIN_INLIER_FRACTION * n as f64).ceil() as usize);
    if min_inliers > n {
        return Err(RansacError::BadMinInliers { min: min_inliers, points: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    if let Some(t) = config.threshold {
        if t.is_nan() || t <= 0.0 {
            return Err(RansacError::BadThreshold(t));
        }
        return single_stage(points, config.iterations, t, min_inliers, &mut rng);
    }
    let first_threshold = median_threshold(points, ols_slope, ols_intercept);
    let first = single_stage(points, config.iterations, first_threshold, min_inliers, &mut rng)?;
    let second_threshold = median_threshold(points, first.slope, first.intercept);
    match single_stage(points, config.iterations, second_threshold, min_inliers, &mut rng) {
        Ok(mut second) => {
            second.iterations += first.iterations;
            Ok(second)
        }
        Err(_) => Ok(first),
    }
}
