//! Fits of the logical error rate ansatz `p_L = a L^2 (b p)^(c L)` and
//! threshold estimates from crossings of the `p_L(p)` curves.

use ftsynth_core::f2::PauliType;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::noise::McPoint;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points with failures spanning 2 distances, got {points} points over {distances} distances")]
    Insufficient { points: usize, distances: usize },
    #[error("least squares system is singular")]
    Singular,
    #[error("fitted exponent c = {0} is not positive")]
    NonPositive(f64),
    #[error("no crossing between curves of different distances")]
    NoCrossing,
}

/// Parameters of `p_L = a L^2 (b p)^(c L)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Weighted residual sum of squares in log space.
    pub rss: f64,
    pub points: usize,
}

impl FitParams {
    pub fn predict(&self, l: usize, p: f64) -> f64 {
        let l = l as f64;
        self.a * l * l * (self.b * p).powf(self.c * l)
    }
}

/// One observation: distance, physical rate, logical rate and a weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub l: usize,
    pub p: f64,
    pub rate: f64,
    pub weight: f64,
}

/// Observations of one failure type with zero-failure points dropped.
/// Weights are the inverse binomial variance of the log rate.
pub fn observations(points: &[McPoint], t: PauliType) -> Vec<Observation> {
    points
        .iter()
        .filter(|pt| pt.fails(t) > 0 && pt.fails(t) < pt.shots)
        .map(|pt| {
            let r = pt.rate(t);
            Observation { l: pt.l, p: pt.p, rate: r, weight: pt.shots as f64 * r / (1.0 - r) }
        })
        .collect()
}

/// Weighted least squares for `log p_L - 2 log L = log a + (c log b) L
/// + c L log p`, which is linear in `(log a, c log b, c)`.
pub fn fit_ansatz(obs: &[Observation]) -> Result<FitParams, FitError> {
    let mut ls: Vec<usize> = obs.iter().map(|o| o.l).collect();
    ls.sort_unstable();
    ls.dedup();
    if obs.len() < 3 || ls.len() < 2 {
        return Err(FitError::Insufficient { points: obs.len(), distances: ls.len() });
    }
    let m = obs.len();
    let mut design = DMatrix::<f64>::zeros(m, 3);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, o) in obs.iter().enumerate() {
        let l = o.l as f64;
        let s = o.weight.sqrt();
        design[(i, 0)] = s;
        design[(i, 1)] = s * l;
        design[(i, 2)] = s * l * o.p.ln();
        rhs[i] = s * (o.rate.ln() - 2.0 * l.ln());
    }
    let svd = design.clone().svd(true, true);
    let theta = svd.solve(&rhs, 1e-12).map_err(|_| FitError::Singular)?;
    if svd.rank(1e-9 * svd.singular_values.max()) < 3 {
        return Err(FitError::Singular);
    }
    let c = theta[2];
    if !(c > 0.0) {
        return Err(FitError::NonPositive(c));
    }
    let rss = (&design * &theta - &rhs).norm_squared();
    Ok(FitParams { a: theta[0].exp(), b: (theta[1] / c).exp(), c, rss, points: m })
}

/// Fit of one failure type from Monte Carlo points.
pub fn fit_points(points: &[McPoint], t: PauliType) -> Result<FitParams, FitError> {
    fit_ansatz(&observations(points, t))
}

/// Exact points of the ansatz on a grid, for checking the fit.
pub fn synthetic_points(params: (f64, f64, f64), ls: &[usize], ps: &[f64]) -> Vec<Observation> {
    let f = FitParams { a: params.0, b: params.1, c: params.2, rss: 0.0, points: 0 };
    ls.iter()
        .flat_map(|&l| ps.iter().map(move |&p| Observation { l, p, rate: f.predict(l, p), weight: 1.0 }))
        .collect()
}

/// First crossing of two curves sampled on the same grid, where the larger
/// distance goes from below to above. Interpolated linearly in
/// `(p, log p_L)`.
fn crossing(small: &[(f64, f64)], large: &[(f64, f64)]) -> Option<f64> {
    let diff: Vec<(f64, f64)> = small
        .iter()
        .filter_map(|&(p, a)| {
            large.iter().find(|&&(q, _)| (q - p).abs() < 1e-12).map(|&(_, b)| (p, b.ln() - a.ln()))
        })
        .filter(|(_, d)| d.is_finite())
        .collect();
    diff.windows(2).find(|w| w[0].1 < 0.0 && w[1].1 >= 0.0).map(|w| {
        let (p0, d0) = w[0];
        let (p1, d1) = w[1];
        p0 + (p1 - p0) * (-d0) / (d1 - d0)
    })
}

fn curves(points: &[McPoint], t: PauliType, rate: &dyn Fn(&McPoint) -> f64) -> Vec<(usize, Vec<(f64, f64)>)> {
    let mut ls: Vec<usize> = points.iter().map(|p| p.l).collect();
    ls.sort_unstable();
    ls.dedup();
    ls.into_iter()
        .map(|l| {
            let mut c: Vec<(f64, f64)> =
                points.iter().filter(|p| p.l == l && p.fails(t) > 0).map(|p| (p.p, rate(p))).collect();
            c.sort_by(|a, b| a.0.total_cmp(&b.0));
            (l, c)
        })
        .collect()
}

fn crossings(points: &[McPoint], t: PauliType, rate: &dyn Fn(&McPoint) -> f64) -> Vec<f64> {
    let cs = curves(points, t, rate);
    let mut out = Vec::new();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            if let Some(x) = crossing(&cs[i].1, &cs[j].1) {
                out.push(x);
            }
        }
    }
    out
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Threshold of one failure type with its bootstrap spread.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Mean of the pairwise crossings.
    pub p_th: f64,
    /// Standard deviation of the estimate over bootstrap resamples.
    pub spread: f64,
    pub crossings: Vec<f64>,
}

/// Threshold from pairwise crossings across distances. The spread comes
/// from a parametric bootstrap that redraws every failure count from a
/// binomial with the observed rate.
pub fn estimate_threshold(points: &[McPoint], t: PauliType, resamples: usize, seed: u64) -> Result<Threshold, FitError> {
    let xs = crossings(points, t, &|p| p.rate(t));
    if xs.is_empty() {
        return Err(FitError::NoCrossing);
    }
    let p_th = mean(&xs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimates = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let redrawn: Vec<f64> = points
            .iter()
            .map(|pt| match Binomial::new(pt.shots, pt.rate(t).clamp(0.0, 1.0)) {
                Ok(b) => b.sample(&mut rng) as f64 / pt.shots.max(1) as f64,
                Err(_) => pt.rate(t),
            })
            .collect();
        let rate = |pt: &McPoint| {
            let i = points.iter().position(|q| q.l == pt.l && q.p == pt.p).unwrap_or(0);
            redrawn[i]
        };
        let bx = crossings(points, t, &rate);
        if !bx.is_empty() {
            estimates.push(mean(&bx));
        }
    }
    let spread = if estimates.len() > 1 {
        let m = mean(&estimates);
        (estimates.iter().map(|e| (e - m).powi(2)).sum::<f64>() / (estimates.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(Threshold { p_th, spread, crossings: xs })
}

/// Fits and thresholds of both failure types.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub x: Option<FitParams>,
    pub z: Option<FitParams>,
    pub threshold_x: Option<Threshold>,
    pub threshold_z: Option<Threshold>,
    pub errors: Vec<String>,
}

fn keep<T>(errors: &mut Vec<String>, name: &str, r: Result<T, FitError>) -> Option<T> {
    r.map_err(|e| errors.push(format!("{name}: {e}"))).ok()
}

pub fn report(points: &[McPoint], resamples: usize, seed: u64) -> FitReport {
    let mut errors = Vec::new();
    let x = keep(&mut errors, "fit x", fit_points(points, PauliType::X));
    let z = keep(&mut errors, "fit z", fit_points(points, PauliType::Z));
    let threshold_x = keep(&mut errors, "threshold x", estimate_threshold(points, PauliType::X, resamples, seed));
    let threshold_z = keep(&mut errors, "threshold z", estimate_threshold(points, PauliType::Z, resamples, seed));
    FitReport { x, z, threshold_x, threshold_z, errors }
}
