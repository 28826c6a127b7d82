//! Code-capacity depolarizing Monte Carlo over the merged code decoder.

use std::io::{Read, Write};

use ftsynth_core::codes::{build_merged_code, MergedCode};
use ftsynth_core::f2::PauliType;
use ftsynth_core::CodeError;
use ftsynth_decode::{DecodeError, DecoderConfig, MergedDecoder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("error rate {p} out of range for the {convention:?} convention")]
    BadRate { p: f64, convention: Convention },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("decoder failed at L = {l}, p = {p}, shot {shot}")]
    Decode {
        l: usize,
        p: f64,
        shot: u64,
        #[source]
        source: DecodeError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// How the depolarizing rate `p` splits over X, Y and Z.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Total error probability `p`; X, Y and Z each with `p / 3`.
    #[default]
    Total,
    /// X, Y and Z each with probability `p`; total `3p`.
    PerPauli,
}

impl Convention {
    /// Probability that a qubit is hit at all.
    pub fn total(self, p: f64) -> Result<f64, NoiseError> {
        let t = match self {
            Convention::Total => p,
            Convention::PerPauli => 3.0 * p,
        };
        if !(0.0..=1.0).contains(&t) || p.is_nan() {
            return Err(NoiseError::BadRate { p, convention: self });
        }
        Ok(t)
    }
}

/// An error given by its X and Z components; Y sets both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliError {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

/// Independent depolarizing noise on `n` qubits.
pub fn sample_depolarizing<R: Rng>(n: usize, total: f64, rng: &mut R) -> PauliError {
    let mut e = PauliError { x: vec![false; n], z: vec![false; n] };
    for q in 0..n {
        let r: f64 = rng.gen();
        if r < total {
            match (3.0 * r / total) as usize {
                0 => e.x[q] = true,
                1 => {
                    e.x[q] = true;
                    e.z[q] = true;
                }
                _ => e.z[q] = true,
            }
        }
    }
    e
}

/// Random stream for one shot. Streams are keyed by the seed, the point
/// and the shot index, so results do not depend on scheduling.
pub fn shot_rng(seed: u64, point: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point);
    rng.set_word_pos(u128::from(shot) << 32);
    rng
}

/// Logical failures of one decoded shot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShotOutcome {
    pub x_fail: bool,
    pub z_fail: bool,
}

/// Decodes an error and reports which logical operators the residual
/// flips. X failures come from the X part of the error, decoded from the Z
/// stabilizers, and Z failures symmetrically.
pub fn decode_shot(dec: &MergedDecoder, e: &PauliError) -> Result<ShotOutcome, DecodeError> {
    let code = &dec.code().code;
    let mut out = ShotOutcome::default();
    if e.z.iter().any(|&b| b) {
        let (corr, _) = dec.decode_type(PauliType::X, &code.syndrome(PauliType::X, &e.z))?;
        let residual: Vec<bool> = e.z.iter().zip(&corr).map(|(a, b)| a ^ b).collect();
        out.z_fail = code.is_logical(PauliType::Z, &residual);
    }
    if e.x.iter().any(|&b| b) {
        let (corr, _) = dec.decode_type(PauliType::Z, &code.syndrome(PauliType::Z, &e.x))?;
        let residual: Vec<bool> = e.x.iter().zip(&corr).map(|(a, b)| a ^ b).collect();
        out.x_fail = code.is_logical(PauliType::X, &residual);
    }
    Ok(out)
}

/// Aggregated failures at one `(L, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McPoint {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub shots: u64,
    pub x_fails: u64,
    pub z_fails: u64,
    pub plx: f64,
    pub plz: f64,
    pub se_x: f64,
    pub se_z: f64,
}

fn std_err(rate: f64, shots: u64) -> f64 {
    if shots == 0 {
        0.0
    } else {
        (rate * (1.0 - rate) / shots as f64).sqrt()
    }
}

impl McPoint {
    pub fn new(l: usize, p: f64, shots: u64, x_fails: u64, z_fails: u64) -> Self {
        let rate = |f: u64| if shots == 0 { 0.0 } else { f as f64 / shots as f64 };
        let (plx, plz) = (rate(x_fails), rate(z_fails));
        McPoint { l, p, shots, x_fails, z_fails, plx, plz, se_x: std_err(plx, shots), se_z: std_err(plz, shots) }
    }

    pub fn fails(&self, t: PauliType) -> u64 {
        match t {
            PauliType::X => self.x_fails,
            PauliType::Z => self.z_fails,
        }
    }

    pub fn rate(&self, t: PauliType) -> f64 {
        match t {
            PauliType::X => self.plx,
            PauliType::Z => self.plz,
        }
    }
}

/// Settings of a sweep over distances and error rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    #[serde(rename = "L")]
    pub ls: Vec<usize>,
    pub ps: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    pub convention: Convention,
    pub w1: f64,
    pub w2: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            ls: vec![3, 5, 7, 9],
            ps: (0..11).map(|i| 0.08 + 0.01 * i as f64).collect(),
            shots: 100_000,
            seed: 1,
            convention: Convention::Total,
            w1: 1.0,
            w2: 1.0,
        }
    }
}

/// Stream key of a point: distance and the bit pattern of `p`.
fn point_key(l: usize, p: f64) -> u64 {
    (l as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ p.to_bits()
}

/// Runs `shots` shots at one error rate.
pub fn run_point(
    dec: &MergedDecoder,
    p: f64,
    shots: u64,
    seed: u64,
    convention: Convention,
) -> Result<McPoint, NoiseError> {
    let l = dec.code().l;
    let total = convention.total(p)?;
    let n = dec.code().code.n();
    let key = point_key(l, p);
    let (x, z) = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, key, shot);
            let e = sample_depolarizing(n, total, &mut rng);
            decode_shot(dec, &e)
                .map(|o| (u64::from(o.x_fail), u64::from(o.z_fail)))
                .map_err(|source| NoiseError::Decode { l, p, shot, source })
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(McPoint::new(l, p, shots, x, z))
}

/// Builds the decoder for distance `l`.
pub fn decoder_for(l: usize, w1: f64, w2: f64) -> Result<MergedDecoder, NoiseError> {
    let code: MergedCode = build_merged_code(l)?;
    Ok(MergedDecoder::new(code, DecoderConfig { w1, w2 }))
}

/// Runs the whole sweep, calling `progress` after each point. With
/// `threads` set, work runs on a dedicated pool of that size.
pub fn run_monte_carlo(
    cfg: &McConfig,
    threads: Option<usize>,
    mut progress: impl FnMut(&McPoint) + Send,
) -> Result<Vec<McPoint>, NoiseError> {
    let work = |progress: &mut dyn FnMut(&McPoint)| -> Result<Vec<McPoint>, NoiseError> {
        let mut out = Vec::with_capacity(cfg.ls.len() * cfg.ps.len());
        for &l in &cfg.ls {
            let dec = decoder_for(l, cfg.w1, cfg.w2)?;
            for &p in &cfg.ps {
                let pt = run_point(&dec, p, cfg.shots, cfg.seed, cfg.convention)?;
                progress(&pt);
                out.push(pt);
            }
        }
        Ok(out)
    };
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| NoiseError::Pool(e.to_string()))?;
            pool.install(|| work(&mut progress))
        }
        None => work(&mut progress),
    }
}

pub fn write_csv<W: Write>(w: W, points: &[McPoint]) -> Result<(), NoiseError> {
    let mut wr = csv::Writer::from_writer(w);
    for p in points {
        wr.serialize(p)?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<McPoint>, NoiseError> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
