//! Lattice interference alignment for channels with quadratic-irrational
//! direct gains and integer cross gains.
//!
//! Every user transmits a uniformly chosen point of the truncated lattice
//! `C = {z·P^{1/4+ε} : |z| ≤ ⌊√P / P^{1/4+ε}⌋}`. Integer cross gains keep the
//! interference on the lattice itself, while the irrational direct gain `α`
//! shifts the desired signal off it, so receiver `i` sees a point of
//! `{spacing·(α·z_x + z_s)}` plus noise and decodes `z_x` by nearest point.

mod liouville;

pub use liouville::{
    liouville_delta, liouville_delta_with_limit, LiouvilleCertificate, CONVERGENT_CHECK_LIMIT,
};

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{apply_channel_at, Gain, GainMatrix, NoiseSpec};
use crate::error::{Error, Result};
use crate::quadratic::{QuadraticIrrational, Surd};
use crate::seed::{derive_seed, rng_for};

/// The codebook `Λ_{P,ε} ∩ [−√P, √P]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedLattice {
    pub power: f64,
    pub epsilon: f64,
    pub spacing: f64,
    pub max_index: i64,
}

pub fn build_codebook(power: f64, epsilon: f64) -> Result<TruncatedLattice> {
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::InvalidPower(power));
    }
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let spacing = power.powf(0.25 + epsilon);
    let root = power.sqrt();
    let mut max_index = (root / spacing).floor() as i64;
    // guard the floor against rounding at exact multiples
    while max_index > 0 && max_index as f64 * spacing > root {
        max_index -= 1;
    }
    while (max_index + 1) as f64 * spacing <= root {
        max_index += 1;
    }
    Ok(TruncatedLattice { power, epsilon, spacing, max_index })
}

impl TruncatedLattice {
    pub fn cardinality(&self) -> u64 {
        2 * self.max_index as u64 + 1
    }

    /// `2·P^{1/4−ε} + 1`.
    pub fn cardinality_bound(&self) -> f64 {
        2.0 * self.power.powf(0.25 - self.epsilon) + 1.0
    }

    /// Required separation `P^ε`.
    pub fn threshold(&self) -> f64 {
        self.power.powf(self.epsilon)
    }

    pub fn codeword(&self, index: i64) -> f64 {
        index as f64 * self.spacing
    }

    pub fn codewords(&self) -> impl Iterator<Item = f64> + '_ {
        (-self.max_index..=self.max_index).map(|z| self.codeword(z))
    }
}

/// A point `spacing·(α·x_index + s_index)` of the received constellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlignedPoint {
    pub x_index: i64,
    pub s_index: i64,
}

impl AlignedPoint {
    pub fn value(&self, alpha: &QuadraticIrrational, lattice: &TruncatedLattice) -> f64 {
        lattice.spacing * (alpha.to_f64() * self.x_index as f64 + self.s_index as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    /// Smallest distance between distinct constellation points; infinite when
    /// the constellation has a single point.
    pub min_gap: f64,
    pub threshold: f64,
    pub satisfied: bool,
    /// Index differences `(Δz_x, Δz_s)` attaining the minimum.
    pub witness: Option<(i64, i64)>,
    /// `r·(α·Δz_x + Δz_s)` at the witness, exactly.
    pub witness_value: Option<Surd>,
}

/// Minimum of `spacing·|α·Δz_x + Δz_s|` over `(Δz_x, Δz_s) ≠ (0, 0)`,
/// `|Δz_x| ≤ 2·max_index`, `|Δz_s| ≤ s_range`. The minimizer is found with
/// exact arithmetic in `ℤ[√d]`.
pub fn min_separation(alpha: &QuadraticIrrational, lattice: &TruncatedLattice, s_range: u64) -> Separation {
    let (a, b, d, r) = (alpha.a() as i128, alpha.b() as i128, alpha.d() as i128, alpha.r() as i128);
    let s_max = s_range.min(i64::MAX as u64) as i128;
    let mut best: Option<(Surd, i64, i64)> = None;
    let mut offer = |value: Surd, dx: i64, ds: i64| {
        let better = match &best {
            None => true,
            Some((current, _, _)) => value.cmp_abs(current).is_lt(),
        };
        if better {
            best = Some((value, dx, ds));
        }
    };
    if s_max >= 1 {
        offer(Surd::new(r, 0, d), 0, 1);
    }
    for dx in 1..=2 * lattice.max_index {
        let floor = alpha.floor_mul(dx);
        for candidate in [-floor, -floor - 1] {
            let ds = candidate.clamp(-s_max, s_max);
            offer(Surd::new(a * dx as i128 + r * ds, b * dx as i128, d), dx, ds as i64);
        }
    }
    let threshold = lattice.threshold();
    match best {
        Some((value, dx, ds)) => {
            let min_gap = lattice.spacing * value.to_f64().abs() / r as f64;
            Separation {
                min_gap,
                threshold,
                satisfied: min_gap > threshold,
                witness: Some((dx, ds)),
                witness_value: Some(value),
            }
        }
        None => Separation {
            min_gap: f64::INFINITY,
            threshold,
            satisfied: true,
            witness: None,
            witness_value: None,
        },
    }
}

/// Nearest constellation point to `y` with `|z_x| ≤ max_index` and
/// `|z_s| ≤ s_range`. Ties go to the smaller `|z_x|`, then the smaller `z_x`.
pub fn nearest_point(y: f64, alpha: &QuadraticIrrational, lattice: &TruncatedLattice, s_range: u64) -> AlignedPoint {
    nearest_point_f64(y / lattice.spacing, alpha.to_f64(), lattice.max_index, s_range)
}

pub fn nearest_point_decode(y: f64, alpha: &QuadraticIrrational, lattice: &TruncatedLattice, s_range: u64) -> i64 {
    nearest_point(y, alpha, lattice, s_range).x_index
}

fn nearest_point_f64(t: f64, alpha: f64, max_index: i64, s_range: u64) -> AlignedPoint {
    let s_max = s_range.min(1 << 52) as f64;
    let mut best = AlignedPoint { x_index: 0, s_index: 0 };
    let mut best_dist = f64::INFINITY;
    // 0, −1, 1, −2, 2, … realizes the tie-break with a strict comparison
    let order = std::iter::once(0).chain((1..=max_index).flat_map(|z| [-z, z]));
    for z in order {
        let base = alpha * z as f64;
        let zs = (t - base).round().clamp(-s_max, s_max);
        let dist = (base + zs - t).abs();
        if dist < best_dist {
            best_dist = dist;
            best = AlignedPoint { x_index: z, s_index: zs as i64 };
        }
    }
    best
}

/// `2·exp(−P^{2ε}/8)`, the unit-noise bound on the symbol error probability.
pub fn analytic_error_bound(power: f64, epsilon: f64) -> f64 {
    2.0 * (-power.powf(2.0 * epsilon) / 8.0).exp()
}

/// Achievable rate `log₂|C|·(1 − Pe) − 1`, floored at zero.
pub fn fano_rate_bound(cardinality: u64, error_rate: f64) -> f64 {
    let bits = (cardinality.max(1) as f64).log2();
    (bits * (1.0 - error_rate) - 1.0).max(0.0)
}

/// Interference index range at receiver `rx`: `Σ_{tx≠rx} |h_{tx,rx}|·max_index`.
pub fn interference_index_bound(cross_gains: &[i64], max_index: i64) -> u64 {
    cross_gains.iter().map(|g| g.unsigned_abs()).sum::<u64>() * max_index as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SRange {
    /// Derived from the cross gains.
    Auto,
    /// Fixed bound on `|z_s|` for the decoder.
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSimConfig {
    pub power: f64,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    /// Per-receiver noise variance; `0` switches the noise off.
    pub noise_variance: f64,
    pub s_range: SRange,
}

impl LatticeSimConfig {
    pub fn new(power: f64, epsilon: f64, trials: u64, seed: u64) -> Self {
        Self { power, epsilon, trials, seed, noise_variance: 1.0, s_range: SRange::Auto }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserReport {
    /// Zero-based user index.
    pub user: usize,
    pub alpha: QuadraticIrrational,
    /// Bound on `|z_s|` searched by the decoder.
    pub decoder_s_range: u64,
    /// Separation over index differences `|Δz_s| ≤ 2·decoder_s_range`.
    pub separation: Separation,
    pub errors: u64,
    pub empirical_error: f64,
    pub fano_rate: f64,
    /// `fano_rate / (½·log₂P)`.
    pub rate_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub lattice: TruncatedLattice,
    pub trials: u64,
    pub analytic_error_bound: f64,
    pub users: Vec<UserReport>,
}

impl SimulationReport {
    pub fn sum_rate(&self) -> f64 {
        self.users.iter().map(|u| u.fano_rate).sum()
    }
}

/// Splits `h` into direct gains `α_i` and integer cross gains.
fn split_gains(h: &GainMatrix) -> Result<(Vec<QuadraticIrrational>, Vec<Vec<i64>>)> {
    let k = h.k();
    let mut alphas = Vec::with_capacity(k);
    let mut cross = vec![vec![0i64; k]; k];
    for tx in 0..k {
        for rx in 0..k {
            match (tx == rx, h.get(tx, rx)) {
                (true, Gain::Quadratic(q)) => alphas.push(*q),
                (true, _) => {
                    return Err(Error::InvalidArgument(format!(
                        "direct gain of user {} must be a quadratic irrational",
                        tx + 1
                    )))
                }
                (false, g) => {
                    cross[tx][rx] = g
                        .as_integer()
                        .and_then(|v| v.to_i64())
                        .ok_or(Error::NotInteger { row: tx, col: rx })?;
                }
            }
        }
    }
    Ok((alphas, cross))
}

const BLOCK: u64 = 512;

/// Monte Carlo estimate of the per-user symbol error rate of the aligned
/// lattice scheme, decoding every receiver by nearest point.
///
/// Trial `t` draws its codeword indices from `derive_seed(derive_seed(seed, 0), t)`
/// and its noise at time `t` from the stream seeded by `derive_seed(seed, 1)`,
/// so the result does not depend on the thread count.
pub fn simulate_symbol_error(h: &GainMatrix, cfg: &LatticeSimConfig) -> Result<SimulationReport> {
    if cfg.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if !(cfg.noise_variance.is_finite() && cfg.noise_variance >= 0.0) {
        return Err(Error::NonPositiveVariance { user: 0 });
    }
    let lattice = build_codebook(cfg.power, cfg.epsilon)?;
    let (alphas, cross) = split_gains(h)?;
    let k = h.k();
    let s_ranges: Vec<u64> = (0..k)
        .map(|rx| match cfg.s_range {
            SRange::Fixed(n) => n,
            SRange::Auto => {
                let column: Vec<i64> = (0..k).filter(|&tx| tx != rx).map(|tx| cross[tx][rx]).collect();
                interference_index_bound(&column, lattice.max_index)
            }
        })
        .collect();
    let noise = (cfg.noise_variance > 0.0)
        .then(|| NoiseSpec::new(vec![cfg.noise_variance; k], derive_seed(cfg.seed, 1)))
        .transpose()?;
    let codeword_seed = derive_seed(cfg.seed, 0);
    let alpha_f: Vec<f64> = alphas.iter().map(QuadraticIrrational::to_f64).collect();

    let blocks = cfg.trials.div_ceil(BLOCK);
    let errors = (0..blocks)
        .into_par_iter()
        .map(|block| -> Result<Vec<u64>> {
            let start = block * BLOCK;
            let len = (cfg.trials - start).min(BLOCK) as usize;
            let mut indices = vec![vec![0i64; len]; k];
            for col in 0..len {
                let mut rng = rng_for(derive_seed(codeword_seed, start + col as u64));
                for row in indices.iter_mut() {
                    row[col] = rng.random_range(-lattice.max_index..=lattice.max_index);
                }
            }
            let x: Vec<Vec<f64>> = indices
                .iter()
                .map(|row| row.iter().map(|&z| lattice.codeword(z)).collect())
                .collect();
            let y = apply_channel_at(h, &x, noise.as_ref(), start)?;
            let mut errs = vec![0u64; k];
            for rx in 0..k {
                for col in 0..len {
                    let t = y[rx][col] / lattice.spacing;
                    let decoded = nearest_point_f64(t, alpha_f[rx], lattice.max_index, s_ranges[rx]);
                    if decoded.x_index != indices[rx][col] {
                        errs[rx] += 1;
                    }
                }
            }
            Ok(errs)
        })
        .try_reduce(
            || vec![0u64; k],
            |mut acc, part| {
                acc.iter_mut().zip(part).for_each(|(a, p)| *a += p);
                Ok(acc)
            },
        )?;

    let half_log_power = 0.5 * cfg.power.log2();
    let users = (0..k)
        .map(|rx| {
            let empirical_error = errors[rx] as f64 / cfg.trials as f64;
            let fano_rate = fano_rate_bound(lattice.cardinality(), empirical_error);
            UserReport {
                user: rx,
                alpha: alphas[rx],
                decoder_s_range: s_ranges[rx],
                separation: min_separation(&alphas[rx], &lattice, 2 * s_ranges[rx]),
                errors: errors[rx],
                empirical_error,
                fano_rate,
                rate_ratio: if half_log_power > 0.0 { fano_rate / half_log_power } else { 0.0 },
            }
        })
        .collect();
    Ok(SimulationReport {
        lattice,
        trials: cfg.trials,
        analytic_error_bound: analytic_error_bound(cfg.power, cfg.epsilon),
        users,
    })
}
