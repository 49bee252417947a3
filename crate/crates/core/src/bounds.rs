//! Degrees-of-freedom bounds in exact rationals, and a least-squares DoF
//! estimate from simulated rates.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::channel::{integerize, reduce_to_canonical, CanonicalTriple, Gain, GainMatrix};
use crate::error::{Error, Result};

/// Which exponent formula produced `d(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExponentRule {
    /// `2·max(|p|, |q|) + 5`
    General,
    /// `2|p| + 3`, available when `|q| = 1`
    UnitQ,
    /// `2|q| + 3`, available when `|p| = 1`
    UnitP,
}

impl ExponentRule {
    pub fn name(self) -> &'static str {
        match self {
            ExponentRule::General => "general",
            ExponentRule::UnitQ => "unit-q",
            ExponentRule::UnitP => "unit-p",
        }
    }
}

impl fmt::Display for ExponentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Smallest applicable exponent for the canonical gains `(p, q)`.
pub fn exponent(t: CanonicalTriple) -> (u32, ExponentRule) {
    let (p, q) = (t.p.unsigned_abs(), t.q.unsigned_abs());
    let mut best = (2 * p.max(q) + 5, ExponentRule::General);
    if q == 1 && 2 * p + 3 < best.0 {
        best = (2 * p + 3, ExponentRule::UnitQ);
    }
    if p == 1 && 2 * q + 3 < best.0 {
        best = (2 * q + 3, ExponentRule::UnitP);
    }
    (u32::try_from(best.0).expect("exponent fits u32"), best.1)
}

/// `1 / (12d + 2)`.
pub fn epsilon_for(d: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(12 * u64::from(d) + 2))
}

/// One reduced three-user sub-channel and the numbers it contributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleTrace {
    /// Zero-based, sorted.
    pub users: [usize; 3],
    /// Gains the exponent was computed from.
    pub gains: CanonicalTriple,
    pub exponent: u32,
    pub rule: ExponentRule,
    pub epsilon: BigRational,
}

impl TripleTrace {
    fn new(users: [usize; 3], gains: CanonicalTriple) -> Self {
        let (d, rule) = exponent(gains);
        Self { users, gains, exponent: d, rule, epsilon: epsilon_for(d) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub users: usize,
    /// Exponent of the triple attaining the minimum `ε`.
    pub exponent: u32,
    /// Minimum `ε` over all triples.
    pub epsilon: BigRational,
    /// `K/2 − (K/3)·ε`.
    pub dof_upper: BigRational,
    pub trace: Vec<TripleTrace>,
}

impl BoundReport {
    fn from_trace(users: usize, trace: Vec<TripleTrace>) -> Self {
        let worst = trace
            .iter()
            .min_by(|a, b| a.epsilon.cmp(&b.epsilon))
            .expect("at least one triple");
        let k = BigRational::from_integer(BigInt::from(users));
        let dof_upper = &k / BigInt::from(2) - &k / BigInt::from(3) * &worst.epsilon;
        Self {
            users,
            exponent: worst.exponent,
            epsilon: worst.epsilon.clone(),
            dof_upper,
            trace,
        }
    }

    /// `dof_upper` rounded half-even to 6 decimals.
    pub fn decimal(&self) -> String {
        format_decimal(&self.dof_upper, 6)
    }
}

/// Bound for the canonical channel with gains `(p, q)` as given.
pub fn rational_3user_bound(p: i64, q: i64) -> Result<BoundReport> {
    let t = CanonicalTriple::new(p, q)?;
    Ok(BoundReport::from_trace(3, vec![TripleTrace::new([0, 1, 2], t)]))
}

fn sorted_triples(k: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..k).flat_map(move |i| (i + 1..k).flat_map(move |j| (j + 1..k).map(move |l| [i, j, l])))
}

fn reduced_trace(bar: &GainMatrix, users: [usize; 3]) -> Result<TripleTrace> {
    let red = reduce_to_canonical(bar, users)?;
    Ok(TripleTrace::new(users, red.triple.normalized()))
}

/// Bound for a fully connected rational channel: every sorted user triple
/// is reduced to canonical gains, normalized by their gcd and sign (which a
/// diagonal scaling of the second receiver can always do), and the smallest
/// `ε` enters `K/2 − (K/3)·ε`.
pub fn rational_kuser_bound(h: &GainMatrix) -> Result<BoundReport> {
    if h.k() < 3 {
        return Err(Error::TooFewUsers { min: 3, found: h.k() });
    }
    if !h.is_fully_connected() {
        return Err(Error::NotFullyConnected);
    }
    let (bar, _) = integerize(h)?;
    let trace = sorted_triples(h.k())
        .map(|users| reduced_trace(&bar, users))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport::from_trace(h.k(), trace))
}

/// Three-user bound for the sub-channel on `users` (any order; sorted
/// here). Only the lower-triangular entries of the minor must be nonzero.
pub fn triple_bound(h: &GainMatrix, users: [usize; 3]) -> Result<BoundReport> {
    let mut users = users;
    users.sort_unstable();
    if users[2] >= h.k() || users[0] == users[1] || users[1] == users[2] {
        return Err(Error::InvalidTriple(users[0], users[1], users[2]));
    }
    let bar = integerize_minor(h, users)?;
    Ok(BoundReport::from_trace(3, vec![reduced_trace(&bar, [0, 1, 2])?]))
}

/// The minor on `users` as an integer matrix, upper entries replaced by 1.
fn integerize_minor(h: &GainMatrix, users: [usize; 3]) -> Result<GainMatrix> {
    let mut rows = Vec::with_capacity(3);
    for (m, &i) in users.iter().enumerate() {
        let mut row = Vec::with_capacity(3);
        for (n, &j) in users.iter().enumerate() {
            let g = h.get(i, j);
            if n > m {
                row.push(Gain::integer(1));
            } else if g.is_zero() {
                return Err(Error::ZeroEntry { row: i, col: j });
            } else {
                row.push(g.clone());
            }
        }
        rows.push(row);
    }
    let filled = GainMatrix::new(rows)?;
    Ok(integerize(&filled)?.0)
}

/// The fully connected bound when it applies, else the three-user bound of
/// a three-user channel whose lower-triangular gains are nonzero.
pub fn subchannel_bound(h: &GainMatrix) -> Result<BoundReport> {
    if h.is_fully_connected() || h.k() != 3 {
        rational_kuser_bound(h)
    } else {
        triple_bound(h, [0, 1, 2])
    }
}

/// `K/2`, the bound for any fully connected channel.
pub fn halfk_upper(k: usize) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(2))
}

/// `(n/2)·log₂(2πe·(v + 1/12))`: entropy bound for an integer vector of
/// `n` symbols with average per-symbol variance `v`.
pub fn gaussian_entropy_ub(variance: f64, n: usize) -> Result<f64> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::InvalidArgument(format!("variance must be non-negative, got {variance}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("at least one symbol is required".into()));
    }
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    Ok(n as f64 / 2.0 * (two_pi_e * (variance + 1.0 / 12.0)).log2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// `rate − (slope·x + intercept)` per point, `x = ½·log₂P`.
    pub residuals: Vec<f64>,
}

/// Least-squares slope of sum rate against `½·log₂P`.
pub fn dof_slope_estimate(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints);
    }
    for (i, &(p, r)) in points.iter().enumerate() {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidPower(p));
        }
        if !r.is_finite() {
            return Err(Error::InvalidArgument(format!("rate must be finite, got {r}")));
        }
        if points[..i].iter().any(|&(q, _)| q == p) {
            return Err(Error::DuplicatePower(p));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(p, _)| 0.5 * p.log2()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = points.iter().map(|&(_, r)| r).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(points).map(|(x, &(_, r))| (x - mean_x) * (r - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals = xs
        .iter()
        .zip(points)
        .map(|(x, &(_, r))| r - (slope * x + intercept))
        .collect();
    Ok(SlopeFit { slope, intercept, residuals })
}

/// Exact decimal expansion rounded half-even to `places` digits.
pub fn format_decimal(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10).pow(places);
    let scaled = r * BigRational::from_integer(scale.clone());
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut n = floor.to_integer();
    if frac > half || (frac == half && n.is_odd()) {
        n += 1;
    }
    let negative = n.is_negative();
    let (int, rest) = n.abs().div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", rest.to_string(), width = places as usize)
    }
}

/// `true` when `0 < ε ≤ 1/62`.
pub fn epsilon_in_range(e: &BigRational) -> bool {
    e.is_positive() && *e <= BigRational::new(BigInt::one(), BigInt::from(62))
}
