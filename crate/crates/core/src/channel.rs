//! Exact gain matrices, the diagonal scalings that preserve degrees of freedom,
//! the reduction of a user triple to its canonical `(p, q)` form, and
//! evaluation of the Gaussian and deterministic channels.
//!
//! Orientation: entry `(i, j)` is the gain from transmitter `i` to receiver `j`,
//! so receiver `j` sees column `j`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quadratic::QuadraticIrrational;
use crate::seed::{derive_seed, rng_for};

/// A single exact channel gain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gain {
    Rational(BigRational),
    Quadratic(QuadraticIrrational),
}

impl Gain {
    pub fn integer(n: i64) -> Self {
        Gain::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Gain::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Gain::Rational(r) if r.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Gain::Rational(r) => Some(r),
            Gain::Quadratic(_) => None,
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Gain::Rational(r) => ratio_to_f64(r),
            Gain::Quadratic(q) => q.to_f64(),
        }
    }

    fn mul_rational(&self, s: &BigRational) -> Result<Gain> {
        match self {
            Gain::Rational(r) => Ok(Gain::Rational(r * s)),
            Gain::Quadratic(q) => {
                let num = s.numer().to_i64().ok_or(Error::Overflow("quadratic scaling"))?;
                let den = s.denom().to_i64().ok_or(Error::Overflow("quadratic scaling"))?;
                Ok(Gain::Quadratic(q.mul_rational(num, den)?))
            }
        }
    }
}

impl fmt::Display for Gain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gain::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Gain::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Gain::Quadratic(q) => write!(f, "{q}"),
        }
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// K×K matrix of exact gains, `K ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GainMatrix {
    k: usize,
    entries: Vec<Gain>,
}

impl GainMatrix {
    pub fn new(rows: Vec<Vec<Gain>>) -> Result<Self> {
        let k = rows.len();
        if k < 2 {
            return Err(Error::TooFewUsers { min: 2, found: k });
        }
        let mut entries = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: row.len() });
            }
            entries.extend(row);
        }
        Ok(Self { k, entries })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| Gain::integer(v)).collect())
                .collect(),
        )
    }

    /// Rows of `(numerator, denominator)` pairs.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| Gain::ratio(n, d)).collect())
                .collect(),
        )
    }

    /// The canonical three-user channel `[1,0,0; 1,p,0; 1,q,1]`.
    pub fn canonical(triple: CanonicalTriple) -> Self {
        Self::from_integers(&[&[1, 0, 0], &[1, triple.p, 0], &[1, triple.q, 1]])
            .expect("3x3 literal")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, tx: usize, rx: usize) -> &Gain {
        &self.entries[tx * self.k + rx]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Gain]> {
        self.entries.chunks(self.k)
    }

    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(|g| g.as_rational().is_some())
    }

    /// Every gain is nonzero.
    pub fn is_fully_connected(&self) -> bool {
        self.entries.iter().all(|g| !g.is_zero())
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.iter().map(Gain::to_f64).collect()).collect()
    }

    fn rational_at(&self, row: usize, col: usize) -> Result<&BigRational> {
        self.get(row, col)
            .as_rational()
            .ok_or(Error::NotRational { row, col })
    }
}

pub fn is_fully_connected(h: &GainMatrix) -> bool {
    h.is_fully_connected()
}

/// Positive diagonal scaling `diag(d_1, …, d_K)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalScaling {
    diag: Vec<BigRational>,
}

impl DiagonalScaling {
    pub fn new(diag: Vec<BigRational>) -> Result<Self> {
        if let Some(index) = diag.iter().position(|d| !d.is_positive()) {
            return Err(Error::NonPositiveScaling { index });
        }
        Ok(Self { diag })
    }

    pub fn from_ratios(diag: &[(i64, i64)]) -> Result<Self> {
        Self::new(
            diag.iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    pub fn identity(k: usize) -> Self {
        Self { diag: vec![BigRational::one(); k] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.diag
    }

    pub fn inverse(&self) -> Self {
        Self { diag: self.diag.iter().map(|d| d.recip()).collect() }
    }
}

/// `D_t · H · D_r`, exactly: entry `(i, j)` becomes `dt_i · h_ij · dr_j`.
pub fn scale(h: &GainMatrix, dt: &DiagonalScaling, dr: &DiagonalScaling) -> Result<GainMatrix> {
    for s in [dt, dr] {
        if s.len() != h.k {
            return Err(Error::DimensionMismatch { expected: h.k, found: s.len() });
        }
    }
    let k = h.k;
    let mut entries = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let factor = &dt.diag[i] * &dr.diag[j];
            entries.push(h.get(i, j).mul_rational(&factor)?);
        }
    }
    Ok(GainMatrix { k, entries })
}

/// Per-column LCM of denominators; zero entries contribute nothing.
pub(crate) fn column_denominator_lcm(h: &GainMatrix) -> Result<DiagonalScaling> {
    let mut diag = Vec::with_capacity(h.k);
    for col in 0..h.k {
        let mut lcm = BigInt::one();
        for row in 0..h.k {
            lcm = lcm.lcm(h.rational_at(row, col)?.denom());
        }
        diag.push(BigRational::from_integer(lcm));
    }
    DiagonalScaling::new(diag)
}

/// Scales each receiver column by the LCM of its denominators so that
/// `H̄ = H·D_r` has nonzero integer entries.
pub fn integerize(h: &GainMatrix) -> Result<(GainMatrix, DiagonalScaling)> {
    for row in 0..h.k {
        for col in 0..h.k {
            if h.rational_at(row, col)?.is_zero() {
                return Err(Error::ZeroEntry { row, col });
            }
        }
    }
    let dr = column_denominator_lcm(h)?;
    let bar = scale(h, &DiagonalScaling::identity(h.k), &dr)?;
    Ok((bar, dr))
}

/// The integers `(p, q)` of the canonical channel `[1,0,0; 1,p,0; 1,q,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalTriple {
    pub p: i64,
    pub q: i64,
}

impl CanonicalTriple {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidArgument(format!(
                "canonical gains must be nonzero, got p={p}, q={q}"
            )));
        }
        Ok(Self { p, q })
    }

    /// Divides out `gcd(p, q)` and makes `p` positive. Scaling the second
    /// receiver by a nonzero rational maps `H̃(p, q)` to `H̃(p/g, q/g)`.
    pub fn normalized(&self) -> Self {
        let g = self.p.gcd(&self.q) * self.p.signum();
        Self { p: self.p / g, q: self.q / g }
    }
}

impl fmt::Display for CanonicalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, q={})", self.p, self.q)
    }
}

/// Witness for the reduction of a principal 3×3 minor to `H̃(p, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalReduction {
    /// Zero-based user indices `(i, j, k)`.
    pub users: [usize; 3],
    /// The minor with strictly-upper entries zeroed: `[a,0,0; b,c,0; d,e,f]`.
    pub lower: [[BigInt; 3]; 3],
    pub triple: CanonicalTriple,
    /// Row scaling `diag(bd, ad, ab)`.
    pub dt: [BigRational; 3],
    /// Column scaling `diag(1/(abd), 1/a, 1/(abf))`.
    pub dr: [BigRational; 3],
}

impl CanonicalReduction {
    /// `D̂_t · Ĥ · D̂_r`, entry by entry.
    pub fn scaled(&self) -> [[BigRational; 3]; 3] {
        std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                &self.dt[m] * BigRational::from_integer(self.lower[m][n].clone()) * &self.dr[n]
            })
        })
    }
}

/// Extracts the principal minor on `users`, zeroes its strictly-upper entries
/// and reads off `p = c·d`, `q = b·e` for the minor `[a,0,0; b,c,0; d,e,f]`.
///
/// The returned scalings may be negative when the minor has negative entries;
/// invariance only needs them nonzero.
pub fn reduce_to_canonical(h: &GainMatrix, users: [usize; 3]) -> Result<CanonicalReduction> {
    let [i, j, k] = users;
    if i >= h.k || j >= h.k || k >= h.k || i == j || j == k || i == k {
        return Err(Error::InvalidTriple(i, j, k));
    }
    let mut lower: [[BigInt; 3]; 3] = Default::default();
    for (m, &row) in users.iter().enumerate() {
        for (n, &col) in users.iter().enumerate().take(m + 1) {
            let g = h.get(row, col);
            let v = match g {
                Gain::Quadratic(_) => return Err(Error::NotRational { row, col }),
                Gain::Rational(_) => g.as_integer().ok_or(Error::NotInteger { row, col })?,
            };
            if v.is_zero() {
                return Err(Error::ZeroEntry { row, col });
            }
            lower[m][n] = v;
        }
    }
    let [a, b, c, d, e, f] = [
        &lower[0][0], &lower[1][0], &lower[1][1], &lower[2][0], &lower[2][1], &lower[2][2],
    ];
    let to_i64 = |x: BigInt| x.to_i64().ok_or(Error::Overflow("canonical reduction"));
    let triple = CanonicalTriple::new(to_i64(c * d)?, to_i64(b * e)?)?;
    let int = |x: BigInt| BigRational::from_integer(x);
    let dt = [int(b * d), int(a * d), int(a * b)];
    let dr = [
        int(a * b * d).recip(),
        int(a.clone()).recip(),
        int(a * b * f).recip(),
    ];
    Ok(CanonicalReduction { users, lower, triple, dt, dr })
}

/// Offsets `½·log₂(1 + 2·Σ_j h_{j,i}²)`, one per receiver `i`.
pub fn deterministic_offset(h: &GainMatrix) -> Vec<f64> {
    (0..h.k)
        .map(|rx| {
            let power: f64 = (0..h.k).map(|tx| h.get(tx, rx).to_f64().powi(2)).sum();
            0.5 * (1.0 + 2.0 * power).log2()
        })
        .collect()
}

/// Per-receiver noise variances and the seed addressing the noise streams.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    variances: Vec<f64>,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(variances: Vec<f64>, seed: u64) -> Result<Self> {
        if let Some(user) = variances.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::NonPositiveVariance { user });
        }
        Ok(Self { variances, seed })
    }

    pub fn unit(k: usize, seed: u64) -> Self {
        Self { variances: vec![1.0; k], seed }
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Noise added at receiver `user`, time `t`.
    pub fn sample(&self, user: usize, t: u64) -> f64 {
        self.variances[user].sqrt() * standard_normal(self.seed, user as u64, t)
    }
}

/// Standard normal draw that is a pure function of `(seed, user, t)`.
pub fn standard_normal(seed: u64, user: u64, t: u64) -> f64 {
    let mut rng = rng_for(derive_seed(derive_seed(seed, user), t));
    StandardNormal.sample(&mut rng)
}

/// `y_{j,t} = Σ_i x_{i,t}·h_{i,j} + z_{j,t}` over a K×n block.
pub fn apply_channel(
    h: &GainMatrix,
    x: &[Vec<f64>],
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Vec<f64>>> {
    apply_channel_at(h, x, noise, 0)
}

/// As [`apply_channel`], with column `c` of the block at time `first_time + c`.
pub fn apply_channel_at(
    h: &GainMatrix,
    x: &[Vec<f64>],
    noise: Option<&NoiseSpec>,
    first_time: u64,
) -> Result<Vec<Vec<f64>>> {
    let n = check_block(h, x)?;
    if let Some(spec) = noise {
        if spec.variances.len() != h.k {
            return Err(Error::DimensionMismatch { expected: h.k, found: spec.variances.len() });
        }
    }
    let gains = h.to_f64();
    let mut y = vec![vec![0.0; n]; h.k];
    for (rx, out) in y.iter_mut().enumerate() {
        for (t, slot) in out.iter_mut().enumerate() {
            let mut acc: f64 = (0..h.k).map(|tx| x[tx][t] * gains[tx][rx]).sum();
            if let Some(spec) = noise {
                acc += spec.sample(rx, first_time + t as u64);
            }
            *slot = acc;
        }
    }
    Ok(y)
}

/// Noiseless channel on integer inputs with integer gains, computed exactly.
pub fn apply_deterministic(h: &GainMatrix, x: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = check_block(h, x)?;
    let mut gains = vec![vec![0i64; h.k]; h.k];
    for (tx, row) in gains.iter_mut().enumerate() {
        for (rx, g) in row.iter_mut().enumerate() {
            let v = h
                .get(tx, rx)
                .as_integer()
                .ok_or(Error::NotInteger { row: tx, col: rx })?;
            *g = v.to_i64().ok_or(Error::Overflow("deterministic channel"))?;
        }
    }
    let mut y = vec![vec![0i64; n]; h.k];
    for (rx, out) in y.iter_mut().enumerate() {
        for (t, slot) in out.iter_mut().enumerate() {
            let mut acc = 0i64;
            for tx in 0..h.k {
                acc = x[tx][t]
                    .checked_mul(gains[tx][rx])
                    .and_then(|v| acc.checked_add(v))
                    .ok_or(Error::Overflow("deterministic channel"))?;
            }
            *slot = acc;
        }
    }
    Ok(y)
}

fn check_block<T>(h: &GainMatrix, x: &[Vec<T>]) -> Result<usize> {
    if x.len() != h.k {
        return Err(Error::DimensionMismatch { expected: h.k, found: x.len() });
    }
    let n = x[0].len();
    if let Some(bad) = x.iter().find(|row| row.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn h_tilde(p: i64, qq: i64) -> GainMatrix {
        GainMatrix::canonical(CanonicalTriple::new(p, qq).unwrap())
    }

    #[test]
    fn full_connectivity() {
        let id = GainMatrix::from_integers(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert!(!is_fully_connected(&id));
        let ones = GainMatrix::from_integers(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]).unwrap();
        assert!(is_fully_connected(&ones));
        assert!(!is_fully_connected(&h_tilde(2, 1)));
    }

    #[test]
    fn scale_examples() {
        let h = GainMatrix::from_ratios(&[&[(1, 1), (1, 2)], &[(1, 3), (1, 1)]]).unwrap();
        let id = DiagonalScaling::identity(2);
        assert_eq!(scale(&h, &id, &id).unwrap(), h);
        let dr = DiagonalScaling::from_ratios(&[(3, 1), (2, 1)]).unwrap();
        let out = scale(&h, &id, &dr).unwrap();
        assert_eq!(out, GainMatrix::from_integers(&[&[3, 1], &[1, 2]]).unwrap());
        let i3 = DiagonalScaling::identity(3);
        assert_eq!(scale(&h_tilde(2, 1), &i3, &i3).unwrap(), h_tilde(2, 1));
        assert!(matches!(
            scale(&h, &i3, &id),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scaling_rejects_nonpositive() {
        assert!(DiagonalScaling::from_ratios(&[(1, 1), (0, 1)]).is_err());
        assert!(DiagonalScaling::from_ratios(&[(-1, 2), (1, 1)]).is_err());
    }

    #[test]
    fn scale_quadratic_entries() {
        let s2 = QuadraticIrrational::sqrt(2).unwrap();
        let h = GainMatrix::new(vec![
            vec![Gain::Quadratic(s2), Gain::integer(1)],
            vec![Gain::integer(1), Gain::Quadratic(s2)],
        ])
        .unwrap();
        let dt = DiagonalScaling::from_ratios(&[(2, 3), (1, 1)]).unwrap();
        let out = scale(&h, &dt, &DiagonalScaling::identity(2)).unwrap();
        assert_eq!(
            out.get(0, 0),
            &Gain::Quadratic(QuadraticIrrational::new(0, 2, 2, 3).unwrap())
        );
        let back = scale(&out, &dt.inverse(), &DiagonalScaling::identity(2)).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn integerize_examples() {
        let h = GainMatrix::from_ratios(&[&[(1, 1), (1, 2)], &[(1, 3), (1, 1)]]).unwrap();
        let (bar, dr) = integerize(&h).unwrap();
        assert_eq!(bar, GainMatrix::from_integers(&[&[3, 1], &[1, 2]]).unwrap());
        assert_eq!(dr.entries(), &[q(3, 1), q(2, 1)]);

        let ints = GainMatrix::from_integers(&[&[2, 5], &[-1, 3]]).unwrap();
        let (same, id) = integerize(&ints).unwrap();
        assert_eq!(same, ints);
        assert_eq!(id, DiagonalScaling::identity(2));

        assert!(matches!(
            GainMatrix::from_ratios(&[&[(2, 3)]]),
            Err(Error::TooFewUsers { .. })
        ));
        assert!(matches!(integerize(&h_tilde(2, 1)), Err(Error::ZeroEntry { .. })));
    }

    #[test]
    fn integerize_rejects_quadratic() {
        let h = GainMatrix::new(vec![
            vec![Gain::Quadratic(QuadraticIrrational::sqrt(3).unwrap()), Gain::integer(1)],
            vec![Gain::integer(1), Gain::integer(1)],
        ])
        .unwrap();
        assert_eq!(integerize(&h), Err(Error::NotRational { row: 0, col: 0 }));
    }

    #[test]
    fn canonical_reduction_examples() {
        let r = reduce_to_canonical(&h_tilde(2, 1), [0, 1, 2]).unwrap();
        assert_eq!(r.triple, CanonicalTriple { p: 2, q: 1 });
        let ones = GainMatrix::from_integers(&[&[1, 0, 0], &[1, 1, 0], &[1, 1, 1]]).unwrap();
        assert_eq!(reduce_to_canonical(&ones, [0, 1, 2]).unwrap().triple, CanonicalTriple { p: 1, q: 1 });
        // upper entries are ignored
        let m = GainMatrix::from_integers(&[&[2, 9, 9], &[3, 4, 9], &[5, 6, 7]]).unwrap();
        let r = reduce_to_canonical(&m, [0, 1, 2]).unwrap();
        assert_eq!(r.triple, CanonicalTriple { p: 20, q: 18 });
        let want = [[1, 0, 0], [1, 20, 0], [1, 18, 1]];
        for (row, want_row) in r.scaled().iter().zip(want) {
            for (got, w) in row.iter().zip(want_row) {
                assert_eq!(got, &q(w, 1));
            }
        }
    }

    #[test]
    fn canonical_reduction_errors() {
        let m = GainMatrix::from_integers(&[&[1, 1, 1], &[0, 1, 1], &[1, 1, 1]]).unwrap();
        assert!(matches!(reduce_to_canonical(&m, [0, 1, 2]), Err(Error::ZeroEntry { row: 1, col: 0 })));
        assert!(matches!(reduce_to_canonical(&m, [0, 1, 1]), Err(Error::InvalidTriple(..))));
        let frac = GainMatrix::from_ratios(&[
            &[(1, 1), (1, 1), (1, 1)],
            &[(1, 2), (1, 1), (1, 1)],
            &[(1, 1), (1, 1), (1, 1)],
        ])
        .unwrap();
        assert!(matches!(reduce_to_canonical(&frac, [0, 1, 2]), Err(Error::NotInteger { .. })));
    }

    #[test]
    fn normalized_triple() {
        assert_eq!(CanonicalTriple::new(20, 18).unwrap().normalized(), CanonicalTriple { p: 10, q: 9 });
        assert_eq!(CanonicalTriple::new(-4, 6).unwrap().normalized(), CanonicalTriple { p: 2, q: -3 });
        assert_eq!(CanonicalTriple::new(-3, -3).unwrap().normalized(), CanonicalTriple { p: 1, q: 1 });
    }

    #[test]
    fn offsets() {
        let o = deterministic_offset(&h_tilde(2, 1));
        let want = [0.5 * 7f64.log2(), 0.5 * 11f64.log2(), 0.5 * 3f64.log2()];
        for (a, b) in o.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((o[0] - 1.4037).abs() < 1e-4 && (o[1] - 1.7297).abs() < 1e-4 && (o[2] - 0.7925).abs() < 1e-4);
        let dead = GainMatrix::from_integers(&[&[1, 0], &[1, 0]]).unwrap();
        assert_eq!(deterministic_offset(&dead)[1], 0.0);
        let single = GainMatrix::from_integers(&[&[1, 0], &[0, 0]]).unwrap();
        assert!((deterministic_offset(&single)[0] - 0.7925).abs() < 1e-4);
    }

    #[test]
    fn noiseless_channel() {
        let x = vec![vec![1.0], vec![4.0], vec![2.0]];
        let y = apply_channel(&h_tilde(2, 1), &x, None).unwrap();
        assert_eq!(y, vec![vec![7.0], vec![10.0], vec![2.0]]);
        let id = GainMatrix::from_integers(&[&[1, 0], &[0, 1]]).unwrap();
        let x2 = vec![vec![0.5, -3.0], vec![2.0, 7.25]];
        assert_eq!(apply_channel(&id, &x2, None).unwrap(), x2);
        let yi = apply_deterministic(&h_tilde(2, 1), &[vec![1], vec![4], vec![2]]).unwrap();
        assert_eq!(yi, vec![vec![7], vec![10], vec![2]]);
        assert!(apply_channel(&id, &x, None).is_err());
    }

    #[test]
    fn unit_noise_statistics() {
        let zero = GainMatrix::from_integers(&[&[0, 0], &[0, 0]]).unwrap();
        let n = 20_000;
        let x = vec![vec![0.0; n]; 2];
        let y = apply_channel(&zero, &x, Some(&NoiseSpec::unit(2, 9))).unwrap();
        for row in &y {
            let mean = row.iter().sum::<f64>() / n as f64;
            let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            // 5σ bands: sd(mean) ≈ 0.0071, sd(var) ≈ 0.01
            assert!(mean.abs() < 0.036, "mean {mean}");
            assert!((var - 1.0).abs() < 0.05, "var {var}");
            let tail = row.iter().filter(|v| v.abs() > 1.96).count() as f64 / n as f64;
            assert!((tail - 0.05).abs() < 0.008, "tail {tail}");
        }
        let corr: f64 = y[0].iter().zip(&y[1]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        assert!(corr.abs() < 0.036);
    }

    #[test]
    fn noise_streams_are_addressed_by_time() {
        let zero = GainMatrix::from_integers(&[&[0, 0], &[0, 0]]).unwrap();
        let spec = NoiseSpec::unit(2, 5);
        let whole = apply_channel(&zero, &[vec![0.0; 6], vec![0.0; 6]], Some(&spec)).unwrap();
        let tail = apply_channel_at(&zero, &[vec![0.0; 2], vec![0.0; 2]], Some(&spec), 4).unwrap();
        assert_eq!(&whole[0][4..], &tail[0][..]);
        assert_eq!(&whole[1][4..], &tail[1][..]);
    }

    #[test]
    fn noise_spec_validation() {
        assert!(NoiseSpec::new(vec![1.0, 0.0], 1).is_err());
        assert!(NoiseSpec::new(vec![1.0, f64::NAN], 1).is_err());
        assert!(NoiseSpec::new(vec![0.5, 2.0], 1).is_ok());
    }
}
