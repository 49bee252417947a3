use std::collections::HashSet;

use num_bigint::BigUint;

use super::{fiber_sizes, partial_sumset, IntVectorSet, PairSubset};
use crate::error::{Error, Result};

fn nonempty(sets: &[&IntVectorSet]) -> Result<()> {
    if sets.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySet);
    }
    Ok(())
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport {
    pub cover: IntVectorSet,
    pub sumset_size: usize,
    /// `|A+B| / |A|`
    pub size_bound: f64,
    pub size_ok: bool,
    pub covered: bool,
}

impl CoverReport {
    pub fn holds(&self) -> bool {
        self.size_ok && self.covered
    }
}

/// Greedy maximal packing: walks `B` in lexicographic order and keeps `b`
/// whenever `A + b` misses every translate kept so far. Both covering
/// conditions are re-checked by enumeration.
pub fn ruzsa_cover(a: &IntVectorSet, b: &IntVectorSet) -> Result<CoverReport> {
    nonempty(&[a, b])?;
    let sumset = a.sum(b)?;
    let mut occupied: HashSet<Vec<i64>> = HashSet::new();
    let mut chosen = Vec::new();
    for y in b.iter() {
        let translate: Vec<Vec<i64>> = a.iter().map(|x| add(x, y)).collect();
        if translate.iter().all(|t| !occupied.contains(t)) {
            occupied.extend(translate);
            chosen.push(y.clone());
        }
    }
    let cover = IntVectorSet::new(a.dim(), chosen)?;
    let size_ok = cover.len() * a.len() <= sumset.len();
    let covered = b.is_subset(&a.difference(a)?.sum(&cover)?);
    Ok(CoverReport {
        size_bound: sumset.len() as f64 / a.len() as f64,
        sumset_size: sumset.len(),
        cover,
        size_ok,
        covered,
    })
}

fn add(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).map(|(u, v)| u + v).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlunneckeReport {
    pub p: u32,
    pub q: u32,
    /// `|A+B| / |A|`
    pub growth: f64,
    /// `|p⋆B − q⋆B|`
    pub left: usize,
    /// `growth^(p+q) · |A|`
    pub bound: f64,
    pub holds: bool,
}

pub fn plunnecke_check(a: &IntVectorSet, b: &IntVectorSet, p: u32, q: u32) -> Result<PlunneckeReport> {
    nonempty(&[a, b])?;
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument("p and q must be at least 1".into()));
    }
    let sum = a.sum(b)?.len();
    let left = b.iterate(p)?.difference(&b.iterate(q)?)?.len();
    let n = p + q;
    let growth = sum as f64 / a.len() as f64;
    // left ≤ (|A+B|/|A|)^n |A|  ⇔  left·|A|^(n−1) ≤ |A+B|^n
    let holds = big(left) * big(a.len()).pow(n - 1) <= big(sum).pow(n);
    Ok(PlunneckeReport {
        p,
        q,
        growth,
        left,
        bound: growth.powi(n as i32) * a.len() as f64,
        holds,
    })
}

/// `2·max(|p|, |q|) + 5`.
pub fn setsum_exponent(p: i64, q: i64) -> u32 {
    2 * p.unsigned_abs().max(q.unsigned_abs()) as u32 + 5
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetsumReport {
    pub p: i64,
    pub q: i64,
    /// `|A+B| / √(|A||B|)`, before clamping.
    pub growth: f64,
    /// Growth was below 1 and was raised to 1.
    pub clamped: bool,
    pub exponent: u32,
    pub sumset_size: usize,
    /// `|p·A + q·B|`
    pub left: usize,
    pub bound: f64,
    pub holds: bool,
}

pub fn setsum_bound_check(a: &IntVectorSet, b: &IntVectorSet, p: i64, q: i64) -> Result<SetsumReport> {
    nonempty(&[a, b])?;
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument("p and q must be nonzero".into()));
    }
    let sum = a.sum(b)?.len();
    let left = a.dilate(p).sum(&b.dilate(q))?.len();
    let d = setsum_exponent(p, q);
    let ab = a.len() * b.len();
    let root = (ab as f64).sqrt();
    let growth = sum as f64 / root;
    let clamped = sum * sum < ab;
    // d is odd, so K^d √(|A||B|) = |A+B|^d / (|A||B|)^((d−1)/2)
    let (holds, bound) = if clamped {
        (left * left <= ab, root)
    } else {
        (
            big(left) * big(ab).pow((d - 1) / 2) <= big(sum).pow(d),
            growth.powi(d as i32) * root,
        )
    };
    Ok(SetsumReport {
        p,
        q,
        growth,
        clamped,
        exponent: d,
        sumset_size: sum,
        left,
        bound,
        holds,
    })
}

/// Entropy in bits of `X + Y` for independent uniform `X ∈ A`, `Y ∈ B`.
pub fn entropy_of_sum(a: &IntVectorSet, b: &IntVectorSet) -> Result<f64> {
    nonempty(&[a, b])?;
    let total = (a.len() * b.len()) as f64;
    Ok(fiber_sizes(a, b)?
        .values()
        .map(|&n| {
            let p = n as f64 / total;
            -p * p.log2()
        })
        .sum())
}

// keeps float rounding in the entropy from landing ε just under its true value
const EPSILON_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExgReport {
    pub c: f64,
    pub entropy: f64,
    pub epsilon: f64,
    /// `|B| · |A|^(−cε)`
    pub threshold: f64,
    /// Number of sums kept in `S`.
    pub kept_sums: usize,
    pub pair_count: usize,
    /// `|A||B|(c−1)/c`
    pub pair_bound: f64,
    pub pairs_ok: bool,
    pub partial_sumset_size: usize,
    /// `|A|^(1+cε)`
    pub sumset_bound: f64,
    pub sumset_ok: bool,
}

impl ExgReport {
    pub fn holds(&self) -> bool {
        self.pairs_ok && self.sumset_ok
    }
}

/// Keeps the sums with large fibers, `S = {s : |T(s)| ≥ |B|·|A|^(−cε)}`, and
/// the pairs landing in `S`, with `ε` read off `H(X+Y) ≤ (1+ε)·log₂|A|`.
pub fn exg_construct(a: &IntVectorSet, b: &IntVectorSet, c: f64) -> Result<(PairSubset, ExgReport)> {
    nonempty(&[a, b])?;
    if a.len() < b.len() {
        return Err(Error::HypothesisViolated(format!(
            "|A| = {} is smaller than |B| = {}",
            a.len(),
            b.len()
        )));
    }
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("c must exceed 1, got {c}")));
    }
    let entropy = entropy_of_sum(a, b)?;
    let log_a = (a.len() as f64).log2();
    let epsilon = if a.len() == 1 {
        0.0
    } else {
        (entropy / log_a - 1.0).max(0.0) + EPSILON_GUARD
    };
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let threshold = nb * na.powf(-c * epsilon);
    let sizes = fiber_sizes(a, b)?;
    let kept: HashSet<&Vec<i64>> = sizes
        .iter()
        .filter(|(_, &n)| n as f64 >= threshold)
        .map(|(s, _)| s)
        .collect();
    let f = PairSubset::new(a.iter().flat_map(|x| {
        let kept = &kept;
        b.iter()
            .filter(move |y| kept.contains(&add(x, y)))
            .map(move |y| (x.clone(), y.clone()))
    }));
    let partial = partial_sumset(a, b, &f)?.len();
    let pair_bound = na * nb * (c - 1.0) / c;
    let sumset_bound = na.powf(1.0 + c * epsilon);
    let report = ExgReport {
        c,
        entropy,
        epsilon,
        threshold,
        kept_sums: kept.len(),
        pair_count: f.len(),
        pair_bound,
        pairs_ok: f.len() as f64 * c >= na * nb * (c - 1.0),
        partial_sumset_size: partial,
        sumset_bound,
        sumset_ok: partial as f64 <= sumset_bound,
    };
    Ok((f, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsgStrategy {
    Whole,
    GreedyPruning,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsgReport {
    pub strategy: BsgStrategy,
    pub size_a: usize,
    pub size_b: usize,
    /// `|A| / (4√2·K)`
    pub min_a: f64,
    /// `|B| / (4·K)`
    pub min_b: f64,
    pub sumset_size: usize,
    /// `2¹²·K⁵·K′³·√(|A||B|)`
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsgOutcome {
    pub a: IntVectorSet,
    pub b: IntVectorSet,
    pub report: BsgReport,
}

const EXHAUSTIVE_LIMIT: usize = 12;

/// Searches for large `A′ ⊆ A`, `B′ ⊆ B` with a small full sumset: first the
/// whole sets, then greedy removal of low-degree vertices of the pair graph,
/// then (for `|A|, |B| ≤ 12`) every pair of subsets of the smallest allowed
/// sizes. Only verified pairs are returned.
pub fn bsg_construct(
    a: &IntVectorSet,
    b: &IntVectorSet,
    f: &PairSubset,
    kk: f64,
    kp: f64,
) -> Result<BsgOutcome> {
    nonempty(&[a, b])?;
    if !(kk >= 1.0) || !(kp > 0.0) {
        return Err(Error::InvalidArgument(format!("need K ≥ 1 and K′ > 0, got {kk}, {kp}")));
    }
    f.validate(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let root = (na * nb).sqrt();
    if (f.len() as f64) * kk < na * nb {
        return Err(Error::HypothesisViolated(format!(
            "|F| = {} is below |A||B|/K = {}",
            f.len(),
            na * nb / kk
        )));
    }
    let partial = partial_sumset(a, b, f)?.len();
    // K′ often arrives as a ratio computed in floating point
    if partial as f64 > kp * root * (1.0 + 1e-12) {
        return Err(Error::HypothesisViolated(format!(
            "|A +_F B| = {partial} exceeds K′√(|A||B|) = {}",
            kp * root
        )));
    }
    let min_a = na / (4.0 * std::f64::consts::SQRT_2 * kk);
    let min_b = nb / (4.0 * kk);
    let bound = 4096.0 * kk.powi(5) * kp.powi(3) * root;
    let certify = |x: &IntVectorSet, y: &IntVectorSet| -> Result<Option<usize>> {
        if (x.len() as f64) < min_a || (y.len() as f64) < min_b || x.is_empty() || y.is_empty() {
            return Ok(None);
        }
        let n = x.sum(y)?.len();
        Ok((n as f64 <= bound).then_some(n))
    };
    let outcome = |x: IntVectorSet, y: IntVectorSet, n: usize, strategy| BsgOutcome {
        report: BsgReport {
            strategy,
            size_a: x.len(),
            size_b: y.len(),
            min_a,
            min_b,
            sumset_size: n,
            bound,
        },
        a: x,
        b: y,
    };

    if let Some(n) = certify(a, b)? {
        return Ok(outcome(a.clone(), b.clone(), n, BsgStrategy::Whole));
    }
    if let Some((x, y, n)) = greedy_prune(a, b, f, (min_a, min_b), &certify)? {
        return Ok(outcome(x, y, n, BsgStrategy::GreedyPruning));
    }
    if a.len() <= EXHAUSTIVE_LIMIT && b.len() <= EXHAUSTIVE_LIMIT {
        let ka = (min_a.ceil() as usize).max(1);
        let kb = (min_b.ceil() as usize).max(1);
        let av: Vec<&Vec<i64>> = a.iter().collect();
        let bv: Vec<&Vec<i64>> = b.iter().collect();
        // sumsets only grow with their summands, so minimal sizes suffice
        for sa in combinations(av.len(), ka) {
            let x = IntVectorSet::new(a.dim(), sa.iter().map(|&i| av[i].clone()))?;
            for sb in combinations(bv.len(), kb) {
                let y = IntVectorSet::new(b.dim(), sb.iter().map(|&i| bv[i].clone()))?;
                if let Some(n) = certify(&x, &y)? {
                    return Ok(outcome(x, y, n, BsgStrategy::Exhaustive));
                }
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no certified subsets for |A| = {}, |B| = {}",
        a.len(),
        b.len()
    )))
}

type Certifier<'a> = dyn Fn(&IntVectorSet, &IntVectorSet) -> Result<Option<usize>> + 'a;

fn greedy_prune(
    a: &IntVectorSet,
    b: &IntVectorSet,
    f: &PairSubset,
    min_sizes: (f64, f64),
    certify: &Certifier<'_>,
) -> Result<Option<(IntVectorSet, IntVectorSet, usize)>> {
    let mut x = a.clone();
    let mut y = b.clone();
    loop {
        // degree of each remaining vertex within the surviving pairs
        let degree = |v: &Vec<i64>, left: bool| {
            f.iter()
                .filter(|(u, w)| x.contains(u) && y.contains(w) && if left { u == v } else { w == v })
                .count()
        };
        let mut candidates: Vec<(usize, bool, Vec<i64>)> = x
            .iter()
            .map(|v| (degree(v, true), true, v.clone()))
            .chain(y.iter().map(|v| (degree(v, false), false, v.clone())))
            .collect();
        candidates.sort();
        let mut progressed = false;
        for (_, left, v) in candidates {
            let (nx, ny) = if left {
                (IntVectorSet::new(x.dim(), x.iter().filter(|u| **u != v).cloned())?, y.clone())
            } else {
                (x.clone(), IntVectorSet::new(y.dim(), y.iter().filter(|u| **u != v).cloned())?)
            };
            if nx.is_empty() || ny.is_empty() {
                continue;
            }
            if let Some(n) = certify(&nx, &ny)? {
                return Ok(Some((nx, ny, n)));
            }
            // only shrink while the size conclusions can still hold
            if nx.len() as f64 >= min_sizes.0 && ny.len() as f64 >= min_sizes.1 {
                x = nx;
                y = ny;
                progressed = true;
                break;
            }
        }
        if !progressed {
            return Ok(None);
        }
    }
}

/// Index combinations of `k` out of `n` in lexicographic order.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}
