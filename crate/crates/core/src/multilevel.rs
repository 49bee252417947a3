//! Deterministic multi-level alignment code for the three-user canonical
//! channel `y₁ = x₁+x₂+x₃`, `y₂ = p·x₂ + q·x₃`, `y₃ = x₃`.
//!
//! Each user writes one digit per level in base `Q`. When no digit sum
//! carries into the next level, every receiver reads its own level-`ℓ`
//! digit off level `ℓ` of its received signal: receiver 1 from
//! `w₁ = m₁+m₂+m₃`, receiver 2 from `w₂ = m₂ + (q/p)·m₃` after dividing by
//! `p`, receiver 3 directly. The decoding maps `w ↦ m` are tabulated from
//! the alphabets, so any scheme can be tried; [`validate_scheme`] says
//! whether the tables are unambiguous.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::channel::{apply_deterministic, CanonicalTriple, GainMatrix};
use crate::error::{Error, Result};

/// Largest message space [`exhaustive_zero_error`] will enumerate.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelScheme {
    alphabets: [Vec<i64>; 3],
    base: i64,
    levels: u32,
    gains: CanonicalTriple,
}

impl LevelScheme {
    /// Alphabets are sorted and deduplicated.
    pub fn new(alphabets: [Vec<i64>; 3], base: i64, levels: u32, gains: CanonicalTriple) -> Result<Self> {
        let alphabets = alphabets.map(|mut a| {
            a.sort_unstable();
            a.dedup();
            a
        });
        if alphabets.iter().any(Vec::is_empty) {
            return Err(Error::EmptySet);
        }
        if let Some(&v) = alphabets.iter().flatten().find(|v| **v < 0) {
            return Err(Error::InvalidArgument(format!("alphabet entries must be non-negative, got {v}")));
        }
        if base < 2 {
            return Err(Error::InvalidArgument(format!("base must be at least 2, got {base}")));
        }
        if levels == 0 {
            return Err(Error::InvalidArgument("at least one level is required".into()));
        }
        let span = base
            .checked_pow(levels)
            .and_then(|s| s.checked_mul(gains.p.abs().max(gains.q.abs()).max(1)))
            .and_then(|s| s.checked_mul(4));
        if span.is_none() {
            return Err(Error::Overflow("base^levels"));
        }
        Ok(Self { alphabets, base, levels, gains })
    }

    /// `A₁ = {0,1}`, `A₂ = {0,2,4}`, `A₃ = {0,2}`, `Q = 8`, `(p,q) = (2,1)`.
    pub fn default_scheme(levels: u32) -> Result<Self> {
        Self::new(
            [vec![0, 1], vec![0, 2, 4], vec![0, 2]],
            8,
            levels,
            CanonicalTriple::new(2, 1)?,
        )
    }

    pub fn with_levels(&self, levels: u32) -> Result<Self> {
        Self::new(self.alphabets.clone(), self.base, levels, self.gains)
    }

    pub fn alphabet(&self, user: usize) -> &[i64] {
        &self.alphabets[user]
    }

    pub fn alphabets(&self) -> &[Vec<i64>; 3] {
        &self.alphabets
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn gains(&self) -> CanonicalTriple {
        self.gains
    }

    /// `Q^L`.
    pub fn span(&self) -> i64 {
        self.base.pow(self.levels)
    }

    /// Number of message tuples, `(|A₁||A₂||A₃|)^L`.
    pub fn message_count(&self) -> u128 {
        let per_level: u128 = self.alphabets.iter().map(|a| a.len() as u128).product();
        per_level.checked_pow(self.levels).unwrap_or(u128::MAX)
    }
}

impl fmt::Display for LevelScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3] = &self.alphabets;
        write!(
            f,
            "A1={a1:?} A2={a2:?} A3={a3:?} Q={} L={} (p,q)=({},{})",
            self.base, self.levels, self.gains.p, self.gains.q
        )
    }
}

/// Parses `key = values` lines: `A1`, `A2`, `A3` (integers), `Q`, `p` and
/// `q`. `#` starts a comment.
pub fn parse_scheme(text: &str, levels: u32) -> Result<LevelScheme> {
    let mut fields: BTreeMap<String, (usize, Vec<i64>)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, values) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = values`, found {content:?}"),
        })?;
        let key = key.trim().to_string();
        if !matches!(key.as_str(), "A1" | "A2" | "A3" | "Q" | "p" | "q") {
            return Err(Error::Parse { line, message: format!("unknown key {key:?}") });
        }
        let values = values
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse { line, message: format!("invalid integer {t:?}") })
            })
            .collect::<Result<Vec<_>>>()?;
        if fields.insert(key.clone(), (line, values)).is_some() {
            return Err(Error::Parse { line, message: format!("duplicate key {key:?}") });
        }
    }
    let last = text.lines().count().max(1);
    let list = |k: &str| -> Result<Vec<i64>> {
        fields
            .get(k)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Parse { line: last, message: format!("missing key {k:?}") })
    };
    let scalar = |k: &str| -> Result<i64> {
        match fields.get(k) {
            Some((_, v)) if v.len() == 1 => Ok(v[0]),
            Some((line, _)) => {
                Err(Error::Parse { line: *line, message: format!("{k} takes one integer") })
            }
            None => Err(Error::Parse { line: last, message: format!("missing key {k:?}") }),
        }
    };
    LevelScheme::new(
        [list("A1")?, list("A2")?, list("A3")?],
        scalar("Q")?,
        levels,
        CanonicalTriple::new(scalar("p")?, scalar("q")?)?,
    )
}

/// Digits `m[user][level]`, level 0 least significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MessageTuple {
    pub digits: [Vec<i64>; 3],
}

impl MessageTuple {
    pub fn new(digits: [Vec<i64>; 3]) -> Result<Self> {
        let l = digits[0].len();
        if let Some(d) = digits.iter().find(|d| d.len() != l) {
            return Err(Error::DimensionMismatch { expected: l, found: d.len() });
        }
        Ok(Self { digits })
    }

    pub fn zeros(levels: u32) -> Self {
        let z = vec![0; levels as usize];
        Self { digits: [z.clone(), z.clone(), z] }
    }

    pub fn levels(&self) -> usize {
        self.digits[0].len()
    }

    /// The `index`-th tuple in mixed-radix order, level 0 varying fastest
    /// and user 1 fastest within a level.
    pub fn from_index(s: &LevelScheme, mut index: u128) -> Self {
        let mut digits: [Vec<i64>; 3] = Default::default();
        for _ in 0..s.levels {
            for (user, d) in digits.iter_mut().enumerate() {
                let a = &s.alphabets[user];
                d.push(a[(index % a.len() as u128) as usize]);
                index /= a.len() as u128;
            }
        }
        Self { digits }
    }
}

/// `xᵢ = Σ_ℓ m_{i,ℓ} Q^ℓ`.
pub fn encode(s: &LevelScheme, m: &MessageTuple) -> Result<[i64; 3]> {
    if m.levels() != s.levels as usize {
        return Err(Error::DimensionMismatch { expected: s.levels as usize, found: m.levels() });
    }
    let mut x = [0i64; 3];
    for (user, xi) in x.iter_mut().enumerate() {
        for (level, &digit) in m.digits[user].iter().enumerate().rev() {
            if s.alphabets[user].binary_search(&digit).is_err() {
                return Err(Error::DigitOutsideAlphabet { user: user + 1, level: level + 1, digit });
            }
            *xi = *xi * s.base + digit;
        }
    }
    Ok(x)
}

/// Noiseless outputs of the canonical channel for one symbol.
pub fn channel_outputs(s: &LevelScheme, x: [i64; 3]) -> Result<[i64; 3]> {
    let h = GainMatrix::canonical(s.gains);
    let y = apply_deterministic(&h, &[vec![x[0]], vec![x[1]], vec![x[2]]])?;
    Ok([y[0][0], y[1][0], y[2][0]])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Per-level decoding tables: received digit to message digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoder {
    scheme: LevelScheme,
    receiver1: BTreeMap<i64, i64>,
    receiver2: BTreeMap<i64, i64>,
    validation: Validation,
}

impl Decoder {
    /// Builds the tables. Where a received digit is ambiguous the smallest
    /// candidate message is kept, so invalid schemes still decode (wrongly).
    pub fn new(s: &LevelScheme) -> Self {
        let q_max = s.base - 1;
        let [a1, a2, a3] = &s.alphabets;
        let (p, q) = (s.gains.p, s.gains.q);
        let mut diagnostics = Vec::new();

        for (i, a) in s.alphabets.iter().enumerate() {
            if let Some(v) = a.iter().find(|v| **v > q_max) {
                diagnostics.push(format!("A{} contains {v} outside [0, {q_max}]", i + 1));
            }
        }

        let mut receiver1 = BTreeMap::new();
        for &m1 in a1 {
            for &m2 in a2 {
                for &m3 in a3 {
                    let w = m1 + m2 + m3;
                    if w > q_max {
                        diagnostics.push(format!("{m1}+{m2}+{m3} = {w} carries past {q_max}"));
                    }
                    let kept = *receiver1.entry(w).or_insert(m1);
                    if kept != m1 {
                        diagnostics.push(format!("receiver 1 digit {w} does not determine m1 ({kept} or {m1})"));
                    }
                }
            }
        }

        let mut receiver2 = BTreeMap::new();
        for &m2 in a2 {
            for &m3 in a3 {
                let num = p * m2 + q * m3;
                if num % p != 0 {
                    diagnostics.push(format!("{p}·{m2}+{q}·{m3} is not divisible by {p}"));
                    continue;
                }
                let w = num / p;
                if !(0..=q_max).contains(&w) {
                    diagnostics.push(format!("receiver 2 digit {m2}+({q}/{p})·{m3} = {w} outside [0, {q_max}]"));
                }
                let kept = *receiver2.entry(w).or_insert(m2);
                if kept != m2 {
                    diagnostics.push(format!("receiver 2 digit {w} does not determine m2 ({kept} or {m2})"));
                }
            }
        }

        diagnostics.dedup();
        let validation = Validation { valid: diagnostics.is_empty(), diagnostics };
        Self { scheme: s.clone(), receiver1, receiver2, validation }
    }

    pub fn validation(&self) -> &Validation {
        &self.validation
    }

    /// Recovers receiver `receiver`'s (1-based) level digits from its output.
    pub fn decode(&self, receiver: usize, y: i64) -> Result<Vec<i64>> {
        let s = &self.scheme;
        let z = match receiver {
            1 | 3 => y,
            2 => {
                if y % s.gains.p != 0 {
                    return Err(Error::NotDivisible { y, p: s.gains.p });
                }
                y / s.gains.p
            }
            _ => return Err(Error::InvalidArgument(format!("receiver must be 1, 2 or 3, got {receiver}"))),
        };
        if z < 0 || z >= s.span() {
            return Err(Error::OutOfRange(y));
        }
        let mut rest = z;
        (0..s.levels)
            .map(|_| {
                let w = rest % s.base;
                rest /= s.base;
                match receiver {
                    1 => self.receiver1.get(&w).copied(),
                    2 => self.receiver2.get(&w).copied(),
                    _ => s.alphabets[2].binary_search(&w).ok().map(|_| w),
                }
                .ok_or(Error::UndecodableDigit(w))
            })
            .collect()
    }
}

pub fn validate_scheme(s: &LevelScheme) -> Validation {
    Decoder::new(s).validation
}

pub fn decode(s: &LevelScheme, receiver: usize, y: i64) -> Result<Vec<i64>> {
    Decoder::new(s).decode(receiver, y)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingFailure {
    pub message: MessageTuple,
    pub receiver: usize,
    pub outputs: [i64; 3],
    pub decoded: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub tuples: u128,
    pub failures: u128,
    /// Failure with the smallest enumeration index.
    pub first_failure: Option<DecodingFailure>,
    /// Largest `|xᵢ|` over all tuples, per user.
    pub peak_amplitude: [i64; 3],
}

impl ExhaustiveReport {
    pub fn zero_error(&self) -> bool {
        self.failures == 0
    }
}

/// Runs every message tuple through encoder, channel and decoders.
pub fn exhaustive_zero_error(s: &LevelScheme) -> Result<ExhaustiveReport> {
    let tuples = s.message_count();
    if tuples > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard(tuples));
    }
    let decoder = Decoder::new(s);
    let h = GainMatrix::canonical(s.gains);
    let mut gains = [[0i64; 3]; 3];
    for (tx, row) in gains.iter_mut().enumerate() {
        for (rx, g) in row.iter_mut().enumerate() {
            *g = h.get(tx, rx).as_integer().and_then(|v| v.to_i64()).expect("small integer gains");
        }
    }

    let check = |index: u128| -> Result<(Option<DecodingFailure>, [i64; 3])> {
        let m = MessageTuple::from_index(s, index);
        let x = encode(s, &m)?;
        let mut y = [0i64; 3];
        for (rx, out) in y.iter_mut().enumerate() {
            *out = (0..3).map(|tx| x[tx] * gains[tx][rx]).sum();
        }
        for receiver in 1..=3 {
            let decoded = decoder.decode(receiver, y[receiver - 1]).ok();
            if decoded.as_ref() != Some(&m.digits[receiver - 1]) {
                let failure = DecodingFailure { message: m, receiver, outputs: y, decoded };
                return Ok((Some(failure), x));
            }
        }
        Ok((None, x))
    };

    let (failures, first_failure, peak_amplitude) = (0..tuples as u64)
        .into_par_iter()
        .map(|i| {
            let (failure, x) = check(i as u128)?;
            Ok((u128::from(failure.is_some()), failure.map(|f| (i, f)), x.map(i64::abs)))
        })
        .try_reduce(
            || (0u128, None, [0i64; 3]),
            |a, b| {
                let first = match (a.1, b.1) {
                    (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                    (x, y) => x.or(y),
                };
                let peak = [a.2[0].max(b.2[0]), a.2[1].max(b.2[1]), a.2[2].max(b.2[2])];
                Ok((a.0 + b.0, first, peak))
            },
        )?;
    Ok(ExhaustiveReport {
        tuples,
        failures,
        first_failure: first_failure.map(|(_, f)| f),
        peak_amplitude,
    })
}

/// `Σᵢ log₂|Aᵢ| / log₂ Q`.
pub fn scheme_dof(s: &LevelScheme) -> f64 {
    let bits: f64 = s.alphabets.iter().map(|a| (a.len() as f64).log2()).sum();
    bits / (s.base as f64).log2()
}

/// Bits per symbol for each user, `L·log₂|Aᵢ|`.
pub fn user_rates(s: &LevelScheme) -> [f64; 3] {
    s.alphabets.clone().map(|a| s.levels as f64 * (a.len() as f64).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_base: i64,
    pub gains: CanonicalTriple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: Option<LevelScheme>,
    pub best_dof: f64,
    pub schemes_checked: u64,
}

/// Brute force over bases `2..=max_base` and alphabets containing 0 with no
/// carries at receiver 1; keeps the first valid scheme of largest DoF.
pub fn search_alphabets(caps: SearchCaps) -> Result<SearchOutcome> {
    if caps.max_base < 2 || caps.max_base > 16 {
        return Err(Error::InvalidArgument(format!("max base must lie in 2..=16, got {}", caps.max_base)));
    }
    let mut out = SearchOutcome { best: None, best_dof: f64::NEG_INFINITY, schemes_checked: 0 };
    for base in 2..=caps.max_base {
        let subsets = zero_subsets(base - 1);
        for a1 in &subsets {
            let room1 = base - 1 - a1.last().unwrap();
            for a2 in subsets.iter().filter(|a| *a.last().unwrap() <= room1) {
                let room2 = room1 - a2.last().unwrap();
                for a3 in subsets.iter().filter(|a| *a.last().unwrap() <= room2) {
                    let s = LevelScheme::new([a1.clone(), a2.clone(), a3.clone()], base, 1, caps.gains)?;
                    out.schemes_checked += 1;
                    let dof = scheme_dof(&s);
                    if dof > out.best_dof + 1e-12 && validate_scheme(&s).valid {
                        out.best_dof = dof;
                        out.best = Some(s);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Subsets of `{0..=max}` containing 0, each sorted.
fn zero_subsets(max: i64) -> Vec<Vec<i64>> {
    (0u32..1 << max)
        .map(|mask| {
            std::iter::once(0)
                .chain((1..=max).filter(|v| mask >> (v - 1) & 1 == 1))
                .collect()
        })
        .collect()
}
