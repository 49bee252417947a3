//! Text format for gain matrices.
//!
//! ```text
//! # optional comment lines
//! 3
//! (0+1√2)/1  1  1
//! 1  (0+1√2)/1  1
//! 1  1  (0+1√2)/1
//! ```
//!
//! The first non-comment line holds `K`, followed by `K` rows of `K`
//! whitespace-separated entries. An entry is an integer `a`, a fraction `a/b`
//! or a quadratic irrational `(a+b√D)/r` (`(a-b√D)/r` for negative `b`;
//! `sqrt` may stand in for `√`, a missing `b` means 1, a missing `/r` means 1).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::channel::{Gain, GainMatrix};
use crate::error::{Error, Result};
use crate::quadratic::QuadraticIrrational;

pub fn parse_matrix(text: &str) -> Result<GainMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (k_line, k_text) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty matrix file".into(),
    })?;
    let k: usize = k_text.parse().map_err(|_| Error::Parse {
        line: k_line,
        message: format!("expected user count, found {k_text:?}"),
    })?;
    if k < 2 {
        return Err(Error::Parse {
            line: k_line,
            message: format!("user count must be at least 2, found {k}"),
        });
    }

    let mut rows = Vec::with_capacity(k);
    let mut last_line = k_line;
    for (line, content) in lines {
        last_line = line;
        if rows.len() == k {
            return Err(Error::Parse {
                line,
                message: format!("unexpected content after {k} rows"),
            });
        }
        let row = content
            .split_whitespace()
            .map(|tok| {
                parse_gain(tok).map_err(|message| Error::Parse { line, message })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != k {
            return Err(Error::Parse {
                line,
                message: format!("expected {k} entries, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != k {
        return Err(Error::Parse {
            line: last_line,
            message: format!("expected {k} rows, found {}", rows.len()),
        });
    }
    GainMatrix::new(rows)
}

pub fn write_matrix(h: &GainMatrix) -> String {
    let mut out = format!("{}\n", h.k());
    for row in h.rows() {
        let cells: Vec<String> = row.iter().map(Gain::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Parses one matrix entry.
pub fn parse_gain(tok: &str) -> std::result::Result<Gain, String> {
    if tok.starts_with('(') {
        return parse_quadratic(tok).map(Gain::Quadratic);
    }
    let (num, den) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("invalid numerator in {tok:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("invalid denominator in {tok:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {tok:?}"));
    }
    Ok(Gain::Rational(BigRational::new(num, den)))
}

fn parse_quadratic(tok: &str) -> std::result::Result<QuadraticIrrational, String> {
    let bad = || format!("invalid quadratic irrational {tok:?}, expected (a+b√D)/r");
    let close = tok.find(')').ok_or_else(bad)?;
    let inner = &tok[1..close];
    let rest = &tok[close + 1..];
    let r: i64 = match rest.strip_prefix('/') {
        Some(r) => r.parse().map_err(|_| bad())?,
        None if rest.is_empty() => 1,
        None => return Err(bad()),
    };
    let (head, radicand) = inner
        .split_once('√')
        .or_else(|| inner.split_once("sqrt"))
        .ok_or_else(bad)?;
    let d: i64 = radicand.parse().map_err(|_| bad())?;
    // split "a+b" / "a-b" / "+b" / "b" at the last sign that is not leading
    let split = head
        .char_indices()
        .skip(1)
        .filter(|(_, c)| *c == '+' || *c == '-')
        .map(|(i, _)| i)
        .last();
    let (a_text, b_text) = match split {
        Some(i) => (&head[..i], &head[i..]),
        None => ("0", head),
    };
    let a: i64 = a_text.parse().map_err(|_| bad())?;
    let b: i64 = match b_text {
        "" | "+" => 1,
        "-" => -1,
        t => t.trim_start_matches('+').parse().map_err(|_| bad())?,
    };
    QuadraticIrrational::new(a, b, d, r).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::CanonicalTriple;

    #[test]
    fn parse_rational_matrix() {
        let h = parse_matrix("# two users\n2\n1 1/2\n1/3 1\n").unwrap();
        assert_eq!(h, GainMatrix::from_ratios(&[&[(1, 1), (1, 2)], &[(1, 3), (1, 1)]]).unwrap());
    }

    #[test]
    fn parse_quadratic_entries() {
        let phi = QuadraticIrrational::new(1, 1, 5, 2).unwrap();
        for tok in ["(1+1√5)/2", "(1+√5)/2", "(1+sqrt5)/2", "(2+2√5)/4"] {
            assert_eq!(parse_gain(tok).unwrap(), Gain::Quadratic(phi), "{tok}");
        }
        let neg = QuadraticIrrational::new(3, -2, 2, 1).unwrap();
        assert_eq!(parse_gain("(3-2√2)/1").unwrap(), Gain::Quadratic(neg));
        assert_eq!(parse_gain("(-3+2√2)").unwrap(), Gain::Quadratic(neg.neg()));
        assert_eq!(
            parse_gain("(√2)").unwrap(),
            Gain::Quadratic(QuadraticIrrational::sqrt(2).unwrap())
        );
        assert!(parse_gain("(1+2√4)/1").is_err());
        assert!(parse_gain("(1+2√3").is_err());
        assert!(parse_gain("1/0").is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_matrix("3\n1 0 0\n1 2\n1 1 1\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 3, message: "expected 3 entries, found 2".into() });
        let err = parse_matrix("2\n1 1\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_matrix("2\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn writer_round_trips() {
        let h = parse_matrix("3\n(0+1√2)/1 1 -1/2\n1 (1-√5)/2 1\n3 1 (√3)\n").unwrap();
        let text = write_matrix(&h);
        assert_eq!(text, "3\n(0+1√2)/1 1 -1/2\n1 (1-1√5)/2 1\n3 1 (0+1√3)/1\n");
        assert_eq!(parse_matrix(&text).unwrap(), h);
        let ht = GainMatrix::canonical(CanonicalTriple::new(2, 1).unwrap());
        assert_eq!(parse_matrix(&write_matrix(&ht)).unwrap(), ht);
    }
}
