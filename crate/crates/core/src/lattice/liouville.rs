//! Computable Diophantine constants for quadratic irrationals.
//!
//! For `α` with primitive minimal polynomial `f = A·x² + B·x + C`, every
//! rational `p/q` satisfies `q²·|f(p/q)| ≥ 1`, and
//! `f(p/q) = (p/q − α)·(f′(α) − A·(α − p/q))`. With `c = ⌈|f′(α)|⌉`, a rational
//! with `|α − p/q| ≤ 1/(c·q²)` forces `q² ≤ |A| / (c·(c − |f′(α)|))`, so the
//! bound `|α − p/q| > 1/(c·q²)` is certified by checking finitely many `q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::quadratic::{QuadraticIrrational, Surd};

/// Default range of the convergent cross-check.
pub const CONVERGENT_CHECK_LIMIT: u64 = 10_000;

/// `δ = 1/c` with `|α − p/q| > δ/q²` for all integers `p` and `q > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleCertificate {
    pub delta: BigRational,
    /// `c`, the reciprocal of `δ`.
    pub denominator: u64,
    /// `|f′(α)|` of the primitive minimal polynomial.
    pub derivative: f64,
    /// Every `q` up to this bound was checked exhaustively.
    pub exhaustive_q_limit: u64,
    pub convergents_checked: usize,
    /// Smallest `q²·|α − p/q|` over the checked convergents.
    pub min_scaled_error: f64,
}

pub fn liouville_delta(alpha: &QuadraticIrrational) -> LiouvilleCertificate {
    liouville_delta_with_limit(alpha, CONVERGENT_CHECK_LIMIT)
}

/// As [`liouville_delta`], cross-checking convergents with `q ≤ q_max`.
pub fn liouville_delta_with_limit(alpha: &QuadraticIrrational, q_max: u64) -> LiouvilleCertificate {
    let (ca, cb, _) = alpha.minimal_polynomial();
    // f′(α)·r = 2A(a + b√d) + B·r
    let deriv = Surd::new(
        2 * ca * alpha.a() as i128 + cb * alpha.r() as i128,
        2 * ca * alpha.b() as i128,
        alpha.d() as i128,
    )
    .abs();
    let r = alpha.r() as i128;
    // ⌈|f′(α)|⌉ = ⌊|f′(α)|⌋ + 1 since f′(α) is irrational
    let mut c = crate::quadratic::floor_div_surd(deriv.u, deriv.v, deriv.d, r) as u64 + 1;
    let derivative = deriv.to_f64() / r as f64;

    loop {
        let gap = c as f64 - derivative;
        let q_limit = ((ca.unsigned_abs() as f64 / (c as f64 * gap)).sqrt().floor() as u64).saturating_add(1);
        let exhaustive_ok = (1..=q_limit).all(|q| {
            let p0 = alpha.floor_mul(q as i64);
            !violates(alpha, p0, q, c) && !violates(alpha, p0 + 1, q, c)
        });
        if !exhaustive_ok {
            c += 1;
            continue;
        }
        let mut checked = 0;
        let mut min_scaled = f64::INFINITY;
        let mut convergents_ok = true;
        for (p, q) in alpha.convergents() {
            let Some(q_small) = q.to_u64().filter(|&q| q <= q_max) else {
                break;
            };
            let p_small = p.to_i128().expect("convergent numerator fits");
            checked += 1;
            min_scaled = min_scaled.min(scaled_error(alpha, p_small, q_small));
            if violates(alpha, p_small, q_small, c) {
                convergents_ok = false;
                break;
            }
        }
        if !convergents_ok {
            c += 1;
            continue;
        }
        return LiouvilleCertificate {
            delta: BigRational::new(BigInt::from(1), BigInt::from(c)),
            denominator: c,
            derivative,
            exhaustive_q_limit: q_limit,
            convergents_checked: checked,
            min_scaled_error: min_scaled,
        };
    }
}

/// `|α − p/q| ≤ 1/(c·q²)`, decided exactly.
fn violates(alpha: &QuadraticIrrational, p: i128, q: u64, c: u64) -> bool {
    // X = c·q·(q·α − p)·r = c·q·(q·a − p·r) + c·q²·b·√d ; violation iff |X| ≤ r
    let (a, b, d, r) = (
        BigInt::from(alpha.a()),
        BigInt::from(alpha.b()),
        BigInt::from(alpha.d()),
        BigInt::from(alpha.r()),
    );
    let (p, q, c) = (BigInt::from(p), BigInt::from(q), BigInt::from(c));
    let u = &c * &q * (&q * &a - &p * &r);
    let v = &c * &q * &q * &b;
    let above = big_signum(&(&u - &r), &v, &d) > 0;
    let below = big_signum(&(&u + &r), &v, &d) < 0;
    !(above || below)
}

fn scaled_error(alpha: &QuadraticIrrational, p: i128, q: u64) -> f64 {
    // q·(q·α − p) = (q·(q·a − p·r) + q²·b√d)/r
    let q_i = q as i128;
    let s = Surd::new(
        q_i * (q_i * alpha.a() as i128 - p * alpha.r() as i128),
        q_i * q_i * alpha.b() as i128,
        alpha.d() as i128,
    );
    s.to_f64().abs() / alpha.r() as f64
}

fn big_signum(u: &BigInt, v: &BigInt, d: &BigInt) -> i32 {
    let su = sign_of(u);
    let sv = sign_of(v);
    if sv == 0 || su == sv {
        return su;
    }
    if su == 0 {
        return sv;
    }
    if u * u > v * v * d {
        su
    } else {
        sv
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}
