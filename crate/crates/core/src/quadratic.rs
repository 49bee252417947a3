//! Exact real quadratic irrationals `(a + b√d)/r` and elements `u + v√d` of
//! `ℤ[√d]` with sign-exact comparison.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A real quadratic irrational `(a + b·√d)/r`.
///
/// Always normalized: `r > 0`, `b ≠ 0`, `d ≥ 2` square-free and
/// `gcd(a, b, r) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational {
    a: i64,
    b: i64,
    d: i64,
    r: i64,
}

impl QuadraticIrrational {
    pub fn new(a: i64, b: i64, d: i64, r: i64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidQuadratic("zero denominator".into()));
        }
        if d < 2 {
            return Err(if d >= 0 {
                Error::RationalValue
            } else {
                Error::InvalidQuadratic(format!("negative radicand {d}"))
            });
        }
        if b == 0 {
            return Err(Error::RationalValue);
        }
        let (square, free) = split_square_factor(d);
        if free == 1 {
            return Err(Error::RationalValue);
        }
        let b = b
            .checked_mul(square)
            .ok_or(Error::Overflow("quadratic normalization"))?;
        let (mut a, mut b, mut r) = (a, b, r);
        if r < 0 {
            a = a.checked_neg().ok_or(Error::Overflow("quadratic normalization"))?;
            b = b.checked_neg().ok_or(Error::Overflow("quadratic normalization"))?;
            r = r.checked_neg().ok_or(Error::Overflow("quadratic normalization"))?;
        }
        let g = a.gcd(&b).gcd(&r);
        Ok(Self {
            a: a / g,
            b: b / g,
            d: free,
            r: r / g,
        })
    }

    /// `√d` for a non-square `d`.
    pub fn sqrt(d: i64) -> Result<Self> {
        Self::new(0, 1, d, 1)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn to_f64(&self) -> f64 {
        let root = (self.d as f64).sqrt();
        (self.a as f64 + self.b as f64 * root) / self.r as f64
    }

    /// Numerator `a + b√d` as an element of `ℤ[√d]`.
    pub fn numerator(&self) -> Surd {
        Surd::new(self.a as i128, self.b as i128, self.d as i128)
    }

    /// Multiplies by the rational `num/den`.
    pub fn mul_rational(&self, num: i64, den: i64) -> Result<Self> {
        if num == 0 {
            return Err(Error::RationalValue);
        }
        let overflow = Error::Overflow("quadratic scaling");
        let a = self.a.checked_mul(num).ok_or(overflow.clone())?;
        let b = self.b.checked_mul(num).ok_or(overflow.clone())?;
        let r = self.r.checked_mul(den).ok_or(overflow)?;
        Self::new(a, b, self.d, r)
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            ..*self
        }
    }

    /// Primitive minimal polynomial `A·x² + B·x + C` with `A > 0`.
    pub fn minimal_polynomial(&self) -> (i128, i128, i128) {
        // r·x − a = b√d  ⇒  r²x² − 2ar·x + a² − b²d = 0
        let (a, b, d, r) = (self.a as i128, self.b as i128, self.d as i128, self.r as i128);
        let ca = r * r;
        let cb = -2 * a * r;
        let cc = a * a - b * b * d;
        let g = ca.gcd(&cb).gcd(&cc);
        (ca / g, cb / g, cc / g)
    }

    /// Exact `⌊k·α⌋`.
    pub fn floor_mul(&self, k: i64) -> i128 {
        let k = k as i128;
        floor_div_surd(
            self.a as i128 * k,
            self.b as i128 * k,
            self.d as i128,
            self.r as i128,
        )
    }

    /// Iterator over the simple continued fraction convergents `(p, q)` of `α`.
    pub fn convergents(&self) -> Convergents {
        Convergents::new(self)
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b < 0 {
            write!(f, "({}-{}√{})/{}", self.a, -(self.b as i128), self.d, self.r)
        } else {
            write!(f, "({}+{}√{})/{}", self.a, self.b, self.d, self.r)
        }
    }
}

/// Largest `s` with `s² | n`, returned with the square-free cofactor.
fn split_square_factor(mut n: i64) -> (i64, i64) {
    let mut square = 1i64;
    let mut p = 2i64;
    while p.saturating_mul(p) <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            square *= p;
        }
        p += 1;
    }
    (square, n)
}

/// Integer square root of a non-negative `i128`.
pub(crate) fn isqrt(n: i128) -> i128 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x > 0 && x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Exact `⌊(u + v√d)/r⌋` for non-square `d` and `r ≠ 0`.
pub(crate) fn floor_div_surd(u: i128, v: i128, d: i128, r: i128) -> i128 {
    let (u, v, r) = if r < 0 { (-u, -v, -r) } else { (u, v, r) };
    // ⌊v√d⌋; v²d is never a perfect square when v ≠ 0
    let root = isqrt(v * v * d);
    let floor_root = if v >= 0 { root } else { -root - 1 };
    (u + floor_root).div_euclid(r)
}

/// An element `u + v√d` of `ℤ[√d]`, `d` non-square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Surd {
    pub u: i128,
    pub v: i128,
    pub d: i128,
}

impl Surd {
    pub fn new(u: i128, v: i128, d: i128) -> Self {
        Self { u, v, d }
    }

    pub fn is_zero(&self) -> bool {
        self.u == 0 && self.v == 0
    }

    pub fn signum(&self) -> i32 {
        let su = self.u.signum() as i32;
        let sv = self.v.signum() as i32;
        if sv == 0 || su == sv {
            return su;
        }
        if su == 0 {
            return sv;
        }
        // opposite signs: compare u² with v²d
        match (
            self.u.checked_mul(self.u),
            self.v.checked_mul(self.v).and_then(|x| x.checked_mul(self.d)),
        ) {
            (Some(uu), Some(vvd)) => {
                if uu > vvd {
                    su
                } else {
                    sv
                }
            }
            _ => {
                let u = BigInt::from(self.u);
                let v = BigInt::from(self.v);
                if &u * &u > &v * &v * BigInt::from(self.d) {
                    su
                } else {
                    sv
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            Self::new(-self.u, -self.v, self.d)
        } else {
            *self
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.d, other.d);
        Self::new(self.u - other.u, self.v - other.v, self.d)
    }

    /// Exact comparison of absolute values.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        self.abs().sub(&other.abs()).signum().cmp(&0)
    }

    /// Floating value computed without catastrophic cancellation.
    pub fn to_f64(&self) -> f64 {
        let root = (self.d as f64).sqrt();
        let (u, v) = (self.u as f64, self.v as f64);
        if self.u.signum() * self.v.signum() >= 0 {
            return u + v * root;
        }
        // u + v√d = (u² − v²d)/(u − v√d), the denominator has no cancellation
        let norm = BigInt::from(self.u) * BigInt::from(self.u)
            - BigInt::from(self.v) * BigInt::from(self.v) * BigInt::from(self.d);
        norm.to_f64().unwrap_or(f64::NAN) / (u - v * root)
    }
}

/// Simple continued fraction expansion of a quadratic irrational, yielding
/// convergents `(p_n, q_n)`.
#[derive(Debug, Clone)]
pub struct Convergents {
    // current complete quotient (p + √disc)/q
    p: BigInt,
    q: BigInt,
    disc: BigInt,
    root_floor: BigInt,
    prev: (BigInt, BigInt),
    curr: (BigInt, BigInt),
}

impl Convergents {
    fn new(alpha: &QuadraticIrrational) -> Self {
        // rewrite α as (P + √D)/Q with Q | D − P²
        let (mut a, b, d, mut r) = (
            BigInt::from(alpha.a),
            BigInt::from(alpha.b),
            BigInt::from(alpha.d),
            BigInt::from(alpha.r),
        );
        if b.is_negative() {
            a = -a;
            r = -r;
        }
        let mut disc = &b * &b * &d;
        let mut p = a;
        let mut q = r;
        if !(&disc - &p * &p).is_multiple_of(&q) {
            let scale = q.abs();
            p *= &scale;
            disc = disc * &scale * &scale;
            q *= scale;
        }
        let root_floor = disc.sqrt();
        Self {
            p,
            q,
            disc,
            root_floor,
            prev: (BigInt::zero(), BigInt::from(1)),
            curr: (BigInt::from(1), BigInt::zero()),
        }
    }

    fn next_partial_quotient(&mut self) -> BigInt {
        // ⌊(p + √disc)/q⌋, √disc irrational
        let num = &self.p + &self.root_floor;
        let a = if self.q.is_positive() {
            num.div_floor(&self.q)
        } else {
            // (p + √D)/q with q < 0 equals (−p − √D)/(−q); ⌊−√D⌋ = −⌊√D⌋ − 1
            let num: BigInt = -&self.p - &self.root_floor - 1;
            num.div_floor(&(-&self.q))
        };
        let p_next = &a * &self.q - &self.p;
        let q_next = (&self.disc - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next;
        a
    }
}

impl Iterator for Convergents {
    type Item = (BigInt, BigInt);

    fn next(&mut self) -> Option<Self::Item> {
        let a = self.next_partial_quotient();
        let p = &a * &self.curr.0 + &self.prev.0;
        let q = &a * &self.curr.1 + &self.prev.1;
        self.prev = std::mem::replace(&mut self.curr, (p.clone(), q.clone()));
        Some((p, q))
    }
}
