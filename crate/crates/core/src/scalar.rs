//! Coefficient rings used throughout the crate.
//!
//! Algebraic work happens over exact rationals. The same multilinear
//! evaluation code also runs over `f64` (numeric summation, residuals) and
//! over [`Poly`], polynomials in a formal parameter `t` with rational
//! coefficients, which is how path derivatives are computed without any
//! combinatorial bookkeeping.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

/// A commutative coefficient ring that rational structure constants embed into.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(q: &Rational) -> Self;

    fn one() -> Self {
        Self::from_rational(&<Rational as One>::one())
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    /// Multiply by a rational constant.
    fn scale(&self, q: &Rational) -> Self {
        self.clone() * Self::from_rational(q)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn from_rational(q: &Rational) -> Self {
        to_f64(q)
    }
}

/// Converts a rational to the nearest representable `f64`.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.05"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(num, den);
        return Ok(if negative { -q } else { q });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Polynomial in `t` with rational coefficients, optionally truncated.
///
/// `cap` is the highest degree that is kept; products and sums use the
/// smaller cap of their operands. `cap == usize::MAX` means no truncation.
#[derive(Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Rational>,
    cap: usize,
}

impl Poly {
    pub const UNBOUNDED: usize = usize::MAX;

    pub fn new(mut coeffs: Vec<Rational>, cap: usize) -> Self {
        if cap != Self::UNBOUNDED && coeffs.len() > cap + 1 {
            coeffs.truncate(cap + 1);
        }
        let mut p = Poly { coeffs, cap };
        p.trim();
        p
    }

    pub fn constant(c: Rational, cap: usize) -> Self {
        Self::new(vec![c], cap)
    }

    /// The monomial `c * t^k`.
    pub fn monomial(c: Rational, k: usize, cap: usize) -> Self {
        let mut coeffs = vec![<Rational as Zero>::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs, cap)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(<Rational as Zero>::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Exact `d/dt`, applied `k` times.
    pub fn derivative(&self, k: usize) -> Poly {
        if k == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(k)
            .map(|(n, c)| {
                let falling: BigInt = ((n - k + 1)..=n).map(BigInt::from).product();
                c * Rational::from_integer(falling)
            })
            .collect();
        Poly::new(coeffs, self.cap)
    }

    /// Value of the `k`-th derivative at `t = 0`, i.e. `k! * [t^k]`.
    pub fn derivative_at_zero(&self, k: usize) -> Rational {
        let fact: BigInt = (1..=k).map(BigInt::from).product();
        self.coeff(k) * Rational::from_integer(fact)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(k, c)| format!("{}*t^{k}", format_rational(c)))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(self, rhs: Poly) -> Poly {
        let cap = self.cap.min(rhs.cap);
        let (mut long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self.coeffs, rhs.coeffs)
        } else {
            (rhs.coeffs, self.coeffs)
        };
        for (a, b) in long.iter_mut().zip(short) {
            *a += b;
        }
        Poly::new(long, cap)
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
            cap: self.cap,
        }
    }
}

impl Sub for Poly {
    type Output = Poly;

    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        let cap = self.cap.min(rhs.cap);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly {
                coeffs: Vec::new(),
                cap,
            };
        }
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = if cap == Poly::UNBOUNDED {
            full
        } else {
            full.min(cap + 1)
        };
        let mut out = vec![<Rational as Zero>::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Poly::new(out, cap)
    }
}

impl Scalar for Poly {
    fn zero() -> Self {
        Poly {
            coeffs: Vec::new(),
            cap: Poly::UNBOUNDED,
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn from_rational(q: &Rational) -> Self {
        Poly::constant(q.clone(), Poly::UNBOUNDED)
    }

    fn scale(&self, q: &Rational) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c * q).collect(), self.cap)
    }
}
