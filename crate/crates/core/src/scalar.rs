//! Exact scalars in `Q` and a real quadratic field `Q(sqrt d)`.
//!
//! A [`Scalar`] is `rat + surd * sqrt(disc)` with `disc` square-free. Values
//! are canonicalized at construction: a zero surd always carries `disc = 0`,
//! so structural equality coincides with equality of real numbers.
//!
//! Operands carrying two different non-zero discriminants cannot be combined.
//! The `try_*` methods report this as [`ScalarError::MixedDiscriminant`];
//! the operator impls panic on it, and are meant for values that were
//! validated against a single problem-wide discriminant on entry.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("mixed discriminants sqrt({0}) and sqrt({1})")]
    MixedDiscriminant(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid scalar literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    rat: BigRational,
    surd: BigRational,
    disc: u64,
}

/// Splits `n` as `k^2 * f` with `f` square-free.
fn square_free_part(n: u64) -> (u64, u64) {
    let mut outer = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        while rest.is_multiple_of(p * p) {
            rest /= p * p;
            outer *= p;
        }
        p += 1;
    }
    (outer, rest)
}

impl Scalar {
    fn canonical(rat: BigRational, surd: BigRational, disc: u64) -> Self {
        match disc {
            0 => Scalar { rat, surd: BigRational::zero(), disc: 0 },
            1 => Scalar { rat: rat + surd, surd: BigRational::zero(), disc: 0 },
            _ if surd.is_zero() => Scalar { rat, surd, disc: 0 },
            _ => {
                let (outer, free) = square_free_part(disc);
                let surd = surd * BigRational::from_integer(BigInt::from(outer));
                if free == 1 {
                    Scalar { rat: rat + surd, surd: BigRational::zero(), disc: 0 }
                } else {
                    Scalar { rat, surd, disc: free }
                }
            }
        }
    }

    /// `rat + surd * sqrt(disc)`; `disc` need not be square-free.
    pub fn new(rat: BigRational, surd: BigRational, disc: u64) -> Self {
        Self::canonical(rat, surd, disc)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    /// `num / den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar { rat: r, surd: BigRational::zero(), disc: 0 }
    }

    /// `sqrt(d)` in canonical form (`sqrt(8)` becomes `2*sqrt(2)`).
    pub fn sqrt(d: u64) -> Self {
        Self::canonical(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    /// Square-free discriminant, or 0 for a rational value.
    pub fn disc(&self) -> u64 {
        self.disc
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.disc == 0
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.rat.is_integer()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rat)
    }

    fn joint_disc(&self, other: &Self) -> Result<u64, ScalarError> {
        match (self.disc, other.disc) {
            (0, d) | (d, 0) => Ok(d),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(ScalarError::MixedDiscriminant(a, b)),
        }
    }

    /// Whether `self` and `other` can be combined.
    pub fn compatible(&self, other: &Self) -> bool {
        self.joint_disc(other).is_ok()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_disc(other)?;
        Ok(Self::canonical(&self.rat + &other.rat, &self.surd + &other.surd, d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_disc(other)?;
        Ok(Self::canonical(&self.rat - &other.rat, &self.surd - &other.surd, d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_disc(other)?;
        let dd = BigRational::from_integer(BigInt::from(d));
        let rat = &self.rat * &other.rat + &self.surd * &other.surd * dd;
        let surd = &self.rat * &other.surd + &self.surd * &other.rat;
        Ok(Self::canonical(rat, surd, d))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.joint_disc(other)?;
        let inv = other.recip()?;
        self.try_mul(&inv)
    }

    /// Multiplicative inverse via the conjugate: `1/(a+b√d) = (a-b√d)/(a²-b²d)`.
    pub fn recip(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let d = BigRational::from_integer(BigInt::from(self.disc));
        let norm = &self.rat * &self.rat - &self.surd * &self.surd * d;
        Ok(Self::canonical(&self.rat / &norm, -&self.surd / &norm, self.disc))
    }

    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, ScalarError> {
        let diff = self.try_sub(other)?;
        Ok(diff.signum())
    }

    /// Sign of `a + b√d` by exact case analysis.
    pub fn signum(&self) -> Ordering {
        let a = self.rat.cmp(&BigRational::zero());
        let b = self.surd.cmp(&BigRational::zero());
        match (a, b) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            (x, _) => {
                // opposite signs: compare a^2 with b^2 d
                let d = BigRational::from_integer(BigInt::from(self.disc));
                let lhs = &self.rat * &self.rat;
                let rhs = &self.surd * &self.surd * d;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.disc == 0 {
            return a;
        }
        a + self.surd.to_f64().unwrap_or(f64::NAN) * (self.disc as f64).sqrt()
    }

    /// Largest integer `n` with `n <= self`.
    pub fn floor(&self) -> BigInt {
        if self.disc == 0 {
            return self.rat.floor().to_integer();
        }
        let guess = self.to_f64().floor();
        let mut n = if guess.is_finite() {
            BigInt::from(guess as i64)
        } else {
            // far outside f64 range: fall back to the rational part
            self.rat.floor().to_integer()
        };
        loop {
            let lo = Scalar::from_bigint(n.clone());
            if lo > *self {
                n -= 1;
                continue;
            }
            let hi = Scalar::from_bigint(&n + 1);
            if hi <= *self {
                n += 1;
                continue;
            }
            return n;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("floor exceeds i64 range")
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Self::canonical(&self.rat * &k, &self.surd * &k, self.disc)
    }

    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        let k = BigRational::from_integer(BigInt::from(k));
        Self::canonical(&self.rat / &k, &self.surd / &k, self.disc)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Scalar::one(), |acc, _| &acc * self)
    }

    /// Decimal rendering truncated toward zero at `digits` fractional places.
    pub fn to_decimal(&self, digits: u32) -> String {
        if self.is_negative() {
            let body = (-self).to_decimal(digits);
            return if body.chars().all(|c| c == '0' || c == '.') { body } else { format!("-{body}") };
        }
        let scale = BigInt::from(10u32).pow(digits);
        let n = (self * &Scalar::from_bigint(scale.clone())).floor();
        let (int, frac) = n.div_rem(&scale);
        if digits == 0 {
            return int.to_string();
        }
        let frac = frac.to_string();
        let pad = "0".repeat(digits as usize - frac.len());
        format!("{int}.{pad}{frac}")
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Panics when the operands carry distinct non-zero discriminants.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparison of incompatible scalars")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("arithmetic on incompatible scalars")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { rat: -&self.rat, surd: -&self.surd, disc: self.disc }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disc == 0 {
            return f.write_str(&fmt_rational(&self.rat));
        }
        let mag = self.surd.abs();
        let surd_term = if mag.is_one() {
            format!("sqrt({})", self.disc)
        } else {
            format!("{}*sqrt({})", fmt_rational(&mag), self.disc)
        };
        match (self.rat.is_zero(), self.surd.is_negative()) {
            (true, false) => f.write_str(&surd_term),
            (true, true) => write!(f, "-{surd_term}"),
            (false, false) => write!(f, "{} + {surd_term}", fmt_rational(&self.rat)),
            (false, true) => write!(f, "{} - {surd_term}", fmt_rational(&self.rat)),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

struct LiteralParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl LiteralParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn sqrt(&mut self) -> Result<Option<u64>, String> {
        if !self.eat_str("sqrt(") {
            return Ok(None);
        }
        let d = self.integer().ok_or("expected integer inside sqrt(...)")?;
        if !self.eat(b')') {
            return Err("missing ')'".into());
        }
        d.to_u64().map(Some).ok_or_else(|| "sqrt argument out of range".into())
    }

    // term := coeff ['*' sqrt] | sqrt ['*' coeff]
    // coeff := int ['/' int]
    fn term(&mut self) -> Result<(BigRational, u64), String> {
        if let Some(d) = self.sqrt()? {
            let coeff = if self.eat(b'*') {
                self.coeff()?
            } else {
                BigRational::one()
            };
            return Ok((coeff, d));
        }
        let coeff = self.coeff()?;
        if self.eat(b'*') {
            let d = self.sqrt()?.ok_or("expected sqrt(d) after '*'")?;
            return Ok((coeff, d));
        }
        Ok((coeff, 0))
    }

    fn coeff(&mut self) -> Result<BigRational, String> {
        let num = self.integer().ok_or("expected integer")?;
        if self.eat(b'/') {
            let den = self.integer().ok_or("expected denominator")?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            return Ok(BigRational::new(num, den));
        }
        Ok(BigRational::from_integer(num))
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// Accepts `p`, `p/q`, `sqrt(d)`, `r/s*sqrt(d)` and signed sums of these,
    /// ignoring whitespace, e.g. `"1/2 - 3*sqrt(2)"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let fail = |reason: String| ScalarError::Parse { literal: s.to_string(), reason };
        if compact.is_empty() {
            return Err(fail("empty literal".into()));
        }
        let mut p = LiteralParser { src: compact.as_bytes(), pos: 0 };
        let mut acc = Scalar::zero();
        let mut first = true;
        while p.pos < p.src.len() {
            let negative = if p.eat(b'-') {
                true
            } else if p.eat(b'+') || first {
                false
            } else {
                return Err(fail(format!("unexpected character at offset {}", p.pos)));
            };
            first = false;
            let (coeff, d) = p.term().map_err(fail)?;
            let coeff = if negative { -coeff } else { coeff };
            let term = if d == 0 {
                Scalar::from_rational(coeff)
            } else {
                Scalar::canonical(BigRational::zero(), coeff, d)
            };
            acc = acc.try_add(&term).map_err(|e| fail(e.to_string()))?;
        }
        Ok(acc)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
