//! Exact rationals in canonical form, short-fraction predicates and
//! binary truncation.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

pub use rug::Integer;
use rug::ops::DivRounding;
use rug::Rational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("word size must be at least 2 bits, got {0}")]
    BadWordSize(u32),
}

/// Machine word size `B` in bits. Short fractions are measured against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WordBudget {
    bits: u32,
}

impl WordBudget {
    pub const DEFAULT_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self, RatError> {
        if bits < 2 {
            return Err(RatError::BadWordSize(bits));
        }
        Ok(WordBudget { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Smallest budget under which every value is 1-short.
    pub fn fitting<'a, I>(values: I) -> Self
    where
        I: IntoIterator<Item = &'a BigRational>,
    {
        let mut need = 0u32;
        for q in values {
            need = need.max(q.numer().significant_bits()).max(q.denom().significant_bits());
        }
        WordBudget { bits: (need + 1).max(2) }
    }

    /// Smallest `k >= 1` with `q` k-short.
    pub fn shortness(&self, q: &BigRational) -> u32 {
        let need = q.numer().significant_bits().max(q.denom().significant_bits());
        // need <= k*B - 1
        (need + 1).div_ceil(self.bits).max(1)
    }

    pub fn is_short(&self, q: &BigRational, k: u32) -> bool {
        is_k_short(q, k, *self)
    }
}

impl Default for WordBudget {
    fn default() -> Self {
        WordBudget { bits: Self::DEFAULT_BITS }
    }
}

/// Arbitrary-precision rational, always reduced with a positive denominator.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigRational(Rational);

impl BigRational {
    pub fn new(num: impl Into<Integer>, den: impl Into<Integer>) -> Result<Self, RatError> {
        let den = den.into();
        if den == 0 {
            return Err(RatError::DivisionByZero);
        }
        Ok(BigRational(Rational::from((num.into(), den))))
    }

    pub fn from_integer(num: impl Into<Integer>) -> Self {
        BigRational(Rational::from(num.into()))
    }

    pub fn zero() -> Self {
        BigRational(Rational::new())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// `num / 2^shift`.
    pub fn dyadic(num: impl Into<Integer>, shift: u32) -> Self {
        let den = Integer::from(1) << shift;
        BigRational(Rational::from((num.into(), den)))
    }

    pub fn from_rug(r: Rational) -> Self {
        BigRational(r)
    }

    pub fn as_rug(&self) -> &Rational {
        &self.0
    }

    pub fn into_rug(self) -> Rational {
        self.0
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == Ordering::Less
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn signum(&self) -> Ordering {
        self.0.cmp0()
    }

    pub fn abs(&self) -> Self {
        BigRational(Rational::from(self.0.abs_ref()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, RatError> {
        if other.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        Ok(BigRational(Rational::from(&self.0 / &other.0)))
    }

    pub fn recip(&self) -> Result<Self, RatError> {
        Self::one().checked_div(self)
    }

    /// Multiply by `2^shift`.
    pub fn shl(&self, shift: u32) -> Self {
        BigRational(Rational::from(&self.0 << shift))
    }

    /// Divide by `2^shift`.
    pub fn shr(&self, shift: u32) -> Self {
        BigRational(Rational::from(&self.0 >> shift))
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> Integer {
        Integer::from(self.numer().div_floor(self.denom()))
    }

    /// Total bit size of numerator and denominator.
    pub fn bit_size(&self) -> u64 {
        self.numer().significant_bits() as u64 + self.denom().significant_bits() as u64
    }

    /// Decimal rendering truncated toward zero after `digits` places.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = Integer::from(Integer::u_pow_u(10, digits));
        let scaled = Integer::from(self.numer().abs_ref()) * &scale;
        let q = scaled.div_floor(self.denom().clone());
        let sign = if self.is_negative() && q != 0 { "-" } else { "" };
        let (int, frac) = q.div_rem_floor(scale);
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits as usize)
        }
    }
}

/// `|num| < 2^(kB-1)` and `den < 2^(kB-1)`.
pub fn is_k_short(q: &BigRational, k: u32, budget: WordBudget) -> bool {
    let lim = (k as u64) * (budget.bits() as u64) - 1;
    (q.numer().significant_bits() as u64) <= lim && (q.denom().significant_bits() as u64) <= lim
}

/// Sum in a balanced binary tree so intermediate sizes stay proportional
/// to the operands.
pub fn sum_balanced<I>(values: I) -> BigRational
where
    I: IntoIterator<Item = BigRational>,
{
    let mut layer: Vec<BigRational> = values.into_iter().collect();
    if layer.is_empty() {
        return BigRational::zero();
    }
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        let mut it = layer.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        layer = next;
    }
    layer.pop().unwrap()
}

/// Keep `j` binary digits after the point, truncating the magnitude
/// toward zero: `sign(q) * floor(|q| * 2^j) / 2^j`.
pub fn truncate_binary(q: &BigRational, j: u32) -> BigRational {
    BigRational::dyadic(truncated_numerator(q, j), j)
}

/// Numerator of `truncate_binary(q, j)` over `2^j`.
pub fn truncated_numerator(q: &BigRational, j: u32) -> Integer {
    let mag = Integer::from(q.numer().abs_ref()) << j;
    let t = mag.div_floor(q.denom().clone());
    if q.is_negative() {
        -t
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(a: &BigRational, b: &BigRational, op: ArithOp) -> Result<BigRational, RatError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

impl fmt::Display for BigRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for BigRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, whole: &str) -> Result<Integer, RatError> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|c| c.is_ascii_digit()) {
        return Err(RatError::Malformed(whole.to_string()));
    }
    let v = Integer::from_str_radix(body, 10).map_err(|_| RatError::Malformed(whole.to_string()))?;
    Ok(if s.starts_with('-') { -v } else { v })
}

impl FromStr for BigRational {
    type Err = RatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.split_once('/') {
            None => Ok(Self::from_integer(parse_int(t, s)?)),
            Some((n, d)) => {
                let num = parse_int(n, s)?;
                if d.starts_with(['+', '-']) {
                    return Err(RatError::Malformed(s.to_string()));
                }
                let den = parse_int(d, s)?;
                Self::new(num, den)
            }
        }
    }
}

macro_rules! bin_op {
    ($tr:ident, $m:ident) => {
        impl $tr<&BigRational> for &BigRational {
            type Output = BigRational;
            fn $m(self, rhs: &BigRational) -> BigRational {
                BigRational(Rational::from((&self.0).$m(&rhs.0)))
            }
        }
        impl $tr<BigRational> for BigRational {
            type Output = BigRational;
            fn $m(self, rhs: BigRational) -> BigRational {
                BigRational(self.0.$m(rhs.0))
            }
        }
        impl $tr<&BigRational> for BigRational {
            type Output = BigRational;
            fn $m(self, rhs: &BigRational) -> BigRational {
                BigRational(self.0.$m(&rhs.0))
            }
        }
        impl $tr<BigRational> for &BigRational {
            type Output = BigRational;
            fn $m(self, rhs: BigRational) -> BigRational {
                BigRational(Rational::from((&self.0).$m(&rhs.0)))
            }
        }
    };
}

bin_op!(Add, add);
bin_op!(Sub, sub);
bin_op!(Mul, mul);

impl AddAssign<&BigRational> for BigRational {
    fn add_assign(&mut self, rhs: &BigRational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&BigRational> for BigRational {
    fn sub_assign(&mut self, rhs: &BigRational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for BigRational {
    type Output = BigRational;
    fn neg(self) -> BigRational {
        BigRational(-self.0)
    }
}

impl Neg for &BigRational {
    type Output = BigRational;
    fn neg(self) -> BigRational {
        BigRational(Rational::from(-&self.0))
    }
}

impl Sum for BigRational {
    fn sum<I: Iterator<Item = BigRational>>(iter: I) -> Self {
        sum_balanced(iter)
    }
}

impl From<i64> for BigRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<Integer> for BigRational {
    fn from(v: Integer) -> Self {
        Self::from_integer(v)
    }
}

/// Shorthand for tests and examples: `rat(n, d)` panics on `d == 0`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num, den).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(rat(6, -4).to_string(), "-3/2");
        assert_eq!(rat(0, 5), BigRational::zero());
        assert_eq!(*rat(0, 5).denom(), 1);
        assert_eq!(rat(10, 5).to_string(), "2");
        assert_eq!(BigRational::new(1, 0), Err(RatError::DivisionByZero));
    }

    #[test]
    fn parse_and_print() {
        for s in ["0", "-7", "3/4", "-1/3", "123456789012345678901234567891/2"] {
            let q: BigRational = s.parse().unwrap();
            assert_eq!(q.to_string(), s);
        }
        assert_eq!("+4/6".parse::<BigRational>().unwrap(), rat(2, 3));
        assert_eq!(" 2/-3 ".parse::<BigRational>().is_err(), true);
        assert!("1/0".parse::<BigRational>().is_err());
        assert!("a/3".parse::<BigRational>().is_err());
        assert!("".parse::<BigRational>().is_err());
    }

    #[test]
    fn k_short_boundaries() {
        let b = WordBudget::new(8).unwrap();
        assert!(is_k_short(&rat(127, 127), 1, b));
        assert!(!is_k_short(&rat(128, 1), 1, b));
        assert!(!is_k_short(&rat(1, 128), 1, b));
        assert!(is_k_short(&rat(-127, 3), 1, b));
        assert!(is_k_short(&rat(128, 1), 2, b));
        assert_eq!(b.shortness(&rat(127, 1)), 1);
        assert_eq!(b.shortness(&rat(128, 1)), 2);
        assert_eq!(WordBudget::fitting([&rat(127, 5)]).bits(), 8);
        assert!(WordBudget::new(1).is_err());
    }

    #[test]
    fn truncation() {
        assert_eq!(truncate_binary(&rat(1, 3), 2), rat(1, 4));
        assert_eq!(truncate_binary(&rat(-1, 3), 2), rat(-1, 4));
        assert_eq!(truncate_binary(&rat(7, 2), 0), rat(3, 1));
        assert_eq!(truncate_binary(&rat(-7, 2), 0), rat(-3, 1));
        assert_eq!(truncate_binary(&rat(5, 8), 3), rat(5, 8));
    }

    #[test]
    fn balanced_sum_matches_fold() {
        let xs: Vec<BigRational> = (1..40).map(|i| rat(i, i + 1)).collect();
        let fold = xs.iter().fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(sum_balanced(xs), fold);
        assert_eq!(sum_balanced(Vec::new()), BigRational::zero());
    }

    #[test]
    fn decimal() {
        assert_eq!(rat(1, 3).to_decimal(4), "0.3333");
        assert_eq!(rat(-7, 2).to_decimal(2), "-3.50");
        assert_eq!(rat(-1, 3).to_decimal(0), "0");
    }
}
