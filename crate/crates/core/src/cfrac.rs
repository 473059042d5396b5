//! Continued fractions, best short-fraction brackets and comparisons
//! made through them.

use std::cmp::Ordering;

use rug::ops::DivRounding;
use rug::Rational;
use thiserror::Error;

use crate::ratnum::{BigRational, Integer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfracError {
    #[error("convergent index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("bit budget must be positive")]
    ZeroBits,
    #[error("shift needs b' < b, got b'={shift_bits} and b={bits}")]
    ShiftTooWide { shift_bits: u32, bits: u32 },
    #[error("offset denominator does not fit in {0} bits")]
    OffsetTooLong(u32),
    #[error("comparand denominator does not fit in {0} bits")]
    BetaTooLong(u32),
    #[error("similarity precision {ell} is below 2*{bits}+2")]
    PrecisionTooLow { bits: u32, ell: u32 },
    #[error("approximation pair is not a bracket")]
    NotABracket,
}

/// `[a_0; a_1, ..., a_N]` with `a_i >= 1` for `i >= 1` and `a_N >= 2` when `N >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    quotients: Vec<Integer>,
}

impl ContinuedFraction {
    pub fn quotients(&self) -> &[Integer] {
        &self.quotients
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `(p_i, q_i)` with `p_i / q_i = [a_0; ...; a_i]`, via a balanced
    /// product of the 2x2 quotient matrices.
    pub fn convergent(&self, i: usize) -> Result<(Integer, Integer), CfracError> {
        if i >= self.quotients.len() {
            return Err(CfracError::IndexOutOfRange { index: i, len: self.quotients.len() });
        }
        let m = mat_product(&self.quotients[..=i]);
        Ok((m[0].clone(), m[2].clone()))
    }

    pub fn evaluate(&self) -> BigRational {
        let (p, q) = self.convergent(self.quotients.len() - 1).expect("nonempty");
        BigRational::new(p, q).expect("positive denominator")
    }
}

type Mat = [Integer; 4];

fn mat_product(qs: &[Integer]) -> Mat {
    if qs.len() == 1 {
        return [qs[0].clone(), Integer::from(1), Integer::from(1), Integer::new()];
    }
    let mid = qs.len() / 2;
    let l = mat_product(&qs[..mid]);
    let r = mat_product(&qs[mid..]);
    [
        Integer::from(&l[0] * &r[0]) + Integer::from(&l[1] * &r[2]),
        Integer::from(&l[0] * &r[1]) + Integer::from(&l[1] * &r[3]),
        Integer::from(&l[2] * &r[0]) + Integer::from(&l[3] * &r[2]),
        Integer::from(&l[2] * &r[1]) + Integer::from(&l[3] * &r[3]),
    ]
}

pub fn continued_fraction(x: &BigRational) -> ContinuedFraction {
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut quotients = Vec::new();
    loop {
        let (a, r) = num.div_rem_floor(den.clone());
        quotients.push(a);
        if r == 0 {
            break;
        }
        num = den;
        den = r;
    }
    ContinuedFraction { quotients }
}

/// Sorted bracket `lo <= x <= hi` of fractions with denominator below
/// `2^bits` and nothing of that kind strictly between. `lo == hi == x`
/// exactly when `x` itself has such a denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxPair {
    pub lo: BigRational,
    pub hi: BigRational,
    pub bits: u32,
}

impl ApproxPair {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

fn frac(p: Integer, q: Integer) -> BigRational {
    BigRational::from_rug(Rational::from((p, q)))
}

pub fn best_approx(x: &BigRational, bits: u32) -> Result<ApproxPair, CfracError> {
    best_approx_ratio(x.numer(), x.denom(), bits)
}

/// Same as [`best_approx`] for `num / den` with `den > 0`, not necessarily
/// reduced. Quotients are produced lazily and the expansion stops at the
/// first convergent whose denominator reaches `2^bits`.
pub fn best_approx_ratio(num: &Integer, den: &Integer, bits: u32) -> Result<ApproxPair, CfracError> {
    if bits == 0 {
        return Err(CfracError::ZeroBits);
    }
    debug_assert!(*den > 0);
    let limit = Integer::from(1) << bits;
    let (mut n, mut d) = (num.clone(), den.clone());
    let (mut p1, mut q1) = (Integer::from(1), Integer::new());
    let (mut p2, mut q2) = (Integer::new(), Integer::from(1));
    loop {
        let (a, r) = n.div_rem_floor(d.clone());
        let qj = Integer::from(&a * &q1) + &q2;
        if qj >= limit {
            // t q_l + q_{l-1} < 2^bits with t maximal
            let t = (Integer::from(&limit - 1u32) - &q2).div_floor(q1.clone());
            let sp = Integer::from(&t * &p1) + &p2;
            let sq = t * &q1 + &q2;
            let c = frac(p1, q1);
            let s = frac(sp, sq);
            let (lo, hi) = if c <= s { (c, s) } else { (s, c) };
            return Ok(ApproxPair { lo, hi, bits });
        }
        let pj = a * &p1 + &p2;
        if r == 0 {
            let v = frac(pj, qj);
            return Ok(ApproxPair { lo: v.clone(), hi: v, bits });
        }
        p2 = std::mem::replace(&mut p1, pj);
        q2 = std::mem::replace(&mut q1, qj);
        n = d;
        d = r;
    }
}

fn den_fits(q: &BigRational, bits: u32) -> bool {
    q.denom().significant_bits() <= bits
}

/// Bracket for `alpha + offset` at `bits - shift_bits` bits, from a bracket
/// for `alpha` at `bits` and an offset with denominator below `2^shift_bits`.
pub fn best_approx_shift(
    ap: &ApproxPair,
    offset: &BigRational,
    shift_bits: u32,
) -> Result<ApproxPair, CfracError> {
    if shift_bits >= ap.bits {
        return Err(CfracError::ShiftTooWide { shift_bits, bits: ap.bits });
    }
    if !den_fits(offset, shift_bits) {
        return Err(CfracError::OffsetTooLong(shift_bits));
    }
    let nb = ap.bits - shift_bits;
    let lo = best_approx(&(&ap.lo + offset), nb)?.lo;
    let hi = best_approx(&(&ap.hi + offset), nb)?.hi;
    Ok(ApproxPair { lo, hi, bits: nb })
}

/// Orders `alpha` against `beta` using only the bracket of `alpha`.
/// Requires `beta` to have a denominator below `2^ap.bits`.
pub fn compare_via_approx(ap: &ApproxPair, beta: &BigRational) -> Result<Ordering, CfracError> {
    if !den_fits(beta, ap.bits) {
        return Err(CfracError::BetaTooLong(ap.bits));
    }
    let open = ap.lo < ap.hi;
    if *beta < ap.lo || (open && *beta == ap.lo) {
        Ok(Ordering::Greater)
    } else if *beta > ap.hi || (open && *beta == ap.hi) {
        Ok(Ordering::Less)
    } else if !open {
        Ok(Ordering::Equal)
    } else {
        Err(CfracError::NotABracket)
    }
}

/// The unique fraction with denominator below `2^bits` within
/// `2^-(ell-1)` of `x`, if there is one.
pub fn similarity_fraction(x: &BigRational, bits: u32, ell: u32) -> Result<Option<BigRational>, CfracError> {
    similarity_fraction_ratio(x.numer(), x.denom(), bits, ell)
}

/// [`similarity_fraction`] for `num / den`, `den > 0`.
pub fn similarity_fraction_ratio(
    num: &Integer,
    den: &Integer,
    bits: u32,
    ell: u32,
) -> Result<Option<BigRational>, CfracError> {
    if (ell as u64) < 2 * bits as u64 + 2 {
        return Err(CfracError::PrecisionTooLow { bits, ell });
    }
    let ap = best_approx_ratio(num, den, bits)?;
    // |num/den - p/q| scaled by den*q
    let gap = |f: &BigRational| -> Integer {
        (Integer::from(num * f.denom()) - Integer::from(f.numer() * den)).abs()
    };
    let f = if ap.is_exact() {
        ap.lo
    } else {
        let gl = gap(&ap.lo) * ap.hi.denom();
        let gh = gap(&ap.hi) * ap.lo.denom();
        if gl <= gh { ap.lo } else { ap.hi }
    };
    let lhs = gap(&f) << (ell - 1);
    let rhs = Integer::from(den * f.denom());
    Ok(if lhs <= rhs { Some(f) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratnum::rat;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&a| Integer::from(a)).collect()
    }

    #[test]
    fn expansions() {
        assert_eq!(continued_fraction(&rat(17, 14)).quotients(), ints(&[1, 4, 1, 2]).as_slice());
        assert_eq!(continued_fraction(&rat(5, 7)).quotients(), ints(&[0, 1, 2, 2]).as_slice());
        assert_eq!(continued_fraction(&rat(3, 1)).quotients(), ints(&[3]).as_slice());
        assert_eq!(continued_fraction(&rat(-1, 3)).quotients(), ints(&[-1, 1, 2]).as_slice());
    }

    #[test]
    fn convergents() {
        let cf = continued_fraction(&rat(17, 14));
        let got: Vec<_> = (0..4).map(|i| cf.convergent(i).unwrap()).collect();
        let want = [(1, 1), (5, 4), (6, 5), (17, 14)];
        for (g, w) in got.iter().zip(want) {
            assert_eq!((g.0.to_i64().unwrap(), g.1.to_i64().unwrap()), w);
        }
        assert_eq!(cf.convergent(4), Err(CfracError::IndexOutOfRange { index: 4, len: 4 }));
        assert_eq!(cf.evaluate(), rat(17, 14));
    }

    #[test]
    fn brackets() {
        let ap = best_approx(&rat(5, 7), 2).unwrap();
        assert_eq!((ap.lo, ap.hi), (rat(2, 3), rat(1, 1)));
        let ap = best_approx(&rat(17, 14), 3).unwrap();
        assert_eq!((ap.lo, ap.hi), (rat(6, 5), rat(5, 4)));
        let ap = best_approx(&rat(2, 3), 2).unwrap();
        assert!(ap.is_exact());
        assert_eq!(best_approx(&rat(1, 3), 0), Err(CfracError::ZeroBits));
    }

    #[test]
    fn shifted_brackets() {
        let ap = best_approx(&rat(5, 7), 4).unwrap();
        let sh = best_approx_shift(&ap, &rat(1, 2), 2).unwrap();
        assert_eq!(sh, best_approx(&rat(17, 14), 2).unwrap());
        assert!(best_approx_shift(&ap, &rat(1, 5), 2).is_err());
        assert!(best_approx_shift(&ap, &rat(1, 2), 4).is_err());
    }

    #[test]
    fn compare_through_bracket() {
        let ap = best_approx(&rat(5, 7), 2).unwrap();
        assert_eq!(compare_via_approx(&ap, &rat(2, 3)), Ok(Ordering::Greater));
        assert_eq!(compare_via_approx(&ap, &rat(1, 1)), Ok(Ordering::Less));
        assert_eq!(compare_via_approx(&ap, &rat(1, 2)), Ok(Ordering::Greater));
        assert_eq!(compare_via_approx(&ap, &rat(3, 2)), Ok(Ordering::Less));
        let ex = best_approx(&rat(2, 3), 2).unwrap();
        assert_eq!(compare_via_approx(&ex, &rat(2, 3)), Ok(Ordering::Equal));
        assert_eq!(compare_via_approx(&ex, &rat(1, 5)), Err(CfracError::BetaTooLong(2)));
    }

    #[test]
    fn similarity() {
        let eps = BigRational::dyadic(1, 25);
        assert_eq!(similarity_fraction(&(rat(1, 3) + &eps), 2, 20).unwrap(), Some(rat(1, 3)));
        assert_eq!(similarity_fraction(&rat(5, 6), 2, 20).unwrap(), None);
        assert!(similarity_fraction(&rat(5, 6), 2, 5).is_err());
    }
}
