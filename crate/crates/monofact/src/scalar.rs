//! Exact arithmetic for positive reals represented over a basis of square
//! roots of distinct squarefree integers.
//!
//! A [`RadicalScalar`] is a finite map `radicand -> rational coefficient`
//! denoting `sum q_d * sqrt(d)`, with radicand 1 holding the rational part.
//! Square roots of distinct squarefree integers are linearly independent over
//! the rationals, so the zero test is exactly "the map is empty", and the sign
//! of a nonzero value is decidable by interval refinement at doubling
//! precision.
//!
//! [`DecimalScalar`] is the secondary mode: a plain rational read from a
//! decimal literal plus a declared comparison tolerance. Sign tests landing
//! within the tolerance fail with [`Error::IndependenceViolation`] instead of
//! guessing.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sign of an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn of_rational(q: &BigRational) -> Sign {
        match q.numer().sign() {
            IntSign::Minus => Sign::Minus,
            IntSign::NoSign => Sign::Zero,
            IntSign::Plus => Sign::Plus,
        }
    }
}

/// Scalar interface the triple calculus is generic over.
///
/// Implementations must be exact enough to answer every strict sign test the
/// algorithms pose, or refuse with [`Error::IndependenceViolation`]. All
/// values are immutable and freely transferable between threads.
pub trait Valuation: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn is_zero_value(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale_int(&self, c: &BigInt) -> Self;

    /// Exact (or tolerance-refusing) sign.
    fn try_sign(&self) -> Result<Sign>;

    fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(match self.sub(other).try_sign()? {
            Sign::Minus => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        })
    }

    /// `sum coeffs[t] * scalars[t]` with canonical normalization.
    fn combine(coeffs: &[BigInt], scalars: &[Self]) -> Result<Self> {
        if coeffs.len() != scalars.len() {
            return Err(Error::LengthMismatch {
                coeffs: coeffs.len(),
                scalars: scalars.len(),
            });
        }
        let mut acc = Self::zero();
        for (c, s) in coeffs.iter().zip(scalars) {
            if !c.is_zero() {
                acc = acc.add(&s.scale_int(c));
            }
        }
        Ok(acc)
    }

    /// `floor(self / divisor)` for `self >= 0`, `divisor > 0`.
    fn floor_quotient(&self, divisor: &Self) -> Result<BigUint>;
}

// ---------------------------------------------------------------------------
// RadicalScalar
// ---------------------------------------------------------------------------

/// Exact real as a rational combination of square roots of distinct
/// squarefree positive integers. Radicand 1 is the rational part. The empty
/// map is canonically zero; stored coefficients are never zero.
#[derive(Clone, PartialEq, Eq)]
pub struct RadicalScalar {
    terms: BTreeMap<u64, BigRational>,
}

impl RadicalScalar {
    pub fn new_zero() -> Self {
        RadicalScalar {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut s = Self::new_zero();
        s.add_term(1, q);
        s
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `coeff * sqrt(radicand)`. Rejects radicands that are zero or carry a
    /// square factor; reducing them would silently change the basis.
    pub fn radical(coeff: BigRational, radicand: u64) -> Result<Self> {
        if radicand == 0 {
            return Err(Error::InvalidRadicand);
        }
        if !is_squarefree(radicand) {
            return Err(Error::NotSquarefree(radicand));
        }
        let mut s = Self::new_zero();
        s.add_term(radicand, coeff);
        Ok(s)
    }

    /// `sqrt(d)` for squarefree `d`.
    pub fn sqrt(d: u64) -> Result<Self> {
        Self::radical(BigRational::one(), d)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(d, q)| (*d, q))
    }

    fn add_term(&mut self, d: u64, q: BigRational) {
        if q.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(d) {
            Entry::Vacant(e) => {
                e.insert(q);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &q;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(d, q)| (*d, -q.clone())).collect();
        RadicalScalar { terms }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::new_zero();
        }
        let terms = self.terms.iter().map(|(d, q)| (*d, q * c)).collect();
        RadicalScalar { terms }
    }

    /// Dyadic enclosure `lo <= self <= hi` at `prec` fractional bits.
    pub fn bounds(&self, prec: u32) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (&d, q) in &self.terms {
            if d == 1 {
                lo += q;
                hi += q;
                continue;
            }
            let s = dyadic_sqrt_floor(d, prec);
            let denom = BigInt::one() << prec;
            let r_lo = BigRational::new(BigInt::from(s.clone()), denom.clone());
            let r_hi = BigRational::new(BigInt::from(s + 1u32), denom);
            if q.is_positive() {
                lo += q * &r_lo;
                hi += q * &r_hi;
            } else {
                lo += q * &r_hi;
                hi += q * &r_lo;
            }
        }
        (lo, hi)
    }

    /// Exact sign. Fast paths cover up to two terms; otherwise interval
    /// refinement starting at 64 bits and doubling per round. Nonzero values
    /// are bounded away from zero, so refinement terminates.
    pub fn sign(&self) -> Sign {
        match self.terms.len() {
            0 => Sign::Zero,
            1 => {
                let q = self.terms.values().next().unwrap();
                Sign::of_rational(q)
            }
            2 => {
                let mut it = self.terms.iter();
                let (&d1, q1) = it.next().unwrap();
                let (&d2, q2) = it.next().unwrap();
                let s1 = Sign::of_rational(q1);
                let s2 = Sign::of_rational(q2);
                if s1 == s2 {
                    return s1;
                }
                // Opposite signs: compare q1^2*d1 against q2^2*d2. Equality is
                // impossible for distinct squarefree radicands.
                let m1 = q1 * q1 * BigRational::from_integer(BigInt::from(d1));
                let m2 = q2 * q2 * BigRational::from_integer(BigInt::from(d2));
                match m1.cmp(&m2) {
                    Ordering::Greater => s1,
                    Ordering::Less => s2,
                    Ordering::Equal => unreachable!("distinct squarefree radicands"),
                }
            }
            _ => {
                let mut prec = 64u32;
                loop {
                    let (lo, hi) = self.bounds(prec);
                    if lo.is_positive() {
                        return Sign::Plus;
                    }
                    if hi.is_negative() {
                        return Sign::Minus;
                    }
                    prec *= 2;
                }
            }
        }
    }

    pub fn compare(&self, other: &Self) -> Ordering {
        match self.sub_ref(other).sign() {
            Sign::Minus => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&d, q) in &other.terms {
            out.add_term(d, q.clone());
        }
        out
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&d, q) in &other.terms {
            out.add_term(d, -q.clone());
        }
        out
    }
}

impl Valuation for RadicalScalar {
    fn zero() -> Self {
        Self::new_zero()
    }

    fn is_zero_value(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        self.add_ref(other)
    }

    fn sub(&self, other: &Self) -> Self {
        self.sub_ref(other)
    }

    fn scale_int(&self, c: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    fn try_sign(&self) -> Result<Sign> {
        Ok(self.sign())
    }

    fn floor_quotient(&self, divisor: &Self) -> Result<BigUint> {
        if divisor.sign() != Sign::Plus {
            return Err(Error::NonPositiveDivisor);
        }
        match self.sign() {
            Sign::Minus => return Err(Error::NegativeDividend),
            Sign::Zero => return Ok(BigUint::zero()),
            Sign::Plus => {}
        }
        let mut prec = 64u32;
        loop {
            let (la, ha) = self.bounds(prec);
            let (lb, hb) = divisor.bounds(prec);
            if !lb.is_positive() {
                prec *= 2;
                continue;
            }
            let qlo = {
                let q = (&la / &hb).floor().to_integer();
                if q.is_negative() {
                    BigInt::zero()
                } else {
                    q
                }
            };
            let qhi = (&ha / &lb).floor().to_integer();
            if qlo == qhi {
                return Ok(qlo.to_biguint().unwrap());
            }
            if &qhi - &qlo == BigInt::one() {
                // Decide the exact boundary: a - qhi*b has a decidable sign.
                let rem = self.sub_ref(&divisor.scale_int(&qhi));
                return Ok(match rem.sign() {
                    Sign::Minus => qlo.to_biguint().unwrap(),
                    _ => qhi.to_biguint().unwrap(),
                });
            }
            prec *= 2;
        }
    }
}

impl num_traits::Zero for RadicalScalar {
    fn zero() -> Self {
        Self::new_zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl std::ops::Add for RadicalScalar {
    type Output = RadicalScalar;
    fn add(self, rhs: RadicalScalar) -> RadicalScalar {
        self.add_ref(&rhs)
    }
}

impl std::ops::Sub for RadicalScalar {
    type Output = RadicalScalar;
    fn sub(self, rhs: RadicalScalar) -> RadicalScalar {
        self.sub_ref(&rhs)
    }
}

impl std::ops::Neg for RadicalScalar {
    type Output = RadicalScalar;
    fn neg(self) -> RadicalScalar {
        RadicalScalar::neg(&self)
    }
}

impl fmt::Debug for RadicalScalar {
    // Display form; the raw term map is noise in test failures.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&d, q) in &self.terms {
            let neg = q.is_negative();
            let mag = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if d == 1 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "sqrt({d})")?;
            } else {
                write!(f, "{mag}*sqrt({d})")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// DecimalScalar
// ---------------------------------------------------------------------------

/// Rational value from a decimal literal, compared against a declared
/// tolerance. The tolerance is the instance-wide epsilon, not a propagated
/// error bound: combinations keep the largest epsilon of their inputs.
#[derive(Clone, PartialEq, Eq)]
pub struct DecimalScalar {
    value: BigRational,
    eps: BigRational,
}

impl DecimalScalar {
    pub fn new(value: BigRational, eps: BigRational) -> Self {
        DecimalScalar { value, eps }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn eps(&self) -> &BigRational {
        &self.eps
    }
}

impl Valuation for DecimalScalar {
    fn zero() -> Self {
        DecimalScalar {
            value: BigRational::zero(),
            eps: BigRational::zero(),
        }
    }

    fn is_zero_value(&self) -> bool {
        self.value.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        DecimalScalar {
            value: &self.value + &other.value,
            eps: self.eps.clone().max(other.eps.clone()),
        }
    }

    fn sub(&self, other: &Self) -> Self {
        DecimalScalar {
            value: &self.value - &other.value,
            eps: self.eps.clone().max(other.eps.clone()),
        }
    }

    fn scale_int(&self, c: &BigInt) -> Self {
        DecimalScalar {
            value: &self.value * BigRational::from_integer(c.clone()),
            eps: self.eps.clone(),
        }
    }

    fn try_sign(&self) -> Result<Sign> {
        if self.value.is_zero() && self.eps.is_zero() {
            return Ok(Sign::Zero);
        }
        if self.value.abs() <= self.eps {
            return Err(Error::IndependenceViolation(format!(
                "|{}| <= {}",
                self.value, self.eps
            )));
        }
        Ok(Sign::of_rational(&self.value))
    }

    fn floor_quotient(&self, divisor: &Self) -> Result<BigUint> {
        match divisor.try_sign()? {
            Sign::Plus => {}
            _ => return Err(Error::NonPositiveDivisor),
        }
        if self.value.is_negative() {
            return Err(Error::NegativeDividend);
        }
        let q = (&self.value / &divisor.value).floor().to_integer();
        // The quotient is only trusted when the remainder test is decidable.
        let rem = self.sub(&divisor.scale_int(&q));
        match rem.try_sign()? {
            Sign::Minus => Err(Error::IndependenceViolation(
                "floor quotient remainder is negative beyond tolerance".into(),
            )),
            _ => Ok(q.to_biguint().unwrap()),
        }
    }
}

impl fmt::Debug for DecimalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DecimalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// ---------------------------------------------------------------------------
// Free-function surface mirroring the operation names used elsewhere.
// ---------------------------------------------------------------------------

pub fn combine<S: Valuation>(coeffs: &[BigInt], scalars: &[S]) -> Result<S> {
    S::combine(coeffs, scalars)
}

pub fn sign(x: &RadicalScalar) -> Sign {
    x.sign()
}

pub fn compare(a: &RadicalScalar, b: &RadicalScalar) -> Ordering {
    a.compare(b)
}

pub fn floor_quotient<S: Valuation>(a: &S, b: &S) -> Result<BigUint> {
    a.floor_quotient(b)
}

// ---------------------------------------------------------------------------
// Number-theory and parsing helpers
// ---------------------------------------------------------------------------

/// Squarefree test by trial division up to the cube root; the remaining
/// cofactor has at most two prime factors, so it carries a square factor
/// exactly when it is a perfect square.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p: u64 = 2;
    while (p as u128) * (p as u128) * (p as u128) <= m as u128 {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    if m > 1 {
        let r = m.isqrt();
        if r * r == m {
            return false;
        }
    }
    true
}

fn dyadic_sqrt_floor(d: u64, prec: u32) -> BigUint {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), BigUint>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(d, prec)) {
        return v.clone();
    }
    let v = (BigUint::from(d) << (2 * prec)).sqrt();
    cache.lock().unwrap().insert((d, prec), v.clone());
    v
}

/// Parse `p` or `p/q` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let (num_s, den_s) = match text.split_once('/') {
        Some((a, b)) => (a, b),
        None => (text, "1"),
    };
    let num: BigInt = num_s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {text:?}")))?;
    let den: BigInt = den_s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {text:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Parse a decimal literal: optional sign, digits, optional fractional part.
/// No exponents; exactness must survive the wire.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("invalid decimal {text:?}"));
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_s, frac_s) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_s.is_empty() || !int_s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if !frac_s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_s}{frac_s}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = BigInt::from(10u32).pow(frac_s.len() as u32);
    let q = BigRational::new(numer, denom);
    Ok(if neg { -q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt(d: u64) -> RadicalScalar {
        RadicalScalar::sqrt(d).unwrap()
    }

    #[test]
    fn combine_unions_terms() {
        let r = combine(&[BigInt::one(), BigInt::one()], &[sqrt(2), sqrt(3)]).unwrap();
        let expect = sqrt(2) + sqrt(3);
        assert_eq!(r, expect);
    }

    #[test]
    fn combine_cancels_to_empty_map() {
        let r = combine(&[BigInt::one(), BigInt::from(-1)], &[sqrt(2), sqrt(2)]).unwrap();
        assert!(r.is_zero_value());
        assert_eq!(r.sign(), Sign::Zero);
    }

    #[test]
    fn combine_like_terms() {
        // 2*sqrt(2) - 1*(3*sqrt(2)) = -sqrt(2)
        let three_sqrt2 = sqrt(2).scale(&rat(3, 1));
        let r = combine(&[BigInt::from(2), BigInt::from(-1)], &[sqrt(2), three_sqrt2]).unwrap();
        assert_eq!(r, sqrt(2).neg());
    }

    #[test]
    fn combine_length_mismatch() {
        let r = combine(&[BigInt::one()], &[sqrt(2), sqrt(3)]);
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn sign_examples() {
        assert_eq!((sqrt(2) - sqrt(3)).sign(), Sign::Minus);
        assert_eq!(RadicalScalar::new_zero().sign(), Sign::Zero);
        // 5*sqrt(2) - 7: squares compare as 50 vs 49
        let x = sqrt(2).scale(&rat(5, 1)) - RadicalScalar::from_int(7);
        assert_eq!(x.sign(), Sign::Plus);
    }

    #[test]
    fn sign_multi_term_interval_path() {
        // sqrt(2) + sqrt(3) - sqrt(5) - 1/2 ~ 0.4, three irrational terms
        let x = sqrt(2) + sqrt(3) - sqrt(5) - RadicalScalar::from_rational(rat(1, 2));
        assert_eq!(x.sign(), Sign::Plus);
        let y = x - RadicalScalar::from_rational(rat(1, 2));
        assert_eq!(y.sign(), Sign::Minus);
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&sqrt(3), &sqrt(2)), Ordering::Greater);
        assert_eq!(compare(&sqrt(2), &sqrt(2)), Ordering::Equal);
        let lhs = sqrt(2) + sqrt(3);
        assert_eq!(compare(&lhs, &RadicalScalar::from_int(3)), Ordering::Greater);
    }

    #[test]
    fn floor_quotient_examples() {
        assert_eq!(floor_quotient(&sqrt(2), &sqrt(3)).unwrap(), BigUint::zero());
        assert_eq!(
            floor_quotient(&sqrt(2), &sqrt(2)).unwrap(),
            BigUint::from(1u32)
        );
        // sqrt(3) / (sqrt(3) - sqrt(2)) ~ 1.7321 / 0.3178 ~ 5.449
        let denom = sqrt(3) - sqrt(2);
        assert_eq!(
            floor_quotient(&sqrt(3), &denom).unwrap(),
            BigUint::from(5u32)
        );
    }

    #[test]
    fn floor_quotient_exact_boundary() {
        // (2*sqrt(2)) / sqrt(2) = 2 exactly
        let a = sqrt(2).scale(&rat(2, 1));
        assert_eq!(floor_quotient(&a, &sqrt(2)).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn floor_quotient_domain_errors() {
        let neg = sqrt(2).neg();
        assert!(matches!(
            floor_quotient(&sqrt(2), &neg),
            Err(Error::NonPositiveDivisor)
        ));
        assert!(matches!(
            floor_quotient(&neg, &sqrt(2)),
            Err(Error::NegativeDividend)
        ));
    }

    #[test]
    fn squarefree_rejects_square_factors() {
        assert!(is_squarefree(1));
        assert!(is_squarefree(2));
        assert!(is_squarefree(6));
        assert!(is_squarefree(30));
        assert!(!is_squarefree(4));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(49));
        assert!(!is_squarefree(0));
        assert!(RadicalScalar::sqrt(8).is_err());
    }

    #[test]
    fn decimal_scalar_tolerance() {
        let eps = rat(1, 1000);
        let a = DecimalScalar::new(rat(3, 2), eps.clone());
        let b = DecimalScalar::new(rat(2997, 2000), eps.clone());
        // a - b = 3/2000 > eps: decidable
        assert_eq!(a.sub(&b).try_sign().unwrap(), Sign::Plus);
        // a - a = 0 within eps: refused
        assert!(matches!(
            a.sub(&a).try_sign(),
            Err(Error::IndependenceViolation(_))
        ));
    }

    #[test]
    fn parse_decimal_literals() {
        assert_eq!(parse_decimal("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_decimal("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_decimal("42").unwrap(), rat(42, 1));
        assert!(parse_decimal("1e5").is_err());
        assert!(parse_decimal(".5").is_err());
    }

    #[test]
    fn parse_rational_literals() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("-4/6").unwrap(), rat(-2, 3));
        assert!(parse_rational("1/0").is_err());
    }
}
