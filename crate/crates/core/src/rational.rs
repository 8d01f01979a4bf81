//! Exact rational scalars and the small amount of number theory the rest of
//! the crate needs: dyadic snapping, certified square roots, and algebraic
//! comparisons against the golden ratio.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Q {
    let p = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        Q::from_integer(p)
    } else {
        Q::new(BigInt::one(), p)
    }
}

pub fn powi(x: &Q, e: u32) -> Q {
    let mut acc = one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"0.6"` or `"-1.25"`.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn fmt(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering with `sig` significant digits, rounded half away from zero.
/// Rendering only; no decision in the crate depends on it.
pub fn decimal(x: &Q, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let neg = x.is_negative();
    let a = x.abs();
    // exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let ten = int(10);
    let pow10 = |k: i64| -> Q {
        let p = num_traits::pow(BigInt::from(10), k.unsigned_abs() as usize);
        if k >= 0 {
            Q::from_integer(p)
        } else {
            Q::new(BigInt::one(), p)
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    let mut m = (scaled.clone() + frac(1, 2)).floor().to_integer();
    if Q::from_integer(m.clone()) >= ten.clone() * pow10(sig as i64 - 1) {
        // rounding carried into a new digit
        m /= 10;
        e += 1;
    }
    let digits = m.to_string();
    let shift = sig as i64 - 1 - e;
    let body = if shift <= 0 {
        let mut s = digits.clone();
        s.push_str(&"0".repeat((-shift) as usize));
        s
    } else if (shift as usize) < digits.len() {
        let (l, r) = digits.split_at(digits.len() - shift as usize);
        format!("{l}.{r}")
    } else {
        format!("0.{}{}", "0".repeat(shift as usize - digits.len()), digits)
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// For `0 < t <= 1`, the exponent `k` of the largest dyadic point `2^-k <= t`.
pub fn dyadic_floor_exp(t: &Q) -> Result<u64> {
    if !t.is_positive() || *t > one() {
        return Err(Error::OutOfDomain(fmt(t)));
    }
    // t = n/d; start from the bit-length estimate and correct.
    let n = t.numer().bits() as i64;
    let d = t.denom().bits() as i64;
    let mut k = (d - n).max(0);
    while pow2(-k) > *t {
        k += 1;
    }
    while k > 0 && pow2(-(k - 1)) <= *t {
        k -= 1;
    }
    Ok(k as u64)
}

/// Index `n` of the binary interval `D_n = (2^-n, 2^-n+1]` containing `t`.
pub fn dyadic_rank(t: &Q) -> Result<u64> {
    let k = dyadic_floor_exp(t)?;
    // 2^-k <= t; if equality t is the right endpoint of D_{k+1}
    if pow2(-(k as i64)) == *t {
        Ok(k + 1)
    } else {
        Ok(k)
    }
}

/// Integer square root bracket: `lo <= sqrt(x) <= hi` with both bounds having
/// denominator `2^bits`; `lo == hi` exactly when `x` is a rational square.
pub fn sqrt_bracket(x: &Q, bits: u32) -> Result<(Q, Q)> {
    if x.is_negative() {
        return Err(Error::Invalid(format!("sqrt of negative {}", fmt(x))));
    }
    if let Some(r) = exact_sqrt(x) {
        return Ok((r.clone(), r));
    }
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = (x * Q::from_integer(scale)).floor().to_integer();
    let s = scaled.to_biguint().unwrap_or_else(BigUint::zero).sqrt();
    let den = BigInt::one() << bits as usize;
    let lo = Q::new(BigInt::from_biguint(Sign::Plus, s.clone()), den.clone());
    let hi = Q::new(BigInt::from_biguint(Sign::Plus, s) + 1, den);
    Ok((lo, hi))
}

pub fn exact_sqrt(x: &Q) -> Option<Q> {
    let n = x.numer().to_biguint()?;
    let d = x.denom().to_biguint()?;
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &rn * &rn == n && &rd * &rd == d {
        Some(Q::new(
            BigInt::from_biguint(Sign::Plus, rn),
            BigInt::from_biguint(Sign::Plus, rd),
        ))
    } else {
        None
    }
}

/// `x <= alpha` where alpha is the golden ratio, decided by the sign of
/// `x^2 - x - 1` (valid because alpha is the positive root).
pub fn le_golden(x: &Q) -> bool {
    !x.is_positive() || x * x <= x + one()
}

pub fn lt_golden(x: &Q) -> bool {
    !x.is_positive() || x * x < x + one()
}

/// Consecutive Fibonacci convergents `(lo, hi)` with `lo < alpha < hi` and
/// `hi - lo < 2^-bits`.
pub fn golden_bracket(bits: u32) -> (Q, Q) {
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    let tol = pow2(-(bits as i64));
    loop {
        let c = &a + &b;
        let r1 = Q::new(c.clone(), b.clone());
        let r0 = Q::new(b.clone(), a.clone());
        let (lo, hi) = if r0 < r1 { (r0, r1) } else { (r1, r0) };
        if &hi - &lo < tol && lt_golden(&lo) && !le_golden(&hi) {
            return (lo, hi);
        }
        a = b;
        b = c;
    }
}

/// Greatest common divisor helper used when normalizing integer weights.
pub fn gcd_all(xs: &[BigInt]) -> BigInt {
    xs.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Serde adapters that read and write rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let raw = RawQ::deserialize(d)?;
        raw.into_q().map_err(serde::de::Error::custom)
    }

    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawQ {
        S(String),
        I(i64),
    }

    impl RawQ {
        pub(crate) fn into_q(self) -> Result<Q> {
            match self {
                RawQ::S(s) => parse(&s),
                RawQ::I(i) => Ok(int(i)),
            }
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&fmt(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Q>, D::Error> {
            let raw = Vec::<RawQ>::deserialize(d)?;
            raw.into_iter()
                .map(|r| r.into_q().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("1/2").unwrap(), frac(1, 2));
        assert_eq!(parse("0.6").unwrap(), frac(3, 5));
        assert_eq!(parse("-1.25").unwrap(), frac(-5, 4));
        assert_eq!(parse("7").unwrap(), int(7));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn fmt_roundtrip() {
        for s in ["3/7", "-2", "0", "1/1024"] {
            assert_eq!(fmt(&parse(s).unwrap()), s);
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&frac(1, 3), 4), "0.3333");
        assert_eq!(decimal(&frac(2, 3), 3), "0.667");
        assert_eq!(decimal(&int(1234), 2), "1200");
        assert_eq!(decimal(&frac(-1, 8), 12), "-0.125");
        assert_eq!(decimal(&frac(999, 1000), 2), "1");
    }

    #[test]
    fn dyadic_exponents() {
        assert_eq!(dyadic_floor_exp(&frac(3, 5)).unwrap(), 1);
        assert_eq!(dyadic_floor_exp(&frac(1, 10)).unwrap(), 4);
        assert_eq!(dyadic_floor_exp(&one()).unwrap(), 0);
        assert_eq!(dyadic_floor_exp(&frac(1, 8)).unwrap(), 3);
        assert_eq!(dyadic_rank(&frac(1, 8)).unwrap(), 4);
        assert_eq!(dyadic_rank(&frac(3, 16)).unwrap(), 3);
        assert_eq!(dyadic_rank(&one()).unwrap(), 1);
    }

    #[test]
    fn sqrt_brackets() {
        let (lo, hi) = sqrt_bracket(&frac(9, 4), 40).unwrap();
        assert_eq!(lo, frac(3, 2));
        assert_eq!(hi, frac(3, 2));
        let (lo, hi) = sqrt_bracket(&int(2), 40).unwrap();
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert_eq!(&hi - &lo, pow2(-40));
    }

    #[test]
    fn golden_tests() {
        assert!(le_golden(&frac(8, 5)));
        assert!(!le_golden(&frac(13, 8)));
        let (lo, hi) = golden_bracket(30);
        assert!(lt_golden(&lo) && !le_golden(&hi));
        assert!(&hi - &lo < pow2(-30));
    }
}
