//! Helpers around `BigRational`: parsing, formatting, dyadic rounding and
//! rigorous square root bounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::AlgebraError;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `p/q` or a finite decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let t = s.trim();
    let bad = || AlgebraError::Parse(format!("invalid rational `{s}`"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(AlgebraError::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) || !ip.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// `p/q` in lowest terms, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

pub fn pow2(bits: i64) -> Rational {
    if bits >= 0 {
        Rational::from_integer(BigInt::one() << (bits as usize))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-bits) as usize))
    }
}

/// Largest multiple of 2^-bits that is <= r.
pub fn floor_dyadic(r: &Rational, bits: u32) -> Rational {
    let s = r * pow2(bits as i64);
    Rational::new(floor(&s), BigInt::one() << bits as usize)
}

/// Smallest multiple of 2^-bits that is >= r.
pub fn ceil_dyadic(r: &Rational, bits: u32) -> Rational {
    let s = r * pow2(bits as i64);
    Rational::new(ceil(&s), BigInt::one() << bits as usize)
}

/// Rounds `num/den` to the nearest integer, ties to even. `den > 0`.
pub fn round_half_even(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    let twice = &r * 2u32;
    match twice.cmp(den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1u32,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1u32
            }
        }
    }
}

/// Nearest multiple of 2^-bits, ties to even.
pub fn round_dyadic(r: &Rational, bits: u32) -> Rational {
    let num = r.numer() << bits as usize;
    let m = round_half_even(&num, r.denom());
    Rational::new(m, BigInt::one() << bits as usize)
}

/// Smallest multiple of 2^-bits whose square is >= r (r >= 0).
pub fn sqrt_upper(r: &Rational, bits: u32) -> Rational {
    assert!(!r.is_negative(), "sqrt of negative rational");
    if r.is_zero() {
        return Rational::zero();
    }
    // k^2 * den >= num * 4^bits
    let target = r.numer() << (2 * bits as usize);
    let den = r.denom();
    let mut k = (&target / den).sqrt();
    while &k * &k * den < target {
        k += 1u32;
    }
    while k > BigInt::zero() {
        let km = &k - 1u32;
        if &km * &km * den >= target {
            k = km;
        } else {
            break;
        }
    }
    Rational::new(k, BigInt::one() << bits as usize)
}

/// Largest multiple of 2^-bits whose square is <= r (r >= 0).
pub fn sqrt_lower(r: &Rational, bits: u32) -> Rational {
    assert!(!r.is_negative(), "sqrt of negative rational");
    let target = r.numer() << (2 * bits as usize);
    let den = r.denom();
    let mut k = (&target / den).sqrt();
    while &k * &k * den > target {
        k -= 1u32;
    }
    loop {
        let kp = &k + 1u32;
        if &kp * &kp * den <= target {
            k = kp;
        } else {
            break;
        }
    }
    Rational::new(k, BigInt::one() << bits as usize)
}

/// Exact square root when `r` is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &n * &n == *r.numer() && &d * &d == *r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Rational upper bound on sqrt(r): exact when possible, otherwise the
/// dyadic bound at `bits` fractional bits.
pub fn sqrt_upper_bound(r: &Rational, bits: u32) -> Rational {
    exact_sqrt(r).unwrap_or_else(|| sqrt_upper(r, bits))
}

/// Upper bound on sqrt(r) with about `rel` significant bits, whatever the
/// magnitude of r.
pub fn sqrt_upper_rel(r: &Rational, rel: u32) -> Rational {
    if r.is_zero() {
        return Rational::zero();
    }
    let e = bits(r.denom()) as i64 - bits(r.numer()) as i64;
    let extra = if e > 0 { (e / 2 + 1) as u32 } else { 0 };
    sqrt_upper_bound(r, rel + extra)
}

/// Rational lower bound on sqrt(r).
pub fn sqrt_lower_bound(r: &Rational, bits: u32) -> Rational {
    exact_sqrt(r).unwrap_or_else(|| sqrt_lower(r, bits))
}

/// The rational with the smallest denominator in the closed interval
/// [lo, hi] (lo <= hi), via continued fractions.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if lo.is_positive() {
        simplest_pos(lo, hi)
    } else if hi.is_negative() {
        -simplest_pos(&-hi, &-lo)
    } else {
        Rational::zero()
    }
}

fn simplest_pos(lo: &Rational, hi: &Rational) -> Rational {
    let fl = floor(lo);
    let fl_r = Rational::from_integer(fl.clone());
    if fl_r == *lo {
        return fl_r;
    }
    if Rational::from_integer(&fl + 1u32) <= *hi {
        return Rational::from_integer(fl + 1u32);
    }
    // both in (fl, fl+1): recurse on reciprocals of fractional parts
    let a = lo - &fl_r;
    let b = hi - &fl_r;
    let inner = simplest_pos(&b.recip(), &a.recip());
    fl_r + inner.recip()
}

/// Bit length of the absolute value.
pub fn bits(n: &BigInt) -> u64 {
    n.bits()
}

/// The common denominator (lcm) of a list of rationals.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    let mut d = BigInt::one();
    for r in it {
        d = d.lcm(r.denom());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let two = int(2);
        let up = sqrt_upper(&two, 16);
        let lo = sqrt_lower(&two, 16);
        assert!(&up * &up >= two && &lo * &lo <= two);
        assert_eq!(&up - &lo, pow2(-16));
        assert_eq!(sqrt_upper_bound(&rat(9, 4), 4), rat(3, 2));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_even(&BigInt::from(5), &BigInt::from(2)), BigInt::from(2));
        assert_eq!(round_half_even(&BigInt::from(7), &BigInt::from(2)), BigInt::from(4));
        assert_eq!(round_half_even(&BigInt::from(-5), &BigInt::from(2)), BigInt::from(-2));
        assert_eq!(round_dyadic(&rat(1, 3), 2), rat(1, 4));
        assert_eq!(floor_dyadic(&rat(-1, 3), 2), rat(-1, 2));
        assert_eq!(ceil_dyadic(&rat(1, 3), 2), rat(1, 2));
    }

    #[test]
    fn simplest() {
        assert_eq!(simplest_between(&rat(3, 10), &rat(4, 10)), rat(1, 3));
        assert_eq!(simplest_between(&rat(-1, 2), &rat(1, 3)), int(0));
        assert_eq!(simplest_between(&rat(7, 5), &rat(7, 5)), rat(7, 5));
        assert_eq!(simplest_between(&rat(-41, 100), &rat(-39, 100)), rat(-2, 5));
    }
}
