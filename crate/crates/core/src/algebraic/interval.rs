//! Closed rational intervals with optional outward dyadic rounding.

use num_traits::{Signed, Zero};

use super::rational::{ceil_dyadic, floor_dyadic, sqrt_lower, sqrt_upper, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(r: Rational) -> Self {
        Interval { lo: r.clone(), hi: r }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo <= *r && *r <= self.hi
    }

    pub fn intersects(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        if self.lo == self.hi && o.lo == o.hi {
            return Interval::point(&self.lo * &o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn scale(&self, s: &Rational) -> Interval {
        if s.is_negative() {
            Interval { lo: &self.hi * s, hi: &self.lo * s }
        } else {
            Interval { lo: &self.lo * s, hi: &self.hi * s }
        }
    }

    /// Reciprocal; `None` when zero is inside.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, o: &Interval) -> Option<Interval> {
        o.recip().map(|r| self.mul(&r))
    }

    /// Square root of a nonnegative interval, rounded outward.
    pub fn sqrt(&self, bits: u32) -> Interval {
        let lo = if self.lo.is_positive() { sqrt_lower(&self.lo, bits) } else { Rational::zero() };
        Interval { lo, hi: sqrt_upper(&self.hi, bits) }
    }

    /// Rounds endpoints outward to multiples of 2^-bits, but only if that
    /// shrinks their representation.
    pub fn round_out(&self, bits: u32) -> Interval {
        let lo = if self.lo.denom().bits() > bits as u64 + 1 { floor_dyadic(&self.lo, bits) } else { self.lo.clone() };
        let hi = if self.hi.denom().bits() > bits as u64 + 1 { ceil_dyadic(&self.hi, bits) } else { self.hi.clone() };
        Interval { lo, hi }
    }

    pub fn mag(&self) -> Rational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi > o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::rational::{int, rat};

    #[test]
    fn basic_ops() {
        let a = Interval::new(int(-1), int(2));
        let b = Interval::new(int(3), int(4));
        assert_eq!(a.mul(&b), Interval::new(int(-4), int(8)));
        assert_eq!(a.sub(&b), Interval::new(int(-5), int(-1)));
        assert!(a.recip().is_none());
        assert_eq!(b.recip().unwrap(), Interval::new(rat(1, 4), rat(1, 3)));
        let r = Interval::point(rat(1, 3)).round_out(4);
        assert!(r.contains(&rat(1, 3)) && r.width() <= rat(1, 16));
        let s = Interval::new(int(2), int(2)).sqrt(10);
        assert!(&s.lo * &s.lo <= int(2) && &s.hi * &s.hi >= int(2));
    }
}
