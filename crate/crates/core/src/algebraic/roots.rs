//! Sturm sequences, real root isolation and isolated real roots.

use std::cmp::Ordering;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::poly::{sign_of, IntPoly, RatPoly};
use super::rational::{bits, pow2, simplest_between, Rational};

#[derive(Clone, Debug)]
pub(crate) struct SturmChain {
    seq: Vec<IntPoly>,
}

impl SturmChain {
    /// Chain of a square-free polynomial.
    pub(crate) fn new(p: &IntPoly) -> Self {
        let mut seq = vec![p.clone()];
        if p.degree() >= 1 {
            seq.push(p.derivative().primitive());
            loop {
                let n = seq.len();
                let b = &seq[n - 1];
                if b.degree() <= 0 {
                    break;
                }
                let a = &seq[n - 2];
                let delta = (a.degree() - b.degree() + 1) as u32;
                let mut r = a.prem(b);
                if r.is_zero() {
                    break;
                }
                // prem = lc^delta * rem; next element is a positive multiple of -rem
                let lc_neg = b.lc().is_negative() && delta % 2 == 1;
                if !lc_neg {
                    r = r.neg();
                }
                let r = r.primitive();
                seq.push(r);
            }
        }
        SturmChain { seq }
    }

    pub(crate) fn variations_at(&self, x: &Rational) -> usize {
        count_changes(self.seq.iter().map(|p| p.sign_at(x)))
    }

    pub(crate) fn variations_neg_inf(&self) -> usize {
        count_changes(self.seq.iter().map(|p| {
            let s = sign_of(&p.lc());
            if p.degree() % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Number of roots in (lo, hi], neither endpoint being a root.
    pub(crate) fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo) - self.variations_at(hi)
    }

    pub(crate) fn count_below(&self, x: &Rational) -> usize {
        self.variations_neg_inf() - self.variations_at(x)
    }
}

fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Power of two strictly above the modulus of every complex root.
pub(crate) fn root_bound(p: &IntPoly) -> Rational {
    let lc = p.lc().abs();
    let mut m = BigInt::zero();
    for c in &p.c[..p.c.len() - 1] {
        let a = c.abs();
        if a > m {
            m = a;
        }
    }
    // 1 + m/lc <= 2^k
    let q = (m / &lc) + 2u32;
    pow2(bits(&q) as i64)
}

/// One isolated root: an exact rational or an open interval with non-root
/// endpoints containing exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Isolated {
    Exact(Rational),
    Open(Rational, Rational),
}

/// Isolates all real roots of a square-free integer polynomial, ascending.
pub(crate) fn isolate_sqfree(p: &IntPoly, chain: &SturmChain) -> Vec<Isolated> {
    let mut out = Vec::new();
    if p.degree() < 1 {
        return out;
    }
    let b = root_bound(p);
    let lo = -b.clone();
    let total = chain.count(&lo, &b);
    let mut stack = vec![(lo, b, total)];
    while let Some((lo, hi, n)) = stack.pop() {
        match n {
            0 => {}
            1 => out.push(Isolated::Open(lo, hi)),
            _ => {
                let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
                if p.sign_at(&mid) == 0 {
                    let mut eps = (&hi - &lo) / Rational::from_integer(BigInt::from(4));
                    loop {
                        let a = &mid - &eps;
                        let c = &mid + &eps;
                        if p.sign_at(&a) != 0 && p.sign_at(&c) != 0 && chain.count(&a, &c) == 1 {
                            let nl = chain.count(&lo, &a);
                            let nr = chain.count(&c, &hi);
                            stack.push((c, hi.clone(), nr));
                            out.push(Isolated::Exact(mid.clone()));
                            stack.push((lo.clone(), a, nl));
                            break;
                        }
                        eps /= Rational::from_integer(BigInt::from(2));
                    }
                } else {
                    let nl = chain.count(&lo, &mid);
                    stack.push((mid.clone(), hi, n - nl));
                    stack.push((lo, mid, nl));
                }
            }
        }
    }
    out.sort_by(|a, b| lower(a).cmp(lower(b)));
    out
}

fn lower(i: &Isolated) -> &Rational {
    match i {
        Isolated::Exact(r) => r,
        Isolated::Open(l, _) => l,
    }
}

#[derive(Clone, Debug)]
struct Bracket {
    lo: Rational,
    hi: Rational,
    /// sign of p(lo); zero means lo == hi is the exact root.
    sign_lo: i8,
}

/// A real root of a square-free primitive integer polynomial, identified by
/// its 1-based index among the real roots, with a memoised isolating
/// interval.
pub struct RootNum {
    pub(crate) poly: IntPoly,
    pub(crate) index: usize,
    state: Mutex<Bracket>,
}

impl std::fmt::Debug for RootNum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (lo, hi) = self.interval();
        write!(f, "RootNum({:?}, #{}, [{}, {}])", self.poly, self.index, lo, hi)
    }
}

impl RootNum {
    /// `lo < hi` must isolate a root of `poly` (square-free, primitive,
    /// positive leading coefficient) with non-root endpoints.
    pub(crate) fn from_open(poly: IntPoly, chain: Option<SturmChain>, lo: Rational, hi: Rational) -> Self {
        let ch = chain.unwrap_or_else(|| SturmChain::new(&poly));
        let index = ch.count_below(&lo) + 1;
        let sign_lo = poly.sign_at(&lo);
        debug_assert!(sign_lo != 0);
        RootNum { poly, index, state: Mutex::new(Bracket { lo, hi, sign_lo }) }
    }

    pub fn interval(&self) -> (Rational, Rational) {
        let s = self.state.lock().unwrap();
        (s.lo.clone(), s.hi.clone())
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn minpoly(&self) -> RatPoly {
        self.poly.to_rat().monic()
    }

    /// Bisects until the isolating interval has width <= `w`.
    pub fn refine_to(&self, w: &Rational) -> (Rational, Rational) {
        let mut s = self.state.lock().unwrap();
        let two = Rational::from_integer(BigInt::from(2));
        while s.sign_lo != 0 && &s.hi - &s.lo > *w {
            let mid = (&s.lo + &s.hi) / &two;
            let sm = self.poly.sign_at(&mid);
            if sm == 0 {
                s.lo = mid.clone();
                s.hi = mid;
                s.sign_lo = 0;
            } else if sm == s.sign_lo {
                s.lo = mid;
            } else {
                s.hi = mid;
            }
        }
        (s.lo.clone(), s.hi.clone())
    }

    pub fn refine_bits(&self, b: u32) -> (Rational, Rational) {
        self.refine_to(&pow2(-(b as i64)))
    }

    pub(crate) fn same_value_fast(&self, o: &RootNum) -> bool {
        self.poly == o.poly && self.index == o.index
    }

    /// If the root is rational, returns it. Exhaustive for moderate
    /// leading coefficients, best effort otherwise.
    pub(crate) fn detect_rational(&self) -> Option<Rational> {
        let lc = self.poly.lc().abs();
        let lcb = bits(&lc);
        let sep = pow2(-(2 * lcb as i64 + 1));
        let budget = if lcb <= 96 && self.poly.degree() <= 64 { usize::MAX } else { 48 };
        let mut w = {
            let (lo, hi) = self.interval();
            &hi - &lo
        };
        let mut iters = 0usize;
        loop {
            let (lo, hi) = self.interval();
            if lo == hi {
                return Some(lo);
            }
            let s = simplest_between(&lo, &hi);
            if s > lo && s < hi && self.poly.sign_at(&s) == 0 {
                return Some(s);
            }
            if w < sep || iters >= budget {
                return None;
            }
            w /= Rational::from_integer(BigInt::from(4));
            self.refine_to(&w);
            iters += 1;
        }
    }

    /// Compares with a rational.
    pub(crate) fn cmp_rational(&self, r: &Rational) -> Ordering {
        loop {
            let (lo, hi) = self.interval();
            if lo == hi {
                return lo.cmp(r);
            }
            if *r <= lo {
                return Ordering::Greater;
            }
            if *r >= hi {
                return Ordering::Less;
            }
            if self.poly.sign_at(r) == 0 {
                return Ordering::Equal;
            }
            let w = (&hi - &lo) / Rational::from_integer(BigInt::from(2));
            self.refine_to(&w);
        }
    }

    /// Exact equality test via the gcd of the defining polynomials.
    pub(crate) fn equals(&self, o: &RootNum) -> bool {
        if std::ptr::eq(self, o) || self.same_value_fast(o) {
            return true;
        }
        let g = self.poly.primitive_gcd(&o.poly);
        if g.degree() < 1 {
            return false;
        }
        let g = if g.lc().is_negative() { g.neg() } else { g };
        let gc = SturmChain::new(&g);
        let ix = self.index_in(&g, &gc);
        let iy = o.index_in(&g, &gc);
        matches!((ix, iy), (Some(a), Some(b)) if a == b)
    }

    /// Index of this root among the roots of a divisor `g` of the
    /// defining polynomial, if it is a root of `g`.
    fn index_in(&self, g: &IntPoly, gc: &SturmChain) -> Option<usize> {
        let (lo, hi) = self.interval();
        if lo == hi {
            if g.sign_at(&lo) != 0 {
                return None;
            }
            return isolate_sqfree(g, gc).iter().position(|i| match i {
                Isolated::Exact(r) => *r == lo,
                Isolated::Open(a, b) => *a < lo && lo < *b,
            }).map(|k| k + 1);
        }
        if gc.count(&lo, &hi) == 1 {
            Some(gc.count_below(&lo) + 1)
        } else {
            None
        }
    }

    pub(crate) fn cmp_root(&self, o: &RootNum) -> Ordering {
        if self.equals(o) {
            return Ordering::Equal;
        }
        loop {
            let (a, b) = self.interval();
            let (c, d) = o.interval();
            if b < c {
                return Ordering::Less;
            }
            if d < a {
                return Ordering::Greater;
            }
            if a == b && c == d {
                return a.cmp(&c);
            }
            let w1 = (&b - &a) / Rational::from_integer(BigInt::from(2));
            let w2 = (&d - &c) / Rational::from_integer(BigInt::from(2));
            self.refine_to(&w1);
            o.refine_to(&w2);
        }
    }
}

/// Finds the unique root of `p` (square-free) inside the closed interval
/// `[lo, hi]` if there is exactly one; returns `None` otherwise.
pub(crate) fn unique_root_in(p: &IntPoly, chain: &SturmChain, lo: &Rational, hi: &Rational) -> Option<Isolated> {
    if lo == hi {
        return if p.sign_at(lo) == 0 { Some(Isolated::Exact(lo.clone())) } else { None };
    }
    let sl = p.sign_at(lo);
    let sh = p.sign_at(hi);
    let inner = if sl != 0 && sh != 0 { chain.count(lo, hi) } else { usize::MAX };
    if inner == 1 {
        return Some(Isolated::Open(lo.clone(), hi.clone()));
    }
    if inner == 0 {
        return None;
    }
    if inner == usize::MAX {
        // an endpoint is a root; only report it if it is the only one
        let tiny = (hi - lo) / Rational::from_integer(BigInt::from(1u64 << 20));
        let a = if sl == 0 { lo - &tiny } else { lo.clone() };
        let b = if sh == 0 { hi + &tiny } else { hi.clone() };
        if p.sign_at(&a) != 0 && p.sign_at(&b) != 0 && chain.count(&a, &b) == 1 {
            return Some(Isolated::Exact(if sl == 0 { lo.clone() } else { hi.clone() }));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::rational::{int, rat};

    #[test]
    fn sturm_counts() {
        // (x^2 - 2)(x - 3)
        let p = IntPoly::from_i64(&[-2, 0, 1]).mul(&IntPoly::from_i64(&[-3, 1]));
        let ch = SturmChain::new(&p);
        assert_eq!(ch.count(&int(-100), &int(100)), 3);
        assert_eq!(ch.count(&int(0), &int(2)), 1);
        assert_eq!(ch.count(&int(-2), &int(4)), 3);
        let iso = isolate_sqfree(&p, &ch);
        assert_eq!(iso.len(), 3);
        let x2 = IntPoly::from_i64(&[1, 0, 1]);
        assert_eq!(SturmChain::new(&x2).count(&int(-100), &int(100)), 0);
    }

    #[test]
    fn isolation_hits_exact_roots() {
        // x (x - 1)(x + 1)(2x - 1)
        let p = IntPoly::from_i64(&[0, -1, 0, 1]).mul(&IntPoly::from_i64(&[-1, 2]));
        let ch = SturmChain::new(&p);
        let iso = isolate_sqfree(&p, &ch);
        assert_eq!(iso.len(), 4);
        let mut found = 0;
        for i in &iso {
            match i {
                Isolated::Exact(r) => {
                    assert_eq!(p.sign_at(r), 0);
                    found += 1;
                }
                Isolated::Open(lo, hi) => assert_eq!(ch.count(lo, hi), 1),
            }
        }
        assert!(found >= 1);
    }

    #[test]
    fn root_refine_and_compare() {
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        let ch = SturmChain::new(&p);
        let iso = isolate_sqfree(&p, &ch);
        let Isolated::Open(lo, hi) = iso[1].clone() else { panic!() };
        let r = RootNum::from_open(p.clone(), Some(ch), lo, hi);
        assert_eq!(r.index(), 2);
        let (a, b) = r.refine_to(&rat(1, 1000));
        assert!(&b - &a <= rat(1, 1000));
        assert!(a < rat(14143, 10000) && b > rat(14142, 10000));
        assert_eq!(r.cmp_rational(&rat(3, 2)), Ordering::Less);
        assert_eq!(r.detect_rational(), None);
        // 2x^2 - 4 has the same positive root
        let q = IntPoly::from_i64(&[-4, 1, 1]).mul(&IntPoly::from_i64(&[-2, 0, 1]));
        let qc = SturmChain::new(&q);
        let qi = isolate_sqfree(&q, &qc);
        let pos: Vec<_> = qi
            .into_iter()
            .filter_map(|i| match i {
                Isolated::Open(lo, hi) if lo > int(1) || (lo > int(0) && hi < int(2)) => Some((lo, hi)),
                _ => None,
            })
            .collect();
        let mut eq = 0;
        for (lo, hi) in pos {
            let s = RootNum::from_open(q.clone(), None, lo, hi);
            if s.equals(&r) {
                eq += 1;
                assert_eq!(s.cmp_root(&r), Ordering::Equal);
            }
        }
        assert_eq!(eq, 1);
    }
}
