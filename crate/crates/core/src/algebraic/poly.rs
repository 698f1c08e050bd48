//! Dense univariate polynomials over Q (`RatPoly`) and Z (`IntPoly`).
//!
//! Coefficients are stored lowest degree first with no trailing zeros, so
//! the zero polynomial is the empty vector.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use super::AlgebraError;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly{:?}", self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// x - r
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        RatPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Euclidean division; fails on a zero divisor.
    pub fn divmod(&self, d: &Self) -> Result<(Self, Self), AlgebraError> {
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let dd = d.coeffs.len() - 1;
        let inv = d.lc().recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = &r[i] * &inv;
            if c.is_zero() {
                continue;
            }
            for j in 0..=dd {
                let t = &c * &d.coeffs[j];
                r[i - dd + j] -= t;
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divmod(d).expect("nonzero divisor").1
    }

    /// Exact quotient; panics in debug builds when `d` does not divide.
    pub fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.divmod(d).expect("nonzero divisor");
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lc().recip())
    }

    /// Monic gcd (zero when both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// p(q(x))
    pub fn compose(&self, q: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(q).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Monic square-free part p / gcd(p, p').
    pub fn squarefree_part(&self) -> Self {
        if self.degree() <= 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).monic()
    }

    /// Yun's square-free factorisation: pairs (f_i, i) with p = c * prod f_i^i,
    /// each f_i monic, square-free and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, u32)> {
        let mut out = Vec::new();
        if self.degree() <= 0 {
            return out;
        }
        let f = self.monic();
        let fd = f.derivative();
        let a0 = f.gcd(&fd);
        let mut b = f.exact_div(&a0);
        let c = fd.exact_div(&a0);
        let mut d = c.sub(&b.derivative());
        let mut i = 1u32;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a);
            let c = d.exact_div(&a);
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Primitive integer polynomial with positive leading coefficient and
    /// the same roots.
    pub fn to_primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut p = IntPoly::new(ints).primitive();
        if p.lc().is_negative() {
            p = p.neg();
        }
        p
    }

    /// x -> -x
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// p(x + s)
    pub fn shift(&self, s: &Rational) -> Self {
        self.compose(&Self::new(vec![s.clone(), Rational::one()]))
    }

    /// x -> x / s, scaled to keep coefficients small: returns s^d p(x/s).
    pub fn scale_arg_inv(&self, s: &Rational) -> Self {
        let d = self.coeffs.len();
        let mut pw = Rational::one();
        let mut out = vec![Rational::zero(); d];
        for i in (0..d).rev() {
            out[i] = &self.coeffs[i] * &pw;
            pw *= s;
        }
        Self::new(out)
    }

    /// x^d p(1/x)
    pub fn reciprocal(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?
                    } else {
                        write!(f, "x^{i}")?
                    }
                }
            }
        }
        Ok(())
    }
}

/// Operations accepted by [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    DivMod,
    Gcd,
}

/// Result of [`poly_arith`]: a single polynomial, or quotient and remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyResult {
    Single(RatPoly),
    QuotRem(RatPoly, RatPoly),
}

pub fn poly_arith(p: &RatPoly, q: &RatPoly, op: PolyOp) -> Result<PolyResult, AlgebraError> {
    Ok(match op {
        PolyOp::Add => PolyResult::Single(p.add(q)),
        PolyOp::Sub => PolyResult::Single(p.sub(q)),
        PolyOp::Mul => PolyResult::Single(p.mul(q)),
        PolyOp::DivMod => {
            let (a, b) = p.divmod(q)?;
            PolyResult::QuotRem(a, b)
        }
        PolyOp::Gcd => PolyResult::Single(p.gcd(q)),
    })
}

pub fn squarefree_part(p: &RatPoly) -> RatPoly {
    p.squarefree_part()
}

/// Integer polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    pub(crate) c: Vec<BigInt>,
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly{:?}", self.c.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        IntPoly { c }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { c: vec![] }
    }

    pub fn constant(v: BigInt) -> Self {
        Self::new(vec![v])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn lc(&self) -> BigInt {
        self.c.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn get(&self, i: usize) -> BigInt {
        self.c.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.c.iter().map(|v| Rational::from_integer(v.clone())).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.get(i) + o.get(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.get(i) - o.get(i)).collect())
    }

    pub fn neg(&self) -> Self {
        IntPoly { c: self.c.iter().map(|v| -v).collect() }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::new(self.c.iter().map(|v| v * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut r = Self::constant(BigInt::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for v in &self.c {
            g = g.gcd(v);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Self::new(self.c.iter().map(|v| v / &g).collect())
    }

    /// Division by a scalar that divides every coefficient.
    pub fn div_scalar(&self, s: &BigInt) -> Self {
        Self::new(
            self.c
                .iter()
                .map(|v| {
                    debug_assert!((v % s).is_zero(), "inexact scalar division");
                    v / s
                })
                .collect(),
        )
    }

    /// Exact quotient in Z[x]; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.c.len() == 1 {
            let s = &d.c[0];
            if self.c.iter().all(|v| (v % s).is_zero()) {
                return Some(self.div_scalar(s));
            }
            return None;
        }
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return None;
        }
        let lc = d.lc();
        let mut r = self.c.clone();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let (qq, rr) = r[i].div_rem(&lc);
            if !rr.is_zero() {
                return None;
            }
            for j in 0..=dd {
                let t = &qq * &d.c[j];
                r[i - dd + j] -= t;
            }
            q[i - dd] = qq;
        }
        if r.iter().any(|v| !v.is_zero()) {
            return None;
        }
        Some(Self::new(q))
    }

    /// Pseudo-remainder lc(d)^(deg self - deg d + 1) * self mod d.
    pub fn prem(&self, d: &Self) -> Self {
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return self.clone();
        }
        let lc = d.lc();
        let mut r = self.c.clone();
        for i in (dd..r.len()).rev() {
            let t = r[i].clone();
            for v in r.iter_mut().take(i + 1) {
                *v *= &lc;
            }
            if t.is_zero() {
                continue;
            }
            for j in 0..=dd {
                r[i - dd + j] -= &t * &d.c[j];
            }
        }
        r.truncate(dd);
        Self::new(r)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(i, v)| v * BigInt::from(i)).collect())
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for v in self.c.iter().rev() {
            acc = acc * x + v;
        }
        acc
    }

    /// Sign of p(r) computed as the homogenised integer sum.
    pub fn sign_at(&self, r: &Rational) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let a = r.numer();
        let b = r.denom();
        let mut acc = BigInt::zero();
        let mut bp = BigInt::one();
        // acc = sum c_i a^i b^(d-i), Horner from the top in a with b powers.
        for v in self.c.iter().rev() {
            acc = acc * a + v * &bp;
            bp *= b;
        }
        let _ = bp;
        sign_of(&acc)
    }

    pub fn eval(&self, r: &Rational) -> Rational {
        self.to_rat().eval(r)
    }

    pub fn primitive_gcd(&self, o: &Self) -> Self {
        self.to_rat().gcd(&o.to_rat()).to_primitive()
    }
}

pub(crate) fn sign_of(v: &BigInt) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_negative() {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::rational::{int, rat};

    #[test]
    fn arithmetic_and_division() {
        let p = RatPoly::from_ints(&[-1, 0, 1]); // x^2 - 1
        let q = RatPoly::from_ints(&[1, 1]); // x + 1
        let (d, r) = p.divmod(&q).unwrap();
        assert_eq!(d, RatPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(p.gcd(&RatPoly::from_ints(&[2, 2])), q);
        assert!(p.divmod(&RatPoly::zero()).is_err());
        assert_eq!(p.eval(&int(3)), int(8));
        assert_eq!(p.derivative(), RatPoly::from_ints(&[0, 2]));
    }

    #[test]
    fn squarefree() {
        // (x-1)^2 (x+2)
        let p = RatPoly::from_ints(&[-1, 1]).pow(2).mul(&RatPoly::from_ints(&[2, 1]));
        assert_eq!(p.squarefree_part(), RatPoly::from_ints(&[-2, 1, 1]));
        let dec = p.squarefree_decomposition();
        assert_eq!(dec, vec![(RatPoly::from_ints(&[2, 1]), 1), (RatPoly::from_ints(&[-1, 1]), 2)]);
        let x3 = RatPoly::from_ints(&[0, 0, 0, 1]);
        assert_eq!(x3.squarefree_decomposition(), vec![(RatPoly::x(), 3)]);
    }

    #[test]
    fn int_poly_ops() {
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(p.sign_at(&rat(3, 2)), 1);
        assert_eq!(p.sign_at(&rat(1, 1)), -1);
        assert_eq!(RatPoly::new(vec![rat(1, 2), rat(-1, 3)]).to_primitive(), IntPoly::from_i64(&[-3, 2]));
        let a = IntPoly::from_i64(&[-1, 0, 1]);
        assert_eq!(a.exact_div(&IntPoly::from_i64(&[1, 1])), Some(IntPoly::from_i64(&[-1, 1])));
        assert_eq!(a.exact_div(&IntPoly::from_i64(&[2, 1])), None);
        // prem(x^2 + 1, 2x + 1) = 4*(x^2+1) mod (2x+1) = 5
        let pr = IntPoly::from_i64(&[1, 0, 1]).prem(&IntPoly::from_i64(&[1, 2]));
        assert_eq!(pr, IntPoly::from_i64(&[5]));
    }
}
