//! Exact real algebraic numbers.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::interval::Interval;
use super::poly::{IntPoly, RatPoly};
use super::rational::{exact_sqrt, format_rational, round_half_even, Rational};
use super::resultant::{diff_poly, prod_poly, quot_poly, sum_poly};
use super::roots::{isolate_sqfree, unique_root_in, Isolated, RootNum, SturmChain};
use super::tower::{Elem, Tower};
use super::AlgebraError;

/// Binary operations accepted by [`alg_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An exact real algebraic number.
///
/// Rationals are always stored as rationals. Irrational numbers are either
/// an isolated root of a square-free integer polynomial or an element of a
/// tower of number fields; both expose a defining polynomial, a root index
/// and an isolating interval.
#[derive(Clone)]
pub struct RealAlgebraic(pub(crate) Repr);

#[derive(Clone)]
pub(crate) enum Repr {
    Rat(Rational),
    Root(Arc<RootNum>),
    Field(Arc<FieldNum>),
}

pub(crate) struct FieldNum {
    pub(crate) tower: Arc<Tower>,
    pub(crate) elem: Elem,
    standalone: OnceLock<RealAlgebraic>,
}

impl RealAlgebraic {
    pub fn from_rational(r: Rational) -> Self {
        RealAlgebraic(Repr::Rat(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The `k`-th smallest (1-based) real root of the square-free part of `p`.
    pub fn root_of(p: &RatPoly, k: usize) -> Result<Self, AlgebraError> {
        let roots = real_roots(p);
        roots
            .into_iter()
            .nth(k.wrapping_sub(1))
            .ok_or_else(|| AlgebraError::Invalid(format!("polynomial {p} has no real root #{k}")))
    }

    pub(crate) fn from_root(r: RootNum) -> Self {
        match r.detect_rational() {
            Some(q) => Self::from_rational(q),
            None => RealAlgebraic(Repr::Root(Arc::new(r))),
        }
    }

    pub(crate) fn from_field(tower: &Arc<Tower>, e: Elem) -> Self {
        let e = tower.deep_reduce(&e);
        match e {
            Elem::Rat(r) => Self::from_rational(r),
            e => {
                let t = tower.prefix(e.depth());
                RealAlgebraic(Repr::Field(Arc::new(FieldNum { tower: t, elem: e, standalone: OnceLock::new() })))
            }
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Repr::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Equivalent number without tower representation (rational or root).
    fn standalone(&self) -> RealAlgebraic {
        match &self.0 {
            Repr::Field(f) => f.standalone.get_or_init(|| field_to_root(&f.tower, &f.elem)).clone(),
            _ => self.clone(),
        }
    }

    /// Monic square-free defining polynomial (degree 1 for rationals).
    pub fn minpoly(&self) -> RatPoly {
        match &self.standalone().0 {
            Repr::Rat(r) => RatPoly::linear_root(r),
            Repr::Root(r) => r.minpoly(),
            Repr::Field(_) => unreachable!(),
        }
    }

    /// 1-based index of this number among the real roots of `minpoly`.
    pub fn root_index(&self) -> usize {
        match &self.standalone().0 {
            Repr::Root(r) => r.index(),
            _ => 1,
        }
    }

    /// Interval containing this number and no other root of `minpoly`.
    pub fn isolating_interval(&self) -> (Rational, Rational) {
        match &self.standalone().0 {
            Repr::Rat(r) => (r.clone(), r.clone()),
            Repr::Root(r) => r.interval(),
            Repr::Field(_) => unreachable!(),
        }
    }

    /// Rigorous rational enclosure of width at most `w` (w > 0).
    pub fn refine(&self, w: &Rational) -> (Rational, Rational) {
        match &self.0 {
            Repr::Rat(r) => (r.clone(), r.clone()),
            Repr::Root(r) => r.refine_to(w),
            Repr::Field(f) => {
                let mut b = 8u32;
                loop {
                    let i = f.tower.enclose_width(&f.elem, b);
                    if i.width() <= *w {
                        return (i.lo, i.hi);
                    }
                    b += 8;
                }
            }
        }
    }

    pub(crate) fn enclosure(&self, bits: u32) -> Interval {
        match &self.0 {
            Repr::Rat(r) => Interval::point(r.clone()),
            Repr::Root(r) => {
                let (lo, hi) = r.refine_bits(bits);
                Interval::new(lo, hi)
            }
            Repr::Field(f) => f.tower.enclose_width(&f.elem, bits),
        }
    }

    /// Rational lower bound within 2^-bits.
    pub fn lower_bound(&self, bits: u32) -> Rational {
        self.enclosure(bits).lo
    }

    /// Rational upper bound within 2^-bits.
    pub fn upper_bound(&self, bits: u32) -> Rational {
        self.enclosure(bits).hi
    }

    pub fn sign(&self) -> i8 {
        match &self.0 {
            Repr::Rat(r) => sgn(r),
            Repr::Root(r) => match r.cmp_rational(&Rational::zero()) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            },
            Repr::Field(f) => f.tower.sign(&f.elem),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    pub fn neg(&self) -> Self {
        match &self.0 {
            Repr::Rat(r) => Self::from_rational(-r),
            Repr::Root(r) => {
                let (lo, hi) = r.interval();
                let p = r.poly.to_rat().reflect().to_primitive();
                RealAlgebraic(Repr::Root(Arc::new(RootNum::from_open(p, None, -hi, -lo))))
            }
            Repr::Field(f) => Self::from_field(&f.tower, f.tower.neg(&f.elem)),
        }
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        match &self.0 {
            Repr::Rat(r) => {
                if r.is_zero() {
                    Err(AlgebraError::DivisionByZero)
                } else {
                    Ok(Self::from_rational(r.recip()))
                }
            }
            Repr::Root(r) => {
                if r.cmp_rational(&Rational::zero()) == Ordering::Equal {
                    return Err(AlgebraError::DivisionByZero);
                }
                let (lo, hi) = loop {
                    let (lo, hi) = r.interval();
                    if lo.is_positive() || hi.is_negative() {
                        break (lo, hi);
                    }
                    r.refine_to(&((&hi - &lo) / Rational::from_integer(BigInt::from(2))));
                };
                let p = r.poly.to_rat().reciprocal().to_primitive();
                Ok(RealAlgebraic(Repr::Root(Arc::new(RootNum::from_open(p, None, hi.recip(), lo.recip())))))
            }
            Repr::Field(f) => Ok(Self::from_field(&f.tower, f.tower.inv(&f.elem)?)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        alg_arith(self, o, AlgOp::Add).expect("addition cannot fail")
    }

    pub fn sub(&self, o: &Self) -> Self {
        alg_arith(self, o, AlgOp::Sub).expect("subtraction cannot fail")
    }

    pub fn mul(&self, o: &Self) -> Self {
        alg_arith(self, o, AlgOp::Mul).expect("multiplication cannot fail")
    }

    pub fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        alg_arith(self, o, AlgOp::Div)
    }

    pub fn sqrt(&self) -> Result<Self, AlgebraError> {
        alg_sqrt(self)
    }

    pub fn cmp_exact(&self, o: &Self) -> Ordering {
        alg_compare(self, o)
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        alg_to_decimal(self, digits)
    }

    /// Textual encoding: `"p/q"` for rationals, otherwise a JSON object
    /// `{"minpoly": [c0, …, cd], "root": k}`.
    pub fn to_json(&self) -> serde_json::Value {
        match &self.standalone().0 {
            Repr::Rat(r) => serde_json::Value::String(format_rational(r)),
            Repr::Root(r) => serde_json::json!({
                "minpoly": r.minpoly().coeffs().iter().map(format_rational).collect::<Vec<_>>(),
                "root": r.index(),
            }),
            Repr::Field(_) => unreachable!(),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, AlgebraError> {
        match v {
            serde_json::Value::String(s) => Ok(Self::from_rational(super::rational::parse_rational(s)?)),
            serde_json::Value::Number(n) => {
                Ok(Self::from_rational(super::rational::parse_rational(&n.to_string())?))
            }
            serde_json::Value::Object(o) => {
                let mp = o
                    .get("minpoly")
                    .and_then(|m| m.as_array())
                    .ok_or_else(|| AlgebraError::Parse("missing `minpoly` array".into()))?;
                let k = o
                    .get("root")
                    .and_then(|k| k.as_u64())
                    .ok_or_else(|| AlgebraError::Parse("missing `root` index".into()))?;
                let mut cs = Vec::with_capacity(mp.len());
                for c in mp {
                    cs.push(match c {
                        serde_json::Value::String(s) => super::rational::parse_rational(s)?,
                        serde_json::Value::Number(n) => super::rational::parse_rational(&n.to_string())?,
                        _ => return Err(AlgebraError::Parse("minpoly coefficients must be rationals".into())),
                    });
                }
                let p = RatPoly::new(cs);
                if p.degree() < 1 {
                    return Err(AlgebraError::Parse("minpoly must have degree >= 1".into()));
                }
                Self::root_of(&p, k as usize).map_err(|e| AlgebraError::Parse(e.to_string()))
            }
            _ => Err(AlgebraError::Parse(format!("cannot read an algebraic number from {v}"))),
        }
    }
}

fn sgn(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(r) => write!(f, "{}", format_rational(r)),
            _ => write!(f, "~{}", self.to_decimal(12)),
        }
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(r) => write!(f, "{}", format_rational(r)),
            _ => write!(f, "{}", self.to_json()),
        }
    }
}

impl PartialEq for RealAlgebraic {
    fn eq(&self, o: &Self) -> bool {
        alg_compare(self, o) == Ordering::Equal
    }
}

impl Eq for RealAlgebraic {}

impl PartialOrd for RealAlgebraic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for RealAlgebraic {
    fn cmp(&self, o: &Self) -> Ordering {
        alg_compare(self, o)
    }
}

impl From<Rational> for RealAlgebraic {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for RealAlgebraic {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $call:ident) => {
        impl std::ops::$tr<&RealAlgebraic> for &RealAlgebraic {
            type Output = RealAlgebraic;
            fn $m(self, o: &RealAlgebraic) -> RealAlgebraic {
                self.$call(o)
            }
        }
        impl std::ops::$tr<RealAlgebraic> for RealAlgebraic {
            type Output = RealAlgebraic;
            fn $m(self, o: RealAlgebraic) -> RealAlgebraic {
                (&self).$call(&o)
            }
        }
    };
}

forward_op!(Add, add, add);
forward_op!(Sub, sub, sub);
forward_op!(Mul, mul, mul);

impl std::ops::Neg for &RealAlgebraic {
    type Output = RealAlgebraic;
    fn neg(self) -> RealAlgebraic {
        RealAlgebraic::neg(self)
    }
}

// ---- towers -------------------------------------------------------------

/// Lifts every number into one common tower.
pub(crate) fn lift_all(xs: &[&RealAlgebraic]) -> (Arc<Tower>, Vec<Elem>) {
    let mut t = Tower::empty();
    // Prefer the deepest tower as the base so that prefixes are reused.
    let mut best: Option<&Arc<Tower>> = None;
    for x in xs {
        if let Repr::Field(f) = &x.0 {
            if best.is_none_or(|b| f.tower.len() > b.len()) {
                best = Some(&f.tower);
            }
        }
    }
    if let Some(b) = best {
        t = b.clone();
    }
    let mut out: Vec<Option<Elem>> = vec![None; xs.len()];
    // towers first, so that later roots are recognised as generators
    for (i, x) in xs.iter().enumerate() {
        if let Repr::Field(f) = &x.0 {
            if f.tower.is_prefix_of(&t) {
                out[i] = Some(f.elem.clone());
            } else {
                let (nt, images) = Tower::merge(&t, &f.tower);
                let shared = t.gens.iter().zip(&f.tower.gens).take_while(|(a, b)| Arc::ptr_eq(a, b)).count();
                out[i] = Some(nt.map_elem(&f.elem, &images, shared));
                t = nt;
            }
        }
    }
    for (i, x) in xs.iter().enumerate() {
        match &x.0 {
            Repr::Rat(r) => out[i] = Some(Elem::Rat(r.clone())),
            Repr::Root(r) => {
                let (nt, e) = t.adjoin_root(r);
                t = nt;
                out[i] = Some(e);
            }
            Repr::Field(_) => {}
        }
    }
    (t, out.into_iter().map(|e| e.unwrap()).collect())
}

fn field_to_root(t: &Arc<Tower>, e: &Elem) -> RealAlgebraic {
    let cp = t.norm_charpoly(e);
    let p = cp.squarefree_part().to_primitive();
    let chain = SturmChain::new(&p);
    let mut bits = 16;
    loop {
        let i = t.enclose_width(e, bits);
        match unique_root_in(&p, &chain, &i.lo, &i.hi) {
            Some(Isolated::Exact(r)) => return RealAlgebraic::from_rational(r),
            Some(Isolated::Open(lo, hi)) => {
                return RealAlgebraic::from_root(RootNum::from_open(p, Some(chain), lo, hi));
            }
            None => bits += bits / 2,
        }
    }
}

impl RealAlgebraic {
    /// Wraps a tower element; exposed for the linear algebra module.
    pub(crate) fn field(t: &Arc<Tower>, e: Elem) -> Self {
        Self::from_field(t, e)
    }
}

// ---- operations -----------------------------------------------------------

fn scale_root(r: &RootNum, s: &Rational) -> RealAlgebraic {
    if s.is_zero() {
        return RealAlgebraic::zero();
    }
    let (lo, hi) = r.interval();
    let p = r.poly.to_rat().scale_arg_inv(s).to_primitive();
    let (a, b) = if s.is_positive() { (lo * s, hi * s) } else { (hi * s, lo * s) };
    RealAlgebraic(Repr::Root(Arc::new(RootNum::from_open(p, None, a, b))))
}

fn shift_root(r: &RootNum, s: &Rational) -> RealAlgebraic {
    let (lo, hi) = r.interval();
    let p = r.poly.to_rat().shift(&-s).to_primitive();
    RealAlgebraic(Repr::Root(Arc::new(RootNum::from_open(p, None, lo + s, hi + s))))
}

fn interval_op(a: &Interval, b: &Interval, op: AlgOp) -> Option<Interval> {
    match op {
        AlgOp::Add => Some(a.add(b)),
        AlgOp::Sub => Some(a.sub(b)),
        AlgOp::Mul => Some(a.mul(b)),
        AlgOp::Div => a.div(b),
    }
}

/// Root-with-root arithmetic through resultants.
fn root_binop(a: &RootNum, b: &RootNum, op: AlgOp) -> Result<RealAlgebraic, AlgebraError> {
    if op == AlgOp::Div && b.cmp_rational(&Rational::zero()) == Ordering::Equal {
        return Err(AlgebraError::DivisionByZero);
    }
    let r = match op {
        AlgOp::Add => sum_poly(&a.poly, &b.poly),
        AlgOp::Sub => diff_poly(&a.poly, &b.poly),
        AlgOp::Mul => prod_poly(&a.poly, &b.poly),
        AlgOp::Div => quot_poly(&a.poly, &b.poly),
    };
    let p = r.to_rat().squarefree_part().to_primitive();
    if p.degree() == 1 {
        let rr = -Rational::new(p.get(0), p.get(1));
        return Ok(RealAlgebraic::from_rational(rr));
    }
    let chain = SturmChain::new(&p);
    let mut bits = 12u32;
    loop {
        let (al, ah) = a.refine_bits(bits);
        let (bl, bh) = b.refine_bits(bits);
        if let Some(e) = interval_op(&Interval::new(al, ah), &Interval::new(bl, bh), op) {
            match unique_root_in(&p, &chain, &e.lo, &e.hi) {
                Some(Isolated::Exact(q)) => return Ok(RealAlgebraic::from_rational(q)),
                Some(Isolated::Open(lo, hi)) => {
                    return Ok(RealAlgebraic::from_root(RootNum::from_open(p, Some(chain), lo, hi)));
                }
                None => {}
            }
        }
        bits += bits / 2;
    }
}

pub fn alg_arith(x: &RealAlgebraic, y: &RealAlgebraic, op: AlgOp) -> Result<RealAlgebraic, AlgebraError> {
    use Repr::*;
    match (&x.0, &y.0) {
        (Rat(a), Rat(b)) => Ok(RealAlgebraic::from_rational(match op {
            AlgOp::Add => a + b,
            AlgOp::Sub => a - b,
            AlgOp::Mul => a * b,
            AlgOp::Div => {
                if b.is_zero() {
                    return Err(AlgebraError::DivisionByZero);
                }
                a / b
            }
        })),
        (Root(r), Rat(q)) => Ok(match op {
            AlgOp::Add => shift_root(r, q),
            AlgOp::Sub => shift_root(r, &-q),
            AlgOp::Mul => scale_root(r, q),
            AlgOp::Div => {
                if q.is_zero() {
                    return Err(AlgebraError::DivisionByZero);
                }
                scale_root(r, &q.recip())
            }
        }),
        (Rat(q), Root(r)) => Ok(match op {
            AlgOp::Add => shift_root(r, q),
            AlgOp::Sub => RealAlgebraic::from_rational(q.clone()).add(&y.neg()),
            AlgOp::Mul => scale_root(r, q),
            AlgOp::Div => {
                let inv = y.inv()?;
                return alg_arith(x, &inv, AlgOp::Mul);
            }
        }),
        (Root(a), Root(b)) => {
            if Arc::ptr_eq(a, b) || a.equals(b) {
                match op {
                    AlgOp::Add => return Ok(scale_root(a, &Rational::from_integer(BigInt::from(2)))),
                    AlgOp::Sub => return Ok(RealAlgebraic::zero()),
                    AlgOp::Div => return Ok(RealAlgebraic::one()),
                    AlgOp::Mul => {}
                }
            }
            root_binop(a, b, op)
        }
        _ => {
            let (t, e) = lift_all(&[x, y]);
            let r = match op {
                AlgOp::Add => t.add(&e[0], &e[1]),
                AlgOp::Sub => t.sub(&e[0], &e[1]),
                AlgOp::Mul => t.mul(&e[0], &e[1]),
                AlgOp::Div => t.div(&e[0], &e[1])?,
            };
            Ok(RealAlgebraic::from_field(&t, r))
        }
    }
}

pub fn alg_sign(x: &RealAlgebraic) -> i8 {
    x.sign()
}

/// Exact comparison; equality of root representations is decided through
/// the gcd of their defining polynomials.
pub fn alg_compare(x: &RealAlgebraic, y: &RealAlgebraic) -> Ordering {
    use Repr::*;
    match (&x.0, &y.0) {
        (Rat(a), Rat(b)) => a.cmp(b),
        (Root(r), Rat(q)) => r.cmp_rational(q),
        (Rat(q), Root(r)) => r.cmp_rational(q).reverse(),
        (Root(a), Root(b)) => a.cmp_root(b),
        _ => {
            // Separate quickly when enclosures are disjoint.
            for b in [16u32, 48] {
                let ix = x.enclosure(b);
                let iy = y.enclosure(b);
                if ix.hi < iy.lo {
                    return Ordering::Less;
                }
                if iy.hi < ix.lo {
                    return Ordering::Greater;
                }
            }
            let (t, e) = lift_all(&[x, y]);
            match t.sign(&t.sub(&e[0], &e[1])) {
                -1 => Ordering::Less,
                0 => Ordering::Equal,
                _ => Ordering::Greater,
            }
        }
    }
}

/// Nonnegative square root.
pub fn alg_sqrt(x: &RealAlgebraic) -> Result<RealAlgebraic, AlgebraError> {
    match x.sign() {
        0 => return Ok(RealAlgebraic::zero()),
        -1 => return Err(AlgebraError::NegativeSqrt),
        _ => {}
    }
    match &x.0 {
        Repr::Rat(r) => {
            if let Some(q) = exact_sqrt(r) {
                return Ok(RealAlgebraic::from_rational(q));
            }
            let p = IntPoly::new(vec![-r.numer().clone() * r.denom(), BigInt::zero(), r.denom() * r.denom()]);
            let p = p.primitive();
            sqrt_select(&p, x)
        }
        Repr::Root(r) => {
            // p(t^2)
            let mut c = vec![BigInt::zero(); 2 * r.poly.coeffs().len() - 1];
            for (i, v) in r.poly.coeffs().iter().enumerate() {
                c[2 * i] = v.clone();
            }
            let p = IntPoly::new(c).to_rat().squarefree_part().to_primitive();
            sqrt_select(&p, x)
        }
        Repr::Field(f) => {
            let (t, e) = f.tower.adjoin_sqrt(&f.elem)?;
            Ok(RealAlgebraic::from_field(&t, e))
        }
    }
}

fn sqrt_select(p: &IntPoly, x: &RealAlgebraic) -> Result<RealAlgebraic, AlgebraError> {
    let chain = SturmChain::new(p);
    let mut bits = 16u32;
    loop {
        let i = x.enclosure(bits);
        if i.lo.is_positive() {
            let s = i.sqrt(bits + 2);
            match unique_root_in(p, &chain, &s.lo, &s.hi) {
                Some(Isolated::Exact(q)) => return Ok(RealAlgebraic::from_rational(q)),
                Some(Isolated::Open(lo, hi)) => {
                    return Ok(RealAlgebraic::from_root(RootNum::from_open(p.clone(), Some(chain), lo, hi)))
                }
                None => {}
            }
        }
        bits += bits / 2;
    }
}

/// Decimal string within 10^-digits of `x`.
pub fn alg_to_decimal(x: &RealAlgebraic, digits: u32) -> String {
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), digits as usize));
    // enclosure width below half a unit in the last place
    let w = scale.recip() / Rational::from_integer(BigInt::from(2));
    let (lo, hi) = x.refine(&w);
    let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
    let v = &mid * &scale;
    let n = round_half_even(v.numer(), v.denom());
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let d = digits as usize;
    let body = if d == 0 {
        s
    } else {
        let s = format!("{:0>width$}", s, width = d + 1);
        let (ip, fp) = s.split_at(s.len() - d);
        format!("{ip}.{fp}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// All real roots of the square-free part of `p`, ascending.
pub fn real_roots(p: &RatPoly) -> Vec<RealAlgebraic> {
    if p.degree() < 1 {
        return vec![];
    }
    let q = p.squarefree_part().to_primitive();
    let chain = SturmChain::new(&q);
    isolate_sqfree(&q, &chain)
        .into_iter()
        .map(|i| match i {
            Isolated::Exact(r) => RealAlgebraic::from_rational(r),
            Isolated::Open(lo, hi) => RealAlgebraic::from_root(RootNum::from_open(q.clone(), Some(chain.clone()), lo, hi)),
        })
        .collect()
}

/// Root isolation result: distinct real roots ascending with their
/// multiplicities in `p`.
#[derive(Clone, Debug)]
pub struct IsolationResult {
    pub roots: Vec<RealAlgebraic>,
    pub multiplicities: Vec<u32>,
}

/// Isolates the real roots of `p` with multiplicities from the square-free
/// factorisation. Rational roots are returned as rationals and each
/// irrational root is defined by its square-free factor with the rational
/// linear factors removed.
pub fn isolate_real_roots(p: &RatPoly) -> IsolationResult {
    let mut all: Vec<(RealAlgebraic, u32)> = Vec::new();
    for (f, mult) in p.squarefree_decomposition() {
        let q = f.to_primitive();
        let chain = SturmChain::new(&q);
        let iso = isolate_sqfree(&q, &chain);
        let mut rational = Vec::new();
        let mut open = Vec::new();
        for i in iso {
            match i {
                Isolated::Exact(r) => rational.push(r),
                Isolated::Open(lo, hi) => {
                    let rn = RootNum::from_open(q.clone(), Some(chain.clone()), lo, hi);
                    match rn.detect_rational() {
                        Some(r) => rational.push(r),
                        None => open.push(rn),
                    }
                }
            }
        }
        let mut red = f.clone();
        for r in &rational {
            red = red.exact_div(&RatPoly::linear_root(r));
        }
        let red = red.to_primitive();
        let red_chain = SturmChain::new(&red);
        for r in rational {
            all.push((RealAlgebraic::from_rational(r), mult));
        }
        for rn in open {
            let (lo, hi) = rn.interval();
            let x = if lo == hi {
                RealAlgebraic::from_rational(lo)
            } else {
                RealAlgebraic(Repr::Root(Arc::new(RootNum::from_open(red.clone(), Some(red_chain.clone()), lo, hi))))
            };
            all.push((x, mult));
        }
    }
    all.sort_by(|a, b| alg_compare(&a.0, &b.0));
    IsolationResult {
        roots: all.iter().map(|a| a.0.clone()).collect(),
        multiplicities: all.iter().map(|a| a.1).collect(),
    }
}

/// Refines the isolating interval of `x` to width <= `w`.
pub fn refine(x: &RealAlgebraic, w: &Rational) -> (Rational, Rational) {
    x.refine(w)
}

/// Rational upper bound of |x| within 2^-bits.
pub fn abs_upper(x: &RealAlgebraic, bits: u32) -> Rational {
    let i = x.enclosure(bits);
    i.mag()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::rational::{int, rat};

    fn ra(n: i64) -> RealAlgebraic {
        RealAlgebraic::from_int(n)
    }

    fn sqrt(n: i64) -> RealAlgebraic {
        ra(n).sqrt().unwrap()
    }

    #[test]
    fn sqrt2_plus_sqrt3_minpoly() {
        let s = sqrt(2).add(&sqrt(3));
        assert_eq!(s.minpoly(), RatPoly::from_ints(&[1, 0, -10, 0, 1]));
        assert_eq!(s.root_index(), 4);
        assert_eq!(s.to_decimal(6), "3.146264");
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let s = sqrt(2);
        let sq = s.mul(&s);
        assert!(sq.is_rational());
        assert_eq!(sq, ra(2));
        assert_eq!(sq.cmp_exact(&ra(2)), Ordering::Equal);
        assert_eq!(s.sub(&s), ra(0));
    }

    #[test]
    fn decimals() {
        assert_eq!(sqrt(2).to_decimal(4), "1.4142");
        assert_eq!(RealAlgebraic::from_rational(rat(1, 3)).to_decimal(3), "0.333");
        assert_eq!(ra(0).to_decimal(5), "0.00000");
        assert_eq!(sqrt(2).neg().to_decimal(3), "-1.414");
    }

    #[test]
    fn compare_and_sign() {
        assert_eq!(sqrt(2).cmp_exact(&RealAlgebraic::from_rational(rat(3, 2))), Ordering::Less);
        assert_eq!(sqrt(2).add(&sqrt(3)).cmp_exact(&sqrt(10)), Ordering::Less);
        assert_eq!(sqrt(8).cmp_exact(&sqrt(2).mul(&ra(2))), Ordering::Equal);
        assert_eq!(sqrt(2).sub(&sqrt(3)).sign(), -1);
        assert!(ra(-1).sqrt().is_err());
        assert!(ra(0).inv().is_err());
        assert!(sqrt(2).sub(&sqrt(2)).inv().is_err());
    }

    #[test]
    fn isolation_with_multiplicities() {
        // (x - 1)^2 (x^2 - 2)
        let p = RatPoly::from_ints(&[-1, 1]).pow(2).mul(&RatPoly::from_ints(&[-2, 0, 1]));
        let r = isolate_real_roots(&p);
        assert_eq!(r.roots.len(), 3);
        assert_eq!(r.multiplicities, vec![1, 2, 1]);
        assert_eq!(r.roots[1], ra(1));
        assert_eq!(r.roots[2], sqrt(2));
        assert_eq!(r.roots[0].minpoly(), RatPoly::from_ints(&[-2, 0, 1]));
        assert!(isolate_real_roots(&RatPoly::from_ints(&[1, 0, 1])).roots.is_empty());
    }

    #[test]
    fn rational_roots_are_normalised() {
        let p = RatPoly::new(vec![rat(-1, 3), int(1)]).mul(&RatPoly::from_ints(&[1, 0, 1]));
        let r = real_roots(&p);
        assert_eq!(r.len(), 1);
        assert!(r[0].is_rational());
        assert_eq!(r[0].as_rational(), Some(&rat(1, 3)));
    }

    #[test]
    fn field_and_root_mixing() {
        let a = sqrt(2);
        let (t, mut es) = lift_all(&[&a]);
        let e = es.pop().unwrap();
        let f = RealAlgebraic::field(&t, e);
        let prod = f.mul(&sqrt(3));
        assert_eq!(prod, sqrt(6));
        assert_eq!(prod.minpoly(), RatPoly::from_ints(&[-6, 0, 1]));
        let q = prod.div(&sqrt(6)).unwrap();
        assert_eq!(q, ra(1));
    }

    #[test]
    fn json_roundtrip() {
        let s = sqrt(2).add(&sqrt(3));
        let j = s.to_json();
        let back = RealAlgebraic::from_json(&j).unwrap();
        assert_eq!(back, s);
        let r = RealAlgebraic::from_json(&serde_json::json!("-3/6")).unwrap();
        assert_eq!(r, RealAlgebraic::from_rational(rat(-1, 2)));
    }
}
