//! Towers Q(θ_0)(θ_1)…(θ_r) of real number fields, each generator given by
//! a monic defining polynomial over the levels below it and an isolating
//! enclosure of its real value.
//!
//! Defining polynomials need not be irreducible. Every one of them vanishes
//! at the generator's value, so every element expression denotes a unique
//! real number; when a computation meets a zero divisor the defining
//! polynomial is replaced by the factor that vanishes at the generator
//! (dynamic evaluation), which keeps zero tests and inverses exact.

use std::sync::{Arc, Mutex, RwLock};

use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::poly::RatPoly;
use super::rational::{exact_sqrt, pow2, Rational};
use super::roots::RootNum;
use super::AlgebraError;

/// Element of a tower: a rational, or a polynomial in generator `level`
/// whose coefficients live strictly below `level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Elem {
    Rat(Rational),
    Poly { level: usize, c: Vec<Elem> },
}

impl Elem {
    pub(crate) fn zero() -> Elem {
        Elem::Rat(Rational::zero())
    }

    pub(crate) fn one() -> Elem {
        Elem::Rat(Rational::one())
    }

    pub(crate) fn is_syntactic_zero(&self) -> bool {
        matches!(self, Elem::Rat(r) if r.is_zero())
    }

    /// Top level plus one (0 for rationals).
    pub(crate) fn depth(&self) -> usize {
        match self {
            Elem::Rat(_) => 0,
            Elem::Poly { level, .. } => level + 1,
        }
    }

    fn as_upoly(&self, level: usize) -> Vec<Elem> {
        match self {
            Elem::Poly { level: l, c } if *l == level => c.clone(),
            e if e.is_syntactic_zero() => vec![],
            e => vec![e.clone()],
        }
    }
}

/// Build a level-`level` element from coefficients, trimming zeros.
fn mk(level: usize, mut c: Vec<Elem>) -> Elem {
    while c.last().is_some_and(|e| e.is_syntactic_zero()) {
        c.pop();
    }
    match c.len() {
        0 => Elem::zero(),
        1 => c.pop().unwrap(),
        _ => Elem::Poly { level, c },
    }
}

fn trim(v: &mut Vec<Elem>) {
    while v.last().is_some_and(|e| e.is_syntactic_zero()) {
        v.pop();
    }
}

pub(crate) enum GenKind {
    Root(Arc<RootNum>),
    Sqrt(Elem),
}

pub(crate) struct Generator {
    pub(crate) kind: GenKind,
    defining: RwLock<Arc<Vec<Elem>>>,
    encl: Mutex<Option<(u32, Interval)>>,
}

impl Generator {
    fn new(kind: GenKind, defining: Vec<Elem>) -> Arc<Self> {
        Arc::new(Generator { kind, defining: RwLock::new(Arc::new(defining)), encl: Mutex::new(None) })
    }
}

pub(crate) struct Tower {
    pub(crate) gens: Vec<Arc<Generator>>,
}

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tower(degrees {:?})", (0..self.gens.len()).map(|k| self.deg(k)).collect::<Vec<_>>())
    }
}

const QUICK_BITS: [u32; 2] = [24, 64];

impl Tower {
    pub(crate) fn empty() -> Arc<Tower> {
        Arc::new(Tower { gens: vec![] })
    }

    pub(crate) fn len(&self) -> usize {
        self.gens.len()
    }

    fn def(&self, k: usize) -> Arc<Vec<Elem>> {
        self.gens[k].defining.read().unwrap().clone()
    }

    fn set_def(&self, k: usize, p: Vec<Elem>) {
        debug_assert!(p.last().is_some_and(|e| *e == Elem::one()));
        *self.gens[k].defining.write().unwrap() = Arc::new(p);
    }

    pub(crate) fn deg(&self, k: usize) -> usize {
        self.gens[k].defining.read().unwrap().len() - 1
    }

    pub(crate) fn gen_elem(&self, k: usize) -> Elem {
        self.reduce_top(k, vec![Elem::zero(), Elem::one()])
    }

    pub(crate) fn prefix(self: &Arc<Self>, len: usize) -> Arc<Tower> {
        if len >= self.gens.len() {
            return self.clone();
        }
        Arc::new(Tower { gens: self.gens[..len].to_vec() })
    }

    pub(crate) fn is_prefix_of(&self, o: &Tower) -> bool {
        self.gens.len() <= o.gens.len() && self.gens.iter().zip(&o.gens).all(|(a, b)| Arc::ptr_eq(a, b))
    }

    fn common_prefix(&self, o: &Tower) -> usize {
        self.gens.iter().zip(&o.gens).take_while(|(a, b)| Arc::ptr_eq(a, b)).count()
    }

    // ---- ring operations ------------------------------------------------

    pub(crate) fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            _ => {
                let (la, lb) = (a.depth(), b.depth());
                if la > lb {
                    let Elem::Poly { level, c } = a else { unreachable!() };
                    let mut c = c.clone();
                    c[0] = self.add(&c[0], b);
                    mk(*level, c)
                } else if lb > la {
                    self.add(b, a)
                } else {
                    let (Elem::Poly { level, c: ca }, Elem::Poly { c: cb, .. }) = (a, b) else { unreachable!() };
                    let n = ca.len().max(cb.len());
                    let z = Elem::zero();
                    let c = (0..n).map(|i| self.add(ca.get(i).unwrap_or(&z), cb.get(i).unwrap_or(&z))).collect();
                    mk(*level, c)
                }
            }
        }
    }

    pub(crate) fn neg(&self, a: &Elem) -> Elem {
        match a {
            Elem::Rat(x) => Elem::Rat(-x),
            Elem::Poly { level, c } => Elem::Poly { level: *level, c: c.iter().map(|e| self.neg(e)).collect() },
        }
    }

    pub(crate) fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub(crate) fn scale(&self, a: &Elem, s: &Rational) -> Elem {
        if s.is_zero() {
            return Elem::zero();
        }
        match a {
            Elem::Rat(x) => Elem::Rat(x * s),
            Elem::Poly { level, c } => Elem::Poly { level: *level, c: c.iter().map(|e| self.scale(e, s)).collect() },
        }
    }

    pub(crate) fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        if a.is_syntactic_zero() || b.is_syntactic_zero() {
            return Elem::zero();
        }
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (Elem::Rat(x), _) => self.scale(b, x),
            (_, Elem::Rat(y)) => self.scale(a, y),
            _ => {
                let (la, lb) = (a.depth(), b.depth());
                if la > lb {
                    let Elem::Poly { level, c } = a else { unreachable!() };
                    mk(*level, c.iter().map(|e| self.mul(e, b)).collect())
                } else if lb > la {
                    self.mul(b, a)
                } else {
                    let (Elem::Poly { level, c: ca }, Elem::Poly { c: cb, .. }) = (a, b) else { unreachable!() };
                    let prod = self.up_mul(ca, cb);
                    self.reduce_top(*level, prod)
                }
            }
        }
    }

    /// Reduces a level-`k` coefficient list modulo the defining polynomial.
    fn reduce_top(&self, k: usize, mut c: Vec<Elem>) -> Elem {
        let p = self.def(k);
        let d = p.len() - 1;
        trim(&mut c);
        while c.len() > d {
            let t = c.pop().unwrap();
            let i = c.len();
            if !t.is_syntactic_zero() {
                for j in 0..d {
                    let s = self.mul(&t, &p[j]);
                    c[i - d + j] = self.sub(&c[i - d + j], &s);
                }
            }
            trim(&mut c);
        }
        mk(k, c)
    }

    /// Fully reduces every level against the current defining polynomials.
    pub(crate) fn deep_reduce(&self, e: &Elem) -> Elem {
        match e {
            Elem::Rat(_) => e.clone(),
            Elem::Poly { level, c } => {
                let c = c.iter().map(|x| self.deep_reduce(x)).collect();
                self.reduce_top(*level, c)
            }
        }
    }

    // ---- polynomials over the field below a level -------------------------

    fn up_mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![Elem::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_syntactic_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let p = self.mul(x, y);
                out[i + j] = self.add(&out[i + j], &p);
            }
        }
        trim(&mut out);
        out
    }

    fn up_sub(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let n = a.len().max(b.len());
        let z = Elem::zero();
        let mut out: Vec<Elem> = (0..n).map(|i| self.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
        trim(&mut out);
        out
    }

    fn up_scale(&self, a: &[Elem], s: &Elem) -> Vec<Elem> {
        let mut out: Vec<Elem> = a.iter().map(|x| self.mul(x, s)).collect();
        trim(&mut out);
        out
    }

    /// Drops leading coefficients that vanish at the tower point.
    fn up_normalize(&self, mut a: Vec<Elem>) -> Vec<Elem> {
        loop {
            trim(&mut a);
            match a.last() {
                Some(l) if self.is_zero(l) => {
                    a.pop();
                }
                _ => return a,
            }
        }
    }

    /// Division by a normalised divisor.
    fn up_divmod(&self, a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        let db = b.len() - 1;
        let mut r = a.to_vec();
        if r.len() <= db {
            return (vec![], r);
        }
        let inv = self.inv_nonzero(&b[db]);
        let mut q = vec![Elem::zero(); r.len() - db];
        for i in (db..r.len()).rev() {
            let t = self.mul(&r[i], &inv);
            if t.is_syntactic_zero() {
                continue;
            }
            for j in 0..db {
                let s = self.mul(&t, &b[j]);
                r[i - db + j] = self.sub(&r[i - db + j], &s);
            }
            q[i - db] = t;
        }
        r.truncate(db);
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    /// Monic gcd `g` of `a` and `b` together with `s` such that
    /// `s a ≡ g (mod b)`. Both inputs normalised, `b` nonzero.
    fn up_gcd_ext(&self, a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        let mut r0 = b.to_vec();
        let mut r1 = self.up_normalize(a.to_vec());
        let mut t0: Vec<Elem> = vec![];
        let mut t1: Vec<Elem> = vec![Elem::one()];
        while !r1.is_empty() {
            let (q, r) = self.up_divmod(&r0, &r1);
            let r = self.up_normalize(r);
            let t = self.up_sub(&t0, &self.up_mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t);
        }
        let c = self.inv_nonzero(r0.last().expect("gcd of nonzero polynomial"));
        (self.up_scale(&r0, &c), self.up_scale(&t0, &c))
    }

    // ---- zero tests, inverses, signs -----------------------------------

    /// Exact test whether `e` denotes zero.
    pub(crate) fn is_zero(&self, e: &Elem) -> bool {
        let e = self.deep_reduce(e);
        let (level, c) = match &e {
            Elem::Rat(r) => return r.is_zero(),
            Elem::Poly { level, c } => (*level, c.clone()),
        };
        for b in QUICK_BITS {
            if self.enclose(&e, b).sign().is_some_and(|s| s != 0) {
                return false;
            }
        }
        let a = self.up_normalize(c);
        match a.len() {
            0 => return true,
            1 => return self.is_zero(&a[0]),
            _ => {}
        }
        let p = self.def(level);
        let (g, _) = self.up_gcd_ext(&a, &p);
        if g.len() == 1 {
            return false;
        }
        let (e2, _) = self.up_divmod(&p, &g);
        let ge = mk(level, g.clone());
        let ee = mk(level, e2.clone());
        let mut bits = 16;
        loop {
            if self.enclose(&ge, bits).sign().is_some_and(|s| s != 0) {
                self.set_def(level, e2);
                return false;
            }
            if self.enclose(&ee, bits).sign().is_some_and(|s| s != 0) {
                self.set_def(level, g);
                return true;
            }
            bits += bits / 2;
        }
    }

    pub(crate) fn sign(&self, e: &Elem) -> i8 {
        if let Elem::Rat(r) = e {
            return if r.is_zero() { 0 } else if r.is_positive() { 1 } else { -1 };
        }
        if let Some(s) = self.enclose(e, 32).sign() {
            return s;
        }
        if self.is_zero(e) {
            return 0;
        }
        let mut bits = 64;
        loop {
            if let Some(s) = self.enclose(e, bits).sign() {
                if s != 0 {
                    return s;
                }
            }
            bits *= 2;
        }
    }

    pub(crate) fn inv(&self, e: &Elem) -> Result<Elem, AlgebraError> {
        if self.is_zero(e) {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.inv_nonzero(e))
    }

    /// Inverse of an element known to be nonzero.
    fn inv_nonzero(&self, e: &Elem) -> Elem {
        match e {
            Elem::Rat(r) => Elem::Rat(r.recip()),
            Elem::Poly { level, .. } => {
                let level = *level;
                loop {
                    let p = self.def(level);
                    let red = self.deep_reduce(e);
                    let a = self.up_normalize(red.as_upoly(level));
                    if a.len() == 1 {
                        return self.inv_nonzero(&a[0]);
                    }
                    let (g, s) = self.up_gcd_ext(&a, &p);
                    if g.len() == 1 {
                        return self.reduce_top(level, s);
                    }
                    // `e` is nonzero, so the generator is a root of p / g
                    let (q, _) = self.up_divmod(&p, &g);
                    self.set_def(level, q);
                }
            }
        }
    }

    pub(crate) fn div(&self, a: &Elem, b: &Elem) -> Result<Elem, AlgebraError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    // ---- enclosures ------------------------------------------------------

    /// Rigorous enclosure, rounded outward to about `bits` fractional bits.
    pub(crate) fn enclose(&self, e: &Elem, bits: u32) -> Interval {
        match e {
            Elem::Rat(r) => Interval::point(r.clone()),
            Elem::Poly { level, c } => {
                let th = self.gen_enclosure(*level, bits + 8);
                let mut acc = self.enclose(c.last().unwrap(), bits);
                for ci in c.iter().rev().skip(1) {
                    acc = acc.mul(&th).add(&self.enclose(ci, bits)).round_out(bits + 16);
                }
                acc
            }
        }
    }

    /// Enclosure of width at most 2^-target.
    pub(crate) fn enclose_width(&self, e: &Elem, target: u32) -> Interval {
        let w = pow2(-(target as i64));
        let mut b = target + 8;
        loop {
            let i = self.enclose(e, b);
            if i.width() <= w {
                return i;
            }
            b += b / 2 + 8;
        }
    }

    fn gen_enclosure(&self, k: usize, bits: u32) -> Interval {
        let g = &self.gens[k];
        {
            let m = g.encl.lock().unwrap();
            if let Some((b, i)) = &*m {
                if *b >= bits {
                    return i.clone();
                }
            }
        }
        let iv = match &g.kind {
            GenKind::Root(r) => {
                let (lo, hi) = r.refine_bits(bits);
                Interval::new(lo, hi)
            }
            GenKind::Sqrt(s) => {
                let w = pow2(-(bits as i64));
                let mut b = bits + 4;
                loop {
                    let si = self.enclose_width(s, b);
                    if si.lo.is_positive() {
                        let sq = si.sqrt(bits + 4);
                        if sq.width() <= w {
                            break sq;
                        }
                    }
                    b += b / 2 + 8;
                }
            }
        };
        *g.encl.lock().unwrap() = Some((bits, iv.clone()));
        iv
    }

    // ---- construction ----------------------------------------------------

    /// Tower containing `r` and the element denoting it.
    pub(crate) fn adjoin_root(self: &Arc<Self>, r: &Arc<RootNum>) -> (Arc<Tower>, Elem) {
        for (k, g) in self.gens.iter().enumerate() {
            if let GenKind::Root(x) = &g.kind {
                if Arc::ptr_eq(x, r) || x.same_value_fast(r) {
                    return (self.clone(), self.gen_elem(k));
                }
            }
        }
        let mp = r.minpoly();
        let mut p: Vec<Elem> = mp.coeffs().iter().map(|c| Elem::Rat(c.clone())).collect();
        for (k, g) in self.gens.iter().enumerate() {
            if let GenKind::Root(x) = &g.kind {
                if x.poly == r.poly {
                    p = self.synthetic_div(&p, &self.gen_elem(k));
                }
            }
        }
        if p.len() == 2 {
            return (self.clone(), self.neg(&p[0]));
        }
        let mut gens = self.gens.clone();
        gens.push(Generator::new(GenKind::Root(r.clone()), p));
        let t = Arc::new(Tower { gens });
        let e = t.gen_elem(t.len() - 1);
        (t, e)
    }

    /// Quotient of a monic polynomial by (y - x).
    fn synthetic_div(&self, p: &[Elem], x: &Elem) -> Vec<Elem> {
        let d = p.len() - 1;
        let mut q = vec![Elem::zero(); d];
        q[d - 1] = p[d].clone();
        for i in (1..d).rev() {
            q[i - 1] = self.add(&p[i], &self.mul(x, &q[i]));
        }
        q
    }

    /// Tower containing sqrt(s) (s >= 0) and the element denoting it.
    pub(crate) fn adjoin_sqrt(self: &Arc<Self>, s: &Elem) -> Result<(Arc<Tower>, Elem), AlgebraError> {
        let s = self.deep_reduce(s);
        match self.sign(&s) {
            0 => return Ok((self.clone(), Elem::zero())),
            -1 => return Err(AlgebraError::NegativeSqrt),
            _ => {}
        }
        if let Elem::Rat(r) = &s {
            if let Some(q) = exact_sqrt(r) {
                return Ok((self.clone(), Elem::Rat(q)));
            }
        }
        for (k, g) in self.gens.iter().enumerate() {
            if let GenKind::Sqrt(x) = &g.kind {
                if *x == s {
                    return Ok((self.clone(), self.gen_elem(k)));
                }
            }
        }
        let mut gens = self.gens.clone();
        let def = vec![self.neg(&s), Elem::zero(), Elem::one()];
        gens.push(Generator::new(GenKind::Sqrt(s), def));
        let t = Arc::new(Tower { gens });
        let e = t.gen_elem(t.len() - 1);
        Ok((t, e))
    }

    /// Tower extending `a` that contains every generator of `b`, with the
    /// images of `b`'s generators.
    pub(crate) fn merge(a: &Arc<Tower>, b: &Arc<Tower>) -> (Arc<Tower>, Vec<Elem>) {
        let c = a.common_prefix(b);
        let mut t = a.clone();
        let mut images: Vec<Elem> = (0..c).map(|k| a.gen_elem(k)).collect();
        for g in &b.gens[c..] {
            let (nt, img) = match &g.kind {
                GenKind::Root(r) => t.adjoin_root(r),
                GenKind::Sqrt(s) => {
                    let s2 = t.map_elem(s, &images, c);
                    t.adjoin_sqrt(&s2).expect("radicand is positive")
                }
            };
            t = nt;
            images.push(img);
        }
        (t, images)
    }

    /// Image of an element of another tower sharing the first `shared`
    /// generators, given the images of its generators.
    pub(crate) fn map_elem(&self, e: &Elem, images: &[Elem], shared: usize) -> Elem {
        match e {
            Elem::Rat(_) => e.clone(),
            Elem::Poly { level, .. } if *level < shared => e.clone(),
            Elem::Poly { level, c } => {
                let th = &images[*level];
                let mut acc = self.map_elem(c.last().unwrap(), images, shared);
                for ci in c.iter().rev().skip(1) {
                    acc = self.add(&self.mul(&acc, th), &self.map_elem(ci, images, shared));
                }
                acc
            }
        }
    }

    // ---- rational coordinates -------------------------------------------

    fn dims(&self, levels: usize) -> Vec<usize> {
        (0..levels).map(|k| self.deg(k)).collect()
    }

    fn coords_into(&self, e: &Elem, levels: usize, dims: &[usize], out: &mut [Rational]) {
        if levels == 0 {
            match e {
                Elem::Rat(r) => out[0] = r.clone(),
                _ => unreachable!("element above coordinate range"),
            }
            return;
        }
        let top = levels - 1;
        let stride: usize = dims[..top].iter().product();
        match e {
            Elem::Poly { level, c } if *level == top => {
                for (i, ci) in c.iter().enumerate() {
                    self.coords_into(ci, top, dims, &mut out[i * stride..(i + 1) * stride]);
                }
            }
            _ => self.coords_into(e, top, dims, &mut out[..stride]),
        }
    }

    fn monomial(&self, mut idx: usize, dims: &[usize]) -> Elem {
        let mut e = Elem::one();
        for (k, d) in dims.iter().enumerate() {
            let ex = idx % d;
            idx /= d;
            let g = self.gen_elem(k);
            for _ in 0..ex {
                e = self.mul(&e, &g);
            }
        }
        e
    }

    /// Rational matrix of multiplication by `e` on the subtower formed by
    /// the first `levels` generators (which must cover the levels of `e`).
    pub(crate) fn mult_matrix(&self, e: &Elem, levels: usize) -> Vec<Vec<Rational>> {
        let e = self.deep_reduce(e);
        debug_assert!(e.depth() <= levels);
        let dims = self.dims(levels);
        let n: usize = dims.iter().product();
        let mut m = vec![vec![Rational::zero(); n]; n];
        let mut col = vec![Rational::zero(); n];
        for j in 0..n {
            let b = self.monomial(j, &dims);
            let p = self.deep_reduce(&self.mul(&e, &b));
            for v in col.iter_mut() {
                *v = Rational::zero();
            }
            self.coords_into(&p, levels, &dims, &mut col);
            for i in 0..n {
                m[i][j] = col[i].clone();
            }
        }
        m
    }

    /// Characteristic polynomial over Q of multiplication by `e` on the
    /// subtower spanned by the levels `e` uses.
    pub(crate) fn norm_charpoly(&self, e: &Elem) -> RatPoly {
        let e = self.deep_reduce(e);
        charpoly_hessenberg(self.mult_matrix(&e, e.depth()))
    }
}

/// Characteristic polynomial det(xI - M) of a square rational matrix by
/// reduction to Hessenberg form.
pub(crate) fn charpoly_hessenberg(mut h: Vec<Vec<Rational>>) -> RatPoly {
    let n = h.len();
    for m in 1..n.saturating_sub(1) {
        let Some(i0) = (m + 1..n).chain(std::iter::once(m)).find(|&i| !h[i][m - 1].is_zero()) else {
            continue;
        };
        if h[m][m - 1].is_zero() {
            h.swap(i0, m);
            for row in h.iter_mut() {
                row.swap(i0, m);
            }
        }
        let t = h[m][m - 1].clone();
        for i in m + 1..n {
            if h[i][m - 1].is_zero() {
                continue;
            }
            let u = &h[i][m - 1] / &t;
            for j in 0..n {
                let v = &u * &h[m][j];
                h[i][j] -= v;
            }
            for row in h.iter_mut() {
                let v = &u * &row[i];
                row[m] += v;
            }
        }
    }
    // p_0 = 1; p_k = (x - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1}^{k} h_{j,j-1}) p_{i}
    let mut ps: Vec<RatPoly> = vec![RatPoly::one()];
    for k in 0..n {
        let mut pk = RatPoly::new(vec![-h[k][k].clone(), Rational::one()]).mul(&ps[k]);
        let mut prod = Rational::one();
        for i in (0..k).rev() {
            prod *= &h[i + 1][i];
            if prod.is_zero() {
                break;
            }
            let c = &h[i][k] * &prod;
            pk = pk.sub(&ps[i].scale(&c));
        }
        ps.push(pk);
    }
    ps.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::rational::{int, rat};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn hessenberg_charpoly_known() {
        assert_eq!(charpoly_hessenberg(mat(&[&[2, 1], &[1, 2]])), RatPoly::from_ints(&[3, -4, 1]));
        let m = mat(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(charpoly_hessenberg(m), RatPoly::from_ints(&[-1, 0, 0, 1]));
        let m = mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        // det(xI - M) = x^3 - 16x^2 - 12x + 3
        assert_eq!(charpoly_hessenberg(m), RatPoly::from_ints(&[3, -12, -16, 1]));
    }

    fn sqrt2_tower() -> (Arc<Tower>, Elem) {
        Tower::empty().adjoin_sqrt(&Elem::Rat(int(2))).unwrap()
    }

    #[test]
    fn sqrt_arithmetic_is_exact() {
        let (t, s) = sqrt2_tower();
        let sq = t.mul(&s, &s);
        assert_eq!(sq, Elem::Rat(int(2)));
        let inv = t.inv(&s).unwrap();
        assert_eq!(t.mul(&inv, &s), Elem::one());
        let (t3, r3) = t.adjoin_sqrt(&Elem::Rat(int(3))).unwrap();
        let sum = t3.add(&s, &r3);
        let i = t3.enclose_width(&sum, 20);
        assert!(i.contains(&rat(314626, 100000)) || i.lo < rat(3147, 1000));
        assert_eq!(t3.norm_charpoly(&sum), RatPoly::from_ints(&[1, 0, -10, 0, 1]));
        // sqrt(6) - sqrt2 sqrt3 = 0 is detected by splitting
        let (t6, r6) = t3.adjoin_sqrt(&Elem::Rat(int(6))).unwrap();
        let d = t6.sub(&r6, &t6.mul(&s, &r3));
        assert!(t6.is_zero(&d));
        assert_eq!(t6.deep_reduce(&d), Elem::zero());
        let d2 = t6.add(&r6, &t6.mul(&s, &r3));
        assert!(!t6.is_zero(&d2));
        assert_eq!(t6.sign(&d2), 1);
    }
}
