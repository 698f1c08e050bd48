//! Fused stencil on integer mantissas with round-half-even and exact
//! residual accounting.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::mat::{identity, mat_vec, Mat};
use super::{cell_point, Region, SchemeData, Topology, Work};
use crate::algebraic::{common_denominator, round_half_even, Rational};
use crate::problem::HyperbolicProblem;

/// Integer numerators over the common denominator `den`.
pub(crate) struct IntStencil {
    den: BigInt,
    den128: Option<i128>,
    plus: Vec<Vec<Vec<BigInt>>>,
    minus: Vec<Vec<Vec<BigInt>>>,
    /// K0 for each class combination, indexed `c0 + 4 c1`.
    center: Vec<Vec<Vec<BigInt>>>,
    plus128: Option<Vec<Vec<Vec<i128>>>>,
    minus128: Option<Vec<Vec<Vec<i128>>>>,
    center128: Option<Vec<Vec<Vec<i128>>>>,
}

fn scale(m: &Mat, den: &BigInt) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| row.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect())
        .collect()
}

const SMALL: u32 = 96;

fn small(ms: &[Vec<Vec<BigInt>>]) -> Option<Vec<Vec<Vec<i128>>>> {
    ms.iter()
        .map(|m| {
            m.iter()
                .map(|r| r.iter().map(|x| if x.bits() <= SMALL as u64 { x.to_i128() } else { None }).collect())
                .collect()
        })
        .collect()
}

impl IntStencil {
    pub fn new(sd: &SchemeData, m: usize) -> Self {
        let st = sd.stencil();
        let n = sd.n;
        let classes = if m == 2 { 16 } else { 4 };
        let mut centers: Vec<Mat> = Vec::with_capacity(classes);
        for c in 0..classes {
            let mut k0 = identity(n);
            for d in 0..m {
                let cls = if d == 0 { c % 4 } else { c / 4 };
                let cm = &st.center[d][cls];
                for a in 0..n {
                    for b in 0..n {
                        k0[a][b] += &cm[a][b];
                    }
                }
            }
            centers.push(k0);
        }
        let all = st.plus.iter().chain(&st.minus).chain(&centers).flat_map(|m| m.iter().flatten());
        let den = common_denominator(all);
        let plus: Vec<_> = st.plus.iter().map(|m| scale(m, &den)).collect();
        let minus: Vec<_> = st.minus.iter().map(|m| scale(m, &den)).collect();
        let center: Vec<_> = centers.iter().map(|m| scale(m, &den)).collect();
        let den128 = if den.bits() <= SMALL as u64 { den.to_i128() } else { None };
        let (plus128, minus128, center128) = if den128.is_some() {
            (small(&plus), small(&minus), small(&center))
        } else {
            (None, None, None)
        };
        Self { den, den128, plus, minus, center, plus128, minus128, center128 }
    }
}

fn class(topo: Topology, c: i64, lo: i64, hi: i64) -> usize {
    if topo != Topology::Boundary {
        return 0;
    }
    match (c == lo, c == hi - 1) {
        (true, true) => 3,
        (true, false) => 1,
        (false, true) => 2,
        _ => 0,
    }
}

fn rhe128(num: i128, den: i128) -> i128 {
    let q = num.div_euclid(den);
    let r = num.rem_euclid(den);
    let twice = 2 * r;
    if twice > den || (twice == den && q & 1 == 1) {
        q + 1
    } else {
        q
    }
}

struct Cell<'a> {
    center: &'a [i128],
    nbrs: Vec<(usize, bool, &'a [i128])>,
}

fn acc128(k: &IntStencil, cls: usize, cell: &Cell, n: usize) -> Option<Vec<i128>> {
    let c = &k.center128.as_ref()?[cls];
    let pl = k.plus128.as_ref()?;
    let mi = k.minus128.as_ref()?;
    let mut out = vec![0i128; n];
    for (a, o) in out.iter_mut().enumerate() {
        let mut s: i128 = 0;
        for b in 0..n {
            s = s.checked_add(c[a][b].checked_mul(cell.center[b])?)?;
        }
        for (d, is_plus, v) in &cell.nbrs {
            let km = if *is_plus { &pl[*d] } else { &mi[*d] };
            for b in 0..n {
                s = s.checked_add(km[a][b].checked_mul(v[b])?)?;
            }
        }
        *o = s;
    }
    Some(out)
}

fn acc_big(k: &IntStencil, cls: usize, cell: &Cell, n: usize) -> Vec<BigInt> {
    let c = &k.center[cls];
    (0..n)
        .map(|a| {
            let mut s = BigInt::zero();
            for b in 0..n {
                s += &c[a][b] * BigInt::from(cell.center[b]);
            }
            for (d, is_plus, v) in &cell.nbrs {
                let km = if *is_plus { &k.plus[*d] } else { &k.minus[*d] };
                for b in 0..n {
                    s += &km[a][b] * BigInt::from(v[b]);
                }
            }
            s
        })
        .collect()
}

/// One fused step; returns new mantissas and `sum r^2 * 4^bits` (residuals
/// in units of 2^-bits), or `None` on mantissa overflow.
#[allow(clippy::too_many_arguments)]
pub(crate) fn step(
    p: &HyperbolicProblem,
    sd: &SchemeData,
    k: &IntStencil,
    prev: &Work<i128>,
    next: Region,
    topo: Topology,
    t_l: &Rational,
    bits: u32,
) -> Option<(Work<i128>, Rational)> {
    let n = p.n;
    let m = p.m;
    let pr = prev.region;
    let wrap = |i: i64, j: i64| -> (i64, i64) {
        if topo == Topology::Periodic {
            (i.rem_euclid(pr.len(0) as i64), j.rem_euclid(pr.len(1) as i64))
        } else {
            (i, j)
        }
    };
    let two_p = BigInt::one() << bits as usize;
    let rows: Vec<Option<(Vec<i128>, BigInt, Rational)>> = (next.lo[0]..next.hi[0])
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(next.len(1) * n);
            let mut sq_int = BigInt::zero();
            let mut sq_rat = Rational::zero();
            for j in next.lo[1]..next.hi[1] {
                let c0 = class(topo, i, pr.lo[0], pr.hi[0]);
                let c1 = if m == 2 { class(topo, j, pr.lo[1], pr.hi[1]) } else { 0 };
                let cls = c0 + 4 * c1;
                let mut nbrs = Vec::with_capacity(2 * m);
                for d in 0..m {
                    let cc = if d == 0 { c0 } else { c1 };
                    let (ip, jp) = if d == 0 { (i + 1, j) } else { (i, j + 1) };
                    let (im, jm) = if d == 0 { (i - 1, j) } else { (i, j - 1) };
                    if cc == 0 || cc == 1 {
                        let (a, b) = wrap(ip, jp);
                        nbrs.push((d, true, prev.at(a, b)));
                    }
                    if cc == 0 || cc == 2 {
                        let (a, b) = wrap(im, jm);
                        nbrs.push((d, false, prev.at(a, b)));
                    }
                }
                let cell = Cell { center: prev.at(i, j), nbrs };
                let src: Option<Vec<Rational>> = p.f.as_ref().map(|f| {
                    let mut pt = vec![t_l.clone()];
                    pt.extend(cell_point(p, i, j, &sd.h));
                    let g = mat_vec(&sd.a_inv, &f.eval(&pt).expect("arity"));
                    g.into_iter().map(|x| x * &sd.tau).collect()
                });
                match (&src, k.den128, acc128(k, cls, &cell, n)) {
                    (None, Some(d), Some(acc)) => {
                        for a in acc {
                            let q = rhe128(a, d);
                            let e = q.checked_mul(d).and_then(|x| x.checked_sub(a));
                            match e {
                                Some(e) if e.unsigned_abs() < (1u128 << 63) => {
                                    sq_int += BigInt::from(e) * BigInt::from(e);
                                }
                                _ => {
                                    let e = BigInt::from(q) * BigInt::from(d) - BigInt::from(a);
                                    sq_int += &e * &e;
                                }
                            }
                            row.push(q);
                        }
                    }
                    _ => {
                        let acc = acc_big(k, cls, &cell, n);
                        for (a, acc_a) in acc.into_iter().enumerate() {
                            match &src {
                                None => {
                                    let q = round_half_even(&acc_a, &k.den);
                                    let e = &q * &k.den - &acc_a;
                                    sq_int += &e * &e;
                                    row.push(q.to_i128()?);
                                }
                                Some(s) => {
                                    let sn = s[a].numer();
                                    let sdn = s[a].denom();
                                    let num = &acc_a * sdn + sn * &k.den * &two_p;
                                    let den = &k.den * sdn;
                                    let q = round_half_even(&num, &den);
                                    let e = Rational::new(&q * &den - &num, den);
                                    sq_rat += &e * &e;
                                    row.push(q.to_i128()?);
                                }
                            }
                        }
                    }
                }
            }
            Some((row, sq_int, sq_rat))
        })
        .collect();
    let mut data = Vec::with_capacity(next.count() * n);
    let mut sq_int = BigInt::zero();
    let mut sq_rat = Rational::zero();
    for r in rows {
        let (row, a, b) = r?;
        data.extend(row);
        sq_int += a;
        sq_rat += b;
    }
    let d2 = &k.den * &k.den;
    let total = Rational::new(sq_int, d2) + sq_rat;
    Some((Work { region: next, n, data }, total))
}
