//! Gauss-Jordan elimination over a tower with exact pivot tests.

use num_traits::{One, Zero};

use crate::algebraic::tower::{Elem, Tower};
use crate::algebraic::Rational;

/// Reduces `m` in place to reduced row echelon form; returns pivot columns.
pub(crate) fn rref(t: &Tower, m: &mut [Vec<Elem>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !t.is_zero(&m[i][c])) else {
            for row in m.iter_mut().skip(r) {
                row[c] = Elem::zero();
            }
            continue;
        };
        m.swap(r, p);
        let inv = t.inv(&m[r][c]).expect("pivot is nonzero");
        for j in 0..cols {
            m[r][j] = if j == c { Elem::one() } else { t.mul(&m[r][j], &inv) };
        }
        for i in 0..rows {
            if i == r || m[i][c].is_syntactic_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..cols {
                if j == c {
                    m[i][j] = Elem::zero();
                } else if !m[r][j].is_syntactic_zero() {
                    let s = t.mul(&f, &m[r][j]);
                    m[i][j] = t.sub(&m[i][j], &s);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn kernel(t: &Tower, mut m: Vec<Vec<Elem>>) -> Vec<Vec<Elem>> {
    let cols = m.first().map_or(0, |r| r.len());
    let pivots = rref(t, &mut m);
    let mut out = Vec::new();
    for f in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Elem::zero(); cols];
        v[f] = Elem::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = t.neg(&m[i][f]);
        }
        out.push(v.into_iter().map(|e| t.deep_reduce(&e)).collect());
    }
    out
}

pub(crate) fn det(t: &Tower, mut m: Vec<Vec<Elem>>) -> Elem {
    let n = m.len();
    let mut d = Elem::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !t.is_zero(&m[i][c])) else {
            return Elem::zero();
        };
        if p != c {
            m.swap(p, c);
            d = t.neg(&d);
        }
        d = t.mul(&d, &m[c][c]);
        let inv = t.inv(&m[c][c]).expect("pivot is nonzero");
        for i in c + 1..n {
            if m[i][c].is_syntactic_zero() {
                continue;
            }
            let f = t.mul(&m[i][c], &inv);
            for j in c..n {
                let s = t.mul(&f, &m[c][j]);
                m[i][j] = t.sub(&m[i][j], &s);
            }
        }
    }
    t.deep_reduce(&d)
}

pub(crate) fn inverse(t: &Tower, m: Vec<Vec<Elem>>) -> Option<Vec<Vec<Elem>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Elem>> = m
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.extend((0..n).map(|j| if i == j { Elem::one() } else { Elem::zero() }));
            r
        })
        .collect();
    let piv = rref(t, &mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant of a rational matrix.
pub(crate) fn det_rational(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let s = &f * &m[c][j];
                m[i][j] -= s;
            }
        }
    }
    d
}
