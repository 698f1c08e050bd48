//! Resultants over Z[z] by the subresultant pseudo-remainder sequence, and
//! the polynomials whose roots are sums, differences and products of roots.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use super::poly::IntPoly;

/// Polynomial in t with coefficients in Z[z], lowest degree first.
type BiPoly = Vec<IntPoly>;

fn trim(p: &mut BiPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn deg(p: &BiPoly) -> isize {
    p.len() as isize - 1
}

fn lc(p: &BiPoly) -> IntPoly {
    p.last().cloned().unwrap_or_else(IntPoly::zero)
}

fn ipow(p: &IntPoly, e: usize) -> IntPoly {
    p.pow(e)
}

fn prem(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let db = b.len() - 1;
    if a.len() <= db {
        return a.clone();
    }
    let l = lc(b);
    let mut r = a.clone();
    for i in (db..r.len()).rev() {
        let t = r[i].clone();
        for v in r.iter_mut().take(i + 1) {
            *v = v.mul(&l);
        }
        if t.is_zero() {
            continue;
        }
        for j in 0..=db {
            let s = t.mul(&b[j]);
            r[i - db + j] = r[i - db + j].sub(&s);
        }
    }
    r.truncate(db);
    trim(&mut r);
    r
}

fn div_exact(p: &BiPoly, d: &IntPoly) -> BiPoly {
    let mut out: BiPoly = p
        .iter()
        .map(|c| c.exact_div(d).expect("subresultant division must be exact"))
        .collect();
    trim(&mut out);
    out
}

/// Res_t(a, b) in Z[z].
fn resultant(a: &BiPoly, b: &BiPoly) -> IntPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return IntPoly::zero();
    }
    let one = IntPoly::constant(BigInt::one());
    let mut g = one.clone();
    let mut h = one.clone();
    let mut s = 1i32;
    if deg(&a) < deg(&b) {
        std::mem::swap(&mut a, &mut b);
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -1;
        }
    }
    loop {
        let da = deg(&a) as usize;
        let db = deg(&b) as usize;
        if db == 0 {
            let num = ipow(&lc(&b), da);
            let res = if da == 0 {
                one.clone()
            } else {
                num.exact_div(&ipow(&h, da - 1)).expect("exact final division")
            };
            return if s < 0 { res.neg() } else { res };
        }
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = prem(&a, &b);
        if r.is_empty() {
            return IntPoly::zero();
        }
        a = b;
        let d = g.mul(&ipow(&h, delta));
        b = div_exact(&r, &d);
        g = lc(&a);
        h = if delta == 0 {
            h
        } else {
            ipow(&g, delta).exact_div(&ipow(&h, delta - 1)).expect("exact h update")
        };
    }
}

fn constant_coeffs(p: &IntPoly) -> BiPoly {
    p.coeffs().iter().map(|c| IntPoly::constant(c.clone())).collect()
}

/// q(sign_t * t + sign_z * z) expanded as a polynomial in t over Z[z].
fn substitute_linear(q: &IntPoly, sign_t: i64, sign_z: i64) -> BiPoly {
    let d = q.coeffs().len();
    let mut out: BiPoly = vec![IntPoly::zero(); d.max(1)];
    for (k, qk) in q.coeffs().iter().enumerate() {
        if qk.is_zero() {
            continue;
        }
        // (sign_t t + sign_z z)^k = sum_j C(k,j) sign_t^j sign_z^(k-j) t^j z^(k-j)
        for j in 0..=k {
            let mut c = qk * binomial(BigInt::from(k), BigInt::from(j));
            if sign_t < 0 && j % 2 == 1 {
                c = -c;
            }
            if sign_z < 0 && (k - j) % 2 == 1 {
                c = -c;
            }
            let mut zc = vec![BigInt::zero(); k - j + 1];
            zc[k - j] = c;
            out[j] = out[j].add(&IntPoly::new(zc));
        }
    }
    trim(&mut out);
    out
}

/// Polynomial vanishing at every x + y (p(x) = 0, q(y) = 0).
pub(crate) fn sum_poly(p: &IntPoly, q: &IntPoly) -> IntPoly {
    resultant(&constant_coeffs(p), &substitute_linear(q, -1, 1))
}

/// Polynomial vanishing at every x - y.
pub(crate) fn diff_poly(p: &IntPoly, q: &IntPoly) -> IntPoly {
    resultant(&constant_coeffs(p), &substitute_linear(q, 1, -1))
}

/// Polynomial vanishing at every x * y.
pub(crate) fn prod_poly(p: &IntPoly, q: &IntPoly) -> IntPoly {
    let d = q.coeffs().len() - 1;
    // t^d q(z/t) = sum_k q_k z^k t^(d-k)
    let mut b: BiPoly = vec![IntPoly::zero(); d + 1];
    for (k, qk) in q.coeffs().iter().enumerate() {
        let mut zc = vec![BigInt::zero(); k + 1];
        zc[k] = qk.clone();
        b[d - k] = IntPoly::new(zc);
    }
    trim(&mut b);
    resultant(&constant_coeffs(p), &b)
}

/// Polynomial vanishing at 1/y for every nonzero root y.
pub(crate) fn recip_poly(q: &IntPoly) -> IntPoly {
    let mut c = q.coeffs().to_vec();
    c.reverse();
    IntPoly::new(c)
}

/// Polynomial vanishing at every x / y.
pub(crate) fn quot_poly(p: &IntPoly, q: &IntPoly) -> IntPoly {
    prod_poly(p, &recip_poly(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_of_linear_and_quadratics() {
        // Res_t(t^2 - 2, t - 3) = 9 - 2 = 7 up to sign convention
        let a = constant_coeffs(&IntPoly::from_i64(&[-2, 0, 1]));
        let b = constant_coeffs(&IntPoly::from_i64(&[-3, 1]));
        assert_eq!(resultant(&a, &b), IntPoly::from_i64(&[7]));
        // common root gives zero
        let c = constant_coeffs(&IntPoly::from_i64(&[-1, 0, 1]));
        let d = constant_coeffs(&IntPoly::from_i64(&[1, 1]));
        assert!(resultant(&c, &d).is_zero());
    }

    #[test]
    fn sum_of_sqrt2_sqrt3() {
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        let q = IntPoly::from_i64(&[-3, 0, 1]);
        let r = sum_poly(&p, &q).primitive();
        let r = if r.lc() < BigInt::zero() { r.neg() } else { r };
        assert_eq!(r, IntPoly::from_i64(&[1, 0, -10, 0, 1]));
        let m = prod_poly(&p, &q).primitive();
        let m = if m.lc() < BigInt::zero() { m.neg() } else { m };
        assert_eq!(m, IntPoly::from_i64(&[36, 0, -12, 0, 1])); // (z^2 - 6)^2
        let dd = diff_poly(&p, &p).primitive();
        // roots 0 (twice) and +-2 sqrt 2: z^2 (z^2 - 8)
        let dd = if dd.lc() < BigInt::zero() { dd.neg() } else { dd };
        assert_eq!(dd, IntPoly::from_i64(&[0, 0, -8, 0, 1]));
    }

    #[test]
    fn resultant_matches_sylvester_determinant() {
        // Res(x^3 + 2x + 1, 3x^2 - x + 4) via brute force determinant oracle
        let p = IntPoly::from_i64(&[1, 2, 0, 1]);
        let q = IntPoly::from_i64(&[4, -1, 3]);
        let r = resultant(&constant_coeffs(&p), &constant_coeffs(&q));
        let syl = sylvester(&[1, 0, 2, 1], &[3, -1, 4]);
        assert_eq!(r, IntPoly::from_i64(&[syl]));
    }

    // coefficient lists highest degree first
    fn sylvester(p: &[i64], q: &[i64]) -> i64 {
        let m = p.len() - 1;
        let n = q.len() - 1;
        let s = m + n;
        let mut mat = vec![vec![0i64; s]; s];
        for i in 0..n {
            for (j, &c) in p.iter().enumerate() {
                mat[i][i + j] = c;
            }
        }
        for i in 0..m {
            for (j, &c) in q.iter().enumerate() {
                mat[n + i][i + j] = c;
            }
        }
        det_i64(mat)
    }

    fn det_i64(m: Vec<Vec<i64>>) -> i64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut total = 0;
        for c in 0..n {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                .collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            total += sign * m[0][c] * det_i64(minor);
        }
        total
    }
}
