//! Characteristic polynomials, spectral decompositions of symmetric
//! matrices and decompositions of symmetric pencils.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use super::gauss::{det_rational, kernel};
use super::{dot, to_rows, ExactMatrix, LinalgError};
use crate::algebraic::tower::{Elem, Tower};
use crate::algebraic::{isolate_real_roots, lift_all, real_roots, RatPoly, RealAlgebraic, Rational};

/// Eigenvalues in ascending order (repeated by multiplicity) and an
/// orthonormal matrix whose columns are matching eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<RealAlgebraic>,
    pub eigenvectors: ExactMatrix,
}

impl SpectralDecomposition {
    pub fn min_eigenvalue(&self) -> Option<&RealAlgebraic> {
        self.eigenvalues.first()
    }

    pub fn max_eigenvalue(&self) -> Option<&RealAlgebraic> {
        self.eigenvalues.last()
    }
}

/// Decomposition of a symmetric pencil (A, B) with A positive definite:
/// `T^T A T = I`, `T^T B T = diag(mu)`, `T = L D K` with `L` the
/// eigenvectors of A, `D = diag(lambda^-1/2)` and `K` orthonormal.
#[derive(Clone, Debug)]
pub struct PencilDecomposition {
    pub a_spec: SpectralDecomposition,
    /// Pencil eigenvalues, ascending, repeated by multiplicity.
    pub mu: Vec<RealAlgebraic>,
    pub t: ExactMatrix,
    pub t_inv: ExactMatrix,
    w: OnceLock<ExactMatrix>,
}

impl PencilDecomposition {
    /// The orthonormal factor `K = D^-1 L^T T`, computed on first use.
    pub fn w(&self) -> &ExactMatrix {
        self.w.get_or_init(|| {
            let l = &self.a_spec.eigenvectors;
            let n = l.rows();
            let mut k = ExactMatrix::zeros(n, n);
            for i in 0..n {
                let s = self.a_spec.eigenvalues[i].sqrt().expect("positive eigenvalue");
                let li = l.col(i);
                for j in 0..n {
                    k.set(i, j, s.mul(&dot(&li, &self.t.col(j))));
                }
            }
            k
        })
    }

    pub fn mu_min(&self) -> &RealAlgebraic {
        self.mu.first().expect("nonempty pencil")
    }

    pub fn mu_max(&self) -> &RealAlgebraic {
        self.mu.last().expect("nonempty pencil")
    }
}

/// p_1..p_n with det(lambda I - A) = lambda^n - p_1 lambda^(n-1) - ... - p_n,
/// from the power sums s_k = tr(A^k) by Newton's identities
/// p_k = (s_k - sum_{j<k} p_j s_{k-j}) / k.
pub fn charpoly_newton(a: &ExactMatrix) -> Result<Vec<RealAlgebraic>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.rows(), a.cols()));
    }
    let n = a.rows();
    let (t, e) = ExactMatrix::lift(&[a]);
    let a = to_rows(&e[0], n, n);
    let mut pw = a.clone();
    let mut s: Vec<Elem> = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            pw = mat_mul(&t, &pw, &a);
        }
        let mut tr = Elem::zero();
        for (i, row) in pw.iter().enumerate() {
            tr = t.add(&tr, &row[i]);
        }
        s.push(tr);
    }
    let mut p: Vec<Elem> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = s[k - 1].clone();
        for j in 1..k {
            acc = t.sub(&acc, &t.mul(&p[j - 1], &s[k - j - 1]));
        }
        p.push(t.scale(&acc, &Rational::new(BigInt::one(), BigInt::from(k))));
    }
    Ok(p.into_iter().map(|x| RealAlgebraic::field(&t, x)).collect())
}

/// Coefficients (lowest degree first, monic) of lambda^n - p_1 lambda^(n-1) - ... - p_n.
pub fn charpoly_coefficients(p: &[RealAlgebraic]) -> Vec<RealAlgebraic> {
    let n = p.len();
    let mut c = vec![RealAlgebraic::zero(); n + 1];
    c[n] = RealAlgebraic::one();
    for (k, pk) in p.iter().enumerate() {
        c[n - k - 1] = pk.neg();
    }
    c
}

fn mat_mul(t: &Tower, a: &[Vec<Elem>], b: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Elem::zero();
                    for (k, bk) in b.iter().enumerate() {
                        if !a[i][k].is_syntactic_zero() && !bk[j].is_syntactic_zero() {
                            acc = t.add(&acc, &t.mul(&a[i][k], &bk[j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Distinct real roots (ascending) and multiplicities of a polynomial with
/// real algebraic coefficients, lowest degree first.
pub fn polynomial_real_roots(c: &[RealAlgebraic]) -> Result<Vec<(RealAlgebraic, u32)>, LinalgError> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(vec![]);
    }
    if let Some(rs) = c.iter().map(|x| x.as_rational().cloned()).collect::<Option<Vec<_>>>() {
        let iso = isolate_real_roots(&RatPoly::new(rs));
        return Ok(iso.roots.into_iter().zip(iso.multiplicities).collect());
    }
    let refs: Vec<&RealAlgebraic> = c.iter().collect();
    let (t, e) = lift_all(&refs);
    let levels = e.iter().map(|x| t.deep_reduce(x).depth()).max().unwrap_or(0);
    let dim: usize = (0..levels).map(|k| t.deg(k)).product();
    let n = c.len() - 1;
    let bound = n * dim;
    // Norm polynomial via evaluation at integers and interpolation.
    let xs: Vec<Rational> = (0..=bound).map(|j| Rational::from_integer(BigInt::from(j))).collect();
    let mut ys = Vec::with_capacity(xs.len());
    for x in &xs {
        let mut v = Elem::zero();
        for ek in e.iter().rev() {
            v = t.add(&t.scale(&v, x), ek);
        }
        ys.push(det_rational(t.mult_matrix(&v, levels)));
    }
    let norm = interpolate(&xs, &ys);
    let mut out = Vec::new();
    for r in real_roots(&norm) {
        let mut all = refs.clone();
        all.push(&r);
        let (t2, e2) = lift_all(&all);
        let x = &e2[n + 1];
        let mut poly: Vec<Elem> = e2[..=n].to_vec();
        let mut mult = 0u32;
        loop {
            let mut v = Elem::zero();
            for pk in poly.iter().rev() {
                v = t2.add(&t2.mul(&v, x), pk);
            }
            if poly.is_empty() || !t2.is_zero(&v) {
                break;
            }
            mult += 1;
            poly = poly
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, pk)| t2.scale(pk, &Rational::from_integer(BigInt::from(i))))
                .collect();
        }
        if mult > 0 {
            out.push((r, mult));
        }
    }
    Ok(out)
}

/// Newton interpolation through the points (xs, ys).
fn interpolate(xs: &[Rational], ys: &[Rational]) -> RatPoly {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = RatPoly::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        p = p.mul(&RatPoly::linear_root(&xs[i])).add(&RatPoly::constant(coef[i].clone()));
    }
    p
}

fn inner(t: &Tower, u: &[Elem], v: &[Elem], gram: Option<&[Vec<Elem>]>) -> Elem {
    let mut acc = Elem::zero();
    match gram {
        None => {
            for (a, b) in u.iter().zip(v) {
                acc = t.add(&acc, &t.mul(a, b));
            }
        }
        Some(g) => {
            for (i, a) in u.iter().enumerate() {
                if a.is_syntactic_zero() {
                    continue;
                }
                let mut gv = Elem::zero();
                for (j, b) in v.iter().enumerate() {
                    gv = t.add(&gv, &t.mul(&g[i][j], b));
                }
                acc = t.add(&acc, &t.mul(a, &gv));
            }
        }
    }
    acc
}

/// Orthonormalises linearly independent vectors for the Euclidean or the
/// `gram` inner product. Orthogonalisation is rational in the tower; each
/// normalisation adjoins one square root.
fn orthonormalize(
    t: &Arc<Tower>,
    vecs: Vec<Vec<Elem>>,
    gram: Option<&[Vec<Elem>]>,
) -> Result<(Arc<Tower>, Vec<Vec<Elem>>), LinalgError> {
    let mut ws: Vec<Vec<Elem>> = Vec::new();
    let mut norms: Vec<Elem> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for (wi, ni) in ws.iter().zip(&norms) {
            let c = t.div(&inner(t, &v, wi, gram), ni)?;
            if c.is_syntactic_zero() {
                continue;
            }
            w = w.iter().zip(wi).map(|(a, b)| t.sub(a, &t.mul(&c, b))).collect();
        }
        let nw = inner(t, &w, &w, gram);
        if t.is_zero(&nw) {
            return Err(LinalgError::Dimension("vectors are linearly dependent".into()));
        }
        ws.push(w);
        norms.push(nw);
    }
    let mut tw = t.clone();
    let mut out = Vec::with_capacity(ws.len());
    for (w, nw) in ws.into_iter().zip(norms) {
        let (t2, s) = tw.adjoin_sqrt(&nw)?;
        let inv = t2.inv(&s)?;
        out.push(w.iter().map(|a| t2.deep_reduce(&t2.mul(a, &inv))).collect());
        tw = t2;
    }
    Ok((tw, out))
}

/// Orthonormal set with the same span (Euclidean inner product).
pub fn gram_schmidt(vectors: &[Vec<RealAlgebraic>]) -> Result<Vec<Vec<RealAlgebraic>>, LinalgError> {
    if vectors.is_empty() {
        return Ok(vec![]);
    }
    let n = vectors[0].len();
    let refs: Vec<&RealAlgebraic> = vectors.iter().flatten().collect();
    let (t, e) = lift_all(&refs);
    let vecs: Vec<Vec<Elem>> = e.chunks(n).map(|c| c.to_vec()).collect();
    let (t2, out) = orthonormalize(&t, vecs, None)?;
    Ok(out.into_iter().map(|v| v.into_iter().map(|x| RealAlgebraic::field(&t2, x)).collect()).collect())
}

/// Eigen-decomposition of a symmetric matrix with exact eigenvalues and
/// orthonormal eigenvectors.
pub fn spectral_decompose(a: &ExactMatrix) -> Result<SpectralDecomposition, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.rows(), a.cols()));
    }
    if !a.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = a.rows();
    let p = charpoly_newton(a)?;
    let roots = polynomial_real_roots(&charpoly_coefficients(&p))?;
    let total: u32 = roots.iter().map(|r| r.1).sum();
    if total as usize != n {
        return Err(LinalgError::Dimension(format!("found {total} real eigenvalues for a {n}x{n} symmetric matrix")));
    }
    let mut eigenvalues = Vec::with_capacity(n);
    let mut cols: Vec<Vec<RealAlgebraic>> = Vec::with_capacity(n);
    for (lam, mult) in roots {
        let mut refs: Vec<&RealAlgebraic> = a.entries().iter().collect();
        refs.push(&lam);
        let (t, e) = lift_all(&refs);
        let le = &e[n * n];
        let mut m = to_rows(&e[..n * n], n, n);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = t.sub(&row[i], le);
        }
        let basis = kernel(&t, m);
        if basis.len() != mult as usize {
            return Err(LinalgError::Defective { got: basis.len(), want: mult as usize });
        }
        let (t2, vs) = orthonormalize(&t, basis, None)?;
        for v in vs {
            cols.push(v.into_iter().map(|x| RealAlgebraic::field(&t2, x)).collect());
            eigenvalues.push(lam.clone());
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: ExactMatrix::from_cols(&cols) })
}

/// Decomposition of the symmetric pencil (A, B), A positive definite.
pub fn pencil_decompose(a: &ExactMatrix, b: &ExactMatrix) -> Result<PencilDecomposition, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.rows(), a.cols()));
    }
    if b.rows() != a.rows() || b.cols() != a.cols() {
        return Err(LinalgError::Dimension("pencil matrices differ in size".into()));
    }
    if !b.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let a_spec = spectral_decompose(a)?;
    if a_spec.min_eigenvalue().is_none_or(|l| l.sign() <= 0) {
        return Err(LinalgError::NotPositiveDefinite);
    }
    let n = a.rows();
    let ainv_b = a.inverse()?.mul(b)?;
    let p = charpoly_newton(&ainv_b)?;
    let roots = polynomial_real_roots(&charpoly_coefficients(&p))?;
    let total: u32 = roots.iter().map(|r| r.1).sum();
    if total as usize != n {
        return Err(LinalgError::Dimension(format!("found {total} real pencil eigenvalues for size {n}")));
    }
    let mut mu = Vec::with_capacity(n);
    let mut cols: Vec<Vec<RealAlgebraic>> = Vec::with_capacity(n);
    let mut inv_rows: Vec<Vec<RealAlgebraic>> = Vec::with_capacity(n);
    for (m_val, mult) in roots {
        let mut refs: Vec<&RealAlgebraic> = a.entries().iter().chain(b.entries().iter()).collect();
        refs.push(&m_val);
        let (t, e) = lift_all(&refs);
        let ae = to_rows(&e[..n * n], n, n);
        let be = &e[n * n..2 * n * n];
        let me = &e[2 * n * n];
        let m: Vec<Vec<Elem>> = (0..n)
            .map(|i| (0..n).map(|j| t.sub(&be[i * n + j], &t.mul(me, &ae[i][j]))).collect())
            .collect();
        let basis = kernel(&t, m);
        if basis.len() != mult as usize {
            return Err(LinalgError::Defective { got: basis.len(), want: mult as usize });
        }
        let (t2, vs) = orthonormalize(&t, basis, Some(&ae))?;
        for v in vs {
            // row of T^{-1} = T^T A
            let row: Vec<Elem> = (0..n)
                .map(|j| {
                    let mut acc = Elem::zero();
                    for (i, vi) in v.iter().enumerate() {
                        acc = t2.add(&acc, &t2.mul(vi, &ae[i][j]));
                    }
                    acc
                })
                .collect();
            inv_rows.push(row.into_iter().map(|x| RealAlgebraic::field(&t2, x)).collect());
            cols.push(v.into_iter().map(|x| RealAlgebraic::field(&t2, x)).collect());
            mu.push(m_val.clone());
        }
    }
    Ok(PencilDecomposition {
        a_spec,
        mu,
        t: ExactMatrix::from_cols(&cols),
        t_inv: ExactMatrix::from_rows(inv_rows),
        w: OnceLock::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{int, rat};

    fn ra(n: i64) -> RealAlgebraic {
        RealAlgebraic::from_int(n)
    }

    #[test]
    fn newton_charpoly_2x2() {
        let a = ExactMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        let p = charpoly_newton(&a).unwrap();
        assert_eq!(p, vec![ra(4), ra(-3)]);
        let c = charpoly_coefficients(&p);
        assert_eq!(c, vec![ra(3), ra(-4), ra(1)]);
    }

    #[test]
    fn truncated_newton_recurrence_is_wrong_for_3x3() {
        // diag(1,2,3): s = 6, 14, 36
        let a = ExactMatrix::from_i64(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]]);
        let p = charpoly_newton(&a).unwrap();
        assert_eq!(p, vec![ra(6), ra(-11), ra(6)]);
        // keeping only the last term: 3 p_3 = s_3 - p_2 s_2
        let truncated = RealAlgebraic::from_rational((int(36) - int(-11) * int(14)) / int(3));
        assert_ne!(truncated, p[2]);
    }

    #[test]
    fn spectral_2x2_rational() {
        let a = ExactMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        let s = spectral_decompose(&a).unwrap();
        assert_eq!(s.eigenvalues, vec![ra(1), ra(3)]);
        let v = &s.eigenvectors;
        let vtv = v.transpose().mul(v).unwrap();
        assert_eq!(vtv, ExactMatrix::identity(2));
        let av = a.mul(v).unwrap();
        let vl = v.mul(&ExactMatrix::diag(&s.eigenvalues)).unwrap();
        assert_eq!(av, vl);
        // eigenvector entries are +-1/sqrt2
        let half = RealAlgebraic::from_rational(rat(1, 2));
        assert_eq!(v.get(0, 0).mul(v.get(0, 0)), half);
    }

    #[test]
    fn spectral_irrational_and_repeated() {
        let a = ExactMatrix::from_i64(&[&[1, 1, 0], &[1, 0, 0], &[0, 0, 2]]);
        let s = spectral_decompose(&a).unwrap();
        let v = &s.eigenvectors;
        assert_eq!(v.transpose().mul(v).unwrap(), ExactMatrix::identity(3));
        assert_eq!(a.mul(v).unwrap(), v.mul(&ExactMatrix::diag(&s.eigenvalues)).unwrap());
        let i3 = ExactMatrix::from_i64(&[&[5, 0, 0], &[0, 5, 0], &[0, 0, 5]]);
        let s = spectral_decompose(&i3).unwrap();
        assert_eq!(s.eigenvalues, vec![ra(5), ra(5), ra(5)]);
        assert!(spectral_decompose(&ExactMatrix::from_i64(&[&[1, 2], &[3, 4]])).is_err());
    }

    #[test]
    fn pencil_examples() {
        let a = ExactMatrix::from_i64(&[&[1, 0], &[0, 4]]);
        let b = ExactMatrix::from_i64(&[&[0, 2], &[2, 0]]);
        let p = pencil_decompose(&a, &b).unwrap();
        assert_eq!(p.mu, vec![ra(-1), ra(1)]);
        let t = &p.t;
        assert_eq!(t.transpose().mul(&a).unwrap().mul(t).unwrap(), ExactMatrix::identity(2));
        assert_eq!(t.transpose().mul(&b).unwrap().mul(t).unwrap(), ExactMatrix::diag(&p.mu));
        assert_eq!(p.t_inv.mul(t).unwrap(), ExactMatrix::identity(2));
        let k = p.w();
        assert_eq!(k.transpose().mul(k).unwrap(), ExactMatrix::identity(2));
        let d = ExactMatrix::diag(
            &p.a_spec.eigenvalues.iter().map(|l| l.sqrt().unwrap().inv().unwrap()).collect::<Vec<_>>(),
        );
        let ldk = p.a_spec.eigenvectors.mul(&d).unwrap().mul(k).unwrap();
        assert_eq!(&ldk, t);
        let not_pd = ExactMatrix::from_i64(&[&[1, 0], &[0, -1]]);
        assert!(matches!(pencil_decompose(&not_pd, &b), Err(LinalgError::NotPositiveDefinite)));
    }

    #[test]
    fn algebraic_entries() {
        let s2 = ra(2).sqrt().unwrap();
        let a = ExactMatrix::from_rows(vec![vec![ra(0), s2.clone()], vec![s2.clone(), ra(0)]]);
        let s = spectral_decompose(&a).unwrap();
        assert_eq!(s.eigenvalues, vec![s2.neg(), s2.clone()]);
        let v = &s.eigenvectors;
        assert_eq!(v.transpose().mul(v).unwrap(), ExactMatrix::identity(2));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = RatPoly::from_ints(&[3, 0, -2, 1]);
        let xs: Vec<Rational> = (0..4).map(int).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }
}
