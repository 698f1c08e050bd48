//! Exact matrices over the real algebraic numbers: products, inverses,
//! determinants, characteristic polynomials, kernels, Gram-Schmidt and the
//! spectral and pencil decompositions.

mod gauss;
mod spectral;

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::algebraic::tower::{Elem, Tower};
use crate::algebraic::{abs_upper, lift_all, sqrt_upper_rel, AlgebraError, RealAlgebraic, Rational};

pub use spectral::{
    charpoly_coefficients, charpoly_newton, gram_schmidt, pencil_decompose, polynomial_real_roots,
    spectral_decompose, PencilDecomposition, SpectralDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("eigenspace of dimension {got} for an eigenvalue of multiplicity {want}")]
    Defective { got: usize, want: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Dense row-major matrix of exact real algebraic numbers.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<RealAlgebraic>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<RealAlgebraic>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<RealAlgebraic>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        ExactMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_rationals(rows: &[Vec<Rational>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|v| RealAlgebraic::from_rational(v.clone())).collect()).collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| RealAlgebraic::from_int(v)).collect()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix::new(rows, cols, vec![RealAlgebraic::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, RealAlgebraic::one());
        }
        m
    }

    pub fn diag(d: &[RealAlgebraic]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RealAlgebraic {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RealAlgebraic) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<RealAlgebraic> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<RealAlgebraic> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_cols(cols: &[Vec<RealAlgebraic>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn entries(&self) -> &[RealAlgebraic] {
        &self.data
    }

    pub fn is_rational(&self) -> bool {
        self.data.iter().all(|v| v.is_rational())
    }

    /// Entries as rationals when every entry is rational.
    pub fn to_rationals(&self) -> Option<Vec<Vec<Rational>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).as_rational().cloned()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    fn lift(ms: &[&ExactMatrix]) -> (Arc<Tower>, Vec<Vec<Elem>>) {
        let refs: Vec<&RealAlgebraic> = ms.iter().flat_map(|m| m.data.iter()).collect();
        let (t, all) = lift_all(&refs);
        let mut out = Vec::with_capacity(ms.len());
        let mut it = all.into_iter();
        for m in ms {
            out.push(it.by_ref().take(m.data.len()).collect());
        }
        (t, out)
    }

    fn wrap(t: &Arc<Tower>, rows: usize, cols: usize, e: Vec<Elem>) -> Self {
        ExactMatrix::new(rows, cols, e.into_iter().map(|x| RealAlgebraic::field(t, x)).collect())
    }

    pub fn add(&self, o: &Self) -> Result<Self, LinalgError> {
        self.same_shape(o)?;
        let (t, e) = Self::lift(&[self, o]);
        Ok(Self::wrap(&t, self.rows, self.cols, e[0].iter().zip(&e[1]).map(|(a, b)| t.add(a, b)).collect()))
    }

    pub fn sub(&self, o: &Self) -> Result<Self, LinalgError> {
        self.same_shape(o)?;
        let (t, e) = Self::lift(&[self, o]);
        Ok(Self::wrap(&t, self.rows, self.cols, e[0].iter().zip(&e[1]).map(|(a, b)| t.sub(a, b)).collect()))
    }

    pub fn scale(&self, s: &RealAlgebraic) -> Self {
        let sm = ExactMatrix::new(1, 1, vec![s.clone()]);
        let (t, e) = Self::lift(&[self, &sm]);
        let s = &e[1][0];
        Self::wrap(&t, self.rows, self.cols, e[0].iter().map(|a| t.mul(a, s)).collect())
    }

    fn same_shape(&self, o: &Self) -> Result<(), LinalgError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(LinalgError::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let (t, e) = Self::lift(&[self, o]);
        let (a, b) = (&e[0], &e[1]);
        let mut out = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Elem::zero();
                for k in 0..self.cols {
                    acc = t.add(&acc, &t.mul(&a[i * self.cols + k], &b[k * o.cols + j]));
                }
                out.push(acc);
            }
        }
        Ok(Self::wrap(&t, self.rows, o.cols, out))
    }

    pub fn mul_vec(&self, v: &[RealAlgebraic]) -> Result<Vec<RealAlgebraic>, LinalgError> {
        let m = self.mul(&ExactMatrix::new(v.len(), 1, v.to_vec()))?;
        Ok(m.data)
    }

    pub fn trace(&self) -> RealAlgebraic {
        let (t, e) = Self::lift(&[self]);
        let mut acc = Elem::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = t.add(&acc, &e[0][i * self.cols + i]);
        }
        RealAlgebraic::field(&t, acc)
    }

    pub fn det(&self) -> Result<RealAlgebraic, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let (t, e) = Self::lift(&[self]);
        let m = to_rows(&e[0], self.rows, self.cols);
        Ok(RealAlgebraic::field(&t, gauss::det(&t, m)))
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let (t, e) = Self::lift(&[self]);
        let inv = gauss::inverse(&t, to_rows(&e[0], n, n)).ok_or(LinalgError::Singular)?;
        Ok(Self::wrap(&t, n, n, inv.into_iter().flatten().collect()))
    }

    /// Rank over the field generated by the entries.
    pub fn rank(&self) -> usize {
        let (t, e) = Self::lift(&[self]);
        let mut m = to_rows(&e[0], self.rows, self.cols);
        gauss::rref(&t, &mut m).len()
    }
}

pub(crate) fn to_rows(e: &[Elem], rows: usize, cols: usize) -> Vec<Vec<Elem>> {
    (0..rows).map(|i| e[i * cols..(i + 1) * cols].to_vec()).collect()
}

/// Basis of the kernel of `x` from its reduced row echelon form: one vector
/// per free column, with a 1 in that column.
pub fn null_space_basis(x: &ExactMatrix) -> Vec<Vec<RealAlgebraic>> {
    let (t, e) = ExactMatrix::lift(&[x]);
    let basis = gauss::kernel(&t, to_rows(&e[0], x.rows, x.cols));
    basis.into_iter().map(|v| v.into_iter().map(|a| RealAlgebraic::field(&t, a)).collect()).collect()
}

/// Rational upper bound on the Frobenius norm.
pub fn frobenius_bound(x: &ExactMatrix) -> Rational {
    frobenius_bound_at(x, 40)
}

/// Frobenius bound with irrational entries enclosed to 2^-bits; the
/// square root keeps about 24 significant bits.
pub fn frobenius_bound_at(x: &ExactMatrix, bits: u32) -> Rational {
    let mut s = Rational::zero();
    for v in x.entries() {
        match v.as_rational() {
            Some(r) => s += r * r,
            None => {
                let a = abs_upper(v, bits);
                s += &a * &a;
            }
        }
    }
    sqrt_upper_rel(&s, 24)
}

/// Exact dot product of two vectors.
pub fn dot(u: &[RealAlgebraic], v: &[RealAlgebraic]) -> RealAlgebraic {
    let refs: Vec<&RealAlgebraic> = u.iter().chain(v.iter()).collect();
    let (t, e) = lift_all(&refs);
    let n = u.len();
    let mut acc = Elem::zero();
    for i in 0..n {
        acc = t.add(&acc, &t.mul(&e[i], &e[n + i]));
    }
    RealAlgebraic::field(&t, acc)
}
