use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ProblemError;
use crate::algebraic::Rational;

/// One multivariate polynomial as a sorted list of nonzero terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    vars: usize,
    terms: Vec<(Vec<u32>, Rational)>,
}

impl Polynomial {
    /// Merges duplicate exponent vectors and drops zero terms.
    pub fn new(vars: usize, terms: impl IntoIterator<Item = (Rational, Vec<u32>)>) -> Result<Self, ProblemError> {
        let mut map: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (c, e) in terms {
            if e.len() != vars {
                return Err(ProblemError::Arity { expected: vars, got: e.len() });
            }
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        Ok(Self { vars, terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() })
    }

    pub fn zero(vars: usize) -> Self {
        Self { vars, terms: vec![] }
    }

    pub fn constant(vars: usize, c: Rational) -> Self {
        Self::new(vars, [(c, vec![0; vars])]).expect("arity")
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> &[(Vec<u32>, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ProblemError> {
        if point.len() != self.vars {
            return Err(ProblemError::Arity { expected: self.vars, got: point.len() });
        }
        if self.terms.is_empty() {
            return Ok(Rational::zero());
        }
        // cached powers per variable
        let pows: Vec<Vec<Rational>> = (0..self.vars)
            .map(|v| {
                let d = self.degree_in(v) as usize;
                let mut p = Vec::with_capacity(d + 1);
                p.push(Rational::one());
                for k in 0..d {
                    let next = &p[k] * &point[v];
                    p.push(next);
                }
                p
            })
            .collect();
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= &pows[v][k as usize];
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    pub fn partial(&self, var: usize) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
            let mut e2 = e.clone();
            e2[var] -= 1;
            (c * Rational::from_integer(BigInt::from(e[var])), e2)
        });
        Self::new(self.vars, terms).expect("arity")
    }

    pub fn add(&self, o: &Self) -> Self {
        let terms = self.terms.iter().chain(&o.terms).map(|(e, c)| (c.clone(), e.clone()));
        Self::new(self.vars, terms).expect("arity")
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.vars, self.terms.iter().map(|(e, c)| (c * s, e.clone()))).expect("arity")
    }

    pub fn mul(&self, o: &Self) -> Self {
        let terms = self.terms.iter().flat_map(|(e, c)| {
            o.terms.iter().map(move |(f, d)| (c * d, e.iter().zip(f).map(|(a, b)| a + b).collect()))
        });
        Self::new(self.vars, terms).expect("arity")
    }

    pub fn abs_coef_sum(&self) -> Rational {
        self.terms.iter().map(|(_, c)| c.abs()).sum()
    }
}

/// A vector of `n` polynomials over a fixed set of variables:
/// `(x_1..x_m)` for initial data, `(t, x_1..x_m)` for sources.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyData {
    vars: usize,
    components: Vec<Polynomial>,
}

impl PolyData {
    pub fn new(vars: usize, components: Vec<Polynomial>) -> Result<Self, ProblemError> {
        if let Some(p) = components.iter().find(|p| p.vars != vars) {
            return Err(ProblemError::Arity { expected: vars, got: p.vars });
        }
        Ok(Self { vars, components })
    }

    /// Builds from raw `(coef, exps)` term lists, one per component.
    pub fn from_terms(vars: usize, comps: Vec<Vec<(Rational, Vec<u32>)>>) -> Result<Self, ProblemError> {
        let components = comps.into_iter().map(|t| Polynomial::new(vars, t)).collect::<Result<_, _>>()?;
        Ok(Self { vars, components })
    }

    pub fn zero(n: usize, vars: usize) -> Self {
        Self { vars, components: vec![Polynomial::zero(vars); n] }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>, ProblemError> {
        self.components.iter().map(|p| p.eval(point)).collect()
    }

    pub fn partial(&self, var: usize) -> Self {
        Self { vars: self.vars, components: self.components.iter().map(|p| p.partial(var)).collect() }
    }
}

/// Exact evaluation of every component at `point`.
pub fn eval_poly(d: &PolyData, point: &[Rational]) -> Result<Vec<Rational>, ProblemError> {
    d.eval(point)
}

/// Formal partial derivative in variable `axis` (0-based over the
/// polynomial's own variables).
pub fn poly_partial(d: &PolyData, axis: usize) -> PolyData {
    d.partial(axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{int, rat};

    fn p(vars: usize, t: &[(i64, &[u32])]) -> Polynomial {
        Polynomial::new(vars, t.iter().map(|(c, e)| (int(*c), e.to_vec()))).unwrap()
    }

    #[test]
    fn evaluation() {
        let x2y = p(2, &[(1, &[2, 1])]);
        assert_eq!(x2y.eval(&[rat(1, 2), int(1)]).unwrap(), rat(1, 4));
        let f = p(2, &[(1, &[1, 0]), (1, &[0, 1])]);
        assert_eq!(f.eval(&[int(0), rat(1, 4)]).unwrap(), rat(1, 4));
        assert_eq!(Polynomial::zero(3).eval(&[int(5), int(1), int(2)]).unwrap(), int(0));
        assert!(x2y.eval(&[int(1)]).is_err());
    }

    #[test]
    fn derivatives() {
        let x2y = p(2, &[(1, &[2, 1])]);
        assert_eq!(x2y.partial(0), p(2, &[(2, &[1, 1])]));
        assert_eq!(x2y.partial(0).partial(1), p(2, &[(2, &[1, 0])]));
        let tfree = p(2, &[(3, &[0, 2])]);
        assert!(tfree.partial(0).is_zero());
    }

    #[test]
    fn merging() {
        let q = p(1, &[(1, &[1]), (-1, &[1])]);
        assert!(q.is_zero());
        let q = p(1, &[(2, &[1]), (3, &[1]), (1, &[0])]);
        assert_eq!(q.terms().len(), 2);
        assert_eq!(q.abs_coef_sum(), int(6));
    }
}
