//! Sparse multivariate polynomials with real coefficients.
//!
//! A [`Polynomial`] doubles as a finite-support coefficient sequence
//! `alpha -> f_alpha`, which is how the norm and moment modules consume it.

mod index;
mod series;

pub use index::{monomial_basis, MultiIndex};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Sums and products drop a coefficient that is below this fraction of the
/// sum of the absolute values it was accumulated from.
pub const RELATIVE_DROP_TOLERANCE: f64 = 1e-14;

/// A polynomial in `n` variables stored as a graded-lex ordered map from
/// exponents to nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_terms(n, [(MultiIndex::zero(n), c)]).expect("constant term has dimension n")
    }

    /// The monomial `X_i` (zero-based axis).
    pub fn variable(n: usize, axis: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, axis), 1.0)
    }

    pub fn monomial(exp: MultiIndex, coef: f64) -> Self {
        let n = exp.dim();
        Self::from_terms(n, [(exp, coef)]).expect("monomial dimension")
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut map = BTreeMap::new();
        for (exp, coef) in terms {
            check_dim(n, exp.dim())?;
            *map.entry(exp).or_insert(0.0) += coef;
        }
        Ok(Self::without_zeros(n, map))
    }

    /// Like [`Polynomial::from_terms`] but rejects repeated exponents.
    pub fn from_unique_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut map = BTreeMap::new();
        for (exp, coef) in terms {
            check_dim(n, exp.dim())?;
            if map.contains_key(&exp) {
                return Err(Error::DuplicateExponent(exp.to_string()));
            }
            map.insert(exp, coef);
        }
        Ok(Self::without_zeros(n, map))
    }

    // `terms` maps each exponent to (value, sum of absolute contributions);
    // a value that cancelled to rounding level of its own contributions is
    // dropped.
    fn canonical(n: usize, terms: BTreeMap<MultiIndex, (f64, f64)>) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(_, (c, mass))| *c != 0.0 && c.abs() >= RELATIVE_DROP_TOLERANCE * mass)
            .map(|(a, (c, _))| (a, c))
            .collect();
        Polynomial { n, terms }
    }

    // Construction and diagonal maps (scalings) introduce no cancellation,
    // so only exact zeros are removed.
    fn without_zeros(n: usize, mut terms: BTreeMap<MultiIndex, f64>) -> Self {
        terms.retain(|_, c| *c != 0.0);
        Polynomial { n, terms }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree `-1`.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|a| a.degree() as i64).max().unwrap_or(-1)
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&MultiIndex, f64)> + '_ {
        self.terms.iter().map(|(a, c)| (a, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coef(&self, exp: &MultiIndex) -> f64 {
        self.terms.get(exp).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coef(&MultiIndex::zero(self.n))
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.n, other.n)?;
        let mut map: BTreeMap<MultiIndex, (f64, f64)> = self
            .terms
            .iter()
            .map(|(a, c)| (a.clone(), (*c, c.abs())))
            .collect();
        for (exp, c) in &other.terms {
            let e = map.entry(exp.clone()).or_insert((0.0, 0.0));
            e.0 += c;
            e.1 += c.abs();
        }
        Ok(Self::canonical(self.n, map))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.checked_add(&other.scale(-1.0))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.n, other.n)?;
        let mut map: BTreeMap<MultiIndex, (f64, f64)> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = map.entry(a.add(b)).or_insert((0.0, 0.0));
                e.0 += ca * cb;
                e.1 += (ca * cb).abs();
            }
        }
        Ok(Self::canonical(self.n, map))
    }

    pub fn square(&self) -> Polynomial {
        self.checked_mul(self).expect("same dimension")
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        let map = self.terms.iter().map(|(a, c)| (a.clone(), c * factor)).collect();
        Self::without_zeros(self.n, map)
    }

    /// `sum_alpha f_alpha x^alpha`, accumulated in graded-lex order with
    /// compensated summation.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n, x.len())?;
        let acc: CompensatedSum = self.terms.iter().map(|(a, c)| c * a.eval_monomial(x)).collect();
        Ok(acc.value())
    }

    /// Gradient of `f` at `x`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len())?;
        let mut grad = vec![CompensatedSum::new(); self.n];
        for (a, c) in &self.terms {
            for (i, g) in grad.iter_mut().enumerate() {
                let k = a.exponents()[i];
                if k == 0 {
                    continue;
                }
                let mut d = a.clone();
                d.exponents_mut()[i] -= 1;
                g.add(c * k as f64 * d.eval_monomial(x));
            }
        }
        Ok(grad.iter().map(CompensatedSum::value).collect())
    }

    /// `f(c_1 X_1, ..., c_n X_n)`, i.e. `f_alpha -> f_alpha c^alpha`.
    pub fn axis_scale(&self, c: &[f64]) -> Result<Polynomial> {
        check_dim(self.n, c.len())?;
        if let Some((axis, &value)) = c.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositiveScale { axis, value });
        }
        let map = self
            .terms
            .iter()
            .map(|(a, coef)| (a.clone(), coef * a.eval_monomial(c)))
            .collect();
        Ok(Self::without_zeros(self.n, map))
    }

    /// Sum of the terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> Polynomial {
        let map = self
            .terms
            .iter()
            .filter(|(a, _)| a.degree() == d)
            .map(|(a, c)| (a.clone(), *c))
            .collect();
        Polynomial {
            n: self.n,
            terms: map,
        }
    }

    /// Terms of total degree at most `d`.
    pub fn truncate(&self, d: usize) -> Polynomial {
        let map = self
            .terms
            .iter()
            .filter(|(a, _)| a.degree() <= d)
            .map(|(a, c)| (a.clone(), *c))
            .collect();
        Polynomial {
            n: self.n,
            terms: map,
        }
    }

    /// Pointwise map over coefficients (`alpha` is passed along).
    pub fn map_coefficients<F>(&self, mut f: F) -> Polynomial
    where
        F: FnMut(&MultiIndex, f64) -> f64,
    {
        let map = self.terms.iter().map(|(a, c)| (a.clone(), f(a, *c))).collect();
        Self::without_zeros(self.n, map)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (a, c)) in self.terms.iter().enumerate() {
            let sign = if *c < 0.0 { "-" } else { "+" };
            if k == 0 {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let mono = a.to_monomial_string();
            match (mono.is_empty(), mag == 1.0) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}
