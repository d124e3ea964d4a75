//! Truncated moment sequences and the moment matrices built from them.
//!
//! A linear functional `l` on `R[X]` is represented by its values on
//! monomials, `s(alpha) = l(X^alpha)`, for all `|alpha| <= max_degree`.
//! `l(h^2) >= 0` for every `h` of degree `<= d` is equivalent to the moment
//! matrix `M_d[alpha, beta] = s(alpha + beta)` being positive semidefinite;
//! inserting a generator `g` gives the localized condition `l(h^2 g) >= 0`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::norms::{dual_weight, Exponent, WeightSpec};
use crate::numeric::CompensatedSum;
use crate::polyring::{check_dim, monomial_basis, MultiIndex, Polynomial};

/// Values `s(alpha)` on the full simplex `|alpha| <= max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    n: usize,
    max_degree: usize,
    basis: Vec<MultiIndex>,
    values: Vec<f64>,
    position: HashMap<MultiIndex, usize>,
}

impl MomentSequence {
    pub fn from_fn<F>(n: usize, max_degree: usize, mut f: F) -> Self
    where
        F: FnMut(&MultiIndex) -> f64,
    {
        let basis = monomial_basis(n, max_degree);
        let values = basis.iter().map(&mut f).collect();
        Self::assemble(n, max_degree, basis, values)
    }

    /// Builds a sequence from explicit `(alpha, s(alpha))` pairs. Every
    /// `alpha` with `|alpha| <= max_degree` must appear exactly once.
    pub fn from_values<I>(n: usize, max_degree: usize, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut given: HashMap<MultiIndex, f64> = HashMap::new();
        for (alpha, v) in values {
            check_dim(n, alpha.dim())?;
            if alpha.degree() > max_degree {
                return Err(Error::DegreeOverflow {
                    degree: alpha.degree(),
                    max_degree,
                });
            }
            if given.insert(alpha.clone(), v).is_some() {
                return Err(Error::DuplicateExponent(alpha.to_string()));
            }
        }
        let basis = monomial_basis(n, max_degree);
        let mut out = Vec::with_capacity(basis.len());
        for alpha in &basis {
            match given.get(alpha) {
                Some(v) => out.push(*v),
                None => return Err(Error::MissingMoment(alpha.to_string())),
            }
        }
        Ok(Self::assemble(n, max_degree, basis, out))
    }

    fn assemble(n: usize, max_degree: usize, basis: Vec<MultiIndex>, values: Vec<f64>) -> Self {
        let position = basis.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        MomentSequence {
            n,
            max_degree,
            basis,
            values,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<f64> {
        self.position.get(alpha).map(|&i| self.values[i])
    }

    /// `(alpha, s(alpha))` in graded-lex order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.basis.iter().zip(self.values.iter().copied())
    }

    pub fn mass(&self) -> f64 {
        self.values[0]
    }

    /// `l(f) = sum_alpha f_alpha s(alpha)`.
    pub fn apply(&self, f: &Polynomial) -> Result<f64> {
        check_dim(self.n, f.dim())?;
        if f.degree() > self.max_degree as i64 {
            return Err(Error::DegreeOverflow {
                degree: f.degree() as usize,
                max_degree: self.max_degree,
            });
        }
        let acc: CompensatedSum = f
            .terms()
            .map(|(a, c)| c * self.values[self.position[a]])
            .collect();
        Ok(acc.value())
    }

    fn at(&self, alpha: &MultiIndex) -> f64 {
        self.values[self.position[alpha]]
    }
}

/// Moment matrix over the graded-lex basis of degree `degree`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentMatrix {
    pub degree: usize,
    #[serde(serialize_with = "serialize_basis")]
    pub basis: Vec<MultiIndex>,
    pub matrix: SymmetricMatrix,
}

fn serialize_basis<S: serde::Serializer>(
    basis: &[MultiIndex],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(basis.iter().map(|a| a.exponents()))
}

impl MomentMatrix {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.min_eigenvalue()
    }

    /// `1e-9 * |trace| / size`.
    pub fn default_tolerance(&self) -> f64 {
        if self.size() == 0 {
            return 0.0;
        }
        1e-9 * self.matrix.trace().abs() / self.size() as f64
    }
}

pub fn moment_matrix(s: &MomentSequence, d: usize) -> Result<MomentMatrix> {
    localized_moment_matrix(s, &Polynomial::constant(s.dim(), 1.0), d)
}

/// `M[alpha, beta] = sum_gamma g_gamma s(alpha + beta + gamma)`.
pub fn localized_moment_matrix(s: &MomentSequence, g: &Polynomial, d: usize) -> Result<MomentMatrix> {
    check_dim(s.dim(), g.dim())?;
    let required = 2 * d + g.degree().max(0) as usize;
    if required > s.max_degree() {
        return Err(Error::InsufficientMoments {
            required,
            available: s.max_degree(),
        });
    }
    let basis = monomial_basis(s.dim(), d);
    let matrix = SymmetricMatrix::from_fn(basis.len(), |i, j| {
        let ab = basis[i].add(&basis[j]);
        let acc: CompensatedSum = g.terms().map(|(gamma, c)| c * s.at(&ab.add(gamma))).collect();
        acc.value()
    });
    Ok(MomentMatrix {
        degree: d,
        basis,
        matrix,
    })
}

/// `l(h^2) >= 0` for all `h` of degree `<= d`, up to `tol` on the smallest
/// eigenvalue of the moment matrix (default [`MomentMatrix::default_tolerance`]).
pub fn is_psd_functional(s: &MomentSequence, d: usize, tol: Option<f64>) -> Result<bool> {
    let m = moment_matrix(s, d)?;
    let tol = tol.unwrap_or_else(|| m.default_tolerance());
    Ok(m.min_eigenvalue() >= -tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorCheck {
    pub generator: String,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticModuleReport {
    pub degree: usize,
    pub generators: Vec<GeneratorCheck>,
    pub pass: bool,
}

/// Checks `l(h^2 g_i) >= 0` for `g_0 = 1`, the given generators and the
/// archimedean generator `N - sum_i X_i^2`, all at matrix degree `d`.
pub fn check_quadratic_module(
    s: &MomentSequence,
    generators: &[Polynomial],
    big_n: f64,
    d: usize,
    tol: Option<f64>,
) -> Result<QuadraticModuleReport> {
    let n = s.dim();
    let mut ball = Polynomial::constant(n, big_n);
    for i in 0..n {
        ball = ball.checked_sub(&Polynomial::variable(n, i).square())?;
    }
    let mut labelled = vec![("1".to_string(), Polynomial::constant(n, 1.0))];
    labelled.extend(generators.iter().map(|g| (g.to_string(), g.clone())));
    labelled.push((format!("{big_n} - |X|^2"), ball));
    check_labelled(s, labelled, d, tol)
}

/// [`check_quadratic_module`] without the archimedean generator: only `1`
/// and the given generators.
pub fn check_localizing(
    s: &MomentSequence,
    generators: &[Polynomial],
    d: usize,
    tol: Option<f64>,
) -> Result<QuadraticModuleReport> {
    let mut labelled = vec![("1".to_string(), Polynomial::constant(s.dim(), 1.0))];
    labelled.extend(generators.iter().map(|g| (g.to_string(), g.clone())));
    check_labelled(s, labelled, d, tol)
}

fn check_labelled(
    s: &MomentSequence,
    labelled: Vec<(String, Polynomial)>,
    d: usize,
    tol: Option<f64>,
) -> Result<QuadraticModuleReport> {
    let mut checks = Vec::with_capacity(labelled.len());
    for (label, g) in labelled {
        let m = localized_moment_matrix(s, &g, d)?;
        let min_eigenvalue = m.min_eigenvalue();
        let tolerance = tol.unwrap_or_else(|| m.default_tolerance());
        checks.push(GeneratorCheck {
            generator: label,
            min_eigenvalue,
            tolerance,
            pass: min_eigenvalue >= -tolerance,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(QuadraticModuleReport {
        degree: d,
        generators: checks,
        pass,
    })
}

/// Dual-space norm of a truncated moment sequence, with its per-degree profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualNormReport {
    /// Norm of `(s(alpha))_{|alpha| <= truncation_degree}` in the dual of `w`.
    pub value: f64,
    pub truncation_degree: usize,
    pub dual_exponent: Exponent,
    pub dual_weight: Vec<f64>,
    /// Contribution of each degree layer: the sup of `|s(alpha)| r'^alpha`
    /// over `|alpha| = k` for a sup-norm dual, otherwise the layer's share
    /// `sum |s(alpha)|^q r'^alpha` of the series.
    pub layers: Vec<f64>,
    /// The top degree layers set a new record: the finite data show no sign
    /// of the decay the summability hypothesis needs.
    pub growing: bool,
}

pub fn dual_norm_of_moments(s: &MomentSequence, w: &WeightSpec) -> Result<DualNormReport> {
    check_dim(s.dim(), w.dim())?;
    let dual = dual_weight(w);
    let mut layers = vec![0.0; s.max_degree() + 1];
    let mut sums = vec![CompensatedSum::new(); s.max_degree() + 1];
    for (alpha, v) in s.iter() {
        let weight = alpha.eval_monomial(&dual.r);
        let k = alpha.degree();
        match dual.q {
            Exponent::Infinite => layers[k] = f64::max(layers[k], v.abs() * weight),
            Exponent::Finite(q) => sums[k].add(v.abs().powf(q) * weight),
        }
    }
    let value = match dual.q {
        Exponent::Infinite => layers.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(q) => {
            for (layer, sum) in layers.iter_mut().zip(&sums) {
                *layer = sum.value();
            }
            let total: CompensatedSum = layers.iter().copied().collect();
            total.value().powf(1.0 / q)
        }
    };
    let growing = match layers.len() {
        0 | 1 => false,
        2 => layers[1] > (1.0 + 1e-9) * layers[0],
        len => {
            let top = layers[len - 1].max(layers[len - 2]);
            let below = layers[..len - 2].iter().copied().fold(0.0, f64::max);
            top > (1.0 + 1e-9) * below
        }
    };
    Ok(DualNormReport {
        value,
        truncation_degree: s.max_degree(),
        dual_exponent: dual.q,
        dual_weight: dual.r,
        layers,
        growing,
    })
}
