//! Gram-matrix SOS certification by alternating projections.
//!
//! `f` is a sum of squares of polynomials of degree `<= d` iff there is a
//! PSD matrix `G` indexed by the degree-`d` monomial basis `b` with
//! `sum_{b_i + b_j = alpha} G_ij = f_alpha` for every `alpha`. The affine
//! constraints have disjoint supports, so their Frobenius projection is a
//! per-`alpha` uniform shift; the PSD projection lifts eigenvalues to at
//! least `tol`, which steers the iterates into the interior of the cone
//! whenever it meets the affine set there.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{SymmetricEigen, SymmetricMatrix};
use crate::polyring::{monomial_basis, MultiIndex, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SosConfig {
    /// Bound on the coefficient residual and on the negative part of the
    /// Gram spectrum.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SosConfig {
    fn default() -> Self {
        SosConfig {
            tol: 1e-8,
            max_iters: 5000,
        }
    }
}

/// `f = sum_k h_k^2` up to `residual`, witnessed by the PSD Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SosCertificate {
    pub factors: Vec<Polynomial>,
    #[serde(serialize_with = "serialize_basis")]
    pub basis: Vec<MultiIndex>,
    pub gram: SymmetricMatrix,
    pub gram_min_eigenvalue: f64,
    /// `max_alpha |coef(sum_k h_k^2, alpha) - f_alpha|`.
    pub residual: f64,
    pub iterations: usize,
}

fn serialize_basis<S: serde::Serializer>(
    basis: &[MultiIndex],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(basis.iter().map(|a| a.exponents()))
}

impl SosCertificate {
    pub fn sum_of_squares(&self) -> Polynomial {
        let n = self.basis.first().map_or(0, MultiIndex::dim);
        self.factors.iter().fold(Polynomial::zero(n), |acc, h| {
            acc.checked_add(&h.square()).expect("dimension")
        })
    }
}

struct GramStructure {
    basis: Vec<MultiIndex>,
    // for each alpha with |alpha| <= 2d: the ordered pairs (i, j), i <= j,
    // with b_i + b_j = alpha, and the target coefficient
    groups: Vec<(Vec<(usize, usize)>, f64)>,
}

impl GramStructure {
    fn new(f: &Polynomial, d: usize) -> Self {
        let basis = prune_basis(f, monomial_basis(f.dim(), d));
        let mut by_alpha: BTreeMap<MultiIndex, Vec<(usize, usize)>> = BTreeMap::new();
        for i in 0..basis.len() {
            for j in i..basis.len() {
                by_alpha.entry(basis[i].add(&basis[j])).or_default().push((i, j));
            }
        }
        let groups = by_alpha
            .into_iter()
            .map(|(alpha, pairs)| (pairs, f.coef(&alpha)))
            .collect();
        GramStructure { basis, groups }
    }

    fn project_affine(&self, g: &SymmetricMatrix) -> SymmetricMatrix {
        let mut out = g.clone();
        for (pairs, target) in &self.groups {
            let (sum, count) = pairs.iter().fold((0.0, 0usize), |(s, c), &(i, j)| {
                if i == j {
                    (s + g.get(i, j), c + 1)
                } else {
                    (s + 2.0 * g.get(i, j), c + 2)
                }
            });
            let shift = (target - sum) / count as f64;
            for &(i, j) in pairs {
                out.set(i, j, g.get(i, j) + shift);
            }
        }
        out
    }

    fn affine_residual(&self, g: &SymmetricMatrix) -> f64 {
        self.groups
            .iter()
            .map(|(pairs, target)| {
                let sum: f64 = pairs
                    .iter()
                    .map(|&(i, j)| if i == j { g.get(i, j) } else { 2.0 * g.get(i, j) })
                    .sum();
                (sum - target).abs()
            })
            .fold(0.0, f64::max)
    }

    fn factors(&self, eig: &SymmetricEigen) -> Vec<Polynomial> {
        let n = self.basis[0].dim();
        eig.values
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &lambda)| lambda > 0.0)
            .map(|(k, &lambda)| {
                let scale = lambda.sqrt();
                let v = eig.vector(k);
                Polynomial::from_terms(
                    n,
                    self.basis.iter().zip(&v).map(|(b, vi)| (b.clone(), scale * vi)),
                )
                .expect("basis dimension")
            })
            .filter(|h| !h.is_zero())
            .collect()
    }
}

/// Drops monomials `b` whose Gram diagonal is forced to zero: `f` has no
/// `2b` term and no other pair of kept monomials sums to `2b`. A PSD matrix
/// with a zero diagonal entry has a zero row, so `b` cannot occur in any
/// square. Repeats until nothing changes.
fn prune_basis(f: &Polynomial, mut basis: Vec<MultiIndex>) -> Vec<MultiIndex> {
    loop {
        let keep: Vec<bool> = basis
            .iter()
            .map(|b| {
                let twice = b.add(b);
                f.coef(&twice) != 0.0
                    || basis
                        .iter()
                        .any(|c| c != b && basis.iter().any(|e| e.add(c) == twice))
            })
            .collect();
        if keep.iter().all(|k| *k) || keep.iter().all(|k| !k) {
            return basis;
        }
        basis = basis
            .into_iter()
            .zip(keep)
            .filter_map(|(b, k)| k.then_some(b))
            .collect();
    }
}

/// Iterations spent looking for an exactly PSD Gram matrix after one within
/// tolerance was found.
const EXTRA_ITERATIONS: usize = 200;

/// Searches for a PSD Gram matrix of `f` over the degree-`d` basis.
///
/// Failure ([`Error::SosInconclusive`]) only means no certificate was found
/// within `max_iters`; it does not prove `f` is not a sum of squares.
pub fn sos_certify(f: &Polynomial, d: usize, config: &SosConfig) -> Result<SosCertificate> {
    if f.degree() > 2 * d as i64 {
        return Err(Error::DegreeOverflow {
            degree: f.degree() as usize,
            max_degree: 2 * d,
        });
    }
    if !(config.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let structure = GramStructure::new(f, d);
    let mut gram = SymmetricMatrix::zeros(structure.basis.len());
    let mut last_residual = f64::INFINITY;
    // a certificate within tolerance but with clipped negative eigenvalues;
    // kept while a few more iterations look for an exactly PSD one
    let mut fallback: Option<(SosCertificate, usize)> = None;

    for iteration in 1..=config.max_iters {
        let feasible = structure.project_affine(&gram);
        let eig = feasible.eigen();
        if eig.min_value() >= -config.tol {
            let factors = structure.factors(&eig);
            let sum = factors.iter().fold(Polynomial::zero(f.dim()), |acc, h| {
                acc.checked_add(&h.square()).expect("dimension")
            });
            let residual = sum.checked_sub(f)?.max_abs_coef();
            if residual <= config.tol {
                let gram = eig.clipped();
                let certificate = SosCertificate {
                    factors,
                    basis: structure.basis.clone(),
                    gram_min_eigenvalue: gram.min_eigenvalue(),
                    gram,
                    residual,
                    iterations: iteration,
                };
                if eig.min_value() >= 0.0 {
                    return Ok(certificate);
                }
                match &fallback {
                    Some((best, _)) if best.residual <= residual => {}
                    _ => fallback = Some((certificate, iteration)),
                }
            }
        }
        if let Some((_, found)) = &fallback {
            if iteration >= found + EXTRA_ITERATIONS {
                break;
            }
        }
        gram = eig.clipped_at(config.tol);
        last_residual = structure.affine_residual(&gram);
    }
    match fallback {
        Some((certificate, _)) => Ok(certificate),
        None => Err(Error::SosInconclusive {
            residual: last_residual,
            iterations: config.max_iters,
        }),
    }
}
