//! Atomic measures on boxes: their moments, and recovery of an atomic
//! representing measure from truncated moment data.
//!
//! Recovery is a finite feasibility search: nonnegative weights on a
//! uniform grid of candidate atoms inside the box are fitted to the given
//! moments by nonnegative least squares. When the true atoms are off the
//! grid, neighbouring grid atoms are merged and moved by a local
//! least-squares refinement. Every recovered atom lies in the box and every
//! weight is nonnegative by construction.

mod nnls;
mod refine;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::norms::WeightSpec;
use crate::numeric::CompensatedSum;
use crate::polyring::{monomial_basis, MultiIndex};

/// Finitely many atoms `x_j` with weights `w_j >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureFile", into = "MeasureFile")]
pub struct AtomicMeasure {
    n: usize,
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    n: usize,
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<MeasureFile> for AtomicMeasure {
    type Error = Error;

    fn try_from(file: MeasureFile) -> Result<Self> {
        AtomicMeasure::new(file.n, file.atoms, file.weights)
    }
}

impl From<AtomicMeasure> for MeasureFile {
    fn from(m: AtomicMeasure) -> Self {
        MeasureFile {
            n: m.n,
            atoms: m.atoms,
            weights: m.weights,
        }
    }
}

impl AtomicMeasure {
    /// Validates weights and merges repeated atoms by summing their weights.
    pub fn new(n: usize, atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        let mut merged_atoms: Vec<Vec<f64>> = Vec::with_capacity(atoms.len());
        let mut merged_weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (atom, w) in atoms.into_iter().zip(weights) {
            if atom.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: atom.len(),
                });
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidMeasure(format!("weight {w} is not >= 0")));
            }
            if atom.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom {atom:?} is not finite")));
            }
            match merged_atoms.iter().position(|a| *a == atom) {
                Some(k) => merged_weights[k] += w,
                None => {
                    merged_atoms.push(atom);
                    merged_weights.push(w);
                }
            }
        }
        Ok(AtomicMeasure {
            n,
            atoms: merged_atoms,
            weights: merged_weights,
        })
    }

    pub fn dirac(point: Vec<f64>, weight: f64) -> Result<Self> {
        Self::new(point.len(), vec![point], vec![weight])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().copied().collect::<CompensatedSum>().value()
    }

    /// `sum_j w_j x_j^alpha`.
    fn moment(&self, alpha: &MultiIndex) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * alpha.eval_monomial(x))
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Axis-aligned box `prod_i [lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxSpec {
    /// `prod_i [-radius_i, radius_i]`.
    pub fn symmetric(radius: &[f64]) -> Result<Self> {
        if let Some((axis, &value)) = radius.iter().enumerate().find(|(_, r)| !(**r > 0.0)) {
            return Err(Error::InvalidWeight { axis, value });
        }
        Ok(BoxSpec {
            lower: radius.iter().map(|r| -r).collect(),
            upper: radius.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Membership with a relative slack of `1e-12` per axis.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(xi, (lo, hi))| {
                    let slack = 1e-12 * (hi - lo).abs().max(1.0);
                    *xi >= lo - slack && *xi <= hi + slack
                })
    }

    /// Uniform grid with `m` points per axis, endpoints included; the first
    /// axis varies fastest.
    pub fn grid(&self, m: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                (0..n)
                    .map(|i| {
                        let k = idx % m;
                        idx /= m;
                        grid_coordinate(self.lower[i], self.upper[i], k, m)
                    })
                    .collect()
            })
            .collect()
    }
}

fn grid_coordinate(lo: f64, hi: f64, k: usize, m: usize) -> f64 {
    if k + 1 == m {
        hi
    } else {
        lo + (hi - lo) * k as f64 / (m - 1) as f64
    }
}

pub fn moments_of_measure(mu: &AtomicMeasure, max_degree: usize) -> MomentSequence {
    MomentSequence::from_fn(mu.dim(), max_degree, |alpha| mu.moment(alpha))
}

/// The box on which the weighted moment theorems place the measure:
/// `[-r_i, r_i]` for `p = 1` and `p = inf`, `[-r_i^(1/p), r_i^(1/p)]` otherwise.
pub fn box_from_weight(w: &WeightSpec) -> BoxSpec {
    BoxSpec::symmetric(&w.box_radius()).expect("weights are positive")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryConfig {
    pub grid_per_axis: usize,
    /// Accepted `||A w - s||_2`.
    pub tol: f64,
    /// Bound on active-set steps of the least-squares solver.
    pub max_iters: usize,
    /// Weights at or below this are dropped from the reported support.
    pub support_threshold: f64,
    /// Local refinement steps when the grid fit misses `tol`; 0 disables.
    pub refine_iters: usize,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            grid_per_axis: 51,
            tol: 1e-6,
            max_iters: 20_000,
            support_threshold: 1e-10,
            refine_iters: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveredMeasure {
    pub measure: AtomicMeasure,
    /// `||sum_j w_j x_j^alpha - s_alpha||_2` over all stored moments.
    pub residual: f64,
    pub iterations: usize,
    pub grid_points: usize,
}

/// Fits nonnegative weights on the `m^n` grid of `k` to the moments `s`,
/// refining atom positions when the grid alone misses `config.tol`.
pub fn recover_measure(s: &MomentSequence, k: &BoxSpec, config: &RecoveryConfig) -> Result<RecoveredMeasure> {
    if k.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: k.dim(),
        });
    }
    if config.grid_per_axis < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    if !(config.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let basis = monomial_basis(s.dim(), s.max_degree());
    let target: Vec<f64> = s.iter().map(|(_, v)| v).collect();
    let grid = k.grid(config.grid_per_axis);
    // rows are scaled by 1 / max_grid |x^alpha| so that every moment
    // constraint has unit size on the box
    let row_scale: Vec<f64> = basis
        .iter()
        .map(|a| {
            let corner: Vec<f64> = k
                .lower
                .iter()
                .zip(&k.upper)
                .map(|(lo, hi)| lo.abs().max(hi.abs()))
                .collect();
            let m = a.eval_monomial(&corner);
            if m > 0.0 {
                1.0 / m
            } else {
                1.0
            }
        })
        .collect();
    let columns: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|x| {
            basis
                .iter()
                .zip(&row_scale)
                .map(|(a, d)| d * a.eval_monomial(x))
                .collect()
        })
        .collect();
    let scaled_target: Vec<f64> = target.iter().zip(&row_scale).map(|(v, d)| v * d).collect();
    let system = nnls::Columns {
        columns: &columns,
        rows: basis.len(),
    };
    let scale = scaled_target.iter().map(|v| v * v).sum::<f64>().sqrt();
    let outcome = nnls::solve(&system, &scaled_target, 1e-14 * scale, config.max_iters);
    let (mut atoms, mut weights): (Vec<Vec<f64>>, Vec<f64>) = grid
        .iter()
        .zip(&outcome.weights)
        .filter(|(_, w)| **w > config.support_threshold)
        .map(|(x, w)| (x.clone(), *w))
        .unzip();
    let mut residual = moment_residual(&basis, &target, grid.iter().zip(&outcome.weights));
    let mut iterations = outcome.iterations;

    // atoms off the grid: merge neighbouring grid atoms and move them
    if residual > config.tol && config.refine_iters > 0 && !atoms.is_empty() {
        let spacing: Vec<f64> = k
            .lower
            .iter()
            .zip(&k.upper)
            .map(|(lo, hi)| 1.5 * (hi - lo) / (config.grid_per_axis - 1) as f64)
            .collect();
        let (merged_atoms, merged_weights) = refine::merge_nearby(&atoms, &weights, &spacing);
        let refined = refine::refine(
            &basis,
            &row_scale,
            &target,
            k,
            merged_atoms,
            merged_weights,
            1e-14 * scale,
            config.refine_iters,
        );
        iterations += refined.iterations;
        let refined_residual = moment_residual(&basis, &target, refined.atoms.iter().zip(&refined.weights));
        if refined_residual < residual {
            residual = refined_residual;
            (atoms, weights) = refined
                .atoms
                .into_iter()
                .zip(refined.weights)
                .filter(|(_, w)| *w > config.support_threshold)
                .unzip();
        }
    }
    if residual > config.tol {
        return Err(Error::RecoveryFailed { residual, iterations });
    }
    Ok(RecoveredMeasure {
        measure: AtomicMeasure::new(s.dim(), atoms, weights)?,
        residual,
        iterations,
        grid_points: columns.len(),
    })
}

/// `||sum_j w_j x_j^alpha - s_alpha||_2` over the basis.
fn moment_residual<'a, I>(basis: &[MultiIndex], target: &[f64], atoms: I) -> f64
where
    I: IntoIterator<Item = (&'a Vec<f64>, &'a f64)>,
{
    let mut fitted = vec![CompensatedSum::new(); basis.len()];
    for (x, &w) in atoms {
        if w != 0.0 {
            for (acc, a) in fitted.iter_mut().zip(basis) {
                acc.add(w * a.eval_monomial(x));
            }
        }
    }
    fitted
        .iter()
        .zip(target)
        .map(|(f, t)| (f.value() - t).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentResidual {
    pub exp: Vec<u32>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationReport {
    pub residuals: Vec<MomentResidual>,
    pub max_residual: f64,
    /// `None` when no box was supplied.
    pub atoms_in_box: Option<bool>,
    pub pass: bool,
}

/// Compares `s(alpha)` with `sum_j w_j x_j^alpha` for every stored `alpha`
/// and checks the atoms against `k`.
pub fn verify_representation(
    s: &MomentSequence,
    mu: &AtomicMeasure,
    k: Option<&BoxSpec>,
    tol: f64,
) -> Result<RepresentationReport> {
    if mu.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: mu.dim(),
        });
    }
    let residuals: Vec<MomentResidual> = s
        .iter()
        .map(|(alpha, v)| MomentResidual {
            exp: alpha.exponents().to_vec(),
            residual: (v - mu.moment(alpha)).abs(),
        })
        .collect();
    let max_residual = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
    let atoms_in_box = k.map(|b| mu.atoms().iter().all(|x| b.contains(x)));
    Ok(RepresentationReport {
        pass: max_residual <= tol && atoms_in_box.unwrap_or(true),
        residuals,
        max_residual,
        atoms_in_box,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{is_psd_functional, localized_moment_matrix};
    use crate::norms::Exponent;
    use crate::polyring::{MultiIndex, Polynomial};

    #[test]
    fn measure_validation_and_merging() {
        let m = AtomicMeasure::new(1, vec![vec![0.5], vec![0.5], vec![-1.0]], vec![1.0, 2.0, 0.5]).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.weights(), &[3.0, 0.5]);
        assert!(AtomicMeasure::new(1, vec![vec![0.0]], vec![-1.0]).is_err());
        assert!(AtomicMeasure::new(1, vec![vec![0.0]], vec![]).is_err());
        assert!(AtomicMeasure::new(2, vec![vec![0.0]], vec![1.0]).is_err());
    }

    #[test]
    fn moments_examples() {
        let s = moments_of_measure(&AtomicMeasure::dirac(vec![0.0], 1.0).unwrap(), 4);
        for (a, v) in s.iter() {
            assert_eq!(v, if a.degree() == 0 { 1.0 } else { 0.0 });
        }
        let two = AtomicMeasure::new(1, vec![vec![-1.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
        let s = moments_of_measure(&two, 7);
        for (a, v) in s.iter() {
            let k = a.exponents()[0];
            assert_eq!(v, if k % 2 == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn functional_of_moments_is_integration() {
        let mu = AtomicMeasure::new(
            2,
            vec![vec![0.3, -0.7], vec![-1.2, 0.4], vec![0.9, 0.9]],
            vec![0.25, 1.5, 0.75],
        )
        .unwrap();
        let s = moments_of_measure(&mu, 5);
        let f = Polynomial::from_terms(
            2,
            [
                (MultiIndex::new(vec![0, 0]), 1.0),
                (MultiIndex::new(vec![3, 1]), -2.0),
                (MultiIndex::new(vec![0, 5]), 0.5),
                (MultiIndex::new(vec![1, 1]), 3.0),
            ],
        )
        .unwrap();
        let direct: f64 = mu
            .atoms()
            .iter()
            .zip(mu.weights())
            .map(|(x, w)| w * f.eval(x).unwrap())
            .sum();
        assert!((s.apply(&f).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn boxes_from_weights() {
        let fin = |p| Exponent::new(p).unwrap();
        let b = box_from_weight(&WeightSpec::new(fin(1.0), vec![2.0, 3.0]).unwrap());
        assert_eq!(b.lower, vec![-2.0, -3.0]);
        assert_eq!(b.upper, vec![2.0, 3.0]);
        let b = box_from_weight(&WeightSpec::new(fin(2.0), vec![4.0]).unwrap());
        assert_eq!(b.upper, vec![2.0]);
        let b = box_from_weight(&WeightSpec::unweighted(Exponent::Infinite, 3));
        assert_eq!(b.lower, vec![-1.0; 3]);
        assert_eq!(b.upper, vec![1.0; 3]);
    }

    #[test]
    fn grid_includes_endpoints() {
        let b = BoxSpec::symmetric(&[2.0]).unwrap();
        let g = b.grid(5);
        assert_eq!(g, vec![vec![-2.0], vec![-1.0], vec![0.0], vec![1.0], vec![2.0]]);
        assert_eq!(BoxSpec::symmetric(&[1.0, 3.0]).unwrap().grid(4).len(), 16);
    }

    #[test]
    fn recover_single_atom() {
        let s = moments_of_measure(&AtomicMeasure::dirac(vec![0.5], 1.0).unwrap(), 6);
        let k = BoxSpec::symmetric(&[1.0]).unwrap();
        let config = RecoveryConfig {
            grid_per_axis: 101,
            tol: 1e-8,
            ..RecoveryConfig::default()
        };
        let rec = recover_measure(&s, &k, &config).unwrap();
        assert!(rec.residual <= 1e-8);
        let (i, w) = rec
            .measure
            .weights()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((rec.measure.atoms()[i][0] - 0.5).abs() < 1e-12);
        assert!(*w > 0.9, "dominant weight {w}");
        assert!(rec.measure.weights().iter().all(|w| *w >= 0.0));
        assert!(rec.measure.atoms().iter().all(|x| k.contains(x)));
    }

    #[test]
    fn recovery_fails_for_non_psd_data() {
        let s = MomentSequence::from_values(
            1,
            2,
            [
                (MultiIndex::new(vec![0]), 1.0),
                (MultiIndex::new(vec![1]), 0.0),
                (MultiIndex::new(vec![2]), -1.0),
            ],
        )
        .unwrap();
        let k = BoxSpec::symmetric(&[1.0]).unwrap();
        match recover_measure(&s, &k, &RecoveryConfig::default()) {
            Err(Error::RecoveryFailed { residual, .. }) => assert!(residual >= 0.1),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn recover_lebesgue_on_interval() {
        let s = MomentSequence::from_fn(1, 6, |a| {
            let k = a.exponents()[0];
            if k % 2 == 0 {
                2.0 / (k as f64 + 1.0)
            } else {
                0.0
            }
        });
        let k = BoxSpec::symmetric(&[1.0]).unwrap();
        let rec = recover_measure(&s, &k, &RecoveryConfig::default()).unwrap();
        assert!(rec.residual <= 1e-6);
        assert!(rec.measure.len() > 1);
        assert!((rec.measure.mass() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn verification_reports() {
        let mu = AtomicMeasure::new(1, vec![vec![0.2], vec![-0.6]], vec![1.0, 2.0]).unwrap();
        let s = moments_of_measure(&mu, 6);
        let k = BoxSpec::symmetric(&[1.0]).unwrap();
        let exact = verify_representation(&s, &mu, Some(&k), 1e-12).unwrap();
        assert!(exact.max_residual <= 1e-12 && exact.pass);
        assert_eq!(exact.atoms_in_box, Some(true));

        let nudged = AtomicMeasure::new(1, vec![vec![0.3], vec![-0.6]], vec![1.0, 2.0]).unwrap();
        let r = verify_representation(&s, &nudged, Some(&k), 1e-12).unwrap();
        // s(1) changes by exactly 0.1
        assert!((r.max_residual - 0.1).abs() < 1e-12 || r.max_residual > 0.1);
        assert!(!r.pass);

        let outside = AtomicMeasure::dirac(vec![1.5], 1.0).unwrap();
        let r = verify_representation(&moments_of_measure(&outside, 2), &outside, Some(&k), 1e-9).unwrap();
        assert_eq!(r.atoms_in_box, Some(false));
        assert!(!r.pass);
    }

    #[test]
    fn measure_moments_are_psd_and_localizable() {
        let mu = AtomicMeasure::new(
            2,
            vec![vec![0.5, -0.5], vec![-0.25, 0.75], vec![0.0, 0.1]],
            vec![1.0, 0.5, 2.0],
        )
        .unwrap();
        let s = moments_of_measure(&mu, 6);
        for d in 0..=3 {
            assert!(is_psd_functional(&s, d, None).unwrap());
        }
        // 1 - X1^2 - X2^2 >= 0 on all atoms
        let g = Polynomial::constant(2, 1.0)
            .checked_sub(&Polynomial::variable(2, 0).square())
            .unwrap()
            .checked_sub(&Polynomial::variable(2, 1).square())
            .unwrap();
        for d in 0..=2 {
            let m = localized_moment_matrix(&s, &g, d).unwrap();
            assert!(m.min_eigenvalue() >= -1e-9);
        }
    }

    #[test]
    fn off_grid_atom_next_to_boundary_atom() {
        // 0.875 is off the 51-point grid and 1.0 is on the upper bound
        let mu = AtomicMeasure::new(1, vec![vec![0.875], vec![1.0]], vec![0.1, 0.1]).unwrap();
        let s = moments_of_measure(&mu, 6);
        let k = BoxSpec::symmetric(&[1.0]).unwrap();
        let rec = recover_measure(&s, &k, &RecoveryConfig::default()).unwrap();
        assert!(rec.residual <= 1e-6, "{}", rec.residual);
    }
}
