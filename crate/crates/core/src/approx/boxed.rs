use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sos::{sos_certify, SosCertificate, SosConfig};
use super::{ApproxEntry, ApproxReport};
use crate::error::{Error, Result};
use crate::norms::{weighted_norm, WeightSpec};
use crate::polyring::{MultiIndex, Polynomial};

/// Shape of the perturbation `Theta_D` added on the unit box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perturbation {
    /// `1 + sum_i sum_{k=1..D} X_i^(2k) / k!`.
    #[default]
    Exponential,
    /// `1 + sum_i X_i^(2D)`.
    HighDegree,
}

impl Perturbation {
    pub fn theta(self, n: usize, degree: usize) -> Polynomial {
        let mut terms = vec![(MultiIndex::zero(n), 1.0)];
        for i in 0..n {
            match self {
                Perturbation::Exponential => {
                    let mut factorial = 1.0;
                    for k in 1..=degree {
                        factorial *= k as f64;
                        let mut e = MultiIndex::zero(n);
                        e.exponents_mut()[i] = 2 * k as u32;
                        terms.push((e, 1.0 / factorial));
                    }
                }
                Perturbation::HighDegree => {
                    let mut e = MultiIndex::zero(n);
                    e.exponents_mut()[i] = 2 * degree as u32;
                    terms.push((e, 1.0));
                }
            }
        }
        Polynomial::from_terms(n, terms).expect("dimension n")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxSosConfig {
    pub sos: SosConfig,
    pub perturbation: Perturbation,
    /// Grid points per axis for the nonnegativity screen.
    pub grid_per_axis: usize,
    /// Random local minimizations for the nonnegativity screen.
    pub multistarts: usize,
    pub seed: u64,
    /// `f >= -screen_tol` is accepted as nonnegative.
    pub screen_tol: f64,
}

impl Default for BoxSosConfig {
    fn default() -> Self {
        BoxSosConfig {
            sos: SosConfig::default(),
            perturbation: Perturbation::Exponential,
            grid_per_axis: 33,
            multistarts: 100,
            seed: 0,
            screen_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxApproximation {
    /// Certificate for the perturbed polynomial on the unit box.
    pub certificate: SosCertificate,
    /// The squares `g~_k = h_k(X / c)` on the original box, `c` the box radius.
    pub factors: Vec<Polynomial>,
    /// `sum_k g~_k^2`.
    pub approximant: Polynomial,
    /// `||f - sum_k g~_k^2||_{p,r}`.
    pub distance: f64,
    /// `||f~ - sum_k h_k^2||_p` on the unit box.
    pub unit_box_distance: f64,
    pub epsilon: f64,
    /// Perturbation degree `D` at which certification succeeded.
    pub degree: usize,
}

/// Approximates `f >= 0` on the box of `w` by a sum of squares in `||.||_{p,r}`.
///
/// `f~ = f(c X)` with `c` the box radius is nonnegative on `[-1, 1]^n`; the
/// candidates `f~ + eps Theta_D` are certified for `D = 2..=d_max` and the
/// first certificate is mapped back with `X -> X / c`.
pub fn box_sos_approx(
    f: &Polynomial,
    w: &WeightSpec,
    eps: f64,
    d_max: usize,
    config: &BoxSosConfig,
) -> Result<BoxApproximation> {
    if f.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: f.dim(),
        });
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be >= 0, got {eps}")));
    }
    if d_max < 2 {
        return Err(Error::InvalidArgument("d_max must be at least 2".into()));
    }
    let radius = w.box_radius();
    screen_nonnegative(f, &radius, config)?;

    let n = f.dim();
    let unit = f.axis_scale(&radius)?;
    let inverse: Vec<f64> = radius.iter().map(|c| 1.0 / c).collect();
    let unit_weight = WeightSpec::unweighted(w.p, n);
    let mut best_residual = f64::INFINITY;

    for degree in 2..=d_max {
        let candidate = unit.checked_add(&config.perturbation.theta(n, degree).scale(eps))?;
        let gram_degree = degree.max((candidate.degree().max(0) as usize).div_ceil(2));
        match sos_certify(&candidate, gram_degree, &config.sos) {
            Ok(certificate) => {
                let sigma = certificate.sum_of_squares();
                let factors = certificate
                    .factors
                    .iter()
                    .map(|h| h.axis_scale(&inverse))
                    .collect::<Result<Vec<_>>>()?;
                let approximant = sigma.axis_scale(&inverse)?;
                let distance = weighted_norm(&f.checked_sub(&approximant)?, w)?;
                let unit_box_distance = weighted_norm(&unit.checked_sub(&sigma)?, &unit_weight)?;
                return Ok(BoxApproximation {
                    certificate,
                    factors,
                    approximant,
                    distance,
                    unit_box_distance,
                    epsilon: eps,
                    degree,
                });
            }
            Err(Error::SosInconclusive { residual, .. }) => {
                best_residual = best_residual.min(residual);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ApproxInconclusive {
        max_degree: d_max,
        residual: best_residual,
    })
}

/// Runs [`box_sos_approx`] along an `eps` schedule; entries keep the
/// schedule order and record the degree `D` reached for each `eps`.
pub fn convergence_sweep(
    f: &Polynomial,
    w: &WeightSpec,
    schedule: &[f64],
    d_max: usize,
    config: &BoxSosConfig,
) -> Result<ApproxReport> {
    let results: Vec<Result<BoxApproximation>> = schedule
        .par_iter()
        .map(|&eps| box_sos_approx(f, w, eps, d_max, config))
        .collect();
    let mut entries = Vec::with_capacity(schedule.len());
    for (step, result) in results.into_iter().enumerate() {
        let approx = result?;
        entries.push(ApproxEntry {
            step: step + 1,
            parameter: approx.epsilon,
            degree: Some(approx.degree),
            distance: approx.distance,
        });
    }
    Ok(ApproxReport {
        target: Some(w.clone()),
        entries,
    })
}

/// Grid scan plus projected-gradient multistart over `prod_i [-c_i, c_i]`.
fn screen_nonnegative(f: &Polynomial, radius: &[f64], config: &BoxSosConfig) -> Result<()> {
    let n = f.dim();
    if n == 0 {
        let v = f.constant_term();
        return if v < -config.screen_tol {
            Err(Error::PreconditionViolated {
                point: vec![],
                value: v,
            })
        } else {
            Ok(())
        };
    }
    let m = config.grid_per_axis.max(2);
    let total = m
        .checked_pow(n as u32)
        .ok_or_else(|| Error::InvalidArgument(format!("grid of {m}^{n} points is too large")))?;
    let grid_point = |mut idx: usize| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (i, xi) in x.iter_mut().enumerate() {
            let k = idx % m;
            idx /= m;
            *xi = -radius[i] + 2.0 * radius[i] * k as f64 / (m - 1) as f64;
        }
        x
    };
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|k| f.eval(&grid_point(k)).expect("dimension"))
        .collect();
    if let Some((k, &v)) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)) {
        if v < -config.screen_tol {
            return Err(Error::PreconditionViolated {
                point: grid_point(k),
                value: v,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let starts: Vec<Vec<f64>> = (0..config.multistarts)
        .map(|_| radius.iter().map(|&c| rng.random_range(-c..=c)).collect())
        .collect();
    let minima: Vec<(Vec<f64>, f64)> = starts
        .into_par_iter()
        .map(|x0| local_minimize(f, x0, radius))
        .collect();
    for (x, v) in minima {
        if v < -config.screen_tol {
            return Err(Error::PreconditionViolated { point: x, value: v });
        }
    }
    Ok(())
}

fn local_minimize(f: &Polynomial, mut x: Vec<f64>, radius: &[f64]) -> (Vec<f64>, f64) {
    let project = |x: &mut Vec<f64>| {
        for (xi, c) in x.iter_mut().zip(radius) {
            *xi = xi.clamp(-c, *c);
        }
    };
    let mut fx = f.eval(&x).expect("dimension");
    let mut step = radius.iter().copied().fold(0.0, f64::max);
    for _ in 0..200 {
        let grad = f.gradient(&x).expect("dimension");
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm == 0.0 {
            break;
        }
        let mut improved = false;
        while step > 1e-14 {
            let mut trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, g)| xi - step * g / gnorm).collect();
            project(&mut trial);
            let ft = f.eval(&trial).expect("dimension");
            if ft < fx {
                x = trial;
                fx = ft;
                improved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, fx)
}
