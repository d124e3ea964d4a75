//! Constructive approximation of polynomials by sums of squares.
//!
//! Two schemes live here:
//!
//! * coefficientwise: for `f(0) >= 0`, `h_i` is the degree-`i` truncation of
//!   the formal square root of `1/i + f`. Then `h_i^2` agrees with `f` on
//!   every coefficient of degree `1..=i` and exceeds it by exactly `1/i` on
//!   the constant term, so `h_i^2 -> f` coefficientwise.
//! * weighted norm: a polynomial nonnegative on the box
//!   `prod_i [-r_i^(1/p), r_i^(1/p)]` is pulled back to the unit box, perturbed
//!   into the SOS cone, certified numerically and pushed forward again. The
//!   scaling keeps `||.||_p` distances on the unit box equal to
//!   `||.||_{p,r}` distances on the original box.

mod boxed;
mod sos;

use serde::Serialize;

pub use boxed::{box_sos_approx, convergence_sweep, BoxApproximation, BoxSosConfig, Perturbation};
pub use sos::{sos_certify, SosCertificate, SosConfig};

use crate::error::{Error, Result};
use crate::norms::WeightSpec;
use crate::polyring::Polynomial;

/// One row of an approximation table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxEntry {
    /// Position in the sweep, strictly increasing.
    pub step: usize,
    /// The sequence index `i` or the perturbation size `eps`.
    pub parameter: f64,
    /// Perturbation degree `D` used for weighted-norm approximants.
    pub degree: Option<usize>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    /// `None` for the coefficientwise topology.
    pub target: Option<WeightSpec>,
    pub entries: Vec<ApproxEntry>,
}

impl ApproxReport {
    /// Whether recorded distances never increase by more than `tol`.
    pub fn is_non_increasing(&self, tol: f64) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[1].distance <= w[0].distance + tol)
    }
}

/// `h_i`: the degree-`i` truncation of the formal power series of
/// `sqrt(1/i + f)`.
pub fn sqrt_square_approx(f: &Polynomial, i: usize) -> Result<Polynomial> {
    if i == 0 {
        return Err(Error::InvalidArgument("sequence index i must be >= 1".into()));
    }
    let f0 = f.constant_term();
    if f0 < 0.0 {
        return Err(Error::NegativeConstant(f0));
    }
    let shifted = f.checked_add(&Polynomial::constant(f.dim(), 1.0 / i as f64))?;
    shifted.series_sqrt(i)
}

/// Largest coefficient error `|coef(h_i^2, alpha) - f_alpha|` over
/// `|alpha| <= max(deg f, 0)` for `i = 1..=i_max`.
pub fn coefficientwise_report(f: &Polynomial, i_max: usize) -> Result<ApproxReport> {
    let horizon = f.degree().max(0) as usize;
    let mut entries = Vec::with_capacity(i_max);
    for i in 1..=i_max {
        let h = sqrt_square_approx(f, i)?;
        let err = h.square().checked_sub(f)?.truncate(horizon).max_abs_coef();
        entries.push(ApproxEntry {
            step: i,
            parameter: i as f64,
            degree: None,
            distance: err,
        });
    }
    Ok(ApproxReport {
        target: None,
        entries,
    })
}
