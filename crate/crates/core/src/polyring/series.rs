use super::Polynomial;
use crate::error::{Error, Result};

impl Polynomial {
    /// Truncated formal square root: `g = g_0 + g_1 + ... + g_D` with `g_j`
    /// homogeneous of degree `j`, such that `g^2 - f` has no terms of degree
    /// `<= D`.
    ///
    /// The forms satisfy `g_0 = sqrt(f_0)` and
    /// `g_d = (f_d - sum_{0<j<d} g_j g_{d-j}) / (2 g_0)`.
    pub fn series_sqrt(&self, degree: usize) -> Result<Polynomial> {
        let f0 = self.constant_term();
        if !(f0 > 0.0) {
            return Err(Error::NonPositiveConstant(f0));
        }
        let g0 = f0.sqrt();
        let inv_two_g0 = 0.5 / g0;
        let mut forms = vec![Polynomial::constant(self.n, g0)];
        for d in 1..=degree {
            let mut rhs = self.homogeneous_part(d);
            // sum_{0<j<d} g_j g_{d-j}; pair (j, d-j) with its mirror
            for j in 1..=(d - 1) / 2 {
                let cross = forms[j].checked_mul(&forms[d - j])?;
                rhs = rhs.checked_sub(&cross.scale(2.0))?;
            }
            if d % 2 == 0 && d >= 2 {
                rhs = rhs.checked_sub(&forms[d / 2].square())?;
            }
            forms.push(rhs.scale(inv_two_g0));
        }
        let mut g = Polynomial::zero(self.n);
        for form in &forms {
            g = g.checked_add(form)?;
        }
        Ok(g)
    }
}
