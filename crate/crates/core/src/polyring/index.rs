use std::cmp::Ordering;
use std::fmt;

/// Exponent vector `alpha` in `N^n`.
///
/// Ordering is graded lexicographic: lower total degree first, and within a
/// degree the exponent vectors run in decreasing lexicographic order, so the
/// basis of degree <= 2 in two variables is `1, X1, X2, X1^2, X1X2, X2^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut e = vec![0; n];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub(crate) fn exponents_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `x^alpha`.
    pub fn eval_monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .fold(1.0, |acc, (&k, &xi)| acc * xi.powi(k as i32))
    }

    /// `sum_i alpha_i * w_i`, e.g. `log(r^alpha)` when `w = log r`.
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.0.iter().zip(w).map(|(&k, &wi)| k as f64 * wi).sum()
    }

    pub(crate) fn to_monomial_string(&self) -> String {
        let mut parts = Vec::new();
        for (i, &k) in self.0.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(format!("X{}", i + 1)),
                _ => parts.push(format!("X{}^{}", i + 1, k)),
            }
        }
        parts.join("*")
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// All `alpha` in `N^n` with `|alpha| <= degree`, in graded-lex order.
/// There are `C(n + degree, n)` of them.
pub fn monomial_basis(n: usize, degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut current = vec![0u32; n];
        push_compositions(d as u32, 0, &mut current, &mut out);
    }
    out
}

// Emits compositions of `remaining` into the slots `pos..`, largest leading
// exponent first (decreasing lex).
fn push_compositions(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        current[pos] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        push_compositions(remaining - k, pos + 1, current, out);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn basis_order_is_graded_lex() {
        let b: Vec<Vec<u32>> = monomial_basis(2, 2).into_iter().map(|a| a.0).collect();
        assert_eq!(
            b,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn basis_is_sorted_and_has_binomial_size() {
        for n in 1..=4 {
            for d in 0..=5 {
                let b = monomial_basis(n, d);
                assert_eq!(b.len(), binomial(n + d, n));
                assert!(b.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn monomial_evaluation() {
        assert_eq!(MultiIndex::new(vec![2, 1]).eval_monomial(&[2.0, 3.0]), 12.0);
        assert_eq!(MultiIndex::zero(3).eval_monomial(&[0.0, 0.0, 0.0]), 1.0);
    }
}
