//! Nonnegative least squares `min_{w >= 0} ||A w - b||_2` by the
//! Lawson-Hanson active-set method, with Householder QR for the
//! unconstrained subproblems.

use crate::numeric::CompensatedSum;

/// Dense column-major matrix: `columns[j]` is column `j`.
pub(crate) struct Columns<'a> {
    pub columns: &'a [Vec<f64>],
    pub rows: usize,
}

impl Columns<'_> {
    fn apply(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (col, &wj) in self.columns.iter().zip(w) {
            if wj == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(col) {
                *o += a * wj;
            }
        }
        out
    }

    fn dot_column(&self, j: usize, v: &[f64]) -> f64 {
        self.columns[j].iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

pub(crate) struct NnlsOutcome {
    pub weights: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub residual: f64,
    /// Number of columns moved into the passive set.
    pub iterations: usize,
}

fn residual(a: &Columns<'_>, w: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let aw = a.apply(w);
    let r: Vec<f64> = b.iter().zip(&aw).map(|(x, y)| x - y).collect();
    let norm = r.iter().map(|v| v * v).collect::<CompensatedSum>().value().sqrt();
    (r, norm)
}

/// Least squares over the columns in `passive`; `None` when they are
/// numerically dependent.
fn least_squares(a: &Columns<'_>, passive: &[usize], b: &[f64]) -> Option<Vec<f64>> {
    let m = a.rows;
    let k = passive.len();
    if k > m {
        return None;
    }
    let mut q: Vec<Vec<f64>> = passive.iter().map(|&j| a.columns[j].clone()).collect();
    let mut rhs = b.to_vec();
    for c in 0..k {
        let norm = q[c][c..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = a.columns[passive[c]].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale {
            return None;
        }
        let alpha = if q[c][c] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = q[c][c..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vv;
            for (y, x) in col.iter_mut().zip(&v) {
                *y -= f * x;
            }
        };
        for col in q.iter_mut().skip(c) {
            reflect(&mut col[c..]);
        }
        reflect(&mut rhs[c..]);
    }
    let mut z = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| q[j][i] * z[j]).sum();
        z[i] = (rhs[i] - s) / q[i][i];
    }
    Some(z)
}

/// Runs until `||A w - b|| <= floor`, or no column correlates with the
/// residual by more than `floor` (optimality up to `floor`); `max_iters`
/// bounds the number of columns entered into the passive set.
pub(crate) fn solve(a: &Columns<'_>, b: &[f64], floor: f64, max_iters: usize) -> NnlsOutcome {
    let m = a.columns.len();
    let mut w = vec![0.0; m];
    let mut passive: Vec<usize> = Vec::new();
    let mut blocked = vec![false; m];
    let (mut r, mut res) = residual(a, &w, b);
    let col_norms: Vec<f64> = a
        .columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut iterations = 0;

    while res > floor && iterations < max_iters {
        // most violated dual constraint, measured as a cosine
        let candidate = (0..m)
            .filter(|&j| !blocked[j] && w[j] == 0.0 && !passive.contains(&j) && col_norms[j] > 0.0)
            .map(|j| (j, a.dot_column(j, &r) / col_norms[j]))
            .filter(|(_, g)| *g > floor)
            .max_by(|x, y| x.1.total_cmp(&y.1));
        let Some((t, _)) = candidate else { break };
        iterations += 1;
        passive.push(t);

        loop {
            let Some(z) = least_squares(a, &passive, b) else {
                passive.pop();
                blocked[t] = true;
                break;
            };
            if z.iter().all(|v| *v > 0.0) {
                for (&j, &v) in passive.iter().zip(&z) {
                    w[j] = v;
                }
                blocked.iter_mut().for_each(|x| *x = false);
                break;
            }
            // step from w towards z until the first weight hits zero; that
            // weight leaves the passive set exactly
            let (leaving, step) = passive
                .iter()
                .zip(&z)
                .filter(|(_, v)| **v <= 0.0)
                .map(|(&j, v)| (j, w[j] / (w[j] - v)))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("some z_j <= 0");
            for (&j, &v) in passive.iter().zip(&z) {
                w[j] += step * (v - w[j]);
            }
            w[leaving] = 0.0;
            passive.retain(|&j| {
                if w[j] <= 0.0 {
                    w[j] = 0.0;
                    false
                } else {
                    true
                }
            });
            if passive.is_empty() {
                break;
            }
        }
        (r, res) = residual(a, &w, b);
    }
    NnlsOutcome {
        weights: w,
        residual: res,
        iterations,
    }
}
