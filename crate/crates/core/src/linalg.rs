//! Dense symmetric matrices and a cyclic Jacobi eigensolver.

use serde::Serialize;

/// Dense symmetric matrix stored row-major in full.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricMatrix {
    size: usize,
    data: Vec<f64>,
}

/// Eigen-decomposition `A = V diag(values) V^T`. Column `k` of `vectors`
/// pairs with `values[k]`; eigenvalues are sorted ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub size: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.size).map(|i| self.vectors[i * self.size + k]).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V diag(max(values, 0)) V^T`, the Frobenius projection onto the PSD cone.
    pub fn clipped(&self) -> SymmetricMatrix {
        self.clipped_at(0.0)
    }

    /// `V diag(max(values, floor)) V^T`: the projection onto
    /// `{M : M - floor I is PSD}` for `floor >= 0`.
    pub fn clipped_at(&self, floor: f64) -> SymmetricMatrix {
        let n = self.size;
        let mut m = SymmetricMatrix::zeros(n);
        for (k, &value) in self.values.iter().enumerate() {
            let lambda = value.max(floor);
            if lambda <= 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[i * n + k] * lambda;
                if vik == 0.0 {
                    continue;
                }
                for j in i..n {
                    let v = m.get(i, j) + vik * self.vectors[j * n + k];
                    m.data[i * n + j] = v;
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                m.data[i * n + j] = m.data[j * n + i];
            }
        }
        m
    }
}

const MAX_SWEEPS: usize = 100;

impl SymmetricMatrix {
    pub fn zeros(size: usize) -> Self {
        SymmetricMatrix {
            size,
            data: vec![0.0; size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.data[i * size + i] = 1.0;
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(size: usize, mut f: F) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            for j in i..size {
                let v = f(i, j);
                m.data[i * size + j] = v;
                m.data[j * size + i] = v;
            }
        }
        m
    }

    /// From row-major data; the upper triangle is mirrored.
    pub fn from_rows(size: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), size * size, "expected {size}x{size} data");
        Self::from_fn(size, |i, j| rows[i * size + j])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.size + j] = v;
        self.data[j * self.size + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.size.max(1))
            .map(<[f64]>::to_vec)
            .take(self.size)
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.size).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `v^T A v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let n = self.size;
        let mut acc = 0.0;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self.data[i * n + j] * v[j]).sum();
            acc += v[i] * row;
        }
        acc
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymmetricMatrix {
            size: self.size,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Cyclic Jacobi: sweeps the upper triangle row by row, annihilating
    /// each off-diagonal entry with a plane rotation, until the off-diagonal
    /// mass is negligible against the Frobenius norm.
    pub fn eigen(&self) -> SymmetricEigen {
        let n = self.size;
        let mut a = self.data.clone();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let total: f64 = a.iter().map(|x| x * x).sum();
        let threshold = (f64::EPSILON * f64::EPSILON) * total;

        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| 2.0 * a[i * n + j] * a[i * n + j])
                .sum();
            if off <= threshold || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    rotate(&mut a, n, p, q, c, s);
                    a[p * n + p] = app - t * apq;
                    a[q * n + q] = aqq + t * apq;
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
        let values = order.iter().map(|&k| a[k * n + k]).collect();
        let mut vectors = vec![0.0; n * n];
        for (new_k, &k) in order.iter().enumerate() {
            for i in 0..n {
                vectors[i * n + new_k] = v[i * n + k];
            }
        }
        SymmetricEigen {
            values,
            vectors,
            size: n,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().min_value()
    }
}

// Applies the rotation to rows/columns p and q except the (p,p), (q,q),
// (p,q) entries, which the caller sets.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }
}
