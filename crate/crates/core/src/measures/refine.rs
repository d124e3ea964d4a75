//! Local refinement of an atomic fit by Levenberg-Marquardt on the atom
//! positions and weights. Atoms are kept in the box and weights stay
//! nonnegative by projecting every trial step; parameters resting on a bound
//! that the step would cross are held fixed for that iteration.

use super::BoxSpec;
use crate::polyring::MultiIndex;

pub(crate) struct Refined {
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub iterations: usize,
}

/// Residuals `d_alpha (sum_j w_j x_j^alpha - s_alpha)`.
fn residuals(
    basis: &[MultiIndex],
    scale: &[f64],
    target: &[f64],
    atoms: &[Vec<f64>],
    weights: &[f64],
) -> Vec<f64> {
    basis
        .iter()
        .zip(scale)
        .zip(target)
        .map(|((a, d), t)| {
            let fitted: f64 = atoms
                .iter()
                .zip(weights)
                .map(|(x, w)| w * a.eval_monomial(x))
                .sum();
            d * (fitted - t)
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `d x^(alpha - e_i) alpha_i`, zero when `alpha_i = 0`.
fn partial(a: &MultiIndex, x: &[f64], i: usize) -> f64 {
    let k = a.exponents()[i];
    if k == 0 {
        return 0.0;
    }
    let mut value = k as f64;
    for (axis, (&e, &xi)) in a.exponents().iter().zip(x).enumerate() {
        let e = if axis == i { e - 1 } else { e };
        value *= xi.powi(e as i32);
    }
    value
}

/// Solves `M z = b` for symmetric positive definite `M` (row-major).
fn cholesky_solve(m: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = m[i * n + i] - s;
                if !(d > 0.0) {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (m[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i * n + i];
    }
    let mut z = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * z[k]).sum();
        z[i] = (y[i] - s) / l[i * n + i];
    }
    Some(z)
}

/// Runs until the scaled residual drops to `floor`, no step improves it,
/// or `max_iters` steps were taken.
pub(crate) fn refine(
    basis: &[MultiIndex],
    scale: &[f64],
    target: &[f64],
    k: &BoxSpec,
    mut atoms: Vec<Vec<f64>>,
    mut weights: Vec<f64>,
    floor: f64,
    max_iters: usize,
) -> Refined {
    let n = k.dim();
    let per_atom = n + 1;
    let params = atoms.len() * per_atom;
    let rows = basis.len();
    let mut r = residuals(basis, scale, target, &atoms, &weights);
    let mut res = norm(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;

    while res > floor && iterations < max_iters && lambda < 1e12 {
        iterations += 1;
        // Jacobian, row-major rows x params
        let mut jac = vec![0.0; rows * params];
        for (row, (a, d)) in basis.iter().zip(scale).enumerate() {
            for (j, (x, w)) in atoms.iter().zip(&weights).enumerate() {
                let base = row * params + j * per_atom;
                jac[base] = d * a.eval_monomial(x);
                for i in 0..n {
                    jac[base + 1 + i] = d * w * partial(a, x, i);
                }
            }
        }
        let mut normal = vec![0.0; params * params];
        let mut grad = vec![0.0; params];
        for row in 0..rows {
            let jr = &jac[row * params..(row + 1) * params];
            for p in 0..params {
                grad[p] += jr[p] * r[row];
                for q in 0..params {
                    normal[p * params + q] += jr[p] * jr[q];
                }
            }
        }
        // freeze parameters sitting on a bound that descent would cross
        for j in 0..atoms.len() {
            let base = j * per_atom;
            let mut pinned = vec![weights[j] <= 0.0 && grad[base] > 0.0];
            for i in 0..n {
                let x = atoms[j][i];
                let g = grad[base + 1 + i];
                pinned.push((x <= k.lower[i] && g > 0.0) || (x >= k.upper[i] && g < 0.0));
            }
            for (offset, pin) in pinned.into_iter().enumerate() {
                if pin {
                    let p = base + offset;
                    for q in 0..params {
                        normal[p * params + q] = 0.0;
                        normal[q * params + p] = 0.0;
                    }
                    normal[p * params + p] = 1.0;
                    grad[p] = 0.0;
                }
            }
        }
        loop {
            let mut damped = normal.clone();
            for p in 0..params {
                damped[p * params + p] += lambda * (normal[p * params + p] + 1e-12);
            }
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let Some(step) = cholesky_solve(&damped, &neg) else {
                lambda *= 4.0;
                if lambda >= 1e12 {
                    break;
                }
                continue;
            };
            let mut trial_atoms = atoms.clone();
            let mut trial_weights = weights.clone();
            for j in 0..atoms.len() {
                trial_weights[j] = (weights[j] + step[j * per_atom]).max(0.0);
                for i in 0..n {
                    let v = atoms[j][i] + step[j * per_atom + 1 + i];
                    trial_atoms[j][i] = v.clamp(k.lower[i], k.upper[i]);
                }
            }
            let trial_r = residuals(basis, scale, target, &trial_atoms, &trial_weights);
            let trial_res = norm(&trial_r);
            if trial_res < res {
                atoms = trial_atoms;
                weights = trial_weights;
                r = trial_r;
                res = trial_res;
                lambda = (lambda / 3.0).max(1e-15);
                break;
            }
            lambda *= 4.0;
            if lambda >= 1e12 {
                break;
            }
        }
    }
    Refined {
        atoms,
        weights,
        iterations,
    }
}

/// Replaces groups of atoms within `radius[i]` of each other on every axis
/// by one atom at their weighted mean carrying their total weight.
pub(crate) fn merge_nearby(atoms: &[Vec<f64>], weights: &[f64], radius: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut used = vec![false; atoms.len()];
    let mut out_atoms = Vec::new();
    let mut out_weights = Vec::new();
    for &lead in &order {
        if used[lead] {
            continue;
        }
        let mut total = 0.0;
        let mut centre = vec![0.0; radius.len()];
        for &other in &order {
            if used[other] {
                continue;
            }
            let close = atoms[lead]
                .iter()
                .zip(&atoms[other])
                .zip(radius)
                .all(|((a, b), r)| (a - b).abs() <= *r);
            if close {
                used[other] = true;
                total += weights[other];
                for (c, x) in centre.iter_mut().zip(&atoms[other]) {
                    *c += weights[other] * x;
                }
            }
        }
        if total > 0.0 {
            out_atoms.push(centre.iter().map(|c| c / total).collect());
            out_weights.push(total);
        }
    }
    (out_atoms, out_weights)
}
