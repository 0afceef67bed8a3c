//! Lanczos iteration with full reorthogonalization for the lowest
//! eigenpairs of a Hermitian operator restricted to an invariant subspace.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::state::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    pub max_iter: usize,
    /// Converged when ‖H x − θ x‖ < tol · max(1, |θ|).
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-10,
            seed: 0x5eed_1a2c,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

const CHECK_EVERY: usize = 4;
/// Relative size of a Krylov residual treated as an exhausted subspace.
const BREAKDOWN: f64 = 1e-12;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

struct Ritz {
    values: Vec<f64>,
    /// Columns are eigenvectors of the tridiagonal matrix, ascending.
    vectors: Vec<Vec<f64>>,
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Ritz {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ritz {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect(),
    }
}

/// Lowest `nev` eigenpairs of `op` on the range of `project`.
///
/// `project` must be an orthogonal projector commuting with `op`; it is
/// reapplied after every product to stop round-off from leaking out of the
/// subspace. Returns fewer than `nev` pairs when the subspace is smaller,
/// and none when `start` has no component in it.
pub fn lowest_eigenpairs<Op, Proj>(
    nev: usize,
    start: Vec<C64>,
    op: Op,
    project: Proj,
    cfg: &LanczosConfig,
) -> Result<Vec<Eigenpair>>
where
    Op: Fn(&[C64], &mut [C64]),
    Proj: Fn(&mut [C64]),
{
    let dim = start.len();
    let mut v = start;
    project(&mut v);
    let n0 = norm(&v);
    if n0 < 1e-10 || nev == 0 {
        return Ok(Vec::new());
    }
    v.iter_mut().for_each(|x| *x /= n0);

    let mut basis: Vec<Vec<C64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); dim];

    loop {
        let j = basis.len() - 1;
        op(&basis[j], &mut w);
        project(&mut w);
        let a = dot(&basis[j], &w).re;
        axpy(&mut w, C64::new(-a, 0.0), &basis[j]);
        if j > 0 {
            axpy(&mut w, C64::new(-beta[j - 1], 0.0), &basis[j - 1]);
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(&mut w, -c, q);
            }
        }
        alpha.push(a);
        let b = norm(&w);
        let scale = alpha.iter().map(|x| x.abs()).fold(1.0, f64::max);
        let exhausted = b < BREAKDOWN * scale;
        let k = alpha.len();
        let at_limit = k >= cfg.max_iter || k >= dim;

        if exhausted || at_limit || (k >= nev && k.is_multiple_of(CHECK_EVERY)) {
            let ritz = tridiagonal_eigen(&alpha, &beta);
            let take = nev.min(k);
            let residuals: Vec<f64> = (0..take)
                .map(|i| b * ritz.vectors[i][k - 1].abs())
                .collect();
            let converged = exhausted
                || residuals
                    .iter()
                    .zip(&ritz.values)
                    .all(|(r, th)| *r < cfg.tol * th.abs().max(1.0));
            if converged {
                return Ok((0..take)
                    .map(|i| {
                        let mut x = vec![C64::new(0.0, 0.0); dim];
                        for (q, &y) in basis.iter().zip(&ritz.vectors[i]) {
                            axpy(&mut x, C64::new(y, 0.0), q);
                        }
                        let nx = norm(&x);
                        x.iter_mut().for_each(|e| *e /= nx);
                        Eigenpair {
                            value: ritz.values[i],
                            vector: x,
                            residual: if exhausted { 0.0 } else { residuals[i] },
                        }
                    })
                    .collect());
            }
            if at_limit {
                return Err(Error::NoConvergence {
                    iterations: k,
                    residual: residuals.iter().copied().fold(0.0, f64::max),
                });
            }
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        let next = std::mem::replace(&mut w, vec![C64::new(0.0, 0.0); dim]);
        basis.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_op(d: Vec<f64>) -> impl Fn(&[C64], &mut [C64]) {
        move |x: &[C64], y: &mut [C64]| {
            for i in 0..x.len() {
                y[i] = x[i] * d[i];
            }
        }
    }

    #[test]
    fn finds_lowest_of_diagonal() {
        let d: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64 * 0.1).collect();
        let start = (0..50).map(|i| C64::new(1.0, 0.01 * i as f64)).collect();
        let pairs =
            lowest_eigenpairs(3, start, diag_op(d), |_| {}, &LanczosConfig::default()).unwrap();
        let vals: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        assert!((vals[0] - 0.0).abs() < 1e-10);
        assert!((vals[1] - 0.1).abs() < 1e-10);
        assert!((vals[2] - 0.2).abs() < 1e-10);
    }

    #[test]
    fn respects_projector() {
        // keep only odd indices
        let d: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let start = vec![C64::new(1.0, 0.0); 20];
        let proj = |v: &mut [C64]| {
            for (i, x) in v.iter_mut().enumerate() {
                if i % 2 == 0 {
                    *x = C64::new(0.0, 0.0);
                }
            }
        };
        let pairs =
            lowest_eigenpairs(2, start, diag_op(d), proj, &LanczosConfig::default()).unwrap();
        assert!((pairs[0].value - 1.0).abs() < 1e-10);
        assert!((pairs[1].value - 3.0).abs() < 1e-10);
        assert!((pairs[0].vector[1].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_subspace_gives_nothing() {
        let start = vec![C64::new(1.0, 0.0); 4];
        let pairs = lowest_eigenpairs(
            1,
            start,
            diag_op(vec![1.0; 4]),
            |v: &mut [C64]| v.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0)),
            &LanczosConfig::default(),
        )
        .unwrap();
        assert!(pairs.is_empty());
    }

    #[test]
    fn reports_non_convergence() {
        let d: Vec<f64> = (0..200).map(|i| (i as f64 * 0.731).sin()).collect();
        let start = vec![C64::new(1.0, 0.0); 200];
        let cfg = LanczosConfig {
            max_iter: 5,
            ..Default::default()
        };
        assert!(matches!(
            lowest_eigenpairs(1, start, diag_op(d), |_| {}, &cfg),
            Err(Error::NoConvergence { iterations: 5, .. })
        ));
    }
}
