//! Restarted Lanczos for the lowest eigenpair of a real symmetric operator
//! given only through matrix-vector products.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) struct LanczosOptions {
    pub krylov: usize,
    pub restarts: usize,
    pub tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov: 120,
            restarts: 60,
            tol: 1e-10,
        }
    }
}

fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

fn norm<T: Real>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize<T: Real>(v: &mut [T], against: &[Vec<T>]) {
    // Two passes keep the Krylov basis orthogonal to working precision.
    for _ in 0..2 {
        for q in against {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

/// Lowest eigenpair of `apply` restricted to the orthogonal complement of
/// `deflate`. `start` need not be normalized.
pub(crate) fn lowest<T: Real, F>(
    dim: usize,
    apply: F,
    start: Vec<T>,
    deflate: &[Vec<T>],
    opts: &LanczosOptions,
) -> Result<(T, Vec<T>)>
where
    F: Fn(&[T], &mut [T]),
{
    let tol = T::lit(opts.tol);
    let mut v = start;
    orthogonalize(&mut v, deflate);
    let avail = dim.saturating_sub(deflate.len());
    if avail == 0 {
        return Err(Error::Eigensolver("no space left after deflation".into()));
    }
    let krylov = opts.krylov.min(avail).max(1);
    let mut w = vec![T::zero(); dim];
    let mut last_res = T::zero();

    for _ in 0..=opts.restarts {
        let n0 = norm(&v);
        if !(n0 > T::zero()) {
            return Err(Error::Eigensolver("start vector vanished".into()));
        }
        v.iter_mut().for_each(|x| *x /= n0);

        let mut basis: Vec<Vec<T>> = Vec::with_capacity(krylov);
        let mut alpha: Vec<T> = Vec::with_capacity(krylov);
        let mut beta: Vec<T> = Vec::with_capacity(krylov);
        basis.push(v.clone());
        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w);
            alpha.push(a);
            orthogonalize(&mut w, deflate);
            orthogonalize(&mut w, &basis);
            let b = norm(&w);
            if basis.len() == krylov || b <= tol * T::lit(1e-3) {
                beta.push(b);
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|&x| x / b).collect());
        }

        let k = alpha.len();
        let mut tri = DMatrix::<T>::zeros(k, k);
        for i in 0..k {
            tri[(i, i)] = alpha[i];
            if i + 1 < k {
                tri[(i, i + 1)] = beta[i];
                tri[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(tri);
        let (imin, &e0) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .ok_or_else(|| Error::Eigensolver("empty Krylov space".into()))?;
        let y = eig.eigenvectors.column(imin);

        let mut ritz = vec![T::zero(); dim];
        for (i, q) in basis.iter().enumerate() {
            axpy(y[i], q, &mut ritz);
        }
        let n = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= n);

        // True residual, not the Lanczos estimate, since deflation and
        // restarts make the latter optimistic.
        apply(&ritz, &mut w);
        axpy(-e0, &ritz, &mut w);
        orthogonalize(&mut w, deflate);
        last_res = norm(&w);
        if last_res <= tol {
            return Ok((e0, ritz));
        }
        v = ritz;
    }
    Err(Error::Eigensolver(format!(
        "no convergence: residual {:.3e} above {:.3e}",
        last_res.as_f64(),
        opts.tol
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_apply(d: &[f64]) -> impl Fn(&[f64], &mut [f64]) + '_ {
        move |x, y| {
            for i in 0..d.len() {
                y[i] = d[i] * x[i];
            }
        }
    }

    #[test]
    fn diagonal_lowest_and_deflated() {
        let d = [3.0, -1.0, 2.0, 0.5, 7.0];
        let start = vec![1.0; 5];
        let (e0, v0) = lowest(5, diag_apply(&d), start.clone(), &[], &LanczosOptions::default()).unwrap();
        assert!((e0 + 1.0).abs() < 1e-12);
        assert!((v0[1].abs() - 1.0).abs() < 1e-10);
        let (e1, _) = lowest(5, diag_apply(&d), start, &[v0], &LanczosOptions::default()).unwrap();
        assert!((e1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_chain_matches_closed_form() {
        // Path graph Laplacian-like operator: eigenvalues 2 - 2cos(kπ/(n+1)).
        let n = 300;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let mut s = 2.0 * x[i];
                if i > 0 {
                    s -= x[i - 1];
                }
                if i + 1 < n {
                    s -= x[i + 1];
                }
                y[i] = s;
            }
        };
        let start: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
        let opts = LanczosOptions {
            restarts: 400,
            tol: 1e-8,
            ..LanczosOptions::default()
        };
        let (e0, _) = lowest(n, apply, start, &[], &opts).unwrap();
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((e0 - exact).abs() < 1e-9, "{e0} vs {exact}");
    }
}
