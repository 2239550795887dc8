//! Dense LU with partial pivoting and column equilibration.

use crate::chain::SquareMatrix;
use crate::error::{Error, Result};

/// Solves `a x = b`. Each column of `a` is scaled by the reciprocal of its
/// max-abs entry before factorization and the scaling is undone afterwards.
pub(crate) fn solve_equilibrated(mut a: SquareMatrix, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = a.n();
    debug_assert_eq!(b.len(), n);

    let mut col_scale = vec![1.0; n];
    for (j, scale) in col_scale.iter_mut().enumerate() {
        let max = (0..n).map(|i| a.get(i, j).abs()).fold(0.0, f64::max);
        if max == 0.0 {
            return Err(Error::SolveFailure(format!("column {j} is identically zero")));
        }
        *scale = 1.0 / max;
        for i in 0..n {
            a.set(i, j, a.get(i, j) * *scale);
        }
    }

    // Doolittle elimination in place; row swaps applied to `b` directly.
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, a.get(i, k).abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot > f64::EPSILON * 16.0) {
            return Err(Error::SolveFailure(format!(
                "matrix is singular to working precision at column {k}"
            )));
        }
        if p != k {
            for j in 0..n {
                let tmp = a.get(k, j);
                a.set(k, j, a.get(p, j));
                a.set(p, j, tmp);
            }
            b.swap(k, p);
        }
        let akk = a.get(k, k);
        for i in (k + 1)..n {
            let f = a.get(i, k) / akk;
            if f == 0.0 {
                continue;
            }
            a.set(i, k, f);
            for j in (k + 1)..n {
                a.set(i, j, a.get(i, j) - f * a.get(k, j));
            }
            b[i] -= f * b[k];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= a.get(i, j) * x[j];
        }
        x[i] = s / a.get(i, i);
    }
    for (xi, s) in x.iter_mut().zip(&col_scale) {
        *xi *= s;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolveFailure("non-finite solution".into()));
    }
    Ok(x)
}
