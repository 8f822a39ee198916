//! Small dense linear algebra.

#[allow(unused_imports)]
use num_traits::Float;

/// Solves `A x = b` for a symmetric positive definite `N × N` matrix by
/// Cholesky factorisation. Returns `None` when a pivot falls below
/// `rel_tol` times the largest diagonal entry.
pub fn cholesky_solve<const N: usize>(
    a: &[[f64; N]; N],
    b: &[f64; N],
    rel_tol: f64,
) -> Option<[f64; N]> {
    let scale = (0..N).map(|i| a[i][i]).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    let mut l = [[0.0; N]; N];
    for j in 0..N {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > rel_tol * scale) {
            return None;
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in j + 1..N {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / d;
        }
    }
    let mut y = [0.0; N];
    for i in 0..N {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let mut s = y[i];
        for k in i + 1..N {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}
