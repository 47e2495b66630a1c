//! Least squares via Householder QR with column pivoting.
//!
//! Pivoting makes rank deficiency explicit instead of letting it surface as
//! exploding coefficients: at each step the remaining column with the
//! largest residual norm is eliminated next, and when the best remaining
//! pivot falls below `tol_ratio` times the first pivot the rest of the
//! columns are declared linearly dependent. Dependent columns get a zero
//! coefficient and are reported to the caller, which turns them into
//! fit notes.

/// Solution of one least-squares problem.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// One coefficient per input column; linearly dependent columns get 0.
    pub coefficients: Vec<f64>,
    /// Column indices kept, in pivot order.
    pub kept: Vec<usize>,
    /// Column indices judged linearly dependent, ascending.
    pub dropped: Vec<usize>,
    /// Sum of squared residuals at the solution.
    pub residual_ss: f64,
    pub rank: usize,
}

/// Solves `min ‖A·x − y‖²` for row-major `a` of shape `n × p`.
///
/// `tol_ratio` is the relative pivot threshold (columns whose residual norm
/// falls below `tol_ratio` times the first pivot norm are dropped).
pub fn solve_least_squares(
    a: &[f64],
    n: usize,
    p: usize,
    y: &[f64],
    tol_ratio: f64,
) -> LeastSquares {
    assert_eq!(a.len(), n * p, "matrix shape mismatch");
    assert_eq!(y.len(), n, "rhs length mismatch");

    // Column-major working copy: cols[j][i] = A[i][j].
    let mut cols: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..n).map(|i| a[i * p + j]).collect())
        .collect();
    let mut qty: Vec<f64> = y.to_vec();
    let mut pivot: Vec<usize> = (0..p).collect();
    let mut r_diag = vec![0.0; p];

    let max_rank = n.min(p);
    let mut rank = 0;
    let mut first_pivot = 0.0;

    for k in 0..max_rank {
        // Fresh residual norms of the remaining columns (recomputing each
        // step avoids the classic cancellation bug in downdated norms).
        let mut best = k;
        let mut best_norm2 = 0.0;
        for (j, col) in cols.iter().enumerate().skip(k) {
            let norm2: f64 = col[k..].iter().map(|v| v * v).sum();
            if norm2 > best_norm2 {
                best_norm2 = norm2;
                best = j;
            }
        }
        let norm = best_norm2.sqrt();
        if k == 0 {
            first_pivot = norm;
        }
        if norm <= tol_ratio * first_pivot || norm == 0.0 {
            break;
        }
        cols.swap(k, best);
        pivot.swap(k, best);

        // Householder reflection zeroing column k below the diagonal.
        let x_k = cols[k][k];
        let alpha = if x_k > 0.0 { -norm } else { norm };
        cols[k][k] = x_k - alpha;
        let vtv: f64 = cols[k][k..].iter().map(|v| v * v).sum();
        r_diag[k] = alpha;

        if vtv > 0.0 {
            let scale = 2.0 / vtv;
            let (head, tail) = cols.split_at_mut(k + 1);
            let v = &head[k][k..];
            for col in tail.iter_mut() {
                let s: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum::<f64>() * scale;
                for (vi, ci) in v.iter().zip(col[k..].iter_mut()) {
                    *ci -= s * vi;
                }
            }
            let s: f64 = v.iter().zip(&qty[k..]).map(|(a, b)| a * b).sum::<f64>() * scale;
            for (vi, qi) in v.iter().zip(qty[k..].iter_mut()) {
                *qi -= s * vi;
            }
        }
        rank += 1;
    }

    // Back-substitution on the rank × rank upper triangle. R's diagonal is
    // r_diag; its off-diagonal entries live in rows < k of the pivoted
    // columns (untouched by later reflections).
    let mut z = vec![0.0; rank];
    for i in (0..rank).rev() {
        let mut acc = qty[i];
        for j in (i + 1)..rank {
            acc -= cols[j][i] * z[j];
        }
        z[i] = acc / r_diag[i];
    }

    let mut coefficients = vec![0.0; p];
    for (i, &zi) in z.iter().enumerate() {
        coefficients[pivot[i]] = zi;
    }
    let kept = pivot[..rank].to_vec();
    let mut dropped = pivot[rank..].to_vec();
    dropped.sort_unstable();
    let residual_ss: f64 = qty[rank..].iter().map(|v| v * v).sum();

    LeastSquares {
        coefficients,
        kept,
        dropped,
        residual_ss,
        rank,
    }
}
