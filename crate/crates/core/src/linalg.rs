//! Small dense linear solves for active-set vertex enumeration.

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Rows are first scaled to unit max-norm; the system is treated
/// as singular when the absolute determinant of the scaled matrix falls
/// below `det_tol`.
pub(crate) fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, det_tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    for (row, rhs) in a.iter_mut().zip(b.iter_mut()) {
        let norm = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if norm == 0.0 {
            return None;
        }
        row.iter_mut().for_each(|x| *x /= norm);
        *rhs /= norm;
    }
    let mut det = 1.0f64;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        if piv != col {
            a.swap(piv, col);
            b.swap(piv, col);
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    if det.abs() < det_tol {
        return None;
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_detects_singularity() {
        let x = solve_square(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
        assert!(solve_square(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0], 1e-12).is_none());
        assert!(solve_square(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![0.0, 1.0], 1e-12).is_none());
    }
}
