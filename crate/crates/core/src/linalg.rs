//! Dense square-matrix helpers sized for 2n+4 <= ~16: LU determinant/solve,
//! numeric rank through the singular spectrum of A^T A (cyclic Jacobi).

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            let ail = a[i][l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += ail * b[l][j];
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut m = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            m = m.max((x - y).abs());
        }
    }
    m
}

pub fn lu_det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let (piv, _) = m
            .iter()
            .enumerate()
            .skip(k)
            .map(|(i, row)| (i, row[k].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if m[piv][k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            m.swap(piv, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let mkj = m[k][j];
                m[i][j] -= f * mkj;
            }
        }
    }
    det
}

/// Solve A x = b by partial-pivot LU; panics on exactly singular A.
pub fn lu_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x: Vec<f64> = b.to_vec();
    for k in 0..n {
        let (piv, _) = m
            .iter()
            .enumerate()
            .skip(k)
            .map(|(i, row)| (i, row[k].abs()))
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        assert!(m[piv][k] != 0.0, "singular system");
        if piv != k {
            m.swap(piv, k);
            x.swap(piv, k);
        }
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let mkj = m[k][j];
                m[i][j] -= f * mkj;
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    x
}

pub fn lu_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(lu_solve(a, &e));
    }
    let mut inv = vec![vec![0.0; n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    inv
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations (ascending).
pub fn sym_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(m[i][j].abs());
            }
        }
        if off < 1e-14 * (1.0 + frob(&m)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn frob(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Numeric rank: count singular values above rel_tol * sigma_max.
/// Rows may outnumber columns (tall stacks of flattened generators).
pub fn numeric_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = rows[0].len();
    // gram = A^T A, m x m; eigenvalues are squared singular values
    let mut gram = vec![vec![0.0; m]; m];
    for r in rows {
        for i in 0..m {
            if r[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                gram[i][j] += r[i] * r[j];
            }
        }
    }
    let ev = sym_eigenvalues(&gram);
    let max = ev.last().copied().unwrap_or(0.0).max(0.0);
    if max == 0.0 {
        return 0;
    }
    let thresh = (rel_tol * rel_tol) * max;
    ev.iter().filter(|&&l| l > thresh).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let a = vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, -1.0],
            vec![0.0, -1.0, 4.0],
        ];
        assert!((lu_det(&a) - 18.0).abs() < 1e-12);
        let inv = lu_inverse(&a);
        assert!(max_abs_diff(&mat_mul(&a, &inv), &identity(3)) < 1e-12);
    }

    #[test]
    fn jacobi_spectrum() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let ev = sym_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rank_thresholding() {
        let rows = vec![
            vec![1.0, 0.0, 2.0],
            vec![2.0, 0.0, 4.0],       // dependent
            vec![0.0, 3.0, 0.0],
            vec![1e-13, 0.0, 2e-13],   // noise-level
        ];
        assert_eq!(numeric_rank(&rows, 1e-9), 2);
        assert_eq!(numeric_rank(&[], 1e-9), 0);
        assert_eq!(numeric_rank(&[vec![0.0, 0.0]], 1e-9), 0);
    }
}
