//! Exact linear algebra over arbitrary-precision rationals.
//!
//! Used wherever a dimension or identity is exactly decidable: Lie-algebra
//! series, kernel dimensions of wedge systems, Jacobi residuals. Every f64
//! is a dyadic rational, so conversion from floats is lossless.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Lossless conversion; panics on NaN or infinities.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("non-finite float has no rational value")
}

/// In-place reduced row echelon form. Returns the rank and leaves pivot
/// columns recorded in ascending order.
pub fn rref(rows: &mut Vec<Vec<Rat>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        let Some(src) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, src);
        let inv = rows[pivot_row][col].clone();
        for v in rows[pivot_row].iter_mut() {
            *v = &*v / &inv;
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..ncols {
                    let sub = &rows[pivot_row][c] * &factor;
                    rows[r][c] = &rows[r][c] - sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    pivot_row
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work)
}

/// Nonzero rows of the RREF: a canonical basis of the row span.
pub fn row_basis(rows: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let mut work = rows;
    let r = rref(&mut work);
    work.truncate(r);
    work
}

/// Whether v lies in the row span of an already-reduced basis.
pub fn in_span(basis: &[Vec<Rat>], v: &[Rat]) -> bool {
    let mut work: Vec<Vec<Rat>> = basis.to_vec();
    work.push(v.to_vec());
    rref(&mut work) == basis.len()
}

/// Basis of the right kernel {v : M v = 0} of an m x n matrix.
pub fn nullspace(mat: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    if mat.is_empty() {
        return Vec::new();
    }
    let ncols = mat[0].len();
    let mut work = mat.to_vec();
    let rank = rref(&mut work);
    work.truncate(rank);
    let mut pivot_cols = Vec::with_capacity(rank);
    for row in &work {
        let col = row.iter().position(|v| !v.is_zero()).expect("zero row after truncate");
        pivot_cols.push(col);
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[free] = rat_i(1);
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -work[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Max |entry| as f64, for reporting exact residuals on a float scale.
pub fn max_abs_f64(rows: &[Vec<Rat>]) -> f64 {
    use num_traits::ToPrimitive;
    rows.iter()
        .flatten()
        .map(|v| v.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}
