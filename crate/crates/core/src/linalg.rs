//! Gaussian elimination over the function field of a chart.
//!
//! Matrices are row-major `Vec<Vec<S>>`. Ranks are generic ranks: a pivot is
//! any entry that is not identically zero.

use itertools::Itertools;

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

pub fn zeros<S: Scalar>(rows: usize, cols: usize) -> Matrix<S> {
    vec![vec![S::zero(); cols]; rows]
}

pub fn identity<S: Scalar>(n: usize) -> Matrix<S> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

pub fn transpose<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    (0..cols).map(|j| (0..rows).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn mul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let inner = b.len();
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "matrix shapes do not compose");
            (0..cols)
                .map(|j| {
                    let mut acc = S::zero();
                    for (k, a_ik) in row.iter().enumerate() {
                        if a_ik.is_zero() || b[k][j].is_zero() {
                            continue;
                        }
                        acc = acc + &(a_ik.clone() * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec<S: Scalar>(a: &Matrix<S>, v: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| {
            let mut acc = S::zero();
            for (x, y) in row.iter().zip(v) {
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                acc = acc + &(x.clone() * y);
            }
            acc
        })
        .collect()
}

pub fn sub<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.clone() - y).collect())
        .collect()
}

pub fn is_zero_matrix<S: Scalar>(m: &Matrix<S>) -> bool {
    m.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

fn pick_pivot<S: Scalar>(a: &Matrix<S>, rows: std::ops::Range<usize>, c: usize) -> Option<usize> {
    let best = rows.clone().filter(|&i| a[i][c].is_unit()).min_by_key(|&i| a[i][c].pivot_weight());
    if best.is_none() {
        if let Some(i) = rows.into_iter().find(|&i| !a[i][c].is_zero()) {
            a[i][c].note_vanishing_pivot();
        }
    }
    best
}

/// Row-reduced echelon form together with its pivot columns.
pub struct Echelon<S> {
    pub rows: Matrix<S>,
    pub pivots: Vec<usize>,
}

/// Reduces `m` to reduced row-echelon form.
pub fn echelon<S: Scalar>(m: &Matrix<S>) -> Echelon<S> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pick_pivot(&a, r..rows, c) else { continue };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        pivot.note_divisor();
        let inv = pivot.inv().expect("nonzero pivot is invertible");
        let scaled: Vec<S> = a[r].iter().map(|x| x.clone() * &inv).collect();
        a[r] = scaled;
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            let pivot_row = a[r].clone();
            for (x, y) in a[i].iter_mut().zip(pivot_row.iter()) {
                if y.is_zero() {
                    continue;
                }
                *x = x.clone() - &(f.clone() * y);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rows: a, pivots }
}

pub fn rank<S: Scalar>(m: &Matrix<S>) -> usize {
    echelon(m).pivots.len()
}

/// Some `x` with `a x = b`, or `None` when the system is inconsistent.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let aug: Matrix<S> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let e = echelon(&aug);
    if e.pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![S::zero(); cols];
    for (i, &c) in e.pivots.iter().enumerate() {
        x[c] = e.rows[i][cols].clone();
    }
    Some(x)
}

/// Basis of the right kernel.
pub fn nullspace<S: Scalar>(a: &Matrix<S>, cols: usize) -> Vec<Vec<S>> {
    if a.is_empty() {
        return (0..cols)
            .map(|j| (0..cols).map(|i| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
    }
    let e = echelon(a);
    let free: Vec<usize> = (0..cols).filter(|c| !e.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (i, &c) in e.pivots.iter().enumerate() {
                v[c] = -e.rows[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Option<Matrix<S>> {
    let n = a.len();
    let aug: Matrix<S> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    let e = echelon(&aug);
    if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
        return None;
    }
    Some(e.rows.iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant by cofactor-free elimination.
pub fn det<S: Scalar>(a: &Matrix<S>) -> S {
    let n = a.len();
    let mut m = a.clone();
    let mut acc = S::one();
    for c in 0..n {
        let Some(p) = pick_pivot(&m, c..n, c) else { return S::zero() };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let pivot = m[c][c].clone();
        acc = acc * &pivot;
        pivot.note_divisor();
        let inv = pivot.inv().expect("nonzero pivot is invertible");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() * &inv;
            let pivot_row = m[c].clone();
            for (x, y) in m[i].iter_mut().zip(pivot_row.iter()).skip(c) {
                *x = x.clone() - &(f.clone() * y);
            }
        }
    }
    acc
}

/// All `k x k` minors.
pub fn minors<S: Scalar>(a: &Matrix<S>, k: usize) -> Vec<S> {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    if k == 0 || k > rows || k > cols {
        return Vec::new();
    }
    let mut out = Vec::new();
    for rs in (0..rows).combinations(k) {
        for cs in (0..cols).combinations(k) {
            let sub: Matrix<S> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j].clone()).collect()).collect();
            let d = det(&sub);
            if !d.is_zero() {
                out.push(d);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_scalar, Chart};
    use crate::ScalarExpr;

    fn m(rows: &[&[&str]]) -> Matrix<ScalarExpr> {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        rows.iter().map(|r| r.iter().map(|s| parse_scalar(s, &c).unwrap()).collect()).collect()
    }

    #[test]
    fn generic_rank_of_function_matrix() {
        assert_eq!(rank(&m(&[&["x", "y"], &["x^2", "x*y"]])), 1);
        assert_eq!(rank(&m(&[&["x", "y"], &["1", "x"]])), 2);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = m(&[&["x", "1"], &["y", "2"]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mul(&a, &inv), identity(2));
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = m(&[&["x", "y", "1"]]);
        for v in nullspace(&a, 3) {
            assert!(mul_vec(&a, &v).iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn determinant_of_triangular() {
        let a = m(&[&["x", "y"], &["0", "y"]]);
        assert_eq!(det(&a), m(&[&["x*y"]])[0][0]);
    }
}
