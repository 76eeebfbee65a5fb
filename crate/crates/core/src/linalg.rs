//! Dense exact linear algebra over the coefficient fraction field.
//!
//! Sizes stay modest (cohomology coordinate solves, span membership), so
//! plain Gauss-Jordan with first-nonzero pivoting is enough. Pivot choice
//! scans rows and columns in order, which keeps results deterministic.

use crate::field::FieldSpec;
use crate::param::ParamFraction;

/// Reduced row echelon form plus the pivot column of each nonzero row.
pub fn row_reduce(
    mut rows: Vec<Vec<ParamFraction>>,
    field: &FieldSpec,
    nparams: usize,
) -> (Vec<Vec<ParamFraction>>, Vec<usize>) {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut next_row = 0usize;
    for col in 0..ncols {
        let Some(pivot_row) = (next_row..rows.len()).find(|r| !rows[*r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, pivot_row);
        let inv = rows[next_row][col]
            .inv(field, nparams)
            .expect("pivot entry is nonzero");
        for entry in rows[next_row].iter_mut() {
            *entry = entry.mul(&inv, field, nparams);
        }
        for r in 0..rows.len() {
            if r == next_row || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in 0..ncols {
                let delta = factor.mul(&rows[next_row][c], field, nparams);
                rows[r][c] = rows[r][c].sub(&delta, field, nparams);
            }
        }
        pivots.push(col);
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }
    (rows, pivots)
}

pub fn rank(rows: &[Vec<ParamFraction>], field: &FieldSpec, nparams: usize) -> usize {
    row_reduce(rows.to_vec(), field, nparams).1.len()
}

/// Solves `A x = b`. Returns one solution (free variables set to zero) or
/// `None` when the system is inconsistent.
pub fn solve(
    a: &[Vec<ParamFraction>],
    b: &[ParamFraction],
    field: &FieldSpec,
    nparams: usize,
) -> Option<Vec<ParamFraction>> {
    assert_eq!(a.len(), b.len(), "matrix and right-hand side disagree on row count");
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let augmented: Vec<Vec<ParamFraction>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), ncols, "ragged matrix");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (reduced, pivots) = row_reduce(augmented, field, nparams);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![ParamFraction::zero(field, nparams); ncols];
    for (row, col) in pivots.iter().enumerate() {
        x[*col] = reduced[row][ncols].clone();
    }
    Some(x)
}

/// Whether `target` lies in the span of `vectors` (each a coordinate row).
pub fn in_span(
    vectors: &[Vec<ParamFraction>],
    target: &[ParamFraction],
    field: &FieldSpec,
    nparams: usize,
) -> Option<Vec<ParamFraction>> {
    if vectors.is_empty() {
        return target.iter().all(|c| c.is_zero()).then(Vec::new);
    }
    let dim = target.len();
    // columns of the system are the candidate vectors
    let a: Vec<Vec<ParamFraction>> = (0..dim)
        .map(|i| vectors.iter().map(|v| v[i].clone()).collect())
        .collect();
    solve(&a, target, field, nparams)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn f(p: u64) -> Arc<FieldSpec> {
        FieldSpec::prime(p).unwrap()
    }

    fn consts(field: &FieldSpec, vals: &[i64]) -> Vec<ParamFraction> {
        vals.iter()
            .map(|v| ParamFraction::from_scalar(field.from_int(*v), field, 0))
            .collect()
    }

    #[test]
    fn solves_invertible_system_over_f5() {
        let field = f(5);
        let a = vec![
            consts(&field, &[1, 2, 0]),
            consts(&field, &[0, 1, 1]),
            consts(&field, &[3, 0, 1]),
        ];
        let b = consts(&field, &[3, 2, 4]);
        let x = solve(&a, &b, &field, 0).unwrap();
        // verify by substitution
        for (row, rhs) in a.iter().zip(&b) {
            let mut acc = ParamFraction::zero(&field, 0);
            for (c, xi) in row.iter().zip(&x) {
                acc = acc.add(&c.mul(xi, &field, 0), &field, 0);
            }
            assert_eq!(acc, *rhs);
        }
    }

    #[test]
    fn detects_inconsistent_system() {
        let field = f(3);
        let a = vec![consts(&field, &[1, 1]), consts(&field, &[2, 2])];
        let b = consts(&field, &[1, 1]);
        assert!(solve(&a, &b, &field, 0).is_none());
    }

    #[test]
    fn underdetermined_system_zeroes_free_variables() {
        let field = f(7);
        let a = vec![consts(&field, &[1, 4, 2])];
        let b = consts(&field, &[5]);
        let x = solve(&a, &b, &field, 0).unwrap();
        assert_eq!(x, consts(&field, &[5, 0, 0]));
    }

    #[test]
    fn rank_of_dependent_rows() {
        let field = f(2);
        let rows = vec![
            consts(&field, &[1, 0, 1]),
            consts(&field, &[0, 1, 1]),
            consts(&field, &[1, 1, 0]),
        ];
        assert_eq!(rank(&rows, &field, 0), 2);
    }

    #[test]
    fn span_membership_returns_combination() {
        let field = f(5);
        let vectors = vec![consts(&field, &[1, 2, 0]), consts(&field, &[0, 1, 1])];
        let target = consts(&field, &[2, 0, 1]);
        // 2*v0 - 4*v1 = (2, 0, -4) = (2, 0, 1) mod 5
        let combo = in_span(&vectors, &target, &field, 0).unwrap();
        assert_eq!(combo, consts(&field, &[2, 1]));
        let outside = consts(&field, &[0, 0, 1]);
        assert!(in_span(&vectors, &outside, &field, 0).is_none());
    }
}
