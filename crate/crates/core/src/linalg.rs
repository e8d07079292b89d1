//! Dense matrices over GF(q) and exact Gaussian elimination.
//!
//! Pivoting is fixed: scan columns left to right, take the lowest-index row
//! with a nonzero entry. Kernel bases therefore come out identical on every
//! run.

use crate::gfarith::{FieldElem, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![FieldElem::ZERO; rows * cols] }
    }

    /// All rows must share one length.
    pub fn from_rows<R: AsRef<[FieldElem]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged matrix rows");
            data.extend_from_slice(r.as_ref());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Multiplies each column `c` by `scales[c]`.
    pub fn scale_columns(&mut self, field: &FieldSpec, scales: &[FieldElem]) {
        for r in 0..self.rows {
            for (c, s) in scales.iter().enumerate() {
                let v = self.get(r, c);
                self.set(r, c, field.mul(v, *s));
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self, field: &FieldSpec) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(pr) = (next..self.rows).find(|r| !self.get(*r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(pr, next);
            let inv = field.inv(self.get(next, col)).expect("pivot is nonzero");
            for c in col..self.cols {
                let v = self.get(next, c);
                self.set(next, c, field.mul(v, inv));
            }
            for r in 0..self.rows {
                if r == next {
                    continue;
                }
                let factor = self.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = field.sub(self.get(r, c), field.mul(factor, self.get(next, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }
}

pub fn rank(field: &FieldSpec, m: &Matrix) -> usize {
    m.clone().rref(field).len()
}

/// Rank of a handful of rows without building a `Matrix`; `scratch` is reused.
pub fn rank_of_rows(field: &FieldSpec, rows: &[&[FieldElem]], scratch: &mut Vec<FieldElem>) -> usize {
    let n = rows.len();
    let Some(cols) = rows.first().map(|r| r.len()) else {
        return 0;
    };
    scratch.clear();
    for r in rows {
        scratch.extend_from_slice(r);
    }
    let mut rank = 0;
    for col in 0..cols {
        if rank == n {
            break;
        }
        let Some(pr) = (rank..n).find(|r| !scratch[r * cols + col].is_zero()) else {
            continue;
        };
        if pr != rank {
            for c in 0..cols {
                scratch.swap(pr * cols + c, rank * cols + c);
            }
        }
        let inv = field.inv(scratch[rank * cols + col]).expect("pivot is nonzero");
        for r in rank + 1..n {
            let factor = field.mul(scratch[r * cols + col], inv);
            if factor.is_zero() {
                continue;
            }
            for c in col..cols {
                let v = field.sub(scratch[r * cols + c], field.mul(factor, scratch[rank * cols + c]));
                scratch[r * cols + c] = v;
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of `{x : m x = 0}`.
pub fn right_kernel(field: &FieldSpec, m: &Matrix) -> Vec<Vec<FieldElem>> {
    let mut red = m.clone();
    let pivots = red.rref(field);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![FieldElem::ZERO; m.cols()];
            v[f] = FieldElem::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(red.get(i, f));
            }
            v
        })
        .collect()
}

/// Basis of `{c : c^T m = 0}`, i.e. linear relations among the rows.
pub fn left_kernel(field: &FieldSpec, m: &Matrix) -> Vec<Vec<FieldElem>> {
    right_kernel(field, &m.transpose())
}

/// Some solution of `m x = rhs`, if consistent.
pub fn solve(field: &FieldSpec, m: &Matrix, rhs: &[FieldElem]) -> Option<Vec<FieldElem>> {
    assert_eq!(rhs.len(), m.rows());
    let mut aug = Matrix::zeros(m.rows(), m.cols() + 1);
    for (r, v) in rhs.iter().enumerate() {
        for c in 0..m.cols() {
            aug.set(r, c, m.get(r, c));
        }
        aug.set(r, m.cols(), *v);
    }
    let pivots = aug.rref(field);
    if pivots.last() == Some(&m.cols()) {
        return None;
    }
    let mut x = vec![FieldElem::ZERO; m.cols()];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(i, m.cols());
    }
    Some(x)
}

/// `v^T m` as a row vector.
pub fn row_combination(field: &FieldSpec, coeffs: &[FieldElem], m: &Matrix) -> Vec<FieldElem> {
    assert_eq!(coeffs.len(), m.rows());
    let mut out = vec![FieldElem::ZERO; m.cols()];
    for (r, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (slot, v) in out.iter_mut().zip(m.row(r)) {
            *slot = field.add(*slot, field.mul(*c, *v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfarith::{field_of_order, make_field};
    use crate::polyrand::SeededRng;
    use proptest::prelude::*;

    fn mat(rows: &[&[u32]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|v| FieldElem(*v)).collect::<Vec<_>>()).collect::<Vec<_>>())
    }

    #[test]
    fn rank_examples() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(rank(&f5, &mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&f5, &mat(&[&[1, 2], &[2, 3]])), 2);
        assert_eq!(rank(&f5, &Matrix::zeros(3, 4)), 0);
    }

    #[test]
    fn kernel_of_dependent_rows() {
        let f7 = make_field(7, 1).unwrap();
        let m = mat(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]]);
        let ker = left_kernel(&f7, &m);
        assert_eq!(ker.len(), 1);
        assert!(row_combination(&f7, &ker[0], &m).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let f3 = make_field(3, 1).unwrap();
        let m = mat(&[&[1, 1], &[0, 1]]);
        let x = solve(&f3, &m, &[FieldElem(2), FieldElem(1)]).unwrap();
        assert_eq!(x, vec![FieldElem(1), FieldElem(1)]);
        let singular = mat(&[&[1, 1], &[1, 1]]);
        assert!(solve(&f3, &singular, &[FieldElem(0), FieldElem(1)]).is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rank_nullity_and_kernel_validity(
            q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 9]),
            rows in 1usize..7, cols in 1usize..7, seed in any::<u64>(),
        ) {
            let f = field_of_order(q).unwrap();
            let mut rng = SeededRng::new(seed);
            let mut m = Matrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    // sparse-ish to exercise rank deficiency
                    let v = if rng.below(3) == 0 { FieldElem::ZERO } else { rng.field_elem(&f) };
                    m.set(r, c, v);
                }
            }
            let rk = rank(&f, &m);
            let ker = left_kernel(&f, &m);
            prop_assert_eq!(ker.len(), rows - rk);
            for v in &ker {
                prop_assert!(row_combination(&f, v, &m).iter().all(|x| x.is_zero()));
            }
            prop_assert_eq!(rank(&f, &m.transpose()), rk);
            let row_refs: Vec<&[FieldElem]> = (0..rows).map(|r| m.row(r)).collect();
            prop_assert_eq!(rank_of_rows(&f, &row_refs, &mut Vec::new()), rk);
        }
    }
}
