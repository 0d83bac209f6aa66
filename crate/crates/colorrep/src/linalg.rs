//! Exact rational linear algebra: fraction-free rank, Gauss-Jordan solving,
//! and affine solution-set comparisons.

use crate::error::{Error, Result};
use crate::ratio::Ratio;
use num::{BigInt, Integer, One, Zero};

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    a: Vec<Ratio>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![Ratio::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Ratio>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Ratio {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Ratio) {
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Ratio] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Ratio> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    /// Appends `rhs` as an extra column.
    pub fn augmented(&self, rhs: &[Ratio]) -> Mat {
        assert_eq!(rhs.len(), self.rows);
        let mut m = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            m.set(i, self.cols, rhs[i].clone());
        }
        m
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut a = self.a.clone();
        a.extend(other.a.iter().cloned());
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            a,
        }
    }

    /// Rank over the rationals by fraction-free (Bareiss) elimination.
    ///
    /// Rows are first scaled to integers (row scaling preserves rank); the
    /// elimination then stays in `BigInt` with exact divisions only.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row
                    .iter()
                    .map(|r| r.denom().clone())
                    .fold(BigInt::one(), |acc, d| acc.lcm(&d));
                row.iter()
                    .map(|r| r.numer() * (&lcm / r.denom()))
                    .collect()
            })
            .collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev_pivot = BigInt::one();
        let mut col = 0;
        while rank < rows && col < cols {
            let Some(pivot_row) = (rank..rows).find(|&i| !m[i][col].is_zero()) else {
                col += 1;
                continue;
            };
            m.swap(rank, pivot_row);
            for i in rank + 1..rows {
                for j in col + 1..cols {
                    let v = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                    // Exact by the Bareiss identity.
                    m[i][j] = v / &prev_pivot;
                }
                m[i][col] = BigInt::zero();
            }
            prev_pivot = m[rank][col].clone();
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let f = self.get(i, c).clone();
                    for j in c..self.cols {
                        let v = self.get(i, j) - &f * self.get(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

/// Outcome of solving `A x = b` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Unique(Vec<Ratio>),
    /// Consistent with free variables; carries one particular solution
    /// (free variables set to zero) and the solution-set dimension.
    Underdetermined(Vec<Ratio>, usize),
    Inconsistent,
}

/// Solves `A x = b` by exact Gauss-Jordan.
pub fn solve(a: &Mat, b: &[Ratio]) -> SolveOutcome {
    let mut aug = a.augmented(b);
    let pivots = aug.rref();
    if pivots.last() == Some(&a.cols()) {
        return SolveOutcome::Inconsistent;
    }
    let mut x = vec![Ratio::zero(); a.cols()];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(r, a.cols()).clone();
    }
    let free = a.cols() - pivots.len();
    if free == 0 {
        SolveOutcome::Unique(x)
    } else {
        SolveOutcome::Underdetermined(x, free)
    }
}

/// Solves `A x = b` with the coordinates in `zeros` forced to zero.
/// `Unique` requires the remaining system to have a single solution.
pub fn solve_with_forced_zeros(a: &Mat, b: &[Ratio], zeros: &[usize]) -> SolveOutcome {
    let keep: Vec<usize> = (0..a.cols()).filter(|j| !zeros.contains(j)).collect();
    let sub = a.select_columns(&keep);
    match solve(&sub, b) {
        SolveOutcome::Unique(xs) => {
            let mut x = vec![Ratio::zero(); a.cols()];
            for (&j, v) in keep.iter().zip(xs) {
                x[j] = v;
            }
            SolveOutcome::Unique(x)
        }
        SolveOutcome::Underdetermined(xs, d) => {
            let mut x = vec![Ratio::zero(); a.cols()];
            for (&j, v) in keep.iter().zip(xs) {
                x[j] = v;
            }
            SolveOutcome::Underdetermined(x, d)
        }
        SolveOutcome::Inconsistent => SolveOutcome::Inconsistent,
    }
}

/// Inverts a square matrix; errors if singular.
pub fn invert(a: &Mat) -> Result<Mat> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::dimension("invert needs a square matrix"));
    }
    let mut aug = Mat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n + i, Ratio::one());
    }
    let pivots = aug.rref();
    if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(k, &c)| k != c) {
        return Err(Error::InfeasibleLinearSystem("singular matrix".into()));
    }
    let mut inv = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, aug.get(i, n + j).clone());
        }
    }
    Ok(inv)
}

/// Exact equality of the affine solution sets of `A1 x = b1` and `A2 x = b2`.
///
/// Two consistent systems describe the same affine set iff each one's rows are
/// rational combinations of the other's, i.e. stacking does not raise the
/// augmented rank on either side.
pub fn affine_sets_equal(a1: &Mat, b1: &[Ratio], a2: &Mat, b2: &[Ratio]) -> bool {
    let g1 = a1.augmented(b1);
    let g2 = a2.augmented(b2);
    let c1 = g1.rank() == a1.rank();
    let c2 = g2.rank() == a2.rank();
    match (c1, c2) {
        (false, false) => true,
        (true, true) => {
            let stacked = g1.vstack(&g2);
            let r = stacked.rank();
            r == g1.rank() && r == g2.rank()
        }
        _ => false,
    }
}

pub fn dot(a: &[Ratio], b: &[Ratio]) -> Ratio {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mat_vec(a: &Mat, x: &[Ratio]) -> Vec<Ratio> {
    (0..a.rows()).map(|i| dot(a.row(i), x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, ratio};

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_basic() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[1, 0], &[0, 1]]).rank(), 2);
        assert_eq!(m(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(), 2);
    }

    #[test]
    fn rank_with_fractions() {
        let a = Mat::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(3, 2), int(1)],
        ]);
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn solve_unique_and_inconsistent() {
        let a = m(&[&[2, 1], &[1, -1]]);
        match solve(&a, &[int(5), int(1)]) {
            SolveOutcome::Unique(x) => assert_eq!(x, vec![int(2), int(1)]),
            other => panic!("expected unique, got {other:?}"),
        }
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a, &[int(1), int(3)]), SolveOutcome::Inconsistent);
    }

    #[test]
    fn forced_zero_solving() {
        // x + y + z = 3, x - y = 1, with z forced 0 -> x=2, y=1
        let a = m(&[&[1, 1, 1], &[1, -1, 0]]);
        match solve_with_forced_zeros(&a, &[int(3), int(1)], &[2]) {
            SolveOutcome::Unique(x) => assert_eq!(x, vec![int(2), int(1), int(0)]),
            other => panic!("expected unique, got {other:?}"),
        }
    }

    #[test]
    fn invert_small() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = invert(&a).unwrap();
        assert_eq!(mat_vec(&inv, &[int(1), int(0)]), vec![int(1), int(-1)]);
        assert!(invert(&m(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn affine_set_comparison() {
        // x + y = 2 described two ways
        let a1 = m(&[&[1, 1]]);
        let a2 = m(&[&[2, 2], &[1, 1]]);
        assert!(affine_sets_equal(
            &a1,
            &[int(2)],
            &a2,
            &[int(4), int(2)]
        ));
        // different sets
        let a3 = m(&[&[1, 0]]);
        assert!(!affine_sets_equal(&a1, &[int(2)], &a3, &[int(2)]));
        // both inconsistent
        let bad = m(&[&[1, 1], &[1, 1]]);
        assert!(affine_sets_equal(
            &bad,
            &[int(0), int(1)],
            &bad,
            &[int(2), int(3)]
        ));
    }
}
