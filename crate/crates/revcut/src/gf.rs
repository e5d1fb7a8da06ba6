//! Prime-field arithmetic and dense matrices over F_p.
//!
//! Everything downstream (rank maximization, bound evaluation, code
//! synthesis) runs over a prime field chosen large enough for the randomized
//! constructions to succeed.  Only prime moduli are supported; extension
//! fields are out of scope.  Elements are canonical `u64` residues in
//! `0..p`; products go through `u128` so any prime `< 2^63` is safe.
//!
//! Rank uses division-free row elimination with first-nonzero pivoting
//! (ties broken by the lowest row index) so the pivot sequence, and hence
//! every reported rank, is deterministic.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `u64` (the fixed base set below is exact
/// for every 64-bit integer).
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut candidate = n.max(1) + 1;
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}

/// A prime field F_p, used as a lightweight handle by matrices and codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Field {
    modulus: u64,
}

impl Field {
    /// Builds F_p after a deterministic primality check.
    pub fn new(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field { modulus: p })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Canonical residue of an arbitrary integer.
    pub fn elem(&self, v: u64) -> u64 {
        v % self.modulus
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.modulus)
    }

    /// Multiplicative inverse via Fermat's little theorem.
    ///
    /// Panics on zero; callers are expected to pivot around zeros.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.modulus != 0, "zero has no multiplicative inverse");
        powmod(a, self.modulus - 2, self.modulus)
    }

    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        powmod(a, e, self.modulus)
    }
}

#[derive(Deserialize)]
struct RawMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

/// Dense row-major matrix over a prime field.
///
/// Empty matrices (zero rows and/or columns) are legal and have rank 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct Matrix {
    #[serde(rename = "modulus")]
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Matrix> {
        let field = Field::new(raw.modulus)?;
        if raw.entries.len() != raw.rows * raw.cols {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "matrix declared {}x{} but carries {} entries",
                    raw.rows,
                    raw.cols,
                    raw.entries.len()
                ),
            });
        }
        if raw.entries.iter().any(|&e| e >= raw.modulus) {
            return Err(Error::Validation(format!(
                "matrix entry out of range for modulus {}",
                raw.modulus
            )));
        }
        Ok(Matrix {
            field,
            rows: raw.rows,
            cols: raw.cols,
            entries: raw.entries,
        })
    }
}

impl Matrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from explicit rows, reducing entries mod p.
    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                context: "rows of unequal length".into(),
            });
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().map(|&v| field.elem(v)).collect(),
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.entries[r * self.cols + c] = self.field.elem(v);
    }

    /// New matrix made of the given rows (repetition allowed), all columns.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            assert!(r < self.rows, "row index out of bounds");
            entries.extend_from_slice(&self.entries[r * self.cols..(r + 1) * self.cols]);
        }
        Matrix {
            field: self.field,
            rows: rows.len(),
            cols: self.cols,
            entries,
        }
    }

    /// New matrix made of the given column range, all rows.
    pub fn select_cols(&self, cols: std::ops::Range<usize>) -> Matrix {
        assert!(cols.end <= self.cols, "column range out of bounds");
        let width = cols.len();
        let mut entries = Vec::with_capacity(self.rows * width);
        for r in 0..self.rows {
            entries.extend_from_slice(&self.entries[r * self.cols + cols.start..r * self.cols + cols.end]);
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: width,
            entries,
        }
    }

    /// Vertical stack: `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::DimensionMismatch {
                context: "stacking matrices over different fields".into(),
            });
        }
        if self.cols != other.cols && self.rows != 0 && other.rows != 0 {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "stacking {} columns on {} columns",
                    other.cols, self.cols
                ),
            });
        }
        let cols = if self.rows == 0 { other.cols } else { self.cols };
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols,
            entries,
        })
    }

    /// Horizontal concatenation: `self` to the left of `other`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::DimensionMismatch {
                context: "concatenating matrices over different fields".into(),
            });
        }
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                context: format!("concatenating {} rows beside {} rows", other.rows, self.rows),
            });
        }
        let mut entries = Vec::with_capacity(self.rows * (self.cols + other.cols));
        for r in 0..self.rows {
            entries.extend_from_slice(&self.entries[r * self.cols..(r + 1) * self.cols]);
            entries.extend_from_slice(&other.entries[r * other.cols..(r + 1) * other.cols]);
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols + other.cols,
            entries,
        })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::DimensionMismatch {
                context: "multiplying matrices over different fields".into(),
            });
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: format!("multiplying {}-column by {}-row", self.cols, other.rows),
            });
        }
        let f = self.field;
        let mut out = Matrix::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector given as a slice.
    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: format!("vector of length {} against {} columns", v.len(), self.cols),
            });
        }
        let f = self.field;
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u64;
            for k in 0..self.cols {
                acc = f.add(acc, f.mul(self.get(i, k), f.elem(v[k])));
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Rank by division-free forward elimination.
    ///
    /// For each column the pivot is the first nonzero entry scanning rows in
    /// increasing order; rows below are cleared with `row <- pivot*row -
    /// factor*pivot_row`, which never divides and keeps every intermediate
    /// value a canonical residue.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let f = self.field;
        let mut w = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |w: &Vec<u64>, r: usize, c: usize| w[r * cols + c];
        let mut pivot_row = 0usize;
        for col in 0..cols {
            if pivot_row == rows {
                break;
            }
            let mut sel = None;
            for r in pivot_row..rows {
                if at(&w, r, col) != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else { continue };
            if sel != pivot_row {
                for c in 0..cols {
                    w.swap(pivot_row * cols + c, sel * cols + c);
                }
            }
            let pivot = at(&w, pivot_row, col);
            for r in pivot_row + 1..rows {
                let factor = at(&w, r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..cols {
                    let scaled = f.mul(pivot, at(&w, r, c));
                    let correction = f.mul(factor, at(&w, pivot_row, c));
                    w[r * cols + c] = f.sub(scaled, correction);
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }

    /// Inverse by Gauss-Jordan elimination on `[self | I]`.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let f = self.field;
        let mut a = self.clone();
        let mut inv = Matrix::identity(f, n);
        for col in 0..n {
            let mut sel = None;
            for r in col..n {
                if a.get(r, col) != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else {
                return Err(Error::Singular);
            };
            if sel != col {
                for c in 0..n {
                    let (x, y) = (a.get(col, c), a.get(sel, c));
                    a.set(col, c, y);
                    a.set(sel, c, x);
                    let (x, y) = (inv.get(col, c), inv.get(sel, c));
                    inv.set(col, c, y);
                    inv.set(sel, c, x);
                }
            }
            let scale = f.inv(a.get(col, col));
            for c in 0..n {
                a.set(col, c, f.mul(scale, a.get(col, c)));
                inv.set(col, c, f.mul(scale, inv.get(col, c)));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..n {
                    let v = f.sub(a.get(r, c), f.mul(factor, a.get(col, c)));
                    a.set(r, c, v);
                    let v = f.sub(inv.get(r, c), f.mul(factor, inv.get(col, c)));
                    inv.set(r, c, v);
                }
            }
        }
        Ok(inv)
    }
}

/// True when the row spaces of `a` and `b` meet only in the zero vector,
/// i.e. `rank([a; b]) == rank(a) + rank(b)`.
pub fn row_space_intersection_trivial(a: &Matrix, b: &Matrix) -> Result<bool> {
    if a.cols() != b.cols() && a.rows() != 0 && b.rows() != 0 {
        return Err(Error::DimensionMismatch {
            context: format!(
                "row spaces live in different ambient dimensions ({} vs {})",
                a.cols(),
                b.cols()
            ),
        });
    }
    let stacked = a.vstack(b)?;
    Ok(stacked.rank() == a.rank() + b.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::collections::HashSet;

    /// Independent rank oracle: enumerate every linear combination of the
    /// rows and count the distinct vectors; the span of a rank-r matrix over
    /// F_q has exactly q^r elements.
    fn span_rank(m: &Matrix) -> usize {
        let f = m.field();
        let q = f.modulus() as usize;
        let rows = m.rows();
        let mut span: HashSet<Vec<u64>> = HashSet::new();
        for idx in 0..q.pow(rows as u32) {
            let mut combo = vec![0u64; m.cols()];
            let mut x = idx;
            for r in 0..rows {
                let c = (x % q) as u64;
                x /= q;
                for col in 0..m.cols() {
                    combo[col] = f.add(combo[col], f.mul(c, m.get(r, col)));
                }
            }
            span.insert(combo);
        }
        let mut rank = 0usize;
        let mut n = span.len();
        while n > 1 {
            n /= q;
            rank += 1;
        }
        rank
    }

    fn all_matrices(field: Field, rows: usize, cols: usize) -> Vec<Matrix> {
        let q = field.modulus();
        let n = rows * cols;
        let total = (q as usize).pow(n as u32);
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut entries = Vec::with_capacity(n);
            let mut x = idx;
            for _ in 0..n {
                entries.push((x % q as usize) as u64);
                x /= q as usize;
            }
            out.push(Matrix {
                field,
                rows,
                cols,
                entries,
            });
        }
        out
    }

    #[test]
    fn rejects_composite_moduli() {
        assert!(Field::new(7).is_ok());
        assert!(Field::new(2).is_ok());
        assert!(Field::new(4294967291).is_ok()); // largest prime below 2^32
        assert!(matches!(Field::new(6), Err(Error::NotPrime(6))));
        assert!(matches!(Field::new(1), Err(Error::NotPrime(1))));
        assert!(matches!(Field::new(0), Err(Error::NotPrime(0))));
    }

    #[test]
    fn field_arithmetic_basics() {
        let f = Field::new(7).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.div(1, 3), 5);
        assert_eq!(f.neg(0), 0);
        assert_eq!(f.neg(2), 5);
        let f2 = Field::new(2).unwrap();
        assert_eq!(f2.inv(1), 1);
    }

    #[test]
    fn next_prime_walks_upward() {
        assert_eq!(next_prime(1), 2);
        assert_eq!(next_prime(2), 3);
        assert_eq!(next_prime(6), 7);
        assert_eq!(next_prime(360), 367);
        assert_eq!(next_prime(1000), 1009);
    }

    #[test]
    fn rank_of_proportional_rows_is_one() {
        let f = Field::new(5).unwrap();
        let m = Matrix::from_rows(f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(span_rank(&m), 1);
    }

    #[test]
    fn empty_matrices_have_rank_zero() {
        let f = Field::new(3).unwrap();
        assert_eq!(Matrix::zero(f, 0, 4).rank(), 0);
        assert_eq!(Matrix::zero(f, 4, 0).rank(), 0);
        assert_eq!(Matrix::zero(f, 0, 0).rank(), 0);
    }

    #[test]
    fn rank_agrees_with_span_oracle_exhaustively() {
        for q in [2u64, 3] {
            let f = Field::new(q).unwrap();
            for (rows, cols) in [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
                if (q as usize).pow((rows * cols) as u32) > 20000 {
                    continue;
                }
                for m in all_matrices(f, rows, cols) {
                    assert_eq!(m.rank(), span_rank(&m), "disagreement on {:?}", m);
                }
            }
        }
    }

    #[test]
    fn rank_invariant_under_permutations() {
        let f = Field::new(11).unwrap();
        let mut rng = crate::seed::SeedStream::new(901).rng();
        for _ in 0..200 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let m = Matrix::from_rows(
                f,
                &(0..rows)
                    .map(|_| (0..cols).map(|_| rng.gen_range(0..11)).collect())
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let mut perm: Vec<usize> = (0..rows).collect();
            for i in (1..rows).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let permuted = m.select_rows(&perm);
            assert_eq!(m.rank(), permuted.rank());
            // column permutation via transpose-free re-read
            let mut cperm: Vec<usize> = (0..cols).collect();
            for i in (1..cols).rev() {
                cperm.swap(i, rng.gen_range(0..=i));
            }
            let colperm = Matrix::from_rows(
                f,
                &(0..rows)
                    .map(|r| cperm.iter().map(|&c| m.get(r, c)).collect())
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            assert_eq!(m.rank(), colperm.rank());
        }
    }

    #[test]
    fn inverse_exists_iff_full_rank() {
        let f = Field::new(5).unwrap();
        let mut rng = crate::seed::SeedStream::new(902).rng();
        for _ in 0..300 {
            let n = rng.gen_range(1..=4);
            let m = Matrix::from_rows(
                f,
                &(0..n)
                    .map(|_| (0..n).map(|_| rng.gen_range(0..5)).collect())
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            match m.inverse() {
                Ok(inv) => {
                    assert_eq!(m.rank(), n);
                    assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(f, n));
                    assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(f, n));
                }
                Err(Error::Singular) => assert!(m.rank() < n),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn involutory_matrix_over_f2() {
        let f = Field::new(2).unwrap();
        let m = Matrix::from_rows(f, &[vec![1, 1], vec![0, 1]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(inv, m);
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(f, 2));
    }

    #[test]
    fn non_square_inversion_is_rejected() {
        let f = Field::new(3).unwrap();
        let m = Matrix::zero(f, 2, 3);
        assert!(matches!(
            m.inverse(),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn row_space_intersection_detects_shared_lines() {
        let f = Field::new(3).unwrap();
        let a = Matrix::from_rows(f, &[vec![1, 1]]).unwrap();
        let b = Matrix::from_rows(f, &[vec![2, 2]]).unwrap();
        assert!(!row_space_intersection_trivial(&a, &b).unwrap());
        let c = Matrix::from_rows(f, &[vec![1, 0]]).unwrap();
        let d = Matrix::from_rows(f, &[vec![0, 1]]).unwrap();
        assert!(row_space_intersection_trivial(&c, &d).unwrap());
        let e = Matrix::from_rows(f, &[vec![1, 0, 0]]).unwrap();
        assert!(matches!(
            row_space_intersection_trivial(&a, &e),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn serialization_round_trips_and_validates() {
        let f = Field::new(7).unwrap();
        let m = Matrix::from_rows(f, &[vec![3, 5], vec![0, 6]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"modulus\":7"));
        let back: Matrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"modulus":7,"rows":2,"cols":2,"entries":[1,2,3]}"#;
        assert!(serde_json::from_str::<Matrix>(bad).is_err());
        let oob = r#"{"modulus":7,"rows":1,"cols":2,"entries":[1,9]}"#;
        assert!(serde_json::from_str::<Matrix>(oob).is_err());
        let composite = r#"{"modulus":8,"rows":1,"cols":1,"entries":[1]}"#;
        assert!(serde_json::from_str::<Matrix>(composite).is_err());
    }
}
