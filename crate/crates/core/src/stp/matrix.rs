//! Logical matrices and the semi-tensor product.
//!
//! A Boolean value is encoded as a canonical vector of length two: true is
//! the first basis vector, false the second. A logical matrix has a single 1
//! per column, so it is stored as the row index of that 1 for every column.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::boolnet::{Expr, NodeFunction};

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Canonical index of a Boolean value.
pub fn bool_index(b: bool) -> usize {
    usize::from(!b)
}

#[derive(Clone, PartialEq, Eq)]
pub struct LogicalMatrix {
    rows: usize,
    cols: Vec<usize>,
}

impl fmt::Debug for LogicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ{}{:?}", self.rows, self.column_indices())
    }
}

/// Serialized as `{"rows": r, "columns": [1-based row index per column]}`.
impl Serialize for LogicalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            rows: usize,
            columns: Vec<usize>,
        }
        Repr {
            rows: self.rows,
            columns: self.column_indices(),
        }
        .serialize(s)
    }
}

impl LogicalMatrix {
    /// Build from 0-based row indices, one per column.
    pub fn new(rows: usize, cols: Vec<usize>) -> Self {
        assert!(rows > 0, "logical matrix needs at least one row");
        assert!(cols.iter().all(|&c| c < rows), "column index out of range");
        LogicalMatrix { rows, cols }
    }

    /// Build from 1-based row indices, matching the usual `δ_r[i1, i2, ...]` notation.
    pub fn delta(rows: usize, indices: &[usize]) -> Self {
        LogicalMatrix::new(rows, indices.iter().map(|&i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        LogicalMatrix::new(n, (0..n).collect())
    }

    /// Canonical basis vector `e_i` of length `n` (0-based `i`).
    pub fn basis(n: usize, i: usize) -> Self {
        LogicalMatrix::new(n, vec![i])
    }

    pub fn from_bool(b: bool) -> Self {
        LogicalMatrix::basis(2, bool_index(b))
    }

    /// The all-ones row vector of length `n`.
    pub fn ones_row(n: usize) -> Self {
        LogicalMatrix::new(1, vec![0; n])
    }

    pub fn negation() -> Self {
        LogicalMatrix::new(2, vec![1, 0])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// 0-based row index of the 1 in each column.
    pub fn columns(&self) -> &[usize] {
        &self.cols
    }

    pub fn column_indices(&self) -> Vec<usize> {
        self.cols.iter().map(|c| c + 1).collect()
    }

    pub fn transpose(&self) -> Option<Self> {
        // Only permutation matrices stay logical under transposition.
        if self.rows != self.ncols() {
            return None;
        }
        let mut t = vec![usize::MAX; self.rows];
        for (c, &r) in self.cols.iter().enumerate() {
            if t[r] != usize::MAX {
                return None;
            }
            t[r] = c;
        }
        Some(LogicalMatrix::new(self.rows, t))
    }

    /// Ordinary product; inner dimensions must agree.
    pub fn mul(&self, other: &LogicalMatrix) -> LogicalMatrix {
        assert_eq!(self.ncols(), other.rows, "dimension mismatch in product");
        LogicalMatrix::new(self.rows, other.cols.iter().map(|&c| self.cols[c]).collect())
    }

    pub fn kron(&self, other: &LogicalMatrix) -> LogicalMatrix {
        let q = other.ncols();
        let mut cols = Vec::with_capacity(self.ncols() * q);
        for &a in &self.cols {
            for &b in &other.cols {
                cols.push(a * other.rows + b);
            }
        }
        LogicalMatrix::new(self.rows * other.rows, cols)
    }

    /// Semi-tensor product `A ⋉ B = (A ⊗ I_{t/n})(B ⊗ I_{t/p})` with
    /// `t = lcm(n, p)`, `n` the columns of `A` and `p` the rows of `B`.
    pub fn stp(&self, other: &LogicalMatrix) -> LogicalMatrix {
        let t = lcm(self.ncols(), other.rows);
        let left = t / self.ncols();
        let right = t / other.rows;
        // Column c of (B ⊗ I_right) is e_{B[c / right] * right + c % right};
        // (A ⊗ I_left) maps e_idx to e_{A[idx / left] * left + idx % left}.
        let cols = (0..other.ncols() * right)
            .map(|c| {
                let idx = other.cols[c / right] * right + c % right;
                self.cols[idx / left] * left + idx % left
            })
            .collect();
        LogicalMatrix::new(self.rows * left, cols)
    }

    /// Left-to-right semi-tensor product of a sequence.
    pub fn stp_all<'a>(items: impl IntoIterator<Item = &'a LogicalMatrix>) -> Option<LogicalMatrix> {
        items
            .into_iter()
            .fold(None, |acc: Option<LogicalMatrix>, m| Some(acc.map_or_else(|| m.clone(), |a| a.stp(m))))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.ncols());
        for (c, &r) in self.cols.iter().enumerate() {
            d.set(r, c, 1);
        }
        d
    }
}

/// Swap matrix `W_[m,n]`: maps `u ⊗ v` to `v ⊗ u` for `u` of length `m` and `v` of length `n`.
pub fn swap(m: usize, n: usize) -> LogicalMatrix {
    LogicalMatrix::new(m * n, (0..m * n).map(|c| (c % n) * m + c / n).collect())
}

/// Dummy matrix `M_d` on `k`-valued canonical vectors: `M_d ⋉ u ⋉ v = u`.
pub fn dummy(k: usize) -> LogicalMatrix {
    LogicalMatrix::new(k, (0..k * k).map(|c| c / k).collect())
}

/// Power-reducing matrix `M_r`: `M_r ⋉ v = v ⋉ v` for canonical `v` of length `k`.
pub fn power_reducing(k: usize) -> LogicalMatrix {
    LogicalMatrix::new(k * k, (0..k).map(|a| a * k + a).collect())
}

/// Removes the `iota`-th (1-based) factor from a product of `count` Boolean
/// canonical vectors: `D ⋉ x_1 ⋉ … ⋉ x_count` equals the same product with
/// `x_iota` left out. Built from dummy and swap matrices.
pub fn delete_factor(iota: usize, count: usize) -> LogicalMatrix {
    assert!(count >= 2 && (1..=count).contains(&iota));
    let md = dummy(2);
    if iota >= 2 {
        // the dummy sees (x_{iota-1}, x_iota) and keeps the first
        let before = LogicalMatrix::identity(1 << (iota - 2));
        let after = LogicalMatrix::identity(1 << (count - iota));
        before.kron(&md).kron(&after)
    } else {
        // move x_1 to the back, then drop it against x_count
        let rest = 1 << (count - 1);
        let keep = LogicalMatrix::identity(rest / 2).kron(&md);
        keep.mul(&swap(2, rest))
    }
}

/// Structure matrix of `f` as a function of `x_1..x_k`: the 2 × 2^k logical
/// matrix with `M_f ⋉ x_1 ⋉ … ⋉ x_k` equal to the canonical form of `f`.
pub fn structure_matrix(f: &Expr, k: usize) -> LogicalMatrix {
    LogicalMatrix::new(
        2,
        (0..1usize << k)
            .map(|c| bool_index(f.eval(&|i| i >= 1 && i <= k && canonical_bit(c, i, k))))
            .collect(),
    )
}

/// Structure matrix of a truth-table rule over its inputs in ascending order.
pub fn structure_matrix_of(f: &NodeFunction) -> LogicalMatrix {
    let k = f.arity();
    LogicalMatrix::new(
        2,
        (0..1usize << k)
            .map(|c| {
                let row = (0..k).fold(0, |acc, b| acc | usize::from(canonical_bit(c, b + 1, k)) << b);
                bool_index(f.table[row])
            })
            .collect(),
    )
}

/// Value of the `i`-th (1-based) of `k` variables in canonical column `c`.
/// The first variable is the most significant and `true` is index 0.
pub fn canonical_bit(c: usize, i: usize, k: usize) -> bool {
    c >> (k - i) & 1 == 0
}

/// Column index of the product of canonical vectors for the given values.
pub fn canonical_column(values: &[bool]) -> usize {
    values.iter().fold(0, |acc, &v| acc * 2 + bool_index(v))
}

/// Dense integer matrix, used to cross-check the index arithmetic above.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut d = DenseMatrix::zeros(n, n);
        for i in 0..n {
            d.set(i, i, 1);
        }
        d
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        DenseMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn stp(&self, other: &DenseMatrix) -> DenseMatrix {
        let t = lcm(self.cols, other.rows);
        self.kron(&DenseMatrix::identity(t / self.cols))
            .mul(&other.kron(&DenseMatrix::identity(t / other.rows)))
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conforming_stp_is_the_ordinary_product() {
        let a = LogicalMatrix::delta(2, &[1, 2, 2, 1]);
        let b = LogicalMatrix::delta(4, &[3, 1]);
        assert_eq!(a.stp(&b), a.mul(&b));
    }

    #[test]
    fn swap_exchanges_two_booleans() {
        let w = swap(2, 2);
        for u in [true, false] {
            for v in [true, false] {
                let (eu, ev) = (LogicalMatrix::from_bool(u), LogicalMatrix::from_bool(v));
                assert_eq!(w.stp(&eu).stp(&ev), ev.stp(&eu));
            }
        }
        assert_eq!(w, LogicalMatrix::delta(4, &[1, 3, 2, 4]));
    }

    #[test]
    fn small_canonical_matrices() {
        let e1 = LogicalMatrix::basis(2, 0);
        assert_eq!(power_reducing(2).stp(&e1), e1.kron(&e1));
        assert_eq!(dummy(2), LogicalMatrix::delta(2, &[1, 1, 2, 2]));
    }

    #[test]
    fn structure_matrices_of_basic_functions() {
        let id = Expr::parse("x1").unwrap();
        assert_eq!(structure_matrix(&id, 1), LogicalMatrix::identity(2));
        let and = Expr::parse("x1 & x2").unwrap();
        assert_eq!(structure_matrix(&and, 2), LogicalMatrix::delta(2, &[1, 2, 2, 2]));
        let not = Expr::parse("!x1").unwrap();
        assert_eq!(structure_matrix(&not, 1), LogicalMatrix::negation());
    }

    #[test]
    fn delete_factor_matches_index_arithmetic() {
        for count in 2..=6 {
            for iota in 1..=count {
                let d = delete_factor(iota, count);
                assert_eq!((d.rows(), d.ncols()), (1 << (count - 1), 1 << count));
                for c in 0..1usize << count {
                    let values: Vec<bool> = (1..=count).map(|i| canonical_bit(c, i, count)).collect();
                    let kept: Vec<bool> = values
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i + 1 != iota)
                        .map(|(_, &v)| v)
                        .collect();
                    assert_eq!(d.columns()[c], canonical_column(&kept));
                }
            }
        }
    }

    #[test]
    fn transpose_of_permutations() {
        let w = swap(2, 4);
        assert_eq!(w.transpose().unwrap(), swap(4, 2));
        assert!(dummy(2).transpose().is_none());
    }

    #[test]
    fn dense_and_logical_agree() {
        let a = LogicalMatrix::delta(2, &[1, 2, 2, 1]);
        let b = LogicalMatrix::delta(2, &[2, 1]);
        assert_eq!(a.stp(&b).to_dense(), a.to_dense().stp(&b.to_dense()));
        assert_eq!(b.stp(&a).to_dense(), b.to_dense().stp(&a.to_dense()));
        let m = DenseMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(m.mul(&DenseMatrix::identity(2)), m);
        assert!(m.sub(&m).is_zero());
    }
}
