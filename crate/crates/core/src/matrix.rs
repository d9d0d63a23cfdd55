//! Dense integer matrices and lattice arithmetic.
//!
//! Lattices are represented by their basis matrices with basis vectors as
//! columns. The canonical form used throughout is the column-style Hermite
//! normal form: triangular with positive pivots on the diagonal (column `j`
//! is zero above its pivot row) and every off-pivot entry in a pivot row
//! reduced into `[0, pivot)`. Two generator sets span the same lattice
//! exactly when their canonical HNF matrices are identical.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{internal, invalid, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = IntMat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Build a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = IntMat::zero(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in 0..rows {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows);
        IntMat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn transpose(&self) -> IntMat {
        IntMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        IntMat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = BigInt::zero();
            for k in 0..self.cols {
                acc += &self[(i, k)] * &other[(k, j)];
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += &self[(i, k)] * &v[k];
                }
                acc
            })
            .collect()
    }

    pub fn take_columns(&self, range: std::ops::Range<usize>) -> IntMat {
        IntMat::from_fn(self.rows, range.len(), |i, j| {
            self[(i, range.start + j)].clone()
        })
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// `col_dst += q * col_src`
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let add = &self[(i, src)] * q;
            self[(i, dst)] += add;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// `row_dst += q * row_src`
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let add = &self[(src, j)] * q;
            self[(dst, j)] += add;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = &num / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Display for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

pub struct HnfResult {
    /// Column-reduced matrix; the first `rank` columns form the canonical
    /// basis, the remaining columns are zero.
    pub h: IntMat,
    /// Unimodular transform with `h = a * u`.
    pub u: IntMat,
    pub rank: usize,
    /// Pivot row of each of the first `rank` columns, strictly increasing.
    pub pivot_rows: Vec<usize>,
}

/// Column-style Hermite normal form with transform.
pub fn column_hnf(a: &IntMat) -> HnfResult {
    let (n, k) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMat::identity(k);
    let mut col = 0usize;
    let mut pivot_rows = Vec::new();

    for row in 0..n {
        if col == k {
            break;
        }
        // Gcd-eliminate the entries of this row among columns col..k.
        loop {
            let mut best: Option<usize> = None;
            for j in col..k {
                if !h[(row, j)].is_zero() {
                    let better = match best {
                        None => true,
                        Some(b) => h[(row, j)].abs() < h[(row, b)].abs(),
                    };
                    if better {
                        best = Some(j);
                    }
                }
            }
            let Some(b) = best else {
                break;
            };
            h.swap_cols(col, b);
            u.swap_cols(col, b);
            let pivot = h[(row, col)].clone();
            let mut clean = true;
            for j in col + 1..k {
                if !h[(row, j)].is_zero() {
                    let q = -h[(row, j)].div_floor(&pivot);
                    h.add_col_multiple(j, col, &q);
                    u.add_col_multiple(j, col, &q);
                    if !h[(row, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if !h[(row, col)].is_zero() {
            if h[(row, col)].is_negative() {
                h.negate_col(col);
                u.negate_col(col);
            }
            pivot_rows.push(row);
            col += 1;
        }
    }
    let rank = col;

    // Canonical off-pivot reduction: in each pivot row, reduce the entries
    // of the earlier columns into [0, pivot). Processing pivots in
    // increasing row order keeps already-reduced rows untouched.
    for j in 1..rank {
        let row = pivot_rows[j];
        let pivot = h[(row, j)].clone();
        for i in 0..j {
            if !h[(row, i)].is_zero() {
                let q = -h[(row, i)].div_floor(&pivot);
                if !q.is_zero() {
                    h.add_col_multiple(i, j, &q);
                    u.add_col_multiple(i, j, &q);
                }
            }
        }
    }

    HnfResult {
        h,
        u,
        rank,
        pivot_rows,
    }
}

/// Canonical HNF basis of the column span (zero columns dropped).
pub fn hnf_basis(a: &IntMat) -> IntMat {
    let r = column_hnf(a);
    r.h.take_columns(0..r.rank)
}

/// Basis of the integer kernel `{x : a x = 0}`, as columns.
pub fn kernel(a: &IntMat) -> IntMat {
    let r = column_hnf(a);
    r.u.take_columns(r.rank..a.cols())
}

/// Determinant of a full-rank lattice basis in canonical HNF
/// (product of the diagonal pivots).
pub fn hnf_det(h: &IntMat) -> BigInt {
    assert_eq!(h.rows(), h.cols());
    let mut d = BigInt::one();
    for i in 0..h.rows() {
        d *= &h[(i, i)];
    }
    d
}

/// Solve `a y = t` over the integers. Returns `None` when no solution exists.
pub fn solve_columns(a: &IntMat, t: &[BigInt]) -> Option<Vec<BigInt>> {
    let r = column_hnf(a);
    let n = a.rows();
    let mut z = vec![BigInt::zero(); r.rank];
    // Echelon columns have strictly increasing pivot rows and zeros in
    // later columns at earlier pivot rows; solve top-down.
    for i in 0..r.rank {
        let row = r.pivot_rows[i];
        let mut rhs = t[row].clone();
        for j in 0..i {
            rhs -= &r.h[(row, j)] * &z[j];
        }
        let (q, rem) = rhs.div_rem(&r.h[(row, i)]);
        if !rem.is_zero() {
            return None;
        }
        z[i] = q;
    }
    // Verify the remaining rows.
    for row in 0..n {
        let mut acc = BigInt::zero();
        for j in 0..r.rank {
            acc += &r.h[(row, j)] * &z[j];
        }
        if acc != t[row] {
            return None;
        }
    }
    let uz = r.u.take_columns(0..r.rank).mul_vec(&z);
    Some(uz)
}

/// Membership of a vector in the column lattice of `h`.
pub fn lattice_contains(h: &IntMat, x: &[BigInt]) -> bool {
    solve_columns(h, x).is_some()
}

/// Containment of lattices: every column of `inner` lies in `outer`.
pub fn lattice_subset(inner: &IntMat, outer: &IntMat) -> bool {
    (0..inner.cols()).all(|j| lattice_contains(outer, &inner.column(j)))
}

/// Canonical basis of the sum of two lattices.
pub fn lattice_sum(a: &IntMat, b: &IntMat) -> IntMat {
    hnf_basis(&a.hstack(b))
}

/// Canonical basis of the intersection of two full-rank lattices.
pub fn lattice_intersect(a: &IntMat, b: &IntMat) -> IntMat {
    let mut neg_b = b.clone();
    for j in 0..neg_b.cols() {
        neg_b.negate_col(j);
    }
    let ker = kernel(&a.hstack(&neg_b));
    // The a-parts of the kernel vectors span the intersection.
    let top = ker.take_columns(0..ker.cols());
    let mut cols = Vec::new();
    for j in 0..top.cols() {
        let coeffs: Vec<BigInt> = (0..a.cols()).map(|i| top[(i, j)].clone()).collect();
        cols.push(a.mul_vec(&coeffs));
    }
    hnf_basis(&IntMat::from_columns(a.rows(), &cols))
}

/// Canonical basis of the preimage lattice `{v : m v in span(h)}` for a
/// full-rank lattice `h`.
pub fn lattice_preimage(m: &IntMat, h: &IntMat) -> IntMat {
    let mut neg_h = h.clone();
    for j in 0..neg_h.cols() {
        neg_h.negate_col(j);
    }
    let ker = kernel(&m.hstack(&neg_h));
    let mut cols = Vec::new();
    for j in 0..ker.cols() {
        cols.push((0..m.cols()).map(|i| ker[(i, j)].clone()).collect());
    }
    hnf_basis(&IntMat::from_columns(m.cols(), &cols))
}

/// Exact inverse of a nonsingular square integer matrix, over the rationals.
pub fn inverse_rational(a: &IntMat) -> Result<Vec<Vec<BigRational>>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut work: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from(a[(i, j)].clone())
                    } else if j - n == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&i| !work[i][col].is_zero())
            .ok_or_else(|| invalid("matrix is singular"))?;
        work.swap(col, pivot_row);
        let pivot = work[col][col].clone();
        for j in 0..2 * n {
            work[col][j] = &work[col][j] / &pivot;
        }
        for i in 0..n {
            if i != col && !work[i][col].is_zero() {
                let factor = work[i][col].clone();
                for j in 0..2 * n {
                    let sub = &factor * &work[col][j];
                    work[i][j] = &work[i][j] - sub;
                }
            }
        }
    }
    Ok(work
        .into_iter()
        .map(|row| row.into_iter().skip(n).collect())
        .collect())
}

/// Apply a rational matrix to an integer vector, requiring an integral result.
pub fn apply_rational(m: &[Vec<BigRational>], v: &[BigInt]) -> Result<Vec<BigInt>> {
    let mut out = Vec::with_capacity(m.len());
    for row in m {
        let mut acc = BigRational::zero();
        for (c, x) in row.iter().zip(v) {
            acc += c * BigRational::from(x.clone());
        }
        if !acc.is_integer() {
            return Err(internal("expected integral coordinates"));
        }
        out.push(acc.to_integer());
    }
    Ok(out)
}

pub struct SnfResult {
    /// Elementary divisors `d_1 | d_2 | ... | d_n`, all nonnegative.
    pub divisors: Vec<BigInt>,
    /// Row transform: `diag(d) = u * a * v` for some unimodular `v`.
    pub u: IntMat,
    pub u_inv: IntMat,
}

/// Smith normal form of a square integer matrix, tracking the row transform
/// and its inverse (the column transform is applied but not returned).
pub fn smith_normal_form(a: &IntMat) -> SnfResult {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    let mut u = IntMat::identity(n);
    let mut u_inv = IntMat::identity(n);

    // row j += q * row i  (and keep u, u_inv in sync)
    macro_rules! row_op {
        ($dst:expr, $src:expr, $q:expr) => {{
            let q = $q;
            m.add_row_multiple($dst, $src, &q);
            u.add_row_multiple($dst, $src, &q);
            u_inv.add_col_multiple($src, $dst, &(-q));
        }};
    }

    for t in 0..n {
        loop {
            // Find the smallest nonzero entry in the remaining block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !m[(i, j)].is_zero() {
                        let better = match best {
                            None => true,
                            Some((bi, bj)) => m[(i, j)].abs() < m[(bi, bj)].abs(),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break;
            };
            if bi != t {
                m.swap_rows(t, bi);
                u.swap_rows(t, bi);
                u_inv.swap_cols(t, bi);
            }
            if bj != t {
                m.swap_cols(t, bj);
            }
            let pivot = m[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..n {
                if !m[(i, t)].is_zero() {
                    let q = -m[(i, t)].div_floor(&pivot);
                    row_op!(i, t, q);
                    if !m[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !m[(t, j)].is_zero() {
                    let q = -m[(t, j)].div_floor(&pivot);
                    m.add_col_multiple(j, t, &q);
                    if !m[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest of
            // the block by folding offending entries into column t.
            let mut fixed = true;
            'outer: for i in t + 1..n {
                for j in t + 1..n {
                    if !(&m[(i, j)] % &pivot).is_zero() {
                        row_op!(t, i, BigInt::one());
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if m[(t, t)].is_negative() {
            m.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }

    let divisors = (0..n).map(|i| m[(i, i)].clone()).collect();
    SnfResult { divisors, u, u_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, v: &[i64]) -> IntMat {
        IntMat::from_fn(rows, cols, |i, j| BigInt::from(v[i * cols + j]))
    }

    #[test]
    fn hnf_fiber_product_basis() {
        // generators (1,1) and (p,0) for p=5: canonical HNF {(1,1),(0,5)}
        let a = m(2, 2, &[1, 5, 1, 0]);
        let h = hnf_basis(&a);
        assert_eq!(h, m(2, 2, &[1, 0, 1, 5]));
        assert_eq!(hnf_det(&h), BigInt::from(5));
    }

    #[test]
    fn hnf_canonical_under_column_moves() {
        let a = m(3, 4, &[2, 4, 4, 1, 6, 6, 12, 3, 10, 4, 16, 5]);
        let b = m(3, 4, &[4, 1, 2, 4, 12, 3, 6, 6, 16, 5, 10, 4]);
        assert_eq!(hnf_basis(&a), hnf_basis(&b));
    }

    #[test]
    fn hnf_transform_consistent() {
        let a = m(3, 3, &[2, 3, 5, 4, 1, 7, 0, 2, 9]);
        let r = column_hnf(&a);
        assert_eq!(a.mul(&r.u), r.h);
    }

    #[test]
    fn kernel_of_projection() {
        let a = m(1, 3, &[2, 4, 6]);
        let k = kernel(&a);
        assert_eq!(k.cols(), 2);
        for j in 0..2 {
            let v = k.column(j);
            assert!(a.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_membership() {
        let h = m(2, 2, &[1, 0, 1, 5]);
        assert!(lattice_contains(&h, &[BigInt::from(3), BigInt::from(13)]));
        assert!(!lattice_contains(&h, &[BigInt::from(3), BigInt::from(12)]));
    }

    #[test]
    fn intersect_and_sum() {
        let a = m(2, 2, &[2, 0, 0, 1]);
        let b = m(2, 2, &[3, 0, 0, 1]);
        let i = lattice_intersect(&a, &b);
        assert_eq!(i, m(2, 2, &[6, 0, 0, 1]));
        let s = lattice_sum(&a, &b);
        assert_eq!(s, IntMat::identity(2));
    }

    #[test]
    fn preimage_lattice() {
        // {v : 2v in 6Z} = 3Z
        let mmul = m(1, 1, &[2]);
        let h = m(1, 1, &[6]);
        assert_eq!(lattice_preimage(&mmul, &h), m(1, 1, &[3]));
    }

    #[test]
    fn det_bareiss() {
        let a = m(3, 3, &[2, 3, 5, 4, 1, 7, 0, 2, 9]);
        // expansion along the first row: 2*(9-14) - 3*36 + 5*8 = -78
        assert_eq!(a.det(), BigInt::from(-78));
    }

    #[test]
    fn snf_divisors() {
        let a = m(2, 2, &[2, 4, 4, 8]);
        let s = smith_normal_form(&a);
        assert_eq!(s.divisors, vec![BigInt::from(2), BigInt::zero()]);
        let a = m(2, 2, &[2, 0, 0, 6]);
        let s = smith_normal_form(&a);
        assert_eq!(s.divisors, vec![BigInt::from(2), BigInt::from(6)]);
        // u * u_inv = 1
        assert_eq!(s.u.mul(&s.u_inv), IntMat::identity(2));
    }

    #[test]
    fn snf_transform_maps_lattice() {
        let a = m(2, 2, &[2, 1, 0, 3]);
        let s = smith_normal_form(&a);
        assert_eq!(s.u.mul(&s.u_inv), IntMat::identity(2));
        // the column lattice of u*a equals the column lattice of diag(d)
        let ua = s.u.mul(&a);
        let d = IntMat::from_fn(2, 2, |i, j| {
            if i == j {
                s.divisors[i].clone()
            } else {
                BigInt::zero()
            }
        });
        assert_eq!(hnf_basis(&ua), hnf_basis(&d));
    }
}
