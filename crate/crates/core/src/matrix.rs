//! Dense matrices over a finite field, plus the structural maps of the two
//! matrix settings: the entrywise Frobenius A^[q], the conjugate transpose
//! A^* = (A^[q])^T, the anti-diagonal form matrix J_m, the membership
//! predicates for GL(n), U(m), gl(n) and u(m), and Jordan types of nilpotent
//! matrices from rank sequences.
//!
//! Everything is exact; sizes stay small (at most 8x8), so the dense
//! representation and cubic algorithms are the right tool.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec};
use crate::partition::Partition;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Arc<FieldSpec>,
    data: Vec<Fe>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over F_{}", self.rows, self.cols, self.field.q())?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c).0)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Membership predicates of the two settings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpaceKind {
    GroupGl,
    GroupU,
    AlgGl,
    AlgU,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, field: Arc<FieldSpec>) -> Matrix {
        Matrix {
            rows,
            cols,
            field,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize, field: Arc<FieldSpec>) -> Matrix {
        let mut m = Matrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn from_rows(field: Arc<FieldSpec>, rows: &[Vec<Fe>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, field, data }
    }

    /// Convenience constructor from integers (reduced into the prime field).
    pub fn from_ints(field: Arc<FieldSpec>, rows: &[&[i64]]) -> Matrix {
        let converted: Vec<Vec<Fe>> = rows
            .iter()
            .map(|row| row.iter().map(|&v| field.from_int(v)).collect())
            .collect();
        Matrix::from_rows(field, &converted)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Fe] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    fn check_same_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch("matrices over different fields".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("add: shape mismatch".into()));
        }
        let f = &self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), data })
    }

    pub fn neg(&self) -> Matrix {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.neg(a)).collect();
        Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), data }
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, s: Fe) -> Matrix {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.mul(s, a)).collect();
        Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), data }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension("mul: shape mismatch".into()));
        }
        let f = &self.field;
        let mut out = Matrix::zero(self.rows, other.cols, self.field.clone());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = f.mul(a, other.get(k, j));
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, prod));
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows, self.field.clone());
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn pow(&self, mut n: u64) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("pow of non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows, self.field.clone());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Rank by Gaussian elimination; exact.
    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<Fe>, r: usize, c: usize| m[r * cols + c];
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            if row >= rows {
                break;
            }
            let pivot = (row..rows).find(|&r| !at(&m, r, col).is_zero());
            let Some(p) = pivot else { continue };
            for c in 0..cols {
                m.swap(row * cols + c, p * cols + c);
            }
            let inv = f.inv(at(&m, row, col));
            for c in col..cols {
                let v = f.mul(inv, at(&m, row, c));
                m[row * cols + c] = v;
            }
            for r in 0..rows {
                if r != row && !at(&m, r, col).is_zero() {
                    let factor = at(&m, r, col);
                    for c in col..cols {
                        let v = f.sub(at(&m, r, c), f.mul(factor, at(&m, row, c)));
                        m[r * cols + c] = v;
                    }
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Inverse by Gauss-Jordan on [A | I]; None when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let f = &self.field;
        let mut a = self.clone();
        let mut b = Matrix::identity(n, self.field.clone());
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for c in 0..n {
                    let (x, y) = (a.get(col, c), a.get(pivot, c));
                    a.set(col, c, y);
                    a.set(pivot, c, x);
                    let (x, y) = (b.get(col, c), b.get(pivot, c));
                    b.set(col, c, y);
                    b.set(pivot, c, x);
                }
            }
            let inv = f.inv(a.get(col, col));
            for c in 0..n {
                a.set(col, c, f.mul(inv, a.get(col, c)));
                b.set(col, c, f.mul(inv, b.get(col, c)));
            }
            for r in 0..n {
                if r != col && !a.get(r, col).is_zero() {
                    let factor = a.get(r, col);
                    for c in 0..n {
                        a.set(r, c, f.sub(a.get(r, c), f.mul(factor, a.get(col, c))));
                        b.set(r, c, f.sub(b.get(r, c), f.mul(factor, b.get(col, c))));
                    }
                }
            }
        }
        Some(b)
    }

    /// g X g^{-1}; the adjoint action.
    pub fn conjugate_by(&self, g: &Matrix, g_inv: &Matrix) -> Result<Matrix> {
        g.mul(self)?.mul(g_inv)
    }

    /// One solution of self * x = rhs (rhs a column), or None.
    pub fn solve(&self, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(rhs.cols, 1);
        assert_eq!(rhs.rows, self.rows);
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut b = rhs.clone();
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..cols {
            if row >= rows {
                break;
            }
            let Some(p) = (row..rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            for c in 0..cols {
                let (x, y) = (a.get(row, c), a.get(p, c));
                a.set(row, c, y);
                a.set(p, c, x);
            }
            let (x, y) = (b.get(row, 0), b.get(p, 0));
            b.set(row, 0, y);
            b.set(p, 0, x);
            let inv = f.inv(a.get(row, col));
            for c in 0..cols {
                a.set(row, c, f.mul(inv, a.get(row, c)));
            }
            b.set(row, 0, f.mul(inv, b.get(row, 0)));
            for r in 0..rows {
                if r != row && !a.get(r, col).is_zero() {
                    let factor = a.get(r, col);
                    for c in 0..cols {
                        a.set(r, c, f.sub(a.get(r, c), f.mul(factor, a.get(row, c))));
                    }
                    b.set(r, 0, f.sub(b.get(r, 0), f.mul(factor, b.get(row, 0))));
                }
            }
            pivot_cols.push((row, col));
            row += 1;
        }
        // consistency: zero rows of a must have zero rhs
        for r in row..rows {
            if !b.get(r, 0).is_zero() {
                return None;
            }
        }
        let mut x = Matrix::zero(cols, 1, f);
        for &(r, c) in &pivot_cols {
            x.set(c, 0, b.get(r, 0));
        }
        Some(x)
    }

    /// A basis of the right nullspace, as column vectors.
    pub fn nullspace(&self) -> Vec<Matrix> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut pivot_col_of_row = Vec::new();
        let mut row = 0;
        for col in 0..cols {
            if row >= rows {
                break;
            }
            let Some(p) = (row..rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            for c in 0..cols {
                let (x, y) = (a.get(row, c), a.get(p, c));
                a.set(row, c, y);
                a.set(p, c, x);
            }
            let inv = f.inv(a.get(row, col));
            for c in 0..cols {
                a.set(row, c, f.mul(inv, a.get(row, c)));
            }
            for r in 0..rows {
                if r != row && !a.get(r, col).is_zero() {
                    let factor = a.get(r, col);
                    for c in 0..cols {
                        a.set(r, c, f.sub(a.get(r, c), f.mul(factor, a.get(row, c))));
                    }
                }
            }
            pivot_col_of_row.push(col);
            row += 1;
        }
        let pivot_set: std::collections::HashSet<usize> = pivot_col_of_row.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = Matrix::zero(cols, 1, f.clone());
            v.set(free, 0, Fe::ONE);
            for (r, &pc) in pivot_col_of_row.iter().enumerate() {
                v.set(pc, 0, f.neg(a.get(r, free)));
            }
            basis.push(v);
        }
        basis
    }

    /// Extract the block with the given row/column ranges.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut out = Matrix::zero(r1 - r0, c1 - c0, self.field.clone());
        for r in r0..r1 {
            for c in c0..c1 {
                out.set(r - r0, c - c0, self.get(r, c));
            }
        }
        out
    }

    /// Copy `block` into self with its (0,0) at (r0, c0).
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    /// Block-diagonal assembly.
    pub fn direct_sum(field: Arc<FieldSpec>, blocks: &[&Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zero(n, n, field);
        let mut off = 0;
        for b in blocks {
            out.paste(off, off, b);
            off += b.rows;
        }
        out
    }

    /// A^[q]: the entrywise q-th power, for A over F_{q^2}.
    pub fn frobenius_entrywise(&self, q: u64) -> Result<Matrix> {
        let base = self.field.base_q().ok_or_else(|| {
            Error::FieldMismatch(format!(
                "F_{} is not a quadratic extension",
                self.field.q()
            ))
        })?;
        if base != q {
            return Err(Error::FieldMismatch(format!(
                "F_{} is the quadratic extension of F_{base}, not of F_{q}",
                self.field.q()
            )));
        }
        let f = &self.field;
        let data: Result<Vec<Fe>> = self.data.iter().map(|&a| f.conj(a)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), data: data? })
    }

    /// A^* = (A^[q])^T, the conjugate transpose.
    pub fn star(&self) -> Result<Matrix> {
        let base = self.field.base_q().ok_or_else(|| {
            Error::FieldMismatch(format!(
                "F_{} is not a quadratic extension",
                self.field.q()
            ))
        })?;
        Ok(self.frobenius_entrywise(base)?.transpose())
    }

    /// Is this matrix nilpotent?
    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows as u64).map_or(false, |p| p.is_zero())
    }
}

/// The m x m matrix with 1 on the anti-diagonal and 0 elsewhere; J^2 = I.
pub fn anti_diagonal_j(m: usize, field: Arc<FieldSpec>) -> Matrix {
    let mut j = Matrix::zero(m, m, field);
    for i in 0..m {
        j.set(i, m - 1 - i, Fe::ONE);
    }
    j
}

/// Exact membership predicate for the groups and Lie algebras of the two
/// settings. U/u kinds demand an even size and a quadratic-extension field.
pub fn membership(x: &Matrix, kind: SpaceKind) -> Result<bool> {
    if !x.is_square() {
        return Err(Error::Dimension("membership of non-square matrix".into()));
    }
    match kind {
        SpaceKind::AlgGl => Ok(true),
        SpaceKind::GroupGl => Ok(x.is_invertible()),
        SpaceKind::AlgU | SpaceKind::GroupU => {
            if x.rows() % 2 != 0 {
                return Err(Error::Dimension(format!(
                    "unitary kinds need even size, got {}",
                    x.rows()
                )));
            }
            let j = anti_diagonal_j(x.rows(), x.field().clone());
            let xs = x.star()?;
            match kind {
                SpaceKind::AlgU => {
                    // X* J + J X = 0
                    let lhs = xs.mul(&j)?.add(&j.mul(x)?)?;
                    Ok(lhs.is_zero())
                }
                SpaceKind::GroupU => {
                    if !x.is_invertible() {
                        return Ok(false);
                    }
                    Ok(xs.mul(&j)?.mul(x)? == j)
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Jordan type of a nilpotent matrix: the block-size partition, recovered
/// from the rank sequence rank(N^k) via conjugate-partition differences.
pub fn jordan_type(n: &Matrix) -> Result<Partition> {
    if !n.is_square() {
        return Err(Error::Dimension("jordan_type of non-square matrix".into()));
    }
    let size = n.rows();
    if size == 0 {
        return Ok(Partition::empty());
    }
    let mut ranks = Vec::with_capacity(size + 1);
    ranks.push(size);
    let mut power = n.clone();
    for _ in 1..=size {
        ranks.push(power.rank());
        if *ranks.last().unwrap() == 0 {
            break;
        }
        power = power.mul(n)?;
    }
    if *ranks.last().unwrap() != 0 {
        return Err(Error::NotNilpotent);
    }
    // conjugate partition: lambda'_k = rank(N^{k-1}) - rank(N^k)
    let conj: Vec<u32> = ranks.windows(2).map(|w| (w[0] - w[1]) as u32).collect();
    Ok(Partition::new(conj).conjugate())
}

/// A single nilpotent Jordan block of the given size.
pub fn jordan_block_nilpotent(size: usize, field: Arc<FieldSpec>) -> Matrix {
    let mut m = Matrix::zero(size, size, field);
    for i in 0..size.saturating_sub(1) {
        m.set(i, i + 1, Fe::ONE);
    }
    m
}

/// The nilpotent matrix in Jordan form with the given block partition.
pub fn jordan_matrix(lambda: &Partition, field: Arc<FieldSpec>) -> Matrix {
    let blocks: Vec<Matrix> = lambda
        .parts()
        .iter()
        .map(|&p| jordan_block_nilpotent(p as usize, field.clone()))
        .collect();
    let refs: Vec<&Matrix> = blocks.iter().collect();
    Matrix::direct_sum(field, &refs)
}

/// Characteristic polynomial by the Samuelson-Berkowitz algorithm
/// (division-free, valid over any commutative ring, so no issue in small
/// characteristic). Returned with ascending coefficients; monic of degree n.
pub fn char_poly(a: &Matrix) -> Result<Vec<Fe>> {
    if !a.is_square() {
        return Err(Error::Dimension("char_poly of non-square matrix".into()));
    }
    let f = a.field().clone();
    let n = a.rows();
    // vec of descending coefficients, starts as char poly of the 0x0 matrix.
    let mut poly = vec![Fe::ONE];
    for k in (0..n).rev() {
        // Principal trailing submatrix A[k.., k..]; partition off row/col k.
        let a11 = a.get(k, k);
        let m = a.submatrix(k + 1, n, k + 1, n);
        let r = a.submatrix(k, k + 1, k + 1, n); // 1 x (n-k-1)
        let c = a.submatrix(k + 1, n, k, k + 1); // (n-k-1) x 1
        let dim = n - k; // current size
        // First column of the Toeplitz matrix: 1, -a11, -R M^{i-2} C.
        let mut tcol = Vec::with_capacity(dim + 1);
        tcol.push(Fe::ONE);
        tcol.push(f.neg(a11));
        let mut rm = r.clone();
        for _ in 2..=dim {
            let val = rm.mul(&c)?.get(0, 0);
            tcol.push(f.neg(val));
            rm = rm.mul(&m)?;
        }
        // poly <- T * poly
        let mut next = vec![Fe::ZERO; dim + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = Fe::ZERO;
            for (j, &pj) in poly.iter().enumerate() {
                if i >= j && i - j < tcol.len() {
                    acc = f.add(acc, f.mul(tcol[i - j], pj));
                }
            }
            *slot = acc;
        }
        poly = next;
    }
    poly.reverse(); // ascending
    Ok(poly)
}
