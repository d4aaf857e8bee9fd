//! Hermitian geometry over F_{q^2}: the form x^* J y, isotropic subspaces,
//! completion of an isotropic frame to a unitary matrix, unitary
//! transvections, and the coordinate model of the Lie algebra u(m, F_{q^2})
//! used for exhaustive orbit enumeration by conjugation closure.
//!
//! The closure is certified: the partition is first built from a handful of
//! seed generators, then verified stable under the full generating family of
//! U(m, q) (every unitary transvection plus a determinant supplement, which
//! generate the group); any violation merges the parts and the sweep repeats.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec};
use crate::matrix::{anti_diagonal_j, membership, Matrix, SpaceKind};
use crate::partition::Partition;

/// h(x, y) = x^* F y for column vectors and a Hermitian form matrix F.
pub fn hermitian_form(x: &Matrix, form: &Matrix, y: &Matrix) -> Result<Fe> {
    Ok(x.star()?.mul(form)?.mul(y)?.get(0, 0))
}

/// Standard form h(x, y) = x^* J y.
pub fn standard_form(x: &Matrix, y: &Matrix) -> Result<Fe> {
    let j = anti_diagonal_j(x.rows(), x.field().clone());
    hermitian_form(x, &j, y)
}

/// Projective representatives of all nonzero vectors: first nonzero
/// coordinate normalized to 1.
fn projective_points(field: &Arc<FieldSpec>, m: usize) -> Vec<Matrix> {
    let q2 = field.q();
    let mut out = Vec::new();
    // leading-one position k: coordinates below are zero, above arbitrary
    for k in 0..m {
        let free = m - k - 1;
        let count = q2.pow(free as u32);
        for idx in 0..count {
            let mut v = Matrix::zero(m, 1, field.clone());
            v.set(k, 0, Fe::ONE);
            let mut rest = idx;
            for r in k + 1..m {
                v.set(r, 0, Fe((rest % q2) as u8));
                rest /= q2;
            }
            out.push(v);
        }
    }
    out
}

/// Isotropic projective points of the standard Hermitian form.
pub fn isotropic_lines(field: &Arc<FieldSpec>, m: usize) -> Result<Vec<Matrix>> {
    let j = anti_diagonal_j(m, field.clone());
    let mut out = Vec::new();
    for v in projective_points(field, m) {
        if hermitian_form(&v, &j, &v)?.is_zero() {
            out.push(v);
        }
    }
    Ok(out)
}

/// Reduced column echelon form, for canonical subspace representatives.
fn column_echelon(basis: &Matrix) -> Matrix {
    let f = basis.field().clone();
    let (rows, cols) = (basis.rows(), basis.cols());
    let mut a = basis.clone();
    let mut lead_row = 0;
    let mut col = 0;
    while col < cols && lead_row < rows {
        let Some(p) = (col..cols).find(|&c| !a.get(lead_row, c).is_zero()) else {
            lead_row += 1;
            continue;
        };
        if p != col {
            for r in 0..rows {
                let (x, y) = (a.get(r, col), a.get(r, p));
                a.set(r, col, y);
                a.set(r, p, x);
            }
        }
        let inv = f.inv(a.get(lead_row, col));
        for r in 0..rows {
            a.set(r, col, f.mul(inv, a.get(r, col)));
        }
        for c in 0..cols {
            if c != col && !a.get(lead_row, c).is_zero() {
                let factor = a.get(lead_row, c);
                for r in 0..rows {
                    a.set(r, c, f.sub(a.get(r, c), f.mul(factor, a.get(r, col))));
                }
            }
        }
        col += 1;
        lead_row += 1;
    }
    a
}

/// Totally isotropic i-dimensional subspaces of the standard form on
/// F_{q^2}^m, each as an m x i reduced-column-echelon basis matrix.
pub fn isotropic_subspaces(field: &Arc<FieldSpec>, m: usize, i: usize) -> Result<Vec<Matrix>> {
    if i == 0 {
        return Ok(vec![Matrix::zero(m, 0, field.clone())]);
    }
    let j = anti_diagonal_j(m, field.clone());
    let mut current: Vec<Matrix> = isotropic_lines(field, m)?
        .into_iter()
        .map(|v| column_echelon(&v))
        .collect();
    let points = projective_points(field, m);
    for _dim in 2..=i {
        let mut seen = std::collections::BTreeSet::new();
        let mut next = Vec::new();
        for base in &current {
            for w in &points {
                // w must be J-orthogonal to every basis vector and isotropic
                let mut ok = hermitian_form(w, &j, w)?.is_zero();
                if ok {
                    for c in 0..base.cols() {
                        let b = base.submatrix(0, m, c, c + 1);
                        if !hermitian_form(&b, &j, w)?.is_zero() {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let mut stacked = Matrix::zero(m, base.cols() + 1, field.clone());
                stacked.paste(0, 0, base);
                stacked.paste(0, base.cols(), w);
                if stacked.rank() != base.cols() + 1 {
                    continue;
                }
                let ech = column_echelon(&stacked);
                let key: Vec<u8> = ech.entries().iter().map(|e| e.0).collect();
                if seen.insert(key) {
                    next.push(ech);
                }
            }
        }
        current = next;
    }
    Ok(current)
}

/// Find c with c + c^{q0} = target (the trace F_{q^2} -> F_q is onto).
fn solve_trace(field: &FieldSpec, target: Fe) -> Result<Fe> {
    let q0 = field
        .base_q()
        .ok_or_else(|| Error::FieldMismatch("trace needs a quadratic extension".into()))?;
    for c in field.elements() {
        if field.add(c, field.pow(c, q0)) == target {
            return Ok(c);
        }
    }
    Err(Error::Internal("trace equation unsolvable".into()))
}

/// A nonzero isotropic vector inside the span of the given independent
/// columns, with respect to the Hermitian form matrix. The restriction of a
/// Hermitian form to a space of dimension >= 2 over a finite field always
/// has one (nondegenerate Hermitian forms are universal; degenerate ones
/// have a radical).
fn isotropic_in_span(field: &Arc<FieldSpec>, form: &Matrix, span: &[Matrix]) -> Result<Matrix> {
    for b in span {
        if hermitian_form(b, form, b)?.is_zero() {
            return Ok(b.clone());
        }
    }
    if span.len() < 2 {
        return Err(Error::Internal("anisotropic line where isotropic vector expected".into()));
    }
    let (b1, b2) = (&span[0], &span[1]);
    let h11 = hermitian_form(b1, form, b1)?;
    let h12 = hermitian_form(b1, form, b2)?;
    let h22 = hermitian_form(b2, form, b2)?;
    let f = field;
    let q0 = f.base_q().unwrap();
    for c in f.elements() {
        // h(b1 + c b2, b1 + c b2) = h11 + c h12 + c^{q0} h21 + c^{q0+1} h22
        let cq = f.pow(c, q0);
        let val = f.add(
            f.add(h11, f.mul(c, h12)),
            f.add(f.mul(cq, f.pow(h12, q0)), f.mul(f.mul(cq, c), h22)),
        );
        if val.is_zero() {
            let mut v = b1.clone();
            v = v.add(&b2.scalar_mul(c)).unwrap();
            return Ok(v);
        }
    }
    Err(Error::Internal("no isotropic vector in a plane (impossible over a finite field)".into()))
}

/// Basis of {u in span(space) : h(s, u) = 0 for all s in constraints},
/// as column vectors of the ambient space.
fn perp_in_span(
    field: &Arc<FieldSpec>,
    form: &Matrix,
    space: &[Matrix],
    constraints: &[Matrix],
) -> Result<Vec<Matrix>> {
    if constraints.is_empty() {
        return Ok(space.to_vec());
    }
    let d = space.len();
    let mut a = Matrix::zero(constraints.len(), d, field.clone());
    for (r, s) in constraints.iter().enumerate() {
        let row = s.star()?.mul(form)?; // 1 x m
        for (c, b) in space.iter().enumerate() {
            a.set(r, c, row.mul(b)?.get(0, 0));
        }
    }
    let null = a.nullspace();
    let mut out = Vec::new();
    for alpha in null {
        let mut v = Matrix::zero(space[0].rows(), 1, field.clone());
        for (k, b) in space.iter().enumerate() {
            v = v.add(&b.scalar_mul(alpha.get(k, 0)))?;
        }
        out.push(v);
    }
    Ok(out)
}

/// Solve h(left_b, u) = delta_{ab}, h(done_b, u) = 0 for u in span(space).
fn solve_dual(
    field: &Arc<FieldSpec>,
    form: &Matrix,
    space: &[Matrix],
    left: &[Matrix],
    a: usize,
    done: &[Matrix],
) -> Result<Matrix> {
    let d = space.len();
    let rows = left.len() + done.len();
    let mut sys = Matrix::zero(rows, d, field.clone());
    let mut rhs = Matrix::zero(rows, 1, field.clone());
    for (r, s) in left.iter().chain(done.iter()).enumerate() {
        let row = s.star()?.mul(form)?;
        for (c, b) in space.iter().enumerate() {
            sys.set(r, c, row.mul(b)?.get(0, 0));
        }
        if r == a {
            rhs.set(r, 0, Fe::ONE);
        }
    }
    let alpha = sys
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("dual vector system unsolvable".into()))?;
    let mut v = Matrix::zero(space[0].rows(), 1, field.clone());
    for (k, b) in space.iter().enumerate() {
        v = v.add(&b.scalar_mul(alpha.get(k, 0)))?;
    }
    Ok(v)
}

/// Build a basis c_1..c_m with Gram matrix J_m for the Hermitian form
/// `form`, whose first columns are the prescribed totally isotropic vectors.
/// Returns the matrix with those columns.
pub fn gram_basis(
    field: &Arc<FieldSpec>,
    form: &Matrix,
    prescribed: &[Matrix],
) -> Result<Matrix> {
    let m = form.rows();
    let i = prescribed.len();
    if 2 * i > m {
        return Err(Error::Dimension("isotropic frame larger than the Witt index".into()));
    }
    let full: Vec<Matrix> = (0..m)
        .map(|k| {
            let mut v = Matrix::zero(m, 1, field.clone());
            v.set(k, 0, Fe::ONE);
            v
        })
        .collect();
    let left: Vec<Matrix> = prescribed.to_vec();
    let mut rights: Vec<Matrix> = Vec::new();
    field.base_q().ok_or_else(|| {
        Error::FieldMismatch("unitary constructions need a quadratic extension".into())
    })?;
    for a in 0..i {
        let u = solve_dual(field, form, &full, &left, a, &rights)?;
        // isotropize: u' = u + c * left_a with trace(c) = -h(u, u)
        let huu = hermitian_form(&u, form, &u)?;
        let c = solve_trace(field, field.neg(huu))?;
        let w = u.add(&left[a].scalar_mul(c))?;
        debug_assert!(hermitian_form(&w, form, &w)?.is_zero());
        rights.push(w);
    }
    // middle: perp of everything so far, paired hyperbolically
    let mut constraints: Vec<Matrix> = left.iter().chain(rights.iter()).cloned().collect();
    let mut middle_space = perp_in_span(field, form, &full, &constraints)?;
    let mut mids_left = Vec::new();
    let mut mids_right = Vec::new();
    while !middle_space.is_empty() {
        let z = isotropic_in_span(field, form, &middle_space)?;
        let zprime = {
            let u = solve_dual(field, form, &middle_space, &[z.clone()], 0, &[])?;
            let huu = hermitian_form(&u, form, &u)?;
            let c = solve_trace(field, field.neg(huu))?;
            u.add(&z.scalar_mul(c))?
        };
        debug_assert_eq!(hermitian_form(&z, form, &zprime)?, Fe::ONE);
        constraints.push(z.clone());
        constraints.push(zprime.clone());
        mids_left.push(z);
        mids_right.push(zprime);
        middle_space = perp_in_span(field, form, &middle_space, &constraints)?;
    }
    // columns: left, mids_left, reversed mids_right, reversed rights
    let mut g = Matrix::zero(m, m, field.clone());
    let mut col = 0;
    for v in left.iter().chain(mids_left.iter()) {
        g.paste(0, col, v);
        col += 1;
    }
    for v in mids_right.iter().rev().chain(rights.iter().rev()) {
        g.paste(0, col, v);
        col += 1;
    }
    if col != m || !g.is_invertible() {
        return Err(Error::Internal("Gram basis construction degenerated".into()));
    }
    debug_assert_eq!(
        g.star()?.mul(form)?.mul(&g)?,
        anti_diagonal_j(m, field.clone())
    );
    Ok(g)
}

/// A unitary matrix whose first i columns span the given totally isotropic
/// subspace (m x i echelon basis).
pub fn complete_isotropic_to_unitary(field: &Arc<FieldSpec>, basis: &Matrix) -> Result<Matrix> {
    let m = basis.rows();
    let j = anti_diagonal_j(m, field.clone());
    let cols: Vec<Matrix> = (0..basis.cols()).map(|c| basis.submatrix(0, m, c, c + 1)).collect();
    let g = gram_basis(field, &j, &cols)?;
    debug_assert!(membership(&g, SpaceKind::GroupU)?);
    Ok(g)
}

/// Unitary transvection T = I + c v (v^* J) for isotropic v and c with
/// c^{q0} = -c.
pub fn unitary_transvection(field: &Arc<FieldSpec>, v: &Matrix, c: Fe) -> Result<Matrix> {
    let m = v.rows();
    let j = anti_diagonal_j(m, field.clone());
    let row = v.star()?.mul(&j)?; // 1 x m
    let mut t = Matrix::identity(m, field.clone());
    for r in 0..m {
        for cc in 0..m {
            let delta = field.mul(c, field.mul(v.get(r, 0), row.get(0, cc)));
            t.set(r, cc, field.add(t.get(r, cc), delta));
        }
    }
    Ok(t)
}

/// diag(t_1..t_n, t_n^{-q0}, .., t_1^{-q0}): the standard maximal torus.
pub fn torus_diag(field: &Arc<FieldSpec>, vals: &[Fe]) -> Result<Matrix> {
    let n = vals.len();
    let m = 2 * n;
    let q0 = field
        .base_q()
        .ok_or_else(|| Error::FieldMismatch("torus needs a quadratic extension".into()))?;
    let mut d = Matrix::zero(m, m, field.clone());
    for (k, &t) in vals.iter().enumerate() {
        if t.is_zero() {
            return Err(Error::Internal("torus entries must be nonzero".into()));
        }
        d.set(k, k, t);
        let inv_conj = field.inv(field.pow(t, q0));
        d.set(m - 1 - k, m - 1 - k, inv_conj);
    }
    Ok(d)
}

/// All elements of the group U(m, F_{q^2}) by scanning GL(m); only sane for
/// m = 2 at small q.
pub fn unitary_group_elements(field: &Arc<FieldSpec>, m: usize) -> Result<Vec<Matrix>> {
    let q2 = field.q();
    let total = q2.pow((m * m) as u32);
    if total > 100_000_000 {
        return Err(Error::Infeasible(format!(
            "cannot scan {total} matrices for the unitary group"
        )));
    }
    let mut out = Vec::new();
    for idx in 0..total {
        let mut x = Matrix::zero(m, m, field.clone());
        let mut rest = idx;
        for k in 0..m * m {
            x.set(k / m, k % m, Fe((rest % q2) as u8));
            rest /= q2;
        }
        if membership(&x, SpaceKind::GroupU)? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Nilpotent representative of Jordan type lambda inside u(2n, F_{q^2}):
/// take the Jordan matrix N, a block anti-diagonal Hermitian form M with
/// N^T M + M N = 0, standardize M to J by a Gram basis g0, and conjugate:
/// g0^{-1} N g0 lies in u(2n). Deterministic; no search.
pub fn u_nilpotent_rep(lambda: &Partition, field: &Arc<FieldSpec>) -> Result<Matrix> {
    let m = lambda.size() as usize;
    if m % 2 != 0 {
        return Err(Error::Dimension("u(2n) needs an even-size Jordan type".into()));
    }
    if m == 0 {
        return Ok(Matrix::zero(0, 0, field.clone()));
    }
    let sigma = field
        .twisted_trace_zero()?
        .into_iter()
        .find(|y| !y.is_zero())
        .ok_or_else(|| Error::Internal("no nonzero twisted element (q must be odd)".into()))?;
    let n_mat = crate::matrix::jordan_matrix(lambda, field.clone());
    // M = direct sum over parts k of anti-diag(c, -c, c, ...) with
    // c = sigma for even k and c = 1 for odd k.
    let mut form = Matrix::zero(m, m, field.clone());
    let mut off = 0;
    for &k in lambda.parts() {
        let k = k as usize;
        let c = if k % 2 == 0 { sigma } else { Fe::ONE };
        for i in 0..k {
            let val = if i % 2 == 0 { c } else { field.neg(c) };
            form.set(off + i, off + k - 1 - i, val);
        }
        off += k;
    }
    debug_assert_eq!(form.star()?, form);
    debug_assert!(n_mat.transpose().mul(&form)?.add(&form.mul(&n_mat)?)?.is_zero());
    let g0 = gram_basis(field, &form, &[])?;
    let g0_inv = g0.inverse().ok_or_else(|| Error::Internal("Gram basis singular".into()))?;
    let x = g0_inv.mul(&n_mat)?.mul(&g0)?;
    debug_assert!(membership(&x, SpaceKind::AlgU)?);
    debug_assert_eq!(crate::matrix::jordan_type(&x)?, *lambda);
    Ok(x)
}

// ---------------------------------------------------------------------------
// Coordinate model of u(m, F_{q^2}) over the prime field, for exhaustive
// enumeration: an element is determined by its entries on and above the
// anti-diagonal; entries at mirrored positions satisfy
// X[r][c] = -conj(X[m+1-c][m+1-r]) and anti-diagonal entries y satisfy
// y^{q0} = -y.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
enum Pos {
    /// Free F_{q^2} entry at (row, col), stored as e2 base-p digits.
    Free(usize, usize),
    /// Anti-diagonal entry at (row, col), stored as e0 digits in the
    /// twisted basis.
    Twisted(usize, usize),
}

pub struct USpace {
    pub field: Arc<FieldSpec>,
    pub m: usize,
    p: u64,
    /// digits per free entry (= extension degree of F_{q^2} over F_p)
    e2: usize,
    /// digits per twisted entry (= half of e2)
    e0: usize,
    positions: Vec<Pos>,
    pub digits: usize,
    twisted_basis: Vec<Fe>,
    twisted_coords: HashMap<Fe, Vec<u8>>,
}

impl USpace {
    pub fn new(field: Arc<FieldSpec>, m: usize) -> Result<USpace> {
        let e2 = field.e() as usize;
        if e2 % 2 != 0 {
            return Err(Error::FieldMismatch("u(m) needs a quadratic extension field".into()));
        }
        let e0 = e2 / 2;
        let p = field.p();
        let twisted = field.twisted_trace_zero()?;
        // greedy F_p-basis of the twisted set
        let mut basis: Vec<Fe> = Vec::new();
        let mut span: Vec<Fe> = vec![Fe::ZERO];
        for &t in &twisted {
            if t.is_zero() || span.contains(&t) {
                continue;
            }
            basis.push(t);
            let mut next = Vec::new();
            for &s in &span {
                let mut acc = s;
                for _ in 0..p {
                    next.push(acc);
                    acc = field.add(acc, t);
                }
            }
            next.sort_unstable();
            next.dedup();
            span = next;
            if basis.len() == e0 {
                break;
            }
        }
        if basis.len() != e0 {
            return Err(Error::Internal("twisted set has unexpected dimension".into()));
        }
        // coordinates of each twisted element
        let mut twisted_coords = HashMap::new();
        let count = p.pow(e0 as u32);
        for idx in 0..count {
            let mut digits = Vec::with_capacity(e0);
            let mut rest = idx;
            let mut acc = Fe::ZERO;
            for &b in &basis {
                let d = (rest % p) as u8;
                rest /= p;
                digits.push(d);
                let mut term = Fe::ZERO;
                for _ in 0..d {
                    term = field.add(term, b);
                }
                acc = field.add(acc, term);
            }
            twisted_coords.insert(acc, digits);
        }
        let mut positions = Vec::new();
        for r in 1..=m {
            for c in 1..=m {
                if r + c < m + 1 {
                    positions.push(Pos::Free(r - 1, c - 1));
                } else if r + c == m + 1 {
                    positions.push(Pos::Twisted(r - 1, c - 1));
                }
            }
        }
        let digits = (m * m - m) / 2 * e2 + m * e0;
        Ok(USpace {
            field,
            m,
            p,
            e2,
            e0,
            positions,
            digits,
            twisted_basis: basis,
            twisted_coords,
        })
    }

    /// Total number of elements, p^digits.
    pub fn cardinality(&self) -> u64 {
        self.p.pow(self.digits as u32)
    }

    pub fn index_to_digits(&self, mut idx: u64) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.digits);
        for _ in 0..self.digits {
            out.push((idx % self.p) as u8);
            idx /= self.p;
        }
        out
    }

    pub fn digits_to_index(&self, digits: &[u8]) -> u64 {
        let mut idx = 0u64;
        for &d in digits.iter().rev() {
            idx = idx * self.p + d as u64;
        }
        idx
    }

    pub fn unpack_digits(&self, digits: &[u8]) -> Matrix {
        let f = &self.field;
        let m = self.m;
        let mut x = Matrix::zero(m, m, f.clone());
        let mut k = 0;
        for pos in &self.positions {
            match *pos {
                Pos::Free(r, c) => {
                    // element index from e2 base-p digits
                    let mut idx = 0u64;
                    for d in (0..self.e2).rev() {
                        idx = idx * self.p + digits[k + d] as u64;
                    }
                    x.set(r, c, Fe(idx as u8));
                    k += self.e2;
                }
                Pos::Twisted(r, c) => {
                    let mut acc = Fe::ZERO;
                    for (d, &b) in self.twisted_basis.iter().enumerate() {
                        let times = digits[k + d];
                        let mut term = Fe::ZERO;
                        for _ in 0..times {
                            term = f.add(term, b);
                        }
                        acc = f.add(acc, term);
                    }
                    x.set(r, c, acc);
                    k += self.e0;
                }
            }
        }
        // determined entries: X[r][c] = -conj(X[m+1-c][m+1-r]) (1-based)
        let q0 = f.base_q().unwrap();
        for r in 1..=m {
            for c in 1..=m {
                if r + c > m + 1 {
                    let src = x.get(m - c, m - r);
                    x.set(r - 1, c - 1, f.neg(f.pow(src, q0)));
                }
            }
        }
        x
    }

    pub fn unpack(&self, idx: u64) -> Matrix {
        self.unpack_digits(&self.index_to_digits(idx))
    }

    pub fn pack_digits(&self, x: &Matrix) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.digits);
        for pos in &self.positions {
            match *pos {
                Pos::Free(r, c) => {
                    let mut idx = x.get(r, c).0 as u64;
                    for _ in 0..self.e2 {
                        out.push((idx % self.p) as u8);
                        idx /= self.p;
                    }
                }
                Pos::Twisted(r, c) => {
                    let coords = self
                        .twisted_coords
                        .get(&x.get(r, c))
                        .expect("anti-diagonal entry not in the twisted set");
                    out.extend_from_slice(coords);
                }
            }
        }
        out
    }

    pub fn pack(&self, x: &Matrix) -> u64 {
        self.digits_to_index(&self.pack_digits(x))
    }

    /// The F_p-matrix of X -> g X g^{-1} on the digit coordinates.
    pub fn conjugation_digit_matrix(&self, g: &Matrix) -> Result<Vec<Vec<u8>>> {
        let g_inv = g
            .inverse()
            .ok_or_else(|| Error::Internal("singular conjugator".into()))?;
        let d = self.digits;
        let mut cols = Vec::with_capacity(d);
        for k in 0..d {
            let mut digits = vec![0u8; d];
            digits[k] = 1;
            let b = self.unpack_digits(&digits);
            let image = b.conjugate_by(g, &g_inv)?;
            cols.push(self.pack_digits(&image));
        }
        // row-major matrix
        let mut mat = vec![vec![0u8; d]; d];
        for (k, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                mat[r][k] = v;
            }
        }
        Ok(mat)
    }

    /// Apply a digit matrix to packed-index coordinates.
    pub fn apply_digit_matrix(&self, mat: &[Vec<u8>], idx: u64) -> u64 {
        let digits = self.index_to_digits(idx);
        let mut out = vec![0u16; self.digits];
        for (k, &dk) in digits.iter().enumerate() {
            if dk == 0 {
                continue;
            }
            for r in 0..self.digits {
                out[r] += mat[r][k] as u16 * dk as u16;
            }
        }
        let reduced: Vec<u8> = out.iter().map(|&v| (v % self.p as u16) as u8).collect();
        self.digits_to_index(&reduced)
    }
}

/// The orbit partition of u(m, F_{q^2}) under conjugation by U(m, F_{q^2}),
/// by certified closure.
pub struct UOrbits {
    pub space: USpace,
    /// Minimal packed index per orbit, ascending: the canonical labels.
    pub reps: Vec<u64>,
    pub sizes: Vec<u64>,
    /// orbit id of every packed index
    pub orbit_id: Vec<u16>,
}

impl UOrbits {
    pub fn rep_matrix(&self, orbit: usize) -> Matrix {
        self.space.unpack(self.reps[orbit])
    }

    pub fn orbit_of(&self, x: &Matrix) -> usize {
        self.orbit_id[self.space.pack(x) as usize] as usize
    }

    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }
}

fn uf_find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let gp = parent[parent[x as usize] as usize];
        parent[x as usize] = gp;
        x = gp;
    }
    x
}

fn uf_union(parent: &mut [u32], a: u32, b: u32) {
    let ra = uf_find(parent, a);
    let rb = uf_find(parent, b);
    if ra == rb {
        return;
    }
    // attach the larger root below the smaller: roots are orbit minima
    if ra < rb {
        parent[rb as usize] = ra;
    } else {
        parent[ra as usize] = rb;
    }
}

/// Enumerate the adjoint orbits of u(m, F_{q^2}) exhaustively.
///
/// Seeds: a few transvections and torus elements. Certificate: the final
/// partition is verified stable under every unitary transvection and a
/// determinant supplement; those generate U(m, q), so stability plus
/// refinement-by-construction pins the exact orbit partition.
pub fn enumerate_u_orbits(field: &Arc<FieldSpec>, m: usize) -> Result<UOrbits> {
    let space = USpace::new(field.clone(), m)?;
    let total = space.cardinality();
    if total > 100_000_000 {
        return Err(Error::Infeasible(format!(
            "u({m}, F_{}) has {total} elements; exhaustive mode is capped at 1e8",
            field.q()
        )));
    }
    if !field.is_odd() {
        return Err(Error::Unsupported("unitary constructions assume odd q".into()));
    }
    let lines = isotropic_lines(field, m)?;
    let sigma = field
        .twisted_trace_zero()?
        .into_iter()
        .find(|y| !y.is_zero())
        .unwrap();
    let t_prim = field.primitive_element();

    // full certified generating family
    let mut verify_gens: Vec<Matrix> = Vec::new();
    for v in &lines {
        for c in field.twisted_trace_zero()? {
            if c.is_zero() {
                continue;
            }
            verify_gens.push(unitary_transvection(field, v, c)?);
        }
    }
    let mut torus_vals = vec![Fe::ONE; m / 2];
    torus_vals[0] = t_prim;
    verify_gens.push(torus_diag(field, &torus_vals)?);
    for g in &verify_gens {
        debug_assert!(membership(g, SpaceKind::GroupU)?);
    }

    // small seed set: a spread of transvections plus the torus supplement
    let mut seeds: Vec<Matrix> = Vec::new();
    let step = (lines.len() / 5).max(1);
    for v in lines.iter().step_by(step).take(5) {
        seeds.push(unitary_transvection(field, v, sigma)?);
    }
    seeds.push(torus_diag(field, &torus_vals)?);
    if m / 2 >= 2 {
        let mut vals2 = vec![Fe::ONE; m / 2];
        vals2[m / 2 - 1] = t_prim;
        seeds.push(torus_diag(field, &vals2)?);
    }

    let seed_mats: Result<Vec<Vec<Vec<u8>>>> = seeds
        .iter()
        .map(|g| space.conjugation_digit_matrix(g))
        .collect();
    let seed_mats = seed_mats?;

    let n = total as usize;
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for idx in 0..n as u64 {
        for mat in &seed_mats {
            let j = space.apply_digit_matrix(mat, idx);
            uf_union(&mut parent, idx as u32, j as u32);
        }
    }

    // stability sweep under the certified family, until a fixed point
    let verify_mats: Result<Vec<Vec<Vec<u8>>>> = verify_gens
        .iter()
        .map(|g| space.conjugation_digit_matrix(g))
        .collect();
    let verify_mats = verify_mats?;
    loop {
        let mut roots: Vec<u32> = Vec::new();
        for idx in 0..n as u32 {
            if uf_find(&mut parent, idx) == idx {
                roots.push(idx);
            }
        }
        let mut dirty = false;
        for &r in &roots {
            for mat in &verify_mats {
                let j = space.apply_digit_matrix(mat, r as u64) as u32;
                if uf_find(&mut parent, j) != uf_find(&mut parent, r) {
                    uf_union(&mut parent, r, j);
                    dirty = true;
                }
            }
        }
        if !dirty {
            break;
        }
    }

    // final labeling
    let mut rep_to_id: HashMap<u32, u16> = HashMap::new();
    let mut reps: Vec<u64> = Vec::new();
    for idx in 0..n as u32 {
        let r = uf_find(&mut parent, idx);
        if r == idx {
            reps.push(idx as u64);
        }
    }
    reps.sort_unstable();
    for (id, &r) in reps.iter().enumerate() {
        if id > u16::MAX as usize {
            return Err(Error::Internal("orbit count exceeds u16 labels".into()));
        }
        rep_to_id.insert(r as u32, id as u16);
    }
    let mut orbit_id = vec![0u16; n];
    let mut sizes = vec![0u64; reps.len()];
    for idx in 0..n as u32 {
        let r = uf_find(&mut parent, idx);
        let id = rep_to_id[&r];
        orbit_id[idx as usize] = id;
        sizes[id as usize] += 1;
    }
    Ok(UOrbits { space, reps, sizes, orbit_id })
}
