//! Maximal parabolic data for the two settings, parabolic restriction and
//! induction of invariant functions, Weyl double cosets, and the
//! Mackey-identity verifier.
//!
//! Setting I: G = GL(n, F_q), parabolic P_{i,j} block upper triangular with
//! Levi GL(i) x GL(j). Setting II: G = U(2n, F_{q^2}), 3x3 block structure
//! (i, 2j, i) with Levi GL(i, F_{q^2}) x U(2j, F_{q^2}) embedded as
//! diag(A, B, J_i (A^*)^{-1} J_i).
//!
//! Restriction averages over the Lie algebra of the unipotent radical;
//! induction extends by the Levi projection, zero off the parabolic, and
//! sums over a left-coset transversal of G/P — for GL, one echelon
//! representative per i-subspace; for U, one unitary completion per totally
//! isotropic i-subspace.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigUint, One, Zero};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec};
use crate::matrix::{anti_diagonal_j, membership, Matrix, SpaceKind};
use crate::orbit::{
    classify_gl, gl_group_order, gl_table_cached, u_group_order, u_index_cached, OrbitLabel,
};
use crate::ratio::Q;
use crate::unitary::{complete_isotropic_to_unitary, isotropic_subspaces};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SettingKind {
    Gl,
    U,
}

/// Classification context for one Lie algebra: gl(m, F) or u(m, F).
#[derive(Clone)]
pub struct AlgCtx {
    pub kind: SettingKind,
    pub field: Arc<FieldSpec>,
    /// matrix size (n for gl, 2n for u)
    pub m: usize,
}

impl AlgCtx {
    pub fn gl(field: Arc<FieldSpec>, m: usize) -> AlgCtx {
        AlgCtx { kind: SettingKind::Gl, field, m }
    }

    pub fn u(field: Arc<FieldSpec>, m: usize) -> AlgCtx {
        AlgCtx { kind: SettingKind::U, field, m }
    }

    pub fn classify(&self, x: &Matrix) -> Result<OrbitLabel> {
        match self.kind {
            SettingKind::Gl => classify_gl(x),
            SettingKind::U => {
                if self.m == 0 {
                    return Ok(OrbitLabel::u_nilpotent(crate::partition::Partition::empty()));
                }
                let idx = u_index_cached(&self.field, self.m)?;
                Ok(idx.classify(x))
            }
        }
    }

    /// Orbit labels, representatives, and sizes, from the exhaustive table.
    pub fn orbit_reps(&self) -> Result<Vec<(OrbitLabel, Matrix, BigUint)>> {
        if self.m == 0 {
            let label = match self.kind {
                SettingKind::Gl => OrbitLabel::gl_nilpotent(crate::partition::Partition::empty()),
                SettingKind::U => OrbitLabel::u_nilpotent(crate::partition::Partition::empty()),
            };
            return Ok(vec![(label, Matrix::zero(0, 0, self.field.clone()), BigUint::one())]);
        }
        match self.kind {
            SettingKind::Gl => {
                let table = gl_table_cached(&self.field, self.m)?;
                Ok(table
                    .entries
                    .iter()
                    .map(|e| (e.label.clone(), e.rep.clone(), e.size.clone()))
                    .collect())
            }
            SettingKind::U => {
                let idx = u_index_cached(&self.field, self.m)?;
                Ok((0..idx.orbits.orbit_count())
                    .map(|k| {
                        (
                            idx.labels[k].clone(),
                            idx.orbits.rep_matrix(k),
                            BigUint::from(idx.orbits.sizes[k]),
                        )
                    })
                    .collect())
            }
        }
    }

    /// |G| for the acting group.
    pub fn group_order(&self) -> BigUint {
        match self.kind {
            SettingKind::Gl => gl_group_order(self.field.q(), self.m),
            SettingKind::U => u_group_order(self.field.base_q().expect("quadratic"), self.m),
        }
    }

    /// |Lie algebra| = q^{m^2} in both settings (q the defining size).
    pub fn alg_cardinality(&self) -> BigUint {
        match self.kind {
            SettingKind::Gl => BigUint::from(self.field.q()).pow((self.m * self.m) as u32),
            SettingKind::U => {
                BigUint::from(self.field.base_q().expect("quadratic")).pow((self.m * self.m) as u32)
            }
        }
    }
}

/// An invariant function, stored per orbit (never per matrix): either on one
/// Lie algebra, or on a maximal Levi (a product of two).
#[derive(Clone, PartialEq, Debug)]
pub enum InvariantFn {
    Alg {
        kind: SettingKind,
        m: usize,
        values: BTreeMap<OrbitLabel, Q>,
    },
    Levi {
        kind: SettingKind,
        i: usize,
        j: usize,
        values: BTreeMap<(OrbitLabel, OrbitLabel), Q>,
    },
}

impl InvariantFn {
    pub fn alg_indicator(kind: SettingKind, label: OrbitLabel) -> InvariantFn {
        let m = label.size();
        let mut values = BTreeMap::new();
        values.insert(label, Q::one());
        InvariantFn::Alg { kind, m, values }
    }

    pub fn levi_indicator(kind: SettingKind, i: usize, j: usize, a: OrbitLabel, b: OrbitLabel) -> InvariantFn {
        let mut values = BTreeMap::new();
        values.insert((a, b), Q::one());
        InvariantFn::Levi { kind, i, j, values }
    }

    pub fn alg_values(&self) -> Result<&BTreeMap<OrbitLabel, Q>> {
        match self {
            InvariantFn::Alg { values, .. } => Ok(values),
            _ => Err(Error::Internal("expected a one-algebra invariant function".into())),
        }
    }

    pub fn levi_values(&self) -> Result<&BTreeMap<(OrbitLabel, OrbitLabel), Q>> {
        match self {
            InvariantFn::Levi { values, .. } => Ok(values),
            _ => Err(Error::Internal("expected a Levi invariant function".into())),
        }
    }
}

/// Everything needed to restrict to / induce from one maximal parabolic.
pub struct ParabolicData {
    pub kind: SettingKind,
    pub field: Arc<FieldSpec>,
    /// grading level: i + j = n
    pub n: usize,
    pub i: usize,
    pub j: usize,
    /// ambient matrix size: n for gl, 2n for u
    pub m: usize,
    /// Lie algebra of the unipotent radical, fully enumerated
    pub radical_alg: Vec<Matrix>,
    /// left-coset transversal of G/P
    pub transversal: Vec<Matrix>,
    pub transversal_inv: Vec<Matrix>,
}

impl ParabolicData {
    /// The two Levi block contexts: (gl(i), gl(j)) or (gl(i, q^2), u(2j, q^2)).
    pub fn levi_ctx(&self) -> (AlgCtx, AlgCtx) {
        match self.kind {
            SettingKind::Gl => (
                AlgCtx::gl(self.field.clone(), self.i),
                AlgCtx::gl(self.field.clone(), self.j),
            ),
            SettingKind::U => (
                AlgCtx::gl(self.field.clone(), self.i),
                AlgCtx::u(self.field.clone(), 2 * self.j),
            ),
        }
    }

    pub fn ambient_ctx(&self) -> AlgCtx {
        AlgCtx { kind: self.kind, field: self.field.clone(), m: self.m }
    }

    /// Embed a Levi pair (A, B) into the ambient algebra.
    pub fn levi_embed(&self, a: &Matrix, b: &Matrix) -> Result<Matrix> {
        let mut x = Matrix::zero(self.m, self.m, self.field.clone());
        match self.kind {
            SettingKind::Gl => {
                if a.rows() != self.i || b.rows() != self.j {
                    return Err(Error::Dimension("Levi block sizes".into()));
                }
                x.paste(0, 0, a);
                x.paste(self.i, self.i, b);
            }
            SettingKind::U => {
                if a.rows() != self.i || b.rows() != 2 * self.j {
                    return Err(Error::Dimension("Levi block sizes".into()));
                }
                x.paste(0, 0, a);
                x.paste(self.i, self.i, b);
                if self.i > 0 {
                    // A'' = -J_i A^* J_i (the Lie algebra of the third block)
                    let j_i = anti_diagonal_j(self.i, self.field.clone());
                    let third = j_i.mul(&a.star()?)?.mul(&j_i)?.neg();
                    x.paste(self.i + 2 * self.j, self.i + 2 * self.j, &third);
                }
            }
        }
        Ok(x)
    }

    /// Extract the Levi blocks (A, B) of a parabolic-algebra element.
    pub fn levi_project(&self, x: &Matrix) -> (Matrix, Matrix) {
        match self.kind {
            SettingKind::Gl => (
                x.submatrix(0, self.i, 0, self.i),
                x.submatrix(self.i, self.m, self.i, self.m),
            ),
            SettingKind::U => (
                x.submatrix(0, self.i, 0, self.i),
                x.submatrix(self.i, self.i + 2 * self.j, self.i, self.i + 2 * self.j),
            ),
        }
    }

    /// Is x in the Lie algebra of the parabolic (zero blocks below the
    /// block diagonal)?
    pub fn in_parabolic_alg(&self, x: &Matrix) -> bool {
        let zero_block = |r0: usize, r1: usize, c0: usize, c1: usize| {
            (r0..r1).all(|r| (c0..c1).all(|c| x.get(r, c).is_zero()))
        };
        match self.kind {
            SettingKind::Gl => zero_block(self.i, self.m, 0, self.i),
            SettingKind::U => {
                let (a, b) = (self.i, self.i + 2 * self.j);
                zero_block(a, self.m, 0, a) && zero_block(b, self.m, a, b)
            }
        }
    }

    /// |radical| = q^{ij} (gl) or q^{4ij + i^2} (u), as enumerated.
    pub fn radical_order(&self) -> u64 {
        self.radical_alg.len() as u64
    }

    /// The unipotent radical as a group (used by the |U| = |radical algebra|
    /// cross-check). Enumerated on demand.
    pub fn radical_group_elements(&self) -> Result<Vec<Matrix>> {
        let f = &self.field;
        match self.kind {
            SettingKind::Gl => Ok(self
                .radical_alg
                .iter()
                .map(|z| {
                    let mut g = Matrix::identity(self.m, f.clone());
                    for r in 0..self.i {
                        for c in self.i..self.m {
                            g.set(r, c, z.get(r, c));
                        }
                    }
                    g
                })
                .collect()),
            SettingKind::U => {
                let (i, j) = (self.i, self.j);
                let j_i = anti_diagonal_j(i, f.clone());
                let j_2j = anti_diagonal_j(2 * j, f.clone());
                let mut out = Vec::new();
                for c_mat in enumerate_matrices(f, i, 2 * j) {
                    // C' = -J_{2j} C^* J_i; D ranges over solutions of
                    // J_i D + D^* J_i = -J_i C J_{2j} C^* J_i
                    let c_prime = if i > 0 && j > 0 {
                        j_2j.mul(&c_mat.star()?)?.mul(&j_i)?.neg()
                    } else {
                        Matrix::zero(2 * j, i, f.clone())
                    };
                    let rhs = if i > 0 && j > 0 {
                        j_i.mul(&c_mat)?.mul(&j_2j)?.mul(&c_mat.star()?)?.mul(&j_i)?.neg()
                    } else {
                        Matrix::zero(i, i, f.clone())
                    };
                    for d in enumerate_matrices(f, i, i) {
                        let lhs = j_i.mul(&d)?.add(&d.star()?.mul(&j_i)?)?;
                        if lhs != rhs {
                            continue;
                        }
                        let mut g = Matrix::identity(self.m, f.clone());
                        g.paste(0, i, &c_mat);
                        g.paste(0, i + 2 * j, &d);
                        g.paste(i, i + 2 * j, &c_prime);
                        debug_assert!(membership(&g, SpaceKind::GroupU)?);
                        out.push(g);
                    }
                }
                Ok(out)
            }
        }
    }
}

fn enumerate_matrices(field: &Arc<FieldSpec>, rows: usize, cols: usize) -> Vec<Matrix> {
    let q = field.q();
    let total = q.pow((rows * cols) as u32);
    (0..total)
        .map(|idx| {
            let mut x = Matrix::zero(rows, cols, field.clone());
            let mut rest = idx;
            for k in 0..rows * cols {
                x.set(k / cols.max(1), k % cols.max(1), Fe((rest % q) as u8));
                rest /= q;
            }
            x
        })
        .collect()
}

/// Echelon representatives of the i-subspaces of F_q^n, completed to
/// invertible matrices: one left-coset representative of GL(n)/P_{i,j} per
/// subspace.
fn gl_transversal(field: &Arc<FieldSpec>, n: usize, i: usize) -> Vec<Matrix> {
    // enumerate reduced column echelon bases by pivot rows + free entries
    let q = field.q();
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    fn rec(
        field: &Arc<FieldSpec>,
        n: usize,
        i: usize,
        q: u64,
        start: usize,
        pivots: &mut Vec<usize>,
        out: &mut Vec<Matrix>,
    ) {
        if pivots.len() == i {
            // free positions: (r, col a) with r > pivots[a], r not a pivot
            let mut free = Vec::new();
            for (a, &pa) in pivots.iter().enumerate() {
                for r in pa + 1..n {
                    if !pivots.contains(&r) {
                        free.push((r, a));
                    }
                }
            }
            let total = q.pow(free.len() as u32);
            for idx in 0..total {
                let mut basis = Matrix::zero(n, i, field.clone());
                for (a, &pa) in pivots.iter().enumerate() {
                    basis.set(pa, a, Fe::ONE);
                }
                let mut rest = idx;
                for &(r, a) in &free {
                    basis.set(r, a, Fe((rest % q) as u8));
                    rest /= q;
                }
                // complete with standard vectors on non-pivot rows
                let mut g = Matrix::zero(n, n, field.clone());
                g.paste(0, 0, &basis);
                let mut col = i;
                for r in 0..n {
                    if !pivots.contains(&r) {
                        g.set(r, col, Fe::ONE);
                        col += 1;
                    }
                }
                debug_assert!(g.is_invertible());
                out.push(g);
            }
            return;
        }
        for r in start..n {
            pivots.push(r);
            rec(field, n, i, q, r + 1, pivots, out);
            pivots.pop();
        }
    }
    rec(field, n, i, q, 0, &mut pivots, &mut out);
    out
}

/// Build the parabolic data for the split (i, j) of the given setting.
pub fn build_parabolic(
    kind: SettingKind,
    field: &Arc<FieldSpec>,
    i: usize,
    j: usize,
) -> Result<ParabolicData> {
    let n = i + j;
    match kind {
        SettingKind::Gl => {
            let m = n;
            let mut radical_alg = Vec::new();
            for c_mat in enumerate_matrices(field, i, j) {
                let mut z = Matrix::zero(m, m, field.clone());
                z.paste(0, i, &c_mat);
                radical_alg.push(z);
            }
            let transversal = gl_transversal(field, m, i);
            let transversal_inv: Option<Vec<Matrix>> =
                transversal.iter().map(|g| g.inverse()).collect();
            Ok(ParabolicData {
                kind,
                field: field.clone(),
                n,
                i,
                j,
                m,
                radical_alg,
                transversal_inv: transversal_inv
                    .ok_or_else(|| Error::Internal("singular transversal element".into()))?,
                transversal,
            })
        }
        SettingKind::U => {
            if !field.is_odd() {
                return Err(Error::Unsupported("unitary setting assumes odd q".into()));
            }
            if field.base_q().is_none() {
                return Err(Error::FieldMismatch(
                    "unitary setting needs the quadratic extension field".into(),
                ));
            }
            let m = 2 * n;
            let j_i = anti_diagonal_j(i, field.clone());
            let j_2j = anti_diagonal_j(2 * j, field.clone());
            // radical algebra: C free, C' = -J_{2j} C^* J_i, D twisted-skew
            let d_solutions: Vec<Matrix> = enumerate_matrices(field, i, i)
                .into_iter()
                .filter(|d| {
                    if i == 0 {
                        return true;
                    }
                    let lhs = j_i.mul(d).unwrap().add(&d.star().unwrap().mul(&j_i).unwrap()).unwrap();
                    lhs.is_zero()
                })
                .collect();
            let mut radical_alg = Vec::new();
            for c_mat in enumerate_matrices(field, i, 2 * j) {
                let c_prime = if i > 0 && j > 0 {
                    j_2j.mul(&c_mat.star()?)?.mul(&j_i)?.neg()
                } else {
                    Matrix::zero(2 * j, i, field.clone())
                };
                for d in &d_solutions {
                    let mut z = Matrix::zero(m, m, field.clone());
                    z.paste(0, i, &c_mat);
                    z.paste(0, i + 2 * j, d);
                    z.paste(i, i + 2 * j, &c_prime);
                    debug_assert!(membership(&z, SpaceKind::AlgU)?);
                    radical_alg.push(z);
                }
            }
            let transversal: Result<Vec<Matrix>> = isotropic_subspaces(field, m, i)?
                .iter()
                .map(|v| complete_isotropic_to_unitary(field, v))
                .collect();
            let transversal = transversal?;
            let transversal_inv: Option<Vec<Matrix>> =
                transversal.iter().map(|g| g.inverse()).collect();
            Ok(ParabolicData {
                kind,
                field: field.clone(),
                n,
                i,
                j,
                m,
                radical_alg,
                transversal_inv: transversal_inv
                    .ok_or_else(|| Error::Internal("singular transversal element".into()))?,
                transversal,
            })
        }
    }
}

/// Labels and embedded representatives of the Levi orbit pairs.
pub fn levi_pairs(p: &ParabolicData) -> Result<Vec<((OrbitLabel, OrbitLabel), Matrix, Matrix)>> {
    let (ctx_a, ctx_b) = p.levi_ctx();
    let reps_a = ctx_a.orbit_reps()?;
    let reps_b = ctx_b.orbit_reps()?;
    let mut out = Vec::new();
    for (la, ra, _) in &reps_a {
        for (lb, rb, _) in &reps_b {
            out.push(((la.clone(), lb.clone()), ra.clone(), rb.clone()));
        }
    }
    Ok(out)
}

/// Parabolic restriction: average the ambient invariant function over the
/// radical Lie algebra, evaluated at every Levi orbit pair.
pub fn par_restrict(psi: &InvariantFn, p: &ParabolicData) -> Result<InvariantFn> {
    let values = psi.alg_values()?;
    let ambient = p.ambient_ctx();
    let inv_card = Q::one() / Q::from_integer(p.radical_order().into());
    let mut out: BTreeMap<(OrbitLabel, OrbitLabel), Q> = BTreeMap::new();
    for ((la, lb), ra, rb) in levi_pairs(p)? {
        let y = p.levi_embed(&ra, &rb)?;
        let mut acc = Q::zero();
        for z in &p.radical_alg {
            let point = y.add(z)?;
            let label = ambient.classify(&point)?;
            if let Some(v) = values.get(&label) {
                acc += v;
            }
        }
        if !acc.is_zero() {
            out.insert((la, lb), acc * &inv_card);
        }
    }
    Ok(InvariantFn::Levi { kind: p.kind, i: p.i, j: p.j, values: out })
}

/// Values of the parabolic induction of a Levi invariant function at the
/// given ambient points. Each point is classified per coset after projecting
/// to the Levi.
pub fn par_induce_at(
    phi: &InvariantFn,
    p: &ParabolicData,
    points: &[(OrbitLabel, Matrix)],
) -> Result<BTreeMap<OrbitLabel, Q>> {
    let values = phi.levi_values()?;
    let (ctx_a, ctx_b) = p.levi_ctx();
    let mut out = BTreeMap::new();
    for (label, x) in points {
        let mut acc = Q::zero();
        for (g, g_inv) in p.transversal.iter().zip(&p.transversal_inv) {
            let w = x.conjugate_by(g_inv, g)?; // g^{-1} X g
            if !p.in_parabolic_alg(&w) {
                continue;
            }
            let (a, b) = p.levi_project(&w);
            let pair = (ctx_a.classify(&a)?, ctx_b.classify(&b)?);
            if let Some(v) = values.get(&pair) {
                acc += v;
            }
        }
        if !acc.is_zero() {
            out.insert(label.clone(), acc);
        }
    }
    Ok(out)
}

/// Parabolic induction: extend by the Levi projection, zero off the
/// parabolic, and sum over the transversal; evaluated on every ambient orbit.
pub fn par_induce(phi: &InvariantFn, p: &ParabolicData) -> Result<InvariantFn> {
    let ambient = p.ambient_ctx();
    let reps: Vec<(OrbitLabel, Matrix)> = ambient
        .orbit_reps()?
        .into_iter()
        .map(|(l, r, _)| (l, r))
        .collect();
    let values = par_induce_at(phi, p, &reps)?;
    Ok(InvariantFn::Alg { kind: p.kind, m: p.m, values })
}

/// <f, g> = |G|^{-1} sum_X f(X) g(X), summed per orbit with exact sizes.
pub fn alg_pairing(ctx: &AlgCtx, f: &InvariantFn, g: &InvariantFn) -> Result<Q> {
    let fv = f.alg_values()?;
    let gv = g.alg_values()?;
    let mut acc = Q::zero();
    for (label, _, size) in ctx.orbit_reps()? {
        if let (Some(a), Some(b)) = (fv.get(&label), gv.get(&label)) {
            acc += a * b * Q::from_integer(size.into());
        }
    }
    let order = ctx.group_order();
    Ok(acc / Q::from_integer(order.into()))
}

/// <f, g>_L = |L|^{-1} sum_{Y in Levi} f(Y) g(Y).
pub fn levi_pairing(p: &ParabolicData, f: &InvariantFn, g: &InvariantFn) -> Result<Q> {
    let fv = f.levi_values()?;
    let gv = g.levi_values()?;
    let (ctx_a, ctx_b) = p.levi_ctx();
    let mut acc = Q::zero();
    for (la, _, sa) in ctx_a.orbit_reps()? {
        for (lb, _, sb) in ctx_b.orbit_reps()? {
            let key = (la.clone(), lb.clone());
            if let (Some(a), Some(b)) = (fv.get(&key), gv.get(&key)) {
                acc += a * b * Q::from_integer((&sa * &sb).into());
            }
        }
    }
    let order = ctx_a.group_order() * ctx_b.group_order();
    Ok(acc / Q::from_integer(order.into()))
}

// ---------------------------------------------------------------------------
// Weyl group and the Mackey identity.
// ---------------------------------------------------------------------------

fn permutation_matrices(field: &Arc<FieldSpec>, m: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        let mut mat = Matrix::zero(m, m, field.clone());
        for (c, &r) in perm.iter().enumerate() {
            mat.set(r, c, Fe::ONE);
        }
        out.push(mat);
        // next permutation
        let mut i = m.wrapping_sub(1);
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut jj = m - 1;
        while perm[jj] <= perm[i - 1] {
            jj -= 1;
        }
        perm.swap(i - 1, jj);
        perm[i..].reverse();
    }
    out
}

/// The Weyl group of the setting, embedded as permutation matrices in G:
/// all of S_n for GL(n); the centrally symmetric permutations (those
/// satisfying the unitarity condition) for U(2n). Found by exhaustive search
/// among the monomial 0/1 matrices of G.
pub fn weyl_group(kind: SettingKind, field: &Arc<FieldSpec>, n: usize) -> Result<Vec<Matrix>> {
    match kind {
        SettingKind::Gl => Ok(permutation_matrices(field, n)),
        SettingKind::U => {
            let mut out = Vec::new();
            for p in permutation_matrices(field, 2 * n) {
                if membership(&p, SpaceKind::GroupU)? {
                    out.push(p);
                }
            }
            Ok(out)
        }
    }
}

/// Is the group element inside the Levi subgroup of the split (i, j)?
fn in_levi_group(kind: SettingKind, i: usize, j: usize, g: &Matrix) -> bool {
    let m = g.rows();
    let block_diag = |cuts: &[usize]| -> bool {
        let mut ok = true;
        for r in 0..m {
            for c in 0..m {
                let same_block = cuts
                    .windows(2)
                    .any(|w| r >= w[0] && r < w[1] && c >= w[0] && c < w[1]);
                if !same_block && !g.get(r, c).is_zero() {
                    ok = false;
                }
            }
        }
        ok
    };
    match kind {
        SettingKind::Gl => block_diag(&[0, i, m]),
        SettingKind::U => block_diag(&[0, i, i + 2 * j, m]),
    }
}

/// Representatives of (W cap L') \ W / (W cap L), deterministic (entry-wise
/// lexicographic minimum of each double coset).
pub fn weyl_double_cosets(
    kind: SettingKind,
    field: &Arc<FieldSpec>,
    n: usize,
    split_l: (usize, usize),
    split_lp: (usize, usize),
) -> Result<Vec<Matrix>> {
    if split_l.0 + split_l.1 != n || split_lp.0 + split_lp.1 != n {
        return Err(Error::Dimension("splits must sum to n".into()));
    }
    let w_all = weyl_group(kind, field, n)?;
    let w_l: Vec<Matrix> = w_all
        .iter()
        .filter(|g| in_levi_group(kind, split_l.0, split_l.1, g))
        .cloned()
        .collect();
    let w_lp: Vec<Matrix> = w_all
        .iter()
        .filter(|g| in_levi_group(kind, split_lp.0, split_lp.1, g))
        .cloned()
        .collect();
    let key = |g: &Matrix| -> Vec<u8> { g.entries().iter().map(|e| e.0).collect() };
    let mut assigned: std::collections::BTreeSet<Vec<u8>> = std::collections::BTreeSet::new();
    let mut reps = Vec::new();
    for w in &w_all {
        if assigned.contains(&key(w)) {
            continue;
        }
        // closure of the double coset
        let mut coset = vec![w.clone()];
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(key(w));
        let mut stack = vec![w.clone()];
        while let Some(cur) = stack.pop() {
            for a in &w_lp {
                for b in &w_l {
                    let g = a.mul(&cur)?.mul(b)?;
                    if seen.insert(key(&g)) {
                        coset.push(g.clone());
                        stack.push(g);
                    }
                }
            }
        }
        let min = coset.iter().min_by_key(|g| key(g)).unwrap().clone();
        for g in &coset {
            assigned.insert(key(g));
        }
        reps.push(min);
    }
    reps.sort_by_key(key);
    Ok(reps)
}

/// Report of one Mackey-identity verification: both sides of the identity as
/// matrices over the Levi orbit-pair bases, with any discrepancies listed.
pub struct MackeyReport {
    pub kind: SettingKind,
    pub q: u64,
    pub n: usize,
    pub split_l: (usize, usize),
    pub split_lp: (usize, usize),
    pub rows: Vec<(OrbitLabel, OrbitLabel)>,
    pub cols: Vec<(OrbitLabel, OrbitLabel)>,
    pub lhs: BTreeMap<((OrbitLabel, OrbitLabel), (OrbitLabel, OrbitLabel)), Q>,
    pub rhs: BTreeMap<((OrbitLabel, OrbitLabel), (OrbitLabel, OrbitLabel)), Q>,
    pub coset_count: usize,
}

impl MackeyReport {
    pub fn equal(&self) -> bool {
        self.lhs == self.rhs
    }

    /// Full JSON report with both sides as sparse per-basis-element entries.
    pub fn to_json(&self) -> serde_json::Value {
        let side = |m: &BTreeMap<((OrbitLabel, OrbitLabel), (OrbitLabel, OrbitLabel)), Q>| {
            m.iter()
                .map(|((row, col), v)| {
                    serde_json::json!({
                        "row": [row.0.to_string(), row.1.to_string()],
                        "col": [col.0.to_string(), col.1.to_string()],
                        "value": crate::ratio::q_to_string(v),
                    })
                })
                .collect::<Vec<_>>()
        };
        let failures: Vec<serde_json::Value> = self
            .failures()
            .into_iter()
            .map(|((row, col), a, b)| {
                serde_json::json!({
                    "row": [row.0.to_string(), row.1.to_string()],
                    "col": [col.0.to_string(), col.1.to_string()],
                    "lhs": crate::ratio::q_to_string(&a),
                    "rhs": crate::ratio::q_to_string(&b),
                })
            })
            .collect();
        serde_json::json!({
            "schema": "mackey/1",
            "check": "mackey",
            "setting": match self.kind { SettingKind::Gl => "gl", SettingKind::U => "u" },
            "q": self.q,
            "n": self.n,
            "l": [self.split_l.0, self.split_l.1],
            "lprime": [self.split_lp.0, self.split_lp.1],
            "cosets": self.coset_count,
            "equal": self.equal(),
            "lhs": side(&self.lhs),
            "rhs": side(&self.rhs),
            "failures": failures,
        })
    }

    pub fn failures(
        &self,
    ) -> Vec<(
        ((OrbitLabel, OrbitLabel), (OrbitLabel, OrbitLabel)),
        Q,
        Q,
    )> {
        let mut keys: std::collections::BTreeSet<_> = self.lhs.keys().cloned().collect();
        keys.extend(self.rhs.keys().cloned());
        keys.into_iter()
            .filter_map(|k| {
                let a = self.lhs.get(&k).cloned().unwrap_or_else(Q::zero);
                let b = self.rhs.get(&k).cloned().unwrap_or_else(Q::zero);
                if a != b {
                    Some((k, a, b))
                } else {
                    None
                }
            })
            .collect()
    }
}

fn group_elements(kind: SettingKind, field: &Arc<FieldSpec>, i: usize, j: usize) -> Result<Vec<(Matrix, Matrix)>> {
    // Levi group elements as embedded pairs
    let factor_a = gl_group_scan(field, i)?;
    let factor_b = match kind {
        SettingKind::Gl => gl_group_scan(field, j)?,
        SettingKind::U => {
            if j == 0 {
                vec![Matrix::zero(0, 0, field.clone())]
            } else {
                crate::unitary::unitary_group_elements(field, 2 * j)?
            }
        }
    };
    let mut out = Vec::new();
    for a in &factor_a {
        for b in &factor_b {
            out.push((a.clone(), b.clone()));
        }
    }
    Ok(out)
}

fn gl_group_scan(field: &Arc<FieldSpec>, k: usize) -> Result<Vec<Matrix>> {
    if k == 0 {
        return Ok(vec![Matrix::zero(0, 0, field.clone())]);
    }
    let q = field.q();
    let total = q
        .checked_pow((k * k) as u32)
        .filter(|&t| t <= 100_000_000)
        .ok_or_else(|| Error::Infeasible("group scan too large".into()))?;
    let mut out = Vec::new();
    for idx in 0..total {
        let mut x = Matrix::zero(k, k, field.clone());
        let mut rest = idx;
        for pos in 0..k * k {
            x.set(pos / k, pos % k, Fe((rest % q) as u8));
            rest /= q;
        }
        if x.is_invertible() {
            out.push(x);
        }
    }
    Ok(out)
}

fn levi_group_embedded(p: &ParabolicData) -> Result<Vec<Matrix>> {
    let pairs = group_elements(p.kind, &p.field, p.i, p.j)?;
    let mut out = Vec::new();
    for (a, b) in pairs {
        let mut g = Matrix::zero(p.m, p.m, p.field.clone());
        g.paste(0, 0, &a);
        g.paste(p.i, p.i, &b);
        if p.kind == SettingKind::U && p.i > 0 {
            let j_i = anti_diagonal_j(p.i, p.field.clone());
            let third = j_i
                .mul(&a.star()?.inverse().ok_or_else(|| Error::Internal("singular".into()))?)?
                .mul(&j_i)?;
            g.paste(p.i + 2 * p.j, p.i + 2 * p.j, &third);
        }
        debug_assert!(g.is_invertible());
        out.push(g);
    }
    Ok(out)
}

/// Is g in the parabolic subgroup (block pattern + invertibility)?
fn in_parabolic_group(p: &ParabolicData, g: &Matrix) -> bool {
    p.in_parabolic_alg(g) && g.is_invertible()
}

/// Verify the Mackey identity for the two parabolics (i, j) and (i', j').
/// Supported sizes: GL with n <= 3, q in {2, 3}; U with n <= 2, q = 3.
pub fn mackey_check(
    kind: SettingKind,
    field: &Arc<FieldSpec>,
    split_l: (usize, usize),
    split_lp: (usize, usize),
) -> Result<MackeyReport> {
    let n = split_l.0 + split_l.1;
    if split_lp.0 + split_lp.1 != n {
        return Err(Error::Dimension("splits must sum to the same n".into()));
    }
    let q_defining = match kind {
        SettingKind::Gl => field.q(),
        SettingKind::U => field
            .base_q()
            .ok_or_else(|| Error::FieldMismatch("unitary setting needs F_{q^2}".into()))?,
    };
    match kind {
        SettingKind::Gl => {
            if n > 3 || q_defining > 3 {
                return Err(Error::Infeasible(
                    "Mackey verification is supported for GL at n <= 3, q in {2, 3}".into(),
                ));
            }
        }
        SettingKind::U => {
            if n > 2 || q_defining != 3 {
                return Err(Error::Infeasible(
                    "Mackey verification is supported for U at 2n <= 4, q = 3".into(),
                ));
            }
        }
    }
    let p = build_parabolic(kind, field, split_l.0, split_l.1)?;
    let pp = build_parabolic(kind, field, split_lp.0, split_lp.1)?;
    let (ctx_a, ctx_b) = p.levi_ctx();

    let cols: Vec<(OrbitLabel, OrbitLabel)> = levi_pairs(&p)?.into_iter().map(|(l, _, _)| l).collect();
    let rows_data = levi_pairs(&pp)?;
    let rows: Vec<(OrbitLabel, OrbitLabel)> = rows_data.iter().map(|(l, _, _)| l.clone()).collect();
    let col_index: BTreeMap<(OrbitLabel, OrbitLabel), usize> =
        cols.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();

    // LHS: restrict-after-induce, evaluated pointwise.
    let mut lhs: BTreeMap<((OrbitLabel, OrbitLabel), (OrbitLabel, OrbitLabel)), Q> = BTreeMap::new();
    let inv_rad = Q::one() / Q::from_integer(pp.radical_order().into());
    for (row_label, ra, rb) in &rows_data {
        let y = pp.levi_embed(ra, rb)?;
        let mut acc: Vec<Q> = vec![Q::zero(); cols.len()];
        for z in &pp.radical_alg {
            let x = y.add(z)?;
            for (g, g_inv) in p.transversal.iter().zip(&p.transversal_inv) {
                let w = x.conjugate_by(g_inv, g)?;
                if !p.in_parabolic_alg(&w) {
                    continue;
                }
                let (a, b) = p.levi_project(&w);
                let pair = (ctx_a.classify(&a)?, ctx_b.classify(&b)?);
                if let Some(&k) = col_index.get(&pair) {
                    acc[k] += Q::one();
                }
            }
        }
        for (k, v) in acc.into_iter().enumerate() {
            if !v.is_zero() {
                lhs.insert((row_label.clone(), cols[k].clone()), v * &inv_rad);
            }
        }
    }

    // RHS: sum over Weyl double cosets of induce-transport-restrict.
    let wreps = weyl_double_cosets(kind, field, n, split_l, split_lp)?;
    let lp_group = levi_group_embedded(&pp)?;
    let mut rhs: BTreeMap<((OrbitLabel, OrbitLabel), (OrbitLabel, OrbitLabel)), Q> = BTreeMap::new();
    for w in &wreps {
        let w_inv = w.inverse().ok_or_else(|| Error::Internal("singular Weyl element".into()))?;
        // P'_w = L' cap w P w^{-1}; transversal of L'/P'_w by scanning
        let pw_group: Vec<Matrix> = lp_group
            .iter()
            .filter(|h| in_parabolic_group(&p, &w_inv.mul(h).unwrap().mul(w).unwrap()))
            .cloned()
            .collect();
        let mut coset_reps: Vec<Matrix> = Vec::new();
        {
            let mut seen: std::collections::BTreeSet<Vec<u8>> = std::collections::BTreeSet::new();
            let key = |g: &Matrix| -> Vec<u8> { g.entries().iter().map(|e| e.0).collect() };
            for h in &lp_group {
                if seen.contains(&key(h)) {
                    continue;
                }
                coset_reps.push(h.clone());
                for pw in &pw_group {
                    seen.insert(key(&h.mul(pw)?));
                }
            }
        }
        // radical algebra of P_w inside L: Z in Levi(L)-alg with w Z w^{-1}
        // in radical-alg of P'
        let mut uw_alg: Vec<Matrix> = Vec::new();
        {
            let (la, lb) = p.levi_ctx();
            let elems_a = enumerate_matrices(field, la.m, la.m);
            let elems_b: Vec<Matrix> = match kind {
                SettingKind::Gl => enumerate_matrices(field, lb.m, lb.m),
                SettingKind::U => {
                    if lb.m == 0 {
                        vec![Matrix::zero(0, 0, field.clone())]
                    } else {
                        let space = crate::unitary::USpace::new(field.clone(), lb.m)?;
                        (0..space.cardinality()).map(|idx| space.unpack(idx)).collect()
                    }
                }
            };
            for a in &elems_a {
                for b in &elems_b {
                    let z = p.levi_embed(a, b)?;
                    let moved = z.conjugate_by(w, &w_inv)?;
                    // moved must be in the radical algebra of P': strictly
                    // block-upper with zero Levi blocks
                    if pp.in_parabolic_alg(&moved) {
                        let (pa, pb) = pp.levi_project(&moved);
                        if pa.is_zero() && pb.is_zero() {
                            uw_alg.push(z);
                        }
                    }
                }
            }
        }
        let inv_uw = Q::one() / Q::from_integer((uw_alg.len() as u64).into());
        for (row_label, ra, rb) in &rows_data {
            let yp = pp.levi_embed(ra, rb)?;
            let mut acc: Vec<Q> = vec![Q::zero(); cols.len()];
            for h in &coset_reps {
                let h_inv = h.inverse().unwrap();
                let mm = yp.conjugate_by(&h_inv, h)?; // h^{-1} Y' h
                // membership in P'_w-alg: in L'-alg automatically; need
                // w^{-1} M w in P-alg
                let pulled = mm.conjugate_by(&w_inv, w)?;
                if !p.in_parabolic_alg(&pulled) {
                    continue;
                }
                // project along the radical: Levi component of the pulled
                // matrix, transported back is not needed (T_w evaluates at
                // w^{-1} . w, which is exactly the pulled Levi component)
                let (pa, pb) = p.levi_project(&pulled);
                let levi_part = p.levi_embed(&pa, &pb)?;
                for z in &uw_alg {
                    let point = levi_part.add(z)?;
                    let (qa, qb) = p.levi_project(&point);
                    let pair = (ctx_a.classify(&qa)?, ctx_b.classify(&qb)?);
                    if let Some(&k) = col_index.get(&pair) {
                        acc[k] += &inv_uw;
                    }
                }
            }
            for (k, v) in acc.into_iter().enumerate() {
                if !v.is_zero() {
                    let key = (row_label.clone(), cols[k].clone());
                    *rhs.entry(key).or_insert_with(Q::zero) += v;
                }
            }
        }
    }
    Ok(MackeyReport {
        kind,
        q: q_defining,
        n,
        split_l,
        split_lp,
        rows,
        cols,
        lhs,
        rhs,
        coset_count: wreps.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;
    use crate::ratio::{q_int, q_ratio};

    fn f(q: u64) -> Arc<FieldSpec> {
        FieldSpec::parse_q(&q.to_string()).unwrap()
    }

    fn nilp(parts: &[u32]) -> OrbitLabel {
        OrbitLabel::gl_nilpotent(Partition::new(parts.to_vec()))
    }

    #[test]
    fn transversal_sizes() {
        let f3 = f(3);
        let p = build_parabolic(SettingKind::Gl, &f3, 1, 1).unwrap();
        assert_eq!(p.transversal.len(), 4); // projective line over F_3
        assert_eq!(p.radical_alg.len(), 3);
        let f2 = f(2);
        let p = build_parabolic(SettingKind::Gl, &f2, 1, 2).unwrap();
        assert_eq!(p.transversal.len(), 7); // PG(2, 2)
        let f9 = FieldSpec::new(3, 2).unwrap();
        let p = build_parabolic(SettingKind::U, &f9, 1, 0).unwrap();
        assert_eq!(p.transversal.len(), 4); // isotropic points on the Hermitian line
        assert_eq!(p.radical_alg.len(), 3); // q^{4ij + i^2} = 3
    }

    #[test]
    fn radical_group_order_matches_algebra() {
        let f3 = f(3);
        for (i, j) in [(1, 1), (1, 2), (2, 1)] {
            let p = build_parabolic(SettingKind::Gl, &f3, i, j).unwrap();
            assert_eq!(p.radical_group_elements().unwrap().len(), p.radical_alg.len());
        }
        let f9 = FieldSpec::new(3, 2).unwrap();
        for (i, j) in [(1, 0), (1, 1), (2, 0)] {
            let p = build_parabolic(SettingKind::U, &f9, i, j).unwrap();
            assert_eq!(
                p.radical_group_elements().unwrap().len(),
                p.radical_alg.len(),
                "radical mismatch at split ({i}, {j})"
            );
            let expected = 3u64.pow((4 * i * j + i * i) as u32);
            assert_eq!(p.radical_order(), expected);
        }
    }

    #[test]
    fn transversal_times_parabolic_is_group() {
        let f3 = f(3);
        let p = build_parabolic(SettingKind::Gl, &f3, 1, 1).unwrap();
        // |P| = |L| |U| = (q-1)^2 * q = 12; transversal 4; |GL(2,3)| = 48
        let levi = levi_group_embedded(&p).unwrap();
        let rad = p.radical_group_elements().unwrap();
        assert_eq!(levi.len() * rad.len() * p.transversal.len(), 48);
    }

    #[test]
    fn restrict_worked_examples() {
        // gl(2): indicator of {0} restricts to (1/q) (ind0 x ind0);
        // indicator of the (2)-orbit restricts to ((q-1)/q) (ind0 x ind0)
        for q in [2u64, 3] {
            let fq = f(q);
            let p = build_parabolic(SettingKind::Gl, &fq, 1, 1).unwrap();
            let zero2 = InvariantFn::alg_indicator(SettingKind::Gl, nilp(&[1, 1]));
            let r = par_restrict(&zero2, &p).unwrap();
            let vals = r.levi_values().unwrap();
            assert_eq!(vals.len(), 1);
            assert_eq!(vals[&(nilp(&[1]), nilp(&[1]))], q_ratio(1, q as i64));

            let reg = InvariantFn::alg_indicator(SettingKind::Gl, nilp(&[2]));
            let r = par_restrict(&reg, &p).unwrap();
            let vals = r.levi_values().unwrap();
            assert_eq!(vals[&(nilp(&[1]), nilp(&[1]))], q_ratio(q as i64 - 1, q as i64));

            // constant function restricts to the constant
            let ambient = AlgCtx::gl(fq.clone(), 2);
            let mut all = BTreeMap::new();
            for (l, _, _) in ambient.orbit_reps().unwrap() {
                all.insert(l, q_int(1));
            }
            let c = InvariantFn::Alg { kind: SettingKind::Gl, m: 2, values: all };
            let r = par_restrict(&c, &p).unwrap();
            for v in r.levi_values().unwrap().values() {
                assert_eq!(*v, q_int(1));
            }
        }
    }

    #[test]
    fn induce_worked_example() {
        // ind0 x ind0 induces to (q+1) chi_{(1,1)} + chi_{(2)}
        for q in [2u64, 3] {
            let fq = f(q);
            let p = build_parabolic(SettingKind::Gl, &fq, 1, 1).unwrap();
            let phi = InvariantFn::levi_indicator(SettingKind::Gl, 1, 1, nilp(&[1]), nilp(&[1]));
            let ind = par_induce(&phi, &p).unwrap();
            let vals = ind.alg_values().unwrap();
            assert_eq!(vals[&nilp(&[1, 1])], q_int(q as i64 + 1));
            assert_eq!(vals[&nilp(&[2])], q_int(1));
            assert_eq!(vals.len(), 2);
        }
    }

    #[test]
    fn adjointness_instance() {
        // <ind phi, chi_{(1,1)}>_G = <phi, res chi_{(1,1)}>_L = 1/(q (q-1)^2)
        for q in [2u64, 3] {
            let fq = f(q);
            let p = build_parabolic(SettingKind::Gl, &fq, 1, 1).unwrap();
            let ambient = p.ambient_ctx();
            let phi = InvariantFn::levi_indicator(SettingKind::Gl, 1, 1, nilp(&[1]), nilp(&[1]));
            let chi = InvariantFn::alg_indicator(SettingKind::Gl, nilp(&[1, 1]));
            let lhs = alg_pairing(&ambient, &par_induce(&phi, &p).unwrap(), &chi).unwrap();
            let rhs = levi_pairing(&p, &phi, &par_restrict(&chi, &p).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let expect = q_ratio(1, (q * (q - 1) * (q - 1)) as i64);
            assert_eq!(lhs, expect);
        }
    }

    #[test]
    fn weyl_double_coset_counts() {
        let f3 = f(3);
        // GL n=2, L = L' = L_{1,1}: two representatives
        let reps = weyl_double_cosets(SettingKind::Gl, &f3, 2, (1, 1), (1, 1)).unwrap();
        assert_eq!(reps.len(), 2);
        let f2 = f(2);
        // GL n=3: S_2 \ S_3 / S_2 has 2 classes
        let reps = weyl_double_cosets(SettingKind::Gl, &f2, 3, (1, 2), (2, 1)).unwrap();
        assert_eq!(reps.len(), 2);
        // U 2n=2: W has order 2, trivial intersections
        let f9 = FieldSpec::new(3, 2).unwrap();
        assert_eq!(weyl_group(SettingKind::U, &f9, 1).unwrap().len(), 2);
        let reps = weyl_double_cosets(SettingKind::U, &f9, 1, (1, 0), (1, 0)).unwrap();
        assert_eq!(reps.len(), 2);
        // U 2n=4: W is the hyperoctahedral group of order 8
        assert_eq!(weyl_group(SettingKind::U, &f9, 2).unwrap().len(), 8);
    }

    #[test]
    fn mackey_gl2() {
        for q in [2u64, 3] {
            let fq = f(q);
            let report = mackey_check(SettingKind::Gl, &fq, (1, 1), (1, 1)).unwrap();
            assert!(report.equal(), "failures: {:?}", report.failures().len());
            // the worked instance: input ind0 x ind0 maps to 2 (ind0 x ind0)
            let key = (
                (nilp(&[1]), nilp(&[1])),
                (nilp(&[1]), nilp(&[1])),
            );
            assert_eq!(report.lhs[&key], q_int(2));
        }
    }

    #[test]
    fn mackey_u2() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let report = mackey_check(SettingKind::U, &f9, (1, 0), (1, 0)).unwrap();
        assert!(report.equal(), "failures: {:?}", report.failures());
        assert_eq!(report.coset_count, 2);
    }
}
