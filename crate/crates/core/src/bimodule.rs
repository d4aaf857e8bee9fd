//! The graded tower of invariant functions on the gl(n, F_q)'s, with the
//! product and coproduct induced by parabolic induction/restriction summed
//! over all splits, and the unitary tower over F_{q^2}, which is a module
//! and comodule over the gl tower with a twisted compatibility:
//!
//!   delta_tilde(a . b) = a (.) delta_tilde(b),
//!
//! where (.) acts through the Sweedler triple of a with the involution
//! omega(X) = -J X^* J on the middle leg.
//!
//! Everything is computed on the orbit-indicator basis; the per-bidegree
//! matrices of all maps are cached, so every axiom check is an exact
//! rational matrix identity.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::anti_diagonal_j;
use crate::orbit::OrbitLabel;
use crate::parabolic::{build_parabolic, levi_pairs, AlgCtx, ParabolicData, SettingKind};
use crate::ratio::Q;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    A,
    B,
}

/// An element of one of the two graded towers, on the orbit-indicator basis.
/// Levels are implicit in the labels (half the matrix size on the B side).
#[derive(Clone, PartialEq, Debug, Default)]
pub struct GradedVector {
    pub terms: BTreeMap<OrbitLabel, Q>,
}

impl GradedVector {
    pub fn zero() -> GradedVector {
        GradedVector { terms: BTreeMap::new() }
    }

    pub fn basis(label: OrbitLabel) -> GradedVector {
        let mut terms = BTreeMap::new();
        terms.insert(label, Q::one());
        GradedVector { terms }
    }

    pub fn add_term(&mut self, label: OrbitLabel, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(label).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &GradedVector) -> GradedVector {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> GradedVector {
        if c.is_zero() {
            return GradedVector::zero();
        }
        GradedVector {
            terms: self.terms.iter().map(|(l, v)| (l.clone(), v * c)).collect(),
        }
    }
}

/// A sum of pure tensors with exact coefficients; left leg always on the gl
/// side, right leg on the side given by context (A x A or A x B).
#[derive(Clone, PartialEq, Debug, Default)]
pub struct TensorVector {
    pub terms: BTreeMap<(OrbitLabel, OrbitLabel), Q>,
}

impl TensorVector {
    pub fn zero() -> TensorVector {
        TensorVector { terms: BTreeMap::new() }
    }

    pub fn basis(a: OrbitLabel, b: OrbitLabel) -> TensorVector {
        let mut terms = BTreeMap::new();
        terms.insert((a, b), Q::one());
        TensorVector { terms }
    }

    pub fn add_term(&mut self, key: (OrbitLabel, OrbitLabel), c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &TensorVector) -> TensorVector {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> TensorVector {
        if c.is_zero() {
            return TensorVector::zero();
        }
        TensorVector {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn tensor(u: &GradedVector, v: &GradedVector) -> TensorVector {
        let mut out = TensorVector::zero();
        for (la, ca) in &u.terms {
            for (lb, cb) in &v.terms {
                out.add_term((la.clone(), lb.clone()), ca * cb);
            }
        }
        out
    }
}

type InduceColumns = BTreeMap<(OrbitLabel, OrbitLabel), BTreeMap<OrbitLabel, Q>>;
type RestrictColumns = BTreeMap<OrbitLabel, BTreeMap<(OrbitLabel, OrbitLabel), Q>>;

/// Bulk matrix of parabolic induction on indicator bases: column (Levi pair)
/// -> values on ambient orbits.
fn induce_matrix(p: &ParabolicData) -> Result<InduceColumns> {
    let ambient = p.ambient_ctx();
    let (ctx_a, ctx_b) = p.levi_ctx();
    let mut out: InduceColumns = BTreeMap::new();
    for ((la, lb), _, _) in levi_pairs(p)? {
        out.entry((la, lb)).or_default();
    }
    for (label, rep, _) in ambient.orbit_reps()? {
        for (g, g_inv) in p.transversal.iter().zip(&p.transversal_inv) {
            let w = rep.conjugate_by(g_inv, g)?;
            if !p.in_parabolic_alg(&w) {
                continue;
            }
            let (a, b) = p.levi_project(&w);
            let pair = (ctx_a.classify(&a)?, ctx_b.classify(&b)?);
            let col = out
                .get_mut(&pair)
                .ok_or_else(|| Error::Internal("projection left the Levi label set".into()))?;
            *col.entry(label.clone()).or_insert_with(Q::zero) += Q::one();
        }
    }
    Ok(out)
}

/// Bulk matrix of parabolic restriction: column (ambient label) -> values on
/// Levi pairs.
fn restrict_matrix(p: &ParabolicData) -> Result<RestrictColumns> {
    let ambient = p.ambient_ctx();
    let inv_rad = Q::one() / Q::from_integer(p.radical_order().into());
    let mut out: RestrictColumns = BTreeMap::new();
    for (label, _, _) in ambient.orbit_reps()? {
        out.entry(label).or_default();
    }
    for ((la, lb), ra, rb) in levi_pairs(p)? {
        let y = p.levi_embed(&ra, &rb)?;
        for z in &p.radical_alg {
            let point = y.add(z)?;
            let label = ambient.classify(&point)?;
            let col = out
                .get_mut(&label)
                .ok_or_else(|| Error::Internal("classification left the ambient label set".into()))?;
            *col.entry((la.clone(), lb.clone())).or_insert_with(Q::zero) += &inv_rad;
        }
    }
    Ok(out)
}

/// The graded tower over gl(n, F_q): product and coproduct via parabolic
/// induction and restriction over all splits i + j = n.
pub struct GlAlgebra {
    pub field: Arc<FieldSpec>,
    parabolics: Mutex<HashMap<(usize, usize), Arc<ParabolicData>>>,
    induce: Mutex<HashMap<(usize, usize), Arc<InduceColumns>>>,
    restrict: Mutex<HashMap<(usize, usize), Arc<RestrictColumns>>>,
}

impl GlAlgebra {
    pub fn new(field: Arc<FieldSpec>) -> GlAlgebra {
        GlAlgebra {
            field,
            parabolics: Mutex::new(HashMap::new()),
            induce: Mutex::new(HashMap::new()),
            restrict: Mutex::new(HashMap::new()),
        }
    }

    pub fn unit_label(&self) -> OrbitLabel {
        OrbitLabel::gl_nilpotent(crate::partition::Partition::empty())
    }

    /// x_1: the indicator of the 1x1 zero matrix.
    pub fn x1_label(&self) -> OrbitLabel {
        OrbitLabel::gl_nilpotent(crate::partition::Partition::new(vec![1]))
    }

    pub fn level_ctx(&self, n: usize) -> AlgCtx {
        AlgCtx::gl(self.field.clone(), n)
    }

    /// All orbit labels at one level.
    pub fn basis(&self, n: usize) -> Result<Vec<OrbitLabel>> {
        Ok(self.level_ctx(n).orbit_reps()?.into_iter().map(|(l, _, _)| l).collect())
    }

    fn parabolic(&self, i: usize, j: usize) -> Result<Arc<ParabolicData>> {
        if let Some(hit) = self.parabolics.lock().unwrap().get(&(i, j)) {
            return Ok(hit.clone());
        }
        let p = Arc::new(build_parabolic(SettingKind::Gl, &self.field, i, j)?);
        self.parabolics.lock().unwrap().insert((i, j), p.clone());
        Ok(p)
    }

    fn induce_cols(&self, i: usize, j: usize) -> Result<Arc<InduceColumns>> {
        if let Some(hit) = self.induce.lock().unwrap().get(&(i, j)) {
            return Ok(hit.clone());
        }
        let m = Arc::new(induce_matrix(self.parabolic(i, j)?.as_ref())?);
        self.induce.lock().unwrap().insert((i, j), m.clone());
        Ok(m)
    }

    fn restrict_cols(&self, i: usize, j: usize) -> Result<Arc<RestrictColumns>> {
        if let Some(hit) = self.restrict.lock().unwrap().get(&(i, j)) {
            return Ok(hit.clone());
        }
        let m = Arc::new(restrict_matrix(self.parabolic(i, j)?.as_ref())?);
        self.restrict.lock().unwrap().insert((i, j), m.clone());
        Ok(m)
    }

    /// The graded product: parabolic induction summed over the bidegrees
    /// present in the tensor.
    pub fn nabla(&self, x: &TensorVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for ((la, lb), c) in &x.terms {
            let (i, j) = (la.size(), lb.size());
            let cols = self.induce_cols(i, j)?;
            let col = cols
                .get(&(la.clone(), lb.clone()))
                .ok_or_else(|| Error::Internal(format!("unknown Levi pair ({la}, {lb})")))?;
            for (l, v) in col {
                out.add_term(l.clone(), v * c);
            }
        }
        Ok(out)
    }

    /// The graded coproduct: parabolic restriction summed over all splits.
    pub fn delta(&self, v: &GradedVector) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for (l, c) in &v.terms {
            let n = l.size();
            for i in 0..=n {
                let cols = self.restrict_cols(i, n - i)?;
                if let Some(col) = cols.get(l) {
                    for (pair, v2) in col {
                        out.add_term(pair.clone(), v2 * c);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mult(&self, u: &GradedVector, v: &GradedVector) -> Result<GradedVector> {
        self.nabla(&TensorVector::tensor(u, v))
    }

    /// Counit: the coefficient of the degree-0 basis element.
    pub fn counit(&self, v: &GradedVector) -> Q {
        v.terms.get(&self.unit_label()).cloned().unwrap_or_else(Q::zero)
    }

    /// Pushforward of indicator functions along omega(X) = -J X^* J; an
    /// involution that permutes orbit labels (and fixes all nilpotent ones).
    pub fn omega_label(&self, label: &OrbitLabel) -> Result<OrbitLabel> {
        if self.field.base_q().is_none() {
            return Err(Error::FieldMismatch(
                "the twist is defined over a quadratic extension field".into(),
            ));
        }
        let ctx = self.level_ctx(label.size());
        let reps = ctx.orbit_reps()?;
        let rep = reps
            .iter()
            .find(|(l, _, _)| l == label)
            .map(|(_, r, _)| r.clone())
            .ok_or_else(|| Error::Internal(format!("unknown label {label}")))?;
        if label.size() == 0 {
            return Ok(label.clone());
        }
        let j = anti_diagonal_j(label.size(), self.field.clone());
        let image = j.mul(&rep.star()?)?.mul(&j)?.neg();
        ctx.classify(&image)
    }

    pub fn omega(&self, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (l, c) in &v.terms {
            out.add_term(self.omega_label(l)?, c.clone());
        }
        Ok(out)
    }

    /// Sweedler triple (Delta x id) Delta(a) of one basis element.
    pub fn sweedler_triple(
        &self,
        label: &OrbitLabel,
    ) -> Result<BTreeMap<(OrbitLabel, OrbitLabel, OrbitLabel), Q>> {
        let two = self.delta(&GradedVector::basis(label.clone()))?;
        let mut out: BTreeMap<(OrbitLabel, OrbitLabel, OrbitLabel), Q> = BTreeMap::new();
        for ((l12, l3), c) in &two.terms {
            let inner = self.delta(&GradedVector::basis(l12.clone()))?;
            for ((l1, l2), c2) in &inner.terms {
                let key = (l1.clone(), l2.clone(), l3.clone());
                *out.entry(key).or_insert_with(Q::zero) += c * c2;
            }
        }
        Ok(out)
    }
}

/// The unitary tower over F_{q^2} with its module/comodule structure over
/// the gl tower at q^2.
pub struct UBimodule {
    /// F_{q^2}
    pub field: Arc<FieldSpec>,
    /// the acting gl tower A_{q^2}, over the same field
    pub gl: GlAlgebra,
    parabolics: Mutex<HashMap<(usize, usize), Arc<ParabolicData>>>,
    induce: Mutex<HashMap<(usize, usize), Arc<InduceColumns>>>,
    restrict: Mutex<HashMap<(usize, usize), Arc<RestrictColumns>>>,
}

impl UBimodule {
    pub fn new(field: Arc<FieldSpec>) -> Result<UBimodule> {
        if field.base_q().is_none() {
            return Err(Error::FieldMismatch(
                "the unitary tower needs the quadratic extension field".into(),
            ));
        }
        if !field.is_odd() {
            return Err(Error::Unsupported("the unitary tower assumes odd q".into()));
        }
        Ok(UBimodule {
            gl: GlAlgebra::new(field.clone()),
            field,
            parabolics: Mutex::new(HashMap::new()),
            induce: Mutex::new(HashMap::new()),
            restrict: Mutex::new(HashMap::new()),
        })
    }

    pub fn q(&self) -> u64 {
        self.field.base_q().expect("quadratic extension")
    }

    pub fn unit_label(&self) -> OrbitLabel {
        OrbitLabel::u_nilpotent(crate::partition::Partition::empty())
    }

    pub fn level_ctx(&self, level: usize) -> AlgCtx {
        AlgCtx::u(self.field.clone(), 2 * level)
    }

    /// All unitary orbit labels at one level (matrix size 2 * level).
    pub fn basis(&self, level: usize) -> Result<Vec<OrbitLabel>> {
        Ok(self
            .level_ctx(level)
            .orbit_reps()?
            .into_iter()
            .map(|(l, _, _)| l)
            .collect())
    }

    fn parabolic(&self, i: usize, j: usize) -> Result<Arc<ParabolicData>> {
        if let Some(hit) = self.parabolics.lock().unwrap().get(&(i, j)) {
            return Ok(hit.clone());
        }
        let p = Arc::new(build_parabolic(SettingKind::U, &self.field, i, j)?);
        self.parabolics.lock().unwrap().insert((i, j), p.clone());
        Ok(p)
    }

    fn induce_cols(&self, i: usize, j: usize) -> Result<Arc<InduceColumns>> {
        if let Some(hit) = self.induce.lock().unwrap().get(&(i, j)) {
            return Ok(hit.clone());
        }
        let m = Arc::new(induce_matrix(self.parabolic(i, j)?.as_ref())?);
        self.induce.lock().unwrap().insert((i, j), m.clone());
        Ok(m)
    }

    fn restrict_cols(&self, i: usize, j: usize) -> Result<Arc<RestrictColumns>> {
        if let Some(hit) = self.restrict.lock().unwrap().get(&(i, j)) {
            return Ok(hit.clone());
        }
        let m = Arc::new(restrict_matrix(self.parabolic(i, j)?.as_ref())?);
        self.restrict.lock().unwrap().insert((i, j), m.clone());
        Ok(m)
    }

    /// The module action: induction from gl(i) x u(2j) summed over the
    /// bidegrees present.
    pub fn nabla_tilde(&self, x: &TensorVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for ((la, lb), c) in &x.terms {
            let (i, j) = (la.size(), lb.size() / 2);
            let cols = self.induce_cols(i, j)?;
            let col = cols
                .get(&(la.clone(), lb.clone()))
                .ok_or_else(|| Error::Internal(format!("unknown Levi pair ({la}, {lb})")))?;
            for (l, v) in col {
                out.add_term(l.clone(), v * c);
            }
        }
        Ok(out)
    }

    /// The coaction: restriction to gl(i) x u(2j) summed over all splits.
    pub fn delta_tilde(&self, v: &GradedVector) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for (l, c) in &v.terms {
            let n = l.size() / 2;
            for i in 0..=n {
                let cols = self.restrict_cols(i, n - i)?;
                if let Some(col) = cols.get(l) {
                    for (pair, v2) in col {
                        out.add_term(pair.clone(), v2 * c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// a . b for a in the gl tower, b in the unitary tower.
    pub fn act(&self, a: &GradedVector, b: &GradedVector) -> Result<GradedVector> {
        self.nabla_tilde(&TensorVector::tensor(a, b))
    }

    /// The twisted action of a basis element a on the mixed tensor space:
    /// a (.) (a' x b) = sum (a_(1) omega(a_(2)) a') x (a_(3) . b).
    pub fn odot(&self, a: &GradedVector, x: &TensorVector) -> Result<TensorVector> {
        let mut out = TensorVector::zero();
        for (la, ca) in &a.terms {
            let triple = self.gl.sweedler_triple(la)?;
            for ((l1, l2, l3), ct) in &triple {
                let coeff = ca * ct;
                for ((lap, lb), cx) in &x.terms {
                    // left leg: a_(1) * omega(a_(2)) * a'
                    let m12 = self.gl.mult(
                        &GradedVector::basis(l1.clone()),
                        &self.gl.omega(&GradedVector::basis(l2.clone()))?,
                    )?;
                    let left = self.gl.mult(&m12, &GradedVector::basis(lap.clone()))?;
                    // right leg: a_(3) . b
                    let right = self.act(
                        &GradedVector::basis(l3.clone()),
                        &GradedVector::basis(lb.clone()),
                    )?;
                    let prod = TensorVector::tensor(&left, &right).scale(&(&coeff * cx));
                    out = out.add(&prod);
                }
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Axiom checkers.
// ---------------------------------------------------------------------------

#[derive(Serialize, Debug)]
pub struct AxiomReport {
    pub check: String,
    pub q: u64,
    pub maxdeg: usize,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub untwisted_counterexample: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn tensor3_of_left(
    alg: &GlAlgebra,
    t: &TensorVector,
) -> Result<BTreeMap<(OrbitLabel, OrbitLabel, OrbitLabel), Q>> {
    // (Delta x id) applied to a tensor
    let mut out: BTreeMap<(OrbitLabel, OrbitLabel, OrbitLabel), Q> = BTreeMap::new();
    for ((l12, l3), c) in &t.terms {
        let inner = alg.delta(&GradedVector::basis(l12.clone()))?;
        for ((l1, l2), c2) in &inner.terms {
            *out.entry((l1.clone(), l2.clone(), l3.clone())).or_insert_with(Q::zero) += c * c2;
        }
    }
    Ok(out)
}

fn tensor3_of_right(
    alg: &GlAlgebra,
    t: &TensorVector,
) -> Result<BTreeMap<(OrbitLabel, OrbitLabel, OrbitLabel), Q>> {
    // (id x Delta) applied to a tensor
    let mut out: BTreeMap<(OrbitLabel, OrbitLabel, OrbitLabel), Q> = BTreeMap::new();
    for ((l1, l23), c) in &t.terms {
        let inner = alg.delta(&GradedVector::basis(l23.clone()))?;
        for ((l2, l3), c2) in &inner.terms {
            *out.entry((l1.clone(), l2.clone(), l3.clone())).or_insert_with(Q::zero) += c * c2;
        }
    }
    Ok(out)
}

/// Verify the graded-bialgebra axioms of the gl tower on all basis tensors
/// through total degree maxdeg: associativity, unit/counit, commutativity,
/// cocommutativity, coassociativity, and the product/coproduct
/// compatibility. Supported at maxdeg <= 4 for q in {2, 3}.
pub fn check_bialgebra(field: &Arc<FieldSpec>, maxdeg: usize) -> Result<AxiomReport> {
    if maxdeg > 4 || !(field.q() == 2 || field.q() == 3) {
        return Err(Error::Infeasible(
            "bialgebra verification is supported for maxdeg <= 4 at q in {2, 3}".into(),
        ));
    }
    let alg = GlAlgebra::new(field.clone());
    let mut failures = Vec::new();
    let bases: Vec<Vec<OrbitLabel>> = (0..=maxdeg).map(|n| alg.basis(n)).collect::<Result<_>>()?;

    // unit, counit, coassociativity, cocommutativity per basis element
    let one = GradedVector::basis(alg.unit_label());
    for level in bases.iter().take(maxdeg + 1) {
        for l in level {
            let v = GradedVector::basis(l.clone());
            if alg.mult(&one, &v)? != v || alg.mult(&v, &one)? != v {
                failures.push(format!("unit law at {l}"));
            }
            let d = alg.delta(&v)?;
            // counit laws
            let mut left = GradedVector::zero();
            let mut right = GradedVector::zero();
            for ((l1, l2), c) in &d.terms {
                if *l1 == alg.unit_label() {
                    left.add_term(l2.clone(), c.clone());
                }
                if *l2 == alg.unit_label() {
                    right.add_term(l1.clone(), c.clone());
                }
            }
            if left != v || right != v {
                failures.push(format!("counit law at {l}"));
            }
            // cocommutativity
            let mut swapped = TensorVector::zero();
            for ((l1, l2), c) in &d.terms {
                swapped.add_term((l2.clone(), l1.clone()), c.clone());
            }
            if swapped != d {
                failures.push(format!("cocommutativity at {l}"));
            }
            // coassociativity
            if tensor3_of_left(&alg, &d)? != tensor3_of_right(&alg, &d)? {
                failures.push(format!("coassociativity at {l}"));
            }
            // grading of the coproduct
            for ((l1, l2), _) in &d.terms {
                if l1.size() + l2.size() != l.size() {
                    failures.push(format!("coproduct grading at {l}"));
                }
            }
        }
    }

    // pairwise checks: commutativity, compatibility, grading of the product
    for da in 0..=maxdeg {
        for db in 0..=maxdeg - da {
            for la in &bases[da] {
                for lb in &bases[db] {
                    let a = GradedVector::basis(la.clone());
                    let b = GradedVector::basis(lb.clone());
                    let ab = alg.mult(&a, &b)?;
                    if ab != alg.mult(&b, &a)? {
                        failures.push(format!("commutativity at ({la}, {lb})"));
                    }
                    for (l, _) in &ab.terms {
                        if l.size() != da + db {
                            failures.push(format!("product grading at ({la}, {lb})"));
                        }
                    }
                    // compatibility: Delta(ab) = (nabla x nabla) (1 x swap x 1)(Delta a x Delta b)
                    let lhs = alg.delta(&ab)?;
                    let da_t = alg.delta(&a)?;
                    let db_t = alg.delta(&b)?;
                    let mut rhs = TensorVector::zero();
                    for ((a1, a2), c1) in &da_t.terms {
                        for ((b1, b2), c2) in &db_t.terms {
                            let left = alg.mult(
                                &GradedVector::basis(a1.clone()),
                                &GradedVector::basis(b1.clone()),
                            )?;
                            let right = alg.mult(
                                &GradedVector::basis(a2.clone()),
                                &GradedVector::basis(b2.clone()),
                            )?;
                            rhs = rhs.add(&TensorVector::tensor(&left, &right).scale(&(c1 * c2)));
                        }
                    }
                    if lhs != rhs {
                        failures.push(format!("compatibility at ({la}, {lb})"));
                    }
                }
            }
        }
    }

    // associativity on basis triples
    for da in 0..=maxdeg {
        for db in 0..=maxdeg - da {
            for dc in 0..=maxdeg - da - db {
                for la in &bases[da] {
                    for lb in &bases[db] {
                        for lc in &bases[dc] {
                            let a = GradedVector::basis(la.clone());
                            let b = GradedVector::basis(lb.clone());
                            let c = GradedVector::basis(lc.clone());
                            let lhs = alg.mult(&alg.mult(&a, &b)?, &c)?;
                            let rhs = alg.mult(&a, &alg.mult(&b, &c)?)?;
                            if lhs != rhs {
                                failures.push(format!("associativity at ({la}, {lb}, {lc})"));
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(AxiomReport {
        check: "bialgebra".into(),
        q: field.q(),
        maxdeg,
        failures,
        untwisted_counterexample: None,
    })
}

/// Verify the twisted module/comodule structure of the unitary tower through
/// total degree maxdeg: grading, the module law for the action, the
/// comodule law for the coaction, the twisted-diagram identity, and the
/// module law for the twisted action on the mixed tensor space. Also records
/// the first counterexample to the untwisted diagram, if one exists in
/// range. Supported at maxdeg <= 2, q = 3.
pub fn check_twisted(field: &Arc<FieldSpec>, maxdeg: usize) -> Result<AxiomReport> {
    let q = field
        .base_q()
        .ok_or_else(|| Error::FieldMismatch("twisted checks need F_{q^2}".into()))?;
    if maxdeg > 2 || q != 3 {
        return Err(Error::Infeasible(
            "twisted verification is supported for maxdeg <= 2 at q = 3".into(),
        ));
    }
    let bim = UBimodule::new(field.clone())?;
    let mut failures = Vec::new();
    let a_bases: Vec<Vec<OrbitLabel>> =
        (0..=maxdeg).map(|n| bim.gl.basis(n)).collect::<Result<_>>()?;
    let b_bases: Vec<Vec<OrbitLabel>> =
        (0..=maxdeg).map(|n| bim.basis(n)).collect::<Result<_>>()?;

    // (a) grading of the action and coaction; (c) comodule law
    for db in 0..=maxdeg {
        for lb in &b_bases[db] {
            let b = GradedVector::basis(lb.clone());
            let d = bim.delta_tilde(&b)?;
            for ((l1, l2), _) in &d.terms {
                if l1.size() + l2.size() / 2 != db {
                    failures.push(format!("coaction grading at {lb}"));
                }
            }
            // comodule law: (Delta x id) Delta~ = (id x Delta~) Delta~
            let mut lhs: BTreeMap<(OrbitLabel, OrbitLabel, OrbitLabel), Q> = BTreeMap::new();
            for ((l12, l3), c) in &d.terms {
                let inner = bim.gl.delta(&GradedVector::basis(l12.clone()))?;
                for ((l1, l2), c2) in &inner.terms {
                    *lhs.entry((l1.clone(), l2.clone(), l3.clone())).or_insert_with(Q::zero) +=
                        c * c2;
                }
            }
            let mut rhs: BTreeMap<(OrbitLabel, OrbitLabel, OrbitLabel), Q> = BTreeMap::new();
            for ((l1, l23), c) in &d.terms {
                let inner = bim.delta_tilde(&GradedVector::basis(l23.clone()))?;
                for ((l2, l3), c2) in &inner.terms {
                    *rhs.entry((l1.clone(), l2.clone(), l3.clone())).or_insert_with(Q::zero) +=
                        c * c2;
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            if lhs != rhs {
                failures.push(format!("comodule law at {lb}"));
            }
        }
    }

    // (b) module law for the action, and action grading
    for da in 0..=maxdeg {
        for dap in 0..=maxdeg - da {
            for db in 0..=maxdeg - da - dap {
                for la in &a_bases[da] {
                    for lap in &a_bases[dap] {
                        for lb in &b_bases[db] {
                            let a = GradedVector::basis(la.clone());
                            let ap = GradedVector::basis(lap.clone());
                            let b = GradedVector::basis(lb.clone());
                            let lhs = bim.act(&bim.gl.mult(&a, &ap)?, &b)?;
                            let rhs = bim.act(&a, &bim.act(&ap, &b)?)?;
                            if lhs != rhs {
                                failures.push(format!("module law at ({la}, {lap}, {lb})"));
                            }
                            for (l, _) in &lhs.terms {
                                if l.size() / 2 != da + dap + db {
                                    failures.push(format!("action grading at ({la}, {lap}, {lb})"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // (d) the twisted diagram, plus the untwisted counterexample search
    let mut untwisted_counterexample = None;
    for da in 0..=maxdeg {
        for db in 0..=maxdeg - da {
            for la in &a_bases[da] {
                for lb in &b_bases[db] {
                    let a = GradedVector::basis(la.clone());
                    let b = GradedVector::basis(lb.clone());
                    let lhs = bim.delta_tilde(&bim.act(&a, &b)?)?;
                    let rhs = bim.odot(&a, &bim.delta_tilde(&b)?)?;
                    if lhs != rhs {
                        failures.push(format!("twisted diagram at ({la}, {lb})"));
                    }
                    if untwisted_counterexample.is_none() {
                        // untwisted candidate: sum (a_(1) a') x (a_(2) . b)
                        let da_t = bim.gl.delta(&a)?;
                        let dtb = bim.delta_tilde(&b)?;
                        let mut untwisted = TensorVector::zero();
                        for ((a1, a2), c1) in &da_t.terms {
                            for ((ap, bp), c2) in &dtb.terms {
                                let left = bim.gl.mult(
                                    &GradedVector::basis(a1.clone()),
                                    &GradedVector::basis(ap.clone()),
                                )?;
                                let right = bim.act(
                                    &GradedVector::basis(a2.clone()),
                                    &GradedVector::basis(bp.clone()),
                                )?;
                                untwisted = untwisted
                                    .add(&TensorVector::tensor(&left, &right).scale(&(c1 * c2)));
                            }
                        }
                        if untwisted != lhs {
                            untwisted_counterexample =
                                Some(format!("untwisted coaction diagram fails at ({la}, {lb})"));
                        }
                    }
                }
            }
        }
    }

    // module law of the twisted action on the mixed tensor space
    for da in 0..=maxdeg {
        for dap in 0..=maxdeg - da {
            for dx in 0..=maxdeg - da - dap {
                for dxa in 0..=dx {
                    let dxb = dx - dxa;
                    for la in &a_bases[da] {
                        for lap in &a_bases[dap] {
                            for lxa in &a_bases[dxa] {
                                for lxb in &b_bases[dxb] {
                                    let a = GradedVector::basis(la.clone());
                                    let ap = GradedVector::basis(lap.clone());
                                    let x = TensorVector::basis(lxa.clone(), lxb.clone());
                                    let lhs = bim.odot(&a, &bim.odot(&ap, &x)?)?;
                                    let rhs = bim.odot(&bim.gl.mult(&a, &ap)?, &x)?;
                                    if lhs != rhs {
                                        failures.push(format!(
                                            "twisted-action module law at ({la}, {lap}, {lxa} x {lxb})"
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(AxiomReport {
        check: "twisted".into(),
        q,
        maxdeg,
        failures,
        untwisted_counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;
    use crate::ratio::q_int;

    fn nilp(parts: &[u32]) -> OrbitLabel {
        OrbitLabel::gl_nilpotent(Partition::new(parts.to_vec()))
    }

    fn unilp(parts: &[u32]) -> OrbitLabel {
        OrbitLabel::u_nilpotent(Partition::new(parts.to_vec()))
    }

    #[test]
    fn nabla_worked_example() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let alg = GlAlgebra::new(f3);
        let x1 = GradedVector::basis(alg.x1_label());
        let prod = alg.mult(&x1, &x1).unwrap();
        assert_eq!(prod.terms[&nilp(&[1, 1])], q_int(4));
        assert_eq!(prod.terms[&nilp(&[2])], q_int(1));
        // unit law
        let one = GradedVector::basis(alg.unit_label());
        assert_eq!(alg.mult(&one, &x1).unwrap(), x1);
    }

    #[test]
    fn delta_worked_example() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        let alg = GlAlgebra::new(f3);
        let x1 = GradedVector::basis(alg.x1_label());
        let d = alg.delta(&x1).unwrap();
        assert_eq!(d.terms.len(), 2);
        assert_eq!(d.terms[&(alg.unit_label(), alg.x1_label())], q_int(1));
        assert_eq!(d.terms[&(alg.x1_label(), alg.unit_label())], q_int(1));
    }

    #[test]
    fn delta_tilde_worked_example() {
        // Delta~(chi_{(1,1)}) = chi_empty x chi_{(1,1)} + (1/q) chi_{(1)} x chi_empty
        let f9 = FieldSpec::new(3, 2).unwrap();
        let bim = UBimodule::new(f9).unwrap();
        let b = GradedVector::basis(unilp(&[1, 1]));
        let d = bim.delta_tilde(&b).unwrap();
        assert_eq!(d.terms.len(), 2);
        assert_eq!(d.terms[&(bim.gl.unit_label(), unilp(&[1, 1]))], q_int(1));
        assert_eq!(
            d.terms[&(nilp(&[1]), bim.unit_label())],
            crate::ratio::q_ratio(1, 3)
        );
    }

    #[test]
    fn nabla_tilde_level_one() {
        // x~1 . chi~_empty = (q+1) chi~_{(1,1)} + c chi~_{(2)}, and
        // harmonicity of the zero-orbit series forces c = 1 via values
        // (checked in the harmonic module); here: induction value at 0 is
        // the transversal size q+1 and the rank-1 orbit picks up exactly 1.
        let f9 = FieldSpec::new(3, 2).unwrap();
        let bim = UBimodule::new(f9).unwrap();
        let x1 = GradedVector::basis(nilp(&[1]));
        let b0 = GradedVector::basis(bim.unit_label());
        let act = bim.act(&x1, &b0).unwrap();
        assert_eq!(act.terms[&unilp(&[1, 1])], q_int(4));
        assert_eq!(act.terms[&unilp(&[2])], q_int(1));
        // grading: only level-1 labels
        for (l, _) in &act.terms {
            assert_eq!(l.size(), 2);
        }
    }

    #[test]
    fn sweedler_triple_of_x1() {
        // (Delta x id) Delta(chi_{(1)}) = 1 x 1 x chi + 1 x chi x 1 + chi x 1 x 1
        let f9 = FieldSpec::new(3, 2).unwrap();
        let alg = GlAlgebra::new(f9);
        let triple = alg.sweedler_triple(&alg.x1_label()).unwrap();
        assert_eq!(triple.len(), 3);
        let one = alg.unit_label();
        let x1 = alg.x1_label();
        for key in [
            (one.clone(), one.clone(), x1.clone()),
            (one.clone(), x1.clone(), one.clone()),
            (x1.clone(), one.clone(), one.clone()),
        ] {
            assert_eq!(triple[&key], q_int(1));
        }
    }

    #[test]
    fn omega_fixes_nilpotents_and_is_involutive() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let alg = GlAlgebra::new(f9.clone());
        for n in 0..=2usize {
            for l in alg.basis(n).unwrap() {
                let img = alg.omega_label(&l).unwrap();
                if l.is_nilpotent() {
                    assert_eq!(img, l, "omega must fix nilpotent orbits");
                }
                assert_eq!(alg.omega_label(&img).unwrap(), l, "omega is an involution");
            }
        }
        // gl(1, F_9): {a} -> {-a^q}; a = i is fixed
        let i_label = {
            let ctx = alg.level_ctx(1);
            let reps = ctx.orbit_reps().unwrap();
            reps.iter()
                .find(|(_, r, _)| r.get(0, 0) == crate::field::Fe(3))
                .map(|(l, _, _)| l.clone())
                .unwrap()
        };
        assert_eq!(alg.omega_label(&i_label).unwrap(), i_label);
    }

    #[test]
    fn odot_degree_zero_is_identity() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let bim = UBimodule::new(f9).unwrap();
        let one = GradedVector::basis(bim.gl.unit_label());
        let x = TensorVector::basis(nilp(&[1]), bim.unit_label());
        assert_eq!(bim.odot(&one, &x).unwrap(), x);
    }

    #[test]
    fn bialgebra_axioms_q2_deg3() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let report = check_bialgebra(&f2, 3).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
    }

    #[test]
    fn twisted_axioms_deg1() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let report = check_twisted(&f9, 1).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
    }
}
