//! Positive harmonic functionals on the two towers: the cones cut out by
//! positivity on orbit indicators and invariance under multiplication by the
//! level-one zero-orbit indicator (with an optional vanishing condition off
//! nilpotent orbits), the built-in zero-orbit-supported functionals, the
//! mixing construction
//!
//!   (phi *_s psi)(b') = sum s^{deg a} (1-2s)^{deg b} phi(a) psi(b)
//!
//! over the coaction expansion of b', and the closed-form cross-check of its
//! values on the zero-orbit indicators.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bimodule::{GlAlgebra, GradedVector, UBimodule};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::graphs::{build_graph, similarity_gauge, BranchingGraph, GaugeOutcome, GraphKind};
use crate::matrix::{jordan_matrix, Matrix};
use crate::orbit::{gl_rep, u_index_cached, OrbitKind, OrbitLabel, UClass};
use crate::parabolic::{build_parabolic, par_induce_at, InvariantFn, SettingKind};
use crate::partition::Partition;
use crate::ratio::{q_from_string, q_pow, q_to_string, Q};
use crate::unitary::u_nilpotent_rep;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FnSide {
    A,
    B,
}

/// A linear functional on one tower, truncated at level N and stored by its
/// values on the orbit-indicator basis.
#[derive(Clone, PartialEq, Debug)]
pub struct Functional {
    pub side: FnSide,
    /// the defining q (for the B side, the base of F_{q^2})
    pub q: u64,
    pub n_max: usize,
    pub levels: BTreeMap<usize, BTreeMap<OrbitLabel, Q>>,
    pub provenance: Option<String>,
}

impl Functional {
    pub fn value(&self, level: usize, label: &OrbitLabel) -> Q {
        self.levels
            .get(&level)
            .and_then(|m| m.get(label))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// Evaluate on a graded vector (sum of basis coefficients times values).
    pub fn eval(&self, v: &GradedVector) -> Q {
        let mut acc = Q::zero();
        for (l, c) in &v.terms {
            let level = match self.side {
                FnSide::A => l.size(),
                FnSide::B => l.size() / 2,
            };
            acc += c * self.value(level, l);
        }
        acc
    }

    pub fn scale(&self, c: &Q) -> Functional {
        let levels = self
            .levels
            .iter()
            .map(|(n, m)| {
                (
                    *n,
                    m.iter().map(|(l, v)| (l.clone(), v * c)).collect::<BTreeMap<_, _>>(),
                )
            })
            .collect();
        Functional { levels, provenance: None, ..self.clone() }
    }
}

/// The functional on the gl tower supported on the zero orbits, normalized
/// to 1 at level 0: values prod_{i=1}^{n} (q-1)/(q^i - 1) on the indicator
/// of the zero orbit at level n. This is the unique (up to scale) functional
/// supported on zero orbits that is invariant under multiplication by the
/// level-one zero-orbit indicator.
pub fn phi_zero(field: &Arc<FieldSpec>, n_max: usize) -> Functional {
    let q = field.q();
    let mut levels = BTreeMap::new();
    let mut acc = Q::one();
    for n in 0..=n_max {
        if n > 0 {
            let denom = q_pow(q, n as i64) - Q::one();
            acc = acc * (q_pow(q, 1) - Q::one()) / denom;
        }
        let mut m = BTreeMap::new();
        m.insert(
            OrbitLabel::gl_nilpotent(Partition::new(vec![1; n])),
            acc.clone(),
        );
        levels.insert(n, m);
    }
    Functional {
        side: FnSide::A,
        q,
        n_max,
        levels,
        provenance: Some("builtin:phi0".into()),
    }
}

/// The unitary-side functional supported on the zero orbits:
/// (q^2 - 1)^n prod_{i=1}^{2n} (q^i - (-1)^i)^{-1} at level n.
pub fn psi_zero(field: &Arc<FieldSpec>, n_max: usize) -> Result<Functional> {
    let q = field
        .base_q()
        .ok_or_else(|| Error::FieldMismatch("psi0 lives over F_{q^2}".into()))?;
    if !field.is_odd() {
        return Err(Error::Unsupported("psi0 assumes odd q".into()));
    }
    let mut levels = BTreeMap::new();
    for n in 0..=n_max {
        // (q^2 - 1)^n / prod_{i=1}^{2n} (q^i - (-1)^i)
        let mut numer = Q::one();
        for _ in 0..n {
            numer *= q_pow(q, 2) - Q::one();
        }
        let mut denom = Q::one();
        for i in 1..=2 * n {
            let sign = if i % 2 == 0 { Q::one() } else { -Q::one() };
            denom *= q_pow(q, i as i64) - sign;
        }
        let val = numer / denom;
        let mut m = BTreeMap::new();
        m.insert(
            OrbitLabel::u_nilpotent(Partition::new(vec![1; 2 * n])),
            val,
        );
        levels.insert(n, m);
    }
    Ok(Functional {
        side: FnSide::B,
        q,
        n_max,
        levels,
        provenance: Some("builtin:psi0".into()),
    })
}

// ---------------------------------------------------------------------------
// Cone membership.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cone {
    /// positivity + harmonicity on the gl tower
    F,
    /// F plus vanishing off nilpotent orbits
    F0,
    /// positivity + harmonicity on the unitary tower
    Ftilde,
    /// Ftilde plus vanishing off nilpotent orbits
    Ftilde0,
}

impl Cone {
    pub fn side(&self) -> FnSide {
        match self {
            Cone::F | Cone::F0 => FnSide::A,
            Cone::Ftilde | Cone::Ftilde0 => FnSide::B,
        }
    }

    pub fn nilpotent_only(&self) -> bool {
        matches!(self, Cone::F0 | Cone::Ftilde0)
    }

    pub fn parse(s: &str) -> Result<Cone> {
        match s {
            "F" => Ok(Cone::F),
            "F0" => Ok(Cone::F0),
            "Ftilde" => Ok(Cone::Ftilde),
            "Ftilde0" => Ok(Cone::Ftilde0),
            _ => Err(Error::Schema(format!("unknown cone '{s}'"))),
        }
    }
}

/// One of the two towers, for cone checks and mixing.
pub enum Tower<'a> {
    Gl(&'a GlAlgebra),
    U(&'a UBimodule),
}

impl<'a> Tower<'a> {
    fn field(&self) -> &Arc<FieldSpec> {
        match self {
            Tower::Gl(a) => &a.field,
            Tower::U(b) => &b.field,
        }
    }

    fn basis(&self, level: usize) -> Result<Vec<OrbitLabel>> {
        match self {
            Tower::Gl(a) => a.basis(level),
            Tower::U(b) => b.basis(level),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConeReport {
    pub cone: String,
    pub n: usize,
    /// (level, label, value) with a negative value
    pub positivity_failures: Vec<(usize, String, String)>,
    /// (level, label, value) nonzero off the nilpotent labels
    pub nilpotency_failures: Vec<(usize, String, String)>,
    /// (level, label, lhs, rhs) with phi(chi) != phi(nabla(x1 (x) chi))
    pub harmonicity_failures: Vec<(usize, String, String, String)>,
}

impl ConeReport {
    pub fn passed(&self) -> bool {
        self.positivity_failures.is_empty()
            && self.nilpotency_failures.is_empty()
            && self.harmonicity_failures.is_empty()
    }
}

/// A matrix representative for a label, without a full ambient table:
/// constructive for nilpotent and general gl labels; table-resolved for
/// general unitary labels.
fn rep_for_label(label: &OrbitLabel, field: &Arc<FieldSpec>) -> Result<Matrix> {
    match label {
        OrbitLabel::Gl { .. } => gl_rep(label, field),
        OrbitLabel::U { two_n, class } => match class {
            UClass::Nilpotent(p) => {
                if *two_n == 0 {
                    Ok(Matrix::zero(0, 0, field.clone()))
                } else {
                    u_nilpotent_rep(p, field)
                }
            }
            UClass::General { rep_index } => {
                let idx = u_index_cached(field, *two_n)?;
                Ok(idx.orbits.space.unpack(*rep_index))
            }
        },
    }
}

/// Verify cone membership of a functional through level n: positivity on
/// all basis indicators, vanishing off nilpotent orbits for the nilpotent
/// cones, and the harmonicity identity on every basis element of each level
/// below n. The harmonicity side is evaluated on the support of the
/// functional only, which keeps the check cheap for sparse functionals.
pub fn cone_check(f: &Functional, cone: Cone, n: usize, tower: &Tower) -> Result<ConeReport> {
    if cone.side() != f.side {
        return Err(Error::Schema("cone and functional sides differ".into()));
    }
    if n > f.n_max {
        return Err(Error::Infeasible(format!(
            "functional is truncated at level {}, cone check needs {n}",
            f.n_max
        )));
    }
    let field = tower.field();
    let mut report = ConeReport {
        cone: format!("{cone:?}"),
        n,
        positivity_failures: Vec::new(),
        nilpotency_failures: Vec::new(),
        harmonicity_failures: Vec::new(),
    };
    // positivity and nilpotency on the stored values
    for (&level, values) in f.levels.iter().filter(|(l, _)| **l <= n) {
        for (label, v) in values {
            if v.is_negative() {
                report
                    .positivity_failures
                    .push((level, label.to_string(), q_to_string(v)));
            }
            if cone.nilpotent_only() && !label.is_nilpotent() && !v.is_zero() {
                report
                    .nilpotency_failures
                    .push((level, label.to_string(), q_to_string(v)));
            }
        }
    }
    // harmonicity: phi(chi_b) = phi(nabla(x1 (x) chi_b)) for all basis b of
    // levels < n; the right side is expanded over the support of phi at the
    // next level.
    let kind = match f.side {
        FnSide::A => SettingKind::Gl,
        FnSide::B => SettingKind::U,
    };
    let x1 = OrbitLabel::gl_nilpotent(Partition::new(vec![1]));
    for level in 0..n {
        let basis = tower.basis(level)?;
        // support of phi at level + 1, with representatives
        let support: Vec<(OrbitLabel, Matrix)> = f
            .levels
            .get(&(level + 1))
            .map(|m| {
                m.iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(l, _)| Ok((l.clone(), rep_for_label(l, field)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?
            .unwrap_or_default();
        let p = build_parabolic(kind, field, 1, level)?;
        for b in basis {
            let lhs = f.value(level, &b);
            let phi_levi = InvariantFn::levi_indicator(kind, 1, level, x1.clone(), b.clone());
            let induced = par_induce_at(&phi_levi, &p, &support)?;
            let mut rhs = Q::zero();
            for (l, v) in &induced {
                rhs += v * f.value(level + 1, l);
            }
            if lhs != rhs {
                report.harmonicity_failures.push((
                    level,
                    b.to_string(),
                    q_to_string(&lhs),
                    q_to_string(&rhs),
                ));
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Mixing.
// ---------------------------------------------------------------------------

/// The mixing construction: from a functional on the gl tower over F_{q^2}
/// and one on the unitary tower, produce a new unitary-tower functional by
/// weighting the coaction expansion with s^{deg a} (1 - 2s)^{deg b}
/// (0^0 = 1). Defined through the truncation level of psi, capped by the
/// feasibility of the coaction.
pub fn mix(phi: &Functional, psi: &Functional, s: &Q, bim: &UBimodule) -> Result<Functional> {
    if phi.side != FnSide::A || psi.side != FnSide::B {
        return Err(Error::Schema("mix needs an A-side and a B-side functional".into()));
    }
    if phi.q != psi.q * psi.q {
        return Err(Error::Schema(format!(
            "mix needs the gl tower over F_{{q^2}}: got q = {} and q^2 side {}",
            psi.q, phi.q
        )));
    }
    let n_max = phi.n_max.min(psi.n_max);
    let one_minus_2s = Q::one() - s - s;
    let mut levels: BTreeMap<usize, BTreeMap<OrbitLabel, Q>> = BTreeMap::new();
    for level in 0..=n_max {
        let mut m = BTreeMap::new();
        for bp in bim.basis(level)? {
            let expansion = bim.delta_tilde(&GradedVector::basis(bp.clone()))?;
            let mut acc = Q::zero();
            for ((la, lb), c) in &expansion.terms {
                let (deg_a, deg_b) = (la.size(), lb.size() / 2);
                let pa = phi.value(deg_a, la);
                if pa.is_zero() {
                    continue;
                }
                let pb = psi.value(deg_b, lb);
                if pb.is_zero() {
                    continue;
                }
                // 0^0 = 1 convention: empty products for degree 0
                let mut w = c.clone();
                for _ in 0..deg_a {
                    w *= s;
                }
                for _ in 0..deg_b {
                    w *= &one_minus_2s;
                }
                acc += w * pa * pb;
            }
            if !acc.is_zero() {
                m.insert(bp, acc);
            }
        }
        levels.insert(level, m);
    }
    Ok(Functional {
        side: FnSide::B,
        q: psi.q,
        n_max,
        levels,
        provenance: None,
    })
}

#[derive(Debug, Serialize)]
pub struct ClosedFormReport {
    pub s: String,
    pub q: u64,
    pub nmax: usize,
    /// (n, mixed value, closed form)
    pub rows: Vec<(usize, String, String)>,
}

impl ClosedFormReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|(_, a, b)| a == b)
    }
}

/// Compare the mixed functional phi *_s psi0 against the closed form
///   sum_{m=0}^{n} q^{3m^2 - 4mn} (q^2-1)^{n-m}
///     prod_{i=1}^{2n-2m} (q^i - (-1)^i)^{-1} s^m (1-2s)^{n-m} phi(chi_{1^m})
/// on the zero-orbit indicators, for n <= nmax.
pub fn mix_closed_form_check(
    phi: &Functional,
    s: &Q,
    nmax: usize,
    bim: &UBimodule,
) -> Result<ClosedFormReport> {
    let q = bim.q();
    let psi0 = psi_zero(&bim.field, nmax)?;
    let mixed = mix(phi, &psi0, s, bim)?;
    let one_minus_2s = Q::one() - s - s;
    let mut rows = Vec::new();
    for n in 0..=nmax {
        let label = OrbitLabel::u_nilpotent(Partition::new(vec![1; 2 * n]));
        let mixed_val = mixed.value(n, &label);
        let mut closed = Q::zero();
        for m in 0..=n {
            let mut term = q_pow(q, 3 * (m as i64) * (m as i64) - 4 * (m as i64) * (n as i64));
            for _ in 0..n - m {
                term *= q_pow(q, 2) - Q::one();
            }
            for i in 1..=(2 * n - 2 * m) {
                let sign = if i % 2 == 0 { Q::one() } else { -Q::one() };
                term /= q_pow(q, i as i64) - sign;
            }
            for _ in 0..m {
                term *= s;
            }
            for _ in 0..n - m {
                term *= &one_minus_2s;
            }
            term *= phi.value(m, &OrbitLabel::gl_nilpotent(Partition::new(vec![1; m])));
            closed += term;
        }
        rows.push((n, q_to_string(&mixed_val), q_to_string(&closed)));
    }
    Ok(ClosedFormReport { s: q_to_string(s), q, nmax, rows })
}

// ---------------------------------------------------------------------------
// The numerically derived gauge between graph harmonicity and functional
// harmonicity.
// ---------------------------------------------------------------------------

/// Per-partition positive constants c with
///   M(lambda, mu) c_lambda = W(lambda, mu) c_mu
/// on all edges, where M is the nilpotent block of the multiplication by the
/// level-one zero-orbit indicator, and W the bordered-count edge weights.
/// A functional F on the graph then corresponds to phi(chi_lambda) =
/// c_lambda F(lambda), turning graph harmonicity into the functional
/// identity.
pub fn functional_graph_gauge(
    tower: &Tower,
    levels: usize,
) -> Result<BTreeMap<Partition, Q>> {
    let field = tower.field();
    let (kind, graph_kind) = match tower {
        Tower::Gl(_) => (SettingKind::Gl, GraphKind::Glb0),
        Tower::U(_) => (SettingKind::U, GraphKind::Ub0),
    };
    let graph = build_graph(graph_kind, field, levels, None)?;
    // nilpotent block of the x1-multiplication, as a graph
    let x1 = OrbitLabel::gl_nilpotent(Partition::new(vec![1]));
    let mut m_weights: BTreeMap<(Partition, Partition), Q> = BTreeMap::new();
    for n in 0..levels {
        let p = build_parabolic(kind, field, 1, n)?;
        let points: Result<Vec<(OrbitLabel, Matrix)>> = graph.vertices[n + 1]
            .iter()
            .map(|lam| {
                let label = match kind {
                    SettingKind::Gl => OrbitLabel::gl_nilpotent(lam.clone()),
                    SettingKind::U => OrbitLabel::u_nilpotent(lam.clone()),
                };
                let rep = rep_for_label(&label, field)?;
                Ok((label, rep))
            })
            .collect();
        let points = points?;
        for mu in &graph.vertices[n] {
            let mu_label = match kind {
                SettingKind::Gl => OrbitLabel::gl_nilpotent(mu.clone()),
                SettingKind::U => OrbitLabel::u_nilpotent(mu.clone()),
            };
            let phi = InvariantFn::levi_indicator(kind, 1, n, x1.clone(), mu_label);
            let vals = par_induce_at(&phi, &p, &points)?;
            for (label, v) in vals {
                if let Some(lam) = label.nilpotent_partition() {
                    m_weights.insert((mu.clone(), lam.clone()), v);
                }
            }
        }
    }
    let m_graph = BranchingGraph {
        kind: graph.kind,
        q: graph.q,
        levels,
        vertices: graph.vertices.clone(),
        weights: m_weights,
    };
    match similarity_gauge(&graph, &m_graph) {
        // tau_graph = tau_M f(mu)/f(lambda) means W c_mu^{-1}-style; the
        // propagated f satisfies W(lambda, mu) = M(lambda, mu) f(mu)/f(lambda),
        // so c_lambda := f(lambda)^{-1} gives M c_lambda = W c_mu ... with
        // c = 1/f.
        GaugeOutcome::Found(f) => Ok(f
            .into_iter()
            .map(|(k, v)| (k, Q::one() / v))
            .collect()),
        GaugeOutcome::Failed { reason } => Err(Error::Internal(format!(
            "no gauge between the edge counts and the induction matrix: {reason}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Thoma-type parameter labels for user-supplied functionals.
// ---------------------------------------------------------------------------

/// A point of the deformed simplex: nonincreasing nonnegative alpha and
/// beta with sum alpha + (1 - q^{-2})^{-1} sum beta <= 1. Used only as a
/// provenance label for loaded functional tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThomaPoint {
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
}

impl ThomaPoint {
    pub fn validate(&self, q: u64) -> Result<()> {
        let parse = |v: &[String]| -> Result<Vec<Q>> {
            v.iter().map(|s| q_from_string(s)).collect()
        };
        let alpha = parse(&self.alpha)?;
        let beta = parse(&self.beta)?;
        for seq in [&alpha, &beta] {
            for w in seq.windows(2) {
                if w[0] < w[1] {
                    return Err(Error::Schema("Thoma coordinates must be nonincreasing".into()));
                }
            }
            if seq.iter().any(|x| x.is_negative()) {
                return Err(Error::Schema("Thoma coordinates must be nonnegative".into()));
            }
        }
        let sa: Q = alpha.iter().cloned().sum();
        let sb: Q = beta.iter().cloned().sum();
        let slack_factor = Q::one() / (Q::one() - q_pow(q, -2));
        if sa + slack_factor * sb > Q::one() {
            return Err(Error::Schema("Thoma constraint violated".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Functional file format.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FunctionalLevelJson {
    n: usize,
    values: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct FunctionalJson {
    schema: String,
    side: String,
    q: u64,
    #[serde(rename = "N")]
    n_max: usize,
    levels: Vec<FunctionalLevelJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    thoma: Option<ThomaPoint>,
}

/// Serialize to the functional file schema:
/// {"side":"B","q":3,"N":2,"levels":[{"n":0,"values":{"nilp:[]":"1"}},...]}.
pub fn functional_to_json(f: &Functional) -> serde_json::Value {
    let levels = f
        .levels
        .iter()
        .map(|(n, values)| FunctionalLevelJson {
            n: *n,
            values: values
                .iter()
                .map(|(l, v)| (l.to_string(), q_to_string(v)))
                .collect(),
        })
        .collect();
    serde_json::to_value(FunctionalJson {
        schema: "functional/1".into(),
        side: match f.side {
            FnSide::A => "A".into(),
            FnSide::B => "B".into(),
        },
        q: f.q,
        n_max: f.n_max,
        levels,
        thoma: None,
    })
    .expect("serializable")
}

/// Load a functional table. The declared truncation must be covered by
/// explicit levels 0..=N (level gaps are rejected); labels must parse in the
/// declared side. Cone membership is not assumed.
pub fn functional_from_json(doc: &serde_json::Value) -> Result<Functional> {
    let parsed: FunctionalJson = serde_json::from_value(doc.clone())
        .map_err(|e| Error::Schema(format!("functional file: {e}")))?;
    let side = match parsed.side.as_str() {
        "A" => FnSide::A,
        "B" => FnSide::B,
        other => return Err(Error::Schema(format!("unknown side '{other}'"))),
    };
    if let Some(thoma) = &parsed.thoma {
        thoma.validate(parsed.q)?;
    }
    let mut levels: BTreeMap<usize, BTreeMap<OrbitLabel, Q>> = BTreeMap::new();
    for lvl in &parsed.levels {
        let mut m = BTreeMap::new();
        for (ls, vs) in &lvl.values {
            let (kind, size) = match side {
                FnSide::A => (OrbitKind::Gl, lvl.n),
                FnSide::B => (OrbitKind::U, 2 * lvl.n),
            };
            let label = OrbitLabel::parse(ls, kind, size)?;
            m.insert(label, q_from_string(vs)?);
        }
        if levels.insert(lvl.n, m).is_some() {
            return Err(Error::Schema(format!("duplicate level {}", lvl.n)));
        }
    }
    for n in 0..=parsed.n_max {
        if !levels.contains_key(&n) {
            return Err(Error::Schema(format!(
                "level {n} missing while N = {} is declared",
                parsed.n_max
            )));
        }
    }
    Ok(Functional {
        side,
        q: parsed.q,
        n_max: parsed.n_max,
        levels,
        provenance: None,
    })
}

/// Convenience for tests and the CLI: a zero-orbit representative matrix for
/// the label at a level (jordan form for gl, standardized form for u).
pub fn zero_orbit_rep(side: FnSide, field: &Arc<FieldSpec>, level: usize) -> Result<Matrix> {
    match side {
        FnSide::A => Ok(jordan_matrix(
            &Partition::new(vec![1; level]),
            field.clone(),
        )),
        FnSide::B => {
            if level == 0 {
                Ok(Matrix::zero(0, 0, field.clone()))
            } else {
                u_nilpotent_rep(&Partition::new(vec![1; 2 * level]), field)
            }
        }
    }
}
