//! Adjoint-orbit classification and enumeration for gl(n, F_q) under
//! GL(n, F_q) and u(2n, F_{q^2}) under U(2n, F_{q^2}), plus the two
//! bordered-matrix edge counts:
//!
//! - L(lambda, mu): the number of border vectors x making [[X_mu, x], [0, 0]]
//!   land in the nilpotent orbit lambda;
//! - K(lambda, mu): the number of pairs (x, y), y^q = -y, making the
//!   unitary bordered matrix land in the nilpotent orbit lambda.
//!
//! GL orbits are labeled by rational-canonical data: the characteristic
//! polynomial factored into monic irreducibles, with a partition per factor
//! recovered from rank sequences. Nilpotent unitary orbits are labeled by
//! their Jordan type (the type determines the unitary orbit); general
//! unitary orbits carry the minimal packed coordinate index of the orbit,
//! resolved against an exhaustively enumerated table.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{BigUint, One};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec};
use crate::fqpoly::{self, FqPoly};
use crate::matrix::{jordan_matrix, jordan_type, membership, Matrix, SpaceKind};
use crate::partition::Partition;
use crate::unitary::{enumerate_u_orbits, u_nilpotent_rep, UOrbits};

/// GL orbit data: nilpotent types get the bare partition; everything else
/// gets the factored characteristic polynomial with a partition per factor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GlClass {
    Nilpotent(Partition),
    /// Factors sorted by (degree, coefficient order); partitions record the
    /// generalized Jordan structure of each primary component.
    General(Vec<(FqPoly, Partition)>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum UClass {
    Nilpotent(Partition),
    /// Minimal packed coordinate index of the orbit in the exhaustive table.
    General { rep_index: u64 },
}

/// Canonical name of an adjoint orbit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum OrbitLabel {
    Gl { n: usize, class: GlClass },
    U { two_n: usize, class: UClass },
}

impl OrbitLabel {
    pub fn gl_nilpotent(lambda: Partition) -> OrbitLabel {
        OrbitLabel::Gl { n: lambda.size() as usize, class: GlClass::Nilpotent(lambda) }
    }

    pub fn u_nilpotent(lambda: Partition) -> OrbitLabel {
        OrbitLabel::U { two_n: lambda.size() as usize, class: UClass::Nilpotent(lambda) }
    }

    pub fn is_nilpotent(&self) -> bool {
        matches!(
            self,
            OrbitLabel::Gl { class: GlClass::Nilpotent(_), .. }
                | OrbitLabel::U { class: UClass::Nilpotent(_), .. }
        )
    }

    pub fn nilpotent_partition(&self) -> Option<&Partition> {
        match self {
            OrbitLabel::Gl { class: GlClass::Nilpotent(p), .. } => Some(p),
            OrbitLabel::U { class: UClass::Nilpotent(p), .. } => Some(p),
            _ => None,
        }
    }

    /// Matrix size (n for gl(n), 2n for u(2n)).
    pub fn size(&self) -> usize {
        match self {
            OrbitLabel::Gl { n, .. } => *n,
            OrbitLabel::U { two_n, .. } => *two_n,
        }
    }
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitLabel::Gl { class: GlClass::Nilpotent(p), .. }
            | OrbitLabel::U { class: UClass::Nilpotent(p), .. } => write!(f, "nilp:{p}"),
            OrbitLabel::Gl { class: GlClass::General(factors), .. } => {
                write!(f, "gen:")?;
                for (k, (poly, part)) in factors.iter().enumerate() {
                    if k > 0 {
                        write!(f, ";")?;
                    }
                    let coeffs: Vec<String> = poly.iter().map(|c| c.0.to_string()).collect();
                    write!(f, "{}:{part}", coeffs.join(","))?;
                }
                Ok(())
            }
            OrbitLabel::U { class: UClass::General { rep_index }, .. } => {
                write!(f, "uidx:{rep_index}")
            }
        }
    }
}

impl OrbitLabel {
    /// Parse a label string in the context of a known kind and size.
    pub fn parse(s: &str, kind: OrbitKind, size: usize) -> Result<OrbitLabel> {
        let bad = || Error::Schema(format!("bad orbit label '{s}'"));
        if let Some(rest) = s.strip_prefix("nilp:") {
            let p: Partition = rest.parse().map_err(|_| bad())?;
            if p.size() as usize != size {
                return Err(Error::Schema(format!(
                    "label '{s}' has size {} but the level needs {size}",
                    p.size()
                )));
            }
            return Ok(match kind {
                OrbitKind::Gl => OrbitLabel::Gl { n: size, class: GlClass::Nilpotent(p) },
                OrbitKind::U => OrbitLabel::U { two_n: size, class: UClass::Nilpotent(p) },
            });
        }
        if let Some(rest) = s.strip_prefix("gen:") {
            if kind != OrbitKind::Gl {
                return Err(bad());
            }
            let mut factors = Vec::new();
            for chunk in rest.split(';') {
                let (coeffs, part) = chunk.rsplit_once(':').ok_or_else(bad)?;
                let poly: std::result::Result<FqPoly, _> = coeffs
                    .split(',')
                    .map(|c| c.trim().parse::<u8>().map(Fe))
                    .collect();
                let part: Partition = part.parse().map_err(|_| bad())?;
                factors.push((poly.map_err(|_| bad())?, part));
            }
            return Ok(OrbitLabel::Gl { n: size, class: GlClass::General(factors) });
        }
        if let Some(rest) = s.strip_prefix("uidx:") {
            if kind != OrbitKind::U {
                return Err(bad());
            }
            let rep_index: u64 = rest.parse().map_err(|_| bad())?;
            return Ok(OrbitLabel::U { two_n: size, class: UClass::General { rep_index } });
        }
        Err(bad())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OrbitKind {
    Gl,
    U,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TableMode {
    Exhaustive,
    NilpotentOnly,
}

impl TableMode {
    pub fn name(&self) -> &'static str {
        match self {
            TableMode::Exhaustive => "exhaustive",
            TableMode::NilpotentOnly => "nilpotent",
        }
    }

    pub fn parse(s: &str) -> Result<TableMode> {
        match s {
            "exhaustive" => Ok(TableMode::Exhaustive),
            "nilpotent" => Ok(TableMode::NilpotentOnly),
            _ => Err(Error::Schema(format!("unknown table mode '{s}'"))),
        }
    }
}

pub struct OrbitEntry {
    pub label: OrbitLabel,
    pub size: BigUint,
    pub rep: Matrix,
}

pub struct OrbitTable {
    pub kind: OrbitKind,
    pub field: Arc<FieldSpec>,
    /// Matrix size: n for gl, 2n for u.
    pub n: usize,
    pub mode: TableMode,
    pub entries: Vec<OrbitEntry>,
}

impl OrbitTable {
    pub fn labels(&self) -> Vec<OrbitLabel> {
        self.entries.iter().map(|e| e.label.clone()).collect()
    }

    pub fn entry(&self, label: &OrbitLabel) -> Option<&OrbitEntry> {
        self.entries.iter().find(|e| &e.label == label)
    }

    /// {"schema":"orbit-table/1","kind":"gl","q":3,...,"orbits":[{"label":..,
    /// "size":..,"rep":[[entry indices]]}]}. Matrix entries are the canonical
    /// field indices (coefficient vectors in base p under the pinned
    /// modulus), so prime-field entries read as plain residues.
    pub fn to_json(&self) -> serde_json::Value {
        let orbits: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                let rep: Vec<Vec<u64>> = (0..e.rep.rows())
                    .map(|r| (0..e.rep.cols()).map(|c| e.rep.get(r, c).0 as u64).collect())
                    .collect();
                serde_json::json!({
                    "label": e.label.to_string(),
                    "size": e.size.to_string(),
                    "rep": rep,
                })
            })
            .collect();
        serde_json::json!({
            "schema": "orbit-table/1",
            "kind": match self.kind { OrbitKind::Gl => "gl", OrbitKind::U => "u" },
            "q": self.field.q(),
            "p": self.field.p(),
            "e": self.field.e(),
            "n": self.n,
            "mode": self.mode.name(),
            "orbits": orbits,
        })
    }
}

// ---------------------------------------------------------------------------
// GL classification.
// ---------------------------------------------------------------------------

type FactorCache = Mutex<HashMap<(u64, Vec<u8>, FqPoly), Arc<Vec<(FqPoly, u32)>>>>;

fn factor_cache() -> &'static FactorCache {
    static CACHE: OnceLock<FactorCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn factor_char_poly(field: &Arc<FieldSpec>, poly: &FqPoly) -> Result<Arc<Vec<(FqPoly, u32)>>> {
    let key = (field.q(), field.modulus().to_vec(), poly.clone());
    if let Some(hit) = factor_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let factors = Arc::new(fqpoly::factor_monic(field, poly)?);
    factor_cache().lock().unwrap().insert(key, factors.clone());
    Ok(factors)
}

/// Classify X in gl(n, F_q) under GL(n, F_q)-conjugation: characteristic
/// polynomial factorization plus the partition of generalized Jordan block
/// sizes per irreducible factor, from the rank sequence of f(X)^k.
pub fn classify_gl(x: &Matrix) -> Result<OrbitLabel> {
    if !x.is_square() {
        return Err(Error::Dimension("classify of non-square matrix".into()));
    }
    let n = x.rows();
    let field = x.field().clone();
    if n == 0 {
        return Ok(OrbitLabel::gl_nilpotent(Partition::empty()));
    }
    let cp = crate::matrix::char_poly(x)?;
    // nilpotent <=> char poly = x^n
    if cp.iter().take(n).all(|c| c.is_zero()) {
        return Ok(OrbitLabel::Gl { n, class: GlClass::Nilpotent(jordan_type(x)?) });
    }
    let factors = factor_char_poly(&field, &cp)?;
    let mut out = Vec::with_capacity(factors.len());
    for (f_poly, mult) in factors.iter() {
        let d = f_poly.len() - 1;
        let fx = fqpoly::eval_matrix(f_poly, x)?;
        // nullity jumps of fx^k, divided by deg f, give the conjugate partition
        let mut ranks = vec![n];
        let mut power = fx.clone();
        for _ in 1..=*mult {
            ranks.push(power.rank());
            power = power.mul(&fx)?;
        }
        let conj: Vec<u32> = ranks
            .windows(2)
            .map(|w| {
                debug_assert_eq!((w[0] - w[1]) % d, 0);
                ((w[0] - w[1]) / d) as u32
            })
            .collect();
        let part = Partition::new(conj).conjugate();
        debug_assert_eq!(part.size(), *mult);
        out.push((f_poly.clone(), part));
    }
    Ok(OrbitLabel::Gl { n, class: GlClass::General(out) })
}

/// Canonical representative of a GL orbit label: a direct sum of companion
/// matrices of f^{part} over the factors.
pub fn gl_rep(label: &OrbitLabel, field: &Arc<FieldSpec>) -> Result<Matrix> {
    match label {
        OrbitLabel::Gl { class: GlClass::Nilpotent(p), .. } => Ok(jordan_matrix(p, field.clone())),
        OrbitLabel::Gl { class: GlClass::General(factors), .. } => {
            let mut blocks = Vec::new();
            for (f_poly, part) in factors {
                for &k in part.parts() {
                    let mut power: FqPoly = vec![Fe::ONE];
                    for _ in 0..k {
                        power = fqpoly::mul(field, &power, f_poly);
                    }
                    blocks.push(fqpoly::companion(field.clone(), &power));
                }
            }
            let refs: Vec<&Matrix> = blocks.iter().collect();
            Ok(Matrix::direct_sum(field.clone(), &refs))
        }
        _ => Err(Error::Internal("gl_rep of a unitary label".into())),
    }
}

// ---------------------------------------------------------------------------
// Exact orbit sizes.
// ---------------------------------------------------------------------------

/// |GL(n, q)| = prod_{i=0}^{n-1} (q^n - q^i).
pub fn gl_group_order(q: u64, n: usize) -> BigUint {
    let qb = BigUint::from(q);
    let qn = qb.pow(n as u32);
    let mut acc = BigUint::one();
    for i in 0..n {
        acc *= &qn - qb.pow(i as u32);
    }
    acc
}

/// |U(m, q)| = q^{m(m-1)/2} prod_{i=1}^{m} (q^i - (-1)^i).
pub fn u_group_order(q: u64, m: usize) -> BigUint {
    let qb = BigInt::from(q);
    let mut acc: BigInt = qb.pow((m * m.saturating_sub(1) / 2) as u32);
    for i in 1..=m as u32 {
        let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        acc *= qb.pow(i) - sign;
    }
    acc.to_biguint().expect("group order is positive")
}

/// Centralizer order of a nilpotent of type lambda in GL(n, q):
/// q^{sum lambda'_i^2} prod_i prod_{j=1}^{m_i} (1 - q^{-j}).
fn gl_nilpotent_centralizer(q: u64, lambda: &Partition) -> BigUint {
    let conj = lambda.conjugate();
    let exp: u64 = conj.parts().iter().map(|&c| (c as u64) * (c as u64)).sum();
    let mut acc = BigRational::from_integer(BigInt::from(q).pow(exp as u32));
    let max = lambda.parts().first().copied().unwrap_or(0);
    for i in 1..=max {
        let m = lambda.mult_count(i);
        for j in 1..=m {
            let denom = BigRational::new(BigInt::one(), BigInt::from(q).pow(j));
            acc *= BigRational::one() - denom;
        }
    }
    debug_assert!(acc.is_integer());
    acc.to_integer().to_biguint().expect("positive centralizer order")
}

/// Same with q replaced by -q (the unitary analogue); verified exhaustively
/// against closure tables at 2n <= 4 in the test suite.
fn u_nilpotent_centralizer(q: u64, lambda: &Partition) -> BigUint {
    let conj = lambda.conjugate();
    let exp: u64 = conj.parts().iter().map(|&c| (c as u64) * (c as u64)).sum();
    let mut acc = BigRational::from_integer(BigInt::from(q).pow(exp as u32));
    let minus_q_inv = BigRational::new(BigInt::one(), BigInt::from(-(q as i64)));
    let max = lambda.parts().first().copied().unwrap_or(0);
    for i in 1..=max {
        let m = lambda.mult_count(i);
        let mut pw = BigRational::one();
        for _j in 1..=m {
            pw *= &minus_q_inv;
            acc *= BigRational::one() - &pw;
        }
    }
    debug_assert!(acc.is_integer());
    acc.to_integer().to_biguint().expect("positive centralizer order")
}

/// Orbit size of the nilpotent GL orbit of type lambda in gl(n, q).
pub fn gl_nilpotent_orbit_size(q: u64, lambda: &Partition) -> BigUint {
    gl_group_order(q, lambda.size() as usize) / gl_nilpotent_centralizer(q, lambda)
}

/// Orbit size of the nilpotent unitary orbit of type lambda in u(m, q^2).
pub fn u_nilpotent_orbit_size(q: u64, lambda: &Partition) -> BigUint {
    u_group_order(q, lambda.size() as usize) / u_nilpotent_centralizer(q, lambda)
}

// ---------------------------------------------------------------------------
// Exhaustive tables.
// ---------------------------------------------------------------------------

const EXHAUSTIVE_BOUND: u64 = 100_000_000;

fn enumerate_gl_exhaustive(field: &Arc<FieldSpec>, n: usize) -> Result<OrbitTable> {
    let q = field.q();
    let total = q.checked_pow((n * n) as u32).filter(|&t| t <= EXHAUSTIVE_BOUND);
    let Some(total) = total else {
        return Err(Error::Infeasible(format!(
            "gl({n}, F_{q}) has q^(n^2) > 1e8 elements; use nilpotent mode"
        )));
    };
    // parallel classification with per-chunk maps, merged at the end
    let chunk = 1 << 16;
    let counts: HashMap<OrbitLabel, u64> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut local: HashMap<OrbitLabel, u64> = HashMap::new();
            let start = c * chunk;
            let end = (start + chunk).min(total);
            let mut x = Matrix::zero(n, n, field.clone());
            for idx in start..end {
                let mut rest = idx;
                for k in 0..n * n {
                    x.set(k / n, k % n, Fe((rest % q) as u8));
                    rest /= q;
                }
                let label = classify_gl(&x).expect("classification is total on gl");
                *local.entry(label).or_insert(0) += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let mut labels: Vec<OrbitLabel> = counts.keys().cloned().collect();
    labels.sort();
    let mut entries = Vec::with_capacity(labels.len());
    for label in labels {
        let rep = gl_rep(&label, field)?;
        debug_assert_eq!(classify_gl(&rep)?, label);
        let size = BigUint::from(counts[&label]);
        entries.push(OrbitEntry { label, size, rep });
    }
    Ok(OrbitTable { kind: OrbitKind::Gl, field: field.clone(), n, mode: TableMode::Exhaustive, entries })
}

/// Shared cache of unitary closure tables, keyed by (q^2 spec, m).
type UTableCache = Mutex<HashMap<(u64, usize), Arc<UOrbits>>>;

fn u_table_cache() -> &'static UTableCache {
    static CACHE: OnceLock<UTableCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The exhaustive unitary orbit partition for u(m, F_{q^2}); built once per
/// process and shared (the m = 4 table takes a minute or two).
pub fn u_orbits_cached(field: &Arc<FieldSpec>, m: usize) -> Result<Arc<UOrbits>> {
    let key = (field.q(), m);
    if let Some(hit) = u_table_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let orbits = Arc::new(enumerate_u_orbits(field, m)?);
    u_table_cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| orbits.clone());
    Ok(orbits)
}

/// Label an orbit of the exhaustive unitary table: Jordan type for nilpotent
/// orbits, minimal packed index otherwise.
pub fn u_orbit_label(orbits: &UOrbits, orbit: usize) -> OrbitLabel {
    let rep = orbits.rep_matrix(orbit);
    let two_n = orbits.space.m;
    if rep.is_nilpotent() {
        OrbitLabel::U { two_n, class: UClass::Nilpotent(jordan_type(&rep).unwrap()) }
    } else {
        OrbitLabel::U { two_n, class: UClass::General { rep_index: orbits.reps[orbit] } }
    }
}

fn enumerate_u_exhaustive(field: &Arc<FieldSpec>, m: usize) -> Result<OrbitTable> {
    let orbits = u_orbits_cached(field, m)?;
    let mut entries = Vec::with_capacity(orbits.orbit_count());
    for k in 0..orbits.orbit_count() {
        entries.push(OrbitEntry {
            label: u_orbit_label(&orbits, k),
            size: BigUint::from(orbits.sizes[k]),
            rep: orbits.rep_matrix(k),
        });
    }
    entries.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(OrbitTable { kind: OrbitKind::U, field: field.clone(), n: m, mode: TableMode::Exhaustive, entries })
}

/// Enumerate the adjoint orbits. Exhaustive mode scans the whole Lie
/// algebra within the feasibility bound q^{n^2} <= 1e8 (matrix size n);
/// nilpotent-only mode lists the partitions of n with formula sizes and
/// constructive representatives, up to n = 8 (gl) or 2n = 16 (u).
pub fn enumerate_orbits(
    kind: OrbitKind,
    field: &Arc<FieldSpec>,
    n: usize,
    mode: TableMode,
) -> Result<OrbitTable> {
    match (kind, mode) {
        (OrbitKind::Gl, TableMode::Exhaustive) => enumerate_gl_exhaustive(field, n),
        (OrbitKind::U, TableMode::Exhaustive) => {
            if n % 2 != 0 {
                return Err(Error::Dimension("u tables need even matrix size".into()));
            }
            enumerate_u_exhaustive(field, n)
        }
        (OrbitKind::Gl, TableMode::NilpotentOnly) => {
            if n > 8 {
                return Err(Error::Infeasible("nilpotent tables are capped at n = 8".into()));
            }
            let mut entries = Vec::new();
            for lam in Partition::all_of(n as u32) {
                entries.push(OrbitEntry {
                    label: OrbitLabel::gl_nilpotent(lam.clone()),
                    size: gl_nilpotent_orbit_size(field.q(), &lam),
                    rep: jordan_matrix(&lam, field.clone()),
                });
            }
            entries.sort_by(|a, b| a.label.cmp(&b.label));
            Ok(OrbitTable { kind, field: field.clone(), n, mode, entries })
        }
        (OrbitKind::U, TableMode::NilpotentOnly) => {
            if n % 2 != 0 {
                return Err(Error::Dimension("u tables need even matrix size".into()));
            }
            if n > 16 {
                return Err(Error::Infeasible("nilpotent tables are capped at 2n = 16".into()));
            }
            let q0 = field.base_q().ok_or_else(|| {
                Error::FieldMismatch("u tables need a quadratic extension field".into())
            })?;
            let mut entries = Vec::new();
            for lam in Partition::all_of(n as u32) {
                entries.push(OrbitEntry {
                    label: OrbitLabel::u_nilpotent(lam.clone()),
                    size: u_nilpotent_orbit_size(q0, &lam),
                    rep: u_nilpotent_rep(&lam, field)?,
                });
            }
            entries.sort_by(|a, b| a.label.cmp(&b.label));
            Ok(OrbitTable { kind, field: field.clone(), n, mode, entries })
        }
    }
}

/// Cache of exhaustive GL tables keyed by (q, n).
type GlTableCache = Mutex<HashMap<(u64, usize), Arc<OrbitTable>>>;

fn gl_table_cache() -> &'static GlTableCache {
    static CACHE: OnceLock<GlTableCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn gl_table_cached(field: &Arc<FieldSpec>, n: usize) -> Result<Arc<OrbitTable>> {
    let key = (field.q(), n);
    if let Some(hit) = gl_table_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let table = Arc::new(enumerate_gl_exhaustive(field, n)?);
    gl_table_cache().lock().unwrap().insert(key, table.clone());
    Ok(table)
}

/// Unitary orbit partition with its label list, for constant-time pointwise
/// classification.
pub struct UIndex {
    pub orbits: Arc<UOrbits>,
    pub labels: Vec<OrbitLabel>,
}

impl UIndex {
    pub fn classify(&self, x: &Matrix) -> OrbitLabel {
        self.labels[self.orbits.orbit_of(x)].clone()
    }
}

type UIndexCache = Mutex<HashMap<(u64, usize), Arc<UIndex>>>;

fn u_index_cache() -> &'static UIndexCache {
    static CACHE: OnceLock<UIndexCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn u_index_cached(field: &Arc<FieldSpec>, m: usize) -> Result<Arc<UIndex>> {
    let key = (field.q(), m);
    if let Some(hit) = u_index_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let orbits = u_orbits_cached(field, m)?;
    let labels = (0..orbits.orbit_count())
        .map(|k| u_orbit_label(&orbits, k))
        .collect();
    let idx = Arc::new(UIndex { orbits, labels });
    u_index_cache().lock().unwrap().insert(key, idx.clone());
    Ok(idx)
}

/// Classify a unitary Lie-algebra element. Nilpotent elements are labeled by
/// Jordan type at any size. Non-nilpotent elements are resolved against an
/// exhaustive table when one is supplied; without a table they are
/// unsupported at 2n >= 4.
pub fn classify_u(x: &Matrix, table: Option<&UOrbits>) -> Result<OrbitLabel> {
    if !membership(x, SpaceKind::AlgU)? {
        return Err(Error::Dimension("matrix is not in u(2n)".into()));
    }
    let two_n = x.rows();
    if two_n == 0 {
        return Ok(OrbitLabel::u_nilpotent(Partition::empty()));
    }
    if x.is_nilpotent() {
        return Ok(OrbitLabel::U { two_n, class: UClass::Nilpotent(jordan_type(x)?) });
    }
    match table {
        Some(orbits) => {
            if orbits.space.m != two_n {
                return Err(Error::Dimension("table size mismatch".into()));
            }
            Ok(u_orbit_label(orbits, orbits.orbit_of(x)))
        }
        None => {
            if two_n == 2 {
                let orbits = u_orbits_cached(x.field(), 2)?;
                Ok(u_orbit_label(&orbits, orbits.orbit_of(x)))
            } else {
                Err(Error::Unsupported(format!(
                    "general unitary orbit at size 2n = {two_n}: supply an exhaustive table"
                )))
            }
        }
    }
}

/// Classify under the stated kind (GL always; U per classify_u).
pub fn classify(x: &Matrix, kind: OrbitKind) -> Result<OrbitLabel> {
    match kind {
        OrbitKind::Gl => classify_gl(x),
        OrbitKind::U => classify_u(x, None),
    }
}

// ---------------------------------------------------------------------------
// Bordered-matrix edge counts.
// ---------------------------------------------------------------------------

/// L(lambda, mu): over all x in F_q^n, the bordered matrix
/// [[X_mu, x], [0, 0]] is nilpotent of some type; count the x landing in
/// lambda. Representative-independent.
pub fn count_l(lambda: &Partition, mu: &Partition, field: &Arc<FieldSpec>) -> Result<u64> {
    count_l_at(lambda, &jordan_matrix(mu, field.clone()), field)
}

/// Same count from an explicit representative of the orbit mu.
pub fn count_l_at(lambda: &Partition, x_mu: &Matrix, field: &Arc<FieldSpec>) -> Result<u64> {
    let n = x_mu.rows();
    if lambda.size() as usize != n + 1 {
        return Err(Error::Dimension("L needs |lambda| = |mu| + 1".into()));
    }
    let q = field.q();
    let total = q.pow(n as u32);
    let count = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut b = Matrix::zero(n + 1, n + 1, field.clone());
            b.paste(0, 0, x_mu);
            let mut rest = idx;
            for r in 0..n {
                b.set(r, n, Fe((rest % q) as u8));
                rest /= q;
            }
            u64::from(jordan_type(&b).expect("bordered matrix is nilpotent") == *lambda)
        })
        .sum();
    Ok(count)
}

/// The closed form for L(lambda, mu) at a single-box cover with the box in
/// column k: q^{n - sum_{j >= k} m_j(mu)} (1 - q^{-m_{k-1}(mu)}) for k > 1,
/// and q^{n - sum_{j >= 1} m_j(mu)} for k = 1. Zero off covers.
pub fn l_closed_form(lambda: &Partition, mu: &Partition, q: u64) -> BigUint {
    let Some(k) = Partition::cover_column(mu, lambda) else {
        return BigUint::ZERO;
    };
    let n = mu.size() as u64;
    let max = mu.parts().first().copied().unwrap_or(0);
    let tail = |from: u32| -> u64 {
        (from..=max).map(|j| mu.mult_count(j) as u64).sum()
    };
    let qb = BigUint::from(q);
    if k == 1 {
        qb.pow((n - tail(1)) as u32)
    } else {
        let hi = qb.pow((n - tail(k)) as u32);
        let lo = qb.pow((n - tail(k - 1)) as u32);
        hi - lo
    }
}

/// K(lambda, mu): over all (x, y) with x in (F_{q^2})^{2n} and y^q = -y,
/// count the unitary bordered matrices
/// [[0, -x^* J, y], [0, X_mu, x], [0, 0, 0]] landing in the nilpotent orbit
/// lambda of u(2n+2). Representative-independent.
pub fn count_k(lambda: &Partition, mu: &Partition, field: &Arc<FieldSpec>) -> Result<u64> {
    count_k_at(lambda, &u_nilpotent_rep(mu, field)?, field)
}

/// Same count from an explicit representative of the unitary orbit mu.
pub fn count_k_at(lambda: &Partition, x_mu: &Matrix, field: &Arc<FieldSpec>) -> Result<u64> {
    let two_n = x_mu.rows();
    if lambda.size() as usize != two_n + 2 {
        return Err(Error::Dimension("K needs |lambda| = |mu| + 2".into()));
    }
    let q2 = field.q();
    let twisted = field.twisted_trace_zero()?;
    let j = crate::matrix::anti_diagonal_j(two_n, field.clone());
    let total = q2.pow(two_n as u32);
    let m = two_n + 2;
    let count = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut x = Matrix::zero(two_n, 1, field.clone());
            let mut rest = idx;
            for r in 0..two_n {
                x.set(r, 0, Fe((rest % q2) as u8));
                rest /= q2;
            }
            let top = x.star().unwrap().mul(&j).unwrap().neg(); // 1 x 2n
            let mut local = 0u64;
            for &y in &twisted {
                let mut b = Matrix::zero(m, m, field.clone());
                b.paste(1, 1, x_mu);
                b.paste(0, 1, &top);
                b.set(0, m - 1, y);
                b.paste(1, m - 1, &x);
                debug_assert!(membership(&b, SpaceKind::AlgU).unwrap());
                if jordan_type(&b).expect("bordered matrix is nilpotent") == *lambda {
                    local += 1;
                }
            }
            local
        })
        .sum();
    Ok(count)
}
