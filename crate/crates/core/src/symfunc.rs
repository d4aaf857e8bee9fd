//! Hall-Littlewood symmetric functions in the Q normalization, exactly, in a
//! fixed number of variables (the stable range nvars >= degree), plus the two
//! Pieri coefficient families:
//!
//! - psi: the single-box coefficients in q_1 * Q_mu = sum psi_{lambda/mu} Q_lambda,
//!   where q_1 = (1-t) p_1; closed form 1 - t^{m_{k-1}(mu)} for a box in
//!   column k > 1, and 1 for column 1.
//! - xi: the two-box coefficients in ((1-t^2) p_2) * Qt_mu = sum xi Qt_lambda
//!   for the sign-normalized functions Qt_nu(;-t) = (-1)^{sum (i-1) nu_i} Q_nu(;-t).
//!
//! Q_lambda is built by the branching rule over horizontal strips,
//!   Q_lambda(x_1..x_n) = sum_mu phi_{lambda/mu}(t) x_n^{|lambda/mu|} Q_mu(x_1..x_{n-1}),
//! with phi_{lambda/mu}(t) = prod over columns j where m_j grew by one of
//! (1 - t^{m_j(lambda)}). Basis expansions go through exact triangular
//! elimination in dominance order: the monomial expansion of Q_lambda has
//! leading term b_lambda(t) m_lambda.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::ratio::{q_to_string, Q};
use crate::ratpoly::TPoly;

/// Which basis a [`SymElement`]'s coefficients refer to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisTag {
    PowerSum,
    Monomial,
    HallLittlewoodQ,
}

/// Symbolic t, or t evaluated at an exact rational.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TParam {
    Symbolic,
    Evaluated(Q),
}

impl TParam {
    pub fn rational(num: i64, den: i64) -> TParam {
        TParam::Evaluated(crate::ratio::q_ratio(num, den))
    }

    /// 1 - t^k in this parameter mode.
    fn one_minus_pow(&self, k: usize) -> TPoly {
        match self {
            TParam::Symbolic => TPoly::one_minus_t_pow(k),
            TParam::Evaluated(r) => {
                let mut p = Q::one();
                for _ in 0..k {
                    p *= r;
                }
                TPoly::constant(Q::one() - p)
            }
        }
    }

    /// Same mode with t replaced by -t.
    fn negated(&self) -> TParam {
        match self {
            TParam::Symbolic => TParam::Symbolic,
            TParam::Evaluated(r) => TParam::Evaluated(-r.clone()),
        }
    }
}

/// A finitely supported element of the symmetric-function algebra, tagged
/// with the basis its coefficients refer to.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymElement {
    pub basis: BasisTag,
    pub param: TParam,
    /// Number of variables of the underlying polynomial model (monomial
    /// basis); must be at least the degree for stable-range faithfulness.
    pub nvars: usize,
    pub coeffs: BTreeMap<Partition, TPoly>,
}

impl SymElement {
    pub fn coeff(&self, p: &Partition) -> TPoly {
        self.coeffs.get(p).cloned().unwrap_or_else(TPoly::zero)
    }

    /// Degrees present; a well-formed homogeneous element has one.
    pub fn degrees(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self.coeffs.keys().map(|p| p.size()).collect();
        ds.dedup();
        ds.sort_unstable();
        ds.dedup();
        ds
    }
}

// ---------------------------------------------------------------------------
// Dense-ish multivariate polynomials: exponent vector -> TPoly coefficient.
// Internal representation for products and symmetrization at nvars <= 8.
// ---------------------------------------------------------------------------

type Expo = Vec<u8>;

#[derive(Clone, Debug, Default)]
pub(crate) struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Expo, TPoly>,
}

impl MultiPoly {
    fn zero(nvars: usize) -> MultiPoly {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    fn constant(nvars: usize, c: TPoly) -> MultiPoly {
        let mut m = MultiPoly::zero(nvars);
        if !c.is_zero() {
            m.terms.insert(vec![0; nvars], c);
        }
        m
    }

    fn add_term(&mut self, e: Expo, c: TPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(TPoly::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            let key: Vec<Expo> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    fn scale(&self, c: &TPoly) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.mul(c))).collect(),
        }
    }

    /// Multiply by the power sum p_r = sum_i x_i^r.
    fn mul_power_sum(&self, r: u8) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            for i in 0..self.nvars {
                let mut e2 = e.clone();
                e2[i] += r;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Coefficient of the monomial with the given exponents.
    fn coeff(&self, e: &[u8]) -> TPoly {
        self.terms.get(e).cloned().unwrap_or_else(TPoly::zero)
    }

    /// Read the monomial-basis coefficients: one entry per dominant
    /// (weakly decreasing) exponent vector, keyed by partition.
    fn dominant_coeffs(&self) -> BTreeMap<Partition, TPoly> {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.windows(2).all(|w| w[0] >= w[1]) {
                let parts: Vec<u32> = e.iter().filter(|&&x| x > 0).map(|&x| x as u32).collect();
                out.insert(Partition::new(parts), c.clone());
            }
        }
        out
    }
}

/// The monomial symmetric polynomial m_lambda in nvars variables.
pub(crate) fn monomial_multipoly(lambda: &Partition, nvars: usize) -> MultiPoly {
    let mut out = MultiPoly::zero(nvars);
    if lambda.len() > nvars {
        return out;
    }
    let mut expo: Expo = lambda.parts().iter().map(|&p| p as u8).collect();
    expo.resize(nvars, 0);
    expo.sort_unstable();
    // distinct permutations via next_permutation-style enumeration
    loop {
        out.terms.insert(expo.clone(), TPoly::one());
        // next permutation in lexicographic order
        let n = expo.len();
        let mut i = n.wrapping_sub(1);
        while i > 0 && expo[i - 1] >= expo[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while expo[j] <= expo[i - 1] {
            j -= 1;
        }
        expo.swap(i - 1, j);
        expo[i..].reverse();
    }
    out
}

/// p_rho as a multivariate polynomial.
pub(crate) fn power_sum_multipoly(rho: &Partition, nvars: usize) -> MultiPoly {
    let mut acc = MultiPoly::constant(nvars, TPoly::one());
    for &r in rho.parts() {
        acc = acc.mul_power_sum(r as u8);
    }
    acc
}

/// b_lambda(t) = prod_i prod_{j=1}^{m_i(lambda)} (1 - t^j); the leading
/// monomial coefficient of Q_lambda.
pub fn b_lambda(lambda: &Partition, param: &TParam) -> TPoly {
    let mut acc = TPoly::one();
    let max = lambda.parts().first().copied().unwrap_or(0);
    for i in 1..=max {
        let m = lambda.mult_count(i) as usize;
        for j in 1..=m {
            acc = acc.mul(&param.one_minus_pow(j));
        }
    }
    acc
}

/// phi_{lambda/mu}(t) over a horizontal strip: product of (1 - t^{m_j(lambda)})
/// over the columns j where m_j(lambda) = m_j(mu) + 1 (equivalently: the strip
/// has a box in column j and none in column j+1).
fn phi_strip(lambda: &Partition, mu: &Partition, param: &TParam) -> TPoly {
    let mut acc = TPoly::one();
    let max = lambda.parts().first().copied().unwrap_or(0);
    for j in 1..=max {
        if lambda.mult_count(j) == mu.mult_count(j) + 1 {
            acc = acc.mul(&param.one_minus_pow(lambda.mult_count(j) as usize));
        }
    }
    acc
}

/// All mu such that lambda/mu is a horizontal strip (interlacing condition).
fn horizontal_strip_inners(lambda: &Partition) -> Vec<Partition> {
    let rows = lambda.len();
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn rec(lambda: &Partition, row: usize, rows: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if row == rows {
            out.push(Partition::new(cur.clone()));
            return;
        }
        let hi = lambda.part(row + 1);
        let lo = lambda.part(row + 2);
        for v in lo..=hi {
            cur.push(v);
            rec(lambda, row + 1, rows, cur, out);
            cur.pop();
        }
    }
    rec(lambda, 0, rows, &mut cur, &mut out);
    out
}

type HlKey = (Partition, usize, TParam);

fn hl_cache() -> &'static Mutex<HashMap<HlKey, Arc<MultiPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<HlKey, Arc<MultiPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Q_lambda(x_1..x_n; t) as a polynomial, by the branching rule. Memoized.
pub(crate) fn hl_q_multipoly(lambda: &Partition, param: &TParam, nvars: usize) -> Arc<MultiPoly> {
    let key = (lambda.clone(), nvars, param.clone());
    if let Some(hit) = hl_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let result = if nvars == 0 {
        if lambda.is_empty() {
            MultiPoly::constant(0, TPoly::one())
        } else {
            MultiPoly::zero(0)
        }
    } else if lambda.len() > nvars {
        MultiPoly::zero(nvars)
    } else {
        let mut acc = MultiPoly::zero(nvars);
        for mu in horizontal_strip_inners(lambda) {
            let inner = hl_q_multipoly(&mu, param, nvars - 1);
            if inner.terms.is_empty() {
                continue;
            }
            let phi = phi_strip(lambda, &mu, param);
            if phi.is_zero() {
                continue;
            }
            let deg = (lambda.size() - mu.size()) as u8;
            for (e, c) in &inner.terms {
                let mut e2 = e.clone();
                e2.push(deg);
                acc.add_term(e2, c.mul(&phi));
            }
        }
        acc
    };
    let arc = Arc::new(result);
    hl_cache().lock().unwrap().insert(key, arc.clone());
    arc
}

/// The Q-Hall-Littlewood function Q_lambda(;t) in the monomial basis of
/// nvars variables. Errors when nvars < |lambda| (unstable range).
pub fn hl_q(lambda: &Partition, param: &TParam, nvars: usize) -> Result<SymElement> {
    if nvars < lambda.size() as usize {
        return Err(Error::Infeasible(format!(
            "nvars = {nvars} is below the stable range |lambda| = {}",
            lambda.size()
        )));
    }
    let mp = hl_q_multipoly(lambda, param, nvars);
    Ok(SymElement {
        basis: BasisTag::Monomial,
        param: param.clone(),
        nvars,
        coeffs: mp.dominant_coeffs(),
    })
}

/// Qt_lambda(;-t) = (-1)^{sum (i-1) lambda_i} Q_lambda(;-t), in the monomial
/// basis. Symbolic coefficients are polynomials in t itself; the underlying
/// Hall-Littlewood parameter is -t.
pub fn hl_q_tilde(lambda: &Partition, param: &TParam, nvars: usize) -> Result<SymElement> {
    if nvars < lambda.size() as usize {
        return Err(Error::Infeasible(format!(
            "nvars = {nvars} is below the stable range |lambda| = {}",
            lambda.size()
        )));
    }
    let neg = param.negated();
    let mp = hl_q_multipoly(lambda, &neg, nvars);
    let mut coeffs = match param {
        TParam::Symbolic => {
            // computed at parameter t; substitute t -> -t
            mp.dominant_coeffs()
                .into_iter()
                .map(|(k, v)| (k, v.substitute_neg()))
                .collect()
        }
        TParam::Evaluated(_) => mp.dominant_coeffs(),
    };
    if lambda.weighted_row_sum() % 2 == 1 {
        coeffs = coeffs.into_iter().map(|(k, v)| (k, v.neg())).collect();
    }
    Ok(SymElement {
        basis: BasisTag::Monomial,
        param: param.clone(),
        nvars,
        coeffs,
    })
}

/// psi_{lambda/mu}(t), symbolically: nonzero exactly on single-box covers;
/// 1 - t^{m_{k-1}(mu)} for a box in column k > 1, and 1 for column 1.
pub fn psi_coeff(lambda: &Partition, mu: &Partition, param: &TParam) -> TPoly {
    match Partition::cover_column(mu, lambda) {
        None => TPoly::zero(),
        Some(1) => TPoly::one(),
        Some(k) => param.one_minus_pow(mu.mult_count(k - 1) as usize),
    }
}

// ---------------------------------------------------------------------------
// Basis expansion by triangular elimination.
// ---------------------------------------------------------------------------

/// Partitions of n in an order compatible with dominance: descending
/// lexicographic (lex refines dominance within a fixed size).
fn partitions_dominance_descending(n: u32) -> Vec<Partition> {
    Partition::all_of(n)
}

/// Expand a homogeneous symmetric polynomial, given in full exponent form,
/// in the basis {Q_lambda(;param)}: exact, using that the monomial expansion
/// of Q_lambda is b_lambda m_lambda + strictly dominance-lower terms.
fn expand_in_q_basis(
    f: &MultiPoly,
    degree: u32,
    param: &TParam,
    tilde_signs: bool,
) -> Result<BTreeMap<Partition, TPoly>> {
    let nvars = f.nvars;
    let mut rest = f.dominant_coeffs();
    let mut out = BTreeMap::new();
    for lambda in partitions_dominance_descending(degree) {
        if lambda.len() > nvars {
            continue;
        }
        let c = match rest.get(&lambda) {
            Some(c) if !c.is_zero() => c.clone(),
            _ => continue,
        };
        // leading coefficient of the basis element at m_lambda
        let hl_param = if tilde_signs { param.negated() } else { param.clone() };
        let mut lead = b_lambda(&lambda, &hl_param);
        let basis_elem = hl_q_multipoly(&lambda, &hl_param, nvars);
        let mut basis_coeffs = basis_elem.dominant_coeffs();
        if tilde_signs {
            if let TParam::Symbolic = param {
                basis_coeffs = basis_coeffs
                    .into_iter()
                    .map(|(k, v)| (k, v.substitute_neg()))
                    .collect();
                lead = lead.substitute_neg();
            }
            if lambda.weighted_row_sum() % 2 == 1 {
                basis_coeffs = basis_coeffs.into_iter().map(|(k, v)| (k, v.neg())).collect();
                lead = lead.neg();
            }
        }
        let coeff = c.div_exact(&lead).map_err(|_| {
            Error::Internal(format!(
                "basis solve failed: coefficient of m_{lambda} not divisible by the leading term"
            ))
        })?;
        for (mu, v) in &basis_coeffs {
            let cur = rest.entry(mu.clone()).or_insert_with(TPoly::zero);
            *cur = cur.sub(&coeff.mul(v));
        }
        if !coeff.is_zero() {
            out.insert(lambda, coeff);
        }
    }
    if rest.values().any(|v| !v.is_zero()) {
        return Err(Error::Internal("basis solve failed: nonzero residual".into()));
    }
    Ok(out)
}

/// Coefficients of f in the basis {Q_lambda(;t)}; f must be homogeneous and
/// given in the monomial basis with nvars >= degree.
pub fn expand_in_hl_q(f: &SymElement) -> Result<BTreeMap<Partition, TPoly>> {
    if f.basis != BasisTag::Monomial {
        return Err(Error::Internal("expand_in_hl_q expects the monomial basis".into()));
    }
    let degrees = f.degrees();
    if degrees.len() > 1 {
        return Err(Error::Internal("expand_in_hl_q expects a homogeneous element".into()));
    }
    let Some(&degree) = degrees.first() else {
        return Ok(BTreeMap::new());
    };
    let mp = monomial_elem_to_multipoly(f);
    expand_in_q_basis(&mp, degree, &f.param, false)
}

fn monomial_elem_to_multipoly(f: &SymElement) -> MultiPoly {
    let mut acc = MultiPoly::zero(f.nvars);
    for (p, c) in &f.coeffs {
        acc = acc.add(&monomial_multipoly(p, f.nvars).scale(c));
    }
    acc
}

/// xi_{lambda/mu}(-t): the coefficient of Qt_lambda(;-t) in
/// ((1 - t^2) p_2) * Qt_mu(;-t), computed by expanding in nvars = |lambda|
/// variables and solving the triangular change of basis.
pub fn xi_coeff_sym(lambda: &Partition, mu: &Partition, param: &TParam) -> Result<TPoly> {
    if lambda.size() != mu.size() + 2 {
        return Err(Error::Dimension(format!(
            "xi requires |lambda| = |mu| + 2, got {} and {}",
            lambda.size(),
            mu.size()
        )));
    }
    let nvars = lambda.size() as usize;
    let qt_mu = hl_q_tilde(mu, param, nvars)?;
    let mp = monomial_elem_to_multipoly(&qt_mu)
        .mul_power_sum(2)
        .scale(&param.one_minus_pow(2));
    let expansion = expand_in_q_basis(&mp, lambda.size(), param, true)?;
    Ok(expansion.get(lambda).cloned().unwrap_or_else(TPoly::zero))
}

/// xi at an evaluated rational t.
pub fn xi_coeff(lambda: &Partition, mu: &Partition, t: &Q) -> Result<Q> {
    let v = xi_coeff_sym(lambda, mu, &TParam::Evaluated(t.clone()))?;
    v.as_constant()
        .ok_or_else(|| Error::Internal("evaluated xi returned a non-constant".into()))
}

// ---------------------------------------------------------------------------
// Monomial <-> power-sum conversion.
// ---------------------------------------------------------------------------

/// Convert a (possibly inhomogeneous) monomial-basis element to the
/// power-sum basis by an exact linear solve per degree. The transition matrix
/// has integer entries; pivots are rational.
pub fn to_power_sum(f: &SymElement) -> Result<SymElement> {
    if f.basis != BasisTag::Monomial {
        return Err(Error::Internal("to_power_sum expects the monomial basis".into()));
    }
    let mut out: BTreeMap<Partition, TPoly> = BTreeMap::new();
    for degree in f.degrees() {
        if f.nvars < degree as usize {
            return Err(Error::Infeasible(format!(
                "degree {degree} cannot be resolved faithfully in {} variables",
                f.nvars
            )));
        }
        let parts = Partition::all_of(degree);
        let dim = parts.len();
        // matrix[a][r] = coefficient of m_{parts[a]} in p_{parts[r]}
        let mut mat = vec![vec![Q::zero(); dim]; dim];
        for (r, rho) in parts.iter().enumerate() {
            let mp = power_sum_multipoly(rho, degree as usize);
            for (a, alpha) in parts.iter().enumerate() {
                let mut e: Expo = alpha.parts().iter().map(|&p| p as u8).collect();
                e.resize(degree as usize, 0);
                e.sort_unstable_by(|x, y| y.cmp(x));
                let c = mp.coeff(&e).as_constant().expect("integer matrix");
                mat[a][r] = c;
            }
        }
        // rhs in the same variable count (degree vars suffice and keep the
        // matrix square over all partitions)
        let mut rhs: Vec<TPoly> = parts
            .iter()
            .map(|alpha| {
                if alpha.len() > f.nvars {
                    TPoly::zero()
                } else {
                    f.coeff(alpha)
                }
            })
            .collect();
        // Gaussian elimination, rational pivots, TPoly rhs
        let mut m = mat;
        let mut pivots = Vec::with_capacity(dim);
        for col in 0..dim {
            let piv = (col..dim)
                .find(|&r| !m[r][col].is_zero())
                .ok_or_else(|| Error::Internal("singular power-sum transition".into()))?;
            m.swap(col, piv);
            rhs.swap(col, piv);
            let inv = m[col][col].clone();
            for r in 0..dim {
                if r != col && !m[r][col].is_zero() {
                    let factor = &m[r][col] / &inv;
                    for c2 in col..dim {
                        let delta = &factor * &m[col][c2];
                        m[r][c2] -= delta;
                    }
                    let scaled = rhs[col].scale(&factor);
                    rhs[r] = rhs[r].sub(&scaled);
                }
            }
            pivots.push(col);
        }
        for (r, rho) in parts.iter().enumerate() {
            let val = rhs[r].scale(&(Q::one() / &m[r][r]));
            if !val.is_zero() {
                out.insert(rho.clone(), val);
            }
        }
    }
    Ok(SymElement {
        basis: BasisTag::PowerSum,
        param: f.param.clone(),
        nvars: f.nvars,
        coeffs: out,
    })
}

/// Multiply a monomial-basis element by the power sum p_r exactly.
pub fn mul_power_sum(f: &SymElement, r: u32) -> Result<SymElement> {
    if f.basis != BasisTag::Monomial {
        return Err(Error::Internal("mul_power_sum expects the monomial basis".into()));
    }
    let mp = monomial_elem_to_multipoly(f).mul_power_sum(r as u8);
    Ok(SymElement {
        basis: BasisTag::Monomial,
        param: f.param.clone(),
        nvars: f.nvars,
        coeffs: mp.dominant_coeffs(),
    })
}

// ---------------------------------------------------------------------------
// JSON dump of an HL expansion in the power-sum basis.
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct HlDumpTerm {
    mu: Vec<u32>,
    coeff: String,
}

#[derive(Serialize)]
struct HlDump {
    lambda: Vec<u32>,
    t: String,
    basis: &'static str,
    terms: Vec<HlDumpTerm>,
}

/// {"lambda":[...], "t":"sym|num/den", "basis":"p", "terms":[{"mu":..,"coeff":..}]}
pub fn hl_dump_json(lambda: &Partition, param: &TParam) -> Result<serde_json::Value> {
    let q = hl_q(lambda, param, lambda.size() as usize)?;
    let p = to_power_sum(&q)?;
    let dump = HlDump {
        lambda: lambda.parts().to_vec(),
        t: match param {
            TParam::Symbolic => "sym".to_string(),
            TParam::Evaluated(r) => q_to_string(r),
        },
        basis: "p",
        terms: p
            .coeffs
            .iter()
            .map(|(mu, c)| HlDumpTerm {
                mu: mu.parts().to_vec(),
                coeff: c.to_string(),
            })
            .collect(),
    };
    Ok(serde_json::to_value(dump).expect("serializable"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::q_ratio;

    fn pt(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn q_one_box() {
        // Q_{(1)} = (1-t) p_1 = (1-t) m_1
        let q = hl_q(&pt(&[1]), &TParam::Symbolic, 1).unwrap();
        assert_eq!(q.coeff(&pt(&[1])), TPoly::one_minus_t_pow(1));
        let p = to_power_sum(&q).unwrap();
        assert_eq!(p.coeff(&pt(&[1])), TPoly::one_minus_t_pow(1));
    }

    #[test]
    fn q_two_in_power_sums() {
        // Q_{(2)} = ((1-t)^2 p_11 + (1-t^2) p_2)/2
        let q = hl_q(&pt(&[2]), &TParam::Symbolic, 2).unwrap();
        let p = to_power_sum(&q).unwrap();
        let half = TPoly::constant(q_ratio(1, 2));
        assert_eq!(
            p.coeff(&pt(&[1, 1])),
            TPoly::one_minus_t_pow(1).pow(2).mul(&half)
        );
        assert_eq!(p.coeff(&pt(&[2])), TPoly::one_minus_t_pow(2).mul(&half));
    }

    #[test]
    fn q_one_one_in_power_sums() {
        // Q_{(1,1)} = (1-t)(1-t^2)(p_11 - p_2)/2
        let q = hl_q(&pt(&[1, 1]), &TParam::Symbolic, 2).unwrap();
        let p = to_power_sum(&q).unwrap();
        let b = TPoly::one_minus_t_pow(1).mul(&TPoly::one_minus_t_pow(2));
        let half = TPoly::constant(q_ratio(1, 2));
        assert_eq!(p.coeff(&pt(&[1, 1])), b.mul(&half));
        assert_eq!(p.coeff(&pt(&[2])), b.mul(&half).neg());
    }

    #[test]
    fn psi_closed_form_examples() {
        let t = TParam::Symbolic;
        assert_eq!(
            psi_coeff(&pt(&[2]), &pt(&[1]), &t),
            TPoly::one_minus_t_pow(1)
        );
        assert_eq!(psi_coeff(&pt(&[1, 1]), &pt(&[1]), &t), TPoly::one());
        assert_eq!(
            psi_coeff(&pt(&[2, 2]), &pt(&[2, 1]), &t),
            TPoly::one_minus_t_pow(1)
        );
        assert_eq!(psi_coeff(&pt(&[3]), &pt(&[1]), &t), TPoly::zero());
    }

    #[test]
    fn qtilde_signs_and_degrees() {
        // Qt_{(2)} = Q_{(2)}(;-t), sign exponent 0
        let sym = TParam::Symbolic;
        let qt2 = hl_q_tilde(&pt(&[2]), &sym, 2).unwrap();
        let q2 = hl_q(&pt(&[2]), &sym, 2).unwrap();
        for (k, v) in &qt2.coeffs {
            assert_eq!(*v, q2.coeff(k).substitute_neg());
        }
        // Qt_{(1,1)} = -Q_{(1,1)}(;-t)
        let qt11 = hl_q_tilde(&pt(&[1, 1]), &sym, 2).unwrap();
        let q11 = hl_q(&pt(&[1, 1]), &sym, 2).unwrap();
        for (k, v) in &qt11.coeffs {
            assert_eq!(*v, q11.coeff(k).substitute_neg().neg());
        }
        // homogeneous of degree |lambda|
        for lam in Partition::all_of(4) {
            let e = hl_q_tilde(&lam, &sym, 4).unwrap();
            assert_eq!(e.degrees(), vec![4]);
        }
    }

    #[test]
    fn xi_small_examples() {
        // xi_{(1,1)/empty} = 1, xi_{(2)/empty} = 1 - t
        let sym = TParam::Symbolic;
        assert_eq!(
            xi_coeff_sym(&pt(&[1, 1]), &Partition::empty(), &sym).unwrap(),
            TPoly::one()
        );
        assert_eq!(
            xi_coeff_sym(&pt(&[2]), &Partition::empty(), &sym).unwrap(),
            TPoly::one_minus_t_pow(1)
        );
        // evaluated at t = 1/3: weights 1 and 2/3
        let t = q_ratio(1, 3);
        assert_eq!(
            xi_coeff(&pt(&[1, 1]), &Partition::empty(), &t).unwrap(),
            q_ratio(1, 1)
        );
        assert_eq!(
            xi_coeff(&pt(&[2]), &Partition::empty(), &t).unwrap(),
            q_ratio(2, 3)
        );
    }

    #[test]
    fn nvars_below_stable_range_rejected() {
        assert!(hl_q(&pt(&[2, 1]), &TParam::Symbolic, 2).is_err());
    }

    #[test]
    fn hl_homogeneity() {
        for n in 0..=5u32 {
            for lam in Partition::all_of(n) {
                let e = hl_q(&lam, &TParam::Symbolic, n as usize).unwrap();
                for d in e.degrees() {
                    assert_eq!(d, n);
                }
            }
        }
    }
}
