//! Exact arithmetic in F_q for q = p^e, via the polynomial-basis representation
//! over F_p with a fixed modulus per (p, e).
//!
//! Elements are stored as table indices: the element with coefficient vector
//! (c_0, ..., c_{e-1}) has index sum c_k p^k. All arithmetic goes through
//! precomputed tables, so the hot loops (orbit enumeration, radical sums) cost
//! one lookup per operation.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An element of a finite field, as an index into the [`FieldSpec`] tables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Fe(pub u8);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Description of F_q, q = p^e, together with operation tables.
///
/// The modulus is the canonical irreducible polynomial for (p, e): the
/// lexicographically smallest monic irreducible of degree e over F_p when
/// coefficients are compared from the constant term up. For (3, 2) this is
/// x^2 + 1, so F_9 = F_3[i] with i^2 = -1.
pub struct FieldSpec {
    p: u64,
    e: u32,
    q: u64,
    /// Monic modulus, ascending coefficients, length e+1, leading 1.
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    /// x -> x^p, the Frobenius generator.
    frob: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(q = {}^{})", self.p, self.e)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.e.hash(state);
        self.modulus.hash(state);
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiply two polynomials over F_p and reduce by the monic `modulus`.
fn polymul_mod(a: &[u8], b: &[u8], modulus: &[u8], p: u64) -> Vec<u8> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p;
        }
    }
    // Reduce from the top: x^k = x^{k-e} * (x^e mod modulus).
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (j, &mj) in modulus.iter().enumerate().take(e) {
            let idx = k - e + j;
            prod[idx] = (prod[idx] + c * (p - mj as u64)) % p;
        }
    }
    prod.truncate(e.max(1));
    prod.iter().map(|&c| c as u8).collect()
}

fn coeffs_to_index(coeffs: &[u8], p: u64) -> u64 {
    let mut idx = 0u64;
    for &c in coeffs.iter().rev() {
        idx = idx * p + c as u64;
    }
    idx
}

fn index_to_coeffs(mut idx: u64, p: u64, e: u32) -> Vec<u8> {
    let mut coeffs = Vec::with_capacity(e as usize);
    for _ in 0..e {
        coeffs.push((idx % p) as u8);
        idx /= p;
    }
    coeffs
}

/// Lexicographically smallest monic irreducible of degree e over F_p,
/// coefficients compared from the constant term up. Deterministic, so tables
/// are bit-identical across runs.
fn canonical_modulus(p: u64, e: u32) -> Result<Vec<u8>> {
    if e == 1 {
        // F_p itself; modulus x keeps reduction trivial.
        return Ok(vec![0, 1]);
    }
    let count = p.pow(e);
    'cand: for idx in 0..count {
        let mut m = index_to_coeffs(idx, p, e);
        m.push(1); // monic of degree e
        if m[0] == 0 {
            continue; // divisible by x
        }
        // Trial division by every monic polynomial of degree 1..=e/2.
        for d in 1..=(e / 2) {
            for didx in 0..p.pow(d) {
                let mut g = index_to_coeffs(didx, p, d);
                g.push(1);
                if poly_divides(&g, &m, p) {
                    continue 'cand;
                }
            }
        }
        return Ok(m);
    }
    Err(Error::Field(format!("no irreducible of degree {e} over F_{p}")))
}

/// Does monic g divide monic f over F_p?
fn poly_divides(g: &[u8], f: &[u8], p: u64) -> bool {
    let mut rem: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - dg;
            for (j, &gj) in g.iter().enumerate() {
                let idx = shift + j;
                rem[idx] = (rem[idx] + lead * (p - gj as u64)) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

impl FieldSpec {
    /// F_q with q = p^e and the canonical modulus.
    pub fn new(p: u64, e: u32) -> Result<Arc<FieldSpec>> {
        if !is_prime(p) {
            return Err(Error::Field(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::Field("extension degree must be >= 1".into()));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= 256)
            .ok_or_else(|| Error::Field(format!("q = {p}^{e} exceeds the table-based limit 256")))?;
        let modulus = canonical_modulus(p, e)?;
        Ok(Arc::new(Self::build(p, e, q, modulus)))
    }

    /// Parse "q" given either as a plain prime power ("9") or as "p^e".
    pub fn parse_q(s: &str) -> Result<Arc<FieldSpec>> {
        let (p, e) = if let Some((ps, es)) = s.split_once('^') {
            let p: u64 = ps.trim().parse().map_err(|_| Error::Field(format!("bad q spec '{s}'")))?;
            let e: u32 = es.trim().parse().map_err(|_| Error::Field(format!("bad q spec '{s}'")))?;
            (p, e)
        } else {
            let q: u64 = s.trim().parse().map_err(|_| Error::Field(format!("bad q spec '{s}'")))?;
            let mut p = 2;
            while p <= q {
                if q % p == 0 {
                    break;
                }
                p += 1;
            }
            let mut e = 0;
            let mut m = q;
            while m > 1 && m % p == 0 {
                m /= p;
                e += 1;
            }
            if m != 1 || e == 0 {
                return Err(Error::Field(format!("{q} is not a prime power")));
            }
            (p, e)
        };
        FieldSpec::new(p, e)
    }

    /// The quadratic extension F_{q^2} of this field, sharing the prime p.
    pub fn quadratic_extension(&self) -> Result<Arc<FieldSpec>> {
        FieldSpec::new(self.p, self.e * 2)
    }

    fn build(p: u64, e: u32, q: u64, modulus: Vec<u8>) -> FieldSpec {
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        let mut frob = vec![0u8; qs];

        let coeffs: Vec<Vec<u8>> = (0..q).map(|i| index_to_coeffs(i, p, e)).collect();
        for a in 0..qs {
            for b in 0..qs {
                let mut sum = vec![0u8; e as usize];
                for k in 0..e as usize {
                    sum[k] = ((coeffs[a][k] as u64 + coeffs[b][k] as u64) % p) as u8;
                }
                add[a * qs + b] = coeffs_to_index(&sum, p) as u8;
                let prod = polymul_mod(&coeffs[a], &coeffs[b], &modulus, p);
                mul[a * qs + b] = coeffs_to_index(&prod, p) as u8;
            }
            let negated: Vec<u8> = coeffs[a].iter().map(|&c| ((p - c as u64) % p) as u8).collect();
            neg[a] = coeffs_to_index(&negated, p) as u8;
        }
        let spec_partial = FieldSpec {
            p,
            e,
            q,
            modulus: modulus.clone(),
            add,
            mul,
            neg,
            inv: vec![],
            frob: vec![],
        };
        for a in 1..qs {
            // q is tiny; a linear scan beats implementing poly extended Euclid.
            for b in 1..qs {
                if spec_partial.mul[a * qs + b] == 1 {
                    inv[a] = b as u8;
                    break;
                }
            }
            debug_assert!(inv[a] != 0);
            frob[a] = spec_partial.pow(Fe(a as u8), p).0;
        }
        FieldSpec { inv, frob, ..spec_partial }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    /// True if q is odd (required by the unitary constructions).
    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    /// When e is even, the base field size q0 with q = q0^2.
    pub fn base_q(&self) -> Option<u64> {
        if self.e % 2 == 0 {
            Some(self.p.pow(self.e / 2))
        } else {
            None
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(|i| Fe(i as u8))
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.0 as usize])
    }

    /// Multiplicative inverse; panics on zero (callers check).
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!a.is_zero(), "inverse of zero");
        Fe(self.inv[a.0 as usize])
    }

    pub fn pow(&self, a: Fe, mut n: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// x -> x^p.
    pub fn frobenius_p(&self, a: Fe) -> Fe {
        Fe(self.frob[a.0 as usize])
    }

    /// x -> x^{q0} where q0^2 = q; the conjugation of the quadratic extension.
    pub fn conj(&self, a: Fe) -> Result<Fe> {
        if self.e % 2 != 0 {
            return Err(Error::FieldMismatch(format!(
                "F_{} is not a quadratic extension",
                self.q
            )));
        }
        let mut x = a;
        for _ in 0..self.e / 2 {
            x = self.frobenius_p(x);
        }
        Ok(x)
    }

    /// Element from an integer, reduced into the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        let r = n.rem_euclid(self.p as i64) as u64;
        Fe(r as u8)
    }

    /// Element from its coefficient vector over F_p (ascending powers).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Fe> {
        if coeffs.len() > self.e as usize {
            return Err(Error::Field(format!(
                "coefficient vector of length {} for extension degree {}",
                coeffs.len(),
                self.e
            )));
        }
        let mut idx = 0u64;
        for (k, &c) in coeffs.iter().enumerate() {
            idx += (c % self.p) * self.p.pow(k as u32);
        }
        Ok(Fe(idx as u8))
    }

    pub fn coeffs(&self, a: Fe) -> Vec<u64> {
        index_to_coeffs(a.0 as u64, self.p, self.e)
            .into_iter()
            .map(|c| c as u64)
            .collect()
    }

    /// The solutions of y^{q0} = -y in F_{q0^2}; a one-dimensional F_{q0}-space
    /// with q0 elements. This is the entry set for anti-diagonal positions of
    /// u(2n) and for the K-count border variable.
    pub fn twisted_trace_zero(&self) -> Result<Vec<Fe>> {
        let q0 = self
            .base_q()
            .ok_or_else(|| Error::FieldMismatch(format!("F_{} has odd extension degree", self.q)))?;
        let mut out = Vec::new();
        for a in self.elements() {
            if self.pow(a, q0) == self.neg(a) {
                out.push(a);
            }
        }
        debug_assert_eq!(out.len() as u64, q0);
        Ok(out)
    }

    /// The subfield F_{q0} = fixed points of conj, as a sorted element list.
    pub fn base_subfield(&self) -> Result<Vec<Fe>> {
        let q0 = self
            .base_q()
            .ok_or_else(|| Error::FieldMismatch(format!("F_{} has odd extension degree", self.q)))?;
        let mut out = Vec::new();
        for a in self.elements() {
            if self.pow(a, q0) == a {
                out.push(a);
            }
        }
        debug_assert_eq!(out.len() as u64, q0);
        Ok(out)
    }

    /// Smallest-index multiplicative generator; deterministic.
    pub fn primitive_element(&self) -> Fe {
        'outer: for idx in 1..self.q {
            let a = Fe(idx as u8);
            let mut x = a;
            for _ in 1..self.q - 1 {
                if x == Fe::ONE {
                    continue 'outer;
                }
                x = self.mul(x, a);
            }
            if x == Fe::ONE {
                return a;
            }
        }
        unreachable!("multiplicative group is cyclic")
    }
}
