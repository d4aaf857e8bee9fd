//! Shared oracle machinery for the integration tests. Deliberately
//! independent of the crate's internal polynomial representation: the
//! multivariate arithmetic here is reimplemented from scratch so that the
//! symmetrization-formula oracle does not share code with the branching-rule
//! construction it checks.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use finq_core::field::FieldSpec;
use finq_core::matrix::Matrix;
use finq_core::partition::Partition;
use finq_core::ratpoly::TPoly;
use finq_core::symfunc::SymElement;

/// Sparse multivariate polynomial in a fixed number of variables with
/// polynomial-in-t coefficients.
#[derive(Clone, Debug, Default)]
pub struct Poly {
    pub nvars: usize,
    pub terms: HashMap<Vec<u8>, TPoly>,
}

#[allow(dead_code)]
impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly { nvars, terms: HashMap::new() }
    }

    pub fn constant(nvars: usize, c: TPoly) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn add_term(&mut self, e: Vec<u8>, c: TPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(TPoly::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &TPoly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// x^alpha as a polynomial.
    pub fn monomial(nvars: usize, e: Vec<u8>) -> Poly {
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, TPoly::one());
        p
    }

    /// x_i - t x_j.
    pub fn binomial_xt(nvars: usize, i: usize, j: usize) -> Poly {
        let mut p = Poly::zero(nvars);
        let mut ei = vec![0; nvars];
        ei[i] = 1;
        p.terms.insert(ei, TPoly::one());
        let mut ej = vec![0; nvars];
        ej[j] = 1;
        p.terms.insert(ej, TPoly::t().neg());
        p
    }

    /// x_i - x_j.
    pub fn binomial_xx(nvars: usize, i: usize, j: usize) -> Poly {
        let mut p = Poly::zero(nvars);
        let mut ei = vec![0; nvars];
        ei[i] = 1;
        p.terms.insert(ei, TPoly::one());
        let mut ej = vec![0; nvars];
        ej[j] = 1;
        p.terms.insert(ej, TPoly::one().neg());
        p
    }

    /// Monomial-wise antisymmetrization: sum over permutations with sign,
    /// collected on strictly-decreasing exponent buckets.
    pub fn antisymmetrize(&self) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            // monomials with repeated exponents antisymmetrize to zero
            let mut sorted: Vec<(u8, usize)> = e.iter().cloned().zip(0..).collect();
            sorted.sort_by(|a, b| b.0.cmp(&a.0));
            if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
                continue;
            }
            // sign of the sorting permutation
            let perm: Vec<usize> = sorted.iter().map(|&(_, i)| i).collect();
            let mut sign = 1i64;
            let mut seen = vec![false; perm.len()];
            for start in 0..perm.len() {
                if seen[start] {
                    continue;
                }
                let mut len = 0;
                let mut cur = start;
                while !seen[cur] {
                    seen[cur] = true;
                    cur = perm[cur];
                    len += 1;
                }
                if len % 2 == 0 {
                    sign = -sign;
                }
            }
            let key: Vec<u8> = sorted.iter().map(|&(v, _)| v).collect();
            let signed = if sign > 0 { c.clone() } else { c.neg() };
            out.add_term(key, signed);
        }
        out
    }

    /// Full polynomial from a monomial-basis symmetric element.
    pub fn from_monomial_elem(elem: &SymElement) -> Poly {
        let mut out = Poly::zero(elem.nvars);
        for (lam, c) in &elem.coeffs {
            out = out.add(&expand_monomial_sym(lam, elem.nvars).scale(c));
        }
        out
    }
}

/// The monomial symmetric polynomial m_lambda as a full polynomial.
pub fn expand_monomial_sym(lambda: &Partition, nvars: usize) -> Poly {
    let mut out = Poly::zero(nvars);
    if lambda.len() > nvars {
        return out;
    }
    let mut expo: Vec<u8> = lambda.parts().iter().map(|&p| p as u8).collect();
    expo.resize(nvars, 0);
    expo.sort_unstable();
    loop {
        out.terms.insert(expo.clone(), TPoly::one());
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

/// Deterministic pseudo-random products of group generators: a tiny LCG
/// driving generator picks, for sampled-conjugation tests.
#[allow(dead_code)]
pub fn pseudo_random_products(
    gens: &[Matrix],
    count: usize,
    length: usize,
    seed: u64,
) -> Vec<Matrix> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as usize
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut g = gens[next() % gens.len()].clone();
        for _ in 1..length {
            g = g.mul(&gens[next() % gens.len()]).unwrap();
        }
        out.push(g);
    }
    out
}

/// A convenient field constructor for tests.
#[allow(dead_code)]
pub fn field(q: &str) -> Arc<FieldSpec> {
    FieldSpec::parse_q(q).unwrap()
}

/// z_rho = prod_j j^{m_j} m_j!.
#[allow(dead_code)]
pub fn z_rho(rho: &Partition) -> u64 {
    let mut z = 1u64;
    let max = rho.parts().first().copied().unwrap_or(0);
    for j in 1..=max {
        let m = rho.mult_count(j) as u64;
        for _ in 0..m {
            z *= j as u64;
        }
        for k in 1..=m {
            z *= k;
        }
    }
    z
}

/// Sorted label map for quick comparisons in tests.
#[allow(dead_code)]
pub fn sorted_terms(elem: &SymElement) -> BTreeMap<Partition, TPoly> {
    elem.coeffs.clone()
}
