//! Polynomials over F_q with ascending coefficients, plus the complete
//! factorization into monic irreducibles used to label general adjoint
//! orbits. Degrees stay at most 8 and q at most 9, so trial division against
//! enumerated irreducibles is exact and instant.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec};
use crate::matrix::Matrix;

/// Ascending coefficients; the zero polynomial is the empty vector.
pub type FqPoly = Vec<Fe>;

pub fn trim(mut p: FqPoly) -> FqPoly {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn degree(p: &[Fe]) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn mul(f: &FieldSpec, a: &[Fe], b: &[Fe]) -> FqPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Fe::ZERO; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(ai, bj));
        }
    }
    trim(out)
}

/// Division with remainder by a monic divisor.
pub fn divrem_monic(f: &FieldSpec, a: &[Fe], g: &[Fe]) -> (FqPoly, FqPoly) {
    let dg = g.len() - 1;
    assert_eq!(g[dg], Fe::ONE, "divisor must be monic");
    let mut rem: Vec<Fe> = a.to_vec();
    if rem.len() <= dg {
        return (Vec::new(), trim(rem));
    }
    let mut quot = vec![Fe::ZERO; rem.len() - dg];
    for k in (dg..rem.len()).rev() {
        let c = rem[k];
        if c.is_zero() {
            continue;
        }
        quot[k - dg] = c;
        for (j, &gj) in g.iter().enumerate() {
            let idx = k - dg + j;
            rem[idx] = f.sub(rem[idx], f.mul(c, gj));
        }
    }
    rem.truncate(dg);
    (trim(quot), trim(rem))
}

pub fn divides(f: &FieldSpec, g: &[Fe], a: &[Fe]) -> bool {
    divrem_monic(f, a, g).1.is_empty()
}

/// All monic irreducibles of the exact degree d over the field, in
/// index-lexicographic order (constant coefficient fastest). Deterministic.
pub fn monic_irreducibles(field: &Arc<FieldSpec>, d: usize) -> Vec<FqPoly> {
    let q = field.q();
    let mut out = Vec::new();
    let count = q.pow(d as u32);
    'cand: for idx in 0..count {
        let mut poly = Vec::with_capacity(d + 1);
        let mut rest = idx;
        for _ in 0..d {
            poly.push(Fe((rest % q) as u8));
            rest /= q;
        }
        poly.push(Fe::ONE);
        // irreducible iff no monic divisor of degree 1..=d/2
        for dd in 1..=d / 2 {
            for gidx in 0..q.pow(dd as u32) {
                let mut g = Vec::with_capacity(dd + 1);
                let mut grest = gidx;
                for _ in 0..dd {
                    g.push(Fe((grest % q) as u8));
                    grest /= q;
                }
                g.push(Fe::ONE);
                if divides(field, &g, &poly) {
                    continue 'cand;
                }
            }
        }
        out.push(poly);
    }
    out
}

pub fn eval(field: &FieldSpec, poly: &[Fe], x: Fe) -> Fe {
    let mut acc = Fe::ZERO;
    for &c in poly.iter().rev() {
        acc = field.add(field.mul(acc, x), c);
    }
    acc
}

/// Complete factorization of a monic polynomial into monic irreducibles with
/// multiplicities, factors sorted by (degree, coefficient index order).
pub fn factor_monic(field: &Arc<FieldSpec>, poly: &[Fe]) -> Result<Vec<(FqPoly, u32)>> {
    let deg = degree(poly).ok_or_else(|| Error::Internal("factor of zero polynomial".into()))?;
    if poly[deg] != Fe::ONE {
        return Err(Error::Internal("factor of non-monic polynomial".into()));
    }
    let mut rest: FqPoly = poly.to_vec();
    let mut out: Vec<(FqPoly, u32)> = Vec::new();
    let mut d = 1;
    while degree(&rest).unwrap_or(0) > 0 {
        let rem_deg = degree(&rest).unwrap();
        if d > rem_deg / 2 {
            // what's left is irreducible
            out.push((rest.clone(), 1));
            // fold repeated occurrences already extracted
            break;
        }
        for cand in monic_irreducibles(field, d) {
            let mut mult = 0;
            loop {
                let (q, r) = divrem_monic(field, &rest, &cand);
                if r.is_empty() && !q.is_empty() {
                    rest = q;
                    mult += 1;
                } else {
                    break;
                }
            }
            if mult > 0 {
                out.push((cand, mult));
            }
        }
        d += 1;
    }
    // merge any duplicate of the final irreducible chunk
    let mut merged: Vec<(FqPoly, u32)> = Vec::new();
    for (f, m) in out {
        if let Some(e) = merged.iter_mut().find(|(g, _)| *g == f) {
            e.1 += m;
        } else {
            merged.push((f, m));
        }
    }
    merged.sort_by(|a, b| {
        (a.0.len(), poly_index(field, &a.0)).cmp(&(b.0.len(), poly_index(field, &b.0)))
    });
    Ok(merged)
}

/// Lexicographic key of a polynomial for canonical ordering.
fn poly_index(_field: &FieldSpec, p: &[Fe]) -> u64 {
    let mut idx = 0u64;
    for &c in p.iter().rev() {
        idx = idx * 256 + c.0 as u64;
    }
    idx
}

/// Evaluate a polynomial at a square matrix (Horner).
pub fn eval_matrix(poly: &[Fe], x: &Matrix) -> Result<Matrix> {
    let n = x.rows();
    let field = x.field().clone();
    let mut acc = Matrix::zero(n, n, field.clone());
    for &c in poly.iter().rev() {
        acc = acc.mul(x)?;
        if !c.is_zero() {
            let scaled = Matrix::identity(n, field.clone()).scalar_mul(c);
            acc = acc.add(&scaled)?;
        }
    }
    Ok(acc)
}

/// The companion matrix of a monic polynomial.
pub fn companion(field: Arc<FieldSpec>, poly: &[Fe]) -> Matrix {
    let d = poly.len() - 1;
    let mut m = Matrix::zero(d, d, field.clone());
    for i in 1..d {
        m.set(i, i - 1, Fe::ONE);
    }
    for (i, &c) in poly.iter().take(d).enumerate() {
        m.set(i, d - 1, field.neg(c));
    }
    m
}
