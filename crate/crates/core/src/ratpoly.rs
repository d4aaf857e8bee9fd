//! Univariate polynomials in the Hall-Littlewood parameter t with exact
//! rational coefficients. Symbolic-t and evaluated-t computations share this
//! type: an evaluated coefficient is just a degree-0 polynomial.

use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{q_to_string, Q};

/// Ascending coefficients; normalized so the leading coefficient is nonzero.
/// The zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TPoly(Vec<Q>);

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl TPoly {
    pub fn zero() -> TPoly {
        TPoly(Vec::new())
    }

    pub fn one() -> TPoly {
        TPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> TPoly {
        if c.is_zero() {
            TPoly::zero()
        } else {
            TPoly(vec![c])
        }
    }

    /// The variable t.
    pub fn t() -> TPoly {
        TPoly(vec![Q::zero(), Q::one()])
    }

    /// c * t^k.
    pub fn monomial(c: Q, k: usize) -> TPoly {
        if c.is_zero() {
            return TPoly::zero();
        }
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        TPoly(v)
    }

    pub fn from_coeffs(coeffs: Vec<Q>) -> TPoly {
        let mut p = TPoly(coeffs);
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.0.last().map_or(false, |c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.0.len() {
            0 => Some(Q::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(Q::zero);
            let b = other.0.get(i).cloned().unwrap_or_else(Q::zero);
            out.push(a + b);
        }
        TPoly::from_coeffs(out)
    }

    pub fn neg(&self) -> TPoly {
        TPoly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, other: &TPoly) -> TPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TPoly) -> TPoly {
        if self.is_zero() || other.is_zero() {
            return TPoly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Q) -> TPoly {
        if c.is_zero() {
            return TPoly::zero();
        }
        TPoly(self.0.iter().map(|a| a * c).collect())
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, divisor: &TPoly) -> Result<TPoly> {
        if divisor.is_zero() {
            return Err(Error::Internal("division by zero polynomial".into()));
        }
        if self.is_zero() {
            return Ok(TPoly::zero());
        }
        let dd = divisor.0.len() - 1;
        let lead = divisor.0[dd].clone();
        let mut rem = self.0.clone();
        if rem.len() < divisor.0.len() {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let c = &rem[k] / &lead;
            quot[k - dd] = c.clone();
            for (j, dj) in divisor.0.iter().enumerate() {
                let idx = k - dd + j;
                let delta = &c * dj;
                rem[idx] -= delta;
            }
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        Ok(TPoly::from_coeffs(quot))
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Substitute t -> -t.
    pub fn substitute_neg(&self) -> TPoly {
        TPoly(
            self.0
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    pub fn pow(&self, n: usize) -> TPoly {
        let mut acc = TPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// 1 - t^k.
    pub fn one_minus_t_pow(k: usize) -> TPoly {
        TPoly::one().sub(&TPoly::monomial(Q::one(), k))
    }

}

impl fmt::Display for TPoly {
    /// Canonical human/JSON form: "0", "1 - t + 2*t^2", monomials ascending.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag_str = q_to_string(&mag);
            match k {
                0 => write!(f, "{mag_str}")?,
                _ => {
                    if mag.is_one() {
                        write!(f, "{}", if k == 1 { "t".into() } else { format!("t^{k}") })?;
                    } else {
                        write!(f, "{mag_str}*{}", if k == 1 { "t".into() } else { format!("t^{k}") })?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{q_int, q_ratio};
    use proptest::prelude::*;

    #[test]
    fn display_forms() {
        let p = TPoly::one().sub(&TPoly::t());
        assert_eq!(p.to_string(), "1 - t");
        let q = TPoly::from_coeffs(vec![q_int(0), q_ratio(3, 2)]);
        assert_eq!(q.to_string(), "3/2*t");
        assert_eq!(TPoly::zero().to_string(), "0");
    }

    #[test]
    fn exact_division() {
        // (1 - t^2) / (1 - t) = 1 + t
        let n = TPoly::one_minus_t_pow(2);
        let d = TPoly::one_minus_t_pow(1);
        assert_eq!(n.div_exact(&d).unwrap(), TPoly::one().add(&TPoly::t()));
        // inexact division errors
        assert!(TPoly::t().div_exact(&d).is_err());
    }

    fn small_poly() -> impl Strategy<Value = TPoly> {
        proptest::collection::vec(-6i64..6, 0..5)
            .prop_map(|v| TPoly::from_coeffs(v.into_iter().map(q_int).collect()))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn mul_div_roundtrip(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            let prod = a.mul(&b);
            prop_assert_eq!(prod.div_exact(&b).unwrap(), a);
        }

        #[test]
        fn eval_homomorphism(a in small_poly(), b in small_poly(), x in -5i64..5) {
            let x = q_int(x);
            prop_assert_eq!(a.mul(&b).eval(&x), a.eval(&x) * b.eval(&x));
            prop_assert_eq!(a.add(&b).eval(&x), a.eval(&x) + b.eval(&x));
        }
    }
}
