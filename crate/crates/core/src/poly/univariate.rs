//! Dense univariate polynomials over the rationals, used where the base ring
//! is a principal ideal domain (gcds, Smith normal form).

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Monomial, Poly};

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) => {
                let inv = l.recip();
                UniPoly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
            None => UniPoly::zero(),
        }
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let c = rem.last().unwrap() * &lead_inv;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[shift + i] -= &c * dc;
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn to_poly(&self, var: &str) -> Poly {
        Poly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var_pow(var, i as u32), c.clone())),
        )
    }

    /// Reads `p` as a polynomial in `var`; `None` if another variable occurs.
    pub fn from_poly(p: &Poly, var: &str) -> Option<UniPoly> {
        let mut coeffs = vec![BigRational::zero(); p.total_degree() as usize + 1];
        for (m, c) in p.terms() {
            if m.vars().any(|v| v != var) {
                return None;
            }
            coeffs[m.exponent(var) as usize] = c.clone();
        }
        Some(UniPoly::new(coeffs))
    }
}

/// The single variable shared by all polynomials: `Some(None)` when all are
/// constant, `Some(Some(v))` when all lie in `Q[v]`, `None` otherwise.
pub fn common_variable<'a, I: IntoIterator<Item = &'a Poly>>(polys: I) -> Option<Option<String>> {
    let vars: BTreeSet<String> = polys.into_iter().flat_map(Poly::variables).collect();
    match vars.len() {
        0 => Some(None),
        1 => Some(vars.into_iter().next()),
        _ => None,
    }
}

/// Monic gcd of univariate polynomials in `var`.
pub fn gcd_all<'a, I: IntoIterator<Item = &'a Poly>>(polys: I, var: &str) -> Poly {
    let mut g = UniPoly::zero();
    for p in polys {
        let u = UniPoly::from_poly(p, var).expect("univariate input");
        g = g.gcd(&u);
    }
    if g.is_zero() {
        Poly::zero()
    } else {
        g.to_poly(var)
    }
}

impl One for UniPoly {
    fn one() -> Self {
        UniPoly::constant(BigRational::one())
    }
}

impl std::ops::Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: UniPoly) -> UniPoly {
        UniPoly::mul(&self, &rhs)
    }
}
