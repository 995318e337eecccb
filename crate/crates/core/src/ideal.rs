//! Finitely generated ideals.
//!
//! [`MonomialIdeal`] carries its unique minimal generating set and supports
//! the full monomial algebra. [`IdealGens`] stores arbitrary generators and
//! normalizes to the monomial form, or to a single gcd generator when every
//! generator lies in one univariate ring.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::univariate::{common_variable, gcd_all};
use crate::poly::{Monomial, Parser, Poly, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MonomialIdeal {
    gens: Vec<Monomial>,
}

impl MonomialIdeal {
    /// Minimal generators of the ideal generated by `gens`.
    pub fn new<I: IntoIterator<Item = Monomial>>(gens: I) -> Self {
        let mut all: Vec<Monomial> = gens.into_iter().collect();
        all.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut min: Vec<Monomial> = Vec::new();
        for m in all {
            if !min.iter().any(|g| g.divides(&m)) {
                min.push(m);
            }
        }
        min.sort_by(|a, b| a.grlex_cmp_alpha(b));
        MonomialIdeal { gens: min }
    }

    pub fn zero() -> Self {
        MonomialIdeal::default()
    }

    pub fn unit() -> Self {
        MonomialIdeal {
            gens: vec![Monomial::one()],
        }
    }

    pub fn principal(m: Monomial) -> Self {
        MonomialIdeal { gens: vec![m] }
    }

    /// The ideal generated by the given variables.
    pub fn variables<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        MonomialIdeal::new(names.into_iter().map(|n| Monomial::var(n.as_ref())))
    }

    pub fn gens(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_one()
    }

    /// Minimal generators are unique, so principality is a count. The zero
    /// ideal is principal, generated by 0.
    pub fn is_principal(&self) -> bool {
        self.gens.len() <= 1
    }

    /// The generating monomial of a non-zero principal ideal.
    pub fn generator(&self) -> Option<&Monomial> {
        match self.gens.as_slice() {
            [m] => Some(m),
            _ => None,
        }
    }

    /// Exponent-wise minimum of the generators.
    pub fn gcd(&self) -> Option<Monomial> {
        let mut it = self.gens.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.gcd(m)))
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.gens.iter().any(|g| g.divides(m))
    }

    pub fn contains_ideal(&self, other: &MonomialIdeal) -> bool {
        other.gens.iter().all(|m| self.contains(m))
    }

    pub fn product(&self, other: &MonomialIdeal) -> MonomialIdeal {
        MonomialIdeal::new(
            self.gens
                .iter()
                .flat_map(|a| other.gens.iter().map(move |b| a * b)),
        )
    }

    pub fn pow(&self, k: u32) -> MonomialIdeal {
        let mut acc = MonomialIdeal::unit();
        for _ in 0..k {
            acc = acc.product(self);
        }
        acc
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MonomialIdeal {
        MonomialIdeal {
            gens: self.gens.iter().map(|g| g * m).collect(),
        }
    }

    /// Divides every generator by `m`; `None` unless `m` divides all of them.
    pub fn div_monomial(&self, m: &Monomial) -> Option<MonomialIdeal> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.div(m))
            .collect::<Option<Vec<_>>>()?;
        Some(MonomialIdeal::new(gens))
    }

    pub fn intersection(&self, other: &MonomialIdeal) -> MonomialIdeal {
        MonomialIdeal::new(
            self.gens
                .iter()
                .flat_map(|a| other.gens.iter().map(move |b| a.lcm(b))),
        )
    }

    /// `(self : m)`.
    pub fn quotient_monomial(&self, m: &Monomial) -> MonomialIdeal {
        MonomialIdeal::new(self.gens.iter().map(|n| n.div(&n.gcd(m)).unwrap()))
    }

    /// `(self : divisor)`, the intersection of the quotients by each generator.
    pub fn colon(&self, divisor: &MonomialIdeal) -> Result<MonomialIdeal> {
        let mut it = divisor.gens.iter();
        let first = it.next().ok_or(Error::ZeroIdeal)?;
        Ok(it.fold(self.quotient_monomial(first), |acc, m| {
            acc.intersection(&self.quotient_monomial(m))
        }))
    }

    /// Equality after dividing each ideal by the gcd of its generators.
    pub fn fractional_equiv(&self, other: &MonomialIdeal) -> Result<bool> {
        Ok(self.fractional_part()? == other.fractional_part()?)
    }

    fn fractional_part(&self) -> Result<MonomialIdeal> {
        let g = self.gcd().ok_or(Error::ZeroIdeal)?;
        Ok(self.div_monomial(&g).expect("gcd divides every generator"))
    }

    pub fn substitute(&self, map: &BTreeMap<String, Poly>) -> IdealGens {
        IdealGens::new(
            self.gens
                .iter()
                .map(|m| Poly::from(m.clone()).substitute(map)),
        )
    }

    pub fn to_gens(&self) -> IdealGens {
        IdealGens {
            gens: self.gens.iter().cloned().map(Poly::from).collect(),
        }
    }

    pub fn render(&self, vars: &VarSet) -> String {
        if self.gens.is_empty() {
            return "(0)".into();
        }
        let mut gens: Vec<&Monomial> = self.gens.iter().collect();
        gens.sort_by(|a, b| a.grlex_cmp(b, vars));
        let body: Vec<String> = gens.into_iter().map(|m| m.render(vars)).collect();
        format!("({})", body.join(", "))
    }

    fn variable_names(&self) -> VarSet {
        VarSet::sorted(self.gens.iter().flat_map(|m| m.vars().map(str::to_owned)))
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&self.variable_names()))
    }
}

/// Outcome of the Moody domination search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domination {
    /// `I * K = J^alpha`.
    Dominates { alpha: u32, witness: MonomialIdeal },
    /// No monomial witness exists for any exponent up to the bound.
    NoWitness { alpha_max: u32 },
}

pub const DEFAULT_ALPHA_MAX: u32 = 6;

/// Searches for `alpha <= alpha_max` and a monomial ideal `K` with
/// `I * K = J^alpha`. The colon `(J^alpha : I)` is the largest monomial
/// candidate, so testing it alone decides each exponent.
pub fn moody_dominates(i: &MonomialIdeal, j: &MonomialIdeal, alpha_max: u32) -> Result<Domination> {
    if i.is_zero() || j.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    let mut jpow = MonomialIdeal::unit();
    for alpha in 1..=alpha_max {
        jpow = jpow.product(j);
        let k = jpow.colon(i)?;
        if i.product(&k) == jpow {
            return Ok(Domination::Dominates { alpha, witness: k });
        }
    }
    Ok(Domination::NoWitness { alpha_max })
}

/// General finitely generated ideal. The zero ideal has no generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IdealGens {
    gens: Vec<Poly>,
}

impl IdealGens {
    /// Normalizes: zero generators dropped, a non-zero constant gives (1),
    /// all-monomial lists become minimal monomial generators, univariate
    /// lists collapse to their monic gcd, anything else is made monic,
    /// deduplicated and sorted.
    pub fn new<I: IntoIterator<Item = Poly>>(gens: I) -> Self {
        let mut gens: Vec<Poly> = gens.into_iter().filter(|p| !p.is_zero()).collect();
        if gens.is_empty() {
            return IdealGens::zero();
        }
        if gens.iter().any(Poly::is_constant) {
            return IdealGens::unit();
        }
        if gens.iter().all(Poly::is_monomial) {
            let ideal = MonomialIdeal::new(gens.iter().map(|p| p.as_term().unwrap().1.clone()));
            return ideal.to_gens();
        }
        if let Some(Some(v)) = common_variable(&gens) {
            return IdealGens {
                gens: vec![gcd_all(&gens, &v)],
            };
        }
        gens = gens.iter().map(Poly::monic).collect();
        gens.sort_by(|a, b| a.canonical_cmp(b));
        gens.dedup();
        IdealGens { gens }
    }

    pub fn zero() -> Self {
        IdealGens::default()
    }

    pub fn unit() -> Self {
        IdealGens {
            gens: vec![Poly::one()],
        }
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.gens.iter().all(Poly::is_monomial)
    }

    pub fn as_monomial(&self) -> Option<MonomialIdeal> {
        self.is_monomial().then(|| MonomialIdeal {
            gens: self
                .gens
                .iter()
                .map(|p| p.as_term().unwrap().1.clone())
                .collect(),
        })
    }

    /// `Some(answer)` when unit membership is decidable: monomial ideals,
    /// univariate ideals (collapsed to their gcd), and single generators.
    pub fn is_unit(&self) -> Option<bool> {
        if self.gens.len() == 1 && self.gens[0].is_one() {
            return Some(true);
        }
        if self.gens.len() <= 1 || self.is_monomial() {
            return Some(false);
        }
        None
    }

    /// A single generator when the ideal is principal (zero for the zero
    /// ideal), `None` when it is not. Multivariate non-monomial ideals are
    /// decided only when one generator divides all the others.
    pub fn principal_generator(&self) -> Result<Option<Poly>> {
        match self.gens.len() {
            0 => return Ok(Some(Poly::zero())),
            1 => return Ok(Some(self.gens[0].clone())),
            _ => {}
        }
        if let Some(m) = self.as_monomial() {
            return Ok(m.generator().cloned().map(Poly::from));
        }
        for g in &self.gens {
            if self.gens.iter().all(|h| g.divides(h)) {
                return Ok(Some(g.clone()));
            }
        }
        Err(Error::PrincipalityUnsupported)
    }

    pub fn is_principal(&self) -> Result<bool> {
        Ok(self.principal_generator()?.is_some())
    }

    /// Membership where decidable: monomial ideals test polynomials term by
    /// term, principal ideals test divisibility.
    pub fn contains(&self, p: &Poly) -> Option<bool> {
        if p.is_zero() {
            return Some(true);
        }
        if let Some(m) = self.as_monomial() {
            return Some(p.terms().all(|(t, _)| m.contains(t)));
        }
        if self.gens.len() == 1 {
            return Some(self.gens[0].divides(p));
        }
        None
    }

    pub fn contains_ideal(&self, other: &IdealGens) -> Option<bool> {
        let mut all = true;
        for g in &other.gens {
            all &= self.contains(g)?;
        }
        Some(all)
    }

    pub fn product(&self, other: &IdealGens) -> IdealGens {
        IdealGens::new(
            self.gens
                .iter()
                .flat_map(|a| other.gens.iter().map(move |b| a * b)),
        )
    }

    pub fn pow(&self, k: u32) -> IdealGens {
        let mut acc = IdealGens::unit();
        for _ in 0..k {
            acc = acc.product(self);
        }
        acc
    }

    pub fn substitute(&self, map: &BTreeMap<String, Poly>) -> IdealGens {
        IdealGens::new(self.gens.iter().map(|g| g.substitute(map)))
    }

    pub fn variables(&self) -> VarSet {
        VarSet::sorted(self.gens.iter().flat_map(Poly::variables))
    }

    pub fn render(&self, vars: &VarSet) -> String {
        if self.gens.is_empty() {
            return "(0)".into();
        }
        let mut gens: Vec<&Poly> = self.gens.iter().collect();
        if self.is_monomial() {
            gens.sort_by(|a, b| {
                a.as_term()
                    .unwrap()
                    .1
                    .grlex_cmp(b.as_term().unwrap().1, vars)
            });
        }
        let body: Vec<String> = gens.into_iter().map(|p| p.render(vars)).collect();
        format!("({})", body.join(", "))
    }
}

impl From<MonomialIdeal> for IdealGens {
    fn from(m: MonomialIdeal) -> Self {
        m.to_gens()
    }
}

impl fmt::Display for IdealGens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&self.variables()))
    }
}

impl PartialOrd for MonomialIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MonomialIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gens.cmp(&other.gens)
    }
}

/// Parses `(g1, g2, ...)`; `()` and `(0)` give the zero ideal.
pub fn parse_ideal(text: &str, vars: &VarSet) -> Result<IdealGens> {
    let mut p = Parser::new(text, Some(vars));
    p.expect('(')?;
    let gens = p.poly_list(Some(')'))?;
    p.expect(')')?;
    p.finish()?;
    Ok(IdealGens::new(gens))
}

/// Parses a monomial ideal; every generator must be a single term.
pub fn parse_monomial_ideal(text: &str, vars: &VarSet) -> Result<MonomialIdeal> {
    let ideal = parse_ideal(text, vars)?;
    ideal.as_monomial().ok_or_else(|| Error::Syntax {
        position: 0,
        message: "expected monomial generators".into(),
    })
}
