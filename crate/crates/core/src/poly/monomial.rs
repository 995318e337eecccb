use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use super::VarSet;

/// Power product of named variables. Zero exponents are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    exps: BTreeMap<String, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(name: &str) -> Self {
        Monomial::var_pow(name, 1)
    }

    pub fn var_pow(name: &str, e: u32) -> Self {
        let mut exps = BTreeMap::new();
        if e > 0 {
            exps.insert(name.to_string(), e);
        }
        Monomial { exps }
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut m = Monomial::one();
        for (v, e) in pairs {
            if e > 0 {
                *m.exps.entry(v.into()).or_insert(0) += e;
            }
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.exps.values().sum()
    }

    pub fn exponent(&self, v: &str) -> u32 {
        self.exps.get(v).copied().unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.exps.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.exps.iter().map(|(v, e)| (v.as_str(), *e))
    }

    /// The variable when the monomial is a single variable to the first power.
    pub fn as_variable(&self) -> Option<&str> {
        match self.exps.iter().next() {
            Some((v, 1)) if self.exps.len() == 1 => Some(v),
            _ => None,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().all(|(v, e)| other.exponent(v) >= *e)
    }

    /// `self / d` when `d` divides `self`.
    pub fn div(&self, d: &Monomial) -> Option<Monomial> {
        if !d.divides(self) {
            return None;
        }
        let mut exps = self.exps.clone();
        for (v, e) in &d.exps {
            let slot = exps.get_mut(v).unwrap();
            *slot -= e;
            if *slot == 0 {
                exps.remove(v);
            }
        }
        Some(Monomial { exps })
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let exps = self
            .exps
            .iter()
            .filter_map(|(v, e)| {
                let m = (*e).min(other.exponent(v));
                (m > 0).then(|| (v.clone(), m))
            })
            .collect();
        Monomial { exps }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (v, e) in &other.exps {
            let slot = exps.entry(v.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        Monomial { exps }
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|(v, e)| (v.clone(), e * k)).collect(),
        }
    }

    /// Graded-lex comparison, "greater first": returns `Less` when `self`
    /// precedes `other` in rendering order.
    pub fn grlex_cmp(&self, other: &Monomial, vars: &VarSet) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| {
            for v in vars.names() {
                match other.exponent(v).cmp(&self.exponent(v)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            // names outside `vars`, alphabetically
            self.alpha_cmp(other)
        })
    }

    /// Graded-lex with alphabetical variable order, "greater first".
    pub fn grlex_cmp_alpha(&self, other: &Monomial) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.alpha_cmp(other))
    }

    fn alpha_cmp(&self, other: &Monomial) -> Ordering {
        let mut names: Vec<&String> = self.exps.keys().chain(other.exps.keys()).collect();
        names.sort();
        names.dedup();
        for v in names {
            match other.exponent(v).cmp(&self.exponent(v)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn render(&self, vars: &VarSet) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut ordered: Vec<(&String, u32)> = Vec::new();
        for v in vars.names() {
            if let Some(e) = self.exps.get(v) {
                ordered.push((v, *e));
            }
        }
        for (v, e) in &self.exps {
            if !vars.contains(v) {
                ordered.push((v, *e));
            }
        }
        ordered
            .into_iter()
            .map(|(v, e)| {
                if e == 1 {
                    v.clone()
                } else {
                    format!("{v}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl Mul for &Monomial {
    type Output = Monomial;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (v, e) in &rhs.exps {
            *exps.entry(v.clone()).or_insert(0) += e;
        }
        Monomial { exps }
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        &self * &rhs
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&VarSet::default()))
    }
}
