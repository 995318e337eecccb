//! Local diagonalization, the diagonal-module test, the divisor filtration
//! and the components of the abelian cone of a diagonal module.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fitting::{rank_profile, Presentation};
use crate::ideal::IdealGens;
use crate::poly::univariate::{common_variable, UniPoly};
use crate::poly::{Monomial, Poly};

/// `Diag(f_1, ..., f_n)` padded with zeros to a `rows x cols` matrix, with
/// `f_i | f_{i+1}` and every `f_i` non-zero and monic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    pub entries: Vec<Poly>,
    pub rows: usize,
    pub cols: usize,
    /// Row and column operations applied, in order.
    pub ops: Vec<String>,
}

impl DiagonalForm {
    /// A square diagonal form from its entries.
    pub fn from_entries(entries: Vec<Poly>) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for (i, f) in entries.iter().enumerate() {
            if f.is_zero() {
                return Err(Error::ZeroDiagonalEntry { index: i + 1 });
            }
            if i > 0 && !entries[i - 1].divides(f) {
                return Err(Error::DivisibilityViolation { index: i + 1 });
            }
            out.push(f.monic());
        }
        let n = out.len();
        Ok(DiagonalForm {
            entries: out,
            rows: n,
            cols: n,
            ops: Vec::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Rank of the free summand of the cokernel.
    pub fn free_rank(&self) -> usize {
        self.rows - self.entries.len()
    }

    pub fn kernel_rank(&self) -> usize {
        self.cols - self.entries.len()
    }

    /// Consecutive runs of equal entries as `(entry, multiplicity)`.
    pub fn blocks(&self) -> Vec<(Poly, usize)> {
        let mut out: Vec<(Poly, usize)> = Vec::new();
        for f in &self.entries {
            match out.last_mut() {
                Some((g, k)) if g == f => *k += 1,
                _ => out.push((f.clone(), 1)),
            }
        }
        out
    }

    pub fn to_presentation(&self) -> Presentation {
        let mut entries = vec![vec![Poly::zero(); self.cols]; self.rows];
        for (i, f) in self.entries.iter().enumerate() {
            entries[i][i] = f.clone();
        }
        Presentation::new(entries).unwrap_or_else(|_| Presentation::free(self.rows))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagonalization {
    Diagonal(DiagonalForm),
    /// No entry of the remaining block divides all the others. `pivots` are
    /// the entries already split off.
    Obstruction {
        pivots: Vec<Poly>,
        block: Presentation,
    },
}

struct Work {
    m: Vec<Vec<Poly>>,
    ops: Vec<String>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.m.swap(i, j);
            self.ops.push(format!("swap rows {} {}", i + 1, j + 1));
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in &mut self.m {
                r.swap(i, j);
            }
            self.ops.push(format!("swap cols {} {}", i + 1, j + 1));
        }
    }

    /// row i -= c * row j
    fn sub_row(&mut self, i: usize, j: usize, c: &Poly) {
        if c.is_zero() {
            return;
        }
        let src = self.m[j].clone();
        for (x, s) in self.m[i].iter_mut().zip(src.iter()) {
            *x = &*x - &(c * s);
        }
        self.ops
            .push(format!("row {} -= ({c}) * row {}", i + 1, j + 1));
    }

    /// col i -= c * col j
    fn sub_col(&mut self, i: usize, j: usize, c: &Poly) {
        if c.is_zero() {
            return;
        }
        for r in &mut self.m {
            let v = &r[i] - &(c * &r[j]);
            r[i] = v;
        }
        self.ops
            .push(format!("col {} -= ({c}) * col {}", i + 1, j + 1));
    }

    fn cells(&self, t: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.m.first().map_or(0, Vec::len);
        (t..self.m.len()).flat_map(move |i| (t..cols).map(move |j| (i, j)))
    }

    /// First entry, row-major, dividing every entry of the block at `t`.
    fn dividing_entry(&self, t: usize) -> Option<(usize, usize)> {
        self.cells(t).find(|&(i, j)| {
            let e = &self.m[i][j];
            !e.is_zero() && self.cells(t).all(|(k, l)| e.divides(&self.m[k][l]))
        })
    }

    /// One Euclidean step in a univariate block: lowers the minimal degree
    /// of the non-zero entries.
    fn euclid_step(&mut self, t: usize, var: &str) {
        let deg = |p: &Poly| p.total_degree();
        let (pi, pj) = self
            .cells(t)
            .filter(|&(i, j)| !self.m[i][j].is_zero())
            .min_by_key(|&(i, j)| deg(&self.m[i][j]))
            .expect("non-zero block");
        let pivot = self.m[pi][pj].clone();
        let (i, j) = self
            .cells(t)
            .find(|&(i, j)| !pivot.divides(&self.m[i][j]))
            .expect("some entry is not divisible");
        let quotient = |p: &Poly| {
            let (q, _) = UniPoly::from_poly(p, var)
                .unwrap()
                .div_rem(&UniPoly::from_poly(&pivot, var).unwrap());
            q.to_poly(var)
        };
        if j == pj {
            let q = quotient(&self.m[i][j]);
            self.sub_row(i, pi, &q);
            return;
        }
        if i != pi {
            self.sub_row(pi, i, &Poly::integer(-1));
        }
        let q = quotient(&self.m[pi][j]);
        self.sub_col(j, pj, &q);
    }
}

/// Splits off pivots that divide their whole remaining block, clearing the
/// pivot row and column by exact division. A univariate block without such
/// an entry is first reduced by Euclidean steps, so it never obstructs.
pub fn diagonalize_local(a: &Presentation) -> Diagonalization {
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = Work {
        m: a.entries().to_vec(),
        ops: Vec::new(),
    };
    let mut pivots: Vec<Poly> = Vec::new();
    for t in 0..rows.min(cols) {
        if w.cells(t).all(|(i, j)| w.m[i][j].is_zero()) {
            break;
        }
        let (pi, pj) = loop {
            if let Some(found) = w.dividing_entry(t) {
                break found;
            }
            let block: Vec<&Poly> = w.cells(t).map(|(i, j)| &w.m[i][j]).collect();
            match common_variable(block) {
                Some(Some(v)) => w.euclid_step(t, &v),
                _ => {
                    let block = w.m[t..].iter().map(|r| r[t..].to_vec()).collect();
                    return Diagonalization::Obstruction {
                        pivots,
                        block: Presentation::new(block).expect("non-empty block"),
                    };
                }
            }
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        let pivot = w.m[t][t].clone();
        for i in t + 1..rows {
            let q = w.m[i][t].div_exact(&pivot).expect("pivot divides block");
            w.sub_row(i, t, &q);
        }
        for j in t + 1..cols {
            let q = w.m[t][j].div_exact(&pivot).expect("pivot divides block");
            w.sub_col(j, t, &q);
        }
        pivots.push(pivot);
    }
    let entries = pivots.iter().map(Poly::monic).collect();
    Diagonalization::Diagonal(DiagonalForm {
        entries,
        rows,
        cols,
        ops: w.ops,
    })
}

/// `Ok(None)` when every Fitting ideal is principal, else `Ok(Some(i))` for
/// the first non-principal `F_i`.
pub fn is_diagonal_module(a: &Presentation) -> Result<Option<usize>> {
    let chain = rank_profile(a)?;
    for (i, f) in chain.ideals.iter().enumerate() {
        if !f.is_principal()? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    pub index: usize,
    pub generator: Poly,
}

impl Divisor {
    /// `D_i = (1)`: the graded piece of rank `i` has empty support.
    pub fn is_empty(&self) -> bool {
        self.generator.is_one()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    /// `D_1, ..., D_n`.
    pub divisors: Vec<Divisor>,
    /// `F_0, ..., F_{n-1}` of the torsion part, as products of divisors.
    pub fitting: Vec<Poly>,
}

fn monomial_of(p: &Poly, index: usize) -> Result<Monomial> {
    match p.as_term() {
        Some((_, m)) => Ok(m.clone()),
        None => Err(Error::NonMonomialEntry { index }),
    }
}

/// `D_n = (f_1)`, `D_i = (f_{n-i+1} / f_{n-i})`; checks
/// `F_k = prod_{i>k} D_i^{i-k} = (f_1 ... f_{n-k})` before returning.
pub fn filtration(d: &DiagonalForm) -> Result<Filtration> {
    let f: Vec<Monomial> = d
        .entries
        .iter()
        .enumerate()
        .map(|(i, p)| monomial_of(p, i + 1))
        .collect::<Result<_>>()?;
    let n = f.len();
    let mut gens = vec![Monomial::one(); n + 1];
    for i in 1..=n {
        gens[i] = if i == n {
            f[0].clone()
        } else {
            f[n - i]
                .div(&f[n - i - 1])
                .ok_or(Error::DivisibilityViolation { index: n - i + 1 })?
        };
    }
    let mut fitting = Vec::with_capacity(n);
    for k in 0..n {
        let from_divisors = (k + 1..=n).fold(Monomial::one(), |acc, i| {
            &acc * &gens[i].pow((i - k) as u32)
        });
        let from_entries = f[..n - k].iter().fold(Monomial::one(), |acc, m| &acc * m);
        if from_divisors != from_entries {
            return Err(Error::FiltrationRelation { index: k });
        }
        fitting.push(Poly::from(from_entries));
    }
    let divisors = (1..=n)
        .map(|i| Divisor {
            index: i,
            generator: Poly::from(gens[i].clone()),
        })
        .collect();
    Ok(Filtration { divisors, fitting })
}

/// Ratios as in [`filtration`], for arbitrary non-zero entries.
fn general_divisors(d: &DiagonalForm) -> Vec<Poly> {
    let n = d.entries.len();
    (1..=n)
        .map(|i| {
            if i == n {
                d.entries[0].clone()
            } else {
                d.entries[n - i]
                    .div_exact(&d.entries[n - i - 1])
                    .expect("divisibility chain")
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeComponents {
    /// Rank of the main component, over the whole space.
    pub main_rank: usize,
    /// `(v, rank)`: a component of the given rank over `V(v)`.
    pub torsion: Vec<(String, usize)>,
    /// Divisor indices whose generator is not a monomial; their supports
    /// were not factored.
    pub unsupported: Vec<usize>,
}

/// Components of the abelian cone. Over `V(v)` the fiber rank is the generic
/// rank plus the largest `i` with `v | D_i`.
pub fn cone_components(d: &DiagonalForm) -> ConeComponents {
    let r = d.free_rank();
    let mut ranks: BTreeMap<String, usize> = BTreeMap::new();
    let mut unsupported = Vec::new();
    for (k, g) in general_divisors(d).iter().enumerate() {
        let i = k + 1;
        let (content, rest) = g.split_content().expect("non-zero divisor");
        if !rest.is_constant() {
            unsupported.push(i);
        }
        for v in content.vars() {
            let e = ranks.entry(v.to_string()).or_insert(0);
            *e = (*e).max(r + i);
        }
    }
    ConeComponents {
        main_rank: r,
        torsion: ranks.into_iter().collect(),
        unsupported,
    }
}

/// Fitting ideals of a diagonal form: `F_k = (f_1 ... f_{n-k})` shifted by
/// the free rank.
pub fn diagonal_fitting(d: &DiagonalForm, k: usize) -> IdealGens {
    let r = d.free_rank();
    let n = d.entries.len();
    if k < r {
        return IdealGens::zero();
    }
    let k = k - r;
    if k >= n {
        return IdealGens::unit();
    }
    IdealGens::new([d.entries[..n - k]
        .iter()
        .fold(Poly::one(), |acc, f| &acc * f)])
}
