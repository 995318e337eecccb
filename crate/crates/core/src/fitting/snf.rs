//! Smith normal form over the integers and over `Q[t]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Presentation;
use crate::error::{Error, Result};
use crate::poly::univariate::{common_variable, UniPoly};
use crate::poly::Poly;

/// Euclidean domain operations needed by the reduction.
trait Euclid: Clone + PartialEq {
    type Size: Ord;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn size(&self) -> Self::Size;
    fn div_rem(&self, d: &Self) -> (Self, Self);
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// A unit `u` with `u * self` canonical, and its inverse.
    fn normalizer(&self) -> (Self, Self);
}

impl Euclid for BigInt {
    type Size = BigInt;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn size(&self) -> BigInt {
        self.abs()
    }
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        (self / d, self % d)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn normalizer(&self) -> (Self, Self) {
        if self.is_negative() {
            (BigInt::from(-1), BigInt::from(-1))
        } else {
            (BigInt::from(1), BigInt::from(1))
        }
    }
}

impl Euclid for UniPoly {
    type Size = usize;
    fn zero() -> Self {
        UniPoly::zero()
    }
    fn one() -> Self {
        <UniPoly as One>::one()
    }
    fn is_zero(&self) -> bool {
        UniPoly::is_zero(self)
    }
    fn size(&self) -> usize {
        self.degree().unwrap_or(0)
    }
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        UniPoly::div_rem(self, d)
    }
    fn add(&self, o: &Self) -> Self {
        UniPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        UniPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        UniPoly::mul(self, o)
    }
    fn normalizer(&self) -> (Self, Self) {
        match self.leading() {
            Some(l) => (UniPoly::constant(l.recip()), UniPoly::constant(l.clone())),
            None => (<UniPoly as One>::one(), <UniPoly as One>::one()),
        }
    }
}

type Mat<T> = Vec<Vec<T>>;

fn identity<T: Euclid>(n: usize) -> Mat<T> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

/// Reduces `d` in place, keeping `a = l * d * r`.
struct Reducer<T: Euclid> {
    d: Mat<T>,
    l: Mat<T>,
    r: Mat<T>,
}

impl<T: Euclid> Reducer<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.d.swap(i, j);
        for row in &mut self.l {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.d {
            row.swap(i, j);
        }
        self.r.swap(i, j);
    }

    /// row i += c * row j
    fn add_row(&mut self, i: usize, j: usize, c: &T) {
        for k in 0..self.d[0].len() {
            let v = self.d[i][k].add(&c.mul(&self.d[j][k]));
            self.d[i][k] = v;
        }
        for row in &mut self.l {
            let v = row[j].sub(&c.mul(&row[i]));
            row[j] = v;
        }
    }

    /// col i += c * col j
    fn add_col(&mut self, i: usize, j: usize, c: &T) {
        for row in &mut self.d {
            let v = row[i].add(&c.mul(&row[j]));
            row[i] = v;
        }
        for k in 0..self.r[0].len() {
            let v = self.r[j][k].sub(&c.mul(&self.r[i][k]));
            self.r[j][k] = v;
        }
    }

    /// row i *= u, where `u_inv` is the inverse unit.
    fn scale_row(&mut self, i: usize, u: &T, u_inv: &T) {
        for k in 0..self.d[0].len() {
            let v = self.d[i][k].mul(u);
            self.d[i][k] = v;
        }
        for row in &mut self.l {
            let v = row[i].mul(u_inv);
            row[i] = v;
        }
    }

    fn run(&mut self) {
        let (m, n) = (self.d.len(), self.d.first().map_or(0, Vec::len));
        for t in 0..m.min(n) {
            loop {
                let pivot = (t..m)
                    .flat_map(|i| (t..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| !self.d[i][j].is_zero())
                    .min_by_key(|&(i, j)| self.d[i][j].size());
                let Some((pi, pj)) = pivot else { return };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                let mut clean = true;
                for i in t + 1..m {
                    if !self.d[i][t].is_zero() {
                        let (q, rem) = self.d[i][t].div_rem(&self.d[t][t]);
                        self.add_row(i, t, &T::zero().sub(&q));
                        clean &= rem.is_zero();
                    }
                }
                for j in t + 1..n {
                    if !self.d[t][j].is_zero() {
                        let (q, rem) = self.d[t][j].div_rem(&self.d[t][t]);
                        self.add_col(j, t, &T::zero().sub(&q));
                        clean &= rem.is_zero();
                    }
                }
                if !clean {
                    continue;
                }
                let bad = (t + 1..m).find(|&i| {
                    (t + 1..n).any(|j| !self.d[i][j].div_rem(&self.d[t][t]).1.is_zero())
                });
                match bad {
                    Some(i) => self.add_row(t, i, &T::one()),
                    None => break,
                }
            }
            let (u, u_inv) = self.d[t][t].normalizer();
            self.scale_row(t, &u, &u_inv);
        }
    }
}

fn reduce<T: Euclid>(a: Mat<T>, cols: usize) -> Reducer<T> {
    let rows = a.len();
    let mut red = Reducer {
        d: a,
        l: identity(rows),
        r: identity(cols),
    };
    if cols > 0 {
        red.run();
    }
    red
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SnfRing {
    Integers,
    /// Polynomials in one variable over the rationals; `None` when every
    /// entry is a constant.
    Univariate(Option<String>),
}

/// `a = left * diag * right`, with `left`, `right` invertible and the
/// diagonal entries forming a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub ring: SnfRing,
    /// `min(q, p)` entries, trailing zeros included.
    pub diagonal: Vec<Poly>,
    pub left: Vec<Vec<Poly>>,
    pub right: Vec<Vec<Poly>>,
}

impl SmithForm {
    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> Vec<Vec<Poly>> {
        (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| {
                        if i == j {
                            self.diagonal[i].clone()
                        } else {
                            Poly::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Checks `left * D * right == a` by multiplication.
    pub fn verify(&self, a: &Presentation) -> bool {
        let d = self.diagonal_matrix(a.rows(), a.cols());
        let prod = mat_mul(&mat_mul(&self.left, &d, a.cols()), &self.right, a.cols());
        prod == a.entries()
    }
}

pub(crate) fn mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>], b_cols: usize) -> Vec<Vec<Poly>> {
    a.iter()
        .map(|row| {
            (0..b_cols)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(Poly::zero(), |acc, (x, brow)| &acc + &(x * &brow[j]))
                })
                .collect()
        })
        .collect()
}

fn as_integer(p: &Poly) -> Option<BigInt> {
    let c = p.constant_value()?;
    c.is_integer().then(|| c.to_integer())
}

pub fn smith_normal_form(a: &Presentation) -> Result<SmithForm> {
    let flat: Vec<&Poly> = a.entries().iter().flatten().collect();
    let ints: Option<Vec<BigInt>> = flat.iter().map(|p| as_integer(p)).collect();
    if ints.is_some() {
        let m: Mat<BigInt> = a
            .entries()
            .iter()
            .map(|r| r.iter().map(|p| as_integer(p).unwrap()).collect())
            .collect();
        let red = reduce(m, a.cols());
        let lift = |x: &BigInt| Poly::constant(BigRational::from_integer(x.clone()));
        return Ok(finish(&red, a, SnfRing::Integers, lift));
    }
    let var = match common_variable(flat.iter().copied()) {
        Some(v) => v,
        None => {
            let vars = a.variables().names().to_vec();
            return Err(Error::MixedVariables(vars));
        }
    };
    let name = var.clone().unwrap_or_else(|| "t".into());
    let m: Mat<UniPoly> = a
        .entries()
        .iter()
        .map(|r| {
            r.iter()
                .map(|p| UniPoly::from_poly(p, &name).expect("univariate entry"))
                .collect()
        })
        .collect();
    let red = reduce(m, a.cols());
    Ok(finish(&red, a, SnfRing::Univariate(var), |u: &UniPoly| {
        u.to_poly(&name)
    }))
}

fn finish<T: Euclid>(
    red: &Reducer<T>,
    a: &Presentation,
    ring: SnfRing,
    lift: impl Fn(&T) -> Poly,
) -> SmithForm {
    let conv = |m: &Mat<T>| -> Vec<Vec<Poly>> {
        m.iter().map(|r| r.iter().map(&lift).collect()).collect()
    };
    let n = a.rows().min(a.cols());
    SmithForm {
        ring,
        diagonal: (0..n).map(|i| lift(&red.d[i][i])).collect(),
        left: conv(&red.l),
        right: conv(&red.r),
    }
}
