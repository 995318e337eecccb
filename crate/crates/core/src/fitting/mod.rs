//! Presentation matrices, Fitting ideals, rank profiles and the norm ideal.

mod snf;

pub use snf::{smith_normal_form, SmithForm, SnfRing};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::ideal::IdealGens;
use crate::poly::{Parser, Poly, VarSet};

/// A `q x p` matrix presenting `coker(R^p -> R^q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Poly>>,
}

impl Presentation {
    pub fn new(entries: Vec<Vec<Poly>>) -> Result<Self> {
        let rows = entries.len();
        if rows == 0 {
            return Err(Error::EmptyMatrix);
        }
        let cols = entries[0].len();
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::RaggedMatrix);
        }
        Ok(Presentation {
            rows,
            cols,
            entries,
        })
    }

    /// Square diagonal matrix.
    pub fn diagonal(diag: &[Poly]) -> Self {
        let n = diag.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            diag[i].clone()
                        } else {
                            Poly::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Presentation {
            rows: n,
            cols: n,
            entries,
        }
    }

    /// The free module of rank `q`: a `q x 0` matrix.
    pub fn free(q: usize) -> Self {
        Presentation {
            rows: q,
            cols: 0,
            entries: vec![Vec::new(); q],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    pub fn variables(&self) -> VarSet {
        VarSet::sorted(self.entries.iter().flatten().flat_map(Poly::variables))
    }

    pub fn is_monomial(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|p| p.is_zero() || p.is_monomial())
    }

    /// Entry-wise substitution.
    pub fn base_change(&self, map: &BTreeMap<String, Poly>) -> Presentation {
        Presentation {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|p| p.substitute(map)).collect())
                .collect(),
        }
    }

    /// Block diagonal sum, presenting the direct sum of the cokernels.
    pub fn direct_sum(&self, other: &Presentation) -> Presentation {
        let rows = self.rows + other.rows;
        let cols = self.cols + other.cols;
        let mut entries = vec![vec![Poly::zero(); cols]; rows];
        for (row, src) in entries.iter_mut().zip(&self.entries) {
            row[..self.cols].clone_from_slice(src);
        }
        for (row, src) in entries[self.rows..].iter_mut().zip(&other.entries) {
            row[self.cols..].clone_from_slice(src);
        }
        Presentation {
            rows,
            cols,
            entries,
        }
    }

    /// Submatrix on the given columns, all rows kept.
    pub fn select_columns(&self, cols: &[usize]) -> Presentation {
        Presentation {
            rows: self.rows,
            cols: cols.len(),
            entries: self
                .entries
                .iter()
                .map(|r| cols.iter().map(|&j| r[j].clone()).collect())
                .collect(),
        }
    }

    pub fn render(&self, vars: &VarSet) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|p| p.render(vars)).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }

    /// All `k x k` minors, in lexicographic order of (rows, columns).
    pub fn minors(&self, k: usize) -> Vec<Poly> {
        Minors::new(self).of_size(k)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&self.variables()))
    }
}

/// Parses `[[a, b], [c, d]]`. Rows may be empty (`[[], []]` is `2 x 0`).
pub fn parse_matrix(text: &str, vars: &VarSet) -> Result<Presentation> {
    let mut p = Parser::new(text, Some(vars));
    p.expect('[')?;
    let mut rows = Vec::new();
    if p.peek() != Some(']') {
        loop {
            p.expect('[')?;
            rows.push(p.poly_list(Some(']'))?);
            p.expect(']')?;
            if !p.eat(',') {
                break;
            }
        }
    }
    p.expect(']')?;
    p.finish()?;
    Presentation::new(rows)
}

/// Determinants of square submatrices, memoized on (row set, column set).
pub(crate) struct Minors<'a> {
    a: &'a Presentation,
    memo: HashMap<(u64, u64), Poly>,
}

impl<'a> Minors<'a> {
    pub(crate) fn new(a: &'a Presentation) -> Self {
        assert!(
            a.rows <= 64 && a.cols <= 64,
            "matrix too large for minor enumeration"
        );
        Minors {
            a,
            memo: HashMap::new(),
        }
    }

    /// Cofactor expansion along the lowest selected row.
    pub(crate) fn det(&mut self, rows: u64, cols: u64) -> Poly {
        if rows == 0 {
            return Poly::one();
        }
        if let Some(d) = self.memo.get(&(rows, cols)) {
            return d.clone();
        }
        let r = rows.trailing_zeros() as usize;
        let rest = rows & (rows - 1);
        let mut acc = Poly::zero();
        let mut sign_neg = false;
        let mut cs = cols;
        while cs != 0 {
            let c = cs.trailing_zeros() as usize;
            cs &= cs - 1;
            let e = &self.a.entries[r][c];
            if !e.is_zero() {
                let sub = self.det(rest, cols & !(1u64 << c));
                let term = e * &sub;
                acc = if sign_neg { &acc - &term } else { &acc + &term };
            }
            sign_neg = !sign_neg;
        }
        self.memo.insert((rows, cols), acc.clone());
        acc
    }

    pub(crate) fn of_size(&mut self, k: usize) -> Vec<Poly> {
        let row_sets = subsets(self.a.rows, k);
        let col_sets = subsets(self.a.cols, k);
        let mut out = Vec::with_capacity(row_sets.len() * col_sets.len());
        for &rs in &row_sets {
            for &cs in &col_sets {
                out.push(self.det(rs, cs));
            }
        }
        out
    }
}

/// Bitmasks of the `k`-element subsets of `0..n`, lexicographic by elements.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<u64> {
    fn go(start: usize, n: usize, k: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            go(i + 1, n, k - 1, acc | (1u64 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, 0, &mut out);
    }
    out
}

pub(crate) fn mask_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1u64 << i) != 0).collect()
}

fn fitting_from(minors: &mut Minors<'_>, i: i64) -> IdealGens {
    let a = minors.a;
    let k = a.rows as i64 - i;
    if k <= 0 {
        return IdealGens::unit();
    }
    let k = k as usize;
    if k > a.rows.min(a.cols) {
        return IdealGens::zero();
    }
    IdealGens::new(minors.of_size(k))
}

/// `F_i`: the ideal of `(q - i) x (q - i)` minors.
pub fn fitting_ideal(a: &Presentation, i: i64) -> IdealGens {
    fitting_from(&mut Minors::new(a), i)
}

/// `F_0, ..., F_q` together with the generic and maximal ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FittingChain {
    pub ideals: Vec<IdealGens>,
    pub generic_rank: usize,
    pub maximal_rank: usize,
}

impl FittingChain {
    /// The ideals strictly between the zero ones and the first unit ideal.
    pub fn nontrivial(&self) -> impl Iterator<Item = (usize, &IdealGens)> {
        self.ideals
            .iter()
            .enumerate()
            .take(self.maximal_rank)
            .skip(self.generic_rank)
    }
}

/// Fitting ideals with all ranks; the generic rank needs no unit detection.
pub fn fitting_chain(a: &Presentation) -> Vec<IdealGens> {
    let mut minors = Minors::new(a);
    (0..=a.rows as i64)
        .map(|i| fitting_from(&mut minors, i))
        .collect()
}

pub fn generic_rank(a: &Presentation) -> usize {
    let mut minors = Minors::new(a);
    (0..=a.rows)
        .find(|&i| !fitting_from(&mut minors, i as i64).is_zero())
        .expect("F_q is the unit ideal")
}

pub fn rank_profile(a: &Presentation) -> Result<FittingChain> {
    let ideals = fitting_chain(a);
    let generic_rank = ideals.iter().position(|f| !f.is_zero()).unwrap();
    let mut maximal_rank = a.rows;
    for (i, f) in ideals.iter().enumerate().skip(generic_rank) {
        match f.is_unit() {
            Some(true) => {
                maximal_rank = i;
                break;
            }
            Some(false) => {}
            None => return Err(Error::UnitDetectionUnsupported { index: i }),
        }
    }
    Ok(FittingChain {
        ideals,
        generic_rank,
        maximal_rank,
    })
}

/// The norm ideal with the column subset used to build it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormIdeal {
    pub ideal: IdealGens,
    pub columns: Vec<usize>,
    pub generic_rank: usize,
}

/// Maximal minors of the lexicographically first `q - r` columns whose
/// minor ideal is non-zero, `r` the generic rank.
pub fn norm_ideal(a: &Presentation) -> Result<NormIdeal> {
    let r = generic_rank(a);
    let k = a.rows - r;
    if k == 0 {
        return Ok(NormIdeal {
            ideal: IdealGens::unit(),
            columns: Vec::new(),
            generic_rank: r,
        });
    }
    let mut minors = Minors::new(a);
    let row_sets = subsets(a.rows, k);
    for cs in subsets(a.cols, k) {
        let gens: Vec<Poly> = row_sets.iter().map(|&rs| minors.det(rs, cs)).collect();
        let ideal = IdealGens::new(gens);
        if !ideal.is_zero() {
            return Ok(NormIdeal {
                ideal,
                columns: mask_elements(cs),
                generic_rank: r,
            });
        }
    }
    Err(Error::NoValidColumnSubset { size: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::parse_ideal;

    fn xyz() -> VarSet {
        VarSet::new(["x", "y", "z"]).unwrap()
    }

    fn gamma() -> Presentation {
        parse_matrix("[[y, z, 0], [-x, 0, z]]", &xyz()).unwrap()
    }

    fn ideal(text: &str) -> IdealGens {
        parse_ideal(text, &xyz()).unwrap()
    }

    #[test]
    fn parse_and_render() {
        let a = gamma();
        assert_eq!((a.rows(), a.cols()), (2, 3));
        assert_eq!(a.render(&xyz()), "[[y, z, 0], [-x, 0, z]]");
        let free = parse_matrix("[[], []]", &xyz()).unwrap();
        assert_eq!((free.rows(), free.cols()), (2, 0));
        assert_eq!(
            parse_matrix("[[x], [y, z]]", &xyz()),
            Err(Error::RaggedMatrix)
        );
        assert_eq!(parse_matrix("[]", &xyz()), Err(Error::EmptyMatrix));
        assert!(matches!(
            parse_matrix("[[x]", &xyz()),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn gamma_fitting_ideals() {
        let a = gamma();
        assert_eq!(fitting_ideal(&a, 0), ideal("(x*z, y*z, z^2)"));
        assert_eq!(fitting_ideal(&a, 1), ideal("(x, y, z)"));
        assert_eq!(fitting_ideal(&a, 2), IdealGens::unit());
        assert_eq!(fitting_ideal(&a, -1), IdealGens::zero());
        let chain = rank_profile(&a).unwrap();
        assert_eq!((chain.generic_rank, chain.maximal_rank), (0, 2));
    }

    #[test]
    fn diagonal_and_free_rank_profiles() {
        let v = xyz();
        let diag: Vec<Poly> = ["x", "x", "x*y", "x*y*z"]
            .iter()
            .map(|t| crate::poly::parse_poly(t, &v).unwrap())
            .collect();
        let chain = rank_profile(&Presentation::diagonal(&diag)).unwrap();
        assert_eq!((chain.generic_rank, chain.maximal_rank), (0, 4));
        let chain = rank_profile(&Presentation::free(2)).unwrap();
        assert_eq!((chain.generic_rank, chain.maximal_rank), (2, 2));
    }

    #[test]
    fn unit_detection_can_fail() {
        let v = xyz();
        let a = parse_matrix("[[x, x + y]]", &v).unwrap();
        assert_eq!(
            rank_profile(&a),
            Err(Error::UnitDetectionUnsupported { index: 0 })
        );
        let b = parse_matrix("[[t^2 - 1, t + 1]]", &VarSet::new(["t"]).unwrap()).unwrap();
        assert_eq!(rank_profile(&b).unwrap().maximal_rank, 1);
    }

    #[test]
    fn base_change_of_column() {
        let v = VarSet::new(["e", "x", "y"]).unwrap();
        let a = parse_matrix("[[-y], [x]]", &v).unwrap();
        let map = BTreeMap::from([
            ("x".to_string(), Poly::var("e")),
            ("y".to_string(), crate::poly::parse_poly("e*y", &v).unwrap()),
        ]);
        assert_eq!(
            a.base_change(&map),
            parse_matrix("[[-e*y], [e]]", &v).unwrap()
        );
        assert_eq!(a.base_change(&BTreeMap::new()), a);
    }

    #[test]
    fn norm_examples() {
        let v = xyz();
        let col = parse_matrix("[[-y], [x]]", &v).unwrap();
        let n = norm_ideal(&col).unwrap();
        assert_eq!(n.ideal, ideal("(x, y)"));
        assert_eq!(n.generic_rank, 1);

        // The first column pair of Gamma has the single non-zero minor x*z;
        // any valid choice represents the same fractional ideal.
        let n = norm_ideal(&gamma()).unwrap();
        assert_eq!(n.columns, vec![0, 1]);
        assert_eq!(n.ideal, ideal("(x*z)"));

        let n = norm_ideal(&Presentation::free(2)).unwrap();
        assert_eq!(n.ideal, IdealGens::unit());
    }

    #[test]
    fn subsets_are_lexicographic() {
        let s: Vec<Vec<usize>> = subsets(4, 2).into_iter().map(mask_elements).collect();
        assert_eq!(
            s,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(subsets(2, 3), Vec::<u64>::new());
        assert_eq!(subsets(3, 0), vec![0]);
    }
}
