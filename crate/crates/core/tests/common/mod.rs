//! Shared generators, brute-force oracles and property checks. The checks
//! return `Err(description)` on the first counterexample so both the plain
//! test targets and the acceptance runner can use them.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fitting_forge::blowup::{huli_driver, NodeStatus};
use fitting_forge::diagonal::{
    cone_components, diagonalize_local, filtration, is_diagonal_module, DiagonalForm,
    Diagonalization,
};
use fitting_forge::error::Error;
use fitting_forge::fitting::{fitting_ideal, smith_normal_form, Presentation};
use fitting_forge::ideal::{IdealGens, MonomialIdeal};
use fitting_forge::poly::{Monomial, Poly, VarSet};
use fitting_forge::tree::{check_advancing_identity, vz_process, Vertex, WTree};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn vars(names: &[&str]) -> VarSet {
    VarSet::new(names.iter().copied()).unwrap()
}

// ---------------------------------------------------------------- generators

pub fn random_monomial(r: &mut ChaCha8Rng, names: &[&str], max_deg: u32) -> Monomial {
    let pairs: Vec<(&str, u32)> = names
        .iter()
        .map(|v| (*v, r.gen_range(0..=max_deg)))
        .collect();
    Monomial::from_pairs(pairs)
}

/// Entries are zero or `c * m` with `c` in {1, -1, 2}.
pub fn random_monomial_matrix(
    r: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    names: &[&str],
    max_deg: u32,
) -> Presentation {
    let entries = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if r.gen_ratio(1, 4) {
                        Poly::zero()
                    } else {
                        let c = [1, -1, 2][r.gen_range(0..3)];
                        Poly::term(q(c), random_monomial(r, names, max_deg))
                    }
                })
                .collect()
        })
        .collect();
    Presentation::new(entries).unwrap()
}

pub fn random_unipoly(r: &mut ChaCha8Rng, t: &str, max_deg: u32) -> Poly {
    let mut terms = Vec::new();
    for e in 0..=max_deg {
        if r.gen_bool(0.6) {
            terms.push((Monomial::var_pow(t, e), q(r.gen_range(-3..=3))));
        }
    }
    Poly::from_terms(terms)
}

/// Random matrix over Q[t]; entry (0, 0) always involves `t`.
pub fn random_univariate_matrix(
    r: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    max_deg: u32,
) -> Presentation {
    let mut entries: Vec<Vec<Poly>> = (0..rows)
        .map(|_| (0..cols).map(|_| random_unipoly(r, "t", max_deg)).collect())
        .collect();
    if !entries[0][0].variables().contains("t") {
        entries[0][0] = &entries[0][0] + &Poly::var("t");
    }
    Presentation::new(entries).unwrap()
}

/// Replaces non-zero constant entries by a random variable.
pub fn non_constant(r: &mut ChaCha8Rng, a: Presentation, names: &[&str]) -> Presentation {
    let entries = a
        .entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| {
                    if p.is_constant() && !p.is_zero() {
                        Poly::var(names[r.gen_range(0..names.len())])
                    } else {
                        p.clone()
                    }
                })
                .collect()
        })
        .collect();
    Presentation::new(entries).unwrap()
}

/// `f_1 | f_2 | ... | f_n`, monomials.
pub fn random_chain(r: &mut ChaCha8Rng, n: usize, names: &[&str]) -> Vec<Poly> {
    let mut f = random_monomial(r, names, 1);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(Poly::from(f.clone()));
        f = &f * &random_monomial(r, names, 1);
    }
    out
}

// ------------------------------------------------------------------- oracles

/// Determinant by the Leibniz formula.
pub fn leibniz(m: &[Vec<Poly>]) -> Poly {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut p2 = p.clone();
                p2.insert(pos, n - 1);
                out.push(p2);
            }
        }
        out
    }
    let n = m.len();
    let mut det = Poly::zero();
    for p in perms(n) {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        let mut term = if inversions % 2 == 0 {
            Poly::one()
        } else {
            Poly::integer(-1)
        };
        for (i, &j) in p.iter().enumerate() {
            term = &term * &m[i][j];
        }
        det = &det + &term;
    }
    det
}

pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in k_subsets(n - first - 1, k - 1) {
            let mut s = vec![first];
            s.extend(rest.into_iter().map(|x| x + first + 1));
            out.push(s);
        }
    }
    out
}

pub fn submatrix(a: &Presentation, rows: &[usize], cols: &[usize]) -> Vec<Vec<Poly>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| a.entry(i, j).clone()).collect())
        .collect()
}

pub fn oracle_minors(a: &Presentation, k: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    for rs in k_subsets(a.rows(), k) {
        for cs in k_subsets(a.cols(), k) {
            out.push(leibniz(&submatrix(a, &rs, &cs)));
        }
    }
    out
}

/// `F_i` from Leibniz minors, with the `q - i <= 0` and `q - i > min` conventions.
pub fn oracle_fitting(a: &Presentation, i: usize) -> IdealGens {
    let qm = a.rows();
    if i >= qm {
        return IdealGens::unit();
    }
    let k = qm - i;
    if k > a.cols() {
        return IdealGens::zero();
    }
    IdealGens::new(oracle_minors(a, k))
}

/// Dense coefficients of a polynomial in `t`, lowest degree first.
pub fn dense(p: &Poly, t: &str) -> Vec<BigRational> {
    let deg = p.terms().map(|(m, _)| m.exponent(t)).max().unwrap_or(0) as usize;
    let mut out = vec![BigRational::zero(); deg + 1];
    for (m, c) in p.terms() {
        out[m.exponent(t) as usize] = c.clone();
    }
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

fn dense_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() {
        let c = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &c * bi;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// Monic gcd of univariate polynomials in `t` by the Euclidean algorithm on
/// dense coefficient vectors; zero when all inputs vanish.
pub fn oracle_gcd(polys: &[Poly], t: &str) -> Poly {
    let mut g: Vec<BigRational> = Vec::new();
    for p in polys {
        let mut a = g;
        let mut b = dense(p, t);
        while !b.is_empty() {
            let r = dense_rem(&a, &b);
            a = b;
            b = r;
        }
        g = a;
    }
    let Some(lead) = g.last().cloned() else {
        return Poly::zero();
    };
    Poly::from_terms(
        g.iter()
            .enumerate()
            .map(|(e, c)| (Monomial::var_pow(t, e as u32), c / &lead)),
    )
}

pub fn evaluate(p: &Poly, point: &BTreeMap<String, BigRational>) -> BigRational {
    p.terms().fold(BigRational::zero(), |acc, (m, c)| {
        let v = m.iter().fold(c.clone(), |acc, (x, e)| {
            let base = point.get(x).cloned().unwrap_or_else(BigRational::zero);
            (0..e).fold(acc, |acc, _| acc * &base)
        });
        acc + v
    })
}

/// Rank over Q by Gaussian elimination.
#[allow(clippy::needless_range_loop)]
pub fn rank_q(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in 0..rows {
            if i != rank && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[rank][c];
                for j in c..cols {
                    let d = &f * &m[rank][j];
                    m[i][j] = &m[i][j] - &d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Fiber dimension `q - rank A(p)` of the cokernel at a generic point of
/// `V(zero_var)` (or of the whole space when `zero_var` is `None`),
/// the other coordinates set to distinct primes.
pub fn fiber_rank(a: &Presentation, names: &[&str], zero_var: Option<&str>) -> usize {
    let primes = [101, 103, 107, 109, 113, 127];
    let point: BTreeMap<String, BigRational> = names
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let val = if Some(*v) == zero_var {
                q(0)
            } else {
                q(primes[i])
            };
            (v.to_string(), val)
        })
        .collect();
    let m = a
        .entries()
        .iter()
        .map(|r| r.iter().map(|p| evaluate(p, &point)).collect())
        .collect();
    a.rows() - rank_q(m)
}

/// Monomials with every exponent at most `bound`.
pub fn box_monomials(names: &[&str], bound: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for v in names {
        out = out
            .into_iter()
            .flat_map(|m| (0..=bound).map(move |e| &m * &Monomial::var_pow(v, e)))
            .collect();
    }
    out
}

fn in_monomial_ideal(gens: &[Monomial], m: &Monomial) -> bool {
    gens.iter().any(|g| g.divides(m))
}

// ------------------------------------------------------------ property checks

fn fail<T: std::fmt::Debug>(what: &str, case: T) -> String {
    format!("{what}: {case:?}")
}

/// Fitting ideals agree with Leibniz minors, `F_i` is contained in `F_{i+1}`
/// (checked by Laplace expansion), and fitting commutes with base change.
pub fn check_chain_and_base_change(cases: usize, seed: u64) -> Check {
    let names = ["x", "y", "z"];
    let mut r = rng(seed);
    for case in 0..cases {
        let (rows, cols) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let a = random_monomial_matrix(&mut r, rows, cols, &names, 2);
        for i in 0..=rows {
            let lib = fitting_ideal(&a, i as i64);
            if lib != oracle_fitting(&a, i) {
                return Err(fail("fitting vs minors", (case, &a, i)));
            }
        }
        for i in 0..rows {
            let k = rows - i;
            if k > cols {
                continue;
            }
            let next = fitting_ideal(&a, i as i64 + 1);
            for rs in k_subsets(rows, k) {
                for cs in k_subsets(cols, k) {
                    let minor = leibniz(&submatrix(&a, &rs, &cs));
                    let mut expansion = Poly::zero();
                    for (j, &c) in cs.iter().enumerate() {
                        let rest_c: Vec<usize> = cs.iter().copied().filter(|&x| x != c).collect();
                        let sub = leibniz(&submatrix(&a, &rs[1..], &rest_c));
                        let term = a.entry(rs[0], c) * &sub;
                        expansion = if j % 2 == 0 {
                            &expansion + &term
                        } else {
                            &expansion - &term
                        };
                    }
                    if expansion != minor {
                        return Err(fail("laplace expansion", (case, &a, &rs, &cs)));
                    }
                    if next.contains(&minor) == Some(false) {
                        return Err(fail("F_i not inside F_{i+1}", (case, &a, i)));
                    }
                }
            }
        }
        let mut map = BTreeMap::new();
        for v in names {
            let image = match r.gen_range(0..5) {
                0 => Poly::var(v),
                1 => Poly::zero(),
                2 => Poly::one(),
                3 => Poly::from(&Monomial::var(v) * &Monomial::var(names[r.gen_range(0..3)])),
                _ => Poly::var(names[r.gen_range(0..3)]),
            };
            map.insert(v.to_string(), image);
        }
        let b = a.base_change(&map);
        for i in 0..=rows {
            let lib = fitting_ideal(&b, i as i64);
            let k = rows - i;
            let expected = if i >= rows {
                IdealGens::unit()
            } else if k > cols {
                IdealGens::zero()
            } else {
                IdealGens::new(oracle_minors(&a, k).iter().map(|m| m.substitute(&map)))
            };
            if lib != expected {
                return Err(fail("base change", (case, &a, &map, i)));
            }
            let fa = fitting_ideal(&a, i as i64);
            if fa.is_monomial() && lib != fa.substitute(&map) {
                return Err(fail("base change of monomial F_i", (case, &a, &map, i)));
            }
        }
    }
    Ok(())
}

/// Elementary row and column operations leave every Fitting ideal unchanged.
pub fn check_row_col_invariance(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for case in 0..cases {
        let (rows, cols) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let a = random_univariate_matrix(&mut r, rows, cols, 2);
        let mut m: Vec<Vec<Poly>> = a.entries().to_vec();
        for _ in 0..4 {
            let c = random_unipoly(&mut r, "t", 1);
            match r.gen_range(0..4) {
                0 if rows > 1 => {
                    let (i, j) = (r.gen_range(0..rows), r.gen_range(0..rows));
                    if i != j {
                        let add: Vec<Poly> = m[j].iter().map(|x| &c * x).collect();
                        for (x, y) in m[i].iter_mut().zip(add) {
                            *x = &*x + &y;
                        }
                    }
                }
                1 if cols > 1 => {
                    let (i, j) = (r.gen_range(0..cols), r.gen_range(0..cols));
                    if i != j {
                        for row in m.iter_mut() {
                            let add = &c * &row[j];
                            row[i] = &row[i] + &add;
                        }
                    }
                }
                2 => {
                    let (i, j) = (r.gen_range(0..rows), r.gen_range(0..rows));
                    m.swap(i, j);
                }
                _ => {
                    let i = r.gen_range(0..cols);
                    for row in m.iter_mut() {
                        row[i] = row[i].scale(&q(-2));
                    }
                }
            }
        }
        let b = Presentation::new(m).unwrap();
        for i in 0..=rows {
            if fitting_ideal(&a, i as i64) != fitting_ideal(&b, i as i64) {
                return Err(fail("row/col invariance", (case, &a, &b, i)));
            }
        }
    }
    Ok(())
}

/// The product of the first `k` Smith entries is the gcd of the `k x k`
/// minors.
pub fn check_snf_divisors(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for case in 0..cases {
        let (rows, cols) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let a = random_univariate_matrix(&mut r, rows, cols, 2);
        let s = smith_normal_form(&a).map_err(|e| fail("snf error", (case, &a, e)))?;
        if !s.verify(&a) {
            return Err(fail("A != L D R", (case, &a)));
        }
        let mut prod = Poly::one();
        for k in 1..=rows.min(cols) {
            prod = &prod * &s.diagonal[k - 1];
            let expected = oracle_gcd(&oracle_minors(&a, k), "t");
            if prod.monic() != expected {
                return Err(fail("determinantal divisor", (case, &a, k, &s.diagonal)));
            }
        }
    }
    Ok(())
}

/// `diagonalize_local` succeeds exactly when every Fitting ideal is
/// principal, and its entries are the non-zero Smith entries.
pub fn check_diagonalize_vs_principal(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for case in 0..cases {
        let (rows, cols) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let a = random_univariate_matrix(&mut r, rows, cols, 2);
        let principal = is_diagonal_module(&a).map_err(|e| fail("principality", (case, &a, e)))?;
        let d = diagonalize_local(&a);
        let s = smith_normal_form(&a).map_err(|e| fail("snf error", (case, &a, e)))?;
        match (&d, principal) {
            (Diagonalization::Diagonal(d), None) => {
                let snf: Vec<Poly> = s
                    .diagonal
                    .iter()
                    .filter(|p| !p.is_zero())
                    .map(Poly::monic)
                    .collect();
                if d.entries != snf {
                    return Err(fail("diagonal vs snf", (case, &a, &d.entries, &snf)));
                }
                for i in 0..=rows {
                    let from_diag = fitting_ideal(&d.to_presentation(), i as i64);
                    if from_diag != fitting_ideal(&a, i as i64) {
                        return Err(fail("diagonal form fitting", (case, &a, i)));
                    }
                }
            }
            _ => return Err(fail("diagonalize <=> principal", (case, &a, principal))),
        }
    }
    Ok(())
}

/// `F_k(A + B) = sum over i + j = k of F_i(A) F_j(B)`.
pub fn check_direct_sum(cases: usize, seed: u64) -> Check {
    let names = ["x", "y", "z"];
    let mut r = rng(seed);
    let diag = |r: &mut ChaCha8Rng| {
        let n = r.gen_range(1..=3);
        let entries: Vec<Poly> = (0..n)
            .map(|_| Poly::from(random_monomial(r, &names, 2)))
            .collect();
        let d = Presentation::diagonal(&entries);
        if r.gen_ratio(1, 3) {
            d.direct_sum(&Presentation::free(1))
        } else {
            d
        }
    };
    for case in 0..cases {
        let a = diag(&mut r);
        let b = diag(&mut r);
        let s = a.direct_sum(&b);
        for k in 0..=s.rows() {
            let mut gens = Vec::new();
            for i in 0..=k {
                let fi = fitting_ideal(&a, i as i64);
                let fj = fitting_ideal(&b, (k - i) as i64);
                gens.extend(fi.product(&fj).gens().iter().cloned());
            }
            if fitting_ideal(&s, k as i64) != IdealGens::new(gens) {
                return Err(fail("direct sum", (case, &a, &b, k)));
            }
        }
    }
    Ok(())
}

/// `F_k = prod_{i>k} D_i^{i-k}` against minors of the diagonal matrix, for
/// chains of every length up to `max_len`.
pub fn check_filtration_relation(per_len: usize, max_len: usize, seed: u64) -> Check {
    let names = ["x", "y", "z"];
    let mut r = rng(seed);
    for n in 1..=max_len {
        for case in 0..per_len {
            let chain = random_chain(&mut r, n, &names);
            let d = DiagonalForm::from_entries(chain.clone()).unwrap();
            let f = filtration(&d).map_err(|e| fail("filtration", (&chain, e)))?;
            let pres = d.to_presentation();
            for k in 0..n {
                let product = f.divisors[k..].iter().fold(Poly::one(), |acc, dv| {
                    &acc * &dv.generator.pow((dv.index - k) as u32)
                });
                let minors = fitting_ideal(&pres, k as i64);
                if IdealGens::new([product.clone()]) != minors || f.fitting[k] != product {
                    return Err(fail("F_k relation", (n, case, &chain, k)));
                }
            }
        }
    }
    Ok(())
}

/// Component ranks against the fiber dimension at generic points of each
/// coordinate hyperplane.
pub fn check_cone_restriction(cases: usize, seed: u64) -> Check {
    let names = ["x", "y", "z"];
    let mut r = rng(seed);
    for case in 0..cases {
        let n = r.gen_range(1..=4);
        let chain = random_chain(&mut r, n, &names);
        let mut d = DiagonalForm::from_entries(chain.clone()).unwrap();
        d.rows += r.gen_range(0..=1);
        let c = cone_components(&d);
        let pres = d.to_presentation();
        let main = fiber_rank(&pres, &names, None);
        let mut expected = Vec::new();
        for v in names {
            let rank = fiber_rank(&pres, &names, Some(v));
            if rank > main {
                expected.push((v.to_string(), rank));
            }
        }
        if c.main_rank != main || c.torsion != expected {
            return Err(fail(
                "cone components",
                (case, &chain, d.rows, &c, main, &expected),
            ));
        }
    }
    Ok(())
}

/// `(I : J)` against enumeration of a monomial box.
pub fn check_colon(cases: usize, seed: u64) -> Check {
    let names = ["x", "y", "z"];
    let mut r = rng(seed);
    for case in 0..cases {
        let gen_ideal = |r: &mut ChaCha8Rng| -> Vec<Monomial> {
            let k = r.gen_range(1..=3);
            (0..k).map(|_| random_monomial(r, &names, 2)).collect()
        };
        let ig = gen_ideal(&mut r);
        let jg = gen_ideal(&mut r);
        let i = MonomialIdeal::new(ig.clone());
        let j = MonomialIdeal::new(jg.clone());
        let colon = i.colon(&j).map_err(|e| fail("colon", (case, e)))?;
        for m in box_monomials(&names, 4) {
            let expected = jg.iter().all(|g| in_monomial_ideal(&ig, &(&m * g)));
            if colon.contains(&m) != expected {
                return Err(fail("colon membership", (case, &ig, &jg, &m)));
            }
        }
    }
    Ok(())
}

/// Every leaf of the chart tree is certified or reports an unsupported
/// center within the round budget, and certified leaves carry a diagonal
/// form with the same Fitting ideals as the chart's presentation. Inputs
/// whose unit detection is undecidable are skipped; at least half must run.
pub fn check_huli_termination(cases: usize, seed: u64) -> Check {
    let names = ["x", "y", "z"];
    let vs = vars(&names);
    let mut r = rng(seed);
    let mut skipped = 0;
    for case in 0..cases {
        let (rows, cols) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let a = random_monomial_matrix(&mut r, rows, cols, &names, 1);
        let a = non_constant(&mut r, a, &names);
        let t = match huli_driver(&a, &vs, 8) {
            Ok(t) => t,
            Err(Error::UnitDetectionUnsupported { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(fail("huli error", (case, &a, e))),
        };
        for leaf in t.root.leaves() {
            match (&leaf.status, &leaf.diagonal) {
                (NodeStatus::DiagonalCertified, Some(d)) => {
                    for i in 0..=rows {
                        let lhs =
                            fitting_ideal(&d.to_presentation(), i as i64).principal_generator();
                        let rhs = oracle_fitting(&leaf.presentation, i).principal_generator();
                        if lhs.is_err() || lhs != rhs {
                            return Err(fail(
                                "certified leaf fitting",
                                (case, &a, leaf.chart.labels()),
                            ));
                        }
                    }
                }
                (NodeStatus::UnsupportedCenter(_), _) => {}
                _ => return Err(fail("open leaf", (case, &a, leaf.chart.labels()))),
            }
        }
    }
    if 2 * skipped > cases {
        return Err(format!("{skipped} of {cases} inputs skipped"));
    }
    Ok(())
}

// -------------------------------------------------------------------- trees

/// Unlabeled rooted forests with exactly `n` vertices in which every
/// non-leaf vertex has at least two children, as canonical nested vectors.
fn shapes(n: usize) -> Vec<Vec<Shape>> {
    fn forests(
        n: usize,
        max: Option<&Shape>,
        memo: &mut BTreeMap<usize, Vec<Shape>>,
    ) -> Vec<Vec<Shape>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for size in 1..=n {
            for t in trees(size, memo) {
                if max.is_some_and(|m| &t > m) {
                    continue;
                }
                for mut rest in forests(n - size, Some(&t), memo) {
                    rest.insert(0, t.clone());
                    out.push(rest);
                }
            }
        }
        out
    }
    fn trees(n: usize, memo: &mut BTreeMap<usize, Vec<Shape>>) -> Vec<Shape> {
        if let Some(v) = memo.get(&n) {
            return v.clone();
        }
        let mut out = vec![];
        if n == 1 {
            out.push(Shape(Vec::new()));
        } else {
            for f in forests(n - 1, None, memo) {
                if f.len() >= 2 {
                    out.push(Shape(f));
                }
            }
        }
        memo.insert(n, out.clone());
        out
    }
    let mut memo = BTreeMap::new();
    forests(n, None, &mut memo)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Shape(Vec<Shape>);

fn label_forest(forest: &[Shape], next: &mut u8, weights: &mut dyn FnMut() -> u64) -> Vec<Vertex> {
    forest
        .iter()
        .map(|s| {
            let label = ((b'a' + *next) as char).to_string();
            *next += 1;
            let children = label_forest(&s.0, next, weights);
            let weight = if children.is_empty() { weights() } else { 0 };
            Vertex {
                label,
                weight,
                children,
            }
        })
        .collect()
}

/// Canonical shapes of all forests on `n` labeled vertices given by parent
/// arrays (`parent[i] < i` or none), kept when every internal vertex has at
/// least two children.
pub fn shapes_by_parent_arrays(n: usize) -> std::collections::BTreeSet<Vec<Shape>> {
    fn build(i: Option<usize>, parent: &[Option<usize>]) -> Vec<Shape> {
        let mut out: Vec<Shape> = (0..parent.len())
            .filter(|&c| parent[c] == i)
            .map(|c| Shape(build(Some(c), parent)))
            .collect();
        out.sort_by(|a, b| b.cmp(a));
        out
    }
    fn ok(s: &[Shape]) -> bool {
        s.iter()
            .all(|t| (t.0.is_empty() || t.0.len() >= 2) && ok(&t.0))
    }
    let mut out = std::collections::BTreeSet::new();
    let mut parent = vec![None; n];
    fn go(
        i: usize,
        parent: &mut Vec<Option<usize>>,
        out: &mut std::collections::BTreeSet<Vec<Shape>>,
    ) {
        if i == parent.len() {
            let f = build(None, parent);
            if ok(&f) {
                out.insert(f);
            }
            return;
        }
        for p in std::iter::once(None).chain((0..i).map(Some)) {
            parent[i] = p;
            go(i + 1, parent, out);
        }
    }
    go(0, &mut parent, &mut out);
    out
}

pub fn canonical_shapes(n: usize) -> std::collections::BTreeSet<Vec<Shape>> {
    shapes(n).into_iter().collect()
}

/// Every semistable terminally weighted rooted tree with `1..=max` non-root
/// vertices (internal non-root vertices have at least two children); leaf
/// weights cycle through 1, 2, 3.
pub fn semistable_trees(max: usize) -> Vec<WTree> {
    let mut out = Vec::new();
    let mut w = 0u64;
    for n in 1..=max {
        for forest in shapes(n) {
            let mut next = 0u8;
            let mut weights = || {
                w += 1;
                (w - 1) % 3 + 1
            };
            let children = label_forest(&forest, &mut next, &mut weights);
            out.push(
                WTree::new(Vertex {
                    label: "o".into(),
                    weight: 0,
                    children,
                })
                .unwrap(),
            );
        }
    }
    out
}

/// Pulled-back `J` of every chart equals `J` of the chart's tree, and so
/// does `Phi` away from path trees (pruning drops terms there); terminal charts are principal and snc; the advancing identity holds
/// at every non-path transform; advancing preserves the total weight.
pub fn check_tree(g: &WTree, max_depth: usize) -> Check {
    let r = vz_process(g, max_depth).map_err(|e| fail("vz_process", (g.to_string(), e)))?;
    for n in r.nodes() {
        let name = (g.to_string(), n.labels());
        let phi = n.phi.1.mul_monomial(&n.phi.0);
        if !n.path_tree && phi != n.tree.phi() {
            return Err(fail("phi pullback", name));
        }
        let j =
            n.j.residual
                .product(&IdealGens::from(MonomialIdeal::principal(
                    n.j.monomial.clone(),
                )));
        if j != IdealGens::from(n.tree.j_ideal()) {
            return Err(fail("J pullback", name));
        }
        if n.path_tree != n.children.is_empty() {
            return Err(fail("leaf iff path tree", name));
        }
        for (a, t) in n.tree.monoidal_transforms() {
            if t.total_weight() != n.tree.total_weight() {
                return Err(fail("weight", (name.clone(), a)));
            }
            if !t.is_path_tree() && check_advancing_identity(&n.tree, &a) != Ok(true) {
                return Err(fail("advancing identity", (name.clone(), a)));
            }
        }
    }
    for n in r.terminal_charts() {
        if !(n.principal && n.snc) {
            return Err(fail(
                "terminal chart",
                (g.to_string(), n.labels(), n.principal, n.snc),
            ));
        }
    }
    Ok(())
}

pub fn check_exhaustive_trees(max: usize) -> Result<usize, String> {
    let trees = semistable_trees(max);
    for g in &trees {
        check_tree(g, 16)?;
    }
    Ok(trees.len())
}
