//! Polynomial invariants of the coadjoint action, found as the joint kernel
//! of the field derivations on each homogeneous degree.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

use crate::lie::{LieAlgebra, Subspace};
use crate::linalg::{Matrix, SparseEchelon, SparseRow};
use crate::polynomial::{monomials_of_degree, Monomial, Polynomial};
use crate::scalar::Rational;
use crate::{Error, Result};

fn exact_constants(alg: &LieAlgebra) -> Result<&[Rational]> {
    alg.constants_exact()
        .map_err(|_| Error::RequiresExact("exact search unavailable"))
}

/// Image of a single monomial under the derivation of `X_i`, as sparse terms.
fn apply_to_monomial(
    n: usize,
    c: &[Rational],
    i: usize,
    m: &Monomial,
) -> Vec<(Monomial, Rational)> {
    let mut out: BTreeMap<Monomial, Rational> = BTreeMap::new();
    for j in 0..n {
        let e = m.0[j];
        if e == 0 {
            continue;
        }
        for k in 0..n {
            let cijk = &c[(i * n + j) * n + k];
            if cijk.is_zero() {
                continue;
            }
            let mut exps = m.0.clone();
            exps[j] -= 1;
            exps[k] += 1;
            let v = out.entry(Monomial(exps)).or_insert_with(Rational::zero);
            *v += cijk * Rational::from_integer(e.into());
        }
    }
    out.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// For each basis index `i`, the matrix of `P ↦ ⟨∇P, F_i ℓ⟩` on degree-`d`
/// homogeneous polynomials (columns and rows indexed by
/// [`monomials_of_degree`], largest first).
pub fn field_operator(alg: &LieAlgebra, d: u32) -> Result<Vec<Matrix<Rational>>> {
    let c = exact_constants(alg)?;
    let n = alg.dim();
    let monos = monomials_of_degree(n, d);
    let index: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(k, m)| (m, k)).collect();
    Ok((0..n)
        .map(|i| {
            let mut op = Matrix::zeros(monos.len(), monos.len());
            for (col, m) in monos.iter().enumerate() {
                for (img, v) in apply_to_monomial(n, c, i, m) {
                    op[(index[&img], col)] = v;
                }
            }
            op
        })
        .collect())
}

/// The derivation of `X_i` applied to `p`.
pub fn apply_field(alg: &LieAlgebra, i: usize, p: &Polynomial) -> Result<Polynomial> {
    let c = exact_constants(alg)?;
    let n = alg.dim();
    if p.nvars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.nvars(),
        });
    }
    let mut acc: Vec<(Monomial, Rational)> = Vec::new();
    for (m, coef) in p.terms() {
        for (img, v) in apply_to_monomial(n, c, i, m) {
            acc.push((img, v * coef));
        }
    }
    Ok(Polynomial::from_terms(n, acc))
}

/// True iff every coadjoint field annihilates `p`.
pub fn verify_invariant(alg: &LieAlgebra, p: &Polynomial) -> Result<bool> {
    for i in 0..alg.dim() {
        if !apply_field(alg, i, p)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Kernel basis of the degree-`d` block, in reduced row echelon form.
pub fn invariants_of_degree(alg: &LieAlgebra, d: u32) -> Result<Vec<Polynomial>> {
    let c = exact_constants(alg)?;
    let n = alg.dim();
    let monos = monomials_of_degree(n, d);
    let index: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let mut echelon = SparseEchelon::new(monos.len());
    for i in 0..n {
        // Row (i, image monomial) collects the coefficient of that monomial in D_i P.
        let mut rows: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (col, m) in monos.iter().enumerate() {
            for (img, v) in apply_to_monomial(n, c, i, m) {
                rows.entry(index[&img]).or_default().insert(col, v);
            }
        }
        for row in rows.into_values() {
            echelon.insert(row);
        }
    }
    let kernel = echelon.kernel();
    let polys: Vec<Polynomial> = kernel
        .into_iter()
        .map(|v| Polynomial::from_terms(n, monos.iter().cloned().zip(v)))
        .collect();
    for p in &polys {
        if !verify_invariant(alg, p)? {
            return Err(Error::NotInvariant { index: 0 });
        }
    }
    Ok(polys)
}

/// Invariants of degrees `1..=max_degree`, degree by degree (constants excluded).
pub fn find_invariants(alg: &LieAlgebra, max_degree: u32) -> Result<Vec<Polynomial>> {
    exact_constants(alg)?;
    let blocks: Vec<Result<Vec<Polynomial>>> = (1..=max_degree)
        .into_par_iter()
        .map(|d| invariants_of_degree(alg, d))
        .collect();
    let mut out = Vec::new();
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

/// Whether `p` is a rational linear combination of `basis` (plus constants).
pub fn span_contains(basis: &[Polynomial], p: &Polynomial) -> bool {
    let p = Polynomial::from_terms(
        p.nvars(),
        p.terms()
            .iter()
            .filter(|(m, _)| m.degree() > 0)
            .map(|(m, c)| (m.clone(), c.clone())),
    );
    if p.is_zero() {
        return true;
    }
    let mut monos: Vec<Monomial> = basis
        .iter()
        .flat_map(|b| b.terms().keys().cloned())
        .collect();
    monos.extend(p.terms().keys().cloned());
    monos.sort();
    monos.dedup();
    let cols: Vec<Vec<Rational>> = basis
        .iter()
        .map(|b| monos.iter().map(|m| b.coefficient(m)).collect())
        .collect();
    let target: Vec<Rational> = monos.iter().map(|m| p.coefficient(m)).collect();
    if cols.is_empty() {
        return false;
    }
    Matrix::from_columns(&cols, monos.len()).column_space_contains(&target)
}

/// The center `{A : [X_i, A] = 0 for all i}`; its elements are exactly the
/// linear invariants `ℓ ↦ ℓ(A)`.
pub fn center(alg: &LieAlgebra) -> Result<Subspace> {
    let c = alg.constants_exact()?;
    let n = alg.dim();
    // Rows indexed by (i, k): Σ_j c_ij^k a_j = 0.
    let mut m = Matrix::zeros(n * n, n);
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                m[(i * n + k, j)] = c[(i * n + j) * n + k].clone();
            }
        }
    }
    Subspace::new(n, m.nullspace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::polynomial::default_names;

    fn entry(name: &str) -> catalog::CatalogEntry {
        catalog::get(name, &BTreeMap::new()).unwrap()
    }

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, &default_names(n)).unwrap()
    }

    #[test]
    fn heisenberg_degree_one_operator() {
        let g = entry("g3").algebra;
        let ops = field_operator(&g, 1).unwrap();
        // Columns x1, x2, x3. D_1 x2 = x3, D_1 x3 = 0.
        assert_eq!(
            ops[0].column(1),
            vec![
                Rational::zero(),
                Rational::zero(),
                Rational::from_integer(1.into())
            ]
        );
        assert!(ops[0].column(2).iter().all(Zero::is_zero));
        assert!(!verify_invariant(&g, &p("x1", 3)).unwrap());
        assert!(verify_invariant(&g, &p("x3", 3)).unwrap());
        assert!(verify_invariant(&g, &p("5", 3)).unwrap());
    }

    #[test]
    fn abelian_operators_vanish() {
        let g = LieAlgebra::abelian(3).unwrap();
        assert!(field_operator(&g, 2).unwrap().iter().all(Matrix::is_zero));
    }

    #[test]
    fn sl2_casimir() {
        let g = entry("sl2").algebra;
        let cas = p("x1^2 + x2^2 - x3^2", 3);
        assert!(verify_invariant(&g, &cas).unwrap());
        let found = find_invariants(&g, 2).unwrap();
        assert_eq!(found.len(), 1);
        assert!(span_contains(&found, &cas));
        let d3 = apply_field(&g, 2, &p("x1^2", 3)).unwrap();
        // (X3·ℓ)_1 = ℓ([X3, X1]) = -x2.
        assert_eq!(d3, p("-2*x1*x2", 3));
    }

    #[test]
    fn g6_20_needs_degree_three() {
        let e = entry("g6_20");
        let d2 = find_invariants(&e.algebra, 2).unwrap();
        assert_eq!(d2.len(), 2);
        assert!(!span_contains(&d2, &e.known_invariants[1]));
        let d3 = find_invariants(&e.algebra, 3).unwrap();
        assert!(span_contains(&d3, &e.known_invariants[1]));
    }

    #[test]
    fn float_algebras_are_refused() {
        let g = entry("mautner").algebra;
        match find_invariants(&g, 2) {
            Err(Error::RequiresExact(m)) => assert_eq!(m, "exact search unavailable"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
