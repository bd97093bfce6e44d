//! Lie algebras given by structure constants, subspaces, series and
//! semidirect sums.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::linalg::{Field, Matrix};
use crate::scalar::{format_rational, parse_rational, rational_to_f64, Rational, Regime, Scalar};
use crate::{Error, Result};

/// Sparse bracket table entry: `[X_i, X_j] = Σ c_k X_k` with `i < j`, 0-based.
pub type BracketTable = BTreeMap<(usize, usize), Vec<(usize, Scalar)>>;

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    labels: Vec<String>,
    brackets: BracketTable,
    params: BTreeMap<String, Scalar>,
    regime: Regime,
    consts_f: Vec<f64>,
    consts_q: Option<Vec<Rational>>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.brackets == other.brackets
            && self.params == other.params
    }
}

impl LieAlgebra {
    /// Builds an algebra from `i < j` bracket entries (0-based).
    ///
    /// Repeated `(i, j)` entries and repeated targets are summed. If any
    /// coefficient or parameter is a float, everything is stored as float.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        entries: impl IntoIterator<Item = ((usize, usize), Vec<(usize, Scalar)>)>,
        params: BTreeMap<String, Scalar>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        let mut raw: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
        for ((i, j), terms) in entries {
            if i >= j {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket entry ({}, {}) must have i < j",
                    i + 1,
                    j + 1
                )));
            }
            if j >= n {
                return Err(Error::InvalidAlgebra(format!(
                    "index {} exceeds dimension {n}",
                    j + 1
                )));
            }
            let slot = raw.entry((i, j)).or_default();
            for (k, c) in terms {
                if k >= n {
                    return Err(Error::InvalidAlgebra(format!(
                        "index {} exceeds dimension {n}",
                        k + 1
                    )));
                }
                let e = slot.entry(k).or_insert_with(Scalar::zero);
                *e = e.clone() + c;
            }
        }
        let float = params.values().any(|s| s.regime() == Regime::Float)
            || raw
                .values()
                .flat_map(|m| m.values())
                .any(|s| s.regime() == Regime::Float);
        let regime = if float { Regime::Float } else { Regime::Exact };
        let promote = |s: Scalar| if float { s.to_float() } else { s };

        let brackets: BracketTable = raw
            .into_iter()
            .map(|(ij, m)| {
                let terms: Vec<_> = m
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (k, promote(c)))
                    .collect();
                (ij, terms)
            })
            .filter(|(_, t)| !t.is_empty())
            .collect();
        let params = params.into_iter().map(|(k, v)| (k, promote(v))).collect();

        let mut consts_f = vec![0.0; n * n * n];
        let mut consts_q = (!float).then(|| vec![Rational::zero(); n * n * n]);
        for (&(i, j), terms) in &brackets {
            for (k, c) in terms {
                let x = c.to_f64();
                consts_f[(i * n + j) * n + k] = x;
                consts_f[(j * n + i) * n + k] = -x;
                if let (Some(q), Scalar::Exact(r)) = (consts_q.as_mut(), c) {
                    q[(i * n + j) * n + k] = r.clone();
                    q[(j * n + i) * n + k] = -r.clone();
                }
            }
        }
        Ok(LieAlgebra {
            name: name.into(),
            labels,
            brackets,
            params,
            regime,
            consts_f,
            consts_q,
        })
    }

    /// Builds from dense exact constants `c[i][j][k]`; only `i < j` is read.
    pub fn from_dense_exact(
        name: impl Into<String>,
        labels: Vec<String>,
        consts: &[Rational],
        params: BTreeMap<String, Scalar>,
    ) -> Result<Self> {
        let n = labels.len();
        if consts.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                found: consts.len(),
            });
        }
        let entries = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let terms = (0..n)
                    .filter_map(|k| {
                        let c = &consts[(i * n + j) * n + k];
                        (!c.is_zero()).then(|| (k, Scalar::Exact(c.clone())))
                    })
                    .collect();
                ((i, j), terms)
            });
        Self::new(name, labels, entries.collect::<Vec<_>>(), params)
    }

    /// Abelian algebra with labels `X1..Xn`.
    pub fn abelian(n: usize) -> Result<Self> {
        Self::new(
            format!("abelian{n}"),
            default_labels(n),
            Vec::new(),
            BTreeMap::new(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn brackets(&self) -> &BracketTable {
        &self.brackets
    }

    pub fn params(&self) -> &BTreeMap<String, Scalar> {
        &self.params
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_exact(&self) -> bool {
        self.regime == Regime::Exact
    }

    /// `c_{ij}^k` as a float (any regime).
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.consts_f[(i * n + j) * n + k]
    }

    /// Dense constants, indexed `(i * n + j) * n + k`.
    pub fn constants_f64(&self) -> &[f64] {
        &self.consts_f
    }

    pub fn constants_exact(&self) -> Result<&[Rational]> {
        self.consts_q.as_deref().ok_or(Error::RequiresExact(
            "exact arithmetic requires rational scalars",
        ))
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn bracket_f64(&self, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        bracket_dense(self.dim(), &self.consts_f, u, v)
    }

    pub fn bracket_exact(&self, u: &[Rational], v: &[Rational]) -> Result<Vec<Rational>> {
        bracket_dense(self.dim(), self.constants_exact()?, u, v)
    }

    /// Jacobi check over all triples `i < j < k`.
    pub fn validate(&self) -> Result<ValidationReport> {
        let c = self.constants_exact()?;
        let n = self.dim();
        let at = |i: usize, j: usize, k: usize| &c[(i * n + j) * n + k];
        let mut violations = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut res = vec![Rational::zero(); n];
                    for (a, b, d) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for m in 0..n {
                            let x = at(a, b, m);
                            if x.is_zero() {
                                continue;
                            }
                            for (q, r) in res.iter_mut().enumerate() {
                                let y = at(m, d, q);
                                if !y.is_zero() {
                                    *r += x * y;
                                }
                            }
                        }
                    }
                    if res.iter().any(|r| !r.is_zero()) {
                        violations.push(JacobiViolation {
                            triple: (i + 1, j + 1, k + 1),
                            residual: res.iter().map(format_rational).collect(),
                        });
                    }
                }
            }
        }
        Ok(ValidationReport {
            algebra: self.name.clone(),
            violations,
        })
    }

    /// Same algebra in the basis order `perm` (new index `a` is old `perm[a]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidAlgebra(
                "not a permutation of the basis".into(),
            ));
        }
        let mut inv = vec![0; n];
        for (a, &p) in perm.iter().enumerate() {
            inv[p] = a;
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let entries: Vec<_> = self
            .brackets
            .iter()
            .map(|(&(i, j), terms)| {
                let (a, b) = (inv[i], inv[j]);
                let sign = if a < b { Scalar::one() } else { -Scalar::one() };
                let t = terms
                    .iter()
                    .map(|(k, c)| (inv[*k], c.clone() * sign.clone()))
                    .collect();
                ((a.min(b), a.max(b)), t)
            })
            .collect();
        Self::new(self.name.clone(), labels, entries, self.params.clone())
    }

    pub fn to_json(&self) -> Value {
        let brackets: Vec<Value> = self
            .brackets
            .iter()
            .map(|(&(i, j), terms)| {
                let terms: Vec<Value> = terms
                    .iter()
                    .map(|(k, c)| json!({"k": k + 1, "c": scalar_json(c)}))
                    .collect();
                json!({"i": i + 1, "j": j + 1, "terms": terms})
            })
            .collect();
        let params: serde_json::Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), scalar_json(v)))
            .collect();
        json!({
            "name": self.name,
            "dim": self.dim(),
            "basis": self.labels,
            "brackets": brackets,
            "params": params,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("algebra JSON: {m}"));
        let name = v
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing name"))?;
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing dim"))? as usize;
        let labels = match v.get("basis") {
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| bad("basis labels must be strings"))
                })
                .collect::<Result<Vec<_>>>()?,
            None => default_labels(dim),
            _ => return Err(bad("basis must be an array")),
        };
        if labels.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: labels.len(),
            });
        }
        let mut entries = Vec::new();
        for b in v
            .get("brackets")
            .and_then(Value::as_array)
            .map(Vec::as_slice)
            .unwrap_or(&[])
        {
            let idx = |key: &str| -> Result<usize> {
                let x = b
                    .get(key)
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("bracket index missing"))?;
                if x == 0 {
                    return Err(bad("indices are 1-based"));
                }
                Ok(x as usize - 1)
            };
            let (i, j) = (idx("i")?, idx("j")?);
            if i >= j {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket entry ({}, {}) must have i < j",
                    i + 1,
                    j + 1
                )));
            }
            let mut terms = Vec::new();
            for t in b
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("terms missing"))?
            {
                let k = t
                    .get("k")
                    .and_then(Value::as_u64)
                    .filter(|&k| k > 0)
                    .ok_or_else(|| bad("term index"))?;
                let c = scalar_from_json(t.get("c").ok_or_else(|| bad("term coefficient"))?)?;
                terms.push((k as usize - 1, c));
            }
            entries.push(((i, j), terms));
        }
        let mut params = BTreeMap::new();
        if let Some(Value::Object(m)) = v.get("params") {
            for (k, x) in m {
                params.insert(k.clone(), scalar_from_json(x)?);
            }
        }
        Self::new(name, labels, entries, params)
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(q) => Value::String(format_rational(q)),
        Scalar::Float(x) => json!(x),
    }
}

fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => Ok(Scalar::Exact(parse_rational(s)?)),
        Value::Number(x) => {
            if let Some(i) = x.as_i64() {
                Ok(Scalar::from(i))
            } else {
                Ok(Scalar::Float(x.as_f64().unwrap_or(f64::NAN)))
            }
        }
        _ => Err(Error::Parse(
            "coefficients must be \"p/q\" strings or numbers".into(),
        )),
    }
}

fn bracket_dense<F: Field>(n: usize, c: &[F], u: &[F], v: &[F]) -> Result<Vec<F>> {
    for w in [u, v] {
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.len(),
            });
        }
    }
    let mut out = vec![F::zero(); n];
    for i in 0..n {
        if u[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if v[j].is_zero() || i == j {
                continue;
            }
            let uv = u[i].clone() * v[j].clone();
            for (k, o) in out.iter_mut().enumerate() {
                let x = &c[(i * n + j) * n + k];
                if !x.is_zero() {
                    *o = o.clone() + uv.clone() * x.clone();
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiViolation {
    /// 1-based basis indices.
    pub triple: (usize, usize, usize),
    pub residual: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub algebra: String,
    pub violations: Vec<JacobiViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Subspace of an `n`-dimensional algebra, spanned by independent rational columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Matrix<Rational>,
}

impl Subspace {
    pub fn new(n: usize, columns: Vec<Vec<Rational>>) -> Result<Self> {
        for c in &columns {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
        }
        let basis = Matrix::from_columns(&columns, n);
        let rank = basis.rank();
        if rank < columns.len() {
            return Err(Error::DependentBasis {
                rank,
                cols: columns.len(),
            });
        }
        Ok(Subspace { basis })
    }

    /// Span of the given 0-based basis vectors.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let cols = indices
            .iter()
            .map(|&i| {
                if i >= n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: i + 1,
                    });
                }
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::from_integer(1.into());
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, cols)
    }

    pub fn whole(n: usize) -> Self {
        Subspace {
            basis: Matrix::identity(n),
        }
    }

    pub fn zero(n: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(n, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    pub fn basis(&self) -> &Matrix<Rational> {
        &self.basis
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        self.basis.column(j)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.basis.column_space_contains(v)
    }

    /// The 0-based index if column `j` is a standard basis vector.
    pub fn coordinate_index(&self, j: usize) -> Option<usize> {
        let col = self.column(j);
        let nz: Vec<usize> = (0..col.len()).filter(|&i| !col[i].is_zero()).collect();
        (nz.len() == 1 && col[nz[0]] == Rational::from_integer(1.into())).then(|| nz[0])
    }

    /// Indices when the subspace is a coordinate span.
    pub fn coordinate_indices(&self) -> Option<Vec<usize>> {
        (0..self.dim()).map(|j| self.coordinate_index(j)).collect()
    }

    /// Human-readable description, e.g. `span(X2, X3)`.
    pub fn describe(&self, alg: &LieAlgebra) -> String {
        let parts: Vec<String> = (0..self.dim())
            .map(|j| match self.coordinate_index(j) {
                Some(i) => alg.labels()[i].clone(),
                None => {
                    let col = self.column(j);
                    let terms: Vec<String> = col
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| format!("{}*{}", format_rational(c), alg.labels()[i]))
                        .collect();
                    format!("({})", terms.join(" + "))
                }
            })
            .collect();
        format!("span({})", parts.join(", "))
    }
}

fn columns_f64(s: &Subspace) -> Vec<Vec<f64>> {
    (0..s.dim())
        .map(|j| s.column(j).iter().map(rational_to_f64).collect())
        .collect()
}

fn check_sub(alg: &LieAlgebra, s: &Subspace) -> Result<()> {
    if s.ambient_dim() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: s.ambient_dim(),
        });
    }
    Ok(())
}

/// First `(i, column)` with `[X_i, column] ∉ S`, generic over the scalar field.
fn ideal_witness<F: Field>(n: usize, c: &[F], cols: &[Vec<F>]) -> Option<(usize, usize)> {
    let basis = Matrix::from_columns(cols, n);
    for i in 0..n {
        let mut e = vec![F::zero(); n];
        e[i] = F::one();
        for (j, col) in cols.iter().enumerate() {
            let b = bracket_dense(n, c, &e, col).expect("dimensions checked");
            if b.iter().any(|x| !x.negligible()) && !basis.column_space_contains(&b) {
                return Some((i, j));
            }
        }
    }
    None
}

fn abelian_generic<F: Field>(n: usize, c: &[F], cols: &[Vec<F>]) -> bool {
    cols.iter().enumerate().all(|(a, u)| {
        cols[a + 1..].iter().all(|v| {
            bracket_dense(n, c, u, v)
                .expect("dimensions checked")
                .iter()
                .all(F::negligible)
        })
    })
}

/// `[g, S] ⊆ S`. Float algebras are checked with pivot tolerance.
pub fn subspace_is_ideal(alg: &LieAlgebra, s: &Subspace) -> Result<bool> {
    check_sub(alg, s)?;
    Ok(ideal_failure(alg, s).is_none())
}

fn ideal_failure(alg: &LieAlgebra, s: &Subspace) -> Option<(usize, usize)> {
    let n = alg.dim();
    match alg.constants_exact() {
        Ok(c) => ideal_witness(n, c, &(0..s.dim()).map(|j| s.column(j)).collect::<Vec<_>>()),
        Err(_) => ideal_witness(n, alg.constants_f64(), &columns_f64(s)),
    }
}

/// `[S, S] = 0`.
pub fn subspace_is_abelian(alg: &LieAlgebra, s: &Subspace) -> Result<bool> {
    check_sub(alg, s)?;
    let n = alg.dim();
    Ok(match alg.constants_exact() {
        Ok(c) => abelian_generic(n, c, &(0..s.dim()).map(|j| s.column(j)).collect::<Vec<_>>()),
        Err(_) => abelian_generic(n, alg.constants_f64(), &columns_f64(s)),
    })
}

/// Errors unless `s` is an abelian ideal.
pub fn require_abelian_ideal(alg: &LieAlgebra, s: &Subspace) -> Result<()> {
    check_sub(alg, s)?;
    if let Some((i, column)) = ideal_failure(alg, s) {
        return Err(Error::NotAnIdeal {
            i: i + 1,
            column: column + 1,
        });
    }
    if !subspace_is_abelian(alg, s)? {
        return Err(Error::NotAbelian);
    }
    Ok(())
}

/// Basis (as RREF rows) of the span of all `[u, v]`, `u ∈ A`, `v ∈ B`.
fn bracket_span<F: Field>(n: usize, c: &[F], a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut rows = Vec::new();
    for u in a {
        for v in b {
            let w = bracket_dense(n, c, u, v).expect("dimensions checked");
            if w.iter().any(|x| !x.negligible()) {
                rows.push(w);
            }
        }
    }
    if rows.is_empty() {
        return rows;
    }
    let mut m = Matrix::from_rows(&rows);
    let r = m.rref().len();
    (0..r).map(|i| m.row(i).to_vec()).collect()
}

fn series_generic<F: Field>(n: usize, c: &[F], lower: bool) -> Vec<Vec<Vec<F>>> {
    let whole: Vec<Vec<F>> = (0..n)
        .map(|i| {
            let mut e = vec![F::zero(); n];
            e[i] = F::one();
            e
        })
        .collect();
    let mut out = vec![whole.clone()];
    loop {
        let prev = out.last().expect("nonempty");
        let next = if lower {
            bracket_span(n, c, &whole, prev)
        } else {
            bracket_span(n, c, prev, prev)
        };
        if next.len() == prev.len() {
            break;
        }
        let done = next.is_empty();
        out.push(next);
        if done {
            break;
        }
    }
    out
}

fn to_subspaces(n: usize, chain: Vec<Vec<Vec<Rational>>>) -> Vec<Subspace> {
    chain
        .into_iter()
        .map(|cols| Subspace::new(n, cols).expect("echelon rows are independent"))
        .collect()
}

/// `g ⊃ [g,g] ⊃ [g,[g,g]] ⊃ …` until it stabilizes (ends at 0 iff nilpotent).
pub fn lower_central_series(alg: &LieAlgebra) -> Result<Vec<Subspace>> {
    Ok(to_subspaces(
        alg.dim(),
        series_generic(alg.dim(), alg.constants_exact()?, true),
    ))
}

/// `g ⊃ [g,g] ⊃ [[g,g],[g,g]] ⊃ …` until it stabilizes (ends at 0 iff solvable).
pub fn derived_series(alg: &LieAlgebra) -> Result<Vec<Subspace>> {
    Ok(to_subspaces(
        alg.dim(),
        series_generic(alg.dim(), alg.constants_exact()?, false),
    ))
}

fn series_dims(alg: &LieAlgebra, lower: bool) -> Vec<usize> {
    let n = alg.dim();
    match alg.constants_exact() {
        Ok(c) => series_generic(n, c, lower).iter().map(Vec::len).collect(),
        Err(_) => series_generic(n, alg.constants_f64(), lower)
            .iter()
            .map(Vec::len)
            .collect(),
    }
}

pub fn is_nilpotent(alg: &LieAlgebra) -> bool {
    series_dims(alg, true).last() == Some(&0)
}

pub fn is_solvable(alg: &LieAlgebra) -> bool {
    series_dims(alg, false).last() == Some(&0)
}

/// Exact linear action of an algebra on a vector space, one matrix per basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleAction {
    pub algebra_dim: usize,
    pub module_dim: usize,
    pub labels: Vec<String>,
    pub action: Vec<Matrix<Rational>>,
}

impl ModuleAction {
    pub fn new(
        algebra_dim: usize,
        labels: Vec<String>,
        action: Vec<Matrix<Rational>>,
    ) -> Result<Self> {
        let module_dim = labels.len();
        if action.len() != algebra_dim {
            return Err(Error::DimensionMismatch {
                expected: algebra_dim,
                found: action.len(),
            });
        }
        for m in &action {
            if m.rows != module_dim || m.cols != module_dim {
                return Err(Error::DimensionMismatch {
                    expected: module_dim,
                    found: m.rows.max(m.cols),
                });
            }
        }
        Ok(ModuleAction {
            algebra_dim,
            module_dim,
            labels,
            action,
        })
    }

    /// Trivial action on `k` dimensions.
    pub fn zero(algebra_dim: usize, labels: Vec<String>) -> Self {
        let k = labels.len();
        ModuleAction {
            algebra_dim,
            module_dim: k,
            labels,
            action: vec![Matrix::zeros(k, k); algebra_dim],
        }
    }

    /// Checks `ρ([X_i, X_j]) = [ρ(X_i), ρ(X_j)]` for all `i < j`.
    pub fn check_representation(&self, alg: &LieAlgebra) -> Result<()> {
        let n = alg.dim();
        if self.algebra_dim != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.algebra_dim,
            });
        }
        let c = alg.constants_exact()?;
        for i in 0..n {
            for j in i + 1..n {
                let comm = self.action[i]
                    .mul_mat(&self.action[j])
                    .sub_mat(&self.action[j].mul_mat(&self.action[i]));
                let mut lhs = Matrix::zeros(self.module_dim, self.module_dim);
                for k in 0..n {
                    let x = &c[(i * n + j) * n + k];
                    if !x.is_zero() {
                        for (l, a) in lhs.data.iter_mut().zip(&self.action[k].data) {
                            *l += x * a;
                        }
                    }
                }
                if lhs != comm {
                    return Err(Error::RepresentationViolation { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(())
    }
}

/// `g ⋉ V` with `V` an abelian ideal: `[X_i, V_a] = ρ(X_i) V_a`.
pub fn semidirect_sum(alg: &LieAlgebra, act: &ModuleAction) -> Result<LieAlgebra> {
    act.check_representation(alg)?;
    let n = alg.dim();
    let mut labels = alg.labels().to_vec();
    labels.extend(act.labels.iter().cloned());
    let mut entries: Vec<_> = alg
        .brackets()
        .iter()
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    for i in 0..n {
        let m = &act.action[i];
        for a in 0..act.module_dim {
            let terms: Vec<(usize, Scalar)> = (0..act.module_dim)
                .filter(|&b| !m[(b, a)].is_zero())
                .map(|b| (n + b, Scalar::Exact(m[(b, a)].clone())))
                .collect();
            if !terms.is_empty() {
                entries.push(((i, n + a), terms));
            }
        }
    }
    LieAlgebra::new(
        format!("{}+", alg.name()),
        labels,
        entries,
        alg.params().clone(),
    )
}

/// Pairs `(p, q)`, `p ≤ q`, in basis order.
pub fn sym2_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|p| (p..d).map(move |q| (p, q))).collect()
}

/// The module `S²(a)` with the Leibniz action.
pub fn sym2_module(alg: &LieAlgebra, a: &Subspace) -> Result<ModuleAction> {
    require_abelian_ideal(alg, a)?;
    let n = alg.dim();
    let d = a.dim();
    // m[i] is ad(X_i) restricted to a, in a's own basis.
    let mut ad = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::from_integer(1.into());
        let mut m = Matrix::zeros(d, d);
        for p in 0..d {
            let b = alg.bracket_exact(&e, &a.column(p))?;
            let coords = a.basis().solve_in_columns(&b).ok_or(Error::NotAnIdeal {
                i: i + 1,
                column: p + 1,
            })?;
            for (q, x) in coords.into_iter().enumerate() {
                m[(q, p)] = x;
            }
        }
        ad.push(m);
    }
    let pairs = sym2_pairs(d);
    let index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(k, &pq)| (pq, k)).collect();
    let key = |p: usize, q: usize| index[&(p.min(q), p.max(q))];
    let action = ad
        .iter()
        .map(|m| {
            let mut rho = Matrix::zeros(pairs.len(), pairs.len());
            for (col, &(p, q)) in pairs.iter().enumerate() {
                for r in 0..d {
                    if !m[(r, p)].is_zero() {
                        rho[(key(r, q), col)] += &m[(r, p)];
                    }
                    if !m[(r, q)].is_zero() {
                        rho[(key(p, r), col)] += &m[(r, q)];
                    }
                }
            }
            rho
        })
        .collect();
    let names: Vec<String> = (0..d)
        .map(|p| {
            a.coordinate_index(p)
                .map_or_else(|| format!("A{}", p + 1), |i| alg.labels()[i].clone())
        })
        .collect();
    let labels = pairs
        .iter()
        .map(|&(p, q)| format!("{}{}", names[p], names[q]))
        .collect();
    ModuleAction::new(n, labels, action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn heisenberg() -> LieAlgebra {
        LieAlgebra::new(
            "h",
            default_labels(3),
            [((0, 1), vec![(2, Scalar::from(1i64))])],
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_lower_triangle_and_overflow() {
        let e = LieAlgebra::new(
            "x",
            default_labels(2),
            [((1, 0), vec![(0, Scalar::from(1i64))])],
            BTreeMap::new(),
        );
        assert!(matches!(e, Err(Error::InvalidAlgebra(_))));
        let e = LieAlgebra::new(
            "x",
            default_labels(2),
            [((0, 2), vec![(0, Scalar::from(1i64))])],
            BTreeMap::new(),
        );
        assert!(matches!(e, Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let h = heisenberg();
        assert_eq!(h.c(0, 1, 2), 1.0);
        assert_eq!(h.c(1, 0, 2), -1.0);
        assert_eq!(
            h.bracket_exact(&[int(0), int(1), int(0)], &[int(1), int(0), int(0)])
                .unwrap(),
            vec![int(0), int(0), int(-1)]
        );
    }

    #[test]
    fn json_round_trip_keeps_exact_coefficients() {
        let alg = LieAlgebra::new(
            "q",
            default_labels(3),
            [
                ((0, 1), vec![(1, Scalar::Exact(rat(1, 2)))]),
                ((0, 2), vec![(2, Scalar::from(-3i64))]),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let back = LieAlgebra::from_json(&alg.to_json()).unwrap();
        assert!(back.is_exact());
        assert_eq!(
            back.constants_exact().unwrap(),
            alg.constants_exact().unwrap()
        );
        assert_eq!(alg.to_json()["brackets"][0]["terms"][0]["c"], "1/2");
    }

    #[test]
    fn float_coefficient_promotes_algebra() {
        let alg = LieAlgebra::new(
            "f",
            default_labels(2),
            [((0, 1), vec![(1, Scalar::Float(0.5))])],
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(alg.regime(), Regime::Float);
        assert!(alg.constants_exact().is_err());
    }

    #[test]
    fn broken_jacobi_is_reported() {
        // [X1,X2]=X3, [X1,X3]=X1 fails at (1,2,3).
        let alg = LieAlgebra::new(
            "bad",
            default_labels(3),
            [
                ((0, 1), vec![(2, Scalar::from(1i64))]),
                ((0, 2), vec![(0, Scalar::from(1i64))]),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let r = alg.validate().unwrap();
        assert!(!r.is_valid());
        assert_eq!(r.violations[0].triple, (1, 2, 3));
    }

    #[test]
    fn heisenberg_series_and_subspaces() {
        let h = heisenberg();
        assert!(h.validate().unwrap().is_valid());
        assert!(is_nilpotent(&h) && is_solvable(&h));
        let lcs = lower_central_series(&h).unwrap();
        assert_eq!(
            lcs.iter().map(Subspace::dim).collect::<Vec<_>>(),
            vec![3, 1, 0]
        );
        let a = Subspace::coordinate(3, &[1, 2]).unwrap();
        assert_eq!(a.describe(&h), "span(X2, X3)");
        assert!(require_abelian_ideal(&h, &a).is_ok());
        let b = Subspace::coordinate(3, &[0]).unwrap();
        assert!(matches!(
            require_abelian_ideal(&h, &b),
            Err(Error::NotAnIdeal { .. })
        ));
        assert!(matches!(
            Subspace::new(
                3,
                vec![vec![int(1), int(0), int(0)], vec![int(2), int(0), int(0)]]
            ),
            Err(Error::DependentBasis { .. })
        ));
    }

    #[test]
    fn sym2_module_of_heisenberg_ideal() {
        let h = heisenberg();
        let a = Subspace::coordinate(3, &[1, 2]).unwrap();
        let m = sym2_module(&h, &a).unwrap();
        assert_eq!(m.labels, vec!["X2X2", "X2X3", "X3X3"]);
        m.check_representation(&h).unwrap();
        let g = semidirect_sum(&h, &m).unwrap();
        assert_eq!(g.dim(), 6);
        assert!(g.validate().unwrap().is_valid());
        assert!(is_nilpotent(&g));
    }

    #[test]
    fn permutation_relabels() {
        let h = heisenberg().permuted(&[2, 0, 1]).unwrap();
        assert_eq!(h.labels(), &["X3", "X1", "X2"]);
        assert_eq!(h.c(1, 2, 0), 1.0);
    }
}
