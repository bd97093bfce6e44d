//! Special ideals and quadratic overgroups `g ⊂ g⁺` with lifts
//! `φ: g* → (g⁺)*` satisfying `p ∘ φ = id`.

use itertools::Itertools;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{levi_civita, rotation_generator, SO4_PAIRS};
use crate::coadjoint::{self, flow, orbit_dim, random_generic_covector, unit_direction};
use crate::invariants::verify_invariant;
use crate::lie::{
    is_solvable, require_abelian_ideal, semidirect_sum, subspace_is_abelian, subspace_is_ideal,
    sym2_module, sym2_pairs, LieAlgebra, ModuleAction, Subspace,
};
use crate::linalg::{l2_norm, numeric_rank, Matrix};
use crate::polynomial::{Monomial, Polynomial};
use crate::scalar::{int, rational_to_f64, Rational};
use crate::seed;
use crate::{Error, Result};

/// Pass threshold for equivariance residuals.
pub const EQUIVARIANCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    Sym2,
    Invariant,
    Custom,
}

#[derive(Clone, Debug)]
pub struct QuadraticLift {
    pub kind: LiftKind,
    pub base: LieAlgebra,
    pub extension: LieAlgebra,
    /// Extra coordinates of `φ(ℓ)`, as polynomials on `g*`.
    pub components: Vec<Polynomial>,
}

impl QuadraticLift {
    fn new(
        kind: LiftKind,
        base: &LieAlgebra,
        act: &ModuleAction,
        components: Vec<Polynomial>,
    ) -> Result<Self> {
        let n = base.dim();
        if components.len() != act.module_dim {
            return Err(Error::ComponentCount {
                expected: act.module_dim,
                found: components.len(),
            });
        }
        for (index, c) in components.iter().enumerate() {
            if c.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.nvars(),
                });
            }
            if c.degree() > 2 {
                return Err(Error::DegreeTooHigh {
                    index,
                    degree: c.degree(),
                });
            }
        }
        let extension = semidirect_sum(base, act)?;
        Ok(QuadraticLift {
            kind,
            base: base.clone(),
            extension,
            components,
        })
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn phi(&self, l: &[f64]) -> Vec<f64> {
        let mut out = l.to_vec();
        out.extend(
            self.components
                .iter()
                .map(|c| c.eval_f64(l).expect("length checked by caller")),
        );
        out
    }

    pub fn phi_exact(&self, l: &[Rational]) -> Result<Vec<Rational>> {
        let mut out = l.to_vec();
        for c in &self.components {
            out.push(c.eval_exact(l)?);
        }
        Ok(out)
    }

    /// Restriction `(g⁺)* → g*`.
    pub fn project<T: Clone>(&self, x: &[T]) -> Vec<T> {
        x[..self.base_dim()].to_vec()
    }
}

#[derive(Clone, Debug)]
pub struct SpecialSearch {
    pub generic_dim: usize,
    pub solvable: bool,
    /// First ideal found in subset order; `None` when not special.
    pub canonical: Option<Subspace>,
    pub all: Vec<Subspace>,
}

/// Searches coordinate spans (then `candidates`) for abelian ideals of
/// codimension half the generic orbit dimension. Only solvable algebras
/// qualify.
pub fn find_special_ideal(
    alg: &LieAlgebra,
    candidates: &[Subspace],
    trials: usize,
    seed_value: u64,
) -> Result<SpecialSearch> {
    let n = alg.dim();
    let generic_dim = coadjoint::generic_orbit_dim(alg, trials, seed_value).dim;
    let solvable = is_solvable(alg);
    let mut all = Vec::new();
    if solvable {
        let size = n - generic_dim / 2;
        let coordinate = (0..n)
            .combinations(size)
            .map(|idx| Subspace::coordinate(n, &idx));
        for s in coordinate {
            let s = s?;
            if subspace_is_ideal(alg, &s)? && subspace_is_abelian(alg, &s)? {
                all.push(s);
            }
        }
        for s in candidates {
            if s.dim() == size
                && subspace_is_ideal(alg, s)?
                && subspace_is_abelian(alg, s)?
                && !all.contains(s)
            {
                all.push(s.clone());
            }
        }
    }
    Ok(SpecialSearch {
        generic_dim,
        solvable,
        canonical: all.first().cloned(),
        all,
    })
}

/// Whether `a` makes `alg` special: solvable, `a` an abelian ideal, and
/// `codim a` equal to half of `generic_dim`.
pub fn is_special_ideal(alg: &LieAlgebra, a: &Subspace, generic_dim: usize) -> Result<bool> {
    Ok(is_solvable(alg)
        && 2 * a.codim() == generic_dim
        && subspace_is_ideal(alg, a)?
        && subspace_is_abelian(alg, a)?)
}

/// `ℓ ↦ ℓ(A)` as a linear polynomial.
fn evaluation_polynomial(a: &[Rational]) -> Polynomial {
    let n = a.len();
    Polynomial::from_terms(
        n,
        a.iter()
            .enumerate()
            .map(|(k, c)| (Monomial::var(n, k), c.clone())),
    )
}

/// `g ⋉ S²(a)` with `φ(ℓ) = (ℓ, (ℓ(A_p) ℓ(A_q))_{p ≤ q})`.
pub fn build_sym2_overgroup(alg: &LieAlgebra, a: &Subspace) -> Result<QuadraticLift> {
    require_abelian_ideal(alg, a)?;
    let act = sym2_module(alg, a)?;
    let lin: Vec<Polynomial> = (0..a.dim())
        .map(|p| evaluation_polynomial(&a.column(p)))
        .collect();
    let comps = sym2_pairs(a.dim())
        .into_iter()
        .map(|(p, q)| lin[p].mul(&lin[q]))
        .collect();
    QuadraticLift::new(LiftKind::Sym2, alg, &act, comps)
}

/// `g × R^r` with trivial action and `φ(ℓ) = (ℓ, μ_1(ℓ), …, μ_r(ℓ))`.
pub fn build_invariant_overgroup(alg: &LieAlgebra, invs: &[Polynomial]) -> Result<QuadraticLift> {
    for (index, p) in invs.iter().enumerate() {
        if p.degree() > 2 {
            return Err(Error::DegreeTooHigh {
                index,
                degree: p.degree(),
            });
        }
        if !verify_invariant(alg, p)? {
            return Err(Error::NotInvariant { index });
        }
    }
    let act = ModuleAction::zero(
        alg.dim(),
        (1..=invs.len()).map(|k| format!("M{k}")).collect(),
    );
    QuadraticLift::new(LiftKind::Invariant, alg, &act, invs.to_vec())
}

/// `g ⋉ V` for a given module and components; equivariance is not assumed.
pub fn build_custom_lift(
    alg: &LieAlgebra,
    act: &ModuleAction,
    components: Vec<Polynomial>,
) -> Result<QuadraticLift> {
    QuadraticLift::new(LiftKind::Custom, alg, act, components)
}

/// The lift `(t, r) ↦ (t, r, r ∧ t)` of `so(4) ⋉ R^4` into `(so(4) ⋉ R^4) ⋉ R^4`.
pub fn so4_wedge_lift(alg: &LieAlgebra) -> Result<QuadraticLift> {
    if alg.dim() != 10 {
        return Err(Error::DimensionMismatch {
            expected: 10,
            found: alg.dim(),
        });
    }
    let n = 10;
    let t_idx = |l: usize| alg.label_index(&format!("T{}", l + 1));
    let r_idx = |a: usize| {
        let (j, k) = SO4_PAIRS[a];
        alg.label_index(&format!("R{}{}", j + 1, k + 1))
    };
    let mut action = vec![Matrix::zeros(4, 4); n];
    for (a, &(i, j)) in SO4_PAIRS.iter().enumerate() {
        let idx = r_idx(a)
            .ok_or_else(|| Error::InvalidAlgebra("expected so(4) labels R12..R34".into()))?;
        action[idx] = rotation_generator(i, j);
    }
    let act = ModuleAction::new(n, (1..=4).map(|k| format!("W{k}")).collect(), action)?;
    let mut comps = Vec::new();
    for i in 0..4 {
        let mut terms = Vec::new();
        for (a, &(j, k)) in SO4_PAIRS.iter().enumerate() {
            for l in 0..4 {
                let e = levi_civita([i, j, k, l]);
                if e != 0 {
                    let (ri, tl) = (
                        r_idx(a).expect("checked"),
                        t_idx(l).ok_or_else(|| {
                            Error::InvalidAlgebra("expected labels T1..T4".into())
                        })?,
                    );
                    terms.push((
                        Monomial::var(n, ri).mul(&Monomial::var(n, tl)),
                        int(e.into()),
                    ));
                }
            }
        }
        comps.push(Polynomial::from_terms(n, terms));
    }
    build_custom_lift(alg, &act, comps)
}

/// `|t|², |w|², t·w` and `(r ∧ t)·w` on the dual of the extension built by
/// [`so4_wedge_lift`]. The last one is cubic.
pub fn so4_overgroup_polynomials(lift: &QuadraticLift) -> Result<Vec<(&'static str, Polynomial)>> {
    let ext = &lift.extension;
    let m = ext.dim();
    let idx = |l: String| {
        ext.label_index(&l)
            .ok_or_else(|| Error::InvalidAlgebra(format!("missing label {l}")))
    };
    let mut t = Vec::new();
    let mut w = Vec::new();
    for i in 1..=4 {
        t.push(Polynomial::var(m, idx(format!("T{i}"))?));
        w.push(Polynomial::var(m, idx(format!("W{i}"))?));
    }
    let dot = |a: &[Polynomial], b: &[Polynomial]| {
        a.iter()
            .zip(b)
            .fold(Polynomial::zero(m), |acc, (x, y)| acc.add(&x.mul(y)))
    };
    let wedge: Vec<Polynomial> = lift.components.iter().map(|c| c.extend_vars(m)).collect();
    Ok(vec![
        ("|t|^2", dot(&t, &t)),
        ("|w|^2", dot(&w, &w)),
        ("t.w", dot(&t, &w)),
        ("(r^t).w", dot(&wedge, &w)),
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    pub trials: usize,
    pub max_residual: f64,
    /// Trials whose origin was not found generic after resampling.
    pub non_generic_origins: usize,
    pub passed: bool,
}

/// Covector generator used by [`check_equivariance`].
pub type CovectorSource<'a> = &'a (dyn Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<f64> + Sync);

/// Max over trials of `‖φ(e^{tX}·ℓ) − e^{tX}·φ(ℓ)‖ / (1 + ‖φ(ℓ)‖)` for `X ∈ g`.
///
/// Origins are uniform in `[-1, 1]^n`, resampled until generic (or drawn
/// from `source` when given); flow directions are unit vectors of `g` only.
pub fn check_equivariance(
    lift: &QuadraticLift,
    trials: usize,
    seed_value: u64,
    source: Option<CovectorSource>,
) -> EquivarianceReport {
    let n = lift.base_dim();
    let gen = coadjoint::generic_orbit_dim(&lift.base, 20, seed_value).dim;
    let results: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed::rng(seed_value, k as u64 + 1);
            let l = match source {
                Some(f) => f(&mut rng),
                None => random_generic_covector(&lift.base, gen, &mut rng)
                    .unwrap_or_else(|_| coadjoint::uniform_covector(n, &mut rng)),
            };
            let generic = orbit_dim(&lift.base, &l).map(|d| d == gen).unwrap_or(false);
            let u = unit_direction(n, &mut rng);
            let t: f64 = rand::Rng::random_range(&mut rng, -1.0..1.0);
            let lhs = lift.phi(&flow(&lift.base, &l, &u, t).expect("dimensions"));
            let phi_l = lift.phi(&l);
            let mut up = u.clone();
            up.resize(lift.extension.dim(), 0.0);
            let rhs = flow(&lift.extension, &phi_l, &up, t).expect("dimensions");
            let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
            (l2_norm(&diff) / (1.0 + l2_norm(&phi_l)), generic)
        })
        .collect();
    let max_residual = results.iter().map(|r| r.0).fold(0.0, f64::max);
    EquivarianceReport {
        trials,
        max_residual,
        non_generic_origins: results.iter().filter(|r| !r.1).count(),
        passed: max_residual < EQUIVARIANCE_TOL,
    }
}

/// `(dim G·ℓ, dim G⁺·φ(ℓ))`.
pub fn check_orbit_dims(lift: &QuadraticLift, l: &[f64]) -> Result<(usize, usize)> {
    if l.len() != lift.base_dim() {
        return Err(Error::DimensionMismatch {
            expected: lift.base_dim(),
            found: l.len(),
        });
    }
    Ok((
        orbit_dim(&lift.base, l)?,
        orbit_dim(&lift.extension, &lift.phi(l))?,
    ))
}

/// Whether `a^⊥` lies in the tangent space `span{F_i ℓ}` (rank test).
pub fn check_aperp_tangency(alg: &LieAlgebra, a: &Subspace, l: &[f64]) -> Result<bool> {
    let n = alg.dim();
    if l.len() != n || a.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: l.len(),
        });
    }
    let perp = a.basis().transpose().nullspace();
    if perp.is_empty() {
        return Ok(true);
    }
    let fields = coadjoint::coadjoint_fields(alg);
    let lv = nalgebra::DVector::from_column_slice(l);
    let tangent: Vec<Vec<f64>> = fields
        .iter()
        .map(|f| (f * &lv).as_slice().to_vec())
        .collect();
    let mut cols = tangent.clone();
    cols.extend(
        perp.iter()
            .map(|v| v.iter().map(rational_to_f64).collect::<Vec<_>>()),
    );
    let as_mat = |cs: &[Vec<f64>]| DMatrix::from_fn(n, cs.len(), |i, j| cs[j][i]);
    Ok(numeric_rank(&as_mat(&cols)) == numeric_rank(&as_mat(&tangent)))
}
