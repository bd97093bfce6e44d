//! The coadjoint action as linear vector fields on the dual.
//!
//! Convention: `(X·ℓ)(Y) = ℓ([X, Y])`, so the field of `X_i` is the matrix
//! `F_i[j][k] = c_ij^k` acting on coordinate vectors.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::lie::LieAlgebra;
use crate::linalg::{l2_norm, numeric_rank, Matrix};
use crate::scalar::Rational;
use crate::seed;
use crate::{Error, Result};

/// Attempts allowed when resampling for a generic covector.
pub const GENERIC_RESAMPLE_CAP: usize = 100;

pub fn coadjoint_field(alg: &LieAlgebra, i: usize) -> DMatrix<f64> {
    let n = alg.dim();
    DMatrix::from_fn(n, n, |j, k| alg.c(i, j, k))
}

pub fn coadjoint_field_exact(alg: &LieAlgebra, i: usize) -> Result<Matrix<Rational>> {
    let n = alg.dim();
    let c = alg.constants_exact()?;
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = c[(i * n + j) * n + k].clone();
        }
    }
    Ok(m)
}

pub fn coadjoint_fields(alg: &LieAlgebra) -> Vec<DMatrix<f64>> {
    (0..alg.dim()).map(|i| coadjoint_field(alg, i)).collect()
}

fn check_len(alg: &LieAlgebra, len: usize) -> Result<()> {
    if len != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: len,
        });
    }
    Ok(())
}

/// `M_ij = ℓ([X_i, X_j])`.
pub fn coadjoint_matrix(alg: &LieAlgebra, l: &[f64]) -> Result<DMatrix<f64>> {
    check_len(alg, l.len())?;
    let n = alg.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| alg.c(i, j, k) * l[k]).sum()
    }))
}

pub fn coadjoint_matrix_exact(alg: &LieAlgebra, l: &[Rational]) -> Result<Matrix<Rational>> {
    check_len(alg, l.len())?;
    let n = alg.dim();
    let c = alg.constants_exact()?;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = Rational::from_integer(0.into());
            for (k, lk) in l.iter().enumerate() {
                let x = &c[(i * n + j) * n + k];
                if !num_traits::Zero::is_zero(x) {
                    s += x * lk;
                }
            }
            m[(i, j)] = s;
        }
    }
    Ok(m)
}

/// Rank of the coadjoint matrix by singular values.
pub fn orbit_dim(alg: &LieAlgebra, l: &[f64]) -> Result<usize> {
    Ok(numeric_rank(&coadjoint_matrix(alg, l)?))
}

pub fn orbit_dim_exact(alg: &LieAlgebra, l: &[Rational]) -> Result<usize> {
    Ok(coadjoint_matrix_exact(alg, l)?.rank())
}

pub fn stabilizer_dim(alg: &LieAlgebra, l: &[f64]) -> Result<usize> {
    Ok(alg.dim() - orbit_dim(alg, l)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericDim {
    pub dim: usize,
    pub witness: Vec<f64>,
    pub trials: usize,
}

pub fn uniform_covector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Maximum orbit dimension over `trials` covectors uniform in `[-1, 1]^n`.
pub fn generic_orbit_dim(alg: &LieAlgebra, trials: usize, seed_value: u64) -> GenericDim {
    let trials = trials.max(1);
    let mut best: Option<(usize, Vec<f64>)> = None;
    for t in 0..trials {
        let mut rng = seed::rng(seed_value, t as u64);
        let l = uniform_covector(alg.dim(), &mut rng);
        let d = orbit_dim(alg, &l).expect("length matches");
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            best = Some((d, l));
        }
    }
    let (dim, witness) = best.expect("at least one trial");
    GenericDim {
        dim,
        witness,
        trials,
    }
}

/// Draws uniform covectors until one attains `generic_dim`.
pub fn random_generic_covector(
    alg: &LieAlgebra,
    generic_dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    for _ in 0..GENERIC_RESAMPLE_CAP {
        let l = uniform_covector(alg.dim(), rng);
        if orbit_dim(alg, &l)? == generic_dim {
            return Ok(l);
        }
    }
    Err(Error::SamplingExhausted {
        attempts: GENERIC_RESAMPLE_CAP,
        radius: 1.0,
    })
}

/// `F_u = Σ u_i F_i`.
pub fn field_along(alg: &LieAlgebra, u: &[f64]) -> Result<DMatrix<f64>> {
    check_len(alg, u.len())?;
    let n = alg.dim();
    Ok(DMatrix::from_fn(n, n, |j, k| {
        (0..n).map(|i| u[i] * alg.c(i, j, k)).sum()
    }))
}

/// `exp(t F_u) ℓ`.
pub fn flow(alg: &LieAlgebra, l: &[f64], u: &[f64], t: f64) -> Result<Vec<f64>> {
    check_len(alg, l.len())?;
    let f = field_along(alg, u)? * t;
    Ok((f.exp() * DVector::from_column_slice(l))
        .as_slice()
        .to_vec())
}

/// Uniform direction on the unit sphere of `R^n`.
pub fn unit_direction(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = l2_norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WalkParams {
    pub steps: usize,
    pub tau: f64,
    /// Euclidean radius bound; points beyond it are redrawn.
    pub radius: Option<f64>,
    /// Redraws allowed per point before giving up.
    pub retry_cap: usize,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            steps: 8,
            tau: 1.0,
            radius: None,
            retry_cap: 1000,
        }
    }
}

/// Finite stand-in for an orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct HullSample {
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub origin: Vec<f64>,
    pub walk: Option<WalkParamsRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WalkParamsRecord {
    pub steps: usize,
    pub tau: f64,
    pub radius: Option<f64>,
}

impl HullSample {
    /// Wraps a raw point matrix (no walk metadata).
    pub fn from_points(points: Vec<Vec<f64>>) -> Self {
        let origin = points.first().cloned().unwrap_or_default();
        HullSample {
            points,
            seed: 0,
            origin,
            walk: None,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Applies `f` to every point (e.g. a lift), keeping metadata.
    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64> + Sync) -> HullSample {
        HullSample {
            points: self.points.par_iter().map(|p| f(p)).collect(),
            seed: self.seed,
            origin: f(&self.origin),
            walk: self.walk,
        }
    }

    /// Largest L∞ distance between two points.
    pub fn diameter(&self) -> f64 {
        let d = self.ambient_dim();
        // L∞ diameter is the widest coordinate range.
        (0..d)
            .map(|k| {
                let (lo, hi) = self
                    .points
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[k]), hi.max(p[k]))
                    });
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|x| format!("{x:e}")).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "origin": self.origin,
            "walk": self.walk,
            "count": self.points.len(),
            "points": self.points,
        })
    }
}

/// Seeded random-walk sample of the orbit through `l`.
///
/// Each point composes `steps` flows with unit directions and times uniform
/// in `(-τ, τ)`. Point `k` uses its own stream, so results do not depend on
/// thread scheduling.
pub fn sample_orbit(
    alg: &LieAlgebra,
    l: &[f64],
    count: usize,
    walk: WalkParams,
    seed_value: u64,
) -> Result<HullSample> {
    check_len(alg, l.len())?;
    let fields = coadjoint_fields(alg);
    let n = alg.dim();
    let start = DVector::from_column_slice(l);
    let points = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed::rng(seed_value, k as u64);
            for _ in 0..walk.retry_cap.max(1) {
                let mut x = start.clone();
                for _ in 0..walk.steps {
                    let u = unit_direction(n, &mut rng);
                    let t = if walk.tau > 0.0 {
                        rng.random_range(-walk.tau..walk.tau)
                    } else {
                        0.0
                    };
                    let mut f = DMatrix::zeros(n, n);
                    for (ui, fi) in u.iter().zip(&fields) {
                        f += fi * (*ui * t);
                    }
                    x = f.exp() * x;
                }
                if walk.radius.is_none_or(|r| x.norm() <= r) {
                    return Ok(x.as_slice().to_vec());
                }
            }
            Err(Error::SamplingExhausted {
                attempts: walk.retry_cap,
                radius: walk.radius.unwrap_or(f64::INFINITY),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HullSample {
        points,
        seed: seed_value,
        origin: l.to_vec(),
        walk: Some(WalkParamsRecord {
            steps: walk.steps,
            tau: walk.tau,
            radius: walk.radius,
        }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectReport {
    /// Euclidean distance between the best group translate of `from` and `to`.
    pub residual: f64,
    /// Coordinates of the second kind of the best group element found.
    pub theta: Vec<f64>,
    pub starts: usize,
}

/// `exp(θ_1 F_1) ⋯ exp(θ_n F_n) ℓ`.
pub fn second_kind_action(
    fields: &[DMatrix<f64>],
    theta: &[f64],
    l: &DVector<f64>,
) -> DVector<f64> {
    let mut x = l.clone();
    for (f, t) in fields.iter().zip(theta).rev() {
        if *t != 0.0 {
            x = (f * *t).exp() * x;
        }
    }
    x
}

/// Searches for a group element moving `from` onto `to`.
///
/// Levenberg–Marquardt on coordinates of the second kind from several seeded
/// starting points. A small residual is evidence that the two covectors lie
/// on one orbit; a large one is not a proof of the contrary.
pub fn orbit_connect(
    alg: &LieAlgebra,
    from: &[f64],
    to: &[f64],
    starts: usize,
    seed_value: u64,
) -> Result<ConnectReport> {
    check_len(alg, from.len())?;
    check_len(alg, to.len())?;
    let fields = coadjoint_fields(alg);
    let n = alg.dim();
    let l = DVector::from_column_slice(from);
    let target = DVector::from_column_slice(to);
    let residual = |th: &[f64]| second_kind_action(&fields, th, &l) - &target;
    let mut best = (f64::INFINITY, vec![0.0; n]);
    for s in 0..starts.max(1) {
        let mut rng = seed::rng(seed_value, s as u64);
        let mut th: Vec<f64> = if s == 0 {
            vec![0.0; n]
        } else {
            (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
        };
        let mut r = residual(&th);
        let mut lambda = 1e-3;
        for _ in 0..300 {
            let cost = r.norm_squared();
            if cost < 1e-28 {
                break;
            }
            let h = 1e-6;
            let mut jac = DMatrix::zeros(n, n);
            for k in 0..n {
                let mut a = th.clone();
                let mut b = th.clone();
                a[k] += h;
                b[k] -= h;
                let col = (residual(&a) - residual(&b)) / (2.0 * h);
                jac.set_column(k, &col);
            }
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let g = &jt * &r;
            let mut improved = false;
            for _ in 0..20 {
                let mut a = jtj.clone();
                for k in 0..n {
                    a[(k, k)] += lambda * (1.0 + jtj[(k, k)]);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    lambda *= 10.0;
                    continue;
                };
                let cand: Vec<f64> = th.iter().zip(step.iter()).map(|(x, d)| x + d).collect();
                let rc = residual(&cand);
                if rc.norm_squared() < cost {
                    th = cand;
                    r = rc;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                break;
            }
        }
        let res = r.norm();
        if res < best.0 {
            best = (res, th);
        }
        if best.0 < 1e-12 {
            break;
        }
    }
    Ok(ConnectReport {
        residual: best.0,
        theta: best.1,
        starts: starts.max(1),
    })
}
