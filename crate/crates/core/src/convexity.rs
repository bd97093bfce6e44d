//! Convex-hull geometry on finite samples: the paraboloid lift, LP hull
//! membership, the strict-convexity recovery experiment, and hull
//! comparisons between orbit samples before and after lifting.
//!
//! Hull verdicts are one-sided. A non-member verdict is backed by the LP
//! optimum (no convex combination of the sample comes within ε); a member
//! verdict only says the point is close to the hull of this sample.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::coadjoint::{sample_orbit, HullSample, WalkParams};
use crate::lie::LieAlgebra;
use crate::linalg::{l2_norm, linf_norm};
use crate::overgroup::QuadraticLift;
use crate::seed;
use crate::{Error, Result};

/// Default ε as a fraction of the sample's L∞ diameter.
pub const DEFAULT_EPS_FRACTION: f64 = 0.05;

/// Ratio above which a recovery trial is logged for inspection.
pub const NEAR_VIOLATION_RATIO: f64 = 0.9;

/// `(x_1, …, x_n, x_1², …, x_n²)`.
pub fn std_lift(x: &[f64]) -> Vec<f64> {
    x.iter().copied().chain(x.iter().map(|v| v * v)).collect()
}

/// Sample points with an L∞ membership tolerance.
#[derive(Clone, Debug)]
pub struct HullModel {
    pub points: Vec<Vec<f64>>,
    pub epsilon: f64,
}

impl HullModel {
    /// `epsilon = None` uses [`DEFAULT_EPS_FRACTION`] of the diameter.
    pub fn new(sample: &HullSample, epsilon: Option<f64>) -> Result<Self> {
        Self::from_points(sample.points.clone(), epsilon)
    }

    pub fn from_points(points: Vec<Vec<f64>>, epsilon: Option<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Lp("hull model needs at least one point".into()));
        }
        let d = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        let eps = epsilon.unwrap_or_else(|| {
            DEFAULT_EPS_FRACTION * HullSample::from_points(points.clone()).diameter()
        });
        Ok(HullModel {
            points,
            epsilon: eps.max(f64::MIN_POSITIVE),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub member: bool,
    /// `‖y − Σ t_j S_j‖∞` for the returned weights.
    pub slack: f64,
    pub epsilon: f64,
    /// Sparse certificate `(index, weight)`.
    pub weights: Vec<(usize, f64)>,
}

/// Minimizes `s` subject to `-s ≤ y − Σ t_j S_j ≤ s`, `Σ t_j = 1`, `t ≥ 0`.
pub fn hull_membership(y: &[f64], h: &HullModel) -> Result<Membership> {
    let d = h.ambient_dim();
    if y.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: y.len(),
        });
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let ts: Vec<_> = h
        .points
        .iter()
        .map(|_| lp.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let s = lp.add_var(1.0, (0.0, f64::INFINITY));
    for k in 0..d {
        let mut upper: Vec<_> = ts.iter().zip(&h.points).map(|(&t, p)| (t, p[k])).collect();
        let mut lower = upper.clone();
        upper.push((s, 1.0));
        lower.push((s, -1.0));
        lp.add_constraint(upper.as_slice(), ComparisonOp::Ge, y[k]);
        lp.add_constraint(lower.as_slice(), ComparisonOp::Le, y[k]);
    }
    let ones: Vec<_> = ts.iter().map(|&t| (t, 1.0)).collect();
    lp.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    let sol = lp
        .solve()
        .map_err(|e| Error::Lp(format!("{e}")))?
        .into_solution()
        .map_err(|i| Error::Lp(format!("interrupted: {:?}", i.termination_reason())))?;

    let mut weights: Vec<(usize, f64)> = ts
        .iter()
        .enumerate()
        .map(|(j, &t)| (j, sol.var_value(t).max(0.0)))
        .filter(|(_, w)| *w > 1e-12)
        .collect();
    let total: f64 = weights.iter().map(|w| w.1).sum();
    if total <= 0.0 {
        return Err(Error::Lp("solver returned no convex weights".into()));
    }
    for w in &mut weights {
        w.1 /= total;
    }
    let mut recon = vec![0.0; d];
    for &(j, w) in &weights {
        for (r, p) in recon.iter_mut().zip(&h.points[j]) {
            *r += w * p;
        }
    }
    let slack = y
        .iter()
        .zip(&recon)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Membership {
        member: slack <= h.epsilon,
        slack,
        epsilon: h.epsilon,
        weights,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveryTrial {
    pub subset_size: usize,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub distance: f64,
    /// `distance / (2 ε′)`; the bound holds iff this is at most 1.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveryReport {
    pub trials: usize,
    pub dim: usize,
    pub points: usize,
    pub max_ratio: f64,
    pub violations: usize,
    pub epsilon_prime: Vec<f64>,
    /// Trials with ratio above [`NEAR_VIOLATION_RATIO`].
    pub near_violations: Vec<RecoveryTrial>,
}

/// One recovery trial from explicit weights over points of `a`.
pub fn recovery_trial(a: &[Vec<f64>], chosen: &[(usize, f64)]) -> RecoveryTrial {
    let n = a[0].len();
    let mut z = vec![0.0; 2 * n];
    for &(j, t) in chosen {
        for (zk, v) in z.iter_mut().zip(std_lift(&a[j])) {
            *zk += t * v;
        }
    }
    let x: Vec<f64> = z[..n].to_vec();
    let diff: Vec<f64> = std_lift(&x).iter().zip(&z).map(|(p, q)| p - q).collect();
    let epsilon = l2_norm(&diff);
    let epsilon_prime = epsilon + (n as f64).sqrt() * (2.0 * l2_norm(&x) + 1.0);
    let distance = a
        .iter()
        .map(|p| l2_norm(&p.iter().zip(&x).map(|(u, v)| u - v).collect::<Vec<_>>()))
        .fold(f64::INFINITY, f64::min);
    RecoveryTrial {
        subset_size: chosen.len(),
        epsilon,
        epsilon_prime,
        distance,
        ratio: distance / (2.0 * epsilon_prime),
    }
}

/// Random convex combinations of lifted points of `a`, checked against the
/// bound `‖X − X^{j₀}‖ ≤ 2ε′`.
///
/// Subset sizes are uniform in `[1, min(|A|, 3n)]`, weights are flat
/// Dirichlet.
pub fn lemma_recovery_experiment(
    a: &[Vec<f64>],
    trials: usize,
    seed_value: u64,
) -> Result<RecoveryReport> {
    let Some(first) = a.first() else {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    };
    let n = first.len();
    if let Some(p) = a.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let max_k = a.len().min(3 * n).max(1);
    let results: Vec<RecoveryTrial> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed::rng(seed_value, k as u64);
            let size = rng.random_range(1..=max_k);
            let idx = sample_indices(&mut rng, a.len(), size).into_vec();
            let raw: Vec<f64> = idx.iter().map(|_| Exp1.sample(&mut rng)).collect();
            let total: f64 = raw.iter().sum();
            let chosen: Vec<(usize, f64)> = idx
                .into_iter()
                .zip(raw.into_iter().map(|w: f64| w / total))
                .collect();
            recovery_trial(a, &chosen)
        })
        .collect();
    Ok(RecoveryReport {
        trials,
        dim: n,
        points: a.len(),
        max_ratio: results.iter().map(|r| r.ratio).fold(0.0, f64::max),
        violations: results.iter().filter(|r| r.ratio > 1.0).count(),
        epsilon_prime: results.iter().map(|r| r.epsilon_prime).collect(),
        near_violations: results
            .into_iter()
            .filter(|r| r.ratio > NEAR_VIOLATION_RATIO)
            .collect(),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub enum EpsPolicy {
    /// Fraction of the diameter of the sample whose hull is tested against.
    Relative(f64),
    Absolute(f64),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HullTestOptions {
    pub epsilon: EpsPolicy,
    /// Test at most this many probe points per direction (the first ones).
    pub max_probes: Option<usize>,
    /// Only probe points whose Euclidean norm, taken over the first
    /// `probe_norm_dims` coordinates, is at most this.
    pub probe_radius: Option<f64>,
    pub probe_norm_dims: Option<usize>,
}

impl Default for HullTestOptions {
    fn default() -> Self {
        HullTestOptions {
            epsilon: EpsPolicy::Relative(DEFAULT_EPS_FRACTION),
            max_probes: None,
            probe_radius: None,
            probe_norm_dims: None,
        }
    }
}

impl HullTestOptions {
    fn model(&self, s: &HullSample) -> Result<HullModel> {
        match self.epsilon {
            EpsPolicy::Relative(f) => HullModel::new(s, Some(f * s.diameter())),
            EpsPolicy::Absolute(e) => HullModel::new(s, Some(e)),
        }
    }

    fn probes<'a>(&self, s: &'a HullSample) -> Vec<&'a [f64]> {
        let within = |p: &[f64]| {
            self.probe_radius.is_none_or(|r| {
                let k = self.probe_norm_dims.unwrap_or(p.len()).min(p.len());
                l2_norm(&p[..k]) <= r
            })
        };
        let it = s.points.iter().map(Vec::as_slice).filter(|p| within(p));
        match self.max_probes {
            Some(m) => it.take(m).collect(),
            None => it.collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionResult {
    pub rate: f64,
    pub probes: usize,
    pub epsilon: f64,
    pub max_slack: f64,
    /// Probe with the largest slack.
    pub worst: Option<Vec<f64>>,
}

fn direction(
    hull: &HullSample,
    probes_from: &HullSample,
    opts: &HullTestOptions,
) -> Result<DirectionResult> {
    let model = opts.model(hull)?;
    let probes = opts.probes(probes_from);
    let verdicts = probes
        .par_iter()
        .map(|p| hull_membership(p, &model))
        .collect::<Result<Vec<_>>>()?;
    let members = verdicts.iter().filter(|m| m.member).count();
    let worst = verdicts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.slack.total_cmp(&b.1.slack));
    Ok(DirectionResult {
        rate: if probes.is_empty() {
            1.0
        } else {
            members as f64 / probes.len() as f64
        },
        probes: probes.len(),
        epsilon: model.epsilon,
        max_slack: worst.map_or(0.0, |w| w.1.slack),
        worst: worst.map(|w| probes[w.0].to_vec()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HullEqualityReport {
    /// Fraction of `S₂` inside `Hull(S₁)`.
    pub rate_12: DirectionResult,
    /// Fraction of `S₁` inside `Hull(S₂)`.
    pub rate_21: DirectionResult,
}

pub fn hull_equality_test(
    s1: &HullSample,
    s2: &HullSample,
    opts: &HullTestOptions,
) -> Result<HullEqualityReport> {
    if s1.ambient_dim() != s2.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: s1.ambient_dim(),
            found: s2.ambient_dim(),
        });
    }
    Ok(HullEqualityReport {
        rate_12: direction(s1, s2, opts)?,
        rate_21: direction(s2, s1, opts)?,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparationParams {
    pub count: usize,
    pub walk: WalkParams,
    pub options: HullTestOptions,
    /// Both base rates at least this means the pair is base-indistinguishable.
    pub indistinguishable_rate: f64,
}

impl Default for SeparationParams {
    fn default() -> Self {
        SeparationParams {
            count: 2000,
            walk: WalkParams {
                steps: 5,
                tau: 1.5,
                radius: Some(6.0),
                retry_cap: 1000,
            },
            options: HullTestOptions {
                max_probes: Some(60),
                probe_radius: Some(3.0),
                ..HullTestOptions::default()
            },
            indistinguishable_rate: 0.9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// 1 when the point lies on the lift of the first orbit, 2 otherwise.
    pub orbit: usize,
    pub point: Vec<f64>,
    pub slack: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub separated: bool,
    pub witness: Option<Witness>,
    pub base: HullEqualityReport,
    pub lifted: HullEqualityReport,
    pub base_indistinguishable: bool,
}

/// Samples both orbits, lifts them, and looks for a lifted point of one
/// orbit that is not an ε-member of the other's lifted hull.
///
/// Each orbit's sample seed depends only on `seed` and its own origin, so
/// swapping the arguments swaps the roles without changing the verdict.
pub fn lifted_separation_test(
    alg: &LieAlgebra,
    lift: &QuadraticLift,
    l1: &[f64],
    l2: &[f64],
    params: &SeparationParams,
    seed_value: u64,
) -> Result<SeparationReport> {
    let s1 = sample_orbit(
        alg,
        l1,
        params.count,
        params.walk,
        seed::derive_from_point(seed_value, l1),
    )?;
    let s2 = sample_orbit(
        alg,
        l2,
        params.count,
        params.walk,
        seed::derive_from_point(seed_value, l2),
    )?;
    let base = hull_equality_test(&s1, &s2, &params.options)?;
    let (t1, t2) = (s1.map(|p| lift.phi(p)), s2.map(|p| lift.phi(p)));
    let mut lifted_opts = params.options;
    lifted_opts.probe_norm_dims = Some(alg.dim());
    let lifted = hull_equality_test(&t1, &t2, &lifted_opts)?;
    let candidates = [(2, &lifted.rate_12), (1, &lifted.rate_21)];
    let witness = candidates
        .iter()
        .filter(|(_, d)| d.max_slack > d.epsilon)
        .max_by(|a, b| (a.1.max_slack / a.1.epsilon).total_cmp(&(b.1.max_slack / b.1.epsilon)))
        .map(|(orbit, d)| Witness {
            orbit: *orbit,
            point: d.worst.clone().unwrap_or_default(),
            slack: d.max_slack,
            epsilon: d.epsilon,
        });
    let r = params.indistinguishable_rate;
    Ok(SeparationReport {
        separated: witness.is_some(),
        witness,
        base_indistinguishable: base.rate_12.rate >= r && base.rate_21.rate >= r,
        base,
        lifted,
    })
}

/// L∞ norm, re-exported for report consumers.
pub fn sup_norm(v: &[f64]) -> f64 {
    linf_norm(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_lift_examples() {
        assert_eq!(std_lift(&[1.0, 2.0]), vec![1.0, 2.0, 1.0, 4.0]);
        assert_eq!(std_lift(&[0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn midpoint_is_member() {
        let h = HullModel::from_points(
            vec![vec![0.0, 0.0], vec![2.0, 4.0], vec![1.0, -3.0]],
            Some(1e-9),
        )
        .unwrap();
        let m = hull_membership(&[1.0, 2.0], &h).unwrap();
        assert!(m.member);
        assert!(m.slack < 1e-12);
        let total: f64 = m.weights.iter().map(|w| w.1).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn outside_bounding_box_is_not_member() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let h = HullModel::from_points(pts, Some(0.1)).unwrap();
        let m = hull_membership(&[1.2, 0.5], &h).unwrap();
        assert!(!m.member);
        assert!(m.slack > 0.1);
    }

    #[test]
    fn two_point_recovery_by_hand() {
        let a = vec![vec![0.0], vec![1.0]];
        let t = recovery_trial(&a, &[(0, 0.5), (1, 0.5)]);
        assert!((t.epsilon - 0.25).abs() < 1e-15);
        assert!((t.distance - 0.5).abs() < 1e-15);
        assert!(t.ratio <= 1.0);
    }

    #[test]
    fn single_point_recovery_is_exact() {
        let r = lemma_recovery_experiment(&[vec![0.3, -2.0]], 50, 9).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.max_ratio, 0.0);
    }

    #[test]
    fn identical_samples_have_full_rates() {
        let s = HullSample::from_points(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.3, 0.3],
        ]);
        let r = hull_equality_test(&s, &s, &HullTestOptions::default()).unwrap();
        assert_eq!((r.rate_12.rate, r.rate_21.rate), (1.0, 1.0));
    }
}
