use std::sync::OnceLock;

use proptest::prelude::*;

use orbitforge::catalog::{self, CatalogEntry};
use orbitforge::coadjoint::{coadjoint_matrix, flow, orbit_dim};
use orbitforge::convexity::{hull_membership, lemma_recovery_experiment, std_lift, HullModel};
use orbitforge::overgroup::build_sym2_overgroup;
use orbitforge::scalar::rat;

fn entries() -> &'static [CatalogEntry] {
    static E: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    E.get_or_init(catalog::representatives)
}

fn vec_in(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

fn entry_and_vectors(k: usize) -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (0..entries().len()).prop_flat_map(move |i| {
        let n = entries()[i].algebra.dim();
        (Just(i), prop::collection::vec(vec_in(n), k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_bilinear_and_antisymmetric((i, v) in entry_and_vectors(3), a in -3.0f64..3.0) {
        let alg = &entries()[i].algebra;
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let xy = alg.bracket_f64(x, y).unwrap();
        let yx = alg.bracket_f64(y, x).unwrap();
        let comb: Vec<f64> = x.iter().zip(z).map(|(p, q)| a * p + q).collect();
        let lhs = alg.bracket_f64(&comb, y).unwrap();
        let zy = alg.bracket_f64(z, y).unwrap();
        for k in 0..alg.dim() {
            prop_assert!((xy[k] + yx[k]).abs() < 1e-9);
            prop_assert!((lhs[k] - (a * xy[k] + zy[k])).abs() < 1e-8);
        }
    }

    #[test]
    fn coadjoint_matrix_is_skew_with_even_rank((i, v) in entry_and_vectors(1)) {
        let alg = &entries()[i].algebra;
        let m = coadjoint_matrix(alg, &v[0]).unwrap();
        prop_assert!((&m + m.transpose()).amax() < 1e-12);
        prop_assert_eq!(orbit_dim(alg, &v[0]).unwrap() % 2, 0);
    }

    #[test]
    fn known_invariants_are_constant_along_flows((i, v) in entry_and_vectors(2), t in -1.0f64..1.0) {
        let e = &entries()[i];
        let moved = flow(&e.algebra, &v[0], &v[1], t).unwrap();
        for p in &e.known_invariants {
            let (a, b) = (p.eval_f64(&v[0]).unwrap(), p.eval_f64(&moved).unwrap());
            prop_assert!((a - b).abs() <= 1e-7 * (1.0 + a.abs()), "{} {}: {} vs {}", e.algebra.name(), p, a, b);
        }
    }

    #[test]
    fn sym2_lift_projects_back_exactly(i in 0..entries().len(), nums in prop::collection::vec((-50i64..50, 1i64..9), 6)) {
        let e = &entries()[i];
        let Some(a) = &e.special_ideal else { return Ok(()) };
        if !e.algebra.is_exact() || catalog::KNOWN_TABLE_DEFECTS.contains(&e.key) {
            return Ok(());
        }
        let lift = build_sym2_overgroup(&e.algebra, a).unwrap();
        let l: Vec<_> = nums.iter().cycle().take(e.algebra.dim()).map(|&(p, q)| rat(p, q)).collect();
        prop_assert_eq!(lift.project(&lift.phi_exact(&l).unwrap()), l);
    }

    #[test]
    fn std_lift_projects_back(x in prop::collection::vec(-1e6f64..1e6, 1..8)) {
        let y = std_lift(&x);
        prop_assert_eq!(&y[..x.len()], &x[..]);
        for (k, v) in x.iter().enumerate() {
            prop_assert_eq!(y[x.len() + k], v * v);
        }
    }

    #[test]
    fn membership_certificate_and_monotonicity(
        pts in prop::collection::vec(vec_in(3), 1..25),
        y in vec_in(3),
        eps in 0.001f64..1.0,
        bump in 0.0f64..1.0,
    ) {
        let h = HullModel::from_points(pts.clone(), Some(eps)).unwrap();
        let m = hull_membership(&y, &h).unwrap();
        let total: f64 = m.weights.iter().map(|w| w.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        let mut recon = [0.0; 3];
        for &(j, w) in &m.weights {
            prop_assert!(w >= 0.0);
            for k in 0..3 { recon[k] += w * pts[j][k]; }
        }
        for k in 0..3 {
            prop_assert!((recon[k] - y[k]).abs() <= m.slack + 1e-9);
        }
        if m.member {
            let wider = HullModel::from_points(pts, Some(eps + bump)).unwrap();
            prop_assert!(hull_membership(&y, &wider).unwrap().member);
        }
    }

    #[test]
    fn recovery_never_violates_bound(
        a in (1usize..=6).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-5.0f64..5.0, n), 1..=20)),
        seed in any::<u64>(),
    ) {
        let r = lemma_recovery_experiment(&a, 40, seed).unwrap();
        prop_assert_eq!(r.violations, 0, "max ratio {}", r.max_ratio);
    }
}
