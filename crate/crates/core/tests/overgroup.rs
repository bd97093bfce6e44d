use std::collections::BTreeMap;

use orbitforge::catalog::{self, so4_r4, so4_wedge_f64};
use orbitforge::coadjoint::{generic_orbit_dim, stabilizer_dim};
use orbitforge::invariants::{invariants_of_degree, span_contains, verify_invariant};
use orbitforge::overgroup::{
    build_sym2_overgroup, check_equivariance, check_orbit_dims, so4_overgroup_polynomials,
    so4_wedge_lift,
};
use orbitforge::Subspace;

fn so4_base_point(labels: &orbitforge::LieAlgebra) -> Vec<f64> {
    let mut l0 = vec![0.0; 10];
    l0[labels.label_index("T4").unwrap()] = 1.5;
    l0[labels.label_index("R12").unwrap()] = 2.0;
    l0
}

#[test]
fn sym2_equivariance_on_special_algebras() {
    let names = [
        "g3",
        "g4",
        "g5_1",
        "g5_6",
        "g6_13",
        "g6_19",
        "g4_9(1/2)",
        "g4_2",
    ];
    for name in names {
        let e = catalog::get(name, &BTreeMap::new()).unwrap();
        let lift = build_sym2_overgroup(&e.algebra, e.special_ideal.as_ref().unwrap()).unwrap();
        let r = check_equivariance(&lift, 100, 17, None);
        assert!(r.passed, "{name}: {}", r.max_residual);
        let gen = generic_orbit_dim(&e.algebra, 20, 1);
        let (a, b) = check_orbit_dims(&lift, &gen.witness).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn g6_20_lift_is_equivariant_off_the_special_case() {
    let e = catalog::get("g6_20", &BTreeMap::new()).unwrap();
    let lift =
        build_sym2_overgroup(&e.algebra, &Subspace::coordinate(6, &[3, 4, 5]).unwrap()).unwrap();
    let r = check_equivariance(&lift, 100, 2, None);
    assert!(r.passed && r.non_generic_origins == 0, "{r:?}");
    assert_eq!(
        check_orbit_dims(&lift, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap(),
        (4, 4)
    );
}

#[test]
fn so4_lift_raises_orbit_dimension() {
    let g = so4_r4().unwrap();
    let lift = so4_wedge_lift(&g).unwrap();
    let l0 = so4_base_point(&g);
    assert_eq!(check_orbit_dims(&lift, &l0).unwrap(), (8, 10));
    assert_eq!(stabilizer_dim(&g, &l0).unwrap(), 2);
    assert_eq!(stabilizer_dim(&lift.extension, &lift.phi(&l0)).unwrap(), 4);
    assert!(check_equivariance(&lift, 100, 5, None).passed);
    assert_eq!(generic_orbit_dim(&g, 50, 3).dim, 8);
    assert_eq!(generic_orbit_dim(&lift.extension, 50, 3).dim, 10);
}

#[test]
fn so4_lift_components_are_the_wedge() {
    let g = so4_r4().unwrap();
    let lift = so4_wedge_lift(&g).unwrap();
    let l: Vec<f64> = (0..10).map(|k| (k as f64 * 0.37).sin()).collect();
    let t = [l[0], l[1], l[2], l[3]];
    let w = so4_wedge_f64(&l[4..], &t);
    let phi = lift.phi(&l);
    for i in 0..4 {
        assert!((phi[10 + i] - w[i]).abs() < 1e-12);
    }
}

#[test]
fn so4_overgroup_invariants() {
    let lift = so4_wedge_lift(&so4_r4().unwrap()).unwrap();
    let polys = so4_overgroup_polynomials(&lift).unwrap();
    let d2 = invariants_of_degree(&lift.extension, 2).unwrap();
    for (name, p) in &polys {
        assert!(verify_invariant(&lift.extension, p).unwrap(), "{name}");
        if p.degree() == 2 {
            assert!(span_contains(&d2, p), "{name}");
        }
    }
    assert_eq!(polys[3].1.degree(), 3);
    assert!(span_contains(
        &invariants_of_degree(&lift.extension, 3).unwrap(),
        &polys[3].1
    ));
}
