use std::f64::consts::PI;

use affine_lab_core::generators::{cosine_perturbed, disk, ellipse_body, superellipse};
use affine_lab_core::stability::{
    constants, john_position, reduce_p1, verify, VerifyConfig, JOHN_C1, JOHN_C2,
};
use affine_lab_core::{AngularGrid, LinearMap2};

#[test]
fn john_position_of_an_ellipse_is_the_unit_disk() {
    let g = AngularGrid::new(512).unwrap();
    let body = ellipse_body(&g, 2.0, 0.5, 0.0).unwrap();
    let (k, map) = john_position(&body).unwrap();
    assert!(k.support().iter().all(|s| (s - 1.0).abs() < 1e-8));
    let want = LinearMap2::diagonal(0.5, 2.0).unwrap();
    assert!(map.distance(&want) < 1e-8);
}

#[test]
fn john_position_support_bounds() {
    let g = AngularGrid::new(256).unwrap();
    let bodies = [
        cosine_perturbed(&g, 0.05, 2).unwrap(),
        cosine_perturbed(&g, 0.1, 1).unwrap(),
        superellipse(&g, 4.0).unwrap(),
        ellipse_body(&g, 3.0, 0.4, 1.1).unwrap(),
    ];
    for body in bodies {
        let (k, map) = john_position(&body.with_area(PI).unwrap()).unwrap();
        assert!(map.is_special());
        assert!(k.min_support() >= JOHN_C1 - 1e-6);
        assert!(k.max_support() <= JOHN_C2 + 1e-6);
    }
}

#[test]
fn perturbed_body_has_ten_fold_slack() {
    let g = AngularGrid::new(512).unwrap();
    let rep = verify(
        &cosine_perturbed(&g, 0.01, 2).unwrap(),
        2.0,
        &VerifyConfig::default(),
    )
    .unwrap();
    assert!((rep.epsilon - 0.0024127845841085405).abs() < 1e-9);
    assert!(rep.in_theorem_range && rep.pass && rep.sandwich_ok);
    assert!(rep.bound_value >= 10.0 * rep.d_h_measured);
    assert!(rep.area_relations_ok);
}

#[test]
fn eccentric_ellipse_is_mapped_to_a_disk() {
    let g = AngularGrid::new(512).unwrap();
    let rep = verify(
        &ellipse_body(&g, 3.0, 1.0 / 3.0, 0.0).unwrap(),
        2.0,
        &VerifyConfig::default(),
    )
    .unwrap();
    assert!(rep.epsilon.abs() < 1e-8);
    assert!(rep.pass);
    assert!(rep.d_h_measured < 1e-6);
}

#[test]
fn disk_is_trivial() {
    let g = AngularGrid::new(256).unwrap();
    let rep = verify(&disk(&g, 0.7).unwrap(), 3.0, &VerifyConfig::default()).unwrap();
    assert!(rep.trivial && rep.pass);
    assert!(rep.d_h_measured < 1e-10);
}

#[test]
fn p_one_is_reduced_to_p_two() {
    let g = AngularGrid::new(256).unwrap();
    let body = cosine_perturbed(&g, 0.02, 3).unwrap();
    let rep = reduce_p1(&body, &VerifyConfig::default()).unwrap();
    assert!(rep.reduced_from_p1 && rep.pass);
    assert_eq!(rep.p, 1.0);
    assert_eq!(rep.pipeline_p, 2.0);
    let c2 = constants(2.0, JOHN_C1, JOHN_C2).unwrap();
    assert_eq!(rep.constants.c_p, c2.c_p);
    let direct = verify(&body, 2.0, &VerifyConfig::default()).unwrap();
    assert!(rep.epsilon >= direct.epsilon);

    let ellipse = reduce_p1(
        &ellipse_body(&g, 1.4, 0.9, 0.5).unwrap(),
        &VerifyConfig::default(),
    )
    .unwrap();
    assert!(ellipse.pass && ellipse.d_h_measured < 1e-6);
}

#[test]
fn lambda_tends_to_one() {
    let g = AngularGrid::new(256).unwrap();
    let mut last = f64::INFINITY;
    for a in [0.02, 0.01, 0.005, 0.0025] {
        let rep = verify(
            &cosine_perturbed(&g, a, 2).unwrap(),
            2.0,
            &VerifyConfig::default(),
        )
        .unwrap();
        let gap = rep.lambda - 1.0;
        assert!(gap >= 0.0 && gap < last);
        assert!(rep.sigma_window_at_tstar.straddles_one(1e-8));
        last = gap;
    }
}

#[test]
fn out_of_range_deficit_is_still_reported() {
    let g = AngularGrid::new(256).unwrap();
    let rep = verify(
        &cosine_perturbed(&g, 0.05, 2).unwrap(),
        2.0,
        &VerifyConfig::default(),
    )
    .unwrap();
    assert!(!rep.in_theorem_range);
    assert!(rep.delta_clamped);
    assert_eq!(rep.pass, rep.d_h_measured < rep.bound_value);
}
