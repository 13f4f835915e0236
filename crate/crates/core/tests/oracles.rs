//! Values frozen from an independent quadrature at 10⁶ nodes.

use std::f64::consts::PI;

use affine_lab_core::functionals::{entropy_integral, iso_ratio};
use affine_lab_core::generators::cosine_perturbed;
use affine_lab_core::stability::{
    andrews_coefficient, constants, epsilon_admissibility, JOHN_C1, JOHN_C2,
};
use affine_lab_core::AngularGrid;

fn close(got: f64, want: f64, rel: f64) {
    assert!(
        (got - want).abs() <= rel * want.abs(),
        "got {got:.17e}, want {want:.17e}"
    );
}

#[test]
fn area_of_second_harmonic() {
    let g = AngularGrid::new(512).unwrap();
    let body = cosine_perturbed(&g, 0.1, 1).unwrap();
    close(body.area(), 3.094468763785947, 1e-13);
    close(body.area(), PI * (1.0 - 0.015), 1e-13);
}

#[test]
fn functionals_of_fourth_harmonic() {
    let g = AngularGrid::new(512).unwrap();
    let body = cosine_perturbed(&g, 0.05, 2).unwrap();
    close(body.area(), 3.082687791334984, 1e-13);
    let cases = [
        (
            1.0,
            6.058262001482888,
            9.016222582122206,
            0.08646565599660316,
        ),
        (
            2.0,
            6.056665951595954,
            9.17080061230543,
            0.07080362701333787,
        ),
        (
            3.0,
            6.074301865867482,
            9.270158059641618,
            0.06073661284555398,
        ),
    ];
    for (p, omega, ratio, eps) in cases {
        let sum = iso_ratio(&body, p).unwrap();
        close(sum.omega_p, omega, 1e-12);
        close(sum.ratio, ratio, 1e-12);
        close(sum.deficit, eps, 1e-10);
    }
}

#[test]
fn small_perturbation_deficit() {
    let g = AngularGrid::new(512).unwrap();
    let body = cosine_perturbed(&g, 0.01, 2).unwrap();
    close(
        iso_ratio(&body, 2.0).unwrap().deficit,
        0.0024127845841085405,
        1e-9,
    );
}

#[test]
fn entropy_of_second_harmonic() {
    let g = AngularGrid::new(512).unwrap();
    let body = cosine_perturbed(&g, 0.02, 1).unwrap();
    close(
        entropy_integral(&body, 2.0).unwrap(),
        8.094195397605747e-06,
        1e-9,
    );
}

#[test]
fn constants_at_p_two() {
    let c = constants(2.0, JOHN_C1, JOHN_C2).unwrap();
    assert_eq!(c.d_p, 24.0);
    close(c.d_prime_p, 1.813799364234218, 1e-14);
    close(c.d_prime_p, PI / 3f64.sqrt(), 1e-14);
    close(
        andrews_coefficient(JOHN_C1, JOHN_C2),
        7.019061402413292,
        1e-14,
    );
    close(c.c_p, 56.705572763455805, 1e-14);
    let adm = epsilon_admissibility(2.0, JOHN_C1, JOHN_C2).unwrap();
    close(adm.terms[0], 0.08838834764831847, 1e-14);
    close(adm.terms[1], 0.13741554001393774, 1e-14);
    close(adm.terms[2], 0.043351023557104774, 1e-14);
    assert_eq!(adm.binding, 3);
}
