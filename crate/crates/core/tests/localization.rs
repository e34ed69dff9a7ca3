use csl_rotor::localization::{
    geometry_tensors, loc_rate_axes, loc_rate_full, loc_rate_small_body, max_loc_rate, normalize_curve,
    rot_loc_rate, rot_loc_rate_small_angle,
};
use csl_rotor::{Atom, BodySpec, CslParams, FormFactor, MassSpec, Orientation, QuadratureSpec, Vec3};
use proptest::prelude::*;

fn molecule() -> BodySpec {
    BodySpec::atoms(vec![
        Atom { mass: 2e-20, position: Vec3::new(0.0, 0.0, 0.0) },
        Atom { mass: 1e-20, position: Vec3::new(1.2e-7, 0.0, 0.3e-7) },
        Atom { mass: 1.5e-20, position: Vec3::new(-0.4e-7, 0.9e-7, -0.5e-7) },
    ])
    .unwrap()
}

/// Gaussian integrals of the pair sum in closed form:
/// `F = (λ/2m₀²) Σ_ij m_i m_j [g(a_i − a_j) + g(b_i − b_j) − 2 g(a_i − b_j)]`
/// with `g(d) = exp(−d²/4r_C²)`.
fn pair_sum_rate(body: &BodySpec, csl: &CslParams, a: &Orientation, b: &Orientation) -> f64 {
    let atoms = match body.shape() {
        csl_rotor::Shape::Atoms(v) => v.clone(),
        _ => unreachable!(),
    };
    let g = |d: Vec3| (-d.norm_squared() / (4.0 * csl.r_c() * csl.r_c())).exp();
    let mut sum = 0.0;
    for i in &atoms {
        for j in &atoms {
            let (ai, aj) = (a.to_space(i.position), a.to_space(j.position));
            let (bi, bj) = (b.to_space(i.position), b.to_space(j.position));
            sum += i.mass * j.mass * (g(ai - aj) + g(bi - bj) - 2.0 * g(ai - bj));
        }
    }
    csl.lambda_c() / (2.0 * csl.m0() * csl.m0()) * sum
}

#[test]
fn atoms_match_pair_sum() {
    let body = molecule();
    let ff = FormFactor::new(body.clone());
    let spec = QuadratureSpec::default();
    for r_c in [5e-8, 1e-7, 4e-7] {
        let csl = CslParams::with_amu(1e-8, r_c).unwrap();
        let a = Orientation::from_axis_angle(Vec3::new(1.0, 2.0, -0.5), 0.4).unwrap();
        let b = Orientation::from_axis_angle(Vec3::new(-0.3, 0.2, 1.0), 1.9).unwrap();
        let got = loc_rate_full(&ff, &csl, &a, &b, &spec).unwrap();
        let want = pair_sum_rate(&body, &csl, &a, &b);
        assert!((got / want - 1.0).abs() < 1e-7, "r_C = {r_c}: {got:e} vs {want:e}");
    }
}

#[test]
fn identical_orientations_do_not_localize() {
    let ff = FormFactor::new(molecule());
    let csl = CslParams::with_amu(1e-8, 1e-7).unwrap();
    let a = Orientation::rot_x(0.7);
    let f = loc_rate_full(&ff, &csl, &a, &a, &QuadratureSpec::default()).unwrap();
    assert_eq!(f, 0.0);
}

#[test]
fn small_rotations_follow_the_tensor_form() {
    let body = molecule();
    let ff = FormFactor::new(body.clone());
    let csl = CslParams::with_amu(1e-8, 1e-7).unwrap();
    let spec = QuadratureSpec::default();
    let t = geometry_tensors(&ff, &csl, &spec).unwrap();
    let a = Orientation::rot_y(0.3);
    let b = Orientation::from_axis_angle(Vec3::new(0.2, 1.0, 0.4), 1e-3).unwrap().compose(&a);
    let quad = rot_loc_rate_small_angle(&t, &csl, &a, &b);
    let exact = pair_sum_rate(&body, &csl, &a, &b);
    assert!((quad / exact - 1.0).abs() < 1e-3, "{quad:e} vs {exact:e}");
}

#[test]
fn axisymmetric_tensor_rate_is_quadratic_in_the_axis_angle() {
    let body = BodySpec::cylinder(3e-7, 4e-8, MassSpec::Density(2329.0)).unwrap();
    let ff = FormFactor::new(body);
    let csl = CslParams::with_amu(1e-8, 1e-7).unwrap();
    let spec = QuadratureSpec::default();
    let t = geometry_tensors(&ff, &csl, &spec).unwrap();
    let a = Orientation::identity();
    let alpha = 1e-3;
    let b = Orientation::rot_x(alpha);
    let small = rot_loc_rate(&t, &csl, &a, &b);
    let full = loc_rate_axes(&ff, &csl, alpha, &spec).unwrap();
    assert!((small / full - 1.0).abs() < 1e-4, "{small:e} vs {full:e}");
}

#[test]
fn full_rate_approaches_small_particle_law() {
    let spec = QuadratureSpec::default();
    let csl = CslParams::with_amu(1e-8, 1e-5).unwrap();
    for body in [
        BodySpec::cylinder(1e-7, 1e-8, MassSpec::Density(2329.0)).unwrap(),
        BodySpec::spheroid(1e-7, 3e-8, MassSpec::Density(2329.0)).unwrap(),
        BodySpec::cylinder(2e-8, 8e-8, MassSpec::Density(2329.0)).unwrap(),
    ] {
        let ff = FormFactor::new(body.clone());
        for alpha in [0.3, 1.0, 1.5] {
            let full = loc_rate_axes(&ff, &csl, alpha, &spec).unwrap();
            let small = loc_rate_small_body(&body, &csl, alpha).unwrap();
            assert!((full / small - 1.0).abs() < 1e-3, "{body:?} α={alpha}: {full:e} vs {small:e}");
        }
    }
}

#[test]
fn normalized_curve_peaks_at_one() {
    let body = BodySpec::cylinder(1e-6, 5e-8, MassSpec::Density(2329.0)).unwrap();
    let ff = FormFactor::new(body);
    let csl = CslParams::with_amu(1e-8, 1e-7).unwrap();
    let spec = QuadratureSpec::default();
    let grid = csl_rotor::num::linspace(0.0, std::f64::consts::PI, 19);
    let values = csl_rotor::localization::loc_rate_curve(&ff, &csl, &grid, &spec).unwrap();
    let (_, f_max) = max_loc_rate(&ff, &csl, &spec, 9, 1e-6).unwrap();
    let norm = normalize_curve(&values, f_max, 1e-6);
    let peak = norm.iter().cloned().fold(0.0, f64::max);
    assert!(peak <= 1.0 && peak > 0.999, "{peak}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rate_is_symmetric_and_nonnegative(
        ax in -1.0f64..1.0, ay in -1.0f64..1.0, t1 in 0.0f64..3.0, t2 in 0.0f64..3.0,
    ) {
        let body = molecule();
        let ff = FormFactor::new(body.clone());
        let csl = CslParams::with_amu(1e-8, 1e-7).unwrap();
        let a = Orientation::from_axis_angle(Vec3::new(ax, ay, 1.0), t1).unwrap();
        let b = Orientation::from_axis_angle(Vec3::new(1.0, ax, ay), t2).unwrap();
        let spec = QuadratureSpec::default().with_rel_tol(1e-6).unwrap();
        let ab = loc_rate_full(&ff, &csl, &a, &b, &spec).unwrap();
        let ba = loc_rate_full(&ff, &csl, &b, &a, &spec).unwrap();
        prop_assert!(ab >= 0.0);
        let want = pair_sum_rate(&body, &csl, &a, &b);
        prop_assert!((ab - ba).abs() <= 1e-5 * want.abs() + 1e-300);
    }

    #[test]
    fn axis_rate_is_mirror_symmetric(alpha in 0.05f64..1.5) {
        let ff = FormFactor::new(BodySpec::spheroid(2e-7, 3e-8, MassSpec::Density(2329.0)).unwrap());
        let csl = CslParams::with_amu(1e-8, 1e-7).unwrap();
        let spec = QuadratureSpec::default().with_rel_tol(1e-7).unwrap();
        let a = loc_rate_axes(&ff, &csl, alpha, &spec).unwrap();
        let b = loc_rate_axes(&ff, &csl, std::f64::consts::PI - alpha, &spec).unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-6);
    }
}
