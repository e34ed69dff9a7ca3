use std::f64::consts::PI;

use csl_rotor::planar::{
    coherence_factor, evolve_exact, evolve_ode, initial_cos_squeezed, kernel, suggested_ode_step, variance_csl,
    variance_free,
};
use csl_rotor::specfun::{bessel_i_scaled, sinc};
use csl_rotor::{Error, PlanarParams, PlanarWignerState};
use proptest::prelude::*;

const INERTIA: f64 = 2.5e-32;

/// A state without symmetries: `w ∝ e^{2cos(α − 0.4)} e^{−m²/40} (1 + 0.3 sin(α) m/5)`.
fn generic_state(n_alpha: usize, m_max: usize) -> PlanarWignerState {
    let w = PlanarWignerState::from_fn(n_alpha, m_max, INERTIA, |a, m| {
        let m = m as f64;
        (2.0 * (a - 0.4).cos()).exp() * (-m * m / 40.0).exp() * (1.0 + 0.06 * a.sin() * m)
    })
    .unwrap();
    let norm = w.norm();
    PlanarWignerState::from_fn(n_alpha, m_max, INERTIA, |a, m| {
        let mf = m as f64;
        (2.0 * (a - 0.4).cos()).exp() * (-mf * mf / 40.0).exp() * (1.0 + 0.06 * a.sin() * mf) / norm
    })
    .unwrap()
}

fn params(d: f64) -> PlanarParams {
    PlanarParams::from_rotor_units(d, INERTIA, &[]).unwrap()
}

#[test]
fn kernel_is_normalized() {
    let p = params(50.0);
    for t in [0.01, 0.1, 0.7] {
        let k = kernel(t * p.time_unit(), &p, 128, 40).unwrap();
        assert!((k.total() - 1.0).abs() < 1e-10, "t = {t}: {}", k.total());
        assert!(k.tail_bound < 1e-10);
    }
}

#[test]
fn kernel_matches_its_mode_sum() {
    // T = e^{−z}/2π Σ_k e^{ik(α′+ℓs)} I_ℓ(z sinc(ks)), summed directly
    let p = params(20.0);
    let t = 0.3 * p.time_unit();
    let (s, z) = p.dimensionless(t);
    let n = 64;
    let table = kernel(t, &p, n, 30).unwrap();
    for &(j, ell) in &[(0usize, 0i64), (17, 1), (32, -2), (45, 3), (63, 0)] {
        let a = -PI + 2.0 * PI * j as f64 / n as f64;
        let mut sum = 0.0;
        for k in -(n as i64 / 2) + 1..n as i64 / 2 {
            let x = z * sinc(k as f64 * s);
            let i_l = bessel_i_scaled(ell.unsigned_abs() as usize, x) * (x.abs() - z).exp();
            sum += (k as f64 * (a + ell as f64 * s)).cos() * i_l;
        }
        // Nyquist term, symmetrized
        let k = n as f64 / 2.0;
        let x = z * sinc(k * s);
        sum += (k * (a + ell as f64 * s)).cos() * bessel_i_scaled(ell.unsigned_abs() as usize, x) * (x.abs() - z).exp();
        let want = sum / (2.0 * PI);
        assert!((table.get(j, ell) - want).abs() < 1e-13, "({j}, {ell}): {} vs {want}", table.get(j, ell));
    }
}

#[test]
fn exact_and_stepwise_evolution_agree() {
    let p = params(40.0);
    let w0 = generic_state(64, 60);
    let t = 0.35 * p.time_unit();
    let a = evolve_exact(&w0, t, &p).unwrap();
    let b = evolve_ode(&w0, t, &p, suggested_ode_step(&p)).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-9, "{}", a.max_abs_diff(&b));
}

#[test]
fn evolution_composes() {
    let p = params(15.0);
    let w0 = generic_state(64, 60);
    let tu = p.time_unit();
    let once = evolve_exact(&w0, 0.5 * tu, &p).unwrap();
    let twice = evolve_exact(&evolve_exact(&w0, 0.2 * tu, &p).unwrap(), 0.3 * tu, &p).unwrap();
    assert!(once.max_abs_diff(&twice) < 1e-12);
}

#[test]
fn norm_and_parity_sectors_are_conserved() {
    let p = params(30.0);
    let w0 = generic_state(64, 60);
    let w = evolve_exact(&w0, 0.4 * p.time_unit(), &p).unwrap();
    assert!((w.norm() - w0.norm()).abs() < 1e-12);
    let sector = |w: &PlanarWignerState, parity: i64| -> f64 {
        let (_, p_m) = w.marginals();
        p_m.iter()
            .enumerate()
            .filter(|(r, _)| (*r as i64 - 60).rem_euclid(2) == parity)
            .map(|(_, v)| v)
            .sum()
    };
    for parity in [0, 1] {
        assert!((sector(&w, parity) - sector(&w0, parity)).abs() < 1e-12);
    }
}

#[test]
fn energy_grows_at_rate_d_over_i() {
    let p = params(25.0);
    let w0 = generic_state(64, 80);
    let tu = p.time_unit();
    let e0 = w0.energy();
    for t in [0.1, 0.5, 1.0] {
        let w = evolve_exact(&w0, t * tu, &p).unwrap();
        let slope = (w.energy() - e0) / (t * tu);
        let want = p.d_rot() / INERTIA;
        assert!((slope / want - 1.0).abs() < 1e-9, "t = {t}: {slope:e} vs {want:e}");
    }
}

#[test]
fn free_rotor_revives() {
    let p = params(0.0);
    let w0 = generic_state(64, 60);
    let w = evolve_exact(&w0, 2.0 * PI * p.time_unit(), &p).unwrap();
    assert!(w.max_abs_diff(&w0) < 1e-12);
    let s0 = variance_free(&w0, 0.0, &p);
    let s1 = variance_free(&w0, 2.0 * PI * p.time_unit(), &p);
    assert!((s0 - s1).abs() < 1e-12);
    assert!(variance_free(&w0, 0.7 * p.time_unit(), &p) > s0 + 0.1);
}

#[test]
fn squeezed_state_is_pi_periodic() {
    let p = params(0.0);
    let w0 = initial_cos_squeezed(0.2, 128, 60, INERTIA).unwrap();
    let (p_alpha, _) = w0.marginals();
    let j_max = p_alpha
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    assert!((w0.alpha(j_max).abs() - PI / 2.0).abs() < 1e-12);
    let w = evolve_exact(&w0, PI * p.time_unit(), &p).unwrap();
    assert!(w.max_abs_diff(&w0) < 1e-12);
}

#[test]
fn variance_law_matches_evolved_state() {
    let p = params(12.0);
    let w0 = generic_state(64, 80);
    for t in [0.05, 0.3, 1.0, PI] {
        let t = t * p.time_unit();
        let w = evolve_exact(&w0, t, &p).unwrap();
        let closed = variance_csl(&w0, t, &p);
        assert!((w.variance() - closed).abs() < 1e-10, "t = {t}: {} vs {closed}", w.variance());
    }
}

#[test]
fn revivals_are_damped_on_the_diffusion_time() {
    // at t = nπI/ℏ the mean orientation vector shrinks by exp(−D t/2ℏ²)
    let p = params(0.5);
    let w0 = generic_state(64, 80);
    for n in [1.0, 2.0] {
        let t = 2.0 * n * PI * p.time_unit();
        let (_, z) = p.dimensionless(t);
        assert!((coherence_factor(t, &p) - (-z).exp()).abs() < 1e-14);
        let w = evolve_exact(&w0, t, &p).unwrap();
        let ratio = w.mean_unit_vector().norm() / w0.mean_unit_vector().norm();
        assert!((ratio / (-z).exp() - 1.0).abs() < 1e-9, "{ratio} vs {}", (-z).exp());
    }
}

#[test]
fn short_ladder_is_reported() {
    let p = params(200.0);
    let w0 = generic_state(64, 30);
    let r = evolve_exact(&w0, 1.0 * p.time_unit(), &p);
    assert!(matches!(r, Err(Error::MomentumRange { .. }) | Err(Error::Truncation { .. })), "{r:?}");
}

#[test]
fn oversized_step_is_rejected() {
    let p = params(200.0);
    let w0 = generic_state(32, 60);
    let r = evolve_ode(&w0, 0.1 * p.time_unit(), &p, 0.05 * p.time_unit());
    assert!(matches!(r, Err(Error::Unstable { .. })), "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn evolution_is_linear(c in -2.0f64..2.0, t in 0.01f64..0.5) {
        let p = params(10.0);
        let a = generic_state(32, 50);
        let b = initial_cos_squeezed(0.5, 32, 50, INERTIA).unwrap();
        let d = a.d_alpha();
        let mix = PlanarWignerState::from_fn(32, 50, INERTIA, |al, m| {
            let j = ((al + PI) / d).round() as usize;
            a.get(j, m) + c * b.get(j, m)
        }).unwrap();
        let tt = t * p.time_unit();
        let ea = evolve_exact(&a, tt, &p).unwrap();
        let eb = evolve_exact(&b, tt, &p).unwrap();
        let em = evolve_exact(&mix, tt, &p).unwrap();
        let err = em.values().iter().zip(ea.values().iter().zip(eb.values()))
            .fold(0.0f64, |m, (z, (x, y))| m.max((z - (x + c * y)).abs()));
        prop_assert!(err < 1e-12);
    }
}
