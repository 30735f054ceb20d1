//! Stalk masses against adaptive quadrature of the defining integral.

use std::f64::consts::{PI, TAU};

use quadrature::double_exponential::integrate;
use radiant_core::stalk::{random_stalk, spherical_length, stalk_mass, Stalk};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn integrand(rho: f64, drho: f64) -> f64 {
    (1.0 + rho * rho + drho * drho).sqrt() / (1.0 + rho * rho)
}

fn quadrature_mass(s: &Stalk) -> f64 {
    s.pieces
        .iter()
        .map(|p| {
            // Large amplitudes give sharp peaks; subdivide so each panel is resolved.
            let k = 64;
            let h = (p.end - p.start) / k as f64;
            (0..k)
                .map(|i| {
                    let a = p.start + i as f64 * h;
                    integrate(|t| integrand(p.arc.value(t), p.arc.derivative(t)), a, a + h, 1e-15).integral
                })
                .sum::<f64>()
        })
        .sum()
}

#[test]
fn closed_forms_match_quadrature_on_random_stalks() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for th in [0.7, PI, 4.0, TAU, 9.0] {
        for _ in 0..100 {
            let s = random_stalk(th, &mut rng);
            let q = quadrature_mass(&s);
            assert!((stalk_mass(&s) - q).abs() < 1e-10, "Θ = {th}: {} vs {q}", stalk_mass(&s));
            assert!((spherical_length(&s) - q).abs() < 1e-10);
        }
    }
}

#[test]
fn families_match_quadrature() {
    for a in [0.0, 0.5, 2.0] {
        let s = Stalk::sine(2.0, a).unwrap();
        assert!((stalk_mass(&s) - quadrature_mass(&s)).abs() < 1e-11);
        let s = Stalk::capped(8.0, a).unwrap();
        assert!((stalk_mass(&s) - quadrature_mass(&s)).abs() < 1e-11);
    }
}

#[test]
fn sine_mass_decreases_in_alpha() {
    for th in [0.5, 1.5, 3.0] {
        let m: Vec<f64> = (0..40).map(|i| stalk_mass(&Stalk::sine(th, 0.1 * i as f64).unwrap())).collect();
        assert!(m.windows(2).all(|w| w[1] < w[0]));
        assert!((m[0] - th).abs() < 1e-12);
    }
}

#[test]
fn smooth_two_pi_stalks_have_mass_two_pi() {
    for a in [0.0, 0.3, 4.0] {
        let s = Stalk::capped(TAU, a).unwrap();
        assert!((stalk_mass(&s) - TAU).abs() < 1e-12);
    }
}

#[test]
fn capped_family_approaches_two_pi_from_above() {
    let mut last = f64::INFINITY;
    for a in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let k = stalk_mass(&Stalk::capped(3.0 * PI, a).unwrap());
        assert!(k > TAU && k < last);
        last = k;
    }
    assert!(last - TAU < 1e-2);
}
