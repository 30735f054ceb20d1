//! Random generators shared by the integration tests.

#![allow(dead_code)]

use radiant_core::corpus::NamedSurface;
use radiant_core::hinge::{flip_in_place, is_flippable, Hinge};
use radiant_core::stalk::Stalk;
use radiant_core::{is_admissible, ConeSurface};
use rand::Rng;

/// Hinge with `A = (0,0)`, `C = (0,l)`, `B` right and `D` left of `AC`.
pub fn random_hinge(rng: &mut impl Rng) -> Hinge {
    let l = rng.gen_range(0.5..2.0);
    let b = [rng.gen_range(0.1..2.0), rng.gen_range(-1.0..3.0)];
    let d = [-rng.gen_range(0.1..2.0), rng.gen_range(-1.0..3.0)];
    let dist = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
    let (a, c) = ([0.0, 0.0], [0.0, l]);
    Hinge::from_lengths(l, dist(a, d), dist(c, d), dist(a, b), dist(c, b), [0, 1, 2, 3])
}

/// Random strictly convex hinge.
pub fn random_convex_hinge(rng: &mut impl Rng) -> Hinge {
    loop {
        let h = random_hinge(rng);
        if h.is_convex(1e-3) {
            return h;
        }
    }
}

/// Side lengths of a random triangle with all angles above `0.1`.
pub fn random_triangle(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let p: Vec<[f64; 2]> = (0..3).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let d = |i: usize, j: usize| (p[i][0] - p[j][0]).hypot(p[i][1] - p[j][1]);
        let l = [d(0, 1), d(1, 2), d(2, 0)];
        let ang = |a: f64, b: f64, c: f64| ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0).acos();
        if ang(l[0], l[1], l[2]).min(ang(l[1], l[2], l[0])).min(ang(l[2], l[0], l[1])) > 0.1 {
            return l;
        }
    }
}

/// Apply `n` random flips of flippable edges.
pub fn scramble(surf: &ConeSurface, n: usize, rng: &mut impl Rng) -> ConeSurface {
    let mut s = surf.clone();
    for _ in 0..n {
        let sides: Vec<_> = s.edges().into_iter().filter(|&e| is_flippable(&s, e)).collect();
        if sides.is_empty() {
            break;
        }
        let e = sides[rng.gen_range(0..sides.len())];
        flip_in_place(&mut s, e).expect("flippable edge flips");
    }
    s
}

/// Random weights with components in `[lo, hi]`.
pub fn random_tau(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Random admissible weights in `[lo, hi]^S`.
pub fn random_admissible(surf: &ConeSurface, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let tau = random_tau(surf.n_vertices(), lo, hi, rng);
        if is_admissible(surf, &tau).map(|a| a.admissible).unwrap_or(false) {
            return tau;
        }
    }
}

/// Random targets in the solvable range, as fractions `[0.1, 0.9]` of
/// `min(θσ, 2π)`.
pub fn random_targets(surf: &ConeSurface, rng: &mut impl Rng) -> Vec<f64> {
    surf.cone_angles().iter().map(|th| rng.gen_range(0.1..0.9) * th.min(std::f64::consts::TAU)).collect()
}

pub fn corpus() -> Vec<NamedSurface> {
    radiant_core::corpus::all()
}

pub fn is_valid_stalk(s: &Stalk) -> bool {
    s.validate().is_ok()
}
