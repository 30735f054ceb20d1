//! Fixtures shared by the benchmarks.

use radiant_core::corpus;
use radiant_core::ConeSurface;

/// The corpus surfaces with weights that force a non-trivial flip sequence:
/// vertex `i` gets `0.3 + 0.7·i`.
pub fn flip_cases() -> Vec<(&'static str, ConeSurface, Vec<f64>)> {
    corpus::all()
        .into_iter()
        .map(|n| {
            let tau = (0..n.surface.n_vertices()).map(|i| 0.3 + 0.7 * i as f64).collect();
            (n.name, n.surface, tau)
        })
        .collect()
}

/// Targets at half of each admissible cone angle.
pub fn half_targets(s: &ConeSurface) -> Vec<f64> {
    s.cone_angles().iter().map(|t| 0.5 * t.min(std::f64::consts::TAU)).collect()
}
