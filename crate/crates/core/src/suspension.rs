//! The τ-suspension: each weighted triangle is embedded isometrically as a
//! spacelike triangle in the future cone of Minkowski space, with `−q` of
//! each corner image equal to the corner weight. Coning over the origin and
//! gluing along edges gives a radiant flat spacetime; this module computes
//! its data: radial angles `ρ`, face dihedrals `α`, edge dihedrals `θ` and
//! vertex masses `κ`.
//!
//! Masses are defined by projecting onto the plane orthogonal to the singular
//! axis ([`corner_angle_direct`]); the kite relations give the same values in
//! closed form and serve as a cross-check.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::delaunay::{is_admissible, Admissibility};
use crate::error::{Error, Result};
use crate::hinge::{affine_form, classify_form, develop_hinge, extend_at, Legality, DEFAULT_EPS};
use crate::minkowski::{corner_angle_direct, face_dihedral_direct, kite_solve, KiteSolution, MinkVector};
use crate::surface::{next, prev, ConeSurface, SurfaceDoc, Triangle};

/// Isometric embedding of a weighted triangle: corner `v` maps to
/// `(√τ0, v − ω)` with `(τ0, ω)` the distance-like extension, so the image
/// is horizontal, positively oriented, and `−q(image) = τ` at the corners.
pub fn embed_triangle(lengths: [f64; 3], tau: [f64; 3]) -> Result<[MinkVector; 3]> {
    let tri = Triangle { corners: [0, 0, 0], lengths };
    let pts = tri.layout();
    let (tau0, w) = extend_at(pts, tau)?;
    let t = tau0.sqrt();
    Ok(pts.map(|p| MinkVector::new(t, p[0] - w[0], p[1] - w[1])))
}

/// Radial hyperbolic angle at the near end of an edge of length `l`:
/// `sinh ρ = (τ_far − τ_near + l²) / (2 l √τ_near)`.
pub fn edge_rho(l: f64, tau_near: f64, tau_far: f64) -> Result<f64> {
    if !(tau_near > 0.0) {
        return Err(Error::Precondition("radial angle undefined at a zero weight".into()));
    }
    if !(l > 0.0) {
        return Err(Error::Precondition("edge length must be positive".into()));
    }
    Ok(((tau_far - tau_near + l * l) / (2.0 * l * tau_near.sqrt())).asinh())
}

/// Mass contribution of corner `k` of an embedded triangle.
pub fn corner_mass_direct(images: &[MinkVector; 3], k: usize) -> Result<f64> {
    let p = images[k];
    corner_angle_direct(p, images[next(k)] - p, images[prev(k)] - p)
}

/// Kite of corner `k` of a weighted triangle: angle `π −` the Euclidean
/// corner angle, `ρ1` along side `k`, `ρ2` along side `k − 1`.
pub fn corner_kite(tri: &Triangle, tau: [f64; 3], k: usize) -> Result<KiteSolution> {
    let theta = PI - tri.corner_angle(k);
    let rho1 = edge_rho(tri.lengths[k], tau[k], tau[next(k)])?;
    let rho2 = edge_rho(tri.lengths[prev(k)], tau[k], tau[prev(k)])?;
    kite_solve(theta, rho1, rho2)
}

/// Signed angle from the vertical plane through side `k` of an embedded
/// triangle to the triangle itself (the face lies to the left of the side).
pub fn face_alpha(images: &[MinkVector; 3], k: usize) -> Result<f64> {
    let (p, q, r) = (images[k], images[next(k)], images[prev(k)]);
    face_dihedral_direct(q - p, p + q, r - p)
}

/// Per-side data, indexed `3·t + s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfEdge {
    pub triangle: usize,
    pub side: usize,
    pub from: usize,
    pub to: usize,
    pub length: f64,
    /// Radial angle at the `from` end; absent when `τ_from = 0`.
    pub rho: Option<f64>,
    /// Dihedral from the vertical plane to the face on the left.
    pub alpha: f64,
}

/// A glued pair of sides, matched point pairs realising the gluing isometry,
/// and the dihedral angle across the edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub sides: [[usize; 2]; 2],
    /// `α_e + α_{−e}`.
    pub theta: f64,
    /// `tanh α_e + tanh α_{−e}`; non-negative when the embedding is convex.
    pub tanh_sum: f64,
    pub legality: Legality,
    /// Images of the two endpoints in the chart of each side:
    /// `[[start in first, same point in second], [end in first, same point in second]]`.
    pub matched_points: [[MinkVector; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerRecord {
    pub triangle: usize,
    pub corner: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub label: String,
    pub tau: f64,
    pub cone_angle: f64,
    pub mass: f64,
    /// Corner contributions in counter-clockwise order around the vertex.
    pub corners: Vec<CornerRecord>,
}

/// The full suspension of a weighted triangulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionData {
    pub format_version: u32,
    pub kind: String,
    pub surface: SurfaceDoc,
    /// Per-triangle Minkowski charts: images of the three corners.
    pub triangles: Vec<[MinkVector; 3]>,
    pub half_edges: Vec<HalfEdge>,
    pub edges: Vec<EdgeRecord>,
    pub vertices: Vec<VertexRecord>,
}

impl SuspensionData {
    pub fn masses(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.mass).collect()
    }

    pub fn tau(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.tau).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if d.kind != "suspension" {
            return Err(Error::Parse(format!("expected a suspension document, found kind {:?}", d.kind)));
        }
        Ok(d)
    }

    /// Wavefront OBJ of the embedded triangles, `(x, y, t) ↦ (x, y, z)`. Each
    /// triangle is written in its own chart, so faces are not connected.
    pub fn to_obj(&self) -> String {
        let mut s = String::from("# radiant suspension: one chart per triangle, (x, y, t) -> (x, y, z)\n");
        for tri in &self.triangles {
            for p in tri {
                let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.t);
            }
        }
        for i in 0..self.triangles.len() {
            let _ = writeln!(s, "f {} {} {}", 3 * i + 1, 3 * i + 2, 3 * i + 3);
        }
        s
    }
}

/// Embed every triangle of a triangulation.
pub fn embed_all(tri: &ConeSurface, tau: &[f64]) -> Result<Vec<[MinkVector; 3]>> {
    tri.triangles().iter().map(|t| embed_triangle(t.lengths, t.corners.map(|c| tau[c]))).collect()
}

/// Mass of every vertex of a given triangulation (no flips performed).
pub fn masses_on(tri: &ConeSurface, tau: &[f64]) -> Result<Vec<f64>> {
    let charts = embed_all(tri, tau)?;
    let mut kappa = vec![0.0; tri.n_vertices()];
    for (t, tr) in tri.triangles().iter().enumerate() {
        for k in 0..3 {
            let v = tr.corners[k];
            if tau[v] > 0.0 {
                kappa[v] += corner_mass_direct(&charts[t], k)?;
            }
        }
    }
    Ok(kappa)
}

/// Mass of vertex `v` computed on the given triangulation.
pub fn vertex_mass(tri: &ConeSurface, tau: &[f64], v: usize) -> Result<f64> {
    if v >= tri.n_vertices() {
        return Err(Error::Precondition(format!("unknown vertex index {v}")));
    }
    Ok(masses_on(tri, tau)?[v])
}

/// Masses on the τ-Delaunay triangulation produced by the flipping algorithm.
pub fn masses(surf: &ConeSurface, tau: &[f64]) -> Result<Vec<f64>> {
    let adm = is_admissible(surf, tau)?;
    masses_on(&adm.triangulation, tau)
}

/// Corner masses recomputed with the kite relations; zero at zero weights.
pub fn masses_by_kites(tri: &ConeSurface, tau: &[f64]) -> Result<Vec<f64>> {
    let mut kappa = vec![0.0; tri.n_vertices()];
    for tr in tri.triangles() {
        let w = tr.corners.map(|c| tau[c]);
        for k in 0..3 {
            if w[k] > 0.0 {
                kappa[tr.corners[k]] += corner_kite(tr, w, k)?.kappa;
            }
        }
    }
    Ok(kappa)
}

/// Per-edge `(α_e, α_{−e}, θ_e)` in the order of [`ConeSurface::edges`].
pub fn dihedral_data(tri: &ConeSurface, tau: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let charts = embed_all(tri, tau)?;
    tri.edges()
        .into_iter()
        .map(|(t, s)| {
            let (u, r) = tri.partner((t, s));
            let a = face_alpha(&charts[t], s)?;
            let b = face_alpha(&charts[u], r)?;
            Ok((a, b, a + b))
        })
        .collect()
}

/// Build the suspension of `tau` on a given triangulation.
pub fn suspension_on(tri: &ConeSurface, tau: &[f64]) -> Result<SuspensionData> {
    let charts = embed_all(tri, tau)?;
    let mut half_edges = Vec::with_capacity(3 * charts.len());
    for (t, tr) in tri.triangles().iter().enumerate() {
        for s in 0..3 {
            let (from, to) = (tr.corners[s], tr.corners[next(s)]);
            let rho = if tau[from] > 0.0 { Some(edge_rho(tr.lengths[s], tau[from], tau[to])?) } else { None };
            half_edges.push(HalfEdge {
                triangle: t,
                side: s,
                from,
                to,
                length: tr.lengths[s],
                rho,
                alpha: face_alpha(&charts[t], s)?,
            });
        }
    }
    let edges = tri
        .edges()
        .into_iter()
        .map(|(t, s)| {
            let (u, r) = tri.partner((t, s));
            let (a, b) = (half_edges[3 * t + s].alpha, half_edges[3 * u + r].alpha);
            let h = develop_hinge(tri, (t, s));
            let legality = classify_form(&affine_form(&h), h.corner_weights(tau), DEFAULT_EPS);
            EdgeRecord {
                sides: [[t, s], [u, r]],
                theta: a + b,
                tanh_sum: a.tanh() + b.tanh(),
                legality,
                matched_points: [[charts[t][s], charts[u][next(r)]], [charts[t][next(s)], charts[u][r]]],
            }
        })
        .collect();
    let cone = tri.cone_angles();
    let mut vertices = Vec::with_capacity(tri.n_vertices());
    for v in 0..tri.n_vertices() {
        let mut corners = Vec::new();
        let mut mass = 0.0;
        for (t, k) in tri.vertex_link(v) {
            let m = if tau[v] > 0.0 { corner_mass_direct(&charts[t], k)? } else { 0.0 };
            mass += m;
            corners.push(CornerRecord { triangle: t, corner: k, mass: m });
        }
        vertices.push(VertexRecord { label: tri.labels()[v].clone(), tau: tau[v], cone_angle: cone[v], mass, corners });
    }
    Ok(SuspensionData {
        format_version: 1,
        kind: "suspension".into(),
        surface: tri.to_doc(),
        triangles: charts,
        half_edges,
        edges,
        vertices,
    })
}

/// Export the suspension of an admissible `tau` on its τ-Delaunay triangulation.
pub fn export_suspension(surf: &ConeSurface, tau: &[f64]) -> Result<SuspensionData> {
    let Admissibility { admissible, triangulation, illegal_edges, .. } = is_admissible(surf, tau)?;
    if !admissible {
        return Err(Error::Inadmissible(format!("illegal unflippable edges {illegal_edges:?}")));
    }
    suspension_on(&triangulation, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::minkowski::q_form;

    #[test]
    fn embedding_of_right_triangle() {
        let im = embed_triangle([1.0, 2f64.sqrt(), 1.0], [0.0; 3]).unwrap();
        let h = 0.5f64.sqrt();
        let expect = [[h, -0.5, -0.5], [h, 0.5, -0.5], [h, -0.5, 0.5]];
        for (p, e) in im.iter().zip(expect) {
            assert!(q_form(*p).abs() < 1e-15 && p.t > 0.0);
            assert!((p.t - e[0]).abs() < 1e-15 && (p.x - e[1]).abs() < 1e-15 && (p.y - e[2]).abs() < 1e-15);
        }
        for k in 0..3 {
            let d = im[(k + 1) % 3] - im[k];
            let l = [1.0, 2.0, 1.0][k];
            assert!((q_form(d) - l).abs() < 1e-14);
        }
    }

    #[test]
    fn rho_examples() {
        assert!(edge_rho(1.0, 2.0, 1.0).unwrap().abs() < 1e-16);
        let r = edge_rho(0.7, 3.0, 3.0).unwrap();
        assert!((r.sinh() - 0.7 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!(edge_rho(1.0, 1e12, 1e12).unwrap().abs() < 1e-6);
        assert!(edge_rho(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn rho_matches_embedded_geometry() {
        // sinh ρ = ⟨−p, v⟩ / (h l) for the radial image p and edge vector v.
        let tau = [0.7, 1.9, 0.4];
        let l = [1.1, 0.9, 1.3];
        let im = embed_triangle(l, tau).unwrap();
        for k in 0..3 {
            let v = im[next(k)] - im[k];
            let s = -crate::minkowski::inner(im[k], v) / (tau[k].sqrt() * l[k]);
            let r = edge_rho(l[k], tau[k], tau[next(k)]).unwrap();
            assert!((s - r.sinh()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weight_vertices_have_zero_mass() {
        let s = corpus::pillowcase();
        let m = masses(&s, &[0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(m[0], 0.0);
        assert!(m[1] > 0.0);
    }

    #[test]
    fn kite_and_direct_agree_on_corpus() {
        for ns in corpus::all() {
            let s = &ns.surface;
            let tau: Vec<f64> = (0..s.n_vertices()).map(|i| 0.5 + 0.37 * i as f64).collect();
            let a = masses_on(s, &tau).unwrap();
            let b = masses_by_kites(s, &tau).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10, "{}: {x} vs {y}", ns.name);
            }
        }
    }

    #[test]
    fn kite_alphas_match_face_dihedrals() {
        let tri = Triangle { corners: [0, 1, 2], lengths: [1.1, 0.9, 1.3] };
        let tau = [0.7, 1.9, 0.4];
        let im = embed_triangle(tri.lengths, tau).unwrap();
        for k in 0..3 {
            let kite = corner_kite(&tri, tau, k).unwrap();
            assert!((kite.alpha2 - face_alpha(&im, k).unwrap()).abs() < 1e-10, "alpha2 at {k}");
            assert!((kite.alpha1 - face_alpha(&im, prev(k)).unwrap()).abs() < 1e-10, "alpha1 at {k}");
        }
    }

    #[test]
    fn flat_pillowcase_critical_edges_have_zero_theta() {
        let s = corpus::pillowcase();
        let d = suspension_on(&s, &[1.0; 4]).unwrap();
        for e in &d.edges {
            if e.legality == Legality::Critical {
                assert!(e.theta.abs() < 1e-10 && e.tanh_sum.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn matched_points_have_equal_weights() {
        let s = corpus::octagon_genus2();
        let d = suspension_on(&s, &[0.8, 1.7]).unwrap();
        for e in &d.edges {
            for pair in e.matched_points {
                assert!((q_form(pair[0]) - q_form(pair[1])).abs() < 1e-12);
            }
        }
    }
}
