//! The flipping algorithm for τ-weighted Delaunay triangulations, the
//! admissibility test, the distance-like maximum and τ-equivalence.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hinge::{
    affine_form, classify_form, develop_hinge, distance_like_value, extend_at, flip_in_place, is_flippable_eps,
    Legality, Point, DEFAULT_EPS,
};
use crate::surface::{ConeSurface, Side};

/// One flip of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipRecord {
    pub iteration: usize,
    /// Side `(triangle, side)` naming the flipped edge before the flip.
    pub edge: [usize; 2],
    /// `Q*` of the hinge before the flip (strictly positive).
    pub q_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// No flippable illegal hinge remains.
    Converged,
}

/// Record of a run of the flipping algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipTrace {
    pub flips: Vec<FlipRecord>,
    pub iterations: usize,
    pub final_id: String,
    pub termination: Termination,
}

/// Options of the flipping algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipOptions {
    /// Relative width of the criticality band.
    pub eps: f64,
    /// Flip bound; `None` means `50·E²`.
    pub max_iter: Option<usize>,
}

impl Default for FlipOptions {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS, max_iter: None }
    }
}

/// Per-edge classification of a triangulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeStatus {
    pub edge: [usize; 2],
    pub legality: Legality,
    pub q_star: f64,
    pub flippable: bool,
}

/// Result of an admissibility query.
#[derive(Debug, Clone)]
pub struct Admissibility {
    pub admissible: bool,
    /// The final triangulation `𝒯_τ` of the flipping algorithm.
    pub triangulation: ConeSurface,
    pub trace: FlipTrace,
    /// Edges of `𝒯_τ` that remain illegal (all unflippable).
    pub illegal_edges: Vec<[usize; 2]>,
}

/// Check that `tau` is a valid weight vector for `surf`.
pub fn check_weights(surf: &ConeSurface, tau: &[f64]) -> Result<()> {
    if tau.len() != surf.n_vertices() {
        return Err(Error::Precondition(format!("expected {} weights, got {}", surf.n_vertices(), tau.len())));
    }
    if let Some(i) = tau.iter().position(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Precondition(format!("weight of {:?} must be finite and non-negative", surf.labels()[i])));
    }
    Ok(())
}

/// Classify every edge of the triangulation.
pub fn edge_statuses(surf: &ConeSurface, tau: &[f64], eps: f64) -> Vec<EdgeStatus> {
    surf.edges()
        .into_iter()
        .map(|side| {
            let h = develop_hinge(surf, side);
            let f = affine_form(&h);
            let w = h.corner_weights(tau);
            EdgeStatus {
                edge: [side.0, side.1],
                legality: classify_form(&f, w, eps),
                q_star: f.eval(w),
                flippable: is_flippable_eps(surf, side, eps),
            }
        })
        .collect()
}

/// Run the flipping algorithm. Among flippable illegal hinges the one with
/// the largest `Q*` is flipped, ties going to the smallest edge id.
pub fn flipping_algorithm(surf: &ConeSurface, tau: &[f64], opts: FlipOptions) -> Result<(ConeSurface, FlipTrace)> {
    check_weights(surf, tau)?;
    let e = surf.n_edges();
    let bound = opts.max_iter.unwrap_or(50 * e * e);
    let mut cur = surf.clone();
    let mut flips = Vec::new();
    loop {
        let mut best: Option<(Side, f64)> = None;
        for st in edge_statuses(&cur, tau, opts.eps) {
            if st.legality == Legality::Illegal && st.flippable && best.map_or(true, |(_, q)| st.q_star > q) {
                best = Some(((st.edge[0], st.edge[1]), st.q_star));
            }
        }
        let Some((side, q)) = best else { break };
        if flips.len() >= bound {
            return Err(Error::NoConvergence(format!("flipping algorithm exceeded {bound} flips")));
        }
        flips.push(FlipRecord { iteration: flips.len(), edge: [side.0, side.1], q_star: q });
        flip_in_place(&mut cur, side)?;
    }
    let trace = FlipTrace {
        iterations: flips.len(),
        flips,
        final_id: triangulation_id(&cur),
        termination: Termination::Converged,
    };
    Ok((cur, trace))
}

/// Re-apply the flips of a trace, returning every intermediate triangulation
/// (the input first, the final one last).
pub fn replay(surf: &ConeSurface, trace: &FlipTrace) -> Result<Vec<ConeSurface>> {
    let mut out = vec![surf.clone()];
    let mut cur = surf.clone();
    for f in &trace.flips {
        flip_in_place(&mut cur, (f.edge[0], f.edge[1]))?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Admissibility of `tau`: the flipping algorithm's output has no illegal
/// hinge, flippable or not.
pub fn is_admissible(surf: &ConeSurface, tau: &[f64]) -> Result<Admissibility> {
    is_admissible_with(surf, tau, FlipOptions::default())
}

pub fn is_admissible_with(surf: &ConeSurface, tau: &[f64], opts: FlipOptions) -> Result<Admissibility> {
    let (tri, trace) = flipping_algorithm(surf, tau, opts)?;
    let illegal_edges: Vec<[usize; 2]> = edge_statuses(&tri, tau, opts.eps)
        .into_iter()
        .filter(|s| s.legality == Legality::Illegal)
        .map(|s| s.edge)
        .collect();
    Ok(Admissibility { admissible: illegal_edges.is_empty(), triangulation: tri, trace, illegal_edges })
}

fn triangle_extension(surf: &ConeSurface, t: usize, tau: &[f64]) -> Result<([Point; 3], (f64, Point))> {
    let tri = surf.triangle(t);
    let pts = tri.layout();
    let ext = extend_at(pts, tri.corners.map(|c| tau[c]))?;
    Ok((pts, ext))
}

fn segment_distance2(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let s = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    let (qx, qy) = (a[0] + s * dx - p[0], a[1] + s * dy - p[1]);
    qx * qx + qy * qy
}

/// Maximum over one triangle of its distance-like extension.
pub fn triangle_max(pts: [Point; 3], ext: (f64, Point)) -> f64 {
    let w = ext.1;
    let orient = |a: Point, b: Point| (b[0] - a[0]) * (w[1] - a[1]) - (b[1] - a[1]) * (w[0] - a[0]);
    let inside = (0..3).all(|k| orient(pts[k], pts[(k + 1) % 3]) >= 0.0);
    if inside {
        return ext.0;
    }
    (0..3).map(|k| ext.0 - segment_distance2(w, pts[k], pts[(k + 1) % 3])).fold(f64::NEG_INFINITY, f64::max)
}

/// Maximum over the surface of the distance-like extension of `tau` along the
/// triangulation.
pub fn distance_like_max(surf: &ConeSurface, tau: &[f64]) -> Result<f64> {
    check_weights(surf, tau)?;
    let mut m = f64::NEG_INFINITY;
    for t in 0..surf.triangles().len() {
        let (pts, ext) = triangle_extension(surf, t, tau)?;
        m = m.max(triangle_max(pts, ext));
    }
    Ok(m)
}

/// Value of the distance-like extension at the midpoint of the diagonal of
/// the hinge at `side`, evaluated in the triangle of `side`.
pub fn extension_at_diagonal_midpoint(surf: &ConeSurface, side: Side, tau: &[f64]) -> Result<f64> {
    let h = develop_hinge(surf, side);
    let w = h.corner_weights(tau);
    let ext = extend_at([h.a, h.c, h.d], [w[0], w[2], w[3]])?;
    Ok(distance_like_value(ext, [0.5 * (h.a[0] + h.c[0]), 0.5 * (h.a[1] + h.c[1])]))
}

/// Stable identifier of a triangulation: hash of the sorted list of
/// (rotation-normalised label triple, sorted side lengths to 12 digits).
pub fn triangulation_id(surf: &ConeSurface) -> String {
    let mut items: Vec<String> = surf
        .triangles()
        .iter()
        .map(|t| {
            let names = t.corners.map(|c| surf.labels()[c].as_str());
            let rot = (0..3).min_by_key(|&r| [names[r], names[(r + 1) % 3], names[(r + 2) % 3]]).unwrap_or(0);
            let mut l = t.lengths;
            l.sort_by(f64::total_cmp);
            format!(
                "{}|{}|{}:{:.11e},{:.11e},{:.11e}",
                names[rot],
                names[(rot + 1) % 3],
                names[(rot + 2) % 3],
                l[0],
                l[1],
                l[2]
            )
        })
        .collect();
    items.sort();
    let digest = Sha256::digest(items.join(";").as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn edge_key(surf: &ConeSurface, side: Side) -> (usize, usize, String) {
    let a = surf.side_origin(side);
    let b = surf.side_origin(surf.partner(side));
    (a.min(b), a.max(b), format!("{:.9e}", surf.side_length(side)))
}

/// Whether two triangulations of the same surface carry the same
/// distance-like extension of `tau`: every edge present in only one of them
/// must be critical there.
pub fn triangulations_equivalent(t1: &ConeSurface, t2: &ConeSurface, tau: &[f64]) -> Result<bool> {
    if t1.labels() != t2.labels() || (t1.area() - t2.area()).abs() > 1e-9 * t1.area() {
        return Err(Error::Precondition("triangulations of different surfaces".into()));
    }
    check_weights(t1, tau)?;
    let only_in = |a: &ConeSurface, b: &ConeSurface| -> Vec<Side> {
        let mut counts: HashMap<(usize, usize, String), isize> = HashMap::new();
        for e in b.edges() {
            *counts.entry(edge_key(b, e)).or_default() += 1;
        }
        let mut out = Vec::new();
        for e in a.edges() {
            let c = counts.entry(edge_key(a, e)).or_default();
            if *c > 0 {
                *c -= 1;
            } else {
                out.push(e);
            }
        }
        out
    };
    let critical = |s: &ConeSurface, e: Side| {
        let h = develop_hinge(s, e);
        classify_form(&affine_form(&h), h.corner_weights(tau), DEFAULT_EPS) == Legality::Critical
    };
    Ok(only_in(t1, t2).into_iter().all(|e| critical(t1, e)) && only_in(t2, t1).into_iter().all(|e| critical(t2, e)))
}
