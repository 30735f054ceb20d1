//! Closed Euclidean cone surfaces with marked points, stored intrinsically as
//! a triangulation: side lengths plus orientation-reversing side gluings.
//!
//! Triangles are positively oriented; side `k` of a triangle runs from corner
//! `k` to corner `k + 1 (mod 3)`. Gluings identify side `(t, s)` with side
//! `(u, r)` so that the start of one is the end of the other. A triangle may
//! be glued to itself along two different sides, which is how one-vertex tori
//! are represented.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A side of a triangle: `(triangle index, side index)`.
pub type Side = (usize, usize);

/// Relative tolerance on glued side lengths.
pub const LENGTH_MATCH_TOL: f64 = 1e-9;

pub(crate) const fn next(k: usize) -> usize {
    (k + 1) % 3
}

pub(crate) const fn prev(k: usize) -> usize {
    (k + 2) % 3
}

/// A triangle of the surface: corner vertex indices and side lengths
/// `[l01, l12, l20]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub corners: [usize; 3],
    pub lengths: [f64; 3],
}

impl Triangle {
    /// Euclidean angle at corner `k`, by the law of cosines.
    pub fn corner_angle(&self, k: usize) -> f64 {
        let a = self.lengths[k];
        let b = self.lengths[prev(k)];
        let c = self.lengths[next(k)];
        // Half-angle form is accurate for thin triangles.
        let s = 0.5 * (a + b + c);
        let num = (s - a) * (s - b);
        let den = s * (s - c);
        2.0 * (num / den).sqrt().atan()
    }

    /// Area by Kahan's stable form of Heron's formula.
    pub fn area(&self) -> f64 {
        let mut l = self.lengths;
        l.sort_by(|x, y| y.total_cmp(x));
        let [a, b, c] = l;
        0.25 * ((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))).max(0.0).sqrt()
    }

    /// Planar layout with corner 0 at the origin and corner 1 on the positive
    /// x-axis; corner 2 lies in the upper half-plane.
    pub fn layout(&self) -> [[f64; 2]; 3] {
        let [l0, l1, l2] = self.lengths;
        let x = (l0 * l0 + l2 * l2 - l1 * l1) / (2.0 * l0);
        let y = 2.0 * self.area() / l0;
        [[0.0, 0.0], [l0, 0.0], [x, y]]
    }
}

/// Counts of the cell structure after gluing, with the Gauss–Bonnet residual
/// `Σ(2π − θσ) − 2πχ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerData {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub chi: i64,
    pub genus: i64,
    pub gauss_bonnet_residual: f64,
}

/// A validated closed cone surface together with its current triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSurface {
    labels: Vec<String>,
    triangles: Vec<Triangle>,
    partner: Vec<[Side; 3]>,
}

/// Serialized triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleDoc {
    pub corners: [String; 3],
    pub lengths: [f64; 3],
}

/// Serialized surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub vertices: Vec<String>,
    pub triangles: Vec<TriangleDoc>,
    pub gluings: Vec<[[usize; 2]; 2]>,
    /// `"ccw"` (default) or `"cw"`: the orientation in which corners are listed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<String>,
}

impl ConeSurface {
    /// Build and validate a surface from vertex labels, triangles and gluing pairs.
    pub fn new(labels: Vec<String>, triangles: Vec<Triangle>, gluings: &[(Side, Side)]) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidSurface(m));
        if triangles.is_empty() {
            return invalid("no triangles".into());
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.as_str(), i).is_some() {
                return invalid(format!("duplicate vertex label {l:?}"));
            }
        }
        const UNSET: Side = (usize::MAX, usize::MAX);
        let mut partner = vec![[UNSET; 3]; triangles.len()];
        for &(a, b) in gluings {
            for &(t, s) in &[a, b] {
                if t >= triangles.len() || s > 2 {
                    return invalid(format!("gluing references missing side ({t}, {s})"));
                }
            }
            if a == b {
                return invalid(format!("side ({}, {}) glued to itself", a.0, a.1));
            }
            for (x, y) in [(a, b), (b, a)] {
                if partner[x.0][x.1] != UNSET {
                    return invalid(format!("side ({}, {}) glued twice", x.0, x.1));
                }
                partner[x.0][x.1] = y;
            }
        }
        let s = Self { labels, triangles, partner };
        s.validate()?;
        Ok(s)
    }

    /// Check every structural and metric invariant.
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidSurface(m));
        let n = self.labels.len();
        let mut used = vec![false; n];
        for (ti, tri) in self.triangles.iter().enumerate() {
            for &c in &tri.corners {
                if c >= n {
                    return invalid(format!("triangle {ti} references unknown vertex {c}"));
                }
                used[c] = true;
            }
            let l = tri.lengths;
            if l.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return invalid(format!("triangle {ti} has a non-positive side length"));
            }
            for k in 0..3 {
                let (a, b, c) = (l[k], l[next(k)], l[prev(k)]);
                if a >= (b + c) * (1.0 - 1e-12) {
                    return invalid(format!("triangle {ti} violates the strict triangle inequality"));
                }
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return invalid(format!("marked point {:?} is not a vertex", self.labels[v]));
        }
        for (ti, sides) in self.partner.iter().enumerate() {
            for (si, &(u, r)) in sides.iter().enumerate() {
                if u == usize::MAX {
                    return invalid(format!("side ({ti}, {si}) is not glued"));
                }
                if self.partner[u][r] != (ti, si) {
                    return invalid(format!("gluing of side ({ti}, {si}) is not an involution"));
                }
                let (a, b) = (&self.triangles[ti], &self.triangles[u]);
                if a.corners[si] != b.corners[next(r)] || a.corners[next(si)] != b.corners[r] {
                    return invalid(format!(
                        "gluing ({ti}, {si}) <-> ({u}, {r}) does not match endpoint labels in reversed order"
                    ));
                }
                let (la, lb) = (a.lengths[si], b.lengths[r]);
                if (la - lb).abs() > LENGTH_MATCH_TOL * la.max(lb) {
                    return invalid(format!("glued sides ({ti}, {si}) and ({u}, {r}) differ in length"));
                }
            }
        }
        // Each vertex link must be a single cycle of corners.
        let mut cycles = vec![0usize; n];
        let mut visited = vec![[false; 3]; self.triangles.len()];
        for t in 0..self.triangles.len() {
            for k in 0..3 {
                if visited[t][k] {
                    continue;
                }
                let v = self.triangles[t].corners[k];
                cycles[v] += 1;
                let mut c = (t, k);
                while !visited[c.0][c.1] {
                    visited[c.0][c.1] = true;
                    c = self.next_corner_ccw(c);
                }
            }
        }
        if let Some(v) = cycles.iter().position(|&c| c != 1) {
            return invalid(format!(
                "link of vertex {:?} is not a single cycle ({} cycles)",
                self.labels[v], cycles[v]
            ));
        }
        for (v, th) in self.cone_angles().iter().enumerate() {
            if !(th.is_finite() && *th > 0.0) {
                return invalid(format!("vertex {:?} has invalid cone angle", self.labels[v]));
            }
        }
        Ok(())
    }

    pub fn from_doc(doc: &SurfaceDoc) -> Result<Self> {
        let index: HashMap<&str, usize> = doc.vertices.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let reversed = match doc.orientation.as_deref() {
            None | Some("ccw") => false,
            Some("cw") => true,
            Some(o) => return Err(Error::Parse(format!("unknown orientation {o:?}"))),
        };
        let mut triangles = Vec::with_capacity(doc.triangles.len());
        for (ti, t) in doc.triangles.iter().enumerate() {
            let mut corners = [0; 3];
            for k in 0..3 {
                corners[k] = *index.get(t.corners[k].as_str()).ok_or_else(|| {
                    Error::InvalidSurface(format!("triangle {ti} uses unknown vertex {:?}", t.corners[k]))
                })?;
            }
            let mut tri = Triangle { corners, lengths: t.lengths };
            if reversed {
                tri = Triangle {
                    corners: [corners[0], corners[2], corners[1]],
                    lengths: [t.lengths[2], t.lengths[1], t.lengths[0]],
                };
            }
            triangles.push(tri);
        }
        // Reversing [a, b, c] to [a, c, b] sends side 0 to 2, 1 to 1, 2 to 0.
        let map_side = |s: usize| if reversed { [2, 1, 0][s.min(2)] } else { s };
        let gluings: Vec<(Side, Side)> =
            doc.gluings.iter().map(|[[a, b], [c, d]]| ((*a, map_side(*b)), (*c, map_side(*d)))).collect();
        if doc.gluings.iter().flatten().any(|[_, s]| *s > 2) {
            return Err(Error::InvalidSurface("side index greater than 2".into()));
        }
        Self::new(doc.vertices.clone(), triangles, &gluings)
    }

    pub fn to_doc(&self) -> SurfaceDoc {
        SurfaceDoc {
            format_version: Some(1),
            vertices: self.labels.clone(),
            triangles: self
                .triangles
                .iter()
                .map(|t| TriangleDoc { corners: t.corners.map(|c| self.labels[c].clone()), lengths: t.lengths })
                .collect(),
            gluings: self
                .edges()
                .into_iter()
                .map(|(t, s)| {
                    let (u, r) = self.partner((t, s));
                    [[t, s], [u, r]]
                })
                .collect(),
            orientation: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SurfaceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> &Triangle {
        &self.triangles[t]
    }

    pub fn partner(&self, side: Side) -> Side {
        self.partner[side.0][side.1]
    }

    pub fn side_length(&self, side: Side) -> f64 {
        self.triangles[side.0].lengths[side.1]
    }

    /// Vertex at the start of a side.
    pub fn side_origin(&self, side: Side) -> usize {
        self.triangles[side.0].corners[side.1]
    }

    /// One representative side per edge (the lexicographically smaller one),
    /// in increasing order. This order defines canonical edge ids.
    pub fn edges(&self) -> Vec<Side> {
        let mut out = Vec::with_capacity(self.triangles.len() * 3 / 2);
        for t in 0..self.triangles.len() {
            for s in 0..3 {
                if (t, s) < self.partner((t, s)) {
                    out.push((t, s));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.triangles.len() * 3 / 2
    }

    pub fn vertex_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Precondition(format!("unknown vertex {label:?}")))
    }

    /// The corner following `(t, k)` counter-clockwise around its vertex.
    pub fn next_corner_ccw(&self, (t, k): Side) -> Side {
        self.partner((t, prev(k)))
    }

    /// Corners around vertex `v` in counter-clockwise order.
    pub fn vertex_link(&self, v: usize) -> Vec<Side> {
        let start = self
            .triangles
            .iter()
            .enumerate()
            .find_map(|(t, tri)| tri.corners.iter().position(|&c| c == v).map(|k| (t, k)));
        let Some(start) = start else { return Vec::new() };
        let mut out = vec![start];
        let mut c = self.next_corner_ccw(start);
        while c != start {
            out.push(c);
            c = self.next_corner_ccw(c);
        }
        out
    }

    pub fn corner_angle(&self, (t, k): Side) -> f64 {
        self.triangles[t].corner_angle(k)
    }

    /// Cone angle θσ of every vertex, in vertex order.
    pub fn cone_angles(&self) -> Vec<f64> {
        let mut th = vec![0.0; self.labels.len()];
        for tri in &self.triangles {
            for k in 0..3 {
                th[tri.corners[k]] += tri.corner_angle(k);
            }
        }
        th
    }

    pub fn cone_angle(&self, label: &str) -> Result<f64> {
        let v = self.vertex_index(label)?;
        Ok(self.cone_angles()[v])
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(Triangle::area).sum()
    }

    pub fn euler_data(&self) -> EulerData {
        let (v, e, f) = (self.labels.len(), self.n_edges(), self.triangles.len());
        let chi = v as i64 - e as i64 + f as i64;
        let curvature: f64 = self.cone_angles().iter().map(|th| 2.0 * PI - th).sum();
        EulerData {
            vertices: v,
            edges: e,
            faces: f,
            chi,
            genus: (2 - chi) / 2,
            gauss_bonnet_residual: curvature - 2.0 * PI * chi as f64,
        }
    }

    /// Replace the two triangles of a hinge; used by the flip.
    pub(crate) fn replace_pair(
        &mut self,
        t: usize,
        tri_t: Triangle,
        u: usize,
        tri_u: Triangle,
        updates: &[(Side, Side)],
    ) {
        self.triangles[t] = tri_t;
        self.triangles[u] = tri_u;
        for &(a, b) in updates {
            self.partner[a.0][a.1] = b;
        }
    }
}
