//! Hinges: the two triangles on either side of an edge, developed into the
//! plane. Provides the affine legality form `Q*`, the edge classification,
//! the geometric flip, and the distance-like extension of a weighted
//! triangle.
//!
//! Frame: the diagonal runs from `A = (0, 0)` to `C = (0, l)`; `B` is on the
//! right (`x > 0`) and `D` on the left (`x < 0`), so `A, B, C, D` is
//! counter-clockwise. For an edge given as side `(t, s)`, triangle `t` is
//! `A C D` and its glued partner `(u, r)` is `C A B`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{next, prev, ConeSurface, Side, Triangle};

/// A point of the Euclidean plane.
pub type Point = [f64; 2];

/// Default relative width of the criticality band.
pub const DEFAULT_EPS: f64 = 1e-9;

fn sub(p: Point, q: Point) -> Point {
    [p[0] - q[0], p[1] - q[1]]
}

fn wedge(u: Point, v: Point) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn dot(u: Point, v: Point) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

fn norm(u: Point) -> f64 {
    u[0].hypot(u[1])
}

/// A developed hinge with the vertex labels of its corners (its immersion
/// into the surface).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hinge {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub d: Point,
    /// Vertex indices of `A, B, C, D`.
    pub labels: [usize; 4],
}

/// Coefficients of `Q*(τ) = λC τC + λA τA − λD τD − λB τB − K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HingeForm {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub lambda_c: f64,
    pub lambda_d: f64,
    pub k: f64,
    /// Magnitude of the products entering `K`; sets the scale of the
    /// criticality band when all weights vanish.
    pub k_scale: f64,
}

/// Classification of a weighted hinge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Legality {
    Legal,
    Critical,
    Illegal,
}

impl Hinge {
    /// Hinge from the five lengths `|AC|, |AD|, |CD|, |AB|, |CB|`.
    pub fn from_lengths(l_ac: f64, l_ad: f64, l_cd: f64, l_ab: f64, l_cb: f64, labels: [usize; 4]) -> Self {
        let place = |ra: f64, rc: f64, sign: f64| -> Point {
            let y = (ra * ra - rc * rc + l_ac * l_ac) / (2.0 * l_ac);
            // Height from the triangle area keeps thin triangles accurate.
            let area = Triangle { corners: [0, 0, 0], lengths: [l_ac, rc, ra] }.area();
            [sign * 2.0 * area / l_ac, y]
        };
        Self { a: [0.0, 0.0], b: place(l_ab, l_cb, 1.0), c: [0.0, l_ac], d: place(l_ad, l_cd, -1.0), labels }
    }

    pub fn diagonal(&self) -> f64 {
        norm(sub(self.c, self.a))
    }

    /// Strict convexity of `ABCD` with relative margin `eps`.
    pub fn is_convex(&self, eps: f64) -> bool {
        let bd = sub(self.d, self.b);
        let scale = norm(bd) * norm(sub(self.c, self.a)).max(norm(bd));
        let wa = wedge(bd, sub(self.a, self.b));
        let wc = wedge(bd, sub(self.c, self.b));
        let l = self.diagonal();
        wa > eps * scale && wc < -eps * scale && self.b[0] > eps * l && self.d[0] < -eps * l
    }

    /// The hinge of the other diagonal, re-normalised: `A' = B, B' = C,
    /// C' = D, D' = A`.
    pub fn flipped(&self) -> Self {
        let (o, e) = (self.b, sub(self.d, self.b));
        let l = norm(e);
        let (c, s) = (e[1] / l, e[0] / l);
        // Rotation taking e to (0, l).
        let map = |p: Point| -> Point {
            let q = sub(p, o);
            [c * q[0] - s * q[1], s * q[0] + c * q[1]]
        };
        let [la, lb, lc, ld] = self.labels;
        Self { a: [0.0, 0.0], b: map(self.c), c: map(self.d), d: map(self.a), labels: [lb, lc, ld, la] }
    }

    /// Weights at `A, B, C, D` picked from a full weight vector.
    pub fn corner_weights(&self, tau: &[f64]) -> [f64; 4] {
        self.labels.map(|v| tau[v])
    }
}

impl HingeForm {
    /// Coefficients of `τA, τB, τC, τD` in `Q*`.
    pub fn coefficients(&self) -> [f64; 4] {
        [self.lambda_a, -self.lambda_b, self.lambda_c, -self.lambda_d]
    }

    /// `Q*(τ)` for weights at `A, B, C, D`.
    pub fn eval(&self, tau: [f64; 4]) -> f64 {
        let c = self.coefficients();
        c[0] * tau[0] + c[1] * tau[1] + c[2] * tau[2] + c[3] * tau[3] - self.k
    }

    /// Magnitude against which `Q*(τ)` is compared.
    pub fn scale(&self, tau: [f64; 4]) -> f64 {
        let c = self.coefficients();
        (0..4).map(|i| c[i].abs() * tau[i].abs()).sum::<f64>() + self.k.abs() + self.k_scale
    }
}

/// `Q*` of a hinge.
pub fn affine_form(h: &Hinge) -> HingeForm {
    let (a, b, c, d) = (h.a, h.b, h.c, h.d);
    let (ab, ad, ac) = (sub(b, a), sub(d, a), sub(c, a));
    let (cd, cb, ca) = (sub(d, c), sub(b, c), sub(a, c));
    let lambda_c = wedge(ab, ad);
    let lambda_a = wedge(cd, cb);
    let lambda_d = wedge(ca, cb);
    let lambda_b = wedge(ac, ad);
    let k = wedge(ac, ad) * dot(ab, cb) + wedge(ca, cb) * dot(ad, cd);
    let k_scale = wedge(ac, ad).abs() * norm(ab) * norm(cb) + wedge(ca, cb).abs() * norm(ad) * norm(cd);
    HingeForm { lambda_a, lambda_b, lambda_c, lambda_d, k, k_scale }
}

/// Classify a weighted hinge with relative band `eps`.
pub fn classify(h: &Hinge, tau: [f64; 4], eps: f64) -> Legality {
    classify_form(&affine_form(h), tau, eps)
}

pub fn classify_form(f: &HingeForm, tau: [f64; 4], eps: f64) -> Legality {
    let q = f.eval(tau);
    let band = eps * f.scale(tau);
    if q < -band {
        Legality::Legal
    } else if q > band {
        Legality::Illegal
    } else {
        Legality::Critical
    }
}

/// Develop the hinge of the edge containing side `(t, s)`.
pub fn develop_hinge(surf: &ConeSurface, side: Side) -> Hinge {
    let (t, s) = side;
    let (u, r) = surf.partner(side);
    let tt = surf.triangle(t);
    let tu = surf.triangle(u);
    let labels = [tt.corners[s], tu.corners[prev(r)], tt.corners[next(s)], tt.corners[prev(s)]];
    Hinge::from_lengths(
        tt.lengths[s],
        tt.lengths[prev(s)],
        tt.lengths[next(s)],
        tu.lengths[next(r)],
        tu.lengths[prev(r)],
        labels,
    )
}

/// An edge can be flipped when its two triangles are distinct and the
/// developed quadrilateral is strictly convex.
pub fn is_flippable(surf: &ConeSurface, side: Side) -> bool {
    is_flippable_eps(surf, side, DEFAULT_EPS)
}

pub fn is_flippable_eps(surf: &ConeSurface, side: Side, eps: f64) -> bool {
    surf.partner(side).0 != side.0 && develop_hinge(surf, side).is_convex(eps)
}

/// Flip in place. Returns the side `(t, 0)` carrying the new diagonal
/// (triangle indices are preserved).
pub fn flip_in_place(surf: &mut ConeSurface, side: Side) -> Result<Side> {
    if !is_flippable(surf, side) {
        return Err(Error::Precondition(format!("edge ({}, {}) is not flippable", side.0, side.1)));
    }
    let (t, s) = side;
    let (u, r) = surf.partner(side);
    let h = develop_hinge(surf, side);
    let bd = norm(sub(h.d, h.b));
    let (ot, ou) = (surf.triangle(t).clone(), surf.triangle(u).clone());
    let [la, lb, lc, ld] = h.labels;
    let new_t = Triangle { corners: [lb, ld, la], lengths: [bd, ot.lengths[prev(s)], ou.lengths[next(r)]] };
    let new_u = Triangle { corners: [ld, lb, lc], lengths: [bd, ou.lengths[prev(r)], ot.lengths[next(s)]] };
    let old = [(t, prev(s)), (u, next(r)), (u, prev(r)), (t, next(s))];
    let new = [(t, 1), (t, 2), (u, 1), (u, 2)];
    let remap = |x: Side| old.iter().position(|&o| o == x).map_or(x, |i| new[i]);
    let mut updates = vec![((t, 0), (u, 0)), ((u, 0), (t, 0))];
    for i in 0..4 {
        let p = surf.partner(old[i]);
        let q = remap(p);
        updates.push((new[i], q));
        if p.0 != t && p.0 != u {
            updates.push((p, new[i]));
        }
    }
    surf.replace_pair(t, new_t, u, new_u, &updates);
    debug_assert!(surf.validate().is_ok());
    Ok((t, 0))
}

/// Functional form of [`flip_in_place`].
pub fn flip(surf: &ConeSurface, side: Side) -> Result<ConeSurface> {
    let mut out = surf.clone();
    flip_in_place(&mut out, side)?;
    Ok(out)
}

/// The unique `(τ0, ω)` with `τ0 − |p − ω|² = τ(p)` at the three points.
pub fn extend_at(points: [Point; 3], tau: [f64; 3]) -> Result<(f64, Point)> {
    let (a, b, c) = (points[0], points[1], points[2]);
    let (u, v) = (sub(b, a), sub(c, a));
    let det = 2.0 * wedge(u, v);
    if det.abs() <= 1e-14 * (dot(u, u) + dot(v, v)) {
        return Err(Error::Degenerate("flat triangle in distance-like extension".into()));
    }
    let r1 = tau[1] - tau[0] + dot(u, u);
    let r2 = tau[2] - tau[0] + dot(v, v);
    // Cramer on 2 [u; v] ω = [r1; r2].
    let wx = (r1 * v[1] - r2 * u[1]) / det;
    let wy = (u[0] * r2 - v[0] * r1) / det;
    let tau0 = tau[0] + wx * wx + wy * wy;
    Ok((tau0, [wx + a[0], wy + a[1]]))
}

/// Distance-like extension of a weighted triangle given by its side lengths,
/// in the frame of [`Triangle::layout`].
pub fn extend_distance_like(lengths: [f64; 3], tau: [f64; 3]) -> Result<(f64, Point)> {
    let t = Triangle { corners: [0, 0, 0], lengths };
    extend_at(t.layout(), tau)
}

/// Evaluate the extension `τ0 − |x − ω|²`.
pub fn distance_like_value(ext: (f64, Point), x: Point) -> f64 {
    let d = sub(x, ext.1);
    ext.0 - dot(d, d)
}

/// Legality through the extension of `ABC` evaluated at `D`: returns
/// `τ_ABC(D) − τ_D`, non-positive exactly for legal hinges.
pub fn criterion_extension_at_opposite(h: &Hinge, tau: [f64; 4]) -> Result<f64> {
    let e = extend_at([h.a, h.b, h.c], [tau[0], tau[1], tau[2]])?;
    Ok(distance_like_value(e, h.d) - tau[3])
}

/// Legality through the extension centres: returns `x_ω' − x_ω` for the
/// centres `ω` of `ABC` and `ω'` of `ACD`, non-positive exactly for legal
/// hinges.
pub fn criterion_centres(h: &Hinge, tau: [f64; 4]) -> Result<f64> {
    let (_, w) = extend_at([h.a, h.b, h.c], [tau[0], tau[1], tau[2]])?;
    let (_, w2) = extend_at([h.a, h.c, h.d], [tau[0], tau[2], tau[3]])?;
    Ok(w2[0] - w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use std::f64::consts::SQRT_2;

    fn unit_square() -> Hinge {
        Hinge::from_lengths(SQRT_2, 1.0, 1.0, 1.0, 1.0, [0, 1, 2, 3])
    }

    #[test]
    fn square_layout() {
        let h = unit_square();
        assert!((h.b[0] - SQRT_2 / 2.0).abs() < 1e-15 && (h.d[0] + SQRT_2 / 2.0).abs() < 1e-15);
        assert!((h.b[1] - SQRT_2 / 2.0).abs() < 1e-15 && (h.d[1] - SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn square_form() {
        let f = affine_form(&unit_square());
        for (x, y) in f.coefficients().iter().zip([1.0, -1.0, 1.0, -1.0]) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(f.k.abs() < 1e-15);
        let h = unit_square();
        assert_eq!(classify(&h, [0.0; 4], DEFAULT_EPS), Legality::Critical);
        assert_eq!(classify(&h, [0.0, 5.0, 0.0, 0.0], DEFAULT_EPS), Legality::Legal);
        assert_eq!(classify(&h, [5.0, 0.0, 0.0, 0.0], DEFAULT_EPS), Legality::Illegal);
    }

    #[test]
    fn hand_computed_form_of_an_axis_square() {
        // The unit square in its own coordinates, before normalisation.
        let h = Hinge { a: [0.0, 0.0], b: [1.0, 0.0], c: [1.0, 1.0], d: [0.0, 1.0], labels: [0, 1, 2, 3] };
        let f = affine_form(&h);
        assert_eq!([f.lambda_a, f.lambda_b, f.lambda_c, f.lambda_d, f.k], [1.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn extension_examples() {
        let (t0, w) = extend_at([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [0.0; 3]).unwrap();
        assert!((t0 - 0.5).abs() < 1e-15 && (w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
        let (t1, w1) = extend_at([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [2.0; 3]).unwrap();
        assert!((t1 - 2.5).abs() < 1e-15 && w1 == w);
        let (t2, _) = extend_distance_like([1.0, SQRT_2, 1.0], [0.0; 3]).unwrap();
        assert!((t2 - 0.5).abs() < 1e-15);
        assert!(extend_at([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [0.0; 3]).is_err());
    }

    #[test]
    fn develop_preserves_lengths() {
        for ns in corpus::all() {
            let s = &ns.surface;
            for side in s.edges() {
                let h = develop_hinge(s, side);
                let (u, r) = s.partner(side);
                let tt = s.triangle(side.0);
                let tu = s.triangle(u);
                assert!((norm(sub(h.c, h.a)) - tt.lengths[side.1]).abs() < 1e-12);
                assert!((norm(sub(h.d, h.c)) - tt.lengths[next(side.1)]).abs() < 1e-12);
                assert!((norm(sub(h.a, h.d)) - tt.lengths[prev(side.1)]).abs() < 1e-12);
                assert!((norm(sub(h.b, h.a)) - tu.lengths[next(r)]).abs() < 1e-12);
                assert!((norm(sub(h.c, h.b)) - tu.lengths[prev(r)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flippability_examples() {
        let p = corpus::pillowcase();
        assert!(is_flippable(&p, (0, 2)));
        // The torus diagonal bounds two distinct triangles; its corners all
        // carry the same label, which does not prevent the flip.
        let t = corpus::square_torus();
        assert!(is_flippable(&t, (0, 2)));
        // Reflex angle at A: B and D both far below the diagonal.
        let h = Hinge { a: [0.0, 0.0], b: [0.2, -1.0], c: [0.0, 1.0], d: [-0.2, -1.0], labels: [0, 1, 2, 3] };
        assert!(!h.is_convex(DEFAULT_EPS));
        assert!(unit_square().is_convex(DEFAULT_EPS));
    }

    #[test]
    fn flip_twice_restores_diagonal() {
        let s = corpus::pillowcase();
        let side = (0, 2);
        let l = s.side_length(side);
        let f = flip(&s, side).unwrap();
        assert!((f.area() - s.area()).abs() < 1e-12);
        let back = flip(&f, (0, 0)).unwrap();
        assert!((back.side_length((0, 0)) - l).abs() < 1e-12);
        for (x, y) in back.cone_angles().iter().zip(s.cone_angles()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn flip_on_self_glued_triangles() {
        for s in [corpus::square_torus(), corpus::doubled_triangle(), corpus::octagon_genus2()] {
            for side in s.edges() {
                if is_flippable(&s, side) {
                    let f = flip(&s, side).unwrap();
                    f.validate().unwrap();
                    assert!((f.area() - s.area()).abs() < 1e-12);
                    for (x, y) in f.cone_angles().iter().zip(s.cone_angles()) {
                        assert!((x - y).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn non_flippable_edge_is_rejected() {
        let s = corpus::octagon_genus2();
        let bad = s.edges().into_iter().find(|&e| !is_flippable(&s, e));
        if let Some(e) = bad {
            assert!(flip(&s, e).is_err());
        }
    }
}
