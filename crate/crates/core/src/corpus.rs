//! Reference surfaces used by tests, benchmarks and the shipped `corpus/`
//! documents.

use std::f64::consts::PI;

use crate::surface::{ConeSurface, Side, Triangle};

/// A corpus surface with a stable name.
#[derive(Debug, Clone)]
pub struct NamedSurface {
    pub name: &'static str,
    pub surface: ConeSurface,
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn tri(corners: [usize; 3], lengths: [f64; 3]) -> Triangle {
    Triangle { corners, lengths }
}

/// Glue sides by matching endpoint labels; only valid when every unordered
/// label pair bounds exactly one edge.
fn auto_glue(triangles: &[Triangle]) -> Vec<(Side, Side)> {
    let mut out = Vec::new();
    for (t, a) in triangles.iter().enumerate() {
        for s in 0..3 {
            let (p, q) = (a.corners[s], a.corners[(s + 1) % 3]);
            for (u, b) in triangles.iter().enumerate() {
                for r in 0..3 {
                    if (t, s) < (u, r) && b.corners[r] == q && b.corners[(r + 1) % 3] == p {
                        out.push(((t, s), (u, r)));
                    }
                }
            }
        }
    }
    out
}

/// Two `w × h` rectangles glued along their boundary, each split along a
/// diagonal; four cone points of angle π.
pub fn rectangle_pillowcase(w: f64, h: f64) -> ConeSurface {
    let d = w.hypot(h);
    let (a, b, c, dd) = (0, 1, 2, 3);
    let triangles = vec![
        // Front a(0,0) b(w,0) c(w,h) d(0,h).
        tri([a, b, c], [w, h, d]),
        tri([a, c, dd], [d, w, h]),
        // Back, seen from outside: a d c b.
        tri([a, dd, c], [h, w, d]),
        tri([a, c, b], [d, h, w]),
    ];
    // Both diagonals join a and c, so glue explicitly.
    let g =
        [((0, 2), (1, 0)), ((2, 2), (3, 0)), ((0, 0), (3, 2)), ((0, 1), (3, 1)), ((1, 1), (2, 1)), ((1, 2), (2, 0))];
    ConeSurface::new(labels(&["a", "b", "c", "d"]), triangles, &g).expect("valid pillowcase")
}

/// The unit-square pillowcase.
pub fn pillowcase() -> ConeSurface {
    rectangle_pillowcase(1.0, 1.0)
}

/// Two unit equilateral triangles glued along their boundary.
pub fn doubled_triangle() -> ConeSurface {
    let triangles = vec![tri([0, 1, 2], [1.0; 3]), tri([0, 2, 1], [1.0; 3])];
    let g = auto_glue(&triangles);
    ConeSurface::new(labels(&["a", "b", "c"]), triangles, &g).expect("valid doubled triangle")
}

/// The unit square torus with one marked point, split along a diagonal.
pub fn square_torus() -> ConeSurface {
    let r2 = 2f64.sqrt();
    // T0 = A B C, T1 = A C D for the square A(0,0) B(1,0) C(1,1) D(0,1).
    let triangles = vec![tri([0, 0, 0], [1.0, 1.0, r2]), tri([0, 0, 0], [r2, 1.0, 1.0])];
    let g = [((0, 2), (1, 0)), ((0, 0), (1, 1)), ((0, 1), (1, 2))];
    ConeSurface::new(labels(&["v"]), triangles, &g).expect("valid torus")
}

/// Regular octagon of circumradius 1 with opposite sides glued by
/// translations and its centre marked: genus 2, cone angles 2π (centre) and
/// 6π (the identified corners).
pub fn octagon_genus2() -> ConeSurface {
    let side = 2.0 * (PI / 8.0).sin();
    // Triangle i = [o, p_i, p_{i+1}]: side 0 radial i, side 1 boundary i, side 2 radial i+1.
    let triangles: Vec<Triangle> = (0..8).map(|_| tri([0, 1, 1], [1.0, side, 1.0])).collect();
    let mut g = Vec::new();
    for i in 0..8 {
        g.push(((i, 2), ((i + 1) % 8, 0)));
    }
    for i in 0..4 {
        g.push(((i, 1), (i + 4, 1)));
    }
    ConeSurface::new(labels(&["o", "p"]), triangles, &g).expect("valid octagon surface")
}

/// Boundary of the regular unit tetrahedron.
pub fn tetrahedron() -> ConeSurface {
    let triangles =
        vec![tri([0, 2, 1], [1.0; 3]), tri([0, 1, 3], [1.0; 3]), tri([0, 3, 2], [1.0; 3]), tri([1, 2, 3], [1.0; 3])];
    let g = auto_glue(&triangles);
    ConeSurface::new(labels(&["a", "b", "c", "d"]), triangles, &g).expect("valid tetrahedron")
}

/// The surfaces exercised by the acceptance suite.
pub fn all() -> Vec<NamedSurface> {
    vec![
        NamedSurface { name: "pillowcase", surface: pillowcase() },
        NamedSurface { name: "doubled_triangle", surface: doubled_triangle() },
        NamedSurface { name: "square_torus", surface: square_torus() },
        NamedSurface { name: "octagon_genus2", surface: octagon_genus2() },
        NamedSurface { name: "tetrahedron", surface: tetrahedron() },
    ]
}

/// All corpus surfaces including the elongated pillowcase.
pub fn shipped() -> Vec<NamedSurface> {
    let mut v = all();
    v.push(NamedSurface { name: "long_pillowcase", surface: rectangle_pillowcase(4.0, 1.0) });
    v
}
