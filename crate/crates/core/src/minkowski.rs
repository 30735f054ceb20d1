//! Lorentzian linear algebra in 2+1 Minkowski space and hyperbolic kite
//! trigonometry.
//!
//! The quadratic form is `q(t, x, y) = -t² + x² + y²`. Angles between
//! spacelike directions are measured in the Riemannian plane orthogonal to a
//! timelike axis ([`corner_angle_direct`]); hyperbolic angles between
//! half-planes bounded by a spacelike edge are measured in the Lorentzian plane
//! orthogonal to that edge ([`face_dihedral_direct`]). These two projections
//! are the direct geometric oracle; the kite relations of [`kite_solve`] are a
//! closed form for the same quantities.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold under which a vector is considered lightlike.
pub const LIGHTLIKE_EPS: f64 = 1e-12;

/// A vector of 2+1 Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Causal character of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalType {
    FutureTimelike,
    PastTimelike,
    FutureLightlike,
    PastLightlike,
    Spacelike,
    Zero,
}

impl MinkVector {
    pub const fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    /// Euclidean norm of the coordinates, used only for relative tolerances.
    pub fn euclid_norm(&self) -> f64 {
        (self.t * self.t + self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn causal_type(&self) -> CausalType {
        let n2 = self.euclid_norm().powi(2);
        if n2 == 0.0 {
            return CausalType::Zero;
        }
        let q = q_form(*self);
        if q > LIGHTLIKE_EPS * n2 {
            CausalType::Spacelike
        } else if q < -LIGHTLIKE_EPS * n2 {
            if self.t > 0.0 {
                CausalType::FutureTimelike
            } else {
                CausalType::PastTimelike
            }
        } else if self.t > 0.0 {
            CausalType::FutureLightlike
        } else {
            CausalType::PastLightlike
        }
    }

    pub fn is_timelike(&self) -> bool {
        matches!(self.causal_type(), CausalType::FutureTimelike | CausalType::PastTimelike)
    }

    pub fn is_spacelike(&self) -> bool {
        self.causal_type() == CausalType::Spacelike
    }

    /// Membership in the closed future cone J⁺(O).
    pub fn in_causal_future(&self, tol: f64) -> bool {
        let s = tol * self.euclid_norm().powi(2).max(1.0);
        self.t >= -tol && q_form(*self) <= s
    }

    /// Membership in the open future cone I⁺(O).
    pub fn in_chronological_future(&self) -> bool {
        self.causal_type() == CausalType::FutureTimelike
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.t, self.x, self.y]
    }
}

impl Add for MinkVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.t + o.t, self.x + o.x, self.y + o.y)
    }
}

impl Sub for MinkVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.t - o.t, self.x - o.x, self.y - o.y)
    }
}

impl Neg for MinkVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.t, -self.x, -self.y)
    }
}

impl Mul<MinkVector> for f64 {
    type Output = MinkVector;
    fn mul(self, v: MinkVector) -> MinkVector {
        MinkVector::new(self * v.t, self * v.x, self * v.y)
    }
}

/// The quadratic form `-t² + x² + y²`.
pub fn q_form(u: MinkVector) -> f64 {
    -u.t * u.t + u.x * u.x + u.y * u.y
}

/// The Minkowski inner product polarising [`q_form`].
pub fn inner(u: MinkVector, v: MinkVector) -> f64 {
    -u.t * v.t + u.x * v.x + u.y * v.y
}

/// `det[u, v, w]` with vectors as columns in `(t, x, y)` coordinates.
pub fn det3(u: MinkVector, v: MinkVector, w: MinkVector) -> f64 {
    u.t * (v.x * w.y - v.y * w.x) - v.t * (u.x * w.y - u.y * w.x) + w.t * (u.x * v.y - u.y * v.x)
}

/// Lorentzian cross product: the unique `n` with `inner(n, w) = det[u, v, w]`.
pub fn cross(u: MinkVector, v: MinkVector) -> MinkVector {
    MinkVector::new(-(u.x * v.y - u.y * v.x), -(u.t * v.y - u.y * v.t), u.t * v.x - u.x * v.t)
}

fn reject_along(v: MinkVector, axis: MinkVector) -> MinkVector {
    v - (inner(v, axis) / q_form(axis)) * axis
}

/// Riemannian angle, in `[0, π]`, between the projections of `e1` and `e2`
/// onto the spacelike plane orthogonal to the timelike `axis`.
pub fn corner_angle_direct(axis: MinkVector, e1: MinkVector, e2: MinkVector) -> Result<f64> {
    if !axis.is_timelike() {
        return Err(Error::Degenerate("corner axis is not timelike".into()));
    }
    let w1 = reject_along(e1, axis);
    let w2 = reject_along(e2, axis);
    let scale = e1.euclid_norm().max(e2.euclid_norm()).powi(2).max(f64::MIN_POSITIVE);
    if q_form(w1) <= LIGHTLIKE_EPS * scale || q_form(w2) <= LIGHTLIKE_EPS * scale {
        return Err(Error::Degenerate("direction parallel to corner axis".into()));
    }
    let unit_axis = (1.0 / (-q_form(axis)).sqrt()) * axis;
    let sin_part = det3(unit_axis, w1, w2).abs();
    let cos_part = inner(w1, w2);
    Ok(sin_part.atan2(cos_part))
}

/// Signed hyperbolic angle from the half-plane spanned by `edge_dir, f1_dir`
/// to the one spanned by `edge_dir, f2_dir`.
///
/// Both directions are projected to the Lorentzian plane orthogonal to the
/// spacelike `edge_dir`. Each projection is a line with a rapidity (timelike
/// lines against the time axis, spacelike lines against the space axis); the
/// result is the difference of rapidities. The space axis `X` of the plane is
/// oriented so that `det[T, X, edge_dir] < 0` for the future time axis `T`;
/// with this choice a face to the left of an edge, measured from the vertical
/// plane, yields the kite angle of the face.
pub fn face_dihedral_direct(edge_dir: MinkVector, f1_dir: MinkVector, f2_dir: MinkVector) -> Result<f64> {
    if !edge_dir.is_spacelike() {
        return Err(Error::Degenerate("dihedral edge is not spacelike".into()));
    }
    let n = (1.0 / q_form(edge_dir).sqrt()) * edge_dir;
    // Future unit timelike vector orthogonal to the edge.
    let seed = reject_along(MinkVector::new(1.0, 0.0, 0.0), n);
    let tt = (1.0 / (-q_form(seed)).sqrt()) * seed;
    let tt = if tt.t < 0.0 { -tt } else { tt };
    let mut xx = cross(tt, n);
    xx = (1.0 / q_form(xx).sqrt()) * xx;
    if det3(tt, xx, n) > 0.0 {
        xx = -xx;
    }
    let rapidity = |f: MinkVector| -> Result<f64> {
        let w = reject_along(f, n);
        let (ct, cx) = (-inner(w, tt), inner(w, xx));
        let scale = f.euclid_norm().powi(2).max(f64::MIN_POSITIVE);
        if (ct * ct - cx * cx).abs() <= LIGHTLIKE_EPS * scale {
            return Err(Error::Degenerate("lightlike face direction".into()));
        }
        Ok(if ct.abs() > cx.abs() { (cx / ct).atanh() } else { (ct / cx).atanh() })
    };
    Ok(rapidity(f2_dir)? - rapidity(f1_dir)?)
}

/// A completed hyperbolic kite: a quadrilateral with angle `kappa` between
/// the sides `rho1` and `rho2`, opposite angle `theta`, and right angles
/// elsewhere. Side `alpha2` meets `rho1` and side `alpha1` meets `rho2`.
/// Signed lengths encode on which side of the right angle a vertex falls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KiteSolution {
    pub theta: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub kappa: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl KiteSolution {
    /// Residuals of the three kite relations.
    pub fn residuals(&self) -> [f64; 3] {
        let (th, r1, r2, k, a1, a2) = (self.theta, self.rho1, self.rho2, self.kappa, self.alpha1, self.alpha2);
        [
            k.cos() * r1.cosh() * r2.cosh() - (r1.sinh() * r2.sinh() - th.cos()),
            (k.sin() / th.sin() - a2.cosh() / r2.cosh()).abs().max((k.sin() / th.sin() - a1.cosh() / r1.cosh()).abs()),
            r2.sinh() * k.sin() * a1.cosh() - (k.cos() * a1.sinh() + a2.sinh()),
        ]
    }
}

/// Complete a kite from its Euclidean-type angle `theta ∈ (0, π)` and the two
/// radial sides. For a triangle corner, `theta` is π minus the Euclidean
/// corner angle, `rho1` belongs to the edge towards the next corner and `rho2`
/// to the edge towards the previous one; `alpha2` is then the face dihedral
/// along the first edge and `alpha1` along the second.
pub fn kite_solve(theta: f64, rho1: f64, rho2: f64) -> Result<KiteSolution> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::Precondition(format!("kite angle {theta} outside (0, π)")));
    }
    let (s1, c1, s2, c2) = (rho1.sinh(), rho1.cosh(), rho2.sinh(), rho2.cosh());
    let cos_k = (s1 * s2 - theta.cos()) / (c1 * c2);
    if !(cos_k.abs() <= 1.0 + 1e-12) {
        return Err(Error::Degenerate("kite has no real solution".into()));
    }
    let kappa = cos_k.clamp(-1.0, 1.0).acos();
    let st = theta.sin();
    let alpha2 = ((c1 * s2 - cos_k * s1 * c2) / st).asinh();
    let alpha1 = ((c2 * s1 - cos_k * s2 * c1) / st).asinh();
    Ok(KiteSolution { theta, rho1, rho2, kappa, alpha1, alpha2 })
}

/// `∂κ/∂ρ₁` at fixed `theta` and `rho2`.
pub fn kite_dkappa_drho1(sol: &KiteSolution) -> f64 {
    -sol.alpha2.tanh() / sol.rho1.cosh()
}

/// Linear isometries used to probe invariance properties.
pub mod lorentz {
    use super::MinkVector;

    /// A 3×3 matrix acting on `(t, x, y)` column vectors.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Transform(pub [[f64; 3]; 3]);

    impl Transform {
        pub fn identity() -> Self {
            Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        }

        /// Boost of rapidity `beta` along the unit spatial direction at angle `dir`.
        pub fn boost(beta: f64, dir: f64) -> Self {
            let (ch, sh) = (beta.cosh(), beta.sinh());
            let (c, s) = (dir.cos(), dir.sin());
            Self([
                [ch, sh * c, sh * s],
                [sh * c, 1.0 + (ch - 1.0) * c * c, (ch - 1.0) * c * s],
                [sh * s, (ch - 1.0) * c * s, 1.0 + (ch - 1.0) * s * s],
            ])
        }

        /// Spatial rotation by `angle`.
        pub fn rotation(angle: f64) -> Self {
            let (c, s) = (angle.cos(), angle.sin());
            Self([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
        }

        pub fn compose(&self, other: &Self) -> Self {
            let mut m = [[0.0; 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
                }
            }
            Self(m)
        }

        pub fn apply(&self, v: MinkVector) -> MinkVector {
            let a = v.to_array();
            let r = |i: usize| self.0[i][0] * a[0] + self.0[i][1] * a[1] + self.0[i][2] * a[2];
            MinkVector::new(r(0), r(1), r(2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn q_form_basics() {
        assert_eq!(q_form(MinkVector::new(1.0, 0.0, 0.0)), -1.0);
        assert_eq!(q_form(MinkVector::new(0.0, 1.0, 0.0)), 1.0);
        assert_eq!(q_form(MinkVector::new(1.0, 1.0, 0.0)), 0.0);
        assert_eq!(MinkVector::new(1.0, 1.0, 0.0).causal_type(), CausalType::FutureLightlike);
        assert_eq!(MinkVector::new(-2.0, 1.0, 0.0).causal_type(), CausalType::PastTimelike);
    }

    #[test]
    fn cross_is_dual_to_det() {
        let u = MinkVector::new(0.3, -1.2, 0.7);
        let v = MinkVector::new(1.1, 0.4, -0.5);
        let w = MinkVector::new(-0.2, 0.9, 1.6);
        assert!((inner(cross(u, v), w) - det3(u, v, w)).abs() < 1e-14);
    }

    #[test]
    fn corner_angle_examples() {
        let x = MinkVector::new(0.0, 1.0, 0.0);
        let y = MinkVector::new(0.0, 0.0, 1.0);
        let t = MinkVector::new(1.0, 0.0, 0.0);
        assert!((corner_angle_direct(t, x, y).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(corner_angle_direct(t, x, x).unwrap().abs() < 1e-15);
        let a = corner_angle_direct(
            MinkVector::new(2.0, 0.0, 0.0),
            MinkVector::new(1.0, 1.0, 0.0),
            MinkVector::new(1.0, 0.0, 1.0),
        )
        .unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-15);
        assert!(corner_angle_direct(x, x, y).is_err());
        assert!(corner_angle_direct(t, t, y).is_err());
    }

    #[test]
    fn dihedral_examples() {
        let e = MinkVector::new(0.0, 1.0, 0.0);
        let f1 = MinkVector::new(1.0, 0.0, 0.2);
        let f2 = MinkVector::new(0.1, 0.3, 1.0);
        assert_eq!(face_dihedral_direct(e, f1, f1).unwrap(), 0.0);
        let a = face_dihedral_direct(e, f1, f2).unwrap();
        let b = face_dihedral_direct(e, f2, f1).unwrap();
        assert!((a + b).abs() < 1e-15);
        assert!(face_dihedral_direct(MinkVector::new(1.0, 0.0, 0.0), f1, f2).is_err());
        assert!(face_dihedral_direct(e, MinkVector::new(1.0, 0.0, 1.0), f2).is_err());
    }

    #[test]
    fn kite_flat_limit_and_symmetry() {
        let th = 1.1;
        let k = kite_solve(th, 0.0, 0.0).unwrap();
        assert!((k.kappa.cos() + th.cos()).abs() < 1e-15);
        let k = kite_solve(0.7, 0.35, 0.35).unwrap();
        assert!((k.alpha1 - k.alpha2).abs() < 1e-15);
        assert!(kite_solve(PI, 0.0, 0.0).is_err());
    }

    #[test]
    fn kite_relations_hold() {
        let k = kite_solve(FRAC_PI_3, 0.25, 0.4).unwrap();
        for r in k.residuals() {
            assert!(r.abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn dkappa_examples() {
        let k = kite_solve(FRAC_PI_2, 0.0, 0.0).unwrap();
        assert!((kite_dkappa_drho1(&k) + k.alpha2.tanh()).abs() < 1e-15);
        let k = kite_solve(0.9, 0.3, -0.6).unwrap();
        let eps = 1e-6;
        let fd = (kite_solve(0.9, 0.3 + eps, -0.6).unwrap().kappa - kite_solve(0.9, 0.3 - eps, -0.6).unwrap().kappa)
            / (2.0 * eps);
        assert!((fd - kite_dkappa_drho1(&k)).abs() < 1e-8);
    }
}
