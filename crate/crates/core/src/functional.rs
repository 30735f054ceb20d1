//! The Einstein–Hilbert functional in heights `h = √τ`:
//!
//! `H(h) = Σσ hσ (κσ − κ̄σ) + Σe le θe`,
//!
//! whose gradient is `κ − κ̄`, together with the closed-form Jacobian
//! `∂κ/∂h` and its symmetrisation used as the Hessian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::delaunay::{is_admissible, Admissibility};
use crate::error::{Error, Result};
use crate::hinge::{affine_form, develop_hinge};
use crate::surface::ConeSurface;
use crate::suspension::{suspension_on, SuspensionData};

/// Everything known about the functional at one point.
#[derive(Debug, Clone)]
pub struct FunctionalEval {
    pub heights: Vec<f64>,
    pub value: f64,
    pub masses: Vec<f64>,
    /// `κ − κ̄`.
    pub gradient: Vec<f64>,
    /// `∂κσ/∂hτ`; rows of zero-height vertices are zero.
    pub jacobian: DMatrix<f64>,
    /// `(J + Jᵀ) / 2`.
    pub hessian: DMatrix<f64>,
    pub diagnostics: Diagnostics,
    /// The τ-Delaunay triangulation the evaluation used.
    pub triangulation: ConeSurface,
    pub suspension: SuspensionData,
}

/// Serializable health indicators of an evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `‖J − Jᵀ‖∞`.
    pub asymmetry: f64,
    /// Per row: diagonal minus the sum of absolute off-diagonal entries.
    pub dominance_residuals: Vec<f64>,
    /// Per row: the explicit non-negative lower bound on the residual.
    pub dominance_bounds: Vec<f64>,
    /// Smallest `|Q*| / scale` over edges; small values mean a nearby cell wall.
    pub min_criticality: f64,
    pub triangulation_id: String,
}

fn heights_to_tau(h: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = h.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Precondition(format!("height {i} must be finite and non-negative")));
    }
    Ok(h.iter().map(|x| x * x).collect())
}

/// Flip to the τ-Delaunay triangulation of `h²`, failing if inadmissible.
pub fn delaunay_for_heights(start: &ConeSurface, h: &[f64]) -> Result<ConeSurface> {
    let tau = heights_to_tau(h)?;
    let Admissibility { admissible, triangulation, illegal_edges, .. } = is_admissible(start, &tau)?;
    if !admissible {
        return Err(Error::Inadmissible(format!("illegal unflippable edges {illegal_edges:?}")));
    }
    Ok(triangulation)
}

/// Evaluate at heights `h`, starting the flips from `start`.
pub fn evaluate(start: &ConeSurface, h: &[f64], kbar: &[f64]) -> Result<FunctionalEval> {
    if kbar.len() != start.n_vertices() {
        return Err(Error::Precondition("target length does not match vertex count".into()));
    }
    let tri = delaunay_for_heights(start, h)?;
    evaluate_on(tri, h, kbar)
}

/// Evaluate on a triangulation already known to be Delaunay for `h²`.
pub fn evaluate_on(tri: ConeSurface, h: &[f64], kbar: &[f64]) -> Result<FunctionalEval> {
    let tau = heights_to_tau(h)?;
    let n = tri.n_vertices();
    let susp = suspension_on(&tri, &tau)?;
    let masses = susp.masses();
    let gradient: Vec<f64> = masses.iter().zip(kbar).map(|(k, kb)| k - kb).collect();
    let edge_term: f64 = susp.edges.iter().map(|e| tri.side_length((e.sides[0][0], e.sides[0][1])) * e.theta).sum();
    let value = h.iter().zip(&gradient).map(|(a, g)| a * g).sum::<f64>() + edge_term;

    let mut jac = DMatrix::zeros(n, n);
    let mut bounds = vec![0.0; n];
    for he in &susp.half_edges {
        let (s, sp) = (he.from, he.to);
        let Some(rho) = he.rho else { continue };
        let (u, r) = tri.partner((he.triangle, he.side));
        let twin = &susp.half_edges[3 * u + r];
        let c = (he.alpha.tanh() + twin.alpha.tanh()) / rho.cosh().powi(2);
        let (hs, hp, l) = (h[s], h[sp], he.length);
        let den = 2.0 * l * hs * hs;
        jac[(s, s)] += c * (hs * hs + hp * hp + l * l) / den;
        jac[(s, sp)] -= c * 2.0 * hs * hp / den;
        bounds[s] += c * ((hp - hs).powi(2) + l * l) / den;
    }
    let hessian = (&jac + jac.transpose()) * 0.5;
    let asymmetry = (&jac - jac.transpose()).abs().max();
    let dominance_residuals =
        (0..n).map(|i| jac[(i, i)] - (0..n).filter(|&j| j != i).map(|j| jac[(i, j)].abs()).sum::<f64>()).collect();
    let min_criticality = tri
        .edges()
        .into_iter()
        .map(|e| {
            let hg = develop_hinge(&tri, e);
            let f = affine_form(&hg);
            let w = hg.corner_weights(&tau);
            f.eval(w).abs() / f.scale(w)
        })
        .fold(f64::INFINITY, f64::min);
    let diagnostics = Diagnostics {
        asymmetry,
        dominance_residuals,
        dominance_bounds: bounds,
        min_criticality,
        triangulation_id: crate::delaunay::triangulation_id(&tri),
    };
    Ok(FunctionalEval {
        heights: h.to_vec(),
        value,
        masses,
        gradient,
        jacobian: jac,
        hessian,
        diagnostics,
        triangulation: tri,
        suspension: susp,
    })
}

/// `H_κ̄(h)`.
pub fn eval_h(surf: &ConeSurface, h: &[f64], kbar: &[f64]) -> Result<f64> {
    Ok(evaluate(surf, h, kbar)?.value)
}

/// `∇H_κ̄(h) = κ(h²) − κ̄`.
pub fn grad_h(surf: &ConeSurface, h: &[f64], kbar: &[f64]) -> Result<Vec<f64>> {
    Ok(evaluate(surf, h, kbar)?.gradient)
}

/// Closed-form `∂κ/∂h`.
pub fn dkappa_matrix(surf: &ConeSurface, h: &[f64]) -> Result<DMatrix<f64>> {
    let zeros = vec![0.0; surf.n_vertices()];
    Ok(evaluate(surf, h, &zeros)?.jacobian)
}

/// Symmetrised Jacobian.
pub fn hessian_h(surf: &ConeSurface, h: &[f64]) -> Result<DMatrix<f64>> {
    let zeros = vec![0.0; surf.n_vertices()];
    Ok(evaluate(surf, h, &zeros)?.hessian)
}

/// `Σθσ − Σκσ` at admissible weights.
pub fn gauss_bonnet_gap(surf: &ConeSurface, tau: &[f64]) -> Result<f64> {
    let h: Vec<f64> = tau.iter().map(|t| t.max(0.0).sqrt()).collect();
    if tau.iter().any(|t| *t < 0.0) {
        return Err(Error::Precondition("negative weight".into()));
    }
    let zeros = vec![0.0; surf.n_vertices()];
    let ev = evaluate(surf, &h, &zeros)?;
    let theta: f64 = ev.triangulation.cone_angles().iter().sum();
    Ok(theta - ev.masses.iter().sum::<f64>())
}

/// Central finite-difference Jacobian of the masses in the coordinates
/// `free`, with steps `step·(1 + |hᵢ|)`.
pub fn fd_jacobian(start: &ConeSurface, h: &[f64], free: &[usize], step: f64) -> Result<DMatrix<f64>> {
    let n = h.len();
    let zeros = vec![0.0; n];
    let mut jac = DMatrix::zeros(n, n);
    for &j in free {
        let d = step * (1.0 + h[j].abs());
        let mut hp = h.to_vec();
        let mut hm = h.to_vec();
        hp[j] += d;
        hm[j] -= d;
        let gp = evaluate(start, &hp, &zeros)?.gradient;
        let gm = evaluate(start, &hm, &zeros)?.gradient;
        for i in 0..n {
            jac[(i, j)] = (gp[i] - gm[i]) / (2.0 * d);
        }
    }
    Ok(jac)
}

/// Smallest eigenvalue of a symmetric matrix restricted to `free` indices.
pub fn min_eigenvalue(m: &DMatrix<f64>, free: &[usize]) -> f64 {
    if free.is_empty() {
        return 0.0;
    }
    let sub = DMatrix::from_fn(free.len(), free.len(), |i, j| m[(free[i], free[j])]);
    SymmetricEigen::new(sub).eigenvalues.min()
}

/// Restrict a vector to indices.
pub fn restrict(v: &[f64], idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}
