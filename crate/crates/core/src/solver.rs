//! Prescribed-mass solve: damped Newton iteration on the Einstein–Hilbert
//! functional in the free heights, with every iterate kept admissible.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::delaunay::edge_statuses;
use crate::error::{Error, Result};
use crate::functional::{evaluate, fd_jacobian, FunctionalEval};
use crate::hinge::{Legality, DEFAULT_EPS};
use crate::surface::{ConeSurface, SurfaceDoc};
use crate::suspension::masses;

/// How Newton steps obtain their Hessian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HessianMode {
    /// Symmetrised closed-form Jacobian.
    Analytic,
    /// Symmetrised central differences of the masses.
    FiniteDifference,
    /// Analytic, falling back to differences near a cell wall or when the
    /// analytic matrix is not positive definite.
    Auto,
}

impl std::str::FromStr for HessianMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "fd" | "finite-difference" => Ok(Self::FiniteDifference),
            "auto" => Ok(Self::Auto),
            _ => Err(Error::Precondition(format!("unknown hessian mode {s:?}"))),
        }
    }
}

/// Options of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Stop when `‖κ − κ̄‖∞ < tol_mass`.
    pub tol_mass: f64,
    pub max_iter: usize,
    /// Starting height on free vertices (`τ = initial_height²`).
    pub initial_height: f64,
    /// Explicit starting weights; overrides `initial_height`.
    pub initial_tau: Option<Vec<f64>>,
    /// Backtracking factor of the line search.
    pub backtrack: f64,
    /// Sufficient-decrease constant of the line search.
    pub sufficient_decrease: f64,
    /// Halvings before switching to the gradient direction.
    pub max_halvings: usize,
    pub hessian_mode: HessianMode,
    /// Relative finite-difference step.
    pub fd_step: f64,
    /// `min_criticality` below which `Auto` uses differences.
    pub near_critical: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_mass: 1e-10,
            max_iter: 200,
            initial_height: 1.0,
            initial_tau: None,
            backtrack: 0.5,
            sufficient_decrease: 1e-4,
            max_halvings: 60,
            hessian_mode: HessianMode::Auto,
            fd_step: 1e-6,
            near_critical: 1e-7,
        }
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub heights: Vec<f64>,
    pub grad_inf: f64,
    pub value: f64,
    /// Step length accepted to reach the next iterate (0 on the last record).
    pub step: f64,
    /// `"newton"` or `"gradient"`.
    pub direction: String,
    pub hessian: HessianMode,
    pub cell_id: String,
    pub min_criticality: f64,
}

/// Result of a converged solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub format_version: u32,
    pub labels: Vec<String>,
    pub kappa_bar: Vec<f64>,
    pub tau_star: Vec<f64>,
    pub kappa_achieved: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub frozen_set: Vec<usize>,
    pub value: f64,
    pub cell_id: String,
    pub triangulation: SurfaceDoc,
    pub trace: Vec<IterationRecord>,
}

/// Check the targets against the proven range `0 ≤ κ̄σ ≤ 2π`, `κ̄σ < θσ`.
pub fn check_targets(surf: &ConeSurface, kbar: &[f64]) -> Result<()> {
    if kbar.len() != surf.n_vertices() {
        return Err(Error::Precondition(format!("expected {} targets, got {}", surf.n_vertices(), kbar.len())));
    }
    let theta = surf.cone_angles();
    for (i, (&k, &th)) in kbar.iter().zip(&theta).enumerate() {
        let name = &surf.labels()[i];
        if !(0.0..=2.0 * PI).contains(&k) {
            return Err(Error::Precondition(format!("target at {name} = {k} outside [0, 2π]")));
        }
        if k >= th {
            return Err(Error::Precondition(format!("target at {name} = {k} is not below the cone angle {th}")));
        }
    }
    Ok(())
}

fn inf_norm(v: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| v[i].abs()).fold(0.0, f64::max)
}

/// Whether some unflippable edge is critical: the point lies on `∂𝒫`.
fn on_boundary(ev: &FunctionalEval) -> bool {
    let tau: Vec<f64> = ev.heights.iter().map(|h| h * h).collect();
    edge_statuses(&ev.triangulation, &tau, DEFAULT_EPS).iter().any(|s| s.legality == Legality::Critical && !s.flippable)
}

fn newton_direction(m: &DMatrix<f64>, g: &[f64], free: &[usize]) -> Option<DVector<f64>> {
    let k = free.len();
    let sub = DMatrix::from_fn(k, k, |i, j| m[(free[i], free[j])]);
    let rhs = DVector::from_iterator(k, free.iter().map(|&i| -g[i]));
    let d = Cholesky::new(sub)?.solve(&rhs);
    d.iter().all(|x| x.is_finite()).then_some(d)
}

struct Trial {
    ev: FunctionalEval,
    t: f64,
}

/// Backtrack along `d` from `h`; `accept(trial, t)` decides sufficiency.
fn line_search(
    ev: &FunctionalEval,
    kbar: &[f64],
    free: &[usize],
    d: &DVector<f64>,
    opts: &SolveOptions,
    accept: impl Fn(&FunctionalEval, f64) -> bool,
) -> Option<Trial> {
    let mut t = 1.0;
    for _ in 0..=opts.max_halvings {
        let mut h = ev.heights.clone();
        for (k, &i) in free.iter().enumerate() {
            h[i] += t * d[k];
        }
        if free.iter().all(|&i| h[i] > 0.0 && h[i].is_finite()) {
            if let Ok(trial) = evaluate(&ev.triangulation, &h, kbar) {
                if accept(&trial, t) {
                    return Some(Trial { ev: trial, t });
                }
            }
        }
        t *= opts.backtrack;
    }
    None
}

/// Find `τ*` with `κ(τ*) = κ̄`.
pub fn solve(surf: &ConeSurface, kbar: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    check_targets(surf, kbar)?;
    if !(opts.tol_mass > 0.0) || opts.max_iter == 0 {
        return Err(Error::Precondition("tol_mass must be positive and max_iter at least 1".into()));
    }
    let n = surf.n_vertices();
    let frozen: Vec<usize> = (0..n).filter(|&i| kbar[i] == 0.0).collect();
    let free: Vec<usize> = (0..n).filter(|&i| kbar[i] != 0.0).collect();

    let mut h = match &opts.initial_tau {
        Some(tau) => {
            if tau.len() != n || tau.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(Error::Precondition("initial weights must be finite and non-negative".into()));
            }
            tau.iter().map(|t| t.sqrt()).collect()
        }
        None => {
            if !(opts.initial_height > 0.0 && opts.initial_height.is_finite()) {
                return Err(Error::Precondition("initial height must be positive".into()));
            }
            vec![opts.initial_height; n]
        }
    };
    for &i in &frozen {
        h[i] = 0.0;
    }
    if free.iter().any(|&i| h[i] <= 0.0) {
        return Err(Error::Precondition("initial heights must be positive on free vertices".into()));
    }
    let mut ev = evaluate(surf, &h, kbar);
    if !frozen.is_empty() {
        // With zeros on Z the start may lie on or beyond ∂𝒫; shrink the free
        // heights towards 0 ∈ 𝒫 until it is strictly inside.
        let mut k = 0;
        while k < opts.max_halvings && ev.as_ref().map_or(true, on_boundary) {
            for &i in &free {
                h[i] *= 0.5;
            }
            ev = evaluate(surf, &h, kbar);
            k += 1;
        }
    }
    let mut ev = ev?;
    let mut trace = Vec::new();

    for iteration in 0..=opts.max_iter {
        let res = inf_norm(&ev.gradient, &free);
        let mut rec = IterationRecord {
            iteration,
            heights: ev.heights.clone(),
            grad_inf: res,
            value: ev.value,
            step: 0.0,
            direction: String::new(),
            hessian: opts.hessian_mode,
            cell_id: ev.diagnostics.triangulation_id.clone(),
            min_criticality: ev.diagnostics.min_criticality,
        };
        if res < opts.tol_mass {
            trace.push(rec);
            return Ok(report(surf, kbar, ev, res, iteration, frozen, trace));
        }
        if iteration == opts.max_iter {
            trace.push(rec);
            break;
        }

        let near = ev.diagnostics.min_criticality < opts.near_critical;
        let order: &[HessianMode] = match opts.hessian_mode {
            HessianMode::Analytic => &[HessianMode::Analytic],
            HessianMode::FiniteDifference => &[HessianMode::FiniteDifference],
            HessianMode::Auto if near => &[HessianMode::FiniteDifference, HessianMode::Analytic],
            HessianMode::Auto => &[HessianMode::Analytic, HessianMode::FiniteDifference],
        };
        let mut dir = None;
        for &mode in order {
            dir = match mode {
                HessianMode::FiniteDifference => {
                    // Differences may leave 𝒫 next to its boundary; treat that as unavailable.
                    fd_jacobian(&ev.triangulation, &ev.heights, &free, opts.fd_step)
                        .ok()
                        .and_then(|j| newton_direction(&((&j + j.transpose()) * 0.5), &ev.gradient, &free))
                }
                _ => newton_direction(&ev.hessian, &ev.gradient, &free),
            };
            if dir.is_some() {
                rec.hessian = mode;
                break;
            }
        }

        let c = opts.sufficient_decrease;
        let newton = dir.and_then(|d| {
            line_search(&ev, kbar, &free, &d, opts, |tr, t| inf_norm(&tr.gradient, &free) <= (1.0 - c * t) * res)
        });
        let trial = match newton {
            Some(tr) => {
                rec.direction = "newton".into();
                tr
            }
            None => {
                // Steepest descent on H with an Armijo test.
                let g = DVector::from_iterator(free.len(), free.iter().map(|&i| -ev.gradient[i]));
                let slope = g.norm_squared();
                let v0 = ev.value;
                rec.direction = "gradient".into();
                line_search(&ev, kbar, &free, &g, opts, |tr, t| tr.value <= v0 - c * t * slope).ok_or_else(|| {
                    Error::NoConvergence(format!(
                        "line search stalled at iteration {iteration}, residual {res:e}, heights {:?}",
                        ev.heights
                    ))
                })?
            }
        };
        rec.step = trial.t;
        trace.push(rec);
        ev = trial.ev;
    }
    let res = inf_norm(&ev.gradient, &free);
    Err(Error::NoConvergence(format!("{} iterations, best residual {res:e}, heights {:?}", opts.max_iter, ev.heights)))
}

fn report(
    surf: &ConeSurface,
    kbar: &[f64],
    ev: FunctionalEval,
    residual: f64,
    iterations: usize,
    frozen_set: Vec<usize>,
    trace: Vec<IterationRecord>,
) -> SolveReport {
    let tau_star: Vec<f64> = ev.heights.iter().map(|h| h * h).collect();
    let residual = residual.max(inf_norm(&ev.gradient, &frozen_set));
    SolveReport {
        format_version: 1,
        labels: surf.labels().to_vec(),
        kappa_bar: kbar.to_vec(),
        tau_star,
        kappa_achieved: ev.masses,
        residual,
        iterations,
        frozen_set,
        value: ev.value,
        cell_id: ev.diagnostics.triangulation_id,
        triangulation: ev.triangulation.to_doc(),
        trace,
    }
}

/// Masses along the ray `τ = c·1_S` for each `c` in `cs`.
pub fn mass_curve(surf: &ConeSurface, cs: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = surf.n_vertices();
    cs.iter().map(|&c| Ok((c, masses(surf, &vec![c; n])?))).collect()
}
