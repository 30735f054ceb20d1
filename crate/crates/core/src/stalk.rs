//! Stalks of spacelike cones: Θ-periodic piecewise trigonometric height
//! profiles, their mass integral
//!
//! `κ(ρ) = ∫₀^Θ √(1 + ρ² + ρ'²) / (1 + ρ²) dθ`,
//!
//! the equal length of the associated curve on the branched sphere, and an
//! audit of the Lorentzian Volkov bounds on random convex stalks.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One analytic piece of a stalk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Arc {
    /// `ρ(θ) = amplitude · cos(θ + phase)`.
    Trig { amplitude: f64, phase: f64 },
    /// `ρ(θ) = value`; used by the capped family.
    Constant { value: f64 },
}

impl Arc {
    pub fn value(&self, th: f64) -> f64 {
        match *self {
            Arc::Trig { amplitude, phase } => amplitude * (th + phase).cos(),
            Arc::Constant { value } => value,
        }
    }

    pub fn derivative(&self, th: f64) -> f64 {
        match *self {
            Arc::Trig { amplitude, phase } => -amplitude * (th + phase).sin(),
            Arc::Constant { .. } => 0.0,
        }
    }

    /// Closed-form mass of the arc over `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        match *self {
            Arc::Trig { amplitude, phase } => {
                let s = amplitude.hypot(1.0);
                trig_primitive(b + phase, s) - trig_primitive(a + phase, s)
            }
            Arc::Constant { value } => (b - a) / value.hypot(1.0),
        }
    }

    fn is_trig(&self) -> bool {
        matches!(self, Arc::Trig { .. })
    }
}

/// Continuous primitive of `s / (1 + (s² − 1) cos² u)`, i.e. `atan(tan u / s)`
/// unwrapped.
fn trig_primitive(u: f64, s: f64) -> f64 {
    let (sn, cs) = u.sin_cos();
    u + ((1.0 - s) * sn * cs).atan2(s * cs * cs + sn * sn)
}

/// A piece `[start, end]` of a stalk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub arc: Arc,
}

/// A Θ-periodic stalk given on `[0, Θ)` by consecutive pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stalk {
    pub period: f64,
    pub pieces: Vec<Piece>,
}

const TOL: f64 = 1e-9;

impl Stalk {
    /// Build and check continuity and Q-convexity at every breakpoint,
    /// including the wrap `Θ ≡ 0`.
    pub fn new(period: f64, pieces: Vec<Piece>) -> Result<Self> {
        let s = Self { period, pieces };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::Precondition("period must be positive".into()));
        }
        let p = &self.pieces;
        if p.is_empty() || p[0].start != 0.0 || (p[p.len() - 1].end - self.period).abs() > TOL * self.period {
            return Err(Error::Precondition("pieces must cover [0, Θ)".into()));
        }
        for w in p.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::Precondition("pieces must be contiguous".into()));
            }
        }
        if p.iter().any(|q| !(q.end > q.start)) {
            return Err(Error::Precondition("empty piece".into()));
        }
        for i in 0..p.len() {
            let (a, b) = (&p[i], &p[(i + 1) % p.len()]);
            let (l, r) = (a.arc.value(a.end), b.arc.value(b.start));
            let scale = 1.0 + l.abs().max(r.abs());
            if (l - r).abs() > TOL * scale {
                return Err(Error::Precondition(format!("discontinuous at breakpoint {i}: {l} vs {r}")));
            }
            let (dl, dr) = (a.arc.derivative(a.end), b.arc.derivative(b.start));
            if dl > dr + TOL * (1.0 + dl.abs().max(dr.abs())) {
                return Err(Error::Precondition(format!("not Q-convex at breakpoint {i}: {dl} > {dr}")));
            }
        }
        Ok(())
    }

    /// `ρ ≡ 0`.
    pub fn flat(period: f64) -> Result<Self> {
        Self::new(period, vec![Piece { start: 0.0, end: period, arc: Arc::Trig { amplitude: 0.0, phase: 0.0 } }])
    }

    /// `sinh α · cos θ` on `[−Θ/2, Θ/2]`, shifted to start at 0.
    pub fn sine(period: f64, alpha: f64) -> Result<Self> {
        let arc = Arc::Trig { amplitude: alpha.sinh(), phase: -period / 2.0 };
        Self::new(period, vec![Piece { start: 0.0, end: period, arc }])
    }

    /// For `Θ ≥ 2π`: `sinh α · sin θ` on `[−3π/2, π/2]` and the constant
    /// `sinh α` on the remaining `Θ − 2π`.
    pub fn capped(period: f64, alpha: f64) -> Result<Self> {
        if period < TAU {
            return Err(Error::Precondition("capped stalks need Θ ≥ 2π".into()));
        }
        let a = alpha.sinh();
        // sin(θ − 3π/2) = cos θ.
        let mut pieces = vec![Piece { start: 0.0, end: TAU.min(period), arc: Arc::Trig { amplitude: a, phase: 0.0 } }];
        if period > TAU {
            pieces.push(Piece { start: TAU, end: period, arc: Arc::Constant { value: a } });
        }
        Self::new(period, pieces)
    }

    /// `ρ(θ)` with `θ` taken modulo the period.
    pub fn value(&self, th: f64) -> f64 {
        let th = th.rem_euclid(self.period);
        let p = self.pieces.iter().find(|p| th <= p.end).unwrap_or(&self.pieces[self.pieces.len() - 1]);
        p.arc.value(th)
    }

    /// Longest run of consecutive pieces carrying one trigonometric arc
    /// (cyclically).
    pub fn longest_trig_interval(&self) -> f64 {
        let p = &self.pieces;
        let same = |a: &Arc, b: &Arc| match (a, b) {
            (Arc::Trig { amplitude: a1, phase: p1 }, Arc::Trig { amplitude: a2, phase: p2 }) => {
                // Compare as functions through their cosine/sine coefficients.
                let (s1, c1) = p1.sin_cos();
                let (s2, c2) = p2.sin_cos();
                (a1 * c1 - a2 * c2).abs() < TOL && (a1 * s1 - a2 * s2).abs() < TOL
            }
            _ => false,
        };
        let n = p.len();
        let mut best = 0.0f64;
        for i in 0..n {
            if !p[i].arc.is_trig() || (n > 1 && same(&p[(i + n - 1) % n].arc, &p[i].arc) && i != 0) {
                continue;
            }
            let mut len = 0.0;
            let mut j = i;
            loop {
                len += p[j].end - p[j].start;
                let k = (j + 1) % n;
                if k == i || !same(&p[j].arc, &p[k].arc) {
                    break;
                }
                // Crossing the wrap keeps the same function only for a single arc.
                if k == 0 && n > 1 {
                    break;
                }
                j = k;
            }
            best = best.max(len);
        }
        best
    }

    pub fn is_flat(&self, tol: f64) -> bool {
        self.pieces.iter().all(|p| match p.arc {
            Arc::Trig { amplitude, .. } => amplitude.abs() <= tol,
            Arc::Constant { value } => value.abs() <= tol,
        })
    }
}

/// Mass of a stalk, summed from closed forms per piece.
pub fn stalk_mass(s: &Stalk) -> f64 {
    s.pieces.iter().map(|p| p.arc.mass(p.start, p.end)).sum()
}

fn sphere_point(rho: f64, th: f64) -> [f64; 3] {
    let r = rho.hypot(1.0);
    let (c, z) = (1.0 / r, rho / r);
    [c * th.cos(), c * th.sin(), z]
}

fn great_circle_distance(p: [f64; 3], q: [f64; 3]) -> f64 {
    let cr = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
    let s = (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).sqrt();
    s.atan2(p[0] * q[0] + p[1] * q[1] + p[2] * q[2])
}

/// Length of `θ ↦ (atan ρ(θ), θ)` on the sphere branched over its poles:
/// trigonometric pieces are great-circle arcs, constant pieces parallels.
pub fn spherical_length(s: &Stalk) -> f64 {
    let mut total = 0.0;
    for p in &s.pieces {
        match p.arc {
            Arc::Trig { .. } => {
                // Sub-arcs of θ-span below π/2 are minor great-circle arcs.
                let k = ((p.end - p.start) / (FRAC_PI_2 * 0.9)).ceil().max(1.0) as usize;
                let h = (p.end - p.start) / k as f64;
                for i in 0..k {
                    let (a, b) = (p.start + i as f64 * h, p.start + (i + 1) as f64 * h);
                    // θ differences are small, so the unbranched sphere is a valid chart.
                    total +=
                        great_circle_distance(sphere_point(p.arc.value(a), 0.0), sphere_point(p.arc.value(b), b - a));
                }
            }
            Arc::Constant { value } => total += (p.end - p.start) * value.atan().cos(),
        }
    }
    total
}

/// Which row of the Volkov table applies to `Θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolkovCase {
    BelowPi,
    Pi,
    BetweenPiAndTwoPi,
    TwoPi,
    AboveTwoPi,
}

impl VolkovCase {
    pub fn of(theta: f64, tol: f64) -> Self {
        if (theta - PI).abs() <= tol {
            Self::Pi
        } else if (theta - TAU).abs() <= tol {
            Self::TwoPi
        } else if theta < PI {
            Self::BelowPi
        } else if theta < TAU {
            Self::BetweenPiAndTwoPi
        } else {
            Self::AboveTwoPi
        }
    }

    /// Whether `kappa` satisfies the bound, with slack `tol` on equalities
    /// and non-strict inequalities; strict inequalities are checked up to
    /// `tol` as well.
    pub fn holds(&self, theta: f64, kappa: f64, tol: f64) -> bool {
        match self {
            Self::AboveTwoPi => kappa > TAU - tol,
            Self::TwoPi => (kappa - TAU).abs() <= tol,
            Self::BetweenPiAndTwoPi => kappa >= theta - tol,
            Self::Pi => (kappa - PI).abs() <= tol,
            Self::BelowPi => kappa > 0.0 && kappa <= theta + tol,
        }
    }
}

/// Check the Volkov table for a Q-convex stalk with a coplanar wedge of
/// width at least `min(π, Θ)`.
pub fn volkov_bounds_check(s: &Stalk, tol: f64) -> Result<bool> {
    s.validate()?;
    let need = PI.min(s.period);
    if s.longest_trig_interval() < need - TOL {
        return Err(Error::Precondition(format!("no trigonometric interval of length {need}")));
    }
    let kappa = stalk_mass(s);
    Ok(VolkovCase::of(s.period, TOL).holds(s.period, kappa, tol))
}

fn coeffs(arc: &Arc) -> (f64, f64) {
    match *arc {
        Arc::Trig { amplitude, phase } => (amplitude * phase.cos(), -amplitude * phase.sin()),
        Arc::Constant { .. } => unreachable!("envelopes use trigonometric arcs"),
    }
}

/// Upper envelope of trigonometric arcs on `[a, b]`.
fn upper_envelope(arcs: &[Arc], a: f64, b: f64) -> Vec<Piece> {
    let mut cuts = vec![a, b];
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            let (a1, b1) = coeffs(&arcs[i]);
            let (a2, b2) = coeffs(&arcs[j]);
            let (da, db) = (a1 - a2, b1 - b2);
            if da.hypot(db) < 1e-14 {
                continue;
            }
            let psi = db.atan2(da) + FRAC_PI_2;
            let k0 = ((a - psi) / PI).ceil() as i64;
            let mut k = k0;
            loop {
                let t = psi + k as f64 * PI;
                if t >= b {
                    break;
                }
                if t > a {
                    cuts.push(t);
                }
                k += 1;
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let mut out: Vec<Piece> = Vec::new();
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let best =
            arcs.iter().copied().max_by(|x, y| x.value(mid).total_cmp(&y.value(mid))).expect("non-empty envelope");
        match out.last_mut() {
            Some(last) if last.arc == best => last.end = w[1],
            _ => out.push(Piece { start: w[0], end: w[1], arc: best }),
        }
    }
    out
}

fn random_arc(rng: &mut impl Rng) -> Arc {
    Arc::Trig { amplitude: rng.gen_range(-3.0..3.0), phase: rng.gen_range(0.0..TAU) }
}

/// A random Q-convex stalk of period `Θ` whose longest trigonometric interval
/// has length at least `min(π, Θ)`.
///
/// For `Θ ≤ π` (and occasionally otherwise) the stalk is a single arc
/// `A cos(θ − Θ/2)` with `A sin(Θ/2) ≥ 0`. Otherwise a wedge arc `T₀` covers
/// `[0, W]`, `W ∈ [π, Θ)`, and `[W, Θ]` carries the upper envelope of `T₀`,
/// its translate `T₁(θ) = T₀(θ − Θ)` and random arcs lying below `T₀` at `W`
/// and below `T₁` at `Θ`. Maxima of trigonometric arcs only have convex
/// kinks, and the two end conditions make the joins at `W` and `Θ ≡ 0`
/// continuous and Q-convex.
pub fn random_stalk(period: f64, rng: &mut impl Rng) -> Stalk {
    let single = |rng: &mut dyn rand::RngCore| {
        let mut a: f64 = rng.gen_range(0.0..3.0);
        if (period / 2.0).sin() < 0.0 {
            a = -a;
        }
        Stalk::new(
            period,
            vec![Piece { start: 0.0, end: period, arc: Arc::Trig { amplitude: a, phase: -period / 2.0 } }],
        )
        .expect("single arcs with A sin(Θ/2) ≥ 0 are Q-convex")
    };
    if period <= PI + TOL || rng.gen_bool(0.1) {
        return single(rng);
    }
    loop {
        let w = rng.gen_range(PI..period);
        let t0 = random_arc(rng);
        let Arc::Trig { amplitude, phase } = t0 else { unreachable!() };
        let t1 = Arc::Trig { amplitude, phase: phase - period };
        if t1.value(w) > t0.value(w) || t0.value(period) > t1.value(period) {
            continue;
        }
        let mut arcs = vec![t0, t1];
        let extra = rng.gen_range(0..=3);
        let mut tries = 0;
        while arcs.len() < 2 + extra && tries < 50 {
            tries += 1;
            let tj = random_arc(rng);
            if tj.value(w) <= t0.value(w) && tj.value(period) <= t1.value(period) {
                arcs.push(tj);
            }
        }
        let mut pieces = vec![Piece { start: 0.0, end: w, arc: t0 }];
        for p in upper_envelope(&arcs, w, period) {
            match pieces.last_mut() {
                Some(last) if last.arc == p.arc => last.end = p.end,
                _ => pieces.push(p),
            }
        }
        pieces.last_mut().expect("non-empty").end = period;
        if let Ok(s) = Stalk::new(period, pieces) {
            return s;
        }
    }
}

/// A stalk violating the Volkov table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: u64,
    pub kappa: f64,
    pub stalk: Stalk,
}

/// Outcome of a randomized Volkov audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub theta: f64,
    pub samples: u64,
    pub case: VolkovCase,
    pub min_kappa: f64,
    pub max_kappa: f64,
    pub max_mass_length_gap: f64,
    pub violations: Vec<Violation>,
}

/// Outcome of one audit sample.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditSample {
    pub index: u64,
    pub kappa: f64,
    pub length_gap: f64,
    pub ok: bool,
    pub stalk: Stalk,
}

/// Sample `index` of the audit: each index draws from its own ChaCha stream,
/// so results do not depend on evaluation order.
pub fn audit_sample(theta: f64, seed: u64, index: u64, tol: f64) -> Result<AuditSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let s = random_stalk(theta, &mut rng);
    let kappa = stalk_mass(&s);
    let ok = volkov_bounds_check(&s, tol)?;
    Ok(AuditSample { index, kappa, length_gap: (kappa - spherical_length(&s)).abs(), ok, stalk: s })
}

/// Fold samples into a report.
pub fn audit_report(theta: f64, samples: impl IntoIterator<Item = AuditSample>) -> AuditReport {
    let mut r = AuditReport {
        theta,
        samples: 0,
        case: VolkovCase::of(theta, TOL),
        min_kappa: f64::INFINITY,
        max_kappa: f64::NEG_INFINITY,
        max_mass_length_gap: 0.0,
        violations: Vec::new(),
    };
    for s in samples {
        r.samples += 1;
        r.min_kappa = r.min_kappa.min(s.kappa);
        r.max_kappa = r.max_kappa.max(s.kappa);
        r.max_mass_length_gap = r.max_mass_length_gap.max(s.length_gap);
        if !s.ok {
            r.violations.push(Violation { index: s.index, kappa: s.kappa, stalk: s.stalk });
        }
    }
    r
}

/// Sequential audit over `samples` random stalks.
pub fn volkov_audit(theta: f64, samples: u64, seed: u64, tol: f64) -> Result<AuditReport> {
    let all = (0..samples).map(|i| audit_sample(theta, seed, i, tol)).collect::<Result<Vec<_>>>()?;
    Ok(audit_report(theta, all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        for th in [0.3, 1.0, PI / 2.0, 3.0] {
            assert!((stalk_mass(&Stalk::flat(th).unwrap()) - th).abs() < 1e-12);
            for a in [0.1, 1.0, 3.0] {
                let want = 2.0 * ((th / 2.0).tan() / f64::cosh(a)).atan();
                assert!((stalk_mass(&Stalk::sine(th, a).unwrap()) - want).abs() < 1e-12);
            }
        }
        for th in [TAU, 7.0, 10.0] {
            for a in [0.1, 1.0, 3.0] {
                let want = TAU + (th - TAU) / f64::cosh(a);
                assert!((stalk_mass(&Stalk::capped(th, a).unwrap()) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_period_arc_has_mass_two_pi() {
        let s = Stalk::new(TAU, vec![Piece { start: 0.0, end: TAU, arc: Arc::Trig { amplitude: 2.5, phase: 0.7 } }])
            .unwrap();
        assert!((stalk_mass(&s) - TAU).abs() < 1e-12);
    }

    #[test]
    fn concave_kink_is_rejected() {
        // −|sin| has a concave kink at 0 ≡ π.
        let s =
            Stalk::new(PI, vec![Piece { start: 0.0, end: PI, arc: Arc::Trig { amplitude: -1.0, phase: -FRAC_PI_2 } }]);
        assert!(s.is_err());
    }

    #[test]
    fn trig_arc_lies_on_a_great_circle() {
        let arc = Arc::Trig { amplitude: 1.7, phase: 0.4 };
        let p: Vec<[f64; 3]> = [0.1, 0.9, 2.0].iter().map(|&t| sphere_point(arc.value(t), t)).collect();
        let det = p[0][0] * (p[1][1] * p[2][2] - p[1][2] * p[2][1]) - p[0][1] * (p[1][0] * p[2][2] - p[1][2] * p[2][0])
            + p[0][2] * (p[1][0] * p[2][1] - p[1][1] * p[2][0]);
        assert!(det.abs() < 1e-14);
    }

    #[test]
    fn random_stalks_are_valid_and_wide() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for th in [1.0, PI, 4.0, TAU, 8.0] {
            for _ in 0..200 {
                let s = random_stalk(th, &mut rng);
                s.validate().unwrap();
                assert!(s.longest_trig_interval() >= PI.min(th) - 1e-9);
                assert!((stalk_mass(&s) - spherical_length(&s)).abs() < 1e-10);
            }
        }
    }
}
