//! Stagnation points of the quantum velocity field and their hyperbolic
//! classification.
//!
//! An equilibrium `ξ_e` satisfies `w(ξ_e) = 0`. Its linear stability follows
//! from the Jacobian `j = [[∂_x w_x, ∂_k w_x], [∂_x w_k, ∂_k w_k]]`:
//!
//! | condition                 | kind                    |
//! |---------------------------|-------------------------|
//! | `Det < 0`                 | saddle                  |
//! | `Det > 0`, `Tr < 0`       | stable node / focus     |
//! | `Det > 0`, `Tr > 0`       | unstable node / focus   |
//! | `Det > 0`, `Tr ≈ 0`       | center (non-hyperbolic) |
//!
//! with nodes and foci separated by the sign of `Δ = Tr² - 4 Det`.
//!
//! Winding numbers are counted counterclockwise-positive. This is the
//! Poincaré index of the field, so any isolated center or focus carries `+1`
//! whichever way the flow circulates, and a nondegenerate saddle carries `-1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flow::{divergence_w, velocity, Region};
use crate::model::{ModelParams, PhasePoint};
use crate::{Error, Result};

/// Finite-difference step of the Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// `|Tr|` below this is reported as a center / non-hyperbolic point.
pub const TRACE_TOL: f64 = 1e-8;
/// Allowed mismatch between the finite-difference trace and `∇·w`.
pub const TRACE_CONSISTENCY_TOL: f64 = 1e-4;
/// Newton stops once `|w|` drops below this.
pub const SOLVER_TOL: f64 = 1e-10;
/// Converged points closer than this are merged.
pub const MERGE_RADIUS: f64 = 1e-6;
/// `|w|` envelope used to seed the search.
pub const DEFAULT_ENVELOPE: f64 = 0.006;
pub const DEFAULT_SEED_RESOLUTION: usize = 241;
const NEWTON_MAX_ITER: usize = 60;

/// Eigenvalue as a serializable complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Eigenvalue {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

/// Linearization of the velocity field at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianSummary {
    /// `[[∂_x w_x, ∂_k w_x], [∂_x w_k, ∂_k w_k]]`.
    pub entries: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
    /// `Tr² - 4 Det`.
    pub delta: f64,
    pub eigenvalues: [Eigenvalue; 2],
}

impl JacobianSummary {
    pub fn from_entries(entries: [[f64; 2]; 2]) -> Self {
        let trace = entries[0][0] + entries[1][1];
        let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
        let delta = trace * trace - 4.0 * det;
        let root = Complex64::new(delta, 0.0).sqrt();
        let half = Complex64::new(0.5 * trace, 0.0);
        Self {
            entries,
            trace,
            det,
            delta,
            eigenvalues: [(half + 0.5 * root).into(), (half - 0.5 * root).into()],
        }
    }

    pub fn kind(&self) -> StagnationKind {
        classify(self.trace, self.det, self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StagnationKind {
    Saddle,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    /// `|Tr|` within tolerance of zero, or a singular Jacobian.
    CenterNonHyperbolic,
}

impl StagnationKind {
    pub fn label(&self) -> &'static str {
        match self {
            StagnationKind::Saddle => "saddle",
            StagnationKind::StableNode => "stable-node",
            StagnationKind::UnstableNode => "unstable-node",
            StagnationKind::StableFocus => "stable-focus",
            StagnationKind::UnstableFocus => "unstable-focus",
            StagnationKind::CenterNonHyperbolic => "center/non-hyperbolic",
        }
    }
}

/// Decision table on `(Tr, Det, Δ)`.
pub fn classify(trace: f64, det: f64, delta: f64) -> StagnationKind {
    if det < 0.0 {
        return StagnationKind::Saddle;
    }
    if det == 0.0 || trace.abs() < TRACE_TOL {
        return StagnationKind::CenterNonHyperbolic;
    }
    match (trace < 0.0, delta > 0.0) {
        (true, true) => StagnationKind::StableNode,
        (true, false) => StagnationKind::StableFocus,
        (false, true) => StagnationKind::UnstableNode,
        (false, false) => StagnationKind::UnstableFocus,
    }
}

/// A located stagnation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StagnationReport {
    pub point: PhasePoint,
    pub jac: JacobianSummary,
    pub kind: StagnationKind,
    pub winding: i32,
}

fn velocity_vec(p: PhasePoint, m: ModelParams) -> Result<[f64; 2]> {
    let (wx, wk) = velocity(p, m)?;
    Ok([wx, wk])
}

/// Central differences at step `h` and `h/2`, combined by one Richardson step.
fn jacobian_entries(p: PhasePoint, m: ModelParams) -> Result<[[f64; 2]; 2]> {
    let central = |h: f64| -> Result<[[f64; 2]; 2]> {
        let xp = velocity_vec(PhasePoint::new(p.x + h, p.k), m)?;
        let xm = velocity_vec(PhasePoint::new(p.x - h, p.k), m)?;
        let kp = velocity_vec(PhasePoint::new(p.x, p.k + h), m)?;
        let km = velocity_vec(PhasePoint::new(p.x, p.k - h), m)?;
        let d = |a: f64, b: f64| (a - b) / (2.0 * h);
        Ok([
            [d(xp[0], xm[0]), d(kp[0], km[0])],
            [d(xp[1], xm[1]), d(kp[1], km[1])],
        ])
    };
    let coarse = central(JACOBIAN_STEP)?;
    let fine = central(0.5 * JACOBIAN_STEP)?;
    let mut out = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = (4.0 * fine[r][c] - coarse[r][c]) / 3.0;
        }
    }
    Ok(out)
}

/// Jacobian of the velocity field, cross-checked against `∇·w`.
pub fn jacobian(p: PhasePoint, m: ModelParams) -> Result<JacobianSummary> {
    let summary = JacobianSummary::from_entries(jacobian_entries(p, m)?);
    // the classical field is divergence-free
    let divergence = if m.is_classical() {
        0.0
    } else {
        divergence_w(p, m)?
    };
    let scale = summary
        .entries
        .iter()
        .flatten()
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    if (summary.trace - divergence).abs() > TRACE_CONSISTENCY_TOL * scale {
        return Err(Error::InconsistentTrace {
            trace: summary.trace,
            divergence,
        });
    }
    Ok(summary)
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Damped Newton iteration on `w(ξ) = 0`. The step length halves while the
/// residual does not decrease.
pub fn newton_refine(seed: PhasePoint, m: ModelParams) -> Option<PhasePoint> {
    let mut p = seed;
    let mut f = velocity_vec(p, m).ok()?;
    let mut res = norm(f);
    for _ in 0..NEWTON_MAX_ITER {
        if res < SOLVER_TOL {
            return Some(p);
        }
        let j = jacobian_entries(p, m).ok()?;
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = -(j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dk = -(-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        let mut damping = 1.0;
        loop {
            let q = PhasePoint::new(p.x + damping * dx, p.k + damping * dk);
            if let Ok(fq) = velocity_vec(q, m) {
                let rq = norm(fq);
                if rq < res {
                    p = q;
                    f = fq;
                    res = rq;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-10 {
                return (res < SOLVER_TOL).then_some(p);
            }
        }
    }
    (res < SOLVER_TOL).then_some(p)
}

/// Result of a stagnation-point search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagnationSearch {
    /// Distinct points sorted by `(x, k)`.
    pub points: Vec<StagnationReport>,
    pub seeds: usize,
    /// Seeds whose Newton iteration failed or left the region.
    pub dropped_seeds: usize,
}

/// Locates every stagnation point in `region`.
///
/// Seeds are the lattice nodes (`seed_resolution` per axis) where
/// `|w| < envelope`, together with the discrete local minima of `|w|`; the
/// latter catch zeros in steep parts of the field whose neighbouring nodes all
/// sit outside the envelope. Each seed is refined by damped Newton to
/// `|w| < 1e-10`, duplicates within `1e-6` are merged, and survivors are
/// classified and given a winding number.
pub fn find_stagnation_points(
    region: Region,
    m: ModelParams,
    seed_resolution: usize,
    envelope: f64,
) -> Result<StagnationSearch> {
    region.validate()?;
    m.validate()?;
    if !(envelope.is_finite() && envelope > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "envelope must be positive, got {envelope}"
        )));
    }
    if seed_resolution < 3 {
        return Err(Error::InvalidParameter(
            "seed resolution must be at least 3".into(),
        ));
    }
    let n = seed_resolution;
    let (xs, ks) = region.lattice(n, n);
    let speed: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| velocity_vec(PhasePoint::new(xs[idx % n], ks[idx / n]), m).map(norm))
        .collect::<Result<_>>()?;

    let seeds: Vec<PhasePoint> = (0..n * n)
        .filter(|&idx| {
            let (i, j) = (idx % n, idx / n);
            let v = speed[idx];
            if v < envelope {
                return true;
            }
            let mut is_min = true;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                        continue;
                    }
                    if speed[jj as usize * n + ii as usize] < v {
                        is_min = false;
                    }
                }
            }
            is_min
        })
        .map(|idx| PhasePoint::new(xs[idx % n], ks[idx / n]))
        .collect();

    let refined: Vec<Option<PhasePoint>> = seeds
        .par_iter()
        .map(|&s| newton_refine(s, m).filter(|p| region.contains(*p)))
        .collect();

    let mut distinct: Vec<PhasePoint> = Vec::new();
    let mut dropped = 0;
    for r in refined {
        match r {
            Some(p) => {
                if distinct.iter().all(|q| q.distance(&p) > MERGE_RADIUS) {
                    distinct.push(p);
                }
            }
            None => dropped += 1,
        }
    }
    distinct.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.k.total_cmp(&b.k)));

    let points = distinct
        .par_iter()
        .map(|&p| report_at(p, m, &distinct))
        .collect::<Result<Vec<_>>>()?;
    Ok(StagnationSearch {
        points,
        seeds: seeds.len(),
        dropped_seeds: dropped,
    })
}

/// Classifies `p` and winds a circle that excludes every other known point.
fn report_at(p: PhasePoint, m: ModelParams, others: &[PhasePoint]) -> Result<StagnationReport> {
    let jac = jacobian(p, m)?;
    let nearest = others
        .iter()
        .map(|q| q.distance(&p))
        .filter(|&d| d > MERGE_RADIUS)
        .fold(f64::INFINITY, f64::min);
    let radius = (0.4 * nearest).min(0.02);
    let winding = winding_number(p, radius, m, 64)?;
    Ok(StagnationReport {
        point: p,
        jac,
        kind: jac.kind(),
        winding,
    })
}

/// Largest α step of the continuation that follows the primary equilibrium.
const CONTINUATION_STEP: f64 = 0.05;

/// The stagnation point continued from the classical equilibrium at the origin.
///
/// α is raised from zero in steps of at most 0.05, each Newton solve seeded
/// by the previous solution, so the point tracks one branch through the
/// pitchfork where side branches split off.
pub fn primary_equilibrium(m: ModelParams) -> Result<StagnationReport> {
    let p = continue_primary(m)?;
    let jac = jacobian(p, m)?;
    // the side branches approach the primary point near the pitchfork; the
    // winding circle has to stay inside the gap
    let radius = 0.02f64.min(0.1 * jac.det.abs().sqrt()).max(1e-4);
    let winding = winding_number(p, radius, m, 64)?;
    Ok(StagnationReport {
        point: p,
        jac,
        kind: jac.kind(),
        winding,
    })
}

fn continue_primary(m: ModelParams) -> Result<PhasePoint> {
    m.validate()?;
    let steps = (m.alpha / CONTINUATION_STEP).ceil().max(1.0) as usize;
    let mut p = PhasePoint::ORIGIN;
    for i in 1..=steps {
        let alpha = m.alpha * i as f64 / steps as f64;
        p = newton_refine(p, m.with_alpha(alpha)).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "continuation lost the primary equilibrium at alpha = {alpha}"
            ))
        })?;
    }
    Ok(p)
}

/// α at which the primary equilibrium turns into a saddle (`Det` changes sign),
/// by bisection to a bracket width of `1e-4`.
pub fn saddle_onset_alpha(a: f64, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("bad bracket [{lo}, {hi}]")));
    }
    let det = |alpha: f64| -> Result<f64> {
        let m = ModelParams::new(a, alpha)?;
        Ok(jacobian(continue_primary(m)?, m)?.det)
    };
    if !(det(lo)? > 0.0 && det(hi)? < 0.0) {
        return Err(Error::NotFound(lo, hi));
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if det(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Samples beyond which the winding count gives up refining.
const WINDING_MAX_SAMPLES: usize = 1 << 16;

/// Counterclockwise winding number of `w` along the circle of `radius` about
/// `center`: the unwrapped change of `atan2(w_k, w_x)` divided by `2π`.
///
/// The sampling doubles until every angle increment is below `π/2`.
pub fn winding_number(
    center: PhasePoint,
    radius: f64,
    m: ModelParams,
    samples: usize,
) -> Result<i32> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let mut n = samples.max(64);
    let scale = velocity_scale(center, radius, m)?;
    loop {
        let angles = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                let p = PhasePoint::new(center.x + radius * t.cos(), center.k + radius * t.sin());
                let w = velocity_vec(p, m)?;
                if norm(w) <= 1e-12 * scale {
                    return Err(Error::IllPosedWinding);
                }
                Ok(w[1].atan2(w[0]))
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut total = 0.0;
        let mut resolved = true;
        for i in 0..n {
            let mut d = angles[(i + 1) % n] - angles[i];
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            if d.abs() >= 0.5 * PI {
                resolved = false;
                break;
            }
            total += d;
        }
        if resolved {
            return Ok((total / (2.0 * PI)).round() as i32);
        }
        if n >= WINDING_MAX_SAMPLES {
            return Err(Error::IllPosedWinding);
        }
        n *= 2;
    }
}

fn velocity_scale(center: PhasePoint, radius: f64, m: ModelParams) -> Result<f64> {
    let probe = velocity_vec(PhasePoint::new(center.x + radius, center.k), m)?;
    Ok(norm(probe).max(m.a).max(1.0))
}
