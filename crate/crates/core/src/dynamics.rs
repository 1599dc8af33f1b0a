//! Continuous and discrete trajectories of the velocity field.
//!
//! The continuous flow `ξ' = w(ξ)` (classical field when `α = 0`) is
//! integrated with the classical fourth-order Runge-Kutta scheme. Poincaré
//! sections sample it stroboscopically every quarter of the orbit period. The
//! discrete map is the forward-Euler step `ξ_{n+1} = ξ_n + ε w(ξ_n)`, iterated
//! by the bifurcation scans over `a` or `α`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::primary_equilibrium;
use crate::flow::velocity;
use crate::model::{hamiltonian, EnergyValue, ModelParams, PhasePoint};
use crate::{Error, Result};

/// Trajectories leaving `|x|, |k| <= DIVERGENCE_BOUND` are flagged diverged.
pub const DIVERGENCE_BOUND: f64 = 50.0;
/// Largest RK4 step used by the Poincaré sampler.
pub const POINCARE_MAX_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub tau: f64,
    pub point: PhasePoint,
}

/// Uniformly stepped RK4 trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub params: ModelParams,
    pub step: f64,
    /// `H` at the start point; conserved only by the classical flow.
    pub energy0: EnergyValue,
    /// Set when the run stopped early on leaving the divergence bound.
    pub diverged: bool,
}

impl Trajectory {
    pub fn last(&self) -> PhasePoint {
        self.samples.last().map(|s| s.point).unwrap_or_default()
    }

    /// Largest `|H - H_0|` along the run.
    pub fn energy_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (hamiltonian(s.point, self.params).epsilon - self.energy0.epsilon).abs())
            .fold(0.0, f64::max)
    }
}

fn field(p: PhasePoint, m: ModelParams) -> Result<[f64; 2]> {
    let (wx, wk) = velocity(p, m)?;
    Ok([wx, wk])
}

fn out_of_bounds(p: PhasePoint) -> bool {
    !(p.x.abs() <= DIVERGENCE_BOUND && p.k.abs() <= DIVERGENCE_BOUND)
}

/// One classical Runge-Kutta step.
pub fn rk4_step(p: PhasePoint, m: ModelParams, h: f64) -> Result<PhasePoint> {
    let shift = |d: [f64; 2], s: f64| PhasePoint::new(p.x + s * d[0], p.k + s * d[1]);
    let k1 = field(p, m)?;
    let k2 = field(shift(k1, 0.5 * h), m)?;
    let k3 = field(shift(k2, 0.5 * h), m)?;
    let k4 = field(shift(k3, h), m)?;
    Ok(PhasePoint::new(
        p.x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p.k + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ))
}

fn check_step(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "step must be positive, got {h}"
        )))
    }
}

/// RK4 integration over `duration` with fixed step `h`. The last sample sits
/// at `n h` with `n = ceil(duration / h)`.
pub fn integrate(start: PhasePoint, m: ModelParams, h: f64, duration: f64) -> Result<Trajectory> {
    m.validate()?;
    check_step(h)?;
    if !(duration >= h && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "duration {duration} shorter than step {h}"
        )));
    }
    if !start.is_finite() {
        return Err(Error::InvalidParameter("start point must be finite".into()));
    }
    let steps = (duration / h - 1e-9).ceil() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(TrajectorySample {
        tau: 0.0,
        point: start,
    });
    let mut p = start;
    let mut diverged = false;
    for n in 1..=steps {
        p = rk4_step(p, m, h)?;
        if out_of_bounds(p) {
            diverged = true;
            break;
        }
        samples.push(TrajectorySample {
            tau: n as f64 * h,
            point: p,
        });
    }
    Ok(Trajectory {
        samples,
        params: m,
        step: h,
        energy0: hamiltonian(start, m),
        diverged,
    })
}

/// Centre the orbits wind around: the origin classically, otherwise the
/// primary stagnation point.
pub fn orbit_center(m: ModelParams) -> Result<PhasePoint> {
    if m.is_classical() {
        Ok(PhasePoint::ORIGIN)
    } else {
        Ok(primary_equilibrium(m)?.point)
    }
}

fn wrap(angle: f64) -> f64 {
    angle - 2.0 * PI * (angle / (2.0 * PI)).round()
}

fn polar_angle(p: PhasePoint, center: PhasePoint) -> f64 {
    (p.k - center.k).atan2(p.x - center.x)
}

/// Time for the trajectory from `start` to sweep one full turn about `center`.
///
/// Steps with `h` until the unwrapped polar angle reaches `±2π`, then locates
/// the crossing inside the last step by bisection on the RK4 sub-step length.
pub fn first_return_period(
    start: PhasePoint,
    m: ModelParams,
    center: PhasePoint,
    h: f64,
) -> Result<f64> {
    check_step(h)?;
    if start.distance(&center) == 0.0 {
        return Err(Error::InvalidParameter(
            "start coincides with the orbit centre".into(),
        ));
    }
    // slowest small orbits of the linearization have period 2π / min(1, √a)
    let t_max = 200.0 * PI / m.a.sqrt().min(1.0);
    let max_steps = (t_max / h).ceil() as usize;
    let mut p = start;
    let mut turned = 0.0;
    for n in 0..max_steps {
        let q = rk4_step(p, m, h)?;
        if out_of_bounds(q) {
            return Err(Error::Diverged(n + 1));
        }
        let increment = wrap(polar_angle(q, center) - polar_angle(p, center));
        if (turned + increment).abs() >= 2.0 * PI {
            let target = 2.0 * PI * (turned + increment).signum();
            let theta_p = polar_angle(p, center);
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let s = rk4_step(p, m, mid)?;
                let swept = turned + wrap(polar_angle(s, center) - theta_p);
                if (swept - target) * target.signum() < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(n as f64 * h + 0.5 * (lo + hi));
        }
        turned += increment;
        p = q;
    }
    Err(Error::NoReturn(t_max))
}

/// Stroboscopic samples of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareSection {
    pub stride_time: f64,
    /// Measured first-return period the stride derives from.
    pub period: f64,
    /// Centre the period was measured about.
    pub center: PhasePoint,
    /// `points[i]` is the state at time `i · stride_time`, starting with the
    /// start point itself.
    pub points: Vec<PhasePoint>,
    pub diverged: bool,
}

impl PoincareSection {
    /// Distances `|p_i - centre|`.
    pub fn radii(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| p.distance(&self.center))
            .collect()
    }
}

/// Quarter-period Poincaré section with `4 n_returns` points.
///
/// The period is the measured first-return time of the orbit through `start`
/// rather than the linearized `2π/√a`: at the customary start radius 0.3 the
/// amplitude dependence already moves the section by more than `1e-2` per turn.
/// The RK4 step is shrunk below [`POINCARE_MAX_STEP`] so that the stride is an
/// exact multiple of it and no interpolation is needed.
pub fn poincare(start: PhasePoint, m: ModelParams, n_returns: usize) -> Result<PoincareSection> {
    m.validate()?;
    if n_returns == 0 {
        return Err(Error::InvalidParameter(
            "n_returns must be at least 1".into(),
        ));
    }
    let center = orbit_center(m)?;
    let period = first_return_period(start, m, center, POINCARE_MAX_STEP)?;
    let stride_time = 0.25 * period;
    let substeps = (stride_time / POINCARE_MAX_STEP).ceil() as usize;
    let h = stride_time / substeps as f64;
    let total = 4 * n_returns;
    let mut points = Vec::with_capacity(total);
    points.push(start);
    let mut p = start;
    let mut diverged = false;
    'outer: for _ in 1..total {
        for _ in 0..substeps {
            p = rk4_step(p, m, h)?;
            if out_of_bounds(p) {
                diverged = true;
                break 'outer;
            }
        }
        points.push(p);
    }
    Ok(PoincareSection {
        stride_time,
        period,
        center,
        points,
        diverged,
    })
}

/// Polyline of the classical orbit through `start`, one period at step `h`.
pub fn classical_orbit(start: PhasePoint, a: f64, h: f64) -> Result<Vec<PhasePoint>> {
    let m = ModelParams::classical(a)?;
    let period = first_return_period(start, m, PhasePoint::ORIGIN, h)?;
    let mut orbit = integrate(start, m, h, period)?
        .samples
        .into_iter()
        .map(|s| s.point)
        .collect::<Vec<_>>();
    orbit.push(start);
    Ok(orbit)
}

/// Euclidean distance from `p` to a polyline.
pub fn distance_to_polyline(p: PhasePoint, line: &[PhasePoint]) -> f64 {
    if line.len() == 1 {
        return p.distance(&line[0]);
    }
    line.windows(2)
        .map(|seg| {
            let (a, b) = (seg[0], seg[1]);
            let (dx, dk) = (b.x - a.x, b.k - a.k);
            let len2 = dx * dx + dk * dk;
            let t = if len2 > 0.0 {
                (((p.x - a.x) * dx + (p.k - a.k) * dk) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            p.distance(&PhasePoint::new(a.x + t * dx, a.k + t * dk))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Forward-Euler step of the discrete map.
pub fn discrete_step(p: PhasePoint, m: ModelParams, eps: f64) -> Result<PhasePoint> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let w = field(p, m)?;
    let q = PhasePoint::new(p.x + eps * w[0], p.k + eps * w[1]);
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Error::Diverged(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationParam {
    A,
    Alpha,
}

/// Discrete-map scan protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub param: BifurcationParam,
    pub range: (f64, f64),
    /// Number of parameter values, endpoints included.
    pub resolution: usize,
    /// Parameters held fixed; the scanned one is overwritten.
    pub base: ModelParams,
    pub eps: f64,
    pub n_total: usize,
    pub n_discard: usize,
    pub record_count: usize,
    pub start: PhasePoint,
}

pub const DEFAULT_N_TOTAL: usize = 500_000;
pub const DEFAULT_RECORD_COUNT: usize = 200;
pub const DEFAULT_START: PhasePoint = PhasePoint::new(0.3, 0.0);
/// `1/5000`, the a-scan discretization.
pub const DEFAULT_EPS_A: f64 = 2e-4;
pub const DEFAULT_EPS_ALPHA: f64 = 5e-4;

impl ScanConfig {
    /// Classical scan over `a` with the default recording protocol.
    pub fn a_scan(range: (f64, f64), resolution: usize) -> Self {
        Self {
            param: BifurcationParam::A,
            range,
            resolution,
            base: ModelParams { a: 1.0, alpha: 0.0 },
            eps: DEFAULT_EPS_A,
            n_total: DEFAULT_N_TOTAL,
            n_discard: DEFAULT_N_TOTAL - DEFAULT_RECORD_COUNT,
            record_count: DEFAULT_RECORD_COUNT,
            start: DEFAULT_START,
        }
    }

    /// Scan over `α` at fixed `a` with the default recording protocol.
    pub fn alpha_scan(a: f64, range: (f64, f64), resolution: usize) -> Self {
        Self {
            param: BifurcationParam::Alpha,
            base: ModelParams { a, alpha: 0.0 },
            eps: DEFAULT_EPS_ALPHA,
            ..Self::a_scan(range, resolution)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let (lo, hi) = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("bad parameter range [{lo}, {hi}]"));
        }
        if self.resolution == 0 || (self.resolution == 1 && lo != hi) {
            return bad("resolution must be at least 2 for a non-degenerate range".into());
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.n_discard >= self.n_total {
            return bad(format!(
                "n_discard {} must be below n_total {}",
                self.n_discard, self.n_total
            ));
        }
        if self.record_count == 0 || self.record_count > self.n_total - self.n_discard {
            return bad(format!(
                "record_count {} must lie in 1..={}",
                self.record_count,
                self.n_total - self.n_discard
            ));
        }
        if !self.start.is_finite() {
            return bad("start point must be finite".into());
        }
        for v in [lo, hi] {
            self.params_at(v).validate()?;
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        if self.resolution == 1 {
            return vec![lo];
        }
        let n = self.resolution - 1;
        (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect()
    }

    pub fn params_at(&self, value: f64) -> ModelParams {
        match self.param {
            BifurcationParam::A => self.base.with_a(value),
            BifurcationParam::Alpha => self.base.with_alpha(value),
        }
    }
}

/// Recorded tail of one discrete-map run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationRecord {
    pub param_value: f64,
    /// Last `record_count` iterates; empty when the run diverged.
    pub attractor_x: Vec<f64>,
    pub attractor_k: Vec<f64>,
    pub diverged: bool,
}

impl BifurcationRecord {
    /// Predator populations `z = e^{-k}` of the recorded states.
    pub fn attractor_z(&self) -> Vec<f64> {
        self.attractor_k.iter().map(|k| (-k).exp()).collect()
    }
}

/// Iterates the discrete map `n_total` times and keeps the last `record_count` states.
pub fn iterate_record(m: ModelParams, cfg: &ScanConfig, param_value: f64) -> BifurcationRecord {
    let mut xs = Vec::with_capacity(cfg.record_count);
    let mut ks = Vec::with_capacity(cfg.record_count);
    let first_recorded = cfg.n_total - cfg.record_count + 1;
    let mut p = cfg.start;
    for n in 1..=cfg.n_total {
        match discrete_step(p, m, cfg.eps) {
            Ok(q) if !out_of_bounds(q) => p = q,
            _ => {
                return BifurcationRecord {
                    param_value,
                    attractor_x: vec![],
                    attractor_k: vec![],
                    diverged: true,
                };
            }
        }
        if n >= first_recorded {
            xs.push(p.x);
            ks.push(p.k);
        }
    }
    BifurcationRecord {
        param_value,
        attractor_x: xs,
        attractor_k: ks,
        diverged: false,
    }
}

/// Runs the scan, parallel over parameter values, in parameter order.
pub fn bifurcation_scan(cfg: &ScanConfig) -> Result<Vec<BifurcationRecord>> {
    cfg.validate()?;
    Ok(cfg
        .values()
        .into_par_iter()
        .map(|v| iterate_record(cfg.params_at(v), cfg, v))
        .collect())
}

/// Gap separating clusters of recorded values.
pub const CLUSTER_GAP: f64 = 0.01;

/// Number of groups left after merging sorted values closer than `gap`.
pub fn cluster_count(values: &[f64], gap: f64) -> usize {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return 0;
    }
    sorted.sort_by(f64::total_cmp);
    1 + sorted.windows(2).filter(|w| w[1] - w[0] > gap).count()
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Interquartile range, the disorder metric of a recorded set.
pub fn interquartile_range(values: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return f64::NAN;
    }
    sorted.sort_by(f64::total_cmp);
    quantile(&sorted, 0.75) - quantile(&sorted, 0.25)
}
