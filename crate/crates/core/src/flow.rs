//! Wigner currents, quantum velocity and divergence fields of the Gaussian
//! ensemble.
//!
//! For a separable Hamiltonian `H = K(k) + V(x)` the Wigner currents are the
//! series
//!
//! ```text
//! J_x = + Σ_η (-1)^η / (4^η (2η+1)!) ∂_k^{2η+1} K(k) ∂_x^{2η} W
//! J_k = - Σ_η (-1)^η / (4^η (2η+1)!) ∂_x^{2η+1} V(x) ∂_k^{2η} W
//! ```
//!
//! with `∂_k^{2η+1} K = δ_{η0} - e^{-k}` and `∂_x^{2η+1} V = a (δ_{η0} - e^{-x})`.
//! Substituting the Gaussian ensemble `G_α`, whose derivatives are Hermite
//! polynomials, the sums resum to closed forms for `∂_x J_x` and `∂_k J_k`
//! and to error-function expressions for the velocity `w = J / G`.
//! Truncating at `η = 0` gives classical Liouvillian transport `J = v G`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{classical_velocity, gaussian_unchecked, ModelParams, PhasePoint};
use crate::special::{adaptive_sum, scaled_erf_difference, AdaptiveSum, ScaledHermite};
use crate::{Error, Result};

/// Largest tolerated imaginary residue of a velocity component.
pub const IMAG_RESIDUE_TOL: f64 = 1e-11;

/// Axis-aligned rectangle of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl Region {
    pub const fn new(x_min: f64, x_max: f64, k_min: f64, k_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            k_min,
            k_max,
        }
    }

    /// Square `[-h, h]²`.
    pub const fn square(half_width: f64) -> Self {
        Self::new(-half_width, half_width, -half_width, half_width)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.k_min, self.k_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x_min >= self.x_max || self.k_min >= self.k_max {
            return Err(Error::InvalidParameter(format!(
                "empty or inverted region {self:?}"
            )));
        }
        Ok(())
    }

    pub fn contains(&self, p: PhasePoint) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.k >= self.k_min && p.k <= self.k_max
    }

    /// Lattice coordinates `(x_i, k_j)` for `n` points per axis, endpoints included.
    pub(crate) fn lattice(&self, nx: usize, nk: usize) -> (Vec<f64>, Vec<f64>) {
        let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        };
        (
            axis(self.x_min, self.x_max, nx),
            axis(self.k_min, self.k_max, nk),
        )
    }
}

/// Truncation of the current series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Highest η kept; `0` is the classical Liouvillian regime. Ignored when adaptive.
    pub eta_max: usize,
    /// Sum until the terms fall below the relative stopping threshold.
    pub adaptive: bool,
}

impl SeriesConfig {
    pub const fn fixed(eta_max: usize) -> Self {
        Self {
            eta_max,
            adaptive: false,
        }
    }

    pub const fn adaptive() -> Self {
        Self {
            eta_max: 0,
            adaptive: true,
        }
    }
}

/// Field values at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub point: PhasePoint,
    /// Gaussian ensemble value `G_α`.
    pub wigner: f64,
    /// `(J_x, J_k)`.
    pub current: [f64; 2],
    /// `(w_x, w_k)`.
    pub velocity: [f64; 2],
    /// Stationarity quantifier `∇·J`.
    pub div_j: f64,
    /// Liouvillianity quantifier `∇·w`.
    pub div_w: f64,
}

/// Quantum velocity with the imaginary residues left over by the complex formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityEval {
    pub w: (f64, f64),
    /// `|Im w_x|, |Im w_k|` before they were dropped.
    pub residue: (f64, f64),
}

/// One component `1 - (i√π / 2α) e^{-other} e^{α²χ²} {erf[α(χ - i/2)] - erf[α(χ + i/2)]}`.
fn velocity_factor(alpha: f64, chi: f64, other: f64) -> Result<Complex64> {
    let d = scaled_erf_difference(alpha, chi)?;
    let c = PI.sqrt() / (2.0 * alpha) * (-other).exp();
    Ok(Complex64::new(1.0, 0.0) - Complex64::new(0.0, c) * d)
}

/// Quantum velocity and the imaginary residues of its complex evaluation.
pub fn velocity_eval(p: PhasePoint, m: ModelParams) -> Result<VelocityEval> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite point {p:?}")));
    }
    if m.is_classical() {
        return Ok(VelocityEval {
            w: classical_velocity(p, m),
            residue: (0.0, 0.0),
        });
    }
    let wx = velocity_factor(m.alpha, p.x, p.k)?;
    let wk = -m.a * velocity_factor(m.alpha, p.k, p.x)?;
    Ok(VelocityEval {
        w: (wx.re, wk.re),
        residue: (wx.im.abs(), wk.im.abs()),
    })
}

/// Quantum velocity `w = J / G`; the classical field when `alpha == 0`.
///
/// Fails with [`Error::ImaginaryResidue`] when the conjugate error-function
/// pair does not cancel to within [`IMAG_RESIDUE_TOL`] (relative to the
/// component size when that exceeds one).
pub fn velocity(p: PhasePoint, m: ModelParams) -> Result<(f64, f64)> {
    let v = velocity_eval(p, m)?;
    let tol_x = IMAG_RESIDUE_TOL * v.w.0.abs().max(1.0);
    let tol_k = IMAG_RESIDUE_TOL * v.w.1.abs().max(m.a);
    if v.residue.0 > tol_x || v.residue.1 > tol_k {
        return Err(Error::ImaginaryResidue {
            x: p.x,
            k: p.k,
            residue: v.residue.0.max(v.residue.1),
        });
    }
    Ok(v.w)
}

/// Brackets `(B_x, B_k)` with `∂_x J_x = B_x G` and `∂_k J_k = B_k G`:
/// `B_x = -2[α²x - sin(α²x) e^{α²/4 - k}]`, `B_k = 2a[α²k - sin(α²k) e^{α²/4 - x}]`.
fn closed_brackets(p: PhasePoint, m: ModelParams) -> (f64, f64) {
    let a2 = m.alpha * m.alpha;
    let bx = -2.0 * (a2 * p.x - (a2 * p.x).sin() * (0.25 * a2 - p.k).exp());
    let bk = 2.0 * m.a * (a2 * p.k - (a2 * p.k).sin() * (0.25 * a2 - p.x).exp());
    (bx, bk)
}

/// Closed forms of `(∂_x J_x, ∂_k J_k)` for the Gaussian ensemble.
pub fn current_derivatives_closed(p: PhasePoint, m: ModelParams) -> Result<(f64, f64)> {
    m.require_ensemble()?;
    let g = gaussian_unchecked(p, m.alpha);
    let (bx, bk) = closed_brackets(p, m);
    Ok((bx * g, bk * g))
}

/// Currents and their derivatives from the truncated η-series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCurrents {
    /// `(J_x, J_k)`.
    pub current: (f64, f64),
    /// `(∂_x J_x, ∂_k J_k)`.
    pub derivatives: (f64, f64),
    /// Largest η actually used across the four sums.
    pub eta_used: usize,
}

/// The two Hermite sums carried by one coordinate `χ`:
///
/// * `even = Σ_η (-1)^η H_{2η}(αχ) (α/2)^{2η} / (2η+1)!`, from `∂_χ^{2η} G / G`,
/// * `odd  = Σ_η (-1)^η H_{2η+1}(αχ) (α/2)^{2η+1} / (2η+1)!`, from `∂_χ^{2η+1} G / G`,
///
/// both including the `(-1)^η / 4^η` series coefficient. Terms come from the
/// scaled recurrence for `H_n(u) t^n / n!`.
fn hermite_sums(alpha: f64, chi: f64, cfg: SeriesConfig) -> Result<(AdaptiveSum, AdaptiveSum)> {
    let terms = || ScaledHermite::new(alpha * chi, 0.5 * alpha);
    let sign = |eta: usize| if eta.is_multiple_of(2) { 1.0 } else { -1.0 };
    let even = terms()
        .step_by(2)
        .enumerate()
        .map(move |(eta, q)| sign(eta) * q / (2 * eta + 1) as f64);
    let odd = terms()
        .skip(1)
        .step_by(2)
        .enumerate()
        .map(move |(eta, q)| sign(eta) * q);
    if cfg.adaptive {
        Ok((adaptive_sum(even)?, adaptive_sum(odd)?))
    } else {
        let n = cfg.eta_max + 1;
        Ok((
            AdaptiveSum {
                value: even.take(n).sum(),
                eta_max: cfg.eta_max,
            },
            AdaptiveSum {
                value: odd.take(n).sum(),
                eta_max: cfg.eta_max,
            },
        ))
    }
}

/// Term-by-term evaluation of the current series on the Gaussian ensemble.
///
/// This is independent of the resummed closed forms and serves as their oracle.
/// With `eta_max = 0` it reproduces `J = v G`.
pub fn current_series(p: PhasePoint, m: ModelParams, cfg: SeriesConfig) -> Result<SeriesCurrents> {
    m.require_ensemble()?;
    let g = gaussian_unchecked(p, m.alpha);
    let a2 = m.alpha * m.alpha;
    let (ex, ox) = hermite_sums(m.alpha, p.x, cfg)?;
    let (ek, ok) = hermite_sums(m.alpha, p.k, cfg)?;

    // kinetic part ∂_k^{2η+1} K: the δ_{η0} piece only survives the η = 0 term
    let decay_k = (-p.k).exp();
    let decay_x = (-p.x).exp();
    let jx = (1.0 - decay_k * ex.value) * g;
    let jk = -m.a * (1.0 - decay_x * ek.value) * g;
    // ∂_x^{2η+1} G / G = -α^{2η+1} H_{2η+1}(αx); the δ piece gives -2α²x
    let djx = (-2.0 * a2 * p.x + 2.0 * decay_k * ox.value) * g;
    let djk = 2.0 * m.a * (a2 * p.k - decay_x * ok.value) * g;

    Ok(SeriesCurrents {
        current: (jx, jk),
        derivatives: (djx, djk),
        eta_used: ex.eta_max.max(ox.eta_max).max(ek.eta_max).max(ok.eta_max),
    })
}

/// Stationarity quantifier `∇·J = ∂_x J_x + ∂_k J_k` (minus the local rate of
/// change of the Wigner function).
pub fn divergence_j(p: PhasePoint, m: ModelParams) -> Result<f64> {
    let (dx, dk) = current_derivatives_closed(p, m)?;
    Ok(dx + dk)
}

/// Liouvillianity quantifier `∇·w = (∇·J)/G + 2α² (x w_x + k w_k)`.
///
/// Uses `∇·J = G ∇·w + w·∇G` with `∇G = -2α² (x, k) G`; the ratio `(∇·J)/G`
/// is formed from the closed-form brackets, so nothing is divided by a
/// vanishing Gaussian tail.
pub fn divergence_w(p: PhasePoint, m: ModelParams) -> Result<f64> {
    m.require_ensemble()?;
    let (bx, bk) = closed_brackets(p, m);
    let (wx, wk) = velocity(p, m)?;
    Ok(bx + bk + 2.0 * m.alpha * m.alpha * (p.x * wx + p.k * wk))
}

/// Every field at one point.
pub fn sample(p: PhasePoint, m: ModelParams) -> Result<FlowSample> {
    m.require_ensemble()?;
    let g = gaussian_unchecked(p, m.alpha);
    let (bx, bk) = closed_brackets(p, m);
    let (wx, wk) = velocity(p, m)?;
    Ok(FlowSample {
        point: p,
        wigner: g,
        current: [wx * g, wk * g],
        velocity: [wx, wk],
        div_j: (bx + bk) * g,
        div_w: bx + bk + 2.0 * m.alpha * m.alpha * (p.x * wx + p.k * wk),
    })
}

/// Row-major lattice of samples: `k` indexes rows, `x` columns, both ascending.
pub fn sample_grid(
    region: Region,
    resolution: (usize, usize),
    m: ModelParams,
) -> Result<Vec<FlowSample>> {
    region.validate()?;
    m.validate()?;
    m.require_ensemble()?;
    let (nx, nk) = resolution;
    if nx < 2 || nk < 2 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be at least 2 per axis, got {nx}x{nk}"
        )));
    }
    let (xs, ks) = region.lattice(nx, nk);
    (0..nx * nk)
        .into_par_iter()
        .map(|idx| sample(PhasePoint::new(xs[idx % nx], ks[idx / nx]), m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::erfi;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn params(a: f64, alpha: f64) -> ModelParams {
        ModelParams::new(a, alpha).unwrap()
    }

    fn pt(x: f64, k: f64) -> PhasePoint {
        PhasePoint::new(x, k)
    }

    #[test]
    fn velocity_at_origin_shows_displaced_equilibrium() {
        let (wx, wk) = velocity(PhasePoint::ORIGIN, params(1.0, 1.0)).unwrap();
        let expected = 1.0 - PI.sqrt() * erfi(0.5).unwrap();
        assert!((wx - expected).abs() < 1e-14);
        assert!((wk + expected).abs() < 1e-14);
        assert!((wx + 0.0900).abs() < 1e-4);
    }

    #[test]
    fn classical_flag_routes_to_classical_field() {
        let m = params(2.0, 0.0);
        let p = pt(0.4, -0.7);
        assert_eq!(velocity(p, m).unwrap(), classical_velocity(p, m));
        assert!(current_derivatives_closed(p, m).is_err());
        assert!(divergence_w(p, m).is_err());
    }

    #[test]
    fn near_classical_velocity_matches_classical_field() {
        let m = params(1.0, 1e-3);
        for i in 0..=30 {
            for j in 0..=30 {
                let p = pt(-1.5 + 0.1 * i as f64, -1.5 + 0.1 * j as f64);
                let (wx, wk) = velocity(p, m).unwrap();
                let (vx, vk) = classical_velocity(p, m);
                assert!((wx - vx).abs() < 1e-5 && (wk - vk).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn exchange_symmetry() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a = rng.gen_range(0.1..5.0);
            let alpha = rng.gen_range(0.01..3.2);
            let (x, k) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let (_, wk) = velocity(pt(x, k), params(a, alpha)).unwrap();
            let (wx_swapped, _) = velocity(pt(k, x), params(1.0, alpha)).unwrap();
            assert!((wk + a * wx_swapped).abs() <= 1e-13 * wk.abs().max(1.0));
        }
    }

    #[test]
    fn residues_stay_below_tolerance() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..5_000 {
            let alpha = rng.gen_range(1e-3..9.0);
            let (x, k) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let v = velocity_eval(pt(x, k), params(1.0, alpha)).unwrap();
            assert!(
                v.residue.0 < 1e-11 * v.w.0.abs().max(1.0),
                "{alpha} {x} {k}: {v:?}"
            );
            assert!(
                v.residue.1 < 1e-11 * v.w.1.abs().max(1.0),
                "{alpha} {x} {k}: {v:?}"
            );
        }
    }

    #[test]
    fn closed_derivatives_examples() {
        for (a, alpha) in [(1.0, 1.0), (4.0, 0.3), (0.25, 3.0)] {
            assert_eq!(
                current_derivatives_closed(PhasePoint::ORIGIN, params(a, alpha)).unwrap(),
                (0.0, 0.0)
            );
        }
        let (djx, _) = current_derivatives_closed(pt(1.0, 0.0), params(1.0, 1.0)).unwrap();
        let direct = -2.0 * (1.0 - 1f64.sin() * 0.25f64.exp()) * (-1f64).exp() / PI;
        assert!((djx - direct).abs() < 1e-16);
        assert!((djx - 1.885e-2).abs() < 1e-5);
        let (_, djk) = current_derivatives_closed(pt(0.0, 1.0), params(2.0, 1.0)).unwrap();
        // mirror x <-> k carries the factor -a
        assert!((djk + 2.0 * djx).abs() < 1e-15 * djx.abs());
    }

    #[test]
    fn series_truncated_at_zero_is_classical_transport() {
        for (a, alpha) in [(1.0, 1.0), (4.0, 2.0), (0.25, 0.5)] {
            let m = params(a, alpha);
            for p in [pt(0.3, -0.2), pt(-1.0, 1.2), pt(1.4, 0.9)] {
                let s = current_series(p, m, SeriesConfig::fixed(0)).unwrap();
                let g = gaussian_unchecked(p, alpha);
                let (vx, vk) = classical_velocity(p, m);
                assert!((s.current.0 - vx * g).abs() < 1e-15);
                assert!((s.current.1 - vk * g).abs() < 1e-15);
                let a2 = alpha * alpha;
                assert!((s.derivatives.0 - vx * (-2.0 * a2 * p.x) * g).abs() < 1e-14);
                assert!((s.derivatives.1 - vk * (-2.0 * a2 * p.k) * g).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn series_matches_closed_form() {
        let m = params(1.0, 1.0);
        let p = pt(1.0, 0.0);
        let s = current_series(p, m, SeriesConfig::adaptive()).unwrap();
        let (djx, djk) = current_derivatives_closed(p, m).unwrap();
        assert!(((s.derivatives.0 - djx) / djx).abs() < 1e-10);
        assert!((s.derivatives.1 - djk).abs() < 1e-16);

        let m = params(4.0, 3.0);
        let p = pt(0.5, -0.5);
        let s = current_series(p, m, SeriesConfig::adaptive()).unwrap();
        let (djx, djk) = current_derivatives_closed(p, m).unwrap();
        assert!(((s.derivatives.0 - djx) / djx).abs() < 1e-9);
        assert!(((s.derivatives.1 - djk) / djk).abs() < 1e-9);
    }

    #[test]
    fn series_currents_match_velocity_times_gaussian() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..500 {
            let m = params(rng.gen_range(0.25..4.0), rng.gen_range(0.05..3.2));
            let p = pt(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let s = current_series(p, m, SeriesConfig::adaptive()).unwrap();
            let f = sample(p, m).unwrap();
            let scale = f.wigner * m.a.max(1.0) * 10.0;
            assert!(
                (s.current.0 - f.current[0]).abs() < 1e-9 * scale,
                "{m:?} {p:?}"
            );
            assert!(
                (s.current.1 - f.current[1]).abs() < 1e-9 * scale,
                "{m:?} {p:?}"
            );
        }
    }

    #[test]
    fn divergence_j_examples() {
        assert_eq!(
            divergence_j(PhasePoint::ORIGIN, params(1.0, 1.0)).unwrap(),
            0.0
        );
        assert_eq!(divergence_j(pt(1.0, 1.0), params(1.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn divergence_j_matches_finite_differences() {
        let m = params(1.0, 2.0);
        let mut rng = StdRng::seed_from_u64(5);
        let h = 1e-5;
        let j = |x: f64, k: f64| {
            let f = sample(pt(x, k), m).unwrap();
            f.current
        };
        for _ in 0..200 {
            let (x, k) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let fd = (j(x + h, k)[0] - j(x - h, k)[0]) / (2.0 * h)
                + (j(x, k + h)[1] - j(x, k - h)[1]) / (2.0 * h);
            assert!((divergence_j(pt(x, k), m).unwrap() - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn divergence_w_near_classical_limit_vanishes() {
        let m = params(1.0, 1e-3);
        for p in [pt(0.0, 0.0), pt(1.2, -0.4), pt(-1.5, 1.5), pt(0.7, 0.7)] {
            assert!(divergence_w(p, m).unwrap().abs() < 1e-4);
        }
    }

    #[test]
    fn divergence_w_on_isotropic_diagonal() {
        for alpha in [0.5, 1.0, 2.5] {
            let m = params(1.0, alpha);
            for x in [-1.0, -0.2, 0.3, 1.1] {
                let p = pt(x, x);
                let (wx, wk) = velocity(p, m).unwrap();
                let expected = 2.0 * alpha * alpha * x * (wx + wk);
                assert!(
                    (divergence_w(p, m).unwrap() - expected).abs()
                        < 1e-13 * expected.abs().max(1.0)
                );
            }
        }
    }

    #[test]
    fn divergence_w_matches_velocity_jacobian_trace() {
        let m = params(1.0, 1.0);
        let h = 1e-5;
        let w = |x: f64, k: f64| velocity(pt(x, k), m).unwrap();
        let trace =
            (w(h, 0.0).0 - w(-h, 0.0).0) / (2.0 * h) + (w(0.0, h).1 - w(0.0, -h).1) / (2.0 * h);
        assert!((divergence_w(PhasePoint::ORIGIN, m).unwrap() - trace).abs() < 1e-6);
    }

    #[test]
    fn grid_layout_and_invariant() {
        let m = params(1.0, 1.0);
        let g = sample_grid(Region::square(1.0), (2, 2), m).unwrap();
        let corners: Vec<_> = g.iter().map(|s| (s.point.x, s.point.k)).collect();
        assert_eq!(
            corners,
            vec![(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
        );
        let g = sample_grid(Region::square(1.5), (31, 17), params(2.0, 2.2)).unwrap();
        assert_eq!(g.len(), 31 * 17);
        for s in &g {
            for c in 0..2 {
                let expected = s.velocity[c] * s.wigner;
                assert!((s.current[c] - expected).abs() <= 1e-10 * expected.abs());
            }
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        let m = params(1.0, 1.0);
        assert!(sample_grid(Region::new(1.0, -1.0, 0.0, 1.0), (3, 3), m).is_err());
        assert!(sample_grid(Region::new(0.0, 0.0, 0.0, 1.0), (3, 3), m).is_err());
        assert!(sample_grid(Region::square(1.0), (1, 3), m).is_err());
        assert!(sample_grid(Region::square(1.0), (3, 3), params(1.0, 0.0)).is_err());
    }

    #[test]
    fn current_reverses_across_velocity_zero_contour() {
        // Along each row, a sign change of w_x is a sign change of J_x (G > 0).
        let m = params(1.0, 2.0);
        let g = sample_grid(Region::square(1.5), (61, 61), m).unwrap();
        let mut crossings = 0;
        for row in g.chunks(61) {
            for pair in row.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                if a.velocity[0].signum() != b.velocity[0].signum() {
                    crossings += 1;
                    assert_ne!(a.current[0].signum(), b.current[0].signum());
                }
            }
        }
        assert!(crossings > 0);
    }
}
