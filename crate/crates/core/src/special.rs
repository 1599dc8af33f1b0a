//! Special functions: complex error function, Hermite polynomials and the
//! odd-Hermite generating-function sum.
//!
//! `erf` is evaluated on the first quadrant and extended by `erf(-z) = -erf(z)`
//! and `erf(z̄) = conj(erf z)`, so both symmetries hold exactly. Inside the
//! quadrant the branch is chosen by position:
//!
//! * Maclaurin series near the origin and close to the imaginary axis,
//! * the `e^{-z²}`-weighted series (positive coefficients) close to the real axis,
//! * `1 - e^{-z²} w(iz)` with the Laplace continued fraction for the Faddeeva
//!   function `w` elsewhere.
//!
//! The accuracy window is `|z| <= 30`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest `|z|` accepted by [`erf_complex`].
pub const ERF_WINDOW: f64 = 30.0;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const SERIES_RTOL: f64 = 0.5 * f64::EPSILON;
const SERIES_MAX_TERMS: usize = 5000;

/// Which evaluation route [`erf_complex`] takes for a first-quadrant argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ErfBranch {
    Maclaurin,
    WeightedSeries,
    ContinuedFraction,
}

pub(crate) fn erf_branch(z: Complex64) -> ErfBranch {
    let (x, y) = (z.re.abs(), z.im.abs());
    let r = z.norm();
    if r <= 2.5 || x <= 1.5 {
        ErfBranch::Maclaurin
    } else if y <= 1.0 && r <= 6.0 {
        ErfBranch::WeightedSeries
    } else {
        ErfBranch::ContinuedFraction
    }
}

/// Complex error function, relative accuracy about `1e-13` for `|z| <= 30`
/// (away from the complex zeros, where only absolute accuracy is meaningful).
pub fn erf_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
    }
    if z.norm() > ERF_WINDOW {
        return Err(Error::OutsideAccuracyWindow(z.to_string(), ERF_WINDOW));
    }
    let q = Complex64::new(z.re.abs(), z.im.abs());
    let mut v = erf_first_quadrant(q);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Overflow(format!("erf({z})")));
    }
    // z = ±q or ±q̄: conjugate when exactly one component was reflected
    if (z.re < 0.0) != (z.im < 0.0) {
        v = v.conj();
    }
    if z.re < 0.0 {
        v = -v;
    }
    Ok(v)
}

fn erf_first_quadrant(z: Complex64) -> Complex64 {
    match erf_branch(z) {
        ErfBranch::Maclaurin => erf_maclaurin(z),
        ErfBranch::WeightedSeries => erf_weighted_series(z),
        ErfBranch::ContinuedFraction => {
            Complex64::new(1.0, 0.0) - (-z * z).exp() * faddeeva_cf(Complex64::new(-z.im, z.re))
        }
    }
}

/// `erf z = (2/√π) Σ (-1)^n z^{2n+1} / (n! (2n+1))`.
pub(crate) fn erf_maclaurin(z: Complex64) -> Complex64 {
    let mz2 = -z * z;
    let peak = z.norm_sqr();
    let mut term = z;
    let mut sum = z;
    for n in 1..SERIES_MAX_TERMS {
        term *= mz2 / n as f64;
        let contrib = term / (2 * n + 1) as f64;
        sum += contrib;
        if n as f64 > peak && contrib.norm() <= SERIES_RTOL * sum.norm() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

/// `erf z = (2/√π) e^{-z²} Σ 2^n z^{2n+1} / (2n+1)!!`.
pub(crate) fn erf_weighted_series(z: Complex64) -> Complex64 {
    let z2 = 2.0 * z * z;
    let peak = z.norm_sqr();
    let mut term = z;
    let mut sum = z;
    for n in 1..SERIES_MAX_TERMS {
        term *= z2 / (2 * n + 1) as f64;
        sum += term;
        if n as f64 > peak && term.norm() <= SERIES_RTOL * sum.norm() {
            break;
        }
    }
    sum * (-z * z).exp() * FRAC_2_SQRT_PI
}

/// Faddeeva function `w(ζ) = e^{-ζ²} erfc(-iζ)` for `Im ζ > 0` by the Laplace
/// continued fraction `w = (i/√π) / (ζ - ½/(ζ - 1/(ζ - (3/2)/(ζ - …))))`,
/// evaluated with the modified Lentz algorithm.
///
/// Converges quickly for `Im ζ >= 1.5` or `|ζ| >= 6`; callers keep to that region.
pub(crate) fn faddeeva_cf(zeta: Complex64) -> Complex64 {
    const TINY: f64 = 1e-300;
    let tiny = Complex64::new(TINY, 0.0);
    let mut f = zeta;
    if f.norm() == 0.0 {
        f = tiny;
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..20_000 {
        let a = -(n as f64) * 0.5;
        d = zeta + a * d;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = zeta + a / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    Complex64::new(0.0, 1.0 / PI.sqrt()) / f
}

/// Imaginary error function `erfi(y) = -i erf(iy) = (2/√π) Σ y^{2n+1}/(n! (2n+1))`.
///
/// All series terms share the sign of `y`, so there is no cancellation.
pub fn erfi(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite argument {y}")));
    }
    if y.abs() > ERF_WINDOW {
        return Err(Error::OutsideAccuracyWindow(y.to_string(), ERF_WINDOW));
    }
    let y2 = y * y;
    let mut term = y;
    let mut sum = y;
    for n in 1..SERIES_MAX_TERMS {
        term *= y2 / n as f64;
        let contrib = term / (2 * n + 1) as f64;
        sum += contrib;
        if n as f64 > y2 && contrib.abs() <= SERIES_RTOL * sum.abs() {
            break;
        }
    }
    let v = sum * FRAC_2_SQRT_PI;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("erfi({y})")))
    }
}

/// `e^{α²x²} {erf[α(x - i/2)] - erf[α(x + i/2)]}`, the combination that enters
/// the quantum velocity.
///
/// Where `erf` sits close to one, forming the difference first and scaling
/// afterwards loses every significant digit, so for `α²x² - α²/4 > 3` the
/// difference is rebuilt from Faddeeva values:
/// `-e^{α²/4 + iα²x} w(α/2 + iα|x|) + e^{α²/4 - iα²x} w(-α/2 + iα|x|)`.
/// The function is even in `x`. The result is purely imaginary analytically;
/// both halves are computed independently so callers can check the residue.
pub fn scaled_erf_difference(alpha: f64, x: f64) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha.is_finite() && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha}, x = {x}")));
    }
    let x = x.abs();
    let z = Complex64::new(alpha * x, 0.5 * alpha);
    if z.norm() > ERF_WINDOW {
        return Err(Error::OutsideAccuracyWindow(z.to_string(), ERF_WINDOW));
    }
    let a2 = alpha * alpha;
    let v = if a2 * x * x - 0.25 * a2 <= 3.0 {
        let lower = erf_complex(z.conj())?;
        let upper = erf_complex(z)?;
        (lower - upper) * (a2 * x * x).exp()
    } else {
        let phase = a2 * x;
        let w_plus = faddeeva_cf(Complex64::new(0.5 * alpha, alpha * x));
        let w_minus = faddeeva_cf(Complex64::new(-0.5 * alpha, alpha * x));
        let scale = 0.25 * a2;
        -Complex64::new(scale, phase).exp() * w_plus + Complex64::new(scale, -phase).exp() * w_minus
    };
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!(
            "scaled erf difference at alpha={alpha}, x={x}"
        )))
    }
}

/// Physicists' Hermite polynomial `H_n(u)` by the three-term recurrence
/// `H_{n+1} = 2u H_n - 2n H_{n-1}`. Orders up to 400 are supported; large
/// `|u|` overflows to infinity.
pub fn hermite(n: usize, u: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * u;
    for j in 1..n {
        let h2 = 2.0 * u * h1 - 2.0 * j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Scaled Hermite terms `q_n = H_n(u) t^n / n!`, `n = 0, 1, 2, …`.
///
/// Runs the recurrence `q_{n+1} = (2ut q_n - 2t² q_{n-1}) / (n+1)` so that
/// neither `H_n` nor `n!` is formed.
#[derive(Debug, Clone)]
pub struct ScaledHermite {
    two_ut: f64,
    two_t2: f64,
    prev: f64,
    cur: f64,
    n: usize,
}

impl ScaledHermite {
    pub fn new(u: f64, t: f64) -> Self {
        Self {
            two_ut: 2.0 * u * t,
            two_t2: 2.0 * t * t,
            prev: 0.0,
            cur: 1.0,
            n: 0,
        }
    }
}

impl Iterator for ScaledHermite {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let next = (self.two_ut * self.cur - self.two_t2 * self.prev) / (self.n + 1) as f64;
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(out)
    }
}

/// Hard cap on the truncation order of adaptive Hermite sums.
pub const ETA_CAP: usize = 400;

/// Relative stopping threshold of adaptive Hermite sums.
pub const ETA_RTOL: f64 = 1e-14;

/// Partial sum `Σ_{η=0}^{eta_max} H_{2η+1}(u) s^{2η+1} / (2η+1)!`.
pub fn odd_hermite_sum(u: f64, s: f64, eta_max: usize) -> f64 {
    ScaledHermite::new(u, s)
        .skip(1)
        .step_by(2)
        .take(eta_max + 1)
        .sum()
}

/// Closed form of the full odd-Hermite sum, `sinh(2su) e^{-s²}`.
pub fn odd_hermite_closed(u: f64, s: f64) -> f64 {
    (2.0 * s * u).sinh() * (-s * s).exp()
}

/// Value and truncation order reached by an adaptive series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveSum {
    pub value: f64,
    pub eta_max: usize,
}

/// Adaptive version of [`odd_hermite_sum`].
///
/// Stops once two consecutive terms fall below `1e-14` times the largest
/// partial sum seen so far (two, because an isolated term can vanish at a
/// Hermite root). Terms grow before decaying when `s > 1`, hence the cap of 400.
pub fn odd_hermite_sum_adaptive(u: f64, s: f64) -> Result<AdaptiveSum> {
    let signs = std::iter::repeat(1.0);
    adaptive_sum(
        ScaledHermite::new(u, s)
            .skip(1)
            .step_by(2)
            .zip(signs)
            .map(|(q, sg)| q * sg),
    )
}

pub(crate) fn adaptive_sum<I: Iterator<Item = f64>>(terms: I) -> Result<AdaptiveSum> {
    let mut sum = 0.0;
    let mut max_abs = 0.0f64;
    let mut small_run = 0;
    for (eta, term) in terms.take(ETA_CAP + 1).enumerate() {
        sum += term;
        max_abs = max_abs.max(sum.abs());
        if term.abs() <= ETA_RTOL * max_abs {
            small_run += 1;
            if small_run >= 2 {
                return Ok(AdaptiveSum {
                    value: sum,
                    eta_max: eta,
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Truncation(ETA_CAP))
}
