//! Lotka-Volterra Hamiltonian, classical flow and the Gaussian ensemble.
//!
//! Phase space is the dimensionless `(x, k)` plane, with prey and predator
//! populations recovered as `y = e^{-x}` and `z = e^{-k}`. The Hamiltonian is
//! separable, `H = K(k) + V(x)` with `K(k) = k + e^{-k}` and
//! `V(x) = a (x + e^{-x})`, and the classical velocity is
//! `(∂_k H, -∂_x H) = (1 - e^{-k}, a (e^{-x} - 1))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::integrate_square;
use crate::{Error, Result};

/// Model parameters shared by every field evaluation.
///
/// `alpha == 0` is the classical flag: velocity and flow queries route to the
/// classical field and nothing divides by `alpha`. Quantities that need an
/// actual distribution (the Gaussian itself, currents, divergences) reject it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Anisotropy between the two species, `a > 0`.
    pub a: f64,
    /// Gaussian localization parameter, `alpha >= 0`.
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        let m = Self { a, alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn classical(a: f64) -> Result<Self> {
        Self::new(a, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "a must be positive, got {}",
                self.a
            )));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be non-negative, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn is_classical(&self) -> bool {
        self.alpha == 0.0
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn with_a(self, a: f64) -> Self {
        Self { a, ..self }
    }

    pub(crate) fn require_ensemble(&self) -> Result<()> {
        if self.alpha > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "alpha = 0 is the classical flag, not a distribution".into(),
            ))
        }
    }
}

/// A point of the dimensionless phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    /// Log-prey coordinate.
    pub x: f64,
    /// Log-predator coordinate.
    pub k: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, k: 0.0 };

    pub const fn new(x: f64, k: f64) -> Self {
        Self { x, k }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.k.is_finite()
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        (self.x - other.x).hypot(self.k - other.k)
    }

    /// Species image `(y, z) = (e^{-x}, e^{-k})`.
    pub fn species(&self) -> (f64, f64) {
        species_map(*self)
    }
}

/// Value of the Hamiltonian, the constant `ε` labelling a classical orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyValue {
    pub epsilon: f64,
}

/// `H(x, k) = a x + k + a e^{-x} + e^{-k}`.
pub fn hamiltonian(p: PhasePoint, m: ModelParams) -> EnergyValue {
    EnergyValue {
        epsilon: m.a * p.x + p.k + m.a * (-p.x).exp() + (-p.k).exp(),
    }
}

/// Classical Hamiltonian velocity `(∂_k H, -∂_x H)`.
pub fn classical_velocity(p: PhasePoint, m: ModelParams) -> (f64, f64) {
    // exp_m1 keeps full relative accuracy next to the equilibrium
    (-(-p.k).exp_m1(), m.a * (-p.x).exp_m1())
}

/// Isotropic Gaussian ensemble `G_α = (α²/π) exp[-α² (x² + k²)]`.
pub fn gaussian_ensemble(p: PhasePoint, m: ModelParams) -> Result<f64> {
    m.require_ensemble()?;
    Ok(gaussian_unchecked(p, m.alpha))
}

#[inline]
pub(crate) fn gaussian_unchecked(p: PhasePoint, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    a2 / PI * (-a2 * (p.x * p.x + p.k * p.k)).exp()
}

/// Prey and predator populations `(y, z) = (e^{-x}, e^{-k})`.
pub fn species_map(p: PhasePoint) -> (f64, f64) {
    ((-p.x).exp(), (-p.k).exp())
}

/// Inverse of [`species_map`] on the open positive quadrant.
pub fn from_species(y: f64, z: f64) -> Result<PhasePoint> {
    if !(y > 0.0 && z > 0.0 && y.is_finite() && z.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "populations must be positive and finite, got ({y}, {z})"
        )));
    }
    Ok(PhasePoint::new(-y.ln(), -z.ln()))
}

/// Nodes per axis for the purity quadrature.
pub const PURITY_NODES: usize = 240;

/// Quadrature half-width of the integration box, in units of `1/α`.
pub const PURITY_HALF_WIDTH: f64 = 8.0;

/// Purity `2π ∬ G_α² dx dk` by tensor-product Gauss-Legendre quadrature on
/// the box `|x|, |k| <= 8/α`. The closed form is `α²`; values above one mark
/// an ensemble that cannot come from a pure state.
pub fn purity(m: ModelParams) -> Result<f64> {
    m.require_ensemble()?;
    let half = PURITY_HALF_WIDTH / m.alpha;
    let integral = integrate_square(
        |x, k| {
            let g = gaussian_unchecked(PhasePoint::new(x, k), m.alpha);
            g * g
        },
        -half,
        half,
        PURITY_NODES,
    );
    Ok(2.0 * PI * integral)
}

/// `∬ G_α dx dk` over the same box; equals one up to the truncated tails.
pub fn ensemble_normalization(m: ModelParams) -> Result<f64> {
    m.require_ensemble()?;
    let half = PURITY_HALF_WIDTH / m.alpha;
    Ok(integrate_square(
        |x, k| gaussian_unchecked(PhasePoint::new(x, k), m.alpha),
        -half,
        half,
        PURITY_NODES,
    ))
}
