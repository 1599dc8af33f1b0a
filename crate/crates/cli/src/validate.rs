//! Built-in oracle checks behind the `validate` command.

use serde::{Deserialize, Serialize};
use wigner_lv::dynamics::{first_return_period, integrate, DEFAULT_START};
use wigner_lv::flow::{current_derivatives_closed, current_series, velocity, velocity_eval};
use wigner_lv::model::{classical_velocity, ensemble_normalization, hamiltonian, purity};
use wigner_lv::{ModelParams, PhasePoint, SeriesConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Worst deviation observed.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn check(name: &str, value: Result<f64, wigner_lv::Error>, tolerance: f64) -> Check {
    let value = value.unwrap_or(f64::NAN);
    Check {
        name: name.into(),
        value,
        tolerance,
        passed: value < tolerance,
    }
}

fn lattice(n: usize, half: f64) -> impl Iterator<Item = PhasePoint> {
    let step = 2.0 * half / (n - 1) as f64;
    (0..n * n)
        .map(move |i| PhasePoint::new(-half + step * (i % n) as f64, -half + step * (i / n) as f64))
}

fn models() -> impl Iterator<Item = ModelParams> {
    [0.25, 1.0, 4.0].into_iter().flat_map(|a| {
        [0.5, 1.5, 3.2]
            .into_iter()
            .map(move |alpha| ModelParams { a, alpha })
    })
}

fn series_vs_closed() -> Result<f64, wigner_lv::Error> {
    let mut worst: f64 = 0.0;
    for m in models() {
        for p in lattice(7, 1.4) {
            let s = current_series(p, m, SeriesConfig::adaptive())?;
            let (dx, dk) = current_derivatives_closed(p, m)?;
            for (a, b) in [(s.derivatives.0, dx), (s.derivatives.1, dk)] {
                if b != 0.0 {
                    worst = worst.max(((a - b) / b).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn classical_limit() -> Result<f64, wigner_lv::Error> {
    let m = ModelParams {
        a: 1.0,
        alpha: 1e-3,
    };
    let mut sup: f64 = 0.0;
    for p in lattice(101, 1.5) {
        let (wx, wk) = velocity(p, m)?;
        let (vx, vk) = classical_velocity(p, m);
        sup = sup.max((wx - vx).abs()).max((wk - vk).abs());
    }
    Ok(sup)
}

fn imaginary_residue() -> Result<f64, wigner_lv::Error> {
    let mut worst: f64 = 0.0;
    for m in models() {
        for p in lattice(21, 1.5) {
            let v = velocity_eval(p, m)?;
            worst = worst.max(v.residue.0).max(v.residue.1);
        }
    }
    Ok(worst)
}

fn exchange_symmetry() -> Result<f64, wigner_lv::Error> {
    let mut worst: f64 = 0.0;
    for m in models() {
        for p in lattice(21, 1.5) {
            let (_, wk) = velocity(p, m)?;
            let (wx_swapped, _) = velocity(PhasePoint::new(p.k, p.x), m)?;
            worst = worst.max((wk + m.a * wx_swapped).abs() / wk.abs().max(1.0));
        }
    }
    Ok(worst)
}

fn purity_error() -> Result<f64, wigner_lv::Error> {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        worst = worst.max((purity(ModelParams { a: 1.0, alpha })? - alpha * alpha).abs());
    }
    Ok(worst)
}

fn normalization_error() -> Result<f64, wigner_lv::Error> {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        worst = worst.max((ensemble_normalization(ModelParams { a: 1.0, alpha })? - 1.0).abs());
    }
    Ok(worst)
}

fn energy_drift() -> Result<f64, wigner_lv::Error> {
    let m = ModelParams { a: 1.0, alpha: 0.0 };
    let period = first_return_period(DEFAULT_START, m, PhasePoint::ORIGIN, 1e-3)?;
    let traj = integrate(DEFAULT_START, m, 1e-3, period)?;
    Ok(traj.energy_drift() / hamiltonian(DEFAULT_START, m).epsilon.abs().max(1.0))
}

pub fn run_checks() -> Vec<Check> {
    vec![
        check("series_vs_closed_form", series_vs_closed(), 1e-9),
        check("classical_limit", classical_limit(), 1e-5),
        check("imaginary_residue", imaginary_residue(), 1e-11),
        check("exchange_symmetry", exchange_symmetry(), 1e-12),
        check("purity", purity_error(), 1e-6),
        check("normalization", normalization_error(), 1e-8),
        check("energy_conservation", energy_drift(), 1e-8),
    ]
}

/// Fixed-width pass/fail table.
pub fn table(checks: &[Check]) -> String {
    let mut out = format!(
        "{:<24} {:>12} {:>12}  status\n",
        "check", "deviation", "tolerance"
    );
    for c in checks {
        out.push_str(&format!(
            "{:<24} {:>12.3e} {:>12.1e}  {}\n",
            c.name,
            c.value,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let checks = run_checks();
        assert!(checks.iter().all(|c| c.passed), "{}", table(&checks));
    }

    #[test]
    fn failures_are_reported() {
        let c = check("x", Err(wigner_lv::Error::IllPosedWinding), 1.0);
        assert!(!c.passed && c.value.is_nan());
        assert!(table(&[c]).contains("FAIL"));
    }
}
