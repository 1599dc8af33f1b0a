//! Fixed workloads shared by the benchmarks.

use wigner_lv::{ModelParams, PhasePoint, Region};

/// Models spanning the classical, moderate and saddle-rich regimes.
pub fn models() -> [(&'static str, ModelParams); 3] {
    [
        ("alpha0.1", ModelParams::new(1.0, 0.1).expect("valid")),
        ("alpha1", ModelParams::new(1.0, 1.0).expect("valid")),
        ("alpha3", ModelParams::new(1.0, 3.0).expect("valid")),
    ]
}

/// Deterministic complex arguments `(re, im)` covering every evaluation branch.
pub fn erf_arguments(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let r = 0.05 + 7.0 * t;
            let phi = 2.0 * std::f64::consts::PI * (t * 37.0).fract();
            (r * phi.cos(), r * phi.sin())
        })
        .collect()
}

/// Phase points on a regular lattice over `region`.
pub fn lattice(region: Region, n: usize) -> Vec<PhasePoint> {
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    (0..n * n)
        .map(|i| {
            PhasePoint::new(
                step(region.x_min, region.x_max, i % n),
                step(region.k_min, region.k_max, i / n),
            )
        })
        .collect()
}

/// Region used by the grid and stagnation benchmarks.
pub fn default_region() -> Region {
    Region::new(-1.5, 1.5, -1.5, 1.5)
}
