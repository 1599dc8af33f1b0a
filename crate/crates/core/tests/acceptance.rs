//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{rngs::StdRng, Rng, SeedableRng};
use wigner_lv::dynamics::{
    bifurcation_scan, classical_orbit, cluster_count, distance_to_polyline, first_return_period,
    integrate, interquartile_range, poincare, ScanConfig, CLUSTER_GAP, DEFAULT_START,
};
use wigner_lv::equilibria::{
    find_stagnation_points, primary_equilibrium, saddle_onset_alpha, winding_number,
    StagnationKind, DEFAULT_ENVELOPE, DEFAULT_SEED_RESOLUTION,
};
use wigner_lv::flow::{
    current_derivatives_closed, current_series, divergence_j, sample, velocity, velocity_eval,
};
use wigner_lv::model::{classical_velocity, ensemble_normalization, hamiltonian, purity};
use wigner_lv::{ModelParams, PhasePoint, Region, SeriesConfig};

type Outcome = Result<String, String>;

fn params(a: f64, alpha: f64) -> ModelParams {
    ModelParams::new(a, alpha).expect("valid parameters")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(elapsed: Duration, limit_s: u64, detail: String) -> Outcome {
    check(
        elapsed.as_secs_f64() < limit_s as f64,
        format!("{detail}; {:.2}s (< {limit_s}s)", elapsed.as_secs_f64()),
    )
}

fn random_points(seed: u64, n: usize) -> Vec<(ModelParams, PhasePoint)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let anisotropies = [0.25, 1.0, 4.0];
    (0..n)
        .map(|i| {
            let alpha = 3.2 * (1.0 - rng.gen::<f64>()); // (0, 3.2]
            let p = PhasePoint::new(rng.gen_range(-1.5..=1.5), rng.gen_range(-1.5..=1.5));
            (params(anisotropies[i % 3], alpha), p)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for (m, p) in random_points(1, 1000) {
        let s = current_series(p, m, SeriesConfig::adaptive()).map_err(|e| e.to_string())?;
        let (djx, djk) = current_derivatives_closed(p, m).map_err(|e| e.to_string())?;
        worst = worst
            .max((s.derivatives.0 - djx).abs() / djx.abs())
            .max((s.derivatives.1 - djk).abs() / djk.abs());
    }
    let ok = worst < 1e-9;
    within_budget(
        t.elapsed(),
        10,
        format!("max relative deviation {worst:.2e} (< 1e-9) on 1000 points"),
    )
    .and_then(|d| check(ok, d))
}

fn classical_sup_norm(alpha: f64) -> Result<f64, String> {
    let m = params(1.0, alpha);
    let mut sup: f64 = 0.0;
    for i in 0..101 {
        for j in 0..101 {
            let p = PhasePoint::new(-1.5 + 0.03 * i as f64, -1.5 + 0.03 * j as f64);
            let (wx, wk) = velocity(p, m).map_err(|e| e.to_string())?;
            let (vx, vk) = classical_velocity(p, m);
            sup = sup.max((wx - vx).abs()).max((wk - vk).abs());
        }
    }
    Ok(sup)
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let full = classical_sup_norm(1e-3)?;
    let half = classical_sup_norm(5e-4)?;
    let ratio = full / half;
    let ok = full < 1e-5 && (3.5..=4.5).contains(&ratio);
    within_budget(
        t.elapsed(),
        5,
        format!("sup|w - v| = {full:.3e} (< 1e-5), halving ratio {ratio:.3} (~4)"),
    )
    .and_then(|d| check(ok, d))
}

fn criterion_3() -> Outcome {
    let mut max_imag: f64 = 0.0;
    let mut max_fd: f64 = 0.0;
    let h = 1e-5;
    for (m, p) in random_points(3, 1000) {
        let v = velocity_eval(p, m).map_err(|e| e.to_string())?;
        max_imag = max_imag.max(v.residue.0).max(v.residue.1);
        let j = |x: f64, k: f64| sample(PhasePoint::new(x, k), m).map(|s| s.current);
        let fd = || -> wigner_lv::Result<f64> {
            Ok((j(p.x + h, p.k)?[0] - j(p.x - h, p.k)?[0]) / (2.0 * h)
                + (j(p.x, p.k + h)?[1] - j(p.x, p.k - h)?[1]) / (2.0 * h))
        };
        let fd = fd().map_err(|e| e.to_string())?;
        max_fd = max_fd.max((divergence_j(p, m).map_err(|e| e.to_string())? - fd).abs());
    }
    check(
        max_imag < 1e-11 && max_fd < 1e-6,
        format!("max |Im w| = {max_imag:.2e} (< 1e-11), max |div J - FD| = {max_fd:.2e} (< 1e-6)"),
    )
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let onset = saddle_onset_alpha(1.0, (1.5, 2.2)).map_err(|e| e.to_string())?;
    let ok = (1.7..=1.95).contains(&onset);
    within_budget(
        t.elapsed(),
        120,
        format!("onset alpha = {onset:.4} (in [1.7, 1.95])"),
    )
    .and_then(|d| check(ok, d))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let tr = |a: f64| {
        primary_equilibrium(params(a, 0.5))
            .map(|r| r.jac.trace)
            .map_err(|e| e.to_string())
    };
    let (t4, t1, tq) = (tr(4.0)?, tr(1.0)?, tr(0.25)?);
    let ok = t4 < 0.0 && tq > 0.0 && t1.abs() < 1e-8;
    within_budget(
        t.elapsed(),
        30,
        format!("Tr(a=4) = {t4:.4}, Tr(a=1) = {t1:.1e}, Tr(a=1/4) = {tq:.4}"),
    )
    .and_then(|d| check(ok, d))
}

/// Same-phase subsequences of the radii are monotone, in the given direction,
/// and the overall change has the expected sign.
fn radius_trend(a: f64, decreasing: bool) -> Result<(bool, f64), String> {
    let sec = poincare(DEFAULT_START, params(a, 0.5), 20).map_err(|e| e.to_string())?;
    let r = sec.radii();
    let mut ok = !sec.diverged && r.len() == 80;
    for phase in 0..4 {
        let sub: Vec<f64> = r.iter().copied().skip(phase).step_by(4).collect();
        ok &= sub.windows(2).all(|w| {
            if decreasing {
                w[1] <= w[0]
            } else {
                w[1] >= w[0]
            }
        });
    }
    Ok((ok, r[r.len() - 4] - r[0]))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let sec = poincare(DEFAULT_START, params(1.0, 0.0), 20).map_err(|e| e.to_string())?;
    let repeat = sec
        .points
        .windows(5)
        .map(|w| w[4].distance(&w[0]))
        .fold(0.0, f64::max);
    let (stable, d_stable) = radius_trend(1.01, true)?;
    let (unstable, d_unstable) = radius_trend(0.99, false)?;
    let ok = repeat < 1e-4 && stable && unstable && d_stable < 0.0 && d_unstable > 0.0;
    within_budget(
        t.elapsed(),
        60,
        format!(
            "classical period-4 repeat {repeat:.1e} (< 1e-4); 20-return radius change {d_stable:+.2e} (a=1.01), {d_unstable:+.2e} (a=0.99)"
        ),
    )
    .and_then(|d| check(ok, d))
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let cfg = ScanConfig::a_scan((0.8, 1.3), 51);
    let records = bifurcation_scan(&cfg).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let mut single_bad = vec![];
    let mut double_bad = vec![];
    for r in &records {
        let n = cluster_count(&r.attractor_x, CLUSTER_GAP);
        let a = (r.param_value * 1e6).round() / 1e6;
        if (0.85..=0.99).contains(&a) && n != 1 {
            single_bad.push(a);
        }
        if (1.01..=1.3).contains(&a) && n != 2 {
            double_bad.push(a);
        }
    }
    let min_z = |a: f64| {
        records
            .iter()
            .find(|r| (r.param_value - a).abs() < 1e-9)
            .map(|r| r.attractor_z().into_iter().fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NAN)
    };
    let (z105, z130) = (min_z(1.05), min_z(1.3));
    let ok = single_bad.is_empty() && double_bad.is_empty() && z130 < z105;
    within_budget(
        elapsed,
        300,
        format!(
            "a-values with wrong cluster count: {} of 15 below a=1, {} of 30 above; min z {z130:.4} (a=1.3) vs {z105:.4} (a=1.05)",
            single_bad.len(),
            double_bad.len()
        ),
    )
    .and_then(|d| check(ok, d))
}

fn criterion_8() -> Outcome {
    let mut details = vec![];
    let mut ok = true;
    for a in [0.99, 1.01] {
        let cfg = ScanConfig::alpha_scan(a, (0.5, 2.5), 3);
        let records = bifurcation_scan(&cfg).map_err(|e| e.to_string())?;
        let iqr: Vec<f64> = records
            .iter()
            .map(|r| {
                if r.diverged {
                    f64::NAN
                } else {
                    interquartile_range(&r.attractor_x)
                }
            })
            .collect();
        ok &= iqr.windows(2).all(|w| w[1] >= w[0]);
        let orbit = classical_orbit(cfg.start, a, 1e-3).map_err(|e| e.to_string())?;
        let near = &records[0];
        let dist = near
            .attractor_x
            .iter()
            .zip(&near.attractor_k)
            .map(|(&x, &k)| distance_to_polyline(PhasePoint::new(x, k), &orbit))
            .fold(0.0, f64::max);
        ok &= !near.diverged && dist < 0.05;
        let shown: Vec<String> = records
            .iter()
            .zip(&iqr)
            .map(|(r, q)| {
                if r.diverged {
                    format!("diverged at alpha={}", r.param_value)
                } else {
                    format!("{q:.4}")
                }
            })
            .collect();
        details.push(format!(
            "a={a}: IQR [{}], alpha=0.5 distance to classical orbit {dist:.3}",
            shown.join(", ")
        ));
    }
    check(ok, details.join("; "))
}

fn criterion_9() -> Outcome {
    let m = params(1.0, 3.0);
    let region = Region::square(1.5);
    let found = find_stagnation_points(region, m, DEFAULT_SEED_RESOLUTION, DEFAULT_ENVELOPE)
        .map_err(|e| e.to_string())?;
    let pts = &found.points;
    let rotational = |k: StagnationKind| k != StagnationKind::Saddle;
    let vortex_ok = pts
        .iter()
        .filter(|r| rotational(r.kind))
        .all(|r| r.winding.abs() == 1);
    let saddles: Vec<i32> = pts
        .iter()
        .filter(|r| r.jac.det < 0.0)
        .map(|r| r.winding)
        .collect();
    let saddle_ok = !saddles.is_empty() && saddles.iter().all(|&w| w == 0);

    // enclosing circle about the origin kept well away from every zero
    let radius = [1.0, 1.1, 1.2, 1.3, 1.4]
        .into_iter()
        .max_by(|&r1, &r2| {
            let gap = |r: f64| {
                pts.iter()
                    .map(|q| (q.point.distance(&PhasePoint::ORIGIN) - r).abs())
                    .fold(f64::INFINITY, f64::min)
            };
            gap(r1).total_cmp(&gap(r2))
        })
        .unwrap_or(1.2);
    let loop_winding =
        winding_number(PhasePoint::ORIGIN, radius, m, 4096).map_err(|e| e.to_string())?;
    let inside: i32 = pts
        .iter()
        .filter(|r| r.point.distance(&PhasePoint::ORIGIN) < radius)
        .map(|r| r.winding)
        .sum();
    let additive = loop_winding == inside;
    check(
        vortex_ok && saddle_ok && additive,
        format!(
            "{} points; non-saddle windings all +-1: {vortex_ok}; saddle windings {:?} (want 0); loop r={radius} winding {loop_winding} vs enclosed sum {inside}",
            pts.len(),
            saddles
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut worst_purity: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        let m = params(1.0, alpha);
        worst_purity =
            worst_purity.max((purity(m).map_err(|e| e.to_string())? - alpha * alpha).abs());
        worst_norm =
            worst_norm.max((ensemble_normalization(m).map_err(|e| e.to_string())? - 1.0).abs());
    }
    check(
        worst_purity < 1e-6 && worst_norm < 1e-8,
        format!("max |purity - alpha^2| = {worst_purity:.1e} (< 1e-6), max |norm - 1| = {worst_norm:.1e} (< 1e-8)"),
    )
}

fn criterion_11() -> Outcome {
    let m = params(1.0, 0.0);
    let period = first_return_period(DEFAULT_START, m, PhasePoint::ORIGIN, 1e-3)
        .map_err(|e| e.to_string())?;
    let traj = integrate(DEFAULT_START, m, 1e-3, period).map_err(|e| e.to_string())?;
    let e0 = hamiltonian(DEFAULT_START, m).epsilon;
    let drift = traj.energy_drift() / e0.abs().max(1.0);
    check(
        drift < 1e-8,
        format!("relative H drift over one orbit {drift:.2e} (< 1e-8)"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "series and closed-form current derivatives agree",
            criterion_1,
        ),
        ("classical limit of the quantum velocity", criterion_2),
        ("realness and continuity identity", criterion_3),
        ("saddle onset threshold", criterion_4),
        ("stability sign versus anisotropy", criterion_5),
        ("Poincare section behaviour", criterion_6),
        (
            "classical bifurcation clustering and extinction trend",
            criterion_7,
        ),
        ("quantum disorder trend", criterion_8),
        ("winding-number topology", criterion_9),
        ("purity and normalization", criterion_10),
        ("classical energy conservation", criterion_11),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} [{tag}] {name}: {detail}", i + 1);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
