//! Gauss-Legendre quadrature rules.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are found by Newton iteration on `P_n` from the Chebyshev-like
/// initial guesses; the rule is symmetric so only half the roots are solved.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (z * p - pm1) / (z * z - 1.0);
    (p, d)
}

/// Tensor-product Gauss-Legendre integral of `f` over `[lo, hi]²`.
pub fn integrate_square<F>(f: F, lo: f64, hi: f64, nodes_per_axis: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let (t, w) = gauss_legendre(nodes_per_axis);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut total = 0.0;
    for (ti, wi) in t.iter().zip(&w) {
        let x = mid + half * ti;
        let mut row = 0.0;
        for (tj, wj) in t.iter().zip(&w) {
            row += wj * f(x, mid + half * tj);
        }
        total += wi * row;
    }
    total * half * half
}
