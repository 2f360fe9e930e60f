//! Adaptive Gauss–Legendre quadrature and uniform periodic rules.

use std::sync::OnceLock;

use crate::value::{CertifiedValue, Provenance};

const GL_POINTS: usize = 16;
const MAX_DEPTH: u32 = 48;

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let s: f64 = nodes.iter().zip(weights).map(|(x, w)| w * f(c + h * x)).sum();
    s * h
}

/// `∫_a^b f` by interval halving; a panel is accepted once the two-level
/// difference is below its share of `tol / 2`, or once halving stops
/// shrinking an already small difference (evaluation noise). The
/// difference enters `abs_err` either way.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> CertifiedValue {
    if a == b {
        return CertifiedValue::exact(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let total = hi - lo;
    let mut stack = vec![(lo, hi, panel(&f, lo, hi), 0u32, f64::INFINITY)];
    let mut sum = 0.0;
    let mut err = 0.0;
    while let Some((a, b, whole, depth, parent_diff)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = panel(&f, a, m);
        let right = panel(&f, m, b);
        let refined = left + right;
        let diff = (refined - whole).abs();
        let share = 0.5 * tol * (b - a) / total;
        let floor = 8.0 * f64::EPSILON * refined.abs();
        let stalled = diff >= 0.5 * parent_diff && diff <= 1e-8 * refined.abs();
        if diff <= share.max(floor) || depth >= MAX_DEPTH || stalled {
            sum += refined;
            err += diff;
        } else {
            stack.push((m, b, right, depth + 1, diff));
            stack.push((a, m, left, depth + 1, diff));
        }
    }
    CertifiedValue::new(sign * sum, err, Provenance::Quadrature)
}

/// `∫_0^{2π} f` by the `m`-point midpoint rule.
pub fn periodic_midpoint<F: Fn(f64) -> f64>(f: F, m: usize) -> f64 {
    let h = std::f64::consts::TAU / m as f64;
    (0..m).map(|j| f((j as f64 + 0.5) * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(s, 2.0 / 31.0, max_relative = 1e-14);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = adaptive(|t| t.sqrt(), 0.0, 1.0, 1e-13);
        assert!((v.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_reversed_limits() {
        let v = adaptive(|t| t.exp(), 1.0, 0.0, 1e-13);
        assert_relative_eq!(v.value, 1.0 - std::f64::consts::E, max_relative = 1e-14);
    }

    #[test]
    fn midpoint_is_spectral_for_periodic() {
        let v = periodic_midpoint(|t| (t.cos()).exp(), 64);
        // 2π I_0(1)
        assert_relative_eq!(v, std::f64::consts::TAU * 1.266_065_877_752_008_4, max_relative = 1e-14);
    }
}
