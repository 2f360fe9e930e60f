//! Reference computations that take a different route from the production
//! code paths, used to cross-check them.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex64;

use crate::kernels::KernelParams;
use crate::trig::dirichlet;

/// `(1/π)‖Ψ_x − mean‖₂` for the deviation kernel
/// `Ψ_x(t) = P(x − t) − (2/(2n−1)) Σ_j P(x_j − t) D_{n−1}(x − x_j)`,
/// divided by `e^{-αn^r}`.
///
/// By Parseval this is `(1/π)(π Σ_{k≥n} w_k² |e^{ikx} − S̃(e^{ik·})(x)|²)^{1/2}`;
/// the interpolant of every harmonic is evaluated directly from the node sum.
pub fn parseval_deviation_p2_scaled(params: &KernelParams, n: u64, x: f64) -> f64 {
    let stride = 2 * n - 1;
    let nodes: Vec<f64> = (0..stride).map(|j| TAU * j as f64 / stride as f64).collect();
    let dir: Vec<f64> = nodes.iter().map(|&xj| dirichlet(n as usize, x - xj)).collect();
    let lead = (n as f64).powf(params.r);
    let mut total = 0.0;
    let mut k = n;
    loop {
        let w = (-params.alpha * ((k as f64).powf(params.r) - lead)).exp();
        let interp: Complex64 = nodes
            .iter()
            .zip(&dir)
            .map(|(&xj, &d)| Complex64::from_polar(d, k as f64 * xj))
            .sum::<Complex64>()
            * (2.0 / stride as f64);
        let c = Complex64::from_polar(1.0, k as f64 * x) - interp;
        let term = w * w * c.norm_sqr();
        total += term;
        if w * w * (k as f64) < 1e-24 * total.max(f64::MIN_POSITIVE) || (total == 0.0 && k > 64 * n) {
            break;
        }
        k += 1;
    }
    (PI * total).sqrt() / PI
}

/// `Σ_{k≥1} Σ_{ν≥(2k+1)n−k} e^{-αν^r}` by direct summation, divided by `e^{-α(3n−1)^r}`.
pub fn remainder_double_sum_scaled(params: &KernelParams, n: u64, max_index: u64) -> f64 {
    // Σ_k Σ_{ν≥m_k} w_ν = Σ_ν w_ν · #{k ≥ 1 : m_k ≤ ν}
    let lead = ((3 * n - 1) as f64).powf(params.r);
    let stride = 2 * n - 1;
    ((3 * n - 1)..=max_index)
        .rev()
        .map(|nu| {
            let count = (nu - n) / stride;
            count as f64 * (-params.alpha * ((nu as f64).powf(params.r) - lead)).exp()
        })
        .sum()
}
