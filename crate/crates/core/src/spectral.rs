//! FFT helpers for sampling trigonometric series on uniform grids.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Values of `Re Σ_k c_k e^{ik t_j}` at `t_j = 2πj/m`, `j = 0..m`.
/// Frequencies above `m` are folded (aliased) onto the grid exactly.
pub fn synthesize<I>(m: usize, terms: I) -> Vec<f64>
where
    I: IntoIterator<Item = (u64, Complex64)>,
{
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, c) in terms {
        buf[(k % m as u64) as usize] += c;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(m).process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Forward DFT `Σ_j v_j e^{-2πijk/m}` of real samples.
pub fn analyze(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthesize_matches_direct_sum() {
        let m = 16;
        let terms = vec![(0, Complex64::new(0.5, 0.0)), (3, Complex64::new(1.0, -2.0)), (21, Complex64::new(0.25, 0.0))];
        let v = synthesize(m, terms.clone());
        for (j, vj) in v.iter().enumerate() {
            let t = std::f64::consts::TAU * j as f64 / m as f64;
            let direct: f64 = terms.iter().map(|(k, c)| (c * Complex64::from_polar(1.0, *k as f64 * t)).re).sum();
            assert!((vj - direct).abs() < 1e-13);
        }
    }
}
