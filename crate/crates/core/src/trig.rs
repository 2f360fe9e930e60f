//! Trigonometric polynomials, the Dirichlet kernel and Lagrange interpolation
//! on the `2n−1` equidistant nodes `x_k = 2kπ/(2n−1)`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{self, KernelParams, TailSeries};
use crate::spectral;

/// `a0/2 + Σ_{k=1}^{m} (a_k cos kt + b_k sin kt)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPoly {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TrigPoly {
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Argument(format!(
                "cosine and sine coefficient arrays differ in length ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        Ok(Self { a0, a, b })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            a0: 0.0,
            a: vec![0.0; order],
            b: vec![0.0; order],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            a0: 2.0 * c,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    /// `c_cos cos(kt) + c_sin sin(kt)`.
    pub fn harmonic(k: usize, c_cos: f64, c_sin: f64) -> Self {
        let mut p = Self::zero(k);
        if k == 0 {
            p.a0 = 2.0 * c_cos;
        } else {
            p.a[k - 1] = c_cos;
            p.b[k - 1] = c_sin;
        }
        p
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    /// Highest `k` with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        (1..=self.order())
            .rev()
            .find(|&k| self.a[k - 1] != 0.0 || self.b[k - 1] != 0.0)
            .unwrap_or(0)
    }

    /// `(a_k, b_k)`, with `(a0, 0)` at `k = 0` and zeros past the order.
    pub fn coefficient(&self, k: usize) -> (f64, f64) {
        match k {
            0 => (self.a0, 0.0),
            k if k <= self.order() => (self.a[k - 1], self.b[k - 1]),
            _ => (0.0, 0.0),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for k in (1..=self.order()).rev() {
            let (sn, cs) = (k as f64 * t).sin_cos();
            s += self.a[k - 1] * cs + self.b[k - 1] * sn;
        }
        0.5 * self.a0 + s
    }

    /// Keeps harmonics up to `order`, padding with zeros if needed.
    pub fn truncated(&self, order: usize) -> Self {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        a.resize(order, 0.0);
        b.resize(order, 0.0);
        Self { a0: self.a0, a, b }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            a0: c * self.a0,
            a: self.a.iter().map(|v| c * v).collect(),
            b: self.b.iter().map(|v| c * v).collect(),
        }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
        let m = self.order().max(other.order());
        let mut out = self.truncated(m);
        out.a0 += c * other.a0;
        for k in 0..other.order() {
            out.a[k] += c * other.a[k];
            out.b[k] += c * other.b[k];
        }
        out
    }

    /// Largest coefficient difference, comparing `a0/2` for the constant term.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let m = self.order().max(other.order());
        let mut d = 0.5 * (self.a0 - other.a0).abs();
        for k in 1..=m {
            let (a1, b1) = self.coefficient(k);
            let (a2, b2) = other.coefficient(k);
            d = d.max((a1 - a2).abs()).max((b1 - b2).abs());
        }
        d
    }

    /// Values at `t_j = 2πj/m`.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        let terms = std::iter::once((0u64, Complex64::new(0.5 * self.a0, 0.0))).chain(
            (1..=self.order()).map(|k| (k as u64, Complex64::new(self.a[k - 1], -self.b[k - 1]))),
        );
        spectral::synthesize(m, terms)
    }

    /// `Σ_{k≥1} (a_k² + b_k²)` restricted to `k ≥ from`.
    pub fn energy_from(&self, from: usize) -> f64 {
        (from.max(1)..=self.order())
            .map(|k| self.a[k - 1].powi(2) + self.b[k - 1].powi(2))
            .sum()
    }
}

type Sampler = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Poly(TrigPoly),
    /// A tail series; `scaled` divides every value by `e^{-αn^r}`.
    Tail { series: TailSeries, scaled: bool },
    /// `P_{α,r,β}(t − shift)` truncated with `weights` (absolute) and its tail bound.
    Kernel {
        params: KernelParams,
        shift: f64,
        weights: Arc<[f64]>,
        tail: f64,
    },
    Sampler(Sampler),
}

/// A 2π-periodic real function, optionally backed by known Fourier coefficients.
#[derive(Clone)]
pub struct PeriodicFn {
    repr: Repr,
}

impl fmt::Debug for PeriodicFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Poly(p) => f.debug_tuple("PeriodicFn::Poly").field(p).finish(),
            Repr::Tail { series, scaled } => f
                .debug_struct("PeriodicFn::Tail")
                .field("series", series)
                .field("scaled", scaled)
                .finish(),
            Repr::Kernel { params, shift, .. } => f
                .debug_struct("PeriodicFn::Kernel")
                .field("params", params)
                .field("shift", shift)
                .finish(),
            Repr::Sampler(_) => f.write_str("PeriodicFn::Sampler"),
        }
    }
}

impl From<TrigPoly> for PeriodicFn {
    fn from(p: TrigPoly) -> Self {
        Self { repr: Repr::Poly(p) }
    }
}

impl From<TailSeries> for PeriodicFn {
    fn from(series: TailSeries) -> Self {
        Self {
            repr: Repr::Tail { series, scaled: false },
        }
    }
}

impl PeriodicFn {
    /// Wraps a black-box evaluator; the caller promises 2π-periodicity.
    pub fn from_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self {
            repr: Repr::Sampler(Arc::new(f)),
        }
    }

    /// The tail series divided by its leading weight `e^{-αn^r}`.
    pub fn tail_scaled(series: TailSeries) -> Self {
        Self {
            repr: Repr::Tail { series, scaled: true },
        }
    }

    /// `t ↦ P_{α,r,β}(t − shift)`, truncated with tail at most `tol`.
    pub fn kernel(params: KernelParams, shift: f64, tol: f64) -> Result<Self> {
        let (weights, tail) = kernels::kernel_weights(&params, tol)?;
        Ok(Self {
            repr: Repr::Kernel {
                params,
                shift,
                weights: weights.into(),
                tail,
            },
        })
    }

    pub fn as_poly(&self) -> Option<&TrigPoly> {
        match &self.repr {
            Repr::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Poly(p) => p.eval(t),
            Repr::Tail { series, scaled: false } => kernels::tail_cos_eval(series, t).value,
            Repr::Tail { series, scaled: true } => series.eval_scaled(t),
            Repr::Kernel {
                params,
                shift,
                weights,
                ..
            } => {
                let c = params.phase_shift();
                let u = t - shift;
                weights
                    .iter()
                    .enumerate()
                    .rev()
                    .map(|(j, w)| w * ((j + 1) as f64 * u - c).cos())
                    .sum()
            }
            Repr::Sampler(f) => f(t),
        }
    }

    /// Whether the Fourier coefficients are available without quadrature.
    pub fn has_known_coefficients(&self) -> bool {
        !matches!(self.repr, Repr::Sampler(_))
    }

    /// Highest frequency present, if the function is a finite series.
    pub fn spectral_order(&self) -> Option<usize> {
        match &self.repr {
            Repr::Poly(p) => Some(p.degree()),
            Repr::Tail { series, .. } => Some(series.truncation_index as usize),
            Repr::Kernel { weights, .. } => Some(weights.len()),
            Repr::Sampler(_) => None,
        }
    }

    /// Bound on the part of the function dropped by its finite representation.
    pub fn truncation_error(&self) -> f64 {
        match &self.repr {
            Repr::Poly(_) | Repr::Sampler(_) => 0.0,
            Repr::Tail { series, scaled: false } => series.tail_bound,
            Repr::Tail { series, scaled: true } => series.tail_bound_scaled(),
            Repr::Kernel { tail, .. } => *tail,
        }
    }

    /// `(a_k, b_k)` for known backings; `k = 0` yields `(a0, 0)`.
    pub fn coefficient(&self, k: usize) -> Option<(f64, f64)> {
        match &self.repr {
            Repr::Poly(p) => Some(p.coefficient(k)),
            Repr::Tail { series, scaled } => {
                let (a, b) = series.coefficient_scaled(k as u64);
                let scale = if *scaled { 1.0 } else { series.log_scale().exp() };
                Some((a * scale, b * scale))
            }
            Repr::Kernel {
                params,
                shift,
                weights,
                ..
            } => {
                if k == 0 || k > weights.len() {
                    return Some((0.0, 0.0));
                }
                let w = weights[k - 1];
                let phase = k as f64 * shift + params.phase_shift();
                Some((w * phase.cos(), w * phase.sin()))
            }
            Repr::Sampler(_) => None,
        }
    }

    /// Values at `t_j = 2πj/m`.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        match &self.repr {
            Repr::Poly(p) => p.sample(m),
            Repr::Tail { series, scaled } => {
                let samples = series.sample_scaled(m);
                if *scaled {
                    samples
                } else {
                    let scale = series.log_scale().exp();
                    samples.into_iter().map(|v| v * scale).collect()
                }
            }
            Repr::Kernel { weights, .. } => {
                let terms = (1..=weights.len()).map(|k| {
                    let (a, b) = self.coefficient(k).unwrap_or((0.0, 0.0));
                    (k as u64, Complex64::new(a, -b))
                });
                spectral::synthesize(m, terms)
            }
            Repr::Sampler(f) => (0..m).map(|j| f(TAU * j as f64 / m as f64)).collect(),
        }
    }

    /// `self − p`, kept coefficient-backed when `self` is a polynomial.
    pub fn minus_poly(&self, p: &TrigPoly) -> PeriodicFn {
        match &self.repr {
            Repr::Poly(q) => q.add_scaled(p, -1.0).into(),
            _ => {
                let f = self.clone();
                let p = p.clone();
                PeriodicFn::from_fn(move |t| f.eval(t) - p.eval(t))
            }
        }
    }
}

/// The interpolation nodes `x_k = 2kπ/(2n−1)`, `k = 0..2n−2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeGrid {
    pub n: usize,
    pub nodes: Vec<f64>,
}

impl NodeGrid {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        let m = 2 * n - 1;
        Ok(Self {
            n,
            nodes: (0..m).map(|k| TAU * k as f64 / m as f64).collect(),
        })
    }

    /// Whether `x` coincides with a node modulo 2π (within `eps` in `(2n−1)x/2`).
    pub fn is_node(&self, x: f64, eps: f64) -> bool {
        let half = (2 * self.n - 1) as f64 * x / 2.0;
        half.sin().abs() <= eps
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Argument("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `D_{n−1}(t) = 1/2 + Σ_{k=1}^{n−1} cos kt = sin((n−½)t) / (2 sin(t/2))`.
pub fn dirichlet(n: usize, t: f64) -> f64 {
    let s = (0.5 * t).sin();
    if s.abs() < 1e-8 {
        0.5 + (1..n).map(|k| (k as f64 * t).cos()).sum::<f64>()
    } else {
        ((n as f64 - 0.5) * t).sin() / (2.0 * s)
    }
}

fn interp_coefficients(values: &[f64]) -> TrigPoly {
    let m = values.len();
    let n = m.div_ceil(2);
    let spec = spectral::analyze(values);
    let c = 2.0 / m as f64;
    TrigPoly {
        a0: c * spec[0].re,
        a: (1..n).map(|k| c * spec[k].re).collect(),
        b: (1..n).map(|k| -c * spec[k].im).collect(),
    }
}

/// The order-`(n−1)` trigonometric polynomial interpolating `f` at the `2n−1` nodes.
///
/// # Panics
/// If `n == 0`.
pub fn lagrange_interp(f: &PeriodicFn, n: usize) -> TrigPoly {
    assert!(n >= 1, "n must be at least 1");
    let m = 2 * n - 1;
    let values: Vec<f64> = (0..m).map(|k| f.eval(TAU * k as f64 / m as f64)).collect();
    interp_coefficients(&values)
}

/// `S̃_{n−1}(f; x) = (2/(2n−1)) Σ_k f(x_k) D_{n−1}(x − x_k)`.
pub fn interp_eval(f: &PeriodicFn, n: usize, x: f64) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    let m = 2 * n - 1;
    let s: f64 = (0..m)
        .map(|k| {
            let xk = TAU * k as f64 / m as f64;
            f.eval(xk) * dirichlet(n, x - xk)
        })
        .sum();
    2.0 * s / m as f64
}

const MAX_FOURIER_SAMPLES: usize = 1 << 22;

/// The Fourier partial sum `S_{n−1}(f)`.
///
/// Known coefficients are copied; black-box functions are analyzed with
/// the uniform rule, doubling the sample count until every coefficient
/// moves by at most `quad_tol` (capped at 2^22 samples).
pub fn fourier_partial_sum(f: &PeriodicFn, n: usize, quad_tol: f64) -> TrigPoly {
    assert!(n >= 1, "n must be at least 1");
    if f.has_known_coefficients() {
        let (a0, _) = f.coefficient(0).unwrap_or((0.0, 0.0));
        let (a, b) = (1..n).map(|k| f.coefficient(k).unwrap_or((0.0, 0.0))).unzip();
        return TrigPoly { a0, a, b };
    }
    let mut m = (4 * n).next_power_of_two().max(64);
    let mut prev = uniform_coefficients(f, m, n);
    loop {
        m *= 2;
        let next = uniform_coefficients(f, m, n);
        if next.max_coeff_diff(&prev) <= quad_tol || m >= MAX_FOURIER_SAMPLES {
            return next;
        }
        prev = next;
    }
}

fn uniform_coefficients(f: &PeriodicFn, m: usize, n: usize) -> TrigPoly {
    let spec = spectral::analyze(&f.sample(m));
    let c = 2.0 / m as f64;
    TrigPoly {
        a0: c * spec[0].re,
        a: (1..n).map(|k| c * spec[k].re).collect(),
        b: (1..n).map(|k| -c * spec[k].im).collect(),
    }
}

/// The Lebesgue function `(2/(2n−1)) Σ_k |D_{n−1}(x − x_k)|`.
pub fn lebesgue_fn(n: usize, x: f64) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    let m = 2 * n - 1;
    let s: f64 = (0..m)
        .map(|k| dirichlet(n, x - TAU * k as f64 / m as f64).abs())
        .sum();
    2.0 * s / m as f64
}

/// `(2/π)|sin((2n−1)x/2)| ln n`.
pub fn lebesgue_main_term(n: usize, x: f64) -> f64 {
    2.0 / std::f64::consts::PI * ((2 * n - 1) as f64 * x / 2.0).sin().abs() * (n as f64).ln()
}

/// `ρ̃_n(f; x) = f(x) − S̃_{n−1}(f; x)`.
pub fn rho_tilde(f: &PeriodicFn, n: usize, x: f64) -> f64 {
    f.eval(x) - interp_eval(f, n, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_examples() {
        assert!((dirichlet(5, 0.0) - 4.5).abs() < 1e-15);
        assert!(dirichlet(3, 2.0 * PI / 5.0).abs() < 1e-15);
        let sum: f64 = 0.5 + (1..8).map(|k| (k as f64 * 1.234).cos()).sum::<f64>();
        assert!((dirichlet(8, 1.234) - sum).abs() < 1e-13);
        assert!((dirichlet(4, TAU) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn trig_poly_rejects_ragged() {
        assert!(TrigPoly::new(0.0, vec![1.0], vec![]).is_err());
    }

    #[test]
    fn interp_reproduces_cos2() {
        let f: PeriodicFn = TrigPoly::harmonic(2, 1.0, 0.0).into();
        let p = lagrange_interp(&f, 5);
        assert_eq!(p.order(), 4);
        assert!(p.max_coeff_diff(&TrigPoly::harmonic(2, 1.0, 0.0).truncated(4)) < 1e-12);
    }

    #[test]
    fn interp_constant() {
        let p = lagrange_interp(&TrigPoly::constant(3.0).into(), 4);
        assert!((p.a0 - 6.0).abs() < 1e-13);
        assert!(p.a.iter().chain(&p.b).all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn interp_aliases_cos5_onto_cos4() {
        let f: PeriodicFn = TrigPoly::harmonic(5, 1.0, 0.0).into();
        let p = lagrange_interp(&f, 5);
        for x in NodeGrid::new(5).unwrap().nodes {
            assert!((p.eval(x) - f.eval(x)).abs() < 1e-12);
        }
        // on 9 nodes cos 5t coincides with cos 4t
        assert!((p.a[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interp_eval_examples() {
        let f: PeriodicFn = TrigPoly::harmonic(1, 0.0, 1.0).into();
        assert!((interp_eval(&f, 4, 0.77) - 0.77f64.sin()).abs() < 1e-12);
        let g = PeriodicFn::from_fn(|t: f64| (t.cos()).exp());
        let grid = NodeGrid::new(6).unwrap();
        for &x in &grid.nodes {
            assert!((interp_eval(&g, 6, x) - g.eval(x)).abs() < 1e-12);
        }
        let k = PeriodicFn::kernel(KernelParams::new(1.0, 0.5, 0.3).unwrap(), 0.4, 1e-15).unwrap();
        let direct = interp_eval(&k, 6, 1.0);
        let coeff = lagrange_interp(&k, 6).eval(1.0);
        assert!((direct - coeff).abs() < 1e-12);
    }

    #[test]
    fn fourier_partial_sum_examples() {
        let p = TrigPoly::new(1.0, vec![0.5, -2.0], vec![0.0, 1.5]).unwrap();
        let s = fourier_partial_sum(&p.clone().into(), 3, 1e-12);
        assert!(s.max_coeff_diff(&p) < 1e-11);
        let c = fourier_partial_sum(&PeriodicFn::from_fn(|t: f64| (6.0 * t).cos()), 6, 1e-13);
        assert!(c.max_coeff_diff(&TrigPoly::zero(5)) < 1e-13);
        let params = KernelParams::new(1.0, 1.0, 0.0).unwrap();
        let k = PeriodicFn::kernel(params, 0.0, 1e-15).unwrap();
        let black = PeriodicFn::from_fn(move |t| k.eval(t));
        let s = fourier_partial_sum(&black, 6, 1e-13);
        for j in 1..6 {
            assert!((s.a[j - 1] - (-(j as f64)).exp()).abs() < 1e-10);
            assert!(s.b[j - 1].abs() < 1e-10);
        }
    }

    #[test]
    fn lebesgue_examples() {
        let grid = NodeGrid::new(7).unwrap();
        for &x in &grid.nodes {
            assert!((lebesgue_fn(7, x) - 1.0).abs() < 1e-12);
        }
        assert!((lebesgue_fn(1, 2.3) - 1.0).abs() < 1e-15);
        let n = 20;
        let x = PI / 39.0;
        assert!((lebesgue_fn(n, x) - lebesgue_main_term(n, x)).abs() < 3.0);
    }

    #[test]
    fn rho_tilde_vanishes_on_polynomials() {
        let p = TrigPoly::new(0.3, vec![1.0, 0.0, -0.4], vec![0.2, 0.7, 0.1]).unwrap();
        let f: PeriodicFn = p.into();
        for i in 0..50 {
            assert!(rho_tilde(&f, 4, 0.13 * i as f64).abs() < 1e-11);
        }
    }

    #[test]
    fn sample_matches_eval_for_every_backing() {
        let params = KernelParams::new(0.8, 0.6, 0.5).unwrap();
        let fns: Vec<PeriodicFn> = vec![
            TrigPoly::new(0.4, vec![1.0, 2.0], vec![-1.0, 0.5]).unwrap().into(),
            TailSeries::new(params, 3, 0.2, 1e-15).unwrap().into(),
            PeriodicFn::tail_scaled(TailSeries::new(params, 30, 0.2, 1e-15).unwrap()),
            PeriodicFn::kernel(params, 0.9, 1e-15).unwrap(),
        ];
        for f in fns {
            let m = 40;
            for (j, v) in f.sample(m).iter().enumerate() {
                assert!((v - f.eval(TAU * j as f64 / m as f64)).abs() < 1e-12, "{f:?}");
            }
        }
    }
}
