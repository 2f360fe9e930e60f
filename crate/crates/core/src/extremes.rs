//! Class suprema `Ẽ_n(C^{α,r}_{β,p}; x) = sup |f(x) − S̃_{n−1}(f; x)|` over
//! generalized Poisson integrals of the zero-mean unit ball, their exact `p = 2`
//! forms, the duality band, asymptotic main terms and remainder bands.
//!
//! Quantities that decay like `e^{-αn^r}` are also offered in a `_scaled`
//! form, divided by that factor, so that large `n` does not underflow.

use std::f64::consts::{FRAC_PI_2, LN_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::approx::{inf_shift, lp_norm_samples};
use crate::error::{check_tol, domain, Error, Result};
use crate::kernels::{
    gamma_n, ln_tail_upper, pow_diff, remainder_sup_bound, threshold, KernelParams, ScaledBound, TailSeries,
    Threshold,
};
use crate::specfun::{compensated_sum, cos_norm, elliptic_k, hyp2f1};
use crate::spectral;
use crate::trig::{PeriodicFn, TrigPoly};
use crate::value::{CertifiedValue, LpExponent, Provenance};

const FORTY_PI4: f64 = 40.0 * PI * PI * PI * PI;
const TWENTY_PI4: f64 = 20.0 * PI * PI * PI * PI;
const BLOCK_CHUNK: u64 = 4096;

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(domain("n", 0.0, "n >= 1"))
    } else {
        Ok(())
    }
}

/// `|sin((2n−1)x/2)|`, snapped to `0` when it is below the rounding error of
/// its argument, so that floating-point nodes count as nodes.
pub fn sin_factor(n: u64, x: f64) -> f64 {
    let arg = (2 * n - 1) as f64 * x / 2.0;
    let s = arg.sin().abs();
    if s <= 4.0 * f64::EPSILON * arg.abs().max(1.0) {
        0.0
    } else {
        s
    }
}

/// `−αn^r`, the logarithm of the factor removed by the `_scaled` variants.
pub fn log_scale(params: &KernelParams, n: u64) -> f64 {
    -params.alpha * (n as f64).powf(params.r)
}

fn unscale(b: ScaledBound, provenance: Provenance) -> CertifiedValue {
    let f = b.log_scale.exp();
    CertifiedValue::new(b.value * f, b.abs_err * f, provenance)
}

/// `Ẽ_n(C^{α,r}_{β,2}; x)` divided by `e^{-αn^r}`:
/// `(2/√π)(Σ_m sin²((2n−1)mx/2) B_m)^{1/2}` with `B_m` the block sums of `e^{-2αk^r}`
/// over `|k − m(2n−1)| ≤ n−1`. The error bar is relative to `e^{-αn^r}`: at most `rel_tol`
/// for the truncation, plus the rounding of the phases `m(2n−1)x/2`, which grows with `n|x|`.
pub fn exact_p2_scaled(params: &KernelParams, n: u64, x: f64, rel_tol: f64) -> Result<ScaledBound> {
    check_n(n)?;
    check_tol(rel_tol)?;
    let ls = log_scale(params, n);
    let stride = (2 * n - 1) as f64;
    let theta = stride * x / 2.0;
    if sin_factor(n, x) == 0.0 {
        return Ok(ScaledBound {
            value: 0.0,
            abs_err: 0.0,
            log_scale: ls,
        });
    }
    let KernelParams { alpha, r, .. } = *params;
    let nf = n as f64;
    let ln_target = (rel_tol * rel_tol * PI / 8.0).ln();
    let mut blocks = Vec::new();
    let mut rounding = 0.0;
    let mut omitted = 0.0;
    let mut m = 1u64;
    let tail = loop {
        let centre = m as f64 * stride;
        let first = centre - nf + 1.0;
        // long blocks stop once their rest is below a 2^{-m} share of the budget
        let ln_share = ln_target - m as f64 * LN_2;
        let mut len = 2 * n - 1;
        let mut j = 0;
        while j + BLOCK_CHUNK < len {
            j += BLOCK_CHUNK;
            let ln_rest = ln_tail_upper(2.0 * alpha, r, first + j as f64, nf);
            if ln_rest <= ln_share {
                omitted += ln_rest.exp();
                len = j;
            }
        }
        let terms = (0..len).map(|j| {
            let k = first + j as f64;
            (-2.0 * alpha * pow_diff(k, nf, r)).exp()
        });
        let (block, _) = compensated_sum(terms);
        let s2 = (m as f64 * theta).sin().powi(2);
        let d = 2.0 * alpha * pow_diff(centre + nf, nf, r);
        rounding += f64::EPSILON * s2 * block * (6.0 + d + m as f64 * theta.abs());
        blocks.push(s2 * block);
        let ln_rest = ln_tail_upper(2.0 * alpha, r, centre + nf, nf);
        if ln_rest <= ln_target || ln_rest < -700.0 {
            break ln_rest.exp();
        }
        m += 1;
        if m > crate::kernels::MAX_TERMS / (2 * n - 1) {
            return Err(Error::NoConvergence {
                solver: "exact p=2 block series",
                iterations: m as usize,
                residual: ln_rest.exp(),
            });
        }
    };
    let (s, _) = compensated_sum(blocks.into_iter().rev());
    let c = 2.0 / PI.sqrt();
    let value = c * s.sqrt();
    let hi = c * (s + tail + omitted + rounding).sqrt();
    let abs_err = (hi - value).max(0.0) + 2.0 * f64::EPSILON * value;
    Ok(ScaledBound {
        value,
        abs_err,
        log_scale: ls,
    })
}

/// `Ẽ_n(C^{α,r}_{β,2}; x)` with `abs_err ≤ tol`.
pub fn exact_p2(params: &KernelParams, n: u64, x: f64, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    check_n(n)?;
    let rel = (tol * (-log_scale(params, n)).exp()).min(1e-14);
    Ok(unscale(exact_p2_scaled(params, n, x, rel)?, Provenance::SeriesTruncation))
}

/// Closed form at `r = 1`, divided by `e^{-αn}`.
pub fn exact_p2_r1_scaled(alpha: f64, n: u64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("alpha", alpha, "alpha > 0"));
    }
    check_n(n)?;
    if sin_factor(n, x) == 0.0 {
        return Ok(0.0);
    }
    let stride = (2 * n - 1) as f64;
    let s = (stride * x / 2.0).sin();
    let q = (-2.0 * alpha * stride).exp();
    // 1 − 2q cos(Nx) + q² = (1 − q)² + 4q sin²(Nx/2)
    let den = (1.0 - q).powi(2) + 4.0 * q * s * s;
    Ok(s.abs() * 2.0 / (PI * -(-2.0 * alpha).exp_m1()).sqrt() * ((1.0 + q) / den).sqrt())
}

/// `e^{-αn}|sin((2n−1)x/2)| (2/√(π(1−e^{−2α}))) ((1+q)/(1 − 2q cos((2n−1)x) + q²))^{1/2}`,
/// `q = e^{−2α(2n−1)}`.
pub fn exact_p2_r1(alpha: f64, n: u64, x: f64) -> Result<f64> {
    Ok(exact_p2_r1_scaled(alpha, n, x)? * (-alpha * n as f64).exp())
}

/// `ℰ_n(C^{α,r}_{β,2})_C = (Σ_{k≥n} e^{-2αk^r}/π)^{1/2}`, divided by `e^{-αn^r}`.
pub fn fourier_class_p2_scaled(params: &KernelParams, n: u64) -> Result<ScaledBound> {
    check_n(n)?;
    let doubled = KernelParams::new(2.0 * params.alpha, params.r, params.beta)?;
    let series = TailSeries::new(doubled, n, 0.0, 1e-17)?;
    let (s, abs) = compensated_sum(series.relative_weights().iter().rev().copied());
    let err = series.tail_bound_scaled() + 4.0 * f64::EPSILON * abs;
    let value = (s / PI).sqrt();
    Ok(ScaledBound {
        value,
        abs_err: ((s + err) / PI).sqrt() - value + 2.0 * f64::EPSILON * value,
        log_scale: log_scale(params, n),
    })
}

pub fn fourier_class_p2(params: &KernelParams, n: u64) -> Result<CertifiedValue> {
    Ok(unscale(fourier_class_p2_scaled(params, n)?, Provenance::SeriesTruncation))
}

/// `Ẽ_n(C_{β,2}; x) / (|sin((2n−1)x/2)| ℰ_n(C_{β,2})_C)` for each `n`.
pub fn limit_ratio_check(params: &KernelParams, n_list: &[u64], x: f64) -> Result<Vec<f64>> {
    n_list
        .iter()
        .map(|&n| {
            let s = sin_factor(n, x);
            if s == 0.0 {
                return Err(Error::Argument(format!("x = {x} is an interpolation node for n = {n}")));
            }
            let e = exact_p2_scaled(params, n, x, 1e-15)?;
            let f = fourier_class_p2_scaled(params, n)?;
            Ok(e.value / (s * f.value))
        })
        .collect()
}

/// An interval `center ± half_width`, both multiplied by `e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateBand {
    pub center: f64,
    pub half_width: f64,
    pub n_used: u64,
    /// False when `n` is below the threshold that makes the band a certified claim.
    pub applicable: bool,
    pub log_scale: f64,
}

impl EstimateBand {
    pub fn lower(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        (v - self.center).abs() <= self.half_width + slack
    }

    /// The same band expressed relative to `e^{new_scale}`.
    pub fn rescaled(&self, new_scale: f64) -> Self {
        let f = (self.log_scale - new_scale).exp();
        Self {
            center: self.center * f,
            half_width: self.half_width * f,
            log_scale: new_scale,
            ..*self
        }
    }

    fn zero(n: u64, log_scale: f64) -> Self {
        Self {
            center: 0.0,
            half_width: 0.0,
            n_used: n,
            applicable: true,
            log_scale,
        }
    }
}

/// Duality band for `Ẽ_n(C^{α,r}_{β,p}; x)`, relative to `e^{-αn^r}`:
/// the centre is `(2/π)|sin((2n−1)x/2)| inf_λ ‖Σ_{k≥n} e^{-αk^r} cos(kt + γ_n) − λ‖_{p′}`,
/// and the half-width covers `2·sup|r_n|` plus truncation and quadrature error.
pub fn dual_value_scaled(params: &KernelParams, n: u64, x: f64, p: LpExponent, tol: f64) -> Result<EstimateBand> {
    check_n(n)?;
    check_tol(tol)?;
    let ls = log_scale(params, n);
    let s = sin_factor(n, x);
    if s == 0.0 {
        return Ok(EstimateBand::zero(n, ls));
    }
    let q = p.conjugate();
    let series = TailSeries::new(*params, n, gamma_n(params.beta, x, n), tol.min(1e-12))?;
    let truncation = series.tail_bound_scaled();
    let shift = inf_shift(&PeriodicFn::tail_scaled(series), q, tol)?;
    let period_factor = if q.is_infinite() { 1.0 } else { TAU.powf(1.0 / q.value()) };
    let rn = remainder_sup_bound(params, n)?.rescaled(ls).upper();
    Ok(EstimateBand {
        center: 2.0 * s * shift.value / PI,
        half_width: 2.0 * s * (2.0 * rn + (period_factor * truncation + tol) / PI),
        n_used: n,
        applicable: true,
        log_scale: ls,
    })
}

/// Absolute-scale version of [`dual_value_scaled`].
pub fn dual_value(params: &KernelParams, n: u64, x: f64, p: LpExponent, tol: f64) -> Result<EstimateBand> {
    check_tol(tol)?;
    let rel = (tol * (-log_scale(params, n)).exp()).min(1e-10);
    Ok(dual_value_scaled(params, n, x, p, rel)?.rescaled(0.0))
}

/// Coefficients `(u_k, v_k)`, `k = 0..=order`, of the functional
/// `φ ↦ ρ̃_n(𝒥^{α,r}_β φ; x) = Σ_k (u_k a_k + v_k b_k)` on `φ = Σ a_k cos kt + b_k sin kt`,
/// relative to `e^{-αn^r}`.
fn deviation_functional(params: &KernelParams, n: u64, x: f64, order: u64) -> Vec<(f64, f64)> {
    let stride = 2 * n - 1;
    let nf = n as f64;
    let rot = Complex64::from_polar(1.0, -params.beta * FRAC_PI_2);
    (0..=order)
        .map(|k| {
            if k < n {
                return (0.0, 0.0);
            }
            // S̃ maps e^{ikx} to e^{ik'x}, k' ≡ k mod (2n−1), |k'| ≤ n−1
            let rem = (k % stride) as i64;
            let alias = if rem >= n as i64 { rem - stride as i64 } else { rem };
            let c = Complex64::from_polar(1.0, k as f64 * x) - Complex64::from_polar(1.0, alias as f64 * x);
            let d = rot * c * params.relative_weight(k as f64, nf);
            (d.re, d.im)
        })
        .collect()
}

/// Stochastic lower bound for `Ẽ_n(C^{α,r}_{β,p}; x)`, relative to `e^{-αn^r}`.
///
/// Every trial is a zero-mean trigonometric polynomial of order `≤ 4n`
/// normalized in `L_p`. The first trials are the `L_2` Riesz representer of
/// the deviation functional and its Hölder dual; the remaining trials are a
/// seeded (1+1) evolution strategy around the best candidate so far.
pub fn monte_carlo_lower_scaled(
    params: &KernelParams,
    n: u64,
    x: f64,
    p: LpExponent,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_n(n)?;
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    if sin_factor(n, x) == 0.0 {
        return Ok(0.0);
    }
    let order = 4 * n;
    let functional = deviation_functional(params, n, x, order);
    let scale: f64 = functional.iter().map(|(u, v)| u * u + v * v).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let m = (256 * order as usize).next_power_of_two();
    let inflation = if p.is_infinite() {
        1.0 / (1.0 - order as f64 * PI / m as f64)
    } else {
        1.0
    };
    let score = |c: &[(f64, f64)]| -> f64 {
        let ell: f64 = c.iter().zip(&functional).map(|((a, b), (u, v))| a * u + b * v).sum();
        let samples = spectral::synthesize(m, c.iter().enumerate().map(|(k, &(a, b))| (k as u64, Complex64::new(a, -b))));
        let norm = lp_norm_samples(&samples, p) * inflation;
        if norm > 0.0 {
            ell.abs() / norm
        } else {
            0.0
        }
    };
    let mut starts = vec![functional.clone()];
    if p.value() != 2.0 {
        starts.push(holder_dual(&functional, p, m));
    }
    let mut best = starts[0].clone();
    let mut best_score = f64::NEG_INFINITY;
    let mut used = 0;
    for cand in starts.into_iter().take(trials) {
        used += 1;
        let v = score(&cand);
        if v > best_score {
            best_score = v;
            best = cand;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma = 0.1;
    for _ in used..trials {
        let rms = (best.iter().map(|(a, b)| a * a + b * b).sum::<f64>() / order as f64).sqrt();
        let cand: Vec<(f64, f64)> = best
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                if k == 0 {
                    return (0.0, 0.0);
                }
                let da: f64 = rng.sample(StandardNormal);
                let db: f64 = rng.sample(StandardNormal);
                (a + sigma * rms * da, b + sigma * rms * db)
            })
            .collect();
        let v = score(&cand);
        if v > best_score {
            best_score = v;
            best = cand;
            sigma *= 1.5;
        } else {
            sigma *= 0.9;
        }
        sigma = sigma.clamp(1e-6, 1.0);
    }
    Ok(best_score.max(0.0))
}

pub fn monte_carlo_lower(params: &KernelParams, n: u64, x: f64, p: LpExponent, trials: usize, seed: u64) -> Result<f64> {
    Ok(monte_carlo_lower_scaled(params, n, x, p, trials, seed)? * log_scale(params, n).exp())
}

/// Order-`K` projection of the Hölder extremal `|g − λ|^{p′−1} sign(g − λ)` of the
/// representer `g`; for `p = 1` a Fejér peak at the extremum of `g`.
fn holder_dual(functional: &[(f64, f64)], p: LpExponent, m: usize) -> Vec<(f64, f64)> {
    let order = functional.len() - 1;
    let g = spectral::synthesize(m, functional.iter().enumerate().map(|(k, &(u, v))| (k as u64, Complex64::new(u, -v))));
    let h: Vec<f64> = if p.is_one() {
        let (j, v) = g
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(j, v)| (j, *v))
            .unwrap_or((0, 1.0));
        let t0 = TAU * j as f64 / m as f64;
        let sign = v.signum();
        return (0..=order)
            .map(|k| {
                if k == 0 {
                    return (0.0, 0.0);
                }
                let w = sign * (1.0 - k as f64 / (order + 1) as f64);
                (w * (k as f64 * t0).cos(), w * (k as f64 * t0).sin())
            })
            .collect();
    } else {
        let q = p.conjugate();
        let mut sorted = g.clone();
        sorted.sort_by(f64::total_cmp);
        let lambda = if q.is_one() { sorted[m / 2] } else { 0.0 };
        let e = if q.is_infinite() { 1.0 } else { q.value() - 1.0 };
        g.iter().map(|v| (v - lambda).abs().powf(e) * (v - lambda).signum()).collect()
    };
    let spec = spectral::analyze(&h);
    let c = 2.0 / m as f64;
    (0..=order)
        .map(|k| if k == 0 { (0.0, 0.0) } else { (c * spec[k].re, -c * spec[k].im) })
        .collect()
}

/// `𝒥^{α,r}_β φ = (1/π) ∫ P_{α,r,β}(· − t) φ(t) dt` for a trigonometric polynomial `φ`.
pub fn poisson_integral(params: &KernelParams, phi: &TrigPoly) -> TrigPoly {
    let (s, c) = params.phase_shift().sin_cos();
    let order = phi.order();
    let mut out = TrigPoly::zero(order);
    for k in 1..=order {
        let (a, b) = phi.coefficient(k);
        let w = params.weight(k as f64);
        out.a[k - 1] = w * (a * c - b * s);
        out.b[k - 1] = w * (a * s + b * c);
    }
    out
}

/// Zero-mean `φ*` with `‖φ*‖₂ = 1` attaining the `p = 2` class supremum at `x`
/// up to truncation of its spectrum.
pub fn witness_p2(params: &KernelParams, n: u64, x: f64) -> Result<PeriodicFn> {
    check_n(n)?;
    if sin_factor(n, x) == 0.0 {
        return Ok(TrigPoly::zero(0).into());
    }
    let nf = n as f64;
    let mut order = n;
    while params.relative_weight(order as f64, nf) > 1e-12 {
        order += 1;
        if order - n > crate::kernels::MAX_TERMS {
            return Err(Error::NoConvergence {
                solver: "witness truncation",
                iterations: order as usize,
                residual: params.relative_weight(order as f64, nf),
            });
        }
    }
    let functional = deviation_functional(params, n, x, order);
    let energy: f64 = functional.iter().map(|(u, v)| u * u + v * v).sum();
    let c = 1.0 / (PI * energy).sqrt();
    let poly = TrigPoly {
        a0: 0.0,
        a: functional[1..].iter().map(|(u, _)| c * u).collect(),
        b: functional[1..].iter().map(|(_, v)| c * v).collect(),
    };
    Ok(poly.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    RLt1,
    REq1,
    RGt1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PCase {
    PEq1,
    PIn1Inf,
    PEqInf,
}

/// Cell of the Kolmogorov–Nikolsky table for `(r, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeConstants {
    pub regime: Regime,
    pub p_case: PCase,
    /// Bound on the unknown remainder coefficient of the certified estimate,
    /// when one exists (`r < 1` only).
    pub remainder_coeff_bound: Option<f64>,
}

impl RegimeConstants {
    pub fn classify(params: &KernelParams, p: LpExponent) -> Self {
        let regime = if params.r < 1.0 {
            Regime::RLt1
        } else if params.r == 1.0 {
            Regime::REq1
        } else {
            Regime::RGt1
        };
        let p_case = if p.is_one() {
            PCase::PEq1
        } else if p.is_infinite() {
            PCase::PEqInf
        } else {
            PCase::PIn1Inf
        };
        Self {
            regime,
            p_case,
            remainder_coeff_bound: (regime == Regime::RLt1).then_some(FORTY_PI4),
        }
    }

    /// `A_n` of `Ẽ_n = e^{-αn^r}|sin((2n−1)x/2)|(A_n + o(A_n))`.
    pub fn main_term(&self, params: &KernelParams, p: LpExponent, n: u64) -> Result<f64> {
        check_n(n)?;
        let KernelParams { alpha, r, .. } = *params;
        let nf = n as f64;
        let ar = alpha * r;
        let q = p.conjugate();
        Ok(match (self.regime, self.p_case) {
            (Regime::RLt1, PCase::PEqInf) => 8.0 / (PI * PI) * (1.0 - r) * nf.ln(),
            (Regime::RLt1, PCase::PIn1Inf) => {
                nf.powf((1.0 - r) / p.value()) * 2.0 * interior_constant(p, q)?
                    / (PI.powf(1.0 + 1.0 / q.value()) * ar.powf(1.0 / p.value()))
            }
            (Regime::RLt1, PCase::PEq1) => nf.powf(1.0 - r) * 2.0 / (PI * ar),
            (Regime::REq1, PCase::PEqInf) => 16.0 / (PI * PI) * elliptic_k((-alpha).exp())?.value,
            (Regime::REq1, PCase::PIn1Inf) => {
                let qv = q.value();
                let f = hyp2f1(qv / 2.0, qv / 2.0, 1.0, (-2.0 * alpha).exp())?.value;
                2.0 * cos_norm(q).value / PI * f.powf(1.0 / qv)
            }
            (Regime::REq1, PCase::PEq1) => 2.0 / (PI * -(-alpha).exp_m1()),
            (Regime::RGt1, PCase::PEqInf) => 8.0 / PI,
            (Regime::RGt1, PCase::PIn1Inf) => 2.0 * cos_norm(q).value / PI,
            (Regime::RGt1, PCase::PEq1) => 2.0 / PI,
        })
    }
}

/// `‖cos‖_{p′} F^{1/p′}(1/2, (3−p′)/2; 3/2; 1)`.
fn interior_constant(p: LpExponent, q: LpExponent) -> Result<f64> {
    debug_assert!(!p.is_one() && !p.is_infinite());
    let qv = q.value();
    let f = hyp2f1(0.5, (3.0 - qv) / 2.0, 1.5, 1.0)?.value;
    Ok(cos_norm(q).value * f.powf(1.0 / qv))
}

/// The Kolmogorov–Nikolsky constant `A_n` for `(α, r, p)` and order `n`.
pub fn kn_main_term(params: &KernelParams, p: LpExponent, n: u64) -> Result<f64> {
    RegimeConstants::classify(params, p).main_term(params, p, n)
}

fn check_r_lt_1(params: &KernelParams) -> Result<()> {
    if params.r > 0.0 && params.r < 1.0 {
        Ok(())
    } else {
        Err(domain("r", params.r, "0 < r < 1"))
    }
}

/// `n^{power}`, the main constant and the remainder bracket of the estimates for `r ∈ (0, 1)`.
fn estimate_parts(params: &KernelParams, p: LpExponent, n: u64, half: bool) -> Result<(f64, f64, f64)> {
    let KernelParams { alpha, r, .. } = *params;
    let ar = alpha * r;
    let nf = n as f64;
    let k = if half { 0.5 } else { 1.0 };
    Ok(if p.is_infinite() {
        (1.0, k * 8.0 / (PI * PI) * (nf.powf(1.0 - r) / ar).ln(), 1.0)
    } else if p.is_one() {
        (
            nf.powf(1.0 - r),
            k * 2.0 / (PI * ar),
            1.0 / nf.powf(1.0 - r) + 1.0 / (ar * ar * nf.powf(r)),
        )
    } else {
        let q = p.conjugate();
        let (pv, qv) = (p.value(), q.value());
        let main = k * 2.0 * interior_constant(p, q)? / (PI.powf(1.0 + 1.0 / qv) * ar.powf(1.0 / pv));
        let bracket = (1.0 + ar.powf((qv - 1.0) / pv) / (qv - 1.0)) / nf.powf((1.0 - r) / pv)
            + pv.powf(1.0 / qv) / (ar.powf(1.0 + 1.0 / pv) * nf.powf(r));
        (nf.powf((1.0 - r) / pv), main, bracket)
    })
}

/// Band `e^{-αn^r} n^{·}|sin((2n−1)x/2)|(A ± 40π⁴·bracket)` for `r ∈ (0, 1)`,
/// relative to `e^{-αn^r}`; `applicable` iff `n ≥ n_*(α, r, p)`.
pub fn theorem4_estimate_scaled(params: &KernelParams, p: LpExponent, n: u64, x: f64) -> Result<EstimateBand> {
    check_r_lt_1(params)?;
    check_n(n)?;
    let (power, main, bracket) = estimate_parts(params, p, n, false)?;
    let s = sin_factor(n, x);
    let applicable = match threshold(params, p, Threshold::NStar) {
        Ok(t) => n >= t,
        Err(Error::ThresholdOverflow) => false,
        Err(e) => return Err(e),
    };
    Ok(EstimateBand {
        center: power * s * main,
        half_width: power * s * FORTY_PI4 * bracket,
        n_used: n,
        applicable,
        log_scale: log_scale(params, n),
    })
}

pub fn theorem4_estimate(params: &KernelParams, p: LpExponent, n: u64, x: f64) -> Result<EstimateBand> {
    Ok(theorem4_estimate_scaled(params, p, n, x)?.rescaled(0.0))
}

/// Upper bound for `|ρ̃_n(f; x)|` in terms of `E_n(f^{α,r}_β)_{L_p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LebesgueTypeBound {
    pub value: f64,
    /// Whether `n ≥ n_*(α, r, p)`, the range in which the bound is proven.
    pub certified: bool,
    pub log_scale: f64,
}

/// `2e^{-αn^r} n^{·}|sin((2n−1)x/2)|(C + 20π⁴·bracket) E_n`, relative to `e^{-αn^r}`.
pub fn lebesgue_type_bound_scaled(
    params: &KernelParams,
    p: LpExponent,
    n: u64,
    x: f64,
    en_value: f64,
) -> Result<LebesgueTypeBound> {
    check_r_lt_1(params)?;
    check_n(n)?;
    if !(en_value >= 0.0) {
        return Err(domain("En_value", en_value, "En_value >= 0"));
    }
    let (power, main, bracket) = estimate_parts(params, p, n, true)?;
    let certified = matches!(threshold(params, p, Threshold::NStar), Ok(t) if n >= t);
    let value = if en_value == 0.0 {
        0.0
    } else {
        2.0 * power * sin_factor(n, x) * (main + TWENTY_PI4 * bracket) * en_value
    };
    Ok(LebesgueTypeBound {
        value,
        certified,
        log_scale: log_scale(params, n),
    })
}

pub fn lebesgue_type_bound(params: &KernelParams, p: LpExponent, n: u64, x: f64, en_value: f64) -> Result<LebesgueTypeBound> {
    let b = lebesgue_type_bound_scaled(params, p, n, x, en_value)?;
    Ok(LebesgueTypeBound {
        value: b.value * b.log_scale.exp(),
        log_scale: 0.0,
        ..b
    })
}
