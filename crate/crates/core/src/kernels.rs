//! The generalized Poisson kernel `P_{α,r,β}(t) = Σ_{k≥1} e^{-αk^r} cos(kt − βπ/2)`,
//! its tails, the interpolation remainder `r_n`, and the threshold numbers.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_tol, domain, Error, Result};
use crate::specfun::compensated_sum;
use crate::spectral;
use crate::value::{CertifiedValue, LpExponent, Provenance};

/// Longest series the evaluators are willing to sum term by term.
pub const MAX_TERMS: u64 = 50_000_000;

/// Decay coefficient `alpha`, decay exponent `r` and phase `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    pub alpha: f64,
    pub r: f64,
    pub beta: f64,
}

impl KernelParams {
    pub fn new(alpha: f64, r: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain("alpha", alpha, "alpha > 0"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(domain("r", r, "r > 0"));
        }
        if !beta.is_finite() {
            return Err(domain("beta", beta, "finite beta"));
        }
        Ok(Self { alpha, r, beta })
    }

    /// `e^{-αk^r}`.
    pub fn weight(&self, k: f64) -> f64 {
        (-self.alpha * k.powf(self.r)).exp()
    }

    /// `e^{-α(k^r − n^r)}`, i.e. the weight relative to index `n`.
    pub fn relative_weight(&self, k: f64, n: f64) -> f64 {
        (-self.alpha * pow_diff(k, n, self.r)).exp()
    }

    pub fn phase_shift(&self) -> f64 {
        self.beta * FRAC_PI_2
    }
}

/// `k^r − n^r` without cancellation.
pub fn pow_diff(k: f64, n: f64, r: f64) -> f64 {
    if k == n {
        0.0
    } else if n == 0.0 {
        k.powf(r)
    } else {
        n.powf(r) * (r * ((k - n) / n).ln_1p()).exp_m1()
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Bounds on `ln(∫_m^∞ t^δ e^{-αt^r} dt) + α·reference^r`, from the
/// elementary inequalities for the upper incomplete Gamma function.
pub(crate) fn ln_integral_bounds(alpha: f64, r: f64, delta: f64, m: f64, reference: f64) -> (f64, f64) {
    let s = (delta + 1.0) / r;
    let x = alpha * m.powf(r);
    let shifted = -alpha * pow_diff(m, reference, r);
    // ln(x^{s-1} e^{-x}) relative to the reference, then ln(1/r) − s ln α
    let core = (s - 1.0) * x.ln() + shifted - r.ln() - s * alpha.ln();
    let (lo, hi) = if s <= 1.0 {
        (core - ((1.0 - s) / x).ln_1p(), core)
    } else if x > s - 1.0 + 1e-9 {
        (core, core - (-(s - 1.0) / x).ln_1p())
    } else {
        let full = crate::specfun::ln_gamma(s) - r.ln() - s * alpha.ln() + alpha * reference.powf(r);
        (f64::NEG_INFINITY, full)
    };
    // absorb rounding in the logarithms
    let slack = 1e-12 * (1.0 + core.abs());
    (lo - slack, hi + slack)
}

/// Upper bound on `ln Σ_{k≥m} e^{-αk^r} + α·reference^r`.
pub(crate) fn ln_tail_upper(alpha: f64, r: f64, m: f64, reference: f64) -> f64 {
    let first = -alpha * pow_diff(m, reference, r);
    let (_, integral) = ln_integral_bounds(alpha, r, 0.0, m, reference);
    log_add_exp(first, integral) + 1e-12 * (1.0 + first.abs())
}

/// Least `M ≥ start` with `Σ_{k>M} e^{-αk^r} ≤ e^{ln_target − α·reference^r}`.
fn truncation_index(alpha: f64, r: f64, start: u64, reference: f64, ln_target: f64) -> Option<u64> {
    let ok = |m: u64| ln_tail_upper(alpha, r, m as f64 + 1.0, reference) <= ln_target;
    if ok(start) {
        return Some(start);
    }
    let mut lo = start;
    let mut step = 1u64;
    let mut hi = loop {
        let cand = start.checked_add(step)?;
        if cand > start + MAX_TERMS {
            return None;
        }
        if ok(cand) {
            break cand;
        }
        lo = cand;
        step *= 2;
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn sum_rounding(terms: u64, abs_sum: f64, sum: f64) -> f64 {
    4.0 * f64::EPSILON * sum.abs() + (terms as f64 * f64::EPSILON).powi(2) * abs_sum + 4.0 * f64::EPSILON * abs_sum
}

fn too_long(tol: f64) -> Error {
    Error::NoConvergence {
        solver: "series truncation",
        iterations: MAX_TERMS as usize,
        residual: tol,
    }
}

/// Absolute weights `e^{-αk^r}` for `k = 1..=M` and a bound on the omitted tail,
/// with `M` chosen so that the tail is at most `tol`.
pub(crate) fn kernel_weights(params: &KernelParams, tol: f64) -> Result<(Vec<f64>, f64)> {
    check_tol(tol)?;
    let KernelParams { alpha, r, .. } = *params;
    let m = truncation_index(alpha, r, 1, 0.0, tol.ln()).ok_or_else(|| too_long(tol))?;
    let weights = (1..=m).map(|k| params.weight(k as f64)).collect();
    Ok((weights, ln_tail_upper(alpha, r, m as f64 + 1.0, 0.0).exp()))
}

/// `P_{α,r,β}(t)` with a certified truncation error of at most `tol`.
pub fn kernel_eval(params: &KernelParams, t: f64, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    let KernelParams { alpha, r, .. } = *params;
    let ln_target = (0.5 * tol).ln();
    let m = truncation_index(alpha, r, 1, 0.0, ln_target).ok_or_else(|| too_long(tol))?;
    let shift = params.phase_shift();
    let mut term_err = 0.0;
    let (sum, abs_sum) = compensated_sum((1..=m).rev().map(|k| {
        let kf = k as f64;
        let w = params.weight(kf);
        term_err += w * (kf * t.abs() + shift.abs() + alpha * kf.powf(r) + 3.0);
        w * (kf * t - shift).cos()
    }));
    let tail = ln_tail_upper(alpha, r, m as f64 + 1.0, 0.0).exp();
    let rounding = f64::EPSILON * term_err + sum_rounding(m, abs_sum, sum);
    Ok(CertifiedValue::new(sum, tail + rounding, Provenance::SeriesTruncation))
}

/// `Σ_{k≥n} e^{-αk^r} cos(kt + ξ)`, stored relative to its leading weight `e^{-αn^r}`.
#[derive(Debug, Clone)]
pub struct TailSeries {
    pub params: KernelParams,
    pub start_index: u64,
    pub phase: f64,
    pub truncation_index: u64,
    /// Bounds the omitted terms plus the summation rounding, in absolute units.
    pub tail_bound: f64,
    tail_bound_scaled: f64,
    weights: Arc<[f64]>,
}

impl TailSeries {
    /// Truncates so that the omitted part is below `rel_tol · e^{-αn^r}`.
    pub fn new(params: KernelParams, start_index: u64, phase: f64, rel_tol: f64) -> Result<Self> {
        check_tol(rel_tol)?;
        if start_index == 0 {
            return Err(domain("n", 0.0, "n >= 1"));
        }
        let KernelParams { alpha, r, .. } = params;
        let n = start_index as f64;
        let m = truncation_index(alpha, r, start_index, n, (0.5 * rel_tol).ln()).ok_or_else(|| too_long(rel_tol))?;
        let weights: Arc<[f64]> = (start_index..=m).map(|k| params.relative_weight(k as f64, n)).collect();
        // rounding allowance for evaluation at |t| ≤ 2π
        let abs_sum: f64 = weights.iter().sum();
        let term_err: f64 = weights
            .iter()
            .enumerate()
            .map(|(j, w)| w * ((n + j as f64) * TAU + phase.abs() + alpha * pow_diff(n + j as f64, n, r) + 3.0))
            .sum();
        let tail = ln_tail_upper(alpha, r, m as f64 + 1.0, n).exp();
        let rounding = f64::EPSILON * term_err + sum_rounding(weights.len() as u64, abs_sum, abs_sum);
        let tail_bound_scaled = tail + rounding;
        Ok(Self {
            params,
            start_index,
            phase,
            truncation_index: m,
            tail_bound: tail_bound_scaled * params.weight(n),
            tail_bound_scaled,
            weights,
        })
    }

    /// `ln e^{-αn^r}`, the factor separating scaled from absolute values.
    pub fn log_scale(&self) -> f64 {
        -self.params.alpha * (self.start_index as f64).powf(self.params.r)
    }

    pub fn tail_bound_scaled(&self) -> f64 {
        self.tail_bound_scaled
    }

    /// Relative weights `e^{-α(k^r − n^r)}` for `k = n..=M`.
    pub fn relative_weights(&self) -> &[f64] {
        &self.weights
    }

    /// The series value divided by `e^{-αn^r}`.
    pub fn eval_scaled(&self, t: f64) -> f64 {
        let n = self.start_index;
        compensated_sum(
            self.weights
                .iter()
                .enumerate()
                .rev()
                .map(|(j, w)| w * ((n + j as u64) as f64 * t + self.phase).cos()),
        )
        .0
    }

    /// Cosine and sine coefficients of `e^{-αk^r} cos(kt + ξ)`, relative to `e^{-αn^r}`.
    pub fn coefficient_scaled(&self, k: u64) -> (f64, f64) {
        if k < self.start_index || k > self.truncation_index {
            return (0.0, 0.0);
        }
        let w = self.weights[(k - self.start_index) as usize];
        (w * self.phase.cos(), -w * self.phase.sin())
    }

    /// Scaled values at `t_j = 2πj/m`; the truncated part is aliased exactly.
    pub fn sample_scaled(&self, m: usize) -> Vec<f64> {
        let n = self.start_index;
        let rot = Complex64::from_polar(1.0, self.phase);
        spectral::synthesize(
            m,
            self.weights.iter().enumerate().map(|(j, &w)| (n + j as u64, rot * w)),
        )
    }
}

/// `Σ_{k≥n} e^{-αk^r} cos(kt + ξ)` with error at most `series.tail_bound`.
pub fn tail_cos_eval(series: &TailSeries, t: f64) -> CertifiedValue {
    let scale = series.log_scale().exp();
    CertifiedValue::new(series.eval_scaled(t) * scale, series.tail_bound, Provenance::SeriesTruncation)
}

/// `γ_n = ((2n−1)x + π(β−1))/2`.
pub fn gamma_n(beta: f64, x: f64, n: u64) -> f64 {
    ((2.0 * n as f64 - 1.0) * x + PI * (beta - 1.0)) / 2.0
}

/// First index `(2k+1)n − k` of the `k`-th inner block of `r_n`.
fn block_start(n: u64, k: u64) -> f64 {
    (2 * n - 1) as f64 * k as f64 + n as f64
}

/// Upper bound on `ln Σ_{j≥K} Σ_{ν≥m_j} e^{-αν^r} + α·reference^r`.
fn ln_outer_tail_upper(alpha: f64, r: f64, n: u64, k: u64, reference: f64) -> f64 {
    let m = block_start(n, k);
    let first = ln_tail_upper(alpha, r, m, reference);
    let (_, i0) = ln_integral_bounds(alpha, r, 0.0, m, reference);
    let (_, i1) = ln_integral_bounds(alpha, r, 1.0, m, reference);
    let rest = log_add_exp(i0, i1) - ((2 * n - 1) as f64).ln();
    log_add_exp(first, rest) + 1e-12 * (1.0 + first.abs())
}

/// The remainder
/// `r_n(t) = Σ_{k≥1} Σ_{ν≥(2k+1)n−k} e^{-αν^r} sin(νt + (k+½)(2n−1)x + βπ/2)`.
pub fn remainder_rn(params: &KernelParams, x: f64, n: u64, t: f64, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    if n == 0 {
        return Err(domain("n", 0.0, "n >= 1"));
    }
    let KernelParams { alpha, r, .. } = *params;
    let ln_half = (0.5 * tol).ln();
    let stride = (2 * n - 1) as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    let mut term_err = 0.0;
    let mut err = 0.0;
    let mut terms = 0u64;
    let mut k = 1u64;
    loop {
        let outer = ln_outer_tail_upper(alpha, r, n, k, 0.0);
        if outer <= ln_half {
            err += outer.exp();
            break;
        }
        let m = block_start(n, k) as u64;
        let budget = ln_half - (k as f64 + 1.0) * std::f64::consts::LN_2;
        let stop = truncation_index(alpha, r, m, 0.0, budget).ok_or_else(|| too_long(tol))?;
        terms += stop - m + 1;
        if terms > MAX_TERMS {
            return Err(too_long(tol));
        }
        let offset = (k as f64 + 0.5) * stride * x + params.phase_shift();
        let (block, block_abs) = compensated_sum((m..=stop).rev().map(|nu| {
            let nf = nu as f64;
            let w = params.weight(nf);
            term_err += w * (nf * t.abs() + offset.abs() * 2.0 + alpha * nf.powf(r) + 3.0);
            w * (nf * t + offset).sin()
        }));
        let next = sum + block;
        comp += if sum.abs() >= block.abs() { (sum - next) + block } else { (block - next) + sum };
        sum = next;
        abs_sum += block_abs;
        err += ln_tail_upper(alpha, r, stop as f64 + 1.0, 0.0).exp();
        k += 1;
    }
    let sum = sum + comp;
    err += f64::EPSILON * term_err + sum_rounding(terms, abs_sum, sum);
    Ok(CertifiedValue::new(sum, err, Provenance::SeriesTruncation))
}

/// A nonnegative quantity stored as `value · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledBound {
    pub value: f64,
    pub abs_err: f64,
    pub log_scale: f64,
}

impl ScaledBound {
    pub fn upper(&self) -> f64 {
        self.value + self.abs_err
    }

    /// Re-expresses the bound relative to `e^{new_scale}`.
    pub fn rescaled(&self, new_scale: f64) -> Self {
        let f = (self.log_scale - new_scale).exp();
        Self {
            value: self.value * f,
            abs_err: self.abs_err * f,
            log_scale: new_scale,
        }
    }
}

/// The double sum `Σ_{k≥1} Σ_{ν≥(2k+1)n−k} e^{-αν^r}` that bounds `sup_t |r_n(t)|`,
/// relative to `e^{-α(3n−1)^r}`.
pub fn remainder_sup_bound(params: &KernelParams, n: u64) -> Result<ScaledBound> {
    if n == 0 {
        return Err(domain("n", 0.0, "n >= 1"));
    }
    let KernelParams { alpha, r, .. } = *params;
    let m1 = block_start(n, 1);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut terms = 0u64;
    let mut k = 1u64;
    loop {
        let mk = block_start(n, k);
        let outer = ln_outer_tail_upper(alpha, r, n, k, m1).exp();
        if outer <= 1e-17 * total {
            err += outer;
            break;
        }
        let mut j = 0u64;
        let mut block = 0.0;
        loop {
            let term = (-alpha * pow_diff(mk + j as f64, m1, r)).exp();
            block += term;
            j += 1;
            terms += 1;
            if j % 64 == 0 || term == 0.0 {
                let rest = ln_tail_upper(alpha, r, mk + j as f64, m1).exp();
                if rest <= 1e-17 * (total + block) || terms > MAX_TERMS {
                    err += rest;
                    break;
                }
            }
        }
        total += block;
        if terms > MAX_TERMS {
            err += ln_outer_tail_upper(alpha, r, n, k + 1, m1).exp();
            break;
        }
        k += 1;
    }
    err += 2.0 * (terms as f64 + 1.0) * f64::EPSILON * total;
    Ok(ScaledBound {
        value: total,
        abs_err: err,
        log_scale: -alpha * m1.powf(r),
    })
}

/// `∫_m^∞ e^{-αt^r} t^δ dt` as its main term `e^{-αm^r} m^{δ+1−r}/(αr)` with the
/// two-sided relative band `(14/13)|δ+1−r|/(αr m^r)`.
pub fn exp_power_integral(m: u64, alpha: f64, r: f64, delta: f64) -> Result<CertifiedValue> {
    if m == 0 {
        return Err(domain("m", 0.0, "m >= 1"));
    }
    KernelParams::new(alpha, r, 0.0)?;
    let gap = (delta + 1.0 - r).abs();
    let floor = (14.0 * gap / (alpha * r)).powf(1.0 / r);
    let mf = m as f64;
    if mf < floor {
        return Err(domain("m", mf, "m >= (14|delta+1-r|/(alpha r))^(1/r)"));
    }
    let main = (-alpha * mf.powf(r)).exp() * mf.powf(delta + 1.0 - r) / (alpha * r);
    if gap == 0.0 {
        return Ok(CertifiedValue::exact(main));
    }
    let band = 14.0 / 13.0 * gap / (alpha * r * mf.powf(r));
    Ok(CertifiedValue::new(main, main * band, Provenance::SeriesTruncation))
}

/// Outcome of checking `Σ_k Σ_{ν≥(2k+1)n−k} e^{-αν^r} < (636/169) n^{1−r}/(αr) e^{-α(3n−1)^r}`.
///
/// `lhs` and `rhs` are both divided by `e^{-α(3n−1)^r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub lhs: CertifiedValue,
    pub rhs: f64,
    pub holds: bool,
    /// Whether `1/(αr n^r) + αr/n^{1−r} ≤ 1/14`.
    pub applicable: bool,
    pub log_scale: f64,
}

pub fn lemma1_admissible(params: &KernelParams, n: u64) -> bool {
    let KernelParams { alpha, r, .. } = *params;
    let nf = n as f64;
    r < 1.0 && 1.0 / (alpha * r * nf.powf(r)) + alpha * r / nf.powf(1.0 - r) <= 1.0 / 14.0
}

pub fn lemma1_check(params: &KernelParams, n: u64) -> Result<Lemma1Report> {
    let bound = remainder_sup_bound(params, n)?;
    let KernelParams { alpha, r, .. } = *params;
    let rhs = 636.0 / 169.0 * (n as f64).powf(1.0 - r) / (alpha * r);
    let lhs = CertifiedValue::new(bound.value, bound.abs_err, Provenance::SeriesTruncation);
    let applicable = lemma1_admissible(params, n);
    Ok(Lemma1Report {
        lhs,
        rhs,
        holds: applicable && lhs.upper() < rhs,
        applicable,
        log_scale: bound.log_scale,
    })
}

/// Which threshold number to locate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    NStar,
    N0,
    N1,
}

const SEARCH_LIMIT: u64 = 1 << 62;

fn threshold_rhs(p: LpExponent) -> f64 {
    let c = 1.0 / (3.0 * PI).powi(3);
    if p.is_one() {
        1.0 / 14.0
    } else if p.is_infinite() {
        c
    } else {
        c * (p.value() - 1.0) / p.value()
    }
}

fn chi(p: LpExponent) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        p.value()
    }
}

/// Least `n ≥ 1` satisfying the threshold inequality selected by `which`.
///
/// The criterion is `h1(n) + h2(n)` with `h2` decreasing and `h1` increasing
/// up to a known mode and decreasing after it. Below the mode the first
/// admissible `n` is found by branch and bound; past it the criterion is
/// monotone and bisection applies.
pub fn threshold(params: &KernelParams, p: LpExponent, which: Threshold) -> Result<u64> {
    let KernelParams { alpha, r, .. } = *params;
    if !(r > 0.0 && r < 1.0) {
        return Err(domain("r", r, "0 < r < 1"));
    }
    let ar = alpha * r;
    let (h1, h2, rhs, strict, mode): (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>, f64, bool, f64) =
        match which {
            Threshold::NStar => {
                let c = chi(p);
                (
                    Box::new(move |n: f64| (PI * n).ln() / (ar * n.powf(r))),
                    Box::new(move |n: f64| ar * c / n.powf(1.0 - r)),
                    threshold_rhs(p),
                    false,
                    ((1.0 / r).exp() / PI).ceil(),
                )
            }
            Threshold::N0 => {
                let c = chi(p);
                (
                    Box::new(move |n: f64| 1.0 / (ar * n.powf(r))),
                    Box::new(move |n: f64| ar * c / n.powf(1.0 - r)),
                    threshold_rhs(p),
                    false,
                    1.0,
                )
            }
            Threshold::N1 => {
                let c = 1.0 + (PI / ar).ln();
                let peak = ((1.0 - r) / r - c) / (1.0 - r);
                (
                    Box::new(move |n: f64| (c + (1.0 - r) * n.ln()) / (ar * n.powf(r))),
                    Box::new(move |n: f64| ar / n.powf(1.0 - r)),
                    1.0 / (3.0 * PI).powi(3),
                    true,
                    peak.max(0.0).exp().ceil(),
                )
            }
        };
    let holds = |n: u64| {
        let nf = n as f64;
        let g = h1(nf) + h2(nf);
        if strict {
            g < rhs
        } else {
            g <= rhs
        }
    };
    let mode = if mode.is_finite() && mode < SEARCH_LIMIT as f64 {
        (mode as u64).max(1)
    } else {
        SEARCH_LIMIT
    };
    // branch and bound on [1, mode): h1 is increasing there, h2 decreasing
    if mode > 1 {
        let mut stack = vec![(1u64, mode - 1)];
        while let Some((a, b)) = stack.pop() {
            let lower = h1(a as f64) + h2(b as f64);
            if lower > rhs || (strict && lower >= rhs) {
                continue;
            }
            if b - a <= 64 {
                if let Some(n) = (a..=b).find(|&n| holds(n)) {
                    return Ok(n);
                }
                continue;
            }
            let mid = a + (b - a) / 2;
            stack.push((mid + 1, b));
            stack.push((a, mid));
        }
    }
    if !holds(SEARCH_LIMIT) {
        return Err(Error::ThresholdOverflow);
    }
    if holds(mode) {
        return Ok(mode);
    }
    let (mut lo, mut hi) = (mode, SEARCH_LIMIT);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Least `n` with `1/(αr n^r) + αr/n^{1−r} ≤ 1/14`.
pub fn lemma1_least_admissible(params: &KernelParams) -> Result<u64> {
    threshold(params, LpExponent::ONE, Threshold::N0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn kp(alpha: f64, r: f64, beta: f64) -> KernelParams {
        KernelParams::new(alpha, r, beta).unwrap()
    }

    fn brute(params: &KernelParams, t: f64, terms: u64) -> f64 {
        (1..=terms)
            .rev()
            .map(|k| params.weight(k as f64) * (k as f64 * t - params.phase_shift()).cos())
            .sum()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(KernelParams::new(0.0, 1.0, 0.0).is_err());
        assert!(KernelParams::new(1.0, -1.0, 0.0).is_err());
        assert!(KernelParams::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn kernel_geometric_case() {
        let e = (-1f64).exp();
        let v = kernel_eval(&kp(1.0, 1.0, 0.0), 0.0, 1e-14).unwrap();
        assert!((v.value - e / (1.0 - e)).abs() < 1e-14);
        let v = kernel_eval(&kp(1.0, 1.0, 1.0), 0.0, 1e-14).unwrap();
        assert!(v.value.abs() < 1e-15);
        assert!(kernel_eval(&kp(1.0, 1.0, 0.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn kernel_matches_brute_force() {
        let params = kp(2.0, 0.5, 0.3);
        let v = kernel_eval(&params, 1.1, 1e-14).unwrap();
        assert!((v.value - brute(&params, 1.1, 1_000_000)).abs() < 1e-12);
        assert!(v.abs_err <= 1e-14);
    }

    #[test]
    fn tail_series_examples() {
        let e = (-1f64).exp();
        let s = TailSeries::new(kp(1.0, 1.0, 0.0), 1, 0.0, 1e-15).unwrap();
        let v = tail_cos_eval(&s, 0.0);
        assert!((v.value - e / (1.0 - e)).abs() <= v.abs_err + 1e-16);
        let s = TailSeries::new(kp(1.0, 1.0, 0.0), 5, FRAC_PI_2, 1e-15).unwrap();
        assert!(tail_cos_eval(&s, 0.0).value.abs() < 1e-16);
        let params = kp(1.5, 0.4, 0.0);
        let s = TailSeries::new(params, 3, 0.7, 1e-14).unwrap();
        let direct: f64 = (3..=1_000_000u64)
            .rev()
            .map(|k| params.weight(k as f64) * (k as f64 * 2.2 + 0.7).cos())
            .sum();
        let v = tail_cos_eval(&s, 2.2);
        assert!((v.value - direct).abs() <= v.abs_err, "{} vs {direct} ± {}", v.value, v.abs_err);
    }

    #[test]
    fn tail_samples_match_pointwise() {
        let s = TailSeries::new(kp(1.0, 0.5, 0.0), 4, 0.3, 1e-15).unwrap();
        let m = 64;
        for (j, v) in s.sample_scaled(m).iter().enumerate() {
            let t = std::f64::consts::TAU * j as f64 / m as f64;
            assert!((v - s.eval_scaled(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_n_examples() {
        assert_eq!(gamma_n(1.0, 0.0, 7), 0.0);
        assert_relative_eq!(gamma_n(0.0, 0.0, 3), -FRAC_PI_2);
        assert_relative_eq!(gamma_n(0.5, PI, 2), 1.25 * PI, max_relative = 1e-15);
    }

    /// `∫_m^∞ t^δ e^{-αt^r} dt` on panels sized to the local decay scale.
    fn integral_oracle(alpha: f64, r: f64, delta: f64, m: f64) -> f64 {
        let f = |t: f64| t.powf(delta) * (-alpha * t.powf(r)).exp();
        let mut a = m;
        let mut width = m.powf(1.0 - r) / (alpha * r);
        let first = f(m);
        let mut total = 0.0;
        while f(a) > 1e-40 * first {
            total += crate::quad::adaptive(f, a, a + width, 1e-16 * first * width).value;
            a += width;
            width *= 1.5;
        }
        total
    }

    #[test]
    fn incomplete_gamma_bounds_bracket_quadrature() {
        for &(alpha, r, delta, m) in &[(1.0, 0.5, 0.0, 30.0), (3.0, 0.5, 0.0, 100.0), (1.0, 0.5, 0.5, 50.0), (0.7, 1.6, 1.0, 3.0), (2.0, 0.3, 0.0, 5.0)] {
            let q = integral_oracle(alpha, r, delta, m);
            let (lo, hi) = ln_integral_bounds(alpha, r, delta, m, 0.0);
            assert!(lo.exp() <= q * (1.0 + 1e-9) && q <= hi.exp() * (1.0 + 1e-9), "{alpha} {r} {delta} {m}: {} {q} {}", lo.exp(), hi.exp());
        }
    }

    #[test]
    fn exp_power_integral_cases() {
        let v = exp_power_integral(10, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(v.provenance, Provenance::Exact);
        assert_relative_eq!(v.value, (-10f64).exp(), max_relative = 1e-15);
        for &(m, alpha, r, delta) in &[(1000u64, 3.0, 0.5, 0.0), (800, 1.0, 0.5, 0.5)] {
            let v = exp_power_integral(m, alpha, r, delta).unwrap();
            let q = integral_oracle(alpha, r, delta, m as f64);
            assert!((v.value - q).abs() <= v.abs_err, "{m}");
        }
        assert!(exp_power_integral(1, 1.0, 0.5, 0.0).is_err());
        // (14 · 1 / 0.5)^2 = 784 > 500
        assert!(exp_power_integral(500, 1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn remainder_at_origin_vanishes() {
        let v = remainder_rn(&kp(1.0, 0.5, 0.0), 0.0, 4, 0.0, 1e-12).unwrap();
        assert!(v.value.abs() <= v.abs_err);
    }

    #[test]
    fn remainder_within_double_sum() {
        let params = kp(1.0, 0.7, 0.4);
        let n = 5;
        let bound = remainder_sup_bound(&params, n).unwrap();
        let upper = bound.upper() * bound.log_scale.exp();
        for &t in &[0.0, 0.4, 1.9, 4.4] {
            let v = remainder_rn(&params, 0.8, n, t, 1e-14).unwrap();
            assert!(v.value.abs() <= upper + v.abs_err);
            assert!(v.abs_err <= 2e-14);
        }
    }

    #[test]
    fn remainder_matches_direct_double_sum() {
        let params = kp(0.8, 1.0, 0.25);
        let (n, x, t) = (3u64, 0.6, 1.3);
        let mut direct = 0.0;
        for k in 1..200u64 {
            let m = (2 * k + 1) * n - k;
            for nu in m..m + 200 {
                direct += params.weight(nu as f64)
                    * (nu as f64 * t + (k as f64 + 0.5) * (2 * n - 1) as f64 * x + params.phase_shift()).sin();
            }
        }
        let v = remainder_rn(&params, x, n, t, 1e-15).unwrap();
        assert!((v.value - direct).abs() < 1e-14 + v.abs_err);
    }

    #[test]
    fn sup_bound_matches_brute_force() {
        for &(alpha, r, n) in &[(3.0, 0.5, 921u64), (1.0, 0.5, 10), (0.5, 1.5, 3)] {
            let params = kp(alpha, r, 0.0);
            let b = remainder_sup_bound(&params, n).unwrap();
            let m1 = (3 * n - 1) as f64;
            let mut brute = 0.0;
            for nu in (3 * n - 1)..(3 * n - 1 + 2_000_000) {
                let nf = nu as f64;
                let count = ((nu - n) / (2 * n - 1)) as f64;
                brute += count * (-alpha * pow_diff(nf, m1, r)).exp();
            }
            assert!((b.value - brute).abs() <= b.abs_err + 1e-12 * brute, "{alpha} {r} {n}: {} {brute}", b.value);
        }
    }

    #[test]
    fn double_sum_bound_holds_at_least_admissible() {
        let params = kp(3.0, 0.5, 0.0);
        assert_eq!(lemma1_least_admissible(&params).unwrap(), 921);
        assert!(!lemma1_admissible(&params, 920));
        let rep = lemma1_check(&params, 921).unwrap();
        assert!(rep.applicable && rep.holds, "{rep:?}");
        assert!(lemma1_check(&params, 2000).unwrap().holds);
        let early = lemma1_check(&params, 100).unwrap();
        assert!(!early.applicable && !early.holds);
    }

    #[test]
    fn thresholds_are_first_true() {
        let cases = [
            (kp(3.0, 0.5, 0.0), LpExponent::ONE, Threshold::NStar),
            (kp(3.0, 0.5, 0.0), LpExponent::ONE, Threshold::N0),
            (kp(1.0, 0.5, 0.0), LpExponent::TWO, Threshold::N0),
            (kp(2.0, 0.3, 0.0), LpExponent::ONE, Threshold::NStar),
            (kp(1.0, 0.5, 0.0), LpExponent::INFINITY, Threshold::N1),
        ];
        for (params, p, which) in cases {
            let n = threshold(&params, p, which).unwrap();
            let again = |m: u64| threshold_holds(&params, p, which, m);
            assert!(again(n), "{which:?}");
            let lo = n.saturating_sub(2000).max(1);
            assert!((lo..n).all(|m| !again(m)), "{which:?} {n}");
        }
        assert!(threshold(&kp(1.0, 1.0, 0.0), LpExponent::ONE, Threshold::NStar).is_err());
    }

    fn threshold_holds(params: &KernelParams, p: LpExponent, which: Threshold, n: u64) -> bool {
        let (a, r) = (params.alpha * params.r, params.r);
        let nf = n as f64;
        match which {
            Threshold::NStar => (PI * nf).ln() / (a * nf.powf(r)) + a * chi(p) / nf.powf(1.0 - r) <= threshold_rhs(p),
            Threshold::N0 => 1.0 / (a * nf.powf(r)) + a * chi(p) / nf.powf(1.0 - r) <= threshold_rhs(p),
            Threshold::N1 => {
                (1.0 + (PI * nf.powf(1.0 - r) / a).ln()) / (a * nf.powf(r)) + a / nf.powf(1.0 - r)
                    < 1.0 / (3.0 * PI).powi(3)
            }
        }
    }

    #[test]
    fn n1_not_above_nstar_inf() {
        for &(alpha, r) in &[(1.0, 0.5), (3.0, 0.5), (2.0, 0.3), (0.5, 0.7)] {
            let params = kp(alpha, r, 0.0);
            let n1 = threshold(&params, LpExponent::INFINITY, Threshold::N1).unwrap();
            let ns = threshold(&params, LpExponent::INFINITY, Threshold::NStar).unwrap();
            assert!(n1 <= ns, "{alpha} {r}: {n1} {ns}");
        }
    }
}
