//! `L_p` norms of periodic functions, best approximation by trigonometric
//! polynomials of order `n−1`, and the constant-shift problem `inf_λ ‖g − λ‖_q`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{check_tol, Error, Result};
use crate::trig::{fourier_partial_sum, PeriodicFn, TrigPoly};
use crate::value::{CertifiedValue, LpExponent, Provenance};

const MIN_SAMPLES: usize = 256;
const MAX_SAMPLES: usize = 1 << 22;
const GOLDEN_STEPS: usize = 80;

/// `(∫_0^{2π} |v|^p)^{1/p}` from uniform samples (or `max |v|` for `p = ∞`).
pub fn lp_norm_samples(values: &[f64], p: LpExponent) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let h = TAU / values.len() as f64;
    let p = p.value();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    scale * (h * s).powf(1.0 / p)
}

/// Maximizes `sign · g` on `[t − h, t + h]` by golden-section search.
fn refine_extremum(g: &dyn Fn(f64) -> f64, t: f64, h: f64, sign: f64) -> (f64, f64) {
    let inv = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (t - h, t + h);
    let mut c = b - inv * (b - a);
    let mut d = a + inv * (b - a);
    let (mut fc, mut fd) = (sign * g(c), sign * g(d));
    for _ in 0..GOLDEN_STEPS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv * (b - a);
            fc = sign * g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv * (b - a);
            fd = sign * g(d);
        }
        if b - a < 1e-15 * (1.0 + t.abs()) {
            break;
        }
    }
    let ft = sign * g(t);
    let (best_t, best) = if fc >= fd { (c, fc) } else { (d, fd) };
    if ft > best {
        (t, sign * ft)
    } else {
        (best_t, sign * best)
    }
}

/// Indices of cyclic local maxima of `sign · v`.
fn local_extrema(values: &[f64], sign: f64) -> Vec<usize> {
    let m = values.len();
    (0..m)
        .filter(|&j| {
            let v = sign * values[j];
            let prev = sign * values[(j + m - 1) % m];
            let next = sign * values[(j + 1) % m];
            v >= prev && v > next
        })
        .collect()
}

fn sample_count(f: &PeriodicFn, floor: usize) -> usize {
    let order = f.spectral_order().unwrap_or(0).min(1 << 18);
    (16 * order).max(floor).next_power_of_two()
}

/// `max |f|` with local refinement of the largest grid extrema; the error bar
/// is the larger of the refinement step and `tol`.
fn sup_norm(f: &PeriodicFn, tol: f64) -> CertifiedValue {
    let m = sample_count(f, 4096);
    let values = f.sample(m);
    let h = TAU / m as f64;
    let g = |t: f64| f.eval(t);
    let mut candidates: Vec<(f64, usize, f64)> = Vec::new();
    for sign in [1.0, -1.0] {
        for j in local_extrema(&values, sign) {
            candidates.push((sign * values[j], j, sign));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let grid_max = candidates.first().map_or(0.0, |c| c.0).max(0.0);
    let mut best = grid_max;
    for &(_, j, sign) in candidates.iter().take(8) {
        let (_, v) = refine_extremum(&g, h * j as f64, h, sign);
        best = best.max(sign * v);
    }
    CertifiedValue::new(best, tol.max(best - grid_max).max(0.0), Provenance::Quadrature)
}

/// `‖f‖_p` over one period; for `p < ∞` the uniform rule is refined by
/// doubling until two levels differ by at most `tol/4`.
pub fn lp_norm(f: &PeriodicFn, p: LpExponent, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    if p.is_infinite() {
        return Ok(sup_norm(f, tol));
    }
    let mut m = sample_count(f, MIN_SAMPLES);
    let mut prev = lp_norm_samples(&f.sample(m), p);
    loop {
        m *= 2;
        let next = lp_norm_samples(&f.sample(m), p);
        let diff = (next - prev).abs();
        if diff <= 0.25 * tol || m >= MAX_SAMPLES {
            return Ok(CertifiedValue::new(next, diff, Provenance::Quadrature));
        }
        prev = next;
    }
}

/// Minimizer and minimum of `λ ↦ ‖g − λ‖_q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfShift {
    pub lambda: f64,
    pub value: f64,
}

/// `inf_λ` over uniform samples; `q = ∞` uses the grid extremes only.
pub fn inf_shift_samples(values: &[f64], q: LpExponent) -> InfShift {
    let h = TAU / values.len() as f64;
    if q.is_infinite() {
        let (lo, hi) = min_max(values);
        return InfShift {
            lambda: 0.5 * (lo + hi),
            value: 0.5 * (hi - lo),
        };
    }
    if q.is_one() {
        let mut sorted = values.to_vec();
        let mid = sorted.len() / 2;
        let (_, &mut lambda, _) = sorted.select_nth_unstable_by(mid, f64::total_cmp);
        let value = h * values.iter().map(|v| (v - lambda).abs()).sum::<f64>();
        return InfShift { lambda, value };
    }
    let q = q.value();
    let (lo, hi) = min_max(values);
    let scale = (hi - lo).max(f64::MIN_POSITIVE);
    // derivative of Σ|v−λ|^q in λ, up to the factor −q; decreasing in λ
    let slope = |lambda: f64| -> (f64, f64) {
        let mut d = 0.0;
        let mut dd = 0.0;
        for v in values {
            let e = (v - lambda) / scale;
            let a = e.abs();
            if a > 0.0 {
                d += a.powf(q - 1.0) * e.signum();
                dd += a.powf(q - 2.0);
            }
        }
        (d, (q - 1.0) * dd / scale)
    };
    let (mut a, mut b) = (lo, hi);
    let mut lambda = values.iter().sum::<f64>() / values.len() as f64;
    for _ in 0..200 {
        let (d, dd) = slope(lambda);
        if d == 0.0 || (d / dd).abs() <= 1e-16 * scale {
            break;
        }
        if d > 0.0 {
            a = lambda;
        } else {
            b = lambda;
        }
        if (b - a) <= 1e-15 * scale {
            break;
        }
        let newton = lambda + d / dd;
        lambda = if dd.is_finite() && dd > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    let value = scale * (h * values.iter().map(|v| ((v - lambda) / scale).abs().powf(q)).sum::<f64>()).powf(1.0 / q);
    InfShift { lambda, value }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// `inf_λ ‖g − λ‖_q`, doubling the sample count until the value is stable to `tol`.
pub fn inf_shift(g: &PeriodicFn, q: LpExponent, tol: f64) -> Result<InfShift> {
    check_tol(tol)?;
    if q.is_infinite() {
        let hi = signed_extreme(g, 1.0);
        let lo = -signed_extreme(g, -1.0);
        return Ok(InfShift {
            lambda: 0.5 * (hi + lo),
            value: 0.5 * (hi - lo),
        });
    }
    let mut m = sample_count(g, 1024);
    let mut prev = inf_shift_samples(&g.sample(m), q);
    loop {
        m *= 2;
        let next = inf_shift_samples(&g.sample(m), q);
        if (next.value - prev.value).abs() <= tol || m >= MAX_SAMPLES {
            return Ok(next);
        }
        prev = next;
    }
}

/// `max (sign · g)` with refinement of the best grid candidates.
fn signed_extreme(g: &PeriodicFn, sign: f64) -> f64 {
    let m = sample_count(g, 4096);
    let values = g.sample(m);
    let h = TAU / m as f64;
    let mut idx = local_extrema(&values, sign);
    idx.sort_by(|&a, &b| (sign * values[b]).total_cmp(&(sign * values[a])));
    let eval = |t: f64| g.eval(t);
    let mut best = idx.first().map_or(sign * values[0], |&j| sign * values[j]);
    for &j in idx.iter().take(6) {
        let (_, v) = refine_extremum(&eval, h * j as f64, h, sign);
        best = best.max(sign * v);
    }
    best
}

/// Iteration caps for the best-approximation solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub remez_max_iter: usize,
    pub descent_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            remez_max_iter: 200,
            descent_max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    ParsevalExact,
    Equioscillation,
    KktResidual,
}

/// Optimality evidence: Parseval identity, equioscillation defect
/// `max|e| − |h|`, or a stationarity residual (the Newton-decrement estimate
/// of the relative gap for `1 < p < ∞`, the normalized subgradient for `p = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub residual: f64,
    /// Number of alternation points of the final residual (`p = ∞` only).
    pub alternations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestApproxResult {
    pub value: f64,
    pub minimizer: TrigPoly,
    pub certificate: Certificate,
    pub iterations: usize,
}

/// `E_n(f)_{L_p}`, the distance from `f` to polynomials of order `n−1`.
pub fn best_approx(f: &PeriodicFn, n: usize, p: LpExponent, tol: f64) -> Result<BestApproxResult> {
    best_approx_with(f, n, p, tol, &SolverConfig::default())
}

pub fn best_approx_with(
    f: &PeriodicFn,
    n: usize,
    p: LpExponent,
    tol: f64,
    config: &SolverConfig,
) -> Result<BestApproxResult> {
    check_tol(tol)?;
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let kind = if p.value() == 2.0 {
        CertificateKind::ParsevalExact
    } else if p.is_infinite() {
        CertificateKind::Equioscillation
    } else {
        CertificateKind::KktResidual
    };
    if let Some(poly) = f.as_poly() {
        if poly.degree() < n {
            return Ok(BestApproxResult {
                value: 0.0,
                minimizer: poly.truncated(n - 1),
                certificate: Certificate {
                    kind,
                    residual: 0.0,
                    alternations: 0,
                },
                iterations: 0,
            });
        }
    }
    if p.value() == 2.0 {
        return Ok(best_l2(f, n, tol));
    }
    let problem = Problem::new(f, n);
    let start = problem.least_squares(&DVector::from_element(problem.samples.len(), 1.0));
    let resid = problem.residual(&start);
    let f_scale = lp_norm_samples(&problem.samples, LpExponent::INFINITY);
    if lp_norm_samples(&resid, LpExponent::INFINITY) <= 1e-14 * (1.0 + f_scale) {
        return Ok(BestApproxResult {
            value: lp_norm(&f.minus_poly(&problem.to_poly(&start)), p, tol)?.value,
            minimizer: problem.to_poly(&start),
            certificate: Certificate {
                kind,
                residual: 0.0,
                alternations: 0,
            },
            iterations: 0,
        });
    }
    if p.is_infinite() {
        return remez(f, &problem, start, tol, config);
    }
    let (coef, residual, iterations) = if p.is_one() {
        l1_solve(f, &problem, start, tol, config)?
    } else {
        let (c, r, it) = newton(&problem, start, p.value(), tol, config.descent_max_iter, true)?;
        (c, r, it)
    };
    let minimizer = problem.to_poly(&coef);
    let value = lp_norm(&f.minus_poly(&minimizer), p, tol)?.value;
    Ok(BestApproxResult {
        value,
        minimizer,
        certificate: Certificate {
            kind,
            residual,
            alternations: 0,
        },
        iterations,
    })
}

fn best_l2(f: &PeriodicFn, n: usize, tol: f64) -> BestApproxResult {
    let minimizer = fourier_partial_sum(f, n, 1e-3 * tol);
    let (value, residual) = match f.spectral_order() {
        Some(order) if f.has_known_coefficients() => {
            let energy: f64 = (n..=order)
                .map(|k| {
                    let (a, b) = f.coefficient(k).unwrap_or((0.0, 0.0));
                    a * a + b * b
                })
                .sum();
            ((PI * energy).sqrt(), 0.0)
        }
        _ => {
            let r = lp_norm(&f.minus_poly(&minimizer), LpExponent::TWO, tol)
                .unwrap_or(CertifiedValue::exact(f64::NAN));
            (r.value, r.abs_err)
        }
    };
    BestApproxResult {
        value,
        minimizer,
        certificate: Certificate {
            kind: CertificateKind::ParsevalExact,
            residual,
            alternations: 0,
        },
        iterations: 0,
    }
}

/// Samples of `f` and the trigonometric basis `1, cos kt, sin kt` (`k < n`) on a uniform grid.
struct Problem {
    n: usize,
    grid: Vec<f64>,
    samples: Vec<f64>,
    basis: DMatrix<f64>,
}

impl Problem {
    fn new(f: &PeriodicFn, n: usize) -> Self {
        let m = sample_count(f, (64 * n).max(2048)).min(1 << 16);
        let grid: Vec<f64> = (0..m).map(|j| TAU * j as f64 / m as f64).collect();
        let samples = f.sample(m);
        let basis = DMatrix::from_fn(m, 2 * n - 1, |j, i| basis_fn(i, grid[j]));
        Self {
            n,
            grid,
            samples,
            basis,
        }
    }

    fn dim(&self) -> usize {
        2 * self.n - 1
    }

    fn residual(&self, c: &DVector<f64>) -> Vec<f64> {
        let fitted = &self.basis * c;
        self.samples.iter().zip(fitted.iter()).map(|(f, p)| f - p).collect()
    }

    /// Weighted least squares `argmin Σ w_j (f_j − (Bc)_j)²`.
    fn least_squares(&self, w: &DVector<f64>) -> DVector<f64> {
        let mut gram = DMatrix::zeros(self.dim(), self.dim());
        let mut rhs = DVector::zeros(self.dim());
        for (j, row) in self.basis.row_iter().enumerate() {
            let wj = w[j];
            if wj == 0.0 {
                continue;
            }
            gram.ger(wj, &row.transpose(), &row.transpose(), 1.0);
            rhs.axpy(wj * self.samples[j], &row.transpose(), 1.0);
        }
        solve_spd(gram, rhs)
    }

    fn to_poly(&self, c: &DVector<f64>) -> TrigPoly {
        let k = self.n - 1;
        TrigPoly {
            a0: 2.0 * c[0],
            a: (0..k).map(|i| c[1 + 2 * i]).collect(),
            b: (0..k).map(|i| c[2 + 2 * i]).collect(),
        }
    }
}

fn basis_fn(i: usize, t: f64) -> f64 {
    if i == 0 {
        1.0
    } else {
        let k = (i + 1) / 2;
        if i % 2 == 1 {
            (k as f64 * t).cos()
        } else {
            (k as f64 * t).sin()
        }
    }
}

fn solve_spd(mut gram: DMatrix<f64>, rhs: DVector<f64>) -> DVector<f64> {
    let d = gram.nrows();
    let jitter = 1e-14 * (0..d).map(|i| gram[(i, i)]).fold(0.0, f64::max);
    if let Some(ch) = gram.clone().cholesky() {
        return ch.solve(&rhs);
    }
    for i in 0..d {
        gram[(i, i)] += jitter.max(f64::MIN_POSITIVE);
    }
    gram.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(d))
}

/// `Σ |e_j|^p` on the grid (without the `2π/m` factor).
fn lp_objective(e: &[f64], p: f64) -> f64 {
    e.iter().map(|v| v.abs().powf(p)).sum()
}

/// Damped Newton on `c ↦ Σ |f_j − (Bc)_j|^p`; returns the coefficients, the
/// Newton-decrement estimate of the relative optimality gap of the norm, and
/// the iteration count.
fn newton(
    problem: &Problem,
    start: DVector<f64>,
    p: f64,
    tol: f64,
    max_iter: usize,
    strict: bool,
) -> Result<(DVector<f64>, f64, usize)> {
    let d = problem.dim();
    let mut c = start;
    let mut e = problem.residual(&c);
    let mut phi = lp_objective(&e, p);
    let mut gap = f64::INFINITY;
    for it in 0..max_iter {
        let scale = lp_norm_samples(&e, LpExponent::INFINITY);
        if scale == 0.0 || phi == 0.0 {
            return Ok((c, 0.0, it));
        }
        let eps = 1e-9 * scale;
        let mut grad = DVector::zeros(d);
        let mut hess = DMatrix::zeros(d, d);
        for (j, row) in problem.basis.row_iter().enumerate() {
            let ej = e[j];
            let a = ej.abs();
            grad.axpy(-a.powf(p - 1.0) * ej.signum(), &row.transpose(), 1.0);
            let curv = (a * a + eps * eps).powf(0.5 * (p - 2.0));
            hess.ger(curv, &row.transpose(), &row.transpose(), 1.0);
        }
        // Newton direction for Σ|e|^p: (p(p−1)H) d = −p g
        let step = solve_spd(hess * (p - 1.0), -grad.clone());
        let slope = grad.dot(&step);
        // Φ − Φ* ≈ λ²/2 with λ² = −p g·d, and ‖·‖_p moves by (Φ − Φ*)/(pΦ)
        gap = (-slope / (2.0 * phi)).max(0.0);
        if gap <= tol {
            return Ok((c, gap, it));
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &c + &step * t;
            let e_trial = problem.residual(&trial);
            let phi_trial = lp_objective(&e_trial, p);
            if phi_trial <= phi + 1e-4 * t * p * slope {
                c = trial;
                e = e_trial;
                phi = phi_trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if strict && gap > tol {
        Err(Error::NoConvergence {
            solver: "Newton descent",
            iterations: max_iter,
            residual: gap,
        })
    } else {
        Ok((c, gap, max_iter))
    }
}

/// `p = 1`: continuation through `p = 1.25, 1.1, 1.01`, then iteratively
/// reweighted least squares on the `L_1` objective.
fn l1_solve(
    f: &PeriodicFn,
    problem: &Problem,
    start: DVector<f64>,
    tol: f64,
    config: &SolverConfig,
) -> Result<(DVector<f64>, f64, usize)> {
    let mut c = start;
    let mut iterations = 0;
    for p in [1.25, 1.1, 1.01] {
        let (next, _, it) = newton(problem, c, p, tol.max(1e-10), 100, false)?;
        c = next;
        iterations += it;
    }
    let mut best = c.clone();
    let mut e = problem.residual(&c);
    let mut best_phi = lp_objective(&e, 1.0);
    let scale = lp_norm_samples(&e, LpExponent::INFINITY);
    let mut delta = 1e-3 * scale;
    for _ in 0..config.descent_max_iter.min(400) {
        iterations += 1;
        let w = DVector::from_iterator(e.len(), e.iter().map(|v| 1.0 / v.abs().max(delta)));
        c = problem.least_squares(&w);
        e = problem.residual(&c);
        let phi = lp_objective(&e, 1.0);
        if phi < best_phi {
            let gain = (best_phi - phi) / best_phi;
            best_phi = phi;
            best = c.clone();
            if gain < 1e-15 && delta <= 1e-12 * scale {
                break;
            }
        }
        delta = (0.5 * delta).max(1e-13 * scale);
    }
    let (best, kkt, it) = l1_polish(f, problem, best, tol);
    Ok((best, kkt, iterations + it))
}

/// Sign changes of the continuous residual, refined by bisection.
fn residual_zeros(err: &dyn Fn(f64) -> f64, grid: &[f64], e: &[f64]) -> Vec<f64> {
    let m = grid.len();
    let mut zeros = Vec::new();
    for j in 0..m {
        let k = (j + 1) % m;
        if e[j] == 0.0 {
            zeros.push(grid[j]);
            continue;
        }
        if e[k] != 0.0 && e[j].signum() != e[k].signum() {
            let (mut a, mut b) = (grid[j], if k == 0 { TAU } else { grid[k] });
            let sa = e[j].signum();
            for _ in 0..64 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if err(mid).signum() == sa {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            zeros.push(0.5 * (a + b));
        }
    }
    zeros
}

/// `∫_a^b` of the `i`-th basis function.
fn basis_integral(i: usize, a: f64, b: f64) -> f64 {
    if i == 0 {
        return b - a;
    }
    let k = ((i + 1) / 2) as f64;
    if i % 2 == 1 {
        ((k * b).sin() - (k * a).sin()) / k
    } else {
        ((k * a).cos() - (k * b).cos()) / k
    }
}

/// Newton iteration on the zeros of the residual: the `L_1` gradient is
/// `−∫ sign(e) B` (integrated exactly between zeros) and its Jacobian is
/// `Σ_z 2 B(z)B(z)ᵀ / |e'(z)|`.
fn l1_polish(
    f: &PeriodicFn,
    problem: &Problem,
    start: DVector<f64>,
    tol: f64,
) -> (DVector<f64>, f64, usize) {
    let d = problem.dim();
    let gradient = |c: &DVector<f64>| -> Option<(DVector<f64>, DMatrix<f64>)> {
        let err = |t: f64| f.eval(t) - (0..d).map(|i| c[i] * basis_fn(i, t)).sum::<f64>();
        let e = problem.residual(c);
        let zeros = residual_zeros(&err, &problem.grid, &e);
        if zeros.len() < 2 {
            return None;
        }
        let mut grad = DVector::zeros(d);
        let mut jac = DMatrix::zeros(d, d);
        let z = zeros.len();
        for k in 0..z {
            let a = zeros[k];
            let b = if k + 1 < z { zeros[k + 1] } else { zeros[0] + TAU };
            let s = err(0.5 * (a + b)).signum();
            for i in 0..d {
                grad[i] -= s * basis_integral(i, a, b);
            }
            let h = 1e-6;
            let slope = ((err(a + h) - err(a - h)) / (2.0 * h)).abs().max(f64::MIN_POSITIVE);
            let row = DVector::from_iterator(d, (0..d).map(|i| basis_fn(i, a)));
            jac.ger(2.0 / slope, &row, &row, 1.0);
        }
        Some((grad, jac))
    };
    let norm = |g: &DVector<f64>| g.amax() / TAU;
    let mut c = start;
    let Some((mut grad, mut jac)) = gradient(&c) else {
        return (c, f64::INFINITY, 0);
    };
    let mut kkt = norm(&grad);
    let mut it = 0;
    while kkt > tol && it < 50 {
        it += 1;
        let step = solve_spd(jac.clone(), -grad.clone());
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial = &c + &step * t;
            if let Some((g, j)) = gradient(&trial) {
                let k = norm(&g);
                if k < kkt {
                    c = trial;
                    grad = g;
                    jac = j;
                    kkt = k;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (c, kkt, it)
}

/// Exchange algorithm on a `2n`-point reference for the uniform norm.
fn remez(
    f: &PeriodicFn,
    problem: &Problem,
    start: DVector<f64>,
    tol: f64,
    config: &SolverConfig,
) -> Result<BestApproxResult> {
    let n = problem.n;
    let h = TAU / problem.grid.len() as f64;
    let mut poly = problem.to_poly(&start);
    let mut reference = alternation_set(f, &poly, problem, h);
    let mut defect = f64::INFINITY;
    for it in 0..config.remez_max_iter {
        if reference.len() < 2 * n {
            return Err(Error::NoConvergence {
                solver: "Remez exchange",
                iterations: it,
                residual: defect,
            });
        }
        let points = select_reference(&reference, 2 * n);
        let m = 2 * n;
        let mut a = DMatrix::zeros(m, m);
        let mut rhs = DVector::zeros(m);
        for (i, &(t, _)) in points.iter().enumerate() {
            for col in 0..2 * n - 1 {
                a[(i, col)] = basis_fn(col, t);
            }
            a[(i, m - 1)] = if i % 2 == 0 { 1.0 } else { -1.0 };
            rhs[i] = f.eval(t);
        }
        let sol = a.lu().solve(&rhs).ok_or(Error::NoConvergence {
            solver: "Remez exchange (singular reference)",
            iterations: it,
            residual: defect,
        })?;
        let level = sol[m - 1].abs();
        poly = problem.to_poly(&sol.rows(0, m - 1).into_owned());
        reference = alternation_set(f, &poly, problem, h);
        let emax = reference.iter().fold(0.0_f64, |acc, &(_, v)| acc.max(v.abs()));
        defect = emax - level;
        if defect <= tol.max(1e-12 * emax) {
            let alternations = reference.iter().filter(|&&(_, v)| v.abs() >= emax - defect.max(tol)).count();
            return Ok(BestApproxResult {
                value: emax,
                minimizer: poly,
                certificate: Certificate {
                    kind: CertificateKind::Equioscillation,
                    residual: defect.max(0.0),
                    alternations,
                },
                iterations: it + 1,
            });
        }
    }
    Err(Error::NoConvergence {
        solver: "Remez exchange",
        iterations: config.remez_max_iter,
        residual: defect,
    })
}

/// Refined signed extrema of `f − poly`, merged so that signs alternate cyclically.
fn alternation_set(f: &PeriodicFn, poly: &TrigPoly, problem: &Problem, h: f64) -> Vec<(f64, f64)> {
    let fitted = poly.sample(problem.grid.len());
    let e: Vec<f64> = problem.samples.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let err = |t: f64| f.eval(t) - poly.eval(t);
    let mut ext: Vec<(f64, f64)> = Vec::new();
    for sign in [1.0, -1.0] {
        for j in local_extrema(&e, sign) {
            if sign * e[j] <= 0.0 {
                continue;
            }
            let (t, v) = refine_extremum(&err, problem.grid[j], h, sign);
            ext.push((t.rem_euclid(TAU), v));
        }
    }
    ext.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(ext.len());
    for pt in ext {
        match merged.last_mut() {
            Some(last) if last.1.signum() == pt.1.signum() => {
                if pt.1.abs() > last.1.abs() {
                    *last = pt;
                }
            }
            _ => merged.push(pt),
        }
    }
    while merged.len() > 1 && merged[0].1.signum() == merged[merged.len() - 1].1.signum() {
        let last = merged.pop().unwrap_or((0.0, 0.0));
        if last.1.abs() > merged[0].1.abs() {
            merged[0] = last;
        }
    }
    merged
}

/// Drops adjacent pairs with the smallest magnitudes until `count` points remain,
/// keeping the cyclic alternation.
fn select_reference(points: &[(f64, f64)], count: usize) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    while pts.len() > count {
        let len = pts.len();
        let (i, _) = pts
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.abs().total_cmp(&b.1 .1.abs()))
            .unwrap_or((0, &(0.0, 0.0)));
        let prev = (i + len - 1) % len;
        let next = (i + 1) % len;
        let partner = if pts[prev].1.abs() < pts[next].1.abs() { prev } else { next };
        let (lo, hi) = if i < partner { (i, partner) } else { (partner, i) };
        pts.remove(hi);
        pts.remove(lo);
        if lo == 0 && hi == len - 1 {
            // removed the wrap-around pair; order is still cyclic
            continue;
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{KernelParams, TailSeries};

    fn harmonic(k: usize) -> PeriodicFn {
        TrigPoly::harmonic(k, 1.0, 0.0).into()
    }

    #[test]
    fn norms_of_cos() {
        let f = harmonic(1);
        let one = lp_norm(&f, LpExponent::ONE, 1e-10).unwrap();
        assert!((one.value - 4.0).abs() < 1e-9, "{one}");
        let two = lp_norm(&f, LpExponent::TWO, 1e-12).unwrap();
        assert!((two.value - PI.sqrt()).abs() < 1e-12);
        let inf = lp_norm(&f, LpExponent::INFINITY, 1e-12).unwrap();
        assert!((inf.value - 1.0).abs() < 1e-12);
        let zero: PeriodicFn = TrigPoly::zero(3).into();
        for p in [LpExponent::ONE, LpExponent::TWO, LpExponent::INFINITY] {
            assert_eq!(lp_norm(&zero, p, 1e-9).unwrap().value, 0.0);
        }
    }

    #[test]
    fn sup_norm_finds_off_grid_peak() {
        let f = PeriodicFn::from_fn(|t: f64| (-(20.0 * (1.0 - (t - 1.234_567).cos()))).exp());
        let v = lp_norm(&f, LpExponent::INFINITY, 1e-12).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inf_shift_examples() {
        let r = inf_shift(&harmonic(1), LpExponent::TWO, 1e-12).unwrap();
        assert!(r.lambda.abs() < 1e-12 && (r.value - PI.sqrt()).abs() < 1e-12);
        let g: PeriodicFn = TrigPoly::new(2.0, vec![1.0], vec![0.0]).unwrap().into();
        let r = inf_shift(&g, LpExponent::INFINITY, 1e-12).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-12 && (r.value - 1.0).abs() < 1e-12);
        let r = inf_shift(&g, LpExponent::ONE, 1e-10).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-6 && (r.value - 4.0).abs() < 1e-8);
    }

    #[test]
    fn inf_shift_matches_grid_search_on_tail() {
        let params = KernelParams::new(1.0, 0.5, 0.0).unwrap();
        let g: PeriodicFn = TailSeries::new(params, 4, 0.3, 1e-15).unwrap().into();
        let q = LpExponent::new(1.5).unwrap();
        let r = inf_shift(&g, q, 1e-12).unwrap();
        let sup = lp_norm(&g, LpExponent::INFINITY, 1e-12).unwrap().value;
        let samples = g.sample(4096);
        let mut best = f64::INFINITY;
        let steps = (2.0 * sup / 1e-4) as usize;
        for i in 0..=steps {
            let lambda = -sup + i as f64 * 1e-4;
            let shifted: Vec<f64> = samples.iter().map(|v| v - lambda).collect();
            best = best.min(lp_norm_samples(&shifted, q));
        }
        assert!((r.value - best).abs() < 1e-3 * best.max(1.0));
        assert!(r.value <= best + 1e-12);
    }

    #[test]
    fn best_approx_of_cos_nt() {
        let n = 5;
        let f = harmonic(n);
        let l2 = best_approx(&f, n, LpExponent::TWO, 1e-12).unwrap();
        assert!((l2.value - PI.sqrt()).abs() < 1e-10);
        let sup = best_approx(&f, n, LpExponent::INFINITY, 1e-10).unwrap();
        assert!((sup.value - 1.0).abs() < 1e-6, "{sup:?}");
        assert!(sup.minimizer.max_coeff_diff(&TrigPoly::zero(n - 1)) < 1e-6);
        assert!(sup.certificate.alternations >= 2 * n);
    }

    #[test]
    fn best_approx_reproduces_low_order() {
        let p = TrigPoly::new(0.4, vec![1.0, -0.5], vec![0.3, 0.2]).unwrap();
        let f: PeriodicFn = p.clone().into();
        for q in [LpExponent::ONE, LpExponent::new(3.0).unwrap(), LpExponent::INFINITY] {
            let r = best_approx(&f, 3, q, 1e-10).unwrap();
            assert_eq!(r.value, 0.0);
            assert!(r.minimizer.max_coeff_diff(&p) < 1e-15);
        }
        let black = PeriodicFn::from_fn(move |t| p.eval(t));
        let r = best_approx(&black, 4, LpExponent::INFINITY, 1e-10).unwrap();
        assert!(r.value < 1e-9);
    }

    #[test]
    fn lp_best_approx_is_stationary_and_monotone() {
        let f = PeriodicFn::from_fn(|t: f64| (t.sin()).exp() + 0.3 * (3.0 * t).cos().abs());
        let mut prev = f64::INFINITY;
        for n in [1usize, 2, 4, 6] {
            let r = best_approx(&f, n, LpExponent::new(3.0).unwrap(), 1e-9).unwrap();
            assert!(r.certificate.residual <= 1e-9, "{:?}", r.certificate);
            assert!(r.value <= prev + 1e-9);
            prev = r.value;
        }
    }

    #[test]
    fn l1_best_approx_beats_l2_projection() {
        let f = PeriodicFn::from_fn(|t: f64| (2.0 * t.sin()).exp());
        let r = best_approx(&f, 3, LpExponent::ONE, 1e-9).unwrap();
        let l2 = best_approx(&f, 3, LpExponent::TWO, 1e-9).unwrap();
        let l2_in_l1 = lp_norm(&f.minus_poly(&l2.minimizer), LpExponent::ONE, 1e-10).unwrap().value;
        assert!(r.value <= l2_in_l1 + 1e-12);
        // any perturbation of the minimizer increases the L1 error
        for i in 0..5 {
            let bump = TrigPoly::harmonic(i % 3, 1e-4, if i > 2 { 1e-4 } else { 0.0 });
            let trial = r.minimizer.add_scaled(&bump, 1.0);
            let v = lp_norm(&f.minus_poly(&trial), LpExponent::ONE, 1e-10).unwrap().value;
            assert!(v >= r.value - 1e-9, "{i}: {v} < {}", r.value);
        }
    }
}
