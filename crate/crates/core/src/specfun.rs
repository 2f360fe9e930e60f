//! Gamma, complete elliptic integral, Gauss hypergeometric function,
//! Favard constants, the `I_s(v)` norms and `‖cos‖_q`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::quad;
use crate::value::{CertifiedValue, LpExponent, Provenance};

const QUAD_TOL: f64 = 1e-13;

const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 671/128).
pub fn ln_gamma(x: f64) -> f64 {
    let mut y = x;
    let tmp = x + 5.242_187_5;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Euler's Gamma function for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain("x", x, "x > 0"));
    }
    if x == x.round() && x <= 30.0 {
        return Ok((2..x as u64).map(|k| k as f64).product());
    }
    if x > 60.0 {
        return Ok(ln_gamma(x).exp());
    }
    // shift into [1, 2) where ln Γ is small
    let mut y = x;
    let mut factor = 1.0;
    while y >= 2.0 {
        y -= 1.0;
        factor *= y;
    }
    while y < 1.0 {
        factor /= y;
        y += 1.0;
    }
    Ok(factor * ln_gamma(y).exp())
}

/// `1/Γ(x)` on the whole real line (zero at the poles).
fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return 0.0;
    }
    if x > 0.0 {
        1.0 / gamma_fn(x).unwrap_or(f64::INFINITY)
    } else {
        // reflection: 1/Γ(x) = sin(πx) Γ(1-x) / π
        (PI * x).sin() * gamma_fn(1.0 - x).unwrap_or(f64::INFINITY) / PI
    }
}

fn gamma_any(x: f64) -> f64 {
    1.0 / recip_gamma(x)
}

/// Complete elliptic integral of the first kind with modulus `q`,
/// `K(q) = ∫_0^{π/2} (1 - q² sin²u)^{-1/2} du`, by the arithmetic–geometric mean.
pub fn elliptic_k(q: f64) -> Result<CertifiedValue> {
    if !(0.0..1.0).contains(&q) {
        return Err(domain("q", q, "0 <= q < 1"));
    }
    if q == 0.0 {
        return Ok(CertifiedValue::exact(FRAC_PI_2));
    }
    let mut a = 1.0_f64;
    let mut g = ((1.0 - q) * (1.0 + q)).sqrt();
    for _ in 0..64 {
        if (a - g).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next;
    }
    let k = FRAC_PI_2 / (0.5 * (a + g));
    Ok(CertifiedValue::new(k, 16.0 * f64::EPSILON * k, Provenance::SeriesTruncation))
}

const HYP_MAX_TERMS: usize = 50_000_000;

/// Gauss hypergeometric `₂F₁(a, b; c; z)` for `z ∈ [0, 1]`.
///
/// The series carries a geometric bound on its tail; at `z = 1` the closed
/// Gauss sum `Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b))` is used.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<CertifiedValue> {
    if c <= 0.0 && c == c.round() {
        return Err(domain("c", c, "c not a nonpositive integer"));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(domain("z", z, "0 <= z <= 1"));
    }
    if z == 0.0 {
        return Ok(CertifiedValue::exact(1.0));
    }
    if z == 1.0 {
        let s = c - a - b;
        if s <= 0.0 {
            return Err(domain("c - a - b", s, "c - a - b > 0 at z = 1"));
        }
        let v = gamma_any(c) * gamma_any(s) * recip_gamma(c - a) * recip_gamma(c - b);
        return Ok(CertifiedValue::new(v, 64.0 * f64::EPSILON * v.abs(), Provenance::SeriesTruncation));
    }
    let (aa, ba, ca) = (a.abs(), b.abs(), c.abs());
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut abs_sum = 1.0_f64;
    for k in 0..HYP_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        abs_sum += term.abs();
        if term == 0.0 {
            return Ok(CertifiedValue::new(sum, rounding(k, abs_sum), Provenance::SeriesTruncation));
        }
        // every later ratio |t_{j+1}/t_j| (j > k) is below rho
        let j = kf + 1.0;
        if j > ca {
            let rho = z * (j + aa) / (j - ca) * ((j + ba) / (j + 1.0)).max(1.0);
            if rho < 1.0 {
                let tail = term.abs() * rho / (1.0 - rho);
                if tail <= 1e-15 * sum.abs().max(1e-300) {
                    return Ok(CertifiedValue::new(
                        sum,
                        tail + rounding(k, abs_sum),
                        Provenance::SeriesTruncation,
                    ));
                }
            }
        }
    }
    Err(Error::NoConvergence {
        solver: "hypergeometric series",
        iterations: HYP_MAX_TERMS,
        residual: term.abs(),
    })
}

fn rounding(terms: usize, abs_sum: f64) -> f64 {
    (terms as f64 + 1.0) * f64::EPSILON * abs_sum
}

/// Neumaier-compensated sum and the sum of magnitudes.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> (f64, f64) {
    let (mut s, mut c, mut abs) = (0.0_f64, 0.0_f64, 0.0_f64);
    for x in terms {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
        abs += x.abs();
    }
    (s + c, abs)
}

fn compensated_rounding(terms: usize, abs_sum: f64, sum: f64) -> f64 {
    4.0 * f64::EPSILON * sum.abs() + (terms as f64 * f64::EPSILON).powi(2) * abs_sum
}

/// Favard constant `K_r = (4/π) Σ_{v≥0} (−1)^{v(r+1)} / (2v+1)^{r+1}`.
pub fn favard(r: u32) -> Result<CertifiedValue> {
    if r == 0 {
        return Err(domain("r", 0.0, "r >= 1"));
    }
    let s = f64::from(r) + 1.0;
    let f = |v: f64| (2.0 * v + 1.0).powf(-s);
    let (sum, err) = if r % 2 == 1 {
        let n = 2000usize;
        let (head, abs_head) = compensated_sum((0..n).rev().map(|v| f(v as f64)));
        let m = 2.0 * n as f64 + 1.0;
        let nf = n as f64;
        let integral = m.powf(1.0 - s) / (2.0 * (s - 1.0));
        let d1 = -2.0 * s * m.powf(-s - 1.0);
        let d3 = -8.0 * s * (s + 1.0) * (s + 2.0) * m.powf(-s - 3.0);
        let d5 = 32.0 * s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * m.powf(-s - 5.0);
        let tail = integral + 0.5 * f(nf) - d1 / 12.0 + d3 / 720.0;
        (head + tail, d5 / 30240.0 + compensated_rounding(n, abs_head, head))
    } else {
        // alternating: the tail from n lies between 0 and (−1)^n f(n)
        let mut n = 1usize;
        while f(n as f64) > 1e-14 {
            n *= 2;
        }
        let (head, abs_head) = compensated_sum(
            (0..n)
                .rev()
                .map(|v| if v % 2 == 0 { f(v as f64) } else { -f(v as f64) }),
        );
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let fnn = f(n as f64);
        (head + sign * 0.5 * fnn, 0.5 * fnn + compensated_rounding(n, abs_head, head))
    };
    let c = 4.0 / PI;
    Ok(CertifiedValue::new(c * sum, c * err, Provenance::SeriesTruncation))
}

/// `I_s(v) = ‖(1+t²)^{-1/2}‖_{L_s[0,v]}`.
pub fn i_s(s: LpExponent, v: f64) -> Result<CertifiedValue> {
    if !(v >= 0.0) {
        return Err(domain("v", v, "v >= 0"));
    }
    if s.is_infinite() {
        return Ok(CertifiedValue::exact(1.0));
    }
    if v == 0.0 {
        return Ok(CertifiedValue::exact(0.0));
    }
    let s = s.value();
    let half = 0.5 * s;
    let near = quad::adaptive(|t| (1.0 + t * t).powf(-half), 0.0, v.min(1.0), QUAD_TOL);
    let mut integral = near.value;
    let mut err = near.abs_err;
    if v > 1.0 {
        // t = e^w on [1, v]
        let far = quad::adaptive(
            |w| {
                let lg = if w > 0.0 {
                    2.0 * w + (-2.0 * w).exp().ln_1p()
                } else {
                    (2.0 * w).exp().ln_1p()
                };
                (w - half * lg).exp()
            },
            0.0,
            v.ln(),
            QUAD_TOL,
        );
        integral += far.value;
        err += far.abs_err;
    }
    let value = integral.powf(1.0 / s);
    let abs_err = value / (s * integral) * err + 4.0 * f64::EPSILON * value;
    Ok(CertifiedValue::new(value, abs_err, Provenance::Quadrature))
}

/// `‖cos‖_q = (∫_0^{2π} |cos t|^q dt)^{1/q}`, and `1` for `q = ∞`.
pub fn cos_norm(q: LpExponent) -> CertifiedValue {
    if q.is_infinite() {
        return CertifiedValue::exact(1.0);
    }
    if q.is_one() {
        return CertifiedValue::exact(4.0);
    }
    let q = q.value();
    let quarter = quad::adaptive(|t| t.cos().powf(q), 0.0, FRAC_PI_2, 1e-14);
    let integral = 4.0 * quarter.value;
    let value = integral.powf(1.0 / q);
    let abs_err = value / (q * integral) * 4.0 * quarter.abs_err + 4.0 * f64::EPSILON * value;
    CertifiedValue::new(value, abs_err, Provenance::Quadrature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_reference_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_relative_eq!(gamma_fn(2.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(gamma_fn(0.5).unwrap(), 1.772_453_850_905_516, max_relative = 1e-13);
        assert_relative_eq!(gamma_fn(0.1).unwrap(), 9.513_507_698_668_732, max_relative = 1e-13);
        assert_relative_eq!(gamma_fn(10.0).unwrap(), 362_880.0, max_relative = 1e-13);
        let fact49: f64 = (2..50).map(|k| k as f64).product();
        assert_relative_eq!(gamma_fn(50.0).unwrap(), fact49, max_relative = 1e-13);
        assert_relative_eq!(gamma_fn(49.5).unwrap(), 8.667_601_843_135_272e61, max_relative = 1e-13);
        assert_relative_eq!(ln_gamma(100.0), 359.134_205_369_575_4, max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(7.25).unwrap(), 1_155.381_013_919_989_3, max_relative = 1e-13);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn gamma_matches_euler_integral() {
        for &x in &[0.7, 1.3, 3.5, 12.25] {
            let lower = quad::adaptive(|t: f64| t.powf(x - 1.0) * (-t).exp(), 0.0, 1.0, 1e-15).value;
            let upper = quad::adaptive(|t: f64| t.powf(x - 1.0) * (-t).exp(), 1.0, 200.0, 1e-15).value;
            assert_relative_eq!(gamma_fn(x).unwrap(), lower + upper, max_relative = 1e-12);
        }
    }

    #[test]
    fn elliptic_k_against_quadrature() {
        assert_eq!(elliptic_k(0.0).unwrap().value, FRAC_PI_2);
        for &q in &[0.1, 0.5, 0.9, 0.99] {
            let quadrature =
                quad::adaptive(|u: f64| 1.0 / (1.0 - q * q * u.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-14);
            let k = elliptic_k(q).unwrap();
            assert!((k.value - quadrature.value).abs() < 1e-12, "q={q}");
        }
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(-0.1).is_err());
    }

    #[test]
    fn hyp2f1_special_cases() {
        assert_eq!(hyp2f1(0.5, 0.5, 1.5, 0.0).unwrap().value, 1.0);
        let v = hyp2f1(0.5, 0.5, 1.5, 1.0).unwrap();
        assert!((v.value - FRAC_PI_2).abs() < 1e-12);
        // F(1/2,1/2;3/2;z) = asin(√z)/√z
        for &z in &[0.1, 0.5, 0.9, 0.99] {
            let v = hyp2f1(0.5, 0.5, 1.5, z).unwrap();
            assert!((v.value - z.sqrt().asin() / z.sqrt()).abs() <= v.abs_err + 1e-14, "z={z}");
        }
        let e = hyp2f1(0.5, 0.5, 1.0, 0.25).unwrap().value;
        assert!((e - 2.0 / PI * elliptic_k(0.5).unwrap().value).abs() < 1e-11);
        assert!(hyp2f1(1.0, 1.0, 1.5, 1.0).is_err());
        assert!(hyp2f1(1.0, 1.0, -2.0, 0.5).is_err());
    }

    #[test]
    fn hyp2f1_near_one_approaches_gauss_sum() {
        let z = 1.0 - 1e-6;
        let s = hyp2f1(0.5, 0.5, 1.5, z).unwrap();
        assert!((s.value - z.sqrt().asin() / z.sqrt()).abs() <= s.abs_err + 1e-13);
        assert!((s.value - FRAC_PI_2).abs() < 2e-3);
    }

    #[test]
    fn favard_known_values() {
        let k1 = favard(1).unwrap();
        assert!((k1.value - FRAC_PI_2).abs() <= k1.abs_err + 1e-15);
        let k2 = favard(2).unwrap();
        assert!((k2.value - PI * PI / 8.0).abs() <= k2.abs_err + 1e-15);
        assert!(k1.abs_err < 1e-12 && k2.abs_err < 1e-12);
        // K_3 = π³/24
        let k3 = favard(3).unwrap();
        assert!((k3.value - PI.powi(3) / 24.0).abs() <= k3.abs_err + 1e-15);
        assert!(favard(0).is_err());
    }

    #[test]
    fn favard_against_partial_sums() {
        for r in 1..=5u32 {
            let s = f64::from(r) + 1.0;
            let n = 1_000_000usize;
            let partial: f64 = (0..n)
                .rev()
                .map(|v| {
                    let sign = if (v * (r as usize + 1)) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (2.0 * v as f64 + 1.0).powf(-s)
                })
                .sum();
            // remainder of the brute sum is below its first omitted term for alternating
            // series and below ∫ for positive ones
            let tail = (2.0 * n as f64 - 1.0).powf(1.0 - s) / (2.0 * (s - 1.0));
            let v = favard(r).unwrap();
            assert!((v.value - 4.0 / PI * partial).abs() <= v.abs_err + 4.0 / PI * tail + 1e-14, "r={r}");
        }
    }

    #[test]
    fn i_s_values() {
        assert_eq!(i_s(LpExponent::INFINITY, 7.3).unwrap().value, 1.0);
        let one = i_s(LpExponent::ONE, 1.0).unwrap();
        assert!((one.value - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-12);
        let two = i_s(LpExponent::TWO, 10.0).unwrap();
        assert!((two.value - 10f64.atan().sqrt()).abs() < 1e-12);
        assert!(two.value < 2f64.sqrt());
        assert!(i_s(LpExponent::TWO, -1.0).is_err());
    }

    #[test]
    fn cos_norm_values() {
        assert_eq!(cos_norm(LpExponent::ONE).value, 4.0);
        assert_eq!(cos_norm(LpExponent::INFINITY).value, 1.0);
        assert!((cos_norm(LpExponent::TWO).value - PI.sqrt()).abs() < 1e-12);
        // closed form 2√π Γ((q+1)/2)/Γ(q/2+1)
        for &q in &[1.5, 3.0, 7.5] {
            let exact = (2.0 * PI.sqrt() * gamma_fn(0.5 * (q + 1.0)).unwrap() / gamma_fn(0.5 * q + 1.0).unwrap())
                .powf(1.0 / q);
            let c = cos_norm(LpExponent::new(q).unwrap());
            assert!((c.value - exact).abs() < 1e-12, "q={q}");
        }
    }
}
