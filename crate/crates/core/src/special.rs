//! Gamma and two-parameter Mittag-Leffler functions on the real line.
//!
//! `E_{α,β}(z) = Σ_{n≥0} zⁿ / Γ(αn + β)` is only ever needed at `z ≤ 0`
//! (arguments `-λ tᵅ`). Three evaluation routes are combined:
//!
//! * the power series, accepted while its cancellation error stays small,
//! * the asymptotic expansion `-Σ_{k≥1} z^{-k} / Γ(β - αk)` for large `|z|`,
//! * a real-line integral representation (valid for `0 < α < 1`,
//!   `β < 1 + α`), reached through `E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z`
//!   for larger `β`.

use std::f64::consts::PI;

use crate::quadrature::{exp_sinh, tanh_sinh};
use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest `|z|` for which the power series is attempted.
pub const SERIES_RADIUS: f64 = 10.0;

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// `sin(πx)` with argument reduction, exact zeros at integers.
fn sin_pi(x: f64) -> f64 {
    if x == x.floor() {
        return 0.0;
    }
    let r = x - 2.0 * (0.5 * x).floor(); // in [0, 2)
    let (r, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

fn gamma_positive(x: f64) -> f64 {
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_positive(1.0 - x));
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(y + 0.5) * (-t).exp() * lanczos_sum(y)
}

/// Γ(x) for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_positive(x))
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return (PI / sin_pi(x).abs()).ln() - ln_gamma(1.0 - x);
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (y + 0.5) * t.ln() - t + lanczos_sum(y).ln()
}

/// 1/Γ(x) on the whole real line (zero at the poles).
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1-x) / π
        let g = 1.0 - x;
        if g > 171.0 {
            let s = sin_pi(x);
            return s.signum() * (s.abs().ln() + ln_gamma(g) - PI.ln()).exp();
        }
        return sin_pi(x) * gamma_positive(g) / PI;
    }
    if x > 171.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma_positive(x)
}

/// Parameters `(α, β)` of `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    alpha: f64,
    beta: f64,
}

impl MlParams {
    /// `0 < α ≤ 2`, `β > 0`. Orders above one are evaluated by series only.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

struct SeriesValue {
    value: f64,
    rounding: f64,
}

fn series_raw(alpha: f64, beta: f64, z: f64) -> Option<SeriesValue> {
    let mut acc = CompensatedSum::default();
    let mut abs_total = 0.0;
    let mut peaked = false;
    let mut prev = f64::INFINITY;
    let lnz = z.abs().ln();
    for n in 0..4000u32 {
        let arg = alpha * n as f64 + beta;
        let magnitude = if arg < 170.0 && n < 300 {
            z.abs().powi(n as i32) * rgamma(arg)
        } else {
            (n as f64 * lnz - ln_gamma(arg)).exp()
        };
        if !magnitude.is_finite() {
            return None;
        }
        let term = if n % 2 == 1 && z < 0.0 { -magnitude } else { magnitude };
        acc.add(term);
        abs_total += magnitude;
        if magnitude < prev {
            peaked = true;
        }
        prev = magnitude;
        if peaked && n > 2 && magnitude <= 1e-17 * acc.value().abs().max(f64::MIN_POSITIVE) {
            return Some(SeriesValue {
                value: acc.value(),
                rounding: 8.0 * f64::EPSILON * abs_total,
            });
        }
        if peaked && magnitude == 0.0 {
            break;
        }
    }
    None
}

/// Power-series route. Fails when cancellation would cost more than the
/// target accuracy.
pub fn mittag_leffler_series(p: MlParams, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(rgamma(p.beta));
    }
    let s = series_raw(p.alpha, p.beta, z)
        .ok_or_else(|| Error::NonConvergence(format!("series diverged numerically at z = {z}")))?;
    let ok = if p.alpha > 1.0 {
        s.rounding <= 1e-11
    } else {
        s.rounding <= 1e-11 * s.value.abs()
    };
    if ok {
        Ok(s.value)
    } else {
        Err(Error::NonConvergence(format!(
            "series cancellation too large at z = {z} (rounding {:e})",
            s.rounding
        )))
    }
}

fn asymptotic(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let mut acc = CompensatedSum::default();
    let inv = 1.0 / z;
    let mut zpow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..400 {
        zpow *= inv;
        let term = -zpow * rgamma(beta - alpha * k as f64);
        if term == 0.0 {
            if zpow == 0.0 {
                return Some(acc.value());
            }
            continue;
        }
        if term.abs() > last && k > 2 {
            return None;
        }
        last = term.abs();
        acc.add(term);
        if term.abs() <= 1e-16 * acc.value().abs() {
            return Some(acc.value());
        }
    }
    None
}

/// Integral route for `0 < α < 1`, `z < 0`; uses the downward recurrence
/// in `β` until `β < 1 + α`.
pub fn mittag_leffler_integral(p: MlParams, z: f64) -> Result<f64> {
    let (alpha, beta) = (p.alpha, p.beta);
    if !(alpha < 1.0) {
        return Err(Error::Domain("integral representation requires alpha < 1".into()));
    }
    if z > 0.0 {
        return Err(Error::Domain(format!("only z <= 0 is supported, got {z}")));
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    if beta >= 1.0 + alpha {
        let lower = mittag_leffler_integral(MlParams { alpha, beta: beta - alpha }, z)?;
        return Ok((lower - rgamma(beta - alpha)) / z);
    }
    let x = -z;
    let s1 = sin_pi(1.0 - beta);
    let s2 = sin_pi(1.0 - beta + alpha);
    let c = (PI * alpha).cos();
    let weight = |r: f64| -> f64 {
        let ra = r.powf(alpha);
        let num = ra * s1 + x * s2;
        let den = ra * ra + 2.0 * ra * x * c + x * x;
        (-r).exp() * num / den / PI
    };
    // r = ρ^p absorbs the r^{α-β} singularity at the origin
    let p = if beta > alpha { 1.0 / (1.0 + alpha - beta) } else { 1.0 };
    let smooth = move |rho: f64| -> f64 {
        if rho == 0.0 && beta > alpha {
            return p * weight(0.0);
        }
        let r = rho.powf(p);
        if p == 1.0 {
            r.powf(alpha - beta) * weight(r)
        } else {
            p * weight(r)
        }
    };
    // split at the near-pole of the denominator (only sharp when α → 1)
    let split = if c < -0.05 { (x * -c).powf(1.0 / alpha) } else { x.powf(1.0 / alpha) };
    let left = tanh_sinh(|rho, _| smooth(rho), 0.0, split.powf(1.0 / p), 1e-13, 1e-300);
    let right = exp_sinh(|y| { let r = split + y; r.powf(alpha - beta) * weight(r) }, 1e-13, 1e-300);
    let value = left.value + right.value;
    let err = left.error_estimate + right.error_estimate;
    if left.converged && right.converged || err <= 1e-10 * value.abs() {
        Ok(value)
    } else {
        Err(Error::NonConvergence(format!(
            "integral representation did not converge at (alpha={alpha}, beta={beta}, z={z})"
        )))
    }
}

/// `E_{α,β}(z)` for `z ≤ 0`.
pub fn mittag_leffler(p: MlParams, z: f64) -> Result<f64> {
    if z > 0.0 || z.is_nan() {
        return Err(Error::Domain(format!("only z <= 0 is supported, got {z}")));
    }
    if z == 0.0 {
        return Ok(rgamma(p.beta));
    }
    if z == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let (alpha, beta) = (p.alpha, p.beta);

    if alpha == 1.0 && beta == beta.floor() && z < -1.0 {
        // E_{1,m}(z) = z^{1-m} (e^z - Σ_{j<m-1} z^j / j!)
        let m = beta as i32;
        let mut poly = 0.0;
        let mut term = 1.0;
        for j in 0..(m - 1) {
            if j > 0 {
                term *= z / j as f64;
            }
            poly += term;
        }
        return Ok(z.powi(1 - m) * (z.exp() - poly));
    }

    // for α > 1 the series is the only route; its rounding check decides
    if -z <= SERIES_RADIUS || alpha > 1.0 {
        if let Ok(v) = mittag_leffler_series(p, z) {
            return Ok(v);
        }
    }
    if alpha < 1.0 {
        if let Some(v) = asymptotic(alpha, beta, z) {
            return Ok(v);
        }
        return mittag_leffler_integral(p, z);
    }
    if alpha == 1.0 && z < -40.0 {
        if let Some(v) = asymptotic(alpha, beta, z) {
            return Ok(v);
        }
    }
    Err(Error::NonConvergence(format!(
        "no evaluation route met tolerance at (alpha={alpha}, beta={beta}, z={z})"
    )))
}
