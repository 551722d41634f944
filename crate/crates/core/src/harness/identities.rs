//! Closed-form identities of the discrete fractional operators, reported
//! as residual tables.

use crate::fracops::{backward_integral, backward_rl_derivative, caputo_derivative, time_reverse, TimeGrid, TimeSeries};
use crate::special::gamma_fn;
use crate::{Error, Result};

fn max_rel(a: &[f64], b: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .map(|(_, (x, y))| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// `(test_name, n, residual)` rows on `(0, 1)` with `n` steps.
pub fn fracops_identity_residuals(alpha: f64, n: usize) -> Result<Vec<(String, usize, f64)>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("fractional order must lie in (0, 1), got {alpha}")));
    }
    let g = TimeGrid::new(1.0, n)?;
    let t: Vec<f64> = g.nodes().collect();
    let tenth = |i: usize| t[i] >= 0.1;
    let mut rows = Vec::new();

    let lin = TimeSeries::from_fn(g, |t| t);
    let d = caputo_derivative(&lin, alpha)?;
    let want: Vec<f64> = t.iter().map(|t| t.powf(1.0 - alpha) / gamma_fn(2.0 - alpha).unwrap()).collect();
    rows.push(("caputo_linear".to_string(), n, max_rel(d.values(), &want, tenth)));

    let quad = TimeSeries::from_fn(g, |t| t * t);
    let d = caputo_derivative(&quad, alpha)?;
    let c = 2.0 / gamma_fn(3.0 - alpha)?;
    let want: Vec<f64> = t.iter().map(|t| c * t.powf(2.0 - alpha)).collect();
    rows.push(("caputo_quadratic".to_string(), n, max_rel(d.values(), &want, tenth)));

    let one = TimeSeries::from_fn(g, |_| 1.0);
    let d = caputo_derivative(&one, alpha)?;
    rows.push(("caputo_constant".to_string(), n, d.values().iter().map(|v| v.abs()).fold(0.0, f64::max)));

    let nu = 1.0 - alpha;
    let i = backward_integral(&one, nu)?;
    let want: Vec<f64> = t.iter().map(|t| (1.0 - t).powf(nu) / gamma_fn(nu + 1.0).unwrap()).collect();
    let err = i.values().iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    rows.push(("backward_integral_constant".to_string(), n, err));

    let h = TimeSeries::from_fn(g, |t| (3.0 * t).cos());
    let (a, b) = (0.5 * alpha, 1.0 - alpha);
    let lhs = backward_integral(&backward_integral(&h, b)?, a)?;
    let rhs = backward_integral(&h, a + b)?;
    let diff = TimeSeries::new(g, lhs.values().iter().zip(rhs.values()).map(|(x, y)| x - y).collect())?;
    rows.push(("backward_semigroup".to_string(), n, diff.l2_norm() / rhs.l2_norm()));

    let d = backward_rl_derivative(&one, alpha)?;
    let r = 1.0 / gamma_fn(1.0 - alpha)?;
    let want: Vec<f64> = t.iter().map(|t| r * (1.0 - t).powf(-alpha)).collect();
    rows.push(("backward_rl_constant".to_string(), n, max_rel(d.values(), &want, |i| t[i] <= 0.9)));

    let back = time_reverse(&time_reverse(&h));
    let err = back.values().iter().zip(h.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    rows.push(("reverse_involution".to_string(), n, err));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residuals_are_small_at_moderate_resolution() {
        for (name, _, r) in fracops_identity_residuals(0.5, 512).unwrap() {
            let limit = match name.as_str() {
                "caputo_constant" | "reverse_involution" => 1e-14,
                "backward_rl_constant" => 1e-2,
                _ => 1e-3,
            };
            assert!(r < limit, "{name}: {r}");
        }
    }
}
