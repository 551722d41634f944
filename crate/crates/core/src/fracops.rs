//! Fractional operators on uniform time grids: the L1 Caputo scheme, the
//! product-integrated Riemann–Liouville integral, and their backward
//! (terminal-time) counterparts obtained by time reversal.

use crate::special::gamma_fn;
use crate::{Error, Result};

/// Uniform grid `t_n = n Δt`, `n = 0..=N`, `Δt = T / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(Error::Domain("time grid needs at least one step".into()));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of nodes `N + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, n: usize) -> f64 {
        if n == self.steps {
            self.horizon
        } else {
            n as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |n| self.node(n))
    }

    /// Trapezoid weights for `∫_0^T · dt`.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let dt = self.dt();
        let mut w = vec![dt; self.len()];
        w[0] = 0.5 * dt;
        w[self.steps] = 0.5 * dt;
        w
    }
}

/// Node values of a scalar function of time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "series has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `(self, other)_{L²(0,T)}` by the trapezoid rule.
    pub fn dot(&self, other: &TimeSeries) -> f64 {
        self.grid
            .trapezoid_weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, c: f64) -> TimeSeries {
        TimeSeries { grid: self.grid, values: self.values.iter().map(|v| c * v).collect() }
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("fractional order must lie in (0, 1), got {alpha}")))
    }
}

/// Values reversed on the node set, `h(t) ↦ h(T - t)`.
pub fn time_reverse(h: &TimeSeries) -> TimeSeries {
    let mut values = h.values.clone();
    values.reverse();
    TimeSeries { grid: h.grid, values }
}

/// L1 scheme for `∂_t^α u(t_n)`; the value at `t_0` is set to zero.
pub fn caputo_derivative(u: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    check_order(alpha)?;
    Ok(TimeSeries { grid: u.grid, values: caputo_l1(u.values(), alpha, u.grid.dt())? })
}

/// L1 weights `b_j = (j+1)^{1-α} - j^{1-α}`.
pub fn l1_weights(alpha: f64, count: usize) -> Vec<f64> {
    let p = 1.0 - alpha;
    (0..count).map(|j| ((j + 1) as f64).powf(p) - (j as f64).powf(p)).collect()
}

pub(crate) fn caputo_l1(u: &[f64], alpha: f64, dt: f64) -> Result<Vec<f64>> {
    let n_nodes = u.len();
    let b = l1_weights(alpha, n_nodes);
    let scale = 1.0 / (gamma_fn(2.0 - alpha)? * dt.powf(alpha));
    let mut out = vec![0.0; n_nodes];
    for n in 1..n_nodes {
        let mut acc = 0.0;
        for j in 0..n {
            acc += b[j] * (u[n - j] - u[n - j - 1]);
        }
        out[n] = scale * acc;
    }
    Ok(out)
}

/// Forward Riemann–Liouville integral `(1/Γ(ν)) ∫_0^t (t-s)^{ν-1} h(s) ds`,
/// exact on the piecewise-linear interpolant of `h`.
pub(crate) fn forward_integral(h: &[f64], nu: f64, dt: f64) -> Result<Vec<f64>> {
    let n_nodes = h.len();
    let p = nu + 1.0;
    // c[m] = (m+1)^{ν+1} - 2 m^{ν+1} + (m-1)^{ν+1}, m ≥ 1
    let pw: Vec<f64> = (0..=n_nodes).map(|m| (m as f64).powf(p)).collect();
    let scale = dt.powf(nu) / gamma_fn(nu + 2.0)?;
    let mut out = vec![0.0; n_nodes];
    for n in 1..n_nodes {
        let nf = n as f64;
        let mut acc = (pw[n - 1] - (nf - 1.0 - nu) * nf.powf(nu)) * h[0];
        for j in 1..n {
            let m = n - j;
            acc += (pw[m + 1] - 2.0 * pw[m] + pw[m - 1]) * h[j];
        }
        acc += h[n];
        out[n] = scale * acc;
    }
    Ok(out)
}

/// Backward integral `I_{T-}^ν h(t) = (1/Γ(ν)) ∫_t^T (τ-t)^{ν-1} h(τ) dτ`.
pub fn backward_integral(h: &TimeSeries, nu: f64) -> Result<TimeSeries> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("integral order must be positive, got {nu}")));
    }
    let rev = time_reverse(h);
    let fwd = forward_integral(rev.values(), nu, h.grid.dt())?;
    Ok(time_reverse(&TimeSeries { grid: h.grid, values: fwd }))
}

/// Forward Riemann–Liouville derivative `d/dt I^{1-α} h`: product
/// integration followed by one-sided three-point differences. The value at
/// `t_0` is linearly extrapolated.
pub(crate) fn forward_rl_derivative(h: &[f64], alpha: f64, dt: f64) -> Result<Vec<f64>> {
    let n_nodes = h.len();
    if n_nodes < 4 {
        return Err(Error::GridTooCoarse("RL derivative needs at least 3 steps".into()));
    }
    let j = forward_integral(h, 1.0 - alpha, dt)?;
    let inv = 1.0 / (2.0 * dt);
    let mut out = vec![0.0; n_nodes];
    out[1] = (-3.0 * j[1] + 4.0 * j[2] - j[3]) * inv;
    for n in 2..n_nodes {
        out[n] = (3.0 * j[n] - 4.0 * j[n - 1] + j[n - 2]) * inv;
    }
    out[0] = 2.0 * out[1] - out[2];
    Ok(out)
}

/// Backward Riemann–Liouville derivative
/// `D_t^α h(t) = -(1/Γ(1-α)) d/dt ∫_t^T (τ-t)^{-α} h(τ) dτ`.
pub fn backward_rl_derivative(h: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    check_order(alpha)?;
    let rev = time_reverse(h);
    let fwd = forward_rl_derivative(rev.values(), alpha, h.grid.dt())?;
    Ok(time_reverse(&TimeSeries { grid: h.grid, values: fwd }))
}
