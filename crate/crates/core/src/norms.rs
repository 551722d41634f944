//! Fractional Sobolev norms on the space-time cylinder and its lateral
//! boundary, plus the exponent arithmetic of the trace and interpolation
//! statements.
//!
//! Fractional orders are measured with the Gagliardo–Slobodeckij double
//! integral of the piecewise-linear interpolant. The quadrature is a
//! quadratic form `hᵀ G h`: cells on the diagonal and directly adjacent
//! cell pairs are integrated in closed form (the kernel is singular there),
//! all other cell pairs by the tensor trapezoid rule.
//!
//! Mixed norms count the `L²` part once:
//! `‖u‖²_{H^{r,s}} = ‖u‖²_{L²(Q)} + ∫ |u(t)|²_{H^r} dt + |u|²_{H^s(0,T;L²)}`.

use ndarray::Array2;

use crate::elliptic::{EigenBasis, SpatialGrid};
use crate::field::{BoundaryData, SpaceTimeField};
use crate::fracops::TimeSeries;
use crate::linalg::Cholesky;
use crate::{Error, Result};

/// Relative share the singular end cells may carry before a weighted
/// integral is declared divergent.
pub const DIVERGENCE_RATIO: f64 = 0.1;
/// Largest acceptable condition estimate of the negative-norm Gram matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// Tail energy above which a spectral norm is rejected as truncated.
pub const SPECTRAL_TAIL_TOL: f64 = 1e-6;

/// Space order `r` and time order `s` of `H^{r,s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityIndex {
    pub r: f64,
    pub s: f64,
}

impl RegularityIndex {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        if !(r.abs() <= 2.0 && s.abs() <= 1.0) {
            return Err(Error::Domain(format!("index ({r}, {s}) outside |r| <= 2, |s| <= 1")));
        }
        Ok(Self { r, s })
    }
}

/// `ρ(x) = min(x, L - x)`, the distance to the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    rho: Vec<f64>,
}

impl WeightFunction {
    pub fn distance(grid: &SpatialGrid) -> Self {
        let l = grid.length();
        let m = grid.cells();
        let rho = (0..=m)
            .map(|j| match j {
                0 => 0.0,
                j if j == m => 0.0,
                j => {
                    let x = grid.node(j);
                    x.min(l - x)
                }
            })
            .collect();
        Self { rho }
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }
}

fn check_order(s: f64, what: &str) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} order must lie in (0, 1), got {s}")))
    }
}

fn power_integral(e: f64) -> f64 {
    // ∫_1^2 u^e du
    if (e + 1.0).abs() < 1e-14 {
        std::f64::consts::LN_2
    } else {
        (2f64.powf(e + 1.0) - 1.0) / (e + 1.0)
    }
}

/// `J_{pq}(s) = ∫_0^1∫_0^1 a^p b^q (a+b)^{-1-2s} da db` for `(p,q) = (2,0)`
/// and `(1,1)`.
pub(crate) fn adjacent_constants(s: f64) -> (f64, f64) {
    let tri = 1.0 / (3.0 - 2.0 * s);
    let j20 = tri / 3.0
        + (2.0 * power_integral(-1.0 - 2.0 * s) - power_integral(2.0 - 2.0 * s) + 3.0 * power_integral(1.0 - 2.0 * s)
            - 3.0 * power_integral(-2.0 * s))
            / 3.0;
    let j11 = tri / 6.0 + power_integral(-2.0 * s)
        - 2.0 / 3.0 * power_integral(-1.0 - 2.0 * s)
        - power_integral(2.0 - 2.0 * s) / 6.0;
    (j20, j11)
}

/// Gagliardo quadratic form on `nodes` equispaced points: the returned
/// row-major matrix `G` satisfies `hᵀ G h ≈ ∬ |h(t)-h(τ)|² / |t-τ|^{1+2s}`.
pub fn gagliardo_matrix(nodes: usize, step: f64, s: f64) -> Array2<f64> {
    let mut g = Array2::<f64>::zeros((nodes, nodes));
    if nodes < 2 {
        return g;
    }
    let cells = nodes - 1;
    let add_pair = |g: &mut Array2<f64>, i: usize, j: usize, w: f64| {
        g[[i, i]] += w;
        g[[j, j]] += w;
        g[[i, j]] -= w;
        g[[j, i]] -= w;
    };

    let scale = step.powf(1.0 - 2.0 * s);
    let diag = 2.0 * scale / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
    for p in 0..cells {
        add_pair(&mut g, p, p + 1, diag);
    }

    let (j20, j11) = adjacent_constants(s);
    for p in 0..cells.saturating_sub(1) {
        // both orders of the adjacent pair
        add_pair(&mut g, p, p + 1, 2.0 * scale * j20);
        add_pair(&mut g, p + 1, p + 2, 2.0 * scale * j20);
        // cross term 4 J11 δ_p δ_{p+1}, δ_p = h_{p+1} - h_p
        let c = 2.0 * scale * j11;
        let e1 = [(p, -1.0), (p + 1, 1.0)];
        let e2 = [(p + 1, -1.0), (p + 2, 1.0)];
        for &(i, a) in &e1 {
            for &(j, b) in &e2 {
                g[[i, j]] += c * a * b;
                g[[j, i]] += c * a * b;
            }
        }
    }

    // remaining cell pairs: tensor trapezoid, weight accumulated per node pair
    let q = 0.25 * step * step * 2.0;
    let kernel = |d: usize| (d as f64 * step).powf(-1.0 - 2.0 * s);
    let mut count = vec![0.0f64; nodes * nodes];
    for p in 0..cells {
        for qc in (p + 2)..cells {
            for i in [p, p + 1] {
                for j in [qc, qc + 1] {
                    count[i * nodes + j] += 1.0;
                }
            }
        }
    }
    for i in 0..nodes {
        for j in (i + 1)..nodes {
            let c = count[i * nodes + j];
            if c != 0.0 {
                add_pair(&mut g, i, j, q * c * kernel(j - i));
            }
        }
    }
    g
}

fn quadratic_form(g: &Array2<f64>, h: &[f64]) -> f64 {
    let n = h.len();
    let mut s = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += g[[i, j]] * h[j];
        }
        s += h[i] * row;
    }
    s
}

fn trapezoid_sq(values: &[f64], step: f64) -> f64 {
    let n = values.len() - 1;
    let mut s = 0.5 * (values[0] * values[0] + values[n] * values[n]);
    for v in &values[1..n] {
        s += v * v;
    }
    step * s
}

/// Slobodeckij seminorm squared of node values on a uniform grid.
pub fn slobodeckij_seminorm_sq(values: &[f64], step: f64, s: f64) -> f64 {
    let g = gagliardo_matrix(values.len(), step, s);
    quadratic_form(&g, values).max(0.0)
}

/// `(‖h‖² + |h|²_{H^s(0,T)})^{1/2}`.
pub fn slobodeckij_time_norm(h: &TimeSeries, s: f64) -> Result<f64> {
    check_order(s, "time")?;
    let dt = h.grid().dt();
    Ok((trapezoid_sq(h.values(), dt) + slobodeckij_seminorm_sq(h.values(), dt, s)).sqrt())
}

/// `(‖u‖² + |u|²_{H^r(0,L)})^{1/2}` for a full-grid node vector.
pub fn slobodeckij_space_norm(u: &[f64], r: f64, sgrid: &SpatialGrid) -> Result<f64> {
    check_order(r, "space")?;
    if u.len() != sgrid.len() {
        return Err(Error::GridMismatch("vector does not match spatial grid".into()));
    }
    let h = sgrid.h();
    Ok((trapezoid_sq(u, h) + slobodeckij_seminorm_sq(u, h, r)).sqrt())
}

/// Squared pieces of the mixed norm: `(‖u‖²_{L²(Q)}, ∫|u(t)|²_r dt, |u|²_s)`.
pub fn hrs_components(u: &SpaceTimeField, idx: RegularityIndex) -> Result<(f64, f64, f64)> {
    if !(idx.r >= 0.0 && idx.r < 1.0 && idx.s >= 0.0 && idx.s < 1.0) {
        return Err(Error::Domain(format!(
            "mixed norm implemented for 0 <= r, s < 1, got ({}, {})",
            idx.r, idx.s
        )));
    }
    let sgrid = u.sgrid();
    let tgrid = u.tgrid();
    let vals = u.values();
    let l2 = u.l2_norm().powi(2);
    let wt = tgrid.trapezoid_weights();
    let wx = sgrid.trapezoid_weights();

    let space = if idx.r > 0.0 {
        let gx = gagliardo_matrix(sgrid.len(), sgrid.h(), idx.r);
        let gu = gx.dot(vals);
        let mut acc = 0.0;
        for (n, w) in wt.iter().enumerate() {
            let col: f64 = gu.column(n).iter().zip(vals.column(n)).map(|(a, b)| a * b).sum();
            acc += w * col.max(0.0);
        }
        acc
    } else {
        0.0
    };

    let time = if idx.s > 0.0 {
        let gt = gagliardo_matrix(tgrid.len(), tgrid.dt(), idx.s);
        // Gram of time slices in L²(Ω)
        let weighted = Array2::from_shape_fn(vals.dim(), |(j, n)| wx[j] * vals[[j, n]]);
        let gram = vals.t().dot(&weighted);
        (&gt * &gram).sum().max(0.0)
    } else {
        0.0
    };
    Ok((l2, space, time))
}

/// `‖u‖_{H^{r,s}(Q)}` for `0 ≤ r, s < 1`.
pub fn hrs_norm_q(u: &SpaceTimeField, idx: RegularityIndex) -> Result<f64> {
    let (a, b, c) = hrs_components(u, idx)?;
    Ok((a + b + c).sqrt())
}

/// `‖g‖_{H^{r,s}(Σ)}`; in one space dimension `H^r(Γ)` is the Euclidean
/// norm on the two endpoint values, so `r` does not enter.
pub fn hrs_norm_sigma(g: &BoundaryData, idx: RegularityIndex) -> Result<f64> {
    if !(idx.s >= 0.0 && idx.s < 1.0) {
        return Err(Error::Domain(format!("boundary norm implemented for 0 <= s < 1, got {}", idx.s)));
    }
    let mut total = g.l2_norm().powi(2);
    if idx.s > 0.0 {
        let dt = g.tgrid().dt();
        let gt = gagliardo_matrix(g.tgrid().len(), dt, idx.s);
        total += quadratic_form(&gt, g.left().values()).max(0.0);
        total += quadratic_form(&gt, g.right().values()).max(0.0);
    }
    Ok(total.sqrt())
}

fn divergence_check(singular: f64, rest: f64) -> Result<()> {
    let ratio = if rest > 0.0 {
        singular / rest
    } else if singular > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    if ratio > DIVERGENCE_RATIO {
        Err(Error::Divergent { ratio })
    } else {
        Ok(())
    }
}

/// `∫_0^T |h(t)|² t^{-2s} dt`: midpoint rule on the first cell, trapezoid
/// on the rest. Flags divergence when the first cell dominates.
pub fn hardy_integral(h: &TimeSeries, s: f64) -> Result<f64> {
    let g = h.grid();
    let dt = g.dt();
    let v = h.values();
    let n = g.steps();
    let mid = 0.5 * (v[0] + v[1]);
    let first = dt * mid * mid * (0.5 * dt).powf(-2.0 * s);
    let mut rest = 0.0;
    for k in 1..=n {
        let w = if k == 1 || k == n { 0.5 * dt } else { dt };
        rest += w * v[k] * v[k] * g.node(k).powf(-2.0 * s);
    }
    divergence_check(first, rest)?;
    Ok(first + rest)
}

/// `(‖h‖²_{H^s} + ∫ |h|² t^{-2s} dt)^{1/2}`, the norm of `H̃^s_{0+}(0,T)`.
pub fn hardy_weighted_time_norm(h: &TimeSeries, s: f64) -> Result<f64> {
    check_order(s, "time")?;
    let base = slobodeckij_time_norm(h, s)?;
    Ok((base * base + hardy_integral(h, s)?).sqrt())
}

/// `∫_Ω |u|² / ρ dx`, midpoint on the two boundary cells.
pub fn boundary_weighted_integral(u: &[f64], w: &WeightFunction, sgrid: &SpatialGrid) -> Result<f64> {
    if u.len() != sgrid.len() || w.rho.len() != sgrid.len() {
        return Err(Error::GridMismatch("vector or weight does not match spatial grid".into()));
    }
    let h = sgrid.h();
    let m = sgrid.cells();
    let ml = 0.5 * (u[0] + u[1]);
    let mr = 0.5 * (u[m - 1] + u[m]);
    let singular = h * (ml * ml + mr * mr) / (0.5 * h);
    let mut rest = 0.0;
    for j in 1..m {
        let wt = if j == 1 || j == m - 1 { 0.5 * h } else { h };
        rest += wt * u[j] * u[j] / w.rho[j];
    }
    divergence_check(singular, rest)?;
    Ok(singular + rest)
}

/// `(‖u‖²_{H^{1/2}} + ∫ |u|²/ρ)^{1/2}`, the `H_{00}^{1/2}(Ω)` norm.
pub fn weighted_boundary_norm_h00(u: &[f64], w: &WeightFunction, sgrid: &SpatialGrid) -> Result<f64> {
    let base = slobodeckij_space_norm(u, 0.5, sgrid)?;
    Ok((base * base + boundary_weighted_integral(u, w, sgrid)?).sqrt())
}

fn spectral_sq(u: &[f64], basis: &EigenBasis, theta: f64) -> (f64, f64) {
    let c = basis.project(u);
    let total = basis.grid().dot(u, u);
    let captured: f64 = c.iter().map(|x| x * x).sum();
    let weighted = c.iter().zip(basis.lambda()).map(|(c, l)| l.powf(2.0 * theta) * c * c).sum();
    (weighted, (total - captured).max(0.0) / total.max(f64::MIN_POSITIVE))
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta must lie in [0, 1], got {theta}")))
    }
}

/// `(Σ_k λ_k^{2θ} |(u, φ_k)|²)^{1/2}`, the norm of `D(A^θ)`.
pub fn spectral_power_norm(u: &[f64], basis: &EigenBasis, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let (v, tail) = spectral_sq(u, basis, theta);
    if tail > SPECTRAL_TAIL_TOL {
        return Err(Error::Truncation { fraction: tail });
    }
    Ok(v.sqrt())
}

/// Time-integrated spectral power norm, `(∫ ‖u(t)‖²_{D(A^θ)} dt)^{1/2}`.
pub fn spectral_power_norm_field(u: &SpaceTimeField, basis: &EigenBasis, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if u.sgrid() != basis.grid() {
        return Err(Error::GridMismatch("field and basis grids differ".into()));
    }
    let w = u.tgrid().trapezoid_weights();
    let mut acc = 0.0;
    let mut tail_energy = 0.0;
    let mut energy = 0.0;
    for (n, wn) in w.iter().enumerate() {
        let slice = u.slice_at(n);
        let (v, tail) = spectral_sq(&slice, basis, theta);
        let e = u.sgrid().dot(&slice, &slice);
        acc += wn * v;
        tail_energy += wn * tail * e;
        energy += wn * e;
    }
    if energy > 0.0 && tail_energy / energy > SPECTRAL_TAIL_TOL {
        return Err(Error::Truncation { fraction: tail_energy / energy });
    }
    Ok(acc.sqrt())
}

/// `‖g‖_{H^{r,s}(Σ)}` for `r, s ≤ 0` as the dual norm of `H^{|s|}(0,T)` per
/// endpoint: `Σ (Mg)ᵀ S⁻¹ (Mg)` with `M` the trapezoid mass and
/// `S = M + G` the `H^{|s|}` Gram matrix.
pub fn negative_norm_sigma(g: &BoundaryData, idx: RegularityIndex) -> Result<f64> {
    if idx.r > 0.0 || idx.s > 0.0 || idx.s <= -1.0 {
        return Err(Error::Domain(format!(
            "negative norm needs r <= 0 and -1 < s <= 0, got ({}, {})",
            idx.r, idx.s
        )));
    }
    let order = -idx.s;
    if order == 0.0 {
        return Ok(g.l2_norm());
    }
    let tgrid = g.tgrid();
    let n = tgrid.len();
    let mass = tgrid.trapezoid_weights();
    let mut s = gagliardo_matrix(n, tgrid.dt(), order);
    for i in 0..n {
        s[[i, i]] += mass[i];
    }
    let dense: Vec<f64> = s.iter().cloned().collect();
    let ch = Cholesky::factor(&dense, n)?;
    let cond = ch.condition_estimate();
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    let mut total = 0.0;
    for series in [g.left(), g.right()] {
        let mg: Vec<f64> = series.values().iter().zip(&mass).map(|(v, w)| v * w).collect();
        let y = ch.solve(&mg);
        total += mg.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(total.max(0.0).sqrt())
}

/// Conormal trace exponents: `μ/r = ν/s = (r - 3/2)/r`, `ν = 0` if `s = 0`.
pub fn trace_exponents(r: f64, s: f64) -> Result<(f64, f64)> {
    if !(r > 1.5) {
        return Err(Error::Domain(format!("trace needs r > 3/2, got {r}")));
    }
    if s < 0.0 {
        return Err(Error::Domain(format!("time order must be >= 0, got {s}")));
    }
    let mu = r - 1.5;
    let nu = if s == 0.0 { 0.0 } else { s * mu / r };
    Ok((mu, nu))
}

/// Componentwise `(1-θ) idx0 + θ idx1`, evaluated as `idx0 + θ (idx1 - idx0)`.
pub fn interpolation_index(theta: f64, idx0: RegularityIndex, idx1: RegularityIndex) -> RegularityIndex {
    RegularityIndex {
        r: idx0.r + theta * (idx1.r - idx0.r),
        s: idx0.s + theta * (idx1.s - idx0.s),
    }
}
