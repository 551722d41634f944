//! Homogeneous-boundary forward problem `∂_t^α u + A u = F`, `u|_Σ = 0`,
//! `u(·,0) = 0`, solved by the spectral Duhamel formula and, independently,
//! by implicit L1 stepping; plus the lifting of smooth Dirichlet data.

use ndarray::Array2;
use rayon::prelude::*;

use crate::elliptic::{Coefficients, DiscreteOperator, EigenBasis, SpatialGrid};
use crate::field::{BoundaryData, SpaceTimeField};
use crate::fracops::{caputo_l1, l1_weights, TimeGrid};
use crate::linalg::solve_tridiagonal;
use crate::special::{gamma_fn, mittag_leffler, MlParams};
use crate::{Error, Result};

/// Energy fraction above which the last retained mode flags truncation.
pub const TRUNCATION_TOL: f64 = 1e-6;

/// Product-integration weights of the scalar Duhamel convolution
/// `∫ (t-s)^{α-1} E_{α,α}(-λ (t-s)^α) F(s) ds` for piecewise-linear `F`.
///
/// On the lag interval `[mΔt, (m+1)Δt]` the kernel is integrated exactly
/// against `1` and `σ - mΔt` through `G(τ) = τ^α E_{α,α+1}(-λτ^α)` and
/// `H(τ) = τ^{1+α} E_{α,α+2}(-λτ^α)`, the first and second antiderivatives.
#[derive(Debug, Clone)]
pub struct ModeKernel {
    /// weight of the source value at the far end of the lag interval
    near: Vec<f64>,
    /// weight of the source value at the near end
    far: Vec<f64>,
}

impl ModeKernel {
    pub fn new(alpha: f64, lambda: f64, tgrid: &TimeGrid) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("fractional order must lie in (0, 1], got {alpha}")));
        }
        let dt = tgrid.dt();
        let n = tgrid.steps();
        let p1 = MlParams::new(alpha, alpha + 1.0)?;
        let p2 = MlParams::new(alpha, alpha + 2.0)?;
        let mut g = Vec::with_capacity(n + 1);
        let mut h = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let tau = m as f64 * dt;
            if m == 0 {
                g.push(0.0);
                h.push(0.0);
                continue;
            }
            let ta = tau.powf(alpha);
            let z = -lambda * ta;
            g.push(ta * mittag_leffler(p1, z)?);
            h.push(tau * ta * mittag_leffler(p2, z)?);
        }
        let mut near = Vec::with_capacity(n);
        let mut far = Vec::with_capacity(n);
        for m in 0..n {
            let a = g[m + 1] - g[m];
            let b = (dt * g[m + 1] - h[m + 1] + h[m]) / dt;
            near.push(a - b);
            far.push(b);
        }
        Ok(Self { near, far })
    }

    /// Causal convolution: value at `t_n` uses sources on `[0, t_n]`.
    pub fn forward(&self, source: &[f64]) -> Vec<f64> {
        let len = source.len();
        let mut out = vec![0.0; len];
        for n in 1..len {
            let mut acc = 0.0;
            for m in 0..n {
                acc += self.near[m] * source[n - m] + self.far[m] * source[n - m - 1];
            }
            out[n] = acc;
        }
        out
    }

    /// Exact transpose of [`forward`](Self::forward) as a matrix. Differs
    /// from [`backward`](Self::backward) only in the endpoint terms.
    pub fn transpose(&self, y: &[f64]) -> Vec<f64> {
        let len = y.len();
        let last = len - 1;
        let mut out = vec![0.0; len];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            if j >= 1 {
                for n in j..len {
                    acc += self.near[n - j] * y[n];
                }
            }
            for n in (j + 1)..=last {
                acc += self.far[n - j - 1] * y[n];
            }
            *o = acc;
        }
        out
    }

    /// Anti-causal convolution: value at `t_n` uses sources on `[t_n, T]`.
    pub fn backward(&self, source: &[f64]) -> Vec<f64> {
        let len = source.len();
        let last = len - 1;
        let mut out = vec![0.0; len];
        for n in 0..last {
            let mut acc = 0.0;
            for m in 0..(last - n) {
                acc += self.near[m] * source[n + m] + self.far[m] * source[n + m + 1];
            }
            out[n] = acc;
        }
        out
    }
}

/// Result of a spectral solve together with its truncation diagnostic.
#[derive(Debug, Clone)]
pub struct SpectralSolve {
    pub field: SpaceTimeField,
    /// Share of the projected source energy carried by the last mode.
    pub tail_fraction: f64,
}

impl SpectralSolve {
    pub fn truncated(&self) -> bool {
        self.tail_fraction > TRUNCATION_TOL
    }

    /// Promote the truncation flag to an error.
    pub fn strict(self) -> Result<SpaceTimeField> {
        if self.truncated() {
            Err(Error::Truncation { fraction: self.tail_fraction })
        } else {
            Ok(self.field)
        }
    }
}

/// Eigenbasis plus precomputed Duhamel weights for one `(α, time grid)`.
/// Immutable once built; share it across solves.
#[derive(Debug, Clone)]
pub struct SpectralSolver {
    alpha: f64,
    tgrid: TimeGrid,
    basis: EigenBasis,
    kernels: Vec<ModeKernel>,
}

impl SpectralSolver {
    pub fn new(alpha: f64, basis: EigenBasis, tgrid: TimeGrid) -> Result<Self> {
        let kernels = basis
            .lambda()
            .par_iter()
            .map(|&l| ModeKernel::new(alpha, l, &tgrid))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { alpha, tgrid, basis, kernels })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tgrid(&self) -> TimeGrid {
        self.tgrid
    }

    pub fn sgrid(&self) -> SpatialGrid {
        self.basis.grid()
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn kernel(&self, k: usize) -> &ModeKernel {
        &self.kernels[k]
    }

    pub(crate) fn check_field(&self, f: &SpaceTimeField) -> Result<()> {
        if f.sgrid() != self.basis.grid() || f.tgrid() != self.tgrid {
            return Err(Error::GridMismatch("field grids differ from the solver grids".into()));
        }
        Ok(())
    }

    /// Mode trajectories `(F(·,t_n), φ_k)` for every retained `k`.
    pub fn project(&self, f: &SpaceTimeField) -> Vec<Vec<f64>> {
        let nt = self.tgrid.len();
        let mut coeffs = vec![vec![0.0; nt]; self.basis.len()];
        for n in 0..nt {
            let slice = f.slice_at(n);
            for (k, c) in self.basis.project(&slice).into_iter().enumerate() {
                coeffs[k][n] = c;
            }
        }
        coeffs
    }

    /// `Σ_k φ_k(x) c_k(t)`, accumulated in mode order.
    pub fn synthesize(&self, coeffs: &[Vec<f64>]) -> SpaceTimeField {
        let sgrid = self.basis.grid();
        let mut values = Array2::zeros((sgrid.len(), self.tgrid.len()));
        for (k, ck) in coeffs.iter().enumerate() {
            let phi = self.basis.phi(k);
            for (j, pj) in phi.iter().enumerate() {
                if *pj == 0.0 {
                    continue;
                }
                let mut row = values.row_mut(j);
                for (v, c) in row.iter_mut().zip(ck) {
                    *v += pj * c;
                }
            }
        }
        SpaceTimeField::new(sgrid, self.tgrid, values).expect("shape built from grids")
    }

    pub(crate) fn tail_fraction(&self, coeffs: &[Vec<f64>]) -> f64 {
        let w = self.tgrid.trapezoid_weights();
        let energy = |c: &Vec<f64>| c.iter().zip(&w).map(|(v, w)| w * v * v).sum::<f64>();
        let total: f64 = coeffs.iter().map(energy).sum();
        match coeffs.last() {
            Some(last) if total > 0.0 => energy(last) / total,
            _ => 0.0,
        }
    }

    /// Forward Duhamel solve of `∂_t^α u + A u = F`, zero boundary and
    /// initial values.
    pub fn solve_forward(&self, f: &SpaceTimeField) -> Result<SpectralSolve> {
        self.check_field(f)?;
        let src = self.project(f);
        let tail_fraction = self.tail_fraction(&src);
        let modes: Vec<Vec<f64>> = src
            .par_iter()
            .zip(self.kernels.par_iter())
            .map(|(s, kern)| kern.forward(s))
            .collect();
        Ok(SpectralSolve { field: self.synthesize(&modes), tail_fraction })
    }
}

/// Spectral Duhamel solve of the homogeneous-boundary problem.
pub fn solve_homogeneous_spectral(f: &SpaceTimeField, alpha: f64, basis: &EigenBasis) -> Result<SpectralSolve> {
    SpectralSolver::new(alpha, basis.clone(), f.tgrid())?.solve_forward(f)
}

/// Implicit L1 time stepping on the lumped-mass discretization:
/// `(b₀/(Γ(2-α)Δt^α) M + K) uⁿ = M (Fⁿ + history)`.
pub fn solve_homogeneous_l1(f: &SpaceTimeField, alpha: f64, op: &DiscreteOperator) -> Result<SpaceTimeField> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("fractional order must lie in (0, 1), got {alpha}")));
    }
    if f.sgrid() != op.grid() {
        return Err(Error::GridMismatch("source and operator grids differ".into()));
    }
    if f.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearSolve("non-finite source".into()));
    }
    let sgrid = f.sgrid();
    let tgrid = f.tgrid();
    let m = sgrid.cells();
    let nt = tgrid.len();
    let b = l1_weights(alpha, nt);
    let c0 = 1.0 / (gamma_fn(2.0 - alpha)? * tgrid.dt().powf(alpha));
    let diag: Vec<f64> = op.stiffness_diag.iter().zip(&op.mass).map(|(k, w)| k + c0 * w).collect();
    let off = &op.stiffness_off;

    // interior trajectories, u[n][i] for interior node i + 1
    let mut u: Vec<Vec<f64>> = vec![vec![0.0; m - 1]; nt];
    let mut rhs = vec![0.0; m - 1];
    for n in 1..nt {
        for i in 0..m - 1 {
            let mut hist = u[n - 1][i];
            for j in 1..n {
                hist -= b[j] * (u[n - j][i] - u[n - j - 1][i]);
            }
            rhs[i] = op.mass[i] * (f.values()[[i + 1, n]] + c0 * hist);
        }
        u[n] = solve_tridiagonal(off, &diag, off, &rhs)?;
    }
    let mut values = Array2::zeros((sgrid.len(), nt));
    for (n, un) in u.iter().enumerate() {
        for (i, v) in un.iter().enumerate() {
            values[[i + 1, n]] = *v;
        }
    }
    SpaceTimeField::new(sgrid, tgrid, values)
}

/// Linear-in-`x` extension `g̃(x,t) = g_L(t)(1 - x/L) + g_R(t) x/L`.
pub fn lift_boundary_data(g: &BoundaryData, sgrid: &SpatialGrid) -> Result<SpaceTimeField> {
    for v in [g.left().values()[0], g.right().values()[0]] {
        if v.abs() > 1e-12 {
            return Err(Error::Compatibility { value: v });
        }
    }
    let l = sgrid.length();
    let m = sgrid.cells();
    let tgrid = g.tgrid();
    let (gl, gr) = (g.left().values(), g.right().values());
    let values = Array2::from_shape_fn((sgrid.len(), tgrid.len()), |(j, n)| {
        if j == 0 {
            gl[n]
        } else if j == m {
            gr[n]
        } else {
            let s = sgrid.node(j) / l;
            gl[n] * (1.0 - s) + gr[n] * s
        }
    });
    SpaceTimeField::new(*sgrid, tgrid, values)
}

/// Source `F = -A g̃ - ∂_t^α g̃` of the lifted problem (interior rows).
pub fn lifting_source(lift: &SpaceTimeField, alpha: f64, op: &DiscreteOperator) -> Result<SpaceTimeField> {
    let sgrid = lift.sgrid();
    let tgrid = lift.tgrid();
    let m = sgrid.cells();
    let mut values = Array2::zeros((sgrid.len(), tgrid.len()));
    for n in 0..tgrid.len() {
        let ag = op.apply(&lift.slice_at(n));
        for j in 1..m {
            values[[j, n]] = -ag[j];
        }
    }
    for j in 1..m {
        let row = lift.values().row(j).to_vec();
        let d = caputo_l1(&row, alpha, tgrid.dt())?;
        for (n, v) in d.into_iter().enumerate() {
            values[[j, n]] -= v;
        }
    }
    SpaceTimeField::new(sgrid, tgrid, values)
}

/// Regular solution for smooth compatible data: `u = w + g̃` where `w`
/// solves the homogeneous problem with source `-A g̃ - ∂_t^α g̃`.
pub fn solve_lifted(g: &BoundaryData, solver: &SpectralSolver, op: &DiscreteOperator) -> Result<SpectralSolve> {
    let alpha = solver.alpha();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("fractional order must lie in (0, 1), got {alpha}")));
    }
    if g.tgrid() != solver.tgrid() {
        return Err(Error::GridMismatch("boundary data and solver time grids differ".into()));
    }
    let lift = lift_boundary_data(g, &solver.sgrid())?;
    let source = lifting_source(&lift, alpha, op)?;
    let w = solver.solve_forward(&source)?;
    Ok(SpectralSolve { field: w.field.add(&lift)?, tail_fraction: w.tail_fraction })
}

/// Convenience: the same for a bare `(coeffs, basis)` pair.
pub fn solve_lifted_with(
    g: &BoundaryData,
    alpha: f64,
    coeffs: &Coefficients,
    basis: &EigenBasis,
) -> Result<SpectralSolve> {
    let op = crate::elliptic::assemble_operator(coeffs, &basis.grid())?;
    let solver = SpectralSolver::new(alpha, basis.clone(), g.tgrid())?;
    solve_lifted(g, &solver, &op)
}
