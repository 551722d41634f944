//! The backward dual system `D_t^α v + A v = f`, `v|_Σ = 0`,
//! `I_{T-}^{1-α} v(·,T) = 0`, solved by the time-reflected Duhamel formula,
//! and the conormal flux of its solution on Σ.

use rayon::prelude::*;

use crate::elliptic::Coefficients;
use crate::elliptic::green_flux;
use crate::field::{BoundaryData, SpaceTimeField};
use crate::forward::{SpectralSolve, SpectralSolver};
use crate::fracops::{backward_integral, TimeSeries};
use crate::Result;

/// `v_f(x,t) = Σ_k φ_k(x) ∫_t^T (τ-t)^{α-1} E_{α,α}(-λ_k(τ-t)^α) f_k(τ) dτ`
/// computed with the anti-causal product-integration convolution.
pub fn solve_dual(f: &SpaceTimeField, solver: &SpectralSolver) -> Result<SpectralSolve> {
    solver.check_field(f)?;
    let src = solver.project(f);
    let tail_fraction = solver.tail_fraction(&src);
    let modes: Vec<Vec<f64>> = src
        .par_iter()
        .enumerate()
        .map(|(k, s)| solver.kernel(k).backward(s))
        .collect();
    Ok(SpectralSolve { field: solver.synthesize(&modes), tail_fraction })
}

/// Second code path: reflect `f` in time, run the forward solver, reflect
/// the result back.
pub fn solve_dual_reflected(f: &SpaceTimeField, solver: &SpectralSolver) -> Result<SpectralSolve> {
    let w = solver.solve_forward(&f.time_reversed())?;
    Ok(SpectralSolve { field: w.field.time_reversed(), tail_fraction: w.tail_fraction })
}

/// Scalar dual trajectory of mode `k` for the time profile `source`.
pub fn dual_mode(solver: &SpectralSolver, k: usize, source: &[f64]) -> Vec<f64> {
    solver.kernel(k).backward(source)
}

/// `∂_{ν_A} v` on both boundary points for every time slice.
pub fn dual_flux(v: &SpaceTimeField, coeffs: &Coefficients) -> Result<BoundaryData> {
    let tgrid = v.tgrid();
    let sgrid = v.sgrid();
    let mut left = Vec::with_capacity(tgrid.len());
    let mut right = Vec::with_capacity(tgrid.len());
    for n in 0..tgrid.len() {
        let (l, r) = green_flux(&v.slice_at(n), coeffs, &sgrid)?;
        left.push(l);
        right.push(r);
    }
    BoundaryData::new(TimeSeries::new(tgrid, left)?, TimeSeries::new(tgrid, right)?)
}

/// `|I_{T-}^{1-α} v(T)| / ‖v‖_{L²(0,T)}` for one mode trajectory.
pub fn terminal_residual(v: &TimeSeries, alpha: f64) -> Result<f64> {
    let i = backward_integral(v, 1.0 - alpha)?;
    let last = *i.values().last().expect("non-empty series");
    let norm = v.l2_norm();
    Ok(if norm == 0.0 { last.abs() } else { last.abs() / norm })
}
