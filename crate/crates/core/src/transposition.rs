//! Weak solutions of the Dirichlet problem for data `g ∈ L²(Σ)` defined by
//! the transposition identity `(u, f)_{L²(Q)} + ⟨g, ∂_{ν_A} v_f⟩ = 0`.
//!
//! Two constructions are provided. The Riesz route tests the identity
//! against separated sources `φ_k ⊗ ψ_m` and reads off the coefficients of
//! `u`; the closed-form route inserts the same sources analytically, which
//! turns each mode into a forward Duhamel solve driven by the boundary flux
//! pairing `-(g_L ∂_ν φ_k(0) + g_R ∂_ν φ_k(L))`.
//!
//! The pairing is the `L²(Σ)` inner product; genuinely distributional data
//! must be mollified first.

use rayon::prelude::*;

use crate::dual::{dual_flux, solve_dual};
use crate::elliptic::Coefficients;
use crate::field::{BoundaryData, SpaceTimeField};
use crate::forward::{SpectralSolve, SpectralSolver};
use crate::fracops::TimeGrid;
use crate::{Error, Result};

/// Guard added to the denominator of [`duality_residual`].
pub const RESIDUAL_GUARD: f64 = 1e-300;

/// `ψ_0 = 1/√T`, `ψ_m = √(2/T) cos(mπt/T)`, sampled on the grid. These are
/// exactly orthonormal under the trapezoid rule for `m < N`.
pub fn cosine_basis(tgrid: &TimeGrid, count: usize) -> Vec<Vec<f64>> {
    let t = tgrid.horizon();
    (0..count)
        .map(|m| {
            let (scale, freq) = if m == 0 {
                ((1.0 / t).sqrt(), 0.0)
            } else {
                ((2.0 / t).sqrt(), m as f64 * std::f64::consts::PI / t)
            };
            tgrid.nodes().map(|x| scale * (freq * x).cos()).collect()
        })
        .collect()
}

fn check_data(g: &BoundaryData, solver: &SpectralSolver) -> Result<()> {
    if g.tgrid() != solver.tgrid() {
        return Err(Error::GridMismatch("boundary data and solver time grids differ".into()));
    }
    if g.left().values().iter().chain(g.right().values()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("boundary data must be finite".into()));
    }
    Ok(())
}

/// Per-mode flux pairing `g_L(t) ∂_ν φ_k(0) + g_R(t) ∂_ν φ_k(L)`.
fn flux_pairing(g: &BoundaryData, flux: (f64, f64)) -> Vec<f64> {
    g.left()
        .values()
        .iter()
        .zip(g.right().values())
        .map(|(l, r)| l * flux.0 + r * flux.1)
        .collect()
}

fn kernel_t(solver: &SpectralSolver, k: usize, y: &[f64]) -> Vec<f64> {
    solver.kernel(k).transpose(y)
}

/// Mode trajectories `u_k(t)` of the closed-form construction.
pub fn closed_form_modes(g: &BoundaryData, solver: &SpectralSolver) -> Result<(Vec<Vec<f64>>, f64)> {
    check_data(g, solver)?;
    let basis = solver.basis();
    let sources: Vec<Vec<f64>> = (0..basis.len())
        .map(|k| flux_pairing(g, basis.flux(k)).into_iter().map(|v| -v).collect())
        .collect();
    let tail = solver.tail_fraction(&sources);
    let modes = sources
        .par_iter()
        .enumerate()
        .map(|(k, s)| solver.kernel(k).forward(s))
        .collect();
    Ok((modes, tail))
}

/// `u_k(t) = -∫_0^t (t-s)^{α-1} E_{α,α}(-λ_k(t-s)^α) [g_L ∂_ν φ_k(0) + g_R ∂_ν φ_k(L)](s) ds`.
pub fn weak_solution_closed_form(g: &BoundaryData, solver: &SpectralSolver) -> Result<SpectralSolve> {
    let (modes, tail_fraction) = closed_form_modes(g, solver)?;
    Ok(SpectralSolve { field: solver.synthesize(&modes), tail_fraction })
}

/// Riesz-representation construction over `K` spatial modes and `P` cosine
/// time modes: `u_{km} = -(g, ∂_{ν_A} v_{φ_k ⊗ ψ_m})_{L²(Σ)}`.
pub fn weak_solution_riesz(g: &BoundaryData, solver: &SpectralSolver, time_modes: usize) -> Result<SpaceTimeField> {
    check_data(g, solver)?;
    let tgrid = solver.tgrid();
    let sgrid = solver.sgrid();
    if time_modes == 0 || time_modes > tgrid.steps() / 4 {
        return Err(Error::BasisSize(format!(
            "need 1 <= P <= N/4 = {}, got {time_modes}",
            tgrid.steps() / 4
        )));
    }
    if solver.basis().len() > sgrid.cells() / 4 {
        return Err(Error::BasisSize("K exceeds M/4".into()));
    }
    let psi = cosine_basis(&tgrid, time_modes);
    let w = tgrid.trapezoid_weights();
    let basis = solver.basis();
    let modes: Vec<Vec<f64>> = (0..basis.len())
        .into_par_iter()
        .map(|k| {
            // the flux of φ_k v(t) is ∂_ν φ_k · v(t), so the Σ-pairing with g
            // is the time integral of v against the per-mode flux pairing
            let pairing = flux_pairing(g, basis.flux(k));
            let mut traj = vec![0.0; tgrid.len()];
            for p in &psi {
                // trapezoid-adjoint dual trajectory W⁻¹Fᵀ(Wψ), so that the
                // discrete identity (u_k, ψ) = -(pairing, v) holds exactly
                let weighted: Vec<f64> = p.iter().zip(&w).map(|(a, w)| a * w).collect();
                let v: Vec<f64> = kernel_t(solver, k, &weighted).into_iter().zip(&w).map(|(a, w)| a / w).collect();
                let coeff: f64 = -v.iter().zip(&pairing).zip(&w).map(|((a, b), w)| w * a * b).sum::<f64>();
                for (t, pv) in traj.iter_mut().zip(p) {
                    *t += coeff * pv;
                }
            }
            traj
        })
        .collect();
    Ok(solver.synthesize(&modes))
}

/// Normalized defect of the transposition identity for the test source `f`:
/// `|(u,f) + (g, ∂_ν v_f)| / (‖u‖‖f‖ + ‖g‖‖f‖ + ε)`.
pub fn duality_residual(
    u: &SpaceTimeField,
    g: &BoundaryData,
    f: &SpaceTimeField,
    solver: &SpectralSolver,
    coeffs: &Coefficients,
) -> Result<f64> {
    u.same_grids(f)?;
    if g.tgrid() != u.tgrid() {
        return Err(Error::GridMismatch("boundary data and field time grids differ".into()));
    }
    let v = solve_dual(f, solver)?.field;
    let flux = dual_flux(&v, coeffs)?;
    let lhs = u.dot(f)? + g.dot(&flux);
    let fnorm = f.l2_norm();
    Ok(lhs.abs() / (u.l2_norm() * fnorm + g.l2_norm() * fnorm + RESIDUAL_GUARD))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{assemble_operator, eigendecompose, SpatialGrid};
    use crate::fracops::TimeSeries;

    fn solver() -> (Coefficients, SpectralSolver) {
        let s = SpatialGrid::new(1.0, 64).unwrap();
        let c = Coefficients::constant(&s);
        let op = assemble_operator(&c, &s).unwrap();
        let b = eigendecompose(&op, &c, 16).unwrap();
        (c, SpectralSolver::new(0.5, b, TimeGrid::new(1.0, 64).unwrap()).unwrap())
    }

    #[test]
    fn cosine_basis_is_discretely_orthonormal() {
        let t = TimeGrid::new(2.0, 32).unwrap();
        let psi = cosine_basis(&t, 8);
        let w = t.trapezoid_weights();
        for i in 0..8 {
            for j in 0..8 {
                let d: f64 = psi[i].iter().zip(&psi[j]).zip(&w).map(|((a, b), w)| w * a * b).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let (c, sv) = solver();
        let g = BoundaryData::zeros(sv.tgrid());
        assert_eq!(weak_solution_closed_form(&g, &sv).unwrap().field.l2_norm(), 0.0);
        assert_eq!(weak_solution_riesz(&g, &sv, 8).unwrap().l2_norm(), 0.0);
        let u = SpaceTimeField::zeros(sv.sgrid(), sv.tgrid());
        let f = SpaceTimeField::from_fn(sv.sgrid(), sv.tgrid(), |x, t| x * t);
        assert_eq!(duality_residual(&u, &g, &f, &sv, &c).unwrap(), 0.0);
    }

    #[test]
    fn basis_size_limits() {
        let (_, sv) = solver();
        let g = BoundaryData::zeros(sv.tgrid());
        assert!(matches!(weak_solution_riesz(&g, &sv, 17), Err(Error::BasisSize(_))));
        assert!(weak_solution_riesz(&g, &sv, 0).is_err());
    }

    #[test]
    fn riesz_is_linear() {
        let (_, sv) = solver();
        let t = sv.tgrid();
        let g = BoundaryData::new(TimeSeries::from_fn(t, |t| (5.0 * t).sin()), TimeSeries::from_fn(t, |t| t * t)).unwrap();
        let u1 = weak_solution_riesz(&g, &sv, 16).unwrap();
        let u2 = weak_solution_riesz(&g.scaled(2.0), &sv, 16).unwrap();
        assert!(u2.sub(&u1.scaled(2.0)).unwrap().l2_norm() <= 1e-13 * u2.l2_norm());
    }
}
