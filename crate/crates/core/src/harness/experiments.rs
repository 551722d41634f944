//! Ensemble experiments behind the sweep subcommands.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, GFamily, Level};
use super::data::{boundary_data, smooth_source};
use super::report::{SweepReport, SweepRow};
use crate::elliptic::{assemble_operator, eigendecompose, Coefficients, DiscreteOperator, SpatialGrid};
use crate::field::BoundaryData;
use crate::forward::SpectralSolver;
use crate::fracops::{caputo_l1, TimeGrid};
use crate::norms::{hrs_norm_q, negative_norm_sigma, spectral_power_norm_field, RegularityIndex};
use crate::transposition::{duality_residual, weak_solution_closed_form, weak_solution_riesz};
use crate::Result;

/// Everything that depends on `(α, level)` but not on the realization.
pub struct LevelContext {
    pub alpha: f64,
    pub level: usize,
    pub sizes: Level,
    pub coeffs: Coefficients,
    pub op: DiscreteOperator,
    pub solver: SpectralSolver,
}

impl LevelContext {
    pub fn build(cfg: &ExperimentConfig, alpha: f64, level: usize, sizes: Level) -> Result<Self> {
        let sgrid = SpatialGrid::new(cfg.length, sizes.m)?;
        let tgrid = TimeGrid::new(cfg.horizon, sizes.n)?;
        let coeffs = Coefficients::by_name(&cfg.coefficients, &sgrid)?;
        let op = assemble_operator(&coeffs, &sgrid)?;
        let basis = eigendecompose(&op, &coeffs, sizes.k)?;
        let solver = SpectralSolver::new(alpha, basis, tgrid)?;
        Ok(Self { alpha, level, sizes, coeffs, op, solver })
    }

    pub fn boundary(&self, family: GFamily, seed: u64) -> BoundaryData {
        boundary_data(family, self.solver.tgrid(), seed)
    }
}

/// Per-realization measurements: `(g_norm, u_norm, residual, aux)`.
type Measure = (f64, f64, f64, f64);

fn blank_row(alpha: f64, level: usize, sizes: Level, seed: u64) -> SweepRow {
    SweepRow {
        alpha,
        level,
        m: sizes.m,
        n: sizes.n,
        k: sizes.k,
        seed,
        g_norm: f64::NAN,
        u_norm: f64::NAN,
        ratio: f64::NAN,
        residual: f64::NAN,
        aux: f64::NAN,
        wall_time: 0.0,
        error: String::new(),
    }
}

/// Runs `measure` for every `(α, level, realization)`; failures become
/// rows with the `error` column set.
fn sweep<F>(kind: &str, cfg: &ExperimentConfig, alphas: &[f64], measure: F) -> SweepReport
where
    F: Fn(&LevelContext, u64) -> Result<Measure> + Sync,
{
    let mut rows = Vec::new();
    let seeds: Vec<u64> = (0..cfg.ensemble as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    for &alpha in alphas {
        for (level, sizes) in cfg.levels().into_iter().enumerate() {
            let start = Instant::now();
            let ctx = match LevelContext::build(cfg, alpha, level, sizes) {
                Ok(c) => c,
                Err(e) => {
                    for &seed in &seeds {
                        let mut r = blank_row(alpha, level, sizes, seed);
                        r.error = e.to_string();
                        r.wall_time = start.elapsed().as_secs_f64();
                        rows.push(r);
                    }
                    continue;
                }
            };
            let setup = start.elapsed().as_secs_f64();
            let level_rows: Vec<SweepRow> = seeds
                .par_iter()
                .map(|&seed| {
                    let t0 = Instant::now();
                    let mut r = blank_row(alpha, level, sizes, seed);
                    match measure(&ctx, seed) {
                        Ok((g, u, res, aux)) => {
                            r.g_norm = g;
                            r.u_norm = u;
                            r.ratio = SweepRow::ratio_of(u, g);
                            r.residual = res;
                            r.aux = aux;
                        }
                        Err(e) => r.error = e.to_string(),
                    }
                    r.wall_time = setup + t0.elapsed().as_secs_f64();
                    r
                })
                .collect();
            rows.extend(level_rows);
        }
    }
    SweepReport::new(kind, rows)
}

fn dual_check(ctx: &LevelContext, u: &crate::SpaceTimeField, g: &BoundaryData, seed: u64) -> Result<f64> {
    let f = smooth_source(ctx.solver.sgrid(), ctx.solver.tgrid(), seed);
    duality_residual(u, g, &f, &ctx.solver, &ctx.coeffs)
}

/// `‖u‖_{H^{1/2,α/4}(Q)} / ‖g‖_{L²(Σ)}` for the configured ensemble.
/// `residual` is the transposition defect against a random smooth test
/// source; `aux` is `‖u‖_{L²(Q)}`.
pub fn run_regularity_sweep(cfg: &ExperimentConfig) -> SweepReport {
    sweep("regularity", cfg, &cfg.alphas, |ctx, seed| {
        let g = ctx.boundary(cfg.g_family, seed);
        let u = weak_solution_closed_form(&g, &ctx.solver)?.field;
        let idx = RegularityIndex::new(0.5, ctx.alpha / 4.0)?;
        let un = hrs_norm_q(&u, idx)?;
        Ok((g.l2_norm(), un, dual_check(ctx, &u, &g, seed)?, u.l2_norm()))
    })
}

/// `‖u‖_{L²(Q)} / ‖g‖_{H^{-1/2,-α/4}(Σ)}`; `aux` is `‖g‖_{L²(Σ)}`.
pub fn run_negative_data_check(cfg: &ExperimentConfig) -> SweepReport {
    sweep("negative", cfg, &cfg.alphas, |ctx, seed| {
        let g = ctx.boundary(cfg.g_family, seed);
        let u = weak_solution_closed_form(&g, &ctx.solver)?.field;
        let idx = RegularityIndex::new(-0.5, -ctx.alpha / 4.0)?;
        let gn = negative_norm_sigma(&g, idx)?;
        Ok((gn, u.l2_norm(), dual_check(ctx, &u, &g, seed)?, g.l2_norm()))
    })
}

/// Maximal-regularity surrogate `(‖Au‖² + ‖∂_t^α u‖²)^{1/2} / ‖F‖` for
/// random smooth sources. The Caputo derivative is taken with the L1 scheme
/// on each mode trajectory; `residual` is the relative defect of
/// `∂_t^α u + Au = F` in the retained modes and `aux` is `‖u‖_{L²(Q)}`.
pub fn run_maxreg_check(cfg: &ExperimentConfig) -> SweepReport {
    sweep("maxreg", cfg, &cfg.alphas, |ctx, seed| {
        let f = smooth_source(ctx.solver.sgrid(), ctx.solver.tgrid(), seed);
        let u = ctx.solver.solve_forward(&f)?.field;
        maxreg_measure(ctx, &f, &u)
    })
}

pub(crate) fn maxreg_measure(
    ctx: &LevelContext,
    f: &crate::SpaceTimeField,
    u: &crate::SpaceTimeField,
) -> Result<Measure> {
    let solver = &ctx.solver;
    let tgrid = solver.tgrid();
    let w = tgrid.trapezoid_weights();
    let au = spectral_power_norm_field(u, solver.basis(), 1.0)?;
    let uk = solver.project(u);
    let fk = solver.project(f);
    let (mut cap, mut defect, mut fk_norm) = (0.0, 0.0, 0.0);
    for (k, (uk, fk)) in uk.iter().zip(&fk).enumerate() {
        let lambda = solver.basis().lambda()[k];
        let d = caputo_l1(uk, ctx.alpha, tgrid.dt())?;
        for n in 0..tgrid.len() {
            cap += w[n] * d[n] * d[n];
            let e = d[n] + lambda * uk[n] - fk[n];
            defect += w[n] * e * e;
            fk_norm += w[n] * fk[n] * fk[n];
        }
    }
    let surrogate = (au * au + cap).sqrt();
    let residual = if fk_norm > 0.0 { (defect / fk_norm).sqrt() } else { defect.sqrt() };
    Ok((f.l2_norm(), surrogate, residual, u.l2_norm()))
}

/// `‖u‖_{D(A^{1/2})}` per level (levels differ in `K`) for white-noise data;
/// `ratio` is that norm over `‖g‖_{L²(Σ)}`, `aux` the mixed-norm ratio
/// `‖u‖_{H^{1/2,α/4}(Q)} / ‖g‖_{L²(Σ)}`.
pub fn run_sharpness_probe(cfg: &ExperimentConfig) -> SweepReport {
    sweep("sharpness", cfg, &cfg.alphas, |ctx, seed| {
        let g = ctx.boundary(cfg.g_family, seed);
        let u = weak_solution_closed_form(&g, &ctx.solver)?.field;
        let spectral = spectral_power_norm_field(&u, ctx.solver.basis(), 0.5)?;
        let hrs = hrs_norm_q(&u, RegularityIndex::new(0.5, ctx.alpha / 4.0)?)?;
        let gn = g.l2_norm();
        Ok((gn, spectral, dual_check(ctx, &u, &g, seed)?, SweepRow::ratio_of(hrs, gn)))
    })
}

/// Relative `L²(Q)` distance between the fractional transposition solution
/// and the heat-equation solution (same modes, exponential kernel).
/// `g_norm` is `‖u_heat‖`, `u_norm` is `‖u_α‖`, `residual` the distance and
/// `aux` is `1 - α`.
pub fn run_classical_limit(cfg: &ExperimentConfig) -> SweepReport {
    sweep("classical", cfg, &cfg.alphas, |ctx, seed| {
        let g = ctx.boundary(cfg.g_family, seed);
        let u = weak_solution_closed_form(&g, &ctx.solver)?.field;
        let heat_solver = SpectralSolver::new(1.0, ctx.solver.basis().clone(), ctx.solver.tgrid())?;
        let heat = weak_solution_closed_form(&g, &heat_solver)?.field;
        let hn = heat.l2_norm();
        let dist = if hn == 0.0 { u.l2_norm() } else { u.sub(&heat)?.l2_norm() / hn };
        Ok((hn, u.l2_norm(), dist, 1.0 - ctx.alpha))
    })
}

/// Transposition defect for random smooth `(g, f)` pairs; `aux` is the
/// relative gap between the Riesz and closed-form constructions.
pub fn run_duality_verification(cfg: &ExperimentConfig) -> SweepReport {
    sweep("duality", cfg, &cfg.alphas, |ctx, seed| {
        let g = ctx.boundary(cfg.g_family, seed);
        let u = weak_solution_closed_form(&g, &ctx.solver)?.field;
        let riesz = weak_solution_riesz(&g, &ctx.solver, ctx.sizes.p)?;
        let un = u.l2_norm();
        let gap = if un == 0.0 { riesz.l2_norm() } else { riesz.sub(&u)?.l2_norm() / un };
        Ok((g.l2_norm(), un, dual_check(ctx, &u, &g, seed)?, gap))
    })
}
