//! Acceptance bands applied to finished reports.

use std::collections::BTreeMap;

use serde::Serialize;

use super::report::{SweepReport, SweepRow};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl BandCheck {
    fn below(name: String, value: f64, limit: f64) -> Self {
        Self { pass: value < limit, name, value, limit }
    }

    fn at_least(name: String, value: f64, limit: f64) -> Self {
        Self { pass: value >= limit, name, value, limit }
    }
}

fn failures(report: &SweepReport) -> Vec<BandCheck> {
    let failed = report.rows.iter().filter(|r| !r.ok()).count();
    vec![BandCheck::below(format!("{} failed rows", report.kind), failed as f64, 1.0)]
}

/// Groups rows by `(α, seed)`, each group ordered by level.
fn by_realization(report: &SweepReport) -> BTreeMap<(u64, u64), Vec<&SweepRow>> {
    let mut map: BTreeMap<(u64, u64), Vec<&SweepRow>> = BTreeMap::new();
    for r in &report.rows {
        map.entry((r.alpha.to_bits(), r.seed)).or_default().push(r);
    }
    for v in map.values_mut() {
        v.sort_by_key(|r| r.level);
    }
    map
}

/// `max/min` of the ratio per `α` below `limit`.
pub fn ratio_band(report: &SweepReport, limit: f64) -> Vec<BandCheck> {
    let mut out = failures(report);
    for s in report.summary() {
        out.push(BandCheck::below(format!("alpha={} max/min ratio", s.alpha), s.max_over_min(), limit));
    }
    out
}

/// `max/median` of the ratio per `α` below `limit`.
pub fn median_band(report: &SweepReport, limit: f64) -> Vec<BandCheck> {
    let mut out = failures(report);
    for s in report.summary() {
        out.push(BandCheck::below(format!("alpha={} max/median ratio", s.alpha), s.max_over_median(), limit));
    }
    out
}

/// Minimum growth factor of `u_norm` between consecutive levels, and the
/// `max/min` band of `aux`, per `α`.
pub fn sharpness_bands(report: &SweepReport, growth: f64, band: f64) -> Vec<BandCheck> {
    let mut out = failures(report);
    let groups = by_realization(report);
    for alpha in report.alphas() {
        let mut min_growth = f64::INFINITY;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for ((a, _), rows) in &groups {
            if *a != alpha.to_bits() {
                continue;
            }
            for w in rows.windows(2) {
                min_growth = min_growth.min(w[1].u_norm / w[0].u_norm);
            }
            for r in rows.iter().filter(|r| r.aux.is_finite()) {
                lo = lo.min(r.aux);
                hi = hi.max(r.aux);
            }
        }
        out.push(BandCheck::at_least(format!("alpha={alpha} min growth per doubling"), min_growth, growth));
        out.push(BandCheck::below(format!("alpha={alpha} max/min H^(1/2,a/4) ratio"), hi / lo, band));
    }
    out
}

/// Residual column below `limit` everywhere, and the ensemble maximum and
/// mean of the residual decreasing from level to level for every `α`.
pub fn residual_bands(report: &SweepReport, limit: f64) -> Vec<BandCheck> {
    let mut out = failures(report);
    let worst = report.rows.iter().map(|r| r.residual).fold(0.0f64, f64::max);
    out.push(BandCheck::below(format!("{} max residual", report.kind), worst, limit));
    for alpha in report.alphas() {
        let mut per_level: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in report.rows.iter().filter(|r| r.alpha == alpha) {
            per_level.entry(r.level).or_default().push(r.residual);
        }
        let stats: Vec<(f64, f64)> = per_level
            .values()
            .map(|v| (v.iter().cloned().fold(0.0, f64::max), v.iter().sum::<f64>() / v.len() as f64))
            .collect();
        let increases = stats.windows(2).filter(|w| w[1].0 >= w[0].0 || w[1].1 >= w[0].1).count();
        out.push(BandCheck::below(
            format!("alpha={alpha} ensemble residual increases under refinement"),
            increases as f64,
            1.0,
        ));
    }
    out
}

/// Distance to the heat solution below `limit` at the `α` closest to one,
/// and decreasing in `α` at every level and seed.
pub fn classical_bands(report: &SweepReport, limit: f64) -> Vec<BandCheck> {
    let mut out = failures(report);
    let alphas = report.alphas();
    if let Some(&top) = alphas.last() {
        let worst = report
            .rows
            .iter()
            .filter(|r| r.alpha == top)
            .map(|r| r.residual)
            .fold(0.0f64, f64::max);
        out.push(BandCheck::below(format!("alpha={top} relative distance to heat"), worst, limit));
    }
    let mut violations = 0usize;
    for w in alphas.windows(2) {
        for lo in report.rows.iter().filter(|r| r.alpha == w[0]) {
            if let Some(hi) = report
                .rows
                .iter()
                .find(|r| r.alpha == w[1] && r.level == lo.level && r.seed == lo.seed)
            {
                violations += (hi.residual >= lo.residual && lo.residual > 0.0) as usize;
            }
        }
    }
    out.push(BandCheck::below("distance not decreasing as alpha -> 1".into(), violations as f64, 1.0));
    out
}

pub fn all_pass(checks: &[BandCheck]) -> bool {
    checks.iter().all(|c| c.pass)
}
