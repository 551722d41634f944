//! Experiment rows, summaries and CSV emission.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// One realization at one refinement level.
///
/// `aux` carries a report-specific secondary quantity (documented per
/// experiment); `error` is empty on success.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub level: usize,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub g_norm: f64,
    pub u_norm: f64,
    pub ratio: f64,
    pub residual: f64,
    pub aux: f64,
    pub wall_time: f64,
    pub error: String,
}

impl SweepRow {
    /// `u_norm / g_norm`, NaN-marked when both vanish.
    pub fn ratio_of(u_norm: f64, g_norm: f64) -> f64 {
        if g_norm == 0.0 {
            f64::NAN
        } else {
            u_norm / g_norm
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSummary {
    pub alpha: f64,
    pub rows: usize,
    pub failed: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_median: f64,
}

impl AlphaSummary {
    pub fn max_over_min(&self) -> f64 {
        self.ratio_max / self.ratio_min
    }

    pub fn max_over_median(&self) -> f64 {
        self.ratio_max / self.ratio_median
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepReport {
    pub kind: String,
    pub rows: Vec<SweepRow>,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

impl SweepReport {
    pub fn new(kind: &str, mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(|a, b| {
            a.alpha
                .total_cmp(&b.alpha)
                .then(a.level.cmp(&b.level))
                .then(a.seed.cmp(&b.seed))
        });
        Self { kind: kind.to_string(), rows }
    }

    pub fn alphas(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.rows.iter().map(|r| r.alpha).collect();
        a.dedup();
        a
    }

    /// Ratio statistics per `α` over successful rows with a finite ratio.
    pub fn summary(&self) -> Vec<AlphaSummary> {
        self.alphas()
            .into_iter()
            .map(|alpha| {
                let rows: Vec<&SweepRow> = self.rows.iter().filter(|r| r.alpha == alpha).collect();
                let mut ratios: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.ok() && r.ratio.is_finite())
                    .map(|r| r.ratio)
                    .collect();
                ratios.sort_by(f64::total_cmp);
                AlphaSummary {
                    alpha,
                    rows: rows.len(),
                    failed: rows.iter().filter(|r| !r.ok()).count(),
                    ratio_min: ratios.first().copied().unwrap_or(f64::NAN),
                    ratio_max: ratios.last().copied().unwrap_or(f64::NAN),
                    ratio_median: median(&ratios),
                }
            })
            .collect()
    }

    /// CSV with a schema comment line. With `include_time = false` the
    /// wall-time column is blanked, giving byte-identical output for
    /// identical inputs.
    pub fn to_csv(&self, include_time: bool) -> String {
        let mut s = format!("# schema={SCHEMA_VERSION} kind={}\n", self.kind);
        s.push_str("alpha,level,M,N,K,seed,g_norm,u_norm,ratio,residual,aux,wall_time,error\n");
        for r in &self.rows {
            let wall = if include_time { format!("{:.6}", r.wall_time) } else { String::new() };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{:e},{:e},{:e},{:e},{:e},{},{}",
                r.alpha,
                r.level,
                r.m,
                r.n,
                r.k,
                r.seed,
                r.g_norm,
                r.u_norm,
                r.ratio,
                r.residual,
                r.aux,
                wall,
                r.error.replace([',', '\n'], ";")
            );
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s = format!("# schema={SCHEMA_VERSION} kind={}-summary\n", self.kind);
        s.push_str("alpha,rows,failed,ratio_min,ratio_max,ratio_median,max_over_min,max_over_median\n");
        for a in self.summary() {
            let _ = writeln!(
                s,
                "{},{},{},{:e},{:e},{:e},{:e},{:e}",
                a.alpha,
                a.rows,
                a.failed,
                a.ratio_min,
                a.ratio_max,
                a.ratio_median,
                a.max_over_min(),
                a.max_over_median()
            );
        }
        s
    }

    /// Writes `<kind>.csv` and `<kind>_summary.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.csv", self.kind)), self.to_csv(true))?;
        std::fs::write(dir.join(format!("{}_summary.csv", self.kind)), self.summary_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alpha: f64, level: usize, seed: u64, ratio: f64) -> SweepRow {
        SweepRow {
            alpha,
            level,
            m: 8,
            n: 8,
            k: 2,
            seed,
            g_norm: 1.0,
            u_norm: ratio,
            ratio,
            residual: 0.0,
            aux: 0.0,
            wall_time: 0.25,
            error: String::new(),
        }
    }

    #[test]
    fn rows_are_sorted_and_summarized() {
        let r = SweepReport::new(
            "t",
            vec![row(0.5, 1, 3, 2.0), row(0.3, 0, 1, 1.0), row(0.5, 0, 9, 4.0), row(0.5, 0, 2, f64::NAN)],
        );
        let keys: Vec<_> = r.rows.iter().map(|r| (r.alpha, r.level, r.seed)).collect();
        assert_eq!(keys, vec![(0.3, 0, 1), (0.5, 0, 2), (0.5, 0, 9), (0.5, 1, 3)]);
        let s = r.summary();
        assert_eq!(s[1].ratio_min, 2.0);
        assert_eq!(s[1].ratio_max, 4.0);
        assert_eq!(s[1].max_over_min(), 2.0);
    }

    #[test]
    fn csv_has_schema_header_and_optional_time() {
        let r = SweepReport::new("t", vec![row(0.5, 0, 1, 1.5)]);
        let csv = r.to_csv(false);
        assert!(csv.starts_with("# schema=1"));
        assert!(csv.lines().nth(2).unwrap().ends_with(",,"));
        assert!(r.to_csv(true).contains("0.250000"));
    }

    #[test]
    fn zero_over_zero_is_nan() {
        assert!(SweepRow::ratio_of(0.0, 0.0).is_nan());
        assert_eq!(SweepRow::ratio_of(1.0, 2.0), 0.5);
    }
}
