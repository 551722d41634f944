//! Field CSV (`x,t,value`) and JSON metadata.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::Serialize;

use crate::elliptic::SpatialGrid;
use crate::field::SpaceTimeField;
use crate::fracops::TimeGrid;
use crate::{Error, Result};

/// Run description written next to every field.
#[derive(Debug, Clone, Serialize)]
pub struct FieldMetadata {
    pub method: String,
    pub alpha: f64,
    pub length: f64,
    pub cells: usize,
    pub horizon: f64,
    pub steps: usize,
    pub modes: usize,
    pub coefficients: String,
    pub seed: u64,
    pub tail_fraction: f64,
}

pub fn field_to_csv(u: &SpaceTimeField) -> String {
    let (sg, tg) = (u.sgrid(), u.tgrid());
    let mut s = String::from("x,t,value\n");
    for n in 0..tg.len() {
        let t = tg.node(n);
        for j in 0..sg.len() {
            let _ = writeln!(s, "{},{},{:e}", sg.node(j), t, u.values()[[j, n]]);
        }
    }
    s
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    v
}

fn uniform_step(nodes: &[f64], what: &str) -> Result<(f64, usize)> {
    if nodes.len() < 2 || nodes[0].abs() > 1e-12 {
        return Err(Error::Config(format!("{what} nodes must start at 0 with at least two values")));
    }
    let cells = nodes.len() - 1;
    let end = nodes[cells];
    let h = end / cells as f64;
    if nodes.iter().enumerate().any(|(i, x)| (x - i as f64 * h).abs() > 1e-9 * end) {
        return Err(Error::Config(format!("{what} nodes are not uniform")));
    }
    Ok((end, cells))
}

/// Parse an `x,t,value` table on a uniform tensor grid (any row order).
pub fn field_from_csv(text: &str) -> Result<SpaceTimeField> {
    let mut triples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with('x')) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Config(format!("line {}: expected x,t,value", i + 1)));
        }
        let parse = |c: &str| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("line {}: bad number '{c}'", i + 1)))
        };
        triples.push((parse(cols[0])?, parse(cols[1])?, parse(cols[2])?));
    }
    let xs = distinct(triples.iter().map(|t| t.0));
    let ts = distinct(triples.iter().map(|t| t.1));
    let (l, m) = uniform_step(&xs, "x")?;
    let (t_end, n) = uniform_step(&ts, "t")?;
    if triples.len() != xs.len() * ts.len() {
        return Err(Error::Config("table is not a full tensor grid".into()));
    }
    let sgrid = SpatialGrid::new(l, m)?;
    let tgrid = TimeGrid::new(t_end, n)?;
    let mut values = Array2::from_elem((m + 1, n + 1), f64::NAN);
    for (x, t, v) in triples {
        let j = (x / sgrid.h()).round() as usize;
        let k = (t / tgrid.dt()).round() as usize;
        values[[j, k]] = v;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Config("table has duplicate or missing grid points".into()));
    }
    SpaceTimeField::new(sgrid, tgrid, values)
}

pub fn read_field_csv(path: &Path) -> Result<SpaceTimeField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    field_from_csv(&text)
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn write_field(dir: &Path, stem: &str, u: &SpaceTimeField, meta: &FieldMetadata) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{stem}.csv")), field_to_csv(u))?;
    let json = serde_json::to_string_pretty(meta).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(dir.join(format!("{stem}.json")), json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let u = SpaceTimeField::from_fn(
            SpatialGrid::new(2.0, 6).unwrap(),
            TimeGrid::new(0.5, 5).unwrap(),
            |x, t| x.sin() * (1.0 + t),
        );
        let back = field_from_csv(&field_to_csv(&u)).unwrap();
        assert_eq!(back.sgrid(), u.sgrid());
        assert_eq!(back.tgrid(), u.tgrid());
        assert!(back.sub(&u).unwrap().l2_norm() < 1e-14);
    }

    #[test]
    fn rejects_ragged_tables() {
        assert!(field_from_csv("x,t,value\n0,0,1\n1,0,1\n0,1,1\n").is_err());
        assert!(field_from_csv("x,t,value\n0,0,1\n1,0\n").is_err());
    }
}
