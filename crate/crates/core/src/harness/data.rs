//! Seeded data generators for the experiment ensembles.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::GFamily;
use crate::elliptic::SpatialGrid;
use crate::field::{BoundaryData, SpaceTimeField};
use crate::fracops::{TimeGrid, TimeSeries};

const STREAM_BOUNDARY: u64 = 0;
const STREAM_SOURCE: u64 = 1;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn normal(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

/// Boundary data of the requested family, reproducible from `seed`.
pub fn boundary_data(family: GFamily, tgrid: TimeGrid, seed: u64) -> BoundaryData {
    let mut r = rng(seed, STREAM_BOUNDARY);
    let t_end = tgrid.horizon();
    let side = |r: &mut ChaCha8Rng| -> TimeSeries {
        match family {
            GFamily::Noise => {
                let scale = 1.0 / t_end.sqrt();
                let v = (0..tgrid.len()).map(|_| scale * normal(r)).collect();
                TimeSeries::new(tgrid, v).expect("length matches grid")
            }
            GFamily::Step => {
                let a = normal(r);
                TimeSeries::from_fn(tgrid, |t| if t >= 0.5 * t_end { a } else { 0.0 })
            }
            GFamily::Smooth => {
                let c: Vec<f64> = (1..=3).map(|j| normal(r) / j as f64).collect();
                TimeSeries::from_fn(tgrid, |t| {
                    c.iter()
                        .enumerate()
                        .map(|(j, c)| c * ((j as f64 + 0.5) * PI * t / t_end).sin())
                        .sum()
                })
            }
        }
    };
    let left = side(&mut r);
    let right = side(&mut r);
    BoundaryData::new(left, right).expect("sides share the grid")
}

/// Random smooth space-time source `Σ a_ij sin(iπx/L) cos(jπt/T)`.
pub fn smooth_source(sgrid: SpatialGrid, tgrid: TimeGrid, seed: u64) -> SpaceTimeField {
    let mut r = rng(seed, STREAM_SOURCE);
    let mut a = [[0.0; 3]; 3];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = normal(&mut r) / ((i + 1) * (j + 1)) as f64;
        }
    }
    let (l, t_end) = (sgrid.length(), tgrid.horizon());
    SpaceTimeField::from_fn(sgrid, tgrid, |x, t| {
        let mut s = 0.0;
        for (i, row) in a.iter().enumerate() {
            let sx = ((i + 1) as f64 * PI * x / l).sin();
            for (j, v) in row.iter().enumerate() {
                s += v * sx * (j as f64 * PI * t / t_end).cos();
            }
        }
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let g = TimeGrid::new(1.0, 32).unwrap();
        for fam in [GFamily::Noise, GFamily::Step, GFamily::Smooth] {
            assert_eq!(boundary_data(fam, g, 5), boundary_data(fam, g, 5));
            assert_ne!(boundary_data(fam, g, 5), boundary_data(fam, g, 6));
        }
    }

    #[test]
    fn smooth_and_step_vanish_at_start() {
        let g = TimeGrid::new(2.0, 40).unwrap();
        for fam in [GFamily::Step, GFamily::Smooth] {
            let b = boundary_data(fam, g, 11);
            assert_eq!(b.left().values()[0], 0.0);
            assert_eq!(b.right().values()[0], 0.0);
        }
    }

    #[test]
    fn noise_has_unit_mean_square() {
        let g = TimeGrid::new(3.0, 4096).unwrap();
        let b = boundary_data(GFamily::Noise, g, 1);
        let e = b.left().l2_norm().powi(2);
        assert!((e - 1.0).abs() < 0.1, "{e}");
    }
}
