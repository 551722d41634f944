//! Space-time node fields on `[0, L] × [0, T]` and Dirichlet boundary data.

use ndarray::Array2;

use crate::elliptic::SpatialGrid;
use crate::fracops::{TimeGrid, TimeSeries};
use crate::{Error, Result};

/// Values `u(x_j, t_n)` stored with shape `(M + 1, N + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    sgrid: SpatialGrid,
    tgrid: TimeGrid,
    values: Array2<f64>,
}

impl SpaceTimeField {
    pub fn new(sgrid: SpatialGrid, tgrid: TimeGrid, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (sgrid.len(), tgrid.len()) {
            return Err(Error::GridMismatch(format!(
                "field shape {:?} does not match grids ({}, {})",
                values.dim(),
                sgrid.len(),
                tgrid.len()
            )));
        }
        Ok(Self { sgrid, tgrid, values })
    }

    pub fn zeros(sgrid: SpatialGrid, tgrid: TimeGrid) -> Self {
        Self { sgrid, tgrid, values: Array2::zeros((sgrid.len(), tgrid.len())) }
    }

    pub fn from_fn(sgrid: SpatialGrid, tgrid: TimeGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn((sgrid.len(), tgrid.len()), |(j, n)| f(sgrid.node(j), tgrid.node(n)));
        Self { sgrid, tgrid, values }
    }

    /// `X(x) ψ(t)` from node vectors.
    pub fn separated(sgrid: SpatialGrid, tgrid: TimeGrid, space: &[f64], time: &[f64]) -> Result<Self> {
        if space.len() != sgrid.len() || time.len() != tgrid.len() {
            return Err(Error::GridMismatch("separated factors do not match grids".into()));
        }
        let values = Array2::from_shape_fn((sgrid.len(), tgrid.len()), |(j, n)| space[j] * time[n]);
        Ok(Self { sgrid, tgrid, values })
    }

    pub fn sgrid(&self) -> SpatialGrid {
        self.sgrid
    }

    pub fn tgrid(&self) -> TimeGrid {
        self.tgrid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    /// Spatial profile at time node `n`.
    pub fn slice_at(&self, n: usize) -> Vec<f64> {
        self.values.column(n).to_vec()
    }

    /// Trajectory at space node `j`.
    pub fn series_at(&self, j: usize) -> TimeSeries {
        TimeSeries::new(self.tgrid, self.values.row(j).to_vec()).expect("row length matches grid")
    }

    pub fn same_grids(&self, other: &SpaceTimeField) -> Result<()> {
        if self.sgrid != other.sgrid || self.tgrid != other.tgrid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    /// `(u, v)_{L²(Q)}`, trapezoid rule in both variables.
    pub fn dot(&self, other: &SpaceTimeField) -> Result<f64> {
        self.same_grids(other)?;
        let wx = self.sgrid.trapezoid_weights();
        let wt = self.tgrid.trapezoid_weights();
        let mut s = 0.0;
        for (j, wxj) in wx.iter().enumerate() {
            let mut row = 0.0;
            for (n, wtn) in wt.iter().enumerate() {
                row += wtn * self.values[[j, n]] * other.values[[j, n]];
            }
            s += wxj * row;
        }
        Ok(s)
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).expect("same grids").sqrt()
    }

    pub fn scaled(&self, c: f64) -> SpaceTimeField {
        Self { sgrid: self.sgrid, tgrid: self.tgrid, values: &self.values * c }
    }

    pub fn add(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.same_grids(other)?;
        Ok(Self { sgrid: self.sgrid, tgrid: self.tgrid, values: &self.values + &other.values })
    }

    pub fn sub(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        self.same_grids(other)?;
        Ok(Self { sgrid: self.sgrid, tgrid: self.tgrid, values: &self.values - &other.values })
    }

    /// `‖self - other‖ / ‖other‖` in `L²(Q)`.
    pub fn relative_distance(&self, other: &SpaceTimeField) -> Result<f64> {
        let d = self.sub(other)?.l2_norm();
        let r = other.l2_norm();
        Ok(if r == 0.0 { d } else { d / r })
    }

    /// `u(x, T - t)`.
    pub fn time_reversed(&self) -> SpaceTimeField {
        let mut values = self.values.clone();
        values.invert_axis(ndarray::Axis(1));
        Self { sgrid: self.sgrid, tgrid: self.tgrid, values: values.as_standard_layout().to_owned() }
    }

    /// Boundary rows as Dirichlet data.
    pub fn trace(&self) -> BoundaryData {
        let m = self.sgrid.cells();
        BoundaryData {
            tgrid: self.tgrid,
            left: self.series_at(0),
            right: self.series_at(m),
        }
    }
}

/// Dirichlet datum `g` on `Σ = {0, L} × (0, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    tgrid: TimeGrid,
    left: TimeSeries,
    right: TimeSeries,
}

impl BoundaryData {
    pub fn new(left: TimeSeries, right: TimeSeries) -> Result<Self> {
        if left.grid() != right.grid() {
            return Err(Error::GridMismatch("boundary series on different grids".into()));
        }
        Ok(Self { tgrid: left.grid(), left, right })
    }

    pub fn zeros(tgrid: TimeGrid) -> Self {
        Self { tgrid, left: TimeSeries::zeros(tgrid), right: TimeSeries::zeros(tgrid) }
    }

    pub fn tgrid(&self) -> TimeGrid {
        self.tgrid
    }

    pub fn left(&self) -> &TimeSeries {
        &self.left
    }

    pub fn right(&self) -> &TimeSeries {
        &self.right
    }

    /// `(g, h)_{L²(Σ)}`.
    pub fn dot(&self, other: &BoundaryData) -> f64 {
        self.left.dot(&other.left) + self.right.dot(&other.right)
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, c: f64) -> BoundaryData {
        Self { tgrid: self.tgrid, left: self.left.scaled(c), right: self.right.scaled(c) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_norm_of_constant_field() {
        let s = SpatialGrid::new(2.0, 8).unwrap();
        let t = TimeGrid::new(3.0, 5).unwrap();
        let f = SpaceTimeField::from_fn(s, t, |_, _| 1.0);
        assert!((f.l2_norm() - 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let s = SpatialGrid::new(1.0, 4).unwrap();
        let t = TimeGrid::new(1.0, 4).unwrap();
        assert!(SpaceTimeField::new(s, t, Array2::zeros((4, 5))).is_err());
        let t2 = TimeGrid::new(1.0, 8).unwrap();
        assert!(SpaceTimeField::zeros(s, t).dot(&SpaceTimeField::zeros(s, t2)).is_err());
        assert!(BoundaryData::new(TimeSeries::zeros(t), TimeSeries::zeros(t2)).is_err());
    }
}
