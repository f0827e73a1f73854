use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Space-time samples `u(x_j, t_i)`, row-major with row 0 the earliest time.
#[derive(Clone, Debug, PartialEq)]
pub struct CarpetGrid {
    times: Vec<f64>,
    x: Vec<f64>,
    length: f64,
    values: Vec<f64>,
}

impl CarpetGrid {
    pub fn new(times: Vec<f64>, x: Vec<f64>, length: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != times.len() * x.len() {
            return Err(Error::InvalidArgument(format!(
                "carpet has {} values for {} rows of {} samples",
                values.len(),
                times.len(),
                x.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "carpet value {bad} is not finite"
            )));
        }
        Ok(Self {
            times,
            x,
            length,
            values,
        })
    }

    /// Empty carpet on the sample points of `grid`.
    pub fn for_grid(grid: &Grid) -> Self {
        Self {
            times: Vec::new(),
            x: grid.points(),
            length: grid.length(),
            values: Vec::new(),
        }
    }

    pub fn push_row(&mut self, time: f64, row: &[f64]) -> Result<()> {
        if row.len() != self.x.len() {
            return Err(Error::LengthMismatch {
                expected: self.x.len(),
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "carpet row at t = {time} is not finite"
            )));
        }
        self.times.push(time);
        self.values.extend_from_slice(row);
        Ok(())
    }

    pub fn push_field(&mut self, time: f64, field: &SpectralField) -> Result<()> {
        self.push_row(time, &field.inverse())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> usize {
        self.times.len()
    }

    pub fn cols(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.cols();
        &self.values[i * w..(i + 1) * w]
    }

    /// Periodic grid matching the spatial axis.
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.cols(), self.length)
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        if self.values.is_empty() {
            return None;
        }
        Some(self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_are_checked() {
        assert!(CarpetGrid::new(vec![0.0], vec![0.0, 1.0], 2.0, vec![1.0]).is_err());
        assert!(CarpetGrid::new(vec![0.0], vec![0.0], 1.0, vec![f64::NAN]).is_err());
        let c = CarpetGrid::new(vec![0.0, 1.0], vec![0.0, 1.0], 2.0, vec![1.0, 2.0, 3.0, 4.0])
            .unwrap();
        assert_eq!(c.row(1), &[3.0, 4.0]);
        assert_eq!(c.min_max(), Some((1.0, 4.0)));
    }
}
