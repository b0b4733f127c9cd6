use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Strictly increasing, non-empty set of sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("time grid", "grid is empty"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("time grid", "non-finite time"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "time grid",
                "times must be strictly increasing",
            ));
        }
        Ok(TimeGrid(points))
    }

    /// `num_points` evenly spaced samples on `[0, t_max]`, endpoints included.
    pub fn linspace(t_max: f64, num_points: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::invalid("t_max", "must be positive and finite"));
        }
        if num_points < 2 {
            return Err(Error::invalid(
                "num_points",
                "at least two points are required",
            ));
        }
        let last = (num_points - 1) as f64;
        let points = (0..num_points)
            .map(|k| {
                if k + 1 == num_points {
                    t_max
                } else {
                    t_max * (k as f64) / last
                }
            })
            .collect();
        Ok(TimeGrid(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}
