//! `start:end:count` grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::IobError;

pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Evenly spaced points from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self, IobError> {
        let g = Self { start, end, count };
        g.validate()?;
        Ok(g)
    }

    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            end: value,
            count: 1,
        }
    }

    fn validate(&self) -> Result<(), IobError> {
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(IobError::InvalidGrid("endpoints must be finite".into()));
        }
        if self.count == 0 || self.count > MAX_GRID_POINTS {
            return Err(IobError::InvalidGrid(format!(
                "count must lie in 1..={MAX_GRID_POINTS}, got {}",
                self.count
            )));
        }
        if self.count == 1 && self.start != self.end {
            return Err(IobError::InvalidGrid("a single-point grid needs start == end".into()));
        }
        if self.count > 1 && self.end <= self.start {
            return Err(IobError::InvalidGrid("end must exceed start".into()));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.end - self.start) / (self.count - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = self.step();
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.end } else { self.start + i as f64 * step })
            .collect()
    }

    pub fn is_scalar(&self) -> bool {
        self.count == 1
    }
}

impl FromStr for Grid {
    type Err = IobError;

    /// Either a scalar (`"8"`) or `start:end:count`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |what: &str| IobError::InvalidGrid(format!("`{s}`: {what}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => {
                let v: f64 = v.trim().parse().map_err(|_| bad("not a number"))?;
                let g = Grid::single(v);
                g.validate()?;
                Ok(g)
            }
            [a, b, n] => {
                let a: f64 = a.trim().parse().map_err(|_| bad("bad start"))?;
                let b: f64 = b.trim().parse().map_err(|_| bad("bad end"))?;
                let n: usize = n.trim().parse().map_err(|_| bad("bad count"))?;
                Grid::new(a, b, n)
            }
            _ => Err(bad("expected `value` or `start:end:count`")),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_scalar() {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}:{}", self.start, self.end, self.count)
        }
    }
}
