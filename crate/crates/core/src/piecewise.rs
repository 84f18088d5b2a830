//! Continuous piecewise-linear functions in breakpoint/slope form.
//!
//! This is the output language of inversion: a function described by where
//! its slope changes rather than by unit parameters. Extrapolation is
//! clamped; both extension slopes are fixed at zero, matching how saturated
//! bands behave outside their span.

use crate::error::{Error, Result};

/// A continuous piecewise-linear function, anchored at its first breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    anchor: f64,
}

impl PiecewiseLinear {
    /// Builds a function from breakpoints, per-interval slopes, and the value
    /// at the first breakpoint. A single breakpoint with no slopes is the
    /// constant function `anchor`.
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, anchor: f64) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::TooFewKnots(0));
        }
        if !breakpoints[0].is_finite() {
            return Err(Error::KnotOrder { index: 0 });
        }
        for i in 1..breakpoints.len() {
            if !(breakpoints[i].is_finite() && breakpoints[i] > breakpoints[i - 1]) {
                return Err(Error::KnotOrder { index: i });
            }
        }
        if slopes.len() + 1 != breakpoints.len() {
            return Err(Error::LengthMismatch {
                expected: breakpoints.len() - 1,
                got: slopes.len(),
            });
        }
        if slopes.iter().any(|s| !s.is_finite()) || !anchor.is_finite() {
            return Err(Error::NonFiniteParam);
        }
        Ok(Self {
            breakpoints,
            slopes,
            anchor,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Value at the first breakpoint.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// Values at every breakpoint, by accumulating slope runs.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.breakpoints.len());
        let mut v = self.anchor;
        out.push(v);
        for (i, s) in self.slopes.iter().enumerate() {
            v += s * (self.breakpoints[i + 1] - self.breakpoints[i]);
            out.push(v);
        }
        out
    }

    /// Evaluates the function; inputs beyond the breakpoint span clamp to the
    /// boundary values.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.breakpoints[0], *self.breakpoints.last().unwrap());
        let i = match self.breakpoints.partition_point(|b| *b <= x) {
            0 => 0,
            n if n >= self.breakpoints.len() => self.breakpoints.len() - 1,
            n => n - 1,
        };
        let mut v = self.anchor;
        for j in 0..i {
            v += self.slopes[j] * (self.breakpoints[j + 1] - self.breakpoints[j]);
        }
        if i < self.slopes.len() {
            v += self.slopes[i] * (x - self.breakpoints[i]);
        }
        v
    }
}
