//! Sampled scalar functions and the chord interpolant through their samples.
//!
//! A [`Partition`] is the ground truth everything else is measured against:
//! a strictly increasing knot grid plus the sampled values there. Its chord
//! interpolant (linear between neighbouring knots, clamped outside the grid)
//! is exactly the function a compiled hard-linear network realizes, so
//! [`interpolant_eval`] doubles as the oracle in the test suites.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};

/// Spacing drift below this fraction of the span still counts as uniform.
const UNIFORM_REL_TOL: f64 = 1e-12;

/// A scalar function sampled on a strictly increasing knot grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    knots: Vec<f64>,
    values: Vec<f64>,
    uniform: bool,
}

impl Partition {
    /// Builds a partition from explicit knots and values.
    ///
    /// Knots must be finite and strictly increasing, values finite, and both
    /// lists at least two long. Uniform spacing is detected; see
    /// [`Partition::is_uniform`].
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::TooFewKnots(knots.len()));
        }
        if values.len() != knots.len() {
            return Err(Error::LengthMismatch {
                expected: knots.len(),
                got: values.len(),
            });
        }
        if !knots[0].is_finite() {
            return Err(Error::KnotOrder { index: 0 });
        }
        for i in 1..knots.len() {
            // NaN fails the comparison and is caught here as well
            if !(knots[i].is_finite() && knots[i] > knots[i - 1]) {
                return Err(Error::KnotOrder { index: i });
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { x: knots[i] });
        }
        let uniform = detect_uniform(&knots);
        Ok(Self {
            knots,
            values,
            uniform,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of knots.
    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least two knots by construction
    }

    /// Number of base intervals, one fewer than the knot count.
    pub fn interval_count(&self) -> usize {
        self.knots.len() - 1
    }

    /// Whether the knot spacing is uniform to within 1e-12 of the span.
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// First and last knot.
    pub fn span(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Least and greatest sampled value. The chord interpolant never leaves
    /// this range, which is what makes stage chaining checkable.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = self.values[0];
        let mut hi = self.values[0];
        for &v in &self.values[1..] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// Rise of each base interval: `values[i+1] - values[i]`.
    pub fn heights(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Evaluates the chord interpolant at `x`. See [`interpolant_eval`].
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        let last = self.knots.len() - 1;
        if x <= self.knots[0] {
            return Ok(self.values[0]);
        }
        if x >= self.knots[last] {
            return Ok(self.values[last]);
        }
        let i = self.knots.partition_point(|k| *k <= x) - 1;
        let (lo, hi) = (self.knots[i], self.knots[i + 1]);
        let (va, vb) = (self.values[i], self.values[i + 1]);
        let slope = (vb - va) / (hi - lo);
        let raw = va + (x - lo) * slope;
        // The exact chord never leaves the endpoint range; clamping strips the
        // last-ulp overshoot so monotone data yields a monotone interpolant.
        Ok(raw.clamp(va.min(vb), va.max(vb)))
    }

    /// Reads the two-column `x,f` CSV format.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "x,f" => {}
            Some(Ok(h)) => {
                return Err(Error::Parse(format!("expected header 'x,f', got '{}'", h.trim())))
            }
            Some(Err(e)) => return Err(e.into()),
            None => return Err(Error::Parse("empty partition file".into())),
        }
        let mut knots = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let x = parse_field(cols.next(), lineno + 2)?;
            let f = parse_field(cols.next(), lineno + 2)?;
            if cols.next().is_some() {
                return Err(Error::Parse(format!("line {}: expected two columns", lineno + 2)));
            }
            knots.push(x);
            values.push(f);
        }
        Self::new(knots, values)
    }

    /// Writes the two-column `x,f` CSV format. Numbers are printed in the
    /// shortest form that parses back to the identical bits.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "x,f")?;
        for (x, f) in self.knots.iter().zip(&self.values) {
            writeln!(writer, "{x},{f}")?;
        }
        Ok(())
    }
}

pub(crate) fn parse_field(field: Option<&str>, lineno: usize) -> Result<f64> {
    let text = field.ok_or_else(|| Error::Parse(format!("line {lineno}: missing column")))?;
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {lineno}: '{}' is not a number", text.trim())))
}

fn detect_uniform(knots: &[f64]) -> bool {
    let span = knots[knots.len() - 1] - knots[0];
    let step = knots[1] - knots[0];
    knots
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= UNIFORM_REL_TOL * span)
}

/// Samples `f` on `m` evenly spaced knots over `[lo, hi]`.
///
/// The last knot is exactly `hi`. Fails if the interval is empty, `m < 2`, or
/// `f` returns a non-finite value anywhere on the grid.
pub fn uniform_partition(lo: f64, hi: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Partition> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::EmptyInterval { lo, hi });
    }
    if m < 2 {
        return Err(Error::TooFewKnots(m));
    }
    let step = (hi - lo) / (m - 1) as f64;
    let mut knots = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for i in 0..m {
        let x = if i == m - 1 { hi } else { lo + i as f64 * step };
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { x });
        }
        knots.push(x);
        values.push(v);
    }
    Partition::new(knots, values)
}

/// Evaluates the chord interpolant of `p` at `x`, clamped to the boundary
/// values outside the knot span.
pub fn interpolant_eval(p: &Partition, x: f64) -> Result<f64> {
    p.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square_grid() -> Partition {
        Partition::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap()
    }

    #[test]
    fn uniform_squares() {
        let p = uniform_partition(0.0, 1.0, 3, |x| x * x).unwrap();
        assert_eq!(p.knots(), &[0.0, 0.5, 1.0]);
        assert_eq!(p.values(), &[0.0, 0.25, 1.0]);
        assert!(p.is_uniform());
    }

    #[test]
    fn uniform_hits_the_right_endpoint_exactly() {
        let p = uniform_partition(0.0, std::f64::consts::PI, 17, f64::sin).unwrap();
        assert_eq!(p.len(), 17);
        assert_eq!(p.span(), (0.0, std::f64::consts::PI));
        assert!(p.is_uniform());
    }

    #[test]
    fn uniform_rejects_bad_input() {
        assert!(matches!(
            uniform_partition(1.0, 1.0, 5, |x| x),
            Err(Error::EmptyInterval { .. })
        ));
        assert!(matches!(
            uniform_partition(2.0, 1.0, 5, |x| x),
            Err(Error::EmptyInterval { .. })
        ));
        assert!(matches!(
            uniform_partition(0.0, 1.0, 1, |x| x),
            Err(Error::TooFewKnots(1))
        ));
        assert!(matches!(
            uniform_partition(-1.0, 1.0, 5, |x| 1.0 / x),
            Err(Error::NonFiniteSample { .. })
        ));
    }

    #[test]
    fn new_rejects_disorder_and_nan() {
        assert!(matches!(
            Partition::new(vec![0.0, 0.0], vec![1.0, 2.0]),
            Err(Error::KnotOrder { index: 1 })
        ));
        assert!(matches!(
            Partition::new(vec![0.0, f64::NAN, 2.0], vec![0.0; 3]),
            Err(Error::KnotOrder { index: 1 })
        ));
        assert!(matches!(
            Partition::new(vec![0.0, 1.0], vec![0.0, f64::INFINITY]),
            Err(Error::NonFiniteSample { .. })
        ));
        assert!(matches!(
            Partition::new(vec![0.0, 1.0], vec![0.0]),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn eval_matches_hand_chords() {
        let p = square_grid();
        assert_eq!(p.eval(0.5).unwrap(), 0.5);
        assert_eq!(p.eval(1.5).unwrap(), 2.5);
        assert_eq!(p.eval(0.25).unwrap(), 0.25);
    }

    #[test]
    fn eval_clamps_outside_the_span() {
        let p = square_grid();
        assert_eq!(p.eval(-1.0).unwrap(), 0.0);
        assert_eq!(p.eval(3.0).unwrap(), 4.0);
    }

    #[test]
    fn eval_is_exact_at_knots() {
        let p = uniform_partition(-2.0, 3.0, 23, |x| x.exp() - x).unwrap();
        for (x, v) in p.knots().iter().zip(p.values()) {
            assert_eq!(p.eval(*x).unwrap(), *v, "knot {x}");
        }
    }

    #[test]
    fn eval_rejects_non_finite_input() {
        let p = square_grid();
        assert!(matches!(p.eval(f64::NAN), Err(Error::NonFiniteInput)));
        assert!(matches!(p.eval(f64::INFINITY), Err(Error::NonFiniteInput)));
    }

    #[test]
    fn heights_are_value_rises() {
        let p = square_grid();
        assert_eq!(p.heights(), vec![1.0, 3.0]);
        assert_eq!(p.value_range(), (0.0, 4.0));
    }

    #[test]
    fn non_uniform_spacing_is_detected() {
        let p = Partition::new(vec![0.0, 1.0, 3.0], vec![0.0, 0.0, 0.0]).unwrap();
        assert!(!p.is_uniform());
    }

    // Chord error for sin on 17 uniform knots over [0, pi] peaks near the
    // crest at h^2/8 with h = pi/16; the dense-grid maximum is 4.792e-3.
    #[test]
    fn sin_error_matches_the_quadratic_bound() {
        let p = uniform_partition(0.0, std::f64::consts::PI, 17, f64::sin).unwrap();
        let err = dense_error(&p, 100_000);
        assert!(
            (4.5e-3..5.0e-3).contains(&err),
            "sin/17 error {err} strayed from the h^2/8 estimate"
        );
    }

    // Chord error is quadratic in the spacing, so doubling the intervals
    // should cut the error by close to 4. The contract brackets it in [3, 5].
    #[test]
    fn refinement_quarters_the_error() {
        let coarse = uniform_partition(0.0, std::f64::consts::PI, 17, f64::sin).unwrap();
        let fine = uniform_partition(0.0, std::f64::consts::PI, 33, f64::sin).unwrap();
        let ratio = dense_error(&coarse, 100_000) / dense_error(&fine, 100_000);
        assert!(
            (3.0..=5.0).contains(&ratio),
            "refinement ratio {ratio} outside [3, 5]"
        );
    }

    fn dense_error(p: &Partition, n: usize) -> f64 {
        let (lo, hi) = p.span();
        let mut worst = 0.0f64;
        for j in 0..n {
            let x = lo + (hi - lo) * j as f64 / (n - 1) as f64;
            worst = worst.max((x.sin() - p.eval(x).unwrap()).abs());
        }
        worst
    }

    #[test]
    fn csv_round_trips_bitwise() {
        let p = uniform_partition(-1.5, 2.25, 9, |x| (x * 1.7).sin() / 3.0).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let back = Partition::read_csv(&buf[..]).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(matches!(
            Partition::read_csv("x,y\n0,0\n1,1\n".as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Partition::read_csv("x,f\n0,zero\n".as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Partition::read_csv("x,f\n0,0,0\n".as_bytes()),
            Err(Error::Parse(_))
        ));
    }

    proptest! {
        // Random grids: the interpolant reproduces every knot and never
        // leaves the local chord range.
        #[test]
        fn interpolant_stays_on_chords(
            start in -100.0f64..100.0,
            gaps in prop::collection::vec(1e-3f64..10.0, 1..24),
            seed_vals in prop::collection::vec(-50.0f64..50.0, 2..26),
        ) {
            let mut knots = vec![start];
            for g in &gaps {
                knots.push(knots.last().unwrap() + g);
            }
            let values: Vec<f64> = (0..knots.len())
                .map(|i| seed_vals[i % seed_vals.len()])
                .collect();
            let p = Partition::new(knots.clone(), values.clone()).unwrap();
            for (x, v) in knots.iter().zip(&values) {
                prop_assert_eq!(p.eval(*x).unwrap(), *v);
            }
            for w in 0..knots.len() - 1 {
                let mid = 0.5 * (knots[w] + knots[w + 1]);
                let y = p.eval(mid).unwrap();
                let lo = values[w].min(values[w + 1]);
                let hi = values[w].max(values[w + 1]);
                prop_assert!(y >= lo && y <= hi);
            }
        }

        // Monotone samples give a monotone interpolant; the clamp in eval
        // makes this exact rather than approximate.
        #[test]
        fn monotone_data_monotone_interpolant(
            start in -10.0f64..10.0,
            gaps in prop::collection::vec(1e-2f64..5.0, 2..16),
            rises in prop::collection::vec(0.0f64..3.0, 2..16),
            probes in prop::collection::vec(0.0f64..1.0, 8),
        ) {
            let n = gaps.len().min(rises.len());
            let mut knots = vec![start];
            let mut values = vec![0.0];
            for i in 0..n {
                knots.push(knots.last().unwrap() + gaps[i]);
                values.push(values.last().unwrap() + rises[i]);
            }
            let p = Partition::new(knots.clone(), values).unwrap();
            let (lo, hi) = p.span();
            let mut xs: Vec<f64> = probes.iter().map(|t| lo + (hi - lo) * t).collect();
            xs.sort_by(f64::total_cmp);
            for w in xs.windows(2) {
                prop_assert!(p.eval(w[0]).unwrap() <= p.eval(w[1]).unwrap());
            }
        }
    }
}
