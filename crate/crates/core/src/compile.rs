//! Compiling sampled functions into networks.
//!
//! One hidden unit per knot interval: unit `i` contributes
//! `[f(x_{i+1}) - f(x_i)] * clamp((x - x_i) / (x_{i+1} - x_i))`, and the sum
//! of contributions plus the anchor `f(x_1)` telescopes to the chord
//! interpolant of the partition. Relu gets there through an exact pair of
//! half-open ramps per interval; sigmoid and tanh approximate the clamp
//! with a smooth step (two conventions, see [`SmoothMode`]).
//!
//! Composite targets chain one such block per stage, and grid-sampled
//! multivariate targets are reduced to the scalar case by an injective
//! linear recoding of the grid ([`linearize_grid`]).

use std::collections::BTreeMap;

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::network::{ordered_dot, Layer, LayerSpec, NetworkSpec, WeightMat};
use crate::partition::Partition;

/// How sigmoid and tanh units stand in for the hard clamp.
///
/// `HeightMatched` (the default) centers each smooth step on its interval
/// midpoint with the steepness that reproduces the chord slope there, so
/// unit contributions asymptote to the correct heights. `KnotAnchored`
/// anchors the step at the left knot with steepness `1/(x_{i+1} - x_i)`,
/// scaling sigmoid heights by 4 and shifting each tanh unit by one half; it
/// exists as a witness of that convention, not as a good approximator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SmoothMode {
    #[default]
    HeightMatched,
    KnotAnchored,
}

/// Inner weights of the unit that switches on over `[lo, hi]`:
/// slope `1/(hi - lo)` and bias `-lo/(hi - lo)`.
pub(crate) fn hard_band_row(lo: f64, hi: f64) -> [f64; 2] {
    let len = hi - lo;
    [1.0 / len, -lo / len]
}

fn scalar_layers(p: &Partition, kind: ActivationKind, mode: SmoothMode) -> (LayerSpec, LayerSpec) {
    let knots = p.knots();
    let values = p.values();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut coeffs: Vec<f64> = Vec::new();
    let mut bias = values[0];
    for i in 0..p.interval_count() {
        let (lo, hi) = (knots[i], knots[i + 1]);
        let len = hi - lo;
        let mid = 0.5 * (lo + hi);
        let height = values[i + 1] - values[i];
        match (kind, mode) {
            (ActivationKind::HardLinear, _) => {
                rows.push(hard_band_row(lo, hi).to_vec());
                coeffs.push(height);
            }
            (ActivationKind::Relu, _) => {
                // clamp(u) = max(0, u) - max(0, u - 1), exactly
                let [k1, b] = hard_band_row(lo, hi);
                rows.push(vec![k1, b]);
                rows.push(vec![k1, b - 1.0]);
                coeffs.push(height);
                coeffs.push(-height);
            }
            (ActivationKind::Sigmoid, SmoothMode::HeightMatched) => {
                let a = 4.0 / len;
                rows.push(vec![a, -a * mid]);
                coeffs.push(height);
            }
            (ActivationKind::Sigmoid, SmoothMode::KnotAnchored) => {
                rows.push(hard_band_row(lo, hi).to_vec());
                coeffs.push(4.0 * height);
            }
            (ActivationKind::Tanh, SmoothMode::HeightMatched) => {
                // (h/2) tanh runs -h/2 .. h/2; the half-height shift joins
                // the bias so contributions still telescope
                let a = 2.0 / len;
                rows.push(vec![a, -a * mid]);
                coeffs.push(0.5 * height);
                bias += 0.5 * height;
            }
            (ActivationKind::Tanh, SmoothMode::KnotAnchored) => {
                rows.push(hard_band_row(lo, hi).to_vec());
                coeffs.push(0.5 * height);
                bias += 0.5;
            }
        }
    }
    let hidden = LayerSpec::DenseActivated {
        weights: WeightMat::from_rows(rows).expect("unit rows are finite 2-vectors"),
        kind,
    };
    let mut out_row = coeffs;
    out_row.push(bias);
    let output = LayerSpec::LinearOnly {
        weights: WeightMat::new(1, out_row.len(), out_row).expect("one finite output row"),
        bias: true,
    };
    (hidden, output)
}

/// Compiles the chord interpolant of `p` into a one-hidden-layer network.
///
/// For `HardLinear` the network equals the interpolant up to float
/// rounding; `Relu` expands each unit into an exact ramp pair; smooth kinds
/// use the default [`SmoothMode::HeightMatched`] convention.
pub fn compile_scalar(p: &Partition, kind: ActivationKind) -> NetworkSpec {
    compile_scalar_mode(p, kind, SmoothMode::default())
}

/// [`compile_scalar`] with an explicit smooth-step convention.
pub fn compile_scalar_mode(p: &Partition, kind: ActivationKind, mode: SmoothMode) -> NetworkSpec {
    let (hidden, output) = scalar_layers(p, kind, mode);
    NetworkSpec::scalar_chain(vec![hidden, output]).expect("compiled layers line up")
}

/// The explicit weight solution of a hard-linear compile.
///
/// `w1` holds one row per interval (inner slope, inner bias), `w22` one
/// output coefficient per unit (the chord heights), and `offset` the anchor
/// value `f(x_1)` that the output layer carries as its bias.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrices {
    w1: WeightMat,
    w22: WeightMat,
    offset: f64,
}

impl WeightMatrices {
    pub fn w1(&self) -> &WeightMat {
        &self.w1
    }

    pub fn w22(&self) -> &WeightMat {
        &self.w22
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Rank-one reduction: row `i` of `w1` scaled by output coefficient
    /// `i`, so entry `(i, 0)` is the chord slope of interval `i`.
    pub fn merged(&self) -> WeightMat {
        let rows = (0..self.w1.rows())
            .map(|i| {
                let c = self.w22.get(0, i);
                self.w1.row(i).iter().map(|w| c * w).collect()
            })
            .collect();
        WeightMat::from_rows(rows).expect("scaled copies of finite rows")
    }

    /// Evaluates the matrices directly. Follows the same operation order as
    /// the compiled network, so the two agree bit for bit.
    pub fn forward(&self, x: f64) -> f64 {
        let post: Vec<f64> = self
            .w1
            .apply(&[x])
            .into_iter()
            .map(|u| ActivationKind::HardLinear.apply(u))
            .collect();
        let mut row = self.w22.row(0).to_vec();
        row.push(self.offset);
        ordered_dot(&row, &post)
    }
}

/// Extracts the hard-linear weight solution for `p`.
pub fn weight_matrices(p: &Partition) -> WeightMatrices {
    let knots = p.knots();
    let rows = (0..p.interval_count())
        .map(|i| hard_band_row(knots[i], knots[i + 1]).to_vec())
        .collect();
    WeightMatrices {
        w1: WeightMat::from_rows(rows).expect("finite band rows"),
        w22: WeightMat::new(1, p.interval_count(), p.heights()).expect("finite heights"),
        offset: p.values()[0],
    }
}

/// Chains one compiled block per stage: the network realizes
/// `F_n(... F_1(x) ...)` where `F_i` is stage `i`'s interpolant.
///
/// Each stage must accept everything the previous stage can emit; a stage
/// whose knot span falls short of the upstream value range is rejected
/// rather than silently clamped, because a clamp inside the chain would
/// corrupt every later stage.
pub fn compile_composite(stages: &[(Partition, ActivationKind)]) -> Result<NetworkSpec> {
    if stages.is_empty() {
        return Err(Error::Network("composite of zero stages".into()));
    }
    for i in 0..stages.len() - 1 {
        let (need_lo, need_hi) = stages[i].0.value_range();
        let (lo, hi) = stages[i + 1].0.span();
        if need_lo < lo || need_hi > hi {
            return Err(Error::StageDomain {
                stage: i + 1,
                lo,
                hi,
                need_lo,
                need_hi,
            });
        }
    }
    let mut specs = Vec::with_capacity(2 * stages.len());
    for (p, kind) in stages {
        let (hidden, output) = scalar_layers(p, *kind, SmoothMode::default());
        specs.push(hidden);
        specs.push(output);
    }
    NetworkSpec::scalar_chain(specs)
}

/// Injective linear recoding of an integer grid.
///
/// Weights send the tuple `(i_1, ..., i_n)` to the scalar code
/// `sum w_k * i_k`; construction verifies injectivity over the declared
/// grid exhaustively, so any weights that pass can safely index a
/// one-dimensional partition.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizerWeights {
    weights: Vec<f64>,
    extents: Vec<usize>,
}

impl LinearizerWeights {
    pub fn new(weights: Vec<f64>, extents: Vec<usize>) -> Result<Self> {
        if extents.is_empty() || extents.contains(&0) {
            return Err(Error::BadExtents);
        }
        if weights.len() != extents.len() {
            return Err(Error::LengthMismatch {
                expected: extents.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFiniteParam);
        }
        let lin = Self { weights, extents };
        let mut codes: Vec<f64> = grid_points(&lin.extents).map(|p| lin.code(&p)).collect();
        codes.sort_unstable_by(f64::total_cmp);
        if let Some(pair) = codes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::LinearizerCollision { code: pair[0] });
        }
        Ok(lin)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    /// Number of points in the declared grid.
    pub fn grid_len(&self) -> usize {
        self.extents.iter().product()
    }

    /// Scalar code of one grid point.
    pub fn code(&self, point: &[usize]) -> f64 {
        self.weights
            .iter()
            .zip(point)
            .map(|(w, &i)| w * i as f64)
            .sum()
    }
}

/// Mixed-radix weights for the given grid extents: `w_k` is the product of
/// all extents before `k`, so codes enumerate the grid like digits of a
/// positional numeral.
pub fn linearize_grid(extents: &[usize]) -> Result<LinearizerWeights> {
    if extents.is_empty() || extents.contains(&0) {
        return Err(Error::BadExtents);
    }
    let mut weights = Vec::with_capacity(extents.len());
    let mut w = 1.0;
    for &e in extents {
        weights.push(w);
        w *= e as f64;
    }
    LinearizerWeights::new(weights, extents.to_vec())
}

fn grid_points(extents: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = extents.iter().product();
    (0..total).map(move |mut flat| {
        extents
            .iter()
            .map(|&e| {
                let digit = flat % e;
                flat /= e;
                digit
            })
            .collect()
    })
}

/// Compiles a fully sampled grid function: a linear recoding layer feeds
/// the scalar compile of the induced partition (codes ascending, with their
/// samples as values). Forward at a grid point reproduces its sample.
pub fn compile_multivariate(
    samples: &BTreeMap<Vec<usize>, f64>,
    lin: &LinearizerWeights,
    kind: ActivationKind,
) -> Result<NetworkSpec> {
    let dims = lin.extents().len();
    for key in samples.keys() {
        if key.len() != dims || key.iter().zip(lin.extents()).any(|(&i, &e)| i >= e) {
            return Err(Error::GridMismatch {
                detail: format!("{key:?}"),
            });
        }
    }
    let total = lin.grid_len();
    if samples.len() < total {
        return Err(Error::IncompleteGrid {
            missing: total - samples.len(),
        });
    }
    let mut pairs: Vec<(f64, f64)> = samples.iter().map(|(k, &v)| (lin.code(k), v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::LinearizerCollision { code: w[0].0 });
    }
    let (knots, values): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let induced = Partition::new(knots, values)?;
    let (hidden, output) = scalar_layers(&induced, kind, SmoothMode::default());
    let mixer = LayerSpec::LinearOnly {
        weights: WeightMat::new(1, dims, lin.weights().to_vec())?,
        bias: false,
    };
    NetworkSpec::new(
        vec![dims],
        vec![
            Layer::from_block(mixer, 0),
            Layer::chained(hidden),
            Layer::chained(output),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{forward, forward_trace};
    use crate::partition::{interpolant_eval, uniform_partition};
    use crate::rng::XorShift64Star;
    use proptest::prelude::*;

    fn dense_deviation(net: &NetworkSpec, p: &Partition, points: usize) -> f64 {
        let (lo, hi) = p.span();
        let mut worst = 0.0f64;
        for i in 0..points {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            let got = forward(net, &[x]).unwrap()[0];
            let want = interpolant_eval(p, x).unwrap();
            worst = worst.max((got - want).abs());
        }
        worst
    }

    #[test]
    fn identity_compiles_exactly() {
        let p = Partition::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 1.0]).unwrap();
        let net = compile_scalar(&p, ActivationKind::HardLinear);
        assert_eq!(forward(&net, &[0.75]).unwrap()[0], 0.75);
    }

    #[test]
    fn square_compiles_to_its_chords() {
        let p = Partition::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        let net = compile_scalar(&p, ActivationKind::HardLinear);
        assert_eq!(forward(&net, &[0.5]).unwrap()[0], 0.5);
        assert_eq!(forward(&net, &[1.0]).unwrap()[0], 1.0);
        assert_eq!(forward(&net, &[2.0]).unwrap()[0], 4.0);
    }

    #[test]
    fn square_hidden_activations_at_the_shared_knot() {
        let p = Partition::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        let net = compile_scalar(&p, ActivationKind::HardLinear);
        let (_, traces) = forward_trace(&net, &[1.0]).unwrap();
        // first unit saturated, second at the start of its band
        assert_eq!(traces[0].post, vec![1.0, 0.0]);
    }

    #[test]
    fn sine_net_tracks_the_interpolant() {
        let p = uniform_partition(0.0, std::f64::consts::PI, 17, f64::sin).unwrap();
        let net = compile_scalar(&p, ActivationKind::HardLinear);
        assert!(dense_deviation(&net, &p, 10_000) <= 1e-9);
    }

    #[test]
    fn matrices_match_the_spelled_out_examples() {
        let id = Partition::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let m = weight_matrices(&id);
        assert_eq!(m.w1().row(0), &[1.0, 0.0]);
        assert_eq!(m.w22().row(0), &[1.0]);
        assert_eq!(m.offset(), 0.0);

        let sq = Partition::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        let m = weight_matrices(&sq);
        assert_eq!(m.w22().row(0), &[1.0, 3.0]);
        // chord slope of the first interval
        assert_eq!(m.merged().get(0, 0), 1.0);
    }

    #[test]
    fn matrices_and_network_agree_bit_for_bit() {
        let p = uniform_partition(-1.0, 2.0, 9, |x| x * x * x - x).unwrap();
        let net = compile_scalar(&p, ActivationKind::HardLinear);
        let m = weight_matrices(&p);
        let mut rng = XorShift64Star::new(11);
        for _ in 0..1000 {
            let x = rng.uniform(-1.5, 2.5);
            let via_net = forward(&net, &[x]).unwrap()[0];
            let via_mat = m.forward(x);
            assert_eq!(via_net.to_bits(), via_mat.to_bits());
        }
    }

    #[test]
    fn relu_pairs_reproduce_the_hard_compile() {
        let p = uniform_partition(0.0, std::f64::consts::PI, 17, f64::sin).unwrap();
        let hard = compile_scalar(&p, ActivationKind::HardLinear);
        let relu = compile_scalar(&p, ActivationKind::Relu);
        match &relu.layers()[0].spec {
            LayerSpec::DenseActivated { weights, .. } => assert_eq!(weights.rows(), 32),
            other => panic!("expected a dense hidden layer, got {other:?}"),
        }
        let mut rng = XorShift64Star::new(3);
        for _ in 0..1000 {
            let x = rng.uniform(-0.5, std::f64::consts::PI + 0.5);
            let a = forward(&hard, &[x]).unwrap()[0];
            let b = forward(&relu, &[x]).unwrap()[0];
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "at {x}: {a} vs {b}");
        }
    }

    #[test]
    fn smooth_units_match_chord_slopes_at_their_centers() {
        let p = uniform_partition(0.0, std::f64::consts::PI, 9, f64::sin).unwrap();
        for kind in [ActivationKind::Sigmoid, ActivationKind::Tanh] {
            let net = compile_scalar(&p, kind);
            let (rows, coeffs) = match (&net.layers()[0].spec, &net.layers()[1].spec) {
                (
                    LayerSpec::DenseActivated { weights, .. },
                    LayerSpec::LinearOnly { weights: out, .. },
                ) => (weights.clone(), out.clone()),
                other => panic!("unexpected shape {other:?}"),
            };
            for i in 0..p.interval_count() {
                let len = p.knots()[i + 1] - p.knots()[i];
                let chord = p.heights()[i] / len;
                let gain = match kind {
                    ActivationKind::Sigmoid => 0.25, // logistic slope at its center
                    _ => 1.0,
                };
                let unit_slope = coeffs.get(0, i) * rows.get(i, 0) * gain;
                assert!(
                    (unit_slope - chord).abs() <= 1e-12 * (1.0 + chord.abs()),
                    "{kind} unit {i}: {unit_slope} vs {chord}"
                );
            }
        }
    }

    #[test]
    fn height_matched_sigmoid_stays_near_the_target() {
        let p = uniform_partition(0.0, std::f64::consts::PI, 33, f64::sin).unwrap();
        let net = compile_scalar(&p, ActivationKind::Sigmoid);
        let mut worst = 0.0f64;
        for i in 0..=1000 {
            let x = std::f64::consts::PI * i as f64 / 1000.0;
            let y = forward(&net, &[x]).unwrap()[0];
            worst = worst.max((y - x.sin()).abs());
        }
        assert!(worst <= 0.05, "sup deviation {worst}");
    }

    #[test]
    fn knot_anchored_mode_emits_the_literal_forms() {
        let p = Partition::new(vec![0.0, 1.0, 3.0], vec![0.0, 1.0, 4.0]).unwrap();

        let sig = compile_scalar_mode(&p, ActivationKind::Sigmoid, SmoothMode::KnotAnchored);
        match (&sig.layers()[0].spec, &sig.layers()[1].spec) {
            (
                LayerSpec::DenseActivated { weights, .. },
                LayerSpec::LinearOnly { weights: out, .. },
            ) => {
                assert_eq!(weights.row(0), &hard_band_row(0.0, 1.0));
                assert_eq!(weights.row(1), &hard_band_row(1.0, 3.0));
                assert_eq!(out.row(0), &[4.0, 12.0, 0.0]);
            }
            other => panic!("unexpected shape {other:?}"),
        }

        let tanh = compile_scalar_mode(&p, ActivationKind::Tanh, SmoothMode::KnotAnchored);
        match &tanh.layers()[1].spec {
            LayerSpec::LinearOnly { weights, .. } => {
                // half heights, plus one half per unit folded into the bias
                assert_eq!(weights.row(0), &[0.5, 1.5, 1.0]);
            }
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn composite_nests_the_interpolants() {
        let absolute = Partition::new(vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]).unwrap();
        let square = Partition::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.25, 1.0]).unwrap();
        let net = compile_composite(&[
            (absolute.clone(), ActivationKind::HardLinear),
            (square.clone(), ActivationKind::HardLinear),
        ])
        .unwrap();
        assert_eq!(forward(&net, &[-1.0]).unwrap()[0], 1.0);
        for i in 0..50 {
            let x = -1.0 + 0.04 * i as f64;
            let inner = interpolant_eval(&absolute, x).unwrap();
            let want = interpolant_eval(&square, inner).unwrap();
            let got = forward(&net, &[x]).unwrap()[0];
            assert!((got - want).abs() <= 1e-9, "at {x}: {got} vs {want}");
        }
    }

    #[test]
    fn composite_of_one_stage_is_the_scalar_compile() {
        let p = Partition::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        let one = compile_composite(&[(p.clone(), ActivationKind::HardLinear)]).unwrap();
        let direct = compile_scalar(&p, ActivationKind::HardLinear);
        assert_eq!(one, direct);
    }

    #[test]
    fn identity_composed_with_identity_is_identity() {
        let id = Partition::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 1.0]).unwrap();
        let net = compile_composite(&[
            (id.clone(), ActivationKind::HardLinear),
            (id, ActivationKind::HardLinear),
        ])
        .unwrap();
        assert_eq!(forward(&net, &[0.3]).unwrap()[0], 0.3);
    }

    #[test]
    fn composite_rejects_uncovered_stage_domains() {
        // first stage emits values up to 4, second only accepts [0, 1]
        let wide = Partition::new(vec![0.0, 2.0], vec![0.0, 4.0]).unwrap();
        let narrow = Partition::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let err = compile_composite(&[
            (wide, ActivationKind::HardLinear),
            (narrow, ActivationKind::HardLinear),
        ]);
        match err {
            Err(Error::StageDomain { stage, need_hi, .. }) => {
                assert_eq!(stage, 1);
                assert_eq!(need_hi, 4.0);
            }
            other => panic!("expected a stage-domain error, got {other:?}"),
        }
    }

    #[test]
    fn mixed_radix_weights() {
        assert_eq!(linearize_grid(&[10, 10]).unwrap().weights(), &[1.0, 10.0]);
        assert_eq!(linearize_grid(&[2]).unwrap().weights(), &[1.0]);
        let lin = linearize_grid(&[3, 4, 5]).unwrap();
        assert_eq!(lin.weights(), &[1.0, 3.0, 12.0]);
        // exhaustive distinctness over all 60 tuples
        let mut codes: Vec<f64> = grid_points(lin.extents()).map(|p| lin.code(&p)).collect();
        codes.sort_unstable_by(f64::total_cmp);
        codes.dedup();
        assert_eq!(codes.len(), 60);
        assert!(matches!(linearize_grid(&[3, 0]), Err(Error::BadExtents)));
    }

    #[test]
    fn colliding_weights_are_rejected() {
        let err = LinearizerWeights::new(vec![1.0, 1.0], vec![2, 2]);
        assert!(matches!(err, Err(Error::LinearizerCollision { code }) if code == 1.0));
    }

    #[test]
    fn grid_compile_reproduces_every_sample() {
        let lin = LinearizerWeights::new(vec![1.0, 3.0], vec![3, 3]).unwrap();
        let mut samples = BTreeMap::new();
        for i in 0..3usize {
            for j in 0..3usize {
                samples.insert(vec![i, j], (i + j) as f64);
            }
        }
        let net = compile_multivariate(&samples, &lin, ActivationKind::HardLinear).unwrap();
        for (point, &want) in &samples {
            let input: Vec<f64> = point.iter().map(|&i| i as f64).collect();
            let got = forward(&net, &input).unwrap()[0];
            assert!((got - want).abs() <= 1e-9, "{point:?}: {got} vs {want}");
        }
        assert_eq!(forward(&net, &[2.0, 1.0]).unwrap()[0], 3.0);
    }

    #[test]
    fn constant_grid_stays_constant() {
        let lin = linearize_grid(&[4, 2]).unwrap();
        let samples: BTreeMap<Vec<usize>, f64> =
            grid_points(lin.extents()).map(|p| (p, 2.5)).collect();
        let net = compile_multivariate(&samples, &lin, ActivationKind::HardLinear).unwrap();
        for point in grid_points(lin.extents()) {
            let input: Vec<f64> = point.iter().map(|&i| i as f64).collect();
            assert!((forward(&net, &input).unwrap()[0] - 2.5).abs() <= 1e-9);
        }
    }

    #[test]
    fn non_monotone_code_profile_is_still_reproduced() {
        // F(i, j) = i reads 0, 1, 0, 1 along ascending codes
        let lin = LinearizerWeights::new(vec![1.0, 2.0], vec![2, 2]).unwrap();
        let samples: BTreeMap<Vec<usize>, f64> = grid_points(lin.extents())
            .map(|p| {
                let v = p[0] as f64;
                (p, v)
            })
            .collect();
        let net = compile_multivariate(&samples, &lin, ActivationKind::HardLinear).unwrap();
        for point in grid_points(lin.extents()) {
            let input: Vec<f64> = point.iter().map(|&i| i as f64).collect();
            let got = forward(&net, &input).unwrap()[0];
            assert!((got - point[0] as f64).abs() <= 1e-9);
        }
    }

    #[test]
    fn grid_compile_rejects_holes_and_strays() {
        let lin = linearize_grid(&[2, 2]).unwrap();
        let mut samples: BTreeMap<Vec<usize>, f64> = grid_points(lin.extents())
            .map(|p| (p, 1.0))
            .collect();
        samples.remove(&vec![1, 0]);
        assert!(matches!(
            compile_multivariate(&samples, &lin, ActivationKind::HardLinear),
            Err(Error::IncompleteGrid { missing: 1 })
        ));

        samples.insert(vec![5, 0], 1.0);
        assert!(matches!(
            compile_multivariate(&samples, &lin, ActivationKind::HardLinear),
            Err(Error::GridMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn compiled_nets_track_their_interpolants(
            seed in 0u64..256,
            m in 2usize..20,
        ) {
            let mut rng = XorShift64Star::new(seed);
            let mut knots = vec![0.0f64];
            for _ in 1..m {
                let last = *knots.last().unwrap();
                knots.push(last + rng.uniform(0.05, 1.0));
            }
            let values: Vec<f64> = (0..m).map(|_| rng.uniform(-3.0, 3.0)).collect();
            let p = Partition::new(knots, values).unwrap();
            let net = compile_scalar(&p, ActivationKind::HardLinear);
            let (lo, hi) = p.span();
            for i in 0..200 {
                // includes points beyond both ends, where the net saturates
                let x = lo - 0.5 + (hi - lo + 1.0) * i as f64 / 199.0;
                let got = forward(&net, &[x]).unwrap()[0];
                let want = interpolant_eval(&p, x).unwrap();
                prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
            }
        }
    }
}
