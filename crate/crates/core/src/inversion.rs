//! From weights back to function form.
//!
//! A hard-linear hidden layer wears its function on its sleeve: each unit
//! is a band with a slope, so the network's scalar function is piecewise
//! linear with breakpoints at the band edges. [`invert_hard_layer`] reads
//! the bands off the weights; [`reconstruct_function`] assembles the full
//! [`PiecewiseLinear`], falling back to dense sampling for networks that
//! are not piecewise linear (or not in the plain two-layer shape).

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::eval::forward;
use crate::network::{LayerInput, LayerSpec, NetworkSpec, WeightMat};
use crate::piecewise::PiecewiseLinear;

/// One hidden unit read back from its weights: the input band over which it
/// ramps, its slope contribution there, the height it accumulates across
/// the band, and any constant share it carries (the anchor rides on the
/// first unit after sorting).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDescription {
    pub band_lo: f64,
    pub band_hi: f64,
    pub slope: f64,
    pub height: f64,
    pub offset: f64,
}

/// Describes every unit of a hard-linear hidden layer, sorted by band
/// start.
///
/// `w1` is the inner matrix (slope and bias columns); `out_row` holds the
/// consuming coefficients, optionally with a trailing bias entry that is
/// reported as the first unit's offset. A unit with inner slope `k1` and
/// bias `b` ramps over `[-b/k1, (1-b)/k1]` (endpoints swapped when `k1` is
/// negative), with slope `c * k1` and height `c * sign(k1)`.
pub fn invert_hard_layer(
    w1: &WeightMat,
    out_row: &[f64],
    kind: ActivationKind,
) -> Result<Vec<UnitDescription>> {
    if kind != ActivationKind::HardLinear {
        return Err(Error::KindMismatch {
            expected: ActivationKind::HardLinear,
            got: kind,
        });
    }
    if w1.cols() != 2 {
        return Err(Error::NotInvertible(
            "inner layer must read a single scalar input".into(),
        ));
    }
    let n = w1.rows();
    let anchor = if out_row.len() == n {
        0.0
    } else if out_row.len() == n + 1 {
        out_row[n]
    } else {
        return Err(Error::LengthMismatch {
            expected: n,
            got: out_row.len(),
        });
    };
    let mut units = Vec::with_capacity(n);
    for i in 0..n {
        let (k1, b) = (w1.get(i, 0), w1.get(i, 1));
        if k1 == 0.0 {
            return Err(Error::NotInvertible(format!(
                "unit {i} has zero inner slope, so it has no band"
            )));
        }
        let c = out_row[i];
        let (mut lo, mut hi) = (-b / k1, (1.0 - b) / k1);
        if k1 < 0.0 {
            std::mem::swap(&mut lo, &mut hi);
        }
        units.push(UnitDescription {
            band_lo: lo,
            band_hi: hi,
            slope: c * k1,
            height: c * k1.signum(),
            offset: 0.0,
        });
    }
    units.sort_by(|a, b| a.band_lo.total_cmp(&b.band_lo));
    if let Some(first) = units.first_mut() {
        first.offset = anchor;
    }
    Ok(units)
}

/// Recovers the network's scalar function over `interval` as a
/// [`PiecewiseLinear`].
///
/// Plain two-layer hard-linear and relu networks are reconstructed
/// exactly: breakpoints are the band edges (merged when closer than
/// `1e-9` of the interval width), each segment's slope is the sum of the
/// units active on it, and the anchor is the network value at the left
/// end. Everything else is sampled at `resolution` points and joined
/// segment by segment, which is approximate by nature.
pub fn reconstruct_function(
    net: &NetworkSpec,
    interval: (f64, f64),
    resolution: usize,
) -> Result<PiecewiseLinear> {
    if net.input_arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: net.input_arity(),
        });
    }
    if net.output_arity() != 1 {
        return Err(Error::NotInvertible(
            "only a scalar-output network draws a single curve".into(),
        ));
    }
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::EmptyInterval { lo, hi });
    }
    if resolution < 2 {
        return Err(Error::BadResolution(resolution));
    }
    match ramp_units(net) {
        Some(units) => exact_reconstruction(net, &units, lo, hi),
        None => sampled_reconstruction(net, lo, hi, resolution),
    }
}

struct RampUnit {
    kind: ActivationKind,
    k1: f64,
    b: f64,
    c: f64,
}

/// The shape the exact path understands: one scalar hard or relu hidden
/// layer feeding one affine output row.
fn ramp_units(net: &NetworkSpec) -> Option<Vec<RampUnit>> {
    let layers = net.layers();
    if layers.len() != 2 {
        return None;
    }
    let LayerSpec::DenseActivated { weights, kind } = &layers[0].spec else {
        return None;
    };
    if !matches!(kind, ActivationKind::HardLinear | ActivationKind::Relu) || weights.cols() != 2 {
        return None;
    }
    let LayerSpec::LinearOnly { weights: out, .. } = &layers[1].spec else {
        return None;
    };
    if layers[1].input != LayerInput::Previous || out.rows() != 1 {
        return None;
    }
    Some(
        (0..weights.rows())
            .map(|i| RampUnit {
                kind: *kind,
                k1: weights.get(i, 0),
                b: weights.get(i, 1),
                c: out.get(0, i),
            })
            .collect(),
    )
}

fn exact_reconstruction(
    net: &NetworkSpec,
    units: &[RampUnit],
    lo: f64,
    hi: f64,
) -> Result<PiecewiseLinear> {
    let merge_tol = 1e-9 * (hi - lo);
    let mut cuts: Vec<f64> = Vec::new();
    for u in units {
        if u.k1 == 0.0 {
            continue;
        }
        cuts.push(-u.b / u.k1);
        if u.kind == ActivationKind::HardLinear {
            cuts.push((1.0 - u.b) / u.k1);
        }
    }
    cuts.retain(|&x| x > lo + merge_tol && x < hi - merge_tol);
    cuts.sort_unstable_by(f64::total_cmp);

    let mut breakpoints = vec![lo];
    for x in cuts {
        if x - breakpoints.last().unwrap() > merge_tol {
            breakpoints.push(x);
        }
    }
    breakpoints.push(hi);

    let slopes = breakpoints
        .windows(2)
        .map(|seg| {
            let mid = 0.5 * (seg[0] + seg[1]);
            // canonical summation order, so reconstruction is invariant
            // under unit permutation bit for bit
            let mut parts: Vec<f64> = units
                .iter()
                .filter(|u| {
                    let pre = u.k1 * mid + u.b;
                    match u.kind {
                        ActivationKind::HardLinear => 0.0 < pre && pre < 1.0,
                        _ => pre > 0.0,
                    }
                })
                .map(|u| u.c * u.k1)
                .collect();
            parts.sort_unstable_by(f64::total_cmp);
            parts.into_iter().sum()
        })
        .collect();

    let anchor = forward(net, &[breakpoints[0]])?[0];
    PiecewiseLinear::new(breakpoints, slopes, anchor)
}

fn sampled_reconstruction(
    net: &NetworkSpec,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> Result<PiecewiseLinear> {
    let xs: Vec<f64> = (0..resolution)
        .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
        .collect();
    let mut ys = Vec::with_capacity(resolution);
    for &x in &xs {
        ys.push(forward(net, &[x])?[0]);
    }
    let slopes = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    PiecewiseLinear::new(xs, slopes, ys[0])
}
