//! The space of weight assignments that realize one function.
//!
//! A compiled network is never the unique set of weights computing its
//! function. Three families of equivalent assignments are constructed and
//! counted here: unit permutations (reorder a hidden layer and the columns
//! consuming it), first-type splits (replace a unit by n thinner copies of
//! itself), and overlapping covers (let units span several knot intervals
//! and solve for the heights that still sum to every chord).

use num_bigint::BigUint;
use num_traits::One;

use crate::activation::ActivationKind;
use crate::compile::{compile_scalar, hard_band_row};
use crate::error::{Error, Result};
use crate::eval::forward;
use crate::network::{LayerInput, LayerSpec, NetworkSpec, WeightMat};
use crate::partition::Partition;

/// Reorders the units of hidden layer `layer` by `perm` (entry `i` names
/// the old unit that moves to position `i`) and permutes the successor's
/// columns to match. The network function is unchanged, bit for bit: the
/// consuming dot products see the same multiset of summands.
pub fn permute_layer(net: &NetworkSpec, layer: usize, perm: &[usize]) -> Result<NetworkSpec> {
    let layers = net.layers();
    let Some(target) = layers.get(layer) else {
        return Err(Error::NotPermutable { layer });
    };
    let LayerSpec::DenseActivated { weights, kind } = &target.spec else {
        return Err(Error::NotPermutable { layer });
    };
    check_bijection(perm, weights.rows())?;
    let successor = layers
        .get(layer + 1)
        .filter(|l| l.input == LayerInput::Previous)
        .ok_or(Error::NotPermutable { layer })?;

    let hidden = LayerSpec::DenseActivated {
        weights: WeightMat::from_rows(perm.iter().map(|&o| weights.row(o).to_vec()).collect())?,
        kind: *kind,
    };
    let consumer = match &successor.spec {
        LayerSpec::LinearOnly { weights, bias } => LayerSpec::LinearOnly {
            weights: permute_columns(weights, perm, *bias)?,
            bias: *bias,
        },
        LayerSpec::DenseActivated { weights, kind } => LayerSpec::DenseActivated {
            weights: permute_columns(weights, perm, true)?,
            kind: *kind,
        },
        _ => return Err(Error::NotPermutable { layer }),
    };
    rebuild(net, &[(layer, hidden), (layer + 1, consumer)])
}

fn check_bijection(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::BadPermutation);
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::BadPermutation);
        }
        seen[p] = true;
    }
    Ok(())
}

fn permute_columns(w: &WeightMat, perm: &[usize], trailing_bias: bool) -> Result<WeightMat> {
    let rows = (0..w.rows())
        .map(|r| {
            let mut row: Vec<f64> = perm.iter().map(|&o| w.get(r, o)).collect();
            if trailing_bias {
                row.push(w.get(r, w.cols() - 1));
            }
            row
        })
        .collect();
    WeightMat::from_rows(rows)
}

fn rebuild(net: &NetworkSpec, replacements: &[(usize, LayerSpec)]) -> Result<NetworkSpec> {
    let (blocks, mut layers) = net.clone().into_parts();
    for (idx, spec) in replacements {
        layers[*idx].spec = spec.clone();
    }
    NetworkSpec::new(blocks, layers)
}

fn hidden_widths(net: &NetworkSpec) -> impl Iterator<Item = usize> + '_ {
    net.layers().iter().filter_map(|l| match &l.spec {
        LayerSpec::DenseActivated { weights, .. } => Some(weights.rows()),
        _ => None,
    })
}

/// Number of unit reorderings of the network: the product of `n!` over its
/// activated dense layers. Every one of them leaves the function intact.
pub fn count_symmetric(net: &NetworkSpec) -> BigUint {
    hidden_widths(net)
        .map(factorial)
        .fold(BigUint::one(), |acc, f| acc * f)
}

/// Number of ways to reassign which unit carries which part of the summed
/// function, `n^n` per activated dense layer of width `n`. This is the
/// nominal count of composed-decomposed assignments; whether a particular
/// assignment is realizable is what [`solve_cover`] decides.
pub fn count_composed_decomposed(net: &NetworkSpec) -> BigUint {
    hidden_widths(net)
        .map(|n| BigUint::from(n).pow(n as u32))
        .fold(BigUint::one(), |acc, f| acc * f)
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Replaces one hard-linear unit by `n` copies with the consuming column
/// scaled by `1/n`: each copy contributes an equal share of the original
/// height over the same band. Layer width grows by `n - 1`; the function is
/// preserved up to the rounding of the shares.
pub fn split_first_type(
    net: &NetworkSpec,
    layer: usize,
    unit: usize,
    n: usize,
) -> Result<NetworkSpec> {
    if n < 2 {
        return Err(Error::SplitTooFew);
    }
    let layers = net.layers();
    let Some(target) = layers.get(layer) else {
        return Err(Error::NotPermutable { layer });
    };
    let LayerSpec::DenseActivated { weights, kind } = &target.spec else {
        return Err(Error::NotPermutable { layer });
    };
    if *kind != ActivationKind::HardLinear {
        return Err(Error::UnsupportedSplit { kind: *kind });
    }
    if unit >= weights.rows() {
        return Err(Error::UnitOutOfRange { layer, unit });
    }
    let successor = layers
        .get(layer + 1)
        .filter(|l| l.input == LayerInput::Previous)
        .ok_or(Error::NotPermutable { layer })?;

    let mut rows: Vec<Vec<f64>> = (0..weights.rows()).map(|r| weights.row(r).to_vec()).collect();
    let band = rows[unit].clone();
    rows.splice(unit..=unit, std::iter::repeat(band).take(n));
    let hidden = LayerSpec::DenseActivated {
        weights: WeightMat::from_rows(rows)?,
        kind: *kind,
    };

    let consumer = match &successor.spec {
        LayerSpec::LinearOnly { weights, bias } => LayerSpec::LinearOnly {
            weights: split_columns(weights, unit, n)?,
            bias: *bias,
        },
        LayerSpec::DenseActivated { weights, kind } => LayerSpec::DenseActivated {
            weights: split_columns(weights, unit, n)?,
            kind: *kind,
        },
        _ => return Err(Error::NotPermutable { layer }),
    };
    rebuild(net, &[(layer, hidden), (layer + 1, consumer)])
}

fn split_columns(w: &WeightMat, unit: usize, n: usize) -> Result<WeightMat> {
    let share = 1.0 / n as f64;
    let rows = (0..w.rows())
        .map(|r| {
            let mut row = Vec::with_capacity(w.cols() + n - 1);
            for c in 0..w.cols() {
                if c == unit {
                    row.extend(std::iter::repeat(w.get(r, c) * share).take(n));
                } else {
                    row.push(w.get(r, c));
                }
            }
            row
        })
        .collect();
    WeightMat::from_rows(rows)
}

/// Contiguous band assignment for an overlapping-cover solve: unit `i`
/// spans base intervals `a_i ..= b_i` and must include its own interval
/// `i`, so every interval stays covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverAssign {
    ranges: Vec<(usize, usize)>,
}

impl CoverAssign {
    pub fn new(ranges: Vec<(usize, usize)>) -> Result<Self> {
        let n = ranges.len();
        if n == 0 {
            return Err(Error::BadCover {
                detail: "no units assigned".into(),
            });
        }
        for (i, &(a, b)) in ranges.iter().enumerate() {
            if a > i || b < i {
                return Err(Error::BadCover {
                    detail: format!("unit {i} (range {a}..={b}) must cover its own interval"),
                });
            }
            if b >= n {
                return Err(Error::BadCover {
                    detail: format!("unit {i} ends at {b}, past the last base interval {}", n - 1),
                });
            }
        }
        Ok(Self { ranges })
    }

    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    fn is_identity(&self) -> bool {
        self.ranges.iter().enumerate().all(|(i, &(a, b))| a == i && b == i)
    }
}

/// One band per base interval, nothing overlapping.
pub fn identity_cover(n: usize) -> Result<CoverAssign> {
    CoverAssign::new((0..n).map(|i| (i, i)).collect())
}

/// Builds a hard-linear network for `p` under the given cover.
///
/// Each unit gets one slope unknown, uniform over its assigned span; base
/// interval `j` demands that the slopes of all units covering it sum to the
/// chord slope there. The resulting 0/1 incidence system either pins every
/// slope down or is reported singular with its rank; no regularization is
/// attempted. The identity cover short-circuits to the plain compile, so it
/// reproduces those weights exactly.
pub fn solve_cover(p: &Partition, assign: &CoverAssign) -> Result<NetworkSpec> {
    let m = p.interval_count();
    if assign.len() != m {
        return Err(Error::BadCover {
            detail: format!("{} units assigned over {m} base intervals", assign.len()),
        });
    }
    if assign.is_identity() {
        return Ok(compile_scalar(p, ActivationKind::HardLinear));
    }
    let knots = p.knots();
    let values = p.values();

    let mut aug: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let mut row: Vec<f64> = assign
                .ranges()
                .iter()
                .map(|&(a, b)| if a <= j && j <= b { 1.0 } else { 0.0 })
                .collect();
            row.push((values[j + 1] - values[j]) / (knots[j + 1] - knots[j]));
            row
        })
        .collect();

    // partial-pivot elimination; incidence entries are 0/1, so any pivot
    // below the threshold means a genuinely dependent system
    const PIVOT_TOL: f64 = 1e-9;
    let mut row = 0;
    for col in 0..m {
        let pivot = (row..m)
            .max_by(|&r1, &r2| aug[r1][col].abs().total_cmp(&aug[r2][col].abs()))
            .expect("rows remain");
        if aug[pivot][col].abs() < PIVOT_TOL {
            continue;
        }
        aug.swap(row, pivot);
        for r in row + 1..m {
            let factor = aug[r][col] / aug[row][col];
            if factor != 0.0 {
                for c in col..=m {
                    aug[r][c] -= factor * aug[row][c];
                }
            }
        }
        row += 1;
    }
    if row < m {
        return Err(Error::SingularCover { rank: row, size: m });
    }

    let mut slopes = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = aug[i][m];
        for j in i + 1..m {
            acc -= aug[i][j] * slopes[j];
        }
        slopes[i] = acc / aug[i][i];
    }

    let mut rows = Vec::with_capacity(m);
    let mut coeffs = Vec::with_capacity(m + 1);
    for (i, &(a, b)) in assign.ranges().iter().enumerate() {
        let (lo, hi) = (knots[a], knots[b + 1]);
        rows.push(hard_band_row(lo, hi).to_vec());
        coeffs.push(slopes[i] * (hi - lo));
    }
    coeffs.push(values[0]);
    let hidden = LayerSpec::DenseActivated {
        weights: WeightMat::from_rows(rows)?,
        kind: ActivationKind::HardLinear,
    };
    let output = LayerSpec::LinearOnly {
        weights: WeightMat::new(1, m + 1, coeffs)?,
        bias: true,
    };
    NetworkSpec::scalar_chain(vec![hidden, output])
}

/// Outcome of a sampled comparison of two scalar networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    pub max_deviation: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub equivalent: bool,
}

/// Compares two scalar-input networks over `interval` on a uniform grid of
/// `samples` points plus every kink either network has there (kinks are
/// where disagreement hides).
pub fn verify_equivalent(
    a: &NetworkSpec,
    b: &NetworkSpec,
    interval: (f64, f64),
    samples: usize,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    for net in [a, b] {
        if net.input_arity() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                got: net.input_arity(),
            });
        }
    }
    if a.output_arity() != b.output_arity() {
        return Err(Error::ArityMismatch {
            expected: a.output_arity(),
            got: b.output_arity(),
        });
    }
    if samples < 2 {
        return Err(Error::BadResolution(samples));
    }
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::EmptyInterval { lo, hi });
    }

    let mut xs: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    for net in [a, b] {
        xs.extend(
            kink_points(net)
                .into_iter()
                .filter(|x| (lo..=hi).contains(x)),
        );
    }

    let mut max_deviation = 0.0f64;
    for &x in &xs {
        let ya = forward(a, &[x])?;
        let yb = forward(b, &[x])?;
        for (u, v) in ya.iter().zip(&yb) {
            max_deviation = max_deviation.max((u - v).abs());
        }
    }
    Ok(EquivalenceReport {
        max_deviation,
        samples: xs.len(),
        tolerance,
        equivalent: max_deviation <= tolerance,
    })
}

/// Input positions where the first hard or relu layer changes regime.
fn kink_points(net: &NetworkSpec) -> Vec<f64> {
    let mut out = Vec::new();
    for layer in net.layers() {
        let LayerSpec::DenseActivated { weights, kind } = &layer.spec else {
            continue;
        };
        if weights.cols() != 2 {
            return out;
        }
        match kind {
            ActivationKind::HardLinear => {
                for r in 0..weights.rows() {
                    let (k1, b) = (weights.get(r, 0), weights.get(r, 1));
                    if k1 != 0.0 {
                        out.push(-b / k1);
                        out.push((1.0 - b) / k1);
                    }
                }
            }
            ActivationKind::Relu => {
                for r in 0..weights.rows() {
                    let (k1, b) = (weights.get(r, 0), weights.get(r, 1));
                    if k1 != 0.0 {
                        out.push(-b / k1);
                    }
                }
            }
            _ => {}
        }
        return out;
    }
    out
}
