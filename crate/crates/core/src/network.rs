//! Network structure: weight matrices, layer forms, and input routing.
//!
//! A [`NetworkSpec`] is a validated list of layers over declared input
//! blocks. Most nets are a single chain (each layer eats the previous
//! output), but three routed forms exist: recurrent steps fold a fresh input
//! block into the carried state, residual layers add their input back onto
//! an inner network's output, and parallel chains may be joined by a final
//! combine layer. Validation pins down arities once so that evaluation can
//! walk the same structure without re-deriving it.
//!
//! Bias is a weight like any other: a layer with a bias column consumes an
//! implicit constant 1 appended to its input.

use crate::activation::ActivationKind;
use crate::error::{Error, Result};

/// Dense row-major matrix of finite weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl WeightMat {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Network("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFiniteParam);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Network("ragged rows in weight matrix".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Applies the matrix to `x`, which must be one shorter than the column
    /// count when the last column is a bias.
    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert!(x.len() == self.cols || x.len() + 1 == self.cols);
        (0..self.rows).map(|r| ordered_dot(self.row(r), x)).collect()
    }
}

/// Dot product with the trailing entry of `row` treated as a bias weight on
/// a constant 1 when `row` is one longer than `x`.
///
/// Products are summed in a fixed canonical order, so the result depends
/// only on the multiset of products. Reordering a layer's units permutes the
/// products but never changes the output, bit for bit.
pub(crate) fn ordered_dot(row: &[f64], x: &[f64]) -> f64 {
    debug_assert!(row.len() == x.len() || row.len() == x.len() + 1);
    let mut products: Vec<f64> = row.iter().zip(x.iter()).map(|(w, v)| w * v).collect();
    if row.len() == x.len() + 1 {
        products.push(row[x.len()]);
    }
    products.sort_unstable_by(f64::total_cmp);
    products.into_iter().sum()
}

/// How parallel branch outputs are folded by a final combine layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineMode {
    Sum,
    Product,
}

/// Where a layer's (fresh) input comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerInput {
    /// Output of the preceding layer in the list.
    Previous,
    /// One of the declared input blocks.
    Block(usize),
}

/// One layer of a network.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    /// Affine rows (last column is the bias weight) followed by a shared
    /// activation shape applied to every unit.
    DenseActivated {
        weights: WeightMat,
        kind: ActivationKind,
    },
    /// Pure affine map; `bias` says whether the last column is a bias.
    LinearOnly { weights: WeightMat, bias: bool },
    /// One kernel slid across the input with the given stride; the banded
    /// dense equivalent is produced by `conv_to_dense`.
    SharedWeight {
        kernel: Vec<f64>,
        stride: usize,
        kind: Option<ActivationKind>,
    },
    /// Folds a fresh input block into the carried state:
    /// `act(state_weight * carried + weights * block)`, elementwise over the
    /// carried vector.
    RecurrentStep {
        state_weight: f64,
        weights: WeightMat,
        kind: ActivationKind,
    },
    /// Adds the routed input back onto the inner network's output.
    Residual { inner: Box<NetworkSpec> },
    /// Folds all open branch outputs elementwise. Only valid as the final
    /// layer.
    Combine { mode: CombineMode },
}

impl LayerSpec {
    /// Whether the layer applies a nonlinear activation shape.
    pub(crate) fn is_activated(&self) -> bool {
        matches!(
            self,
            LayerSpec::DenseActivated { .. }
                | LayerSpec::SharedWeight { kind: Some(_), .. }
                | LayerSpec::RecurrentStep { .. }
        )
    }
}

/// A layer plus the routing of its input.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub spec: LayerSpec,
    pub input: LayerInput,
}

impl Layer {
    pub fn chained(spec: LayerSpec) -> Self {
        Layer {
            spec,
            input: LayerInput::Previous,
        }
    }

    pub fn from_block(spec: LayerSpec, block: usize) -> Self {
        Layer {
            spec,
            input: LayerInput::Block(block),
        }
    }
}

/// A validated network: input block sizes plus routed layers.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    input_blocks: Vec<usize>,
    layers: Vec<Layer>,
    output_arity: usize,
}

impl NetworkSpec {
    /// Validates and freezes a network.
    ///
    /// Checks: positive block sizes, every block consumed exactly once,
    /// recurrent steps carried on a previous output and fed by a block,
    /// residual inner nets with matching arity, combine only as the final
    /// layer over equal-arity branches, no dangling branches, and adjacent
    /// dimensions compatible (one extra column where a bias is present).
    pub fn new(input_blocks: Vec<usize>, layers: Vec<Layer>) -> Result<Self> {
        if input_blocks.is_empty() || input_blocks.iter().any(|&s| s == 0) {
            return Err(Error::Network(
                "input blocks must be a nonempty list of positive sizes".into(),
            ));
        }
        if layers.is_empty() {
            return Err(Error::Network("a network needs at least one layer".into()));
        }
        let mut consumed = vec![false; input_blocks.len()];
        let mut take_block = |k: usize| -> Result<usize> {
            if k >= input_blocks.len() {
                return Err(Error::Network(format!(
                    "routing names block {k}, but only {} blocks are declared",
                    input_blocks.len()
                )));
            }
            if consumed[k] {
                return Err(Error::Network(format!("block {k} is consumed twice")));
            }
            consumed[k] = true;
            Ok(input_blocks[k])
        };

        let mut cur: Option<usize> = None;
        let mut pending: Vec<usize> = Vec::new();
        let last = layers.len() - 1;
        for (idx, layer) in layers.iter().enumerate() {
            let width = match &layer.spec {
                LayerSpec::Combine { .. } => {
                    if idx != last {
                        return Err(Error::Network(format!(
                            "combine at layer {idx} must be the final layer"
                        )));
                    }
                    if layer.input != LayerInput::Previous {
                        return Err(Error::Network(
                            "combine folds the open branches; it cannot consume a block".into(),
                        ));
                    }
                    let tail = cur.ok_or_else(|| {
                        Error::Network("combine has no branch outputs to fold".into())
                    })?;
                    if pending.is_empty() {
                        return Err(Error::Network(
                            "combine needs at least two branches".into(),
                        ));
                    }
                    if pending.iter().any(|&w| w != tail) {
                        return Err(Error::Network(
                            "combined branches must have equal output arity".into(),
                        ));
                    }
                    pending.clear();
                    tail
                }
                LayerSpec::RecurrentStep { weights, .. } => {
                    let carried = cur.ok_or_else(|| {
                        Error::Network(format!(
                            "recurrent step at layer {idx} has no carried state"
                        ))
                    })?;
                    let LayerInput::Block(k) = layer.input else {
                        return Err(Error::Network(format!(
                            "recurrent step at layer {idx} must name a fresh input block"
                        )));
                    };
                    let fresh = take_block(k)?;
                    if weights.rows() != carried {
                        return Err(Error::Network(format!(
                            "recurrent step at layer {idx}: carried state has width {carried}, weight rows {}",
                            weights.rows()
                        )));
                    }
                    if weights.cols() != fresh {
                        return Err(Error::Network(format!(
                            "recurrent step at layer {idx}: block width {fresh}, weight columns {}",
                            weights.cols()
                        )));
                    }
                    if !weights.data().iter().all(|w| w.is_finite()) {
                        return Err(Error::NonFiniteParam);
                    }
                    carried
                }
                spec => {
                    let in_width = match layer.input {
                        LayerInput::Previous => cur.ok_or_else(|| {
                            Error::Network(format!("layer {idx} has no previous output"))
                        })?,
                        LayerInput::Block(k) => {
                            if let Some(open) = cur.take() {
                                pending.push(open);
                            }
                            take_block(k)?
                        }
                    };
                    plain_out_width(spec, in_width, idx)?
                }
            };
            if let LayerSpec::RecurrentStep { state_weight, .. } = &layer.spec {
                if !state_weight.is_finite() {
                    return Err(Error::NonFiniteParam);
                }
            }
            cur = Some(width);
        }
        if !pending.is_empty() {
            return Err(Error::Network(
                "dangling branch outputs; fold them with a combine layer".into(),
            ));
        }
        if let Some(k) = consumed.iter().position(|c| !c) {
            return Err(Error::Network(format!("block {k} is never consumed")));
        }
        let output_arity = cur.expect("walk ends with an output");
        Ok(Self {
            input_blocks,
            layers,
            output_arity,
        })
    }

    /// Single-chain scalar network: one scalar block feeding the first
    /// layer, every later layer chained on the previous one.
    pub fn scalar_chain(specs: Vec<LayerSpec>) -> Result<Self> {
        let layers = specs
            .into_iter()
            .enumerate()
            .map(|(i, spec)| {
                if i == 0 {
                    Layer::from_block(spec, 0)
                } else {
                    Layer::chained(spec)
                }
            })
            .collect();
        Self::new(vec![1], layers)
    }

    pub fn input_blocks(&self) -> &[usize] {
        &self.input_blocks
    }

    /// Total number of scalar inputs, over all blocks.
    pub fn input_arity(&self) -> usize {
        self.input_blocks.iter().sum()
    }

    pub fn output_arity(&self) -> usize {
        self.output_arity
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Decomposes the network for rebuilding; `new` revalidates the result.
    pub fn into_parts(self) -> (Vec<usize>, Vec<Layer>) {
        (self.input_blocks, self.layers)
    }
}

fn plain_out_width(spec: &LayerSpec, in_width: usize, idx: usize) -> Result<usize> {
    match spec {
        LayerSpec::DenseActivated { weights, .. } => {
            if weights.cols() != in_width + 1 {
                return Err(Error::Network(format!(
                    "dense layer {idx}: input width {in_width} needs {} columns (bias included), got {}",
                    in_width + 1,
                    weights.cols()
                )));
            }
            Ok(weights.rows())
        }
        LayerSpec::LinearOnly { weights, bias } => {
            let need = in_width + usize::from(*bias);
            if weights.cols() != need {
                return Err(Error::Network(format!(
                    "linear layer {idx}: input width {in_width} needs {need} columns, got {}",
                    weights.cols()
                )));
            }
            Ok(weights.rows())
        }
        LayerSpec::SharedWeight { kernel, stride, .. } => {
            if kernel.is_empty() || kernel.iter().any(|w| !w.is_finite()) {
                return Err(Error::Network(format!(
                    "shared-weight layer {idx}: kernel must be nonempty and finite"
                )));
            }
            if *stride == 0 {
                return Err(Error::Network(format!(
                    "shared-weight layer {idx}: stride must be positive"
                )));
            }
            if kernel.len() > in_width {
                return Err(Error::Network(format!(
                    "shared-weight layer {idx}: kernel of {} does not fit input width {in_width}",
                    kernel.len()
                )));
            }
            Ok((in_width - kernel.len()) / stride + 1)
        }
        LayerSpec::Residual { inner } => {
            if inner.input_arity() != in_width || inner.output_arity() != in_width {
                return Err(Error::Network(format!(
                    "residual layer {idx}: inner network maps {} -> {}, but the skip path has width {in_width}",
                    inner.input_arity(),
                    inner.output_arity()
                )));
            }
            Ok(in_width)
        }
        LayerSpec::RecurrentStep { .. } | LayerSpec::Combine { .. } => {
            unreachable!("handled by the caller")
        }
    }
}
