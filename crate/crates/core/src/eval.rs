//! Forward evaluation and structural transforms.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::network::{
    ordered_dot, CombineMode, Layer, LayerInput, LayerSpec, NetworkSpec, WeightMat,
};

/// Affine stage and activated stage of one layer, in layer order.
///
/// For layers without an activation the two stages coincide; for residual
/// layers `pre` is the inner network's output and `post` includes the skip
/// term.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace {
    pub index: usize,
    pub pre: Vec<f64>,
    pub post: Vec<f64>,
}

/// Evaluates the network on a flat input (blocks concatenated in order).
pub fn forward(net: &NetworkSpec, inputs: &[f64]) -> Result<Vec<f64>> {
    run(net, inputs, &mut Vec::new())
}

/// Like [`forward`], also reporting both stages of every top-level layer.
pub fn forward_trace(net: &NetworkSpec, inputs: &[f64]) -> Result<(Vec<f64>, Vec<LayerTrace>)> {
    let mut traces = Vec::with_capacity(net.layers().len());
    let out = run(net, inputs, &mut traces)?;
    Ok((out, traces))
}

fn run(net: &NetworkSpec, inputs: &[f64], traces: &mut Vec<LayerTrace>) -> Result<Vec<f64>> {
    if inputs.len() != net.input_arity() {
        return Err(Error::ArityMismatch {
            expected: net.input_arity(),
            got: inputs.len(),
        });
    }
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut blocks = Vec::with_capacity(net.input_blocks().len());
    let mut at = 0;
    for &size in net.input_blocks() {
        blocks.push(&inputs[at..at + size]);
        at += size;
    }

    let mut cur: Option<Vec<f64>> = None;
    let mut pending: Vec<Vec<f64>> = Vec::new();
    for (idx, layer) in net.layers().iter().enumerate() {
        let (pre, post) = step(layer, &blocks, &mut cur, &mut pending)?;
        if post.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { layer: idx });
        }
        traces.push(LayerTrace {
            index: idx,
            pre,
            post: post.clone(),
        });
        cur = Some(post);
    }
    Ok(cur.expect("validated networks end with an output"))
}

fn step(
    layer: &Layer,
    blocks: &[&[f64]],
    cur: &mut Option<Vec<f64>>,
    pending: &mut Vec<Vec<f64>>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    match &layer.spec {
        LayerSpec::Combine { mode } => {
            let mut acc = cur.take().expect("validated combine has a tail branch");
            for branch in pending.drain(..) {
                for (a, b) in acc.iter_mut().zip(branch) {
                    match mode {
                        CombineMode::Sum => *a += b,
                        CombineMode::Product => *a *= b,
                    }
                }
            }
            Ok((acc.clone(), acc))
        }
        LayerSpec::RecurrentStep {
            state_weight,
            weights,
            kind,
        } => {
            let carried = cur.take().expect("validated step has carried state");
            let LayerInput::Block(k) = layer.input else {
                unreachable!("validated step consumes a block")
            };
            let fresh = blocks[k];
            let pre: Vec<f64> = carried
                .iter()
                .enumerate()
                .map(|(i, &s)| state_weight * s + ordered_dot(weights.row(i), fresh))
                .collect();
            let post = pre.iter().map(|&u| kind.apply(u)).collect();
            Ok((pre, post))
        }
        spec => {
            let input: Vec<f64> = match layer.input {
                LayerInput::Previous => cur.take().expect("validated chain has previous output"),
                LayerInput::Block(k) => {
                    if let Some(open) = cur.take() {
                        pending.push(open);
                    }
                    blocks[k].to_vec()
                }
            };
            match spec {
                LayerSpec::DenseActivated { weights, kind } => {
                    let pre = weights.apply(&input);
                    let post = pre.iter().map(|&u| kind.apply(u)).collect();
                    Ok((pre, post))
                }
                LayerSpec::LinearOnly { weights, .. } => {
                    let v = weights.apply(&input);
                    Ok((v.clone(), v))
                }
                LayerSpec::SharedWeight {
                    kernel,
                    stride,
                    kind,
                } => {
                    let n = (input.len() - kernel.len()) / stride + 1;
                    let pre: Vec<f64> = (0..n)
                        .map(|j| ordered_dot(kernel, &input[j * stride..j * stride + kernel.len()]))
                        .collect();
                    let post = match kind {
                        Some(k) => pre.iter().map(|&u| k.apply(u)).collect(),
                        None => pre.clone(),
                    };
                    Ok((pre, post))
                }
                LayerSpec::Residual { inner } => {
                    let pre = run(inner, &input, &mut Vec::new())?;
                    let post = pre.iter().zip(&input).map(|(a, b)| a + b).collect();
                    Ok((pre, post))
                }
                LayerSpec::RecurrentStep { .. } | LayerSpec::Combine { .. } => {
                    unreachable!("handled above")
                }
            }
        }
    }
}

/// Fuses every run of adjacent affine layers into one layer.
///
/// Composing rows `[B | b]` after `[A | a]` gives `[BA | Ba + b]`; the fused
/// layer keeps a bias column iff either factor had one. The function of the
/// network is unchanged up to float rounding in the product entries.
pub fn collapse_linear(net: &NetworkSpec) -> Result<NetworkSpec> {
    let (blocks, mut layers) = net.clone().into_parts();
    let mut i = 0;
    while i + 1 < layers.len() {
        let fusable = matches!(layers[i].spec, LayerSpec::LinearOnly { .. })
            && matches!(layers[i + 1].spec, LayerSpec::LinearOnly { .. })
            && layers[i + 1].input == LayerInput::Previous;
        if !fusable {
            i += 1;
            continue;
        }
        let second = layers.remove(i + 1);
        let first = layers.remove(i);
        let (fw, fb) = linear_parts(&first.spec);
        let (sw, sb) = linear_parts(&second.spec);
        let fused = compose_affine(fw, fb, sw, sb)?;
        layers.insert(
            i,
            Layer {
                spec: fused,
                input: first.input,
            },
        );
        // a fresh fusion may connect to the layer before it
        i = i.saturating_sub(1);
    }
    NetworkSpec::new(blocks, layers)
}

fn linear_parts(spec: &LayerSpec) -> (&WeightMat, bool) {
    match spec {
        LayerSpec::LinearOnly { weights, bias } => (weights, *bias),
        _ => unreachable!("caller checked"),
    }
}

fn compose_affine(a: &WeightMat, a_bias: bool, b: &WeightMat, b_bias: bool) -> Result<LayerSpec> {
    let in_width = a.cols() - usize::from(a_bias);
    let bias = a_bias || b_bias;
    let out_cols = in_width + usize::from(bias);
    let mut data = Vec::with_capacity(b.rows() * out_cols);
    for r in 0..b.rows() {
        for j in 0..in_width {
            let mut acc = 0.0;
            for k in 0..a.rows() {
                acc += b.get(r, k) * a.get(k, j);
            }
            data.push(acc);
        }
        if bias {
            let mut acc = if b_bias { b.get(r, a.rows()) } else { 0.0 };
            if a_bias {
                for k in 0..a.rows() {
                    acc += b.get(r, k) * a.get(k, in_width);
                }
            }
            data.push(acc);
        }
    }
    Ok(LayerSpec::LinearOnly {
        weights: WeightMat::new(b.rows(), out_cols, data)?,
        bias,
    })
}

/// Rewrites every shared-weight layer as the banded dense layer it
/// abbreviates: row `j` carries the kernel at offset `j * stride` and zeros
/// elsewhere.
pub fn conv_to_dense(net: &NetworkSpec) -> Result<NetworkSpec> {
    let widths = in_widths(net);
    let (blocks, layers) = net.clone().into_parts();
    let rebuilt = layers
        .into_iter()
        .zip(widths)
        .map(|(layer, in_width)| {
            let LayerSpec::SharedWeight {
                kernel,
                stride,
                kind,
            } = layer.spec
            else {
                return Ok(layer);
            };
            let n = (in_width - kernel.len()) / stride + 1;
            let cols = in_width + usize::from(kind.is_some());
            let mut data = vec![0.0; n * cols];
            for j in 0..n {
                for (t, &w) in kernel.iter().enumerate() {
                    data[j * cols + j * stride + t] = w;
                }
            }
            let weights = WeightMat::new(n, cols, data)?;
            let spec = match kind {
                Some(kind) => LayerSpec::DenseActivated { weights, kind },
                None => LayerSpec::LinearOnly {
                    weights,
                    bias: false,
                },
            };
            Ok(Layer {
                spec,
                input: layer.input,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkSpec::new(blocks, rebuilt)
}

/// Resolved fresh-input width of every layer, in order. For recurrent steps
/// this is the block width; for combine it is the branch arity.
fn in_widths(net: &NetworkSpec) -> Vec<usize> {
    let mut cur: Option<usize> = None;
    let mut widths = Vec::with_capacity(net.layers().len());
    for layer in net.layers() {
        let (iw, ow) = match &layer.spec {
            LayerSpec::Combine { .. } => {
                let w = cur.expect("validated");
                (w, w)
            }
            LayerSpec::RecurrentStep { weights, .. } => (weights.cols(), cur.expect("validated")),
            spec => {
                let iw = match layer.input {
                    LayerInput::Previous => cur.expect("validated"),
                    LayerInput::Block(k) => net.input_blocks()[k],
                };
                let ow = match spec {
                    LayerSpec::DenseActivated { weights, .. } => weights.rows(),
                    LayerSpec::LinearOnly { weights, .. } => weights.rows(),
                    LayerSpec::SharedWeight { kernel, stride, .. } => {
                        (iw - kernel.len()) / stride + 1
                    }
                    LayerSpec::Residual { .. } => iw,
                    _ => unreachable!(),
                };
                (iw, ow)
            }
        };
        widths.push(iw);
        cur = Some(ow);
    }
    widths
}

/// Whether inputs can reach the output only through linear mixing
/// (`Linear`) or interact multiplicatively as well (`Nonlinear`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetKind {
    Linear,
    Nonlinear,
}

/// How many variables the network genuinely couples.
///
/// Pseudo-multivariate nets take several inputs but mix them only before
/// the first activation, so a change of coordinates reduces them to a
/// univariate net. Multivariate nets feed inputs in below at least one
/// activation (recurrent steps past the first activated layer, or residual
/// skips).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarScope {
    Univariate,
    PseudoMultivariate,
    Multivariate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub scope: VarScope,
    pub kind: NetKind,
}

impl std::fmt::Display for VarScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VarScope::Univariate => "univariate",
            VarScope::PseudoMultivariate => "pseudo-multivariate",
            VarScope::Multivariate => "multivariate",
        })
    }
}

impl std::fmt::Display for NetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NetKind::Linear => "linear",
            NetKind::Nonlinear => "nonlinear",
        })
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.scope, self.kind)
    }
}

pub fn classify(net: &NetworkSpec) -> Classification {
    let mut depth = 0usize;
    let mut deep_feed = false;
    for layer in net.layers() {
        match (&layer.spec, layer.input) {
            (LayerSpec::Combine { .. }, _) => {}
            (LayerSpec::RecurrentStep { .. }, _) => {
                // the fresh block enters at the current chain depth
                if depth >= 1 {
                    deep_feed = true;
                }
                depth += 1;
            }
            (spec, LayerInput::Block(_)) => {
                depth = usize::from(spec.is_activated());
            }
            (spec, LayerInput::Previous) => {
                if spec.is_activated() {
                    depth += 1;
                }
            }
        }
    }
    let scope = if deep_feed || has_residual(net) {
        VarScope::Multivariate
    } else if net.input_arity() > 1 {
        VarScope::PseudoMultivariate
    } else {
        VarScope::Univariate
    };
    let kind = if has_product(net) {
        NetKind::Nonlinear
    } else {
        NetKind::Linear
    };
    Classification { scope, kind }
}

fn has_residual(net: &NetworkSpec) -> bool {
    net.layers()
        .iter()
        .any(|l| matches!(l.spec, LayerSpec::Residual { .. }))
}

fn has_product(net: &NetworkSpec) -> bool {
    net.layers().iter().any(|l| match &l.spec {
        LayerSpec::Combine { mode } => *mode == CombineMode::Product,
        LayerSpec::Residual { inner } => has_product(inner),
        _ => false,
    })
}

/// Number of distinct input-to-output weight paths through the affine-only
/// runs of the network.
///
/// Within a maximal run of adjacent affine layers a path picks one unit at
/// every boundary, so the run contributes its entry width times the product
/// of its layer widths. Activated layers cut runs apart, and contributions
/// of separate runs multiply.
pub fn linear_path_count(net: &NetworkSpec) -> BigUint {
    let widths = in_widths(net);
    let mut total = BigUint::one();
    let mut run: Option<BigUint> = None;
    let close = |run: &mut Option<BigUint>, total: &mut BigUint| {
        if let Some(r) = run.take() {
            *total *= r;
        }
    };
    for (layer, in_width) in net.layers().iter().zip(widths) {
        match &layer.spec {
            LayerSpec::LinearOnly { weights, .. } => {
                if layer.input != LayerInput::Previous {
                    close(&mut run, &mut total);
                }
                let grown = match run.take() {
                    Some(r) => r * weights.rows(),
                    None => BigUint::from(in_width) * weights.rows(),
                };
                run = Some(grown);
            }
            _ => close(&mut run, &mut total),
        }
    }
    close(&mut run, &mut total);
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::{unit_eval, ActivationKind, ActivationUnit};
    use crate::rng::XorShift64Star;
    use proptest::prelude::*;

    fn dense(rows: Vec<Vec<f64>>, kind: ActivationKind) -> LayerSpec {
        LayerSpec::DenseActivated {
            weights: WeightMat::from_rows(rows).unwrap(),
            kind,
        }
    }

    fn linear(rows: Vec<Vec<f64>>, bias: bool) -> LayerSpec {
        LayerSpec::LinearOnly {
            weights: WeightMat::from_rows(rows).unwrap(),
            bias,
        }
    }

    #[test]
    fn forward_matches_a_single_unit() {
        // k2 * act(k1 x + b) + l, spelled as dense + affine output
        let unit = ActivationUnit::new(ActivationKind::HardLinear, 2.0, -0.5, 3.0, 0.25).unwrap();
        let net = NetworkSpec::scalar_chain(vec![
            dense(vec![vec![2.0, -0.5]], ActivationKind::HardLinear),
            linear(vec![vec![3.0, 0.25]], true),
        ])
        .unwrap();
        for i in 0..100 {
            let x = -1.0 + 0.025 * i as f64;
            let got = forward(&net, &[x]).unwrap()[0];
            assert_eq!(got, unit_eval(&unit, x));
        }
    }

    #[test]
    fn forward_checks_arity_and_finiteness() {
        let net = NetworkSpec::scalar_chain(vec![linear(vec![vec![1.0]], false)]).unwrap();
        assert!(matches!(
            forward(&net, &[1.0, 2.0]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            forward(&net, &[f64::NAN]),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn combine_sum_and_product() {
        let build = |mode| {
            NetworkSpec::new(
                vec![1, 1],
                vec![
                    Layer::from_block(linear(vec![vec![2.0]], false), 0),
                    Layer::from_block(linear(vec![vec![3.0]], false), 1),
                    Layer::chained(LayerSpec::Combine { mode }),
                ],
            )
            .unwrap()
        };
        assert_eq!(
            forward(&build(CombineMode::Sum), &[5.0, 7.0]).unwrap(),
            vec![31.0]
        );
        assert_eq!(
            forward(&build(CombineMode::Product), &[5.0, 7.0]).unwrap(),
            vec![210.0]
        );
    }

    #[test]
    fn recurrent_step_unrolls_by_hand() {
        // state' = relu(0.5 * state + 2 * fresh)
        let step = |sw| LayerSpec::RecurrentStep {
            state_weight: sw,
            weights: WeightMat::from_rows(vec![vec![2.0]]).unwrap(),
            kind: ActivationKind::Relu,
        };
        let net = NetworkSpec::new(
            vec![1, 1, 1],
            vec![
                Layer::from_block(linear(vec![vec![1.0]], false), 0),
                Layer::from_block(step(0.5), 1),
                Layer::from_block(step(0.5), 2),
            ],
        )
        .unwrap();
        // s0 = 3, s1 = relu(1.5 + 2) = 3.5, s2 = relu(1.75 - 4) = 0
        assert_eq!(forward(&net, &[3.0, 1.0, -2.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn residual_adds_the_skip_path() {
        let inner = NetworkSpec::scalar_chain(vec![
            dense(vec![vec![1.0, 0.0]], ActivationKind::Relu),
            linear(vec![vec![-1.0, 0.0]], true),
        ])
        .unwrap();
        let net = NetworkSpec::new(
            vec![1],
            vec![Layer::from_block(
                LayerSpec::Residual {
                    inner: Box::new(inner),
                },
                0,
            )],
        )
        .unwrap();
        // x - relu(x): identity below zero, zero above
        assert_eq!(forward(&net, &[-2.0]).unwrap(), vec![-2.0]);
        assert_eq!(forward(&net, &[3.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn trace_reports_both_stages() {
        let net = NetworkSpec::scalar_chain(vec![
            dense(vec![vec![1.0, -1.0]], ActivationKind::Relu),
            linear(vec![vec![2.0, 1.0]], true),
        ])
        .unwrap();
        let (out, traces) = forward_trace(&net, &[0.25]).unwrap();
        assert_eq!(traces.len(), 2);
        assert_eq!(traces[0].pre, vec![-0.75]);
        assert_eq!(traces[0].post, vec![0.0]);
        assert_eq!(traces[1].pre, traces[1].post);
        assert_eq!(out, vec![1.0]);
    }

    #[test]
    fn collapse_fuses_affine_runs() {
        let net = NetworkSpec::scalar_chain(vec![
            linear(vec![vec![2.0, 1.0], vec![-1.0, 0.5]], true),
            linear(vec![vec![1.0, 1.0]], false),
            linear(vec![vec![3.0, -2.0]], true),
        ])
        .unwrap();
        let flat = collapse_linear(&net).unwrap();
        assert_eq!(flat.layers().len(), 1);
        for i in 0..50 {
            let x = -2.0 + 0.08 * i as f64;
            let a = forward(&net, &[x]).unwrap()[0];
            let b = forward(&flat, &[x]).unwrap()[0];
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn collapse_keeps_bias_only_when_present() {
        let net = NetworkSpec::scalar_chain(vec![
            linear(vec![vec![2.0], vec![-1.0]], false),
            linear(vec![vec![1.0, 1.0]], false),
        ])
        .unwrap();
        let flat = collapse_linear(&net).unwrap();
        match &flat.layers()[0].spec {
            LayerSpec::LinearOnly { weights, bias } => {
                assert!(!bias);
                assert_eq!(weights.cols(), 1);
                assert_eq!(weights.get(0, 0), 1.0);
            }
            other => panic!("expected affine layer, got {other:?}"),
        }
    }

    #[test]
    fn collapse_leaves_activated_layers_alone() {
        let net = NetworkSpec::scalar_chain(vec![
            linear(vec![vec![2.0]], false),
            dense(vec![vec![1.0, 0.0]], ActivationKind::Relu),
            linear(vec![vec![1.0]], false),
        ])
        .unwrap();
        let same = collapse_linear(&net).unwrap();
        assert_eq!(same.layers().len(), 3);
    }

    #[test]
    fn conv_expands_to_banded_rows() {
        let conv = LayerSpec::SharedWeight {
            kernel: vec![1.0, -2.0],
            stride: 1,
            kind: None,
        };
        let net = NetworkSpec::new(vec![3], vec![Layer::from_block(conv, 0)]).unwrap();
        let dense_net = conv_to_dense(&net).unwrap();
        match &dense_net.layers()[0].spec {
            LayerSpec::LinearOnly { weights, bias } => {
                assert!(!bias);
                assert_eq!(weights.row(0), &[1.0, -2.0, 0.0]);
                assert_eq!(weights.row(1), &[0.0, 1.0, -2.0]);
            }
            other => panic!("expected affine expansion, got {other:?}"),
        }
        for input in [[1.0, 2.0, 3.0], [-0.5, 0.25, 4.0]] {
            let a = forward(&net, &input).unwrap();
            let b = forward(&dense_net, &input).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn conv_with_activation_gains_a_zero_bias_column() {
        let conv = LayerSpec::SharedWeight {
            kernel: vec![0.5, 0.5],
            stride: 2,
            kind: Some(ActivationKind::Relu),
        };
        let net = NetworkSpec::new(vec![4], vec![Layer::from_block(conv, 0)]).unwrap();
        let dense_net = conv_to_dense(&net).unwrap();
        match &dense_net.layers()[0].spec {
            LayerSpec::DenseActivated { weights, .. } => {
                assert_eq!(weights.cols(), 5);
                assert_eq!(weights.row(0), &[0.5, 0.5, 0.0, 0.0, 0.0]);
                assert_eq!(weights.row(1), &[0.0, 0.0, 0.5, 0.5, 0.0]);
            }
            other => panic!("expected dense expansion, got {other:?}"),
        }
        let input = [1.0, 3.0, -4.0, 2.0];
        assert_eq!(
            forward(&net, &input).unwrap(),
            forward(&dense_net, &input).unwrap()
        );
    }

    #[test]
    fn classify_scalar_chain_is_univariate_linear() {
        let net = NetworkSpec::scalar_chain(vec![
            dense(vec![vec![1.0, 0.0]], ActivationKind::HardLinear),
            linear(vec![vec![1.0, 0.0]], true),
        ])
        .unwrap();
        let c = classify(&net);
        assert_eq!(c.scope, VarScope::Univariate);
        assert_eq!(c.kind, NetKind::Linear);
        assert_eq!(c.to_string(), "univariate linear");
    }

    #[test]
    fn classify_parallel_branches() {
        let branch = |scale: f64, block| {
            Layer::from_block(linear(vec![vec![scale]], false), block)
        };
        let sum = NetworkSpec::new(
            vec![1, 1],
            vec![
                branch(2.0, 0),
                branch(3.0, 1),
                Layer::chained(LayerSpec::Combine {
                    mode: CombineMode::Sum,
                }),
            ],
        )
        .unwrap();
        assert_eq!(classify(&sum).to_string(), "pseudo-multivariate linear");

        let product = NetworkSpec::new(
            vec![1, 1],
            vec![
                branch(2.0, 0),
                branch(3.0, 1),
                Layer::chained(LayerSpec::Combine {
                    mode: CombineMode::Product,
                }),
            ],
        )
        .unwrap();
        assert_eq!(classify(&product).to_string(), "pseudo-multivariate nonlinear");
    }

    #[test]
    fn classify_recurrent_depth() {
        let step = || LayerSpec::RecurrentStep {
            state_weight: 1.0,
            weights: WeightMat::from_rows(vec![vec![1.0]]).unwrap(),
            kind: ActivationKind::Tanh,
        };
        // fed straight after a plain affine layer: still shallow
        let shallow = NetworkSpec::new(
            vec![1, 1],
            vec![
                Layer::from_block(linear(vec![vec![1.0]], false), 0),
                Layer::from_block(step(), 1),
            ],
        )
        .unwrap();
        assert_eq!(classify(&shallow).scope, VarScope::PseudoMultivariate);

        // second step feeds below the first activation: genuinely coupled
        let deep = NetworkSpec::new(
            vec![1, 1, 1],
            vec![
                Layer::from_block(linear(vec![vec![1.0]], false), 0),
                Layer::from_block(step(), 1),
                Layer::from_block(step(), 2),
            ],
        )
        .unwrap();
        assert_eq!(classify(&deep).scope, VarScope::Multivariate);
    }

    #[test]
    fn classify_residual_is_multivariate() {
        let inner = NetworkSpec::scalar_chain(vec![linear(vec![vec![0.5]], false)]).unwrap();
        let net = NetworkSpec::new(
            vec![1],
            vec![Layer::from_block(
                LayerSpec::Residual {
                    inner: Box::new(inner),
                },
                0,
            )],
        )
        .unwrap();
        assert_eq!(classify(&net).to_string(), "multivariate linear");
    }

    #[test]
    fn path_count_multiplies_boundary_widths() {
        let chain = NetworkSpec::scalar_chain(vec![
            linear(vec![vec![1.0], vec![2.0]], false),
            linear(vec![vec![1.0, 1.0], vec![2.0, 2.0]], false),
            linear(vec![vec![1.0, 1.0], vec![2.0, 2.0]], false),
            linear(vec![vec![1.0, 1.0]], false),
        ])
        .unwrap();
        assert_eq!(linear_path_count(&chain), BigUint::from(8u32));
    }

    #[test]
    fn path_count_resets_across_activations() {
        let net = NetworkSpec::scalar_chain(vec![
            linear(vec![vec![1.0], vec![2.0]], false),
            dense(
                vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]],
                ActivationKind::Relu,
            ),
            linear(vec![vec![1.0, 1.0]], false),
        ])
        .unwrap();
        // run one: 1 * 2; run two: 2 * 1
        assert_eq!(linear_path_count(&net), BigUint::from(4u32));
    }

    proptest! {
        #[test]
        fn collapse_preserves_the_function(
            seed in 0u64..512,
            depth in 2usize..5,
        ) {
            let mut rng = XorShift64Star::new(seed);
            let mut specs = Vec::new();
            let mut width = 1usize;
            for _ in 0..depth {
                let rows = 1 + rng.index(3);
                let bias = rng.next_f64() < 0.5;
                let cols = width + usize::from(bias);
                let data: Vec<f64> = (0..rows * cols).map(|_| rng.symmetric()).collect();
                specs.push(LayerSpec::LinearOnly {
                    weights: WeightMat::new(rows, cols, data).unwrap(),
                    bias,
                });
                width = rows;
            }
            let net = NetworkSpec::scalar_chain(specs).unwrap();
            let flat = collapse_linear(&net).unwrap();
            prop_assert_eq!(flat.layers().len(), 1);
            for i in 0..20 {
                let x = -1.0 + 0.1 * i as f64;
                let a = forward(&net, &[x]).unwrap();
                let b = forward(&flat, &[x]).unwrap();
                for (u, v) in a.iter().zip(&b) {
                    prop_assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()));
                }
            }
        }
    }
}
