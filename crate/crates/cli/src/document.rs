//! Versioned JSON form of a network.
//!
//! Weights travel as decimal strings in shortest round-trip form, so a
//! parsed document carries bit-identical values on every platform. Unknown
//! fields are rejected; decoding runs the full network validation, so a
//! document that loads is a document that evaluates.

use actnet::{
    ActivationKind, CombineMode, Layer, LayerInput, LayerSpec, NetworkSpec, WeightMat,
};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

pub type DocError = Box<dyn std::error::Error>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub version: u32,
    pub input_blocks: Vec<usize>,
    pub layers: Vec<LayerDoc>,
}

/// A sub-network as it appears inside a residual layer: same shape as the
/// top-level document minus the version stamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDoc {
    pub input_blocks: Vec<usize>,
    pub layers: Vec<LayerDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    pub layer: SpecDoc,
    pub input: InputDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputDoc {
    Previous,
    Block(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecDoc {
    Dense {
        weights: MatrixDoc,
        activation: KindDoc,
    },
    Linear {
        weights: MatrixDoc,
        bias: bool,
    },
    Shared {
        kernel: Vec<String>,
        stride: usize,
        activation: Option<KindDoc>,
    },
    Recurrent {
        state_weight: String,
        weights: MatrixDoc,
        activation: KindDoc,
    },
    Residual {
        inner: Box<BodyDoc>,
    },
    Combine {
        mode: ModeDoc,
    },
}

/// Row-major weight data; `data` holds `rows * cols` decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindDoc {
    Hard,
    Relu,
    Sigmoid,
    Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeDoc {
    Sum,
    Product,
}

impl From<ActivationKind> for KindDoc {
    fn from(kind: ActivationKind) -> Self {
        match kind {
            ActivationKind::HardLinear => KindDoc::Hard,
            ActivationKind::Relu => KindDoc::Relu,
            ActivationKind::Sigmoid => KindDoc::Sigmoid,
            ActivationKind::Tanh => KindDoc::Tanh,
        }
    }
}

impl From<KindDoc> for ActivationKind {
    fn from(kind: KindDoc) -> Self {
        match kind {
            KindDoc::Hard => ActivationKind::HardLinear,
            KindDoc::Relu => ActivationKind::Relu,
            KindDoc::Sigmoid => ActivationKind::Sigmoid,
            KindDoc::Tanh => ActivationKind::Tanh,
        }
    }
}

/// Shortest decimal form that parses back to the same bits.
pub fn show(x: f64) -> String {
    format!("{x}")
}

fn parse_weight(s: &str) -> Result<f64, DocError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("'{s}' is not a number").into())
}

pub fn encode(net: &NetworkSpec) -> NetworkDocument {
    NetworkDocument {
        version: FORMAT_VERSION,
        input_blocks: net.input_blocks().to_vec(),
        layers: net.layers().iter().map(encode_layer).collect(),
    }
}

fn encode_layer(layer: &Layer) -> LayerDoc {
    LayerDoc {
        layer: encode_spec(&layer.spec),
        input: match layer.input {
            LayerInput::Previous => InputDoc::Previous,
            LayerInput::Block(k) => InputDoc::Block(k),
        },
    }
}

fn encode_matrix(m: &WeightMat) -> MatrixDoc {
    MatrixDoc {
        rows: m.rows(),
        cols: m.cols(),
        data: m.data().iter().copied().map(show).collect(),
    }
}

fn encode_spec(spec: &LayerSpec) -> SpecDoc {
    match spec {
        LayerSpec::DenseActivated { weights, kind } => SpecDoc::Dense {
            weights: encode_matrix(weights),
            activation: (*kind).into(),
        },
        LayerSpec::LinearOnly { weights, bias } => SpecDoc::Linear {
            weights: encode_matrix(weights),
            bias: *bias,
        },
        LayerSpec::SharedWeight {
            kernel,
            stride,
            kind,
        } => SpecDoc::Shared {
            kernel: kernel.iter().copied().map(show).collect(),
            stride: *stride,
            activation: kind.map(Into::into),
        },
        LayerSpec::RecurrentStep {
            state_weight,
            weights,
            kind,
        } => SpecDoc::Recurrent {
            state_weight: show(*state_weight),
            weights: encode_matrix(weights),
            activation: (*kind).into(),
        },
        LayerSpec::Residual { inner } => SpecDoc::Residual {
            inner: Box::new(BodyDoc {
                input_blocks: inner.input_blocks().to_vec(),
                layers: inner.layers().iter().map(encode_layer).collect(),
            }),
        },
        LayerSpec::Combine { mode } => SpecDoc::Combine {
            mode: match mode {
                CombineMode::Sum => ModeDoc::Sum,
                CombineMode::Product => ModeDoc::Product,
            },
        },
    }
}

pub fn decode(doc: &NetworkDocument) -> Result<NetworkSpec, DocError> {
    if doc.version != FORMAT_VERSION {
        return Err(format!(
            "unsupported document version {} (this build reads version {FORMAT_VERSION})",
            doc.version
        )
        .into());
    }
    decode_body(&doc.input_blocks, &doc.layers)
}

fn decode_body(input_blocks: &[usize], layers: &[LayerDoc]) -> Result<NetworkSpec, DocError> {
    let layers = layers
        .iter()
        .map(decode_layer)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NetworkSpec::new(input_blocks.to_vec(), layers)?)
}

fn decode_layer(doc: &LayerDoc) -> Result<Layer, DocError> {
    let input = match doc.input {
        InputDoc::Previous => LayerInput::Previous,
        InputDoc::Block(k) => LayerInput::Block(k),
    };
    let spec = decode_spec(&doc.layer)?;
    Ok(Layer { spec, input })
}

fn decode_matrix(m: &MatrixDoc) -> Result<WeightMat, DocError> {
    let data = m
        .data
        .iter()
        .map(|s| parse_weight(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightMat::new(m.rows, m.cols, data)?)
}

fn decode_spec(doc: &SpecDoc) -> Result<LayerSpec, DocError> {
    Ok(match doc {
        SpecDoc::Dense {
            weights,
            activation,
        } => LayerSpec::DenseActivated {
            weights: decode_matrix(weights)?,
            kind: (*activation).into(),
        },
        SpecDoc::Linear { weights, bias } => LayerSpec::LinearOnly {
            weights: decode_matrix(weights)?,
            bias: *bias,
        },
        SpecDoc::Shared {
            kernel,
            stride,
            activation,
        } => LayerSpec::SharedWeight {
            kernel: kernel
                .iter()
                .map(|s| parse_weight(s))
                .collect::<Result<Vec<_>, _>>()?,
            stride: *stride,
            kind: activation.map(Into::into),
        },
        SpecDoc::Recurrent {
            state_weight,
            weights,
            activation,
        } => LayerSpec::RecurrentStep {
            state_weight: parse_weight(state_weight)?,
            weights: decode_matrix(weights)?,
            kind: (*activation).into(),
        },
        SpecDoc::Residual { inner } => LayerSpec::Residual {
            inner: Box::new(decode_body(&inner.input_blocks, &inner.layers)?),
        },
        SpecDoc::Combine { mode } => LayerSpec::Combine {
            mode: match mode {
                ModeDoc::Sum => CombineMode::Sum,
                ModeDoc::Product => CombineMode::Product,
            },
        },
    })
}

pub fn to_json(net: &NetworkSpec) -> Result<String, DocError> {
    let mut text = serde_json::to_string_pretty(&encode(net))?;
    text.push('\n');
    Ok(text)
}

pub fn from_json(text: &str) -> Result<NetworkSpec, DocError> {
    let doc: NetworkDocument = serde_json::from_str(text)?;
    decode(&doc)
}
