//! Deterministic full-batch gradient descent on one-hidden-layer nets.
//!
//! Exists to show that training lands somewhere inside the equivalence
//! classes the rest of the crate constructs analytically: two seeds find
//! different weights for the same function, and inversion reads the
//! function back out regardless of where the weights came from. Full-batch
//! updates and a seeded generator make every run bit-reproducible.

use std::io::{BufRead, BufReader, Read, Write};

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::network::{LayerSpec, NetworkSpec, WeightMat};
use crate::partition::parse_field;
use crate::rng::XorShift64Star;

/// Hyperparameters for [`train`]. The loss is mean squared error, always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub width: usize,
    pub kind: ActivationKind,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

/// Scalar regression samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Dataset {
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        if xs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(&x) = xs.iter().chain(&ys).find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { x });
        }
        Ok(Self { xs, ys })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Reads the two-column `x,y` CSV format.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "x,y" => {}
            Some(Ok(h)) => {
                return Err(Error::Parse(format!("expected header 'x,y', got '{}'", h.trim())))
            }
            Some(Err(e)) => return Err(e.into()),
            None => return Err(Error::Parse("empty dataset file".into())),
        }
        let mut pairs = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let x = parse_field(cols.next(), lineno + 2)?;
            let y = parse_field(cols.next(), lineno + 2)?;
            if cols.next().is_some() {
                return Err(Error::Parse(format!("line {}: expected two columns", lineno + 2)));
            }
            pairs.push((x, y));
        }
        Self::new(pairs)
    }

    /// Writes the two-column `x,y` CSV format with round-trip-exact numbers.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "x,y")?;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            writeln!(writer, "{x},{y}")?;
        }
        Ok(())
    }
}

/// Weights of the trained shape: `y = sum c_i act(a_i x + b_i) + d`.
#[derive(Debug, Clone, PartialEq)]
struct Params {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl Params {
    /// Uniform in [-1, 1), drawn in a pinned order: (a_i, b_i) per unit,
    /// then all c_i, then d.
    fn init(width: usize, seed: u64) -> Self {
        let mut rng = XorShift64Star::new(seed);
        let mut a = Vec::with_capacity(width);
        let mut b = Vec::with_capacity(width);
        for _ in 0..width {
            a.push(rng.symmetric());
            b.push(rng.symmetric());
        }
        let c = (0..width).map(|_| rng.symmetric()).collect();
        let d = rng.symmetric();
        Self { a, b, c, d }
    }

    fn zeros(width: usize) -> Self {
        Self {
            a: vec![0.0; width],
            b: vec![0.0; width],
            c: vec![0.0; width],
            d: 0.0,
        }
    }
}

/// Mean squared error and its gradient, accumulated over the whole batch
/// in dataset order.
fn loss_and_grads(p: &Params, kind: ActivationKind, data: &Dataset) -> (f64, Params) {
    let width = p.a.len();
    let n = data.len() as f64;
    let mut grads = Params::zeros(width);
    let mut loss = 0.0;
    for (&x, &t) in data.xs.iter().zip(&data.ys) {
        let mut y = p.d;
        for i in 0..width {
            y += p.c[i] * kind.apply(p.a[i] * x + p.b[i]);
        }
        let e = y - t;
        loss += e * e;
        let g = 2.0 * e / n;
        for i in 0..width {
            let u = p.a[i] * x + p.b[i];
            grads.c[i] += g * kind.apply(u);
            let chain = g * p.c[i] * kind.derivative(u);
            grads.a[i] += chain * x;
            grads.b[i] += chain;
        }
        grads.d += g;
    }
    (loss / n, grads)
}

/// A trained network together with its loss history (initial loss first,
/// one entry per epoch after it).
#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub network: NetworkSpec,
    pub loss: Vec<f64>,
}

/// Full-batch gradient descent on MSE. The same config and dataset always
/// produce the same weights, bit for bit.
///
/// Hard-linear nets train poorly by design: the clamp's derivative is zero
/// outside its band and at its kinks, so only the output layer moves once
/// units saturate. Relu is the hard-kind of choice when training matters.
pub fn train(cfg: &TrainConfig, data: &Dataset) -> Result<Trained> {
    if cfg.width == 0 {
        return Err(Error::BadConfig("hidden width must be positive".into()));
    }
    if cfg.epochs == 0 {
        return Err(Error::BadConfig("epoch count must be positive".into()));
    }
    if !(cfg.learning_rate.is_finite() && cfg.learning_rate > 0.0) {
        return Err(Error::BadConfig("learning rate must be positive and finite".into()));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut p = Params::init(cfg.width, cfg.seed);
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    for epoch in 0..=cfg.epochs {
        let (loss, grads) = loss_and_grads(&p, cfg.kind, data);
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        history.push(loss);
        if epoch == cfg.epochs {
            break;
        }
        let lr = cfg.learning_rate;
        for i in 0..cfg.width {
            p.a[i] -= lr * grads.a[i];
            p.b[i] -= lr * grads.b[i];
            p.c[i] -= lr * grads.c[i];
        }
        p.d -= lr * grads.d;
    }

    let rows = (0..cfg.width).map(|i| vec![p.a[i], p.b[i]]).collect();
    let mut out = p.c;
    out.push(p.d);
    let network = NetworkSpec::scalar_chain(vec![
        LayerSpec::DenseActivated {
            weights: WeightMat::from_rows(rows)?,
            kind: cfg.kind,
        },
        LayerSpec::LinearOnly {
            weights: WeightMat::new(1, cfg.width + 1, out)?,
            bias: true,
        },
    ])?;
    Ok(Trained {
        network,
        loss: history,
    })
}
