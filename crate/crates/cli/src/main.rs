//! `actnet`: compile sampled functions into small networks and work with
//! the result. Every subcommand is a thin adapter over the library; output
//! numbers use the shortest decimal form that parses back bit-exact.
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use actnet::{
    classify, compile_composite, compile_multivariate, compile_scalar_mode, convert_unit,
    count_composed_decomposed, count_symmetric, forward, forward_trace, invert_hard_layer,
    linearize_grid, permute_layer, reconstruct_function, solve_cover, split_first_type, train,
    uniform_partition, verify_equivalent, ActivationKind, ActivationUnit, CoverAssign, Dataset,
    LayerInput, LayerSpec, NetworkSpec, Partition, SmoothMode, TrainConfig, WeightMat,
};
use actnet_cli::config::{self, Defaults};
use actnet_cli::document::{self, show};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

type AnyError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "actnet", version, about = "Compile functions into networks and back")]
struct Cli {
    /// key=value defaults file (else $ACTNET_CONFIG if set).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a built-in target or sampled values into a network document.
    Compile(CompileArgs),
    /// Chain several compiled stages, innermost first.
    CompileComposite(CompositeArgs),
    /// Compile tabulated grid samples behind a mixing input layer.
    CompileGrid(GridArgs),
    /// Run a network document on one input.
    Eval(EvalArgs),
    /// Emit per-layer unit values as CSV.
    Trace(TraceArgs),
    /// Read the unit bands (or the whole curve) back from the weights.
    Invert(InvertArgs),
    /// Count equivalent weight arrangements.
    Enumerate(EnumerateArgs),
    /// Rewrite a network without changing its function.
    Transform(TransformArgs),
    /// Compare two network documents over an interval.
    Verify(VerifyArgs),
    /// Move a network's hidden units to another activation family.
    Convert(ConvertArgs),
    /// Name a document's structural class.
    Classify(ClassifyArgs),
    /// Fit a one-hidden-layer network to samples.
    Train(TrainArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Hard,
    Relu,
    Sigmoid,
    Tanh,
}

impl From<KindArg> for ActivationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Hard => ActivationKind::HardLinear,
            KindArg::Relu => ActivationKind::Relu,
            KindArg::Sigmoid => ActivationKind::Sigmoid,
            KindArg::Tanh => ActivationKind::Tanh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnchorArg {
    /// Match the chord height over each interval (default).
    HeightMatched,
    /// Anchor the band edges on the knots instead.
    KnotAnchored,
}

impl From<AnchorArg> for SmoothMode {
    fn from(m: AnchorArg) -> Self {
        match m {
            AnchorArg::HeightMatched => SmoothMode::HeightMatched,
            AnchorArg::KnotAnchored => SmoothMode::KnotAnchored,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageArg {
    Pre,
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhatArg {
    Symmetric,
    Composed,
}

#[derive(clap::Args)]
struct CompileArgs {
    /// Built-in target: identity, abs, square, cube, sin, exp, relu.
    #[arg(
        long = "fn",
        value_name = "NAME",
        conflicts_with = "samples",
        requires = "domain",
        requires = "knots"
    )]
    function: Option<String>,
    /// Sampled target: x,y CSV with strictly increasing x.
    #[arg(
        long,
        value_name = "FILE",
        required_unless_present = "function",
        conflicts_with = "domain",
        conflicts_with = "knots"
    )]
    samples: Option<PathBuf>,
    /// Compilation interval for a built-in target.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    domain: Vec<f64>,
    /// Uniform knot count over the domain (at least 2).
    #[arg(long, value_name = "N")]
    knots: Option<usize>,
    /// Activation family of the hidden layer.
    #[arg(long, value_enum, default_value_t = KindArg::Hard)]
    activation: KindArg,
    /// Placement rule for smooth activation families.
    #[arg(long, value_enum, default_value_t = AnchorArg::HeightMatched)]
    mode: AnchorArg,
    /// Network document destination (stdout if omitted).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CompositeArgs {
    /// Stage samples (x,y CSV), repeated innermost first.
    #[arg(long = "stage", value_name = "FILE", required = true)]
    stages: Vec<PathBuf>,
    /// One activation for all stages, or one per stage in order.
    #[arg(long, value_enum)]
    activation: Vec<KindArg>,
    /// Network document destination (stdout if omitted).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GridArgs {
    /// Grid samples: CSV with header i0,...,iK,y and one row per point.
    #[arg(long, value_name = "FILE")]
    samples: PathBuf,
    /// Points per axis, e.g. 3,4 for a 3-by-4 grid.
    #[arg(long, value_delimiter = ',', required = true, value_name = "N,N,...")]
    extents: Vec<usize>,
    /// Activation family of the hidden layer.
    #[arg(long, value_enum, default_value_t = KindArg::Hard)]
    activation: KindArg,
    /// Network document destination (stdout if omitted).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Network document.
    net: PathBuf,
    /// Input values, one per slot (repeat or comma-separate).
    #[arg(long = "x", value_name = "V", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    x: Vec<f64>,
}

#[derive(clap::Args)]
struct TraceArgs {
    /// Network document.
    net: PathBuf,
    /// Input values, one per slot (repeat or comma-separate).
    #[arg(long = "x", value_name = "V", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    x: Vec<f64>,
    /// Report values before or after each layer's activation.
    #[arg(long, value_enum, default_value_t = StageArg::Post)]
    stage: StageArg,
}

#[derive(clap::Args)]
struct InvertArgs {
    /// Network document.
    net: PathBuf,
    /// Emit the reconstructed function as x,y rows at its breakpoints.
    #[arg(long, requires = "domain")]
    curve: bool,
    /// Interval to reconstruct over.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], requires = "curve", allow_negative_numbers = true)]
    domain: Vec<f64>,
    /// Sample count when no exact piecewise read-back exists.
    #[arg(long, value_name = "N")]
    resolution: Option<usize>,
}

#[derive(clap::Args)]
struct EnumerateArgs {
    /// Network document.
    net: PathBuf,
    /// Which family of equivalent arrangements to count.
    #[arg(long, value_enum)]
    what: WhatArg,
}

#[derive(clap::Args)]
#[command(group(ArgGroup::new("op").required(true).args(["permute", "split", "cover"])))]
struct TransformArgs {
    /// Network document; with --cover, x,y samples of the target instead.
    input: PathBuf,
    /// LAYER:P0,P1,... gives the new unit order for one hidden layer.
    #[arg(long, value_name = "LAYER:PERM")]
    permute: Option<String>,
    /// LAYER:UNIT:N splits one unit into n equal shares.
    #[arg(long, value_name = "LAYER:UNIT:N")]
    split: Option<String>,
    /// A-B,A-B,... lists per-unit interval ranges covering every interval.
    #[arg(long, value_name = "RANGES")]
    cover: Option<String>,
    /// Network document destination (stdout if omitted).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// First network document.
    a: PathBuf,
    /// Second network document.
    b: PathBuf,
    /// Comparison interval.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], required = true, allow_negative_numbers = true)]
    domain: Vec<f64>,
    /// Uniform grid size (kinks are always added).
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Maximum deviation still reported as equivalent.
    #[arg(long, value_name = "T", allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(clap::Args)]
struct ConvertArgs {
    /// Network document in the two-layer unit form.
    net: PathBuf,
    /// Target activation family.
    #[arg(long, value_enum)]
    to: KindArg,
    /// Network document destination (stdout if omitted).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ClassifyArgs {
    /// Network document.
    net: PathBuf,
}

#[derive(clap::Args)]
struct TrainArgs {
    /// Training samples as x,y CSV.
    #[arg(long, value_name = "FILE")]
    samples: PathBuf,
    /// Hidden unit count.
    #[arg(long, value_name = "N")]
    width: usize,
    /// Activation family of the hidden layer.
    #[arg(long, value_enum, default_value_t = KindArg::Relu)]
    activation: KindArg,
    /// Gradient-descent epochs (full batch).
    #[arg(long, default_value_t = 1000, value_name = "N")]
    epochs: usize,
    /// Step size.
    #[arg(long, default_value_t = 0.1, value_name = "X", allow_negative_numbers = true)]
    lr: f64,
    /// Weight initialization seed.
    #[arg(long, default_value_t = 0, value_name = "N")]
    seed: u64,
    /// Where the fitted network document lands.
    #[arg(short, long, value_name = "FILE")]
    output: PathBuf,
    /// Optional epoch,loss CSV of the whole run.
    #[arg(long, value_name = "FILE")]
    history: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        // a closed pipe downstream (e.g. | head) is not a failure
        if let Some(io) = e.downcast_ref::<io::Error>() {
            if io.kind() == io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), AnyError> {
    let defaults = config::load(cli.config.as_deref())?;
    match cli.cmd {
        Cmd::Compile(args) => run_compile(args),
        Cmd::CompileComposite(args) => run_composite(args),
        Cmd::CompileGrid(args) => run_grid(args),
        Cmd::Eval(args) => run_eval(args),
        Cmd::Trace(args) => run_trace(args),
        Cmd::Invert(args) => run_invert(args, &defaults),
        Cmd::Enumerate(args) => run_enumerate(args),
        Cmd::Transform(args) => run_transform(args),
        Cmd::Verify(args) => run_verify(args, &defaults),
        Cmd::Convert(args) => run_convert(args),
        Cmd::Classify(args) => run_classify(args),
        Cmd::Train(args) => run_train(args),
    }
}

fn builtin(name: &str) -> Option<fn(f64) -> f64> {
    Some(match name {
        "identity" => |x| x,
        "abs" => f64::abs,
        "square" => |x| x * x,
        "cube" => |x| x * x * x,
        "sin" => f64::sin,
        "exp" => f64::exp,
        "relu" => |x: f64| x.max(0.0),
        _ => return None,
    })
}

fn read_samples(path: &Path) -> Result<Dataset, AnyError> {
    let file = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Dataset::read_csv(file)?)
}

fn partition_from_samples(path: &Path) -> Result<Partition, AnyError> {
    let data = read_samples(path)?;
    Ok(Partition::new(data.xs().to_vec(), data.ys().to_vec())?)
}

fn load_network(path: &Path) -> Result<NetworkSpec, AnyError> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    document::from_json(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn emit_network(net: &NetworkSpec, out: Option<&Path>) -> Result<(), AnyError> {
    let text = document::to_json(net)?;
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_compile(args: CompileArgs) -> Result<(), AnyError> {
    let p = match (&args.function, &args.samples) {
        (Some(name), None) => {
            let f = builtin(name).ok_or_else(|| {
                format!(
                    "unknown built-in '{name}'; expected identity, abs, square, cube, sin, exp, or relu"
                )
            })?;
            let knots = args.knots.expect("grammar ties --knots to --fn");
            uniform_partition(args.domain[0], args.domain[1], knots, f)?
        }
        (None, Some(path)) => partition_from_samples(path)?,
        _ => unreachable!("grammar admits exactly one target source"),
    };
    let net = compile_scalar_mode(&p, args.activation.into(), args.mode.into());
    emit_network(&net, args.output.as_deref())
}

fn run_composite(args: CompositeArgs) -> Result<(), AnyError> {
    let kinds: Vec<ActivationKind> = match args.activation.len() {
        0 => vec![ActivationKind::HardLinear; args.stages.len()],
        1 => vec![args.activation[0].into(); args.stages.len()],
        n if n == args.stages.len() => args.activation.iter().map(|&k| k.into()).collect(),
        n => {
            return Err(format!(
                "{n} activations for {} stages; give one, or one per stage",
                args.stages.len()
            )
            .into())
        }
    };
    let stages = args
        .stages
        .iter()
        .zip(kinds)
        .map(|(path, kind)| Ok((partition_from_samples(path)?, kind)))
        .collect::<Result<Vec<_>, AnyError>>()?;
    let net = compile_composite(&stages)?;
    emit_network(&net, args.output.as_deref())
}

fn read_grid(path: &Path, dims: usize) -> Result<BTreeMap<Vec<usize>, f64>, AnyError> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines().enumerate();
    let header: String = (0..dims).map(|i| format!("i{i},")).collect::<String>() + "y";
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => return Err(format!("grid file must start with the header '{header}'").into()),
    }
    let mut samples = BTreeMap::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dims + 1 {
            return Err(format!("line {}: expected {} fields", idx + 1, dims + 1).into());
        }
        let point = fields[..dims]
            .iter()
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| format!("line {}: coordinates must be non-negative integers", idx + 1))?;
        let value = fields[dims]
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("line {}: '{}' is not a number", idx + 1, fields[dims]))?;
        if samples.insert(point, value).is_some() {
            return Err(format!("line {}: repeated grid point", idx + 1).into());
        }
    }
    Ok(samples)
}

fn run_grid(args: GridArgs) -> Result<(), AnyError> {
    let samples = read_grid(&args.samples, args.extents.len())?;
    let lin = linearize_grid(&args.extents)?;
    let net = compile_multivariate(&samples, &lin, args.activation.into())?;
    emit_network(&net, args.output.as_deref())
}

fn run_eval(args: EvalArgs) -> Result<(), AnyError> {
    let net = load_network(&args.net)?;
    let mut out = io::stdout().lock();
    for v in forward(&net, &args.x)? {
        writeln!(out, "{}", show(v))?;
    }
    Ok(())
}

fn run_trace(args: TraceArgs) -> Result<(), AnyError> {
    let net = load_network(&args.net)?;
    let (_, traces) = forward_trace(&net, &args.x)?;
    let xcol = args
        .x
        .iter()
        .map(|&v| show(v))
        .collect::<Vec<_>>()
        .join(";");
    let mut out = io::stdout().lock();
    writeln!(out, "x,layer,unit,value")?;
    for t in &traces {
        let values = match args.stage {
            StageArg::Pre => &t.pre,
            StageArg::Post => &t.post,
        };
        for (unit, &v) in values.iter().enumerate() {
            writeln!(out, "{xcol},{},{unit},{}", t.index, show(v))?;
        }
    }
    Ok(())
}

fn hard_layer_parts(net: &NetworkSpec) -> Result<(&WeightMat, Vec<f64>, ActivationKind), AnyError> {
    let layers = net.layers();
    if layers.len() == 2 {
        if let (
            LayerSpec::DenseActivated { weights, kind },
            LayerSpec::LinearOnly { weights: out, .. },
        ) = (&layers[0].spec, &layers[1].spec)
        {
            if layers[1].input == LayerInput::Previous && out.rows() == 1 {
                return Ok((weights, out.row(0).to_vec(), *kind));
            }
        }
    }
    Err("expected a two-layer network: one activated unit layer under one output row".into())
}

fn run_invert(args: InvertArgs, defaults: &Defaults) -> Result<(), AnyError> {
    let net = load_network(&args.net)?;
    let mut out = io::stdout().lock();
    if args.curve {
        let resolution = args.resolution.unwrap_or(defaults.resolution);
        let curve = reconstruct_function(&net, (args.domain[0], args.domain[1]), resolution)?;
        writeln!(out, "x,y")?;
        for (x, y) in curve.breakpoints().iter().zip(curve.values()) {
            writeln!(out, "{},{}", show(*x), show(y))?;
        }
    } else {
        let (w1, out_row, kind) = hard_layer_parts(&net)?;
        writeln!(out, "band_lo,band_hi,slope,height")?;
        for u in invert_hard_layer(w1, &out_row, kind)? {
            writeln!(
                out,
                "{},{},{},{}",
                show(u.band_lo),
                show(u.band_hi),
                show(u.slope),
                show(u.height)
            )?;
        }
    }
    Ok(())
}

fn run_enumerate(args: EnumerateArgs) -> Result<(), AnyError> {
    let net = load_network(&args.net)?;
    let count = match args.what {
        WhatArg::Symmetric => count_symmetric(&net),
        WhatArg::Composed => count_composed_decomposed(&net),
    };
    writeln!(io::stdout().lock(), "{count}")?;
    Ok(())
}

fn parse_permute(text: &str) -> Result<(usize, Vec<usize>), AnyError> {
    let (layer, order) = text
        .split_once(':')
        .ok_or("expected LAYER:P0,P1,... (e.g. 0:2,0,1)")?;
    let layer = layer.trim().parse::<usize>()?;
    let perm = order
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok((layer, perm))
}

fn parse_split(text: &str) -> Result<(usize, usize, usize), AnyError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err("expected LAYER:UNIT:N (e.g. 0:1:3)".into());
    }
    Ok((
        parts[0].trim().parse()?,
        parts[1].trim().parse()?,
        parts[2].trim().parse()?,
    ))
}

fn parse_cover(text: &str) -> Result<Vec<(usize, usize)>, AnyError> {
    text.split(',')
        .map(|item| {
            let (a, b) = item
                .trim()
                .split_once('-')
                .ok_or("expected A-B,A-B,... (e.g. 0-1,1-2,2-2)")?;
            Ok((a.trim().parse::<usize>()?, b.trim().parse::<usize>()?))
        })
        .collect()
}

fn run_transform(args: TransformArgs) -> Result<(), AnyError> {
    let out = if let Some(text) = &args.permute {
        let (layer, perm) = parse_permute(text)?;
        permute_layer(&load_network(&args.input)?, layer, &perm)?
    } else if let Some(text) = &args.split {
        let (layer, unit, n) = parse_split(text)?;
        split_first_type(&load_network(&args.input)?, layer, unit, n)?
    } else {
        let ranges = parse_cover(args.cover.as_deref().expect("grammar requires one op"))?;
        let p = partition_from_samples(&args.input)?;
        solve_cover(&p, &CoverAssign::new(ranges)?)?
    };
    emit_network(&out, args.output.as_deref())
}

fn run_verify(args: VerifyArgs, defaults: &Defaults) -> Result<(), AnyError> {
    let a = load_network(&args.a)?;
    let b = load_network(&args.b)?;
    let report = verify_equivalent(
        &a,
        &b,
        (args.domain[0], args.domain[1]),
        args.samples.unwrap_or(defaults.samples),
        args.tol.unwrap_or(defaults.tol),
    )?;
    let mut out = io::stdout().lock();
    writeln!(out, "max_deviation {}", show(report.max_deviation))?;
    writeln!(out, "samples {}", report.samples)?;
    writeln!(out, "tolerance {}", show(report.tolerance))?;
    writeln!(out, "equivalent {}", report.equivalent)?;
    Ok(())
}

fn run_convert(args: ConvertArgs) -> Result<(), AnyError> {
    let net = load_network(&args.net)?;
    let (w1, out_row, kind) = hard_layer_parts(&net)?;
    if w1.cols() != 2 {
        return Err("conversion needs scalar-input units (two weight columns)".into());
    }
    let n = w1.rows();
    let mut bias = match out_row.len() {
        len if len == n => 0.0,
        len if len == n + 1 => out_row[n],
        _ => return Err("output row length does not match the unit count".into()),
    };
    let target: ActivationKind = args.to.into();
    let mut rows = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        let unit = ActivationUnit::new(kind, w1.get(i, 0), w1.get(i, 1), out_row[i], 0.0)?;
        let moved = convert_unit(&unit, target)?;
        rows.push(vec![moved.k1(), moved.b()]);
        coeffs.push(moved.k2());
        bias += moved.l();
    }
    coeffs.push(bias);
    let net = NetworkSpec::scalar_chain(vec![
        LayerSpec::DenseActivated {
            weights: WeightMat::from_rows(rows)?,
            kind: target,
        },
        LayerSpec::LinearOnly {
            weights: WeightMat::from_rows(vec![coeffs])?,
            bias: true,
        },
    ])?;
    emit_network(&net, args.output.as_deref())
}

fn run_classify(args: ClassifyArgs) -> Result<(), AnyError> {
    writeln!(io::stdout().lock(), "{}", classify(&load_network(&args.net)?))?;
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<(), AnyError> {
    let data = read_samples(&args.samples)?;
    let cfg = TrainConfig {
        width: args.width,
        kind: args.activation.into(),
        epochs: args.epochs,
        learning_rate: args.lr,
        seed: args.seed,
    };
    let trained = train(&cfg, &data)?;
    if let Some(path) = &args.history {
        let mut text = String::from("epoch,loss\n");
        for (epoch, loss) in trained.loss.iter().enumerate() {
            text.push_str(&format!("{epoch},{}\n", show(*loss)));
        }
        fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    emit_network(&trained.network, Some(&args.output))?;
    writeln!(
        io::stdout().lock(),
        "{}",
        show(*trained.loss.last().expect("history is never empty"))
    )?;
    Ok(())
}
