//! Command-line entry point: dataset generation, training, cost-ratio
//! sweeps, and model evaluation as reproducible batch commands.
//!
//! Every command writes its artifacts plus a `manifest.json` that echoes
//! the full configuration, seed, tool version, and argv; re-running the
//! recorded argv reproduces every output byte for byte.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use newsvendor::data::{
    self, gen_synthetic_in_range, group_blocks, inject_outliers, load_csv, sample_blocks,
    table1_dataset, write_mask_csv, TABLE1_SEED,
};
use newsvendor::error::Error;
use newsvendor::experiments::{
    dump_predictions, robustness_report, run_sweep, test_err, write_dump_csv, write_sweep_csv,
    ModelSpec, SweepConfig, DEFAULT_CH,
};
use newsvendor::losses::{cost, CostPair, LossKind};
use newsvendor::models::AnyModel;
use newsvendor::optim::{train, write_trace_csv, OptimizerKind, TrainConfig};
use newsvendor::{Result, SeededRng};

/// Environment variable consulted when `--out` is not given.
const OUT_ENV: &str = "NEWSVENDOR_OUT";

const DEFAULT_SCALE: f64 = 1.0 / 66.0;

#[derive(Parser)]
#[command(
    name = "newsvendor",
    version,
    about = "Feature-based newsvendor ordering: data generation, training, sweeps, evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate dataset files.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Train one model and persist it with its loss trace.
    Train(TrainArgs),
    /// Run a cp/ch ratio sweep over one or both loss kinds.
    Sweep(SweepArgs),
    /// Evaluate saved models on a dataset.
    Eval(EvalArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Write the embedded two-week train/test datasets.
    Table1(Table1Args),
    /// Generate seeded synthetic days.
    Synthetic(SyntheticArgs),
    /// Resample whole blocks of identical-feature rows.
    Blocks(BlocksArgs),
    /// Scale large demands in a drawn subset of rows.
    Outliers(OutliersArgs),
}

#[derive(Args)]
struct OutArg {
    /// Output directory (falls back to $NEWSVENDOR_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArg {
    fn resolve(&self) -> Result<PathBuf> {
        let dir = match &self.out {
            Some(dir) => dir.clone(),
            None => std::env::var_os(OUT_ENV)
                .map(PathBuf::from)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("no --out given and {OUT_ENV} is unset"))
                })?,
        };
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }
}

#[derive(Args)]
struct Table1Args {
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SyntheticArgs {
    /// Number of days to generate.
    #[arg(long)]
    days: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest demand value.
    #[arg(long, default_value_t = 3)]
    lo: i64,
    /// Largest demand value.
    #[arg(long, default_value_t = 20)]
    hi: i64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct BlocksArgs {
    /// Source dataset CSV.
    #[arg(long = "in")]
    input: PathBuf,
    /// Number of blocks to draw without replacement.
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    demand_cols: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct OutliersArgs {
    /// Source dataset CSV.
    #[arg(long = "in")]
    input: PathBuf,
    /// Number of rows to draw as injection candidates.
    #[arg(long)]
    subset: usize,
    /// Demands strictly above this are scaled.
    #[arg(long, default_value_t = 60.0)]
    threshold: f64,
    /// Scale factor for qualifying demands.
    #[arg(long, default_value_t = 10.0)]
    factor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    demand_cols: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct TrainFlags {
    /// Regularization weight λ.
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Gradient infinity-norm stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// L-BFGS history size.
    #[arg(long, default_value_t = 10)]
    memory: usize,
    /// Optimizer: lbfgs or momentum.
    #[arg(long, default_value = "lbfgs")]
    optimizer: String,
    /// Momentum-GD learning rate.
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    /// Momentum-GD momentum coefficient.
    #[arg(long, default_value_t = 0.9)]
    momentum: f64,
}

impl TrainFlags {
    fn to_config(&self, seed: u64) -> Result<TrainConfig> {
        let optimizer = match self.optimizer.as_str() {
            "lbfgs" => OptimizerKind::Lbfgs,
            "momentum" => OptimizerKind::MomentumGd,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown optimizer {other:?} (expected \"lbfgs\" or \"momentum\")"
                )))
            }
        };
        let cfg = TrainConfig {
            lambda: self.lambda,
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            lbfgs_memory: self.memory,
            seed,
            optimizer,
            learning_rate: self.lr,
            momentum: self.momentum,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn echo(&self, config: &mut BTreeMap<String, String>) {
        config.insert("lambda".into(), self.lambda.to_string());
        config.insert("max_iters".into(), self.max_iters.to_string());
        config.insert("tolerance".into(), self.tolerance.to_string());
        config.insert("memory".into(), self.memory.to_string());
        config.insert("optimizer".into(), self.optimizer.clone());
        config.insert("lr".into(), self.lr.to_string());
        config.insert("momentum".into(), self.momentum.to_string());
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Training dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Model spec: "linear", "mlp" (hidden 282,60), or "mlp:n,h1,h2,m".
    #[arg(long, default_value = "mlp")]
    model: String,
    /// Demand scaling factor f applied during training.
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: f64,
    /// Loss kind: original or quadratic.
    #[arg(long, default_value = "original")]
    loss: String,
    /// Per-unit shortage cost.
    #[arg(long)]
    cp: f64,
    /// Per-unit holding cost.
    #[arg(long, default_value_t = DEFAULT_CH)]
    ch: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    demand_cols: usize,
    #[command(flatten)]
    flags: TrainFlags,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SweepArgs {
    /// Training dataset CSV.
    #[arg(long)]
    train_data: PathBuf,
    /// Testing dataset CSV.
    #[arg(long)]
    test_data: PathBuf,
    /// Model spec: "linear", "mlp" (hidden 282,60), or "mlp:n,h1,h2,m".
    #[arg(long, default_value = "mlp")]
    model: String,
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: f64,
    /// Holding cost fixed across the sweep.
    #[arg(long, default_value_t = DEFAULT_CH)]
    ch: f64,
    /// Ratio grid as lo:hi:step or a comma-separated list.
    #[arg(long, default_value = "1:10:0.5")]
    ratios: String,
    /// Comma-separated loss kinds to train per ratio.
    #[arg(long, default_value = "original,quadratic")]
    kinds: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    demand_cols: usize,
    /// Also dump the first K training predictions at cp = --dump-cp.
    #[arg(long)]
    dump_first: Option<usize>,
    /// Shortage cost used for the prediction dump.
    #[arg(long, default_value_t = 4.0)]
    dump_cp: f64,
    #[command(flatten)]
    flags: TrainFlags,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset CSV to evaluate on.
    #[arg(long)]
    data: PathBuf,
    /// A single saved model.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Saved model trained under the original loss (paired evaluation).
    #[arg(long)]
    model_original: Option<PathBuf>,
    /// Saved model trained under the quadratic loss (paired evaluation).
    #[arg(long)]
    model_quadratic: Option<PathBuf>,
    /// Outlier mask CSV for the robustness comparison.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long, default_value_t = 6.0)]
    cp: f64,
    #[arg(long, default_value_t = DEFAULT_CH)]
    ch: f64,
    #[arg(long, default_value_t = 1)]
    demand_cols: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Serialize)]
struct RunManifest {
    tool: String,
    version: String,
    command: String,
    argv: Vec<String>,
    seed: Option<u64>,
    config: BTreeMap<String, String>,
    artifacts: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, seed: Option<u64>) -> Self {
        RunManifest {
            tool: "newsvendor".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv: std::env::args().skip(1).collect(),
            seed,
            config: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    fn write(&self, dir: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidArgument(format!("manifest serialization: {e}")))?;
        std::fs::write(dir.join("manifest.json"), body + "\n")?;
        Ok(())
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn parse_model_spec(spec: &str, demand_scale: f64, n: usize, m: usize) -> Result<ModelSpec> {
    if spec == "linear" {
        return Ok(ModelSpec::Linear);
    }
    if spec == "mlp" {
        return Ok(ModelSpec::Mlp {
            layer_sizes: vec![n, 282, 60, m],
            demand_scale,
        });
    }
    if let Some(rest) = spec.strip_prefix("mlp:") {
        let sizes: Vec<usize> = rest
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidArgument(format!("bad layer size {t:?} in {spec:?}"))
                })
            })
            .collect::<Result<_>>()?;
        if sizes.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "model spec {spec:?} needs at least n,h,m layer sizes"
            )));
        }
        return Ok(ModelSpec::Mlp {
            layer_sizes: sizes,
            demand_scale,
        });
    }
    Err(Error::InvalidArgument(format!(
        "unknown model spec {spec:?} (expected \"linear\", \"mlp\", or \"mlp:n,h1,h2,m\")"
    )))
}

fn parse_ratios(text: &str) -> Result<Vec<f64>> {
    let bad = |message: String| Error::InvalidArgument(message);
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("ratio grid {text:?} must be lo:hi:step")));
        }
        let lo: f64 = parts[0]
            .parse()
            .map_err(|_| bad(format!("bad grid start {:?}", parts[0])))?;
        let hi: f64 = parts[1]
            .parse()
            .map_err(|_| bad(format!("bad grid end {:?}", parts[1])))?;
        let step: f64 = parts[2]
            .parse()
            .map_err(|_| bad(format!("bad grid step {:?}", parts[2])))?;
        let grid_ok = step > 0.0 && hi >= lo;
        if !grid_ok {
            return Err(bad(format!("degenerate ratio grid {text:?}")));
        }
        let count = ((hi - lo) / step + 1.0 + 1e-9).floor() as usize;
        Ok((0..count).map(|i| lo + step * i as f64).collect())
    } else {
        text.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad ratio {t:?}")))
            })
            .collect()
    }
}

fn parse_kinds(text: &str) -> Result<Vec<LossKind>> {
    text.split(',').map(|t| LossKind::parse(t.trim())).collect()
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(gen) => run_gen(gen),
        Command::Train(args) => run_train(args),
        Command::Sweep(args) => run_sweep_cmd(args),
        Command::Eval(args) => run_eval(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run_gen(command: GenCommand) -> Result<()> {
    match command {
        GenCommand::Table1(args) => {
            let dir = args.out.resolve()?;
            let (train_set, test_set) = table1_dataset();
            train_set.save_csv(dir.join("table1_train.csv"), Some(TABLE1_SEED))?;
            test_set.save_csv(dir.join("table1_test.csv"), Some(TABLE1_SEED))?;
            let mut manifest = RunManifest::new("gen table1", Some(TABLE1_SEED));
            manifest.artifacts = vec!["table1_train.csv".into(), "table1_test.csv".into()];
            manifest.write(&dir)?;
            println!(
                "wrote table1_train.csv and table1_test.csv to {}",
                dir.display()
            );
            Ok(())
        }
        GenCommand::Synthetic(args) => {
            let dir = args.out.resolve()?;
            let mut rng = SeededRng::new(args.seed);
            let dataset = gen_synthetic_in_range(&mut rng, args.days, args.lo, args.hi)?;
            dataset.save_csv(dir.join("synthetic.csv"), Some(args.seed))?;
            let mut manifest = RunManifest::new("gen synthetic", Some(args.seed));
            manifest.set("days", args.days);
            manifest.set("lo", args.lo);
            manifest.set("hi", args.hi);
            manifest.artifacts = vec!["synthetic.csv".into()];
            manifest.write(&dir)?;
            println!(
                "wrote synthetic.csv ({} rows) to {}",
                args.days,
                dir.display()
            );
            Ok(())
        }
        GenCommand::Blocks(args) => {
            let dir = args.out.resolve()?;
            let source = load_csv(&args.input, args.demand_cols)?;
            let blocks = group_blocks(&source);
            let mut rng = SeededRng::new(args.seed);
            let sampled = sample_blocks(&source, &blocks, args.count, &mut rng)?;
            sampled.save_csv(dir.join("blocks.csv"), Some(args.seed))?;
            let mut manifest = RunManifest::new("gen blocks", Some(args.seed));
            manifest.set("in", args.input.display());
            manifest.set("count", args.count);
            manifest.set("blocks_available", blocks.len());
            manifest.set("rows_out", sampled.len());
            manifest.artifacts = vec!["blocks.csv".into()];
            manifest.write(&dir)?;
            println!(
                "drew {} of {} blocks ({} rows) into blocks.csv",
                args.count,
                blocks.len(),
                sampled.len()
            );
            Ok(())
        }
        GenCommand::Outliers(args) => {
            let dir = args.out.resolve()?;
            let source = load_csv(&args.input, args.demand_cols)?;
            let mut rng = SeededRng::new(args.seed);
            let (transformed, mask) =
                inject_outliers(&source, args.threshold, args.factor, &mut rng, args.subset)?;
            transformed.save_csv(dir.join("outliers.csv"), Some(args.seed))?;
            let mut w = create(&dir, "outlier_mask.csv")?;
            write_mask_csv(&mask, &mut w)?;
            w.flush()?;
            let n_outliers = mask.iter().filter(|&&m| m).count();
            let mut manifest = RunManifest::new("gen outliers", Some(args.seed));
            manifest.set("in", args.input.display());
            manifest.set("subset", args.subset);
            manifest.set("threshold", args.threshold);
            manifest.set("factor", args.factor);
            manifest.set("outliers", n_outliers);
            manifest.artifacts = vec!["outliers.csv".into(), "outlier_mask.csv".into()];
            manifest.write(&dir)?;
            println!("scaled {n_outliers} outlier rows into outliers.csv");
            Ok(())
        }
    }
}

fn run_train(args: TrainArgs) -> Result<()> {
    let dir = args.out.resolve()?;
    let dataset = load_csv(&args.data, args.demand_cols)?;
    let kind = LossKind::parse(&args.loss)?;
    let costs = CostPair::new(args.cp, args.ch)?;
    let spec = parse_model_spec(
        &args.model,
        args.scale,
        dataset.n_features(),
        dataset.n_demands(),
    )?;
    let cfg = args.flags.to_config(args.seed)?;
    let model = spec.build(dataset.n_features(), dataset.n_demands(), args.seed)?;

    let report = train(&model, &dataset, &costs, kind, &cfg)?;

    AnyModel::save(&report.model, dir.join("model.txt"))?;
    let mut w = create(&dir, "trace.csv")?;
    write_trace_csv(&report.trace, &mut w)?;
    w.flush()?;

    let mut manifest = RunManifest::new("train", Some(args.seed));
    manifest.set("data", args.data.display());
    manifest.set("model", &args.model);
    manifest.set("scale", args.scale);
    manifest.set("loss", kind);
    manifest.set("cp", args.cp);
    manifest.set("ch", args.ch);
    manifest.set("demand_cols", args.demand_cols);
    args.flags.echo(&mut manifest.config);
    manifest.artifacts = vec!["model.txt".into(), "trace.csv".into()];
    manifest.write(&dir)?;

    println!(
        "trained {} model under {} loss: {} iterations, stop = {}, final objective = {}",
        report.model.kind_name(),
        kind,
        report.iterations,
        report.stop,
        report.trace.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn run_sweep_cmd(args: SweepArgs) -> Result<()> {
    let dir = args.out.resolve()?;
    let train_set = load_csv(&args.train_data, args.demand_cols)?;
    let test_set = load_csv(&args.test_data, args.demand_cols)?;
    let spec = parse_model_spec(
        &args.model,
        args.scale,
        train_set.n_features(),
        train_set.n_demands(),
    )?;
    let cfg = SweepConfig {
        ch: args.ch,
        ratios: parse_ratios(&args.ratios)?,
        kinds: parse_kinds(&args.kinds)?,
        model: spec.clone(),
        train: args.flags.to_config(args.seed)?,
        seed: args.seed,
    };

    let started = std::time::Instant::now();
    let mut result = run_sweep(&cfg, &train_set, &test_set)?;
    eprintln!(
        "sweep: {} cells in {} ms",
        result.rows.len(),
        started.elapsed().as_millis()
    );
    // Output bytes must be a pure function of inputs and flags, so the
    // measured wall times stay on stderr and the CSV column reads 0.
    for row in &mut result.rows {
        row.wall_ms = 0;
    }
    let mut w = create(&dir, "sweep.csv")?;
    write_sweep_csv(&result, &mut w)?;
    w.flush()?;

    let mut artifacts = vec!["sweep.csv".to_string()];
    if let Some(k) = args.dump_first {
        let costs = CostPair::new(args.dump_cp, args.ch)?;
        let base = spec.build(train_set.n_features(), train_set.n_demands(), args.seed)?;
        let original = train(&base, &train_set, &costs, LossKind::Original, &cfg.train)?;
        let quadratic = train(&base, &train_set, &costs, LossKind::Quadratic, &cfg.train)?;
        let dump = dump_predictions(&original.model, &quadratic.model, &train_set, k)?;
        let mut w = create(&dir, "predictions.csv")?;
        write_dump_csv(&dump, &mut w)?;
        w.flush()?;
        artifacts.push("predictions.csv".to_string());
    }

    let mut manifest = RunManifest::new("sweep", Some(args.seed));
    manifest.set("train_data", args.train_data.display());
    manifest.set("test_data", args.test_data.display());
    manifest.set("model", &args.model);
    manifest.set("scale", args.scale);
    manifest.set("ch", args.ch);
    manifest.set("ratios", &args.ratios);
    manifest.set("kinds", &args.kinds);
    manifest.set("demand_cols", args.demand_cols);
    if let Some(k) = args.dump_first {
        manifest.set("dump_first", k);
        manifest.set("dump_cp", args.dump_cp);
    }
    args.flags.echo(&mut manifest.config);
    manifest.artifacts = artifacts;
    manifest.write(&dir)?;

    println!(
        "wrote sweep.csv ({} rows) to {}",
        result.rows.len(),
        dir.display()
    );
    Ok(())
}

fn mean_cost(
    model: &AnyModel,
    dataset: &newsvendor::data::Dataset,
    costs: &CostPair,
    kind: LossKind,
) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..dataset.len() {
        let pred = model.predict(dataset.feature_row(i))?;
        total += cost(dataset.demand_row(i), &pred, costs, kind)?;
    }
    Ok(total / dataset.len() as f64)
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let dir = args.out.resolve()?;
    let dataset = load_csv(&args.data, args.demand_cols)?;
    let costs = CostPair::new(args.cp, args.ch)?;
    let mut rows: Vec<(String, String)> = vec![("n_rows".into(), dataset.len().to_string())];

    let paired = match (&args.model, &args.model_original, &args.model_quadratic) {
        (Some(single), None, None) => {
            let model = AnyModel::load(single)?;
            rows.push(("mse".into(), test_err(&model, &dataset)?.to_string()));
            rows.push((
                "mean_newsvendor_cost".into(),
                mean_cost(&model, &dataset, &costs, LossKind::Original)?.to_string(),
            ));
            None
        }
        (None, Some(orig), Some(quad)) => Some((AnyModel::load(orig)?, AnyModel::load(quad)?)),
        _ => {
            return Err(Error::InvalidArgument(
                "pass either --model, or both --model-original and --model-quadratic".to_string(),
            ))
        }
    };

    if let Some((original, quadratic)) = paired {
        rows.push((
            "mse_original".into(),
            test_err(&original, &dataset)?.to_string(),
        ));
        rows.push((
            "mse_quadratic".into(),
            test_err(&quadratic, &dataset)?.to_string(),
        ));
        rows.push((
            "mean_newsvendor_cost_original".into(),
            mean_cost(&original, &dataset, &costs, LossKind::Original)?.to_string(),
        ));
        rows.push((
            "mean_newsvendor_cost_quadratic".into(),
            mean_cost(&quadratic, &dataset, &costs, LossKind::Original)?.to_string(),
        ));
        if let Some(mask_path) = &args.mask {
            let mask = data::read_mask_csv(mask_path)?;
            if dataset.n_demands() != 1 {
                return Err(Error::InvalidArgument(
                    "robustness evaluation expects a single demand column".to_string(),
                ));
            }
            let mut preds_orig = Vec::with_capacity(dataset.len());
            let mut preds_quad = Vec::with_capacity(dataset.len());
            let mut demands = Vec::with_capacity(dataset.len());
            for i in 0..dataset.len() {
                preds_orig.push(original.predict(dataset.feature_row(i))?[0]);
                preds_quad.push(quadratic.predict(dataset.feature_row(i))?[0]);
                demands.push(dataset.demand_row(i)[0]);
            }
            let report = robustness_report(&mask, &preds_orig, &preds_quad, &demands)?;
            rows.push((
                "clean_mae_original".into(),
                report.original_clean_mae.to_string(),
            ));
            rows.push((
                "clean_mae_quadratic".into(),
                report.quadratic_clean_mae.to_string(),
            ));
            if let Some(v) = report.original_outlier_mae {
                rows.push(("outlier_mae_original".into(), v.to_string()));
            }
            if let Some(v) = report.quadratic_outlier_mae {
                rows.push(("outlier_mae_quadratic".into(), v.to_string()));
            }
            rows.push(("verdict".into(), report.verdict.to_string()));
        }
    }

    let mut w = create(&dir, "metrics.csv")?;
    writeln!(w, "metric,value")?;
    for (k, v) in &rows {
        writeln!(w, "{k},{v}")?;
    }
    w.flush()?;

    let mut manifest = RunManifest::new("eval", None);
    manifest.set("data", args.data.display());
    manifest.set("cp", args.cp);
    manifest.set("ch", args.ch);
    if let Some(m) = &args.model {
        manifest.set("model", m.display());
    }
    if let Some(m) = &args.model_original {
        manifest.set("model_original", m.display());
    }
    if let Some(m) = &args.model_quadratic {
        manifest.set("model_quadratic", m.display());
    }
    if let Some(m) = &args.mask {
        manifest.set("mask", m.display());
    }
    manifest.artifacts = vec!["metrics.csv".into()];
    manifest.write(&dir)?;

    for (k, v) in &rows {
        println!("{k} = {v}");
    }
    Ok(())
}
