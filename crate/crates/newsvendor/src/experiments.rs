//! Evaluation protocol: cost-ratio sweeps, train/test error metrics,
//! prediction dumps, and the robustness comparison.
//!
//! A sweep trains one model per (ratio, loss kind) cell with `cp = ch · r`
//! and records the mean squared prediction error on both dataset sides.
//! Both loss kinds start from identical initial weights per ratio so the
//! curves differ only by objective. Errors are measured in unscaled demand
//! units.

use std::io::Write;
use std::time::Instant;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::losses::{CostPair, LossKind};
use crate::models::{AnyModel, LinearModel, MlpModel, Trainable};
use crate::optim::{train, TrainConfig};

/// Default holding cost. A holding cost of exactly 1 flattens the
/// original-loss predictions, so the protocol fixes 1.5.
pub const DEFAULT_CH: f64 = 1.5;

/// Which model architecture a sweep trains.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Mlp {
        /// Full layer sizes, `[n_in, h1, ..., m_out]`.
        layer_sizes: Vec<usize>,
        demand_scale: f64,
    },
    Linear,
}

impl ModelSpec {
    /// Builds a seeded initial model compatible with the dataset shape.
    pub fn build(&self, n_features: usize, n_outputs: usize, seed: u64) -> Result<AnyModel> {
        match self {
            ModelSpec::Mlp {
                layer_sizes,
                demand_scale,
            } => {
                if layer_sizes.first() != Some(&n_features)
                    || layer_sizes.last() != Some(&n_outputs)
                {
                    return Err(Error::dims(
                        "ModelSpec::build",
                        format!("layers starting at {n_features} and ending at {n_outputs}"),
                        format!("{layer_sizes:?}"),
                    ));
                }
                Ok(AnyModel::Mlp(MlpModel::init(
                    layer_sizes,
                    *demand_scale,
                    seed,
                )?))
            }
            ModelSpec::Linear => {
                if n_outputs != 1 {
                    return Err(Error::invalid(
                        "linear models support a single demand column".to_string(),
                    ));
                }
                Ok(AnyModel::Linear(LinearModel::zeros(n_features)))
            }
        }
    }
}

/// Configuration for [`run_sweep`].
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Holding cost, fixed across the sweep.
    pub ch: f64,
    /// `cp/ch` ratios; all must be >= 1.
    pub ratios: Vec<f64>,
    pub kinds: Vec<LossKind>,
    pub model: ModelSpec,
    pub train: TrainConfig,
    pub seed: u64,
}

impl SweepConfig {
    /// The standard grid: 1.0 to 10.0 in steps of 0.5 (19 ratios).
    pub fn default_ratios() -> Vec<f64> {
        (0..19).map(|i| 1.0 + 0.5 * i as f64).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ch > 0.0 && self.ch.is_finite()) {
            return Err(Error::invalid(format!(
                "ch must be positive, got {}",
                self.ch
            )));
        }
        if self.ratios.is_empty() {
            return Err(Error::invalid("ratios must be nonempty".to_string()));
        }
        if let Some(bad) = self.ratios.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
            return Err(Error::invalid(format!("ratios must be >= 1, got {bad}")));
        }
        if self.kinds.is_empty() {
            return Err(Error::invalid("kinds must be nonempty".to_string()));
        }
        Ok(())
    }
}

/// One sweep cell.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub ratio: f64,
    pub kind: LossKind,
    pub train_err: f64,
    pub test_err: f64,
    pub wall_ms: u64,
}

/// All cells of a sweep, in (ratio, kind) order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

fn mean_squared_error<M: Trainable>(
    model: &M,
    data: &Dataset,
    context: &'static str,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset(context));
    }
    let mut total = 0.0;
    for i in 0..data.len() {
        let pred = model.predict(data.feature_row(i))?;
        let d = data.demand_row(i);
        if pred.len() != d.len() {
            return Err(Error::dims(context, d.len(), pred.len()));
        }
        total += pred
            .iter()
            .zip(d)
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>();
    }
    Ok(total / data.len() as f64)
}

/// Mean squared L2 prediction error over a testing set.
pub fn test_err<M: Trainable>(model: &M, test: &Dataset) -> Result<f64> {
    mean_squared_error(model, test, "test_err")
}

/// The identical metric over the training set.
pub fn train_err<M: Trainable>(model: &M, train: &Dataset) -> Result<f64> {
    mean_squared_error(model, train, "train_err")
}

/// Trains one model per (ratio, kind) cell and records both errors plus
/// wall time. Deterministic up to the wall-time field.
pub fn run_sweep(
    cfg: &SweepConfig,
    train_set: &Dataset,
    test_set: &Dataset,
) -> Result<SweepResult> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.ratios.len() * cfg.kinds.len());
    for &ratio in &cfg.ratios {
        let costs = CostPair::new(cfg.ch * ratio, cfg.ch)?;
        let base = cfg
            .model
            .build(train_set.n_features(), train_set.n_demands(), cfg.seed)?;
        for &kind in &cfg.kinds {
            let started = Instant::now();
            let report = train(&base, train_set, &costs, kind, &cfg.train)
                .map_err(|e| Error::invalid(format!("sweep cell (ratio {ratio}, {kind}): {e}")))?;
            let wall_ms = started.elapsed().as_millis() as u64;
            rows.push(SweepRow {
                ratio,
                kind,
                train_err: train_err(&report.model, train_set)?,
                test_err: test_err(&report.model, test_set)?,
                wall_ms,
            });
        }
    }
    Ok(SweepResult { rows })
}

/// One prediction-dump row: the true demand and each model's prediction.
#[derive(Debug, Clone)]
pub struct DumpRow {
    pub index: usize,
    pub demand: f64,
    pub pred_original: f64,
    pub pred_quadratic: f64,
}

/// The first `k` training rows with both models' predictions.
#[derive(Debug, Clone)]
pub struct PredictionDump {
    pub rows: Vec<DumpRow>,
}

/// Dumps the first `k` training-set predictions for a model trained under
/// each loss kind.
pub fn dump_predictions(
    original: &AnyModel,
    quadratic: &AnyModel,
    train_set: &Dataset,
    k: usize,
) -> Result<PredictionDump> {
    if k == 0 {
        return Err(Error::invalid(
            "dump_predictions: k must be >= 1".to_string(),
        ));
    }
    if k > train_set.len() {
        return Err(Error::invalid(format!(
            "dump_predictions: k = {k} exceeds {} training rows",
            train_set.len()
        )));
    }
    if train_set.n_demands() != 1 {
        return Err(Error::invalid(
            "dump_predictions expects a single demand column".to_string(),
        ));
    }
    let mut rows = Vec::with_capacity(k);
    for i in 0..k {
        let x = train_set.feature_row(i);
        rows.push(DumpRow {
            index: i,
            demand: train_set.demand_row(i)[0],
            pred_original: original.predict(x)?[0],
            pred_quadratic: quadratic.predict(x)?[0],
        });
    }
    Ok(PredictionDump { rows })
}

/// Who fit the clean rows better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    OriginalWins,
    QuadraticWins,
    Tie,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::OriginalWins => "original",
            Verdict::QuadraticWins => "quadratic",
            Verdict::Tie => "tie",
        };
        f.write_str(s)
    }
}

/// Median absolute errors split by the outlier mask, per loss kind.
#[derive(Debug, Clone)]
pub struct RobustnessReport {
    pub original_clean_mae: f64,
    pub quadratic_clean_mae: f64,
    /// `None` when the mask marks no rows.
    pub original_outlier_mae: Option<f64>,
    pub quadratic_outlier_mae: Option<f64>,
    pub verdict: Verdict,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite errors"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Compares the two loss kinds' median absolute prediction errors on
/// clean (unmasked) rows; outlier rows are summarized separately.
pub fn robustness_report(
    clean_mask: &[bool],
    preds_original: &[f64],
    preds_quadratic: &[f64],
    demands: &[f64],
) -> Result<RobustnessReport> {
    let n = clean_mask.len();
    if preds_original.len() != n || preds_quadratic.len() != n || demands.len() != n {
        return Err(Error::dims(
            "robustness_report",
            format!("{n} rows"),
            format!(
                "{}/{}/{} predictions/demands",
                preds_original.len(),
                preds_quadratic.len(),
                demands.len()
            ),
        ));
    }
    // `clean_mask` marks outliers; clean rows are the unmasked ones.
    if clean_mask.iter().all(|&m| m) {
        return Err(Error::invalid(
            "robustness_report: every row is masked as an outlier".to_string(),
        ));
    }
    let errors = |preds: &[f64], outliers: bool| -> Vec<f64> {
        preds
            .iter()
            .zip(demands)
            .zip(clean_mask)
            .filter(|(_, &m)| m == outliers)
            .map(|((p, d), _)| (p - d).abs())
            .collect()
    };
    let original_clean_mae = median(errors(preds_original, false));
    let quadratic_clean_mae = median(errors(preds_quadratic, false));
    let original_outliers = errors(preds_original, true);
    let quadratic_outliers = errors(preds_quadratic, true);
    let original_outlier_mae = (!original_outliers.is_empty()).then(|| median(original_outliers));
    let quadratic_outlier_mae =
        (!quadratic_outliers.is_empty()).then(|| median(quadratic_outliers));
    let verdict = if original_clean_mae < quadratic_clean_mae {
        Verdict::OriginalWins
    } else if quadratic_clean_mae < original_clean_mae {
        Verdict::QuadraticWins
    } else {
        Verdict::Tie
    };
    Ok(RobustnessReport {
        original_clean_mae,
        quadratic_clean_mae,
        original_outlier_mae,
        quadratic_outlier_mae,
        verdict,
    })
}

/// Writes a sweep as `ratio,kind,train_err,test_err,wall_ms` CSV rows in
/// deterministic cell order.
pub fn write_sweep_csv(result: &SweepResult, w: &mut impl Write) -> Result<()> {
    writeln!(w, "ratio,kind,train_err,test_err,wall_ms")?;
    for row in &result.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            row.ratio, row.kind, row.train_err, row.test_err, row.wall_ms
        )?;
    }
    Ok(())
}

/// Writes a prediction dump as `index,demand,pred_original,pred_quadratic`
/// CSV rows.
pub fn write_dump_csv(dump: &PredictionDump, w: &mut impl Write) -> Result<()> {
    writeln!(w, "index,demand,pred_original,pred_quadratic")?;
    for row in &dump.rows {
        writeln!(
            w,
            "{},{},{},{}",
            row.index, row.demand, row.pred_original, row.pred_quadratic
        )?;
    }
    Ok(())
}
