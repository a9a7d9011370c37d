//! Plain-text model persistence.
//!
//! Models are stored as a line-oriented text document with every parameter
//! printed in shortest round-trip decimal form, so `save` → `load`
//! reproduces outputs bitwise.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::losses::{CostPair, LossKind};
use crate::matrix::Matrix;
use crate::models::{LinearModel, MlpModel, Trainable};

const HEADER: &str = "newsvendor-model v1";

/// Either trainable model, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Mlp(MlpModel),
    Linear(LinearModel),
}

impl AnyModel {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<AnyModel> {
        let path = path.as_ref();
        let file = File::open(path)?;
        AnyModel::read_from(file, &path.display().to_string())
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "{HEADER}")?;
        match self {
            AnyModel::Mlp(m) => {
                writeln!(w, "kind mlp")?;
                write!(w, "layers")?;
                for s in m.layer_sizes() {
                    write!(w, " {s}")?;
                }
                writeln!(w)?;
                writeln!(w, "scale {}", m.demand_scale())?;
                for (l, (weights, biases)) in m.weights().iter().zip(m.biases()).enumerate() {
                    writeln!(w, "weights {l} {} {}", weights.rows(), weights.cols())?;
                    for i in 0..weights.rows() {
                        write_floats(w, weights.row(i))?;
                    }
                    writeln!(w, "biases {l} {}", biases.len())?;
                    write_floats(w, biases)?;
                }
            }
            AnyModel::Linear(m) => {
                writeln!(w, "kind linear")?;
                writeln!(w, "features {}", m.n_features())?;
                writeln!(w, "intercept {}", m.intercept())?;
                write!(w, "weights")?;
                for v in m.weights() {
                    write!(w, " {v}")?;
                }
                writeln!(w)?;
            }
        }
        writeln!(w, "end")?;
        Ok(())
    }

    pub fn read_from(r: impl Read, path: &str) -> Result<AnyModel> {
        let mut lines = Lines::new(r, path);
        let header = lines.next_line()?;
        if header != HEADER {
            return Err(lines.err(format!("expected header {HEADER:?}")));
        }
        let kind = lines.next_line()?;
        let model = match kind.as_str() {
            "kind mlp" => AnyModel::Mlp(read_mlp(&mut lines)?),
            "kind linear" => AnyModel::Linear(read_linear(&mut lines)?),
            other => return Err(lines.err(format!("unknown model kind line {other:?}"))),
        };
        let end = lines.next_line()?;
        if end != "end" {
            return Err(lines.err("expected trailing \"end\""));
        }
        Ok(model)
    }

    /// Prediction under whichever model is stored.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            AnyModel::Mlp(m) => m.forward(x),
            AnyModel::Linear(m) => Ok(vec![m.forward(x)?]),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AnyModel::Mlp(_) => "mlp",
            AnyModel::Linear(_) => "linear",
        }
    }
}

impl Trainable for AnyModel {
    fn param_count(&self) -> usize {
        match self {
            AnyModel::Mlp(m) => m.param_count(),
            AnyModel::Linear(m) => m.param_count(),
        }
    }

    fn params(&self) -> Vec<f64> {
        match self {
            AnyModel::Mlp(m) => m.params(),
            AnyModel::Linear(m) => m.params(),
        }
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        match self {
            AnyModel::Mlp(m) => m.set_params(params),
            AnyModel::Linear(m) => m.set_params(params),
        }
    }

    fn weight_mask(&self) -> Vec<bool> {
        match self {
            AnyModel::Mlp(m) => m.weight_mask(),
            AnyModel::Linear(m) => m.weight_mask(),
        }
    }

    fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        AnyModel::predict(self, x)
    }

    fn accumulate_loss_grad(
        &self,
        x: &[f64],
        d: &[f64],
        c: &CostPair,
        kind: LossKind,
        grad: &mut [f64],
    ) -> Result<f64> {
        match self {
            AnyModel::Mlp(m) => m.accumulate_loss_grad(x, d, c, kind, grad),
            AnyModel::Linear(m) => m.accumulate_loss_grad(x, d, c, kind, grad),
        }
    }
}

fn write_floats(w: &mut impl Write, values: &[f64]) -> Result<()> {
    let mut first = true;
    for v in values {
        if first {
            write!(w, "{v}")?;
            first = false;
        } else {
            write!(w, " {v}")?;
        }
    }
    writeln!(w)?;
    Ok(())
}

struct Lines<R: Read> {
    inner: std::io::Lines<BufReader<R>>,
    path: String,
    line_no: usize,
}

impl<R: Read> Lines<R> {
    fn new(r: R, path: &str) -> Self {
        Lines {
            inner: BufReader::new(r).lines(),
            path: path.to_string(),
            line_no: 0,
        }
    }

    fn next_line(&mut self) -> Result<String> {
        self.line_no += 1;
        match self.inner.next() {
            Some(line) => Ok(line?),
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.line_no,
            message: message.into(),
        }
    }

    fn parse_floats(&self, line: &str) -> Result<Vec<f64>> {
        line.split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| self.err(format!("bad float {tok:?}")))
            })
            .collect()
    }
}

fn read_mlp<R: Read>(lines: &mut Lines<R>) -> Result<MlpModel> {
    let layers_line = lines.next_line()?;
    let sizes: Vec<usize> = layers_line
        .strip_prefix("layers ")
        .ok_or_else(|| lines.err("expected \"layers ...\""))?
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| lines.err("bad layer size")))
        .collect::<Result<_>>()?;

    let scale_line = lines.next_line()?;
    let scale: f64 = scale_line
        .strip_prefix("scale ")
        .ok_or_else(|| lines.err("expected \"scale ...\""))?
        .parse()
        .map_err(|_| lines.err("bad scale"))?;

    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..sizes.len().saturating_sub(1) {
        let head = lines.next_line()?;
        let expected = format!("weights {l} {} {}", sizes[l + 1], sizes[l]);
        if head != expected {
            return Err(lines.err(format!("expected {expected:?}, got {head:?}")));
        }
        let mut data = Vec::with_capacity(sizes[l + 1] * sizes[l]);
        for _ in 0..sizes[l + 1] {
            let row_line = lines.next_line()?;
            let row = lines.parse_floats(&row_line)?;
            if row.len() != sizes[l] {
                return Err(lines.err(format!(
                    "expected {} weights in row, got {}",
                    sizes[l],
                    row.len()
                )));
            }
            data.extend(row);
        }
        weights
            .push(Matrix::new(sizes[l + 1], sizes[l], data).map_err(|e| lines.err(e.to_string()))?);

        let head = lines.next_line()?;
        let expected = format!("biases {l} {}", sizes[l + 1]);
        if head != expected {
            return Err(lines.err(format!("expected {expected:?}, got {head:?}")));
        }
        let bias_line = lines.next_line()?;
        let b = lines.parse_floats(&bias_line)?;
        if b.len() != sizes[l + 1] {
            return Err(lines.err(format!("expected {} biases, got {}", sizes[l + 1], b.len())));
        }
        biases.push(b);
    }
    MlpModel::from_parts(weights, biases, scale).map_err(|e| lines.err(e.to_string()))
}

fn read_linear<R: Read>(lines: &mut Lines<R>) -> Result<LinearModel> {
    let features_line = lines.next_line()?;
    let n: usize = features_line
        .strip_prefix("features ")
        .ok_or_else(|| lines.err("expected \"features ...\""))?
        .parse()
        .map_err(|_| lines.err("bad feature count"))?;

    let intercept_line = lines.next_line()?;
    let intercept: f64 = intercept_line
        .strip_prefix("intercept ")
        .ok_or_else(|| lines.err("expected \"intercept ...\""))?
        .parse()
        .map_err(|_| lines.err("bad intercept"))?;

    let weights_line = lines.next_line()?;
    let rest = weights_line
        .strip_prefix("weights")
        .ok_or_else(|| lines.err("expected \"weights ...\""))?;
    let weights = lines.parse_floats(rest)?;
    if weights.len() != n {
        return Err(lines.err(format!("expected {n} weights, got {}", weights.len())));
    }
    Ok(LinearModel::new(intercept, weights))
}
