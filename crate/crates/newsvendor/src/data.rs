//! Dataset construction: CSV ingestion, splitting, the embedded
//! two-week synthetic set, the seeded day generator, block resampling,
//! and outlier injection.
//!
//! CSV schema: one header row, feature columns first, demand column(s)
//! last, UTF-8, `.` decimal separator. Lines starting with `#` are
//! comments; generated files carry a `# seed=<n>` comment so any file can
//! be regenerated.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::SeededRng;

/// Feature matrix paired row-for-row with a demand matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    demands: Matrix,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(features: Matrix, demands: Matrix, feature_names: Vec<String>) -> Result<Self> {
        if features.rows() != demands.rows() {
            return Err(Error::dims(
                "Dataset::new",
                format!("{} feature rows", features.rows()),
                format!("{} demand rows", demands.rows()),
            ));
        }
        if features.rows() == 0 {
            return Err(Error::EmptyDataset("Dataset::new"));
        }
        if feature_names.len() != features.cols() {
            return Err(Error::dims(
                "Dataset::new",
                format!("{} feature names", features.cols()),
                feature_names.len(),
            ));
        }
        Ok(Dataset {
            features,
            demands,
            feature_names,
        })
    }

    pub fn from_rows(features: &[Vec<f64>], demands: &[Vec<f64>], names: &[&str]) -> Result<Self> {
        Dataset::new(
            Matrix::from_rows(features)?,
            Matrix::from_rows(demands)?,
            names.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_demands(&self) -> usize {
        self.demands.cols()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn demands(&self) -> &Matrix {
        &self.demands
    }

    pub fn feature_row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn demand_row(&self, i: usize) -> &[f64] {
        self.demands.row(i)
    }

    /// New dataset holding `indices`' rows in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let features: Vec<Vec<f64>> = indices
            .iter()
            .map(|&i| self.feature_row(i).to_vec())
            .collect();
        let demands: Vec<Vec<f64>> = indices
            .iter()
            .map(|&i| self.demand_row(i).to_vec())
            .collect();
        Dataset::new(
            Matrix::from_rows(&features)?,
            Matrix::from_rows(&demands)?,
            self.feature_names.clone(),
        )
    }

    /// Writes the dataset as CSV, optionally recording the generator seed
    /// in a leading comment line.
    pub fn save_csv(&self, path: impl AsRef<Path>, seed: Option<u64>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        if let Some(seed) = seed {
            writeln!(w, "# seed={seed}")?;
        }
        let mut header: Vec<String> = self.feature_names.clone();
        if self.n_demands() == 1 {
            header.push("demand".to_string());
        } else {
            for k in 1..=self.n_demands() {
                header.push(format!("demand{k}"));
            }
        }
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.len() {
            let mut cells: Vec<String> = self.feature_row(i).iter().map(f64::to_string).collect();
            cells.extend(self.demand_row(i).iter().map(f64::to_string));
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads the CSV schema above, taking the last `demand_cols` columns as
/// demands. Every cell must parse as a number; errors cite the file line.
pub fn load_csv(path: impl AsRef<Path>, demand_cols: usize) -> Result<Dataset> {
    let path = path.as_ref();
    let display = path.display().to_string();
    if demand_cols == 0 {
        return Err(Error::invalid(
            "load_csv: demand_cols must be >= 1".to_string(),
        ));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(&display, e))?;

    let headers = reader
        .headers()
        .map_err(|e| csv_error(&display, e))?
        .clone();
    if headers.len() < demand_cols + 1 {
        return Err(Error::Parse {
            path: display,
            line: 1,
            message: format!(
                "need at least {} columns for {demand_cols} demand column(s), header has {}",
                demand_cols + 1,
                headers.len()
            ),
        });
    }
    let n_features = headers.len() - demand_cols;
    let feature_names: Vec<String> = headers.iter().take(n_features).map(String::from).collect();

    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut demands: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&display, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::Parse {
                path: display,
                line,
                message: format!("expected {} cells, found {}", headers.len(), record.len()),
            });
        }
        let mut row = Vec::with_capacity(headers.len());
        for cell in record.iter() {
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line,
                message: format!("non-numeric cell {cell:?}"),
            })?;
            row.push(value);
        }
        demands.push(row.split_off(n_features));
        features.push(row);
    }
    if features.is_empty() {
        return Err(Error::Parse {
            path: display,
            line: 1,
            message: "no data rows".to_string(),
        });
    }
    Dataset::new(
        Matrix::from_rows(&features)?,
        Matrix::from_rows(&demands)?,
        feature_names,
    )
}

fn csv_error(path: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        path: path.to_string(),
        line,
        message: e.to_string(),
    }
}

/// Seeded shuffle, then split. The train side gets `round(N · fraction)`
/// rows with exact halves rounding down (a 75% split of 13,170 rows is
/// 9,877 train / 3,293 test).
pub fn split(data: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "split: train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let n = data.len();
    let train_size = ((n as f64) * train_fraction - 0.5).ceil() as usize;
    if train_size == 0 || train_size == n {
        return Err(Error::invalid(format!(
            "split: fraction {train_fraction} leaves an empty side for {n} rows"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    SeededRng::new(seed).shuffle(&mut indices);
    let train = data.subset(&indices[..train_size])?;
    let test = data.subset(&indices[train_size..])?;
    Ok((train, test))
}

/// Feature order used by the built-in generators.
pub const FEATURE_NAMES: [&str; 3] = ["holiday", "weather", "promotion"];

/// Seed used to regenerate the weather/promotion columns of the embedded
/// two-week dataset; the demand column is fixed verbatim.
pub const TABLE1_SEED: u64 = 1997;

const TABLE1_TRAIN_DEMANDS: [f64; 14] = [
    13.0, 7.0, 16.0, 7.0, 12.0, 15.0, 19.0, // week 1, Mon..Sun
    20.0, 12.0, 5.0, 5.0, 7.0, 18.0, 7.0, // week 2
];
const TABLE1_TEST_DEMANDS: [f64; 14] = [
    7.0, 10.0, 6.0, 5.0, 18.0, 12.0, 18.0, // week 1
    17.0, 19.0, 7.0, 5.0, 13.0, 5.0, 14.0, // week 2
];

fn weekday_holiday(day: usize) -> f64 {
    // Days cycle Mon..Sun; Saturday and Sunday are holidays.
    if day % 7 >= 5 {
        1.0
    } else {
        0.0
    }
}

/// The embedded small synthetic dataset: 14 training and 14 testing days
/// (two weeks each, Monday first) with fixed demands, the weekend holiday
/// rule, and seeded binary weather/promotion columns.
pub fn table1_dataset() -> (Dataset, Dataset) {
    let mut rng = SeededRng::new(TABLE1_SEED);
    let mut build = |demands: &[f64]| -> Dataset {
        let features: Vec<Vec<f64>> = (0..demands.len())
            .map(|day| vec![weekday_holiday(day), rng.coin(), rng.coin()])
            .collect();
        let demand_rows: Vec<Vec<f64>> = demands.iter().map(|&d| vec![d]).collect();
        Dataset::from_rows(&features, &demand_rows, &FEATURE_NAMES)
            .expect("embedded dataset is well-formed")
    };
    let train = build(&TABLE1_TRAIN_DEMANDS);
    let test = build(&TABLE1_TEST_DEMANDS);
    (train, test)
}

/// Synthetic day generator with demands uniform on `[lo, hi]`, fair-coin
/// weather/promotion, and the weekday holiday cycle starting Monday.
pub fn gen_synthetic_in_range(
    rng: &mut SeededRng,
    days: usize,
    lo: i64,
    hi: i64,
) -> Result<Dataset> {
    if days == 0 {
        return Err(Error::invalid(
            "gen_synthetic: days must be >= 1".to_string(),
        ));
    }
    let mut features = Vec::with_capacity(days);
    let mut demands = Vec::with_capacity(days);
    for day in 0..days {
        let demand = rng.uniform_int(lo, hi)? as f64;
        let weather = rng.coin();
        let promotion = rng.coin();
        features.push(vec![weekday_holiday(day), weather, promotion]);
        demands.push(vec![demand]);
    }
    Dataset::from_rows(&features, &demands, &FEATURE_NAMES)
}

/// Synthetic generator with the standard demand range 3..=20.
pub fn gen_synthetic(rng: &mut SeededRng, days: usize) -> Result<Dataset> {
    gen_synthetic_in_range(rng, days, 3, 20)
}

/// Rows sharing one exact feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub feature_key: Vec<f64>,
    pub row_indices: Vec<usize>,
}

/// Partitions rows by exact feature-vector equality, ordered by first
/// occurrence.
pub fn group_blocks(data: &Dataset) -> Vec<Block> {
    let mut by_key: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut blocks: Vec<Block> = Vec::new();
    for i in 0..data.len() {
        let row = data.feature_row(i);
        let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
        match by_key.get(&key) {
            Some(&b) => blocks[b].row_indices.push(i),
            None => {
                by_key.insert(key, blocks.len());
                blocks.push(Block {
                    feature_key: row.to_vec(),
                    row_indices: vec![i],
                });
            }
        }
    }
    blocks
}

/// Draws `count` blocks without replacement and concatenates their rows.
pub fn sample_blocks(
    data: &Dataset,
    blocks: &[Block],
    count: usize,
    rng: &mut SeededRng,
) -> Result<Dataset> {
    if count > blocks.len() {
        return Err(Error::invalid(format!(
            "sample_blocks: requested {count} of {} blocks",
            blocks.len()
        )));
    }
    if count == 0 {
        return Err(Error::invalid(
            "sample_blocks: count must be >= 1".to_string(),
        ));
    }
    let chosen = rng.sample_indices(blocks.len(), count)?;
    let rows: Vec<usize> = chosen
        .iter()
        .flat_map(|&b| blocks[b].row_indices.iter().copied())
        .collect();
    data.subset(&rows)
}

/// Draws `subset` rows and multiplies their demand components that are
/// strictly greater than `threshold` by `factor`. Returns the full-length
/// transformed dataset and a row mask of which rows were modified.
pub fn inject_outliers(
    data: &Dataset,
    threshold: f64,
    factor: f64,
    rng: &mut SeededRng,
    subset: usize,
) -> Result<(Dataset, Vec<bool>)> {
    let params_ok = threshold > 0.0 && factor > 0.0;
    if !params_ok {
        return Err(Error::invalid(format!(
            "inject_outliers: threshold and factor must be positive, got {threshold}, {factor}"
        )));
    }
    if subset > data.len() {
        return Err(Error::invalid(format!(
            "inject_outliers: subset {subset} exceeds {} rows",
            data.len()
        )));
    }
    let drawn = rng.sample_indices(data.len(), subset)?;
    let mut demands = data.demands.clone();
    let mut mask = vec![false; data.len()];
    for &row in &drawn {
        for col in 0..demands.cols() {
            let value = demands.get(row, col);
            if value > threshold {
                demands.set(row, col, value * factor);
                mask[row] = true;
            }
        }
    }
    let transformed = Dataset::new(data.features.clone(), demands, data.feature_names.clone())?;
    Ok((transformed, mask))
}

/// Writes an outlier mask as `index,outlier` CSV rows.
pub fn write_mask_csv(mask: &[bool], w: &mut impl Write) -> Result<()> {
    writeln!(w, "index,outlier")?;
    for (i, &m) in mask.iter().enumerate() {
        writeln!(w, "{i},{}", if m { 1 } else { 0 })?;
    }
    Ok(())
}

/// Reads a mask written by [`write_mask_csv`].
pub fn read_mask_csv(path: impl AsRef<Path>) -> Result<Vec<bool>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut mask = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.is_empty() {
            continue;
        }
        let (index, flag) = line.split_once(',').ok_or_else(|| Error::Parse {
            path: display.clone(),
            line: lineno + 1,
            message: "expected index,outlier".to_string(),
        })?;
        let parse_err = |message: String| Error::Parse {
            path: display.clone(),
            line: lineno + 1,
            message,
        };
        let index: usize = index
            .parse()
            .map_err(|_| parse_err(format!("bad index {index:?}")))?;
        if index != mask.len() {
            return Err(parse_err(format!(
                "expected index {}, got {index}",
                mask.len()
            )));
        }
        match flag {
            "0" => mask.push(false),
            "1" => mask.push(true),
            other => return Err(parse_err(format!("bad flag {other:?}"))),
        }
    }
    Ok(mask)
}
