//! Labelled feature datasets: schema-driven loading, seeded splitting, and a
//! synthetic generator with a label-independent noise feature.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub features: Vec<T>,
    /// Index into the dataset's frame.
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub name: String,
    pub feature_names: Vec<String>,
    pub frame: Frame,
    pub samples: Vec<Sample<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        frame: Frame,
        samples: Vec<Sample<T>>,
    ) -> Result<Self> {
        let dim = feature_names.len();
        for s in &samples {
            if s.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.features.len(),
                });
            }
            if s.class >= frame.len() {
                return Err(Error::Schema(format!("class index {} outside frame", s.class)));
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue);
            }
        }
        Ok(Dataset {
            name: name.into(),
            feature_names,
            frame,
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.frame.len()];
        for s in &self.samples {
            counts[s.class] += 1;
        }
        counts
    }

    /// A dataset made of the samples at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            frame: self.frame.clone(),
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }

    /// Readings of one feature restricted to one class.
    pub fn feature_values(&self, feature: usize, class: usize) -> Vec<T> {
        self.samples
            .iter()
            .filter(|s| s.class == class)
            .map(|s| s.features[feature])
            .collect()
    }
}

/// Line filters applied before parsing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SkipRule {
    /// Lines that are empty or contain only delimiters and whitespace.
    Blank,
    /// Lines matching a regular expression.
    Matches { pattern: String },
    /// Copies of the header line after the first one.
    RepeatedHeader,
}

/// Column layout of a delimiter-separated dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub name: String,
    /// Default data file name, resolved against the parent of the schema's
    /// directory (`data/schemas/iris.json` -> `data/iris.csv`).
    #[serde(default)]
    pub file: Option<String>,
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    #[serde(default = "default_true")]
    pub has_header: bool,
    /// Column names for headerless files; defaults to `col_0`, `col_1`, ...
    #[serde(default)]
    pub columns: Option<Vec<String>>,
    pub label: String,
    /// Feature columns; defaults to every column except the label and `exclude`.
    #[serde(default)]
    pub features: Option<Vec<String>>,
    #[serde(default)]
    pub exclude: Vec<String>,
    /// Renames raw label values.
    #[serde(default)]
    pub label_map: BTreeMap<String, String>,
    /// Fixes the frame order; defaults to order of first appearance.
    #[serde(default)]
    pub classes: Option<Vec<String>>,
    #[serde(default)]
    pub skip_rules: Vec<SkipRule>,
}

fn default_delimiter() -> String {
    ",".to_owned()
}

fn default_true() -> bool {
    true
}

impl Schema {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::FileUnreadable {
            path: path.to_owned(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn data_path(&self, schema_path: &Path) -> Option<PathBuf> {
        self.file.as_ref().map(|f| {
            schema_path
                .parent()
                .and_then(Path::parent)
                .unwrap_or_else(|| Path::new("."))
                .join(f)
        })
    }

    fn delimiter_byte(&self) -> Result<u8> {
        match self.delimiter.as_bytes() {
            [b] => Ok(*b),
            _ if self.delimiter == "\\t" => Ok(b'\t'),
            _ => Err(Error::Schema(format!(
                "delimiter must be one byte, got {:?}",
                self.delimiter
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedRow {
    /// 1-based line number in the source file.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoadReport {
    pub rows_parsed: usize,
    pub dropped: Vec<DroppedRow>,
}

/// Reads a delimiter-separated file according to `schema`.
///
/// Rows with a missing or non-numeric feature, or an empty label, are dropped
/// and listed in the report.
pub fn load_dataset<T: Scalar>(path: &Path, schema: &Schema) -> Result<(Dataset<T>, LoadReport)> {
    let text = fs::read_to_string(path).map_err(|source| Error::FileUnreadable {
        path: path.to_owned(),
        source,
    })?;
    parse_dataset(&text, schema)
}

pub fn parse_dataset<T: Scalar>(text: &str, schema: &Schema) -> Result<(Dataset<T>, LoadReport)> {
    let delim = schema.delimiter_byte()?;
    let patterns = schema
        .skip_rules
        .iter()
        .filter_map(|r| match r {
            SkipRule::Matches { pattern } => Some(
                Regex::new(pattern).map_err(|e| Error::Schema(format!("bad pattern: {e}"))),
            ),
            _ => None,
        })
        .collect::<Result<Vec<_>>>()?;
    let skip_blank = schema.skip_rules.contains(&SkipRule::Blank);
    let skip_headers = schema.skip_rules.contains(&SkipRule::RepeatedHeader);
    let is_blank = |line: &str| {
        line.chars()
            .all(|c| c.is_whitespace() || c == char::from(delim))
    };
    let split_fields = |line: &str| -> Vec<String> {
        csv::ReaderBuilder::new()
            .has_headers(false)
            .delimiter(delim)
            .trim(csv::Trim::All)
            .from_reader(line.as_bytes())
            .records()
            .next()
            .and_then(|r| r.ok())
            .map(|r| r.iter().map(str::to_owned).collect())
            .unwrap_or_default()
    };

    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if (skip_blank || line.trim().is_empty()) && is_blank(line) {
            continue;
        }
        if patterns.iter().any(|p| p.is_match(line)) {
            continue;
        }
        let fields = split_fields(line);
        if schema.has_header && header.is_none() {
            header = Some(fields);
            continue;
        }
        if skip_headers && header.as_ref() == Some(&fields) {
            continue;
        }
        rows.push((line_no, fields));
    }

    let columns: Vec<String> = match (&header, &schema.columns) {
        (Some(h), _) => h.clone(),
        (None, Some(c)) => c.clone(),
        (None, None) => {
            let width = rows.first().map_or(0, |(_, r)| r.len());
            (0..width).map(|i| format!("col_{i}")).collect()
        }
    };
    let position = |name: &str| columns.iter().position(|c| c == name);
    let label_col = position(&schema.label).ok_or_else(|| Error::NoLabelColumn(schema.label.clone()))?;
    let feature_names: Vec<String> = match &schema.features {
        Some(f) => f.clone(),
        None => columns
            .iter()
            .enumerate()
            .filter(|(i, c)| *i != label_col && !schema.exclude.contains(c))
            .map(|(_, c)| c.clone())
            .collect(),
    };
    let feature_cols = feature_names
        .iter()
        .map(|f| position(f).ok_or_else(|| Error::NoFeatureColumn(f.clone())))
        .collect::<Result<Vec<_>>>()?;

    let mut labels: Vec<String> = schema.classes.clone().unwrap_or_default();
    let fixed_classes = schema.classes.is_some();
    let mut samples = Vec::new();
    let mut dropped = Vec::new();
    let rows_parsed = rows.len();
    for (line, fields) in rows {
        if fields.len() != columns.len() {
            dropped.push(DroppedRow {
                line,
                reason: format!("expected {} fields, found {}", columns.len(), fields.len()),
            });
            continue;
        }
        let raw_label = fields[label_col].as_str();
        if raw_label.is_empty() {
            dropped.push(DroppedRow {
                line,
                reason: "empty label".into(),
            });
            continue;
        }
        let label = schema
            .label_map
            .get(raw_label)
            .cloned()
            .unwrap_or_else(|| raw_label.to_owned());
        let parsed: std::result::Result<Vec<T>, String> = feature_cols
            .iter()
            .map(|&c| {
                let raw = &fields[c];
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(T::lit)
                    .ok_or_else(|| format!("non-numeric value {raw:?} in `{}`", columns[c]))
            })
            .collect();
        let features = match parsed {
            Ok(f) => f,
            Err(reason) => {
                dropped.push(DroppedRow { line, reason });
                continue;
            }
        };
        let class = match labels.iter().position(|l| *l == label) {
            Some(i) => i,
            None if fixed_classes => {
                dropped.push(DroppedRow {
                    line,
                    reason: format!("label `{label}` not among declared classes"),
                });
                continue;
            }
            None => {
                labels.push(label);
                labels.len() - 1
            }
        };
        samples.push(Sample { features, class });
    }
    if samples.is_empty() {
        return Err(Error::AllRowsDropped(schema.name.clone()));
    }
    let frame = Frame::new(labels)?;
    let dataset = Dataset::new(schema.name.clone(), feature_names, frame, samples)?;
    Ok((
        dataset,
        LoadReport {
            rows_parsed,
            dropped,
        },
    ))
}

/// How to partition a dataset into training and test parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.7,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn with_seed(seed: u64) -> Self {
        SplitSpec {
            seed,
            ..Self::default()
        }
    }
}

/// Sample indices of the training and test parts, each ascending.
///
/// Stratified mode shuffles each class with a ChaCha8 stream seeded from
/// `spec.seed` and keeps `round(n_c * fraction)` of it for training.
pub fn split_indices<T: Scalar>(d: &Dataset<T>, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let frac = spec.train_fraction;
    if !(frac > 0.0 && frac < 1.0) {
        return Err(Error::InvalidFraction(frac));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    if spec.stratified {
        for class in 0..d.frame.len() {
            let mut idx: Vec<usize> = (0..d.len()).filter(|&i| d.samples[i].class == class).collect();
            if idx.is_empty() {
                continue;
            }
            let n_train = (idx.len() as f64 * frac).round() as usize;
            if idx.len() < 2 || n_train == 0 || n_train == idx.len() {
                return Err(Error::ClassTooSmall {
                    label: d.frame.label(class).to_owned(),
                    count: idx.len(),
                });
            }
            idx.shuffle(&mut rng);
            train.extend_from_slice(&idx[..n_train]);
            test.extend_from_slice(&idx[n_train..]);
        }
    } else {
        let mut idx: Vec<usize> = (0..d.len()).collect();
        idx.shuffle(&mut rng);
        let n_train = (idx.len() as f64 * frac).round() as usize;
        if n_train == 0 || n_train == idx.len() {
            return Err(Error::EmptyPartition);
        }
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split<T: Scalar>(d: &Dataset<T>, spec: &SplitSpec) -> Result<(Dataset<T>, Dataset<T>)> {
    let (train, test) = split_indices(d, spec)?;
    Ok((d.select(&train), d.select(&test)))
}

/// Two-class data with `informative` Gaussian features whose class means
/// differ by `separation[j]` standard deviations, plus one trailing feature
/// named `noise` drawn uniformly from `[0, 10)` regardless of class.
pub fn synthetic_with_noise(
    per_class: usize,
    separation: &[f64],
    seed: u64,
) -> Result<Dataset<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let noise = Uniform::new(0.0, 10.0).expect("valid range");
    let mut feature_names: Vec<String> = (0..separation.len()).map(|j| format!("informative_{}", j + 1)).collect();
    feature_names.push("noise".into());
    let mut samples = Vec::with_capacity(2 * per_class);
    for class in 0..2 {
        for _ in 0..per_class {
            let mut features: Vec<f64> = separation
                .iter()
                .map(|sep| unit.sample(&mut rng) + sep * class as f64)
                .collect();
            features.push(rng.sample(noise));
            samples.push(Sample { features, class });
        }
    }
    Dataset::new(
        "synthetic-noise",
        feature_names,
        Frame::new(["neg", "pos"])?,
        samples,
    )
}
