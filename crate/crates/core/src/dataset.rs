//! Labelled feature tables: CSV I/O, the bundled Iris data, a seeded
//! Gaussian-blob generator and stratified splitting.
//!
//! CSV layout: a header row naming the features followed by a final `label`
//! column; the label may be blank for unlabelled data. Floats are written in
//! shortest round-trip form, so write-then-read is exact.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::encode::FeatureVector;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const IRIS_CLASSES: [&str; 3] = ["setosa", "versicolor", "virginica"];
const IRIS_CSV: &str = include_str!("../data/iris.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub feature_names: Vec<String>,
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<usize>,
    pub class_count: usize,
}

impl LabeledDataset {
    pub fn new(
        feature_names: Vec<String>,
        vectors: Vec<FeatureVector>,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                actual: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_count) {
            return Err(Error::invalid(format!(
                "label {bad} outside 0..{class_count}"
            )));
        }
        let dim = feature_names.len();
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.dim(),
            });
        }
        Ok(LabeledDataset {
            feature_names,
            vectors,
            labels,
            class_count,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            feature_names: self.feature_names.clone(),
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
        }
    }

    /// Keeps rows of the listed classes and relabels them `0..classes.len()`
    /// in list order.
    pub fn select_classes(&self, classes: &[usize]) -> Result<LabeledDataset> {
        if classes.iter().any(|&c| c >= self.class_count) {
            return Err(Error::invalid("class id out of range"));
        }
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for (v, &l) in self.vectors.iter().zip(&self.labels) {
            if let Some(pos) = classes.iter().position(|&c| c == l) {
                vectors.push(v.clone());
                labels.push(pos);
            }
        }
        LabeledDataset::new(self.feature_names.clone(), vectors, labels, classes.len())
    }

    /// Per-class shuffled split; each class contributes
    /// `round(fraction · class_size)` rows to the first part.
    pub fn stratified_split<R: Rng + ?Sized>(
        &self,
        fraction: f64,
        rng: &mut R,
    ) -> Result<(LabeledDataset, LabeledDataset)> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::invalid(format!("split fraction {fraction} outside (0, 1)")));
        }
        let mut first = Vec::new();
        let mut second = Vec::new();
        for class in 0..self.class_count {
            let mut idx: Vec<usize> = (0..self.len()).filter(|&i| self.labels[i] == class).collect();
            idx.shuffle(rng);
            let k = (fraction * idx.len() as f64).round() as usize;
            first.extend_from_slice(&idx[..k]);
            second.extend_from_slice(&idx[k..]);
        }
        first.sort_unstable();
        second.sort_unstable();
        Ok((self.subset(&first), self.subset(&second)))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let labels: Vec<Option<usize>> = self.labels.iter().map(|&l| Some(l)).collect();
        write_table(writer, &self.feature_names, &self.vectors, &labels)
    }
}

/// A CSV table whose label column may be blank.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub feature_names: Vec<String>,
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<Option<usize>>,
}

impl RawTable {
    /// Requires every row to be labelled; the class count is `max label + 1`.
    pub fn into_labeled(self) -> Result<LabeledDataset> {
        let mut labels = Vec::with_capacity(self.labels.len());
        for (row, l) in self.labels.iter().enumerate() {
            match l {
                Some(l) => labels.push(*l),
                None => {
                    return Err(Error::Data {
                        line: row + 2,
                        column: self.feature_names.len() + 1,
                        message: "missing label".into(),
                    })
                }
            }
        }
        let class_count = labels.iter().max().map_or(0, |m| m + 1);
        LabeledDataset::new(self.feature_names, self.vectors, labels, class_count)
    }
}

pub fn write_table<W: Write>(
    writer: W,
    feature_names: &[String],
    vectors: &[FeatureVector],
    labels: &[Option<usize>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<&str> = feature_names
        .iter()
        .map(String::as_str)
        .chain(std::iter::once("label"))
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for (v, l) in vectors.iter().zip(labels) {
        let mut row: Vec<String> = v.values().iter().map(|x| format!("{x:?}")).collect();
        row.push(l.map(|l| l.to_string()).unwrap_or_default());
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table<R: Read>(reader: R) -> Result<RawTable> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.len() < 2 || header.get(header.len() - 1) != Some("label") {
        return Err(Error::Data {
            line: 1,
            column: header.len().max(1),
            message: "header must list features and end with a `label` column".into(),
        });
    }
    let feature_names: Vec<String> = header.iter().take(header.len() - 1).map(String::from).collect();
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != header.len() {
            return Err(Error::Data {
                line,
                column: record.len().min(header.len()) + 1,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let mut values = Vec::with_capacity(feature_names.len());
        for (j, field) in record.iter().take(feature_names.len()).enumerate() {
            let x: f64 = field.parse().map_err(|_| Error::Data {
                line,
                column: j + 1,
                message: format!("`{field}` is not a number"),
            })?;
            if !x.is_finite() {
                return Err(Error::Data {
                    line,
                    column: j + 1,
                    message: "non-finite value".into(),
                });
            }
            values.push(x);
        }
        let label_field = &record[feature_names.len()];
        let label = if label_field.is_empty() {
            None
        } else {
            Some(label_field.parse::<usize>().map_err(|_| Error::Data {
                line,
                column: header.len(),
                message: format!("`{label_field}` is not a class id"),
            })?)
        };
        vectors.push(FeatureVector::new(values)?);
        labels.push(label);
    }
    Ok(RawTable {
        feature_names,
        vectors,
        labels,
    })
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    let (line, column) = e
        .position()
        .map_or((0, 0), |p| (p.line() as usize, 0));
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Data {
            line,
            column,
            message: format!("{kind:?}"),
        },
    }
}

/// Fisher's Iris data: 150 rows, 4 features (cm), labels 0..3 in
/// [`IRIS_CLASSES`] order.
pub fn iris() -> LabeledDataset {
    read_table(IRIS_CSV.as_bytes())
        .and_then(RawTable::into_labeled)
        .expect("bundled Iris CSV is well formed")
}

pub fn iris_csv() -> &'static str {
    IRIS_CSV
}

/// Isotropic Gaussian clusters with centres evenly spaced on a circle in the
/// first two coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlobSpec {
    pub classes: usize,
    pub per_class: usize,
    pub dim: usize,
    /// Distance of every centre from the origin.
    pub radius: f64,
    pub std_dev: f64,
    pub seed: u64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        BlobSpec {
            classes: 4,
            per_class: 25,
            dim: 2,
            radius: 3.0,
            std_dev: 0.6,
            seed: 0,
        }
    }
}

impl BlobSpec {
    pub fn centers(&self) -> Vec<Vec<f64>> {
        (0..self.classes)
            .map(|c| {
                let angle = std::f64::consts::FRAC_PI_4
                    + std::f64::consts::TAU * c as f64 / self.classes as f64;
                let mut center = vec![0.0; self.dim];
                center[0] = self.radius * angle.cos();
                if self.dim > 1 {
                    center[1] = self.radius * angle.sin();
                }
                center
            })
            .collect()
    }

    /// Rows are grouped by class in label order.
    pub fn generate(&self) -> Result<LabeledDataset> {
        if self.classes == 0 || self.per_class == 0 || self.dim == 0 {
            return Err(Error::invalid("blob classes, size and dimension must be positive"));
        }
        let noise = Normal::new(0.0, self.std_dev)
            .map_err(|e| Error::invalid(format!("blob std_dev: {e}")))?;
        let mut rng = rng_from_seed(self.seed);
        let mut vectors = Vec::with_capacity(self.classes * self.per_class);
        let mut labels = Vec::with_capacity(vectors.capacity());
        for (c, center) in self.centers().into_iter().enumerate() {
            for _ in 0..self.per_class {
                let v = center.iter().map(|m| m + noise.sample(&mut rng)).collect();
                vectors.push(FeatureVector::new(v)?);
                labels.push(c);
            }
        }
        let names = (0..self.dim).map(|j| format!("x{j}")).collect();
        LabeledDataset::new(names, vectors, labels, self.classes)
    }
}
