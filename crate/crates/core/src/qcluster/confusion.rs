use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<f64>>,
    pub normalized: bool,
}

impl ConfusionMatrix {
    pub fn from_labels(truth: &[usize], predicted: &[usize], class_count: usize) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::DimensionMismatch {
                expected: truth.len(),
                actual: predicted.len(),
            });
        }
        let mut counts = vec![vec![0.0; class_count]; class_count];
        for (&t, &p) in truth.iter().zip(predicted) {
            if t >= class_count || p >= class_count {
                return Err(Error::invalid(format!(
                    "label pair ({t}, {p}) outside 0..{class_count}"
                )));
            }
            counts[t][p] += 1.0;
        }
        Ok(ConfusionMatrix {
            counts,
            normalized: false,
        })
    }

    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    /// Row-normalised copy; rows for classes absent from the data stay zero.
    pub fn normalize(&self) -> ConfusionMatrix {
        let counts = self
            .counts
            .iter()
            .map(|row| {
                let total: f64 = row.iter().sum();
                if total > 0.0 {
                    row.iter().map(|c| c / total).collect()
                } else {
                    row.clone()
                }
            })
            .collect();
        ConfusionMatrix {
            counts,
            normalized: true,
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.class_count()).map(|i| self.counts[i][i]).sum()
    }

    /// Fraction of rows on the diagonal (raw counts).
    pub fn accuracy(&self) -> f64 {
        let total: f64 = self.counts.iter().flatten().sum();
        if total == 0.0 {
            0.0
        } else {
            self.trace() / total
        }
    }

    /// Mean of the normalised diagonal.
    pub fn mean_diagonal(&self) -> f64 {
        let n = self.normalize();
        n.trace() / n.class_count() as f64
    }

    /// Entry-wise median of several matrices of the same shape.
    pub fn median(matrices: &[ConfusionMatrix]) -> Result<ConfusionMatrix> {
        let first = matrices.first().ok_or(Error::Empty("confusion matrices"))?;
        let k = first.class_count();
        let mut counts = vec![vec![0.0; k]; k];
        for (i, row) in counts.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut vals: Vec<f64> = matrices.iter().map(|m| m.counts[i][j]).collect();
                *cell = median(&mut vals);
            }
        }
        Ok(ConfusionMatrix {
            counts,
            normalized: first.normalized,
        })
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Adjusted Rand index between two labelings of the same points: 1 for
/// identical partitions (up to relabeling), ≈0 for chance agreement.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let pairs = |n: u64| (n * n.saturating_sub(1)) as f64 / 2.0;
    let index: f64 = table.iter().flatten().map(|&n| pairs(n)).sum();
    let rows: f64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let cols: f64 = (0..kb)
        .map(|j| pairs(table.iter().map(|r| r[j]).sum()))
        .sum();
    let total = pairs(a.len() as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = rows * cols / total;
    let max = (rows + cols) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_rows_sum_to_one() {
        let m = ConfusionMatrix::from_labels(&[0, 0, 1, 1, 1, 2], &[0, 1, 1, 1, 0, 2], 3).unwrap();
        assert_eq!(m.counts[1][1], 2.0);
        let n = m.normalize();
        for row in &n.counts {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert!((m.accuracy() - 4.0 / 6.0).abs() < 1e-15);
        assert!((m.mean_diagonal() - (0.5 + 2.0 / 3.0 + 1.0) / 3.0).abs() < 1e-12);
        assert!(ConfusionMatrix::from_labels(&[3], &[0], 3).is_err());
    }

    #[test]
    fn ari_is_permutation_invariant() {
        let a = [0, 0, 1, 1, 2, 2];
        let b = [2, 2, 0, 0, 1, 1];
        assert!((adjusted_rand_index(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let c = [0, 1, 0, 1, 0, 1];
        assert!(adjusted_rand_index(&a, &c).unwrap() < 0.1);
    }

    #[test]
    fn ari_matches_hand_computed_value() {
        // contingency [[2,1],[0,3]]: index=1+0+3=4, rows=3+3=6, cols=1+6=7,
        // total=15, expected=42/15, max=6.5
        let a = [0, 0, 0, 1, 1, 1];
        let b = [0, 0, 1, 1, 1, 1];
        let want = (4.0 - 42.0 / 15.0) / (6.5 - 42.0 / 15.0);
        assert!((adjusted_rand_index(&a, &b).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn entrywise_median() {
        let mk = |v: f64| ConfusionMatrix {
            counts: vec![vec![v, 1.0 - v], vec![0.0, 1.0]],
            normalized: true,
        };
        let m = ConfusionMatrix::median(&[mk(0.9), mk(0.5), mk(1.0)]).unwrap();
        assert_eq!(m.counts[0][0], 0.9);
        assert!((m.counts[0][1] - 0.1).abs() < 1e-12);
    }
}
