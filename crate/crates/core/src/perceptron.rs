//! Explicit squeezing-feature embedding and a plain perceptron on top of it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{invalid, Error, Result};
use crate::fock::{squeezed_vacuum, tensor_all, FockVector};

/// Default lower bound on the captured norm of an embedded point.
pub const MIN_CAPTURED_NORM: f64 = 0.99;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureRealification {
    #[default]
    RealPart,
    ConcatRealImag,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub c: f64,
    pub cutoff: usize,
    pub realification: FeatureRealification,
    pub min_captured_norm: f64,
}

impl Embedding {
    pub fn new(c: f64, cutoff: usize, realification: FeatureRealification) -> Self {
        Embedding {
            c,
            cutoff,
            realification,
            min_captured_norm: MIN_CAPTURED_NORM,
        }
    }

    pub fn with_min_captured_norm(mut self, bound: f64) -> Self {
        self.min_captured_norm = bound;
        self
    }

    /// `(x)_i -> tensor_i |(c, x_i)>`, checked against the captured-norm bound.
    pub fn state(&self, x: &[f64]) -> Result<FockVector> {
        if x.is_empty() {
            return invalid("cannot embed an empty input");
        }
        let modes = x
            .iter()
            .map(|&xi| squeezed_vacuum(self.c, xi, self.cutoff))
            .collect::<Result<Vec<_>>>()?;
        let state = tensor_all(&modes)?;
        let captured = state.captured_norm();
        if captured < self.min_captured_norm {
            return Err(Error::Truncation {
                cutoff: self.cutoff,
                captured,
                required: self.min_captured_norm,
            });
        }
        Ok(state)
    }

    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        let state = self.state(x)?;
        let amps = state.amplitudes();
        Ok(match self.realification {
            FeatureRealification::RealPart => amps.iter().map(|a| a.re).collect(),
            FeatureRealification::ConcatRealImag => {
                amps.iter().map(|a| a.re).chain(amps.iter().map(|a| a.im)).collect()
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<Vec<f64>>,
    pub embedding: Embedding,
    pub num_modes: usize,
}

impl FeatureMatrix {
    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Rows as CSV with a `f0,f1,...` header.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.dim()).map(|k| format!("f{k}")).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

pub fn embed_inputs(inputs: &[Vec<f64>], embedding: &Embedding) -> Result<FeatureMatrix> {
    let num_modes = inputs.first().map_or(0, Vec::len);
    if inputs.iter().any(|x| x.len() != num_modes) {
        return invalid("inputs must share one dimension");
    }
    let rows = inputs
        .par_iter()
        .map(|x| embedding.features(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMatrix {
        rows,
        embedding: *embedding,
        num_modes,
    })
}

pub fn embed_dataset(data: &LabeledDataset, embedding: &Embedding) -> Result<FeatureMatrix> {
    embed_inputs(&data.inputs, embedding)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerceptronResult {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub epochs_used: usize,
    /// Total number of updates over all epochs.
    pub mistakes: usize,
    pub final_train_accuracy: f64,
    pub converged: bool,
}

fn score(weights: &[f64], bias: f64, row: &[f64]) -> f64 {
    weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + bias
}

/// Fraction of rows with `y (w . x + b) > 0`.
pub fn perceptron_accuracy(weights: &[f64], bias: f64, rows: &[Vec<f64>], labels: &[i8]) -> f64 {
    let hits = rows
        .iter()
        .zip(labels)
        .filter(|(row, &y)| y as f64 * score(weights, bias, row) > 0.0)
        .count();
    hits as f64 / rows.len() as f64
}

/// Sign of `w . x + b`, ties to +1.
pub fn perceptron_predict(weights: &[f64], bias: f64, row: &[f64]) -> i8 {
    crate::svm::sign_label(score(weights, bias, row))
}

/// Perceptron from zero weights in fixed row order. A row counts as a mistake
/// when `y (w . x + b) <= 0`; training stops after the first epoch whose
/// weights classify every row correctly.
pub fn perceptron_train(
    features: &FeatureMatrix,
    labels: &[i8],
    max_epochs: usize,
    learning_rate: f64,
) -> Result<PerceptronResult> {
    if max_epochs < 1 {
        return invalid("max_epochs must be at least 1");
    }
    if features.rows.len() != labels.len() || labels.is_empty() {
        return invalid(format!(
            "{} feature rows but {} labels",
            features.rows.len(),
            labels.len()
        ));
    }
    let dim = features.dim();
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut mistakes = 0;
    let mut epochs_used = 0;
    let mut converged = false;
    while epochs_used < max_epochs {
        epochs_used += 1;
        for (row, &y) in features.rows.iter().zip(labels) {
            let y = y as f64;
            if y * score(&weights, bias, row) <= 0.0 {
                for (w, x) in weights.iter_mut().zip(row) {
                    *w += learning_rate * y * x;
                }
                bias += learning_rate * y;
                mistakes += 1;
            }
        }
        if perceptron_accuracy(&weights, bias, &features.rows, labels) == 1.0 {
            converged = true;
            break;
        }
    }
    let final_train_accuracy = perceptron_accuracy(&weights, bias, &features.rows, labels);
    Ok(PerceptronResult {
        weights,
        bias,
        epochs_used,
        mistakes,
        final_train_accuracy,
        converged,
    })
}
