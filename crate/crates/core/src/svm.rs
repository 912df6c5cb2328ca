//! Soft-margin C-SVM trained by SMO on a precomputed Gram matrix.
//!
//! The solver minimizes `1/2 a^T Q a - e^T a` with `Q_ij = y_i y_j K_ij`,
//! `0 <= a_i <= C` and `y^T a = 0`, picking the maximal violating pair each
//! iteration.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{invalid, Result};
use crate::kernels::{gram, kernel_eval_real, KernelSpec};

const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: 1e-3,
            max_iter: 10_000_000,
        }
    }
}

impl SvmParams {
    pub fn with_c(c: f64) -> Self {
        SvmParams {
            c,
            ..Default::default()
        }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmMetadata {
    pub tol: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gram_min_eigenvalue: f64,
    pub gram_clipped: bool,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub c: f64,
    pub support_indices: Vec<usize>,
    /// `y_m a_m`, signed by label.
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub support_vectors: Vec<Vec<f64>>,
    pub metadata: SvmMetadata,
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub model: SvmModel,
    /// Dual objective `e^T a - 1/2 a^T Q a` after each iteration.
    pub objective_trace: Vec<f64>,
}

/// Replace a Gram matrix whose smallest eigenvalue is below `-1e-6 M` by its
/// projection onto the PSD cone.
fn clip_spectrum(k: DMatrix<f64>) -> (DMatrix<f64>, f64, bool) {
    let m = k.nrows();
    let eig = k.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= -1e-6 * m as f64 {
        return (k, min, false);
    }
    log::warn!("gram matrix not PSD (min eigenvalue {min:e}); clipping negative spectrum");
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let q = &eig.eigenvectors;
    let rebuilt = q * DMatrix::from_diagonal(&clipped) * q.transpose();
    (rebuilt, min, true)
}

pub fn svm_train(data: &LabeledDataset, spec: &KernelSpec, params: &SvmParams) -> Result<SvmModel> {
    Ok(train_impl(data, spec, params, false)?.model)
}

/// As [`svm_train`], also recording the dual objective per iteration.
pub fn svm_train_traced(
    data: &LabeledDataset,
    spec: &KernelSpec,
    params: &SvmParams,
) -> Result<TrainReport> {
    train_impl(data, spec, params, true)
}

fn train_impl(
    data: &LabeledDataset,
    spec: &KernelSpec,
    params: &SvmParams,
    record: bool,
) -> Result<TrainReport> {
    let m = data.len();
    if m < 2 {
        return invalid("svm training needs at least 2 samples");
    }
    let pos = data.count_positive();
    if pos == 0 || pos == m {
        return invalid("svm training needs both classes present");
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return invalid(format!("C must be positive, got {}", params.c));
    }
    if !(params.tol > 0.0) {
        return invalid(format!("tol must be positive, got {}", params.tol));
    }
    // Reject the complex realification up front.
    kernel_eval_real(spec, &data.inputs[0], &data.inputs[0])?;
    let k = gram(spec, &data.inputs)?.real_entries();
    let (k, min_eig, clipped) = clip_spectrum(k);
    let y: Vec<f64> = data.labels.iter().map(|&l| l as f64).collect();
    let q = DMatrix::from_fn(m, m, |i, j| y[i] * y[j] * k[(i, j)]);
    let c = params.c;

    let mut alpha = vec![0.0; m];
    let mut grad = vec![-1.0; m];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let is_upper = |a: f64| a >= c;
    let is_lower = |a: f64| a <= 0.0;

    while iterations < params.max_iter {
        let mut g_max = f64::NEG_INFINITY;
        let mut g_min = f64::INFINITY;
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..m {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 { !is_upper(alpha[t]) } else { !is_lower(alpha[t]) };
            let in_low = if y[t] > 0.0 { !is_lower(alpha[t]) } else { !is_upper(alpha[t]) };
            if in_up && v > g_max {
                g_max = v;
                i = t;
            }
            if in_low && v < g_min {
                g_min = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || g_max - g_min < params.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (q[(i, i)] + q[(j, j)] + 2.0 * q[(i, j)]).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (q[(i, i)] + q[(j, j)] - 2.0 * q[(i, j)]).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..m {
            grad[t] += q[(t, i)] * di + q[(t, j)] * dj;
        }
        if record {
            trace.push(alpha.iter().zip(&grad).map(|(a, g)| -0.5 * a * (g - 1.0)).sum());
        }
    }
    if !converged {
        log::warn!("SMO stopped at max_iter={} before reaching tol", params.max_iter);
    }

    // rho: mean of y_i G_i over free vectors, else midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_count) = (0.0, 0usize);
    for t in 0..m {
        let yg = y[t] * grad[t];
        if is_upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if is_lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum += yg;
            free_count += 1;
        }
    }
    let rho = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        0.5 * (ub + lb)
    };

    let support_indices: Vec<usize> = (0..m).filter(|&t| alpha[t] > 0.0).collect();
    let model = SvmModel {
        kernel: *spec,
        c,
        alphas: support_indices.iter().map(|&t| y[t] * alpha[t]).collect(),
        support_vectors: support_indices.iter().map(|&t| data.inputs[t].clone()).collect(),
        support_indices,
        bias: -rho,
        metadata: SvmMetadata {
            tol: params.tol,
            iterations,
            converged,
            gram_min_eigenvalue: min_eig,
            gram_clipped: clipped,
            seed: None,
        },
    };
    Ok(TrainReport {
        model,
        objective_trace: trace,
    })
}

/// `sum_m a_m k(x, x_m) + b`.
pub fn svm_decision(model: &SvmModel, x: &[f64]) -> Result<f64> {
    let dim = model.support_vectors.first().map_or(x.len(), Vec::len);
    if x.len() != dim {
        return invalid(format!("input has dimension {}, model expects {dim}", x.len()));
    }
    let mut f = model.bias;
    for (a, sv) in model.alphas.iter().zip(&model.support_vectors) {
        f += a * kernel_eval_real(&model.kernel, x, sv)?;
    }
    Ok(f)
}

/// Sign of the decision value; exact zero maps to +1.
pub fn svm_predict(model: &SvmModel, x: &[f64]) -> Result<i8> {
    Ok(sign_label(svm_decision(model, x)?))
}

pub(crate) fn sign_label(f: f64) -> i8 {
    if f >= 0.0 {
        1
    } else {
        -1
    }
}

pub fn svm_accuracy(model: &SvmModel, data: &LabeledDataset) -> Result<f64> {
    if data.is_empty() {
        return invalid("accuracy of an empty dataset");
    }
    let mut hits = 0;
    for (x, &y) in data.inputs.iter().zip(&data.labels) {
        hits += (svm_predict(model, x)? == y) as usize;
    }
    Ok(hits as f64 / data.len() as f64)
}

/// Decision values through an explicit kernel row, for cross-checking.
pub fn svm_decision_from_row(model: &SvmModel, row: &DVector<f64>) -> f64 {
    model.alphas.iter().zip(row.iter()).map(|(a, k)| a * k).sum::<f64>() + model.bias
}
