//! Linear-independence and separability checks for squeezing-embedded data.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::perceptron::{Embedding, FeatureMatrix, FeatureRealification, MIN_CAPTURED_NORM};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_RTOL: f64 = 1e-10;

/// Smallest pairwise factor still treated as nonzero.
pub const PAIR_FACTOR_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VandermondeReport {
    pub distinct: bool,
    /// `|e^{i phi_j} - e^{i phi_i}| tanh c` for `i < j`, row by row.
    pub pair_products: Vec<f64>,
    /// Product of all pair factors.
    pub det_magnitude: f64,
}

/// Squeezed states `|(c, phi_k)>` are independent iff the nodes
/// `-e^{i phi_k} tanh c` are pairwise distinct.
pub fn vandermonde_check(phases: &[f64], c: f64) -> Result<VandermondeReport> {
    if phases.is_empty() {
        return invalid("vandermonde_check needs at least one phase");
    }
    if !(c > 0.0) {
        return invalid(format!("c must be positive, got {c}"));
    }
    let t = c.tanh();
    let mut pair_products = Vec::new();
    for (i, &a) in phases.iter().enumerate() {
        for &b in &phases[i + 1..] {
            pair_products.push((C64::cis(b) - C64::cis(a)).norm() * t);
        }
    }
    Ok(VandermondeReport {
        distinct: pair_products.iter().all(|&p| p > PAIR_FACTOR_FLOOR),
        det_magnitude: pair_products.iter().product(),
        pair_products,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    #[serde(rename = "M")]
    pub m: usize,
    pub cutoff: usize,
    pub c: f64,
    pub feature_dim: usize,
    pub rank: usize,
    pub min_singular_value: f64,
    pub independent: bool,
}

/// Number of singular values above `RANK_RTOL * sigma_max`, and the singular values.
pub fn numerical_rank<T: ComplexField<RealField = f64>>(matrix: &DMatrix<T>) -> (usize, Vec<f64>) {
    if matrix.is_empty() {
        return (0, Vec::new());
    }
    let sv: Vec<f64> = matrix.clone().singular_values().iter().copied().collect();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return (0, sv);
    }
    (sv.iter().filter(|&&s| s > RANK_RTOL * max).count(), sv)
}

pub fn design_matrix_rank(points: &[Vec<f64>], c: f64, cutoff: usize) -> Result<RankReport> {
    design_matrix_rank_guarded(points, c, cutoff, MIN_CAPTURED_NORM)
}

/// Rank of the `M x cutoff^d` matrix of complex embedded amplitudes.
pub fn design_matrix_rank_guarded(
    points: &[Vec<f64>],
    c: f64,
    cutoff: usize,
    min_captured_norm: f64,
) -> Result<RankReport> {
    let m = points.len();
    if m == 0 {
        return invalid("design_matrix_rank needs at least one point");
    }
    let d = points[0].len();
    if d == 0 || points.iter().any(|p| p.len() != d) {
        return invalid("points must share one nonzero dimension");
    }
    // Only even levels are populated: ceil(cutoff / 2)^d usable directions.
    let even_levels = cutoff.div_ceil(2);
    let room_ok = if d == 1 {
        cutoff >= 2 * m
    } else {
        (even_levels as f64).powi(d as i32) >= m as f64
    };
    if !room_ok {
        return invalid(format!("cutoff {cutoff} leaves too few even levels for {m} points in {d} dimensions"));
    }
    let embedding = Embedding::new(c, cutoff, FeatureRealification::RealPart).with_min_captured_norm(min_captured_norm);
    let states = points.iter().map(|p| embedding.state(p)).collect::<Result<Vec<_>>>()?;
    let dim = states[0].dim();
    let matrix = DMatrix::from_fn(m, dim, |i, j| states[i].amplitudes()[j]);
    let (rank, sv) = numerical_rank(&matrix);
    Ok(RankReport {
        m,
        cutoff,
        c,
        feature_dim: dim,
        rank,
        min_singular_value: sv.iter().copied().fold(f64::INFINITY, f64::min),
        independent: rank == m,
    })
}

fn augmented(rows: &[Vec<f64>], labels: Option<&[i8]>) -> DMatrix<f64> {
    let d = rows.first().map_or(0, Vec::len);
    let extra = 1 + labels.is_some() as usize;
    DMatrix::from_fn(rows.len(), d + extra, |i, j| {
        if j < d {
            rows[i][j]
        } else if j == d {
            1.0
        } else {
            labels.map_or(0.0, |y| y[i] as f64)
        }
    })
}

/// `rank [X | 1] == rank [X | 1 | y]`: some affine function hits every label exactly.
pub fn separability_feasible_rows(rows: &[Vec<f64>], labels: &[i8]) -> Result<bool> {
    if rows.len() != labels.len() || rows.is_empty() {
        return invalid(format!("{} rows but {} labels", rows.len(), labels.len()));
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return invalid("rows must share one dimension");
    }
    let (coef, _) = numerical_rank(&augmented(rows, None));
    let (aug, _) = numerical_rank(&augmented(rows, Some(labels)));
    Ok(coef == aug)
}

pub fn separability_feasible(features: &FeatureMatrix, labels: &[i8]) -> Result<bool> {
    separability_feasible_rows(&features.rows, labels)
}
