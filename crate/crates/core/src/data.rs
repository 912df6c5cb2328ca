//! Two-dimensional benchmark datasets and decision-grid evaluation.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::SeededRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Moons,
    Circles,
    Blobs,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Moons, Family::Circles, Family::Blobs];

    pub fn name(self) -> &'static str {
        match self {
            Family::Moons => "moons",
            Family::Circles => "circles",
            Family::Blobs => "blobs",
        }
    }

    /// Noise std for moons and circles, cluster std for blobs.
    pub fn default_noise(self) -> f64 {
        match self {
            Family::Blobs => 0.15,
            _ => 0.1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moons" => Ok(Family::Moons),
            "circles" => Ok(Family::Circles),
            "blobs" => Ok(Family::Blobs),
            other => invalid(format!("unknown dataset family `{other}` (moons, circles, blobs)")),
        }
    }
}

/// Named sample-count presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// 50 train / 150 test.
    #[serde(rename = "fig4")]
    Fig4,
    /// 150 train / 50 test.
    #[serde(rename = "fig4-swapped")]
    Fig4Swapped,
    /// 500 train / 100 test.
    #[serde(rename = "fig4-row2")]
    Fig4Row2,
    /// Blobs, 70 train / 20 test.
    #[serde(rename = "fig5")]
    Fig5,
    /// Moons, 150 train / 50 test.
    #[serde(rename = "fig7")]
    Fig7,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::Fig4Swapped => "fig4-swapped",
            Preset::Fig4Row2 => "fig4-row2",
            Preset::Fig5 => "fig5",
            Preset::Fig7 => "fig7",
        }
    }

    pub fn counts(self) -> (usize, usize) {
        match self {
            Preset::Fig4 => (50, 150),
            Preset::Fig4Swapped => (150, 50),
            Preset::Fig4Row2 => (500, 100),
            Preset::Fig5 => (70, 20),
            Preset::Fig7 => (150, 50),
        }
    }

    pub fn default_family(self) -> Family {
        match self {
            Preset::Fig5 => Family::Blobs,
            _ => Family::Moons,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig4" => Ok(Preset::Fig4),
            "fig4-swapped" => Ok(Preset::Fig4Swapped),
            "fig4-row2" => Ok(Preset::Fig4Row2),
            "fig5" => Ok(Preset::Fig5),
            "fig7" => Ok(Preset::Fig7),
            other => invalid(format!(
                "unknown preset `{other}` (fig4, fig4-swapped, fig4-row2, fig5, fig7)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub family: Family,
    pub n_train: usize,
    pub n_test: usize,
    pub noise: f64,
    pub seed: u64,
    pub standardize_to: (f64, f64),
}

impl DatasetSpec {
    pub fn new(family: Family, n_train: usize, n_test: usize, seed: u64) -> Self {
        DatasetSpec {
            family,
            n_train,
            n_test,
            noise: family.default_noise(),
            seed,
            standardize_to: (-1.0, 1.0),
        }
    }

    pub fn preset(preset: Preset, family: Family, seed: u64) -> Self {
        let (n_train, n_test) = preset.counts();
        DatasetSpec::new(family, n_train, n_test, seed)
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_train < 1 || self.n_test < 1 {
            return invalid("n_train and n_test must both be at least 1");
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return invalid(format!("noise must be finite and non-negative, got {}", self.noise));
        }
        let (lo, hi) = self.standardize_to;
        if !(lo < hi) {
            return invalid(format!("standardization interval [{lo}, {hi}] is empty"));
        }
        Ok(())
    }
}

/// Inputs with labels in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<i8>,
    pub split: Split,
}

impl LabeledDataset {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<i8>, split: Split) -> Result<Self> {
        if inputs.len() != labels.len() {
            return invalid(format!("{} inputs but {} labels", inputs.len(), labels.len()));
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return invalid("labels must be -1 or +1");
        }
        if let Some(first) = inputs.first() {
            if inputs.iter().any(|x| x.len() != first.len()) {
                return invalid("inputs must share one dimension");
            }
        }
        Ok(LabeledDataset {
            inputs,
            labels,
            split,
        })
    }

    /// Build from {0, 1} labels.
    pub fn from_binary(inputs: Vec<Vec<f64>>, labels01: &[u8], split: Split) -> Result<Self> {
        if labels01.iter().any(|&y| y > 1) {
            return invalid("binary labels must be 0 or 1");
        }
        let labels = labels01.iter().map(|&y| if y == 1 { 1 } else { -1 }).collect();
        LabeledDataset::new(inputs, labels, split)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    /// Label as 0 or 1.
    pub fn binary_label(&self, i: usize) -> u8 {
        (self.labels[i] == 1) as u8
    }

    pub fn count_positive(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Benchmark {
    pub spec: DatasetSpec,
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

fn raw_points(spec: &DatasetSpec, rng: &mut SeededRng) -> (Vec<[f64; 2]>, Vec<i8>) {
    let n = spec.n_train + spec.n_test;
    let n_out = n / 2;
    let n_in = n - n_out;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    match spec.family {
        Family::Moons => {
            let step = |count: usize| if count > 1 { std::f64::consts::PI / (count - 1) as f64 } else { 0.0 };
            for i in 0..n_out {
                let t = i as f64 * step(n_out);
                points.push([t.cos(), t.sin()]);
                labels.push(-1);
            }
            for i in 0..n_in {
                let t = i as f64 * step(n_in);
                points.push([1.0 - t.cos(), 1.0 - t.sin() - 0.5]);
                labels.push(1);
            }
        }
        Family::Circles => {
            for (count, radius, label) in [(n_out, 1.0, -1), (n_in, 0.5, 1)] {
                for i in 0..count {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                    points.push([radius * t.cos(), radius * t.sin()]);
                    labels.push(label);
                }
            }
        }
        Family::Blobs => {
            let centers: Vec<[f64; 2]> = (0..2)
                .map(|_| [rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)])
                .collect();
            for (count, center, label) in [(n_out, centers[0], -1), (n_in, centers[1], 1)] {
                for _ in 0..count {
                    points.push(center);
                    labels.push(label);
                }
            }
        }
    }
    if spec.noise > 0.0 {
        for p in &mut points {
            p[0] += spec.noise * rng.normal();
            p[1] += spec.noise * rng.normal();
        }
    }
    (points, labels)
}

/// Map each feature's min and max exactly onto `lo` and `hi`. Constant features go to the midpoint.
pub fn standardize(points: &mut [Vec<f64>], (lo, hi): (f64, f64)) {
    let Some(first) = points.first() else { return };
    for d in 0..first.len() {
        let (min, max) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[d]), b.max(p[d])));
        for p in points.iter_mut() {
            p[d] = if max == min {
                0.5 * (lo + hi)
            } else if p[d] == max {
                hi
            } else {
                lo + (p[d] - min) * (hi - lo) / (max - min)
            };
        }
    }
}

/// Generate, shuffle, standardize and split.
pub fn generate(spec: &DatasetSpec) -> Result<Benchmark> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let (points, labels) = raw_points(spec, &mut rng);
    let mut order: Vec<usize> = (0..points.len()).collect();
    rng.shuffle(&mut order);
    let mut inputs: Vec<Vec<f64>> = order.iter().map(|&i| points[i].to_vec()).collect();
    let labels: Vec<i8> = order.iter().map(|&i| labels[i]).collect();
    standardize(&mut inputs, spec.standardize_to);
    let test_inputs = inputs.split_off(spec.n_train);
    let train = LabeledDataset::new(inputs, labels[..spec.n_train].to_vec(), Split::Train)?;
    let test = LabeledDataset::new(test_inputs, labels[spec.n_train..].to_vec(), Split::Test)?;
    Ok(Benchmark {
        spec: spec.clone(),
        train,
        test,
    })
}

/// Header `x1,x2,label,split`; labels written as 0/1.
pub fn write_dataset_csv<W: Write>(mut out: W, sets: &[&LabeledDataset]) -> io::Result<()> {
    writeln!(out, "x1,x2,label,split")?;
    for set in sets {
        let split = match set.split {
            Split::Train => "train",
            Split::Test => "test",
        };
        for (i, x) in set.inputs.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{},{}", x[0], x[1], set.binary_label(i), split)?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridEvaluation {
    pub resolution: usize,
    pub bounds: (f64, f64),
    /// Row-major, `values[iy * resolution + ix]`.
    pub values: Vec<f64>,
}

impl GridEvaluation {
    pub fn coordinate(&self, i: usize) -> f64 {
        grid_coordinate(i, self.resolution, self.bounds)
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.resolution + ix]
    }

    /// Header `gx,gy,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "gx,gy,value")?;
        for iy in 0..self.resolution {
            for ix in 0..self.resolution {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e}",
                    self.coordinate(ix),
                    self.coordinate(iy),
                    self.value(ix, iy)
                )?;
            }
        }
        Ok(())
    }
}

fn grid_coordinate(i: usize, resolution: usize, (lo, hi): (f64, f64)) -> f64 {
    if i + 1 == resolution {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (resolution - 1) as f64
    }
}

/// Evaluate `predictor` on a uniform `resolution x resolution` grid over `bounds^2`.
pub fn grid_eval<F>(predictor: F, resolution: usize, bounds: (f64, f64)) -> Result<GridEvaluation>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if resolution < 2 {
        return invalid(format!("grid resolution must be at least 2, got {resolution}"));
    }
    let values = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let x = grid_coordinate(k % resolution, resolution, bounds);
            let y = grid_coordinate(k / resolution, resolution, bounds);
            predictor(&[x, y]).map_err(|e| Error::Grid {
                x,
                y,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridEvaluation {
        resolution,
        bounds,
        values,
    })
}
