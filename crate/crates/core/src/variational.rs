//! Two-mode variational Fock-space classifier.
//!
//! An input `(x1, x2)` is encoded as `|(c, x1)> (x) |(c, x2)>`, passed through
//! repeated gate blocks `BS -> D -> P -> V` and read out through the
//! probabilities of two photon-number outcomes, normalized to sum to one.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{invalid, Error, Result};
use crate::fock::squeezed_vacuum;
use crate::gates::{BeamsplitterBlocks, GateBuilder, DEFAULT_BUFFER, PARAM_CLAMP};
use crate::rng::SeededRng;

pub const PARAMS_PER_BLOCK: usize = 8;
pub const DEFAULT_BLOCKS: usize = 4;
pub const DEFAULT_CUTOFF: usize = 14;
pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_L2: f64 = 1e-5;
/// Minimum captured norm of the circuit output before a sample is flagged.
pub const OUTPUT_NORM_GUARD: f64 = 0.95;
const DEGENERATE_FLOOR: f64 = 1e-12;

/// `[bs_u, bs_v, d_0, d_1, p_0, p_1, v_0, v_1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GateBlockParams(pub [f64; PARAMS_PER_BLOCK]);

impl GateBlockParams {
    pub fn beamsplitter(&self) -> (f64, f64) {
        (self.0[0], self.0[1])
    }

    pub fn displacement(&self, mode: usize) -> f64 {
        self.0[2 + mode]
    }

    pub fn quadratic(&self, mode: usize) -> f64 {
        self.0[4 + mode]
    }

    pub fn cubic(&self, mode: usize) -> f64 {
        self.0[6 + mode]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationalModel {
    pub blocks: Vec<GateBlockParams>,
    pub c: f64,
    pub cutoff: usize,
    pub outcome_pair: [[usize; 2]; 2],
    pub l2: f64,
    pub seed: u64,
    /// SGD steps taken so far.
    pub step: usize,
}

impl VariationalModel {
    /// Parameters drawn uniformly from [-0.1, 0.1].
    pub fn init(num_blocks: usize, c: f64, cutoff: usize, l2: f64, seed: u64) -> Result<Self> {
        let mut rng = SeededRng::new(seed);
        let blocks = (0..num_blocks)
            .map(|_| GateBlockParams(std::array::from_fn(|_| rng.uniform_in(-0.1, 0.1))))
            .collect();
        let model = VariationalModel {
            blocks,
            c,
            cutoff,
            outcome_pair: [[2, 0], [0, 2]],
            l2,
            seed,
            step: 0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return invalid("a variational model needs at least one gate block");
        }
        if self.cutoff < 2 {
            return invalid(format!("cutoff must be at least 2, got {}", self.cutoff));
        }
        let [a, b] = self.outcome_pair;
        if a == b {
            return invalid("outcome pair must name two distinct outcomes");
        }
        if a.iter().chain(&b).any(|&n| n >= self.cutoff) {
            return invalid(format!("outcome {:?} lies above the cutoff {}", self.outcome_pair, self.cutoff));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return invalid(format!("c must be finite and non-negative, got {}", self.c));
        }
        if self.params().any(|p| !p.is_finite() || p.abs() > PARAM_CLAMP) {
            return invalid(format!("parameters must lie within +-{PARAM_CLAMP}"));
        }
        Ok(())
    }

    pub fn num_params(&self) -> usize {
        self.blocks.len() * PARAMS_PER_BLOCK
    }

    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.blocks.iter().flat_map(|b| b.0)
    }

    pub fn param(&self, k: usize) -> f64 {
        self.blocks[k / PARAMS_PER_BLOCK].0[k % PARAMS_PER_BLOCK]
    }

    pub fn set_param(&mut self, k: usize, value: f64) {
        self.blocks[k / PARAMS_PER_BLOCK].0[k % PARAMS_PER_BLOCK] = value;
    }

    fn penalty(&self) -> f64 {
        self.l2 * self.params().map(|p| p * p).sum::<f64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardOutput {
    pub p0: f64,
    pub p1: f64,
    pub o0: f64,
    pub o1: f64,
    /// Squared norm of the truncated output state.
    pub captured_norm: f64,
}

struct CompiledBlock {
    bs: BeamsplitterBlocks,
    /// `V P D` on mode 0.
    mode0: DMatrix<C64>,
    /// Transpose of `V P D` on mode 1.
    mode1_t: DMatrix<C64>,
}

/// Gate matrices for one parameter vector, built from a shared [`GateBuilder`].
pub struct Circuit<'a> {
    builder: &'a GateBuilder,
    blocks: Vec<CompiledBlock>,
}

fn compile_block(builder: &GateBuilder, p: &GateBlockParams) -> CompiledBlock {
    let (u, v) = p.beamsplitter();
    let single = |mode: usize| {
        let d = builder.displacement_matrix(C64::new(p.displacement(mode), 0.0));
        let q = builder.quadratic_phase_matrix(p.quadratic(mode));
        let k = builder.cubic_phase_matrix(p.cubic(mode));
        k * q * d
    };
    CompiledBlock {
        bs: builder.beamsplitter_blocks(u, v),
        mode0: single(0),
        mode1_t: single(1).transpose(),
    }
}

impl<'a> Circuit<'a> {
    pub fn compile(builder: &'a GateBuilder, model: &VariationalModel) -> Result<Self> {
        if builder.cutoff() != model.cutoff {
            return invalid(format!(
                "builder cutoff {} does not match model cutoff {}",
                builder.cutoff(),
                model.cutoff
            ));
        }
        Ok(Circuit {
            builder,
            blocks: model.blocks.iter().map(|b| compile_block(builder, b)).collect(),
        })
    }

    fn apply_block(&self, block: &CompiledBlock, state: &DMatrix<C64>) -> DMatrix<C64> {
        let c = self.builder.cutoff();
        // State matrix S[(n0, n1)] is the amplitude of |n0, n1>.
        let flat: Vec<C64> = (0..c * c).map(|k| state[(k / c, k % c)]).collect();
        let mixed = block.bs.apply(&flat);
        let s = DMatrix::from_row_slice(c, c, &mixed);
        &block.mode0 * s * &block.mode1_t
    }

    fn run_from(&self, start: usize, state: DMatrix<C64>, replaced: Option<&CompiledBlock>) -> DMatrix<C64> {
        let mut s = state;
        for (b, block) in self.blocks.iter().enumerate().skip(start) {
            let block = if b == start { replaced.unwrap_or(block) } else { block };
            s = self.apply_block(block, &s);
        }
        s
    }
}

fn input_state(model: &VariationalModel, x: &[f64]) -> Result<DMatrix<C64>> {
    if x.len() != 2 {
        return invalid(format!("variational classifier takes 2-d inputs, got {}", x.len()));
    }
    let a = squeezed_vacuum(model.c, x[0], model.cutoff)?;
    let b = squeezed_vacuum(model.c, x[1], model.cutoff)?;
    let (a, b) = (a.amplitudes(), b.amplitudes());
    Ok(DMatrix::from_fn(model.cutoff, model.cutoff, |i, j| a[i] * b[j]))
}

fn readout(model: &VariationalModel, out: &DMatrix<C64>) -> ForwardOutput {
    let [a, b] = model.outcome_pair;
    let o0 = out[(a[0], a[1])].norm_sqr();
    let o1 = out[(b[0], b[1])].norm_sqr();
    let total = o0 + o1;
    let captured_norm = out.iter().map(|z| z.norm_sqr()).sum();
    if captured_norm < OUTPUT_NORM_GUARD {
        log::debug!("output captured norm {captured_norm:.4} below {OUTPUT_NORM_GUARD}");
    }
    let (p0, p1) = if total > 0.0 { (o0 / total, o1 / total) } else { (0.5, 0.5) };
    ForwardOutput {
        p0,
        p1,
        o0,
        o1,
        captured_norm,
    }
}

fn checked(out: ForwardOutput) -> Result<ForwardOutput> {
    if out.o0 + out.o1 < DEGENERATE_FLOOR {
        return Err(Error::DegenerateOutput(out.o0 + out.o1));
    }
    Ok(out)
}

/// Evaluates models at one cutoff with a shared gate cache.
pub struct Simulator {
    builder: GateBuilder,
}

impl Simulator {
    pub fn new(cutoff: usize) -> Result<Self> {
        Ok(Simulator {
            builder: GateBuilder::new(cutoff, DEFAULT_BUFFER)?,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.builder.cutoff()
    }

    pub fn compile<'a>(&'a self, model: &VariationalModel) -> Result<Circuit<'a>> {
        Circuit::compile(&self.builder, model)
    }

    /// Raw and normalized outcome probabilities.
    pub fn forward(&self, model: &VariationalModel, x: &[f64]) -> Result<ForwardOutput> {
        let circuit = self.compile(model)?;
        self.forward_compiled(&circuit, model, x)
    }

    pub fn forward_compiled(&self, circuit: &Circuit, model: &VariationalModel, x: &[f64]) -> Result<ForwardOutput> {
        let out = circuit.run_from(0, input_state(model, x)?, None);
        checked(readout(model, &out))
    }

    /// Output state amplitudes, row-major over `(n0, n1)`.
    pub fn output_state(&self, model: &VariationalModel, x: &[f64]) -> Result<Vec<C64>> {
        let circuit = self.compile(model)?;
        let out = circuit.run_from(0, input_state(model, x)?, None);
        let c = model.cutoff;
        Ok((0..c * c).map(|k| out[(k / c, k % c)]).collect())
    }

    /// Mean squared error to one-hot targets plus `l2 |theta|^2`.
    pub fn loss(&self, model: &VariationalModel, data: &LabeledDataset) -> Result<f64> {
        if data.is_empty() {
            return invalid("loss of an empty dataset");
        }
        let circuit = self.compile(model)?;
        let mut total = 0.0;
        for (i, x) in data.inputs.iter().enumerate() {
            let out = self.forward_compiled(&circuit, model, x)?;
            total += sample_loss(out, data.binary_label(i));
        }
        Ok(total / data.len() as f64 + model.penalty())
    }

    /// Class with the larger probability; ties go to class 0.
    pub fn predict(&self, model: &VariationalModel, x: &[f64]) -> Result<u8> {
        Ok(predict_label(self.forward(model, x)?))
    }

    pub fn accuracy(&self, model: &VariationalModel, data: &LabeledDataset) -> Result<f64> {
        if data.is_empty() {
            return invalid("accuracy of an empty dataset");
        }
        let circuit = self.compile(model)?;
        let mut hits = 0;
        for (i, x) in data.inputs.iter().enumerate() {
            let out = self.forward_compiled(&circuit, model, x)?;
            hits += (predict_label(out) == data.binary_label(i)) as usize;
        }
        Ok(hits as f64 / data.len() as f64)
    }

    /// Batch loss where degenerate outputs count as (0.5, 0.5).
    fn lenient_batch_loss(&self, model: &VariationalModel, circuit: &Circuit, batch: &[(DMatrix<C64>, u8)]) -> f64 {
        let total: f64 = batch
            .iter()
            .map(|(s, y)| {
                let out = readout(model, &circuit.run_from(0, s.clone(), None));
                sample_loss(lenient(out), *y)
            })
            .sum();
        total / batch.len() as f64 + model.penalty()
    }

    /// Central-difference gradient of the lenient batch loss.
    pub fn gradient(&self, model: &VariationalModel, data: &LabeledDataset, batch: &[usize], h: f64) -> Result<Vec<f64>> {
        let prepared = batch
            .iter()
            .map(|&i| Ok((input_state(model, &data.inputs[i])?, data.binary_label(i))))
            .collect::<Result<Vec<_>>>()?;
        let circuit = self.compile(model)?;
        Ok(self.gradient_prepared(model, &circuit, &prepared, h))
    }

    fn gradient_prepared(
        &self,
        model: &VariationalModel,
        circuit: &Circuit,
        batch: &[(DMatrix<C64>, u8)],
        h: f64,
    ) -> Vec<f64> {
        // prefixes[i][b]: state of sample i before block b.
        let prefixes: Vec<Vec<DMatrix<C64>>> = batch
            .iter()
            .map(|(s, _)| {
                let mut states = vec![s.clone()];
                for block in &circuit.blocks {
                    let next = circuit.apply_block(block, states.last().expect("nonempty"));
                    states.push(next);
                }
                states
            })
            .collect();
        let n = batch.len() as f64;
        (0..model.num_params())
            .into_par_iter()
            .map(|k| {
                let b = k / PARAMS_PER_BLOCK;
                let eval = |delta: f64| {
                    let mut params = model.blocks[b];
                    params.0[k % PARAMS_PER_BLOCK] += delta;
                    let block = compile_block(circuit.builder, &params);
                    let data_term: f64 = batch
                        .iter()
                        .zip(&prefixes)
                        .map(|((_, y), pre)| {
                            let out = circuit.run_from(b, pre[b].clone(), Some(&block));
                            sample_loss(lenient(readout(model, &out)), *y)
                        })
                        .sum();
                    let theta = model.param(k) + delta;
                    data_term / n + model.l2 * theta * theta
                };
                // The rest of the penalty cancels in the difference.
                (eval(h) - eval(-h)) / (2.0 * h)
            })
            .collect()
    }
}

fn lenient(out: ForwardOutput) -> ForwardOutput {
    if out.o0 + out.o1 < DEGENERATE_FLOOR {
        log::warn!("degenerate circuit output (o0 + o1 = {:e}); using p = (0.5, 0.5)", out.o0 + out.o1);
        ForwardOutput { p0: 0.5, p1: 0.5, ..out }
    } else {
        out
    }
}

fn sample_loss(out: ForwardOutput, label: u8) -> f64 {
    let (t0, t1) = if label == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
    (out.p0 - t0).powi(2) + (out.p1 - t1).powi(2)
}

pub fn predict_label(out: ForwardOutput) -> u8 {
    (out.p1 > out.p0) as u8
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub steps: usize,
    pub batch_size: usize,
    /// Learning rate `lr0 / (1 + decay t)`.
    pub lr0: f64,
    pub decay: f64,
    pub fd_step: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            steps: 5000,
            batch_size: 5,
            lr0: 0.1,
            decay: 0.005,
            fd_step: 1e-3,
        }
    }
}

impl TrainConfig {
    pub fn learning_rate(&self, t: usize) -> f64 {
        self.lr0 / (1.0 + self.decay * t as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub batch_loss: f64,
    pub train_accuracy: f64,
}

pub fn write_trace_csv<W: Write>(mut out: W, trace: &[TraceRow]) -> io::Result<()> {
    writeln!(out, "step,batch_loss,train_accuracy")?;
    for row in trace {
        writeln!(out, "{},{:.16e},{:.16e}", row.step, row.batch_loss, row.train_accuracy)?;
    }
    Ok(())
}

fn batch_rng(seed: u64, step: usize) -> SeededRng {
    SeededRng::new(seed ^ (step as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// SGD with finite-difference gradients, starting from `model.step`.
///
/// Batches depend only on `(model.seed, step)`, so training `a` then `b` steps
/// matches training `a + b` steps at once. Each trace row holds the batch loss
/// before the update and the training accuracy after it.
pub fn train(
    sim: &Simulator,
    model: &VariationalModel,
    data: &LabeledDataset,
    config: &TrainConfig,
) -> Result<(VariationalModel, Vec<TraceRow>)> {
    model.validate()?;
    if config.batch_size < 1 || config.batch_size > data.len() {
        return invalid(format!(
            "batch size {} must lie in 1..={}",
            config.batch_size,
            data.len()
        ));
    }
    if data.dim() != 2 {
        return invalid("variational classifier takes 2-d inputs");
    }
    let states = data
        .inputs
        .iter()
        .enumerate()
        .map(|(i, x)| Ok((input_state(model, x)?, data.binary_label(i))))
        .collect::<Result<Vec<_>>>()?;
    let mut model = model.clone();
    let mut trace = Vec::with_capacity(config.steps);
    for _ in 0..config.steps {
        let t = model.step;
        let idx = batch_rng(model.seed, t).sample_indices(data.len(), config.batch_size);
        let batch: Vec<(DMatrix<C64>, u8)> = idx.iter().map(|&i| states[i].clone()).collect();
        let circuit = sim.compile(&model)?;
        let batch_loss = sim.lenient_batch_loss(&model, &circuit, &batch);
        if !batch_loss.is_finite() {
            return Err(Error::NonFiniteLoss { step: t + 1 });
        }
        let grad = sim.gradient_prepared(&model, &circuit, &batch, config.fd_step);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss { step: t + 1 });
        }
        let lr = config.learning_rate(t);
        for (k, g) in grad.iter().enumerate() {
            let v = (model.param(k) - lr * g).clamp(-PARAM_CLAMP, PARAM_CLAMP);
            model.set_param(k, v);
        }
        model.step += 1;
        let circuit = sim.compile(&model)?;
        let hits = states
            .iter()
            .filter(|(s, y)| predict_label(lenient(readout(&model, &circuit.run_from(0, s.clone(), None)))) == *y)
            .count();
        trace.push(TraceRow {
            step: model.step,
            batch_loss,
            train_accuracy: hits as f64 / data.len() as f64,
        });
    }
    Ok((model, trace))
}
