//! Command-line front end. Every command writes `config.json` next to its outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::json;

use crate::data::{generate, grid_eval, write_dataset_csv, Benchmark, DatasetSpec, Family, GridEvaluation, Preset};
use crate::error::{Error, Result};
use crate::fock::{coherent, inner, squeezed_vacuum};
use crate::kernels::{coherent_overlap, gram, squeezing_overlap_1d, KernelFamily, KernelSpec, Realification};
use crate::perceptron::{
    embed_dataset, perceptron_accuracy, perceptron_train, Embedding, FeatureRealification,
};
use crate::rng::SeededRng;
use crate::separability::{design_matrix_rank, vandermonde_check};
use crate::svm::{svm_accuracy, svm_decision, svm_train, SvmParams};
use crate::variational::{self, train, Simulator, TrainConfig, VariationalModel};

pub const SCHEMA: u32 = 1;
pub const THREADS_ENV: &str = "FOCKKERNEL_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fockkernel", version, about = "Squeezing-kernel classifiers on a truncated Fock simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark dataset as CSV.
    Gen(GenArgs),
    /// Train kernel SVMs, one per squeezing strength.
    Svm(SvmArgs),
    /// Train a perceptron on explicitly embedded features.
    Perceptron(PerceptronArgs),
    /// Train the variational two-mode classifier.
    Variational(VariationalArgs),
    /// Run the numerical consistency checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    Moons,
    Circles,
    Blobs,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Moons => Family::Moons,
            FamilyArg::Circles => Family::Circles,
            FamilyArg::Blobs => Family::Blobs,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PresetArg {
    Fig4,
    #[value(name = "fig4-swapped")]
    Fig4Swapped,
    #[value(name = "fig4-row2")]
    Fig4Row2,
    Fig5,
    Fig7,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Fig4 => Preset::Fig4,
            PresetArg::Fig4Swapped => Preset::Fig4Swapped,
            PresetArg::Fig4Row2 => Preset::Fig4Row2,
            PresetArg::Fig5 => Preset::Fig5,
            PresetArg::Fig7 => Preset::Fig7,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum KernelArg {
    DeltaBasis,
    LinearAmplitude,
    PolynomialCopies,
    CosineProduct,
    SqueezingPhase,
    CoherentGaussian,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum RealArg {
    AbsSquare,
    RealPart,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FeatureArg {
    RealPart,
    ConcatRealImag,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset family; defaults to the preset's family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Noise std (cluster std for blobs); defaults per family.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl DataArgs {
    fn resolve(&self, default_preset: Preset) -> DatasetSpec {
        let preset = self.preset.map(Preset::from).unwrap_or(default_preset);
        let family = self.family.map(Family::from).unwrap_or(preset.default_family());
        let mut spec = DatasetSpec::preset(preset, family, self.seed);
        if let Some(n) = self.n_train {
            spec.n_train = n;
        }
        if let Some(n) = self.n_test {
            spec.n_test = n;
        }
        if let Some(noise) = self.noise {
            spec.noise = noise;
        }
        spec
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Evaluate the model on an N x N grid over [-1, 1]^2.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    /// Also rasterize the grid to PNG.
    #[arg(long, requires = "grid")]
    pub png: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SvmArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "squeezing_phase")]
    pub kernel: KernelArg,
    /// Squeezing strengths; one model per value.
    #[arg(long = "c", value_delimiter = ',', default_value = "1.5")]
    pub c: Vec<f64>,
    /// Polynomial degree for polynomial_copies.
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, value_enum, default_value = "abs_square")]
    pub realification: RealArg,
    /// SVM regularization constant.
    #[arg(long = "C", default_value_t = 1.0)]
    pub reg: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PerceptronArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long = "c", default_value_t = 1.5)]
    pub c: f64,
    #[arg(long, default_value_t = 42)]
    pub cutoff: usize,
    #[arg(long, value_enum, default_value = "real_part")]
    pub realification: FeatureArg,
    #[arg(long, default_value_t = crate::perceptron::MIN_CAPTURED_NORM)]
    pub min_captured_norm: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_epochs: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lr: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VariationalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 5000)]
    pub steps: usize,
    #[arg(long, default_value_t = 5)]
    pub batch_size: usize,
    #[arg(long, default_value_t = variational::DEFAULT_BLOCKS)]
    pub blocks: usize,
    #[arg(long = "c", default_value_t = variational::DEFAULT_C)]
    pub c: f64,
    #[arg(long, default_value_t = variational::DEFAULT_CUTOFF)]
    pub cutoff: usize,
    #[arg(long, default_value_t = variational::DEFAULT_L2)]
    pub l2: f64,
    #[arg(long, default_value_t = 0.1)]
    pub lr0: f64,
    #[arg(long, default_value_t = 0.005)]
    pub decay: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Fock cutoff for the kernel-vs-simulation overlap check.
    #[arg(long, default_value_t = 160)]
    pub cutoff: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_file(path, |w| writeln!(w, "{text}"))
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_config(dir: &Path, command: &str, body: serde_json::Value) -> Result<()> {
    let mut config = json!({ "schema": SCHEMA, "command": command });
    if let (Some(obj), serde_json::Value::Object(extra)) = (config.as_object_mut(), body) {
        obj.extend(extra);
    }
    write_json(&dir.join("config.json"), &config)
}

/// Blue for negative, red for positive; `values` scaled to [-1, 1].
pub fn write_grid_png(path: &Path, grid: &GridEvaluation, scaled: &[f64]) -> Result<()> {
    let n = grid.resolution;
    let mut pixels = Vec::with_capacity(n * n * 3);
    // Image row 0 is the top, i.e. the largest gy.
    for iy in (0..n).rev() {
        for ix in 0..n {
            let t = scaled[iy * n + ix].clamp(-1.0, 1.0);
            let (target, w) = if t < 0.0 { ([59.0, 76.0, 192.0], -t) } else { ([180.0, 4.0, 38.0], t) };
            for channel in target {
                pixels.push((255.0 + (channel - 255.0) * w).round() as u8);
            }
        }
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), n as u32, n as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&pixels)?;
    writer.finish()?;
    Ok(())
}

fn emit_grid(dir: &Path, stem: &str, grid: &GridEvaluation, png: bool, probability: bool) -> Result<()> {
    write_file(&dir.join(format!("{stem}.csv")), |w| grid.write_csv(w))?;
    if png {
        let scaled: Vec<f64> = if probability {
            grid.values.iter().map(|p| 2.0 * p - 1.0).collect()
        } else {
            let max = grid.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            grid.values.iter().map(|v| if max > 0.0 { v / max } else { 0.0 }).collect()
        };
        write_grid_png(&dir.join(format!("{stem}.png")), grid, &scaled)?;
    }
    Ok(())
}

fn write_dataset(dir: &Path, name: &str, bench: &Benchmark) -> Result<()> {
    write_file(&dir.join(name), |w| write_dataset_csv(w, &[&bench.train, &bench.test]))
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let spec = args.data.resolve(Preset::Fig4);
    let bench = generate(&spec)?;
    prepare_out(&args.out)?;
    write_dataset(&args.out, &format!("{}.csv", spec.family), &bench)?;
    write_config(&args.out, "gen", json!({ "dataset": spec }))
}

fn kernel_spec(args: &SvmArgs, c: f64) -> KernelSpec {
    let family = match args.kernel {
        KernelArg::DeltaBasis => KernelFamily::DeltaBasis,
        KernelArg::LinearAmplitude => KernelFamily::LinearAmplitude,
        KernelArg::PolynomialCopies => KernelFamily::PolynomialCopies { degree: args.degree },
        KernelArg::CosineProduct => KernelFamily::CosineProduct,
        KernelArg::SqueezingPhase => KernelFamily::SqueezingPhase { c },
        KernelArg::CoherentGaussian => KernelFamily::CoherentGaussian,
    };
    let real = match args.realification {
        RealArg::AbsSquare => Realification::AbsSquare,
        RealArg::RealPart => Realification::RealPart,
    };
    KernelSpec::new(family, real)
}

fn fmt_c(c: f64) -> String {
    format!("{c}")
}

fn cmd_svm(args: &SvmArgs) -> Result<()> {
    let spec = args.data.resolve(Preset::Fig4);
    let bench = generate(&spec)?;
    let params = SvmParams::with_c(args.reg).tol(args.tol);
    prepare_out(&args.out)?;
    let sweep = args.c.len() > 1;
    let mut rows = Vec::new();
    let mut kernels = Vec::new();
    for &c in &args.c {
        let kernel = kernel_spec(args, c);
        let mut model = svm_train(&bench.train, &kernel, &params)?;
        model.metadata.seed = Some(spec.seed);
        let train_accuracy = svm_accuracy(&model, &bench.train)?;
        let test_accuracy = svm_accuracy(&model, &bench.test)?;
        log::info!("c={c}: train {train_accuracy:.3}, test {test_accuracy:.3}");
        let suffix = if sweep { format!("_c{}", fmt_c(c)) } else { String::new() };
        write_json(&args.out.join(format!("model{suffix}.json")), &model)?;
        if let Some(n) = args.grid.grid {
            let grid = grid_eval(|x| svm_decision(&model, x), n, (-1.0, 1.0))?;
            emit_grid(&args.out, &format!("grid{suffix}"), &grid, args.grid.png, false)?;
        }
        rows.push(json!({
            "c": c,
            "train_accuracy": train_accuracy,
            "test_accuracy": test_accuracy,
            "support_vectors": model.alphas.len(),
            "iterations": model.metadata.iterations,
            "converged": model.metadata.converged,
        }));
        kernels.push(kernel);
    }
    write_dataset(&args.out, "data.csv", &bench)?;
    write_json(&args.out.join("metrics.json"), &json!({ "rows": rows }))?;
    write_config(
        &args.out,
        "svm",
        json!({
            "dataset": spec,
            "kernels": kernels,
            "svm": params,
            "grid": args.grid.grid,
            "png": args.grid.png,
        }),
    )
}

fn cmd_perceptron(args: &PerceptronArgs) -> Result<()> {
    let spec = args.data.resolve(Preset::Fig5);
    let bench = generate(&spec)?;
    let realification = match args.realification {
        FeatureArg::RealPart => FeatureRealification::RealPart,
        FeatureArg::ConcatRealImag => FeatureRealification::ConcatRealImag,
    };
    let embedding = Embedding::new(args.c, args.cutoff, realification).with_min_captured_norm(args.min_captured_norm);
    let train_fm = embed_dataset(&bench.train, &embedding)?;
    let test_fm = embed_dataset(&bench.test, &embedding)?;
    let result = perceptron_train(&train_fm, &bench.train.labels, args.max_epochs, args.lr)?;
    let test_accuracy = perceptron_accuracy(&result.weights, result.bias, &test_fm.rows, &bench.test.labels);
    prepare_out(&args.out)?;
    if let Some(n) = args.grid.grid {
        let grid = grid_eval(
            |x| {
                let row = embedding.features(x)?;
                Ok(row.iter().zip(&result.weights).map(|(a, b)| a * b).sum::<f64>() + result.bias)
            },
            n,
            (-1.0, 1.0),
        )?;
        emit_grid(&args.out, "grid", &grid, args.grid.png, false)?;
    }
    write_dataset(&args.out, "data.csv", &bench)?;
    write_json(
        &args.out.join("metrics.json"),
        &json!({
            "epochs_used": result.epochs_used,
            "converged": result.converged,
            "mistakes": result.mistakes,
            "train_accuracy": result.final_train_accuracy,
            "test_accuracy": test_accuracy,
            "feature_dim": train_fm.dim(),
        }),
    )?;
    write_config(
        &args.out,
        "perceptron",
        json!({
            "dataset": spec,
            "embedding": embedding,
            "max_epochs": args.max_epochs,
            "learning_rate": args.lr,
            "grid": args.grid.grid,
            "png": args.grid.png,
        }),
    )
}

fn cmd_variational(args: &VariationalArgs) -> Result<()> {
    let spec = args.data.resolve(Preset::Fig7);
    let bench = generate(&spec)?;
    let sim = Simulator::new(args.cutoff)?;
    let init = VariationalModel::init(args.blocks, args.c, args.cutoff, args.l2, spec.seed)?;
    let config = TrainConfig {
        steps: args.steps,
        batch_size: args.batch_size,
        lr0: args.lr0,
        decay: args.decay,
        ..Default::default()
    };
    let initial_loss = sim.loss(&init, &bench.train)?;
    // Train in two legs so the loss after 200 steps can be reported.
    let first = args.steps.min(200);
    let (mid, mut trace) = train(&sim, &init, &bench.train, &TrainConfig { steps: first, ..config })?;
    let loss_at_200 = if args.steps >= 200 { Some(sim.loss(&mid, &bench.train)?) } else { None };
    let (model, rest) = train(&sim, &mid, &bench.train, &TrainConfig { steps: args.steps - first, ..config })?;
    trace.extend(rest);
    let final_loss = sim.loss(&model, &bench.train)?;
    let train_accuracy = sim.accuracy(&model, &bench.train)?;
    let test_accuracy = sim.accuracy(&model, &bench.test)?;
    prepare_out(&args.out)?;
    write_json(&args.out.join("checkpoint.json"), &model)?;
    write_file(&args.out.join("trace.csv"), |w| variational::write_trace_csv(w, &trace))?;
    if let Some(n) = args.grid.grid {
        let circuit = sim.compile(&model)?;
        let grid = grid_eval(|x| Ok(sim.forward_compiled(&circuit, &model, x)?.p1), n, (-1.0, 1.0))?;
        emit_grid(&args.out, "grid", &grid, args.grid.png, true)?;
    }
    write_dataset(&args.out, "data.csv", &bench)?;
    write_json(
        &args.out.join("metrics.json"),
        &json!({
            "initial_loss": initial_loss,
            "loss_at_200": loss_at_200,
            "final_loss": final_loss,
            "train_accuracy": train_accuracy,
            "test_accuracy": test_accuracy,
            "steps": model.step,
        }),
    )?;
    write_config(
        &args.out,
        "variational",
        json!({
            "dataset": spec,
            "blocks": args.blocks,
            "c": args.c,
            "cutoff": args.cutoff,
            "l2": args.l2,
            "train": config,
            "grid": args.grid.grid,
            "png": args.grid.png,
        }),
    )
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

/// Consistency checks; returns one result per check.
pub fn run_checks(overlap_cutoff: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = SeededRng::new(seed);
    let mut checks = Vec::new();

    // Closed-form squeezing overlap against truncated Fock inner products.
    let mut worst = serde_json::Map::new();
    let mut overlap_ok = true;
    for c in [0.5, 1.0, 1.5] {
        let mut max_err: f64 = 0.0;
        for _ in 0..100 {
            let (x, y) = (rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
            let a = squeezed_vacuum(c, x, overlap_cutoff)?;
            let b = squeezed_vacuum(c, y, overlap_cutoff)?;
            max_err = max_err.max((inner(&a, &b)? - squeezing_overlap_1d(x, y, c)).norm());
        }
        overlap_ok &= max_err < 1e-6;
        worst.insert(format!("c={c}"), json!(max_err));
    }
    checks.push(CheckResult {
        name: "kernel_overlap".into(),
        passed: overlap_ok,
        detail: json!({ "cutoff": overlap_cutoff, "tolerance": 1e-6, "max_abs_error": worst }),
    });

    // Gram PSD sweep for every family.
    let families = [
        KernelFamily::DeltaBasis,
        KernelFamily::LinearAmplitude,
        KernelFamily::PolynomialCopies { degree: 2 },
        KernelFamily::CosineProduct,
        KernelFamily::SqueezingPhase { c: 1.5 },
        KernelFamily::CoherentGaussian,
    ];
    let mut psd_ok = true;
    let mut min_eigs = serde_json::Map::new();
    for family in families {
        let mut worst_ratio = f64::INFINITY;
        let mut min_eig = f64::INFINITY;
        for trial in 0..200 {
            let m = 1 + trial % 12;
            let dim = 1 + trial % 3;
            let data: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    (0..dim)
                        .map(|_| match family {
                            KernelFamily::DeltaBasis => (rng.uniform() < 0.5) as u8 as f64,
                            _ => rng.uniform_in(-1.0, 1.0),
                        })
                        .collect()
                })
                .collect();
            let g = gram(&KernelSpec::new(family, Realification::AbsSquare), &data)?;
            let e = g.min_eigenvalue();
            min_eig = min_eig.min(e);
            worst_ratio = worst_ratio.min(e / m as f64);
        }
        psd_ok &= worst_ratio >= -1e-8;
        min_eigs.insert(family.name().into(), json!(min_eig));
    }
    checks.push(CheckResult {
        name: "gram_psd".into(),
        passed: psd_ok,
        detail: json!({ "datasets_per_family": 200, "min_eigenvalue": min_eigs }),
    });

    // Vandermonde distinctness against numerical rank.
    let mut agree = 0;
    for trial in 0..100 {
        let m = 2 + trial % 9;
        let mut phases: Vec<f64> = (0..m).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        if trial % 3 == 0 {
            let k = rng.below(m - 1);
            phases[m - 1] = phases[k];
        }
        let v = vandermonde_check(&phases, 1.5)?;
        let pts: Vec<Vec<f64>> = phases.iter().map(|&p| vec![p]).collect();
        agree += (v.distinct == design_matrix_rank(&pts, 1.5, 40)?.independent) as usize;
    }
    let ten: Vec<Vec<f64>> = (0..10).map(|_| vec![rng.uniform_in(-1.0, 1.0)]).collect();
    let rank10 = design_matrix_rank(&ten, 1.5, 40)?;
    checks.push(CheckResult {
        name: "vandermonde_rank".into(),
        passed: agree == 100 && rank10.rank == 10,
        detail: json!({ "agreeing_sets": agree, "of": 100, "rank_m10": rank10 }),
    });

    // Coherent-state Gaussian identity and truncated overlaps.
    let (mut id_err, mut trunc_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let a = C64::from_polar(rng.uniform(), rng.uniform_in(-std::f64::consts::PI, std::f64::consts::PI));
        let b = C64::from_polar(rng.uniform(), rng.uniform_in(-std::f64::consts::PI, std::f64::consts::PI));
        let k = coherent_overlap(a, b);
        id_err = id_err.max((k.norm_sqr() - (-(a - b).norm_sqr()).exp()).abs());
        let sim = inner(&coherent(a, 30)?, &coherent(b, 30)?)?;
        trunc_err = trunc_err.max((sim - k).norm());
    }
    checks.push(CheckResult {
        name: "gaussian_identity".into(),
        passed: id_err < 1e-10 && trunc_err < 1e-8,
        detail: json!({ "identity_max_error": id_err, "truncated_max_error": trunc_err, "cutoff": 30 }),
    });
    Ok(checks)
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let checks = run_checks(args.cutoff, args.seed)?;
    let all = checks.iter().all(|c| c.passed);
    prepare_out(&args.out)?;
    for c in &checks {
        log::info!("{}: {}", c.name, if c.passed { "pass" } else { "FAIL" });
    }
    write_json(&args.out.join("verify.json"), &json!({ "passed": all, "checks": checks }))?;
    write_config(&args.out, "verify", json!({ "overlap_cutoff": args.cutoff, "seed": args.seed }))?;
    Ok(all)
}

fn configure_threads() {
    let Ok(value) = std::env::var(THREADS_ENV) else { return };
    match value.parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size thread pool: {e}");
            }
        }
        _ => log::warn!("ignoring {THREADS_ENV}={value:?}; expected a positive integer"),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Svm(a) => cmd_svm(a).map(|_| true),
        Command::Perceptron(a) => cmd_perceptron(a).map(|_| true),
        Command::Variational(a) => cmd_variational(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("error: verification failed");
            1
        }
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
