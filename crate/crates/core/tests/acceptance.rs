//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fockkernel::data::{generate, DatasetSpec, Family, Preset};
use fockkernel::fock::{coherent, inner, squeezed_vacuum, vacuum, ModeIndex};
use fockkernel::gates::{apply, beamsplitter, GateBuilder, DEFAULT_BUFFER};
use fockkernel::kernels::{coherent_overlap, gram, squeezing_overlap_1d, KernelFamily, KernelSpec, Realification};
use fockkernel::perceptron::{embed_dataset, perceptron_train, Embedding, FeatureRealification};
use fockkernel::rng::SeededRng;
use fockkernel::separability::{design_matrix_rank, vandermonde_check};
use fockkernel::svm::{svm_accuracy, svm_train, SvmParams};
use fockkernel::variational::{train, Simulator, TrainConfig, VariationalModel};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn overlap_error(c: f64, cutoff: usize, seed: u64) -> f64 {
    let mut rng = SeededRng::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (x, y) = (rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
        let a = squeezed_vacuum(c, x, cutoff).unwrap();
        let b = squeezed_vacuum(c, y, cutoff).unwrap();
        worst = worst.max((inner(&a, &b).unwrap() - squeezing_overlap_1d(x, y, c)).norm());
    }
    worst
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let errors: Vec<(f64, f64)> = [0.5, 1.0, 1.5].iter().map(|&c| (c, overlap_error(c, 40, 1))).collect();
    let elapsed = start.elapsed();
    let pass = errors.iter().all(|&(_, e)| e < 1e-6) && elapsed < Duration::from_secs(10);
    let mut detail: Vec<String> = errors.iter().map(|(c, e)| format!("c={c} max err {e:.2e}")).collect();
    for &(c, e) in &errors {
        if e >= 1e-6 {
            let needed = (40..=400).step_by(10).find(|&k| overlap_error(c, k, 1) < 1e-6);
            detail.push(format!("c={c} passes from cutoff {needed:?}"));
        }
    }
    detail.push(format!("cutoff 40, {}", secs(elapsed)));
    outcome(pass, detail.join("; "))
}

fn all_families() -> Vec<KernelFamily> {
    vec![
        KernelFamily::DeltaBasis,
        KernelFamily::LinearAmplitude,
        KernelFamily::PolynomialCopies { degree: 2 },
        KernelFamily::PolynomialCopies { degree: 3 },
        KernelFamily::CosineProduct,
        KernelFamily::SqueezingPhase { c: 0.5 },
        KernelFamily::SqueezingPhase { c: 1.5 },
        KernelFamily::CoherentGaussian,
    ]
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(2);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for family in all_families() {
        let spec = KernelSpec::new(family, Realification::AbsSquare);
        for _ in 0..200 {
            let m = 1 + rng.below(12);
            let dim = 1 + rng.below(3);
            let data: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    (0..dim)
                        .map(|_| match family {
                            KernelFamily::DeltaBasis => rng.below(2) as f64,
                            _ => rng.uniform_in(-1.0, 1.0),
                        })
                        .collect()
                })
                .collect();
            let e = gram(&spec, &data).unwrap().min_eigenvalue();
            worst = worst.min(e / m as f64);
            failures += (e < -1e-8 * m as f64) as usize;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(30),
        format!("{failures} violations, min eigenvalue/M {worst:.2e}, {}", secs(elapsed)),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = SeededRng::new(3);
    let (mut id_err, mut trunc_err): (f64, f64) = (0.0, 0.0);
    let mut point = || C64::from_polar(rng.uniform(), rng.uniform_in(-std::f64::consts::PI, std::f64::consts::PI));
    for _ in 0..100 {
        let (a, b) = (point(), point());
        let k = coherent_overlap(a, b);
        id_err = id_err.max((k.norm_sqr() - (-(a - b).norm_sqr()).exp()).abs());
        let sim = inner(&coherent(a, 30).unwrap(), &coherent(b, 30).unwrap()).unwrap();
        trunc_err = trunc_err.max((sim - k).norm());
    }
    outcome(
        id_err < 1e-10 && trunc_err < 1e-8,
        format!("identity err {id_err:.2e}, truncated err {trunc_err:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let kernel = KernelSpec::squeezing(1.5);
    let mut detail = Vec::new();
    let mut pass = true;
    for family in Family::ALL {
        let bench = generate(&DatasetSpec::preset(Preset::Fig4, family, 0)).unwrap();
        let model = svm_train(&bench.train, &kernel, &SvmParams::default()).unwrap();
        let acc = svm_accuracy(&model, &bench.train).unwrap();
        let test = svm_accuracy(&model, &bench.test).unwrap();
        pass &= acc >= 0.95 && (family != Family::Blobs || acc == 1.0);
        detail.push(format!("{family} train {acc:.3} test {test:.3}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    detail.push(secs(elapsed));
    outcome(pass, detail.join("; "))
}

fn criterion_5() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for family in Family::ALL {
        let bench = generate(&DatasetSpec::preset(Preset::Fig4Row2, family, 0)).unwrap();
        let accs: Vec<f64> = [0.25, 1.5, 4.0]
            .iter()
            .map(|&c| {
                let model = svm_train(&bench.train, &KernelSpec::squeezing(c), &SvmParams::default()).unwrap();
                svm_accuracy(&model, &bench.test).unwrap()
            })
            .collect();
        let spread = accs.iter().cloned().fold(f64::MIN, f64::max) - accs.iter().cloned().fold(f64::MAX, f64::min);
        pass &= spread >= 0.02;
        detail.push(format!("{family} test acc {accs:?} spread {spread:.2}"));
    }
    outcome(pass, detail.join("; "))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let embedding = Embedding::new(1.5, 42, FeatureRealification::RealPart);
    let mut epochs = Vec::new();
    for family in Family::ALL {
        let bench = generate(&DatasetSpec::preset(Preset::Fig5, family, 0)).unwrap();
        let fm = embed_dataset(&bench.train, &embedding).unwrap();
        let r = perceptron_train(&fm, &bench.train.labels, 5000, 1.0).unwrap();
        epochs.push((family, r.converged, r.epochs_used, r.final_train_accuracy));
    }
    let elapsed = start.elapsed();
    let find = |f: Family| epochs.iter().find(|e| e.0 == f).copied().unwrap();
    let blobs = find(Family::Blobs);
    let mut pass = blobs.1 && blobs.3 == 1.0 && blobs.2 < 5000 && elapsed < Duration::from_secs(120);
    for f in [Family::Moons, Family::Circles] {
        let e = find(f);
        pass &= e.1 && e.2 < blobs.2;
    }
    let detail: Vec<String> = epochs
        .iter()
        .map(|(f, conv, n, acc)| format!("{f} converged={conv} epochs={n} acc={acc:.3}"))
        .collect();
    outcome(pass, format!("{}; cutoff 42, {}", detail.join("; "), secs(elapsed)))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::new(7);
    let ten: Vec<Vec<f64>> = (0..10).map(|_| vec![rng.uniform_in(-1.0, 1.0)]).collect();
    let report = design_matrix_rank(&ten, 1.5, 40).unwrap();
    let mut agree = 0;
    let mut duplicates = 0;
    for trial in 0..100 {
        let m = 2 + rng.below(9);
        let mut phases: Vec<f64> = (0..m).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        if trial % 3 == 0 {
            phases[m - 1] = phases[rng.below(m - 1)];
            duplicates += 1;
        }
        let v = vandermonde_check(&phases, 1.5).unwrap();
        let pts: Vec<Vec<f64>> = phases.iter().map(|&p| vec![p]).collect();
        agree += (v.distinct == design_matrix_rank(&pts, 1.5, 40).unwrap().independent) as usize;
    }
    let elapsed = start.elapsed();
    outcome(
        report.rank == 10 && agree == 100 && elapsed < Duration::from_secs(30),
        format!(
            "M=10 rank {} (min sv {:.2e}); agreement {agree}/100 ({duplicates} with duplicates); {}",
            report.rank,
            report.min_singular_value,
            secs(elapsed)
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let bench = generate(&DatasetSpec::preset(Preset::Fig7, Family::Moons, 0)).unwrap();
    let sim = Simulator::new(14).unwrap();
    let init = VariationalModel::init(4, 1.0, 14, 1e-5, 0).unwrap();
    let config = TrainConfig::default();
    let initial = sim.loss(&init, &bench.train).unwrap();
    let (mid, _) = train(&sim, &init, &bench.train, &TrainConfig { steps: 200, ..config }).unwrap();
    let at_200 = sim.loss(&mid, &bench.train).unwrap();
    let (done, _) = train(&sim, &mid, &bench.train, &TrainConfig { steps: config.steps - 200, ..config }).unwrap();
    let acc = sim.accuracy(&done, &bench.train).unwrap();
    let test = sim.accuracy(&done, &bench.test).unwrap();
    let elapsed = start.elapsed();
    outcome(
        init.num_params() == 32 && done.step == 5000 && at_200 < 0.5 * initial && acc >= 0.9,
        format!(
            "loss {initial:.4} -> {at_200:.4} at step 200; train acc {acc:.3}, test acc {test:.3}; {} at cutoff 14",
            secs(elapsed)
        ),
    )
}

fn criterion_9() -> Outcome {
    let sim = Simulator::new(14).unwrap();
    let bench = generate(&DatasetSpec::preset(Preset::Fig7, Family::Moons, 9)).unwrap();
    let mut rng = SeededRng::new(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut model = VariationalModel::init(4, 1.0, 14, 1e-5, 9).unwrap();
        for k in 0..model.num_params() {
            model.set_param(k, rng.uniform_in(-1.0, 1.0));
        }
        let batch = rng.sample_indices(bench.train.len(), 5);
        let g1 = sim.gradient(&model, &bench.train, &batch, 1e-3).unwrap();
        let g2 = sim.gradient(&model, &bench.train, &batch, 5e-4).unwrap();
        let diff = g1.iter().zip(&g2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = g2.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(diff / norm);
    }
    outcome(worst < 1e-3, format!("worst relative difference {worst:.2e} over 20 points"))
}

fn criterion_10() -> Outcome {
    let mut bs_err: f64 = 0.0;
    for &c in &[4, 8, 14] {
        for &(u, v) in &[(0.4, 0.0), (1.3, -0.7), (3.9, 2.2)] {
            let m = beamsplitter(u, v, c).unwrap().matrix().clone();
            bs_err = bs_err.max(max_abs(&(m.adjoint() * &m - DMatrix::identity(c * c, c * c))));
        }
    }
    let builder = GateBuilder::new(30, DEFAULT_BUFFER).unwrap();
    let vac = vacuum(1, 30).unwrap();
    let mode0 = [ModeIndex::new(0, 1).unwrap()];
    let mut rng = SeededRng::new(10);
    let mut d_err: f64 = 0.0;
    for _ in 0..20 {
        let z = C64::from_polar(rng.uniform(), rng.uniform_in(-std::f64::consts::PI, std::f64::consts::PI));
        let out = apply(&builder.displacement(z), &vac, &mode0).unwrap();
        let want = coherent(z, 30).unwrap();
        for (a, b) in out.amplitudes().iter().zip(want.amplitudes()) {
            d_err = d_err.max((a - b).norm());
        }
    }
    let prod = builder.cubic_phase_matrix(0.05) * builder.cubic_phase_matrix(-0.05);
    let v_err = max_abs(&(prod.view((0, 0), (15, 15)) - DMatrix::<C64>::identity(15, 15)));
    outcome(
        bs_err < 1e-12 && d_err < 1e-6 && v_err < 1e-6,
        format!("BS unitarity {bs_err:.2e}; D(a)|0> vs coherent {d_err:.2e}; V(u)V(-u) low levels {v_err:.2e}"),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_fockkernel"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_11() -> Outcome {
    let commands: [&[&str]; 5] = [
        &["gen", "--family", "circles", "--seed", "3"],
        &["svm", "--family", "moons", "--c", "0.5,1.5", "--grid", "12", "--png"],
        &["perceptron", "--family", "circles", "--n-train", "30", "--n-test", "10", "--grid", "8"],
        &["variational", "--steps", "20", "--n-train", "30", "--n-test", "10", "--grid", "6", "--png"],
        &["verify"],
    ];
    let mut bad = Vec::new();
    let mut files = 0;
    for args in commands {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        if !run_cli(a.path(), args) || !run_cli(b.path(), args) {
            bad.push(format!("{} failed", args[0]));
            continue;
        }
        let (ca, cb) = (dir_contents(a.path()), dir_contents(b.path()));
        files += ca.len();
        if ca != cb {
            bad.push(format!("{} differs", args[0]));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() { format!("5 commands, {files} files identical") } else { bad.join("; ") },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("kernel vs simulation overlap", criterion_1),
        ("Gram PSD sweep", criterion_2),
        ("coherent Gaussian identity", criterion_3),
        ("SVM training accuracy", criterion_4),
        ("SVM test accuracy depends on c", criterion_5),
        ("perceptron convergence", criterion_6),
        ("linear independence", criterion_7),
        ("variational training", criterion_8),
        ("gradient half-step consistency", criterion_9),
        ("gate suite", criterion_10),
        ("CLI determinism", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("{} criterion {:>2} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
