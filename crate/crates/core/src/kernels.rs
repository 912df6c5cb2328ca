//! Closed-form kernels induced by encoding feature maps, and Gram matrices.
//!
//! | family              | feature map                         | kernel                          |
//! |---------------------|-------------------------------------|---------------------------------|
//! | `delta_basis`       | bit string to basis state           | `delta(x, y)`                   |
//! | `linear_amplitude`  | amplitude encoding                  | `x . y`                         |
//! | `polynomial_copies` | `d` copies of the amplitude state   | `(x . y)^d`                     |
//! | `cosine_product`    | `cos x_i |0> + sin x_i |1>` per bit | `prod cos(x_i - y_i)`           |
//! | `squeezing_phase`   | `|(c, x_i)>` squeezed vacuum per mode | `prod <(c, x_i)|(c, y_i)>`    |
//! | `coherent_gaussian` | `|x_i>` real coherent state per mode | `prod <x_i|y_i>`               |
//!
//! A complex kernel value is made real by its [`Realification`] last.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    DeltaBasis,
    LinearAmplitude,
    PolynomialCopies { degree: u32 },
    CosineProduct,
    SqueezingPhase { c: f64 },
    CoherentGaussian,
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::DeltaBasis => "delta_basis",
            KernelFamily::LinearAmplitude => "linear_amplitude",
            KernelFamily::PolynomialCopies { .. } => "polynomial_copies",
            KernelFamily::CosineProduct => "cosine_product",
            KernelFamily::SqueezingPhase { .. } => "squeezing_phase",
            KernelFamily::CoherentGaussian => "coherent_gaussian",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realification {
    /// `|k|^2`, always a valid real kernel.
    #[default]
    AbsSquare,
    RealPart,
    /// Leave the value complex.
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub family: KernelFamily,
    #[serde(default)]
    pub realification: Realification,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, realification: Realification) -> Self {
        KernelSpec {
            family,
            realification,
        }
    }

    pub fn squeezing(c: f64) -> Self {
        KernelSpec::new(KernelFamily::SqueezingPhase { c }, Realification::AbsSquare)
    }

    pub fn with_realification(mut self, realification: Realification) -> Self {
        self.realification = realification;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            KernelFamily::PolynomialCopies { degree: 0 } => invalid("polynomial degree must be at least 1"),
            KernelFamily::SqueezingPhase { c } if !c.is_finite() || c < 0.0 => {
                invalid(format!("squeezing c must be finite and non-negative, got {c}"))
            }
            _ => Ok(()),
        }
    }
}

/// `<(c, x)|(c, y)> = sqrt(sech^2 c / (1 - e^{i(y - x)} tanh^2 c))`, principal root.
///
/// Evaluated as `1 / sqrt(1 + sinh^2 c (1 - e^{i(y - x)}))`, the same quantity with
/// no cancellation, so the diagonal is exactly 1.
pub fn squeezing_overlap_1d(x: f64, y: f64, c: f64) -> C64 {
    let d = y - x;
    let one_minus_phase = C64::new(2.0 * (0.5 * d).sin().powi(2), -d.sin());
    let denom = C64::new(1.0, 0.0) + c.sinh().powi(2) * one_minus_phase;
    denom.sqrt().inv()
}

/// `<alpha|beta> = exp(-(|alpha|^2/2 + |beta|^2/2 - conj(alpha) beta))`.
pub fn coherent_overlap(alpha: C64, beta: C64) -> C64 {
    (-(0.5 * alpha.norm_sqr() + 0.5 * beta.norm_sqr()) + alpha.conj() * beta).exp()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn raw_kernel(family: KernelFamily, x: &[f64], y: &[f64]) -> Result<C64> {
    let value = match family {
        KernelFamily::DeltaBasis => {
            if x.iter().chain(y).any(|&b| b != 0.0 && b != 1.0) {
                return invalid("delta_basis inputs must be bit strings of 0 and 1");
            }
            C64::new(if x == y { 1.0 } else { 0.0 }, 0.0)
        }
        KernelFamily::LinearAmplitude => C64::new(dot(x, y), 0.0),
        KernelFamily::PolynomialCopies { degree } => C64::new(dot(x, y).powi(degree as i32), 0.0),
        KernelFamily::CosineProduct => {
            C64::new(x.iter().zip(y).map(|(a, b)| (a - b).cos()).product(), 0.0)
        }
        KernelFamily::SqueezingPhase { c } => x
            .iter()
            .zip(y)
            .map(|(&a, &b)| squeezing_overlap_1d(a, b, c))
            .product(),
        KernelFamily::CoherentGaussian => x
            .iter()
            .zip(y)
            .map(|(&a, &b)| coherent_overlap(C64::new(a, 0.0), C64::new(b, 0.0)))
            .product(),
    };
    Ok(value)
}

fn realify(value: C64, realification: Realification) -> C64 {
    match realification {
        Realification::AbsSquare => C64::new(value.norm_sqr(), 0.0),
        Realification::RealPart => C64::new(value.re, 0.0),
        Realification::Complex => value,
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<C64> {
    if x.len() != y.len() {
        return invalid(format!("dimension mismatch: {} vs {}", x.len(), y.len()));
    }
    spec.validate()?;
    Ok(realify(raw_kernel(spec.family, x, y)?, spec.realification))
}

/// Real kernel value; rejects the `complex` realification.
pub fn kernel_eval_real(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if spec.realification == Realification::Complex {
        return invalid("a real-valued kernel needs abs_square or real_part realification");
    }
    Ok(kernel_eval(spec, x, y)?.re)
}

#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub entries: DMatrix<C64>,
    pub kernel: KernelSpec,
    pub inputs: Vec<Vec<f64>>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn real_entries(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }

    /// Smallest eigenvalue of the Hermitian Gram matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let real = self.entries.iter().all(|z| z.im == 0.0);
        let eigenvalues: Vec<f64> = if real {
            self.real_entries().symmetric_eigenvalues().iter().copied().collect()
        } else {
            self.entries.clone().symmetric_eigenvalues().iter().copied().collect()
        };
        eigenvalues.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `min eigenvalue >= -1e-8 * M`.
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -1e-8 * self.size() as f64
    }
}

/// Gram matrix of `data`; upper triangle computed, lower mirrored conjugate.
pub fn gram(spec: &KernelSpec, data: &[Vec<f64>]) -> Result<GramMatrix> {
    let m = data.len();
    if m == 0 {
        return invalid("gram needs at least one input");
    }
    let dim = data[0].len();
    if data.iter().any(|x| x.len() != dim) {
        return invalid("inputs must share one dimension");
    }
    spec.validate()?;
    let rows: Vec<Vec<C64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i..m)
                .map(|j| kernel_eval(spec, &data[i], &data[j]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut entries = DMatrix::from_element(m, m, C64::new(0.0, 0.0));
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            entries[(i, j)] = v;
            entries[(j, i)] = v.conj();
        }
    }
    Ok(GramMatrix {
        entries,
        kernel: *spec,
        inputs: data.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{inner, squeezed_vacuum};
    use crate::rng::SeededRng;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn all_families() -> Vec<KernelFamily> {
        vec![
            KernelFamily::DeltaBasis,
            KernelFamily::LinearAmplitude,
            KernelFamily::PolynomialCopies { degree: 3 },
            KernelFamily::CosineProduct,
            KernelFamily::SqueezingPhase { c: 1.5 },
            KernelFamily::CoherentGaussian,
        ]
    }

    #[test]
    fn squeezing_diagonal_and_zero_c() {
        let mut rng = SeededRng::new(2);
        for _ in 0..50 {
            let x = rng.uniform_in(-3.0, 3.0);
            let y = rng.uniform_in(-3.0, 3.0);
            let c = rng.uniform_in(0.0, 3.0);
            let same = squeezing_overlap_1d(x, x, c);
            assert_abs_diff_eq!(same.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(same.im, 0.0, epsilon = 1e-14);
            assert_eq!(squeezing_overlap_1d(x, y, 0.0), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn squeezing_half_turn_value() {
        // e^{i pi} = -1 makes the overlap real: sqrt(sech^2 c / (1 + tanh^2 c)).
        let c: f64 = 1.5;
        let got = squeezing_overlap_1d(0.0, PI, c);
        let want = ((1.0 / c.cosh()).powi(2) / (1.0 + c.tanh().powi(2))).sqrt();
        assert_abs_diff_eq!(got.re, want, epsilon = 1e-15);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-15);
        // mpmath, 30 digits: 0.315163334509954072844...
        assert_abs_diff_eq!(got.re, 0.315_163_334_509_954_07, epsilon = 1e-14);
    }

    #[test]
    fn squeezing_matches_truncated_states() {
        // Cutoff 40 suffices at c = 0.5 (tail 5e-15); c = 1.5 needs ~160 levels
        // (tail 1.7e-8).
        let mut rng = SeededRng::new(4);
        for &(c, cutoff) in &[(0.5, 40), (1.0, 100), (1.5, 160)] {
            for _ in 0..30 {
                let x = rng.uniform_in(-1.0, 1.0);
                let y = x + rng.uniform_in(-PI, PI);
                let a = squeezed_vacuum(c, x, cutoff).unwrap();
                let b = squeezed_vacuum(c, y, cutoff).unwrap();
                let sim = inner(&a, &b).unwrap();
                assert!((sim - squeezing_overlap_1d(x, y, c)).norm() < 1e-6, "c={c}");
            }
        }
    }

    #[test]
    fn squeezing_error_bounded_by_truncation_tail() {
        // The truncated sum misses exactly the tail terms, whose magnitudes sum
        // to 1 - captured_norm.
        let mut rng = SeededRng::new(5);
        for &c in &[0.5, 1.0, 1.5] {
            for _ in 0..30 {
                let x = rng.uniform_in(-1.0, 1.0);
                let y = rng.uniform_in(-1.0, 1.0);
                let a = squeezed_vacuum(c, x, 40).unwrap();
                let b = squeezed_vacuum(c, y, 40).unwrap();
                let err = (inner(&a, &b).unwrap() - squeezing_overlap_1d(x, y, c)).norm();
                assert!(err <= 1.0 - a.captured_norm() + 1e-13);
            }
        }
    }

    #[test]
    fn squeezing_periodic_and_symmetric() {
        let spec = KernelSpec::squeezing(1.2);
        let mut rng = SeededRng::new(6);
        for _ in 0..100 {
            let x = vec![rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)];
            let y = vec![rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)];
            let k_xy = kernel_eval(&spec, &x, &y).unwrap();
            assert_eq!(k_xy, kernel_eval(&spec, &y, &x).unwrap());
            let raw = KernelSpec::new(KernelFamily::SqueezingPhase { c: 1.2 }, Realification::Complex);
            let shifted: Vec<f64> = x.iter().map(|v| v + 2.0 * PI).collect();
            let a = kernel_eval(&raw, &x, &y).unwrap();
            let b = kernel_eval(&raw, &shifted, &y).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn squeezing_width_shrinks_with_c() {
        let spec = |c: f64| KernelSpec::squeezing(c);
        let mut prev = f64::INFINITY;
        for step in 0..=30 {
            let c = 0.5 + 1.5 * step as f64 / 30.0;
            let k = kernel_eval(&spec(c), &[0.0], &[1.0]).unwrap().re;
            assert!(k < prev, "not decreasing at c={c}");
            prev = k;
        }
    }

    #[test]
    fn coherent_gaussian_identity() {
        let mut rng = SeededRng::new(8);
        for _ in 0..100 {
            let a = C64::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
            let b = C64::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
            let k = coherent_overlap(a, b).norm_sqr();
            assert_abs_diff_eq!(k, (-(a - b).norm_sqr()).exp(), epsilon = 1e-14);
        }
        let spec = KernelSpec::new(KernelFamily::CoherentGaussian, Realification::AbsSquare);
        let k = kernel_eval(&spec, &[0.3, -0.2], &[0.1, 0.5]).unwrap().re;
        assert_abs_diff_eq!(k, (-(0.04 + 0.49f64)).exp(), epsilon = 1e-14);
    }

    #[test]
    fn closed_form_families() {
        let poly = KernelSpec::new(KernelFamily::PolynomialCopies { degree: 2 }, Realification::RealPart);
        assert_eq!(kernel_eval(&poly, &[1.0, 0.0], &[1.0, 0.0]).unwrap().re, 1.0);
        assert_abs_diff_eq!(kernel_eval(&poly, &[0.6, 0.8], &[0.8, 0.6]).unwrap().re, 0.9216, epsilon = 1e-15);
        let cos = KernelSpec::new(KernelFamily::CosineProduct, Realification::RealPart);
        assert_eq!(kernel_eval(&cos, &[0.4, -1.0], &[0.4, -1.0]).unwrap().re, 1.0);
        let lin = KernelSpec::new(KernelFamily::LinearAmplitude, Realification::RealPart);
        assert_eq!(kernel_eval(&lin, &[1.0, 2.0], &[3.0, -1.0]).unwrap().re, 1.0);
        let delta = KernelSpec::new(KernelFamily::DeltaBasis, Realification::AbsSquare);
        assert_eq!(kernel_eval(&delta, &[1.0, 0.0], &[1.0, 0.0]).unwrap().re, 1.0);
        assert_eq!(kernel_eval(&delta, &[1.0, 0.0], &[0.0, 1.0]).unwrap().re, 0.0);
    }

    #[test]
    fn argument_errors() {
        let delta = KernelSpec::new(KernelFamily::DeltaBasis, Realification::AbsSquare);
        assert!(kernel_eval(&delta, &[0.5], &[1.0]).is_err());
        let sq = KernelSpec::squeezing(1.0);
        assert!(kernel_eval(&sq, &[0.5], &[1.0, 2.0]).is_err());
        assert!(gram(&sq, &[]).is_err());
        assert!(gram(&sq, &[vec![0.0], vec![0.0, 1.0]]).is_err());
        let bad = KernelSpec::new(KernelFamily::PolynomialCopies { degree: 0 }, Realification::AbsSquare);
        assert!(kernel_eval(&bad, &[1.0], &[1.0]).is_err());
        let cplx = KernelSpec::squeezing(1.0).with_realification(Realification::Complex);
        assert!(kernel_eval_real(&cplx, &[0.0], &[0.1]).is_err());
    }

    #[test]
    fn gram_basics() {
        let sq = KernelSpec::squeezing(1.5);
        let g = gram(&sq, &[vec![0.3, -0.4]]).unwrap();
        assert_eq!(g.entries[(0, 0)], C64::new(1.0, 0.0));

        let delta = KernelSpec::new(KernelFamily::DeltaBasis, Realification::AbsSquare);
        let bits = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let g = gram(&delta, &bits).unwrap();
        assert_eq!(g.real_entries(), DMatrix::<f64>::identity(4, 4));

        let raw = KernelSpec::new(KernelFamily::SqueezingPhase { c: 0.9 }, Realification::Complex);
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 0.3 - 0.8]).collect();
        let g = gram(&raw, &pts).unwrap();
        assert_eq!(g.entries, g.entries.adjoint());
        assert!(g.is_psd());
    }

    #[test]
    fn gram_psd_random_sweep() {
        let mut rng = SeededRng::new(12);
        for trial in 0..200 {
            let m = 2 + trial % 11;
            let dim = 1 + trial % 3;
            for family in all_families() {
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
                for real in [Realification::AbsSquare, Realification::RealPart] {
                    let g = gram(&KernelSpec::new(family, real), &data).unwrap();
                    assert!(g.is_psd(), "{family:?} {real:?}: {}", g.min_eigenvalue());
                }
            }
        }
    }

    #[test]
    fn spec_json_shape() {
        let spec = KernelSpec::squeezing(1.5);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"squeezing_phase","c":1.5,"realification":"abs_square"}"#);
        let back: KernelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let poly: KernelSpec = serde_json::from_str(r#"{"family":"polynomial_copies","degree":2}"#).unwrap();
        assert_eq!(poly.family, KernelFamily::PolynomialCopies { degree: 2 });
        assert_eq!(poly.realification, Realification::AbsSquare);
    }

    proptest::proptest! {
        #[test]
        fn squeezing_kernel_hermitian_and_bounded(x in -3.0f64..3.0, y in -3.0f64..3.0, c in 0.05f64..3.0) {
            let k = squeezing_overlap_1d(x, y, c);
            proptest::prop_assert!((k - squeezing_overlap_1d(y, x, c).conj()).norm() < 1e-14);
            proptest::prop_assert!(k.norm() <= 1.0 + 1e-14);
            proptest::prop_assert!((squeezing_overlap_1d(x + 2.0 * PI, y, c) - k).norm() < 1e-12);
        }

        #[test]
        fn real_kernels_symmetric(seed in 0u64..500, dim in 1usize..4) {
            let mut rng = SeededRng::new(seed);
            let a: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let b: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let bits = |v: &[f64]| -> Vec<f64> { v.iter().map(|t| (*t > 0.0) as u8 as f64).collect() };
            for family in all_families() {
                let spec = KernelSpec::new(family, Realification::AbsSquare);
                let (a, b) = match family {
                    KernelFamily::DeltaBasis => (bits(&a), bits(&b)),
                    _ => (a.clone(), b.clone()),
                };
                let ab = kernel_eval_real(&spec, &a, &b).unwrap();
                let ba = kernel_eval_real(&spec, &b, &a).unwrap();
                proptest::prop_assert!((ab - ba).abs() < 1e-14, "{}", family.name());
            }
        }
    }
}
