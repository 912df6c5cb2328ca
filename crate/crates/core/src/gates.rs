//! Gate matrices on the truncated Fock basis and their application to states.
//!
//! Quadratures follow `x = (a + a^dag)/sqrt(2)`, `p = -i (a - a^dag)/sqrt(2)`
//! (hbar = 1). Single-mode gates that are functions of a quadrature are built
//! from the spectral decomposition of `x` on a buffered space of
//! `cutoff + buffer` levels and then cropped to `cutoff`, because products of
//! truncated ladder operators are wrong near the top of the truncated space.
//! The beamsplitter preserves total photon number, so it is exponentiated
//! exactly block by block and is unitary at every cutoff.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, SQRT_2};

use crate::error::{invalid, Result};
use crate::fock::{FockVector, ModeIndex};

/// Extra Fock levels used while exponentiating quadrature generators.
pub const DEFAULT_BUFFER: usize = 10;

/// Largest low-photon column-norm defect for a gate used inside a classifier.
pub const ADMISSION_DEFECT: f64 = 0.05;

/// Gate parameters are clamped to this magnitude during training.
pub const PARAM_CLAMP: f64 = 5.0;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum GateLabel {
    Squeeze { r: f64, phi: f64 },
    Beamsplitter { u: f64, v: f64 },
    Displacement { re: f64, im: f64 },
    QuadraticPhase { u: f64 },
    CubicPhase { u: f64 },
    /// Arbitrary matrix, e.g. a product of other gates.
    Custom,
}

#[derive(Clone, Debug)]
pub struct GateOperator {
    label: GateLabel,
    cutoff: usize,
    num_modes_acted: usize,
    matrix: DMatrix<C64>,
    column_norm_defect: f64,
    low_photon_defect: f64,
}

impl GateOperator {
    pub fn from_matrix(
        label: GateLabel,
        cutoff: usize,
        num_modes_acted: usize,
        matrix: DMatrix<C64>,
    ) -> Result<Self> {
        if !(1..=2).contains(&num_modes_acted) {
            return invalid(format!("gates act on 1 or 2 modes, not {num_modes_acted}"));
        }
        if cutoff < 2 {
            return invalid(format!("cutoff must be at least 2, got {cutoff}"));
        }
        let dim = cutoff.pow(num_modes_acted as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return invalid(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let low = cutoff.div_ceil(2);
        let mut column_norm_defect = 0.0f64;
        let mut low_photon_defect = 0.0f64;
        for j in 0..dim {
            let defect = (1.0 - matrix.column(j).norm()).abs();
            column_norm_defect = column_norm_defect.max(defect);
            let in_low = if num_modes_acted == 1 {
                j < low
            } else {
                j / cutoff < low && j % cutoff < low
            };
            if in_low {
                low_photon_defect = low_photon_defect.max(defect);
            }
        }
        Ok(GateOperator {
            label,
            cutoff,
            num_modes_acted,
            matrix,
            column_norm_defect,
            low_photon_defect,
        })
    }

    pub fn label(&self) -> GateLabel {
        self.label
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn num_modes_acted(&self) -> usize {
        self.num_modes_acted
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `max_j |1 - ||column_j|||` over every column.
    pub fn column_norm_defect(&self) -> f64 {
        self.column_norm_defect
    }

    /// Same measure restricted to input levels below `cutoff / 2` on every mode.
    /// The top levels always couple out of the truncated space, so this is the
    /// figure used for admission into classifier circuits.
    pub fn low_photon_defect(&self) -> f64 {
        self.low_photon_defect
    }

    pub fn is_admissible(&self) -> bool {
        self.low_photon_defect <= ADMISSION_DEFECT
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &GateOperator) -> Result<GateOperator> {
        if self.cutoff != other.cutoff || self.num_modes_acted != other.num_modes_acted {
            return invalid("composed gates must share cutoff and arity");
        }
        GateOperator::from_matrix(
            GateLabel::Custom,
            self.cutoff,
            self.num_modes_acted,
            &self.matrix * &other.matrix,
        )
    }
}

/// Annihilation and creation matrices: `a[n-1, n] = sqrt(n)`.
pub fn ladder_matrices(cutoff: usize) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    if cutoff < 2 {
        return invalid(format!("cutoff must be at least 2, got {cutoff}"));
    }
    let mut a = DMatrix::from_element(cutoff, cutoff, ZERO);
    for n in 1..cutoff {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let a_dag = a.adjoint();
    Ok((a, a_dag))
}

/// `(x, p)` quadrature matrices in the convention above.
pub fn quadratures(cutoff: usize) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let (a, a_dag) = ladder_matrices(cutoff)?;
    let x = (&a + &a_dag).unscale(SQRT_2);
    let p = (&a - &a_dag) * C64::new(0.0, -1.0 / SQRT_2);
    Ok((x, p))
}

fn real_tridiagonal_x(dim: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        let v = (n as f64 / 2.0).sqrt();
        x[(n - 1, n)] = v;
        x[(n, n - 1)] = v;
    }
    x
}

/// Exact exponential of the beamsplitter generator on one photon-number block.
#[derive(Clone, Debug)]
struct PhotonBlock {
    /// Flat two-mode indices `n1 * cutoff + n2`, ordered by ascending `n1`.
    indices: Vec<usize>,
    n1: Vec<usize>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

/// Beamsplitter stored as its photon-number blocks.
#[derive(Clone, Debug)]
pub struct BeamsplitterBlocks {
    cutoff: usize,
    blocks: Vec<(Vec<usize>, DMatrix<C64>)>,
}

impl BeamsplitterBlocks {
    /// Applies to a full two-mode amplitude vector.
    pub fn apply(&self, amps: &[C64]) -> Vec<C64> {
        debug_assert_eq!(amps.len(), self.cutoff * self.cutoff);
        let mut out = vec![ZERO; amps.len()];
        for (idx, m) in &self.blocks {
            for (r, &row) in idx.iter().enumerate() {
                let mut acc = ZERO;
                for (s, &col) in idx.iter().enumerate() {
                    acc += m[(r, s)] * amps[col];
                }
                out[row] = acc;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = self.cutoff * self.cutoff;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for (idx, block) in &self.blocks {
            for (r, &row) in idx.iter().enumerate() {
                for (s, &col) in idx.iter().enumerate() {
                    m[(row, col)] = block[(r, s)];
                }
            }
        }
        m
    }
}

/// Caches the spectral data needed to build gates at one cutoff, so that
/// repeated construction with new parameters costs only matrix products.
#[derive(Clone, Debug)]
pub struct GateBuilder {
    cutoff: usize,
    buffer: usize,
    x_eigenvalues: Vec<f64>,
    /// First `cutoff` rows of the eigenvector matrix of the buffered `x`.
    x_vectors: DMatrix<f64>,
    blocks: Vec<PhotonBlock>,
}

impl GateBuilder {
    pub fn new(cutoff: usize, buffer: usize) -> Result<Self> {
        if cutoff < 2 {
            return invalid(format!("cutoff must be at least 2, got {cutoff}"));
        }
        let dim = cutoff + buffer;
        let eig = real_tridiagonal_x(dim).symmetric_eigen();
        let x_vectors = eig.eigenvectors.rows(0, cutoff).into_owned();
        let x_eigenvalues = eig.eigenvalues.iter().copied().collect();

        let mut blocks = Vec::with_capacity(2 * cutoff - 1);
        for total in 0..=(2 * cutoff - 2) {
            let lo = total.saturating_sub(cutoff - 1);
            let hi = total.min(cutoff - 1);
            let n1: Vec<usize> = (lo..=hi).collect();
            let size = n1.len();
            let mut t = DMatrix::<f64>::zeros(size, size);
            for k in 0..size.saturating_sub(1) {
                let (a, b) = (n1[k], total - n1[k]);
                let coupling = ((a + 1) as f64 * b as f64).sqrt();
                t[(k, k + 1)] = coupling;
                t[(k + 1, k)] = coupling;
            }
            let eig = t.symmetric_eigen();
            blocks.push(PhotonBlock {
                indices: n1.iter().map(|&a| a * cutoff + (total - a)).collect(),
                n1,
                eigenvalues: eig.eigenvalues.iter().copied().collect(),
                eigenvectors: eig.eigenvectors,
            });
        }
        Ok(GateBuilder {
            cutoff,
            buffer,
            x_eigenvalues,
            x_vectors,
            blocks,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    /// `Q_c diag(f(lambda)) Q_c^T` for a function of the buffered `x`.
    fn function_of_x(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let c = self.cutoff;
        let phases: Vec<C64> = self.x_eigenvalues.iter().map(|&l| f(l)).collect();
        let q = &self.x_vectors;
        let mut out = DMatrix::from_element(c, c, ZERO);
        for j in 0..c {
            for k in j..c {
                let mut acc = ZERO;
                for (m, ph) in phases.iter().enumerate() {
                    acc += ph * (q[(j, m)] * q[(k, m)]);
                }
                out[(j, k)] = acc;
                out[(k, j)] = acc;
            }
        }
        out
    }

    pub fn quadratic_phase_matrix(&self, u: f64) -> DMatrix<C64> {
        self.function_of_x(|l| C64::from_polar(1.0, 0.5 * u * l * l))
    }

    pub fn cubic_phase_matrix(&self, u: f64) -> DMatrix<C64> {
        self.function_of_x(|l| C64::from_polar(1.0, u * l * l * l / 3.0))
    }

    /// `D(z) = R(theta) exp(-i sqrt(2) |z| x) R(-theta)` with
    /// `theta = arg z + pi/2` and `R(theta) = exp(i theta n)`, which equals
    /// `exp(sqrt(2) i (Im z x - Re z p))`.
    pub fn displacement_matrix(&self, z: C64) -> DMatrix<C64> {
        let r = z.norm();
        let mut m = self.function_of_x(|l| C64::from_polar(1.0, -SQRT_2 * r * l));
        if r > 0.0 {
            let theta = z.arg() + FRAC_PI_2;
            for j in 0..self.cutoff {
                for k in 0..self.cutoff {
                    m[(j, k)] *= C64::from_polar(1.0, theta * (j as f64 - k as f64));
                }
            }
        }
        m
    }

    /// `BS(u, v) = exp(u (e^{iv} a1^dag a2 - e^{-iv} a1 a2^dag))` per block.
    pub fn beamsplitter_blocks(&self, u: f64, v: f64) -> BeamsplitterBlocks {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let size = b.indices.len();
                let w = &b.eigenvectors;
                let phases: Vec<C64> = b
                    .eigenvalues
                    .iter()
                    .map(|&l| C64::from_polar(1.0, -u * l))
                    .collect();
                let mut m = DMatrix::from_element(size, size, ZERO);
                for j in 0..size {
                    for k in 0..size {
                        let mut acc = ZERO;
                        for (s, ph) in phases.iter().enumerate() {
                            acc += ph * (w[(j, s)] * w[(k, s)]);
                        }
                        // i^{j-k} undoes the similarity to the real tridiagonal
                        // form, e^{iv(n1_j - n1_k)} rotates the generator phase.
                        let quarter = (j as i64 - k as i64).rem_euclid(4);
                        let ipow = [ONE, C64::new(0.0, 1.0), -ONE, C64::new(0.0, -1.0)]
                            [quarter as usize];
                        let rot = C64::from_polar(1.0, v * (b.n1[j] as f64 - b.n1[k] as f64));
                        m[(j, k)] = acc * ipow * rot;
                    }
                }
                (b.indices.clone(), m)
            })
            .collect();
        BeamsplitterBlocks {
            cutoff: self.cutoff,
            blocks,
        }
    }

    pub fn beamsplitter(&self, u: f64, v: f64) -> GateOperator {
        let m = self.beamsplitter_blocks(u, v).to_dense();
        GateOperator::from_matrix(GateLabel::Beamsplitter { u, v }, self.cutoff, 2, m)
            .expect("dimensions fixed by construction")
    }

    pub fn displacement(&self, z: C64) -> GateOperator {
        let m = self.displacement_matrix(z);
        GateOperator::from_matrix(
            GateLabel::Displacement { re: z.re, im: z.im },
            self.cutoff,
            1,
            m,
        )
        .expect("dimensions fixed by construction")
    }

    pub fn quadratic_phase(&self, u: f64) -> GateOperator {
        let m = self.quadratic_phase_matrix(u);
        GateOperator::from_matrix(GateLabel::QuadraticPhase { u }, self.cutoff, 1, m)
            .expect("dimensions fixed by construction")
    }

    pub fn cubic_phase(&self, u: f64) -> GateOperator {
        let m = self.cubic_phase_matrix(u);
        GateOperator::from_matrix(GateLabel::CubicPhase { u }, self.cutoff, 1, m)
            .expect("dimensions fixed by construction")
    }

    /// `S(z) = exp((z* a^2 - z a^dag^2) / 2)` with `z = r e^{i phi}`, via the
    /// eigendecomposition of the Hermitian `i (z* a^2 - z a^dag^2) / 2`.
    pub fn squeeze(&self, r: f64, phi: f64) -> GateOperator {
        let dim = self.cutoff + self.buffer;
        let (a, a_dag) = ladder_matrices(dim).expect("dim >= 2");
        let z = C64::from_polar(r, phi);
        let gen = (&a * &a) * z.conj() - (&a_dag * &a_dag) * z;
        let herm = gen * C64::new(0.0, 0.5);
        let eig = herm.symmetric_eigen();
        let v = &eig.eigenvectors;
        let phases: Vec<C64> = eig
            .eigenvalues
            .iter()
            .map(|&l| C64::from_polar(1.0, -l))
            .collect();
        let c = self.cutoff;
        let mut m = DMatrix::from_element(c, c, ZERO);
        for j in 0..c {
            for k in 0..c {
                let mut acc = ZERO;
                for (s, ph) in phases.iter().enumerate() {
                    acc += v[(j, s)] * ph * v[(k, s)].conj();
                }
                m[(j, k)] = acc;
            }
        }
        GateOperator::from_matrix(GateLabel::Squeeze { r, phi }, c, 1, m)
            .expect("dimensions fixed by construction")
    }
}

pub fn beamsplitter(u: f64, v: f64, cutoff: usize) -> Result<GateOperator> {
    Ok(GateBuilder::new(cutoff, 0)?.beamsplitter(u, v))
}

pub fn displacement(z: C64, cutoff: usize) -> Result<GateOperator> {
    Ok(GateBuilder::new(cutoff, DEFAULT_BUFFER)?.displacement(z))
}

pub fn quadratic_phase(u: f64, cutoff: usize) -> Result<GateOperator> {
    Ok(GateBuilder::new(cutoff, DEFAULT_BUFFER)?.quadratic_phase(u))
}

pub fn cubic_phase(u: f64, cutoff: usize) -> Result<GateOperator> {
    Ok(GateBuilder::new(cutoff, DEFAULT_BUFFER)?.cubic_phase(u))
}

pub fn squeeze(r: f64, phi: f64, cutoff: usize) -> Result<GateOperator> {
    Ok(GateBuilder::new(cutoff, DEFAULT_BUFFER)?.squeeze(r, phi))
}

/// Applies a `cutoff^k x cutoff^k` matrix to the listed modes of a flat
/// amplitude vector (`k = modes.len()`); the first listed mode is the slowest
/// index of the matrix.
pub(crate) fn apply_matrix(
    matrix: &DMatrix<C64>,
    amps: &[C64],
    num_modes: usize,
    cutoff: usize,
    modes: &[usize],
) -> Vec<C64> {
    let stride = |m: usize| cutoff.pow((num_modes - 1 - m) as u32);
    let sub_dim = matrix.nrows();
    let offsets: Vec<usize> = (0..sub_dim)
        .map(|s| {
            let mut rest = s;
            let mut off = 0;
            for &m in modes.iter().rev() {
                off += (rest % cutoff) * stride(m);
                rest /= cutoff;
            }
            off
        })
        .collect();
    let mut out = vec![ZERO; amps.len()];
    let mut gathered = vec![ZERO; sub_dim];
    for base in 0..amps.len() {
        if modes.iter().any(|&m| (base / stride(m)) % cutoff != 0) {
            continue;
        }
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (s, g) in gathered.iter().enumerate() {
                acc += matrix[(r, s)] * g;
            }
            out[base + off] = acc;
        }
    }
    out
}

/// Applies `gate` to `modes` of `state`, identity elsewhere.
pub fn apply(gate: &GateOperator, state: &FockVector, modes: &[ModeIndex]) -> Result<FockVector> {
    if gate.cutoff != state.cutoff() {
        return invalid(format!(
            "gate cutoff {} differs from state cutoff {}",
            gate.cutoff,
            state.cutoff()
        ));
    }
    if modes.len() != gate.num_modes_acted {
        return invalid(format!(
            "gate acts on {} modes, {} given",
            gate.num_modes_acted,
            modes.len()
        ));
    }
    let raw: Vec<usize> = modes.iter().map(|m| m.value()).collect();
    if raw.iter().any(|&m| m >= state.num_modes()) {
        return invalid("mode index out of range for state");
    }
    if raw.len() == 2 && raw[0] == raw[1] {
        return invalid("gate modes must be distinct");
    }
    let amps = apply_matrix(&gate.matrix, state.amplitudes(), state.num_modes(), state.cutoff(), &raw);
    Ok(FockVector::from_parts(state.num_modes(), state.cutoff(), amps))
}
