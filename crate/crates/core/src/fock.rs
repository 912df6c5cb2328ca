//! States of one or more bosonic modes in a truncated Fock basis.
//!
//! Amplitudes are stored row-major over modes: for occupations
//! `(n_0, ..., n_{N-1})` the flat index is `sum_k n_k * cutoff^(N-1-k)`, so
//! mode 0 varies slowest. Gates in [`crate::gates`] use the same layout.
//!
//! Truncated states are never renormalized. [`FockVector::captured_norm`]
//! reports how much of the ideal state survived the cutoff.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Slack on the unit-norm bound for states built from closed-form series.
pub const NORM_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    num_modes: usize,
    cutoff: usize,
    amplitudes: Vec<C64>,
}

/// A mode position validated against a mode count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex(usize);

impl ModeIndex {
    pub fn new(value: usize, num_modes: usize) -> Result<Self> {
        if value >= num_modes {
            return invalid(format!("mode {value} out of range for {num_modes} modes"));
        }
        Ok(ModeIndex(value))
    }

    pub fn value(self) -> usize {
        self.0
    }
}

fn check_dims(num_modes: usize, cutoff: usize) -> Result<()> {
    if num_modes == 0 {
        return invalid("num_modes must be at least 1");
    }
    if cutoff < 2 {
        return invalid(format!("cutoff must be at least 2, got {cutoff}"));
    }
    match cutoff.checked_pow(num_modes as u32) {
        Some(_) => Ok(()),
        None => invalid(format!("cutoff^num_modes overflows for {cutoff}^{num_modes}")),
    }
}

impl FockVector {
    /// Wraps raw amplitudes, checking the length and the norm bound.
    pub fn new(num_modes: usize, cutoff: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_dims(num_modes, cutoff)?;
        let dim = cutoff.pow(num_modes as u32);
        if amplitudes.len() != dim {
            return invalid(format!(
                "expected {dim} amplitudes for {num_modes} modes at cutoff {cutoff}, got {}",
                amplitudes.len()
            ));
        }
        let v = FockVector {
            num_modes,
            cutoff,
            amplitudes,
        };
        let norm = v.captured_norm();
        if !(norm <= 1.0 + NORM_SLACK) {
            return invalid(format!("squared norm {norm} exceeds 1"));
        }
        Ok(v)
    }

    pub(crate) fn from_parts(num_modes: usize, cutoff: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), cutoff.pow(num_modes as u32));
        FockVector {
            num_modes,
            cutoff,
            amplitudes,
        }
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// Sum of squared amplitude magnitudes.
    pub fn captured_norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn flat_index(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.num_modes {
            return invalid(format!(
                "occupation has {} entries, state has {} modes",
                occupation.len(),
                self.num_modes
            ));
        }
        let mut idx = 0;
        for &n in occupation {
            if n >= self.cutoff {
                return invalid(format!("occupation {n} not below cutoff {}", self.cutoff));
            }
            idx = idx * self.cutoff + n;
        }
        Ok(idx)
    }

    pub fn occupation(&self, flat: usize) -> Vec<usize> {
        let mut occ = vec![0; self.num_modes];
        let mut rest = flat;
        for slot in occ.iter_mut().rev() {
            *slot = rest % self.cutoff;
            rest /= self.cutoff;
        }
        occ
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.flat_index(occupation)?])
    }
}

/// `|0...0>`.
pub fn vacuum(num_modes: usize, cutoff: usize) -> Result<FockVector> {
    check_dims(num_modes, cutoff)?;
    let mut amps = vec![C64::new(0.0, 0.0); cutoff.pow(num_modes as u32)];
    amps[0] = C64::new(1.0, 0.0);
    Ok(FockVector::from_parts(num_modes, cutoff, amps))
}

/// Single-mode squeezed vacuum `|(r, phi)>` truncated to `cutoff` levels.
///
/// The amplitude on `|2n>` is `sqrt((2n)!) / (2^n n!) * (-e^{i phi} tanh r)^n
/// / sqrt(cosh r)`; odd levels are exactly zero. The factorial ratio is
/// advanced by the recurrence `k_n = k_{n-1} * sqrt((2n-1)/(2n))`, which never
/// forms a factorial and so cannot overflow at large cutoffs.
pub fn squeezed_vacuum(r: f64, phi: f64, cutoff: usize) -> Result<FockVector> {
    check_dims(1, cutoff)?;
    let mut amps = vec![C64::new(0.0, 0.0); cutoff];
    let step = -C64::from_polar(r.tanh(), phi);
    let mut amp = C64::new(1.0 / r.cosh().sqrt(), 0.0);
    amps[0] = amp;
    let mut n = 1usize;
    while 2 * n < cutoff {
        let ratio = ((2 * n - 1) as f64 / (2 * n) as f64).sqrt();
        amp = amp * step * ratio;
        amps[2 * n] = amp;
        n += 1;
    }
    Ok(FockVector::from_parts(1, cutoff, amps))
}

/// Coherent state `|alpha>` with amplitudes `e^{-|alpha|^2/2} alpha^n / sqrt(n!)`.
pub fn coherent(alpha: C64, cutoff: usize) -> Result<FockVector> {
    check_dims(1, cutoff)?;
    let mut amps = Vec::with_capacity(cutoff);
    let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps.push(amp);
    for n in 1..cutoff {
        amp = amp * alpha / (n as f64).sqrt();
        amps.push(amp);
    }
    Ok(FockVector::from_parts(1, cutoff, amps))
}

/// Tensor product; the modes of `a` come first.
pub fn tensor(a: &FockVector, b: &FockVector) -> Result<FockVector> {
    if a.cutoff != b.cutoff {
        return invalid(format!("cutoff mismatch: {} vs {}", a.cutoff, b.cutoff));
    }
    let num_modes = a.num_modes + b.num_modes;
    check_dims(num_modes, a.cutoff)?;
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amplitudes {
        amps.extend(b.amplitudes.iter().map(|y| x * y));
    }
    Ok(FockVector::from_parts(num_modes, a.cutoff, amps))
}

/// Tensor product of a list of states, left to right.
pub fn tensor_all(states: &[FockVector]) -> Result<FockVector> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| crate::Error::InvalidArgument("empty state list".into()))?;
    rest.iter().try_fold(first.clone(), |acc, s| tensor(&acc, s))
}

/// `<a|b> = sum conj(a_i) b_i`.
pub fn inner(a: &FockVector, b: &FockVector) -> Result<C64> {
    if a.num_modes != b.num_modes || a.cutoff != b.cutoff {
        return invalid(format!(
            "shape mismatch: ({} modes, cutoff {}) vs ({} modes, cutoff {})",
            a.num_modes, a.cutoff, b.num_modes, b.cutoff
        ));
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Probability of the photon-number outcome `occupation`.
pub fn fock_probability(state: &FockVector, occupation: &[usize]) -> Result<f64> {
    Ok(state.amplitude(occupation)?.norm_sqr())
}
