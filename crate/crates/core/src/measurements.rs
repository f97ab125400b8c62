//! Fourier-type measurement bases and joint outcome probabilities.
//!
//! Alice's setting `a` has eigenvectors
//! `|k⟩_a = d^{-1/2} Σ_j exp(2πi·j(k + α_a)/d) |j⟩` and Bob's setting `b`
//! has `|l⟩_b = d^{-1/2} Σ_j exp(2πi·j(−l + β_b)/d) |j⟩`. Probabilities
//! are computed as quadratic forms `⟨v|ρ|v⟩` with `v = |k⟩_a ⊗ |l⟩_b`,
//! never materializing the projectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::ComplexVector;
use crate::states::DensityMatrix;

/// Imaginary residue above which a probability is rejected.
const IMAG_LIMIT: f64 = 1e-9;

/// One of the two measurement settings per party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    First,
    Second,
}

impl Setting {
    pub const BOTH: [Setting; 2] = [Setting::First, Setting::Second];

    pub fn index(self) -> usize {
        match self {
            Setting::First => 0,
            Setting::Second => 1,
        }
    }

    /// 1-based labels as used in `A_1, A_2, B_1, B_2`.
    pub fn from_label(label: usize) -> Result<Self> {
        match label {
            1 => Ok(Setting::First),
            2 => Ok(Setting::Second),
            _ => Err(Error::Domain(format!("measurement setting must be 1 or 2, got {label}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseOffsets {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl Default for PhaseOffsets {
    fn default() -> Self {
        Self { alpha1: 0.0, alpha2: 0.5, beta1: 0.25, beta2: -0.25 }
    }
}

impl PhaseOffsets {
    pub fn alpha(&self, a: Setting) -> f64 {
        match a {
            Setting::First => self.alpha1,
            Setting::Second => self.alpha2,
        }
    }

    pub fn beta(&self, b: Setting) -> f64 {
        match b {
            Setting::First => self.beta1,
            Setting::Second => self.beta2,
        }
    }
}

fn fourier_vector(d: usize, phase: f64) -> ComplexVector {
    let norm = 1.0 / (d as f64).sqrt();
    let entries = (0..d).map(|j| Complex64::from_polar(norm, 2.0 * PI * j as f64 * phase / d as f64)).collect();
    ComplexVector::from_vec(entries)
}

fn check_outcome(d: usize, k: usize) -> Result<()> {
    if d < 2 || k >= d {
        return Err(Error::Domain(format!("outcome {k} out of range for d={d}")));
    }
    Ok(())
}

pub fn alice_eigenvector(d: usize, a: Setting, k: usize, offsets: &PhaseOffsets) -> Result<ComplexVector> {
    check_outcome(d, k)?;
    Ok(fourier_vector(d, k as f64 + offsets.alpha(a)))
}

pub fn bob_eigenvector(d: usize, b: Setting, l: usize, offsets: &PhaseOffsets) -> Result<ComplexVector> {
    check_outcome(d, l)?;
    Ok(fourier_vector(d, -(l as f64) + offsets.beta(b)))
}

/// `P(A_a = k, B_b = l)` for both settings of each party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointProbabilityTable {
    d: usize,
    /// Indexed `((a·2 + b)·d + k)·d + l`.
    probs: Vec<f64>,
}

impl JointProbabilityTable {
    /// Builds a table from a cell function. Cells within 1e-9 outside
    /// `[0, 1]` are clamped; anything further out is rejected.
    pub fn from_fn(d: usize, mut cell: impl FnMut(Setting, Setting, usize, usize) -> f64) -> Result<Self> {
        let mut probs = Vec::with_capacity(4 * d * d);
        for a in Setting::BOTH {
            for b in Setting::BOTH {
                for k in 0..d {
                    for l in 0..d {
                        probs.push(clamp_probability(cell(a, b, k, l))?);
                    }
                }
            }
        }
        Ok(Self { d, probs })
    }

    /// Every cell equal to `1/d²`.
    pub fn uniform(d: usize) -> Self {
        Self { d, probs: vec![1.0 / (d * d) as f64; 4 * d * d] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, a: Setting, b: Setting, k: usize, l: usize) -> f64 {
        let d = self.d;
        self.probs[((a.index() * 2 + b.index()) * d + k) * d + l]
    }

    pub fn max_abs_diff(&self, other: &JointProbabilityTable) -> f64 {
        assert_eq!(self.d, other.d);
        self.probs.iter().zip(&other.probs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    pub fn alice_marginal(&self, a: Setting, b: Setting, k: usize) -> f64 {
        (0..self.d).map(|l| self.get(a, b, k, l)).sum()
    }

    pub fn bob_marginal(&self, a: Setting, b: Setting, l: usize) -> f64 {
        (0..self.d).map(|k| self.get(a, b, k, l)).sum()
    }

    pub fn total(&self, a: Setting, b: Setting) -> f64 {
        (0..self.d).map(|k| self.alice_marginal(a, b, k)).sum()
    }
}

fn clamp_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-IMAG_LIMIT..=1.0 + IMAG_LIMIT).contains(&p) {
        return Err(Error::Consistency(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `Tr[(Π_k^{A_a} ⊗ Π_l^{B_b}) ρ]` for every setting pair and outcome pair.
pub fn joint_probability_table(rho: &DensityMatrix, offsets: &PhaseOffsets) -> Result<JointProbabilityTable> {
    let d = rho.local_dim();
    let alice: Vec<Vec<ComplexVector>> = Setting::BOTH
        .iter()
        .map(|&a| (0..d).map(|k| alice_eigenvector(d, a, k, offsets)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let bob: Vec<Vec<ComplexVector>> = Setting::BOTH
        .iter()
        .map(|&b| (0..d).map(|l| bob_eigenvector(d, b, l, offsets)).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize, usize, usize)> = (0..2)
        .flat_map(|a| (0..2).flat_map(move |b| (0..d).flat_map(move |k| (0..d).map(move |l| (a, b, k, l)))))
        .collect();
    let eval = |&(a, b, k, l): &(usize, usize, usize, usize)| -> Result<f64> {
        let v = alice[a][k].kron(&bob[b][l]);
        let p = rho.matrix().expectation(&v);
        if p.im.abs() > IMAG_LIMIT {
            return Err(Error::Consistency(format!(
                "probability for (a={}, b={}, k={k}, l={l}) has imaginary part {:e}",
                a + 1,
                b + 1,
                p.im
            )));
        }
        Ok(p.re)
    };

    #[cfg(feature = "parallel")]
    let values: Vec<f64> = {
        use rayon::prelude::*;
        cells.par_iter().map(eval).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let values: Vec<f64> = cells.iter().map(eval).collect::<Result<_>>()?;

    let mut it = values.into_iter();
    JointProbabilityTable::from_fn(d, |_, _, _, _| it.next().expect("one value per cell"))
}
