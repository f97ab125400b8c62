//! Bipartite pure states and their mixtures with color noise.
//!
//! Basis ordering: the pair `(j_A, j_B)` maps to flat index `j_A·d + j_B`,
//! Alice's factor first.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{kron, outer, trace, ComplexMatrix, ComplexVector};

const NORM_TOL: f64 = 1e-10;

/// Schmidt coefficients `γ_j` of a state `Σ_j γ_j |jj⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtCoefficients(Vec<f64>);

impl SchmidtCoefficients {
    /// Requires non-negative entries with `Σγ² = 1` within 1e-10.
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if gammas.len() < 2 {
            return Err(Error::Domain(format!("need at least 2 Schmidt coefficients, got {}", gammas.len())));
        }
        if let Some(g) = gammas.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(Error::Validation(format!("Schmidt coefficient {g} is negative or not finite")));
        }
        let norm: f64 = gammas.iter().map(|g| g * g).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("Schmidt coefficients have Σγ² = {norm}, expected 1")));
        }
        Ok(Self(gammas))
    }

    /// Rescales arbitrary non-negative weights onto the unit sphere.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        let norm = weights.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !(norm > 0.0) || weights.iter().any(|g| *g < 0.0) {
            return Err(Error::Validation("weights must be non-negative and not all zero".into()));
        }
        Self::new(weights.iter().map(|g| g / norm).collect())
    }

    pub fn uniform(d: usize) -> Result<Self> {
        check_dim(d)?;
        Self::new(vec![1.0 / (d as f64).sqrt(); d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Published maximally CGLMP-violating Schmidt coefficients for the
/// Fourier settings, rounded to four decimals (so normalized here).
pub fn published_max_violating(d: usize) -> Option<SchmidtCoefficients> {
    let raw: &[f64] = match d {
        3 => &[0.6169, 0.4888, 0.6169],
        4 => &[0.5686, 0.4204, 0.4204, 0.5686],
        5 => &[0.5368, 0.3859, 0.3548, 0.3859, 0.5368],
        _ => return None,
    };
    SchmidtCoefficients::normalized(raw).ok()
}

/// Which pure state sits in the mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    MaxEntangled,
    MaxViolating,
}

impl std::str::FromStr for StateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-entangled" => Ok(Self::MaxEntangled),
            "max-violating" => Ok(Self::MaxViolating),
            other => Err(Error::Validation(format!("unknown state kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for StateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::MaxEntangled => "max-entangled",
            Self::MaxViolating => "max-violating",
        })
    }
}

/// A `d²×d²` Hermitian, positive semidefinite, unit-trace matrix on `C^d ⊗ C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    d: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape, Hermiticity (1e-10) and unit trace (1e-10).
    pub fn new(d: usize, matrix: ComplexMatrix) -> Result<Self> {
        check_dim(d)?;
        if matrix.rows() != d * d || !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "expected {0}x{0} density matrix, got {1}x{2}",
                d * d,
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(NORM_TOL) {
            return Err(Error::Validation("density matrix is not Hermitian".into()));
        }
        let tr = trace(&matrix)?;
        if (tr - Complex64::new(1.0, 0.0)).norm() > NORM_TOL {
            return Err(Error::Validation(format!("density matrix has trace {tr}")));
        }
        Ok(Self { d, matrix })
    }

    pub(crate) fn new_unchecked(d: usize, matrix: ComplexMatrix) -> Self {
        Self { d, matrix }
    }

    pub fn pure(d: usize, psi: &ComplexVector) -> Result<Self> {
        check_state(d, psi)?;
        Ok(Self { d, matrix: outer(psi, psi) })
    }

    /// Local dimension `d` (the matrix is `d²×d²`).
    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Mixture weight `q` together with the pure state it multiplies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStateParams {
    d: usize,
    q: f64,
    psi: ComplexVector,
}

impl MixedStateParams {
    /// Requires `0 < q ≤ 1` and a normalized `d²`-dimensional `psi`.
    pub fn new(d: usize, q: f64, psi: ComplexVector) -> Result<Self> {
        check_dim(d)?;
        check_mixing(q)?;
        check_state(d, &psi)?;
        Ok(Self { d, q, psi })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn psi(&self) -> &ComplexVector {
        &self.psi
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be at least 2, got {d}")));
    }
    Ok(())
}

pub(crate) fn check_mixing(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("mixing parameter q must satisfy 0 < q <= 1, got {q}")));
    }
    Ok(())
}

fn check_state(d: usize, psi: &ComplexVector) -> Result<()> {
    if psi.dim() != d * d {
        return Err(Error::Dimension(format!("state has dimension {}, expected {}", psi.dim(), d * d)));
    }
    if (psi.norm() - 1.0).abs() > NORM_TOL {
        return Err(Error::Validation(format!("state has norm {}", psi.norm())));
    }
    Ok(())
}

/// `(1/√d) Σ_j |jj⟩`.
pub fn max_entangled(d: usize) -> Result<ComplexVector> {
    schmidt_state(&SchmidtCoefficients::uniform(d)?)
}

/// `Σ_j γ_j |jj⟩`.
pub fn schmidt_state(gammas: &SchmidtCoefficients) -> Result<ComplexVector> {
    let d = gammas.dim();
    let mut v = ComplexVector::zeros(d * d);
    for (j, &g) in gammas.as_slice().iter().enumerate() {
        v[j * d + j] = Complex64::new(g, 0.0);
    }
    Ok(v)
}

/// The color-noise term `|0⟩⟨0| ⊗ I_d/d`.
pub fn color_noise(d: usize) -> ComplexMatrix {
    let mut alice = vec![0.0; d];
    alice[0] = 1.0;
    kron(&ComplexMatrix::from_real_diagonal(&alice), &ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
}

/// `q|ψ⟩⟨ψ| + (1−q)|0⟩⟨0| ⊗ I_d/d`.
pub fn mixed_state(params: &MixedStateParams) -> DensityMatrix {
    let MixedStateParams { d, q, ref psi } = *params;
    let pure = outer(psi, psi).scale_real(q);
    let noise = color_noise(d).scale_real(1.0 - q);
    DensityMatrix::new_unchecked(d, &pure + &noise)
}

/// The pure state for `kind` at dimension `d`, given the Schmidt
/// coefficients to use for the maximally violating family.
pub fn pure_state(d: usize, kind: StateKind, gammas: Option<&SchmidtCoefficients>) -> Result<ComplexVector> {
    match kind {
        StateKind::MaxEntangled => max_entangled(d),
        StateKind::MaxViolating => {
            let g = match gammas {
                Some(g) => g.clone(),
                None => published_max_violating(d).ok_or_else(|| {
                    Error::Validation(format!("no Schmidt coefficients supplied for max-violating state at d={d}"))
                })?,
            };
            if g.dim() != d {
                return Err(Error::Dimension(format!("{} Schmidt coefficients for d={d}", g.dim())));
            }
            schmidt_state(&g)
        }
    }
}
