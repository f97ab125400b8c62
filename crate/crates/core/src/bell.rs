//! CGLMP and CHSH functionals.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurements::{JointProbabilityTable, Setting};
use crate::qmath::{kron, ComplexMatrix};
use crate::states::{check_dim, DensityMatrix};

/// Local-realist bound shared by CHSH and CGLMP.
pub const LOCAL_BOUND: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellValue {
    pub value: f64,
    pub local_bound: f64,
}

impl BellValue {
    pub fn new(value: f64) -> Self {
        Self { value, local_bound: LOCAL_BOUND }
    }

    pub fn violated(&self) -> bool {
        self.value > self.local_bound
    }
}

/// Which party's outcome carries the shift in `P(X = Y + k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// `P(A_a = B_b + k)`
    AEqBPlusK,
    /// `P(B_b = A_a + k)`
    BEqAPlusK,
}

/// `Σ_j P(X = j + k mod d, Y = j)` where `(X, Y)` is `(A_a, B_b)` or
/// `(B_b, A_a)` depending on `order`. `k` may be negative.
pub fn aggregate(table: &JointProbabilityTable, a: Setting, b: Setting, k: i64, order: Order) -> f64 {
    let d = table.d();
    let shift = k.rem_euclid(d as i64) as usize;
    (0..d)
        .map(|j| {
            let shifted = (j + shift) % d;
            match order {
                Order::AEqBPlusK => table.get(a, b, shifted, j),
                Order::BEqAPlusK => table.get(a, b, j, shifted),
            }
        })
        .sum()
}

/// Weight `1 − 2k/(d−1)` of the k-th CGLMP layer.
pub fn layer_weight(d: usize, k: usize) -> f64 {
    1.0 - 2.0 * k as f64 / (d as f64 - 1.0)
}

/// Signed CGLMP expression with two settings and `d` outcomes per party.
pub fn cglmp_value(table: &JointProbabilityTable) -> BellValue {
    use Order::*;
    use Setting::{First as S1, Second as S2};
    let d = table.d();
    let mut total = 0.0;
    for k in 0..d / 2 {
        let ki = k as i64;
        let plus = aggregate(table, S1, S1, ki, AEqBPlusK)
            + aggregate(table, S2, S1, ki + 1, BEqAPlusK)
            + aggregate(table, S2, S2, ki, AEqBPlusK)
            + aggregate(table, S1, S2, ki, BEqAPlusK);
        let minus = aggregate(table, S1, S1, -ki - 1, AEqBPlusK)
            + aggregate(table, S2, S1, -ki, BEqAPlusK)
            + aggregate(table, S2, S2, -ki - 1, AEqBPlusK)
            + aggregate(table, S1, S2, -ki - 1, BEqAPlusK);
        total += layer_weight(d, k) * (plus - minus);
    }
    BellValue::new(total)
}

/// CHSH value `⟨A₁B₁⟩ + ⟨A₁B₂⟩ + ⟨A₂B₁⟩ − ⟨A₂B₂⟩`.
///
/// Outcomes map 0 ↦ +1, 1 ↦ −1, except that Alice's second setting is read
/// with its outcomes exchanged (`⟨A₂B_b⟩ = −E₂ᵦ`). With the Fourier
/// settings this makes the value `E₁₁ + E₁₂ − E₂₁ + E₂₂`, the same signed
/// combination the two-outcome CGLMP expression reduces to.
pub fn chsh_value(table: &JointProbabilityTable) -> Result<BellValue> {
    if table.d() != 2 {
        return Err(Error::Domain(format!("CHSH needs two outcomes, table has d={}", table.d())));
    }
    let corr = |a, b| table.get(a, b, 0, 0) + table.get(a, b, 1, 1) - table.get(a, b, 0, 1) - table.get(a, b, 1, 0);
    use Setting::{First as S1, Second as S2};
    Ok(BellValue::new(corr(S1, S1) + corr(S1, S2) - corr(S2, S1) + corr(S2, S2)))
}

fn pauli() -> [ComplexMatrix; 3] {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        ComplexMatrix::from_row_major(2, 2, vec![z, one, one, z]).unwrap(),
        ComplexMatrix::from_row_major(2, 2, vec![z, -i, i, z]).unwrap(),
        ComplexMatrix::from_row_major(2, 2, vec![one, z, z, -one]).unwrap(),
    ]
}

/// Correlation matrix `T_ij = Tr[ρ σ_i ⊗ σ_j]` of a two-qubit state.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<[[f64; 3]; 3]> {
    if rho.local_dim() != 2 {
        return Err(Error::Domain(format!("correlation matrix needs qubits, got d={}", rho.local_dim())));
    }
    let s = pauli();
    let mut t = [[0.0; 3]; 3];
    for (i, si) in s.iter().enumerate() {
        for (j, sj) in s.iter().enumerate() {
            let op = kron(si, sj);
            let m = op.matmul(rho.matrix())?;
            t[i][j] = (0..4).map(|n| m[(n, n)].re).sum();
        }
    }
    Ok(t)
}

/// Eigenvalues of a real symmetric 3×3 matrix, descending.
pub fn symmetric3_eigenvalues(m: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let tr = m[0][0] + m[1][1] + m[2][2];
    if p1 == 0.0 {
        let mut e = [m[0][0], m[1][1], m[2][2]];
        e.sort_by(|a, b| b.total_cmp(a));
        return e;
    }
    let mean = tr / 3.0;
    let p2 = (0..3).map(|i| (m[i][i] - mean).powi(2)).sum::<f64>() + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (m[i][j] - if i == j { mean } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let top = mean + 2.0 * p * phi.cos();
    let bottom = mean + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    [top, tr - top - bottom, bottom]
}

/// Largest CHSH value over all projective qubit settings,
/// `2·sqrt(λ₁ + λ₂)` with `λ₁ ≥ λ₂` the top eigenvalues of `TᵀT`.
pub fn chsh_optimal(rho: &DensityMatrix) -> Result<BellValue> {
    let t = correlation_matrix(rho)?;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let e = symmetric3_eigenvalues(m);
    Ok(BellValue::new(2.0 * (e[0] + e[1]).max(0.0).sqrt()))
}

/// `1 / (2 sin²(π(c + 1/4)/d))`.
fn shifted_cosecant_sq(d: usize, c: i64) -> f64 {
    let s = (PI * (c as f64 + 0.25) / d as f64).sin();
    1.0 / (2.0 * s * s)
}

/// Closed-form CGLMP value of the maximally entangled state under the
/// default Fourier settings.
pub fn cglmp_closed_form_optimal(d: usize) -> Result<f64> {
    check_dim(d)?;
    let sum: f64 = (0..d / 2)
        .map(|k| {
            let ki = k as i64;
            layer_weight(d, k) * (shifted_cosecant_sq(d, ki) - shifted_cosecant_sq(d, -(ki + 1)))
        })
        .sum();
    Ok(4.0 / (d * d) as f64 * sum)
}

/// Smallest mixing parameter above which the unfiltered
/// maximally-entangled mixture violates CGLMP: `2 / I_opt(d)`.
pub fn unfiltered_threshold(d: usize) -> Result<f64> {
    Ok(LOCAL_BOUND / cglmp_closed_form_optimal(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{joint_probability_table, PhaseOffsets};
    use crate::states::{max_entangled, mixed_state, MixedStateParams};

    fn max_entangled_table(d: usize, q: f64) -> JointProbabilityTable {
        let rho = mixed_state(&MixedStateParams::new(d, q, max_entangled(d).unwrap()).unwrap());
        joint_probability_table(&rho, &PhaseOffsets::default()).unwrap()
    }

    #[test]
    fn uniform_table_aggregates() {
        let t = JointProbabilityTable::uniform(5);
        for k in -6..6 {
            for order in [Order::AEqBPlusK, Order::BEqAPlusK] {
                assert!((aggregate(&t, Setting::First, Setting::Second, k, order) - 0.2).abs() < 1e-12);
            }
        }
        assert!(cglmp_value(&t).value.abs() < 1e-12);
        assert!(chsh_value(&JointProbabilityTable::uniform(2)).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn aggregate_qutrit_zero_shift() {
        // 3 · 1/(2·27·sin²(π/12))
        let expected = 3.0 / 54.0 / (PI / 12.0).sin().powi(2);
        let t = max_entangled_table(3, 1.0);
        let got = aggregate(&t, Setting::First, Setting::First, 0, Order::AEqBPlusK);
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.829_344_623_904_195_7).abs() < 1e-12);
    }

    #[test]
    fn aggregates_partition_outcomes() {
        let t = max_entangled_table(4, 0.6);
        for a in Setting::BOTH {
            for b in Setting::BOTH {
                for order in [Order::AEqBPlusK, Order::BEqAPlusK] {
                    let s: f64 = (0..4).map(|k| aggregate(&t, a, b, k, order)).sum();
                    assert!((s - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qutrit_cglmp_value() {
        let v = cglmp_value(&max_entangled_table(3, 1.0));
        assert!((v.value - 2.872_934_051_172_338).abs() < 1e-10);
        assert!(v.violated());
    }

    #[test]
    fn chsh_of_bell_mixture() {
        let root2 = 2f64.sqrt();
        assert!((chsh_value(&max_entangled_table(2, 1.0)).unwrap().value - 2.0 * root2).abs() < 1e-10);
        assert!((chsh_value(&max_entangled_table(2, 0.5)).unwrap().value - root2).abs() < 1e-10);
        assert!(matches!(chsh_value(&JointProbabilityTable::uniform(3)), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_optimum_values() {
        assert!((cglmp_closed_form_optimal(2).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((cglmp_closed_form_optimal(3).unwrap() - 2.872_934_051_172_338).abs() < 1e-12);
        assert!((unfiltered_threshold(3).unwrap() - 0.696).abs() < 5e-4);
        assert!((unfiltered_threshold(100).unwrap() - 0.674).abs() < 5e-4);
        assert!((unfiltered_threshold(2).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((unfiltered_threshold(6).unwrap() - 0.684).abs() < 1e-3);
        assert!((unfiltered_threshold(8).unwrap() - 0.682).abs() < 1e-3);
        assert!(cglmp_closed_form_optimal(1).is_err());
    }

    #[test]
    fn closed_form_optimum_increases_with_d() {
        let values: Vec<f64> = (2..=100).map(|d| cglmp_closed_form_optimal(d).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn symmetric_eigenvalues_known_matrix() {
        // eigenvalues 4, 2, 1 for diag(2,1,4) rotated
        let m = [[2.0, 0.0, 0.0], [0.0, 2.5, 1.5], [0.0, 1.5, 2.5]];
        let e = symmetric3_eigenvalues(m);
        for (x, y) in e.iter().zip([4.0, 2.0, 1.0]) {
            assert!((x - y).abs() < 1e-12, "{e:?}");
        }
        let diag = symmetric3_eigenvalues([[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 2.0]]);
        assert_eq!(diag, [3.0, 2.0, 1.0]);
    }

    #[test]
    fn chsh_optimal_on_bell_mixture_is_linear() {
        for q in [0.3, 0.7, 1.0] {
            let rho = mixed_state(&MixedStateParams::new(2, q, max_entangled(2).unwrap()).unwrap());
            assert!((chsh_optimal(&rho).unwrap().value - 2.0 * 2f64.sqrt() * q).abs() < 1e-12);
        }
    }
}
