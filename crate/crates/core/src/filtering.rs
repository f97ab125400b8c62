//! Diagonal local filters and the filtered Bell statistics.
//!
//! Alice applies `F_A = ξ|0⟩⟨0| + Σ_{j≥1} |j⟩⟨j|` and Bob
//! `F_B = δ|0⟩⟨0| + Σ_{j≥1} |j⟩⟨j|`. The coupled strategy uses
//! `δ = ξ/√q`, which keeps `δ ≤ 1` only while `ξ ≤ √q`.
//!
//! For the maximally entangled mixture the filtered probabilities have a
//! closed form in `x = k − l + α_a + β_b`:
//!
//! ```text
//! P = [ q·|Σ_j e^{2πijx/d}|² + √q(ξ²−√q)·2Σ_j cos(2πjx/d) + S₁ ] / (d³ N_d)
//! S₁ = (1−q)(d−1)ξ² + (1−q)ξ⁴/q + (ξ²−√q)²
//! N_d = [q + (1−q)ξ²](1 − 1/d) + ξ⁴/(qd)
//! ```
//!
//! with `2Σ_j cos(2πjx/d) = 1 − cos 2πx + sin 2πx · cot(πx/d)`. For the
//! default offsets this is `1 ± cot(πx/d)`, not `1/sin(πx/d)`; the latter
//! is kept as [`CrossTerm::ReciprocalSine`] only to reproduce tabulated
//! numbers that were generated with it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bell::{cglmp_value, layer_weight, BellValue};
use crate::error::{Error, Result};
use crate::measurements::{JointProbabilityTable, PhaseOffsets, Setting};
use crate::qmath::{dagger, kron, trace, ComplexMatrix};
use crate::states::{check_dim, check_mixing, DensityMatrix};

/// Success probabilities below this are treated as a failed filter.
pub const MIN_SUCCESS_PROB: f64 = 1e-14;

const DOMAIN_SLACK: f64 = 1e-12;

/// `diag(p, 1, …, 1)`.
pub fn filter_operator(d: usize, p: f64) -> Result<ComplexMatrix> {
    check_dim(d)?;
    check_unit_interval("filter strength", p)?;
    let mut diag = vec![1.0; d];
    diag[0] = p;
    Ok(ComplexMatrix::from_real_diagonal(&diag))
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterPair {
    d: usize,
    xi: f64,
    delta: f64,
}

impl FilterPair {
    pub fn new(d: usize, xi: f64, delta: f64) -> Result<Self> {
        check_dim(d)?;
        check_unit_interval("xi", xi)?;
        check_unit_interval("delta", delta)?;
        Ok(Self { d, xi, delta })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(d, 1.0, 1.0)
    }

    /// Bob's strength tied to Alice's as `δ = ξ/√q`; requires `ξ ≤ √q`.
    pub fn coupled(d: usize, q: f64, xi: f64) -> Result<Self> {
        check_mixing(q)?;
        check_coupled_domain(q, xi)?;
        Self::new(d, xi, (xi / q.sqrt()).min(1.0))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `F_A ⊗ F_B`.
    pub fn operator(&self) -> ComplexMatrix {
        let fa = filter_operator(self.d, self.xi).expect("validated");
        let fb = filter_operator(self.d, self.delta).expect("validated");
        kron(&fa, &fb)
    }
}

fn check_coupled_domain(q: f64, xi: f64) -> Result<()> {
    if !(xi >= 0.0) || xi > q.sqrt() + DOMAIN_SLACK {
        return Err(Error::Domain(format!(
            "coupled filter needs 0 <= xi <= sqrt(q); got xi={xi}, sqrt(q)={}",
            q.sqrt()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredState {
    pub rho_f: DensityMatrix,
    pub success_prob: f64,
}

/// `FρF† / Tr[FρF†]` with `F = F_A ⊗ F_B`.
pub fn apply_filters(rho: &DensityMatrix, filters: &FilterPair) -> Result<FilteredState> {
    if rho.local_dim() != filters.d() {
        return Err(Error::Dimension(format!(
            "filters for d={} applied to a d={} state",
            filters.d(),
            rho.local_dim()
        )));
    }
    let f = filters.operator();
    let unnormalized = f.matmul(rho.matrix())?.matmul(&dagger(&f))?;
    let success_prob = trace(&unnormalized)?.re;
    if !(success_prob > MIN_SUCCESS_PROB) {
        return Err(Error::DegenerateFilter(success_prob));
    }
    let rho_f = DensityMatrix::new(rho.local_dim(), unnormalized.scale_real(1.0 / success_prob))?;
    Ok(FilteredState { rho_f, success_prob })
}

/// Filter success probability `N_d` for the maximally entangled mixture
/// under the coupled strategy.
pub fn normalization(d: usize, q: f64, xi: f64) -> f64 {
    let d = d as f64;
    let xi2 = xi * xi;
    (q + (1.0 - q) * xi2) * (1.0 - 1.0 / d) + xi2 * xi2 / (q * d)
}

/// How the pure/noise interference term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossTerm {
    /// `2Σ_j cos(2πjx/d)` in closed trigonometric form.
    Exact,
    /// `1/sin(πx/d)`. Disagrees with the density-matrix route; kept to
    /// reproduce published tables generated with it.
    ReciprocalSine,
}

fn check_closed_form_domain(d: usize, q: f64, xi: f64) -> Result<()> {
    check_dim(d)?;
    check_mixing(q)?;
    check_coupled_domain(q, xi)
}

/// `|Σ_j e^{2πijx/d}|²` and `2 Re Σ_j e^{2πijx/d}`.
fn fourier_sums(d: usize, x: f64) -> (f64, f64) {
    let s = (PI * x / d as f64).sin();
    if s.abs() < 1e-12 {
        let df = d as f64;
        return (df * df, 2.0 * df);
    }
    let num = (PI * x).sin();
    let two_pi_x = 2.0 * PI * x;
    let cot = (PI * x / d as f64).cos() / s;
    (num * num / (s * s), 1.0 - two_pi_x.cos() + two_pi_x.sin() * cot)
}

/// Filtered probability as a function of the phase argument `x`.
fn filtered_prob_at(d: usize, q: f64, xi: f64, x: f64, cross: CrossTerm) -> f64 {
    let df = d as f64;
    let xi2 = xi * xi;
    let sq = q.sqrt();
    let s1 = (1.0 - q) * (df - 1.0) * xi2 + (1.0 - q) * xi2 * xi2 / q + (xi2 - sq).powi(2);
    let (pure, interference) = match cross {
        CrossTerm::Exact => fourier_sums(d, x),
        CrossTerm::ReciprocalSine => {
            let s = (PI * x / df).sin();
            (1.0 / (2.0 * s * s), 1.0 / s)
        }
    };
    (q * pure + sq * (xi2 - sq) * interference + s1) / (df.powi(3) * normalization(d, q, xi))
}

/// `P^F(A_a = k, B_b = l)` for the filtered maximally entangled mixture.
pub fn filtered_prob_closed_form(d: usize, q: f64, xi: f64, a: Setting, b: Setting, k: usize, l: usize) -> Result<f64> {
    filtered_prob_with_offsets(d, q, xi, a, b, k, l, &PhaseOffsets::default())
}

/// As [`filtered_prob_closed_form`] with arbitrary phase offsets.
#[allow(clippy::too_many_arguments)]
pub fn filtered_prob_with_offsets(
    d: usize,
    q: f64,
    xi: f64,
    a: Setting,
    b: Setting,
    k: usize,
    l: usize,
    offsets: &PhaseOffsets,
) -> Result<f64> {
    check_closed_form_domain(d, q, xi)?;
    if k >= d || l >= d {
        return Err(Error::Domain(format!("outcomes ({k}, {l}) out of range for d={d}")));
    }
    let x = k as f64 - l as f64 + offsets.alpha(a) + offsets.beta(b);
    Ok(filtered_prob_at(d, q, xi, x, CrossTerm::Exact))
}

/// Whole closed-form table for the filtered maximally entangled mixture.
pub fn filtered_table_closed_form(d: usize, q: f64, xi: f64, offsets: &PhaseOffsets) -> Result<JointProbabilityTable> {
    check_closed_form_domain(d, q, xi)?;
    JointProbabilityTable::from_fn(d, |a, b, k, l| {
        let x = k as f64 - l as f64 + offsets.alpha(a) + offsets.beta(b);
        filtered_prob_at(d, q, xi, x, CrossTerm::Exact)
    })
}

fn filtered_cglmp_sum(d: usize, q: f64, xi: f64, cross: CrossTerm) -> f64 {
    let p = |c: i64| filtered_prob_at(d, q, xi, c as f64 + 0.25, cross);
    let sum: f64 = (0..d / 2)
        .map(|k| {
            let ki = k as i64;
            layer_weight(d, k) * (p(ki) - p(-(ki + 1)))
        })
        .sum();
    4.0 * d as f64 * sum
}

/// CGLMP value of the filtered maximally entangled mixture,
/// `4d Σ_k (1 − 2k/(d−1)) (p_k − p_{−(k+1)})` with `p_c` the cell
/// probability at `x = c + 1/4`.
pub fn filtered_cglmp_closed_form(d: usize, q: f64, xi: f64) -> Result<f64> {
    check_closed_form_domain(d, q, xi)?;
    Ok(filtered_cglmp_sum(d, q, xi, CrossTerm::Exact))
}

/// Closed form with a selectable cross term and without the `ξ ≤ √q`
/// restriction (so `δ = ξ/√q` may exceed 1). Only `0 ≤ ξ ≤ 1` is checked.
pub fn filtered_cglmp_unrestricted(d: usize, q: f64, xi: f64, cross: CrossTerm) -> Result<f64> {
    check_dim(d)?;
    check_mixing(q)?;
    check_unit_interval("xi", xi)?;
    Ok(filtered_cglmp_sum(d, q, xi, cross))
}

/// Same value routed through a full closed-form table and the generic
/// CGLMP evaluator.
pub fn filtered_cglmp_via_table(d: usize, q: f64, xi: f64) -> Result<BellValue> {
    Ok(cglmp_value(&filtered_table_closed_form(d, q, xi, &PhaseOffsets::default())?))
}

fn rational(num: f64, den: f64, q: f64, xi: f64) -> Result<f64> {
    if den.abs() < 1e-14 {
        return Err(Error::Singular { q, xi });
    }
    Ok(num / den)
}

fn check_rational_domain(q: f64, xi: f64) -> Result<()> {
    check_mixing(q)?;
    check_coupled_domain(q, xi)
}

/// Published three-decimal rational fit of the filtered CGLMP value for
/// the maximally violating qutrit mixture.
pub fn filtered_rational_d3(q: f64, xi: f64) -> Result<f64> {
    check_rational_domain(q, xi)?;
    let x2 = xi * xi;
    let num = 2.218 * x2 * q.sqrt() + 0.696 * q;
    let den = x2 * x2 * (0.047 * q + 0.333) / q - 0.666 * x2 * (q - 1.0) + 0.619 * q;
    rational(num, den, q, xi)
}

/// Published rational fit for `d = 4`.
pub fn filtered_rational_d4(q: f64, xi: f64) -> Result<f64> {
    check_rational_domain(q, xi)?;
    let x2 = xi * xi;
    let num = -2.562 * x2 * q.powf(1.5) - 1.401 * q * q;
    let den = -0.902 * q * q + x2 * x2 * (-0.097 * q - 0.333) - x2 * q * (1.0 - q);
    rational(num, den, q, xi)
}

/// Published rational fit for `d = 5`.
pub fn filtered_rational_d5(q: f64, xi: f64) -> Result<f64> {
    check_rational_domain(q, xi)?;
    let x2 = xi * xi;
    let num = -2.172 * x2 * q.powf(1.5) - 1.597 * q * q;
    let den = -0.889 * q * q + x2 * x2 * (-0.110 * q - 0.25) - x2 * q * (1.0 - q);
    rational(num, den, q, xi)
}

/// Dispatches to the rational fit for `d ∈ {3, 4, 5}`.
pub fn filtered_rational(d: usize, q: f64, xi: f64) -> Result<f64> {
    match d {
        3 => filtered_rational_d3(q, xi),
        4 => filtered_rational_d4(q, xi),
        5 => filtered_rational_d5(q, xi),
        _ => Err(Error::Domain(format!("no rational fit for d={d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::cglmp_closed_form_optimal;
    use crate::qmath::{outer, ComplexVector, TOL};
    use crate::states::{max_entangled, mixed_state, MixedStateParams};

    fn me_mixture(d: usize, q: f64) -> DensityMatrix {
        mixed_state(&MixedStateParams::new(d, q, max_entangled(d).unwrap()).unwrap())
    }

    #[test]
    fn filter_operator_cases() {
        assert_eq!(filter_operator(4, 1.0).unwrap(), ComplexMatrix::identity(4));
        assert_eq!(filter_operator(3, 0.0).unwrap(), ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.0]));
        assert_eq!(filter_operator(2, 0.79).unwrap(), ComplexMatrix::from_real_diagonal(&[0.79, 1.0]));
        assert!(matches!(filter_operator(3, 1.5), Err(Error::Domain(_))));
        assert!(matches!(filter_operator(3, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn coupled_filter_domain() {
        let f = FilterPair::coupled(3, 0.64, 0.4).unwrap();
        assert!((f.delta() - 0.5).abs() < 1e-15);
        assert!(matches!(FilterPair::coupled(3, 0.5, 0.8), Err(Error::Domain(_))));
        assert!(FilterPair::coupled(3, 0.0, 0.0).is_err());
    }

    #[test]
    fn identity_filter_is_a_no_op() {
        let rho = me_mixture(3, 0.4);
        let out = apply_filters(&rho, &FilterPair::identity(3).unwrap()).unwrap();
        assert!((out.success_prob - 1.0).abs() < TOL);
        assert!(out.rho_f.matrix().approx_eq(rho.matrix(), TOL));
    }

    #[test]
    fn two_qubit_filtered_state_matches_expansion() {
        let (q, xi): (f64, f64) = (0.7, 0.79);
        let n2 = 0.5 * (q + (1.0 - q) * xi * xi + xi.powi(4) / q);
        let psi = max_entangled(2).unwrap();
        let e00 = ComplexVector::basis(4, 0);
        let e01 = ComplexVector::basis(4, 1);
        let cross = &outer(&psi, &e00) + &outer(&e00, &psi);
        let expected = [
            outer(&psi, &psi).scale_real(q),
            cross.scale_real((q / 2.0).sqrt() * (xi * xi - q.sqrt())),
            outer(&e01, &e01).scale_real((1.0 - q) * xi * xi / 2.0),
            outer(&e00, &e00).scale_real((xi.powi(4) - 2.0 * xi * xi * q.powf(1.5) + q * q) / (2.0 * q)),
        ]
        .iter()
        .fold(ComplexMatrix::zeros(4, 4), |acc, m| &acc + m)
        .scale_real(1.0 / n2);

        let out = apply_filters(&me_mixture(2, q), &FilterPair::coupled(2, q, xi).unwrap()).unwrap();
        assert!((out.success_prob - n2).abs() < TOL);
        assert!(out.rho_f.matrix().approx_eq(&expected, TOL));
    }

    #[test]
    fn fully_blocking_filters_leave_smaller_maximally_entangled_state() {
        let out = apply_filters(&me_mixture(3, 0.6), &FilterPair::new(3, 0.0, 0.0).unwrap()).unwrap();
        let mut v = ComplexVector::zeros(9);
        v[4] = num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[8] = v[4];
        assert!(out.rho_f.matrix().approx_eq(&outer(&v, &v), TOL));
        assert!((out.success_prob - normalization(3, 0.6, 0.0)).abs() < TOL);
    }

    #[test]
    fn degenerate_filter_is_reported() {
        let product = ComplexVector::basis(4, 0);
        let rho = DensityMatrix::pure(2, &product).unwrap();
        let err = apply_filters(&rho, &FilterPair::new(2, 0.0, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DegenerateFilter(_)));
    }

    #[test]
    fn identity_limit_reduces_to_unfiltered_optimum() {
        for d in 2..=12 {
            let v = filtered_cglmp_closed_form(d, 1.0, 1.0).unwrap();
            assert!((v - cglmp_closed_form_optimal(d).unwrap()).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn closed_form_cells_sum_to_one() {
        let t = filtered_table_closed_form(5, 0.65, 0.71, &PhaseOffsets::default()).unwrap();
        for a in Setting::BOTH {
            for b in Setting::BOTH {
                assert!((t.total(a, b) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn filtered_value_examples() {
        assert!(filtered_cglmp_closed_form(3, 0.9, 0.85).unwrap() > 2.0);
        assert!(filtered_cglmp_closed_form(8, 0.05, 0.01).unwrap() > 2.0);
        assert!(matches!(filtered_cglmp_closed_form(3, 0.68, 0.85), Err(Error::Domain(_))));
        assert!(matches!(filtered_cglmp_closed_form(3, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cross_term_variants_agree_only_when_interference_vanishes() {
        // ξ² = √q kills the interference term
        let q: f64 = 0.49;
        let xi = q.powf(0.25);
        let exact = filtered_cglmp_unrestricted(4, q, xi, CrossTerm::Exact).unwrap();
        let printed = filtered_cglmp_unrestricted(4, q, xi, CrossTerm::ReciprocalSine).unwrap();
        assert!((exact - printed).abs() < 1e-12);
        let exact = filtered_cglmp_unrestricted(4, 0.6, 0.7, CrossTerm::Exact).unwrap();
        let printed = filtered_cglmp_unrestricted(4, 0.6, 0.7, CrossTerm::ReciprocalSine).unwrap();
        assert!((exact - printed).abs() > 1e-3);
    }

    #[test]
    fn rational_fits() {
        assert!(filtered_rational_d3(0.64, 0.73).unwrap() > 2.0);
        assert!(filtered_rational_d3(0.60, 0.73).unwrap() < 2.0);
        // identity filter at q = 1 gives the unfiltered optimum 2.915
        assert!((filtered_rational_d3(1.0, 1.0).unwrap() - 2.915).abs() < 3e-3);
        assert!(filtered_rational_d4(0.6, 0.64).unwrap() > 2.0);
        assert!(filtered_rational_d5(0.55, 0.54).unwrap() > 2.0);
        assert!(matches!(filtered_rational(6, 0.5, 0.5), Err(Error::Domain(_))));
    }
}
