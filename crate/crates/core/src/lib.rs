//! Bell violations of qudit mixtures before and after local filtering.
//!
//! The state family is `ρ = q|ψ⟩⟨ψ| + (1−q)|0⟩⟨0| ⊗ I_d/d` with `|ψ⟩`
//! either maximally entangled or the Schmidt state that maximizes the
//! CGLMP value. Alice and Bob may first apply diagonal filters that
//! attenuate their `|0⟩` component; the CGLMP (and, for qubits, CHSH)
//! value of the post-selected state then decides whether the mixture is
//! nonlocal.
//!
//! Two independent routes are provided wherever possible: explicit
//! density matrices with Fourier-basis projective measurements, and
//! closed-form trigonometric expressions for the maximally entangled case.

// negated float comparisons below deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod error;
pub mod filtering;
pub mod measurements;
pub mod qmath;
pub mod reference;
pub mod search;
pub mod states;

pub use bell::{
    aggregate, cglmp_closed_form_optimal, cglmp_value, chsh_optimal, chsh_value, unfiltered_threshold, BellValue,
    Order, LOCAL_BOUND,
};
pub use error::{Error, Result};
pub use filtering::{
    apply_filters, filter_operator, filtered_cglmp_closed_form, filtered_prob_closed_form, filtered_rational,
    normalization, CrossTerm, FilterPair, FilteredState,
};
pub use measurements::{joint_probability_table, JointProbabilityTable, PhaseOffsets, Setting};
pub use qmath::{ComplexMatrix, ComplexVector};
pub use search::{
    optimize_gammas, optimize_xi, q_threshold, region_scan, Boundary, Functional, GammaOptimum, GammaSearchOptions,
    RegionGrid, Scenario, ThresholdResult,
};
pub use states::{
    max_entangled, mixed_state, schmidt_state, DensityMatrix, MixedStateParams, SchmidtCoefficients, StateKind,
};
