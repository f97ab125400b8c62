//! Tabulated reference thresholds used by the reproduction commands and
//! the acceptance suite.

/// One row of a threshold table: violation for `q_unfiltered < q ≤ 1`
/// before filtering and `q_filtered < q ≤ 1` after filtering with `xi`.
/// `xi = None` marks rows where violation survives for every `q > 0` as
/// the filter strength goes to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub d: usize,
    pub q_unfiltered: f64,
    pub q_filtered: f64,
    pub xi: Option<f64>,
}

const fn row(d: usize, q_unfiltered: f64, q_filtered: f64, xi: Option<f64>) -> ReferenceRow {
    ReferenceRow { d, q_unfiltered, q_filtered, xi }
}

/// Maximally entangled mixture.
pub const MAX_ENTANGLED_ROWS: [ReferenceRow; 9] = [
    row(3, 0.696, 0.664, Some(0.85)),
    row(4, 0.690, 0.648, Some(0.81)),
    row(5, 0.687, 0.627, Some(0.71)),
    row(6, 0.684, 0.610, Some(0.60)),
    row(7, 0.683, 0.524, Some(0.25)),
    row(8, 0.682, 0.0, None),
    row(9, 0.681, 0.0, None),
    row(10, 0.680, 0.0, None),
    row(100, 0.674, 0.0, None),
];

/// Maximally CGLMP-violating mixture.
pub const MAX_VIOLATING_ROWS: [ReferenceRow; 3] =
    [row(3, 0.686, 0.625, Some(0.73)), row(4, 0.672, 0.585, Some(0.64)), row(5, 0.663, 0.539, Some(0.54))];

/// Filter strength standing in for the `ξ → 0` limit.
pub const VANISHING_XI: f64 = 1e-3;

/// Two-qubit filtered threshold and filter strength.
pub const QUBIT_FILTERED: (f64, f64) = (0.665, 0.79);

/// Maximal CGLMP values of the optimal Schmidt states, `d = 3, 4, 5`.
pub const MAX_VIOLATING_VALUES: [(usize, f64); 3] = [(3, 2.915), (4, 2.972), (5, 3.0158)];
