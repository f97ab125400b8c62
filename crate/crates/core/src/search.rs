//! Parameter-space searches: mixing thresholds, filter strengths,
//! Schmidt coefficients and `(q, ξ)` region grids.

use serde::{Deserialize, Serialize};

use crate::bell::{cglmp_closed_form_optimal, cglmp_value, chsh_optimal, LOCAL_BOUND};
use crate::error::{Error, Result};
use crate::filtering::{apply_filters, filtered_cglmp_closed_form, FilterPair};
use crate::measurements::{joint_probability_table, PhaseOffsets};
use crate::states::{
    check_dim, mixed_state, published_max_violating, pure_state, schmidt_state, DensityMatrix, MixedStateParams,
    SchmidtCoefficients, StateKind,
};

/// Smallest mixing parameter searched; `q = 0` itself is excluded.
pub const Q_FLOOR: f64 = 1e-4;
/// Points in the monotonicity pre-scan.
pub const PRESCAN_POINTS: usize = 50;
/// Largest local dimension routed through density matrices by default.
pub const DEFAULT_ORACLE_CAP: usize = 16;

/// Bell expression being thresholded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// CGLMP with the fixed Fourier settings.
    Cglmp,
    /// CHSH maximized over projective qubit settings (`d = 2` only).
    ChshOptimal,
}

impl std::str::FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cglmp" => Ok(Self::Cglmp),
            "chsh-optimal" => Ok(Self::ChshOptimal),
            other => Err(Error::Validation(format!("unknown functional '{other}'"))),
        }
    }
}

/// Evaluation path for a Bell value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    ClosedForm,
    Oracle,
}

/// Everything needed to evaluate the Bell value at a point `(q, ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub d: usize,
    pub kind: StateKind,
    pub gammas: Option<SchmidtCoefficients>,
    pub functional: Functional,
    pub oracle_cap: usize,
    pub offsets: PhaseOffsets,
    /// Route max-entangled CGLMP values through density matrices too.
    pub force_oracle: bool,
}

impl Scenario {
    pub fn new(d: usize, kind: StateKind) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            d,
            kind,
            gammas: None,
            functional: Functional::Cglmp,
            oracle_cap: DEFAULT_ORACLE_CAP,
            offsets: PhaseOffsets::default(),
            force_oracle: false,
        })
    }

    pub fn with_gammas(mut self, gammas: SchmidtCoefficients) -> Self {
        self.gammas = Some(gammas);
        self
    }

    pub fn with_functional(mut self, functional: Functional) -> Self {
        self.functional = functional;
        self
    }

    pub fn with_oracle_cap(mut self, cap: usize) -> Self {
        self.oracle_cap = cap;
        self
    }

    pub fn forcing_oracle(mut self) -> Self {
        self.force_oracle = true;
        self
    }

    pub fn route(&self) -> Route {
        let closed = self.kind == StateKind::MaxEntangled
            && self.functional == Functional::Cglmp
            && self.offsets == PhaseOffsets::default()
            && !self.force_oracle;
        if closed {
            Route::ClosedForm
        } else {
            Route::Oracle
        }
    }

    fn check(&self) -> Result<()> {
        if self.functional == Functional::ChshOptimal && self.d != 2 {
            return Err(Error::Domain(format!("optimal CHSH needs d=2, got d={}", self.d)));
        }
        if self.route() == Route::Oracle && self.d > self.oracle_cap {
            return Err(Error::Domain(format!(
                "d={} exceeds the density-matrix cap {}; only max-entangled CGLMP has a closed form",
                self.d, self.oracle_cap
            )));
        }
        Ok(())
    }

    /// Unfiltered (`xi = None`) or coupled-filter mixture as a density matrix.
    pub fn density_matrix(&self, q: f64, xi: Option<f64>) -> Result<DensityMatrix> {
        let psi = pure_state(self.d, self.kind, self.gammas.as_ref())?;
        let rho = mixed_state(&MixedStateParams::new(self.d, q, psi)?);
        match xi {
            None => Ok(rho),
            Some(xi) => Ok(apply_filters(&rho, &FilterPair::coupled(self.d, q, xi)?)?.rho_f),
        }
    }

    /// Bell value of the mixture at `q`, after coupled filtering when
    /// `xi` is given.
    pub fn bell_value(&self, q: f64, xi: Option<f64>) -> Result<f64> {
        self.check()?;
        match self.route() {
            Route::ClosedForm => match xi {
                Some(xi) => filtered_cglmp_closed_form(self.d, q, xi),
                None => {
                    crate::states::check_mixing(q)?;
                    Ok(q * cglmp_closed_form_optimal(self.d)?)
                }
            },
            Route::Oracle => {
                let rho = self.density_matrix(q, xi)?;
                match self.functional {
                    Functional::Cglmp => Ok(cglmp_value(&joint_probability_table(&rho, &self.offsets)?).value),
                    Functional::ChshOptimal => Ok(chsh_optimal(&rho)?.value),
                }
            }
        }
    }
}

/// How the located threshold relates to the searched interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Bell value crosses the local bound inside the interval.
    Crossing,
    /// Already violated at the lowest admissible `q`.
    LowerEdge,
    /// Not violated anywhere on the interval.
    NoViolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub d: usize,
    pub state_kind: StateKind,
    pub functional: Functional,
    pub filtered: bool,
    pub xi_star: Option<f64>,
    /// Violation holds for `q_star < q ≤ 1` (or from the edge itself for
    /// [`Boundary::LowerEdge`]); `None` when nothing is violated.
    pub q_star: Option<f64>,
    pub bell_at_threshold: Option<f64>,
    pub boundary: Boundary,
}

/// Lowest admissible mixing parameter for a coupled filter of strength `xi`.
pub fn q_lower_bound(xi: Option<f64>) -> f64 {
    xi.map_or(Q_FLOOR, |x| (x * x).max(Q_FLOOR))
}

/// Locates the mixing parameter above which the Bell value exceeds 2.
///
/// The search interval is `[max(ξ², Q_FLOOR), 1]` (`[Q_FLOOR, 1]` when
/// unfiltered). A 50-point pre-scan checks that the violated set is a
/// single upper interval before bisecting to `tol`.
pub fn q_threshold(scenario: &Scenario, xi: Option<f64>, tol: f64) -> Result<ThresholdResult> {
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(x) = xi {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("xi must lie in [0, 1], got {x}")));
        }
    }
    let lower = q_lower_bound(xi);
    let excess = |q: f64| scenario.bell_value(q, xi).map(|v| v - LOCAL_BOUND);

    let scan: Vec<(f64, f64)> = (0..PRESCAN_POINTS)
        .map(|i| {
            let q = if i + 1 == PRESCAN_POINTS {
                1.0
            } else {
                lower + (1.0 - lower) * i as f64 / (PRESCAN_POINTS - 1) as f64
            };
            excess(q).map(|e| (q, e))
        })
        .collect::<Result<_>>()?;

    let transitions = scan.windows(2).filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0)).count();
    let first_violated = scan.iter().position(|&(_, e)| e > 0.0);
    let base = ThresholdResult {
        d: scenario.d,
        state_kind: scenario.kind,
        functional: scenario.functional,
        filtered: xi.is_some(),
        xi_star: xi,
        q_star: None,
        bell_at_threshold: None,
        boundary: Boundary::NoViolation,
    };
    let Some(first) = first_violated else {
        return Ok(base);
    };
    // violated set must be an upper interval ending at q = 1
    if transitions > 1 || scan.last().is_none_or(|&(_, e)| e <= 0.0) {
        return Err(Error::MultiCrossing { crossings: transitions, scan });
    }
    if first == 0 {
        return Ok(ThresholdResult {
            q_star: Some(lower),
            bell_at_threshold: Some(scan[0].1 + LOCAL_BOUND),
            boundary: Boundary::LowerEdge,
            ..base
        });
    }

    let (mut lo, mut hi) = (scan[first - 1].0, scan[first].0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdResult {
        q_star: Some(hi),
        bell_at_threshold: Some(excess(hi)? + LOCAL_BOUND),
        boundary: Boundary::Crossing,
        ..base
    })
}

fn threshold_key(r: &ThresholdResult) -> f64 {
    r.q_star.unwrap_or(f64::INFINITY)
}

fn map_grid<T: Send, F>(xs: &[f64], f: F) -> Vec<T>
where
    F: Fn(f64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        xs.par_iter().map(|&x| f(x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        xs.iter().map(|&x| f(x)).collect()
    }
}

/// Filter strength minimizing the violation threshold.
///
/// Coarse grid `ξ = 0.01, 0.02, …, 1.00`, then golden-section refinement
/// within one grid step of the best cell.
pub fn optimize_xi(scenario: &Scenario, tol: f64) -> Result<ThresholdResult> {
    let grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
    let results = map_grid(&grid, |xi| q_threshold(scenario, Some(xi), tol));
    let mut best: Option<ThresholdResult> = None;
    for r in results {
        let r = r?;
        if r.q_star.is_some() && best.as_ref().is_none_or(|b| threshold_key(&r) < threshold_key(b)) {
            best = Some(r);
        }
    }
    let Some(best) = best else {
        return q_threshold(scenario, Some(1.0), tol);
    };
    let centre = best.xi_star.expect("filtered result");
    let (mut a, mut b) = ((centre - 0.01).max(1e-3), (centre + 0.01).min(1.0));
    let eval = |xi: f64| q_threshold(scenario, Some(xi), tol);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let mut rc = eval(c)?;
    let mut re = eval(e)?;
    let mut best = best;
    for _ in 0..40 {
        if b - a < 1e-4 {
            break;
        }
        if threshold_key(&rc) <= threshold_key(&re) {
            b = e;
            e = c;
            re = rc;
            c = b - inv_phi * (b - a);
            rc = eval(c)?;
        } else {
            a = c;
            c = e;
            rc = re;
            e = a + inv_phi * (b - a);
            re = eval(e)?;
        }
        for r in [&rc, &re] {
            if threshold_key(r) < threshold_key(&best) {
                best = r.clone();
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSearchOptions {
    /// Extra deterministic restarts beyond uniform and the reference optimum.
    pub restarts: usize,
    /// Enforce `γ_j = γ_{d+1−j}` and search only half the coordinates.
    pub symmetric: bool,
    pub max_sweeps: usize,
    pub initial_step: f64,
    pub min_step: f64,
    /// A sweep improving less than this shrinks the step.
    pub sweep_tol: f64,
}

impl Default for GammaSearchOptions {
    fn default() -> Self {
        Self { restarts: 2, symmetric: false, max_sweeps: 20_000, initial_step: 0.05, min_step: 1e-7, sweep_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaOptimum {
    pub d: usize,
    pub gammas: SchmidtCoefficients,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// CGLMP value of the pure state `Σ_j γ_j|jj⟩` (γ from `weights`,
/// normalized) through the density-matrix route.
pub fn pure_schmidt_cglmp(weights: &[f64], offsets: &PhaseOffsets) -> Result<f64> {
    let gammas = SchmidtCoefficients::normalized(weights)?;
    let rho = DensityMatrix::pure(gammas.dim(), &schmidt_state(&gammas)?)?;
    Ok(cglmp_value(&joint_probability_table(&rho, offsets)?).value)
}

fn restart_seeds(d: usize, options: &GammaSearchOptions) -> Vec<Vec<f64>> {
    let mut seeds = vec![vec![1.0; d]];
    if let Some(g) = published_max_violating(d) {
        seeds.push(g.as_slice().to_vec());
    }
    for r in 0..options.restarts {
        // symmetric cosine bumps of alternating sign, wider with each restart
        let amp = 0.15 * if r % 2 == 0 { 1.0 } else { -1.0 };
        let freq = (r / 2 + 1) as f64;
        let seed = (0..d)
            .map(|j| {
                let centred = (j as f64 + 0.5) / d as f64 - 0.5;
                1.0 + amp * (2.0 * std::f64::consts::PI * freq * centred).cos()
            })
            .collect();
        seeds.push(seed);
    }
    seeds
}

fn expand(params: &[f64], d: usize, symmetric: bool) -> Vec<f64> {
    if !symmetric {
        return params.to_vec();
    }
    (0..d).map(|j| params[j.min(d - 1 - j)]).collect()
}

fn coordinate_ascent(
    seed: &[f64],
    d: usize,
    options: &GammaSearchOptions,
    offsets: &PhaseOffsets,
    evaluations: &mut usize,
) -> Result<(Vec<f64>, f64, bool)> {
    let n = if options.symmetric { d.div_ceil(2) } else { d };
    let mut params: Vec<f64> = seed[..n].to_vec();
    let mut f = |p: &[f64]| {
        *evaluations += 1;
        pure_schmidt_cglmp(&expand(p, d, options.symmetric), offsets)
    };
    let mut value = f(&params)?;
    let mut step = options.initial_step;
    for _ in 0..options.max_sweeps {
        let start = value;
        for j in 0..n {
            for dir in [1.0, -1.0] {
                let mut trial = params.clone();
                trial[j] = (trial[j] + dir * step).max(0.0);
                if trial.iter().all(|&w| w == 0.0) {
                    continue;
                }
                let v = f(&trial)?;
                if v > value {
                    value = v;
                    params = trial;
                    break;
                }
            }
        }
        if value - start < options.sweep_tol {
            step *= 0.5;
            if step < options.min_step {
                return Ok((expand(&params, d, options.symmetric), value, true));
            }
        }
    }
    Ok((expand(&params, d, options.symmetric), value, false))
}

/// Schmidt coefficients maximizing the CGLMP value of the pure state under
/// the fixed Fourier settings.
pub fn optimize_gammas(d: usize, options: &GammaSearchOptions) -> Result<GammaOptimum> {
    if !(3..=8).contains(&d) {
        return Err(Error::Domain(format!("Schmidt optimization supports 3 <= d <= 8, got d={d}")));
    }
    let offsets = PhaseOffsets::default();
    let mut evaluations = 0;
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for seed in restart_seeds(d, options) {
        let run = coordinate_ascent(&seed, d, options, &offsets, &mut evaluations)?;
        if best.as_ref().is_none_or(|b| run.1 > b.1) {
            best = Some(run);
        }
    }
    let (weights, value, converged) = best.expect("at least one seed");
    Ok(GammaOptimum { d, gammas: SchmidtCoefficients::normalized(&weights)?, value, converged, evaluations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub d: usize,
    pub state_kind: StateKind,
    pub q_values: Vec<f64>,
    pub xi_values: Vec<f64>,
    /// `values[i][j]` at `(q_values[i], xi_values[j])`; `None` where `ξ > √q`.
    pub values: Vec<Vec<Option<f64>>>,
}

impl RegionGrid {
    /// Valid cells as `(q, ξ, value)`, sorted by `(q, ξ)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.q_values
            .iter()
            .zip(&self.values)
            .flat_map(move |(&q, row)| self.xi_values.iter().zip(row).filter_map(move |(&xi, v)| v.map(|v| (q, xi, v))))
    }
}

fn check_monotone(name: &str, grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("{name} grid must be finite and strictly increasing")));
    }
    Ok(())
}

/// Bell value on every admissible cell of a `(q, ξ)` grid.
pub fn region_scan(scenario: &Scenario, q_grid: &[f64], xi_grid: &[f64]) -> Result<RegionGrid> {
    check_monotone("q", q_grid)?;
    check_monotone("xi", xi_grid)?;
    let rows = map_grid(q_grid, |q| {
        xi_grid
            .iter()
            .map(|&xi| if xi > q.sqrt() { Ok(None) } else { scenario.bell_value(q, Some(xi)).map(Some) })
            .collect::<Result<Vec<_>>>()
    });
    let values = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid {
        d: scenario.d,
        state_kind: scenario.kind,
        q_values: q_grid.to_vec(),
        xi_values: xi_grid.to_vec(),
        values,
    })
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
    }
}
