//! wasm-bindgen exports for the browser demo in `www/`.
//!
//! Each export has a plain Rust twin (`*_impl`) so the logic is testable
//! off the browser.

use cglmp_core::search::Scenario;
use cglmp_core::{optimize_xi, q_threshold, region_scan, Functional, Result, StateKind};
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-7;

fn scenario(d: usize, state: &str) -> Result<Scenario> {
    let kind: StateKind = state.parse()?;
    let functional = if d == 2 { Functional::ChshOptimal } else { Functional::Cglmp };
    Ok(Scenario::new(d, kind)?.with_functional(functional))
}

/// Filter strength from JS: negative or NaN means unfiltered.
fn as_filter(xi: f64) -> Option<f64> {
    (xi >= 0.0).then_some(xi)
}

pub fn bell_value_impl(d: usize, state: &str, q: f64, xi: f64) -> Result<f64> {
    scenario(d, state)?.bell_value(q, as_filter(xi))
}

/// JSON threshold record. `xi` negative: unfiltered; NaN: optimize ξ.
pub fn threshold_impl(d: usize, state: &str, xi: f64) -> Result<String> {
    let s = scenario(d, state)?;
    let r = if xi.is_nan() { optimize_xi(&s, TOL)? } else { q_threshold(&s, as_filter(xi), TOL)? };
    Ok(serde_json::to_string(&r).expect("threshold serializes"))
}

/// Row-major `nq × nxi` values over `q ∈ [q_min, 1]`, `ξ ∈ [xi_min, 1]`;
/// NaN marks cells with `ξ > √q`.
pub fn region_impl(d: usize, state: &str, q_min: f64, nq: usize, xi_min: f64, nxi: usize) -> Result<Vec<f64>> {
    let s = scenario(d, state)?;
    let grid = region_scan(
        &s,
        &cglmp_core::search::linspace(q_min, 1.0, nq),
        &cglmp_core::search::linspace(xi_min, 1.0, nxi),
    )?;
    Ok(grid.values.into_iter().flatten().map(|v| v.unwrap_or(f64::NAN)).collect())
}

fn js(e: cglmp_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = bellValue)]
pub fn bell_value(d: usize, state: &str, q: f64, xi: f64) -> std::result::Result<f64, JsError> {
    bell_value_impl(d, state, q, xi).map_err(js)
}

#[wasm_bindgen]
pub fn threshold(d: usize, state: &str, xi: f64) -> std::result::Result<String, JsError> {
    threshold_impl(d, state, xi).map_err(js)
}

#[wasm_bindgen]
pub fn region(
    d: usize,
    state: &str,
    q_min: f64,
    nq: usize,
    xi_min: f64,
    nxi: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    region_impl(d, state, q_min, nq, xi_min, nxi).map_err(js)
}
