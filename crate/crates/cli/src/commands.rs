use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Value};

use cglmp_core::filtering::{filtered_cglmp_unrestricted, filtered_table_closed_form};
use cglmp_core::reference::{MAX_ENTANGLED_ROWS, MAX_VIOLATING_ROWS, VANISHING_XI};
use cglmp_core::search::{linspace, Route, Scenario};
use cglmp_core::states::published_max_violating;
use cglmp_core::*;

use crate::report::{csv, emit, sig10, Check, Report};
use crate::{Command, Format, StateArgs};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(std::io::Error),
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::Validation(_) | Error::Domain(_) | Error::Dimension(_)) => 2,
            CliError::Core(_) | CliError::ChecksFailed(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "I/O: {e}"),
            CliError::ChecksFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// `start:stop:n` grid specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, n] = parts.as_slice() else {
            return Err(format!("expected start:stop:n, got '{s}'"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad grid bound '{t}': {e}"));
        let spec = GridSpec {
            start: num(start)?,
            stop: num(stop)?,
            n: n.trim().parse().map_err(|e| format!("bad grid size '{n}': {e}"))?,
        };
        if !(spec.start.is_finite() && spec.stop.is_finite()) || (spec.n > 1 && spec.stop <= spec.start) {
            return Err(format!("grid '{s}' must satisfy start < stop"));
        }
        Ok(spec)
    }
}

impl GridSpec {
    fn points(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.n)
    }
}

fn default_functional(d: usize) -> Functional {
    if d == 2 {
        Functional::ChshOptimal
    } else {
        Functional::Cglmp
    }
}

/// Scenario for the flags, optimizing Schmidt coefficients first when a
/// max-violating state has no tabulated ones.
fn scenario(args: &StateArgs) -> CliResult<Scenario> {
    let functional = args.functional.unwrap_or_else(|| default_functional(args.d));
    let mut s = Scenario::new(args.d, args.state)?.with_functional(functional).with_oracle_cap(args.oracle_cap);
    if args.state == StateKind::MaxViolating && published_max_violating(args.d).is_none() {
        s = s.with_gammas(optimize_gammas(args.d, &GammaSearchOptions::default())?.gammas);
    }
    Ok(s)
}

fn scenario_params(args: &StateArgs, s: &Scenario) -> Value {
    json!({
        "d": args.d,
        "state": args.state,
        "functional": s.functional,
        "oracle_cap": args.oracle_cap,
        "gammas": s.gammas.as_ref().map(|g| g.as_slice().to_vec()),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn json_only(cmd: &str, format: Option<Format>) -> CliResult<()> {
    match format {
        Some(Format::Csv) => Err(CliError::Usage(format!("'{cmd}' only supports --format json"))),
        _ => Ok(()),
    }
}

fn emit_report(report: &Report, path: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    emit(&text, path).map_err(CliError::Io)
}

pub fn run(command: &Command, format: Option<Format>, output: Option<&Path>) -> CliResult<()> {
    match command {
        Command::Value { state, q, filtered, xi } => {
            json_only("value", format)?;
            let xi = filter_strength(*filtered, *xi, true)?;
            let s = scenario(state)?;
            let value = s.bell_value(*q, xi)?;
            let report = Report {
                command: "value".into(),
                params: merge(scenario_params(state, &s), json!({ "q": q, "filtered": filtered, "xi": xi })),
                results: json!({ "value": value, "violated": value > LOCAL_BOUND, "route": s.route() }),
                checks: vec![],
            };
            emit_report(&report, output)
        }
        Command::Threshold { state, filtered, xi, tol } => {
            json_only("threshold", format)?;
            let xi = filter_strength(*filtered, *xi, false)?;
            let s = scenario(state)?;
            let result = match (filtered, xi) {
                (true, None) => optimize_xi(&s, *tol)?,
                _ => q_threshold(&s, xi, *tol)?,
            };
            let report = Report {
                command: "threshold".into(),
                params: merge(scenario_params(state, &s), json!({ "filtered": filtered, "xi": xi, "tol": tol })),
                results: to_json(&result),
                checks: vec![],
            };
            emit_report(&report, output)
        }
        Command::Optimize { state, tol } => {
            json_only("optimize", format)?;
            let s = scenario(state)?;
            let result = optimize_xi(&s, *tol)?;
            let report = Report {
                command: "optimize".into(),
                params: merge(scenario_params(state, &s), json!({ "tol": tol })),
                results: to_json(&result),
                checks: vec![],
            };
            emit_report(&report, output)
        }
        Command::Gammas { d, restarts, symmetric } => {
            json_only("gammas", format)?;
            let options = GammaSearchOptions { restarts: *restarts, symmetric: *symmetric, ..Default::default() };
            let opt = optimize_gammas(*d, &options)?;
            let report = Report {
                command: "gammas".into(),
                params: json!({ "d": d, "restarts": restarts, "symmetric": symmetric }),
                results: to_json(&opt),
                checks: vec![Check::new("converged", opt.converged, format!("{} evaluations", opt.evaluations))],
            };
            emit_report(&report, output)
        }
        Command::Region { state, q_grid, xi_grid } => {
            let s = scenario(state)?;
            let grid = region_scan(&s, &q_grid.points(), &xi_grid.points())?;
            match format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = grid
                        .cells()
                        .map(|(q, xi, v)| {
                            vec![grid.d.to_string(), sig10(q), sig10(xi), sig10(v), (v > LOCAL_BOUND).to_string()]
                        })
                        .collect();
                    emit(&csv(&["d", "q", "xi", "value", "violated"], &rows), output).map_err(CliError::Io)
                }
                Format::Json => {
                    let cells: Vec<Value> = grid
                        .cells()
                        .map(|(q, xi, v)| json!({ "q": q, "xi": xi, "value": v, "violated": v > LOCAL_BOUND }))
                        .collect();
                    let report = Report {
                        command: "region".into(),
                        params: merge(
                            scenario_params(state, &s),
                            json!({ "q_values": grid.q_values, "xi_values": grid.xi_values }),
                        ),
                        results: json!({ "cells": cells }),
                        checks: vec![],
                    };
                    emit_report(&report, output)
                }
            }
        }
        Command::Tables { which } => tables(*which, format.unwrap_or(Format::Csv), output),
        Command::Verify => {
            json_only("verify", format)?;
            let (results, checks) = verify()?;
            let report = Report { command: "verify".into(), params: json!({}), results, checks };
            emit_report(&report, output)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(report.checks.iter().filter(|c| !c.pass).count()))
            }
        }
    }
}

/// Resolves `--filtered`/`--xi`. `xi_required` demands an explicit
/// strength whenever filtering is requested.
fn filter_strength(filtered: bool, xi: Option<f64>, xi_required: bool) -> CliResult<Option<f64>> {
    match (filtered, xi) {
        (false, Some(_)) => Err(CliError::Usage("--xi requires --filtered".into())),
        (true, None) if xi_required => Err(CliError::Usage("--filtered requires --xi".into())),
        (true, xi) => Ok(xi),
        (false, None) => Ok(None),
    }
}

struct TableRow {
    d: usize,
    q_unfiltered: f64,
    q_filtered: f64,
    xi: f64,
    boundary: Boundary,
}

fn tables(which: u8, format: Format, output: Option<&Path>) -> CliResult<()> {
    let (kind, refs) = match which {
        1 => (StateKind::MaxEntangled, &MAX_ENTANGLED_ROWS[..]),
        _ => (StateKind::MaxViolating, &MAX_VIOLATING_ROWS[..]),
    };
    let mut rows = Vec::new();
    for r in refs {
        let s = Scenario::new(r.d, kind)?;
        let unfiltered = q_threshold(&s, None, 1e-9)?;
        let xi = r.xi.unwrap_or(VANISHING_XI);
        let filtered = q_threshold(&s, Some(xi), 1e-9)?;
        rows.push(TableRow {
            d: r.d,
            q_unfiltered: unfiltered.q_star.unwrap_or(f64::NAN),
            q_filtered: filtered.q_star.unwrap_or(f64::NAN),
            xi,
            boundary: filtered.boundary,
        });
    }
    match format {
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.d.to_string(), sig10(r.q_unfiltered), sig10(r.q_filtered), sig10(r.xi)])
                .collect();
            emit(&csv(&["d", "q_unfiltered", "q_filtered", "xi"], &body), output).map_err(CliError::Io)
        }
        Format::Json => {
            let results: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "d": r.d, "q_unfiltered": r.q_unfiltered, "q_filtered": r.q_filtered,
                        "xi": r.xi, "boundary": r.boundary,
                    })
                })
                .collect();
            let report = Report {
                command: "tables".into(),
                params: json!({ "which": which, "state": kind }),
                results: Value::Array(results),
                checks: vec![],
            };
            emit_report(&report, output)
        }
    }
}

fn verify() -> CliResult<(Value, Vec<Check>)> {
    let mut checks = Vec::new();
    let offsets = PhaseOffsets::default();

    // closed form against density matrices on a fixed lattice of coupled points
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        let oracle = Scenario::new(d, StateKind::MaxEntangled)?.forcing_oracle();
        for q in [0.3, 0.55, 0.8, 1.0] {
            for frac in [0.0, 0.35, 0.7, 1.0] {
                let xi = frac * f64::sqrt(q);
                let table = joint_probability_table(&oracle.density_matrix(q, Some(xi))?, &offsets)?;
                worst = worst.max(table.max_abs_diff(&filtered_table_closed_form(d, q, xi, &offsets)?));
                worst = worst.max((cglmp_value(&table).value - filtered_cglmp_closed_form(d, q, xi)?).abs());
            }
        }
    }
    checks.push(Check::new("closed form vs oracle", worst <= 1e-10, format!("max deviation {worst:.2e}")));

    let mut success: f64 = 0.0;
    for d in 2..=10 {
        let (q, xi) = (0.7, 0.5);
        let rho = mixed_state(&MixedStateParams::new(d, q, max_entangled(d)?)?);
        let f = apply_filters(&rho, &FilterPair::coupled(d, q, xi)?)?;
        success = success.max((f.success_prob - normalization(d, q, xi)).abs());
        let id = apply_filters(&rho, &FilterPair::identity(d)?)?;
        success = success.max(id.rho_f.matrix().max_abs_diff(rho.matrix()));
    }
    checks.push(Check::new("filter normalization", success <= 1e-12, format!("max deviation {success:.2e}")));

    let mut linear: f64 = 0.0;
    for d in 2..=8 {
        let s = Scenario::new(d, StateKind::MaxEntangled)?.forcing_oracle();
        let top = s.bell_value(1.0, None)?;
        linear = linear.max((top - cglmp_closed_form_optimal(d)?).abs());
        for q in [0.2, 0.6] {
            linear = linear.max((s.bell_value(q, None)? - q * top).abs());
        }
    }
    checks.push(Check::new("unfiltered linearity", linear <= 1e-10, format!("max deviation {linear:.2e}")));

    // locate the disagreement of the reciprocal-sine cross term
    let probes = [(3usize, 0.9, 0.85), (4, 0.7, 0.6), (5, 0.8, 0.71), (6, 0.7, 0.6)];
    let mut cross = Vec::new();
    let mut exact_ok = true;
    for (d, q, xi) in probes {
        let oracle = Scenario::new(d, StateKind::MaxEntangled)?.forcing_oracle().bell_value(q, Some(xi))?;
        let exact = filtered_cglmp_unrestricted(d, q, xi, CrossTerm::Exact)?;
        let printed = filtered_cglmp_unrestricted(d, q, xi, CrossTerm::ReciprocalSine)?;
        exact_ok &= (exact - oracle).abs() <= 1e-10;
        cross.push(json!({
            "d": d, "q": q, "xi": xi, "oracle": oracle, "exact": exact, "reciprocal_sine": printed,
            "reciprocal_sine_error": printed - oracle,
        }));
    }
    checks.push(Check::new(
        "cross term localization",
        exact_ok,
        "Σ_j cos(2πjx/d) cross term is (1 − cos 2πx + sin 2πx·cot(πx/d))/2; the 1/sin(πx/d) form deviates",
    ));

    let mut rational = Vec::new();
    for row in MAX_VIOLATING_ROWS {
        let s = Scenario::new(row.d, StateKind::MaxViolating)?;
        let (mut dev, mut cells): (f64, usize) = (0.0, 0);
        for q in linspace(row.q_filtered + 0.02, 1.0, 10) {
            for xi in linspace(0.1, q.sqrt(), 10) {
                let oracle = s.bell_value(q, Some(xi))?;
                if oracle > LOCAL_BOUND {
                    cells += 1;
                    dev = dev.max((filtered_rational(row.d, q, xi)? - oracle).abs());
                }
            }
        }
        checks.push(Check::new(
            &format!("rational fit d={}", row.d),
            dev <= 2e-2,
            format!("{cells} violating cells, max deviation {dev:.2e}"),
        ));
        rational.push(json!({ "d": row.d, "cells": cells, "max_deviation": dev }));
    }

    let route_ok = Scenario::new(3, StateKind::MaxViolating)?.route() == Route::Oracle;
    checks.push(Check::new("max-violating routed through oracle", route_ok, ""));

    Ok((json!({ "cross_term": cross, "rational_fits": rational }), checks))
}
