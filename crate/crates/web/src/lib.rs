//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export returns a compact JSON string or throws a string error. The
//! `*_json` functions hold the logic and run natively in tests.

use qchannel::capacity::capacity_sweep;
use qchannel::locc::QuantumState;
use qchannel::protocols::{teleclone, teleport_ghz, UnknownState};
use qchannel::qla::C64;
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

/// Largest channel size the capacity demo accepts.
pub const MAX_CAPACITY_N: usize = 6;

/// Largest grid the capacity demo accepts.
pub const MAX_GRID: usize = 201;

#[derive(Serialize)]
struct Curve {
    n: usize,
    alpha_sq: Vec<f64>,
    c: Vec<f64>,
    c_closed_form: Vec<f64>,
    max_abs_diff: f64,
}

/// Per-bit capacity against `|α|²` for every `N` in `2..=max_n`.
pub fn capacity_curve_json(max_n: usize, points: usize) -> Result<String, String> {
    if !(2..=MAX_CAPACITY_N).contains(&max_n) {
        return Err(format!("N must lie in 2..={MAX_CAPACITY_N}, got {max_n}"));
    }
    if !(2..=MAX_GRID).contains(&points) {
        return Err(format!("grid must have 2..={MAX_GRID} points, got {points}"));
    }
    let ns: Vec<usize> = (2..=max_n).collect();
    let rows = capacity_sweep(&ns, points).map_err(|e| e.to_string())?;
    let curves: Vec<Curve> = rows
        .chunks(points)
        .map(|chunk| Curve {
            n: chunk[0].n,
            alpha_sq: chunk.iter().map(|r| r.alpha_sq).collect(),
            c: chunk.iter().map(|r| r.c).collect(),
            c_closed_form: chunk.iter().map(|r| r.c_closed_form).collect(),
            max_abs_diff: chunk.iter().map(|r| r.abs_diff).fold(0.0, f64::max),
        })
        .collect();
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Branch {
    outcome: String,
    element: String,
    probability: f64,
    corrections: Vec<String>,
    received: String,
    fidelity: f64,
}

fn element_label(x: usize) -> String {
    let sign = |b: usize| if b == 1 { '−' } else { '+' };
    let bell = if x >> 2 == 1 { 'Ψ' } else { 'Φ' };
    format!("π{} {bell}{}", sign((x >> 1) & 1), sign(x & 1))
}

/// Every branch of GHZ-channel teleportation of `α|01⟩ + β|10⟩` with
/// `α = cos θ` and `β = e^{iφ} sin θ`.
pub fn ghz_teleport_table_json(theta: f64, phi: f64) -> Result<String, String> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err("angles must be finite".into());
    }
    let unknown = UnknownState::EprForm {
        alpha: C64::new(theta.cos(), 0.0),
        beta: C64::from_polar(theta.sin(), phi),
    };
    let transcripts = teleport_ghz(&unknown)
        .and_then(|p| p.run_all())
        .map_err(|e| e.to_string())?;
    let branches: Vec<Branch> = transcripts
        .iter()
        .enumerate()
        .map(|(x, t)| Branch {
            outcome: t.outcome.to_string(),
            element: element_label(x),
            probability: t.outcome_probability,
            corrections: t.corrections.iter().map(|c| format!("{}: {}", c.party, c.operator)).collect(),
            received: match &t.final_state {
                Some(QuantumState::Pure(psi)) => psi.to_string(),
                Some(QuantumState::Mixed(_)) => "mixed".into(),
                None => "none".into(),
            },
            fidelity: t.fidelity.unwrap_or(0.0),
        })
        .collect();
    serde_json::to_string(&branches).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Clones {
    lambda0: f64,
    rho_bc_diagonal: Vec<f64>,
    rho_b_diagonal: Vec<f64>,
    rho_c_diagonal: Vec<f64>,
    max_off_diagonal: f64,
}

/// Output diagonals when `λ0|0⟩⟨0| + λ1|1⟩⟨1|` is sent to two receivers.
pub fn teleclone_state_json(lambda0: f64) -> Result<String, String> {
    let report = teleclone(&UnknownState::mixed_diagonal(lambda0)).map_err(|e| e.to_string())?;
    serde_json::to_string(&Clones {
        lambda0: report.lambda0,
        rho_bc_diagonal: report.rho_bc.diagonal(),
        rho_b_diagonal: report.rho_b.diagonal(),
        rho_c_diagonal: report.rho_c.diagonal(),
        max_off_diagonal: report.max_off_diagonal,
    })
    .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn capacity_curve(max_n: usize, points: usize) -> Result<String, String> {
    capacity_curve_json(max_n, points)
}

#[wasm_bindgen]
pub fn ghz_teleport_table(theta: f64, phi: f64) -> Result<String, String> {
    ghz_teleport_table_json(theta, phi)
}

#[wasm_bindgen]
pub fn teleclone_state(lambda0: f64) -> Result<String, String> {
    teleclone_state_json(lambda0)
}
