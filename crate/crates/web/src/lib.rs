//! wasm-bindgen surface for the static page in `www/`.
//!
//! Errors come back as strings so the same functions run natively in tests.

use npa_core::bell::criterion_report;
use npa_core::experiments::{max_lambda, max_value, qb_functional, quantum_value, Family};
use npa_core::{CorrelationPoint, Level, MomentStructure, Realization};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct CriterionSummary {
    pub s_plus_00: f64,
    pub s_plus_01: f64,
    pub s_plus_10: f64,
    pub s_plus_11: f64,
    pub eq11_residual: f64,
    pub eq8_product: f64,
    pub tlm_b_residual: f64,
    pub tlm_a_residual: f64,
    pub satisfied: bool,
}

/// Criterion report for the realization `(θᴬ₀, θᴬ₁, θᴮ₀, θᴮ₁, χ)`.
#[wasm_bindgen]
pub fn check_realization(
    theta_a0: f64,
    theta_a1: f64,
    theta_b0: f64,
    theta_b1: f64,
    chi: f64,
    tol: f64,
) -> Result<CriterionSummary, String> {
    let r = Realization::new([theta_a0, theta_a1], [theta_b0, theta_b1], chi).map_err(|e| e.to_string())?;
    let rep = criterion_report(&r, tol).map_err(|e| e.to_string())?;
    Ok(CriterionSummary {
        s_plus_00: rep.s_plus[0][0],
        s_plus_01: rep.s_plus[0][1],
        s_plus_10: rep.s_plus[1][0],
        s_plus_11: rep.s_plus[1][1],
        eq11_residual: rep.eq11_residual,
        eq8_product: rep.eq8_product,
        tlm_b_residual: rep.tlm_scaled_residual_b,
        tlm_a_residual: rep.tlm_scaled_residual_a,
        satisfied: rep.satisfied.all(),
    })
}

/// `[quantum value, relaxation value]` for a QB family member; the quantum
/// value is NaN outside `0 ≤ x ≤ 2`.
#[wasm_bindgen]
pub fn qb_values(family: &str, x: f64, level: &str) -> Result<Vec<f64>, String> {
    let family: Family = family.parse()?;
    let level: Level = level.parse().map_err(|e| format!("{e}"))?;
    if !x.is_finite() {
        return Err("x must be finite".into());
    }
    let relaxation =
        max_value(&MomentStructure::build(level), &qb_functional(family, x)).map_err(|e| e.to_string())?;
    Ok(vec![quantum_value(family, x).unwrap_or(f64::NAN), relaxation])
}

/// Largest `λ` with `Γ − λI ⪰ 0` for the moments
/// `⟨A₀⟩, ⟨A₁⟩, ⟨B₀⟩, ⟨B₁⟩, ⟨A₀B₀⟩, ⟨A₀B₁⟩, ⟨A₁B₀⟩, ⟨A₁B₁⟩`.
#[wasm_bindgen]
pub fn lambda(point: &[f64], level: &str) -> Result<f64, String> {
    let v: [f64; 8] = point
        .try_into()
        .map_err(|_| format!("expected 8 moments, got {}", point.len()))?;
    let p = CorrelationPoint::from_array(v).map_err(|e| e.to_string())?;
    let level: Level = level.parse().map_err(|e| format!("{e}"))?;
    max_lambda(&MomentStructure::build(level), &p).map_err(|e| e.to_string())
}
