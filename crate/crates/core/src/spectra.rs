//! Fluctuation spectra about the uniform states and the closed-form rate
//! prefactor valid below the critical length.

use crate::error::{Error, Result};
use crate::model::{critical_length, ModelParams, StateKind};
use serde::Serialize;

/// Which field a Neumann cosine mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Field1,
    Field2,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumEntry {
    pub value: f64,
    pub branch: Branch,
    pub index: usize,
}

/// Eigenvalues of the linearization about a uniform state, sorted
/// ascending; each entry remembers its branch and mode index.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<SpectrumEntry>,
    pub operator_kind: StateKind,
}

impl SpectrumReport {
    pub fn count_negative(&self) -> usize {
        self.eigenvalues.iter().filter(|e| e.value < 0.0).count()
    }
}

/// Neumann spectrum of the linearized operator about a uniform state.
///
/// Metastable: π²n²/L² + 2μ₁ (field 1) and π²n²/L² + (μ₁−μ₂) (field 2).
/// Saddle:     π²n²/L² − (μ₁−μ₂) (field 1) and π²n²/L² + 2μ₂ (field 2).
pub fn spectrum_uniform(
    l: f64,
    p: &ModelParams,
    kind: StateKind,
    n_max: usize,
) -> Result<SpectrumReport> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("spectrum needs L > 0, got {l}")));
    }
    if n_max < 1 {
        return Err(Error::Domain("spectrum needs n_max >= 1".into()));
    }
    let (off1, off2) = match kind {
        StateKind::Metastable => (2.0 * p.mu1(), p.delta()),
        StateKind::Saddle => (-p.delta(), 2.0 * p.mu2()),
    };
    let mut eigenvalues = Vec::with_capacity(2 * (n_max + 1));
    for n in 0..=n_max {
        let kin = (std::f64::consts::PI * n as f64 / l).powi(2);
        eigenvalues.push(SpectrumEntry {
            value: kin + off1,
            branch: Branch::Field1,
            index: n,
        });
        eigenvalues.push(SpectrumEntry {
            value: kin + off2,
            branch: Branch::Field2,
            index: n,
        });
    }
    eigenvalues.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(SpectrumReport {
        eigenvalues,
        operator_kind: kind,
    })
}

/// Closed-form rate prefactor for L < L_c, where both the metastable and
/// transition states are uniform:
///
/// Γ₀ = (1/π)·(μ₁/μ₂)^{1/4}
///      ·√(sinh(√(μ₁−μ₂)L)/sinh(√(2μ₂)L))
///      ·√(sinh(√(2μ₁)L)/|sin(√(μ₁−μ₂)L)|)·(μ₁−μ₂).
///
/// The two-saddle symmetry factor is already included; callers must not
/// apply any further multiplicity factor. Diverges as (L_c−L)^{−1/2}.
pub fn prefactor_below(l: f64, p: &ModelParams) -> Result<f64> {
    let lc = critical_length(p);
    if !(l > 0.0 && l < lc) {
        return Err(Error::Domain(format!(
            "closed-form prefactor requires 0 < L < L_c = {lc}, got {l}"
        )));
    }
    let d = p.delta();
    let sd = d.sqrt();
    Ok((1.0 / std::f64::consts::PI)
        * (p.mu1() / p.mu2()).powf(0.25)
        * ((sd * l).sinh() / ((2.0 * p.mu2()).sqrt() * l).sinh()).sqrt()
        * (((2.0 * p.mu1()).sqrt() * l).sinh() / (sd * l).sin().abs()).sqrt()
        * d)
}

/// Assembled Kramers rate Γ = Γ₀·exp(−ΔE/ε).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateResult {
    pub delta_e: f64,
    pub gamma0: f64,
    pub lambda_neg: f64,
    pub epsilon: f64,
    pub gamma: f64,
}

pub fn kramers_rate(delta_e: f64, gamma0: f64, lambda_neg: f64, epsilon: f64) -> Result<RateResult> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "Kramers rate needs noise strength epsilon > 0, got {epsilon}"
        )));
    }
    Ok(RateResult {
        delta_e,
        gamma0,
        lambda_neg,
        epsilon,
        gamma: gamma0 * (-delta_e / epsilon).exp(),
    })
}
