//! Noise-induced escape rates for two coupled Ginzburg-Landau fields on a
//! finite interval with Neumann boundary conditions.
//!
//! The library computes, for the double-well pair potential
//! U(φ₁,φ₂) = −μ₁φ₁²/2 + φ₁⁴/4 − μ₂φ₂²/2 + φ₂⁴/4 + φ₁²φ₂²/2 with
//! μ₁ > μ₂ > 0:
//!
//! - the exact nonuniform saddle (instanton) profiles in terms of Jacobi
//!   elliptic functions, and the activation barrier ΔE ([`model`]);
//! - fluctuation spectra about the uniform states and the closed-form
//!   rate prefactor valid below the critical length ([`spectra`]);
//! - the fluctuation-determinant ratio above the critical length via the
//!   boundary-matrix (Forman) reduction with numerically integrated
//!   fundamental matrices, plus the saddle's negative eigenvalue
//!   ([`forman`]);
//! - an Euler-Maruyama lattice simulator with first-passage
//!   instrumentation that validates the Kramers rate Γ = Γ₀·exp(−ΔE/ε)
//!   by direct Monte Carlo ([`langevin`]).
//!
//! Parameter sweeps and Monte Carlo ensembles run data-parallel on rayon
//! when the default `parallel` feature is enabled; disabling it switches
//! every driver to an equivalent sequential code path.

pub mod elliptic;
pub mod error;
mod exec;
pub mod forman;
pub mod langevin;
pub mod lattice;
pub mod model;
pub mod spectra;
pub mod sweep;

pub use error::{Error, Result};
pub use model::ModelParams;
