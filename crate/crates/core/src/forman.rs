//! Fluctuation-determinant ratio via the boundary-matrix reduction
//! det Λ_s / det Λ_u = det[M + N·Y_s(L/2)] / det[M + N·Y_u(L/2)], with
//! the 4×4 fundamental matrices Y obtained by integrating the linearized
//! first-order systems across the interval; plus the saddle's negative
//! eigenvalue and the rate prefactor Γ₀ = (1/π)·√|det ratio|·|λ_{u,1}|.

use crate::error::{Error, Result};
use crate::lattice::LatticeOperator;
use crate::model::{critical_length, FieldProfile, Instanton, ModelParams};
use crate::spectra::prefactor_below;
use crate::{exec, model};
use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

/// Default number of fixed RK4 steps across the interval.
pub const DEFAULT_RK4_STEPS: usize = 4096;
/// Half-width of the excluded neighborhood of L_c for prefactor queries;
/// the soft mode makes the determinant ratio meaningless closer in.
pub const CRITICAL_EXCLUSION: f64 = 1e-6;
/// Lattice resolution used for the negative-eigenvalue extraction.
const EIGEN_BASE_SITES: usize = 1024;

/// Which linearized operator a fundamental matrix belongs to.
#[derive(Debug, Clone)]
pub enum OperatorSpec {
    /// About the uniform metastable state (±√μ₁, 0).
    UniformStable(ModelParams),
    /// About the uniform transition state (0, ±√μ₂).
    UniformSaddle(ModelParams),
    /// About the instanton; carries the profile it linearizes around.
    NonuniformSaddle(Instanton),
}

impl OperatorSpec {
    /// Potential block V(z) of the operator −∂² + V(z), which is also the
    /// lower-left block of the first-order system η'' = V(z)·η.
    pub(crate) fn potential_block(&self, z: f64) -> Matrix2<f64> {
        match self {
            OperatorSpec::UniformStable(p) => Matrix2::new(2.0 * p.mu1(), 0.0, 0.0, p.delta()),
            OperatorSpec::UniformSaddle(p) => Matrix2::new(-p.delta(), 0.0, 0.0, 2.0 * p.mu2()),
            OperatorSpec::NonuniformSaddle(inst) => {
                let p = inst.params();
                let (f1, f2) = inst.fields_at(z);
                let (s1, s2) = (f1 * f1, f2 * f2);
                let off = 2.0 * f1 * f2;
                Matrix2::new(
                    -(p.mu1() - 3.0 * s1 - s2),
                    off,
                    off,
                    -(p.mu2() - 3.0 * s2 - s1),
                )
            }
        }
    }
}

/// Boundary-condition matrices M, N in
/// M·(η(−L/2), η'(−L/2)) + N·(η(L/2), η'(L/2)) = 0.
#[derive(Debug, Clone)]
pub struct BoundaryMatrices {
    pub m: Matrix4<f64>,
    pub n: Matrix4<f64>,
}

/// Neumann boundary matrices: M picks η'(−L/2), N picks η'(L/2).
pub fn neumann_boundary_matrices() -> BoundaryMatrices {
    let mut m = Matrix4::zeros();
    m[(0, 2)] = 1.0;
    m[(1, 3)] = 1.0;
    let mut n = Matrix4::zeros();
    n[(2, 2)] = 1.0;
    n[(3, 3)] = 1.0;
    BoundaryMatrices { m, n }
}

/// Fundamental matrix Y(L/2) with Y(−L/2) = I, stored as e^{log_scale}·y
/// so hyperbolically growing solutions never overflow; the scale factor
/// is applied once when determinants are taken.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix {
    pub y: Matrix4<f64>,
    pub log_scale: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    pub steps: usize,
    /// Rescale the whole matrix whenever its largest column norm exceeds
    /// this; the log of the factor accumulates in `log_scale`.
    pub rescale_threshold: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_RK4_STEPS,
            rescale_threshold: 1e100,
        }
    }
}

/// Integrate the first-order 4×4 system Y' = A(z)·Y from −L/2 to L/2 with
/// Y(−L/2) = I, by classical fixed-step RK4 (global error O(h⁴)).
pub fn integrate_fundamental(spec: &OperatorSpec, l: f64, steps: usize) -> Result<FundamentalMatrix> {
    integrate_fundamental_with(spec, l, IntegrationOptions {
        steps,
        ..Default::default()
    })
}

pub fn integrate_fundamental_with(
    spec: &OperatorSpec,
    l: f64,
    opts: IntegrationOptions,
) -> Result<FundamentalMatrix> {
    if opts.steps < 256 {
        return Err(Error::Domain(format!(
            "fundamental-matrix integration needs at least 256 steps, got {}",
            opts.steps
        )));
    }
    if !(l >= 0.0) {
        return Err(Error::Domain(format!("interval length must be >= 0, got {l}")));
    }
    if let OperatorSpec::NonuniformSaddle(inst) = spec {
        if (inst.length() - l).abs() > 1e-9 * l.max(1.0) {
            return Err(Error::Domain(format!(
                "instanton length {} inconsistent with integration interval {l}",
                inst.length()
            )));
        }
    }

    let h = l / opts.steps as f64;
    // System matrices at the step and half-step grid, shared by the k2/k3
    // stages of each step.
    let coeff: Vec<Matrix4<f64>> = (0..=2 * opts.steps)
        .map(|j| {
            let z = -0.5 * l + 0.5 * h * j as f64;
            let v = spec.potential_block(z);
            let mut a = Matrix4::zeros();
            a[(0, 2)] = 1.0;
            a[(1, 3)] = 1.0;
            a[(2, 0)] = v[(0, 0)];
            a[(2, 1)] = v[(0, 1)];
            a[(3, 0)] = v[(1, 0)];
            a[(3, 1)] = v[(1, 1)];
            a
        })
        .collect();

    let mut y = Matrix4::identity();
    let mut log_scale = 0.0f64;
    for i in 0..opts.steps {
        let a0 = &coeff[2 * i];
        let a1 = &coeff[2 * i + 1];
        let a2 = &coeff[2 * i + 2];
        let k1 = a0 * y;
        let k2 = a1 * (y + k1 * (0.5 * h));
        let k3 = a1 * (y + k2 * (0.5 * h));
        let k4 = a2 * (y + k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);

        let max_col = (0..4)
            .map(|c| y.column(c).norm())
            .fold(0.0f64, f64::max);
        if !max_col.is_finite() {
            return Err(Error::Overflow(format!(
                "non-finite fundamental matrix at step {i} of {}",
                opts.steps
            )));
        }
        if max_col > opts.rescale_threshold {
            y /= max_col;
            log_scale += max_col.ln();
        }
    }
    Ok(FundamentalMatrix { y, log_scale })
}

/// Scaled determinant; the represented value is mantissa·e^{log_scale}.
#[derive(Debug, Clone, Copy)]
pub struct ScaledDet {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ScaledDet {
    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }
}

/// det[M + N·Y(L/2)] with the stored matrix scale reapplied.
///
/// Valid for boundary pairs whose M rows are confined to the first two
/// rows and N rows to the last two (Neumann, Dirichlet): the two Y-linear
/// rows then carry e^{2·log_scale} into the determinant.
pub fn boundary_determinant(bm: &BoundaryMatrices, fm: &FundamentalMatrix) -> ScaledDet {
    ScaledDet {
        mantissa: (bm.m + bm.n * fm.y).determinant(),
        log_scale: 2.0 * fm.log_scale,
    }
}

/// Closed-form fundamental matrix for the uniform metastable operator:
/// decoupled cosh/sinh blocks with rates √(2μ₁) and √(μ₁−μ₂).
pub fn stable_fundamental_closed(p: &ModelParams, l: f64) -> FundamentalMatrix {
    two_block_closed(GrowthBlock::Cosh((2.0 * p.mu1()).sqrt()), GrowthBlock::Cosh(p.delta().sqrt()), l)
}

/// Closed-form fundamental matrix for the uniform transition-state
/// operator: an oscillatory √(μ₁−μ₂) block and a cosh √(2μ₂) block.
pub fn uniform_saddle_fundamental_closed(p: &ModelParams, l: f64) -> FundamentalMatrix {
    two_block_closed(GrowthBlock::Cos(p.delta().sqrt()), GrowthBlock::Cosh((2.0 * p.mu2()).sqrt()), l)
}

enum GrowthBlock {
    /// η'' = κ²η: propagator [[cosh κL, sinh κL/κ], [κ sinh κL, cosh κL]].
    Cosh(f64),
    /// η'' = −ω²η: propagator [[cos ωL, sin ωL/ω], [−ω sin ωL, cos ωL]].
    Cos(f64),
}

fn two_block_closed(b1: GrowthBlock, b2: GrowthBlock, l: f64) -> FundamentalMatrix {
    let max_arg = [&b1, &b2]
        .iter()
        .map(|b| match b {
            GrowthBlock::Cosh(k) => k * l,
            GrowthBlock::Cos(_) => 0.0,
        })
        .fold(0.0f64, f64::max);
    let c = if max_arg > 300.0 { max_arg - 1.0 } else { 0.0 };
    let scaled_cosh = |x: f64| 0.5 * ((x - c).exp() + (-x - c).exp());
    let scaled_sinh = |x: f64| 0.5 * ((x - c).exp() - (-x - c).exp());
    let scale = (-c).exp();

    let mut y = Matrix4::zeros();
    for (slot, b) in [(0usize, b1), (1usize, b2)] {
        let (pos, deriv) = (slot, slot + 2);
        match b {
            GrowthBlock::Cosh(k) => {
                y[(pos, pos)] = scaled_cosh(k * l);
                y[(pos, deriv)] = scaled_sinh(k * l) / k;
                y[(deriv, pos)] = k * scaled_sinh(k * l);
                y[(deriv, deriv)] = scaled_cosh(k * l);
            }
            GrowthBlock::Cos(w) => {
                y[(pos, pos)] = (w * l).cos() * scale;
                y[(pos, deriv)] = (w * l).sin() / w * scale;
                y[(deriv, pos)] = -w * (w * l).sin() * scale;
                y[(deriv, deriv)] = (w * l).cos() * scale;
            }
        }
    }
    FundamentalMatrix { y, log_scale: c }
}

/// Determinant ratio det Λ_s / det Λ_u via the boundary-matrix formula.
///
/// The metastable fundamental matrix is the constant-coefficient closed
/// form; the transition-state one is integrated numerically (uniform
/// saddle below L_c, instanton above). Negative below L_c, where Λ_u has
/// exactly one negative eigenvalue.
pub fn det_ratio(l: f64, p: &ModelParams) -> Result<f64> {
    det_ratio_with(l, p, IntegrationOptions::default())
}

pub fn det_ratio_with(l: f64, p: &ModelParams, opts: IntegrationOptions) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("determinant ratio needs L > 0, got {l}")));
    }
    let lc = critical_length(p);
    if (l - lc).abs() <= 1e-9 {
        return Err(Error::Singularity(format!(
            "zero mode at the critical length: |L - L_c| = {:.2e}",
            (l - lc).abs()
        )));
    }
    let bm = neumann_boundary_matrices();
    let y_s = stable_fundamental_closed(p, l);
    let y_u = if l < lc {
        integrate_fundamental_with(&OperatorSpec::UniformSaddle(*p), l, opts)?
    } else {
        let inst = Instanton::from_length(l, p)?;
        integrate_fundamental_with(&OperatorSpec::NonuniformSaddle(inst), l, opts)?
    };
    let ds = boundary_determinant(&bm, &y_s);
    let du = boundary_determinant(&bm, &y_u);
    if du.mantissa == 0.0 {
        return Err(Error::Singularity(
            "vanishing transition-state boundary determinant".into(),
        ));
    }
    Ok(ds.mantissa / du.mantissa * (ds.log_scale - du.log_scale).exp())
}

/// The single negative eigenvalue λ_{u,1} of the linearization about the
/// relevant transition state.
///
/// Below L_c this is −(μ₁−μ₂) exactly. Above, the instanton operator is
/// discretized on the lattice and the smallest eigenvalue extracted at
/// two resolutions with Richardson extrapolation; the two levels must
/// agree to 1e-4 relative.
pub fn negative_eigenvalue(l: f64, p: &ModelParams) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("negative eigenvalue needs L > 0, got {l}")));
    }
    if l <= critical_length(p) {
        return Ok(-p.delta());
    }
    let inst = Instanton::from_length(l, p)?;
    let spec = OperatorSpec::NonuniformSaddle(inst);
    let lam1 = LatticeOperator::new(&spec, l, EIGEN_BASE_SITES).smallest_eigenvalue();
    let lam2 = LatticeOperator::new(&spec, l, 2 * EIGEN_BASE_SITES).smallest_eigenvalue();
    let extrap = (4.0 * lam2 - lam1) / 3.0;
    if (lam2 - lam1).abs() > 1e-4 * extrap.abs().max(1e-12) {
        return Err(Error::Convergence(format!(
            "lattice eigenvalue levels disagree: {lam1} vs {lam2}"
        )));
    }
    if extrap >= 0.0 {
        return Err(Error::Convergence(format!(
            "expected a negative eigenvalue, found {extrap}"
        )));
    }
    Ok(extrap)
}

/// Rate prefactor Γ₀ = (1/π)·√|det Λ_s/det Λ_u|·|λ_{u,1}| for any L away
/// from the critical exclusion zone. Agrees with the closed form of
/// [`prefactor_below`] for L < L_c.
pub fn prefactor(l: f64, p: &ModelParams) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("prefactor needs L > 0, got {l}")));
    }
    if (l - critical_length(p)).abs() <= CRITICAL_EXCLUSION {
        return Err(Error::Singularity(format!(
            "prefactor diverges at the critical length; L = {l} is inside the exclusion zone"
        )));
    }
    let ratio = det_ratio(l, p)?;
    let lam = negative_eigenvalue(l, p)?;
    Ok(ratio.abs().sqrt() * lam.abs() / std::f64::consts::PI)
}

/// Which side of the critical length a fit window refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through (x, y) samples; returns (slope, intercept).
pub fn fit_log_log(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in samples {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Fit log Γ₀ against log|L − L_c| over a window of distances from L_c,
/// sampled logarithmically. Natural logarithms throughout. The divergence
/// exponent is −1/2 on both sides.
pub fn fit_critical_exponent(
    p: &ModelParams,
    side: Side,
    window: (f64, f64),
    n_points: usize,
) -> Result<ExponentFit> {
    if n_points < 8 {
        return Err(Error::Domain("exponent fit needs at least 8 points".into()));
    }
    let (w0, w1) = window;
    if !(0.0 < w0 && w0 < w1) {
        return Err(Error::Domain(format!(
            "fit window must satisfy 0 < min < max, got ({w0}, {w1})"
        )));
    }
    let lc = critical_length(p);
    match side {
        Side::Below => {
            if w1 >= lc {
                return Err(Error::Domain(format!(
                    "below-side window must stay inside (0, L_c); max offset {w1} >= L_c = {lc}"
                )));
            }
        }
        Side::Above => {
            if w0 <= CRITICAL_EXCLUSION {
                return Err(Error::Domain(format!(
                    "above-side window must start outside the exclusion zone ({CRITICAL_EXCLUSION})"
                )));
            }
        }
    }
    let (ln0, ln1) = (w0.ln(), w1.ln());
    let samples = exec::try_map_indexed(n_points, |i| {
        let delta = (ln0 + (ln1 - ln0) * i as f64 / (n_points - 1) as f64).exp();
        let gamma0 = match side {
            Side::Below => prefactor_below(lc - delta, p)?,
            Side::Above => prefactor(lc + delta, p)?,
        };
        Ok((delta.ln(), gamma0.ln()))
    })?;
    let (slope, intercept) = fit_log_log(&samples);
    Ok(ExponentFit { slope, intercept })
}

/// Convenience bundle: barrier, prefactor and negative eigenvalue at one
/// length, as consumed by rate sweeps and the Kramers assembly.
pub fn rate_ingredients(l: f64, p: &ModelParams) -> Result<(f64, f64, f64)> {
    let delta_e = model::barrier(l, p)?;
    let gamma0 = prefactor(l, p)?;
    let lambda = negative_eigenvalue(l, p)?;
    Ok((delta_e, gamma0, lambda))
}
