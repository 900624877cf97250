//! The physical model: pair potential, energy functional, uniform
//! stationary states, the exact nonuniform saddle (instanton) family,
//! the length ↔ elliptic-parameter relation and activation barriers.

use crate::elliptic::{complete_k, jacobi, EllipticParameter};
use crate::error::{Error, Result};
use serde::Serialize;

/// Default number of quadrature samples for energy integrals.
pub const DEFAULT_ENERGY_POINTS: usize = 1024;

/// Curvature parameters (μ₁, μ₂) of the pair potential, with the
/// convention μ₁ > μ₂ > 0. Bending coefficients are fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    mu1: f64,
    mu2: f64,
}

impl ModelParams {
    pub fn new(mu1: f64, mu2: f64) -> Result<Self> {
        if !(mu1 > mu2 && mu2 > 0.0) {
            return Err(Error::Domain(format!(
                "model parameters require mu1 > mu2 > 0, got mu1 = {mu1}, mu2 = {mu2}"
            )));
        }
        Ok(Self { mu1, mu2 })
    }

    #[inline]
    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    #[inline]
    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    /// μ₁ − μ₂, the curvature split that sets the critical length.
    #[inline]
    pub fn delta(&self) -> f64 {
        self.mu1 - self.mu2
    }
}

/// U(φ₁,φ₂) = −μ₁φ₁²/2 + φ₁⁴/4 − μ₂φ₂²/2 + φ₂⁴/4 + φ₁²φ₂²/2.
#[inline]
pub fn potential(phi1: f64, phi2: f64, p: &ModelParams) -> f64 {
    let (s1, s2) = (phi1 * phi1, phi2 * phi2);
    -0.5 * p.mu1 * s1 + 0.25 * s1 * s1 - 0.5 * p.mu2 * s2 + 0.25 * s2 * s2 + 0.5 * s1 * s2
}

/// ∇U, used by the relaxational dynamics and stationarity checks.
#[inline]
pub fn grad_potential(phi1: f64, phi2: f64, p: &ModelParams) -> (f64, f64) {
    let (s1, s2) = (phi1 * phi1, phi2 * phi2);
    (
        phi1 * (-p.mu1 + s1 + s2),
        phi2 * (-p.mu2 + s2 + s1),
    )
}

/// Classification of a uniform stationary state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Metastable,
    Saddle,
}

/// A spatially uniform stationary state of the zero-noise dynamics.
#[derive(Debug, Clone, Copy)]
pub struct UniformState {
    pub phi1: f64,
    pub phi2: f64,
    pub kind: StateKind,
}

impl UniformState {
    /// (±√μ₁, 0), the locally stable wells.
    pub fn metastable(p: &ModelParams, sign: f64) -> Self {
        Self {
            phi1: sign.signum() * p.mu1.sqrt(),
            phi2: 0.0,
            kind: StateKind::Metastable,
        }
    }

    /// (0, ±√μ₂), the uniform transition states.
    pub fn saddle(p: &ModelParams, sign: f64) -> Self {
        Self {
            phi1: 0.0,
            phi2: sign.signum() * p.mu2.sqrt(),
            kind: StateKind::Saddle,
        }
    }
}

/// L_c = π/√(μ₁−μ₂): below it the uniform transition states are the true
/// saddles, above it the instantons take over.
pub fn critical_length(p: &ModelParams) -> f64 {
    std::f64::consts::PI / p.delta().sqrt()
}

/// L(m) = 2K(m)/√(μ₁−μ₂), the interval length hosting the instanton with
/// elliptic parameter m. Strictly increasing; L(0) = L_c.
pub fn length_from_m(m: EllipticParameter, p: &ModelParams) -> Result<f64> {
    Ok(2.0 * complete_k(m)? / p.delta().sqrt())
}

/// Inverse of [`length_from_m`] by bisection on the monotone map.
///
/// The bisection runs to the last representable f64, so the round-trip
/// error is set by the floating-point grid near m = 1; for lengths beyond
/// the largest representable L(m) the result saturates at that m (the
/// profile is then within machine precision of the m→1 domain walls).
pub fn m_from_length(l: f64, p: &ModelParams) -> Result<EllipticParameter> {
    let lc = critical_length(p);
    if !(l > lc) {
        return Err(Error::Domain(format!(
            "no nonuniform saddle: L = {l} does not exceed the critical length {lc}"
        )));
    }
    let m_hi = 1.0 - 0.5 * f64::EPSILON;
    let len = |m: f64| length_from_m(EllipticParameter::new(m).unwrap(), p).unwrap();

    let m_star = if len(m_hi) <= l {
        m_hi
    } else {
        let (mut lo, mut hi) = (0.0_f64, m_hi);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if len(mid) < l {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (len(lo) - l).abs() <= (len(hi) - l).abs() {
            lo
        } else {
            hi
        }
    };

    // Amplitude bound: for mu1 > 2*mu2 the phi2 radicand goes negative at
    // m = mu2/(mu1-mu2) and no instanton exists beyond that length.
    let m_cap = p.mu2 / p.delta();
    if m_star > m_cap {
        return Err(Error::Validity(format!(
            "instanton amplitude imaginary: m = {m_star:.6} exceeds mu2/(mu1-mu2) = {m_cap:.6}"
        )));
    }
    EllipticParameter::new(m_star)
}

/// Anything that can report the two fields and their z-derivatives at a
/// point; the energy quadrature and lattice samplers consume this.
pub trait FieldProfile {
    fn fields_at(&self, z: f64) -> (f64, f64);
    fn derivatives_at(&self, z: f64) -> (f64, f64);
}

impl FieldProfile for UniformState {
    fn fields_at(&self, _z: f64) -> (f64, f64) {
        (self.phi1, self.phi2)
    }

    fn derivatives_at(&self, _z: f64) -> (f64, f64) {
        (0.0, 0.0)
    }
}

/// The exact nonuniform saddle profile on [−L/2, L/2]:
///
/// φ₁(z) = s₁·√m·√((2μ₁−μ₂) − m(μ₁−μ₂))·sn(√(μ₁−μ₂)·z | m)
/// φ₂(z) = s₂·√(μ₂ − m(μ₁−μ₂))·dn(√(μ₁−μ₂)·z | m)
///
/// with L = 2K(m)/√(μ₁−μ₂) so that both derivatives vanish at ±L/2.
#[derive(Debug, Clone, Copy)]
pub struct Instanton {
    m: EllipticParameter,
    l: f64,
    sign1: f64,
    sign2: f64,
    params: ModelParams,
    amp1: f64,
    amp2: f64,
}

impl Instanton {
    /// Build from the elliptic parameter; the length follows from m.
    pub fn from_parameter(
        m: EllipticParameter,
        p: &ModelParams,
        sign1: f64,
        sign2: f64,
    ) -> Result<Self> {
        let l = length_from_m(m, p)?;
        Self::build(m, l, p, sign1, sign2)
    }

    /// Build from the interval length with default branch signs (+, +).
    pub fn from_length(l: f64, p: &ModelParams) -> Result<Self> {
        let m = m_from_length(l, p)?;
        Self::build(m, l, p, 1.0, 1.0)
    }

    pub fn from_length_with_signs(l: f64, p: &ModelParams, s1: f64, s2: f64) -> Result<Self> {
        let m = m_from_length(l, p)?;
        Self::build(m, l, p, s1, s2)
    }

    fn build(m: EllipticParameter, l: f64, p: &ModelParams, s1: f64, s2: f64) -> Result<Self> {
        let mv = m.get();
        let r1 = (2.0 * p.mu1 - p.mu2) - mv * p.delta();
        let r2 = p.mu2 - mv * p.delta();
        if r1 < 0.0 || r2 < 0.0 {
            return Err(Error::Validity(format!(
                "instanton amplitude radicand negative at m = {mv}: ({r1}, {r2})"
            )));
        }
        Ok(Self {
            m,
            l,
            sign1: s1.signum(),
            sign2: s2.signum(),
            params: *p,
            amp1: mv.sqrt() * r1.sqrt(),
            amp2: r2.sqrt(),
        })
    }

    pub fn m(&self) -> EllipticParameter {
        self.m
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

impl FieldProfile for Instanton {
    fn fields_at(&self, z: f64) -> (f64, f64) {
        let t = jacobi(self.params.delta().sqrt() * z, self.m);
        (self.sign1 * self.amp1 * t.sn, self.sign2 * self.amp2 * t.dn)
    }

    fn derivatives_at(&self, z: f64) -> (f64, f64) {
        let w = self.params.delta().sqrt();
        let t = jacobi(w * z, self.m);
        (
            self.sign1 * self.amp1 * w * t.cn * t.dn,
            -self.sign2 * self.amp2 * w * self.m.get() * t.sn * t.cn,
        )
    }
}

/// Both fields sampled on one uniform grid whose endpoints are exactly
/// ±L/2; the representation used by finite-difference residuals and by
/// profile export.
#[derive(Debug, Clone)]
pub struct FieldPair {
    z: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

impl FieldPair {
    /// Sample a profile at `n` equispaced points over [−L/2, L/2].
    pub fn sample<P: FieldProfile>(profile: &P, l: f64, n: usize) -> Self {
        assert!(n >= 2, "need at least two grid points");
        let dz = l / (n - 1) as f64;
        let mut z = Vec::with_capacity(n);
        let mut phi1 = Vec::with_capacity(n);
        let mut phi2 = Vec::with_capacity(n);
        for i in 0..n {
            let zi = if i == n - 1 { 0.5 * l } else { -0.5 * l + i as f64 * dz };
            let (a, b) = profile.fields_at(zi);
            z.push(zi);
            phi1.push(a);
            phi2.push(b);
        }
        Self { z, phi1, phi2 }
    }

    /// Wrap existing samples; the grid must be uniform and shared.
    pub fn from_samples(z: Vec<f64>, phi1: Vec<f64>, phi2: Vec<f64>) -> Result<Self> {
        if z.len() < 2 || z.len() != phi1.len() || z.len() != phi2.len() {
            return Err(Error::Domain(
                "field samples must share one grid with at least two points".into(),
            ));
        }
        let dz = z[1] - z[0];
        for w in z.windows(2) {
            if ((w[1] - w[0]) - dz).abs() > 1e-9 * dz.abs().max(1.0) {
                return Err(Error::Domain("field sample grid must be uniform".into()));
            }
        }
        Ok(Self { z, phi1, phi2 })
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn phi1(&self) -> &[f64] {
        &self.phi1
    }

    pub fn phi2(&self) -> &[f64] {
        &self.phi2
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.z[1] - self.z[0]
    }
}

/// Max-norm residual of the stationarity equations
/// φ₁'' + μ₁φ₁ − φ₁³ − φ₁φ₂² and φ₂'' + μ₂φ₂ − φ₂³ − φ₁²φ₂ over interior
/// grid points, second derivatives by central differences. O(dz²) for an
/// exact solution.
pub fn euler_lagrange_residual(fields: &FieldPair, p: &ModelParams) -> f64 {
    let n = fields.len();
    assert!(n >= 64, "residual needs at least 64 grid points");
    let inv_dz2 = 1.0 / (fields.spacing() * fields.spacing());
    let (f1, f2) = (fields.phi1(), fields.phi2());
    let mut worst = 0.0_f64;
    for i in 1..n - 1 {
        let lap1 = (f1[i + 1] - 2.0 * f1[i] + f1[i - 1]) * inv_dz2;
        let lap2 = (f2[i + 1] - 2.0 * f2[i] + f2[i - 1]) * inv_dz2;
        let (g1, g2) = grad_potential(f1[i], f2[i], p);
        worst = worst.max((lap1 - g1).abs()).max((lap2 - g2).abs());
    }
    worst
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL8_X: [f64; 4] = [
    0.18343464249564980494,
    0.52553240991632898582,
    0.79666647741362673959,
    0.96028985649753623168,
];
const GL8_W: [f64; 4] = [
    0.36268378337836198297,
    0.31370664587788728734,
    0.22238103445337447054,
    0.10122853629037625915,
];

/// Energy functional H[φ₁,φ₂] = ∫ ½(φ₁')² + ½(φ₂')² + U dz over
/// [−L/2, L/2], by composite Gauss-Legendre with order-8 panels
/// (`n_points`/8 panels).
pub fn energy<P: FieldProfile>(profile: &P, l: f64, p: &ModelParams, n_points: usize) -> f64 {
    let n_panels = (n_points / 8).max(1);
    let width = l / n_panels as f64;
    let integrand = |z: f64| {
        let (a, b) = profile.fields_at(z);
        let (da, db) = profile.derivatives_at(z);
        0.5 * (da * da + db * db) + potential(a, b, p)
    };
    let mut total = 0.0;
    for k in 0..n_panels {
        let mid = -0.5 * l + (k as f64 + 0.5) * width;
        let half = 0.5 * width;
        let mut panel = 0.0;
        for j in 0..4 {
            panel += GL8_W[j] * (integrand(mid - half * GL8_X[j]) + integrand(mid + half * GL8_X[j]));
        }
        total += panel * half;
    }
    total
}

/// Activation barrier ΔE(L): energy of the relevant transition state
/// minus the metastable energy −L·μ₁²/4. Uniform saddle below L_c gives
/// the linear branch L(μ₁²−μ₂²)/4; the instanton takes over above.
pub fn barrier(l: f64, p: &ModelParams) -> Result<f64> {
    barrier_with_points(l, p, DEFAULT_ENERGY_POINTS)
}

pub fn barrier_with_points(l: f64, p: &ModelParams, n_points: usize) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("barrier needs L > 0, got {l}")));
    }
    if l <= critical_length(p) {
        Ok(0.25 * l * (p.mu1 * p.mu1 - p.mu2 * p.mu2))
    } else {
        let inst = Instanton::from_length(l, p)?;
        let e_meta = -0.25 * l * p.mu1 * p.mu1;
        Ok(energy(&inst, l, p, n_points) - e_meta)
    }
}
