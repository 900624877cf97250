//! Complete elliptic integrals K(m), E(m) and the Jacobi elliptic
//! functions sn, cn, dn, computed from scratch via the arithmetic-geometric
//! mean and the descending Landen transformation.
//!
//! Parameter convention: everything here takes the *parameter* m = k²,
//! not the modulus k. This matches sn(u|m), dn(u|m) with periods 4K(m)
//! and 2K(m). Libraries disagree on this point; all call sites in this
//! crate use m.

use crate::error::{Error, Result};

/// Relative accuracy target for the AGM iterations. Quadratic convergence
/// squares the residual each pass, so stopping at ~4 ulp leaves the
/// results accurate to well beyond 1e-12.
const AGM_TOL: f64 = 4.0 * f64::EPSILON;
/// The AGM halves the gap at least quadratically; 64 passes is far past
/// convergence for any representable input and bounds the loops against
/// last-ulp stalls.
const AGM_MAX_ITER: usize = 64;
/// Within this distance of m = 1 the AGM angle recursion loses accuracy;
/// use the hyperbolic limit forms instead.
const NEAR_ONE: f64 = 1e-10;
/// Below this, sn/cn/dn are circular functions to full precision.
const NEAR_ZERO: f64 = 1e-14;

/// Validated elliptic parameter m = k² with 0 ≤ m ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParameter(f64);

impl EllipticParameter {
    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::Domain(format!(
                "elliptic parameter m must lie in [0, 1], got {m}"
            )));
        }
        Ok(Self(m))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// One evaluation of the three Jacobi elliptic functions at a common
/// argument; satisfies sn² + cn² = 1 and dn² + m·sn² = 1.
#[derive(Debug, Clone, Copy)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Complete elliptic integral of the first kind K(m).
///
/// AGM iteration: a ← (a+b)/2, b ← √(ab) starting from (1, √(1−m));
/// K = π/(2·AGM). Diverges logarithmically as m → 1.
pub fn complete_k(m: EllipticParameter) -> Result<f64> {
    let m = m.get();
    if m >= 1.0 {
        return Err(Error::Domain(
            "K(m) diverges at m = 1; require m < 1".into(),
        ));
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::FRAC_PI_2 / a)
}

/// Complete elliptic integral of the second kind E(m).
///
/// E/K = 1 − Σₙ 2ⁿ⁻¹·cₙ² along the same AGM sequence, c₀ = √m.
pub fn complete_e(m: EllipticParameter) -> f64 {
    let m = m.get();
    if m == 1.0 {
        return 1.0;
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    let mut sum = 0.5 * m; // 2^{-1} c_0^2 with c_0^2 = m
    let mut pow = 0.5;
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    std::f64::consts::FRAC_PI_2 / a * (1.0 - sum)
}

/// Jacobi elliptic functions sn(u|m), cn(u|m), dn(u|m).
///
/// Descending Landen/AGM scheme: build the AGM sequence (aₙ, bₙ, cₙ),
/// set φ_N = 2ᴺ·a_N·u, then recover φ₀ through
/// sin(2φₙ₋₁ − φₙ) = (cₙ/aₙ)·sin φₙ. Then sn = sin φ₀, cn = cos φ₀,
/// dn = cos φ₀ / cos(φ₁ − φ₀).
pub fn jacobi(u: f64, m: EllipticParameter) -> JacobiTriple {
    let m = m.get();
    debug_assert!(u.is_finite(), "jacobi argument must be finite");
    if m < NEAR_ZERO {
        return JacobiTriple {
            sn: u.sin(),
            cn: u.cos(),
            dn: 1.0,
        };
    }
    if 1.0 - m <= NEAR_ONE {
        // Hyperbolic limit; exact at m = 1, error O(1-m) nearby.
        let sech = 1.0 / u.cosh();
        return JacobiTriple {
            sn: u.tanh(),
            cn: sech,
            dn: sech,
        };
    }

    let mut a = vec![1.0_f64];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    for _ in 0..AGM_MAX_ITER {
        if c.last().unwrap().abs() <= AGM_TOL * a.last().unwrap() {
            break;
        }
        let an = a.last().unwrap();
        let next_a = 0.5 * (an + b);
        let next_c = 0.5 * (an - b);
        b = (an * b).sqrt();
        a.push(next_a);
        c.push(next_c);
    }
    let n = a.len() - 1;
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    let mut phi_prev = phi;
    for k in (1..=n).rev() {
        phi_prev = phi;
        let s = (c[k] / a[k] * phi.sin()).asin();
        phi = 0.5 * (phi + s);
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let dn = if n == 0 {
        (1.0 - m * sn * sn).sqrt()
    } else {
        cn / (phi_prev - phi).cos()
    };
    JacobiTriple { sn, cn, dn }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn param(m: f64) -> EllipticParameter {
        EllipticParameter::new(m).unwrap()
    }

    #[test]
    fn parameter_rejects_out_of_range() {
        assert!(EllipticParameter::new(-1e-12).is_err());
        assert!(EllipticParameter::new(1.0 + 1e-12).is_err());
        assert!(EllipticParameter::new(f64::NAN).is_err());
        assert!(EllipticParameter::new(0.0).is_ok());
        assert!(EllipticParameter::new(1.0).is_ok());
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert!((complete_k(param(0.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn k_rejects_m_equal_one() {
        assert!(complete_k(param(1.0)).is_err());
    }

    #[test]
    fn k_diverges_monotonically_near_one() {
        let mut prev = complete_k(param(0.9)).unwrap();
        for m in [0.99, 0.999, 0.9999, 0.999999, 1.0 - 1e-9, 1.0 - 1e-12] {
            let k = complete_k(param(m)).unwrap();
            assert!(k > prev, "K not increasing at m = {m}");
            prev = k;
        }
        assert!(prev > 14.0);
    }

    #[test]
    fn e_endpoint_values() {
        assert!((complete_e(param(0.0)) - FRAC_PI_2).abs() < 1e-15);
        assert!((complete_e(param(1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_origin_values() {
        for m in [0.0, 0.3, 0.8, 1.0] {
            let t = jacobi(0.0, param(m));
            assert_eq!(t.sn, 0.0);
            assert!((t.cn - 1.0).abs() < 1e-15);
            assert!((t.dn - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobi_circular_limit() {
        for &u in &[-3.0, -0.4, 0.7, 2.9] {
            let t = jacobi(u, param(0.0));
            assert!((t.sn - u.sin()).abs() < 1e-14);
            assert!((t.cn - u.cos()).abs() < 1e-14);
            assert!((t.dn - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_hyperbolic_limit() {
        for &u in &[-2.5, -0.3, 0.9, 3.1] {
            let t = jacobi(u, param(1.0));
            assert!((t.sn - u.tanh()).abs() < 1e-14);
            assert!((t.cn - 1.0 / u.cosh()).abs() < 1e-14);
            assert!((t.dn - 1.0 / u.cosh()).abs() < 1e-14);
        }
    }
}
