//! Batch drivers for length sweeps. Every point is independent, so the
//! sweeps fan out across the rayon pool when the `parallel` feature is
//! enabled; output order always follows the input grid.

use crate::error::Result;
use crate::forman;
use crate::model::{self, critical_length, ModelParams};
use crate::{exec, spectra};
use serde::Serialize;

/// Which branch of the transition governs escape at a given length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Below,
    Above,
}

impl Regime {
    pub fn classify(l: f64, p: &ModelParams) -> Self {
        if l <= critical_length(p) {
            Regime::Below
        } else {
            Regime::Above
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BarrierPoint {
    #[serde(rename = "L")]
    pub l: f64,
    pub delta_e: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrefactorPoint {
    #[serde(rename = "L")]
    pub l: f64,
    pub gamma0: f64,
    pub regime: Regime,
}

/// One row of the full rate table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatePoint {
    #[serde(rename = "L")]
    pub l: f64,
    pub delta_e: f64,
    pub gamma0: f64,
    pub lambda_neg: f64,
    pub regime: Regime,
}

/// `n` equispaced values covering [lo, hi] inclusively.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

pub fn barrier_curve(p: &ModelParams, ls: &[f64]) -> Result<Vec<BarrierPoint>> {
    let p = *p;
    exec::try_map_indexed(ls.len(), move |i| {
        let l = ls[i];
        Ok(BarrierPoint {
            l,
            delta_e: model::barrier(l, &p)?,
            regime: Regime::classify(l, &p),
        })
    })
}

pub fn prefactor_curve(p: &ModelParams, ls: &[f64]) -> Result<Vec<PrefactorPoint>> {
    let p = *p;
    exec::try_map_indexed(ls.len(), move |i| {
        let l = ls[i];
        Ok(PrefactorPoint {
            l,
            gamma0: forman::prefactor(l, &p)?,
            regime: Regime::classify(l, &p),
        })
    })
}

/// Barrier, prefactor and negative eigenvalue at every grid length.
pub fn rate_table(p: &ModelParams, ls: &[f64]) -> Result<Vec<RatePoint>> {
    let p = *p;
    exec::try_map_indexed(ls.len(), move |i| {
        let l = ls[i];
        let (delta_e, gamma0, lambda_neg) = forman::rate_ingredients(l, &p)?;
        Ok(RatePoint {
            l,
            delta_e,
            gamma0,
            lambda_neg,
            regime: Regime::classify(l, &p),
        })
    })
}

/// Assembled Kramers rates over a grid at fixed noise strength.
pub fn kramers_table(
    p: &ModelParams,
    ls: &[f64],
    epsilon: f64,
) -> Result<Vec<(f64, spectra::RateResult)>> {
    let p = *p;
    exec::try_map_indexed(ls.len(), move |i| {
        let l = ls[i];
        let (delta_e, gamma0, lambda_neg) = forman::rate_ingredients(l, &p)?;
        Ok((l, spectra::kramers_rate(delta_e, gamma0, lambda_neg, epsilon)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        let g = linspace(0.5, 2.0, 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[6], 2.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn barrier_curve_keeps_grid_order() {
        let p = ModelParams::new(3.0, 2.0).unwrap();
        let ls = linspace(0.5, 2.5, 5);
        let rows = barrier_curve(&p, &ls).unwrap();
        for (row, l) in rows.iter().zip(&ls) {
            assert_eq!(row.l, *l);
            assert_eq!(row.regime, Regime::Below);
            assert!((row.delta_e - 1.25 * l).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_propagates_point_errors() {
        let p = ModelParams::new(3.0, 2.0).unwrap();
        // A grid point exactly at L_c sits inside the exclusion zone.
        let ls = vec![1.0, std::f64::consts::PI];
        assert!(prefactor_curve(&p, &ls).is_err());
    }
}
