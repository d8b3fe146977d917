//! Pooled bivariate autocorrelation of (dry, wet) cycle durations.
//!
//! Spell records split into one short series per year, so the covariance
//! at lag l pools valid within-year pairs only: no pair straddles a year
//! boundary. The grand mean pools every cycle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AcfError {
    #[error("need at least two cycles, got {got}")]
    InsufficientData { got: usize },
    #[error("constant series: lag-zero variance vanishes in component {component}")]
    Degenerate { component: &'static str },
}

/// R-hat(l) entries at one lag, with the pooled pair count behind them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcfLag {
    pub lag: u32,
    /// Pairs pooled at this lag: sum_y max(C_y - l, 0).
    pub pairs: u64,
    pub dry_dry: f64,
    pub dry_wet: f64,
    pub wet_dry: f64,
    pub wet_wet: f64,
    /// White-noise reference bound 2/sqrt(pairs).
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfMatrix {
    pub lags: Vec<AcfLag>,
    pub total_cycles: u64,
}

/// Compute R-hat(l) for l = 0..=max_lag from per-year cycle lists.
/// Lags with no valid pairs are absent from the output.
pub fn acf_bivariate(cycles_per_year: &[Vec<(u32, u32)>], max_lag: u32) -> Result<AcfMatrix, AcfError> {
    let total: usize = cycles_per_year.iter().map(|v| v.len()).sum();
    if total < 2 {
        return Err(AcfError::InsufficientData { got: total });
    }
    let total_f = total as f64;
    let mut mean = [0.0_f64; 2];
    for year in cycles_per_year {
        for &(d, w) in year {
            mean[0] += f64::from(d);
            mean[1] += f64::from(w);
        }
    }
    mean[0] /= total_f;
    mean[1] /= total_f;

    // Gamma-hat(l), 2x2 per lag, pooling within-year pairs.
    let mut gammas: Vec<([[f64; 2]; 2], u64)> = Vec::new();
    for lag in 0..=max_lag as usize {
        let mut pairs = 0u64;
        let mut g = [[0.0_f64; 2]; 2];
        for year in cycles_per_year {
            if year.len() <= lag {
                continue;
            }
            for k in 0..year.len() - lag {
                let a = [f64::from(year[k].0) - mean[0], f64::from(year[k].1) - mean[1]];
                let b = [
                    f64::from(year[k + lag].0) - mean[0],
                    f64::from(year[k + lag].1) - mean[1],
                ];
                for i in 0..2 {
                    for j in 0..2 {
                        g[i][j] += a[i] * b[j];
                    }
                }
                pairs += 1;
            }
        }
        if pairs == 0 {
            break;
        }
        for row in &mut g {
            for v in row.iter_mut() {
                *v /= pairs as f64;
            }
        }
        gammas.push((g, pairs));
    }

    let (g0, _) = &gammas[0];
    if g0[0][0] <= 0.0 {
        return Err(AcfError::Degenerate { component: "dry" });
    }
    if g0[1][1] <= 0.0 {
        return Err(AcfError::Degenerate { component: "wet" });
    }
    let scale = [1.0 / g0[0][0].sqrt(), 1.0 / g0[1][1].sqrt()];

    let lags = gammas
        .iter()
        .enumerate()
        .map(|(lag, (g, pairs))| AcfLag {
            lag: lag as u32,
            pairs: *pairs,
            dry_dry: g[0][0] * scale[0] * scale[0],
            dry_wet: g[0][1] * scale[0] * scale[1],
            wet_dry: g[1][0] * scale[1] * scale[0],
            wet_wet: g[1][1] * scale[1] * scale[1],
            bound: 2.0 / (*pairs as f64).sqrt(),
        })
        .collect();
    Ok(AcfMatrix { lags, total_cycles: total as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from_seed;
    use rand::RngExt;

    #[test]
    fn constant_series_is_degenerate() {
        let years = vec![vec![(2u32, 3u32), (2, 3)]];
        assert_eq!(
            acf_bivariate(&years, 1),
            Err(AcfError::Degenerate { component: "dry" })
        );
    }

    #[test]
    fn single_cycle_is_insufficient() {
        let years = vec![vec![(2u32, 3u32)]];
        assert_eq!(acf_bivariate(&years, 1), Err(AcfError::InsufficientData { got: 1 }));
    }

    #[test]
    fn lag_zero_has_unit_diagonal() {
        let years = vec![
            vec![(1u32, 4u32), (3, 1), (2, 2)],
            vec![(5u32, 1u32), (1, 3)],
        ];
        let acf = acf_bivariate(&years, 2).unwrap();
        let l0 = &acf.lags[0];
        assert!((l0.dry_dry - 1.0).abs() < 1e-12);
        assert!((l0.wet_wet - 1.0).abs() < 1e-12);
        assert!((l0.dry_wet - l0.wet_dry).abs() < 1e-12, "lag 0 is symmetric");
        assert!(l0.dry_wet.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn hand_computed_two_year_toy() {
        // years: [(1,2),(3,4),(5,6)] and [(7,8),(9,10)]; lag 1 pools the
        // two within-year-1 pairs and the single year-2 pair.
        let years = vec![
            vec![(1u32, 2u32), (3, 4), (5, 6)],
            vec![(7u32, 8u32), (9, 10)],
        ];
        // grand means over all 5 cycles
        let md = (1.0 + 3.0 + 5.0 + 7.0 + 9.0) / 5.0; // 5
        let mw = (2.0 + 4.0 + 6.0 + 8.0 + 10.0) / 5.0; // 6
        // Gamma0 (pairs = 5): diag entries
        let dry_devs = [-4.0, -2.0, 0.0, 2.0, 4.0f64];
        let wet_devs = [-4.0, -2.0, 0.0, 2.0, 4.0f64];
        let g0_dd: f64 = dry_devs.iter().map(|v| v * v).sum::<f64>() / 5.0;
        let g0_ww: f64 = wet_devs.iter().map(|v| v * v).sum::<f64>() / 5.0;
        // Gamma1 (pairs = 3): pairs (y1k1,y1k2), (y1k2,y1k3), (y2k1,y2k2)
        let pairs = [((1.0, 2.0), (3.0, 4.0)), ((3.0, 4.0), (5.0, 6.0)), ((7.0, 8.0), (9.0, 10.0))];
        let mut g1 = [[0.0f64; 2]; 2];
        for ((d0, w0), (d1, w1)) in pairs {
            let a = [d0 - md, w0 - mw];
            let b = [d1 - md, w1 - mw];
            for i in 0..2 {
                for j in 0..2 {
                    g1[i][j] += a[i] * b[j] / 3.0;
                }
            }
        }
        let want_dd = g1[0][0] / (g0_dd.sqrt() * g0_dd.sqrt());
        let want_dw = g1[0][1] / (g0_dd.sqrt() * g0_ww.sqrt());

        let acf = acf_bivariate(&years, 1).unwrap();
        let l1 = &acf.lags[1];
        assert_eq!(l1.pairs, 3);
        assert!((l1.dry_dry - want_dd).abs() < 1e-12);
        assert!((l1.dry_wet - want_dw).abs() < 1e-12);
        assert_eq!(acf.total_cycles, 5);
    }

    #[test]
    fn iid_cycles_stay_inside_bounds() {
        // 100 years x 10 cycles of i.i.d. durations: at least 90% of the
        // (entry, lag >= 1) cells inside 2/sqrt(C_l).
        let mut rng = rng_from_seed(606);
        let years: Vec<Vec<(u32, u32)>> = (0..100)
            .map(|_| {
                (0..10)
                    .map(|_| (rng.random_range(1..30u32), rng.random_range(1..20u32)))
                    .collect()
            })
            .collect();
        let acf = acf_bivariate(&years, 6).unwrap();
        let mut inside = 0u32;
        let mut cells = 0u32;
        for l in &acf.lags[1..] {
            for v in [l.dry_dry, l.dry_wet, l.wet_dry, l.wet_wet] {
                cells += 1;
                if v.abs() < l.bound {
                    inside += 1;
                }
            }
        }
        assert!(
            f64::from(inside) >= 0.9 * f64::from(cells),
            "{inside}/{cells} inside"
        );
    }

    #[test]
    fn lags_without_pairs_are_absent() {
        let years = vec![vec![(1u32, 2u32), (4, 1)], vec![(2u32, 2u32)]];
        let acf = acf_bivariate(&years, 10).unwrap();
        // max within-year run is 2 cycles: lags 0 and 1 only
        assert_eq!(acf.lags.len(), 2);
    }
}
