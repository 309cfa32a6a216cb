//! Sampling-number sweeps against the continuous reference and power-law
//! fits of the resulting gaps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{mi_continuous, mi_discrete_rx, mi_discrete_trx, Channel, MiResult, ModelTag};
use crate::physics::{default_inner_points, SystemConfig};

/// Gaps below this fraction of the reference are floating-point noise and
/// are left out of slope fits.
pub const CONVERGED_GAP_REL: f64 = 1e-12;

/// Shared knobs of every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub scenario: String,
    /// Distance is overridden per sweep cell.
    pub base: SystemConfig,
    pub ref_m: usize,
    /// `None` selects [`default_inner_points`] per distance.
    pub inner_points: Option<usize>,
}

impl SweepSettings {
    fn channel(&self, d: f64) -> Result<Channel> {
        let cfg = self.base.with_distance(d)?;
        let inner = self.inner_points.unwrap_or_else(|| default_inner_points(&cfg));
        Channel::new(cfg, inner)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario_id: String,
    pub d: f64,
    /// Transmit antennas; `None` for a continuous source.
    pub m1: Option<usize>,
    /// Receive antennas.
    pub m2: Option<usize>,
    pub ref_m: usize,
    pub mi_nats: f64,
    pub mi_ref_nats: f64,
    /// `|mi_nats − mi_ref_nats|`.
    pub abs_gap: f64,
    pub n_used: f64,
    pub model_tag: ModelTag,
    pub wall_time_s: f64,
    /// Set when the cell failed; numeric fields are then NaN.
    pub error: Option<String>,
}

impl SweepRow {
    /// Effective sampling number `min(m1, m2)` over the discretized sides.
    pub fn sampling_number(&self) -> Option<usize> {
        match (self.m1, self.m2) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub m_range: (usize, usize),
    pub points: usize,
}

struct Reference {
    channel: Channel,
    mi: f64,
}

fn reference_for(settings: &SweepSettings, d: f64) -> std::result::Result<Reference, String> {
    let channel = settings.channel(d).map_err(|e| e.to_string())?;
    let mi = mi_continuous(&channel, settings.ref_m).map_err(|e| e.to_string())?;
    Ok(Reference {
        channel,
        mi: mi.result.value_nats,
    })
}

fn validate_lists(distances: &[f64], m_values: &[usize], ref_m: usize) -> Result<()> {
    if distances.is_empty() || m_values.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs at least one distance and one sampling number".into(),
        ));
    }
    if let Some(&bad) = m_values.iter().find(|&&m| m == 0) {
        return Err(Error::InvalidArgument(format!(
            "sampling numbers must be positive, got {bad}"
        )));
    }
    let max_m = m_values.iter().copied().max().unwrap_or(0);
    if ref_m <= max_m {
        return Err(Error::InvalidArgument(format!(
            "reference grid ({ref_m}) must exceed the largest sampling number ({max_m})"
        )));
    }
    Ok(())
}

fn make_row(
    settings: &SweepSettings,
    d: f64,
    m1: Option<usize>,
    m2: Option<usize>,
    tag: ModelTag,
    reference: &std::result::Result<Reference, String>,
    eval: impl FnOnce(&Channel) -> Result<MiResult>,
) -> SweepRow {
    let start = Instant::now();
    let outcome = match reference {
        Ok(r) => eval(&r.channel).map(|mi| (mi, r.mi)).map_err(|e| e.to_string()),
        Err(e) => Err(format!("reference failed: {e}")),
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    match outcome {
        Ok((mi, mi_ref)) => SweepRow {
            scenario_id: settings.scenario.clone(),
            d,
            m1,
            m2,
            ref_m: settings.ref_m,
            mi_nats: mi.value_nats,
            mi_ref_nats: mi_ref,
            abs_gap: (mi.value_nats - mi_ref).abs(),
            n_used: mi.noise_used,
            model_tag: tag,
            wall_time_s,
            error: None,
        },
        Err(msg) => SweepRow {
            scenario_id: settings.scenario.clone(),
            d,
            m1,
            m2,
            ref_m: settings.ref_m,
            mi_nats: f64::NAN,
            mi_ref_nats: reference.as_ref().map(|r| r.mi).unwrap_or(f64::NAN),
            abs_gap: f64::NAN,
            n_used: f64::NAN,
            model_tag: tag,
            wall_time_s,
            error: Some(msg),
        },
    }
}

/// Continuous transmitter, `m`-antenna receiver: one row per `(d, m)` in
/// input order.
pub fn sweep_receiver(settings: &SweepSettings, distances: &[f64], m_values: &[usize]) -> Result<Vec<SweepRow>> {
    validate_lists(distances, m_values, settings.ref_m)?;
    let mut rows = Vec::with_capacity(distances.len() * m_values.len());
    for &d in distances {
        let reference = reference_for(settings, d);
        let cells: Vec<SweepRow> = m_values
            .par_iter()
            .map(|&m| {
                make_row(settings, d, None, Some(m), ModelTag::DiscreteRx, &reference, |ch| {
                    mi_discrete_rx(m, ch)
                })
            })
            .collect();
        rows.extend(cells);
    }
    Ok(rows)
}

/// Both sides discretized with `m1 = m2 = m`.
pub fn sweep_transceiver(settings: &SweepSettings, distances: &[f64], m_values: &[usize]) -> Result<Vec<SweepRow>> {
    validate_lists(distances, m_values, settings.ref_m)?;
    let mut rows = Vec::with_capacity(distances.len() * m_values.len());
    for &d in distances {
        let reference = reference_for(settings, d);
        let cells: Vec<SweepRow> = m_values
            .par_iter()
            .map(|&m| {
                make_row(settings, d, Some(m), Some(m), ModelTag::DiscreteTrx, &reference, |ch| {
                    mi_discrete_trx(m, m, ch)
                })
            })
            .collect();
        rows.extend(cells);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSweep {
    /// Row-major over `m1_values × m2_values`.
    pub rows: Vec<SweepRow>,
    pub m1_values: Vec<usize>,
    pub m2_values: Vec<usize>,
    /// `max |I₂(a, b) − I₂(b, a)|` over mirrored pairs present in the grid.
    pub symmetry_gap: Option<f64>,
}

impl GridSweep {
    pub fn cell(&self, m1: usize, m2: usize) -> Option<&SweepRow> {
        let i = self.m1_values.iter().position(|&v| v == m1)?;
        let j = self.m2_values.iter().position(|&v| v == m2)?;
        self.rows.get(i * self.m2_values.len() + j)
    }
}

/// Full `m1 × m2` product at one distance.
pub fn sweep_grid(settings: &SweepSettings, d: f64, m1_values: &[usize], m2_values: &[usize]) -> Result<GridSweep> {
    let all: Vec<usize> = m1_values.iter().chain(m2_values).copied().collect();
    validate_lists(&[d], &all, settings.ref_m)?;
    let reference = reference_for(settings, d);
    let pairs: Vec<(usize, usize)> = m1_values
        .iter()
        .flat_map(|&a| m2_values.iter().map(move |&b| (a, b)))
        .collect();
    let rows: Vec<SweepRow> = pairs
        .par_iter()
        .map(|&(m1, m2)| {
            make_row(
                settings,
                d,
                Some(m1),
                Some(m2),
                ModelTag::DiscreteTrx,
                &reference,
                |ch| mi_discrete_trx(m1, m2, ch),
            )
        })
        .collect();
    let mut grid = GridSweep {
        rows,
        m1_values: m1_values.to_vec(),
        m2_values: m2_values.to_vec(),
        symmetry_gap: None,
    };
    let mut worst: Option<f64> = None;
    for &a in m1_values {
        for &b in m2_values {
            if let (Some(ab), Some(ba)) = (grid.cell(a, b), grid.cell(b, a)) {
                if ab.is_ok() && ba.is_ok() {
                    let gap = (ab.mi_nats - ba.mi_nats).abs();
                    worst = Some(worst.map_or(gap, |w: f64| w.max(gap)));
                }
            }
        }
    }
    grid.symmetry_gap = worst;
    Ok(grid)
}

/// Least-squares fit of `log(abs_gap)` against `log(m)`.
///
/// Failed rows, non-finite gaps and gaps below `1e-12 · mi_ref` are
/// excluded; the remaining sampling numbers must be distinct.
pub fn fit_convergence_slope(rows: &[SweepRow]) -> Result<SlopeFit> {
    fit_convergence_slope_skipping(rows, 0)
}

/// As [`fit_convergence_slope`], additionally dropping the `skip_head`
/// smallest usable sampling numbers (pre-asymptotic points).
pub fn fit_convergence_slope_skipping(rows: &[SweepRow], skip_head: usize) -> Result<SlopeFit> {
    let mut usable: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.is_ok() && r.abs_gap.is_finite() && r.abs_gap > 0.0)
        .filter(|r| r.abs_gap >= CONVERGED_GAP_REL * r.mi_ref_nats.abs())
        .filter_map(|r| r.sampling_number().map(|m| (m, r.abs_gap)))
        .collect();
    usable.sort_by_key(|&(m, _)| m);
    if usable.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidArgument(
            "slope fit needs distinct sampling numbers".into(),
        ));
    }
    let usable: Vec<(usize, f64)> = usable.into_iter().skip(skip_head).collect();
    fit_power_law(&usable)
}

/// Log-log least squares over `(m, value)` pairs with distinct `m`,
/// positive values and at least three points.
pub fn fit_power_law(points: &[(usize, f64)]) -> Result<SlopeFit> {
    let mut usable: Vec<(usize, f64)> = points
        .iter()
        .copied()
        .filter(|&(m, v)| m > 0 && v.is_finite() && v > 0.0)
        .collect();
    usable.sort_by_key(|&(m, _)| m);
    if usable.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidArgument(
            "slope fit needs distinct sampling numbers".into(),
        ));
    }
    if usable.len() < 3 {
        return Err(Error::InsufficientFitPoints(usable.len()));
    }
    let xs: Vec<f64> = usable.iter().map(|&(m, _)| (m as f64).ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&(_, g)| g.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        m_range: (usable[0].0, usable[usable.len() - 1].0),
        points: usable.len(),
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    (slope, intercept, r_squared)
}

/// True when gaps never increase with `m` after dropping the first `head`
/// rows (sorted by sampling number).
pub fn gaps_eventually_nonincreasing(rows: &[SweepRow], head: usize) -> bool {
    let mut gaps: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.is_ok())
        .filter_map(|r| r.sampling_number().map(|m| (m, r.abs_gap)))
        .collect();
    gaps.sort_by_key(|&(m, _)| m);
    gaps.iter()
        .skip(head)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1].1 <= w[0].1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synthetic(gap: impl Fn(f64) -> f64) -> Vec<SweepRow> {
        [10usize, 20, 40, 80]
            .iter()
            .map(|&m| SweepRow {
                scenario_id: "synthetic".into(),
                d: 1.0,
                m1: None,
                m2: Some(m),
                ref_m: 1600,
                mi_nats: 100.0 - gap(m as f64),
                mi_ref_nats: 100.0,
                abs_gap: gap(m as f64),
                n_used: 1.0,
                model_tag: ModelTag::DiscreteRx,
                wall_time_s: 0.0,
                error: None,
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let fit = fit_convergence_slope(&synthetic(|m| 3.0 / (m * m))).unwrap();
        assert_relative_eq!(fit.slope, -2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert_eq!(fit.m_range, (10, 80));

        let fit = fit_convergence_slope(&synthetic(|m| 0.5 / m)).unwrap();
        assert_relative_eq!(fit.slope, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn noise_floor_rows_are_excluded() {
        let mut rows = synthetic(|m| 1.0 / (m * m));
        rows[3].abs_gap = 1e-13;
        let fit = fit_convergence_slope(&rows).unwrap();
        assert_eq!(fit.points, 3);
        rows[2].abs_gap = 0.0;
        assert_eq!(fit_convergence_slope(&rows), Err(Error::InsufficientFitPoints(2)));
    }

    #[test]
    fn head_skipping() {
        let rows = synthetic(|m| 1.0 / (m * m));
        assert_eq!(fit_convergence_slope_skipping(&rows, 1).unwrap().m_range, (20, 80));
        assert!(fit_convergence_slope_skipping(&rows, 2).is_err());
    }

    #[test]
    fn duplicate_sampling_numbers_rejected() {
        let mut rows = synthetic(|m| 1.0 / m);
        rows[1].m2 = Some(10);
        assert!(fit_convergence_slope(&rows).is_err());
    }

    #[test]
    fn sampling_number_is_min_side() {
        let mut row = synthetic(|m| 1.0 / m).remove(0);
        assert_eq!(row.sampling_number(), Some(10));
        row.m1 = Some(4);
        assert_eq!(row.sampling_number(), Some(4));
    }

    #[test]
    fn sweep_lists_are_validated() {
        let s = SweepSettings {
            scenario: "t".into(),
            base: SystemConfig::default(),
            ref_m: 100,
            inner_points: Some(512),
        };
        assert!(sweep_receiver(&s, &[], &[10]).is_err());
        assert!(sweep_receiver(&s, &[1.0], &[]).is_err());
        assert!(sweep_receiver(&s, &[1.0], &[100]).is_err());
        assert!(sweep_transceiver(&s, &[1.0], &[0]).is_err());
    }

    #[test]
    fn zero_power_rows() {
        let s = SweepSettings {
            scenario: "zero".into(),
            base: SystemConfig::new(0.2, 2.0, 10.0, 0.0, 2.0).unwrap(),
            ref_m: 64,
            inner_points: Some(512),
        };
        let rows = sweep_receiver(&s, &[10.0], &[1]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mi_nats, 0.0);
        assert_eq!(rows[0].abs_gap, rows[0].mi_ref_nats);
        let rows = sweep_transceiver(&s, &[10.0], &[3]).unwrap();
        assert_eq!(rows[0].mi_nats, 0.0);
    }

    #[test]
    fn failed_reference_is_recorded_not_dropped() {
        let s = SweepSettings {
            scenario: "bad".into(),
            base: SystemConfig::default(),
            ref_m: 64,
            inner_points: Some(512),
        };
        let rows = sweep_receiver(&s, &[-1.0, 10.0], &[4]).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.is_some());
        assert!(rows[0].mi_nats.is_nan());
        assert!(rows[1].is_ok());
    }
}
