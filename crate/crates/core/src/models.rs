//! Mutual-information models for continuous and discretized transceivers.
//!
//! * continuous: Fredholm log-determinant `log det(1 + T_E/(n₀/2))`, realized
//!   as a Nyström eigen-sum on a fine reference grid;
//! * discrete_rx: continuous source, `m` point antennas at the receiver;
//! * discrete_trx: `m1` transmit and `m2` receive point antennas.
//!
//! The discrete models rescale their noise (`n₁`, `n₂`) so the total receive
//! SNR equals that of the continuous model.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{
    default_inner_points, diagonal_profile, green_power_at_offset, max_second_difference, unit_trace_exact,
    unit_trace_reference, SystemConfig,
};
use crate::spectra::{midpoint_grid, HermitianKernelMatrix, QuadratureGrid, SpectralResult, DEFAULT_CLAMP_REL};

/// Smallest reference grid accepted for the continuous model.
pub const MIN_REFERENCE_M: usize = 64;

/// Outer midpoint size (before doubling) of the extrapolated trace used as
/// the SNR-control denominator.
pub const TRACE_REFERENCE_POINTS: usize = 4096;

/// Intervals of the uniform grid on which `‖K_E''(r, r)‖∞` and `‖∂²|G|²‖∞`
/// are estimated by central differences.
pub const CURVATURE_INTERVALS: usize = 2000;

/// Default relative eigenvalue threshold for degree-of-freedom counting.
pub const DEFAULT_DOF_THRESHOLD: f64 = 0.01;

/// Reference grid size: `max(1600, 16 ⌈2l/λ⌉)`.
pub fn default_reference_m(cfg: &SystemConfig) -> usize {
    (16 * cfg.half_wavelength_count().ceil() as usize).max(1600)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelTag {
    #[serde(rename = "continuous")]
    Continuous,
    #[serde(rename = "discrete_rx")]
    DiscreteRx,
    #[serde(rename = "discrete_trx")]
    DiscreteTrx,
    #[serde(rename = "intermediate_I0p")]
    IntermediateI0p,
    #[serde(rename = "intermediate_I0pp")]
    IntermediateI0pp,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::Continuous => "continuous",
            ModelTag::DiscreteRx => "discrete_rx",
            ModelTag::DiscreteTrx => "discrete_trx",
            ModelTag::IntermediateI0p => "intermediate_I0p",
            ModelTag::IntermediateI0pp => "intermediate_I0pp",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "continuous" => ModelTag::Continuous,
            "discrete_rx" => ModelTag::DiscreteRx,
            "discrete_trx" => ModelTag::DiscreteTrx,
            "intermediate_I0p" => ModelTag::IntermediateI0p,
            "intermediate_I0pp" => ModelTag::IntermediateI0pp,
            other => return Err(Error::InvalidArgument(format!("unknown model tag {other:?}"))),
        })
    }
}

/// A mutual-information value and how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct MiResult {
    pub value_nats: f64,
    pub model_tag: ModelTag,
    /// Transmit antennas (`None` for a continuous source).
    pub grid_m1: Option<usize>,
    /// Receive antennas (`None` for a continuous receiver).
    pub grid_m2: Option<usize>,
    /// Nyström grid of the continuous operator, when one was used.
    pub ref_m: Option<usize>,
    /// Source-side quadrature size, when the source is continuous.
    pub inner_points: Option<usize>,
    /// Noise density applied: `n₀`, `n₁` or `n₂`.
    pub noise_used: f64,
    pub clamped_count: usize,
}

impl MiResult {
    pub fn value_bits(&self) -> f64 {
        self.value_nats / std::f64::consts::LN_2
    }
}

/// Outcome of an SNR-control rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseControl {
    /// `n₁` or `n₂`.
    pub n_value: f64,
    /// Asymptote `m n₀ / l` or `m₁ m₂ n₀ / l²`.
    pub limit_value: f64,
    /// `|l n₁/m − n₀|` or `|n₀ − l² n₂/(m₁ m₂)|`.
    pub gap: f64,
    /// Midpoint-rule error bound on `gap`, with the second-derivative norm
    /// estimated numerically (not a certified supremum).
    pub midpoint_bound: f64,
}

impl NoiseControl {
    pub fn within_bound(&self) -> bool {
        self.gap <= self.midpoint_bound
    }

    /// Receiver rule `n₁ = n₀ Σ K_E(r_i, r_i) / ∫ K_E(r, r) dr` from the
    /// diagonal samples on an `m`-point grid of length `l`.
    ///
    /// `integral` is `∫ K_E(r, r) dr` in the same units as `samples`, and
    /// `curvature` an estimate of `‖K_E''(r, r)‖∞`.
    pub fn receiver_from_profile(samples: &[f64], integral: f64, l: f64, n0: f64, curvature: f64) -> Result<Self> {
        let m = samples.len();
        if m == 0 {
            return Err(Error::EmptyGrid);
        }
        if integral.is_nan() || integral <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        let mf = m as f64;
        let sum: f64 = samples.iter().sum();
        let n_value = n0 * sum / integral;
        Ok(NoiseControl {
            n_value,
            limit_value: mf * n0 / l,
            gap: (l * n_value / mf - n0).abs(),
            midpoint_bound: n0 * l.powi(3) * curvature / (24.0 * mf * mf * integral),
        })
    }
}

/// Per-unit-power receiver calibration shared by every grid on one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ReceiverCalibration {
    /// `∫ K_E(r, r) dr / P`.
    unit_trace: f64,
    /// `‖K_E''(r, r)‖∞ / P`.
    curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TransceiverCalibration {
    /// `∫∫ |G|² dr ds`.
    unit_trace: f64,
    /// `‖∂²|G(r, s)|²/∂r²‖∞`, equal to the `s` derivative since `|G|²`
    /// depends on `r − s` only.
    curvature: f64,
}

/// A scenario plus its quadrature resolution and cached SNR-control
/// normalizers.
#[derive(Debug)]
pub struct Channel {
    cfg: SystemConfig,
    inner_points: usize,
    rx: OnceLock<Result<ReceiverCalibration>>,
    trx: OnceLock<Result<TransceiverCalibration>>,
}

impl Clone for Channel {
    fn clone(&self) -> Self {
        Channel {
            cfg: self.cfg,
            inner_points: self.inner_points,
            rx: self.rx.clone(),
            trx: self.trx.clone(),
        }
    }
}

impl From<SystemConfig> for Channel {
    fn from(cfg: SystemConfig) -> Self {
        Channel::new(cfg, default_inner_points(&cfg)).expect("default inner rule is valid")
    }
}

impl Channel {
    pub fn new(cfg: SystemConfig, inner_points: usize) -> Result<Self> {
        if inner_points < 2 {
            return Err(Error::TooFewPoints {
                min: 2,
                got: inner_points,
            });
        }
        Ok(Channel {
            cfg,
            inner_points,
            rx: OnceLock::new(),
            trx: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn inner_points(&self) -> usize {
        self.inner_points
    }

    fn receiver_calibration(&self) -> Result<ReceiverCalibration> {
        self.rx
            .get_or_init(|| {
                let unit = self.cfg.with_power(1.0)?;
                let unit_trace = unit_trace_reference(&unit, self.inner_points, TRACE_REFERENCE_POINTS)?;
                let curvature = max_second_difference(0.0, unit.aperture(), CURVATURE_INTERVALS, |pts| {
                    diagonal_profile(pts, &unit, self.inner_points).unwrap_or_default()
                });
                Ok(ReceiverCalibration { unit_trace, curvature })
            })
            .clone()
    }

    fn transceiver_calibration(&self) -> Result<TransceiverCalibration> {
        self.trx
            .get_or_init(|| {
                let l = self.cfg.aperture();
                let unit_trace = unit_trace_exact(&self.cfg, 8 * TRACE_REFERENCE_POINTS)?;
                let curvature = max_second_difference(-l, l, 2 * CURVATURE_INTERVALS, |xs| {
                    xs.iter().map(|&x| green_power_at_offset(x, &self.cfg)).collect()
                });
                Ok(TransceiverCalibration { unit_trace, curvature })
            })
            .clone()
    }
}

/// Continuous-model result together with the reference spectrum it came from.
#[derive(Debug, Clone)]
pub struct ContinuousMi {
    pub result: MiResult,
    /// Eigenvalues of the sampled kernel matrix (unweighted).
    pub spectrum: SpectralResult,
    /// Nyström weight `l / ref_m`; operator eigenvalues are `weight · λ_k`.
    pub weight: f64,
}

impl ContinuousMi {
    /// Approximate operator eigenvalues `λ_k(T_E)`.
    pub fn operator_eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.spectrum.eigenvalues.iter().map(move |v| v * self.weight)
    }

    /// `log det(1 + z T_E)` on the reference spectrum.
    pub fn fredholm_logdet(&self, z: f64) -> f64 {
        self.spectrum.logdet_one_plus_scaled(z * self.weight)
    }

    /// Per-subchannel form `Σ_k log(1 + λ_k / (n₀/2))`.
    pub fn subchannel_sum(&self, n0: f64) -> f64 {
        self.operator_eigenvalues().map(|v| (v / (n0 / 2.0)).ln_1p()).sum()
    }
}

pub fn mi_continuous(channel: &Channel, ref_m: usize) -> Result<ContinuousMi> {
    if ref_m < MIN_REFERENCE_M {
        return Err(Error::TooFewPoints {
            min: MIN_REFERENCE_M,
            got: ref_m,
        });
    }
    let cfg = channel.config();
    let grid = midpoint_grid(cfg.aperture(), ref_m)?;
    let k = HermitianKernelMatrix::sampled_kernel(grid.points(), cfg, channel.inner_points())?;
    let spectrum = crate::spectra::hermitian_eigenvalues(&k, DEFAULT_CLAMP_REL)?;
    let weight = grid.weight();
    let value_nats = spectrum.logdet_one_plus_scaled(2.0 / cfg.noise() * weight);
    Ok(ContinuousMi {
        result: MiResult {
            value_nats,
            model_tag: ModelTag::Continuous,
            grid_m1: None,
            grid_m2: None,
            ref_m: Some(ref_m),
            inner_points: Some(channel.inner_points()),
            noise_used: cfg.noise(),
            clamped_count: spectrum.clamped_count,
        },
        spectrum,
        weight,
    })
}

/// Receiver SNR control `n₁` for point antennas at `grid`.
pub fn noise_rx(grid: &QuadratureGrid, channel: &Channel) -> Result<NoiseControl> {
    let cfg = channel.config();
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if cfg.power() == 0.0 {
        return Err(Error::ZeroTrace);
    }
    let cal = channel.receiver_calibration()?;
    let unit = cfg.with_power(1.0)?;
    let samples = diagonal_profile(grid.points(), &unit, channel.inner_points())?;
    NoiseControl::receiver_from_profile(&samples, cal.unit_trace, grid.length(), cfg.noise(), cal.curvature)
}

/// Transceiver SNR control `n₂ = n₀ ΣΣ |G(r_i, s_j)|² / ∫∫ |G|²`.
pub fn noise_trx(rx_grid: &QuadratureGrid, tx_grid: &QuadratureGrid, channel: &Channel) -> Result<NoiseControl> {
    let mut tx = tx_grid.points().to_vec();
    tx.sort_by(f64::total_cmp);
    noise_trx_points(rx_grid.points(), &tx, channel)
}

fn noise_trx_points(rx: &[f64], tx: &[f64], channel: &Channel) -> Result<NoiseControl> {
    let cfg = channel.config();
    if rx.is_empty() || tx.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if cfg.power() == 0.0 {
        return Err(Error::ZeroTrace);
    }
    let cal = channel.transceiver_calibration()?;
    let sum: f64 = rx
        .iter()
        .map(|&r| tx.iter().map(|&s| green_power_at_offset(r - s, cfg)).sum::<f64>())
        .sum();
    transceiver_noise_from_sum(
        sum,
        rx.len(),
        tx.len(),
        cal.unit_trace,
        cfg.aperture(),
        cfg.noise(),
        cal.curvature,
    )
}

/// Transceiver rule from a precomputed double sum `ΣΣ |G(r_i, s_j)|²`.
fn transceiver_noise_from_sum(
    sum: f64,
    m2: usize,
    m1: usize,
    integral: f64,
    l: f64,
    n0: f64,
    curvature: f64,
) -> Result<NoiseControl> {
    if integral.is_nan() || integral <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let cells = (m1 * m2) as f64;
    let n_value = n0 * sum / integral;
    let m_min = m1.min(m2) as f64;
    Ok(NoiseControl {
        n_value,
        limit_value: cells * n0 / (l * l),
        gap: (n0 - l * l * n_value / cells).abs(),
        midpoint_bound: n0 * l.powi(4) * 2.0 * curvature / (24.0 * m_min * m_min * integral),
    })
}

/// Constant-`|G|²` variant of the transceiver rule, for checking the
/// normalization independently of the physics.
pub fn transceiver_noise_for_constant_gain(gain: f64, m1: usize, m2: usize, l: f64, n0: f64) -> Result<NoiseControl> {
    let sum = (0..m2).map(|_| (0..m1).map(|_| gain).sum::<f64>()).sum();
    transceiver_noise_from_sum(sum, m2, m1, gain * l * l, l, n0, 0.0)
}

pub fn mi_discrete_rx(m: usize, channel: &Channel) -> Result<MiResult> {
    let cfg = channel.config();
    let grid = midpoint_grid(cfg.aperture(), m)?;
    let base = MiResult {
        value_nats: 0.0,
        model_tag: ModelTag::DiscreteRx,
        grid_m1: None,
        grid_m2: Some(m),
        ref_m: None,
        inner_points: Some(channel.inner_points()),
        noise_used: m as f64 * cfg.noise() / cfg.aperture(),
        clamped_count: 0,
    };
    if cfg.power() == 0.0 {
        return Ok(base);
    }
    let noise = noise_rx(&grid, channel)?;
    let k = HermitianKernelMatrix::sampled_kernel(grid.points(), cfg, channel.inner_points())?;
    let spectrum = crate::spectra::hermitian_eigenvalues(&k, DEFAULT_CLAMP_REL)?;
    Ok(MiResult {
        value_nats: spectrum.logdet_one_plus_scaled(2.0 / noise.n_value),
        noise_used: noise.n_value,
        clamped_count: spectrum.clamped_count,
        ..base
    })
}

pub fn mi_discrete_trx(m1: usize, m2: usize, channel: &Channel) -> Result<MiResult> {
    let cfg = channel.config();
    let tx = midpoint_grid(cfg.aperture(), m1)?;
    let rx = midpoint_grid(cfg.aperture(), m2)?;
    mi_discrete_trx_at(rx.points(), tx.points(), channel)
}

/// Discrete-transceiver mutual information for arbitrary antenna positions.
/// The transmit set is order-free: positions are sorted before summation.
pub fn mi_discrete_trx_at(rx_points: &[f64], tx_points: &[f64], channel: &Channel) -> Result<MiResult> {
    let cfg = channel.config();
    if rx_points.is_empty() || tx_points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let (m1, m2) = (tx_points.len(), rx_points.len());
    let base = MiResult {
        value_nats: 0.0,
        model_tag: ModelTag::DiscreteTrx,
        grid_m1: Some(m1),
        grid_m2: Some(m2),
        ref_m: None,
        inner_points: None,
        noise_used: (m1 * m2) as f64 * cfg.noise() / (cfg.aperture() * cfg.aperture()),
        clamped_count: 0,
    };
    if cfg.power() == 0.0 {
        return Ok(base);
    }
    let mut tx = tx_points.to_vec();
    tx.sort_by(f64::total_cmp);
    let noise = noise_trx_points(rx_points, &tx, channel)?;
    let k = HermitianKernelMatrix::discrete_transmit(rx_points, &tx, cfg);
    let spectrum = crate::spectra::hermitian_eigenvalues(&k, DEFAULT_CLAMP_REL)?;
    Ok(MiResult {
        value_nats: spectrum.logdet_one_plus_scaled(2.0 / noise.n_value),
        noise_used: noise.n_value,
        clamped_count: spectrum.clamped_count,
        ..base
    })
}

/// Which intermediate Fredholm determinant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intermediate {
    /// `I₀' = log det(1 + 2m T_E / (l n₁))`.
    Receiver { m: usize },
    /// `I₀'' = log det(1 + 2 m₁ m₂ T_E / (l² n₂))`.
    Transceiver { m1: usize, m2: usize },
}

/// Intermediate quantity on the reference spectrum with the discrete
/// model's rescaled noise, used to split `|I₀ − I₁|` into a noise-scaling
/// part and a quadrature part.
pub fn mi_intermediate(kind: Intermediate, reference: &ContinuousMi, channel: &Channel) -> Result<MiResult> {
    let cfg = channel.config();
    let l = cfg.aperture();
    let (tag, m1, m2) = match kind {
        Intermediate::Receiver { m } => (ModelTag::IntermediateI0p, None, Some(m)),
        Intermediate::Transceiver { m1, m2 } => (ModelTag::IntermediateI0pp, Some(m1), Some(m2)),
    };
    let mut out = MiResult {
        value_nats: 0.0,
        model_tag: tag,
        grid_m1: m1,
        grid_m2: m2,
        ref_m: reference.result.ref_m,
        inner_points: reference.result.inner_points,
        noise_used: cfg.noise(),
        clamped_count: reference.spectrum.clamped_count,
    };
    if cfg.power() == 0.0 {
        return Ok(out);
    }
    let z = match kind {
        Intermediate::Receiver { m } => {
            let noise = noise_rx(&midpoint_grid(l, m)?, channel)?;
            out.noise_used = noise.n_value;
            2.0 * m as f64 / (l * noise.n_value)
        }
        Intermediate::Transceiver { m1, m2 } => {
            let noise = noise_trx(&midpoint_grid(l, m2)?, &midpoint_grid(l, m1)?, channel)?;
            out.noise_used = noise.n_value;
            2.0 * (m1 * m2) as f64 / (l * l * noise.n_value)
        }
    };
    out.value_nats = reference.fredholm_logdet(z);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofEstimate {
    /// Eigenvalues at or above `threshold_rel · λ_max`.
    pub count: usize,
    /// `l² / (d λ)`.
    pub analytic: f64,
    pub threshold_rel: f64,
}

pub fn dof_estimate(channel: &Channel, ref_m: usize, threshold_rel: f64) -> Result<DofEstimate> {
    if !(threshold_rel > 0.0 && threshold_rel < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "DoF threshold must lie in (0, 1), got {threshold_rel}"
        )));
    }
    let cfg = channel.config();
    // the count is scale-free; evaluate at unit power so P = 0 still works
    let unit = Channel::new(cfg.with_power(1.0)?, channel.inner_points())?;
    let reference = mi_continuous(&unit, ref_m)?;
    Ok(DofEstimate {
        count: reference.spectrum.count_above(threshold_rel),
        analytic: cfg.analytic_dof(),
        threshold_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_channel(d: f64) -> Channel {
        // coarse wavelength keeps unit tests fast
        let cfg = SystemConfig::new(0.2, 2.0, d, 1.0, 2.0).unwrap();
        Channel::new(cfg, 512).unwrap()
    }

    #[test]
    fn model_tags_round_trip() {
        for tag in [
            ModelTag::Continuous,
            ModelTag::DiscreteRx,
            ModelTag::DiscreteTrx,
            ModelTag::IntermediateI0p,
            ModelTag::IntermediateI0pp,
        ] {
            assert_eq!(tag.as_str().parse::<ModelTag>().unwrap(), tag);
        }
        assert!("bogus".parse::<ModelTag>().is_err());
    }

    #[test]
    fn default_reference_grid() {
        assert_eq!(default_reference_m(&SystemConfig::default()), 1600);
        let fine = SystemConfig::new(0.01, 2.0, 10.0, 1.0, 2.0).unwrap();
        assert_eq!(default_reference_m(&fine), 6400);
    }

    #[test]
    fn constant_diagonal_gives_asymptotic_noise() {
        let nc = NoiseControl::receiver_from_profile(&[1.0; 7], 2.0, 2.0, 2.0, 0.0).unwrap();
        assert_eq!(nc.n_value, 7.0);
        assert_eq!(nc.limit_value, 7.0);
        assert_eq!(nc.gap, 0.0);
    }

    #[test]
    fn constant_gain_gives_asymptotic_transceiver_noise() {
        let nc = transceiver_noise_for_constant_gain(0.5, 3, 5, 2.0, 2.0).unwrap();
        assert_relative_eq!(nc.n_value, 15.0 * 2.0 / 4.0, max_relative = 1e-15);
        assert_relative_eq!(nc.limit_value, nc.n_value, max_relative = 1e-15);
        assert!(nc.gap < 1e-14);
    }

    #[test]
    fn zero_power_is_signaled_by_noise_rules() {
        let ch = Channel::from(SystemConfig::default().with_power(0.0).unwrap());
        let g = midpoint_grid(2.0, 4).unwrap();
        assert_eq!(noise_rx(&g, &ch), Err(Error::ZeroTrace));
        assert_eq!(noise_trx(&g, &g, &ch), Err(Error::ZeroTrace));
    }

    #[test]
    fn zero_power_gives_zero_information() {
        let ch = Channel::new(SystemConfig::new(0.2, 2.0, 10.0, 0.0, 2.0).unwrap(), 512).unwrap();
        assert_eq!(mi_discrete_rx(5, &ch).unwrap().value_nats, 0.0);
        assert_eq!(mi_discrete_trx(3, 4, &ch).unwrap().value_nats, 0.0);
        let c = mi_continuous(&ch, 64).unwrap();
        assert_eq!(c.result.value_nats, 0.0);
        assert_eq!(
            mi_intermediate(Intermediate::Receiver { m: 10 }, &c, &ch)
                .unwrap()
                .value_nats,
            0.0
        );
    }

    #[test]
    fn single_antenna_closed_form() {
        let ch = small_channel(5.0);
        let mi = mi_discrete_rx(1, &ch).unwrap();
        let k11 = crate::physics::kernel_value(1.0, 1.0, ch.config(), 512).unwrap().re;
        let n1 = noise_rx(&midpoint_grid(2.0, 1).unwrap(), &ch).unwrap().n_value;
        assert_relative_eq!(mi.value_nats, (1.0 + k11 / (n1 / 2.0)).ln(), max_relative = 1e-13);
        assert_eq!(mi.noise_used, n1);
    }

    #[test]
    fn reference_grid_must_be_fine_enough() {
        assert!(matches!(
            mi_continuous(&small_channel(5.0), 32),
            Err(Error::TooFewPoints { min: 64, got: 32 })
        ));
    }

    #[test]
    fn subchannel_and_fredholm_forms_agree() {
        let ch = small_channel(5.0);
        let c = mi_continuous(&ch, 96).unwrap();
        assert_relative_eq!(c.subchannel_sum(2.0), c.result.value_nats, max_relative = 1e-13);
        assert_relative_eq!(c.fredholm_logdet(1.0), c.result.value_nats, max_relative = 1e-13);
    }

    #[test]
    fn dof_threshold_is_validated() {
        let ch = small_channel(5.0);
        assert!(dof_estimate(&ch, 64, 0.0).is_err());
        assert!(dof_estimate(&ch, 64, 1.0).is_err());
    }

    #[test]
    fn transmit_order_does_not_matter() {
        let ch = small_channel(1.0);
        let rx = midpoint_grid(2.0, 6).unwrap();
        let tx = midpoint_grid(2.0, 5).unwrap();
        let mut shuffled = tx.points().to_vec();
        shuffled.reverse();
        shuffled.swap(0, 2);
        let a = mi_discrete_trx_at(rx.points(), tx.points(), &ch).unwrap();
        let b = mi_discrete_trx_at(rx.points(), &shuffled, &ch).unwrap();
        assert_eq!(a.value_nats, b.value_nats);
    }
}
