//! Scalar free-space channel between two parallel line apertures.
//!
//! The source occupies `s ∈ [0, l]` on the z-axis and the receiver
//! `r ∈ [0, l]` on a parallel line offset by `d`. The channel is the
//! (z, z) entry of the dyadic Green's function, which depends on the two
//! positions only through `x = r - s`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{midpoint_grid, QuadratureGrid};

/// Free-space intrinsic impedance `μ₀c = 120π` in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 120.0 * PI;

/// Minimum inner (source-side) quadrature size.
pub const MIN_INNER_POINTS: usize = 512;

/// Source samples per wavelength used by [`default_inner_points`].
pub const INNER_SAMPLES_PER_WAVELENGTH: f64 = 20.0;

/// Physical scenario: two parallel segments of equal length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    wavelength: f64,
    aperture: f64,
    distance: f64,
    power: f64,
    noise: f64,
}

impl SystemConfig {
    /// Validates and builds a configuration.
    ///
    /// `power` is the source power density `P` in `R_J(s, s') = P δ(s - s')`
    /// and `noise` is the thermal noise density `n₀` (the field noise has
    /// autocorrelation `n₀/2 · δ(r - r')`).
    pub fn new(wavelength: f64, aperture: f64, distance: f64, power: f64, noise: f64) -> Result<Self> {
        let cfg = SystemConfig {
            wavelength,
            aperture,
            distance,
            power,
            noise,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!(
                    "{name} must be a finite positive number, got {v}"
                )))
            }
        }
        positive("wavelength", self.wavelength)?;
        positive("aperture length", self.aperture)?;
        positive("distance", self.distance)?;
        positive("noise density", self.noise)?;
        if !(self.power.is_finite() && self.power >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "power must be a finite nonnegative number, got {}",
                self.power
            )));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Wavenumber `κ₀ = 2π/λ`, always derived from the wavelength.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn with_distance(&self, distance: f64) -> Result<Self> {
        SystemConfig::new(self.wavelength, self.aperture, distance, self.power, self.noise)
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        SystemConfig::new(self.wavelength, self.aperture, self.distance, power, self.noise)
    }

    pub fn with_noise(&self, noise: f64) -> Result<Self> {
        SystemConfig::new(self.wavelength, self.aperture, self.distance, self.power, noise)
    }

    /// True when the separation is within two wavelengths, where evanescent
    /// components dominate the channel. Such scenarios are computed as usual
    /// and flagged in run metadata.
    pub fn is_reactive_near_field(&self) -> bool {
        self.distance < 2.0 * self.wavelength
    }

    /// Rule-of-thumb degrees of freedom `l² / (d λ)` for parallel segments.
    pub fn analytic_dof(&self) -> f64 {
        self.aperture * self.aperture / (self.distance * self.wavelength)
    }

    /// Number of half-wavelength-spaced antennas on the aperture, `2l/λ`.
    pub fn half_wavelength_count(&self) -> f64 {
        2.0 * self.aperture / self.wavelength
    }
}

impl Default for SystemConfig {
    /// 2 m apertures at 7.5 GHz (λ = 4 cm), 10 m apart, `P = 1`, `n₀ = 2`.
    fn default() -> Self {
        SystemConfig {
            wavelength: 0.04,
            aperture: 2.0,
            distance: 10.0,
            power: 1.0,
            noise: 2.0,
        }
    }
}

/// Inner quadrature size for `∫ G G* ds`: at least 20 samples per wavelength
/// along the source and never fewer than 512.
pub fn default_inner_points(cfg: &SystemConfig) -> usize {
    let per_wavelength = (INNER_SAMPLES_PER_WAVELENGTH * cfg.aperture / cfg.wavelength).ceil() as usize;
    per_wavelength.max(MIN_INNER_POINTS)
}

/// Scalar Green's function `G(r, s)` between a source point at `s` and an
/// observer at `r` on the parallel line.
pub fn green_scalar(r: f64, s: f64, cfg: &SystemConfig) -> Complex64 {
    green_at_offset(r - s, cfg)
}

/// `G` as a function of the axial offset `x = r - s`.
pub fn green_at_offset(x: f64, cfg: &SystemConfig) -> Complex64 {
    let d = cfg.distance;
    let lambda = cfg.wavelength;
    let d2 = d * d;
    let radius2 = x * x + d2;
    let radius = radius2.sqrt();
    let k_r = cfg.wavenumber() * radius;

    let direction = (d2 - 2.0 * x * x) / radius2;
    let bracket = Complex64::new(d2 / radius2 - direction / (k_r * k_r), direction / k_r);

    let (sin, cos) = k_r.sin_cos();
    let amplitude = FREE_SPACE_IMPEDANCE / (2.0 * lambda * radius);
    // j · e^{j k R} = -sin + j cos
    let prefactor = Complex64::new(-amplitude * sin, amplitude * cos);
    prefactor * bracket
}

/// `|G|²` at axial offset `x`.
pub fn green_power_at_offset(x: f64, cfg: &SystemConfig) -> f64 {
    green_at_offset(x, cfg).norm_sqr()
}

/// Green's function samples `G(r_i, s_k)` for a set of observers against a
/// fixed source grid, stored as split real/imaginary rows.
#[derive(Debug, Clone)]
pub(crate) struct ChannelRows {
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ChannelRows {
    pub(crate) fn sample(observers: &[f64], sources: &[f64], cfg: &SystemConfig) -> Self {
        let cols = sources.len();
        let mut re = vec![0.0; observers.len() * cols];
        let mut im = vec![0.0; observers.len() * cols];
        for (i, &r) in observers.iter().enumerate() {
            let row = i * cols;
            for (k, &s) in sources.iter().enumerate() {
                let g = green_scalar(r, s, cfg);
                re[row + k] = g.re;
                im[row + k] = g.im;
            }
        }
        ChannelRows { cols, re, im }
    }

    pub(crate) fn rows(&self) -> usize {
        self.re.len().checked_div(self.cols).unwrap_or(0)
    }

    fn row(&self, i: usize) -> (&[f64], &[f64]) {
        let span = i * self.cols..(i + 1) * self.cols;
        (&self.re[span.clone()], &self.im[span])
    }

    /// `Σ_k G(r_i, s_k) · conj(G(r_j, s_k))`, summed in source order.
    pub(crate) fn correlate(&self, i: usize, j: usize) -> Complex64 {
        let (a_re, a_im) = self.row(i);
        let (b_re, b_im) = self.row(j);
        dot_conj(a_re, a_im, b_re, b_im)
    }

    pub(crate) fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i` as complex samples.
    pub(crate) fn complex_row(&self, i: usize) -> Vec<Complex64> {
        let (re, im) = self.row(i);
        re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }

    /// `Σ_k |G(r_i, s_k)|²`.
    pub(crate) fn power(&self, i: usize) -> f64 {
        let (a_re, a_im) = self.row(i);
        dot_conj(a_re, a_im, a_re, a_im).re
    }
}

/// Fixed-order four-lane accumulation of `Σ a_k · conj(b_k)`.
fn dot_conj(a_re: &[f64], a_im: &[f64], b_re: &[f64], b_im: &[f64]) -> Complex64 {
    let n = a_re.len();
    let mut acc_re = [0.0f64; 4];
    let mut acc_im = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        for lane in 0..4 {
            let k = 4 * c + lane;
            acc_re[lane] += a_re[k] * b_re[k] + a_im[k] * b_im[k];
            acc_im[lane] += a_im[k] * b_re[k] - a_re[k] * b_im[k];
        }
    }
    for k in 4 * chunks..n {
        acc_re[0] += a_re[k] * b_re[k] + a_im[k] * b_im[k];
        acc_im[0] += a_im[k] * b_re[k] - a_re[k] * b_im[k];
    }
    Complex64::new(
        (acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]),
        (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3]),
    )
}

fn source_grid(cfg: &SystemConfig, inner_points: usize) -> Result<QuadratureGrid> {
    if inner_points < 2 {
        return Err(Error::TooFewPoints {
            min: 2,
            got: inner_points,
        });
    }
    midpoint_grid(cfg.aperture, inner_points)
}

/// Electric-field autocorrelation `K_E(r, r') = P ∫₀ˡ G(r, s) G*(r', s) ds`,
/// with the source integral taken by the midpoint rule on `inner_points`
/// samples.
///
/// The pair is always evaluated with the smaller coordinate first, so
/// `kernel_value(a, b) == kernel_value(b, a).conj()` holds bit for bit and
/// the diagonal is exactly real.
pub fn kernel_value(r: f64, r_prime: f64, cfg: &SystemConfig, inner_points: usize) -> Result<Complex64> {
    let src = source_grid(cfg, inner_points)?;
    let scale = cfg.power * src.weight();
    if r == r_prime {
        let rows = ChannelRows::sample(&[r], src.points(), cfg);
        return Ok(Complex64::new(scale * rows.power(0), 0.0));
    }
    let (lo, hi, mirrored) = if r < r_prime {
        (r, r_prime, false)
    } else {
        (r_prime, r, true)
    };
    let rows = ChannelRows::sample(&[lo, hi], src.points(), cfg);
    let v = rows.correlate(0, 1) * scale;
    Ok(if mirrored { v.conj() } else { v })
}

/// Diagonal profile `K_E(r, r)` per unit source power, sampled at `points`.
pub(crate) fn diagonal_profile(points: &[f64], cfg: &SystemConfig, inner_points: usize) -> Result<Vec<f64>> {
    let src = source_grid(cfg, inner_points)?;
    let rows = ChannelRows::sample(points, src.points(), cfg);
    let w = src.weight();
    Ok((0..points.len()).map(|i| w * rows.power(i)).collect())
}

/// Operator trace `tr(T_E) = ∫₀ˡ K_E(r, r) dr`, midpoint rule on
/// `outer_points` receiver samples and `inner_points` source samples.
pub fn operator_trace(cfg: &SystemConfig, outer_points: usize, inner_points: usize) -> Result<f64> {
    if outer_points < 2 {
        return Err(Error::TooFewPoints {
            min: 2,
            got: outer_points,
        });
    }
    let outer = midpoint_grid(cfg.aperture, outer_points)?;
    let src = source_grid(cfg, inner_points)?;
    let rows = ChannelRows::sample(outer.points(), src.points(), cfg);
    let scale = cfg.power * src.weight();
    let sum: f64 = (0..outer.len()).map(|i| scale * rows.power(i)).sum();
    Ok(sum * outer.weight())
}

/// Richardson-extrapolated midpoint integral `(4 Q_{2n} − Q_n) / 3` of a
/// smooth function on `[0, l]`.
pub(crate) fn richardson_midpoint(l: f64, n: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<f64> {
    let coarse = midpoint_grid(l, n)?;
    let fine = midpoint_grid(l, 2 * n)?;
    let q_coarse: f64 = f(coarse.points()).iter().sum::<f64>() * coarse.weight();
    let q_fine: f64 = f(fine.points()).iter().sum::<f64>() * fine.weight();
    Ok((4.0 * q_fine - q_coarse) / 3.0)
}

/// `∫₀ˡ K_E(r, r) dr / P` with the same inner rule as the kernel matrix and
/// an extrapolated outer rule, accurate well beyond the receiver grids it is
/// compared against.
pub(crate) fn unit_trace_reference(cfg: &SystemConfig, inner_points: usize, outer_points: usize) -> Result<f64> {
    richardson_midpoint(cfg.aperture, outer_points, |pts| {
        diagonal_profile(pts, cfg, inner_points).unwrap_or_default()
    })
}

/// `∫₀ˡ∫₀ˡ |G(r, s)|² dr ds`, reduced to `2 ∫₀ˡ (l − x) |G(x)|² dx` since
/// `|G|²` is even in the offset.
pub(crate) fn unit_trace_exact(cfg: &SystemConfig, points: usize) -> Result<f64> {
    let l = cfg.aperture;
    let half = richardson_midpoint(l, points, |xs| {
        xs.iter().map(|&x| (l - x) * green_power_at_offset(x, cfg)).collect()
    })?;
    Ok(2.0 * half)
}

/// Maximum absolute central second difference of `f` on a uniform grid of
/// `intervals + 1` nodes spanning `[a, b]` (interior nodes only).
pub(crate) fn max_second_difference(a: f64, b: f64, intervals: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let h = (b - a) / intervals as f64;
    let nodes: Vec<f64> = (0..=intervals).map(|i| a + h * i as f64).collect();
    let values = f(&nodes);
    values
        .windows(3)
        .map(|w| ((w[2] - 2.0 * w[1] + w[0]) / (h * h)).abs())
        .fold(0.0, f64::max)
}
