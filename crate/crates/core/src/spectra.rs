//! Quadrature grids, sampled kernel matrices and their spectra.

use faer::{Mat, Side};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::physics::{ChannelRows, SystemConfig};

/// Default relative floor below which negative eigenvalues are treated as
/// quadrature noise and clamped to zero.
pub const DEFAULT_CLAMP_REL: f64 = 1e-12;

/// Composite midpoint grid on `[0, l]`: `r_i = (i − ½) l/m`, common weight `l/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    points: Vec<f64>,
    weight: f64,
    length: f64,
}

impl QuadratureGrid {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn midpoint_grid(l: f64, m: usize) -> Result<QuadratureGrid> {
    if m == 0 {
        return Err(Error::EmptyGrid);
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidArgument(format!("grid length must be positive, got {l}")));
    }
    let mf = m as f64;
    let points = (0..m).map(|i| (i as f64 + 0.5) * l / mf).collect();
    Ok(QuadratureGrid {
        points,
        weight: l / mf,
        length: l,
    })
}

/// Dense Hermitian matrix in row-major order.
///
/// Matrices assembled as `c · A Aᴴ` keep the factor `A`, and their spectrum
/// is taken as `c · σ(A)²`, which cannot go negative in rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianKernelMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    factor: Option<GramFactor>,
}

/// Row-major `dim × cols` factor and its scale.
#[derive(Debug, Clone, PartialEq)]
struct GramFactor {
    cols: usize,
    rows: Vec<Vec<Complex64>>,
    scale: f64,
}

impl HermitianKernelMatrix {
    /// Wraps row-major entries, checking exact Hermitian symmetry and a real
    /// diagonal.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = HermitianKernelMatrix {
            dim,
            entries,
            factor: None,
        };
        m.check_hermitian()?;
        Ok(m)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self::new(dim, entries)
    }

    /// `c · I`.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(c, 0.0);
        }
        HermitianKernelMatrix {
            dim,
            entries,
            factor: None,
        }
    }

    /// Sampled autocorrelation `K_E(r_i, r_j)` with a continuous source
    /// integrated on `inner_points` midpoint samples.
    ///
    /// Entries match [`crate::physics::kernel_value`] bit for bit, so the
    /// matrix of a permuted point set is exactly the permuted matrix.
    pub fn sampled_kernel(points: &[f64], cfg: &SystemConfig, inner_points: usize) -> Result<Self> {
        if inner_points < 2 {
            return Err(Error::TooFewPoints {
                min: 2,
                got: inner_points,
            });
        }
        let src = midpoint_grid(cfg.aperture(), inner_points)?;
        let rows = ChannelRows::sample(points, src.points(), cfg);
        Ok(Self::gram(points, &rows, cfg.power() * src.weight()))
    }

    /// Received-signal correlation `P Σ_k G(r_i, s_k) G*(r_j, s_k)` of a
    /// discrete array transmitting independent equal-power streams.
    ///
    /// The transmit positions are summed in ascending order regardless of the
    /// order given.
    pub fn discrete_transmit(rx_points: &[f64], tx_points: &[f64], cfg: &SystemConfig) -> Self {
        let mut tx = tx_points.to_vec();
        tx.sort_by(f64::total_cmp);
        let rows = ChannelRows::sample(rx_points, &tx, cfg);
        Self::gram(rx_points, &rows, cfg.power())
    }

    fn gram(points: &[f64], rows: &ChannelRows, scale: f64) -> Self {
        let dim = rows.rows();
        let upper: Vec<Vec<Complex64>> = (0..dim)
            .into_par_iter()
            .map(|i| {
                (i..dim)
                    .map(|j| {
                        if i == j {
                            Complex64::new(scale * rows.power(i), 0.0)
                        } else if points[i] < points[j] {
                            rows.correlate(i, j) * scale
                        } else if points[i] > points[j] {
                            (rows.correlate(j, i) * scale).conj()
                        } else {
                            // coincident antennas see identical rows
                            Complex64::new(scale * rows.power(i), 0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, row) in upper.into_iter().enumerate() {
            for (offset, v) in row.into_iter().enumerate() {
                let j = i + offset;
                entries[i * dim + j] = v;
                entries[j * dim + i] = v.conj();
            }
        }
        let factor = GramFactor {
            cols: rows.cols(),
            rows: (0..dim).map(|i| rows.complex_row(i)).collect(),
            scale,
        };
        HermitianKernelMatrix {
            dim,
            entries,
            factor: Some(factor),
        }
    }

    fn check_hermitian(&self) -> Result<()> {
        for i in 0..self.dim {
            if self.get(i, i).im != 0.0 {
                return Err(Error::NotHermitian { row: i, col: i });
            }
            for j in i + 1..self.dim {
                if self.get(i, j) != self.get(j, i).conj() {
                    return Err(Error::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// Symmetric permutation `P K Pᵀ`, where row `i` of the result is row
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.dim {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.dim];
        for &p in perm {
            if p >= self.dim || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let mut out = Self::from_fn(self.dim, |i, j| self.get(perm[i], perm[j]))?;
        out.factor = self.factor.as_ref().map(|f| GramFactor {
            cols: f.cols,
            rows: perm.iter().map(|&p| f.rows[p].clone()).collect(),
            scale: f.scale,
        });
        Ok(out)
    }

    /// Whether the spectrum comes from a stored Gram factor.
    pub fn is_factored(&self) -> bool {
        self.factor.is_some()
    }

    fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

/// Eigenvalues of a sampled kernel with clamping diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Nonincreasing, all nonnegative.
    pub eigenvalues: Vec<f64>,
    /// Number of slightly negative eigenvalues raised to zero.
    pub clamped_count: usize,
    /// Absolute floor `clamp_rel · λ_max` that was applied.
    pub clamp_floor: f64,
}

impl SpectralResult {
    /// Builds a result from raw (possibly slightly negative) eigenvalues.
    pub fn from_raw(mut raw: Vec<f64>, clamp_rel: f64) -> Result<Self> {
        if !(clamp_rel.is_finite() && clamp_rel >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "clamp tolerance must be nonnegative, got {clamp_rel}"
            )));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::EigenSolver);
        }
        raw.sort_by(|a, b| b.total_cmp(a));
        let max = raw.first().copied().unwrap_or(0.0).max(0.0);
        let floor = clamp_rel * max;
        let mut clamped_count = 0;
        for v in raw.iter_mut() {
            if *v < 0.0 {
                if *v < -floor {
                    return Err(Error::NotPositiveSemidefinite { value: *v, floor });
                }
                *v = 0.0;
                clamped_count += 1;
            } else if *v == 0.0 {
                *v = 0.0; // normalizes -0.0
            }
        }
        Ok(SpectralResult {
            eigenvalues: raw,
            clamped_count,
            clamp_floor: floor,
        })
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// `Σ_k log(1 + scale · λ_k)` in nats.
    pub fn logdet_one_plus_scaled(&self, scale: f64) -> f64 {
        self.eigenvalues.iter().map(|&v| (scale * v).ln_1p()).sum()
    }

    /// Number of eigenvalues at or above `threshold_rel · λ_max`.
    pub fn count_above(&self, threshold_rel: f64) -> usize {
        let max = self.max();
        if max <= 0.0 {
            return 0;
        }
        self.eigenvalues.iter().filter(|&&v| v >= threshold_rel * max).count()
    }
}

pub fn hermitian_eigenvalues(k: &HermitianKernelMatrix, clamp_rel: f64) -> Result<SpectralResult> {
    k.check_hermitian()?;
    if k.dim == 0 {
        return SpectralResult::from_raw(Vec::new(), clamp_rel);
    }
    if let Some(f) = &k.factor {
        return factored_eigenvalues(f, k.dim, clamp_rel);
    }
    dense_hermitian_eigenvalues(k, clamp_rel)
}

/// Eigenvalues from the dense Hermitian solver, ignoring any stored factor.
pub fn dense_hermitian_eigenvalues(k: &HermitianKernelMatrix, clamp_rel: f64) -> Result<SpectralResult> {
    k.check_hermitian()?;
    if k.dim == 0 {
        return SpectralResult::from_raw(Vec::new(), clamp_rel);
    }
    let raw = k
        .to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenSolver)?;
    SpectralResult::from_raw(raw, clamp_rel)
}

fn factored_eigenvalues(f: &GramFactor, dim: usize, clamp_rel: f64) -> Result<SpectralResult> {
    let mut raw = vec![0.0; dim];
    if f.cols > 0 && dim > 0 {
        let a = Mat::from_fn(dim, f.cols, |i, k| f.rows[i][k]);
        let sv = a.singular_values().map_err(|_| Error::EigenSolver)?;
        for (slot, s) in raw.iter_mut().zip(sv) {
            *slot = f.scale * s * s;
        }
    }
    SpectralResult::from_raw(raw, clamp_rel)
}

/// `log det(I + scale · K)` via the clamped eigenvalue sum.
pub fn logdet_one_plus_scaled(k: &HermitianKernelMatrix, scale: f64) -> Result<f64> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "scale must be nonnegative, got {scale}"
        )));
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(hermitian_eigenvalues(k, DEFAULT_CLAMP_REL)?.logdet_one_plus_scaled(scale))
}
