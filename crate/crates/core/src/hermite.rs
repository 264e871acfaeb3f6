//! Hermite-Gauss eigenbasis of the phase-space rotation generator and the
//! fractional-Fourier evolutions built on it.
//!
//! `R = (w^2 + t^2)/2` has eigenmodes `phi_k` with eigenvalue `k + 1/2`, so
//! `exp(-i theta R)` multiplies coefficient `k` by `exp(-i theta (k + 1/2))`.
//! The collective generators `R± = (w±^2 + t±^2)/4` have the same spectrum in
//! a basis widened by `sqrt(2)`, consistent with the commutator
//! `[w±, t±] = 2i`; that scale is what [`PM_SCALE`] encodes.
//!
//! Decomposition uses trapezoidal quadrature against precomputed mode
//! samples. The construction refuses grids that cannot hold the requested
//! number of modes (extent or resolution), which keeps the sampled Gram
//! matrix at identity to well below 1e-8.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::operators::{translate_axis, EvolveOptions, PmAxis};
use crate::states::{Amplitude1D, Jsa2D, SeparablePmState};

/// Mode width for the ± axes.
pub const PM_SCALE: f64 = std::f64::consts::SQRT_2;

/// Precomputed Hermite-Gauss modes on a grid.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    grid: FrequencyGrid,
    n_modes: usize,
    center: f64,
    scale: f64,
    /// modes[(k, j)] = phi_k(grid.point(j)), real-valued
    modes: Array2<f64>,
}

impl HermiteBasis {
    /// Build `n_modes` modes of width `scale` centered at `center`.
    ///
    /// The grid must extend past the classical turning point of the highest
    /// mode (plus a tail margin) on both sides, and must sample the fastest
    /// mode oscillation with at least ~4 points per period.
    pub fn new(grid: &FrequencyGrid, n_modes: usize, center: f64, scale: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidInput("need at least one mode".into()));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
        }
        let turning = (2.0 * n_modes as f64 + 1.0).sqrt();
        let needed = scale * (turning + 8.0 + 0.15 * turning);
        let reach = (center - grid.min()).min(grid.max() - center);
        if reach < needed {
            return Err(Error::InvalidInput(format!(
                "grid reach {reach:.2} from center cannot hold {n_modes} modes of scale {scale:.3} (needs {needed:.2})"
            )));
        }
        let max_h = scale * std::f64::consts::PI / (2.0 * turning);
        if grid.spacing() > max_h {
            return Err(Error::InvalidInput(format!(
                "grid spacing {:.4} too coarse for {n_modes} modes (needs <= {max_h:.4})",
                grid.spacing()
            )));
        }

        let n = grid.len();
        let mut modes = Array2::zeros((n_modes, n));
        let inv_sqrt_scale = 1.0 / scale.sqrt();
        let pi_quarter = std::f64::consts::PI.powf(-0.25);
        for j in 0..n {
            let x = (grid.point(j) - center) / scale;
            let h0 = pi_quarter * (-x * x / 2.0).exp() * inv_sqrt_scale;
            modes[(0, j)] = h0;
            if n_modes > 1 {
                modes[(1, j)] = x * std::f64::consts::SQRT_2 * h0;
            }
            for k in 2..n_modes {
                let kf = k as f64;
                modes[(k, j)] = x * (2.0 / kf).sqrt() * modes[(k - 1, j)]
                    - ((kf - 1.0) / kf).sqrt() * modes[(k - 2, j)];
            }
        }
        Ok(Self { grid: *grid, n_modes, center, scale, modes })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Sample of mode `k` at grid index `j`.
    pub fn mode(&self, k: usize, j: usize) -> f64 {
        self.modes[(k, j)]
    }

    /// Largest deviation of the sampled Gram matrix from identity.
    pub fn gram_max_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..self.n_modes {
            for b in a..self.n_modes {
                let mut dot = 0.0;
                for j in 0..self.grid.len() {
                    dot += self.grid.weight(j) * self.modes[(a, j)] * self.modes[(b, j)];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Quadrature coefficients `c_k = <phi_k | v>`.
    pub fn decompose(&self, values: &[Complex64]) -> Vec<Complex64> {
        crate::par::map_indices(self.n_modes, |k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.grid.len() {
                acc += self.grid.weight(j) * self.modes[(k, j)] * values[j];
            }
            acc
        })
    }

    pub fn reconstruct(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        crate::par::map_indices(self.grid.len(), |j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, c) in coeffs.iter().enumerate() {
                acc += c * self.modes[(k, j)];
            }
            acc
        })
    }

    /// Norm of the state component outside the basis.
    pub fn tail_norm(&self, values: &[Complex64], coeffs: &[Complex64]) -> f64 {
        let total: f64 = (0..self.grid.len())
            .map(|j| self.grid.weight(j) * values[j].norm_sqr())
            .sum();
        let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        (total - captured).max(0.0).sqrt()
    }
}

/// `exp(-i theta R)` of a single-axis amplitude in the given basis.
pub fn evolve_rotation_1d(
    amp: &Amplitude1D,
    theta: f64,
    basis: &HermiteBasis,
    tail_tolerance: f64,
) -> Result<Amplitude1D> {
    amp.grid().require_same(basis.grid(), "evolve_rotation_1d")?;
    let coeffs = basis.decompose(amp.values());
    let tail = basis.tail_norm(amp.values(), &coeffs);
    if tail > tail_tolerance {
        return Err(Error::BasisTruncation {
            tail,
            tolerance: tail_tolerance,
            modes: basis.n_modes(),
        });
    }
    let rotated: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::from_polar(1.0, -theta * (k as f64 + 0.5)))
        .collect();
    Amplitude1D::from_values(*amp.grid(), basis.reconstruct(&rotated))
}

fn basis_for(grid: &FrequencyGrid, scale: f64, opts: &EvolveOptions) -> Result<HermiteBasis> {
    HermiteBasis::new(grid, opts.hermite_modes, 0.0, scale)
}

/// Collective rotation `exp(-i theta R±)` on a separable state: only the
/// matching ± amplitude evolves, in the sqrt(2)-widened basis.
pub fn evolve_rotation_pm(
    state: &SeparablePmState,
    axis: PmAxis,
    theta: f64,
    opts: &EvolveOptions,
) -> Result<SeparablePmState> {
    match axis {
        PmAxis::Plus => {
            let basis = basis_for(state.f_plus().grid(), PM_SCALE, opts)?;
            let f = evolve_rotation_1d(state.f_plus(), theta, &basis, opts.tail_tolerance)?;
            Ok(SeparablePmState::with_amplitudes(f, state.g_minus().clone(), state.parity()))
        }
        PmAxis::Minus => {
            let basis = basis_for(state.g_minus().grid(), PM_SCALE, opts)?;
            let g = evolve_rotation_1d(state.g_minus(), theta, &basis, opts.tail_tolerance)?;
            // R- is even in (w-, t-), so it commutes with photon exchange and
            // parity survives the evolution.
            Ok(SeparablePmState::with_amplitudes(state.f_plus().clone(), g, state.parity()))
        }
    }
}

/// `exp(-i theta (c1 R1 + c2 R2))` on a joint amplitude, applied axis by axis
/// (the two factors commute).
pub fn evolve_rotation_full(
    state: &Jsa2D,
    c1: i8,
    c2: i8,
    theta: f64,
    opts: &EvolveOptions,
) -> Result<Jsa2D> {
    let mut values = state.values().clone();

    if c1 != 0 {
        let basis = basis_for(state.grid1(), 1.0, opts)?;
        let angle = f64::from(c1) * theta;
        let n2 = state.grid2().len();
        let cols = crate::par::map_indices(n2, |j| {
            let col: Vec<Complex64> = values.column(j).to_vec();
            let amp = Amplitude1D::from_values(*state.grid1(), col).expect("len");
            evolve_rotation_1d(&amp, angle, &basis, opts.tail_tolerance)
                .map(|a| a.values().to_vec())
        });
        let mut out = Array2::zeros(values.dim());
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col?.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        values = out;
    }

    if c2 != 0 {
        let basis = basis_for(state.grid2(), 1.0, opts)?;
        let angle = f64::from(c2) * theta;
        let n1 = state.grid1().len();
        let rows = crate::par::map_indices(n1, |i| {
            let row: Vec<Complex64> = values.row(i).to_vec();
            let amp = Amplitude1D::from_values(*state.grid2(), row).expect("len");
            evolve_rotation_1d(&amp, angle, &basis, opts.tail_tolerance)
                .map(|a| a.values().to_vec())
        });
        let mut out = Array2::zeros(values.dim());
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row?.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        values = out;
    }

    Jsa2D::from_values(*state.grid1(), *state.grid2(), values)
}

/// Rotation about an arbitrary phase-space point `(tau0, phi0)`:
/// translate the point to the origin, rotate, translate back.
///
/// The result may differ from `exp(-i theta R_c)` by a global phase (the
/// translations are composed in a fixed order); all norms, variances, and
/// overlap magnitudes are unaffected.
pub fn evolve_rotation_about(
    amp: &Amplitude1D,
    theta: f64,
    tau0: f64,
    phi0: f64,
    basis: &HermiteBasis,
    tail_tolerance: f64,
) -> Result<Amplitude1D> {
    // map displacement by (-tau0, -phi0): generator tau0*w + phi0*t at kappa=1
    let to_origin = translate_axis(amp, -tau0, -phi0, 1.0, 1.0)?;
    let rotated = evolve_rotation_1d(&to_origin, theta, basis, tail_tolerance)?;
    translate_axis(&rotated, tau0, phi0, 1.0, 1.0)
}

/// Single-mode rotation generator image `R psi = (w^2 psi + t^2 psi)/2`,
/// for variance computations on one-photon states.
pub fn rotation_image_1d(amp: &Amplitude1D) -> Result<Amplitude1D> {
    let om2 = crate::operators::apply_omega(&crate::operators::apply_omega(amp));
    let t2 = crate::operators::apply_time(&crate::operators::apply_time(amp)?)?;
    let values = om2
        .values()
        .iter()
        .zip(t2.values())
        .map(|(a, b)| (a + b) * 0.5)
        .collect();
    Amplitude1D::from_values(*amp.grid(), values)
}

/// Variance of the single-mode rotation generator on a one-photon state.
pub fn rotation_variance_1d(amp: &Amplitude1D) -> Result<f64> {
    let img = rotation_image_1d(amp)?;
    let mean = crate::states::inner_product(amp, &img)?;
    let sq = crate::states::inner_product(&img, &img)?;
    let v = sq.re - mean.re * mean.re;
    if mean.im.abs() > 1e-8 * mean.norm().max(1.0) {
        return Err(Error::NonHermitianOverlap { imag: mean.im });
    }
    Ok(v.max(0.0))
}

/// Variance of the rotation generator about `(tau0, phi0)`:
/// `((w - phi0)^2 + (t - tau0)^2)/2`.
pub fn rotation_variance_about_1d(amp: &Amplitude1D, tau0: f64, phi0: f64) -> Result<f64> {
    let om = crate::operators::apply_omega(amp);
    let t = crate::operators::apply_time(amp)?;
    let om2 = crate::operators::apply_omega(&om);
    let t2 = crate::operators::apply_time(&t)?;
    let img: Vec<Complex64> = (0..amp.grid().len())
        .map(|k| {
            0.5 * (om2.values()[k] - 2.0 * phi0 * om.values()[k]
                + phi0 * phi0 * amp.values()[k]
                + t2.values()[k]
                - 2.0 * tau0 * t.values()[k]
                + tau0 * tau0 * amp.values()[k])
        })
        .collect();
    let img = Amplitude1D::from_values(*amp.grid(), img)?;
    let mean = crate::states::inner_product(amp, &img)?;
    let sq = crate::states::inner_product(&img, &img)?;
    Ok((sq.re - mean.re * mean.re).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_gaussian, GaussianSpec};

    fn basis(n_modes: usize, scale: f64) -> (FrequencyGrid, HermiteBasis) {
        let turning = (2.0 * n_modes as f64 + 1.0).sqrt();
        let half = scale * (turning + 10.0 + 0.2 * turning);
        let grid = FrequencyGrid::centered(0.0, half, 2048).unwrap();
        let b = HermiteBasis::new(&grid, n_modes, 0.0, scale).unwrap();
        (grid, b)
    }

    #[test]
    fn gram_matrix_is_identity() {
        let (_, b) = basis(96, 1.0);
        assert!(b.gram_max_deviation() < 1e-10);
        let (_, b) = basis(96, PM_SCALE);
        assert!(b.gram_max_deviation() < 1e-10);
    }

    #[test]
    fn mode_picks_up_eigenphase() {
        let (grid, b) = basis(32, 1.0);
        let k = 5;
        let values: Vec<Complex64> = (0..grid.len())
            .map(|j| Complex64::new(b.mode(k, j), 0.0))
            .collect();
        let amp = Amplitude1D::from_values(grid, values).unwrap();
        let theta = 0.83;
        let out = evolve_rotation_1d(&amp, theta, &b, 1e-9).unwrap();
        let expect = Complex64::from_polar(1.0, -theta * (k as f64 + 0.5));
        for (o, i) in out.values().iter().zip(amp.values()) {
            assert!((o - expect * i).norm() < 1e-9);
        }
    }

    #[test]
    fn full_period_returns_minus_state() {
        let (grid, b) = basis(64, 1.0);
        let amp = make_gaussian(&GaussianSpec::new(1.5, 0.8).unwrap(), &grid).unwrap();
        let out =
            evolve_rotation_1d(&amp, 2.0 * std::f64::consts::PI, &b, 1e-9).unwrap();
        for (o, i) in out.values().iter().zip(amp.values()) {
            assert!((o + i).norm() < 1e-9);
        }
    }

    #[test]
    fn symmetric_gaussian_is_rotation_invariant() {
        // sigma = 1/sqrt(2) is the rotationally symmetric width for [w,t]=i
        let (grid, b) = basis(64, 1.0);
        let amp = make_gaussian(
            &GaussianSpec::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap(),
            &grid,
        )
        .unwrap();
        let out = evolve_rotation_1d(&amp, 0.9, &b, 1e-10).unwrap();
        let ov = crate::states::inner_product(&amp, &out).unwrap();
        assert!((ov.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_is_detected() {
        let (grid, b) = basis(8, 1.0);
        let amp = make_gaussian(&GaussianSpec::new(6.0, 0.5).unwrap(), &grid).unwrap();
        assert!(matches!(
            evolve_rotation_1d(&amp, 0.1, &b, 1e-10),
            Err(Error::BasisTruncation { .. })
        ));
    }

    #[test]
    fn too_small_grid_is_rejected() {
        let grid = FrequencyGrid::centered(0.0, 8.0, 512).unwrap();
        assert!(HermiteBasis::new(&grid, 128, 0.0, 1.0).is_err());
    }
}
