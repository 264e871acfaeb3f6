//! Chronocyclic Wigner maps of one-photon amplitudes (and of one photon of a
//! pair, via the reduced density operator).
//!
//! Convention: `W(tau, phi) = integral dw e^{2 i w tau} S(phi + w) S*(phi - w)`,
//! which puts the peak of a pure Gaussian at exactly 1. Under it the
//! convention constants are fixed once and pinned by regression tests:
//!
//! * marginal: `integral W dtau = pi |S(phi)|^2` ([`MARGINAL_CONSTANT`]);
//! * overlap:  `(2/pi) integral W_a W_b dtau dphi = |<a|b>|^2`
//!   ([`OVERLAP_CONSTANT`]), so pure states have purity 1.
//!
//! The four-dimensional biphoton map is never materialized. Separable states
//! factor into plus/minus maps (`tau± = tau1 ± tau2`, `phi± = (phi1 ± phi2)/2`);
//! dense states project onto one photon's plane through the reduced density
//! operator.

use std::io::{Read, Write};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::FrequencyGrid;
use crate::operators::{translate_axis, Axis};
use crate::states::{Amplitude1D, Jsa2D, SeparablePmState};

/// `integral W(tau, phi) dtau = MARGINAL_CONSTANT * |S(phi)|^2`.
pub const MARGINAL_CONSTANT: f64 = std::f64::consts::PI;

/// `OVERLAP_CONSTANT * integral W_a W_b = |<a|b>|^2` per photon plane.
pub const OVERLAP_CONSTANT: f64 = 2.0 / std::f64::consts::PI;

/// Uniform rectangular phase-space sampling.
///
/// The `phi` axis must lie on the source state's frequency grid (the Wigner
/// integrand is only exactly evaluable there); the `tau` axis is free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid {
    pub tau: FrequencyGrid,
    pub phi: FrequencyGrid,
}

impl PhaseSpaceGrid {
    pub fn new(tau: FrequencyGrid, phi: FrequencyGrid) -> Self {
        Self { tau, phi }
    }

    /// Phase-space window with the `phi` axis taken from the subrange of
    /// `source` covering `[phi_lo, phi_hi]`, guaranteeing alignment.
    pub fn aligned(
        source: &FrequencyGrid,
        phi_lo: f64,
        phi_hi: f64,
        tau: FrequencyGrid,
    ) -> Result<Self> {
        source.require_covers(phi_lo, phi_hi, "phase-space phi window")?;
        let h = source.spacing();
        let k_lo = ((phi_lo - source.min()) / h).ceil() as usize;
        let k_hi = ((phi_hi - source.min()) / h).floor() as usize;
        if k_hi < k_lo + crate::grid::MIN_POINTS - 1 {
            return Err(Error::InvalidInput("phi window holds too few grid points".into()));
        }
        let phi = FrequencyGrid::new(k_hi - k_lo + 1, source.point(k_lo), source.point(k_hi))?;
        Ok(Self { tau, phi })
    }
}

/// Real-valued Wigner map sampled on a [`PhaseSpaceGrid`]; `values[(i, j)]`
/// is the value at `(tau_i, phi_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    grid: PhaseSpaceGrid,
    values: Array2<f64>,
}

/// Admissible imaginary residue (absolute) when enforcing realness.
const IMAG_RESIDUE: f64 = 1e-10;

impl WignerMap {
    fn from_complex(grid: PhaseSpaceGrid, raw: Array2<Complex64>) -> Result<Self> {
        let mut worst_imag = 0.0_f64;
        let mut peak = 0.0_f64;
        for v in raw.iter() {
            worst_imag = worst_imag.max(v.im.abs());
            peak = peak.max(v.re.abs());
        }
        if worst_imag > IMAG_RESIDUE {
            return Err(Error::NonHermitianOverlap { imag: worst_imag });
        }
        if peak > 1.0 + 1e-8 {
            return Err(Error::InvalidInput(format!(
                "Wigner magnitude {peak:.6} exceeds the unit-peak convention"
            )));
        }
        Ok(Self { grid, values: raw.mapv(|v| v.re) })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn value(&self, i_tau: usize, j_phi: usize) -> f64 {
        self.values[(i_tau, j_phi)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `integral W dtau` for each phi sample.
    pub fn tau_marginal(&self) -> Vec<f64> {
        let tau = &self.grid.tau;
        (0..self.grid.phi.len())
            .map(|j| (0..tau.len()).map(|i| tau.weight(i) * self.values[(i, j)]).sum())
            .collect()
    }

    /// 2-D trapezoidal integral of `W * other`.
    pub fn overlap_integral(&self, other: &WignerMap) -> Result<f64> {
        self.grid.tau.require_same(&other.grid.tau, "wigner overlap tau")?;
        self.grid.phi.require_same(&other.grid.phi, "wigner overlap phi")?;
        let mut acc = 0.0;
        for i in 0..self.grid.tau.len() {
            let wi = self.grid.tau.weight(i);
            for j in 0..self.grid.phi.len() {
                acc += wi * self.grid.phi.weight(j) * self.values[(i, j)] * other.values[(i, j)];
            }
        }
        Ok(acc)
    }

    /// Bilinear interpolation at an arbitrary phase-space point; `None`
    /// outside the sampled window.
    pub fn sample_bilinear(&self, tau: f64, phi: f64) -> Option<f64> {
        let (gt, gp) = (&self.grid.tau, &self.grid.phi);
        let x = (tau - gt.min()) / gt.spacing();
        let y = (phi - gp.min()) / gp.spacing();
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let (i, j) = (x.floor() as usize, y.floor() as usize);
        if i + 1 >= gt.len() || j + 1 >= gp.len() {
            return None;
        }
        let (fx, fy) = (x - i as f64, y - j as f64);
        Some(
            self.values[(i, j)] * (1.0 - fx) * (1.0 - fy)
                + self.values[(i + 1, j)] * fx * (1.0 - fy)
                + self.values[(i, j + 1)] * (1.0 - fx) * fy
                + self.values[(i + 1, j + 1)] * fx * fy,
        )
    }

    /// Write `tau,phi,value` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "tau,phi,value")?;
        for i in 0..self.grid.tau.len() {
            for j in 0..self.grid.phi.len() {
                writeln!(
                    out,
                    "{},{},{}",
                    self.grid.tau.point(i),
                    self.grid.phi.point(j),
                    self.values[(i, j)]
                )?;
            }
        }
        Ok(())
    }

    /// Dense binary layout: magic `TFQMWIG1`, then little-endian
    /// `u64 n_tau, u64 n_phi, f64 tau_min, tau_max, phi_min, phi_max`,
    /// then `n_tau * n_phi` little-endian f64 values in tau-major order.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(b"TFQMWIG1")?;
        out.write_all(&(self.grid.tau.len() as u64).to_le_bytes())?;
        out.write_all(&(self.grid.phi.len() as u64).to_le_bytes())?;
        for v in [
            self.grid.tau.min(),
            self.grid.tau.max(),
            self.grid.phi.min(),
            self.grid.phi.max(),
        ] {
            out.write_all(&v.to_le_bytes())?;
        }
        for i in 0..self.grid.tau.len() {
            for j in 0..self.grid.phi.len() {
                out.write_all(&self.values[(i, j)].to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> std::io::Result<Self> {
        let bad = |msg: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string());
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != b"TFQMWIG1" {
            return Err(bad("bad magic"));
        }
        let mut b8 = [0u8; 8];
        let mut read_u64 = |input: &mut R| -> std::io::Result<u64> {
            input.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let n_tau = read_u64(&mut input)? as usize;
        let n_phi = read_u64(&mut input)? as usize;
        let read_f64 = |input: &mut R| -> std::io::Result<f64> {
            let mut b = [0u8; 8];
            input.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let tau_min = read_f64(&mut input)?;
        let tau_max = read_f64(&mut input)?;
        let phi_min = read_f64(&mut input)?;
        let phi_max = read_f64(&mut input)?;
        let tau = FrequencyGrid::new(n_tau, tau_min, tau_max).map_err(|e| bad(&e.to_string()))?;
        let phi = FrequencyGrid::new(n_phi, phi_min, phi_max).map_err(|e| bad(&e.to_string()))?;
        let mut values = Array2::zeros((n_tau, n_phi));
        for i in 0..n_tau {
            for j in 0..n_phi {
                values[(i, j)] = read_f64(&mut input)?;
            }
        }
        Ok(Self { grid: PhaseSpaceGrid::new(tau, phi), values })
    }
}

fn phi_indices(source: &FrequencyGrid, phi: &FrequencyGrid) -> Result<Vec<usize>> {
    (0..phi.len())
        .map(|j| {
            source.index_of(phi.point(j)).ok_or_else(|| {
                Error::GridMismatch(format!(
                    "phi sample {:.6} does not lie on the state grid",
                    phi.point(j)
                ))
            })
        })
        .collect()
}

/// Column of Wigner values over the tau axis for one phi point, from the
/// symmetric-window product samples `prod[k] = S(phi + k h) S*(phi - k h)`,
/// `k in [-m, m]` (index shifted by `m`).
fn wigner_column(prod: &[Complex64], m: usize, h: f64, tau: &FrequencyGrid) -> Vec<Complex64> {
    (0..tau.len())
        .map(|i| {
            let t = tau.point(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, p) in prod.iter().enumerate() {
                let k = idx as f64 - m as f64;
                let w = if idx == 0 || idx == prod.len() - 1 { 0.5 } else { 1.0 };
                acc += w * Complex64::from_polar(1.0, 2.0 * k * h * t) * p;
            }
            acc * h
        })
        .collect()
}

/// Wigner map of a one-photon amplitude.
pub fn wigner1d(state: &Amplitude1D, grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    let edge = fourier::edge_magnitude(state.values());
    if edge > fourier::EDGE_THRESHOLD {
        return Err(Error::EdgeLeakage { magnitude: edge, threshold: fourier::EDGE_THRESHOLD });
    }
    let source = state.grid();
    let idx = phi_indices(source, &grid.phi)?;
    let n = source.len();
    let h = source.spacing();
    let values = state.values();

    let cols = crate::par::map_indices(grid.phi.len(), |j| {
        let p = idx[j];
        let m = p.min(n - 1 - p);
        let prod: Vec<Complex64> = (0..=2 * m)
            .map(|off| {
                let k = off as i64 - m as i64;
                values[(p as i64 + k) as usize] * values[(p as i64 - k) as usize].conj()
            })
            .collect();
        wigner_column(&prod, m, h, &grid.tau)
    });

    let mut raw = Array2::zeros((grid.tau.len(), grid.phi.len()));
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            raw[(i, j)] = v;
        }
    }
    WignerMap::from_complex(*grid, raw)
}

/// Plus/minus factor maps of a separable state: the one-photon formula
/// applied to f on the `(tau+, phi+)` plane and to g on `(tau-, phi-)`.
pub fn wigner_pm(
    state: &SeparablePmState,
    grid_plus: &PhaseSpaceGrid,
    grid_minus: &PhaseSpaceGrid,
) -> Result<(WignerMap, WignerMap)> {
    Ok((wigner1d(state.f_plus(), grid_plus)?, wigner1d(state.g_minus(), grid_minus)?))
}

/// Wigner map of one photon of a pair: the one-photon formula applied to the
/// reduced density operator of the chosen mode (equivalently, the projection
/// of the four-dimensional map onto that photon's plane).
pub fn wigner_reduced(state: &Jsa2D, axis: Axis, grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    let edge = state.edge_magnitude();
    if edge > fourier::EDGE_THRESHOLD {
        return Err(Error::EdgeLeakage { magnitude: edge, threshold: fourier::EDGE_THRESHOLD });
    }
    let (own, other) = match axis {
        Axis::One => (state.grid1(), state.grid2()),
        Axis::Two => (state.grid2(), state.grid1()),
    };
    let idx = phi_indices(own, &grid.phi)?;
    let n = own.len();
    let h = own.spacing();

    let cols = crate::par::map_indices(grid.phi.len(), |j| {
        let p = idx[j];
        let m = p.min(n - 1 - p);
        // rho(phi + k h, phi - k h) = sum_y w_y F(a, y) conj(F(b, y))
        let prod: Vec<Complex64> = (0..=2 * m)
            .map(|off| {
                let k = off as i64 - m as i64;
                let a = (p as i64 + k) as usize;
                let b = (p as i64 - k) as usize;
                let mut acc = Complex64::new(0.0, 0.0);
                for y in 0..other.len() {
                    let (fa, fb) = match axis {
                        Axis::One => (state.values()[(a, y)], state.values()[(b, y)]),
                        Axis::Two => (state.values()[(y, a)], state.values()[(y, b)]),
                    };
                    acc += other.weight(y) * fa * fb.conj();
                }
                acc
            })
            .collect();
        wigner_column(&prod, m, h, &grid.tau)
    });

    let mut raw = Array2::zeros((grid.tau.len(), grid.phi.len()));
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            raw[(i, j)] = v;
        }
    }
    WignerMap::from_complex(*grid, raw)
}

/// `OVERLAP_CONSTANT * integral W_a W_b`, which equals `|<a|b>|^2` within
/// quadrature error.
pub fn overlap_via_wigner(
    a: &Amplitude1D,
    b: &Amplitude1D,
    grid: &PhaseSpaceGrid,
) -> Result<f64> {
    a.grid().require_same(b.grid(), "overlap_via_wigner")?;
    let wa = wigner1d(a, grid)?;
    let wb = wigner1d(b, grid)?;
    Ok(OVERLAP_CONSTANT * wa.overlap_integral(&wb)?)
}

/// Best integer-cell displacement `(d_tau, d_phi)` maximizing the correlation
/// `sum W_new(x) W_old(x - d)` over a search window of `reach` cells.
pub fn displacement_between(
    old: &WignerMap,
    new: &WignerMap,
    reach: usize,
) -> Result<(f64, f64)> {
    old.grid.tau.require_same(&new.grid.tau, "displacement tau")?;
    old.grid.phi.require_same(&new.grid.phi, "displacement phi")?;
    let (nt, np) = (old.grid.tau.len(), old.grid.phi.len());
    let r = reach as i64;
    let mut best = (0i64, 0i64, f64::NEG_INFINITY);
    for di in -r..=r {
        for dj in -r..=r {
            let mut score = 0.0;
            for i in 0..nt as i64 {
                let oi = i - di;
                if oi < 0 || oi >= nt as i64 {
                    continue;
                }
                for j in 0..np as i64 {
                    let oj = j - dj;
                    if oj < 0 || oj >= np as i64 {
                        continue;
                    }
                    score += new.values[(i as usize, j as usize)]
                        * old.values[(oi as usize, oj as usize)];
                }
            }
            if score > best.2 {
                best = (di, dj, score);
            }
        }
    }
    Ok((best.0 as f64 * old.grid.tau.spacing(), best.1 as f64 * old.grid.phi.spacing()))
}

/// Evolve a one-photon amplitude by `exp(-i kappa (a w + b t))` and measure
/// the displacement of its Wigner map. The map moves by `(kappa a, kappa b)`
/// in `(tau, phi)`: frequency generators translate along tau, time generators
/// along phi.
pub fn translate_check(
    state: &Amplitude1D,
    omega_coeff: f64,
    time_coeff: f64,
    kappa: f64,
    grid: &PhaseSpaceGrid,
) -> Result<(f64, f64)> {
    let before = wigner1d(state, grid)?;
    let evolved = translate_axis(state, omega_coeff, time_coeff, kappa, 1.0)?;
    let after = wigner1d(&evolved, grid)?;
    let reach_tau = ((kappa * omega_coeff).abs() / grid.tau.spacing()).ceil() as usize + 4;
    let reach_phi = ((kappa * time_coeff).abs() / grid.phi.spacing()).ceil() as usize + 4;
    displacement_between(&before, &after, reach_tau.max(reach_phi))
}

/// Spacing between adjacent zero crossings along the tau axis at fixed phi,
/// by linear interpolation of the sign changes. The median of the observed
/// spacings is returned.
pub fn fringe_spacing_tau(map: &WignerMap, j_phi: usize) -> Result<f64> {
    let nt = map.grid.tau.len();
    if j_phi >= map.grid.phi.len() {
        return Err(Error::InvalidInput("phi index out of range".into()));
    }
    let slice: Vec<f64> = (0..nt).map(|i| map.values[(i, j_phi)]).collect();
    let scale = slice.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::InvalidInput("slice is identically zero".into()));
    }
    let floor = 1e-6 * scale;
    let mut zeros = Vec::new();
    for i in 0..nt - 1 {
        let (a, b) = (slice[i], slice[i + 1]);
        if a.abs() < floor && b.abs() < floor {
            continue;
        }
        if a == 0.0 {
            zeros.push(map.grid.tau.point(i));
        } else if a * b < 0.0 {
            let t = a / (a - b);
            zeros.push(map.grid.tau.point(i) + t * map.grid.tau.spacing());
        }
    }
    if zeros.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "only {} zero crossings; no fringe pattern",
            zeros.len()
        )));
    }
    let mut spacings: Vec<f64> = zeros.windows(2).map(|w| w[1] - w[0]).collect();
    spacings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(spacings[spacings.len() / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_gaussian, GaussianSpec};

    fn gaussian_map(sigma: f64) -> (Amplitude1D, WignerMap) {
        let grid = FrequencyGrid::centered(0.0, 12.0, 1024).unwrap();
        let amp = make_gaussian(&GaussianSpec::new(0.0, sigma).unwrap(), &grid).unwrap();
        let tau = FrequencyGrid::centered(0.0, 5.0, 257).unwrap();
        let ps = PhaseSpaceGrid::aligned(&grid, -5.0, 5.0, tau).unwrap();
        let w = wigner1d(&amp, &ps).unwrap();
        (amp, w)
    }

    #[test]
    fn gaussian_wigner_matches_closed_form() {
        let sigma = 0.8;
        let (_, w) = gaussian_map(sigma);
        for i in (0..w.grid().tau.len()).step_by(37) {
            for j in (0..w.grid().phi.len()).step_by(41) {
                let tau = w.grid().tau.point(i);
                let phi = w.grid().phi.point(j);
                let expect = (-2.0 * sigma * sigma * tau * tau
                    - phi * phi / (2.0 * sigma * sigma))
                    .exp();
                assert!((w.value(i, j) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn marginal_constant_is_pi() {
        let sigma = 1.0;
        let (amp, w) = gaussian_map(sigma);
        let marg = w.tau_marginal();
        for (j, m) in marg.iter().enumerate() {
            let phi = w.grid().phi.point(j);
            let k = amp.grid().index_of(phi).unwrap();
            let expect = MARGINAL_CONSTANT * amp.values()[k].norm_sqr();
            if expect > 1e-8 {
                assert!((m - expect).abs() <= 1e-6 * expect, "phi={phi}: {m} vs {expect}");
            }
        }
    }

    #[test]
    fn purity_constant_is_two_over_pi() {
        let (_, w) = gaussian_map(1.0);
        let purity = OVERLAP_CONSTANT * w.overlap_integral(&w).unwrap();
        assert!((purity - 1.0).abs() < 1e-9, "purity {purity}");
    }

    #[test]
    fn binary_round_trip() {
        let (_, w) = gaussian_map(1.0);
        let mut buf = Vec::new();
        w.write_binary(&mut buf).unwrap();
        let r = WignerMap::read_binary(buf.as_slice()).unwrap();
        assert_eq!(w, r);
    }
}
