//! One- and two-photon spectral states on uniform grids.
//!
//! Two representations of a biphoton state coexist:
//!
//! * [`Jsa2D`] — a dense joint spectral amplitude F(w1, w2).
//! * [`SeparablePmState`] — the separable form f(w+) g(w-) in the collective
//!   variables w± = w1 ± w2. Products and expectation values factorize into
//!   one-dimensional quadratures there, which is both faster and far more
//!   accurate than any dense-grid computation. On the ± axes the conjugate
//!   pair is (w±, t±) with commutator 2i, so t± acts as -2i d/dw±.
//!
//! Builders return unit-norm states under trapezoidal quadrature; the
//! coordinate-change Jacobian and all closed-form prefactors are absorbed by
//! renormalization, which is observationally equivalent for every quantity
//! computed from normalized states.

use std::io::Write;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::par;

/// Default number of samples per axis when a grid is chosen automatically.
pub const DEFAULT_GRID_POINTS: usize = 1024;
/// Automatic grids span `center ± EXTENT_SIGMAS * sigma` around each peak,
/// putting Gaussian tails below 1e-21 at the boundary.
pub const EXTENT_SIGMAS: f64 = 10.0;
/// Builders require the grid to cover at least `center ± COVER_SIGMAS * sigma`.
pub const COVER_SIGMAS: f64 = 8.0;

/// Gaussian spectral amplitude `(2 pi sigma^2)^(-1/4) exp(-(w-center)^2 / 4 sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub center: f64,
    pub sigma: f64,
}

impl GaussianSpec {
    pub fn new(center: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { center, sigma })
    }

    /// Closed-form normalized amplitude at `omega`.
    pub fn eval(&self, omega: f64) -> f64 {
        let d = omega - self.center;
        (2.0 * std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25)
            * (-d * d / (4.0 * self.sigma * self.sigma)).exp()
    }

    /// Half-width of the automatic grid for this amplitude.
    pub fn auto_halfwidth(&self) -> f64 {
        EXTENT_SIGMAS * self.sigma
    }

    pub fn auto_grid(&self, n: usize) -> Result<FrequencyGrid> {
        FrequencyGrid::centered(self.center, self.auto_halfwidth(), n)
    }
}

/// Two-peak cat amplitude: Gaussian peaks at `center ± delta/2`, relative
/// sign fixed to minus (the peak at `center + delta/2` enters negated).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub center: f64,
    pub sigma: f64,
    pub delta: f64,
}

impl CatSpec {
    pub fn new(center: f64, sigma: f64, delta: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { center, sigma, delta })
    }

    /// Overlap of the two peaks, `exp(-delta^2 / 8 sigma^2)`. This cross term
    /// enters the exact normalization; no large-separation approximation is
    /// made anywhere in the builder.
    pub fn peak_overlap(&self) -> f64 {
        (-self.delta * self.delta / (8.0 * self.sigma * self.sigma)).exp()
    }

    /// False when the peaks are closer than 6 sigma, where closed forms that
    /// drop the cross term stop being good approximations.
    pub fn well_separated(&self) -> bool {
        self.delta >= 6.0 * self.sigma
    }

    /// Closed-form normalized amplitude at `omega`.
    pub fn eval(&self, omega: f64) -> f64 {
        let lo = GaussianSpec { center: self.center - self.delta / 2.0, sigma: self.sigma };
        let hi = GaussianSpec { center: self.center + self.delta / 2.0, sigma: self.sigma };
        let norm = (2.0 * (1.0 - self.peak_overlap())).sqrt();
        (lo.eval(omega) - hi.eval(omega)) / norm
    }

    pub fn auto_halfwidth(&self) -> f64 {
        self.delta / 2.0 + EXTENT_SIGMAS * self.sigma
    }

    pub fn auto_grid(&self, n: usize) -> Result<FrequencyGrid> {
        FrequencyGrid::centered(self.center, self.auto_halfwidth(), n)
    }
}

/// Analytic amplitude family. Retained alongside sampled states so that
/// resampling (e.g. the plus/minus to joint-amplitude coordinate change) can
/// evaluate the amplitude exactly at off-grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AmplitudeSpec {
    Gaussian(GaussianSpec),
    Cat(CatSpec),
}

impl AmplitudeSpec {
    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            AmplitudeSpec::Gaussian(s) => s.eval(omega),
            AmplitudeSpec::Cat(s) => s.eval(omega),
        }
    }

    pub fn center(&self) -> f64 {
        match self {
            AmplitudeSpec::Gaussian(s) => s.center,
            AmplitudeSpec::Cat(s) => s.center,
        }
    }

    pub fn auto_halfwidth(&self) -> f64 {
        match self {
            AmplitudeSpec::Gaussian(s) => s.auto_halfwidth(),
            AmplitudeSpec::Cat(s) => s.auto_halfwidth(),
        }
    }

}

/// Complex spectral amplitude of one photon (or of one plus/minus axis),
/// sampled on a uniform grid. Unit norm under trapezoidal quadrature after
/// [`Amplitude1D::normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude1D {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl Amplitude1D {
    pub fn from_values(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm_squared(&self) -> f64 {
        (0..self.grid.len())
            .map(|k| self.grid.weight(k) * self.values[k].norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Rescale to unit quadrature norm. Idempotent to rounding.
    pub fn normalize(&self) -> Self {
        let n = self.norm();
        let scale = if n > 0.0 { 1.0 / n } else { 0.0 };
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * scale).collect(),
        }
    }

    /// Samples of `S(-omega)`. Exact on symmetric grids (sample reversal).
    pub fn reflect(&self) -> Result<Self> {
        if !self.grid.is_symmetric() {
            return Err(Error::GridMismatch(
                "reflection requires a grid symmetric about zero".into(),
            ));
        }
        let mut values = self.values.clone();
        values.reverse();
        Ok(Self { grid: self.grid, values })
    }

    /// Write `omega,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "omega,re,im")?;
        for k in 0..self.grid.len() {
            let v = self.values[k];
            writeln!(out, "{},{},{}", self.grid.point(k), v.re, v.im)?;
        }
        Ok(())
    }
}

/// `<a|b>` with the physics convention: conjugate-linear in the first slot.
pub fn inner_product(a: &Amplitude1D, b: &Amplitude1D) -> Result<Complex64> {
    a.grid.require_same(&b.grid, "inner_product")?;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..a.grid.len() {
        acc += a.grid.weight(k) * a.values[k].conj() * b.values[k];
    }
    Ok(acc)
}

/// Sample a Gaussian amplitude on `grid` and renormalize.
///
/// Fails with `GridTooNarrow` when the grid covers less than
/// `center ± 8 sigma`: tails beyond the boundary would corrupt moments.
pub fn make_gaussian(spec: &GaussianSpec, grid: &FrequencyGrid) -> Result<Amplitude1D> {
    let lo = spec.center - COVER_SIGMAS * spec.sigma;
    let hi = spec.center + COVER_SIGMAS * spec.sigma;
    grid.require_covers(lo, hi, "make_gaussian")?;
    let values = (0..grid.len())
        .map(|k| Complex64::new(spec.eval(grid.point(k)), 0.0))
        .collect();
    Ok(Amplitude1D::from_values(*grid, values)?.normalize())
}

/// Sample a cat amplitude on `grid` and renormalize. The closed form already
/// carries the exact two-peak cross term, so renormalization only removes
/// quadrature residue.
pub fn make_cat(spec: &CatSpec, grid: &FrequencyGrid) -> Result<Amplitude1D> {
    let lo = spec.center - spec.delta / 2.0 - COVER_SIGMAS * spec.sigma;
    let hi = spec.center + spec.delta / 2.0 + COVER_SIGMAS * spec.sigma;
    grid.require_covers(lo, hi, "make_cat")?;
    let values = (0..grid.len())
        .map(|k| Complex64::new(spec.eval(grid.point(k)), 0.0))
        .collect();
    Ok(Amplitude1D::from_values(*grid, values)?.normalize())
}

fn build_amplitude(spec: &AmplitudeSpec, grid: &FrequencyGrid) -> Result<Amplitude1D> {
    match spec {
        AmplitudeSpec::Gaussian(s) => make_gaussian(s, grid),
        AmplitudeSpec::Cat(s) => make_cat(s, grid),
    }
}

/// Exchange symmetry of the minus-variable amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// Tolerance for the pointwise parity check `g(-w) = ±g(w)`.
pub const PARITY_TOLERANCE: f64 = 1e-10;

/// Factorized biphoton state `f(w+) g(w-)`, the workhorse representation.
///
/// `g`'s grid must be symmetric about zero so that photon exchange
/// (`w- -> -w-`) is an exact sample reversal. The parity tag is validated
/// against the samples at construction.
#[derive(Debug, Clone)]
pub struct SeparablePmState {
    f_plus: Amplitude1D,
    g_minus: Amplitude1D,
    parity: Parity,
    f_spec: Option<AmplitudeSpec>,
    g_spec: Option<AmplitudeSpec>,
}

impl SeparablePmState {
    pub fn new(f_plus: Amplitude1D, g_minus: Amplitude1D, parity: Parity) -> Result<Self> {
        let f_plus = f_plus.normalize();
        let g_minus = g_minus.normalize();
        if parity != Parity::None {
            if !g_minus.grid().is_symmetric() {
                return Err(Error::SymmetryViolation(
                    "parity tag requires a minus-axis grid symmetric about zero".into(),
                ));
            }
            let sign = if parity == Parity::Even { 1.0 } else { -1.0 };
            let reflected = g_minus.reflect()?;
            let worst = g_minus
                .values()
                .iter()
                .zip(reflected.values())
                .map(|(a, b)| (b - sign * a).norm())
                .fold(0.0_f64, f64::max);
            if worst > PARITY_TOLERANCE {
                return Err(Error::SymmetryViolation(format!(
                    "declared parity {parity:?} violated by {worst:.3e}"
                )));
            }
        }
        Ok(Self { f_plus, g_minus, parity, f_spec: None, g_spec: None })
    }

    /// Build from analytic specs on the given grids (pass `None` for the
    /// automatic grid). Parity of the minus amplitude is inferred from its
    /// spec: a zero-centered Gaussian is even, a zero-centered cat is odd,
    /// anything off-center is unclassified.
    pub fn from_specs(
        f_spec: AmplitudeSpec,
        g_spec: AmplitudeSpec,
        f_grid: Option<FrequencyGrid>,
        g_grid: Option<FrequencyGrid>,
        n: usize,
    ) -> Result<Self> {
        let f_grid = match f_grid {
            Some(g) => g,
            None => FrequencyGrid::centered(f_spec.center(), f_spec.auto_halfwidth(), n)?,
        };
        let g_grid = match g_grid {
            Some(g) => g,
            None => {
                // keep the minus grid symmetric so parity and swap are exact
                let half = g_spec.center().abs() + g_spec.auto_halfwidth();
                FrequencyGrid::centered(0.0, half, n)?
            }
        };
        let parity = if g_spec.center() == 0.0 {
            match g_spec {
                AmplitudeSpec::Gaussian(_) => Parity::Even,
                AmplitudeSpec::Cat(_) => Parity::Odd,
            }
        } else {
            Parity::None
        };
        let mut state = Self::new(build_amplitude(&f_spec, &f_grid)?, build_amplitude(&g_spec, &g_grid)?, parity)?;
        state.f_spec = Some(f_spec);
        state.g_spec = Some(g_spec);
        Ok(state)
    }

    pub fn f_plus(&self) -> &Amplitude1D {
        &self.f_plus
    }

    pub fn g_minus(&self) -> &Amplitude1D {
        &self.g_minus
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn f_spec(&self) -> Option<&AmplitudeSpec> {
        self.f_spec.as_ref()
    }

    pub fn g_spec(&self) -> Option<&AmplitudeSpec> {
        self.g_spec.as_ref()
    }

    /// Replace the amplitudes, keeping no analytic provenance (used by
    /// evolutions, which generally break parity and closed forms).
    pub(crate) fn with_amplitudes(
        f_plus: Amplitude1D,
        g_minus: Amplitude1D,
        parity: Parity,
    ) -> Self {
        Self { f_plus, g_minus, parity, f_spec: None, g_spec: None }
    }

    /// Dense joint amplitude on a shared symmetric-per-photon grid chosen to
    /// cover the image of the support under w1 = (w+ + w-)/2, w2 = (w+ - w-)/2.
    pub fn to_full(&self, n: usize) -> Result<Jsa2D> {
        let (f_spec, g_spec) = match (self.f_spec, self.g_spec) {
            (Some(f), Some(g)) => (f, g),
            _ => {
                return Err(Error::InvalidInput(
                    "to_full requires analytic provenance; build the state from specs".into(),
                ))
            }
        };
        let center = 0.5 * (f_spec.center() + g_spec.center());
        let half = 0.5 * (f_spec.auto_halfwidth() + g_spec.center().abs() + g_spec.auto_halfwidth());
        let grid = FrequencyGrid::centered(center, half, n)?;
        self.to_full_on(&grid)
    }

    /// Dense joint amplitude on an explicit grid (used for both photon axes).
    pub fn to_full_on(&self, grid: &FrequencyGrid) -> Result<Jsa2D> {
        let (f_spec, g_spec) = match (self.f_spec, self.g_spec) {
            (Some(f), Some(g)) => (f, g),
            _ => {
                return Err(Error::InvalidInput(
                    "to_full requires analytic provenance; build the state from specs".into(),
                ))
            }
        };
        let n = grid.len();
        let pts = grid.points();
        let rows = par::map_indices(n, |i| {
            let w1 = pts[i];
            let mut row = Vec::with_capacity(n);
            for &w2 in &pts {
                row.push(Complex64::new(f_spec.eval(w1 + w2) * g_spec.eval(w1 - w2), 0.0));
            }
            row
        });
        let mut values = Array2::zeros((n, n));
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                values[(i, j)] = v;
            }
        }
        let jsa = Jsa2D::from_values(*grid, *grid, values)?.normalize();
        let edge = jsa.edge_magnitude();
        if edge > 1e-8 {
            return Err(Error::GridTooNarrow(format!(
                "joint grid leaves boundary magnitude {edge:.3e}"
            )));
        }
        Ok(jsa)
    }
}

/// Dense joint spectral amplitude F(w1, w2) of a photon pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Jsa2D {
    grid1: FrequencyGrid,
    grid2: FrequencyGrid,
    values: Array2<Complex64>,
}

impl Jsa2D {
    pub fn from_values(
        grid1: FrequencyGrid,
        grid2: FrequencyGrid,
        values: Array2<Complex64>,
    ) -> Result<Self> {
        if values.dim() != (grid1.len(), grid2.len()) {
            return Err(Error::InvalidInput(format!(
                "value shape {:?} does not match grids ({}, {})",
                values.dim(),
                grid1.len(),
                grid2.len()
            )));
        }
        Ok(Self { grid1, grid2, values })
    }

    pub fn grid1(&self) -> &FrequencyGrid {
        &self.grid1
    }

    pub fn grid2(&self) -> &FrequencyGrid {
        &self.grid2
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn norm_squared(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.grid1.len() {
            let wi = self.grid1.weight(i);
            for j in 0..self.grid2.len() {
                acc += wi * self.grid2.weight(j) * self.values[(i, j)].norm_sqr();
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm();
        let scale = if n > 0.0 { 1.0 / n } else { 0.0 };
        Self {
            grid1: self.grid1,
            grid2: self.grid2,
            values: self.values.mapv(|v| v * scale),
        }
    }

    /// Largest magnitude on the boundary rows/columns.
    pub fn edge_magnitude(&self) -> f64 {
        let (n1, n2) = self.values.dim();
        let mut m = 0.0_f64;
        for i in 0..n1 {
            m = m.max(self.values[(i, 0)].norm());
            m = m.max(self.values[(i, n2 - 1)].norm());
        }
        for j in 0..n2 {
            m = m.max(self.values[(0, j)].norm());
            m = m.max(self.values[(n1 - 1, j)].norm());
        }
        m
    }

    pub(crate) fn map_values<F: Fn(usize, usize, Complex64) -> Complex64>(&self, f: F) -> Self {
        let mut values = self.values.clone();
        for ((i, j), v) in values.indexed_iter_mut() {
            *v = f(i, j, *v);
        }
        Self { grid1: self.grid1, grid2: self.grid2, values }
    }
}

/// `<a|b>` for joint amplitudes on identical grids.
pub fn inner_product_2d(a: &Jsa2D, b: &Jsa2D) -> Result<Complex64> {
    a.grid1.require_same(&b.grid1, "inner_product_2d axis 1")?;
    a.grid2.require_same(&b.grid2, "inner_product_2d axis 2")?;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.grid1.len() {
        let wi = a.grid1.weight(i);
        for j in 0..a.grid2.len() {
            acc += wi * a.grid2.weight(j) * a.values[(i, j)].conj() * b.values[(i, j)];
        }
    }
    Ok(acc)
}

/// Either representation of a two-photon state.
#[derive(Debug, Clone)]
pub enum BiphotonState {
    Separable(SeparablePmState),
    Full(Jsa2D),
}

impl BiphotonState {
    pub fn to_full(&self, n: usize) -> Result<Jsa2D> {
        match self {
            BiphotonState::Separable(s) => s.to_full(n),
            BiphotonState::Full(j) => Ok(j.clone()),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

/// Grid section of a state document.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub min: f64,
    pub max: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.n, self.min, self.max)
    }
}

/// One-photon amplitude document:
/// `{"kind":"gaussian"|"cat", "center":.., "sigma":.., "delta":.., "grid":{..}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AmplitudeDoc {
    Gaussian { center: f64, sigma: f64, grid: GridSpec },
    Cat { center: f64, sigma: f64, delta: f64, grid: GridSpec },
}

impl AmplitudeDoc {
    pub fn spec(&self) -> Result<AmplitudeSpec> {
        match self {
            AmplitudeDoc::Gaussian { center, sigma, .. } => {
                Ok(AmplitudeSpec::Gaussian(GaussianSpec::new(*center, *sigma)?))
            }
            AmplitudeDoc::Cat { center, sigma, delta, .. } => {
                Ok(AmplitudeSpec::Cat(CatSpec::new(*center, *sigma, *delta)?))
            }
        }
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        match self {
            AmplitudeDoc::Gaussian { grid, .. } | AmplitudeDoc::Cat { grid, .. } => grid.build(),
        }
    }

    pub fn build(&self) -> Result<Amplitude1D> {
        build_amplitude(&self.spec()?, &self.grid()?)
    }
}

/// State document: a one-photon amplitude or a separable biphoton pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateDoc {
    Gaussian { center: f64, sigma: f64, grid: GridSpec },
    Cat { center: f64, sigma: f64, delta: f64, grid: GridSpec },
    Separable { f: AmplitudeDoc, g: AmplitudeDoc },
}

/// A state built from a [`StateDoc`].
#[derive(Debug, Clone)]
pub enum BuiltState {
    OnePhoton(Amplitude1D, AmplitudeSpec),
    Biphoton(SeparablePmState),
}

impl StateDoc {
    pub fn build(&self) -> Result<BuiltState> {
        match self {
            StateDoc::Gaussian { center, sigma, grid } => {
                let spec = GaussianSpec::new(*center, *sigma)?;
                Ok(BuiltState::OnePhoton(
                    make_gaussian(&spec, &grid.build()?)?,
                    AmplitudeSpec::Gaussian(spec),
                ))
            }
            StateDoc::Cat { center, sigma, delta, grid } => {
                let spec = CatSpec::new(*center, *sigma, *delta)?;
                Ok(BuiltState::OnePhoton(make_cat(&spec, &grid.build()?)?, AmplitudeSpec::Cat(spec)))
            }
            StateDoc::Separable { f, g } => Ok(BuiltState::Biphoton(SeparablePmState::from_specs(
                f.spec()?,
                g.spec()?,
                Some(f.grid()?),
                Some(g.grid()?),
                DEFAULT_GRID_POINTS,
            )?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, half: f64) -> FrequencyGrid {
        FrequencyGrid::centered(0.0, half, n).unwrap()
    }

    #[test]
    fn gaussian_peak_value() {
        // (2 pi)^(-1/4) at the peak for sigma = 1
        let spec = GaussianSpec::new(0.0, 1.0).unwrap();
        let g = make_gaussian(&spec, &grid(1025, 12.0)).unwrap();
        let k = g.grid().index_of(0.0).unwrap();
        let expect = (2.0 * std::f64::consts::PI).powf(-0.25);
        assert!((g.values()[k].re - expect).abs() < 1e-9);
        assert!(g.values().iter().all(|v| v.im == 0.0 && v.re > 0.0));
    }

    #[test]
    fn gaussian_too_narrow_grid_rejected() {
        let spec = GaussianSpec::new(3.0, 0.5).unwrap();
        let err = make_gaussian(&spec, &grid(256, 4.0)).unwrap_err();
        assert!(matches!(err, Error::GridTooNarrow(_)));
    }

    #[test]
    fn cat_vanishes_at_center() {
        let spec = CatSpec::new(0.0, 1.0, 10.0).unwrap();
        let c = make_cat(&spec, &grid(2049, 16.0)).unwrap();
        let k = c.grid().index_of(0.0).unwrap();
        assert!(c.values()[k].norm() < 1e-14);
    }

    #[test]
    fn cat_raw_norm_carries_cross_term() {
        // (g1 - g2)/sqrt(2) has norm sqrt(1 - exp(-delta^2/8 sigma^2))
        let g = grid(2049, 14.0);
        let lo = make_gaussian(&GaussianSpec::new(-2.0, 1.0).unwrap(), &g).unwrap();
        let hi = make_gaussian(&GaussianSpec::new(2.0, 1.0).unwrap(), &g).unwrap();
        let raw: Vec<Complex64> = lo
            .values()
            .iter()
            .zip(hi.values())
            .map(|(a, b)| (a - b) / 2.0_f64.sqrt())
            .collect();
        let raw = Amplitude1D::from_values(g, raw).unwrap();
        let expect = (1.0 - (-16.0_f64 / 8.0).exp()).sqrt();
        assert!((raw.norm() - expect).abs() < 1e-12);
        // and make_cat equals the renormalized combination
        let cat = make_cat(&CatSpec::new(0.0, 1.0, 4.0).unwrap(), &g).unwrap();
        let renk = raw.normalize();
        let worst = cat
            .values()
            .iter()
            .zip(renk.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent_to_rounding() {
        let spec = GaussianSpec::new(1.0, 0.7).unwrap();
        let a = make_gaussian(&spec, &FrequencyGrid::centered(1.0, 9.0, 513).unwrap()).unwrap();
        let b = a.normalize();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= 1e-15 * x.norm().max(1.0));
        }
    }

    #[test]
    fn parity_validation() {
        let g = grid(513, 20.0);
        let cat = make_cat(&CatSpec::new(0.0, 1.0, 8.0).unwrap(), &g).unwrap();
        let gauss = make_gaussian(&GaussianSpec::new(0.0, 1.0).unwrap(), &g).unwrap();
        assert!(SeparablePmState::new(gauss.clone(), cat.clone(), Parity::Odd).is_ok());
        assert!(matches!(
            SeparablePmState::new(gauss.clone(), cat, Parity::Even),
            Err(Error::SymmetryViolation(_))
        ));
        assert!(SeparablePmState::new(gauss.clone(), gauss, Parity::Even).is_ok());
    }

    #[test]
    fn state_doc_round_trip_and_unknown_keys() {
        let doc = r#"{"kind":"cat","center":0.0,"sigma":1.0,"delta":10.0,"grid":{"n":512,"min":-16.0,"max":16.0}}"#;
        let parsed: StateDoc = serde_json::from_str(doc).unwrap();
        assert!(parsed.build().is_ok());
        let bad = r#"{"kind":"gaussian","center":0.0,"sigma":1.0,"width":2.0,"grid":{"n":512,"min":-16.0,"max":16.0}}"#;
        assert!(serde_json::from_str::<StateDoc>(bad).is_err());
    }
}
