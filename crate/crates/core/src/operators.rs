//! Time-frequency operator actions and the unitary evolutions they generate.
//!
//! Conventions (dimensionless throughout):
//!
//! * single-photon axes: `w: S -> w S`, `t: S -> -i dS/dw`, commutator `[w, t] = i`;
//! * collective ± axes: `w± = w1 ± w2`, `t± = t1 ± t2`; on the separable
//!   representation `t±` acts as `-2i d/dw±` and `[w±, t±] = 2i`.
//!
//! Operator application returns raw images (not renormalized); evolutions are
//! unitary and preserve norm to rounding. Variances are computed from a single
//! application of the generator: with `phi = H psi`, `<H^2> = <phi|phi>` and
//! `<H> = <psi|phi>`.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::hermite;
use crate::states::{
    inner_product, Amplitude1D, BiphotonState, Jsa2D, Parity, SeparablePmState,
};

/// Photon label for per-axis operations on a joint amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    One,
    Two,
}

/// Which collective rotation generator R± is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PmAxis {
    Plus,
    Minus,
}

// ---------------------------------------------------------------------------
// Elementary operator images
// ---------------------------------------------------------------------------

/// `w S(w)` on a single axis.
pub fn apply_omega(state: &Amplitude1D) -> Amplitude1D {
    let grid = *state.grid();
    let values = state
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * grid.point(k))
        .collect();
    Amplitude1D::from_values(grid, values).expect("same length")
}

/// `-i dS/dw` on a single-photon axis (commutator i).
pub fn apply_time(state: &Amplitude1D) -> Result<Amplitude1D> {
    let d = fourier::derivative(state.values(), state.grid().spacing())?;
    let values = d.iter().map(|v| Complex64::new(0.0, -1.0) * v).collect();
    Amplitude1D::from_values(*state.grid(), values)
}

/// `-2i dS/dw` on a plus/minus axis (commutator 2i).
pub fn apply_time_pm(state: &Amplitude1D) -> Result<Amplitude1D> {
    let d = fourier::derivative(state.values(), state.grid().spacing())?;
    let values = d.iter().map(|v| Complex64::new(0.0, -2.0) * v).collect();
    Amplitude1D::from_values(*state.grid(), values)
}

/// Per-axis `w` on a joint amplitude.
pub fn apply_omega_axis(state: &Jsa2D, axis: Axis) -> Jsa2D {
    let g1 = *state.grid1();
    let g2 = *state.grid2();
    state.map_values(|i, j, v| match axis {
        Axis::One => v * g1.point(i),
        Axis::Two => v * g2.point(j),
    })
}

/// Per-axis `t = -i d/dw` on a joint amplitude.
pub fn apply_time_axis(state: &Jsa2D, axis: Axis) -> Result<Jsa2D> {
    let values = match axis {
        Axis::One => {
            let h = state.grid1().spacing();
            let n2 = state.grid2().len();
            let cols = crate::par::map_indices(n2, |j| {
                let col: Vec<Complex64> = state.values().column(j).to_vec();
                fourier::derivative(&col, h).map(|d| {
                    d.into_iter().map(|v| Complex64::new(0.0, -1.0) * v).collect::<Vec<_>>()
                })
            });
            let mut out = Array2::zeros(state.values().dim());
            for (j, col) in cols.into_iter().enumerate() {
                let col = col?;
                for (i, v) in col.into_iter().enumerate() {
                    out[(i, j)] = v;
                }
            }
            out
        }
        Axis::Two => {
            let h = state.grid2().spacing();
            let n1 = state.grid1().len();
            let rows = crate::par::map_indices(n1, |i| {
                let row: Vec<Complex64> = state.values().row(i).to_vec();
                fourier::derivative(&row, h).map(|d| {
                    d.into_iter().map(|v| Complex64::new(0.0, -1.0) * v).collect::<Vec<_>>()
                })
            });
            let mut out = Array2::zeros(state.values().dim());
            for (i, row) in rows.into_iter().enumerate() {
                let row = row?;
                for (j, v) in row.into_iter().enumerate() {
                    out[(i, j)] = v;
                }
            }
            out
        }
    };
    Jsa2D::from_values(*state.grid1(), *state.grid2(), values)
}

/// Photon exchange `F(w1, w2) -> F(w2, w1)`. Exact transposition; an
/// involution bit for bit.
pub fn swap(state: &Jsa2D) -> Result<Jsa2D> {
    state.grid1().require_same(state.grid2(), "swap")?;
    let values = state.values().t().to_owned();
    Jsa2D::from_values(*state.grid1(), *state.grid2(), values)
}

/// Photon exchange on the separable representation: `g(w-) -> g(-w-)`.
pub fn swap_pm(state: &SeparablePmState) -> Result<SeparablePmState> {
    let g = state.g_minus().reflect()?;
    Ok(SeparablePmState::with_amplitudes(state.f_plus().clone(), g, state.parity()))
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Evolution Hamiltonian: a linear combination of translation generators
/// `alpha w1 + beta w2 + gamma t1 + delta t2`, a rotation combination
/// `c1 R1 + c2 R2` with `R_i = (w_i^2 + t_i^2)/2` and `c in {-1, 0, +1}`,
/// or a collective rotation `R± = (w±^2 + t±^2)/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorDoc", into = "GeneratorDoc")]
pub enum Generator {
    Translation { alpha: f64, beta: f64, gamma: f64, delta: f64 },
    Rotation { c1: i8, c2: i8 },
    RotationPm { axis: PmAxis },
}

impl Generator {
    pub fn translation(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        if alpha == 0.0 && beta == 0.0 && gamma == 0.0 && delta == 0.0 {
            return Err(Error::InvalidInput("zero translation generator".into()));
        }
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite coefficient {name}")));
            }
        }
        Ok(Generator::Translation { alpha, beta, gamma, delta })
    }

    pub fn omega_1() -> Self {
        Generator::Translation { alpha: 1.0, beta: 0.0, gamma: 0.0, delta: 0.0 }
    }

    pub fn omega_2() -> Self {
        Generator::Translation { alpha: 0.0, beta: 1.0, gamma: 0.0, delta: 0.0 }
    }

    /// `w+ = w1 + w2`.
    pub fn omega_plus() -> Self {
        Generator::Translation { alpha: 1.0, beta: 1.0, gamma: 0.0, delta: 0.0 }
    }

    /// `w- = w1 - w2`.
    pub fn omega_minus() -> Self {
        Generator::Translation { alpha: 1.0, beta: -1.0, gamma: 0.0, delta: 0.0 }
    }

    pub fn rotation(c1: i8, c2: i8) -> Result<Self> {
        if !(-1..=1).contains(&c1) || !(-1..=1).contains(&c2) {
            return Err(Error::InvalidInput(format!(
                "rotation coefficients must be in {{-1,0,1}}, got ({c1}, {c2})"
            )));
        }
        if c1 == 0 && c2 == 0 {
            return Err(Error::InvalidInput("zero rotation generator".into()));
        }
        Ok(Generator::Rotation { c1, c2 })
    }

    pub fn rotation_pm(axis: PmAxis) -> Self {
        Generator::RotationPm { axis }
    }

    /// Translation coefficients in collective coordinates:
    /// `H = a+ w+ + a- w- + b+ t+ + b- t-`.
    pub(crate) fn pm_translation_coeffs(&self) -> Option<(f64, f64, f64, f64)> {
        match *self {
            Generator::Translation { alpha, beta, gamma, delta } => Some((
                (alpha + beta) / 2.0,
                (alpha - beta) / 2.0,
                (gamma + delta) / 2.0,
                (gamma - delta) / 2.0,
            )),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum GeneratorDoc {
    Translation { alpha: f64, beta: f64, gamma: f64, delta: f64 },
    Rotation {
        #[serde(default)]
        c1: i8,
        #[serde(default)]
        c2: i8,
        #[serde(default)]
        pm: Option<PmAxis>,
    },
}

impl TryFrom<GeneratorDoc> for Generator {
    type Error = Error;

    fn try_from(doc: GeneratorDoc) -> Result<Self> {
        match doc {
            GeneratorDoc::Translation { alpha, beta, gamma, delta } => {
                Generator::translation(alpha, beta, gamma, delta)
            }
            GeneratorDoc::Rotation { c1, c2, pm: Some(axis) } => {
                if c1 != 0 || c2 != 0 {
                    return Err(Error::InvalidInput(
                        "rotation with pm set must leave c1 = c2 = 0".into(),
                    ));
                }
                Ok(Generator::rotation_pm(axis))
            }
            GeneratorDoc::Rotation { c1, c2, pm: None } => Generator::rotation(c1, c2),
        }
    }
}

impl From<Generator> for GeneratorDoc {
    fn from(g: Generator) -> Self {
        match g {
            Generator::Translation { alpha, beta, gamma, delta } => {
                GeneratorDoc::Translation { alpha, beta, gamma, delta }
            }
            Generator::Rotation { c1, c2 } => GeneratorDoc::Rotation { c1, c2, pm: None },
            Generator::RotationPm { axis } => {
                GeneratorDoc::Rotation { c1: 0, c2: 0, pm: Some(axis) }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Translations
// ---------------------------------------------------------------------------

/// `exp(-i kappa (a w + b t))` on one axis, with `t = -i comm d/dw` and
/// `[w, t] = i comm`. Splits into shift, pointwise phase, and the exact
/// Baker-Campbell-Hausdorff global phase `exp(i kappa^2 a b comm / 2)`.
pub(crate) fn translate_axis(
    amp: &Amplitude1D,
    a: f64,
    b: f64,
    kappa: f64,
    comm: f64,
) -> Result<Amplitude1D> {
    let grid = *amp.grid();
    let mut values = if b != 0.0 && kappa != 0.0 {
        fourier::shift(amp.values(), grid.spacing(), kappa * b * comm)?
    } else {
        amp.values().to_vec()
    };
    let global = Complex64::from_polar(1.0, 0.5 * kappa * kappa * a * b * comm);
    for (k, v) in values.iter_mut().enumerate() {
        let phase = Complex64::from_polar(1.0, -kappa * a * grid.point(k));
        *v *= phase * global;
    }
    Amplitude1D::from_values(grid, values)
}

/// `exp(-i kappa H)` for a translation generator on a joint amplitude.
/// Frequency parts are pointwise phases; time parts shift the frequency
/// arguments by `(gamma, delta) * kappa` via band-limited Fourier shifts.
pub fn evolve_translation(state: &Jsa2D, gen: &Generator, kappa: f64) -> Result<Jsa2D> {
    let Generator::Translation { alpha, beta, gamma, delta } = *gen else {
        return Err(Error::InvalidInput("evolve_translation requires a translation generator".into()));
    };
    let g1 = *state.grid1();
    let g2 = *state.grid2();

    // shift axis 1 by kappa*gamma, axis 2 by kappa*delta
    let mut shifted = state.clone();
    if kappa != 0.0 && gamma != 0.0 {
        let n2 = g2.len();
        let h = g1.spacing();
        let cols = crate::par::map_indices(n2, |j| {
            let col: Vec<Complex64> = shifted.values().column(j).to_vec();
            fourier::shift(&col, h, kappa * gamma)
        });
        let mut out = Array2::zeros(shifted.values().dim());
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col?.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        shifted = Jsa2D::from_values(g1, g2, out)?;
    }
    if kappa != 0.0 && delta != 0.0 {
        let n1 = g1.len();
        let h = g2.spacing();
        let rows = crate::par::map_indices(n1, |i| {
            let row: Vec<Complex64> = shifted.values().row(i).to_vec();
            fourier::shift(&row, h, kappa * delta)
        });
        let mut out = Array2::zeros(shifted.values().dim());
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row?.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        shifted = Jsa2D::from_values(g1, g2, out)?;
    }

    let global = Complex64::from_polar(1.0, 0.5 * kappa * kappa * (alpha * gamma + beta * delta));
    Ok(shifted.map_values(|i, j, v| {
        let phase =
            Complex64::from_polar(1.0, -kappa * (alpha * g1.point(i) + beta * g2.point(j)));
        v * phase * global
    }))
}

/// Translation evolution on the separable representation. Exact: the ± sectors
/// commute, so the evolution factorizes onto f and g.
pub fn evolve_translation_pm(
    state: &SeparablePmState,
    gen: &Generator,
    kappa: f64,
) -> Result<SeparablePmState> {
    let Some((a_p, a_m, b_p, b_m)) = gen.pm_translation_coeffs() else {
        return Err(Error::InvalidInput("evolve_translation_pm requires a translation generator".into()));
    };
    let f = translate_axis(state.f_plus(), a_p, b_p, kappa, 2.0)?;
    let g = translate_axis(state.g_minus(), a_m, b_m, kappa, 2.0)?;
    let parity = if kappa == 0.0 || (a_m == 0.0 && b_m == 0.0) {
        state.parity()
    } else {
        Parity::None
    };
    Ok(SeparablePmState::with_amplitudes(f, g, parity))
}

/// Options shared by evolutions that need a Hermite basis or a dense grid.
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Number of Hermite-Gauss modes for rotation evolutions.
    pub hermite_modes: usize,
    /// Maximum admissible tail norm outside the basis.
    pub tail_tolerance: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { hermite_modes: 128, tail_tolerance: 1e-10 }
    }
}

/// `exp(-i kappa H)` on either representation.
///
/// Separable states stay separable under translations, R±, and R1 + R2;
/// lopsided rotations (R1, R2, R1 - R2) require the dense representation and
/// return `NonSeparableEvolution` on a separable input.
pub fn evolve(
    state: &BiphotonState,
    gen: &Generator,
    kappa: f64,
    opts: &EvolveOptions,
) -> Result<BiphotonState> {
    match (state, gen) {
        (BiphotonState::Separable(s), Generator::Translation { .. }) => {
            Ok(BiphotonState::Separable(evolve_translation_pm(s, gen, kappa)?))
        }
        (BiphotonState::Separable(s), Generator::RotationPm { axis }) => Ok(
            BiphotonState::Separable(hermite::evolve_rotation_pm(s, *axis, kappa, opts)?),
        ),
        (BiphotonState::Separable(s), Generator::Rotation { c1, c2 }) if c1 == c2 => {
            // R1 + R2 = R+ + R-, both collective rotations by the same angle
            let s1 = hermite::evolve_rotation_pm(s, PmAxis::Plus, f64::from(*c1) * kappa, opts)?;
            let s2 = hermite::evolve_rotation_pm(&s1, PmAxis::Minus, f64::from(*c1) * kappa, opts)?;
            Ok(BiphotonState::Separable(s2))
        }
        (BiphotonState::Separable(_), Generator::Rotation { .. }) => {
            Err(Error::NonSeparableEvolution(
                "R1/R2/R1-R2 rotations break separability; convert with to_full first".into(),
            ))
        }
        (BiphotonState::Full(j), Generator::Translation { .. }) => {
            Ok(BiphotonState::Full(evolve_translation(j, gen, kappa)?))
        }
        (BiphotonState::Full(j), Generator::Rotation { c1, c2 }) => {
            Ok(BiphotonState::Full(hermite::evolve_rotation_full(j, *c1, *c2, kappa, opts)?))
        }
        (BiphotonState::Full(_), Generator::RotationPm { .. }) => Err(Error::InvalidInput(
            "collective R± rotations act on the separable representation".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Generator images and variances
// ---------------------------------------------------------------------------

/// Image of a state under an operator, in whichever representation the state
/// uses. Separable images are sums of product terms (f_i, g_i).
#[derive(Debug, Clone)]
pub(crate) enum StateImage {
    Pm(Vec<(Amplitude1D, Amplitude1D)>),
    Full(Jsa2D),
}

impl StateImage {
    pub(crate) fn sub(self, other: StateImage) -> Result<StateImage> {
        match (self, other) {
            (StateImage::Pm(mut a), StateImage::Pm(b)) => {
                for (f, g) in b {
                    let neg =
                        f.values().iter().map(|v| -v).collect::<Vec<_>>();
                    a.push((Amplitude1D::from_values(*f.grid(), neg)?, g));
                }
                Ok(StateImage::Pm(a))
            }
            (StateImage::Full(a), StateImage::Full(b)) => {
                a.grid1().require_same(b.grid1(), "image sub")?;
                a.grid2().require_same(b.grid2(), "image sub")?;
                let values = a.values() - b.values();
                Ok(StateImage::Full(Jsa2D::from_values(*a.grid1(), *a.grid2(), values)?))
            }
            _ => Err(Error::InvalidInput("mismatched image representations".into())),
        }
    }

    pub(crate) fn neg(&self) -> Result<StateImage> {
        match self {
            StateImage::Pm(terms) => {
                let mut out = Vec::with_capacity(terms.len());
                for (f, g) in terms {
                    let neg = f.values().iter().map(|v| -v).collect::<Vec<_>>();
                    out.push((Amplitude1D::from_values(*f.grid(), neg)?, g.clone()));
                }
                Ok(StateImage::Pm(out))
            }
            StateImage::Full(j) => Ok(StateImage::Full(Jsa2D::from_values(
                *j.grid1(),
                *j.grid2(),
                j.values().mapv(|v| -v),
            )?)),
        }
    }

    /// Photon exchange applied to the image.
    pub(crate) fn swapped(&self) -> Result<StateImage> {
        match self {
            StateImage::Pm(terms) => {
                let mut out = Vec::with_capacity(terms.len());
                for (f, g) in terms {
                    out.push((f.clone(), g.reflect()?));
                }
                Ok(StateImage::Pm(out))
            }
            StateImage::Full(j) => Ok(StateImage::Full(swap(j)?)),
        }
    }
}

pub(crate) fn state_as_image(state: &BiphotonState) -> StateImage {
    match state {
        BiphotonState::Separable(s) => {
            StateImage::Pm(vec![(s.f_plus().clone(), s.g_minus().clone())])
        }
        BiphotonState::Full(j) => StateImage::Full(j.clone()),
    }
}

/// `<a|b>` between images.
pub(crate) fn image_inner(a: &StateImage, b: &StateImage) -> Result<Complex64> {
    match (a, b) {
        (StateImage::Pm(ta), StateImage::Pm(tb)) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (fa, ga) in ta {
                for (fb, gb) in tb {
                    acc += inner_product(fa, fb)? * inner_product(ga, gb)?;
                }
            }
            Ok(acc)
        }
        (StateImage::Full(ja), StateImage::Full(jb)) => crate::states::inner_product_2d(ja, jb),
        _ => Err(Error::InvalidInput("mismatched image representations".into())),
    }
}

fn quarter(amp: &Amplitude1D) -> Amplitude1D {
    let values = amp.values().iter().map(|v| v * 0.25).collect();
    Amplitude1D::from_values(*amp.grid(), values).expect("same length")
}

fn scale_amp(amp: &Amplitude1D, s: f64) -> Amplitude1D {
    let values = amp.values().iter().map(|v| v * s).collect();
    Amplitude1D::from_values(*amp.grid(), values).expect("same length")
}

fn add_amp(a: &Amplitude1D, b: &Amplitude1D) -> Amplitude1D {
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect();
    Amplitude1D::from_values(*a.grid(), values).expect("same length")
}

/// `R± f = (w^2 f + t±^2 f) / 4` on a single ± axis.
fn r_pm_axis(amp: &Amplitude1D) -> Result<Amplitude1D> {
    let om2 = apply_omega(&apply_omega(amp));
    let t2 = apply_time_pm(&apply_time_pm(amp)?)?;
    Ok(quarter(&add_amp(&om2, &t2)))
}

/// Apply a generator to a state, producing its image.
pub(crate) fn apply_generator(state: &BiphotonState, gen: &Generator) -> Result<StateImage> {
    match state {
        BiphotonState::Separable(s) => {
            let f = s.f_plus();
            let g = s.g_minus();
            let mut terms: Vec<(Amplitude1D, Amplitude1D)> = Vec::new();
            match *gen {
                Generator::Translation { .. } => {
                    let (a_p, a_m, b_p, b_m) = gen.pm_translation_coeffs().expect("translation");
                    if a_p != 0.0 || b_p != 0.0 {
                        let mut img = scale_amp(&apply_omega(f), a_p);
                        if b_p != 0.0 {
                            img = add_amp(&img, &scale_amp(&apply_time_pm(f)?, b_p));
                        }
                        terms.push((img, g.clone()));
                    }
                    if a_m != 0.0 || b_m != 0.0 {
                        let mut img = scale_amp(&apply_omega(g), a_m);
                        if b_m != 0.0 {
                            img = add_amp(&img, &scale_amp(&apply_time_pm(g)?, b_m));
                        }
                        terms.push((f.clone(), img));
                    }
                }
                Generator::Rotation { c1, c2 } => {
                    // c1 R1 + c2 R2 = s (R+ + R-) + d (w+ w- + t+ t-)/2,
                    // with s = (c1+c2)/2 and d = (c1-c2)/2.
                    let s_coef = f64::from(c1 + c2) / 2.0;
                    let d_coef = f64::from(c1 - c2) / 2.0;
                    if s_coef != 0.0 {
                        terms.push((scale_amp(&r_pm_axis(f)?, s_coef), g.clone()));
                        terms.push((f.clone(), scale_amp(&r_pm_axis(g)?, s_coef)));
                    }
                    if d_coef != 0.0 {
                        terms.push((
                            scale_amp(&apply_omega(f), d_coef / 2.0),
                            apply_omega(g),
                        ));
                        terms.push((
                            scale_amp(&apply_time_pm(f)?, d_coef / 2.0),
                            apply_time_pm(g)?,
                        ));
                    }
                }
                Generator::RotationPm { axis } => match axis {
                    PmAxis::Plus => terms.push((r_pm_axis(f)?, g.clone())),
                    PmAxis::Minus => terms.push((f.clone(), r_pm_axis(g)?)),
                },
            }
            Ok(StateImage::Pm(terms))
        }
        BiphotonState::Full(j) => {
            let img = match *gen {
                Generator::Translation { alpha, beta, gamma, delta } => {
                    let mut acc = Array2::<Complex64>::zeros(j.values().dim());
                    if alpha != 0.0 {
                        acc = acc + apply_omega_axis(j, Axis::One).values().mapv(|v| v * alpha);
                    }
                    if beta != 0.0 {
                        acc = acc + apply_omega_axis(j, Axis::Two).values().mapv(|v| v * beta);
                    }
                    if gamma != 0.0 {
                        acc = acc + apply_time_axis(j, Axis::One)?.values().mapv(|v| v * gamma);
                    }
                    if delta != 0.0 {
                        acc = acc + apply_time_axis(j, Axis::Two)?.values().mapv(|v| v * delta);
                    }
                    acc
                }
                Generator::Rotation { c1, c2 } => {
                    let mut acc = Array2::<Complex64>::zeros(j.values().dim());
                    for (c, axis) in [(c1, Axis::One), (c2, Axis::Two)] {
                        if c != 0 {
                            let om2 = apply_omega_axis(&apply_omega_axis(j, axis), axis);
                            let t2 = apply_time_axis(&apply_time_axis(j, axis)?, axis)?;
                            let half = f64::from(c) * 0.5;
                            acc = acc
                                + om2.values().mapv(|v| v * half)
                                + t2.values().mapv(|v| v * half);
                        }
                    }
                    acc
                }
                Generator::RotationPm { axis } => {
                    let sign = match axis {
                        PmAxis::Plus => 1.0,
                        PmAxis::Minus => -1.0,
                    };
                    // (w1 ± w2)^2 F
                    let g1 = *j.grid1();
                    let g2 = *j.grid2();
                    let om2 = j.map_values(|i, k, v| {
                        let w = g1.point(i) + sign * g2.point(k);
                        v * (w * w)
                    });
                    // (t1 ± t2)^2 F
                    let t1 = apply_time_axis(j, Axis::One)?;
                    let t11 = apply_time_axis(&t1, Axis::One)?;
                    let t12 = apply_time_axis(&t1, Axis::Two)?;
                    let t2 = apply_time_axis(j, Axis::Two)?;
                    let t22 = apply_time_axis(&t2, Axis::Two)?;
                    let tsq = t11.values() + &t22.values().view()
                        + t12.values().mapv(|v| v * (2.0 * sign));
                    (om2.values() + &tsq).mapv(|v| v * 0.25)
                }
            };
            Ok(StateImage::Full(Jsa2D::from_values(*j.grid1(), *j.grid2(), img)?))
        }
    }
}

/// Allowed imaginary residue, relative to scale, in quantities that must be
/// real (means of hermitian operators, swap overlaps).
pub(crate) const HERMITIAN_RESIDUE: f64 = 1e-8;

pub(crate) fn real_part_checked(z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > HERMITIAN_RESIDUE * scale.max(1.0) {
        Err(Error::NonHermitianOverlap { imag: z.im })
    } else {
        Ok(z.re)
    }
}

/// Variance of a hermitian generator image: `<img|img> - <psi|img>^2`.
pub(crate) fn variance_from_image(state: &BiphotonState, img: &StateImage) -> Result<f64> {
    let psi = state_as_image(state);
    let sq = image_inner(img, img)?;
    let mean_c = image_inner(&psi, img)?;
    let scale = sq.re.abs().sqrt().max(mean_c.norm());
    let mean = real_part_checked(mean_c, scale)?;
    let var = real_part_checked(sq, sq.re.abs())? - mean * mean;
    if var < -1e-10 {
        return Err(Error::InvalidInput(format!("variance came out negative: {var:.3e}")));
    }
    Ok(var.max(0.0))
}

/// `Var(H)` on the state, by quadrature.
pub fn variance(state: &BiphotonState, gen: &Generator) -> Result<f64> {
    let img = apply_generator(state, gen)?;
    variance_from_image(state, &img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::states::{make_cat, make_gaussian, CatSpec, GaussianSpec};

    fn gaussian(center: f64, sigma: f64, half: f64, n: usize) -> Amplitude1D {
        let grid = FrequencyGrid::centered(center, half, n).unwrap();
        make_gaussian(&GaussianSpec::new(center, sigma).unwrap(), &grid).unwrap()
    }

    #[test]
    fn omega_mean_of_centered_gaussian_vanishes() {
        let a = gaussian(0.0, 1.0, 12.0, 1024);
        let img = apply_omega(&a);
        let m = inner_product(&a, &img).unwrap();
        assert!(m.norm() < 1e-12);
    }

    #[test]
    fn time_mean_of_real_amplitude_vanishes() {
        let a = gaussian(2.0, 0.7, 9.0, 1024);
        let img = apply_time(&a).unwrap();
        let m = inner_product(&a, &img).unwrap();
        assert!(m.norm() < 1e-10);
    }

    #[test]
    fn commutator_is_i_per_axis_convention() {
        let a = gaussian(0.5, 1.1, 14.0, 1024);
        // single-mode: [w, t] = i
        let wt = apply_omega(&apply_time(&a).unwrap());
        let tw = apply_time(&apply_omega(&a)).unwrap();
        let comm: Vec<_> = wt
            .values()
            .iter()
            .zip(tw.values())
            .map(|(x, y)| x - y)
            .collect();
        let comm = Amplitude1D::from_values(*a.grid(), comm).unwrap();
        let c = inner_product(&a, &comm).unwrap();
        assert!((c - Complex64::new(0.0, 1.0)).norm() < 1e-8, "got {c}");
        // pm axes: [w, t] = 2i
        let wt = apply_omega(&apply_time_pm(&a).unwrap());
        let tw = apply_time_pm(&apply_omega(&a)).unwrap();
        let comm: Vec<_> = wt
            .values()
            .iter()
            .zip(tw.values())
            .map(|(x, y)| x - y)
            .collect();
        let comm = Amplitude1D::from_values(*a.grid(), comm).unwrap();
        let c = inner_product(&a, &comm).unwrap();
        assert!((c - Complex64::new(0.0, 2.0)).norm() < 1e-8, "got {c}");
    }

    #[test]
    fn swap_involution_is_bitwise() {
        let state = crate::states::SeparablePmState::from_specs(
            crate::states::AmplitudeSpec::Gaussian(GaussianSpec::new(2.0, 0.5).unwrap()),
            crate::states::AmplitudeSpec::Cat(CatSpec::new(0.0, 1.0, 8.0).unwrap()),
            None,
            None,
            128,
        )
        .unwrap();
        let j = state.to_full(128).unwrap();
        let twice = swap(&swap(&j).unwrap()).unwrap();
        assert_eq!(j.values(), twice.values());
    }

    #[test]
    fn translation_evolution_is_unitary_and_matches_pm_route() {
        let state = crate::states::SeparablePmState::from_specs(
            crate::states::AmplitudeSpec::Gaussian(GaussianSpec::new(1.0, 0.6).unwrap()),
            crate::states::AmplitudeSpec::Gaussian(GaussianSpec::new(0.0, 1.0).unwrap()),
            None,
            None,
            512,
        )
        .unwrap();
        let gen = Generator::translation(0.8, -0.3, 0.2, 0.5).unwrap();
        let kappa = 0.37;

        let full = state.to_full(512).unwrap();
        let evolved_full = evolve_translation(&full, &gen, kappa).unwrap();
        assert!((evolved_full.norm() - 1.0).abs() < 1e-12);

        let evolved_pm = evolve_translation_pm(&state, &gen, kappa).unwrap();
        let f_norm = evolved_pm.f_plus().norm();
        let g_norm = evolved_pm.g_minus().norm();
        assert!((f_norm - 1.0).abs() < 1e-12);
        assert!((g_norm - 1.0).abs() < 1e-12);

        // overlap <psi | U psi> must agree between representations
        let psi = BiphotonState::Full(full.clone());
        let ov_full = image_inner(
            &state_as_image(&psi),
            &state_as_image(&BiphotonState::Full(evolved_full)),
        )
        .unwrap();
        let ov_pm = image_inner(
            &state_as_image(&BiphotonState::Separable(state.clone())),
            &state_as_image(&BiphotonState::Separable(evolved_pm)),
        )
        .unwrap();
        assert!((ov_full - ov_pm).norm() < 1e-9, "{ov_full} vs {ov_pm}");
    }

    #[test]
    fn variance_routes_agree() {
        let state = crate::states::SeparablePmState::from_specs(
            crate::states::AmplitudeSpec::Gaussian(GaussianSpec::new(5.0, 0.3).unwrap()),
            crate::states::AmplitudeSpec::Gaussian(GaussianSpec::new(0.0, 1.2).unwrap()),
            None,
            None,
            1024,
        )
        .unwrap();
        let full = BiphotonState::Full(state.to_full(768).unwrap());
        let pm = BiphotonState::Separable(state);
        for gen in [
            Generator::omega_1(),
            Generator::omega_minus(),
            Generator::rotation(1, -1).unwrap(),
            Generator::rotation_pm(PmAxis::Plus),
        ] {
            let v_pm = variance(&pm, &gen).unwrap();
            let v_full = variance(&full, &gen).unwrap();
            assert!(
                (v_pm - v_full).abs() <= 1e-8 * v_pm.abs().max(1.0),
                "{gen:?}: pm {v_pm} vs full {v_full}"
            );
        }
    }

    #[test]
    fn generator_json_schema() {
        let g: Generator =
            serde_json::from_str(r#"{"kind":"rotation","c1":1,"c2":-1,"pm":null}"#).unwrap();
        assert_eq!(g, Generator::rotation(1, -1).unwrap());
        let g: Generator = serde_json::from_str(r#"{"kind":"rotation","pm":"minus"}"#).unwrap();
        assert_eq!(g, Generator::rotation_pm(PmAxis::Minus));
        assert!(serde_json::from_str::<Generator>(r#"{"kind":"rotation","c1":0,"c2":0}"#).is_err());
        assert!(serde_json::from_str::<Generator>(
            r#"{"kind":"translation","alpha":0,"beta":0,"gamma":0,"delta":0}"#
        )
        .is_err());
        let g = Generator::omega_minus();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<Generator>(&s).unwrap(), g);
    }
}
