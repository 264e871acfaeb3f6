//! Generalized Hong-Ou-Mandel interferometer: evolve with `exp(-i kappa H)`,
//! interfere at a balanced beam splitter, post-select on coincidences.
//!
//! Post-selection is implemented by the swap-projection identity
//! `P_c = (1 - <psi| U^dag S U |psi>) / 2`, which is numerically exact on
//! grids; the four-component beam-splitter bookkeeping it replaces is kept
//! around as a cross-check (`coincidence_via_projection`).

use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    self, evolve, image_inner, state_as_image, EvolveOptions, Generator,
};
use crate::states::BiphotonState;

/// Outcome probabilities of one interferometer setting.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HomOutcome {
    pub p_coincidence: f64,
    pub p_anticoincidence: f64,
    /// `<psi| U^dag S U |psi>`, real for physical inputs.
    pub overlap: f64,
}

impl HomOutcome {
    fn from_overlap(overlap: f64) -> Result<Self> {
        if overlap.abs() > 1.0 + 1e-10 {
            return Err(Error::NonHermitianOverlap { imag: overlap.abs() - 1.0 });
        }
        let p_c = 0.5 * (1.0 - overlap);
        Ok(Self { p_coincidence: p_c, p_anticoincidence: 1.0 - p_c, overlap })
    }
}

/// Coincidence-probability scan over evolution parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomScan {
    pub kappas: Vec<f64>,
    pub outcomes: Vec<HomOutcome>,
    pub generator: Generator,
}

impl HomScan {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "kappa,p_coincidence,p_anticoincidence")?;
        for (k, o) in self.kappas.iter().zip(&self.outcomes) {
            writeln!(out, "{},{},{}", k, o.p_coincidence, o.p_anticoincidence)?;
        }
        Ok(())
    }

    /// Spread of the coincidence probability across the scan.
    pub fn flatness(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for o in &self.outcomes {
            lo = lo.min(o.p_coincidence);
            hi = hi.max(o.p_coincidence);
        }
        hi - lo
    }
}

/// Coincidence probability after evolving by `exp(-i kappa H)`.
pub fn coincidence_with(
    state: &BiphotonState,
    gen: &Generator,
    kappa: f64,
    opts: &EvolveOptions,
) -> Result<HomOutcome> {
    let evolved = evolve(state, gen, kappa, opts)?;
    let img = state_as_image(&evolved);
    let swapped = img.swapped()?;
    let z = image_inner(&img, &swapped)?;
    if z.im.abs() > 1e-8 {
        return Err(Error::NonHermitianOverlap { imag: z.im });
    }
    HomOutcome::from_overlap(z.re)
}

/// [`coincidence_with`] under default evolution options.
pub fn coincidence(state: &BiphotonState, gen: &Generator, kappa: f64) -> Result<HomOutcome> {
    coincidence_with(state, gen, kappa, &EvolveOptions::default())
}

/// Coincidence probability via the post-selected output state
/// `|psi_fin> = (S U - U)|psi> / 2`, i.e. `P_c = ||(S - 1) U psi||^2 / 4`.
/// Algebraically identical to [`coincidence`]; kept as an independent route
/// for validation.
pub fn coincidence_via_projection(
    state: &BiphotonState,
    gen: &Generator,
    kappa: f64,
    opts: &EvolveOptions,
) -> Result<f64> {
    let evolved = evolve(state, gen, kappa, opts)?;
    let img = state_as_image(&evolved);
    let diff = img.swapped()?.sub(img)?;
    let norm_sq = image_inner(&diff, &diff)?;
    Ok(0.25 * norm_sq.re)
}

/// Uniform scan of `kappa` over `[kappa_min, kappa_max]`.
pub fn scan(
    state: &BiphotonState,
    gen: &Generator,
    kappa_min: f64,
    kappa_max: f64,
    n_steps: usize,
    opts: &EvolveOptions,
) -> Result<HomScan> {
    if n_steps < 3 {
        return Err(Error::InvalidInput(format!("scan needs at least 3 steps, got {n_steps}")));
    }
    if !(kappa_max > kappa_min) {
        return Err(Error::InvalidInput("scan range must be increasing".into()));
    }
    let step = (kappa_max - kappa_min) / (n_steps - 1) as f64;
    let kappas: Vec<f64> = (0..n_steps).map(|i| kappa_min + i as f64 * step).collect();
    let results = crate::par::map_slice(&kappas, |&k| coincidence_with(state, gen, k, opts));
    let mut outcomes = Vec::with_capacity(n_steps);
    for r in results {
        outcomes.push(r?);
    }
    Ok(HomScan { kappas, outcomes, generator: *gen })
}

/// Draw `n` Bernoulli events with the outcome's coincidence probability.
///
/// ChaCha8 keyed by `seed` gives bit-identical draws on every platform.
/// Returns `(n_coincidence, n_anticoincidence)`.
pub fn sample_events(outcome: &HomOutcome, n: u64, seed: u64) -> (u64, u64) {
    let p = outcome.p_coincidence.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_c = Binomial::new(n, p).expect("validated probability").sample(&mut rng);
    (n_c, n - n_c)
}

/// Same sampler, with the repetition index mapped to an independent ChaCha
/// stream so repetitions can run in any order (or in parallel) and still
/// reproduce.
pub fn sample_events_stream(outcome: &HomOutcome, n: u64, seed: u64, stream: u64) -> (u64, u64) {
    let p = outcome.p_coincidence.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let n_c = Binomial::new(n, p).expect("validated probability").sample(&mut rng);
    (n_c, n - n_c)
}

/// Swap expectation `<psi|S|psi>` of the un-evolved state.
pub fn swap_expectation(state: &BiphotonState) -> Result<f64> {
    let img = state_as_image(state);
    let z = image_inner(&img, &img.swapped()?)?;
    operators::real_part_checked(z, 1.0)
}

/// Exchange symmetry classification used by the closed-form Fisher
/// information: +1 (symmetric), -1 (antisymmetric), or an error when the
/// state is neither within `tol`.
pub fn symmetry_sign(state: &BiphotonState, tol: f64) -> Result<f64> {
    let s = swap_expectation(state)?;
    if (s - 1.0).abs() <= tol {
        Ok(1.0)
    } else if (s + 1.0).abs() <= tol {
        Ok(-1.0)
    } else {
        Err(Error::SymmetryViolation(format!(
            "<S> = {s:.6}, neither +1 nor -1 within {tol:.1e}"
        )))
    }
}

#[allow(unused)]
fn complex_norm(z: Complex64) -> f64 {
    z.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{AmplitudeSpec, CatSpec, GaussianSpec, SeparablePmState};

    fn gaussian_pair() -> BiphotonState {
        BiphotonState::Separable(
            SeparablePmState::from_specs(
                AmplitudeSpec::Gaussian(GaussianSpec::new(2.0, 0.4).unwrap()),
                AmplitudeSpec::Gaussian(GaussianSpec::new(0.0, 1.0).unwrap()),
                None,
                None,
                1024,
            )
            .unwrap(),
        )
    }

    fn odd_cat_pair() -> BiphotonState {
        BiphotonState::Separable(
            SeparablePmState::from_specs(
                AmplitudeSpec::Gaussian(GaussianSpec::new(2.0, 0.4).unwrap()),
                AmplitudeSpec::Cat(CatSpec::new(0.0, 1.0, 10.0).unwrap()),
                None,
                None,
                1024,
            )
            .unwrap(),
        )
    }

    #[test]
    fn symmetric_state_no_coincidences_at_zero() {
        let out = coincidence(&gaussian_pair(), &Generator::omega_1(), 0.0).unwrap();
        assert!(out.p_coincidence.abs() < 1e-12);
        assert!((out.overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antisymmetric_state_all_coincidences_at_zero() {
        let out = coincidence(&odd_cat_pair(), &Generator::omega_1(), 0.0).unwrap();
        assert!((out.p_coincidence - 1.0).abs() < 1e-12);
        assert!((out.overlap + 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one_and_match_projection_route() {
        let state = odd_cat_pair();
        let gen = Generator::omega_minus();
        for &k in &[0.0, 0.1, 0.35, 0.8] {
            let out = coincidence(&state, &gen, k).unwrap();
            assert!((out.p_coincidence + out.p_anticoincidence - 1.0).abs() < 1e-12);
            assert!((out.p_coincidence - 0.5 * (1.0 - out.overlap)).abs() < 1e-12);
            let via = coincidence_via_projection(&state, &gen, k, &EvolveOptions::default())
                .unwrap();
            assert!((via - out.p_coincidence).abs() < 1e-12);
        }
    }

    #[test]
    fn omega_plus_scan_is_flat() {
        let s = scan(
            &odd_cat_pair(),
            &Generator::omega_plus(),
            -1.0,
            1.0,
            21,
            &EvolveOptions::default(),
        )
        .unwrap();
        assert!(s.flatness() < 1e-12, "flatness {}", s.flatness());
    }

    #[test]
    fn symmetric_scan_in_kappa() {
        let s = scan(
            &odd_cat_pair(),
            &Generator::omega_minus(),
            -0.6,
            0.6,
            13,
            &EvolveOptions::default(),
        )
        .unwrap();
        let n = s.kappas.len();
        for i in 0..n {
            let a = s.outcomes[i].p_coincidence;
            let b = s.outcomes[n - 1 - i].p_coincidence;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_degenerate_cases_work() {
        let sure = HomOutcome::from_overlap(-1.0).unwrap();
        assert_eq!(sample_events(&sure, 1000, 7), (1000, 0));
        let half = HomOutcome::from_overlap(0.0).unwrap();
        let a = sample_events(&half, 100_000, 42);
        let b = sample_events(&half, 100_000, 42);
        assert_eq!(a, b);
        assert_ne!(sample_events(&half, 100_000, 43), a);
    }
}
