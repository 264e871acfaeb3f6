//! Fisher-information analysis of HOM measurements.
//!
//! For a pure probe evolving under `exp(-i kappa H)` the quantum Fisher
//! information is `Q = 4 Var(H)`. When the probe is symmetric or
//! antisymmetric under photon exchange, the coincidence measurement at
//! `kappa = 0` has Fisher information `F = Var(G)` with `G = H - S H S`:
//! `F = 0` when `[H, S] = 0` (the measurement is blind) and `F = Q` when
//! `{H, S} = 0` (the measurement is optimal).
//!
//! The operational route extracts `F` from the curvature of the coincidence
//! dip/peak: expanding `<U^dag S U>` to second order gives
//! `P_c(kappa) = P_c(0) ± (F/4) kappa^2`, so `F = 4 |c2| = 2 |P_c''(0)|`.
//! That factor is pinned by regression tests against `Var(G)` on several
//! states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hom::{self, HomScan};
use crate::operators::{
    apply_generator, image_inner, variance, variance_from_image, EvolveOptions,
    Generator,
};
use crate::states::BiphotonState;

/// Exchange symmetry of the probe state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    None,
}

/// Relation of the generator to the swap operator on the probe's support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Commutation {
    Commutes,
    Anticommutes,
    Neither,
}

/// Verdict on the HOM measurement for this probe/generator pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimality {
    Optimal,
    Suboptimal,
    Blind,
}

/// Full analysis record for one probe/generator pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetrologyReport {
    pub qfi: f64,
    pub fi_analytic: f64,
    pub fi_curvature: f64,
    pub optimal: Optimality,
    pub symmetry: Symmetry,
    pub commutation: Commutation,
}

/// Numerical knobs for the metrology routines.
#[derive(Debug, Clone, Copy)]
pub struct MetrologyOptions {
    pub evolve: EvolveOptions,
    /// Grid size used when a separable probe must be densified for an
    /// evolution that breaks separability.
    pub full_grid_n: usize,
    /// Half-step of the internal curvature scan; `None` picks one from the
    /// QFI scale.
    pub curvature_step: Option<f64>,
}

impl Default for MetrologyOptions {
    fn default() -> Self {
        Self { evolve: EvolveOptions::default(), full_grid_n: 512, curvature_step: None }
    }
}

/// Quantum Fisher information `4 Var(H)`.
pub fn qfi(state: &BiphotonState, gen: &Generator) -> Result<f64> {
    Ok(4.0 * variance(state, gen)?)
}

/// Tolerance on `<S>` for the (anti)symmetry precondition of the closed-form
/// Fisher information.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// Closed-form Fisher information of the coincidence measurement at
/// `kappa = 0`: `Var(H - S H S)`. Requires an (anti)symmetric probe.
pub fn fi_analytic(state: &BiphotonState, gen: &Generator) -> Result<f64> {
    hom::symmetry_sign(state, SYMMETRY_TOLERANCE)?;
    let img = generator_minus_conjugated(state, gen)?;
    variance_from_image(state, &img)
}

/// Image of `(H - S H S) psi`.
fn generator_minus_conjugated(
    state: &BiphotonState,
    gen: &Generator,
) -> Result<crate::operators::StateImage> {
    let direct = apply_generator(state, gen)?;
    let swapped_state = swap_state(state)?;
    let conjugated = apply_generator(&swapped_state, gen)?.swapped()?;
    direct.sub(conjugated)
}

fn swap_state(state: &BiphotonState) -> Result<BiphotonState> {
    match state {
        BiphotonState::Separable(s) => {
            Ok(BiphotonState::Separable(crate::operators::swap_pm(s)?))
        }
        BiphotonState::Full(j) => Ok(BiphotonState::Full(crate::operators::swap(j)?)),
    }
}

/// Classify `[H, S]` and `{H, S}` on the probe's support.
pub fn commutation_class(state: &BiphotonState, gen: &Generator) -> Result<Commutation> {
    let swapped_state = swap_state(state)?;
    // H S psi and S H psi
    let h_s = apply_generator(&swapped_state, gen)?;
    let s_h = apply_generator(state, gen)?.swapped()?;
    let comm = h_s.clone().sub(s_h.clone())?;
    let anti = h_s.clone().sub(s_h.neg()?)?;
    let scale = image_inner(&h_s, &h_s)?.re.sqrt().max(1e-300);
    let comm_norm = image_inner(&comm, &comm)?.re.sqrt();
    let anti_norm = image_inner(&anti, &anti)?.re.sqrt();
    const TOL: f64 = 1e-8;
    if comm_norm <= TOL * scale {
        Ok(Commutation::Commutes)
    } else if anti_norm <= TOL * scale {
        Ok(Commutation::Anticommutes)
    } else {
        Ok(Commutation::Neither)
    }
}

/// Exchange symmetry of the probe.
pub fn symmetry_class(state: &BiphotonState) -> Result<Symmetry> {
    let s = hom::swap_expectation(state)?;
    if (s - 1.0).abs() <= SYMMETRY_TOLERANCE {
        Ok(Symmetry::Symmetric)
    } else if (s + 1.0).abs() <= SYMMETRY_TOLERANCE {
        Ok(Symmetry::Antisymmetric)
    } else {
        Ok(Symmetry::None)
    }
}

/// Fisher information from the curvature of a coincidence scan around
/// `kappa = 0`.
///
/// Uses nested second differences with Richardson extrapolation (steps `h`
/// and `2h`), and validates the extracted quadratic+quartic model against the
/// `±3h` samples. The scan must contain a sample at `kappa = 0` with at least
/// three uniformly spaced samples on each side, and the operating point must
/// be an extremum (`P_c(0)` within 1e-6 of 0 or 1).
pub fn fi_curvature(scan: &HomScan) -> Result<f64> {
    let n = scan.kappas.len();
    if n < 7 {
        return Err(Error::InvalidInput(format!("curvature fit needs >= 7 points, got {n}")));
    }
    let i0 = scan
        .kappas
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let h = if i0 + 1 < n {
        scan.kappas[i0 + 1] - scan.kappas[i0]
    } else {
        scan.kappas[i0] - scan.kappas[i0 - 1]
    };
    if scan.kappas[i0].abs() > 1e-9 * h {
        return Err(Error::InvalidInput("scan must contain kappa = 0".into()));
    }
    if i0 < 3 || i0 + 3 >= n {
        return Err(Error::InvalidInput("scan must bracket kappa = 0 by >= 3 points".into()));
    }
    for off in 1..=3_usize {
        let up = scan.kappas[i0 + off] - scan.kappas[i0];
        let dn = scan.kappas[i0] - scan.kappas[i0 - off];
        let target = off as f64 * h;
        if (up - target).abs() > 1e-9 * h || (dn - target).abs() > 1e-9 * h {
            return Err(Error::InvalidInput("curvature window must be uniformly spaced".into()));
        }
    }
    let p = |i: i64| scan.outcomes[(i0 as i64 + i) as usize].p_coincidence;
    let p0 = p(0);
    if p0.min(1.0 - p0) > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "operating point P_c(0) = {p0:.6} is not an extremum of a (anti)symmetric probe"
        )));
    }

    let d1 = (p(1) - 2.0 * p0 + p(-1)) / (h * h);
    let d2 = (p(2) - 2.0 * p0 + p(-2)) / (4.0 * h * h);
    let second = (4.0 * d1 - d2) / 3.0;
    // quartic correction implied by the two step sizes
    let fourth = 4.0 * (d2 - d1) / (h * h);
    let model = |k: f64| p0 + 0.5 * second * k * k + fourth * k.powi(4) / 24.0;
    let residual = (p(3) - model(3.0 * h)).abs().max((p(-3) - model(-3.0 * h)).abs());
    let allowance = 1e-6 * (0.5 * second.abs() * (3.0 * h) * (3.0 * h)) + 1e-12;
    if residual > allowance {
        return Err(Error::PoorFit { residual, allowance });
    }
    Ok(2.0 * second.abs())
}

/// Build the symmetric 7-point scan used for curvature extraction.
pub fn curvature_scan(
    state: &BiphotonState,
    gen: &Generator,
    half_step: f64,
    opts: &EvolveOptions,
) -> Result<HomScan> {
    hom::scan(state, gen, -3.0 * half_step, 3.0 * half_step, 7, opts)
}

/// Densify a separable probe when the generator's evolution needs it.
fn scannable_state(
    state: &BiphotonState,
    gen: &Generator,
    opts: &MetrologyOptions,
) -> Result<BiphotonState> {
    match (state, gen) {
        (BiphotonState::Separable(s), Generator::Rotation { c1, c2 }) if c1 != c2 => {
            Ok(BiphotonState::Full(s.to_full(opts.full_grid_n)?))
        }
        _ => Ok(state.clone()),
    }
}

/// Assemble the full report: QFI, both Fisher-information routes, symmetry,
/// commutation, and the optimality verdict.
pub fn classify(
    state: &BiphotonState,
    gen: &Generator,
    opts: &MetrologyOptions,
) -> Result<MetrologyReport> {
    let q = qfi(state, gen)?;
    let fi = fi_analytic(state, gen)?;
    let symmetry = symmetry_class(state)?;
    let commutation = commutation_class(state, gen)?;

    let step = opts
        .curvature_step
        .unwrap_or_else(|| (0.4 / q.max(0.1).sqrt()).clamp(1e-3, 0.25));
    let scan_state = scannable_state(state, gen, opts)?;
    let scan = curvature_scan(&scan_state, gen, step, &opts.evolve)?;
    let fi_curv = fi_curvature(&scan)?;

    let optimal = if fi <= 1e-10 {
        Optimality::Blind
    } else if (fi - q).abs() <= 1e-6 * q {
        Optimality::Optimal
    } else {
        Optimality::Suboptimal
    };
    Ok(MetrologyReport { qfi: q, fi_analytic: fi, fi_curvature: fi_curv, optimal, symmetry, commutation })
}

// ---------------------------------------------------------------------------
// Cramér-Rao Monte-Carlo demonstration
// ---------------------------------------------------------------------------

/// Configuration of the Cramér-Rao demonstration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CrbConfig {
    pub kappa_true: f64,
    /// Shots per repetition.
    pub shots: u64,
    /// Number of independent repetitions (each gets its own RNG stream).
    pub repetitions: u32,
    pub seed: u64,
    /// Inversion bracket around `kappa_true`, as fractions of it.
    pub bracket_lo: f64,
    pub bracket_hi: f64,
}

impl CrbConfig {
    pub fn new(kappa_true: f64, shots: u64, repetitions: u32, seed: u64) -> Self {
        Self { kappa_true, shots, repetitions, seed, bracket_lo: 0.2, bracket_hi: 2.0 }
    }
}

/// Result of the Cramér-Rao demonstration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrbReport {
    pub kappa_true: f64,
    pub shots: u64,
    pub repetitions: u32,
    pub seed: u64,
    /// Local Fisher information of the coincidence measurement at kappa_true.
    pub fisher_local: f64,
    /// Cramér-Rao bound `1 / sqrt(shots * fisher_local)`.
    pub crb: f64,
    pub mean_estimate: f64,
    pub empirical_std: f64,
    /// empirical_std / crb
    pub ratio: f64,
}

/// Maximum-likelihood estimation of `kappa` from binomial coincidence counts,
/// repeated over independent streams, against the local Cramér-Rao bound.
///
/// The coincidence curve is precomputed on a dense grid over the bracket and
/// must be strictly monotone there; each repetition inverts its observed
/// coincidence frequency through the curve by bisection.
pub fn crb_demo(
    state: &BiphotonState,
    gen: &Generator,
    cfg: &CrbConfig,
    opts: &EvolveOptions,
) -> Result<CrbReport> {
    if cfg.shots == 0 || cfg.repetitions == 0 {
        return Err(Error::InvalidInput("shots and repetitions must be positive".into()));
    }
    let lo = cfg.kappa_true * cfg.bracket_lo;
    let hi = cfg.kappa_true * cfg.bracket_hi;
    if !(hi > lo) {
        return Err(Error::InvalidInput("empty inversion bracket".into()));
    }

    // dense curve over the bracket
    const CURVE_POINTS: usize = 2001;
    let curve = hom::scan(state, gen, lo, hi, CURVE_POINTS, opts)?;
    let pc: Vec<f64> = curve.outcomes.iter().map(|o| o.p_coincidence).collect();
    let increasing = pc[CURVE_POINTS - 1] > pc[0];
    let mut span = 0.0_f64;
    for w in pc.windows(2) {
        let d = if increasing { w[1] - w[0] } else { w[0] - w[1] };
        span = span.max(w[1] - w[0]);
        if d < 0.0 {
            return Err(Error::NonInvertible(
                "coincidence curve is not monotone over the inversion bracket".into(),
            ));
        }
    }

    // local Fisher information at kappa_true by central difference
    let fd = 1e-4 * (hi - lo);
    let p_plus = hom::coincidence_with(state, gen, cfg.kappa_true + fd, opts)?.p_coincidence;
    let p_minus = hom::coincidence_with(state, gen, cfg.kappa_true - fd, opts)?.p_coincidence;
    let p_at = hom::coincidence_with(state, gen, cfg.kappa_true, opts)?.p_coincidence;
    let dp = (p_plus - p_minus) / (2.0 * fd);
    if dp.abs() < 1e-10 {
        return Err(Error::NonInvertible(format!(
            "coincidence curve is flat at kappa_true = {}",
            cfg.kappa_true
        )));
    }
    let fisher_local = dp * dp / (p_at * (1.0 - p_at));
    let crb = 1.0 / ((cfg.shots as f64) * fisher_local).sqrt();

    // invert observed frequencies through the curve
    let invert = |p_obs: f64| -> f64 {
        let (mut a, mut b) = (0usize, CURVE_POINTS - 1);
        let oriented = |p: f64| if increasing { p } else { -p };
        let target = oriented(p_obs);
        if target <= oriented(pc[a]) {
            return curve.kappas[a];
        }
        if target >= oriented(pc[b]) {
            return curve.kappas[b];
        }
        while b - a > 1 {
            let mid = (a + b) / 2;
            if oriented(pc[mid]) <= target {
                a = mid;
            } else {
                b = mid;
            }
        }
        // linear interpolation inside the cell
        let (pa, pb) = (pc[a], pc[b]);
        if (pb - pa).abs() < 1e-300 {
            return curve.kappas[a];
        }
        let t = (p_obs - pa) / (pb - pa);
        curve.kappas[a] + t * (curve.kappas[b] - curve.kappas[a])
    };

    let outcome_true = hom::coincidence_with(state, gen, cfg.kappa_true, opts)?;
    let estimates = crate::par::map_indices(cfg.repetitions as usize, |rep| {
        let (n_c, _) = hom::sample_events_stream(&outcome_true, cfg.shots, cfg.seed, rep as u64);
        invert(n_c as f64 / cfg.shots as f64)
    });

    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let var = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>()
        / (estimates.len() - 1) as f64;
    let empirical_std = var.sqrt();

    Ok(CrbReport {
        kappa_true: cfg.kappa_true,
        shots: cfg.shots,
        repetitions: cfg.repetitions,
        seed: cfg.seed,
        fisher_local,
        crb,
        mean_estimate: mean,
        empirical_std,
        ratio: empirical_std / crb,
    })
}

// ---------------------------------------------------------------------------
// Collective-rotation scaling demonstration
// ---------------------------------------------------------------------------

/// Sign pattern of the collective generator `sum_i alpha_i R_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignPattern {
    AllPlus,
    Alternating,
}

impl SignPattern {
    fn coefficient_sum(&self, n: usize) -> f64 {
        match self {
            SignPattern::AllPlus => n as f64,
            SignPattern::Alternating => {
                if n % 2 == 0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// QFI-versus-photon-number record for the maximally mode-entangled probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub n_values: Vec<usize>,
    pub qfi_values: Vec<f64>,
    /// Log-log least-squares exponent; absent when any QFI vanishes.
    pub fitted_exponent: Option<f64>,
}

/// Exact QFI of `H = sum_i alpha_i R_i` on the maximally mode-entangled state
/// `sum_k A_k |k>^(tensor n)`: each branch has eigenvalue
/// `(sum alpha)(k + 1/2)`, so `Q = 4 (sum alpha)^2 Var_k(k)` with the variance
/// taken over the coefficient distribution `|A_k|^2`.
pub fn scaling_demo(
    coefficients: &[f64],
    n_values: &[usize],
    signs: SignPattern,
) -> Result<ScalingReport> {
    if coefficients.is_empty() {
        return Err(Error::InvalidInput("need at least one coefficient".into()));
    }
    if n_values.is_empty() {
        return Err(Error::InvalidInput("need at least one photon number".into()));
    }
    let norm: f64 = coefficients.iter().map(|a| a * a).sum();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "coefficients must be normalized (|A|^2 sums to {norm:.6})"
        )));
    }
    let mean_k: f64 =
        coefficients.iter().enumerate().map(|(k, a)| k as f64 * a * a).sum();
    let mean_k2: f64 =
        coefficients.iter().enumerate().map(|(k, a)| (k * k) as f64 * a * a).sum();
    let var_k = (mean_k2 - mean_k * mean_k).max(0.0);

    let qfi_values: Vec<f64> = n_values
        .iter()
        .map(|&n| {
            let s = signs.coefficient_sum(n);
            4.0 * s * s * var_k
        })
        .collect();

    let fitted_exponent = fit_log_log(n_values, &qfi_values);
    Ok(ScalingReport { n_values: n_values.to_vec(), qfi_values, fitted_exponent })
}

fn fit_log_log(n_values: &[usize], qfi_values: &[f64]) -> Option<f64> {
    if n_values.len() < 2 || qfi_values.iter().any(|&q| q <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = qfi_values.iter().map(|&q| q.ln()).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_uniform_two_mode_is_n_squared() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let ns = [2, 3, 4, 5, 6];
        let rep = scaling_demo(&[inv, inv], &ns, SignPattern::AllPlus).unwrap();
        for (&n, &q) in ns.iter().zip(&rep.qfi_values) {
            assert!((q - (n * n) as f64).abs() < 1e-12);
        }
        assert!((rep.fitted_exponent.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_balanced_signs_vanish() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let rep = scaling_demo(&[inv, inv], &[2, 4, 6], SignPattern::Alternating).unwrap();
        assert!(rep.qfi_values.iter().all(|&q| q == 0.0));
        assert!(rep.fitted_exponent.is_none());
    }

    #[test]
    fn scaling_rejects_unnormalized_coefficients() {
        assert!(scaling_demo(&[1.0, 1.0], &[2], SignPattern::AllPlus).is_err());
    }
}
