//! Fourier collocation on uniform grids: spectral derivatives and exact
//! band-limited shifts.
//!
//! Both operations assume the sampled function decays below
//! [`EDGE_THRESHOLD`] at the grid boundary; otherwise the implied periodic
//! extension wraps amplitude around the edges and the caller gets an error
//! instead of a silently corrupted result.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Maximum boundary magnitude tolerated by derivative/shift operations.
pub const EDGE_THRESHOLD: f64 = 1e-8;

/// Largest magnitude on the first/last sample.
pub fn edge_magnitude(values: &[Complex64]) -> f64 {
    match (values.first(), values.last()) {
        (Some(a), Some(b)) => a.norm().max(b.norm()),
        _ => 0.0,
    }
}

fn check_edges(values: &[Complex64], threshold: f64) -> Result<()> {
    let m = edge_magnitude(values);
    if m > threshold {
        Err(Error::EdgeLeakage {
            magnitude: m,
            threshold,
        })
    } else {
        Ok(())
    }
}

/// Angular wavenumber of FFT bin `j` for `n` samples with spacing `h`.
/// Ordering follows the usual FFT layout: 0, 1, ..., n/2, -(n/2-1), ..., -1.
pub fn wavenumber(j: usize, n: usize, h: f64) -> f64 {
    let k = if j <= n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    };
    2.0 * std::f64::consts::PI * k / (n as f64 * h)
}

fn fft_roundtrip<M>(values: &[Complex64], h: f64, mutate: M) -> Vec<Complex64>
where
    M: Fn(usize, f64, &mut Complex64),
{
    let n = values.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = values.to_vec();
    fwd.process(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        mutate(j, wavenumber(j, n, h), v);
    }
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Spectral derivative d/domega of samples with spacing `h`.
///
/// The Nyquist bin is zeroed (its derivative sign is ambiguous on an even
/// grid); for amplitudes that decay at the edges its content is at rounding
/// level anyway.
pub fn derivative(values: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    check_edges(values, EDGE_THRESHOLD)?;
    let n = values.len();
    Ok(fft_roundtrip(values, h, |j, k, v| {
        if n % 2 == 0 && j == n / 2 {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= Complex64::new(0.0, k);
        }
    }))
}

/// Band-limited translation: returns samples of `f(omega - shift)`.
///
/// Exact for band-limited data; wrap-around leakage is detected by checking
/// the boundary magnitude of the result.
pub fn shift(values: &[Complex64], h: f64, shift_by: f64) -> Result<Vec<Complex64>> {
    check_edges(values, EDGE_THRESHOLD)?;
    let out = fft_roundtrip(values, h, |_, k, v| {
        *v *= Complex64::from_polar(1.0, -k * shift_by);
    });
    let m = edge_magnitude(&out);
    if m > EDGE_THRESHOLD {
        return Err(Error::SupportOverflow {
            magnitude: m,
            threshold: EDGE_THRESHOLD,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_samples(n: usize, min: f64, max: f64, sigma: f64) -> (Vec<Complex64>, f64) {
        let h = (max - min) / (n - 1) as f64;
        let v = (0..n)
            .map(|k| {
                let x = min + k as f64 * h;
                Complex64::new((-x * x / (2.0 * sigma * sigma)).exp(), 0.0)
            })
            .collect();
        (v, h)
    }

    #[test]
    fn derivative_matches_analytic_gaussian() {
        let n = 256;
        let (v, h) = gaussian_samples(n, -10.0, 10.0, 1.0);
        let d = derivative(&v, h).unwrap();
        for k in 0..n {
            let x = -10.0 + k as f64 * h;
            let expect = -x * (-x * x / 2.0).exp();
            assert!((d[k].re - expect).abs() < 1e-10, "at x={x}");
            assert!(d[k].im.abs() < 1e-12);
        }
    }

    #[test]
    fn shift_moves_peak() {
        let n = 512;
        let (v, h) = gaussian_samples(n, -12.0, 12.0, 1.0);
        let s = shift(&v, h, 3.0).unwrap();
        let peak = s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap()
            .0;
        let x_peak = -12.0 + peak as f64 * h;
        assert!((x_peak - 3.0).abs() <= h);
    }

    #[test]
    fn shift_off_grid_is_support_overflow() {
        let n = 128;
        let (v, h) = gaussian_samples(n, -8.0, 8.0, 1.0);
        let err = shift(&v, h, 7.5).unwrap_err();
        assert!(matches!(err, Error::SupportOverflow { .. }));
    }

    #[test]
    fn edgy_input_is_rejected() {
        let n = 64;
        let (v, h) = gaussian_samples(n, 0.0, 5.0, 2.0);
        assert!(matches!(
            derivative(&v, h),
            Err(Error::EdgeLeakage { .. })
        ));
    }
}
