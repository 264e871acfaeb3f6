//! Numerical engine for time-frequency metrology with one- and two-photon
//! spectral states.
//!
//! The crate works with dimensionless frequency/time variables throughout.
//! Photon spectra live on uniform [`grid::FrequencyGrid`]s; two-photon states
//! are either a dense joint spectral amplitude ([`states::Jsa2D`]) or the
//! separable plus/minus form f(w+) g(w-) ([`states::SeparablePmState`]), which
//! admits exact one-dimensional quadrature for every operation built here.
//!
//! Main subsystems:
//!
//! * [`states`] — Gaussian and cat spectral amplitudes, normalization,
//!   the plus/minus coordinate change, JSON specs and CSV export.
//! * [`operators`] — frequency/time operator images, swap, phase-space
//!   translations, and fractional-Fourier rotations via the Hermite-Gauss
//!   eigenbasis ([`hermite::HermiteBasis`]).
//! * [`hom`] — the generalized Hong-Ou-Mandel interferometer: coincidence
//!   probabilities, parameter scans, and Bernoulli event sampling.
//! * [`metrology`] — quantum and classical Fisher information, measurement
//!   optimality classification, a Cramér-Rao Monte-Carlo demonstration, and
//!   the collective-rotation scaling demo.
//! * [`wigner`] — chronocyclic Wigner maps, their translation/rotation
//!   covariance, overlap identities, and fringe measurements.
//!
//! Everything is pure and deterministic: states are immutable after
//! construction and random draws are seeded explicitly. With the default
//! `parallel` feature, grid evaluations and parameter sweeps fan out over
//! rayon; disabling the feature yields a bit-identical sequential build
//! (map results are collected in index order and reduced sequentially).

pub mod error;
pub mod fourier;
pub mod grid;
pub mod hermite;
pub mod hom;
pub mod metrology;
pub mod operators;
mod par;
pub mod states;
pub mod tables;
pub mod wigner;

pub use error::{Error, Result};
pub use grid::FrequencyGrid;
pub use operators::{Generator, PmAxis};
pub use states::{Amplitude1D, BiphotonState, CatSpec, GaussianSpec, Jsa2D, Parity, SeparablePmState};
