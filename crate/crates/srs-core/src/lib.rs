//! Numerical engine for stimulated Rayleigh scattering of a delayed
//! pump/probe pulse pair.
//!
//! The crate computes the second-order emission/absorption amplitudes of a
//! probe photon scattered off a ground-state atom driven by two Gaussian
//! pulses, the net single-atom probability `w_T = |A_em|^2 - |A_abs|^2`,
//! and the macroscopic, phase-matched gain of the probe over an atom
//! ensemble.
//!
//! All core math runs in Hartree atomic units; [`units`] converts at the
//! boundary. Several independent routes to the same observables are kept on
//! purpose (direct time-ordered integration, spectral quadrature, closed
//! forms) so they can be cross-checked against each other.

pub mod numerics;
pub mod phasematch;
pub mod polarizability;
pub mod pulses;
pub mod rayleigh;
pub mod units;

pub use num_complex::Complex64;
