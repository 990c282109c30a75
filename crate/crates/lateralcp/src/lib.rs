//! Lateral Casimir–Polder interaction of a ground-state atom above a
//! corrugated, perfectly reflecting surface.
//!
//! The central object is the response function g(k, z_A): the kernel that
//! maps each Fourier component of a shallow surface corrugation onto the
//! first-order lateral interaction energy of an atom at height z_A,
//!
//!   U⁽¹⁾(x, z_A) = Σ_{n≥1} aₙ cos(n k_c x) · g(n k_c, z_A).
//!
//! [`response`] evaluates g either from the full scattering quadrature
//! (arbitrary polarizability spectrum) or from closed forms in the retarded
//! (Casimir–Polder) and non-retarded (van der Waals) limits, alongside the
//! proximity-force (k → 0) and pairwise-summation approximations.
//! [`corrugation`] supplies periodic profiles and assembles lateral
//! potentials, forces and curvatures; [`bec`] averages the curvature over a
//! Thomas–Fermi cloud to predict the relative shift of a trapped
//! condensate's dipole oscillation frequency; [`sweep`] drives the
//! parameter scans behind the `lateralcp` CLI.
//!
//! Lower-level support: [`scattering`] (plane-wave basis and first-order
//! nonspecular reflection on a perfect conductor), [`quad`] (adaptive
//! Gauss–Legendre and periodic-trapezoid quadrature), [`bessel`], [`interp`]
//! (monotone cubic interpolation), [`polarizability`], [`exec`]
//! (parallel/sequential map), [`config`] and [`scan`] (I/O).

pub mod bec;
pub mod bessel;
pub mod config;
pub mod constants;
pub mod corrugation;
pub mod error;
pub mod exec;
pub mod interp;
pub mod polarizability;
pub mod quad;
pub mod response;
pub mod scan;
pub mod scattering;
pub mod sweep;

pub use error::{LcpError, Result};
