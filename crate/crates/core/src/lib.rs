//! Numerical core for embedding discrete systems into band-limited signal flows.
//!
//! The crate is organised bottom-up: [`quadrature`] and [`signals`] provide the
//! analytic primitives, [`tiling`] builds equivariant interval tilings from
//! marker sequences, [`theta`] selects the constants of the zero-placing
//! kernel, [`phi`] evaluates the tiling-like map and its perturbation steps,
//! and [`flows`] holds the desk-scale flows and suspension machinery.

pub mod flows;
pub mod phi;
pub mod quadrature;
pub mod signals;
pub mod theta;
pub mod tiling;

pub use num_complex::Complex64;
