//! Anisotropic liquid-drop energies.
//!
//! The crate evaluates `P_f(E) + eps * V(E)` and its dual-norm variants
//! `P_f(E) + eps * U_i(E)` on concrete planar (and boxed n-dimensional)
//! shapes, and minimizes them over small shape families.
//!
//! * [`anisotropy`]: surface tensions `f`, their duals `f_*`, Wulff shapes.
//! * [`shapes`]: shape representations and their local geometry.
//! * [`nonlocal`]: Riesz potentials, interaction energies, dual potentials.
//! * [`energy`]: total energies, curvature, variations, diagnostics.
//! * [`optimize`]: family minimizers, truncation check, parameter scans.

pub mod anisotropy;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod nonlocal;
pub mod optimize;
pub mod quadrature;
pub mod shapes;
pub(crate) mod spectral;
pub mod special;

pub use error::{Error, Result};
