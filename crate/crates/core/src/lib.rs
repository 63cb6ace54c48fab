//! Verification engine for a family of strongly degenerate homogeneous
//! pseudo-Kähler wave metrics, together with their Lorentzian plane-wave
//! analogues and quaternionic variants.
//!
//! The library is organised bottom-up: exact jets in the two wave
//! coordinates, metric evaluation, pointwise tensor calculus, curve
//! numerics, and then the structure-specific layers (Kähler identities,
//! holonomy, the homogeneous Lie model, plane waves, quaternionic algebra).

pub mod config;
pub mod geodesic;
pub mod geometry;
pub mod holonomy;
pub mod jets;
pub mod kahler;
pub mod lie_model;
pub mod linalg;
pub mod metric;
pub mod ode;
pub mod quaternionic;
pub mod rational;
pub mod report;
pub mod suites;
pub mod tensor;
pub mod waves;
