//! Pseudospectral solvers and a validation harness for a family of nonlinear
//! dispersive wave models: a fractional improved Boussinesq parent equation
//! with power nonlinearity and its unidirectional reductions (generalized
//! fractional Camassa-Holm, generalized/modified CH, generalized fractional
//! BBM and KdV).
//!
//! The crate is organized around:
//! - [`grid`], [`field`], [`ops`]: periodic grids, spectral transforms,
//!   Fourier-multiplier operators, dealiased polynomial nonlinearities;
//! - [`models`]: right-hand sides for every member of the family, in
//!   explicit evolution form;
//! - [`stepper`]: fixed-step RK4 and integrating-factor RK4;
//! - [`frames`]: exact coordinate/amplitude maps between the four frames;
//! - [`hierarchy`]: the order-by-order expansion closed forms and their
//!   residual certification;
//! - [`experiments`]: convergence sweeps, conservation and dispersion audits;
//! - [`oracles`]: independent reference implementations used by the test and
//!   validation suites (direct DFT, finite differences, exact mode algebra).

pub mod error;
pub mod field;
pub mod frames;
pub mod grid;
pub mod hierarchy;
pub mod models;
pub mod ops;
pub mod oracles;
pub mod params;
pub mod profiles;
pub mod stepper;

pub mod experiments;

pub use error::{Error, Result};
pub use field::{RealField, Spectrum};
pub use grid::Grid;
pub use params::{Frame, FrameConstants, ModelId, ModelParams};
