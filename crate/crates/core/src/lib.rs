//! Closed-form continuous-time estimators for least squares.
//!
//! Gradient flow, accelerated (Nesterov) gradient flow and heavy-ball flow all
//! act on least squares as diagonal shrinkage maps in the eigenbasis of the
//! sample covariance `XᵀX/n`. This crate evaluates those maps, the exact
//! bias/variance/risk they induce along the whole optimization path, the ridge
//! baseline they are compared against, and the numerical constants that bound
//! the comparison.
//!
//! Module map:
//!
//! - [`special`]: Bessel `J₁` and the ratio `2J₁(x)/x`.
//! - [`linalg`]: Jacobi eigensolver and spectral coordinates of a design.
//! - [`shrinkage`]: the four scalar shrinkage maps.
//! - [`risk`]: fixed-signal and Bayes risk, optimal ridge, risk curves.
//! - [`estimators`]: coefficient paths and the ridge couplings.
//! - [`bounds`]: min-max constants and inequality certification.
//! - [`oracle`]: RK4 and discrete iterations used as independent checks.
//! - [`experiments`]: synthetic designs and figure sweeps.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod grid;
pub mod linalg;
pub mod oracle;
pub mod risk;
pub mod rng;
pub mod shrinkage;
pub mod special;

pub use error::{Error, Result};
pub use linalg::{SpectralDesign, Spectrum};
pub use risk::{FixedSignal, PriorSignal, RiskDecomposition, SignalModel};
pub use shrinkage::{FlowKind, ShrinkageProfile};
