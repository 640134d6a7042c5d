//! Moving frames along space curves in Euclidean and Lorentzian 3-space,
//! and the membership tests built on them.
//!
//! The pipeline is: build a [`Curve`], reparametrize it in a metric
//! ([`reparametrize`]), attach a frame ([`frames`]), then read the normal
//! development for plane, sphere and quadric membership ([`characterize`]) or
//! evaluate the level-surface criteria ([`level_surface`]).

pub mod characterize;
pub mod curves;
pub mod error;
pub mod frames;
pub mod io;
pub mod jet;
pub mod level_surface;
pub mod numeric;
pub mod pseudo_metric;

pub use curves::{profile_causal, reparametrize, Curve, Family, ParamCurve, ParamKind};
pub use error::{Error, ErrorCategory, Result};
pub use pseudo_metric::{CausalCharacter, MetricField, PlaneCharacter, PseudoMetric};
