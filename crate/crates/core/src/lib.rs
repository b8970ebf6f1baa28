//! Deterministic herding dynamics for partially observed binary random
//! fields.
//!
//! Instead of learning a point estimate of a random field's weights, herding
//! moves the weights along a fixed-step ascent of the zero-temperature
//! likelihood. The resulting pseudo-samples match the data moments on
//! average, with no sampling and no exponentiation. The crate provides
//!
//! * [`model`]: RBM and fully enumerated feature families,
//! * [`maximize`]: the argmax routines herding relies on,
//! * [`tipi`]: the zero-temperature objective and its diagnostics,
//! * [`herding`]: the dynamical system, moment tracking and rate learning,
//! * [`eval`]: energy-based classification on top of per-class chains,
//! * [`io`]: the plain-text, CSV and PGM formats.

pub mod error;
pub mod eval;
pub mod exec;
pub mod fig1;
pub mod herding;
pub mod io;
pub mod maximize;
pub mod model;
pub mod synthetic;
pub mod tipi;

pub use error::{HerdError, Result};
pub use exec::Execution;
pub use herding::{ChainConfig, HerdState, Herder, JointSearch, RateVector, TransformParams, Variant};
pub use model::{Dataset, EnumeratedModel, FeatureModel, JointState, RbmModel, Spin, WeightVector};
