//! H∞ norm computation for linear time-invariant descriptor systems.
//!
//! The crate covers continuous-time systems `E ẋ = Ax + Bu, y = Cx + Du` and
//! their discrete-time counterparts. The global algorithms combine level-set
//! eigenvalue computations on a `2n × 2n` pencil with cheap local
//! maximization of the gain `‖G(·)‖₂`, so that the expensive eigensolve is
//! mostly needed only to certify that a maximizer is global.
//!
//! The crate is `no_std` with `alloc`. The `std` feature (on by default)
//! only adds thread-based parallel maps over independent optimization runs.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod prelude;

pub mod error;
pub mod levelset;
pub mod linalg;
pub mod norm;
pub mod optim1d;
pub mod par;
pub mod pencil;
pub mod system;
pub mod transfer;

pub use error::{Error, Result};
pub use linalg::{CMat, CscMatrix, C64};
pub use norm::{hinf_approx_local, hinf_norm, verify_level, AlgoConfig, LevelCheck, NormResult, Variant};
pub use optim1d::{LocalMaximum, Method, OptimizerConfig};
pub use system::{Domain, Frequency, Operator, SpectrumPoint, StateSpaceSystem, Storage};
pub use transfer::{GainDerivatives, SvdMode, TransferSample};
