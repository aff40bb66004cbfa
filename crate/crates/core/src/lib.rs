//! Frequency-estimation uncertainty of Ramsey spectroscopy with separable,
//! spin-squeezed and GHZ probes under classical dephasing noise that is
//! correlated in time (also across shots) and in space.

pub mod dicke;
pub mod mc;
pub mod error;
pub mod noise;
pub mod optimizer;
pub mod quad;
pub mod uncertainty;

pub use error::{Error, Result};
