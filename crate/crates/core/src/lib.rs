//! Wavelet-decomposed neural forecasting of state-of-polarization (SOP) drift
//! in aerial optical fibre, with weather inputs and wind-gated fusion of
//! short- and long-term forecasts.

pub mod error;
pub mod forecast;
pub mod fusion;
pub mod harness;
pub mod neural;
pub mod series;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
