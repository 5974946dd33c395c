//! Coverage, rate, area spectrum efficiency and energy efficiency of a
//! full-duplex Poisson cellular network under four downlink power-control
//! schemes, evaluated three ways: closed-form Laplace-transform bounds,
//! exact numerical integration, and Monte-Carlo simulation.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod optimizer;
pub mod power_control;
pub mod quadrature;
pub mod stats;

pub use error::{Error, Result};
pub use model::{NetworkConfig, PerformanceReport, ReportSource};
pub use power_control::PowerControlScheme;
