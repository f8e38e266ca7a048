//! Exact Riemann solver and singular-shock analysis for the two-component
//! chromatography system
//!
//! ```text
//! v_t + (y/v)_x = 0
//! y_t + (1/v)_x = 0
//! ```
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root pin the scalar to `f64`, which is what the
//! tolerances in the documentation assume.

// `!(x > 0)` style checks are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod error;
pub mod fv;
pub mod gspt;
pub mod inner;
pub mod model;
pub mod numerics;
pub mod riemann;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PhysParams = model::PhysParams<f64>;
pub type State = model::State<f64>;
pub type PhysState = model::PhysState<f64>;
pub type CharField = model::CharField<f64>;
pub type Eigen = model::Eigen<f64>;
pub type Triangle = model::Triangle<f64>;

pub type WaveCurve = curves::WaveCurve<f64>;
pub type SpecialPoints = curves::SpecialPoints<f64>;

pub type Wave = riemann::Wave<f64>;
pub type RiemannSolution = riemann::RiemannSolution<f64>;
pub type SingularShockData = riemann::SingularShockData<f64>;

pub type InnerState = inner::InnerState<f64>;
pub type InnerOrbit = inner::InnerOrbit<f64>;
pub type AsymptoticFit = inner::AsymptoticFit<f64>;

pub type Chart2Point = gspt::Chart2Point<f64>;
pub type RegularizationExponents = gspt::RegularizationExponents<f64>;
pub type FrozenParams = gspt::FrozenParams<f64>;

pub type Grid1D = fv::Grid1D<f64>;
pub type SimConfig = fv::SimConfig<f64>;
pub type Snapshot = fv::Snapshot<f64>;
