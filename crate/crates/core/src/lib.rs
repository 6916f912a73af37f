#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod scatter;
pub mod semiclassical;
pub mod specfun;
pub mod table;

pub use error::{Error, Result};
pub use num_complex::Complex;

pub type Well = model::WellParams<f64>;
pub type Barrier = model::BarrierParams<f64>;
pub type EnergyGrid = model::EnergyGridSpec<f64>;
pub type Eigenstate = bound::Eigenstate<f64>;
pub type ComplexScalar = Complex<f64>;
