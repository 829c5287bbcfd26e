pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod implementation;
pub mod io;
pub mod lp;
pub mod quantum;
pub mod report;
pub mod scalar;
pub mod simplex;
pub mod statistical;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use simplex::{Matrix, PartialStochasticMatrix, ProbVector, StochasticMatrix};
pub use trajectory::{EventSpec, Time, TimeGrid, TrajectoryMeasure, VectorTrajectory};
