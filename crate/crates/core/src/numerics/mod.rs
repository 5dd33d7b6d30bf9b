//! Shared numerical kernels: grids, cumulative quadrature, adaptive ODE
//! integration with events, and bracketed root refinement.

mod grid;
mod ode;
mod quadrature;
mod root;
mod trajectory;

pub use grid::Grid;
pub use ode::{integrate_ode, Indicator, Tolerances, Watch};
pub use quadrature::{cumulative_integral, cumulative_integral_with, integral, QuadratureRule};
pub use root::refine_root;
pub use trajectory::{Event, EventKind, Trajectory};
