//! Numerical kernels: fixed-step RK4, commuting-sweep grid marching, small
//! dense linear algebra and finite differences on uniform grids.

pub mod grid;
pub mod linalg;
pub mod march;

pub use grid::{AxisSpec, FieldGrid};
pub use linalg::{lu_solve, pinv_solve, Lu, Mat};
pub use march::{grid_march, integrate_path, integrate_segment, rk4_step, MarchOptions, MarchResult, SweepOrder};
