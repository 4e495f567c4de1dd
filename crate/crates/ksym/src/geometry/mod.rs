//! Coordinate geometry of the bundle of k¹-velocities.
//!
//! A point of T¹ₖQ is stored flat as `[q^1..q^n, u_1^1..u_1^n, .., u_k^1..u_k^n]`
//! (see [`TkLayout`]). Frames are matrices whose rows are the frame vectors
//! in coordinate components.

pub mod algebra;
pub mod field;
pub mod frame;
pub mod lifts;
pub mod point;
pub mod prolong;

pub use algebra::LieAlgebraData;
pub use field::{lie_bracket, max_norm, Component, ExprField, ExprKField, KVectorField, VectorField};
pub use frame::{natural_from_quasi, quasi_from_natural, ExprFrame, FrameFn, FrameVector, IdentityFrame};
pub use lifts::{complete_lift, vertical_lift, CompleteLift, Split, VerticalLift};
pub use point::{KTangentPoint, TkLayout};
pub use prolong::prolong_discrete;
