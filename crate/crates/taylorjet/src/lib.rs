//! Higher-order forward-mode automatic differentiation on truncated
//! Taylor jets.
//!
//! The centerpiece is an order-`n` pushforward: for a smooth map `f` and a
//! jet `(x, u_1, …, u_n)`, coefficient `i` of the output is the `ε^i` term
//! of the Taylor expansion of `f(x + ε u_1 + ⋯ + εⁿ u_n)`. Four
//! independently implemented algorithms compute it — a direct
//! higher-derivative sum, a derivative recursion, an iterated tangent
//! (nested dual number) route, and truncated power-series arithmetic — and
//! the test suite proves them equal on exact rationals, along with the
//! functor, monad, and naturality laws the pushforward satisfies.

pub mod combinatorics;
pub mod tangent;
pub mod wrel;
pub mod expr;
pub mod jet;
pub mod laws;
pub mod sampling;
pub mod scalar;

pub use combinatorics::Word;
pub use expr::{Expr, SmoothMap};
pub use scalar::{rat, Scalar, ScalarError};
