//! Exact operator calculus, a method-of-steps initial-value engine, closed-form
//! segment formulas, characteristic roots and residual verifiers for the
//! differential-difference equation
//!
//! ```text
//! y'(x) = y(x + 1/2) - y(x - 1/2)
//! ```

pub mod charroots;
pub mod closedform;
pub mod expr;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod steps;
pub mod table;
pub mod triangular;
pub mod verify;

pub use expr::{parse, DerivativeTower, Expr, Func};
pub use poly::{s_n, Poly};
pub use rational::Rational;
