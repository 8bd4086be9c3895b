//! Certified computation of minimal points for pairs `(xi, eta)` of real
//! numbers given by continued fractions, together with the lattice and
//! growth checks that go with them.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact_reals`] turns partial-quotient streams into rational interval
//!   enclosures that can be refined on demand.
//! * [`words`] generates Fibonacci, Sturmian and periodic words used as
//!   partial-quotient sequences.
//! * [`minimal_points`] sweeps `x0 = 1..=X` and records the points where the
//!   best simultaneous approximation strictly improves.
//! * [`quadratic`] settles exact ties for quadratic-irrational inputs.
//! * [`geometry`] holds wedge products, subspace heights, Weil heights and
//!   quadratic forms.
//! * [`analysis`] estimates approximation exponents, checks the growth
//!   lemmas on a computed sequence and evaluates the counting and measure
//!   bounds.

pub mod analysis;
pub mod error;
pub mod exact_reals;
pub mod geometry;
pub mod hp;
pub mod minimal_points;
pub mod quadratic;
pub mod words;

pub use error::{Error, Result};
pub use exact_reals::{Enclosure, Rational, RealSpec};
pub use geometry::IntVec3;
pub use minimal_points::{MinimalPoint, SweepOptions};
