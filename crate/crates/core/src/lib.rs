//! Crossing limit cycles of planar piecewise systems whose switching curve is
//! the union of the two nonnegative semi-axes.
//!
//! The first quadrant carries a linear Hamiltonian saddle, the rest of the
//! plane an affinely transformed quadratic isochronous center. Cycles that
//! cross the switching curve exactly twice are located algebraically from
//! first-integral closing conditions and then confirmed by integration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closing;
pub mod fields;
pub mod orbits;
pub mod polycore;
pub mod solver;
