//! Exact free-field realization of the level-two highest weight modules of
//! the quantum affine algebra U_q(sl2-hat) and of their type I / type II
//! vertex operator components, together with a coefficient-by-coefficient
//! verification harness on truncated graded Fock spaces.
//!
//! Everything is computed over the field of rational functions in q with
//! coefficients in Q(ζ), ζ⁴ = −1, so all reported identities are exact.

pub mod currents;
pub mod fock;
pub mod omega;
pub mod scalars;
pub mod series;
pub mod vertex;
