//! Exact symbolic computation of boundary and interior residue densities for
//! perturbed Dirac operators on 4-manifolds with boundary, with a floating-point
//! oracle that re-derives every result independently.

#![allow(clippy::needless_range_loop)]

pub mod boundary;
pub mod clifford;
pub mod collar;
pub mod error;
pub mod interior;
pub mod oracle;
pub mod reference;
pub mod report;
pub mod scalar;
pub mod sphere;
pub mod symbols;
pub mod xin_rational;
