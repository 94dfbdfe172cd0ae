//! Exact algebra for certifying a semi-stable resolution of the genus-3 Siegel
//! local model: polynomials, ideals with certificates, Schubert combinatorics,
//! weighted blow-up charts, smoothness / normal-crossings checks and Plücker
//! factorisations.
#![no_std]

extern crate alloc;

pub mod certify;
pub mod chart;
pub mod cover;
pub mod ideal;
pub mod pluecker;
pub mod poly;
pub mod schubert;
