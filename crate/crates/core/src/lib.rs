//! Numerics for Hankel operators on the Hardy space of the circle: the
//! direct spectral transform (singular values of `Γ_u` and `Γ̃_u`), its
//! explicit inverse, the cubic Szegő flow in both coordinate systems, and
//! the geometric family whose symbol reduces to a Toeplitz problem.

// `!(x <= limit)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flow;
pub mod fourier;
pub mod geometric;
pub mod hankel;
pub mod hardy;
pub mod inverse;
pub mod io;

pub use error::{Error, Result};
pub use hankel::{pair_singular_values, HankelSpectrum};
pub use hardy::{szego_project, FullCircleFunction, HardyFunction};
pub use inverse::{reconstruct_function, reconstruct_point, SpectralData, SpectralPair};
