//! Numerics for leafwise cohomology of linear actions on tori.
//!
//! The crate is organized around the objects that decide parameter rigidity
//! of locally free actions:
//!
//! - [`fourier`]: sparse truncated Fourier series on `T^N`.
//! - [`diophantine`]: small divisors, resonances and Diophantine exponents.
//! - [`cohomeq`]: the leafwise cohomological equation `f = X_v g + c` and its
//!   multi-generator version, obstructions, parameter equivalence.
//! - [`liealg`]: structure constants, Chevalley–Eilenberg cohomology,
//!   Maurer–Cartan residuals and gauge transforms of canonical forms.
//! - [`suspension`]: Mayer–Vietoris dimension counts for suspensions.
//! - [`circle`]: rotation numbers, Moser's condition and linearized
//!   conjugacy for commuting circle diffeomorphisms.
//! - [`io`]: JSON formats for every input type.

pub mod circle;
pub mod cohomeq;
pub mod diophantine;
pub mod error;
pub mod fourier;
pub mod io;
pub mod liealg;
pub mod linalg;
pub mod references;
pub mod suspension;

pub use error::{Error, Result};
pub use fourier::{FourierSeries, FrequencyVector, GridSamples};
