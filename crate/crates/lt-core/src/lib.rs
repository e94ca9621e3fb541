//! p-adic arithmetic for Lubin-Tate towers, Coleman power series and explicit reciprocity.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bivar;
pub mod coates_wiles;
pub mod coeff;
pub mod coleman;
pub mod error;
pub mod hecke;
pub mod lattice;
pub mod lattice_image;
pub mod lubin_tate;
pub mod padic;
pub mod period;
pub mod series;
pub mod torsion;
pub mod tower;
pub mod unramified;

pub use coeff::{Coeff, Twist};
pub use error::{Error, Result};
pub use padic::{PrimeConfig, Scalar};
