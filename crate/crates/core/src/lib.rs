//! Line-of-sight MIMO between two uniform linear arrays.
//!
//! Builds spherical-wavefront channel matrices, enumerates every antenna
//! separation product that makes the channel columns orthogonal, and uses
//! separations that are optimal at several distances to design links that
//! must work over a range of transmitter-receiver distances.
//!
//! ```
//! use losmimo::asp::{equal_separation, optimal_distances};
//! use losmimo::channel::Wavelength;
//!
//! let wl = Wavelength::from_frequency_hz(28e9).unwrap();
//! let d = equal_separation(2, wl, 50.0, 3).unwrap();
//! let distances = optimal_distances(d, wl, 3, 3, 10.0, 100.0).unwrap();
//! assert_eq!(distances.len(), 7);
//! ```

pub mod asp;
pub mod channel;
pub mod cli;
pub mod design;
pub mod error;
pub mod geometry;
pub mod report;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
