//! Escaping sets of complex Hénon maps: Green's functions, Böttcher
//! coordinates, the covering-space lift, symmetry detection, and sampling of
//! sub-level sets.

pub mod boettcher;
pub mod config;
pub mod covering;
pub mod dyadic;
pub mod error;
pub mod exact;
pub mod henon;
pub mod polymap;
pub mod potential;
pub mod sampling;
pub mod selftest;
pub mod short_c2;
pub mod symmetry;

pub use error::{Error, Result};
pub use henon::{HenonMap, Point};
