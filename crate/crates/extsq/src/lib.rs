//! Minimal resolutions, Yoneda extensions and Steenrod operations in
//! `Ext_A(F2, F2)` over the mod 2 Steenrod algebra.

pub mod chainmap;
pub mod checkpoint;
pub mod error;
pub mod extension;
pub mod linalg;
pub mod module;
pub mod parse;
pub mod presentation;
pub mod resolution;
pub mod sq;
pub mod steenrod;
pub mod walkthrough;

pub use error::{Error, Result};
