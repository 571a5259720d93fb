//! Potential theory of an interval and of the condenser it forms with the
//! unit circle.

pub mod annulus;
pub mod blaschke;
pub mod condenser;
pub mod maps;
pub mod szego;
pub mod theta;

pub use annulus::{annulus_szego, AnnulusSzego};
pub use blaschke::{blaschke_rk, Rk};
pub use condenser::{build_geometry, CondenserGeometry};
pub use maps::{map_values, MapValues, Side};
pub use szego::{geometric_mean, szego_function, LogBranch, Szego, Weight};
