//! Polyhedral GDoF regions and treating-interference-as-noise checks for
//! multi-cell downlink (IBC) and uplink (IMAC) networks.
//!
//! All region and regime computations are exact over rationals.

pub mod cli;
pub mod cycles;
pub mod network;
pub mod oracle;
pub mod point;
pub mod polytope;
pub mod rational;
pub mod regime;
pub mod simplex;

pub use cycles::{enumerate_cycles, rank_tuples, Cycle};
pub use network::{canonicalize, parse_network, serialize_network, symmetric_two_cell, CellNetwork, UserId};
pub use oracle::{ibc_gdof, imac_gdof, sample_region, Mode, PointCloud, PowerAllocation};
pub use point::GdofPoint;
pub use polytope::{build_constraints, sum_gdof, ConstraintSet, LinearConstraint, Provenance};
pub use rational::Rational;
pub use regime::{is_ctin, is_tin, verify_converse_steps, RegimeReport};
