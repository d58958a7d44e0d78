//! Exact Betti numbers for planar linkages with one telescopic leg.
//!
//! A linkage with fixed leg lengths l_1..l_{n-1} and one leg free to
//! take any length up to l_n has a configuration space determined, up
//! to homotopy, by which subsets of legs are short or long relative to
//! the half perimeter. This crate computes the full vector of Betti
//! numbers of that space exactly, in integer arithmetic with optional
//! quadratic irrationalities, and applies it to the anti-ferromagnetic
//! mean-field XY model where the growth rate of the total Betti number
//! detects the phase transition.
//!
//! Entry points:
//! - [`LengthVector`] parses and validates leg lengths.
//! - [`betti_profile`] and [`profile_with_engine`] compute Betti vectors.
//! - [`xy::XYParams`] maps XY model parameters onto a linkage.
//! - [`oracle`] holds independent slow checks (grid flood fill,
//!   exhaustive subset tables).
//! - [`verify`] runs the acceptance suites used by the CLI.

pub mod betti;
pub mod counts;
pub mod error;
pub mod linkage;
pub mod logsum;
pub mod oracle;
pub mod scalar;
pub mod verify;
pub mod xy;

pub use betti::{betti_profile, is_disconnected, profile_with_engine, BettiProfile, Engine};
pub use counts::{count_alpha, count_ckdk_dp, count_ckdk_enum, count_ckdk_xy_closed, SubsetCounts};
pub use error::{Error, Result};
pub use linkage::{LengthVector, SubsetClass, ENUM_CAP};
pub use scalar::{parse_rational, QuadraticScalar, Rational};
