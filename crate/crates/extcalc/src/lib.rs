//! Exact-arithmetic Ext computations over the mod-p Steenrod algebra at odd primes.
//!
//! The crate has three computational pillars:
//!
//! * [`resolution`]: degree-truncated minimal free resolutions of finite
//!   modules over the Steenrod algebra ([`milnor`]), from which Ext charts
//!   are read off generator-by-generator. Yoneda products, induced maps and
//!   connecting homomorphisms are computed by lifting chain maps.
//! * [`may`]: the E1 term of the May spectral sequence as a trigraded
//!   monomial algebra, with fast enumeration at arbitrary internal degree
//!   and the d1 differential. E1 emptiness at a bidegree is an upper bound
//!   certificate for the Ext chart.
//! * [`les`]: a small exact-sequence reasoner that instantiates the long
//!   exact Ext sequences of the Smith-Toda cofibrations, ingests cited
//!   dimension facts, and saturates with sound inference rules, producing
//!   auditable derivation logs.
//!
//! Everything is exact linear algebra over F_p ([`fplinalg`]); there are no
//! tolerances anywhere. All public computations are deterministic, including
//! under the optional rayon-backed parallelism (see [`exec`]).

pub mod amodules;
pub mod chart;
pub mod cli;
pub mod exec;
pub mod formula;
pub mod fplinalg;
pub mod les;
pub mod may;
pub mod milnor;
pub mod resolution;
pub mod verify;
