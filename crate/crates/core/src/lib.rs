//! Exact-arithmetic engine for hairy graph complexes and directed graph
//! complexes: canonical forms with orientation signs, basis enumeration,
//! the splitting and hair differentials, operadic insertion and the
//! hair-reconnection action, the twisted (Shoikhet) bracket, PBW cup
//! product weights, and exact sparse linear algebra for homology and
//! coboundary certificates.

pub mod action;
pub mod basis;
pub mod bruteforce;
pub mod complex;
pub mod diff;
pub mod graph;
pub mod linalg;
pub mod operad;
pub mod parity;
pub mod pbw;
pub mod structures;
pub mod sum;
pub mod textio;
pub mod verify;

pub use complex::{ComplexContext, ValencePolicy, Variant};
pub use graph::{Edge, Graph, GraphError};
pub use sum::{GraphSum, Rat};
