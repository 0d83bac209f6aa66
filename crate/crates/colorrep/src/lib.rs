//! Exact-arithmetic decision procedures for generalized divide-and-color
//! representations of finite Ising models.
//!
//! The crate answers, in exact rational arithmetic, whether the Ising measure
//! ν_{G,β,h} — parameterized here by x = e^{2β} and y = e^{2h} so that every
//! in-scope quantity is rational — can be written as Φ_p(μ) for a probability
//! measure μ on set partitions of the vertices. It carries:
//!
//! * the partition lattice B_n and the color operator Φ_p ([`partitions`],
//!   [`colorop`]),
//! * exact Ising and random-cluster measures ([`ising`], [`rcm`]),
//! * an exact rational feasibility solver with Farkas certificates
//!   ([`solver`]),
//! * the h→0 limit systems and their sign analysis ([`limits`]),
//! * closed-form criteria for K_3, K_4, K_5 and region scans
//!   ([`closedform`]).

pub mod closedform;
pub mod colorop;
pub mod error;
pub mod graphs;
pub mod ising;
pub mod limits;
pub mod linalg;
pub mod partitions;
pub mod poly;
pub mod ratio;
pub mod rcm;
pub mod solver;

pub use error::{Error, Result};
pub use ratio::Ratio;
