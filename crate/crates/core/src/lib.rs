//! Exact diagonalization of ferromagnetic spin-1/2 Heisenberg models on
//! finite connected graphs, with numerical certificates for the structure of
//! the zero-energy ground space.

pub mod basis;
pub mod cli;
pub mod config;
pub mod eigensolve;
pub mod graph;
pub mod operators;
pub mod verify;
