//! Solver toolkit for multi-objective normal-form games (MONFGs) under a
//! utility-based approach.
//!
//! The toolkit evaluates strategy profiles under the ESR and SER optimisation
//! criteria, reduces games to their scalar trade-off game, enumerates pure
//! strategy Nash equilibria, verifies epsilon-Nash equilibria under any
//! per-player criterion assignment, and empirically probes the convexity
//! classes of utility functions.

pub mod cli;
pub mod criteria;
pub mod equilibrium;
pub mod game;
pub mod games;
pub mod utility;
