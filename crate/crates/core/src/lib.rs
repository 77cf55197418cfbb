//! Trees as induced subgraphs of prime-sum graphs.
//!
//! The prime-sum graph `P_n` has vertices `1..n` with an edge `ij` exactly
//! when `i + j` is prime; `Q_n(q)` instead requires `gcd(i + j, q) = 1`.
//! This crate constructs, for any input tree, explicit vertex labels that
//! realize the tree as an induced subgraph of both graphs, and ships the
//! verification, brute-force search, and statistics tooling around that
//! construction.

pub mod embed;
pub mod encode;
pub mod graphs;
pub mod numtheory;
pub mod tree;
pub mod verify;
