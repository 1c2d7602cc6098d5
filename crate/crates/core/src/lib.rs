//! Simulation and equilibrium-stability analysis of oscillator Ising machines.
//!
//! An OIM maps an Ising problem with couplings `W` onto oscillator phases
//! `theta` obeying
//!
//! ```text
//! d theta_i / dt = -K sum_j W_ij sin(theta_i - theta_j) - K_s sin(2 theta_i)
//! ```
//!
//! The crate enumerates Ising energy landscapes ([`enumeration`]), computes
//! the largest Jacobian eigenvalue `lambda_L` of every binarized phase state
//! as a function of the injection strength `K_s` ([`stability`]), integrates
//! the dynamics with or without noise ([`dynamics`]) and runs reproducible
//! multi-trial campaigns ([`experiments`]).

pub mod dynamics;
pub mod eigen;
pub mod enumeration;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
mod par;
pub mod rng;
pub mod selfcheck;
pub mod stability;

pub use error::{OimError, Result, MAX_EXHAUSTIVE_NODES};
pub use model::{CouplingMatrix, Graph, OimParams, PhaseState, SpinConfig};
