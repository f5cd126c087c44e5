//! Labeled component unfolding (LCU).
//!
//! Particles of every class are generated at labeled vertices, walk the
//! network at random and compete for edges: a particle stepping onto an edge
//! that is currently dominated by rival classes is absorbed with a probability
//! proportional to the rival share of that edge, and any particle entering a
//! rival labeled vertex is absorbed outright. The cumulative number of visits
//! per class and edge splits the edge set into one subnetwork per class (the
//! *unfolding*), which is then used to label the unlabeled vertices.
//!
//! Two formulations of the system are provided:
//!
//! * [`deterministic`]: the mean-field system over real-valued populations,
//!   running in `O(C (|V| + |E|))` per iteration.
//! * [`stochastic`]: the particle system over integer counts, which the
//!   deterministic system approximates when the number of particles grows.
//!
//! [`unfolding`] extracts the per-class subnetworks and classifies vertices,
//! [`analysis`] hosts the equivalence, scale-invariance and timing
//! experiments, and [`io`] the plain-text file formats used by the CLI.

pub mod analysis;
pub mod cli;
pub mod deterministic;
pub mod error;
pub mod graph;
pub mod io;
pub mod rng;
pub mod stochastic;
pub mod unfolding;

pub use deterministic::{InitScheme, SystemParams, SystemState, UpdateOrder};
pub use error::{LcuError, Result};
pub use graph::{Dataset, Graph};
pub use stochastic::ParticleEnsemble;
pub use unfolding::{CumulativeDomination, Prediction, Unfolding};
