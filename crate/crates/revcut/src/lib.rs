//! Secrecy-capacity cut-set bounds for networks whose backward edges can
//! ferry keys upstream, plus synthesis of the matching scalar linear codes.
//!
//! A wiretapped network carries a message from a source to a sink while an
//! adversary reads every edge of one wiretap set of its choosing.  Classical
//! cut arguments only count the forward edges of a cut; this crate implements
//! the sharper bound that also accounts for backward (sink-to-source side)
//! edges, which can carry keys that protect the forward transmissions.  For
//! each cut the crate:
//!
//! * derives the backward-to-forward connectivity pattern and a certified
//!   rank-maximized matrix over a prime field ([`rankmax`]),
//! * evaluates the cut-set upper bound per wiretap set ([`bound`]),
//! * produces a block-label partition certificate showing the bound is not
//!   improvable by re-partitioning the wiretapped edges ([`bound::label_partition`]),
//! * builds the single-cut upper-bounding network and a scalar linear code on
//!   it whose secret rate meets the bound, verified both algebraically and by
//!   exhaustive distribution checks ([`code`]),
//! * simulates the unit-delay variant where sink keys take one time slot to
//!   reach the source side ([`code::simulate_with_delay`]).
//!
//! The `examples/` directory is the best starting point; each file is a
//! self-contained demonstration of one capability:
//!
//! ```text
//! cargo run --example bound_basics        # bounds on the two bundled 3-node fixtures
//! cargo run --example cut_enumeration     # cuts and connectivity matrices
//! cargo run --example rank_maximize       # certified rank maximization over F_q
//! cargo run --example partition_labels    # block-label partition certificates
//! cargo run --example upper_bounding      # single-cut upper-bounding network
//! cargo run --example construct_code      # code synthesis and verification
//! cargo run --example secrecy_exhaustive  # exhaustive independence checking
//! cargo run --example failure_envelope    # Monte Carlo failure rate vs. 1/q envelope
//! cargo run --example delay_rates         # effective rate under unit feedback delay
//! ```
//!
//! A thin `revcut` binary exposes the same pipeline on JSON network files
//! (`revcut bound|code|verify|simulate`).

pub mod bound;
pub mod cli;
pub mod code;
mod error;
pub mod gf;
pub mod network;
pub mod rankmax;
pub mod seed;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
