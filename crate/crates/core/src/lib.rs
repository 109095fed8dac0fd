//! Consistency checking and scheduling for hyper temporal networks.
//!
//! A network constrains timepoints with standard difference constraints
//! and with hyperarcs, where at least one of several constraints must hold.
//! Networks whose hyperarcs are all multi-head (or all multi-tail) reduce
//! to mean payoff games; [`solver`] decides them with a value iteration on
//! energy progress measures and returns either a feasible schedule or a
//! negative cycle that proves no schedule exists.
//!
//! ```
//! use hytn::model::HytnBuilder;
//! use hytn::solver::{solve, Verdict};
//!
//! let network = HytnBuilder::new(3)
//!     .multi_head(0, &[(1, -2), (2, -4)])
//!     .standard(0, 1, 10)
//!     .standard(0, 2, 10)
//!     .build()
//!     .unwrap();
//! match solve(&network).unwrap().verdict {
//!     Verdict::Consistent(s) => assert!(hytn::model::verify_schedule(&network, &s).unwrap()),
//!     Verdict::Inconsistent(_) => unreachable!(),
//! }
//! ```

pub mod model;
pub mod mpg;
pub mod stn;
pub mod solver;
pub mod gen;
pub mod io;
pub mod fixtures;
pub mod bench;
pub mod cli;
