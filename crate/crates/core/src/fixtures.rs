//! Bundled instances.

use crate::io::parse_hytn;
use crate::model::{Hytn, Schedule};

/// Text of the bundled workflow network.
pub const WORKFLOW_TEXT: &str = include_str!("../data/workflow.hytn");

/// An eight-timepoint workflow with a join waiting for the first of three
/// branches. It is consistent.
pub fn workflow() -> Hytn {
    parse_hytn(WORKFLOW_TEXT).expect("bundled fixture parses")
}

/// A feasible schedule of [`workflow`].
pub fn workflow_schedule() -> Schedule {
    Schedule::new(vec![24, 2, 12, 5, 0, 7, 0, 0])
}
