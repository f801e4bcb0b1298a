//! Union/product circuits over homomorphism sets.
//!
//! The crate is organised bottom-up:
//!
//! * [`relcore`]: relational structures, hypergraphs and a brute-force
//!   homomorphism oracle used as ground truth by everything else.
//! * [`lp`]: an exact rational simplex shared by the width and flow code.
//! * [`widths`]: tree decompositions, exact treewidth, fractional edge covers
//!   and balanced separators.
//! * [`flows`]: path flows on hypergraphs and the vertex weightings they induce.
//! * [`circuit`]: the `{∪,×}`-circuit IR and its text format.
//! * [`compile`]: tree decomposition to deterministic circuit.
//! * [`rect`]: combinatorial rectangles and balanced cover extraction.
//! * [`instgen`]: hard instance generators and structure transformations.
//! * [`harness`]: experiment pipelines and report emission.

pub mod circuit;
pub mod compile;
pub mod error;
pub mod flows;
pub mod harness;
pub mod instgen;
pub mod lp;
pub mod rational;
pub mod rect;
pub mod relcore;
pub mod report;
pub mod rng;
pub mod widths;

pub use error::{Error, Result};
pub use rational::Rational;
pub use report::ValidationReport;
