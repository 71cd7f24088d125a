//! Filling areas and mean Dehn functions of finitely presented abelian groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`words`]: signed-alphabet words, free reduction, enumeration and the
//!   elementary cardinalities of spheres, balls and lazy words.
//! * [`presentation`]: abelian presentations, Smith normal form and canonical
//!   forms of group elements, word lengths in the group.
//! * [`combing`]: geodesic combings of the Cayley graph and closing of open paths.
//! * [`area`]: exact and bounded filling areas, including a brute-force oracle.
//! * [`counting`]: exact walk counts, non-backtracking counts, tail bounds and a
//!   seeded word sampler.
//! * [`cogrowth`]: exact truncated power series and the cogrowth machinery.
//! * [`dehnstats`]: the Dehn function and its mean variants, exact and sampled.
//!
//! Hot loops run on rayon when the `parallel` feature is enabled (the default);
//! every result is independent of the thread count.

pub mod area;
pub mod binomial;
pub mod cogrowth;
pub mod combing;
pub mod counting;
pub mod dehnstats;
mod error;
pub mod par;
pub mod presentation;
pub mod words;

pub use error::{Error, Result};
pub use par::Execution;
