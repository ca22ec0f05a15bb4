//! Class numbers of imaginary quadratic fields, a persistent class-number
//! cache, and a harness that checks divisibility claims for the fields
//! `Q(sqrt(1 - 2m^t))` over parameter grids.

pub mod cache;
pub mod cli;
pub mod enumerate;
pub mod harness;
pub mod report;

pub use cache::{CacheRecord, ClassCache};
pub use harness::{verify, Caps, Grid, HarnessError, TheoremId};
pub use report::{Case, Status, TheoremReport};
