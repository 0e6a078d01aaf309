//! Approximate longest increasing subsequence under updates.

pub mod cover;
pub mod decremental;
pub mod dynamic;
pub mod error;
pub mod levels;
pub mod lis;
pub mod merge;
pub mod om;
pub mod oracle;
pub mod partition;
pub mod pbst;
pub mod point;
pub mod script;

pub use cover::{CoveringFamily, Segment};
pub use error::{Error, Result};
pub use lis::{decreasing_partition, lis_static, normalize, IncrementalLis};
pub use pbst::PTree;
pub use point::{Chain, Coords, Plain, Point, PointSet};
