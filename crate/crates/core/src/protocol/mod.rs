//! Two-phase rater protocol: preference elicitation, pool assembly, ratings.

mod pool;
mod session;
mod store;
mod types;

pub use pool::{assemble_pool, PoolAssembler, PoolConfig, PoolError};
pub use session::{ProtocolError, Session};
pub use store::{
    read_records, write_records, Clock, Excluded, ExclusionReason, Export, FixedClock, StudyStore, SystemClock,
};
pub use types::*;
