//! Conjugacy classes of regular subgroups in holomorphs of finite abelian
//! groups, computed by lifting through an elementary abelian normal series,
//! and the left braces they correspond to.

pub mod abelian;
pub mod brace;
pub mod context;
pub mod error;
pub mod holomorph;
pub mod lifting;
pub mod linalg;
pub mod oracle;
pub mod pcgs;
pub mod perm;
pub mod permgroup;
pub mod pipeline;
pub mod record;
pub mod series;
pub mod shard;

pub use abelian::{AbelianGroup, Endomorphism, GroupElement, Limits};
pub use brace::{Brace, Fingerprint};
pub use context::{Context, ContextOptions, Mode};
pub use error::{Error, Result};
pub use holomorph::{HolElement, Holomorph};
pub use perm::Perm;
pub use pcgs::Pcgs;
pub use permgroup::PermGroup;
pub use pipeline::ContextDir;
pub use record::SubgroupRecord;
pub use series::{NormalSeries, SeriesFactor, SeriesStrategy};
pub use shard::{ShardFile, ShardHeader};
