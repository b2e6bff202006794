//! Constructive coupling of two empirical samples: equal-count cells of
//! small diameter, a slack-padded cell relation, a perfect matching of that
//! relation, and the resulting bijection between sample points.

mod coupling;
mod hall;
mod partition;
mod pipeline;

pub use coupling::{
    build_shadow_map, build_shadow_map_with, verify_weak_shadowing, CouplingMap, ShadowMap,
    WeakShadowingReport,
};
pub use hall::{hall_matching, SlackRelation};
pub use partition::{covering_sets, partition_sample, CellPartition, CellSizePolicy};
pub use pipeline::{shadow_md_pipeline, shadow_paths, ShadowPipelineConfig, ShadowRecord};
