//! Persistence formats, run manifests and plot export.

pub mod manifest;
pub mod persistence;
pub mod svg;

pub use manifest::{splice, RunManifest};
pub use persistence::{
    load_trajectory, save_trajectory, trajectory_from_jsonl, trajectory_to_jsonl, SCHEMA_VERSION,
};
pub use svg::{export_svg, trajectory_svg, Overlay, SvgOptions};
