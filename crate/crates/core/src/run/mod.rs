//! Configuration files, scenario dispatch, presets and output formats.

mod config;
mod io;
mod manifest;
mod presets;
mod runner;

pub use config::{parse_config, DynamicsConfig, LatticeConfig, ParsedConfig, RunConfig, ScenarioConfig};
pub use io::{csv_string, fmt_f64, parse_csv, read_snapshots, sha256_hex, write_atomic, Cell, SnapshotStack, SNAPSHOT_HEADER_LEN, SNAPSHOT_MAGIC};
pub use manifest::{
    load_manifest, resolve_emitters, run_id, DerivedQuantities, FileEntry, RunManifest, DERIVED_TOLERANCE, MANIFEST_FILE,
};
pub use presets::{load_preset, preset_description, preset_names, preset_text, PRESETS};
pub use runner::{execute, run, with_jobs, RunArtifacts};
