//! Experiment recipes: TOML configs, CSV tables and JSON provenance sidecars.
//!
//! One config file describes one experiment. The CLI resolves it (applying
//! flag overrides), runs it and writes `<out>.csv` plus `<out>.json`; the
//! sidecar alone is enough to reproduce the CSV byte for byte.

mod config;
mod io;
mod run;

pub use config::{
    ChannelSection, Command, ExperimentConfig, ModelName, OutputSection, SweepSection, VaryParam,
    VarySection,
};
pub use io::{
    read_sidecar, read_table, sidecar_path, write_atomic, Sidecar, Table, BER_HEADER, BOUNDS_HEADER,
    CAPACITY_HEADER, CONDITIONAL_HEADER, VARY_BER_HEADER,
};
pub use run::{bounds_table, execute, replay, run, BoundsRow, VaryBerRow};
