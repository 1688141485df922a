//! Video-to-events DVS simulator: file formats, ingestion, rendering, and
//! the `adv2e` command-line tool.
//!
//! The simulation engine itself lives in [`adv2e_core`]; this crate adds
//! everything that touches the filesystem:
//!
//! * [`ingest`] — frame manifests and PNG/PGM loading,
//! * [`event_io`] — text and binary event stream formats,
//! * [`render`] — accumulation image rendering,
//! * [`driver`] — multi-threaded, reproducible simulation runs,
//! * [`run_manifest`] — JSON run records for reproducibility,
//! * [`cli`] — the `simulate` / `compare` / `render` subcommands.

pub mod cli;
pub mod driver;
pub mod event_io;
pub mod ingest;
pub mod render;
pub mod run_manifest;
