//! Run configuration, snapshot files, CSV export and the verification suite.

mod config;
mod csv;
mod setup;
mod snapshot;
mod verify;

pub use config::{check_p, check_q, parse_config, ForcingKind, InitialSpec, RunConfig};
pub use csv::{diagnostics_csv, export_diagnostics, format_f64, import_diagnostics, parse_diagnostics_csv, spectrum_csv};
pub use setup::{diagnostics_config, forcing, initial_state, run_setup};
pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use verify::{verify_state, Check};
