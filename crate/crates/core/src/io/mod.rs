//! File formats: Matrix Market matrices, JSON system manifests, sample grids and
//! CSV/JSON reports.

pub mod grid;
pub mod manifest;
pub mod mtx;
pub mod report;

pub use grid::{log_frequency_grid, parse_grid};
pub use manifest::{
    load_system, write_affine, write_system, MatrixRole, SystemForm, SystemManifest,
};
pub use mtx::{read_matrix_market, write_matrix_market};
pub use report::{
    read_trace, read_trace_json, write_effectivity, write_json, write_trace, TraceDocument,
    TraceRow,
};
