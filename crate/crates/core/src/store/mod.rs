//! Bit-exact serialization: NPY arrays inside a ZIP container for episode
//! logs, plus CSV/JSON report emission.

pub mod npy;
pub mod npz;
pub mod reports;

pub use npy::{parse_npy_header, Dtype, NpyDescriptor, NpyError};
pub use npz::{read_npz, write_npz, ArchiveManifest, LoadedEpisode, StoreError};
pub use reports::export_reports;
