//! Instance generation, benchmark ingestion and instance statistics.

mod analysis;
mod format;
mod generator;
mod orlib;

pub use analysis::{analyze, InstanceAnalysis};
pub use format::{format_number, load_instance, read_instance, save_instance, write_instance};
pub use generator::{
    assemble_instance, default_seed, generate_cover, generate_q, GeneratorConfig, QClass, QRanges,
    Q_STREAM_SALT,
};
pub use orlib::{load_orlib, write_orlib};
