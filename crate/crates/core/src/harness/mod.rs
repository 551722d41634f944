//! Configuration, experiment orchestration and result emission for the
//! command-line front end.

mod bands;
mod config;
mod data;
mod experiments;
mod identities;
mod io;
mod report;

pub use bands::{
    all_pass, classical_bands, median_band, ratio_band, residual_bands, sharpness_bands, BandCheck,
};
pub use config::{ExperimentConfig, GFamily, Level};
pub use data::{boundary_data, smooth_source};
pub use experiments::{
    run_classical_limit, run_duality_verification, run_maxreg_check, run_negative_data_check,
    run_regularity_sweep, run_sharpness_probe, LevelContext,
};
pub use identities::fracops_identity_residuals;
pub use io::{field_from_csv, field_to_csv, read_field_csv, write_field, FieldMetadata};
pub use report::{AlphaSummary, SweepReport, SweepRow, SCHEMA_VERSION};
