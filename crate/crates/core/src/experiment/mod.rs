//! Parameter sweeps, slope fits, CSV output and figures.

pub mod config;
pub mod fit;
pub mod io;
pub mod plot;
pub mod sweep;

pub use config::{geometric, OperatorChoice, SweepConfig};
pub use fit::{exponent_label, fit_slope, theoretical_exponent, ScalingFit};
pub use io::{read_polylines, read_rows, write_polylines, write_rows};
pub use plot::{emit_geometry_plot, emit_plot};
pub use sweep::{
    fit_rows, lower_candidates, n_candidates, resolvable_generation, sweep_lower, sweep_upper,
    Candidate, LowerSweep, SweepRow,
};
