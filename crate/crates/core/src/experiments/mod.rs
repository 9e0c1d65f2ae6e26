//! Manufactured solutions, convergence sweeps and table output.

pub mod cases;
pub mod emit;
pub mod presets;
pub mod sweep;

pub use cases::{lookup, registry, ManufacturedCase};
pub use emit::{emit, render, Format};
pub use presets::{presets, Preset};
pub use sweep::{run_sweep, ConvergenceRow, ConvergenceTable, SweepConfig};
