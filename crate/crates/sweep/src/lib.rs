//! Parameter sweeps over the blockade model: TOML configuration, figure
//! presets, a parallel grid runner and CSV/SVG output.

pub mod cli;
pub mod config;
pub mod link;
pub mod presets;
pub mod run;
pub mod svg;
pub mod table;

pub use cli::cli_main;
pub use config::{load_config, Axis, Format, Method, OutputSpec, SolverProfile, SweepConfig};
pub use link::Link;
pub use presets::{preset, preset_info, Preset, PRESET_NAMES};
pub use run::{run_sweep, solve_point, Column, PointOutcome, SweepRecord, SweepResult};
pub use svg::{render_svg, write_svg_plot};
pub use table::{read_csv, write_csv, CsvTable};
