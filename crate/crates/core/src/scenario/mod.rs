//! Scenario configuration, closed-loop runs, metrics, sweeps and plots.

mod config;
mod metrics;
mod plot;
mod runner;
mod sweep;
mod telemetry;

pub use config::{
    ChannelConfig, InitialCondition, MissionSpec, RcacConfig, ScenarioConfig, ScenarioFault, DEFAULT_GAIN_BOUND_FACTOR,
};
pub use metrics::{cross_track_error, metrics, rms, Metrics};
pub use plot::{emit_plots, gains_svg, ground_trace_svg, response_svg, summary_bars_svg};
pub use runner::{
    output_dir, run_scenario, simulate, summarize, GainSnapshot, RunResult, RunStatus, RunSummary, OUTPUT_ROOT_ENV,
};
pub use sweep::{run_name, sweep, sweep_runs, SweepBase, SweepConfig, SweepRow};
pub use telemetry::{
    flags, read_telemetry, read_telemetry_file, write_telemetry, write_telemetry_file, TelemetryRecord,
};
