use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::mission::{Mode, Phase};
use crate::Result;

/// Bits of [`TelemetryRecord::flags`].
pub mod flags {
    pub const TURN_RATE_SATURATED: u32 = 1 << 0;
    pub const SCALE_SATURATED: u32 = 1 << 1;
    pub const INTEGRATOR_SATURATED: u32 = 1 << 2;
    pub const UNDERSPEED: u32 = 1 << 3;
    pub const GUIDANCE_DEGENERATE: u32 = 1 << 4;
    pub const FAULT_ACTIVE: u32 = 1 << 5;
    pub const THETA_FROZEN: u32 = 1 << 6;
    pub const PHI_FROZEN: u32 = 1 << 7;
    pub const OMEGA_X_FROZEN: u32 = 1 << 8;
    pub const OMEGA_Y_FROZEN: u32 = 1 << 9;
    pub const OMEGA_Z_FROZEN: u32 = 1 << 10;
    pub const LEARNING: u32 = 1 << 11;
}

/// One control step. Column order of the CSV is the field order below; all
/// values SI (m, m/s, rad, rad/s, rad/s^2), surfaces normalised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelemetryRecord {
    pub t: f64,
    pub phase: Phase,
    pub mode: Mode,
    pub north: f64,
    pub east: f64,
    pub down: f64,
    pub h: f64,
    pub airspeed: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub phi_s: f64,
    pub theta_s: f64,
    pub h_s: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub p_s: f64,
    pub q_s: f64,
    pub r_s: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub alpha_z: f64,
    pub aileron_left: f64,
    pub aileron_right: f64,
    pub elevator: f64,
    pub rudder: f64,
    pub throttle: f64,
    pub u_theta: f64,
    pub u_phi: f64,
    pub u_omega_x: f64,
    pub u_omega_y: f64,
    pub u_omega_z: f64,
    pub gain_theta: f64,
    pub gain_phi: f64,
    pub gain_omega_x_p: f64,
    pub gain_omega_x_i: f64,
    pub gain_omega_y_p: f64,
    pub gain_omega_y_i: f64,
    pub gain_omega_z_p: f64,
    pub gain_omega_z_i: f64,
    pub xtrack: f64,
    pub flags: u32,
}

impl TelemetryRecord {
    pub fn has(&self, flag: u32) -> bool {
        self.flags & flag != 0
    }

    /// Whether the record belongs to the metric window: mission mode while
    /// loitering.
    pub fn in_metric_window(&self) -> bool {
        self.mode == Mode::Mission && self.phase == Phase::Loiter
    }
}

pub fn write_telemetry<W: Write>(records: &[TelemetryRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in records {
        w.serialize(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_telemetry_file(records: &[TelemetryRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_telemetry(records, std::io::BufWriter::new(file))
}

pub fn read_telemetry<R: Read>(input: R) -> Result<Vec<TelemetryRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let records = r.deserialize().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(records)
}

pub fn read_telemetry_file(path: impl AsRef<Path>) -> Result<Vec<TelemetryRecord>> {
    read_telemetry(std::io::BufReader::new(std::fs::File::open(path)?))
}
