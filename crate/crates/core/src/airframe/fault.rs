use super::{FaultConfig, SurfaceCommand};

/// Replaces the faulted surface's command with its stuck value once the fault
/// is active. Every other component passes through untouched.
pub fn apply_fault(cmd: &SurfaceCommand, fault: Option<&FaultConfig>, t: f64) -> SurfaceCommand {
    let mut out = *cmd;
    if let Some(f) = fault {
        if t >= f.t_start {
            out.set(f.surface, f.stuck_value);
        }
    }
    out
}
