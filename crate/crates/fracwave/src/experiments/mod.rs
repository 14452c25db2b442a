//! Orchestration of the headline studies: asymptotic convergence of the
//! unidirectional models against the parent equation, conservation audits,
//! and the dispersion audit.

mod conservation;
mod convergence;
mod dispersion;
pub mod report;

pub use conservation::{run_conservation_audit, DriftSeries};
pub use convergence::{
    right_going_state, run_unidirectional_comparison, CellTag, ConvergenceStudy, ErrorRow,
    ExperimentReport, GaussianSpec, SlopeFit,
};
pub use dispersion::{run_dispersion_audit, DispersionRow};

/// FNV-1a digest of a canonical description string; identifies a study in
/// reports without pulling in a hash dependency.
pub fn fnv1a_hex(text: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}
