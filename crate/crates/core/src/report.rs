//! Shared text rendering for traces and CSV exports.

use alloc::format;
use alloc::string::String;

use crate::error::Error;
use crate::path::{render_dirac, PathRecord, WaveDirection};

/// Formats a float with 12 significant digits.
pub fn sig12(x: f64) -> String {
    // Fold negative zero so equal values always render identically.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// One trace line for a path record: direction marker, Dirac rendering, then
/// `amp=(re,im)` with 12 significant digits.
pub fn trace_line(record: &PathRecord) -> Result<String, Error> {
    let marker = match record.direction {
        WaveDirection::Offer => "OFFER",
        WaveDirection::Confirmation => "CONF ",
    };
    Ok(format!(
        "{marker} {} amp=({},{})",
        render_dirac(record)?,
        sig12(record.amplitude.re),
        sig12(record.amplitude.im),
    ))
}
