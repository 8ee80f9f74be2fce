//! Number formatting shared by all writers.
//!
//! Values print with the shortest representation that parses back to the
//! same bits. Very large or very small magnitudes switch to exponent form.

/// Parses a decimal float with optional exponent; `Inf`/`inf`/`infinity`
/// map to infinity. NaN is rejected.
pub fn parse_f64(token: &str) -> Option<f64> {
    let value: f64 = token.parse().ok()?;
    if value.is_nan() {
        None
    } else {
        Some(value)
    }
}

pub fn format_f64(value: f64) -> String {
    if value.is_infinite() {
        return if value > 0.0 { "Inf".to_string() } else { "-Inf".to_string() };
    }
    let magnitude = value.abs();
    if magnitude == 0.0 || (1e-5..1e16).contains(&magnitude) {
        format!("{value}")
    } else {
        format!("{value:e}")
    }
}
