//! Number formatting shared by tables and sample dumps.

/// Scientific notation with 17 significant digits, enough to round-trip any f64.
pub fn format_sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
