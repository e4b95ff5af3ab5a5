//! Locale-independent number formatting for data files.

/// Formats `v` with 17 significant digits in scientific notation.
/// Non-finite values print as `nan`, `inf` or `-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}
