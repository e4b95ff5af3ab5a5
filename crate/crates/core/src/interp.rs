//! Cubic Hermite interpolation.

/// Value and first derivative of the cubic Hermite interpolant through
/// `(t0, y0, d0)` and `(t1, y1, d1)` at `t`.
pub fn hermite(t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> (f64, f64) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let slope = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, slope)
}

/// Index `i` of the segment `[knots[i], knots[i+1]]` containing `t`, clamped
/// to the first/last segment outside the knot range. `knots` must be
/// strictly increasing with at least two entries.
pub fn segment(knots: &[f64], t: f64) -> usize {
    let n = knots.len();
    debug_assert!(n >= 2);
    match knots.partition_point(|&k| k <= t) {
        0 => 0,
        i if i >= n => n - 2,
        i => i - 1,
    }
}
