use crate::error::{Result, SolverError};

/// Self-similar exponents `(alpha, k)` for exponent `m` in `d` dimensions.
pub fn barenblatt_constants(m: f64, d: usize) -> (f64, f64) {
    let d = d as f64;
    let alpha = d / (d * (m - 1.0) + 2.0);
    let k = alpha * (m - 1.0) / (2.0 * m * d);
    (alpha, k)
}

/// Barenblatt–Pattle solution of `u_t = lap(u^m)`:
/// `t^-alpha [1 - k (|x| / t^(alpha/d))^2]_+^(1/(m-1))`.
pub fn barenblatt(t: f64, x: &[f64], m: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "Barenblatt profile needs t > 0, got {t}"
        )));
    }
    if !(m > 1.0) {
        return Err(SolverError::InvalidArgument(format!(
            "Barenblatt profile needs m > 1, got {m}"
        )));
    }
    let d = x.len();
    let (alpha, k) = barenblatt_constants(m, d);
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let xi2 = r2 / t.powf(2.0 * alpha / d as f64);
    let core = 1.0 - k * xi2;
    if core <= 0.0 {
        return Ok(0.0);
    }
    Ok(t.powf(-alpha) * core.powf(1.0 / (m - 1.0)))
}

/// Radius of the support at time `t`.
pub fn support_radius(t: f64, m: f64, d: usize) -> f64 {
    let (alpha, k) = barenblatt_constants(m, d);
    t.powf(alpha / d as f64) / k.sqrt()
}
