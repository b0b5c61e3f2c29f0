use super::StaggeredGrid;
use crate::error::{Result, SolverError};
use crate::porous::Dimension;

/// Relative slack under which two jumps count as equally steep.
const TIE_TOLERANCE: f64 = 1e-12;

/// Position of the steepest jump of `c` between neighbouring cells.
///
/// The jump between cells `j` and `j + 1` sits at `x = (j + 1) h`, halfway
/// between their centres. Ties go to the smallest `x`.
pub fn front_position(c: &[f64], grid: &StaggeredGrid) -> Result<f64> {
    if grid.dimension() != Dimension::One {
        return Err(SolverError::InvalidArgument(
            "front position is one-dimensional only".into(),
        ));
    }
    if c.len() != grid.n() {
        return Err(SolverError::DimensionMismatch {
            expected: grid.n(),
            found: c.len(),
        });
    }
    let jumps: Vec<f64> = c.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let max = jumps.iter().copied().fold(0.0_f64, f64::max);
    if max == 0.0 || !max.is_finite() {
        return Err(SolverError::NoFront);
    }
    let j = jumps
        .iter()
        .position(|&v| v >= max * (1.0 - TIE_TOLERANCE))
        .expect("maximum is attained");
    Ok((j + 1) as f64 * grid.h())
}

/// Least-squares slope of `ln x` against `ln t` over the trailing `window`
/// fraction of `series`.
pub fn fit_front_slope(series: &[(f64, f64)], window: f64) -> Result<f64> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(SolverError::InvalidArgument(format!(
            "window fraction must lie in (0, 1], got {window}"
        )));
    }
    let take = ((series.len() as f64) * window).round() as usize;
    let tail = &series[series.len() - take.min(series.len())..];
    if tail.len() < 8 {
        return Err(SolverError::InsufficientData(format!(
            "slope fit needs at least 8 samples in the window, got {}",
            tail.len()
        )));
    }
    if tail.iter().any(|&(t, x)| !(t > 0.0 && x > 0.0)) {
        return Err(SolverError::InsufficientData(
            "slope fit needs positive times and positions".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = tail.iter().map(|&(t, x)| (t.ln(), x.ln())).collect();
    least_squares_slope(&pts)
}

/// Slope of the least-squares line through `points`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Result<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(SolverError::InsufficientData(
            "need at least two points".into(),
        ));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(SolverError::InsufficientData(
            "abscissae are all equal".into(),
        ));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> StaggeredGrid {
        StaggeredGrid::new(Dimension::One, n, 1.0).unwrap()
    }

    #[test]
    fn unique_step() {
        let g = grid(5);
        let x = front_position(&[0.0, 0.0, 0.0, 1.0, 1.0], &g).unwrap();
        assert!((x - 3.0 * g.h()).abs() < 1e-15);
    }

    #[test]
    fn linear_profile_takes_leftmost() {
        let g = grid(6);
        let c: Vec<f64> = (0..6).map(|i| 0.1 * i as f64).collect();
        assert_eq!(front_position(&c, &g).unwrap(), g.h());
    }

    #[test]
    fn constant_profile_has_no_front() {
        assert!(matches!(
            front_position(&[1.0; 4], &grid(4)),
            Err(SolverError::NoFront)
        ));
    }

    #[test]
    fn synthetic_power_laws() {
        let sqrt: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, (i as f64).sqrt())).collect();
        assert!((fit_front_slope(&sqrt, 0.5).unwrap() - 0.5).abs() < 1e-12);
        let lin: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64 * 0.1, i as f64 * 0.1)).collect();
        assert!((fit_front_slope(&lin, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples() {
        let s: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(
            fit_front_slope(&s, 0.5),
            Err(SolverError::InsufficientData(_))
        ));
    }
}
