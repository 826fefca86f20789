//! Grids and one-dimensional searches used by the oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point spacing of a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// A finite, ascending list of values for one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    values: Vec<f64>,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize, scale: Scale) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min <= max) || steps == 0 {
            return Err(Error::domain(format!(
                "grid needs finite min <= max and steps >= 1, got [{min}, {max}] with {steps} steps"
            )));
        }
        if steps == 1 || min == max {
            return Ok(Grid { values: vec![min] });
        }
        let values = match scale {
            Scale::Linear => (0..steps)
                .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
                .collect(),
            Scale::Log => {
                if !(min > 0.0) {
                    return Err(Error::domain(format!("log grid needs min > 0, got {min}")));
                }
                let (a, b) = (min.ln(), max.ln());
                (0..steps)
                    .map(|i| (a + (b - a) * i as f64 / (steps - 1) as f64).exp())
                    .collect()
            }
        };
        Ok(Grid { values })
    }

    pub fn linear(min: f64, max: f64, steps: usize) -> Result<Self> {
        Grid::new(min, max, steps, Scale::Linear)
    }

    pub fn log(min: f64, max: f64, steps: usize) -> Result<Self> {
        Grid::new(min, max, steps, Scale::Log)
    }

    /// Every integer in `[lo, hi]`.
    pub fn integers(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("empty integer range [{lo}, {hi}]")));
        }
        Ok(Grid { values: (lo..=hi).map(f64::from).collect() })
    }

    /// Sorts and deduplicates the given values.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("grid values must be finite and non-empty"));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Grid { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximisation of `f` on `[lo, hi]`.
///
/// Returns `(x, f(x))`. `f` may return `-inf` where it is undefined.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // the ends are candidates too: the maximum may sit on the boundary
    [(lo, f(lo)), (c, fc), (d, fd), (hi, f(hi))]
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Root of `f` on `[lo, hi]` by bisection; `None` without a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return None;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(Grid::linear(0.0, 1.0, 3).unwrap().values(), &[0.0, 0.5, 1.0]);
        let g = Grid::log(1.0, 100.0, 3).unwrap();
        assert!((g.values()[1] - 10.0).abs() < 1e-12);
        assert_eq!(Grid::integers(2, 4).unwrap().values(), &[2.0, 3.0, 4.0]);
        assert_eq!(Grid::linear(5.0, 5.0, 10).unwrap().len(), 1);
        assert!(Grid::log(0.0, 1.0, 3).is_err());
        assert!(Grid::linear(1.0, 0.0, 3).is_err());
        assert!(Grid::integers(3, 2).is_err());
    }

    #[test]
    fn golden_finds_interior_and_boundary_maxima() {
        let (x, _) = golden_section_max(|x| -(x - 2.0f64).powi(2), 0.0, 5.0, 1e-12);
        assert!((x - 2.0).abs() < 1e-6);
        let (x, _) = golden_section_max(|x| -x, 1.0, 5.0, 1e-12);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn bisect_brackets() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0).is_none());
    }
}
