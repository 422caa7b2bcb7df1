//! Parameter grids and one-dimensional searches shared by sweeps and bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval sampled at `count` points, linearly or logarithmically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl GridSpec {
    pub fn linear(lo: f64, hi: f64, count: usize) -> Self {
        GridSpec {
            lo,
            hi,
            count,
            log: false,
        }
    }

    pub fn log(lo: f64, hi: f64, count: usize) -> Self {
        GridSpec {
            lo,
            hi,
            count,
            log: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if self.count == 0 {
            return Err(Error::Config("grid count must be positive".into()));
        }
        if self.hi < self.lo || (self.count > 1 && self.hi == self.lo) {
            return Err(Error::Config(format!(
                "grid must be ascending (lo = {}, hi = {})",
                self.lo, self.hi
            )));
        }
        if self.log && self.lo <= 0.0 {
            return Err(Error::Config("log grid needs lo > 0".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let last = (self.count - 1) as f64;
        let mut pts: Vec<f64> = if self.log {
            let (a, b) = (self.lo.ln(), self.hi.ln());
            (0..self.count).map(|i| (a + (b - a) * i as f64 / last).exp()).collect()
        } else {
            (0..self.count)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / last)
                .collect()
        };
        // pin the endpoints exactly
        pts[0] = self.lo;
        pts[self.count - 1] = self.hi;
        pts
    }

    /// Same interval with `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Self {
        GridSpec {
            count: (self.count - 1) * factor + 1,
            ..*self
        }
    }

    pub fn scale_name(&self) -> &'static str {
        if self.log {
            "log"
        } else {
            "linear"
        }
    }
}

pub fn is_ascending(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] <= w[1])
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::domain(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
///
/// Returns the best abscissa seen together with its value.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
