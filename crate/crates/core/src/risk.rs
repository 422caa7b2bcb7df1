//! Exact estimation risk `E‖β̂ − β₀‖²` along the path of each estimator.
//!
//! Everything is computed from the spectrum and the shrinkage factors:
//! bias² is `Σ w_i g_i²` with `w_i` the squared signal coordinate (or `r²/p`
//! under the prior), and variance is `(σ²/n) Σ (1 − g_i)²/s_i`, where
//! coordinates with `s_i = 0` contribute nothing to the variance.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{at_index, Error, Result};
use crate::grid::is_ascending;
use crate::linalg::Spectrum;
use crate::shrinkage::{self, FlowKind};

/// Differences below this fraction of the risk level count as flat.
const OSCILLATION_NOISE_FLOOR: f64 = 1e-12;

/// Fixed coefficient vector, given in the eigenbasis (`v_iᵀβ₀`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedSignal {
    pub beta0_rotated: Vec<f64>,
    pub sigma_sq: f64,
    pub n: usize,
}

/// Isotropic prior `β₀ ~ (0, (r²/p) I)` with noise level `σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSignal {
    pub r_sq: f64,
    pub sigma_sq: f64,
    pub n: usize,
    pub p: usize,
}

impl PriorSignal {
    /// Signal-to-noise ratio `α = r² n / (σ² p)`.
    pub fn alpha(&self) -> f64 {
        self.r_sq * self.n as f64 / (self.sigma_sq * self.p as f64)
    }

    /// Builds the prior whose `α` equals `alpha` at the given noise level.
    pub fn from_alpha(alpha: f64, sigma_sq: f64, n: usize, p: usize) -> Self {
        PriorSignal {
            r_sq: alpha * sigma_sq * p as f64 / n as f64,
            sigma_sq,
            n,
            p,
        }
    }

    fn validate(&self, spectrum: &Spectrum) -> Result<()> {
        if !(self.r_sq > 0.0 && self.r_sq.is_finite()) {
            return Err(Error::domain(format!("r_sq must be positive, got {}", self.r_sq)));
        }
        check_noise(self.sigma_sq, self.n)?;
        if self.p != spectrum.len() {
            return Err(Error::contract(format!(
                "prior dimension {} does not match spectrum length {}",
                self.p,
                spectrum.len()
            )));
        }
        Ok(())
    }
}

impl FixedSignal {
    fn validate(&self, spectrum: &Spectrum) -> Result<()> {
        check_noise(self.sigma_sq, self.n)?;
        if self.beta0_rotated.len() != spectrum.len() {
            return Err(Error::contract(format!(
                "signal length {} does not match spectrum length {}",
                self.beta0_rotated.len(),
                spectrum.len()
            )));
        }
        if self.beta0_rotated.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("signal has non-finite entries".into()));
        }
        Ok(())
    }
}

fn check_noise(sigma_sq: f64, n: usize) -> Result<()> {
    if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
        return Err(Error::domain(format!("sigma_sq must be positive, got {sigma_sq}")));
    }
    if n == 0 {
        return Err(Error::domain("sample count n must be positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SignalModel {
    Fixed(FixedSignal),
    Prior(PriorSignal),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskDecomposition {
    pub bias_sq: f64,
    pub variance: f64,
    pub risk: f64,
}

impl RiskDecomposition {
    fn new(bias_sq: f64, variance: f64) -> Self {
        RiskDecomposition {
            bias_sq,
            variance,
            risk: bias_sq + variance,
        }
    }
}

fn decompose<W: Fn(usize) -> f64>(
    spectrum: &Spectrum,
    kind: FlowKind,
    param: f64,
    noise: f64,
    weight: W,
) -> Result<RiskDecomposition> {
    let mu = spectrum.mu();
    let mut bias = 0.0;
    let mut var = 0.0;
    for (i, &s) in spectrum.eigenvalues().iter().enumerate() {
        let sh = shrinkage::shrink(kind, s, mu, param).map_err(at_index(i))?;
        bias += weight(i) * sh.factor * sh.factor;
        if s > 0.0 {
            var += sh.complement * sh.complement / s;
        }
    }
    Ok(RiskDecomposition::new(bias, noise * var))
}

pub fn fixed_risk(spectrum: &Spectrum, signal: &FixedSignal, kind: FlowKind, param: f64) -> Result<RiskDecomposition> {
    signal.validate(spectrum)?;
    let noise = signal.sigma_sq / signal.n as f64;
    decompose(spectrum, kind, param, noise, |i| signal.beta0_rotated[i].powi(2))
}

pub fn bayes_risk(spectrum: &Spectrum, signal: &PriorSignal, kind: FlowKind, param: f64) -> Result<RiskDecomposition> {
    signal.validate(spectrum)?;
    let noise = signal.sigma_sq / signal.n as f64;
    let w = signal.r_sq / signal.p as f64;
    decompose(spectrum, kind, param, noise, |_| w)
}

pub fn risk(spectrum: &Spectrum, signal: &SignalModel, kind: FlowKind, param: f64) -> Result<RiskDecomposition> {
    match signal {
        SignalModel::Fixed(f) => fixed_risk(spectrum, f, kind, param),
        SignalModel::Prior(p) => bayes_risk(spectrum, p, kind, param),
    }
}

/// Bayes risk of ridge at its optimal strength, returned with `λ* = 1/α`.
pub fn optimal_ridge_bayes_risk(spectrum: &Spectrum, signal: &PriorSignal) -> Result<(f64, f64)> {
    signal.validate(spectrum)?;
    let alpha = signal.alpha();
    let noise = signal.sigma_sq / signal.n as f64;
    let sum: f64 = spectrum.eigenvalues().iter().map(|&s| alpha / (alpha * s + 1.0)).sum();
    Ok((noise * sum, 1.0 / alpha))
}

/// Risk at every grid point, in grid order.
pub fn risk_curve(
    spectrum: &Spectrum,
    signal: &SignalModel,
    kind: FlowKind,
    grid: &[f64],
) -> Result<Vec<(f64, RiskDecomposition)>> {
    if !is_ascending(grid) {
        return Err(Error::contract("risk_curve: grid must be ascending"));
    }
    if grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::domain("risk_curve: grid values must be finite and nonnegative"));
    }
    grid.par_iter()
        .map(|&t| risk(spectrum, signal, kind, t).map(|r| (t, r)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub num_local_maxima: usize,
    /// Largest rise from a local minimum to the following local maximum.
    pub max_rebound: f64,
}

/// Counts interior local maxima of the risk along a curve.
///
/// Steps smaller than `1e-12` times the local risk level are treated as flat,
/// so rounding ripples on a converged plateau are not counted. A run of flat
/// steps between a rise and a fall still counts as one maximum.
pub fn oscillation_report(curve: &[(f64, RiskDecomposition)]) -> Result<OscillationReport> {
    if curve.len() < 3 {
        return Err(Error::contract("oscillation_report needs at least 3 points"));
    }
    let r: Vec<f64> = curve.iter().map(|(_, d)| d.risk).collect();
    oscillation_of(&r)
}

pub(crate) fn oscillation_of(r: &[f64]) -> Result<OscillationReport> {
    let mut dir = 0i8;
    let mut last_min: Option<f64> = None;
    let mut count = 0;
    let mut rebound: f64 = 0.0;
    for w in r.windows(2) {
        let d = w[1] - w[0];
        let floor = OSCILLATION_NOISE_FLOOR * w[0].abs().max(w[1].abs());
        let step = if d > floor {
            1
        } else if d < -floor {
            -1
        } else {
            0
        };
        if step == 0 {
            continue;
        }
        if dir == 1 && step == -1 {
            count += 1;
            if let Some(m) = last_min {
                rebound = rebound.max(w[0] - m);
            }
        } else if dir == -1 && step == 1 {
            last_min = Some(w[0]);
        }
        dir = step;
    }
    Ok(OscillationReport {
        num_local_maxima: count,
        max_rebound: rebound,
    })
}

/// Writes a curve as CSV with header `kind,param,bias_sq,variance,risk`.
pub fn write_curve_csv<W: Write>(out: W, kind: FlowKind, curve: &[(f64, RiskDecomposition)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "param", "bias_sq", "variance", "risk"])?;
    for (t, d) in curve {
        w.write_record([
            kind.short_name().to_string(),
            format!("{t:.16e}"),
            format!("{:.16e}", d.bias_sq),
            format!("{:.16e}", d.variance),
            format!("{:.16e}", d.risk),
        ])?;
    }
    w.flush()?;
    Ok(())
}
