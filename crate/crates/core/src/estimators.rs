//! Closed-form coefficient paths on a concrete `(X, y)` instance.
//!
//! In the eigenbasis each estimator is `a_i = (1 − g_i) c_i / s_i` with
//! `c_i = v_iᵀXᵀy/n`; ridge is `a_i = c_i/(s_i + λ)`. Directions with
//! `s_i = 0` are set to zero for every estimator (the pseudo-inverse
//! convention; in exact arithmetic `c_i` vanishes there anyway).

use serde::{Deserialize, Serialize};

use crate::error::{at_index, Error, Result};
use crate::linalg::{SpectralDesign, Spectrum};
use crate::shrinkage::{self, FlowKind};

/// One point on a coefficient path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPathPoint {
    pub param: f64,
    pub beta_hat: Vec<f64>,
}

fn channel(design: &SpectralDesign) -> Result<&[f64]> {
    design
        .rotated_channel
        .as_deref()
        .ok_or_else(|| Error::contract("design has no response attached"))
}

/// Flow solution in eigen-coordinates.
pub fn flow_coords(spectrum: &Spectrum, channel: &[f64], kind: FlowKind, t: f64) -> Result<Vec<f64>> {
    if kind == FlowKind::Ridge {
        return ridge_coords(spectrum, channel, t);
    }
    if channel.len() != spectrum.len() {
        return Err(Error::contract("channel length does not match spectrum"));
    }
    let mu = spectrum.mu();
    spectrum
        .eigenvalues()
        .iter()
        .zip(channel)
        .enumerate()
        .map(|(i, (&s, &c))| {
            let sh = shrinkage::shrink(kind, s, mu, t).map_err(at_index(i))?;
            Ok(if s > 0.0 { sh.complement * c / s } else { 0.0 })
        })
        .collect()
}

/// Ridge solution in eigen-coordinates.
pub fn ridge_coords(spectrum: &Spectrum, channel: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if channel.len() != spectrum.len() {
        return Err(Error::contract("channel length does not match spectrum"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    if lambda == 0.0 && spectrum.rank() < spectrum.len() {
        return Err(Error::domain("lambda = 0 needs a full-rank design"));
    }
    Ok(spectrum
        .eigenvalues()
        .iter()
        .zip(channel)
        .map(|(&s, &c)| if s > 0.0 { c / (s + lambda) } else { 0.0 })
        .collect())
}

/// `β̂(t)` of a flow started at zero, in the original basis.
pub fn flow_estimate(design: &SpectralDesign, kind: FlowKind, t: f64) -> Result<Vec<f64>> {
    let a = flow_coords(&design.spectrum, channel(design)?, kind, t)?;
    design.unrotate(&a)
}

/// `β̂(λ) = (XᵀX/n + λI)⁻¹Xᵀy/n`.
pub fn ridge_estimate(design: &SpectralDesign, lambda: f64) -> Result<Vec<f64>> {
    let a = ridge_coords(&design.spectrum, channel(design)?, lambda)?;
    design.unrotate(&a)
}

/// Distance between a flow at time `t` and ridge at `λ = 1/t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingGap {
    pub gap: f64,
    pub ridge_norm_sq: f64,
    /// `gap / ridge_norm_sq`, or 0 when both vanish.
    pub ratio: f64,
}

pub fn coupling_gap(design: &SpectralDesign, kind: FlowKind, t: f64) -> Result<CouplingGap> {
    coupling_gap_coords(&design.spectrum, channel(design)?, kind, t)
}

/// [`coupling_gap`] computed directly from eigen-coordinates (the norms are
/// basis-invariant).
pub fn coupling_gap_coords(spectrum: &Spectrum, channel: &[f64], kind: FlowKind, t: f64) -> Result<CouplingGap> {
    if !kind.is_flow() {
        return Err(Error::contract("coupling_gap compares a flow with ridge"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("coupling_gap needs t > 0, got {t}")));
    }
    let lambda = 1.0 / (t * t);
    let a = flow_coords(spectrum, channel, kind, t)?;
    let r = ridge_coords(spectrum, channel, lambda)?;
    let gap: f64 = a.iter().zip(&r).map(|(x, y)| (x - y).powi(2)).sum();
    let ridge_norm_sq: f64 = r.iter().map(|y| y * y).sum();
    let ratio = if ridge_norm_sq == 0.0 { 0.0 } else { gap / ridge_norm_sq };
    Ok(CouplingGap {
        gap,
        ridge_norm_sq,
        ratio,
    })
}
