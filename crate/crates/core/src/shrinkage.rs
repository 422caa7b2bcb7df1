//! Spectral shrinkage maps `g(s, ·)` of the four estimators.
//!
//! Every estimator here has the form `β̂ = V (I − g(S))S⁺ Vᵀ Xᵀy/n`, so it is
//! described by one scalar map per eigenvalue. Alongside each factor `g` we
//! return its complement `1 − g` computed without cancellation; the variance
//! term `(1 − g)²/s` and the parameter-error bounds are evaluated in regimes
//! where `g` is within rounding of one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{at_index, Error, Result};
use crate::linalg::Spectrum;
use crate::special;

/// Below this `t·√(s − μ)` the heavy-ball `sin(tb)/b` uses its Taylor polynomial.
const HB_SINC_TAYLOR_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowKind {
    #[serde(rename = "gf", alias = "GradientFlow")]
    GradientFlow,
    #[serde(rename = "nest", alias = "AcceleratedFlow")]
    AcceleratedFlow,
    /// Damped by `2√μ` with `μ` the smallest eigenvalue of the spectrum it acts on.
    #[serde(rename = "hb", alias = "HeavyBallFlow")]
    HeavyBallFlow,
    #[serde(rename = "ridge", alias = "Ridge")]
    Ridge,
}

impl FlowKind {
    pub const ALL: [FlowKind; 4] = [
        FlowKind::GradientFlow,
        FlowKind::AcceleratedFlow,
        FlowKind::HeavyBallFlow,
        FlowKind::Ridge,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            FlowKind::GradientFlow => "gf",
            FlowKind::AcceleratedFlow => "nest",
            FlowKind::HeavyBallFlow => "hb",
            FlowKind::Ridge => "ridge",
        }
    }

    /// True for the three time-parametrized flows.
    pub fn is_flow(self) -> bool {
        self != FlowKind::Ridge
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for FlowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gf" | "GradientFlow" => Ok(FlowKind::GradientFlow),
            "nest" | "AcceleratedFlow" => Ok(FlowKind::AcceleratedFlow),
            "hb" | "HeavyBallFlow" => Ok(FlowKind::HeavyBallFlow),
            "ridge" | "Ridge" => Ok(FlowKind::Ridge),
            other => Err(Error::Config(format!(
                "unknown kind {other:?} (expected gf, nest, hb or ridge)"
            ))),
        }
    }
}

/// A shrinkage factor together with its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shrink {
    pub factor: f64,
    /// `1 − factor`
    pub complement: f64,
}

/// Factors `g_i` of one estimator at one path parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageProfile {
    pub t_or_lambda: f64,
    pub factors: Vec<f64>,
    pub complements: Vec<f64>,
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::domain(format!("{name} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

/// `exp(−t s)`.
pub fn gf_shrink(s: f64, t: f64) -> Result<f64> {
    check_nonneg("s", s)?;
    check_nonneg("t", t)?;
    Ok(gf(s, t).factor)
}

/// `2J₁(t√s)/(t√s)`, equal to 1 when `t√s = 0`.
pub fn nest_shrink(s: f64, t: f64) -> Result<f64> {
    check_nonneg("s", s)?;
    check_nonneg("t", t)?;
    Ok(nest(s, t).factor)
}

/// `e^{−√μ t}(cos(tb) + √μ sin(tb)/b)` with `b = √(s − μ)`.
pub fn hb_shrink(s: f64, mu: f64, t: f64) -> Result<f64> {
    check_hb(s, mu, t)?;
    Ok(hb(s, mu, t).factor)
}

/// `λ/(s + λ)`.
pub fn ridge_shrink(s: f64, lambda: f64) -> Result<f64> {
    check_ridge(s, lambda)?;
    Ok(ridge(s, lambda).factor)
}

fn check_hb(s: f64, mu: f64, t: f64) -> Result<()> {
    check_nonneg("t", t)?;
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::domain(format!("heavy ball needs mu > 0, got {mu}")));
    }
    if !s.is_finite() || s < mu {
        return Err(Error::domain(format!(
            "heavy ball needs s >= mu, got s = {s}, mu = {mu}"
        )));
    }
    Ok(())
}

fn check_ridge(s: f64, lambda: f64) -> Result<()> {
    check_nonneg("s", s)?;
    check_nonneg("lambda", lambda)?;
    if s == 0.0 && lambda == 0.0 {
        return Err(Error::domain("ridge factor undefined at s = lambda = 0"));
    }
    Ok(())
}

/// Validated factor and complement for any kind.
///
/// `mu` is only read for [`FlowKind::HeavyBallFlow`].
pub fn shrink(kind: FlowKind, s: f64, mu: f64, param: f64) -> Result<Shrink> {
    match kind {
        FlowKind::GradientFlow => {
            check_nonneg("s", s)?;
            check_nonneg("t", param)?;
            Ok(gf(s, param))
        }
        FlowKind::AcceleratedFlow => {
            check_nonneg("s", s)?;
            check_nonneg("t", param)?;
            Ok(nest(s, param))
        }
        FlowKind::HeavyBallFlow => {
            check_hb(s, mu, param)?;
            Ok(hb(s, mu, param))
        }
        FlowKind::Ridge => {
            check_ridge(s, param)?;
            Ok(ridge(s, param))
        }
    }
}

pub(crate) fn gf(s: f64, t: f64) -> Shrink {
    let e = -t * s;
    Shrink {
        factor: e.exp(),
        complement: -e.exp_m1(),
    }
}

pub(crate) fn nest(s: f64, t: f64) -> Shrink {
    let x = t * s.sqrt();
    Shrink {
        factor: special::ratio(x),
        complement: special::ratio_complement(x),
    }
}

pub(crate) fn ridge(s: f64, lambda: f64) -> Shrink {
    let d = s + lambda;
    Shrink {
        factor: lambda / d,
        complement: s / d,
    }
}

pub(crate) fn hb(s: f64, mu: f64, t: f64) -> Shrink {
    let a = mu.sqrt() * t;
    let b = t * (s - mu).sqrt();
    hb_kernel(a, b)
}

/// Heavy-ball factor in the rescaled variables `a = √μ t`, `b = t√(s − μ)`:
/// `e^{−a}(cos b + a sin(b)/b)`.
pub(crate) fn hb_kernel(a: f64, b: f64) -> Shrink {
    let sinc = sinc(b);
    let decay = (-a).exp();
    let factor = decay * (b.cos() + a * sinc);
    let x_sq = a * a + b * b;
    let complement = if x_sq < 1.0 {
        // 1 − g = (1 − e^{−a} − a) + a(1 − sinc b) + 2e^{−a}sin²(b/2) + a(1 − e^{−a}) sinc b
        let half = (0.5 * b).sin();
        -exp_m1_plus(a) + a * one_minus_sinc(b) + 2.0 * decay * half * half + a * (-(-a).exp_m1()) * sinc
    } else {
        1.0 - factor
    };
    Shrink { factor, complement }
}

fn sinc(b: f64) -> f64 {
    if b < HB_SINC_TAYLOR_LIMIT {
        let b2 = b * b;
        1.0 - b2 / 6.0 + b2 * b2 / 120.0
    } else {
        b.sin() / b
    }
}

/// `1 − sin(b)/b`
fn one_minus_sinc(b: f64) -> f64 {
    if b < 0.5 {
        let b2 = b * b;
        let mut term = b2 / 6.0;
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= -b2 / ((2.0 * k - 2.0) * (2.0 * k - 1.0));
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        1.0 - b.sin() / b
    }
}

/// `e^{−a} − 1 + a ≥ 0`
fn exp_m1_plus(a: f64) -> f64 {
    if a < 0.5 {
        let mut term = a * a / 2.0;
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= -a / k;
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        (-a).exp_m1() + a
    }
}

/// Factors of `kind` at parameter `t_or_lambda` across the spectrum.
///
/// Heavy ball uses the spectrum's smallest eigenvalue as its `μ`.
pub fn profile(spectrum: &Spectrum, kind: FlowKind, t_or_lambda: f64) -> Result<ShrinkageProfile> {
    let mu = spectrum.mu();
    let mut factors = Vec::with_capacity(spectrum.len());
    let mut complements = Vec::with_capacity(spectrum.len());
    for (i, &s) in spectrum.eigenvalues().iter().enumerate() {
        let sh = shrink(kind, s, mu, t_or_lambda).map_err(at_index(i))?;
        factors.push(sh.factor);
        complements.push(sh.complement);
    }
    Ok(ShrinkageProfile {
        t_or_lambda,
        factors,
        complements,
    })
}
