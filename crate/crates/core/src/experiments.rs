//! Synthetic designs and risk-curve sweeps.
//!
//! A sweep takes one or more designs, draws a dense `β₀` per design, and
//! writes the exact bias/variance/risk curve of every requested method to
//! `<label>_<method>.csv`, together with a `manifest.json` that records the
//! config and a content hash of every file it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg::{design_decompose, SpectralDesign, Spectrum};
use crate::risk::{self, FixedSignal, PriorSignal, RiskDecomposition, SignalModel};
use crate::rng::{SimRng, DESIGN_STREAM, SIGNAL_STREAM};
use crate::shrinkage::FlowKind;

pub const DEFAULT_N: usize = 500;
pub const DEFAULT_P: usize = 100;
pub const DEFAULT_STUDENT_DF: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignFamily {
    /// Spectrum `s_i = c / i^ν` with a random eigenbasis.
    PowerLaw {
        c: f64,
        nu: f64,
    },
    IidGaussian,
    IidStudentT {
        #[serde(default = "default_df")]
        df: u32,
    },
    /// `XᵀX/n = s·I`.
    Orthogonal {
        s: f64,
    },
}

fn default_df() -> u32 {
    DEFAULT_STUDENT_DF
}

impl DesignFamily {
    /// File-name prefix, e.g. `powerlaw-c1-nu0.5` or `studentt-df5`.
    pub fn label(&self) -> String {
        match self {
            DesignFamily::PowerLaw { c, nu } => format!("powerlaw-c{c}-nu{nu}"),
            DesignFamily::IidGaussian => "gaussian".into(),
            DesignFamily::IidStudentT { df } => format!("studentt-df{df}"),
            DesignFamily::Orthogonal { s } => format!("orthogonal-s{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub family: DesignFamily,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_n() -> usize {
    DEFAULT_N
}

fn default_p() -> usize {
    DEFAULT_P
}

impl DesignSpec {
    pub fn new(family: DesignFamily, n: usize, p: usize, seed: u64) -> Self {
        DesignSpec { family, n, p, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(config("design.n and design.p must be positive"));
        }
        match self.family {
            DesignFamily::PowerLaw { c, nu } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(config(format!("design.family.c must be positive, got {c}")));
                }
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(config(format!("design.family.nu must be positive, got {nu}")));
                }
            }
            DesignFamily::IidGaussian => {}
            DesignFamily::IidStudentT { df } => {
                if df <= 2 {
                    return Err(config(format!(
                        "design.family.df must exceed 2 for finite variance, got {df}"
                    )));
                }
            }
            DesignFamily::Orthogonal { s } => {
                if !(s > 0.0 && s.is_finite()) {
                    return Err(config(format!("design.family.s must be positive, got {s}")));
                }
                if self.n < self.p {
                    return Err(config(format!(
                        "orthogonal design needs n >= p, got n = {}, p = {}",
                        self.n, self.p
                    )));
                }
            }
        }
        Ok(())
    }
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// One design or a list of designs sharing the remaining settings.
    #[serde(deserialize_with = "one_or_many")]
    pub design: Vec<DesignSpec>,
    pub snr: f64,
    #[serde(default = "default_flows")]
    pub flows: Vec<FlowKind>,
    #[serde(default = "default_t_grid")]
    pub t_grid: GridSpec,
    #[serde(default = "default_ridge_grid")]
    pub ridge_grid: GridSpec,
    pub output_dir: PathBuf,
    #[serde(default = "default_sigma_sq")]
    pub sigma_sq: f64,
    /// Prior-averaged curves instead of a single `β₀` draw.
    #[serde(default)]
    pub bayes: bool,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<DesignSpec>, D::Error> {
    use serde::de::Error as _;
    let v = serde_json::Value::deserialize(d)?;
    let out = match v {
        serde_json::Value::Array(items) => items
            .into_iter()
            .map(serde_json::from_value)
            .collect::<std::result::Result<Vec<DesignSpec>, _>>(),
        other => serde_json::from_value(other).map(|d| vec![d]),
    };
    out.map_err(D::Error::custom)
}

fn default_flows() -> Vec<FlowKind> {
    FlowKind::ALL.to_vec()
}

pub fn default_t_grid() -> GridSpec {
    GridSpec::log(1e-2, 1e3, 400)
}

pub fn default_ridge_grid() -> GridSpec {
    GridSpec::log(1e-6, 1e3, 400)
}

fn default_sigma_sq() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.design.is_empty() {
            return Err(config("design list is empty"));
        }
        for d in &self.design {
            d.validate()?;
        }
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return Err(config(format!("snr must be positive, got {}", self.snr)));
        }
        if !(self.sigma_sq > 0.0 && self.sigma_sq.is_finite()) {
            return Err(config(format!("sigma_sq must be positive, got {}", self.sigma_sq)));
        }
        if self.flows.is_empty() {
            return Err(config("flows is empty"));
        }
        self.t_grid.validate().map_err(|e| config(format!("t_grid: {e}")))?;
        self.ridge_grid
            .validate()
            .map_err(|e| config(format!("ridge_grid: {e}")))?;
        if self.t_grid.lo < 0.0 || self.ridge_grid.lo < 0.0 {
            return Err(config("grids must be nonnegative"));
        }
        let mut labels: Vec<String> = self.design.iter().map(|d| d.family.label()).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.design.len() {
            return Err(config("two designs share a file label"));
        }
        Ok(())
    }

    /// Replaces every design seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        for d in &mut self.design {
            d.seed = seed;
        }
        self
    }
}

/// Power-law rows of the main simulation: `n = 500, p = 100, C = 1`, SNR 1.
pub fn fig2_config(output_dir: impl Into<PathBuf>) -> ExperimentConfig {
    let design = [0.1, 0.5, 1.0, 2.0]
        .into_iter()
        .map(|nu| DesignSpec::new(DesignFamily::PowerLaw { c: 1.0, nu }, DEFAULT_N, DEFAULT_P, 0))
        .collect();
    preset(design, output_dir.into())
}

/// Gaussian, Student-t and scaled-orthogonal rows.
pub fn fig3_config(output_dir: impl Into<PathBuf>) -> ExperimentConfig {
    let design = [
        DesignFamily::IidGaussian,
        DesignFamily::IidStudentT { df: DEFAULT_STUDENT_DF },
        DesignFamily::Orthogonal { s: 0.1 },
        DesignFamily::Orthogonal { s: 1.0 },
    ]
    .into_iter()
    .map(|f| DesignSpec::new(f, DEFAULT_N, DEFAULT_P, 0))
    .collect();
    preset(design, output_dir.into())
}

fn preset(design: Vec<DesignSpec>, output_dir: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        design,
        snr: 1.0,
        flows: default_flows(),
        t_grid: default_t_grid(),
        ridge_grid: default_ridge_grid(),
        output_dir,
        sigma_sq: 1.0,
        bayes: false,
    }
}

/// Haar-distributed orthogonal `p×p` matrix (QR of a Gaussian matrix with
/// the signs of `R`'s diagonal moved into `Q`).
fn random_orthogonal_frame(rng: &mut SimRng, n: usize, p: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, p, |_, _| rng.normal());
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Exact power-law spectrum with a seeded random eigenbasis.
pub fn gen_power_law_design(spec: &DesignSpec) -> Result<SpectralDesign> {
    spec.validate()?;
    let DesignFamily::PowerLaw { c, nu } = spec.family else {
        return Err(Error::contract("gen_power_law_design needs a power-law family"));
    };
    let values = (1..=spec.p).map(|i| c / (i as f64).powf(nu)).collect();
    let spectrum = Spectrum::new(values)?;
    // Spectrum::new sorts ascending, so the largest eigenvalue's vector is last.
    let v = random_orthogonal_frame(&mut SimRng::new(spec.seed, DESIGN_STREAM), spec.p, spec.p);
    SpectralDesign::from_parts(spec.n, spectrum, v)
}

/// `n×p` matrix of unit-variance i.i.d. entries.
pub fn gen_iid_design(spec: &DesignSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let mut rng = SimRng::new(spec.seed, DESIGN_STREAM);
    match spec.family {
        DesignFamily::IidGaussian => Ok(DMatrix::from_fn(spec.n, spec.p, |_, _| rng.normal())),
        DesignFamily::IidStudentT { df } => {
            let scale = ((f64::from(df) - 2.0) / f64::from(df)).sqrt();
            Ok(DMatrix::from_fn(spec.n, spec.p, |_, _| scale * rng.student_t(df)))
        }
        _ => Err(Error::contract("gen_iid_design needs a Gaussian or Student-t family")),
    }
}

/// `X = √(n s) Q` with `Q` a random `n×p` column-orthonormal frame.
pub fn gen_orthogonal_design(spec: &DesignSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let DesignFamily::Orthogonal { s } = spec.family else {
        return Err(Error::contract("gen_orthogonal_design needs an orthogonal family"));
    };
    let q = random_orthogonal_frame(&mut SimRng::new(spec.seed, DESIGN_STREAM), spec.n, spec.p);
    Ok(q * (spec.n as f64 * s).sqrt())
}

/// Spectral form of any design family.
pub fn gen_design(spec: &DesignSpec) -> Result<SpectralDesign> {
    match spec.family {
        DesignFamily::PowerLaw { .. } => gen_power_law_design(spec),
        DesignFamily::IidGaussian | DesignFamily::IidStudentT { .. } => design_decompose(&gen_iid_design(spec)?),
        DesignFamily::Orthogonal { .. } => design_decompose(&gen_orthogonal_design(spec)?),
    }
}

/// Gaussian `β₀` rescaled so that `‖β₀‖²/σ² = snr`. Returns `(β₀, σ²)`.
pub fn gen_signal(p: usize, snr: f64, sigma_sq: f64, seed: u64) -> Result<(Vec<f64>, f64)> {
    if p == 0 {
        return Err(config("p must be positive"));
    }
    if !(snr > 0.0 && snr.is_finite() && sigma_sq > 0.0 && sigma_sq.is_finite()) {
        return Err(config("snr and sigma_sq must be positive"));
    }
    let mut rng = SimRng::new(seed, SIGNAL_STREAM);
    let mut b = rng.normal_vec(p);
    let norm_sq: f64 = b.iter().map(|v| v * v).sum();
    let scale = (snr * sigma_sq / norm_sq).sqrt();
    b.iter_mut().for_each(|v| *v *= scale);
    Ok((b, sigma_sq))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodCurve {
    pub kind: FlowKind,
    pub curve: Vec<(f64, RiskDecomposition)>,
}

#[derive(Debug, Clone)]
pub struct DesignCurves {
    pub spec: DesignSpec,
    pub label: String,
    pub spectrum: Spectrum,
    pub signal: SignalModel,
    pub curves: Vec<MethodCurve>,
}

impl DesignCurves {
    pub fn curve(&self, kind: FlowKind) -> Option<&[(f64, RiskDecomposition)]> {
        self.curves.iter().find(|c| c.kind == kind).map(|c| c.curve.as_slice())
    }

    pub fn file_name(&self, kind: FlowKind) -> String {
        format!("{}_{}.csv", self.label, kind.short_name())
    }
}

/// Risk curves of every requested method on every design of `cfg`.
///
/// Flows are evaluated on `t_grid` and ridge on `ridge_grid`. Heavy ball is
/// skipped, with a warning, on designs whose smallest eigenvalue is zero.
pub fn figure_sweep(cfg: &ExperimentConfig) -> Result<Vec<DesignCurves>> {
    cfg.validate()?;
    let t_grid = cfg.t_grid.points();
    let ridge_grid = cfg.ridge_grid.points();
    cfg.design
        .par_iter()
        .map(|spec| {
            let design = gen_design(spec)?;
            let spectrum = design.spectrum.clone();
            let signal = if cfg.bayes {
                SignalModel::Prior(PriorSignal {
                    r_sq: cfg.snr * cfg.sigma_sq,
                    sigma_sq: cfg.sigma_sq,
                    n: spec.n,
                    p: spec.p,
                })
            } else {
                let (beta0, sigma_sq) = gen_signal(spec.p, cfg.snr, cfg.sigma_sq, spec.seed)?;
                SignalModel::Fixed(FixedSignal {
                    beta0_rotated: design.rotate(&beta0)?,
                    sigma_sq,
                    n: spec.n,
                })
            };
            let label = spec.family.label();
            let mut curves = Vec::with_capacity(cfg.flows.len());
            for &kind in &cfg.flows {
                if kind == FlowKind::HeavyBallFlow && spectrum.mu() == 0.0 {
                    warn!("{label}: smallest eigenvalue is zero, skipping heavy ball");
                    continue;
                }
                let grid = if kind == FlowKind::Ridge { &ridge_grid } else { &t_grid };
                let curve = risk::risk_curve(&spectrum, &signal, kind, grid)?;
                curves.push(MethodCurve { kind, curve });
            }
            Ok(DesignCurves {
                spec: *spec,
                label,
                spectrum,
                signal,
                curves,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub seeds: BTreeMap<String, u64>,
    /// File name to `sha256("blob <len>\0" ‖ bytes)` in hex.
    pub files: BTreeMap<String, String>,
}

/// Git-style blob hash of `bytes`, with SHA-256.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes one CSV per (design, method) and `manifest.json` into `dir`.
pub fn write_sweep(cfg: &ExperimentConfig, data: &[DesignCurves], dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut files = BTreeMap::new();
    let mut seeds = BTreeMap::new();
    for d in data {
        seeds.insert(d.label.clone(), d.spec.seed);
        for c in &d.curves {
            let mut buf = Vec::new();
            risk::write_curve_csv(&mut buf, c.kind, &c.curve)?;
            let name = d.file_name(c.kind);
            fs::write(dir.join(&name), &buf)?;
            files.insert(name, blob_hash(&buf));
        }
    }
    let manifest = Manifest {
        config: cfg.clone(),
        seeds,
        files,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    info!("wrote {} curves to {}", manifest.files.len(), dir.display());
    Ok(manifest)
}

/// [`figure_sweep`] followed by [`write_sweep`] into `cfg.output_dir`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Manifest> {
    let data = figure_sweep(cfg)?;
    write_sweep(cfg, &data, &cfg.output_dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shrinkage;

    fn spec(family: DesignFamily, n: usize, p: usize) -> DesignSpec {
        DesignSpec::new(family, n, p, 11)
    }

    #[test]
    fn power_law_spectrum_is_exact() {
        let d = gen_power_law_design(&spec(DesignFamily::PowerLaw { c: 1.0, nu: 1.0 }, 10, 4)).unwrap();
        assert_eq!(d.spectrum.eigenvalues(), &[0.25, 1.0 / 3.0, 0.5, 1.0]);
        let d = gen_power_law_design(&spec(DesignFamily::PowerLaw { c: 1.0, nu: 2.0 }, 500, 100)).unwrap();
        assert!((d.spectrum.kappa().unwrap() - 1e4).abs() < 1e-8);
        let vtv = d.v_basis.tr_mul(&d.v_basis);
        assert!((vtv - DMatrix::identity(100, 100)).amax() < 1e-12);
        assert!(gen_power_law_design(&spec(DesignFamily::PowerLaw { c: 1.0, nu: 0.0 }, 10, 4)).is_err());
        assert!(gen_power_law_design(&spec(DesignFamily::IidGaussian, 10, 4)).is_err());
    }

    #[test]
    fn iid_designs_have_unit_variance() {
        let var = |x: &DMatrix<f64>| {
            let m = x.mean();
            x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
        };
        let g = gen_iid_design(&spec(DesignFamily::IidGaussian, 500, 100)).unwrap();
        assert_eq!(g, gen_iid_design(&spec(DesignFamily::IidGaussian, 500, 100)).unwrap());
        let v = var(&g);
        assert!((0.95..=1.05).contains(&v), "{v}");
        let t = gen_iid_design(&spec(DesignFamily::IidStudentT { df: 5 }, 500, 100)).unwrap();
        let v = var(&t);
        assert!((0.9..=1.1).contains(&v), "{v}");
        assert!(matches!(
            gen_iid_design(&spec(DesignFamily::IidStudentT { df: 2 }, 5, 2)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn orthogonal_designs() {
        for (s, tol) in [(1.0, 1e-10), (0.1, 1e-11)] {
            let x = gen_orthogonal_design(&spec(DesignFamily::Orthogonal { s }, 60, 8)).unwrap();
            let g = x.tr_mul(&x) / 60.0;
            assert!((g - DMatrix::identity(8, 8) * s).amax() < 1e-10);
            let d = design_decompose(&x).unwrap();
            assert!(d.spectrum.eigenvalues().iter().all(|v| (v - s).abs() < tol));
        }
        let x = gen_orthogonal_design(&spec(DesignFamily::Orthogonal { s: 0.5 }, 9, 1)).unwrap();
        let norm_sq: f64 = x.iter().map(|v| v * v).sum();
        assert!((norm_sq - 9.0 * 0.5).abs() < 1e-12);
        assert!(matches!(
            gen_orthogonal_design(&spec(DesignFamily::Orthogonal { s: 1.0 }, 3, 4)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn signal_scaling() {
        let (b, s2) = gen_signal(100, 1.0, 1.0, 3).unwrap();
        assert_eq!(s2, 1.0);
        assert!((b.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
        let (b4, _) = gen_signal(100, 4.0, 1.0, 3).unwrap();
        assert!((b4.iter().map(|v| v * v).sum::<f64>() - 4.0).abs() < 1e-13);
        assert_eq!(b, gen_signal(100, 1.0, 1.0, 3).unwrap().0);
        assert!(gen_signal(3, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn config_parsing() {
        let text = r#"{
            "design": [{"family": {"kind": "power_law", "c": 1.0, "nu": 2.0}, "n": 50, "p": 5, "seed": 4},
                       {"family": {"kind": "iid_student_t"}, "n": 50, "p": 5}],
            "snr": 1.0,
            "flows": ["nest", "ridge"],
            "t_grid": {"lo": 0.01, "hi": 10.0, "count": 5, "log": true},
            "output_dir": "out"
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.design.len(), 2);
        assert_eq!(cfg.design[1].family, DesignFamily::IidStudentT { df: 5 });
        assert_eq!(cfg.ridge_grid, default_ridge_grid());
        assert!(!cfg.bayes);

        let single = r#"{"design": {"family": {"kind": "iid_gaussian"}}, "snr": 2, "output_dir": "o"}"#;
        let cfg = ExperimentConfig::from_json(single).unwrap();
        assert_eq!((cfg.design[0].n, cfg.design[0].p), (DEFAULT_N, DEFAULT_P));
        assert_eq!(cfg.flows, FlowKind::ALL.to_vec());

        let typo = r#"{"design": {"family": {"kind": "iid_gaussian"}}, "snrr": 2, "output_dir": "o"}"#;
        let msg = ExperimentConfig::from_json(typo).unwrap_err().to_string();
        assert!(msg.contains("snrr"), "{msg}");
        let bad = r#"{"design": {"family": {"kind": "iid_gaussian"}}, "snr": -1, "output_dir": "o"}"#;
        assert!(matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))));
    }

    #[test]
    fn single_coordinate_sweep_matches_scalar_formulas() {
        let mut cfg = preset(
            vec![DesignSpec::new(DesignFamily::Orthogonal { s: 1.0 }, 1, 1, 0)],
            PathBuf::from("unused"),
        );
        cfg.t_grid = GridSpec::linear(0.5, 2.0, 4);
        cfg.ridge_grid = GridSpec::linear(0.5, 2.0, 4);
        let data = figure_sweep(&cfg).unwrap();
        let d = &data[0];
        let SignalModel::Fixed(f) = &d.signal else { panic!() };
        let b2 = f.beta0_rotated[0].powi(2);
        assert!((b2 - 1.0).abs() < 1e-14);
        for c in &d.curves {
            for &(t, r) in &c.curve {
                let sh = shrinkage::shrink(c.kind, 1.0, 1.0, t).unwrap();
                assert!((r.bias_sq - b2 * sh.factor.powi(2)).abs() < 1e-14);
                assert!((r.variance - sh.complement.powi(2)).abs() < 1e-14);
            }
        }
        assert!((d.curve(FlowKind::GradientFlow).unwrap()[1].1.bias_sq - (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn heavy_ball_skipped_without_curvature() {
        // n < p Gaussian design has a zero eigenvalue.
        let mut cfg = preset(
            vec![DesignSpec::new(DesignFamily::IidGaussian, 4, 6, 1)],
            "unused".into(),
        );
        cfg.t_grid = GridSpec::log(0.1, 10.0, 5);
        cfg.ridge_grid = GridSpec::log(0.1, 10.0, 5);
        let d = &figure_sweep(&cfg).unwrap()[0];
        assert!(d.curve(FlowKind::HeavyBallFlow).is_none());
        assert_eq!(d.curves.len(), 3);
    }

    #[test]
    fn sweep_output_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = fig2_config(dir.path().join("a"));
        for d in &mut cfg.design {
            d.p = 10;
            d.n = 50;
        }
        cfg.t_grid = GridSpec::log(1e-2, 1e3, 40);
        cfg.ridge_grid = GridSpec::log(1e-6, 1e3, 40);
        let m1 = run_sweep(&cfg).unwrap();
        assert_eq!(m1.files.len(), 16);
        assert!(m1.files.contains_key("powerlaw-c1-nu0.5_hb.csv"));
        let mut cfg2 = cfg.clone();
        cfg2.output_dir = dir.path().join("b");
        let m2 = run_sweep(&cfg2).unwrap();
        assert_eq!(m1.files, m2.files);
        for name in m1.files.keys() {
            let a = fs::read(dir.path().join("a").join(name)).unwrap();
            let b = fs::read(dir.path().join("b").join(name)).unwrap();
            assert_eq!(a, b);
            assert_eq!(blob_hash(&a), m1.files[name]);
        }
        let text = fs::read_to_string(dir.path().join("a/manifest.json")).unwrap();
        let back: Manifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m1);
    }

    #[test]
    fn blob_hash_of_empty_input() {
        // `git hash-object --object-format=sha256 /dev/null`
        assert_eq!(
            blob_hash(b""),
            "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813"
        );
    }
}
