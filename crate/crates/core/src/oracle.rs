//! Reference solvers for the closed forms: fixed-step RK4 on the decoupled
//! flow equations, and the discrete iterations the flows model.
//!
//! In eigen-coordinates each flow is a scalar equation in `α_i(t)`:
//!
//! - gradient flow: `α̇ = c − sα`
//! - accelerated flow: `α̈ + (3/t)α̇ + sα = c`
//! - heavy-ball flow: `α̈ + 2√μ α̇ + sα = c`
//!
//! all started from rest at zero, with `c_i = v_iᵀXᵀy/n`.

use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::is_ascending;
use crate::linalg::{attach_response, design_decompose, Spectrum};
use crate::rng::SimRng;
use crate::shrinkage::FlowKind;

/// Accelerated flow starts here from its Taylor expansion.
pub const ACCEL_T0: f64 = 1e-6;
/// During the accelerated warm-up the step is at most `t / ACCEL_WARMUP_DIV`.
const ACCEL_WARMUP_DIV: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoupledState {
    pub time: f64,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

/// Fixed-step RK4 integrator for one flow on a spectrum.
///
/// Steps land on multiples of `step`; [`advance_to`](Self::advance_to) takes a
/// shortened step to hit targets in between. The accelerated flow starts at
/// [`ACCEL_T0`] and ramps its step up geometrically until `t = step`, since
/// the `3/t` damping is far too stiff for a full step near zero.
pub struct FlowIntegrator {
    kind: FlowKind,
    eig: Vec<f64>,
    forcing: Vec<f64>,
    damping: f64,
    step: f64,
    state: DecoupledState,
}

impl FlowIntegrator {
    pub fn new(kind: FlowKind, spectrum: &Spectrum, forcing: &[f64], step: f64) -> Result<Self> {
        if !kind.is_flow() {
            return Err(Error::contract("ridge has no flow to integrate"));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::domain(format!("step must be positive, got {step}")));
        }
        let p = spectrum.len();
        if forcing.len() != p {
            return Err(Error::contract(format!(
                "forcing has length {}, spectrum has {p}",
                forcing.len()
            )));
        }
        for (i, (&s, &c)) in spectrum.eigenvalues().iter().zip(forcing).enumerate() {
            if s == 0.0 && c != 0.0 {
                return Err(Error::contract(format!(
                    "forcing {i} is {c} on a zero eigenvalue (must be 0)"
                )));
            }
        }
        let damping = if kind == FlowKind::HeavyBallFlow {
            let mu = spectrum.mu();
            if mu <= 0.0 {
                return Err(Error::domain("heavy-ball flow needs mu > 0"));
            }
            2.0 * mu.sqrt()
        } else {
            0.0
        };
        let mut state = DecoupledState {
            time: 0.0,
            position: vec![0.0; p],
            velocity: vec![0.0; p],
        };
        if kind == FlowKind::AcceleratedFlow {
            // α = c t²/8 + O(t⁴), α̇ = c t/4 + O(t³)
            let t0 = ACCEL_T0;
            state.time = t0;
            state.position = forcing.iter().map(|c| c * t0 * t0 / 8.0).collect();
            state.velocity = forcing.iter().map(|c| c * t0 / 4.0).collect();
        } else if kind == FlowKind::GradientFlow {
            state.velocity = forcing.to_vec();
        }
        Ok(FlowIntegrator {
            kind,
            eig: spectrum.eigenvalues().to_vec(),
            forcing: forcing.to_vec(),
            damping,
            step,
            state,
        })
    }

    pub fn state(&self) -> &DecoupledState {
        &self.state
    }

    fn natural_next(&self) -> f64 {
        let t = self.state.time;
        if self.kind == FlowKind::AcceleratedFlow && t < self.step {
            return (t + t / ACCEL_WARMUP_DIV).min(self.step);
        }
        let k = (t / self.step + 1e-9).floor() + 1.0;
        k * self.step
    }

    /// Integrates forward to exactly `target`.
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        if !target.is_finite() || target < self.state.time - 1e-12 {
            return Err(Error::domain(format!(
                "cannot integrate from t = {} back to {target}",
                self.state.time
            )));
        }
        while self.state.time < target {
            let next = self.natural_next().min(target);
            self.rk4_step(next - self.state.time);
            self.state.time = next;
        }
        Ok(())
    }

    fn rk4_step(&mut self, h: f64) {
        let t = self.state.time;
        for i in 0..self.eig.len() {
            let (s, c) = (self.eig[i], self.forcing[i]);
            match self.kind {
                FlowKind::GradientFlow => {
                    let f = |a: f64| c - s * a;
                    let a = self.state.position[i];
                    let k1 = f(a);
                    let k2 = f(a + 0.5 * h * k1);
                    let k3 = f(a + 0.5 * h * k2);
                    let k4 = f(a + h * k3);
                    let a = a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                    self.state.position[i] = a;
                    self.state.velocity[i] = f(a);
                }
                _ => {
                    let accel = self.kind == FlowKind::AcceleratedFlow;
                    let damp = self.damping;
                    let f = |tt: f64, a: f64, v: f64| {
                        let d = if accel { 3.0 / tt } else { damp };
                        c - s * a - d * v
                    };
                    let (a, v) = (self.state.position[i], self.state.velocity[i]);
                    let (ka1, kv1) = (v, f(t, a, v));
                    let (ka2, kv2) = (v + 0.5 * h * kv1, f(t + 0.5 * h, a + 0.5 * h * ka1, v + 0.5 * h * kv1));
                    let (ka3, kv3) = (v + 0.5 * h * kv2, f(t + 0.5 * h, a + 0.5 * h * ka2, v + 0.5 * h * kv2));
                    let (ka4, kv4) = (v + h * kv3, f(t + h, a + h * ka3, v + h * kv3));
                    self.state.position[i] = a + h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
                    self.state.velocity[i] = v + h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
                }
            }
        }
    }
}

/// RK4 trajectory sampled at `0, step, 2·step, …` and at `t_end`.
///
/// The accelerated flow's warm-up steps are not sampled; its state at `t = 0`
/// is the exact rest state.
pub fn integrate_flow(
    kind: FlowKind,
    spectrum: &Spectrum,
    forcing: &[f64],
    t_end: f64,
    step: f64,
) -> Result<Vec<DecoupledState>> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::domain(format!("t_end must be nonnegative, got {t_end}")));
    }
    let mut integ = FlowIntegrator::new(kind, spectrum, forcing, step)?;
    let p = spectrum.len();
    let mut out = vec![DecoupledState {
        time: 0.0,
        position: vec![0.0; p],
        velocity: if kind == FlowKind::GradientFlow {
            forcing.to_vec()
        } else {
            vec![0.0; p]
        },
    }];
    let mut k = 1.0;
    loop {
        let target = (k * step).min(t_end);
        if target <= out.last().map_or(0.0, |s| s.time) {
            break;
        }
        integ.advance_to(target)?;
        out.push(integ.state().clone());
        if target >= t_end {
            break;
        }
        k += 1.0;
    }
    Ok(out)
}

/// Closed-form position `(1 − g_i) c_i / s_i` (0 where `s_i = 0`).
pub fn closed_form_position(kind: FlowKind, spectrum: &Spectrum, forcing: &[f64], t: f64) -> Result<Vec<f64>> {
    crate::estimators::flow_coords(spectrum, forcing, kind, t)
}

/// Sup over `t_grid` and coordinates of |RK4 position − closed form|.
pub fn compare_closed_form(
    kind: FlowKind,
    spectrum: &Spectrum,
    forcing: &[f64],
    t_grid: &[f64],
    step: f64,
) -> Result<f64> {
    if !is_ascending(t_grid) || t_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::contract("t_grid must be ascending, finite and nonnegative"));
    }
    let mut integ = FlowIntegrator::new(kind, spectrum, forcing, step)?;
    let mut sup: f64 = 0.0;
    for &t in t_grid {
        let exact = closed_form_position(kind, spectrum, forcing, t)?;
        let pos = if t < integ.state().time {
            // only before the accelerated Taylor start, where |α| ≤ c·t₀²/8
            vec![0.0; spectrum.len()]
        } else {
            integ.advance_to(t)?;
            integ.state().position.clone()
        };
        for (a, b) in pos.iter().zip(&exact) {
            sup = sup.max((a - b).abs());
        }
    }
    Ok(sup)
}

/// `½‖α̇‖² + ½ Σ s_i (α_i − c_i/s_i)²`, nonincreasing along heavy-ball flow.
pub fn hb_energy(state: &DecoupledState, spectrum: &Spectrum, forcing: &[f64]) -> f64 {
    let kinetic: f64 = state.velocity.iter().map(|v| v * v).sum();
    let potential: f64 = spectrum
        .eigenvalues()
        .iter()
        .zip(forcing)
        .zip(&state.position)
        .filter(|((&s, _), _)| s > 0.0)
        .map(|((&s, &c), &a)| s * (a - c / s).powi(2))
        .sum();
    0.5 * (kinetic + potential)
}

/// Seeded `(spectrum, forcing)` pairs with `p ≤ 10`.
///
/// Instance 0 has a repeated smallest eigenvalue (`s = μ` exactly) and
/// instance 1 a zero eigenvalue with zero forcing. The rest come from
/// Gaussian designs with `n = 3p` and a Gaussian response.
pub fn oracle_instances(seed: u64, count: usize) -> Result<Vec<(Spectrum, Vec<f64>)>> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = SimRng::new(seed.wrapping_add(i as u64), 0);
        match i {
            0 => out.push((Spectrum::new(vec![0.2, 0.2, 0.7, 1.5])?, rng.normal_vec(4))),
            1 => {
                let mut c = rng.normal_vec(4);
                c[0] = 0.0;
                out.push((Spectrum::new(vec![0.0, 0.4, 1.1, 2.0])?, c));
            }
            _ => {
                let p = 2 + (i % 9);
                let n = 3 * p;
                let x = DMatrix::from_fn(n, p, |_, _| rng.normal());
                let y = rng.normal_vec(n);
                let d = attach_response(design_decompose(&x)?, &x, &y)?;
                let c = d.rotated_channel.clone().unwrap_or_default();
                out.push((d.spectrum, c));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleGap {
    pub kind: FlowKind,
    /// Instances the flow applies to (heavy ball needs `μ > 0`).
    pub instances: usize,
    pub sup_error: f64,
}

/// Sup gap between RK4 and the closed forms of every flow over `instances`.
pub fn oracle_equivalence(instances: &[(Spectrum, Vec<f64>)], t_grid: &[f64], step: f64) -> Result<Vec<OracleGap>> {
    [
        FlowKind::GradientFlow,
        FlowKind::AcceleratedFlow,
        FlowKind::HeavyBallFlow,
    ]
    .into_iter()
    .map(|kind| {
        let usable: Vec<_> = instances
            .iter()
            .filter(|(sp, _)| kind != FlowKind::HeavyBallFlow || sp.mu() > 0.0)
            .collect();
        let errs = usable
            .par_iter()
            .map(|(sp, c)| compare_closed_form(kind, sp, c, t_grid, step))
            .collect::<Result<Vec<f64>>>()?;
        Ok(OracleGap {
            kind,
            instances: usable.len(),
            sup_error: errs.into_iter().fold(0.0, f64::max),
        })
    })
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IterKind {
    GradientDescent,
    Nesterov,
    HeavyBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterateConfig {
    pub step_size: f64,
    /// Heavy-ball momentum `η`; ignored by the other methods.
    pub momentum: f64,
    pub iterations: usize,
}

/// Iterates `β^(0) = 0, β^(1), …, β^(k)` of the chosen method on `(X, y)`.
///
/// Nesterov takes its gradient step from the extrapolated point:
/// `β^(k) = θ^(k−1) + (ε/n)Xᵀ(y − Xθ^(k−1))`,
/// `θ^(k) = β^(k) + (k−1)/(k+2)·(β^(k) − β^(k−1))`, with `θ^(0) = 0`.
/// Heavy ball uses `β^(−1) = β^(0) = 0`.
pub fn discrete_iterates(kind: IterKind, x: &DMatrix<f64>, y: &[f64], config: &IterateConfig) -> Result<Vec<Vec<f64>>> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(Error::contract(format!(
            "response has length {}, expected {n}",
            y.len()
        )));
    }
    if !(config.step_size > 0.0 && config.step_size.is_finite()) {
        return Err(Error::domain("step size must be positive"));
    }
    if config.momentum.is_nan() || config.momentum < 0.0 {
        return Err(Error::domain("momentum must be nonnegative"));
    }
    if config.iterations == 0 {
        return Err(Error::domain("need at least one iteration"));
    }
    let scale = config.step_size / n as f64;
    let y = DVector::from_column_slice(y);
    let xty = x.tr_mul(&y);
    let grad_step = |b: &DVector<f64>| -> DVector<f64> { (&xty - x.tr_mul(&(x * b))) * scale };

    let big_l = crate::linalg::sym_eig(&(x.tr_mul(x) / n as f64))
        .map(|(v, _)| v.last().copied().unwrap_or(0.0))
        .unwrap_or(f64::NAN);
    if config.step_size * big_l > 1.0 {
        warn!("step size {} exceeds 1/L = {}", config.step_size, 1.0 / big_l);
    }

    let mut out = Vec::with_capacity(config.iterations + 1);
    let mut prev = DVector::zeros(p);
    let mut cur = DVector::zeros(p);
    let mut theta = DVector::zeros(p);
    out.push(cur.as_slice().to_vec());
    for k in 1..=config.iterations {
        let next = match kind {
            IterKind::GradientDescent => &cur + grad_step(&cur),
            IterKind::Nesterov => &theta + grad_step(&theta),
            IterKind::HeavyBall => &cur + grad_step(&cur) + (&cur - &prev) * config.momentum,
        };
        if kind == IterKind::Nesterov {
            let m = (k as f64 - 1.0) / (k as f64 + 2.0);
            theta = &next + (&next - &cur) * m;
        }
        prev = std::mem::replace(&mut cur, next);
        out.push(cur.as_slice().to_vec());
    }
    Ok(out)
}

/// Closed form of gradient descent in eigen-coordinates:
/// `α_i^(k) = (1 − (1 − εs_i)^k) c_i / s_i`.
pub fn gd_closed_form(spectrum: &Spectrum, forcing: &[f64], step_size: f64, k: usize) -> Vec<f64> {
    spectrum
        .eigenvalues()
        .iter()
        .zip(forcing)
        .map(|(&s, &c)| {
            if s > 0.0 {
                let k = i32::try_from(k).unwrap_or(i32::MAX);
                (1.0 - (1.0 - step_size * s).powi(k)) * c / s
            } else {
                c * step_size * k as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    fn random_instance(p: usize, seed: u64) -> (Spectrum, Vec<f64>) {
        let mut rng = SimRng::new(seed, 0);
        let eig: Vec<f64> = (0..p).map(|_| 0.05 + 2.0 * rng.uniform()).collect();
        (Spectrum::new(eig).unwrap(), rng.normal_vec(p))
    }

    #[test]
    fn gradient_flow_scalar() {
        let sp = Spectrum::new(vec![1.0]).unwrap();
        let traj = integrate_flow(FlowKind::GradientFlow, &sp, &[1.0], 5.0, 1e-3).unwrap();
        for st in &traj {
            if (st.time - 1.0).abs() < 1e-9 || (st.time - 5.0).abs() < 1e-9 {
                assert!((st.position[0] - (1.0 - (-st.time).exp())).abs() < 1e-8);
            }
        }
        assert_eq!(traj.last().unwrap().time, 5.0);
    }

    #[test]
    fn accelerated_scalar() {
        let sp = Spectrum::new(vec![1.0]).unwrap();
        let mut it = FlowIntegrator::new(FlowKind::AcceleratedFlow, &sp, &[1.0], 1e-3).unwrap();
        it.advance_to(2.0).unwrap();
        let expect = 1.0 - crate::special::ratio(2.0);
        assert!((it.state().position[0] - expect).abs() < 1e-6);
        assert!((expect - 0.42328).abs() < 1e-5);
    }

    #[test]
    fn null_direction_stays_at_zero() {
        let sp = Spectrum::new(vec![0.0, 1.0]).unwrap();
        let traj = integrate_flow(FlowKind::AcceleratedFlow, &sp, &[0.0, 1.0], 10.0, 1e-2).unwrap();
        assert!(traj.iter().all(|s| s.position[0] == 0.0));
        assert!(matches!(
            FlowIntegrator::new(FlowKind::AcceleratedFlow, &sp, &[0.5, 1.0], 1e-2),
            Err(Error::Contract(_))
        ));
        assert!(FlowIntegrator::new(FlowKind::GradientFlow, &sp, &[0.0, 1.0], 0.0).is_err());
        assert!(FlowIntegrator::new(FlowKind::HeavyBallFlow, &sp, &[0.0, 1.0], 1e-2).is_err());
    }

    #[test]
    fn closed_forms_match_rk4() {
        let grid: Vec<f64> = (0..=100).map(|i| 0.5 * i as f64).collect();
        let (sp, c) = random_instance(5, 3);
        let e = compare_closed_form(FlowKind::GradientFlow, &sp, &c, &grid[..21], 1e-3).unwrap();
        assert!(e <= 1e-8, "gf {e}");
        let e = compare_closed_form(FlowKind::AcceleratedFlow, &sp, &c, &grid, 1e-3).unwrap();
        assert!(e <= 1e-6, "nest {e}");
        let sp2 = Spectrum::new(vec![0.3, 0.3, 0.9, 1.7]).unwrap();
        let e = compare_closed_form(FlowKind::HeavyBallFlow, &sp2, &[1.0, -0.5, 0.7, 2.0], &grid, 1e-3).unwrap();
        assert!(e <= 1e-6, "hb {e}");
    }

    #[test]
    fn instance_set() {
        let inst = oracle_instances(5, 12).unwrap();
        assert_eq!(inst.len(), 12);
        assert_eq!(inst[0].0.eigenvalues()[0], inst[0].0.eigenvalues()[1]);
        assert_eq!(inst[1].0.mu(), 0.0);
        assert!(inst.iter().all(|(sp, c)| sp.len() <= 10 && sp.len() == c.len()));
        let gaps = oracle_equivalence(&inst[..3], &[0.0, 1.0, 5.0], 1e-2).unwrap();
        assert_eq!(gaps[2].instances, 2);
        assert!(gaps.iter().all(|g| g.sup_error < 1e-6));
    }

    #[test]
    fn step_halving_is_fourth_order() {
        let (sp, c) = random_instance(4, 8);
        let grid = [0.5, 1.0, 2.0, 4.0];
        for kind in [
            FlowKind::GradientFlow,
            FlowKind::AcceleratedFlow,
            FlowKind::HeavyBallFlow,
        ] {
            let mut prev = compare_closed_form(kind, &sp, &c, &grid, 0.2).unwrap();
            for h in [0.1, 0.05] {
                let e = compare_closed_form(kind, &sp, &c, &grid, h).unwrap();
                if prev > 1e-10 {
                    assert!(prev / e >= 8.0, "{kind} h = {h}: {prev} -> {e}");
                }
                prev = e;
            }
        }
    }

    #[test]
    fn heavy_ball_energy_dissipates() {
        let (sp, c) = random_instance(6, 21);
        let traj = integrate_flow(FlowKind::HeavyBallFlow, &sp, &c, 30.0, 1e-2).unwrap();
        let energies: Vec<f64> = traj.iter().map(|s| hb_energy(s, &sp, &c)).collect();
        for w in energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-8);
        }
        assert!(energies.last().unwrap() < &(0.01 * energies[0]));
    }

    fn small_design(seed: u64) -> (DMatrix<f64>, Vec<f64>) {
        let mut rng = SimRng::new(seed, 0);
        let x = DMatrix::from_fn(30, 4, |_, _| rng.normal());
        (x, rng.normal_vec(30))
    }

    #[test]
    fn first_steps() {
        let (x, y) = small_design(1);
        let eps = 0.1;
        let cfg = IterateConfig {
            step_size: eps,
            momentum: 0.5,
            iterations: 2,
        };
        let gd = discrete_iterates(IterKind::GradientDescent, &x, &y, &cfg).unwrap();
        let expect = x.tr_mul(&DVector::from_column_slice(&y)) * (eps / 30.0);
        for (a, b) in gd[1].iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        // θ^(1) = β^(1), so the first two Nesterov iterates are gradient steps
        let nest = discrete_iterates(IterKind::Nesterov, &x, &y, &cfg).unwrap();
        assert_eq!(nest[1], gd[1]);
        assert_eq!(nest[2], gd[2]);
        let hb = discrete_iterates(IterKind::HeavyBall, &x, &y, &cfg).unwrap();
        assert_eq!(hb[1], gd[1]);
        assert_ne!(hb[2], gd[2]);
    }

    #[test]
    fn gd_converges_and_matches_closed_form() {
        let (x, y) = small_design(2);
        let d = crate::linalg::attach_response(crate::linalg::design_decompose(&x).unwrap(), &x, &y).unwrap();
        let eps = 0.5 / d.spectrum.big_l();
        let cfg = IterateConfig {
            step_size: eps,
            momentum: 0.0,
            iterations: 10_000,
        };
        let it = discrete_iterates(IterKind::GradientDescent, &x, &y, &cfg).unwrap();
        let ols = crate::estimators::ridge_estimate(&d, 0.0).unwrap();
        let last = it.last().unwrap();
        assert!(last.iter().zip(&ols).all(|(a, b)| (a - b).abs() < 1e-6));
        let c = d.rotated_channel.as_ref().unwrap();
        let k50 = d.unrotate(&gd_closed_form(&d.spectrum, c, eps, 50)).unwrap();
        assert!(it[50].iter().zip(&k50).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn gd_approaches_gradient_flow() {
        let (x, y) = small_design(3);
        let d = crate::linalg::attach_response(crate::linalg::design_decompose(&x).unwrap(), &x, &y).unwrap();
        let t = 1.0;
        let flow = crate::estimators::flow_estimate(&d, FlowKind::GradientFlow, t).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4] {
            let k = (t / eps).round() as usize;
            let cfg = IterateConfig {
                step_size: eps,
                momentum: 0.0,
                iterations: k,
            };
            let it = discrete_iterates(IterKind::GradientDescent, &x, &y, &cfg).unwrap();
            let err = it[k].iter().zip(&flow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < last, "eps {eps}: {err}");
            last = err;
        }
    }
}
