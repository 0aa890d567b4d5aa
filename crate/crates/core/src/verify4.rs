//! Residual checks for the 4×4 real symmetric Mielke flow.
//!
//! `η_k` are rebuilt from a numeric trajectory through
//! `(log η_k)' = 2 Σ_{i≤k} (a_i - Tr/4)` with `η_k(0) = 1`, and the structural
//! relations are evaluated along the samples. Every check is invariant under
//! rescaling the `η`'s.
//!
//! Derivatives of sampled curves use the five-point stencil
//! `f'(s_i) ≈ (f_{i-2} - 8f_{i-1} + 8f_{i+1} - f_{i+2}) / 12h`, switching to
//! the one-sided five-point forms within two samples of either end.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{GeneratorKind, HermitianMatrix};
use crate::numeric::{integrate, FlowTrajectory, IntegrationPlan};
use crate::spectra::{eigh, exponents};

/// Minimum sample density of a trajectory, per unit `s`.
pub const MIN_SAMPLES_PER_UNIT: f64 = 200.0;
/// Corner entries below this count as zero.
pub const ZERO_CORNER_TOL: f64 = 1e-13;
const FIT_POINTS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedVariables4 {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual4Report {
    /// Relative drift of `γ η₁ η₃`, or `max γ` when `g₀ = 0`.
    pub max_gamma_product_drift: f64,
    /// `|β_k - (η̃_k/4η_k² - γ - δ-terms)|`, relative to `max(1, ‖H₀ - Tr/4‖²)`.
    pub max_beta_residuals: [f64; 3],
    /// Relative drift of `δ₁η₁η₂/η₃` and `δ₂η₂η₃/η₁` (or `max δ_k` when `δ_k(0) = 0`).
    pub max_delta_ratio_drift: [f64; 2],
    /// Largest negative part of the scaled `ρ̃_k²` radicands.
    pub rho_condition_residuals: [f64; 3],
    /// Relative least-squares residual of `η₂` on `{e^{(u_i+u_j)s}}`.
    pub eta2_fit_residual: f64,
    /// Condition number of the fit basis.
    pub eta2_fit_condition: f64,
}

impl Residual4Report {
    pub fn worst(&self) -> f64 {
        [self.max_gamma_product_drift, self.eta2_fit_residual]
            .into_iter()
            .chain(self.max_beta_residuals)
            .chain(self.max_delta_ratio_drift)
            .chain(self.rho_condition_residuals)
            .fold(0.0, f64::max)
    }
}

/// Sampled `η₁, η₂, η₃` with their logarithmic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaCurves {
    pub s: Vec<f64>,
    pub log_eta: [Vec<f64>; 3],
    pub dlog: [Vec<f64>; 3],
}

impl EtaCurves {
    pub fn eta(&self, k: usize) -> Vec<f64> {
        self.log_eta[k].iter().map(|l| l.exp()).collect()
    }
}

fn check_real4(h: &HermitianMatrix) -> Result<()> {
    if h.dim() != 4 {
        return Err(Error::DimensionUnsupported { expected: 4, got: h.dim() });
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if h.get(i, j).im != 0.0 {
                return Err(Error::NotRealSymmetric { i, j });
            }
        }
    }
    Ok(())
}

pub fn reduced4(h: &HermitianMatrix) -> Result<ReducedVariables4> {
    check_real4(h)?;
    let e = |i: usize, j: usize| h.get(i, j).re;
    Ok(ReducedVariables4 {
        z1: e(0, 0) - e(1, 1),
        z2: e(1, 1) - e(2, 2),
        z3: e(2, 2) - e(3, 3),
        beta1: e(0, 1).powi(2),
        beta2: e(1, 2).powi(2),
        beta3: e(2, 3).powi(2),
        delta1: e(0, 2).powi(2),
        delta2: e(1, 3).powi(2),
        gamma: e(0, 3).powi(2),
    })
}

/// Uniform spacing of a trajectory, checked against the density floor.
fn spacing(traj: &FlowTrajectory) -> Result<f64> {
    let s = traj.s_values();
    if s.len() < 5 {
        return Err(Error::TooSparse(0.0));
    }
    let span = s[s.len() - 1] - s[0];
    let h = span / (s.len() - 1) as f64;
    let density = 1.0 / h;
    if density < MIN_SAMPLES_PER_UNIT {
        return Err(Error::TooSparse(density));
    }
    if s.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::InvalidArgument("trajectory samples must be uniformly spaced".into()));
    }
    Ok(h)
}

fn stencil_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]
            } else if i == 0 {
                -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]
            } else if i == 1 {
                -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]
            } else if i + 1 == n {
                25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]
            } else {
                3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]
            };
            d / (12.0 * h)
        })
        .collect()
}

/// Rebuilds `log η_k` by integrating the log-derivatives, with the
/// end-corrected trapezoid rule `h/2 (f_i + f_{i+1}) - h²/12 (f'_{i+1} - f'_i)`.
pub fn reconstruct_etas(traj: &FlowTrajectory) -> Result<EtaCurves> {
    let h = spacing(traj)?;
    for (_, m) in &traj.samples {
        check_real4(m)?;
    }
    let shift = traj.samples[0].1.trace() / 4.0;
    let mut dlog: [Vec<f64>; 3] = Default::default();
    for (_, m) in &traj.samples {
        let mut acc = 0.0;
        for (k, d) in dlog.iter_mut().enumerate() {
            acc += 2.0 * (m.get(k, k).re - shift);
            d.push(acc);
        }
    }
    let mut log_eta: [Vec<f64>; 3] = Default::default();
    for k in 0..3 {
        let f = &dlog[k];
        let df = stencil_derivative(f, h);
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(f.len());
        out.push(0.0);
        for i in 0..f.len() - 1 {
            acc += 0.5 * h * (f[i] + f[i + 1]) - h * h / 12.0 * (df[i + 1] - df[i]);
            out.push(acc);
        }
        log_eta[k] = out;
    }
    Ok(EtaCurves { s: traj.s_values(), log_eta, dlog })
}

fn drift(values: impl Iterator<Item = f64>) -> f64 {
    let mut first = None;
    let mut worst: f64 = 0.0;
    for v in values {
        let v0 = *first.get_or_insert(v);
        worst = worst.max((v - v0).abs() / v0.abs());
    }
    worst
}

/// Residuals of the `g₀ = 0` relations. The corner entry must vanish.
pub fn residuals_g0zero(h0: &HermitianMatrix, plan: &IntegrationPlan) -> Result<Residual4Report> {
    check_real4(h0)?;
    if h0.get(0, 3).norm() > ZERO_CORNER_TOL * h0.frobenius_norm().max(1.0) {
        return Err(Error::InvalidArgument("corner entry g0 must vanish".into()));
    }
    residuals_general(h0, plan)
}

pub fn residuals_general(h0: &HermitianMatrix, plan: &IntegrationPlan) -> Result<Residual4Report> {
    check_real4(h0)?;
    if plan.generator != GeneratorKind::Mielke {
        return Err(Error::InvalidArgument("residual checks need the Mielke generator".into()));
    }
    let traj = integrate(h0, plan)?;
    residuals_from_trajectory(h0, &traj)
}

pub fn residuals_from_trajectory(h0: &HermitianMatrix, traj: &FlowTrajectory) -> Result<Residual4Report> {
    let h = spacing(traj)?;
    let curves = reconstruct_etas(traj)?;
    let vars: Vec<ReducedVariables4> = traj.samples.iter().map(|(_, m)| reduced4(m)).collect::<Result<_>>()?;
    let l = &curves.log_eta;
    let n = vars.len();

    let r0 = vars[0];
    let gamma_drift = if r0.gamma > 0.0 {
        drift((0..n).map(|i| vars[i].gamma.ln() + l[0][i] + l[2][i]).map(f64::exp))
    } else {
        vars.iter().map(|v| v.gamma).fold(0.0, f64::max)
    };
    let delta_drift = |d0: f64, d: &dyn Fn(usize) -> f64, log_ratio: &dyn Fn(usize) -> f64| {
        if d0 > 0.0 {
            drift((0..n).map(|i| (d(i).ln() + log_ratio(i)).exp()))
        } else {
            (0..n).map(d).fold(0.0, f64::max)
        }
    };
    let delta_ratio = [
        delta_drift(r0.delta1, &|i| vars[i].delta1, &|i| l[0][i] + l[1][i] - l[2][i]),
        delta_drift(r0.delta2, &|i| vars[i].delta2, &|i| l[1][i] + l[2][i] - l[0][i]),
    ];

    // η̃_k / 4η_k² = (log η_k)'' / 4.
    let second: Vec<Vec<f64>> = curves.dlog.iter().map(|d| stencil_derivative(d, h)).collect();
    let shift = h0.trace() / 4.0;
    let centered = HermitianMatrix::from_upper(4, |i, j| if i == j { h0.get(i, j) - shift } else { h0.get(i, j) })?;
    let scale = centered.frobenius_norm().powi(2).max(1.0);
    let mut beta_res = [0.0f64; 3];
    let mut rho_res = [0.0f64; 3];
    for (i, v) in vars.iter().enumerate() {
        let base = [
            second[0][i] / 4.0 - v.gamma - v.delta1,
            second[1][i] / 4.0 - v.gamma - v.delta1 - v.delta2,
            second[2][i] / 4.0 - v.gamma - v.delta2,
        ];
        for (k, (b, beta)) in base.iter().zip([v.beta1, v.beta2, v.beta3]).enumerate() {
            beta_res[k] = beta_res[k].max((b - beta).abs() / scale);
            rho_res[k] = rho_res[k].max((-b).max(0.0) / scale);
        }
    }

    let u = exponents(&eigh(h0)?, h0.trace()).u;
    let (fit, cond) = eta2_fit(&curves, &u)?;
    Ok(Residual4Report {
        max_gamma_product_drift: gamma_drift,
        max_beta_residuals: beta_res,
        max_delta_ratio_drift: delta_ratio,
        rho_condition_residuals: rho_res,
        eta2_fit_residual: fit,
        eta2_fit_condition: cond,
    })
}

/// Least-squares fit of `η₂` on the six pair exponentials over log-spaced
/// samples in `[0, 3/max|u|]`. Returns the relative residual and the basis
/// condition number.
fn eta2_fit(curves: &EtaCurves, u: &[f64]) -> Result<(f64, f64)> {
    let s = &curves.s;
    let max_u = u.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let last = *s.last().expect("trajectory is non-empty");
    let end = if max_u > 0.0 { (3.0 / max_u).min(last) } else { last };
    let h = s[1] - s[0];
    let mut idx: Vec<usize> = std::iter::once(0)
        .chain((0..FIT_POINTS).map(|m| {
            let x = end * 10f64.powf(-3.0 + 3.0 * m as f64 / (FIT_POINTS - 1) as f64);
            ((x - s[0]) / h).round() as usize
        }))
        .map(|i| i.min(s.len() - 1))
        .collect();
    idx.sort_unstable();
    idx.dedup();

    let pairs: Vec<f64> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| u[i] + u[j]).collect();
    let eta2 = curves.eta(1);
    let a = DMatrix::from_fn(idx.len(), pairs.len(), |r, c| (pairs[c] * s[idx[r]]).exp());
    let y = DVector::from_iterator(idx.len(), idx.iter().map(|&i| eta2[i]));
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x =
        svd.solve(&y, 1e-14 * smax).map_err(|e| Error::InvalidArgument(format!("least-squares fit failed: {e}")))?;
    let resid = (&a * x - &y).norm() / y.norm();
    Ok((resid, cond))
}

/// Residual reports at `base_steps · 2^j`, `j < levels`, sampled every
/// `2^j` steps so that all runs share one sample grid.
pub fn refinement_study(
    h0: &HermitianMatrix,
    s_max: f64,
    base_steps: usize,
    levels: usize,
) -> Result<Vec<(usize, Residual4Report)>> {
    (0..levels)
        .map(|j| {
            let steps = base_steps << j;
            let plan = IntegrationPlan::uniform(s_max, steps, 1 << j, GeneratorKind::Mielke)?;
            Ok((steps, residuals_general(h0, &plan)?))
        })
        .collect()
}
