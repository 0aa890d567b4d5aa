//! Fixed-step RK4 integration of `dH/ds = [G(H), H]`.

use crate::error::{Error, Result};
use crate::matrix::{flow_rhs_raw, ComplexMatrix, GeneratorKind, HermitianMatrix};
use crate::spectra::eigh;

/// Largest accepted `‖k1‖_F · h` per step.
pub const STEP_GUARD: f64 = 0.1;

/// Step grid and sample points. Samples are snapped to the grid, sorted and
/// deduplicated; `s = 0` is always included.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationPlan {
    s_max: f64,
    steps: usize,
    sample_steps: Vec<usize>,
    pub generator: GeneratorKind,
}

impl IntegrationPlan {
    pub fn new(s_max: f64, steps: usize, samples: &[f64], generator: GeneratorKind) -> Result<Self> {
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(Error::InvalidPlan(format!("s_max must be positive, got {s_max}")));
        }
        if steps == 0 {
            return Err(Error::InvalidPlan("steps must be at least 1".into()));
        }
        let h = s_max / steps as f64;
        let mut idx = vec![0usize];
        for &s in samples {
            if !(0.0..=s_max * (1.0 + 1e-12)).contains(&s) {
                return Err(Error::InvalidPlan(format!("sample {s} outside [0, {s_max}]")));
            }
            idx.push(((s / h).round() as usize).min(steps));
        }
        idx.sort_unstable();
        idx.dedup();
        Ok(Self { s_max, steps, sample_steps: idx, generator })
    }

    /// Samples every `every` steps, plus the endpoint.
    pub fn uniform(s_max: f64, steps: usize, every: usize, generator: GeneratorKind) -> Result<Self> {
        let mut plan = Self::new(s_max, steps, &[], generator)?;
        let every = every.max(1);
        plan.sample_steps = (0..=steps).step_by(every).collect();
        if plan.sample_steps.last() != Some(&steps) {
            plan.sample_steps.push(steps);
        }
        Ok(plan)
    }

    /// The reference step count for `h0`: `h ≤ 0.01/r` for accuracy, and
    /// small enough for the guard, with `r = ‖H0 - Tr/N‖_F`.
    pub fn reference_steps(h0: &HermitianMatrix, s_max: f64, generator: GeneratorKind) -> usize {
        let r = centred_norm(h0);
        if r == 0.0 {
            return 1;
        }
        let guard = match generator {
            GeneratorKind::Mielke => 0.03 / (r * r),
            GeneratorKind::Wegner => 0.02 / (r * r * r),
        };
        let h = (0.01 / r).min(guard);
        (s_max / h).ceil().max(1.0) as usize
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.s_max / self.steps as f64
    }

    /// Snapped sample positions.
    pub fn samples(&self) -> Vec<f64> {
        self.sample_steps.iter().map(|&k| k as f64 * self.step_size()).collect()
    }
}

/// Sampled states `(s, H(s))`, ascending in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub samples: Vec<(f64, HermitianMatrix)>,
}

impl FlowTrajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn s_values(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.0).collect()
    }

    pub fn last(&self) -> &HermitianMatrix {
        &self.samples.last().expect("trajectory contains s = 0").1
    }
}

pub fn integrate(h0: &HermitianMatrix, plan: &IntegrationPlan) -> Result<FlowTrajectory> {
    let h = plan.step_size();
    let kind = plan.generator;
    let mut state = h0.as_complex().clone();
    let mut samples = Vec::with_capacity(plan.sample_steps.len());
    let mut next = plan.sample_steps.iter().peekable();
    for step in 0..=plan.steps {
        if next.peek() == Some(&&step) {
            next.next();
            samples.push((step as f64 * h, HermitianMatrix::project(&state)));
        }
        if next.peek().is_none() {
            break;
        }
        state = rk4_step(&state, h, kind)?;
    }
    Ok(FlowTrajectory { samples })
}

fn rk4_step(y: &ComplexMatrix, h: f64, kind: GeneratorKind) -> Result<ComplexMatrix> {
    let k1 = flow_rhs_raw(y, kind);
    let load = k1.frobenius_norm() * h;
    if !load.is_finite() {
        return Err(Error::NonFinite("flow state"));
    }
    if load > STEP_GUARD {
        return Err(Error::StepTooLarge(load));
    }
    let k2 = flow_rhs_raw(&y.add_scaled(&k1, 0.5 * h), kind);
    let k3 = flow_rhs_raw(&y.add_scaled(&k2, 0.5 * h), kind);
    let k4 = flow_rhs_raw(&y.add_scaled(&k3, h), kind);
    let incr = &(&k1 + &k4) + &(&k2 + &k3).scale(2.0);
    let next = y.add_scaled(&incr, h / 6.0).hermitian_part();
    if !next.is_finite() {
        return Err(Error::NonFinite("flow state"));
    }
    Ok(next)
}

/// Largest Hausdorff distance between the spectrum at any sample and at the
/// first sample.
pub fn eigen_drift(traj: &FlowTrajectory) -> Result<f64> {
    let Some((_, first)) = traj.samples.first() else {
        return Ok(0.0);
    };
    let w0 = eigh(first)?.values;
    let mut drift = 0.0f64;
    for (_, h) in &traj.samples[1..] {
        drift = drift.max(hausdorff(&w0, &eigh(h)?.values));
    }
    Ok(drift)
}

fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |x: &[f64], y: &[f64]| {
        x.iter().map(|p| y.iter().map(|q| (p - q).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

fn centred_norm(h: &HermitianMatrix) -> f64 {
    let n = h.dim();
    let shift = h.trace() / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            acc += if i == j { (z.re - shift).powi(2) } else { z.norm_sqr() };
        }
    }
    acc.sqrt()
}
