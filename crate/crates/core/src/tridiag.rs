//! Closed-form Mielke flow for tridiagonal Hermitian matrices.
//!
//! `η_k = Σ_{|S|=k} p_S e^{(Σ_{i∈S} u_i) s}` with
//! `p_S = 4^{-k(k-1)/2} Π_{i∈S} p_i Π_{i<j∈S} (u_i-u_j)²`, so that
//! `η̃_k = 4 η_{k-1} η_{k+1}`. The top member `η_N` is a constant.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expsum::{ExpSum, Scaled};
use crate::matrix::HermitianMatrix;
use crate::spectra::{eigh, exponents, gate_coefficients, ExponentSet, Side};

/// Largest dimension accepted by default. Storage for the whole chain is
/// about `2^n · 16` bytes (256 MiB at n = 24).
pub const DEFAULT_DIMENSION_CAP: usize = 24;
/// Entries beyond the first off-diagonal must not exceed this.
pub const BAND_TOL: f64 = 1e-12;
/// Largest FF residual accepted by [`build_from_parameters`].
pub const FF_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagExact {
    pub n: usize,
    pub trace: f64,
    pub u: ExponentSet,
    /// `η_1 … η_{N-1}`.
    pub etas: Vec<ExpSum>,
    /// The constant `η_N`.
    pub eta_top: f64,
    pub b_signs: Vec<f64>,
    pub phases: Vec<f64>,
}

impl TridiagExact {
    /// `β_k = |b_k|²` at `s`, `k = 1 … N-1`.
    pub fn betas(&self, s: f64) -> Vec<f64> {
        let eta = self.scaled_etas(s);
        (1..self.n).map(|k| (eta[k - 1] * eta[k + 1] / eta[k].powi(2)).to_f64()).collect()
    }

    /// `η_0 … η_N` at `s` in scaled form.
    fn scaled_etas(&self, s: f64) -> Vec<Scaled> {
        let mut out = Vec::with_capacity(self.n + 1);
        out.push(Scaled::ONE);
        out.extend(self.etas.iter().map(|e| e.eval_scaled(s, 0)));
        out.push(Scaled::from_f64(self.eta_top));
        out
    }

    pub fn term_counts(&self) -> Vec<usize> {
        self.etas.iter().map(ExpSum::len).collect()
    }
}

fn check_inputs(u: &ExponentSet, p1: &[f64], cap: usize) -> Result<usize> {
    let n = u.u.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    if n > cap {
        return Err(Error::DimensionCap { n, cap });
    }
    if p1.len() != n {
        return Err(Error::DimensionUnsupported { expected: n, got: p1.len() });
    }
    if let Some(&p) = p1.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::NonPositiveCoefficient(p));
    }
    if u.u.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("exponents"));
    }
    let mut sorted = u.u.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let set = ExponentSet { u: sorted };
    if set.has_degeneracy() {
        let gap = set.u.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        return Err(Error::DegenerateExponents(gap));
    }
    Ok(n)
}

/// Log of `Π_{i<j}(u_i-u_j)²`.
fn log_vandermonde_sq(u: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            acc += 2.0 * (u[i] - u[j]).abs().ln();
        }
    }
    acc
}

/// `η_1 … η_N`, built from one pass over all subsets.
fn full_chain(u: &[f64], p1: &[f64]) -> Vec<ExpSum> {
    let n = u.len();
    let mut buckets: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n + 1];
    let mut pair = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pair[i * n + j] = 2.0 * (u[i] - u[j]).abs().ln();
            }
        }
    }
    let log_p: Vec<f64> = p1.iter().map(|p| p.ln()).collect();
    let mut members = Vec::with_capacity(n);

    #[allow(clippy::too_many_arguments)]
    fn walk(
        start: usize,
        log_c: f64,
        exponent: f64,
        members: &mut Vec<usize>,
        u: &[f64],
        log_p: &[f64],
        pair: &[f64],
        buckets: &mut [Vec<(f64, f64)>],
    ) {
        let n = u.len();
        for j in start..n {
            let k = members.len();
            let cross: f64 = members.iter().map(|&i| pair[i * n + j]).sum();
            // 4^{-k(k+1)/2} / 4^{-k(k-1)/2} = 4^{-k}
            let c = log_c + log_p[j] + cross - 2.0 * k as f64 * std::f64::consts::LN_2;
            let e = exponent + u[j];
            buckets[k + 1].push((c, e));
            members.push(j);
            walk(j + 1, c, e, members, u, log_p, pair, buckets);
            members.pop();
        }
    }
    walk(0, 0.0, 0.0, &mut members, u, &log_p, &pair, &mut buckets);

    buckets
        .into_iter()
        .skip(1)
        .map(|terms| ExpSum::from_terms(terms.into_iter().map(|(c, e)| (c.exp(), e)).collect()))
        .collect()
}

/// `η_1 … η_{N-1}` for exponents `u` and first-row coefficients `p1`.
pub fn eta_chain(u: &ExponentSet, p1: &[f64]) -> Result<Vec<ExpSum>> {
    check_inputs(u, p1, DEFAULT_DIMENSION_CAP)?;
    let mut chain = full_chain(&u.u, p1);
    chain.pop();
    Ok(chain)
}

/// `η_N = 2^{-N(N-1)} Π p_i Π_{i<j}(u_i-u_j)²`; FF is `η_N = 1`.
pub fn eta_top(u: &ExponentSet, p1: &[f64]) -> Result<f64> {
    let n = check_inputs(u, p1, usize::MAX)?;
    Ok(log_eta_top(&u.u, p1, n).exp())
}

fn log_eta_top(u: &[f64], p1: &[f64], n: usize) -> f64 {
    let nn = n as f64;
    p1.iter().map(|p| p.ln()).sum::<f64>() + log_vandermonde_sq(u) - nn * (nn - 1.0) * std::f64::consts::LN_2
}

/// Relative deviation of `Π p_i` from `2^{N(N-1)} / Π_{i<j}(u_i-u_j)²`.
pub fn ff_residual(u: &ExponentSet, p1: &[f64]) -> Result<f64> {
    let n = check_inputs(u, p1, usize::MAX)?;
    Ok(log_eta_top(&u.u, p1, n).exp_m1().abs())
}

/// The unique `λ > 0` with `λ·p1` satisfying FF, and the rescaled vector.
pub fn ff_rescale(u: &ExponentSet, p1: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = check_inputs(u, p1, usize::MAX)?;
    let lambda = (-log_eta_top(&u.u, p1, n) / n as f64).exp();
    Ok((lambda, p1.iter().map(|p| p * lambda).collect()))
}

fn assemble(
    trace: f64,
    u: &ExponentSet,
    p1: &[f64],
    b_signs: Vec<f64>,
    phases: Vec<f64>,
    cap: usize,
) -> Result<TridiagExact> {
    let n = check_inputs(u, p1, cap)?;
    let mut chain = full_chain(&u.u, p1);
    let top = chain.pop().expect("chain has N members");
    Ok(TridiagExact { n, trace, u: u.clone(), etas: chain, eta_top: top.coefficient_sum(), b_signs, phases })
}

/// Calibrates from the spectrum: exponents from the eigenvalues, `p1` from
/// the first eigenvector components.
pub fn calibrate_tridiag(h0: &HermitianMatrix) -> Result<TridiagExact> {
    calibrate_tridiag_capped(h0, DEFAULT_DIMENSION_CAP)
}

pub fn calibrate_tridiag_capped(h0: &HermitianMatrix, cap: usize) -> Result<TridiagExact> {
    let n = h0.dim();
    if n > cap {
        return Err(Error::DimensionCap { n, cap });
    }
    let (i, j, value) = h0.band_excess();
    if value > BAND_TOL {
        return Err(Error::NotTridiagonal { i, j, value });
    }
    let spec = eigh(h0)?;
    let u = exponents(&spec, h0.trace());
    let p1 = gate_coefficients(&spec, Side::First)?;
    let (b_signs, phases) = (0..n - 1)
        .map(|k| {
            let z = h0.get(k, k + 1);
            if z.im == 0.0 {
                (if z.re < 0.0 { -1.0 } else { 1.0 }, 0.0)
            } else {
                (1.0, z.arg())
            }
        })
        .unzip();
    assemble(h0.trace(), &u, &p1, b_signs, phases, cap)
}

pub fn eval_tridiag(sol: &TridiagExact, s: f64) -> Result<HermitianMatrix> {
    if !s.is_finite() {
        return Err(Error::NonFinite("flow parameter"));
    }
    let n = sol.n;
    // (log η_k)' for k = 0 … N, the boundary members being constants.
    let mut dlog = vec![0.0; n + 1];
    for (k, eta) in sol.etas.iter().enumerate() {
        dlog[k + 1] = eta.log_derivative(s);
    }
    let shift = sol.trace / n as f64;
    let diag: Vec<f64> = (0..n).map(|k| shift + 0.5 * (dlog[k + 1] - dlog[k])).collect();
    let off: Vec<Complex64> = sol
        .betas(s)
        .iter()
        .zip(sol.b_signs.iter().zip(&sol.phases))
        .map(|(beta, (sign, phase))| Complex64::from_polar(sign * beta.sqrt(), *phase))
        .collect();
    if diag.iter().chain(off.iter().map(|z| &z.re)).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("tridiagonal evaluation"));
    }
    HermitianMatrix::from_upper(n, |i, j| {
        if i == j {
            Complex64::new(diag[i], 0.0)
        } else if j == i + 1 {
            off[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Solution with positive real couplings determined by `(trace, u, p1)`,
/// and the matrix it starts from.
pub fn build_from_parameters(trace: f64, u: &ExponentSet, p1: &[f64]) -> Result<(TridiagExact, HermitianMatrix)> {
    let residual = ff_residual(u, p1)?;
    if residual > FF_TOL {
        return Err(Error::FFViolation(residual));
    }
    let n = u.u.len();
    let sol = assemble(trace, u, p1, vec![1.0; n - 1], vec![0.0; n - 1], DEFAULT_DIMENSION_CAP)?;
    let h0 = eval_tridiag(&sol, 0.0)?;
    Ok((sol, h0))
}
