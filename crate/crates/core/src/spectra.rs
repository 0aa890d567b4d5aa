//! Eigenvalues, exponents and boundary eigenvector weights.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, PrincipalInvariants};

const MAX_SWEEPS: usize = 100;
const OFF_NORM_TOL: f64 = 1e-13;
/// Boundary eigenvector components at or below this modulus are rejected.
pub const VANISHING_COMPONENT_TOL: f64 = 1e-12;
/// Relative separation below which two exponents count as equal.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// `x³ + p x + q = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepressedCubic {
    pub p: f64,
    pub q: f64,
}

impl DepressedCubic {
    /// `-4p³ - 27q²`; non-negative iff all roots are real.
    pub fn discriminant(&self) -> f64 {
        -4.0 * self.p.powi(3) - 27.0 * self.q * self.q
    }
}

/// Eigen-decomposition with values sorted descending. Column `k` of
/// `vectors` is the unit eigenvector for `values[k]`, phased so that its
/// largest component is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.values.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min)
    }
}

/// Exponents `u_i = 2(w_i - Tr/N)`, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSet {
    pub u: Vec<f64>,
}

impl ExponentSet {
    pub fn max_abs(&self) -> f64 {
        self.u.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// True if two exponents coincide within [`DEGENERACY_TOL`]`·max|u|`.
    pub fn has_degeneracy(&self) -> bool {
        let tol = DEGENERACY_TOL * self.max_abs();
        self.u.windows(2).any(|w| w[0] - w[1] <= tol)
    }
}

/// Which end of the eigenvectors feeds the gate coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Last,
}

pub fn depressed_cubic(inv: &PrincipalInvariants) -> DepressedCubic {
    let PrincipalInvariants { i1, i2, i3 } = *inv;
    DepressedCubic { p: -(i1 * i1 + 3.0 * i2) / 3.0, q: -(2.0 * i1.powi(3) + 9.0 * i1 * i2 + 27.0 * i3) / 27.0 }
}

/// Real roots of a depressed cubic, descending. The discriminant tolerance
/// is taken relative to the cubic's own scale.
pub fn cubic_roots(c: DepressedCubic) -> Result<[f64; 3]> {
    cubic_roots_scaled(c, 0.0)
}

/// As [`cubic_roots`], with `scale` a lower bound on the root magnitude
/// used for the discriminant tolerance (typically a matrix norm).
pub fn cubic_roots_scaled(c: DepressedCubic, scale: f64) -> Result<[f64; 3]> {
    let DepressedCubic { p, q } = c;
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::NonFinite("cubic coefficients"));
    }
    let r = scale.max(p.abs().sqrt()).max(q.abs().cbrt());
    if r == 0.0 {
        return Ok([0.0; 3]);
    }
    let disc = c.discriminant();
    if disc < -1e-10 * r.powi(6) {
        return Err(Error::ComplexRoots(disc));
    }
    if p >= 0.0 {
        // Near-triple root: real parts of the three cube roots of -q.
        let x = (-q).cbrt();
        return Ok([x.max(-0.5 * x), -0.5 * x, x.min(-0.5 * x)]);
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut roots = [0, 1, 2].map(|k| m * (phi - 2.0 * PI * k as f64 / 3.0).cos());
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

/// Cyclic complex Jacobi eigensolver.
pub fn eigh(h: &HermitianMatrix) -> Result<Spectrum> {
    let n = h.dim();
    let mut a = h.as_complex().clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = h.frobenius_norm();
    let target = OFF_NORM_TOL * norm;
    let off_norm = |a: &ComplexMatrix| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off_norm(&a) });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let lead =
            (0..n)
                .map(|i| v[(i, k)])
                .fold(Complex64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() { z } else { best });
        let phase = lead.conj() / lead.norm();
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)] * phase;
        }
    }
    Ok(Spectrum { values, vectors })
}

/// Zeroes `a[p][q]` with `V = D·R`, `D = diag(1, e^{-iθ})` removing the
/// phase of `a[p][q]` and `R` a real Jacobi rotation.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
    let theta = (aqq - app) / (2.0 * r);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = apq.conj() / r;
    let (vpp, vpq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
    let (vqp, vqq) = (e * -s, e * c);
    let n = a.dim();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

pub fn exponents(spec: &Spectrum, trace: f64) -> ExponentSet {
    let n = spec.dim() as f64;
    ExponentSet { u: spec.values.iter().map(|w| 2.0 * (w - trace / n)).collect() }
}

/// `|v_k|²` of the first (or last) component of each eigenvector, in
/// eigenvalue order.
pub fn gate_coefficients(spec: &Spectrum, side: Side) -> Result<Vec<f64>> {
    let n = spec.dim();
    let row = match side {
        Side::First => 0,
        Side::Last => n - 1,
    };
    (0..n)
        .map(|k| {
            let m = spec.vectors[(row, k)].norm();
            if m <= VANISHING_COMPONENT_TOL {
                Err(Error::VanishingComponent { index: k, value: m })
            } else {
                Ok(m * m)
            }
        })
        .collect()
}
