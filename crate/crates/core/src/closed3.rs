//! Closed-form Mielke flows for 2×2 and 3×3 Hermitian matrices.
//!
//! A 3×3 solution is one of three shapes: a fixed point, a decoupled 2×2
//! block, or the coupled case built from η₁, η₂. Coupled solutions run in
//! one of two modes. When the phase invariant `C` vanishes the input is
//! gauge-equivalent to a real symmetric matrix, and the symmetric formulas
//! (with signed ρ functions) are evaluated and rotated back. Otherwise the
//! off-diagonal moduli come from square roots and the phases from a
//! quadrature.
//!
//! η₁, η₂ are stored with their last coefficient equal to 1 and `A` carried
//! separately, so `γ = g² = A²/(η₁η₂)` and `ρ₁² = η̃₁η₂ - 4A²η₁`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expsum::{ExpSum, Scaled};
use crate::matrix::HermitianMatrix;
use crate::quadrature;
use crate::spectra::{cubic_roots_scaled, depressed_cubic, DEGENERACY_TOL};

/// Off-diagonal entries below this (relative to `max(1, ‖H‖_F)`) count as
/// exact zeros when choosing a solution shape or sign branch.
pub const ZERO_ENTRY_TOL: f64 = 1e-13;
/// Relative window in which a slightly negative radicand is clamped to 0.
pub const RADICAND_TOL: f64 = 1e-9;
/// Absolute tolerance of the phase integrals.
pub const PHASE_TOL: f64 = 1e-10;

/// Relative discriminant below which the spectrum is treated as degenerate.
pub const DISCRIMINANT_TOL: f64 = 1e-14;

/// Which reading of the degenerate-branch exponent to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegenerateRule {
    /// `u = -3Q/P`, the double-root exponent of the depressed cubic.
    #[default]
    QOverP,
    /// `u = -3P/Q`. Kept only to demonstrate that it fails.
    POverQ,
}

/// How the off-diagonal entries of a coupled solution are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Symmetric,
    Hermitian,
}

/// Parameters of η₁, η₂ and `A`.
///
/// Non-degenerate: `η₁ = p11 e^{u1 s} + p12 e^{u2 s} + e^{-(u1+u2)s}` and
/// `η₂ = p21 e^{-u1 s} + p22 e^{-u2 s} + e^{(u1+u2)s}`.
///
/// Degenerate (one repeated eigenvalue): `η₁ = p11 e^{u s} + e^{-2us}`,
/// `η₂ = p21 e^{-us} + e^{2us}` with `u = u_degenerate`; `p12 = p22 = 0` and
/// the `d`/`n` intermediates are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration3 {
    pub u1: f64,
    pub u2: f64,
    pub big_a: f64,
    pub p11: f64,
    pub p12: f64,
    pub p21: f64,
    pub p22: f64,
    pub d1: f64,
    pub d2: f64,
    pub n11: f64,
    pub n12: f64,
    pub n21: f64,
    pub n22: f64,
    pub degenerate: bool,
    pub u_degenerate: f64,
    pub sign_g: f64,
}

impl Calibration3 {
    pub fn u3(&self) -> f64 {
        -(self.u1 + self.u2)
    }

    pub fn eta1(&self) -> ExpSum {
        if self.degenerate {
            let u = self.u_degenerate;
            ExpSum::from_terms(vec![(self.p11, u), (1.0, -2.0 * u)])
        } else {
            ExpSum::from_terms(vec![(self.p11, self.u1), (self.p12, self.u2), (1.0, self.u3())])
        }
    }

    pub fn eta2(&self) -> ExpSum {
        if self.degenerate {
            let u = self.u_degenerate;
            ExpSum::from_terms(vec![(self.p21, -u), (1.0, 2.0 * u)])
        } else {
            ExpSum::from_terms(vec![(self.p21, -self.u1), (self.p22, -self.u2), (1.0, -self.u3())])
        }
    }
}

/// Coefficients of `ρ₁ = sign1·Σ q1_j e^{-u_j s}` and
/// `ρ₂ = sign2·Σ q2_j e^{u_j s}`, `u_3 = -(u1+u2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoCoefficients {
    pub q1: [f64; 3],
    pub q2: [f64; 3],
    pub sign1: f64,
    pub sign2: f64,
}

impl RhoCoefficients {
    pub fn rho1(&self, cal: &Calibration3) -> ExpSum {
        let u = [cal.u1, cal.u2, cal.u3()];
        ExpSum::from_terms((0..3).map(|j| (self.sign1 * self.q1[j], -u[j])).collect())
    }

    pub fn rho2(&self, cal: &Calibration3) -> ExpSum {
        let u = [cal.u1, cal.u2, cal.u3()];
        ExpSum::from_terms((0..3).map(|j| (self.sign2 * self.q2[j], u[j])).collect())
    }
}

/// Initial phases and the conserved `C = (b₀c₀/g₀) sin(φ_g0 - φ_b0 - φ_c0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub c_const: f64,
    pub phi_b0: f64,
    pub phi_c0: f64,
    pub phi_g0: f64,
}

/// 2×2 closed form: `η = p e^{us} + e^{-us}`, `g = e^{iφ} A/η`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exact2 {
    h0: HermitianMatrix,
    pub trace: f64,
    pub u: f64,
    pub p: f64,
    pub big_a: f64,
    pub eta: ExpSum,
    /// `g₀/|g₀|`, or 1 when `g₀ = 0`.
    pub phase: Complex64,
    /// True when `g₀ = 0`; the solution is then `H₀` for all `s`.
    pub constant: bool,
}

impl Exact2 {
    pub fn eval(&self, s: f64) -> HermitianMatrix {
        if self.constant {
            return self.h0.clone();
        }
        let half = 0.5 * self.eta.log_derivative(s);
        let g = (Scaled::from_f64(self.big_a) / self.eta.eval_scaled(s, 0)).to_f64();
        let (a, f) = (0.5 * self.trace + half, 0.5 * self.trace - half);
        let off = self.phase * g;
        HermitianMatrix::from_upper(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(a, 0.0),
            (1, 1) => Complex64::new(f, 0.0),
            _ => off,
        })
        .expect("finite by construction")
    }
}

/// Solution of the coupled 3×3 case.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupled3 {
    pub trace: f64,
    pub calibration: Calibration3,
    pub eta1: ExpSum,
    pub eta2: ExpSum,
    /// `ρ₁, ρ₂` of the real gauge-fixed matrix (symmetric mode only).
    pub rho: Option<(ExpSum, ExpSum)>,
    pub rho_coefficients: Option<RhoCoefficients>,
    /// `η̃₁η₂ - 4A²η₁` and `η̃₂η₁ - 4A²η₂`.
    pub rad1: ExpSum,
    pub rad2: ExpSum,
    pub big_a: f64,
    pub mode: Mode,
    pub phase: PhaseState,
    g0_abs: f64,
    /// Diagonal of the unitary `D` with `H₀ = D H_r D†`, `H_r` real.
    gauge: [Complex64; 3],
}

/// Closed-form η₁, η₂, ρ₁, ρ₂ rescaled so that `η₁(0) = η₂(0) = 1/|g₀|`.
/// In this normalization `A = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerView {
    pub eta1: ExpSum,
    pub eta2: ExpSum,
    pub rho: Option<(ExpSum, ExpSum)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Exact3Solution {
    /// All off-diagonal entries vanish.
    Constant(HermitianMatrix),
    /// Only the `(i, j)` entry is nonzero; the remaining diagonal entry is
    /// constant.
    Split {
        h0: HermitianMatrix,
        i: usize,
        j: usize,
        block: Exact2,
    },
    Coupled(Box<Coupled3>),
}

impl Exact3Solution {
    pub fn coupled(&self) -> Option<&Coupled3> {
        match self {
            Exact3Solution::Coupled(c) => Some(c),
            _ => None,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Exact3Solution::Coupled(c) => c.mode,
            _ => Mode::Symmetric,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.coupled().is_some_and(|c| c.calibration.degenerate)
    }
}

fn sg(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn zero_tol(h: &HermitianMatrix) -> f64 {
    ZERO_ENTRY_TOL * h.frobenius_norm().max(1.0)
}

pub fn exact2x2(h0: &HermitianMatrix) -> Result<Exact2> {
    if h0.dim() != 2 {
        return Err(Error::DimensionUnsupported { expected: 2, got: h0.dim() });
    }
    let (a0, f0) = (h0.get(0, 0).re, h0.get(1, 1).re);
    let g0 = h0.get(0, 1);
    let trace = a0 + f0;
    let gm = g0.norm();
    if gm <= zero_tol(h0) {
        return Ok(Exact2 {
            h0: h0.clone(),
            trace,
            u: (a0 - f0).abs(),
            p: 1.0,
            big_a: 0.0,
            eta: ExpSum::constant(1.0),
            phase: Complex64::new(1.0, 0.0),
            constant: true,
        });
    }
    let delta = a0 - f0;
    let u = delta.hypot(2.0 * gm);
    // p = (u + δ)/(u - δ), written to avoid cancellation.
    let p = if delta >= 0.0 { (u + delta).powi(2) / (4.0 * gm * gm) } else { 4.0 * gm * gm / (u - delta).powi(2) };
    Ok(Exact2 {
        h0: h0.clone(),
        trace,
        u,
        p,
        big_a: u * p.sqrt(),
        eta: ExpSum::from_terms(vec![(p, u), (1.0, -u)]),
        phase: g0 / gm,
        constant: false,
    })
}

/// Computes `u1`, `u2`, `A` and the η coefficients from the entries of a
/// 3×3 Hermitian matrix. Only moduli of the off-diagonal entries enter.
pub fn calibration3(h0: &HermitianMatrix, rule: DegenerateRule) -> Result<Calibration3> {
    let inv = h0.principal_invariants()?;
    let i1 = inv.i1;
    let cubic = depressed_cubic(&inv);
    let roots = cubic_roots_scaled(cubic, h0.frobenius_norm())?;
    let (u1, u2) = (2.0 * roots[0], 2.0 * roots[2]);
    let (a0, f0) = (h0.get(0, 0).re, h0.get(2, 2).re);
    let (b0, c0, g0) = (h0.get(0, 1).norm(), h0.get(1, 2).norm(), h0.get(0, 2).norm());
    let tol = zero_tol(h0);
    let sign_g = if g0 <= tol {
        0.0
    } else if h0.get(0, 2).im == 0.0 {
        sg(h0.get(0, 2).re)
    } else {
        1.0
    };
    let max_u = u1.abs().max(u2.abs()).max((u1 + u2).abs());
    if max_u == 0.0 {
        return Err(Error::DegenerateExponents(0.0));
    }

    let check = |x: f64| -> Result<f64> {
        if x.is_finite() && x > 0.0 {
            Ok(x)
        } else {
            Err(Error::NonPositiveCoefficient(x))
        }
    };

    // Roots near a double root carry ~√ε error, so a vanishing discriminant
    // also counts.
    let disc_scale = 4.0 * cubic.p.abs().powi(3) + 27.0 * cubic.q * cubic.q;
    let degenerate = (u1 + 2.0 * u2).abs() <= DEGENERACY_TOL * max_u
        || (2.0 * u1 + u2).abs() <= DEGENERACY_TOL * max_u
        || cubic.discriminant().abs() <= DISCRIMINANT_TOL * disc_scale;
    if degenerate {
        let u = match rule {
            DegenerateRule::QOverP => -3.0 * cubic.q / cubic.p,
            DegenerateRule::POverQ => -3.0 * cubic.p / cubic.q,
        };
        let p1 = -2.0 * (3.0 * a0 - i1 + 3.0 * u) / (6.0 * a0 - 2.0 * i1 - 3.0 * u);
        let p2 = -2.0 * (3.0 * f0 - i1 + 3.0 * u) / (6.0 * f0 - 2.0 * i1 - 3.0 * u);
        return Ok(Calibration3 {
            u1,
            u2,
            big_a: 1.5 * u.abs(),
            p11: check(p1)?,
            p12: 0.0,
            p21: check(p2)?,
            p22: 0.0,
            d1: 0.0,
            d2: 0.0,
            n11: 0.0,
            n12: 0.0,
            n21: 0.0,
            n22: 0.0,
            degenerate: true,
            u_degenerate: u,
            sign_g,
        });
    }

    let common = 6.0 * u1 * i1 + 4.0 * i1 * i1 + 9.0 * u1 * u2 + 6.0 * i1 * u2;
    let lin = 3.0 * u1 + 4.0 * i1 + 3.0 * u2;
    let d1 = 36.0 * (a0 * a0 + b0 * b0 + g0 * g0) + common - 6.0 * a0 * lin;
    let d2 = 36.0 * (c0 * c0 + f0 * f0 + g0 * g0) + common - 6.0 * f0 * lin;
    let num1 = |x0: f64, y0: f64| {
        36.0 * (x0 * x0 + y0 * y0 + g0 * g0) - 24.0 * x0 * i1 + 4.0 * i1 * i1 - 9.0 * u1 * u2 + 18.0 * x0 * u1
            - 6.0 * i1 * u1
            - 9.0 * u2 * u2
    };
    let num2 = |x0: f64, y0: f64| {
        -36.0 * (x0 * x0 + y0 * y0 + g0 * g0) + 24.0 * x0 * i1 - 4.0 * i1 * i1 + 9.0 * u1 * u2 - 18.0 * x0 * u2
            + 6.0 * i1 * u2
            + 9.0 * u1 * u1
    };
    let (n11, n12) = (num1(a0, b0), num2(a0, b0));
    let (n21, n22) = (num1(f0, c0), num2(f0, c0));
    let (s12, s21) = (u1 + 2.0 * u2, 2.0 * u1 + u2);
    let du = u1 - u2;
    Ok(Calibration3 {
        u1,
        u2,
        big_a: 9.0 * (s12 * s21).abs() / (d1 * d2).sqrt() * g0,
        p11: check(s12 * n11 / (du * d1))?,
        p12: check(s21 * n12 / (du * d1))?,
        p21: check(s12 * n21 / (du * d2))?,
        p22: check(s21 * n22 / (du * d2))?,
        d1,
        d2,
        n11,
        n12,
        n21,
        n22,
        degenerate: false,
        u_degenerate: 0.0,
        sign_g,
    })
}

/// Signs and magnitudes of the ρ coefficients for a real symmetric matrix
/// with off-diagonal entries `b0 = H12`, `c0 = H23`, `g0 = H13`. Zero tests
/// are exact; callers snap negligible entries to 0 first.
pub fn rho_coefficients(cal: &Calibration3, b0: f64, c0: f64, g0: f64) -> RhoCoefficients {
    let Calibration3 { u1, u2, p11, p12, p21, p22, big_a, .. } = *cal;
    let (s12, s21, du) = (u1 + 2.0 * u2, 2.0 * u1 + u2, u1 - u2);
    let m1 = [s12.abs() * (p12 * p21).sqrt(), s21.abs() * (p11 * p22).sqrt(), du * (p11 * p12).sqrt()];
    let m2 = [s12.abs() * (p11 * p22).sqrt(), s21.abs() * (p12 * p21).sqrt(), du * (p21 * p22).sqrt()];
    let four_a2 = 4.0 * big_a * big_a;
    let x1 = sg(s12 * s12 + p11 * p21 * du * du - four_a2);
    let x2 = sg(s21 * s21 + p12 * p22 * du * du - four_a2);
    let sum = |q: &[f64; 3]| q[0] + q[1] + q[2];

    if b0 != 0.0 && g0 != 0.0 {
        let q1 = [x1 * m1[0], x2 * m1[1], m1[2]];
        let s23 = sg(b0) * sg(g0) * sg(sum(&q1)) * sg(p21 * q1[1] - p22 * q1[0]);
        let q23 = s23 * m2[2];
        let q2 = [sg(q23) * x1 * m2[0], sg(q23) * x2 * m2[1], q23];
        RhoCoefficients { q1, q2, sign1: sg(b0) * sg(sum(&q1)), sign2: 1.0 }
    } else if b0 != 0.0 {
        let (q1, q2) = (m1, m2);
        // With g0 = 0 the overall sign of ρ₂ must follow c0.
        RhoCoefficients { q1, q2, sign1: sg(b0) * sg(sum(&q1)), sign2: sg(c0) * sg(sum(&q2)) }
    } else {
        let q2 = [x1 * m2[0], x2 * m2[1], m2[2]];
        let s13 = sg(c0) * sg(g0) * sg(sum(&q2)) * sg(p11 * q2[1] - p12 * q2[0]);
        let q13 = s13 * m1[2];
        let q1 = [sg(q13) * x1 * m1[0], sg(q13) * x2 * m1[1], q13];
        RhoCoefficients { q1, q2, sign1: 1.0, sign2: sg(c0) * sg(sum(&q2)) }
    }
}

/// Diagonal unitary making `H` real, if one exists up to `tol`.
fn real_gauge(h: &HermitianMatrix, tol: f64) -> Option<([Complex64; 3], [f64; 3])> {
    let (b, c, g) = (h.get(0, 1), h.get(1, 2), h.get(0, 2));
    let (bz, cz, gz) = (b.norm() <= tol, c.norm() <= tol, g.norm() <= tol);
    // (D†HD)_ij = e^{-iα_i} H_ij e^{iα_j}, α_0 = 0.
    let (a1, a2) = if !bz && !cz {
        let a1 = -b.arg();
        (a1, a1 - c.arg())
    } else if bz {
        let a2 = if gz { 0.0 } else { -g.arg() };
        (if cz { 0.0 } else { a2 + c.arg() }, a2)
    } else {
        (-b.arg(), if gz { 0.0 } else { -g.arg() })
    };
    let d = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, a1), Complex64::from_polar(1.0, a2)];
    let rot = |i: usize, j: usize, z: Complex64| d[i].conj() * z * d[j];
    let (br, cr, gr) = (rot(0, 1, b), rot(1, 2, c), rot(0, 2, g));
    let max_im = br.im.abs().max(cr.im.abs()).max(gr.im.abs());
    if max_im > tol {
        return None;
    }
    let snap = |z: Complex64| if z.norm() <= tol { 0.0 } else { z.re };
    Some((d, [snap(br), snap(cr), snap(gr)]))
}

pub fn calibrate3(h0: &HermitianMatrix) -> Result<Exact3Solution> {
    calibrate3_with(h0, DegenerateRule::default())
}

pub fn calibrate3_with(h0: &HermitianMatrix, rule: DegenerateRule) -> Result<Exact3Solution> {
    if h0.dim() != 3 {
        return Err(Error::DimensionUnsupported { expected: 3, got: h0.dim() });
    }
    let tol = zero_tol(h0);
    let pairs = [(0usize, 1usize), (1, 2), (0, 2)];
    let live: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(i, j)| h0.get(i, j).norm() > tol).collect();
    match live.len() {
        0 => return Ok(Exact3Solution::Constant(h0.clone())),
        1 => {
            let (i, j) = live[0];
            let block = HermitianMatrix::from_upper(2, |r, c| h0.get([i, j][r], [i, j][c]))?;
            return Ok(Exact3Solution::Split { h0: h0.clone(), i, j, block: exact2x2(&block)? });
        }
        _ => {}
    }

    let cal = calibration3(h0, rule)?;
    let trace = h0.trace();
    let eta1 = cal.eta1();
    let eta2 = cal.eta2();
    let a2 = cal.big_a * cal.big_a;
    let rad1 = &(&eta1.tilde() * &eta2) - &eta1.scale(4.0 * a2);
    let rad2 = &(&eta2.tilde() * &eta1) - &eta2.scale(4.0 * a2);
    let (b, c, g) = (h0.get(0, 1), h0.get(1, 2), h0.get(0, 2));
    let c_const =
        if g.norm() > tol { b.norm() * c.norm() / g.norm() * (g.arg() - b.arg() - c.arg()).sin() } else { 0.0 };
    let phase = PhaseState { c_const, phi_b0: b.arg(), phi_c0: c.arg(), phi_g0: g.arg() };

    let mut cal = cal;
    let (mode, gauge, rho, rho_coefficients) = match real_gauge(h0, tol) {
        Some((gauge, [br, cr, gr])) => {
            cal.sign_g = sg(gr);
            if cal.degenerate {
                let u = cal.u_degenerate;
                let (p1, p2) = (cal.p11, cal.p21);
                let q1 = 2.0 * br * (p1 + 1.0) * (p2 + 1.0).sqrt();
                let q2 = 2.0 * cr * (p2 + 1.0) * (p1 + 1.0).sqrt();
                (Mode::Symmetric, gauge, Some((ExpSum::single(q1, -u), ExpSum::single(q2, u))), None)
            } else {
                let q = rho_coefficients(&cal, br, cr, gr);
                (Mode::Symmetric, gauge, Some((q.rho1(&cal), q.rho2(&cal))), Some(q))
            }
        }
        None => (Mode::Hermitian, [Complex64::new(1.0, 0.0); 3], None, None),
    };
    Ok(Exact3Solution::Coupled(Box::new(Coupled3 {
        trace,
        calibration: cal,
        eta1,
        eta2,
        rho,
        rho_coefficients,
        rad1,
        rad2,
        big_a: cal.big_a,
        mode,
        phase,
        g0_abs: g.norm(),
        gauge,
    })))
}

impl Coupled3 {
    /// `(a, d, f, b, c, g)`: signed entries of the gauge-fixed real matrix in
    /// symmetric mode, moduli in Hermitian mode.
    pub fn real_entries(&self, s: f64) -> Result<[f64; 6]> {
        if !s.is_finite() {
            return Err(Error::NonFinite("evaluation point"));
        }
        let t3 = self.trace / 3.0;
        let l1 = self.eta1.log_derivative(s);
        let l2 = self.eta2.log_derivative(s);
        let a = t3 + 0.5 * l1;
        let f = t3 - 0.5 * l2;
        let d = self.trace - a - f;
        let e1 = self.eta1.eval_scaled(s, 0);
        let e2 = self.eta2.eval_scaled(s, 0);
        let g_abs = (Scaled::from_f64(self.big_a) / (e1 * e2).sqrt()).to_f64();
        let (b, c) = match (&self.mode, &self.rho) {
            (Mode::Symmetric, Some((r1, r2))) => (
                (r1.eval_scaled(s, 0) / (e1 * e2.sqrt())).to_f64() * 0.5,
                (r2.eval_scaled(s, 0) / (e2 * e1.sqrt())).to_f64() * 0.5,
            ),
            _ => (
                (radicand(&self.rad1, s)?.sqrt() / (e1 * e2.sqrt())).to_f64() * 0.5,
                (radicand(&self.rad2, s)?.sqrt() / (e2 * e1.sqrt())).to_f64() * 0.5,
            ),
        };
        let g = if self.mode == Mode::Symmetric { self.calibration.sign_g * g_abs } else { g_abs };
        Ok([a, d, f, b, c, g])
    }

    /// `(φ_b, φ_c, φ_g)` at `s`. In symmetric mode these are the constant
    /// phases of the gauge transformation; the real entries then carry the
    /// sign.
    pub fn phase_at(&self, s: f64) -> Result<(f64, f64, f64)> {
        Ok(self.phases(&[s])?[0])
    }

    /// Phases at several points, integrating cumulatively in sorted order.
    pub fn phases(&self, points: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
        if self.mode == Mode::Symmetric || self.phase.c_const == 0.0 {
            let d = &self.gauge;
            let fixed = if self.mode == Mode::Symmetric {
                ((d[0] * d[1].conj()).arg(), (d[1] * d[2].conj()).arg(), (d[0] * d[2].conj()).arg())
            } else {
                (self.phase.phi_b0, self.phase.phi_c0, self.phase.phi_g0)
            };
            return Ok(vec![fixed; points.len()]);
        }
        let k = 8.0 * self.phase.c_const * self.big_a * self.big_a;
        let tol = PHASE_TOL / k.abs();
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&i, &j| points[i].total_cmp(&points[j]));
        let mut out = vec![(0.0, 0.0, 0.0); points.len()];
        let (mut prev, mut ib, mut ic) = (0.0, 0.0, 0.0);
        for idx in order {
            let s = points[idx];
            if !s.is_finite() {
                return Err(Error::NonFinite("evaluation point"));
            }
            ib += quadrature::integrate(|x| self.ratio(&self.eta1, &self.rad1, x), prev, s, tol)?;
            ic += quadrature::integrate(|x| self.ratio(&self.eta2, &self.rad2, x), prev, s, tol)?;
            prev = s;
            out[idx] = (self.phase.phi_b0 + k * ib, self.phase.phi_c0 - k * ic, self.phase.phi_g0);
        }
        Ok(out)
    }

    fn ratio(&self, eta: &ExpSum, rad: &ExpSum, s: f64) -> f64 {
        (eta.eval_scaled(s, 0) / rad.eval_scaled(s, 0)).to_f64()
    }

    fn assemble(&self, e: [f64; 6], phases: (f64, f64, f64)) -> HermitianMatrix {
        let [a, d, f, b, c, g] = e;
        let m = match self.mode {
            Mode::Symmetric => {
                let dg = &self.gauge;
                let real = [[a, b, g], [b, d, c], [g, c, f]];
                HermitianMatrix::from_upper(3, |i, j| dg[i] * real[i][j] * dg[j].conj())
            }
            Mode::Hermitian => {
                let (pb, pc, pg) = phases;
                HermitianMatrix::from_upper(3, |i, j| match (i, j) {
                    (0, 0) => Complex64::new(a, 0.0),
                    (1, 1) => Complex64::new(d, 0.0),
                    (2, 2) => Complex64::new(f, 0.0),
                    (0, 1) => Complex64::from_polar(b, pb),
                    (1, 2) => Complex64::from_polar(c, pc),
                    _ => Complex64::from_polar(g, pg),
                })
            }
        };
        m.expect("finite by construction")
    }

    /// The same η and ρ functions in the `1/|g₀|` normalization, if `g₀ ≠ 0`.
    pub fn corner_view(&self) -> Option<CornerView> {
        if self.g0_abs == 0.0 || self.big_a == 0.0 {
            return None;
        }
        let l1 = 1.0 / (self.g0_abs * self.eta1.coefficient_sum());
        let l2 = 1.0 / (self.g0_abs * self.eta2.coefficient_sum());
        Some(CornerView {
            eta1: self.eta1.scale(l1),
            eta2: self.eta2.scale(l2),
            rho: self.rho.as_ref().map(|(r1, r2)| (r1.scale(l1 * l2.sqrt()), r2.scale(l2 * l1.sqrt()))),
        })
    }
}

/// `rad(s)` in scaled form, clamping roundoff-level negatives to zero.
fn radicand(rad: &ExpSum, s: f64) -> Result<Scaled> {
    let v = rad.eval_scaled(s, 0);
    if v.mantissa >= 0.0 {
        return Ok(v);
    }
    let mag = rad.eval_abs_scaled(s);
    if v.mantissa < -RADICAND_TOL * mag.mantissa {
        return Err(Error::NegativeRadicand { value: v.to_f64(), tolerance: RADICAND_TOL * mag.to_f64() });
    }
    Ok(Scaled { mantissa: 0.0, log_scale: v.log_scale })
}

pub fn eval3(sol: &Exact3Solution, s: f64) -> Result<HermitianMatrix> {
    Ok(eval3_many(sol, &[s])?.pop().expect("one point"))
}

/// Evaluates at several points, sharing the phase quadrature.
pub fn eval3_many(sol: &Exact3Solution, points: &[f64]) -> Result<Vec<HermitianMatrix>> {
    match sol {
        Exact3Solution::Constant(h) => Ok(vec![h.clone(); points.len()]),
        Exact3Solution::Split { h0, i, j, block } => points
            .iter()
            .map(|&s| {
                let b = block.eval(s);
                let idx = [*i, *j];
                HermitianMatrix::from_upper(3, |r, c| {
                    match (idx.iter().position(|&x| x == r), idx.iter().position(|&x| x == c)) {
                        (Some(p), Some(q)) => b.get(p, q),
                        _ if r == c => h0.get(r, r),
                        _ => Complex64::new(0.0, 0.0),
                    }
                })
            })
            .collect(),
        Exact3Solution::Coupled(c) => {
            let phases = c.phases(points)?;
            points.iter().zip(phases).map(|(&s, ph)| Ok(c.assemble(c.real_entries(s)?, ph))).collect()
        }
    }
}

/// `(φ_b, φ_c, φ_g)` of a 3×3 solution. Fixed points and split blocks
/// report the arguments of the initial entries.
pub fn phase_at(sol: &Exact3Solution, s: f64) -> Result<(f64, f64, f64)> {
    match sol {
        Exact3Solution::Coupled(c) => c.phase_at(s),
        Exact3Solution::Constant(h) | Exact3Solution::Split { h0: h, .. } => {
            Ok((h.get(0, 1).arg(), h.get(1, 2).arg(), h.get(0, 2).arg()))
        }
    }
}

/// [`phase_at`] over several points, sharing the quadrature.
pub fn phases_many(sol: &Exact3Solution, points: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    match sol {
        Exact3Solution::Coupled(c) => c.phases(points),
        _ => Ok(vec![phase_at(sol, 0.0)?; points.len()]),
    }
}
