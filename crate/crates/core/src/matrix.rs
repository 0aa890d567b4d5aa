//! Dense complex matrices, the Hermitian flow state, generators and the flow
//! right-hand side.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on `|H[i][j] - conj(H[j][i])|` accepted on ingestion.
pub const HERMITICITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Square dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * k).collect() }
    }

    /// `self + k * other`
    pub fn add_scaled(&self, other: &Self, k: f64) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b * k).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `[self, other] = self*other - other*self`
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Exact check `G + G^† = 0`.
    pub fn is_skew_hermitian(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| self[(i, j)] == -self[(j, i)].conj()))
    }

    /// `(M + M^†)/2`, the Hermitian part.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            if i == j {
                Complex64::new(self[(i, i)].re, 0.0)
            } else {
                (self[(i, j)] + self[(j, i)].conj()) * 0.5
            }
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(rhs, 1.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(rhs, -1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Which generator drives the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// Upper triangle copied, lower triangle negated, zero diagonal.
    Mielke,
    /// `[D, H]` with `D` the diagonal part of `H`.
    Wegner,
}

/// Principal invariants of a 3×3 matrix in the convention where the
/// characteristic equation reads `x³ - i1 x² - i2 x - i3 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

/// Dense Hermitian matrix, `n >= 2`, with finite entries and an exactly real
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    /// Validates a raw grid. Entries are never symmetrized; a mismatch beyond
    /// [`HERMITICITY_TOL`] is an error. Diagonal imaginary parts within the
    /// tolerance are set to zero.
    pub fn validate(grid: &[Vec<Complex64>]) -> Result<Self> {
        let n = grid.len();
        for (row, r) in grid.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), n });
            }
        }
        let m = ComplexMatrix::from_fn(n, |i, j| grid[i][j]);
        Self::from_complex(m)
    }

    pub fn from_complex(mut m: ComplexMatrix) -> Result<Self> {
        let n = m.dim();
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix entry"));
        }
        for i in 0..n {
            for j in i..n {
                let mismatch = (m[(i, j)] - m[(j, i)].conj()).norm();
                if mismatch > HERMITICITY_TOL {
                    return Err(Error::HermiticityViolation { i, j, mismatch });
                }
            }
            m[(i, i)].im = 0.0;
        }
        Ok(Self { inner: m })
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let grid: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::validate(&grid)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let m = ComplexMatrix::from_fn(n, |i, j| if i == j { Complex64::new(values[i], 0.0) } else { ZERO });
        Self::from_complex(m)
    }

    /// Builds a Hermitian matrix from its diagonal and upper triangle; the
    /// lower triangle is filled by conjugation.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let z = f(i, j);
                if i == j {
                    m[(i, i)] = Complex64::new(z.re, 0.0);
                } else {
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
        }
        Self::from_complex(m)
    }

    /// Projects an almost-Hermitian matrix onto the Hermitian subspace. Only
    /// used by the integrator, whose states drift by roundoff.
    pub(crate) fn project(m: &ComplexMatrix) -> Self {
        Self { inner: m.hermitian_part() }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).collect()
    }

    pub fn is_real(&self) -> bool {
        self.inner.as_slice().iter().all(|z| z.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.inner.max_abs_diff(&other.inner)
    }

    /// Largest modulus outside the main and first off-diagonals.
    pub fn band_excess(&self) -> (usize, usize, f64) {
        let n = self.dim();
        let mut worst = (0, 0, 0.0);
        for i in 0..n {
            for j in (i + 2)..n {
                let v = self.inner[(i, j)].norm();
                if v > worst.2 {
                    worst = (i, j, v);
                }
            }
        }
        worst
    }

    pub fn is_tridiagonal(&self, tol: f64) -> bool {
        self.band_excess().2 <= tol
    }

    /// Conjugation `U^† H U` by a unitary `U`.
    pub fn unitary_similarity(&self, u: &ComplexMatrix) -> Self {
        let m = u.conj_transpose().matmul(&self.inner).matmul(u);
        Self::project(&m)
    }

    /// Skew-Hermitian Mielke generator.
    pub fn mielke_generator(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => self.inner[(i, j)],
            std::cmp::Ordering::Greater => -self.inner[(j, i)].conj(),
            std::cmp::Ordering::Equal => ZERO,
        })
    }

    /// Wegner generator `[D, H]`.
    pub fn wegner_generator(&self) -> ComplexMatrix {
        // [D,H]_ij = (d_i - d_j) H_ij, skew-Hermitian by construction.
        let d = self.diag();
        ComplexMatrix::from_fn(self.dim(), |i, j| self.inner[(i, j)] * (d[i] - d[j]))
    }

    pub fn generator(&self, kind: GeneratorKind) -> ComplexMatrix {
        match kind {
            GeneratorKind::Mielke => self.mielke_generator(),
            GeneratorKind::Wegner => self.wegner_generator(),
        }
    }

    /// Right-hand side `[G, H]` of the flow equation.
    pub fn flow_rhs(&self, kind: GeneratorKind) -> ComplexMatrix {
        flow_rhs_raw(&self.inner, kind)
    }

    /// Full invariants (3×3 only).
    pub fn principal_invariants(&self) -> Result<PrincipalInvariants> {
        if self.dim() != 3 {
            return Err(Error::DimensionUnsupported { expected: 3, got: self.dim() });
        }
        let m = &self.inner;
        let tr = m.trace().re;
        let tr2 = m.matmul(m).trace().re;
        Ok(PrincipalInvariants { i1: tr, i2: 0.5 * (tr2 - tr * tr), i3: det3(m) })
    }

    /// Sum of `|H_ij|²` over `i != j`.
    pub fn offdiag_sq_norm(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += self.inner[(i, j)].norm_sqr();
                }
            }
        }
        acc
    }
}

/// `[G(M), M]` on a raw (possibly slightly non-Hermitian) state.
pub(crate) fn flow_rhs_raw(m: &ComplexMatrix, kind: GeneratorKind) -> ComplexMatrix {
    let n = m.dim();
    let g = match kind {
        GeneratorKind::Mielke => ComplexMatrix::from_fn(n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => m[(i, j)],
            std::cmp::Ordering::Greater => -m[(j, i)].conj(),
            std::cmp::Ordering::Equal => ZERO,
        }),
        GeneratorKind::Wegner => ComplexMatrix::from_fn(n, |i, j| m[(i, j)] * (m[(i, i)].re - m[(j, j)].re)),
    };
    g.commutator(m)
}

fn det3(m: &ComplexMatrix) -> f64 {
    let a = |i, j| m[(i, j)];
    let d = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    d.re
}
