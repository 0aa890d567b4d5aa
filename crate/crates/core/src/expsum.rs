//! Finite sums `Σ c_i e^{e_i s}` with real coefficients and exponents.
//!
//! Every η and ρ function of the closed-form solutions is an [`ExpSum`]. The
//! algebra here (product, derivative, tilde) is exact on the term lists; only
//! evaluation touches `exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Exponents closer than this are merged into one term.
pub const EXPONENT_MERGE_TOL: f64 = 1e-11;
/// Coefficients at or below this modulus are dropped (true underflow only).
pub const COEF_DROP_TOL: f64 = 1e-300;
/// `eval` refuses `exponent * s` beyond this.
pub const MAX_EXP_ARG: f64 = 700.0;

/// A value `mantissa * e^{log_scale}`, used to evaluate ratios of large
/// exponential sums without overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub const ONE: Scaled = Scaled { mantissa: 1.0, log_scale: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Scaled { mantissa: x, log_scale: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * self.log_scale.exp()
    }

    pub fn scale(self, k: f64) -> Self {
        Scaled { mantissa: self.mantissa * k, ..self }
    }

    /// Square root of a non-negative value.
    pub fn sqrt(self) -> Self {
        Scaled { mantissa: self.mantissa.sqrt(), log_scale: 0.5 * self.log_scale }
    }

    pub fn powi(self, k: i32) -> Self {
        Scaled { mantissa: self.mantissa.powi(k), log_scale: self.log_scale * k as f64 }
    }

    /// Difference, aligned on the larger scale.
    pub fn minus(self, other: Scaled) -> Scaled {
        if self.mantissa == 0.0 {
            return Scaled { mantissa: -other.mantissa, ..other };
        }
        if other.mantissa == 0.0 {
            return self;
        }
        let l = self.log_scale.max(other.log_scale);
        Scaled {
            mantissa: self.mantissa * (self.log_scale - l).exp() - other.mantissa * (other.log_scale - l).exp(),
            log_scale: l,
        }
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled { mantissa: self.mantissa * rhs.mantissa, log_scale: self.log_scale + rhs.log_scale }
    }
}

impl std::ops::Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        Scaled { mantissa: self.mantissa / rhs.mantissa, log_scale: self.log_scale - rhs.log_scale }
    }
}

/// Canonical exponential sum: exponents strictly decreasing, no (underflowed)
/// zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpSum {
    terms: Vec<(f64, f64)>,
}

impl ExpSum {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(vec![(c, 0.0)])
    }

    pub fn single(coef: f64, exponent: f64) -> Self {
        Self::from_terms(vec![(coef, exponent)])
    }

    /// Builds a canonical sum from `(coef, exponent)` pairs in any order.
    pub fn from_terms(mut terms: Vec<(f64, f64)>) -> Self {
        terms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        for (c, e) in terms {
            match out.last_mut() {
                // Merge against the leading exponent of the current cluster.
                Some(last) if (last.1 - e).abs() <= EXPONENT_MERGE_TOL => last.0 += c,
                _ => out.push((c, e)),
            }
        }
        out.retain(|&(c, _)| c.abs() > COEF_DROP_TOL);
        Self { terms: out }
    }

    /// Terms as `(coef, exponent)`, exponents strictly decreasing.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn exponents(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.1).collect()
    }

    /// Coefficient of the term whose exponent is within the merge tolerance
    /// of `exponent`, or zero.
    pub fn coefficient_at(&self, exponent: f64) -> f64 {
        self.terms.iter().find(|t| (t.1 - exponent).abs() <= EXPONENT_MERGE_TOL).map_or(0.0, |t| t.0)
    }

    pub fn coefficient_sum(&self) -> f64 {
        neumaier(self.terms.iter().map(|t| t.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|&(c, e)| (c * k, e)).collect())
    }

    /// Largest `|coef|`, a natural scale for coefficient-wise comparisons.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).fold(0.0, f64::max)
    }

    /// `Σ c e^{e s}`, compensated, in descending-exponent order.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::NonFinite("evaluation point"));
        }
        for &(_, e) in &self.terms {
            if e * s > MAX_EXP_ARG {
                return Err(Error::Overflow(e * s));
            }
        }
        Ok(neumaier(self.terms.iter().map(|&(c, e)| c * (e * s).exp())))
    }

    /// `d`-th derivative evaluated in scaled form; never overflows.
    pub fn eval_scaled(&self, s: f64, d: u32) -> Scaled {
        if self.terms.is_empty() {
            return Scaled { mantissa: 0.0, log_scale: 0.0 };
        }
        let l = self.terms.iter().map(|&(_, e)| e * s).fold(f64::NEG_INFINITY, f64::max);
        let m = neumaier(self.terms.iter().map(|&(c, e)| c * e.powi(d as i32) * (e * s - l).exp()));
        Scaled { mantissa: m, log_scale: l }
    }

    /// `Σ |c| e^{e s}` on the same scale as [`ExpSum::eval_scaled`].
    pub fn eval_abs_scaled(&self, s: f64) -> Scaled {
        let v = Self { terms: self.terms.iter().map(|&(c, e)| (c.abs(), e)).collect() };
        v.eval_scaled(s, 0)
    }

    /// `f'(s)/f(s)`, computed without overflow.
    pub fn log_derivative(&self, s: f64) -> f64 {
        let v = self.eval_scaled(s, 0);
        let d = self.eval_scaled(s, 1);
        d.mantissa / v.mantissa
    }

    /// Term-wise derivative.
    pub fn derivative(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|&(c, e)| (c * e, e)).collect())
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for &(c1, e1) in &self.terms {
            for &(c2, e2) in &other.terms {
                out.push((c1 * c2, e1 + e2));
            }
        }
        Self::from_terms(out)
    }

    /// `f f'' - (f')²`, exactly: `Σ_{i<j} c_i c_j (e_i - e_j)² e^{(e_i+e_j)s}`.
    pub fn tilde(&self) -> Self {
        let mut out = Vec::new();
        for (i, &(ci, ei)) in self.terms.iter().enumerate() {
            for &(cj, ej) in &self.terms[i + 1..] {
                let de = ei - ej;
                out.push((ci * cj * de * de, ei + ej));
            }
        }
        Self::from_terms(out)
    }

    /// `lim_{s→∞} f'/f`, the largest exponent. All coefficients must be
    /// positive.
    pub fn dominant_log_derivative(&self) -> Result<f64> {
        if let Some(&(c, _)) = self.terms.iter().find(|t| t.0 <= 0.0) {
            return Err(Error::NonPositiveCoefficient(c));
        }
        self.terms.first().map(|t| t.1).ok_or(Error::NonPositiveCoefficient(0.0))
    }

    pub fn all_positive(&self) -> bool {
        self.terms.iter().all(|t| t.0 > 0.0)
    }

    /// Coefficient-wise distance `max |a_i - b_i|` after aligning exponents.
    pub fn max_coefficient_gap(&self, other: &Self) -> f64 {
        (self - other).max_abs_coefficient()
    }
}

impl Add for &ExpSum {
    type Output = ExpSum;
    fn add(self, rhs: &ExpSum) -> ExpSum {
        let mut t = self.terms.clone();
        t.extend_from_slice(&rhs.terms);
        ExpSum::from_terms(t)
    }
}

impl Sub for &ExpSum {
    type Output = ExpSum;
    fn sub(self, rhs: &ExpSum) -> ExpSum {
        self + &(-rhs)
    }
}

impl Neg for &ExpSum {
    type Output = ExpSum;
    fn neg(self) -> ExpSum {
        ExpSum { terms: self.terms.iter().map(|&(c, e)| (-c, e)).collect() }
    }
}

impl Mul for &ExpSum {
    type Output = ExpSum;
    fn mul(self, rhs: &ExpSum) -> ExpSum {
        self.product(rhs)
    }
}

impl fmt::Display for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, e)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·e^({e}s)")?;
        }
        Ok(())
    }
}

/// Neumaier-compensated summation.
pub(crate) fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
