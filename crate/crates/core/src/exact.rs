//! Dispatch to the closed form that fits the input.

use crate::closed3::{calibrate3, eval3_many, exact2x2, phases_many, Exact2, Exact3Solution};
use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;
use crate::tridiag::{calibrate_tridiag, eval_tridiag, TridiagExact, BAND_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum ExactSolution {
    Two(Exact2),
    Three(Exact3Solution),
    Tridiagonal(TridiagExact),
}

/// 2×2 and 3×3 inputs use the dedicated forms; larger inputs must be
/// tridiagonal.
pub fn solve_exact(h0: &HermitianMatrix) -> Result<ExactSolution> {
    match h0.dim() {
        2 => Ok(ExactSolution::Two(exact2x2(h0)?)),
        3 => Ok(ExactSolution::Three(calibrate3(h0)?)),
        n => {
            let (i, j, value) = h0.band_excess();
            if value > BAND_TOL {
                return Err(Error::UnsupportedExactCase(format!(
                    "{n}x{n} input is not tridiagonal (entry ({},{}) = {value:e})",
                    i + 1,
                    j + 1
                )));
            }
            Ok(ExactSolution::Tridiagonal(calibrate_tridiag(h0)?))
        }
    }
}

impl ExactSolution {
    pub fn dim(&self) -> usize {
        match self {
            Self::Two(_) => 2,
            Self::Three(_) => 3,
            Self::Tridiagonal(t) => t.n,
        }
    }

    pub fn eval(&self, s: f64) -> Result<HermitianMatrix> {
        Ok(self.eval_many(&[s])?.pop().expect("one point"))
    }

    pub fn eval_many(&self, points: &[f64]) -> Result<Vec<HermitianMatrix>> {
        match self {
            Self::Two(e) => Ok(points.iter().map(|&s| e.eval(s)).collect()),
            Self::Three(sol) => eval3_many(sol, points),
            Self::Tridiagonal(t) => points.iter().map(|&s| eval_tridiag(t, s)).collect(),
        }
    }

    /// `(φ_b, φ_c, φ_g)` for 3×3 solutions.
    pub fn phases(&self, points: &[f64]) -> Option<Result<Vec<(f64, f64, f64)>>> {
        match self {
            Self::Three(sol) => Some(phases_many(sol, points)),
            _ => None,
        }
    }
}
