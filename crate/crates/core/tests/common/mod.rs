#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use wegner_flow::numeric::{integrate, FlowTrajectory, IntegrationPlan};
use wegner_flow::spectra::eigh;
use wegner_flow::{Complex64, GeneratorKind, HermitianMatrix};

pub fn app_d_symmetric() -> HermitianMatrix {
    let s = f64::sqrt;
    HermitianMatrix::from_real(&[
        vec![17.0 / 6.0, s(5.0 / 87.0), 3.0 * s(5.0 / 58.0)],
        vec![s(5.0 / 87.0), 547.0 / 174.0, 26.0 / 29.0 * s(2.0 / 3.0)],
        vec![3.0 * s(5.0 / 58.0), 26.0 / 29.0 * s(2.0 / 3.0), 350.0 / 87.0],
    ])
    .unwrap()
}

pub fn app_d_hermitian() -> HermitianMatrix {
    let h = app_d_symmetric();
    let phase = [[0.0, PI / 3.0, -PI / 2.0], [0.0, 0.0, -PI / 6.0]];
    HermitianMatrix::from_upper(3, |i, j| {
        if i == j {
            h.get(i, i)
        } else {
            h.get(i, j) * Complex64::from_polar(1.0, phase[i][j])
        }
    })
    .unwrap()
}

pub const APP_E_TRACE: f64 = 5.0;
pub const APP_E_U: [f64; 5] = [2.0, 1.5, 1.0, -0.5, -4.0];
pub const APP_E_P1: [f64; 5] = [128.0 / 121.0, 32.0 / 49.0, 16.0 / 25.0, 8.0 / 9.0, 512.0 / 225.0];

pub fn app_e_diagonal() -> [f64; 5] {
    [
        1740683.0 / 3678812.0,
        22231005067381.0 / 70129227185011.0,
        39263366363260747.0 / 38462269852632232.0,
        8664841726526959.0 / 5719587241749384.0,
        18982507.0 / 11339169.0,
    ]
}

pub fn app_e_offdiagonal() -> [f64; 4] {
    let s = f64::sqrt;
    [
        385.0 * s(76252037.0 / 2.0) / 1839406.0,
        6.0 * s(57988393428551.0) / 76252037.0,
        3.0 * s(4323173670686265.0) / 504409736.0,
        154.0 * s(126102434.0) / 11339169.0,
    ]
}

pub fn app_e() -> HermitianMatrix {
    let (d, b) = (app_e_diagonal(), app_e_offdiagonal());
    tridiagonal(&d, &b.map(|x| Complex64::new(x, 0.0)))
}

pub fn tridiagonal(d: &[f64], b: &[Complex64]) -> HermitianMatrix {
    HermitianMatrix::from_upper(d.len(), |i, j| {
        if i == j {
            Complex64::new(d[i], 0.0)
        } else if j == i + 1 {
            b[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64, complex: bool) -> HermitianMatrix {
    HermitianMatrix::from_upper(n, |i, j| {
        let re = rng.gen_range(-scale..scale);
        let im = if complex && i != j { rng.gen_range(-scale..scale) } else { 0.0 };
        Complex64::new(re, im)
    })
    .unwrap()
}

/// Rejection-samples until the smallest eigenvalue gap is at least `gap`.
pub fn random_gapped(rng: &mut impl Rng, n: usize, scale: f64, complex: bool, gap: f64) -> HermitianMatrix {
    loop {
        let h = random_hermitian(rng, n, scale, complex);
        if eigh(&h).unwrap().min_gap() >= gap {
            return h;
        }
    }
}

pub fn random_tridiagonal(rng: &mut impl Rng, n: usize, complex: bool, gap: f64) -> HermitianMatrix {
    loop {
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b: Vec<Complex64> = (0..n - 1)
            .map(|_| {
                let m = rng.gen_range(0.2..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let phi = if complex { rng.gen_range(-PI..PI) } else { 0.0 };
                Complex64::from_polar(m, phi)
            })
            .collect();
        let h = tridiagonal(&d, &b);
        if eigh(&h).unwrap().min_gap() >= gap {
            return h;
        }
    }
}

/// Mielke RK4 trajectory sampled every `every` steps.
pub fn rk4(h0: &HermitianMatrix, s_max: f64, steps: usize, every: usize) -> FlowTrajectory {
    let plan = IntegrationPlan::uniform(s_max, steps, every, GeneratorKind::Mielke).unwrap();
    integrate(h0, &plan).unwrap()
}

/// Difference of two angles folded into (-π, π].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}
