//! Fixtures shared by unit tests.

use num_complex::Complex64;
use rand::Rng;

use crate::matrix::HermitianMatrix;

pub(crate) fn app_d_symmetric() -> HermitianMatrix {
    let s = f64::sqrt;
    HermitianMatrix::from_real(&[
        vec![17.0 / 6.0, s(5.0 / 87.0), 3.0 * s(5.0 / 58.0)],
        vec![s(5.0 / 87.0), 547.0 / 174.0, 26.0 / 29.0 * s(2.0 / 3.0)],
        vec![3.0 * s(5.0 / 58.0), 26.0 / 29.0 * s(2.0 / 3.0), 350.0 / 87.0],
    ])
    .unwrap()
}

/// The symmetric example with phases π/3, -π/6, -π/2 on b, c, g.
pub(crate) fn app_d_hermitian() -> HermitianMatrix {
    use std::f64::consts::PI;
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

pub(crate) fn app_e() -> HermitianMatrix {
    let s = f64::sqrt;
    let d = [
        1740683.0 / 3678812.0,
        22231005067381.0 / 70129227185011.0,
        39263366363260747.0 / 38462269852632232.0,
        8664841726526959.0 / 5719587241749384.0,
        18982507.0 / 11339169.0,
    ];
    let b = [
        385.0 * s(76252037.0 / 2.0) / 1839406.0,
        6.0 * s(57988393428551.0) / 76252037.0,
        3.0 * s(4323173670686265.0) / 504409736.0,
        154.0 * s(126102434.0) / 11339169.0,
    ];
    HermitianMatrix::from_upper(5, |i, j| {
        if i == j {
            Complex64::new(d[i], 0.0)
        } else if j == i + 1 {
            Complex64::new(b[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .unwrap()
}

/// Entries uniform in `[-scale, scale]`, imaginary parts only if `complex`.
pub(crate) fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64, complex: bool) -> HermitianMatrix {
    HermitianMatrix::from_upper(n, |i, j| {
        let re = rng.gen_range(-scale..scale);
        let im = if complex && i != j { rng.gen_range(-scale..scale) } else { 0.0 };
        Complex64::new(re, im)
    })
    .unwrap()
}
