mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wegner_flow::closed3::{calibrate3, eval3, eval3_many, phase_at, Mode};

#[test]
fn random_matrices_follow_rk4() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..60 {
        let h0 = random_gapped(&mut rng, 3, 2.0, trial % 2 == 0, 1e-2);
        let sol = calibrate3(&h0).unwrap();
        assert!(eval3(&sol, 0.0).unwrap().max_abs_diff(&h0) < 1e-10);
        let traj = rk4(&h0, 5.0, 5000, 250);
        let exact = eval3_many(&sol, &traj.s_values()).unwrap();
        for ((s, num), ex) in traj.samples.iter().zip(&exact) {
            assert!(num.max_abs_diff(ex) < 1e-6, "trial {trial} s={s}");
        }
    }
}

#[test]
fn phases_track_rk4() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut hermitian = 0;
    for _ in 0..20 {
        let h0 = random_gapped(&mut rng, 3, 2.0, true, 1e-2);
        let sol = calibrate3(&h0).unwrap();
        hermitian += usize::from(sol.mode() == Mode::Hermitian);
        let traj = rk4(&h0, 3.0, 3000, 300);
        for (s, num) in &traj.samples {
            let (pb, pc, pg) = phase_at(&sol, *s).unwrap();
            for ((i, j), phi) in [((0, 1), pb), ((1, 2), pc), ((0, 2), pg)] {
                let z = num.get(i, j);
                if z.norm() > 1e-4 {
                    assert!(angle_diff(z.arg(), phi).abs() < 1e-5, "s={s} ({i},{j})");
                }
            }
        }
    }
    assert!(hermitian > 15);
}

#[test]
fn phase_constant_is_conserved() {
    let h0 = app_d_hermitian();
    let invariant = |h: &wegner_flow::HermitianMatrix| {
        let (b, c, g) = (h.get(0, 1), h.get(1, 2), h.get(0, 2));
        b.norm() * c.norm() / g.norm() * (g.arg() - b.arg() - c.arg()).sin()
    };
    let c0 = invariant(&h0);
    let traj = rk4(&h0, 2.0, 4000, 200);
    for (_, h) in &traj.samples {
        assert!((invariant(h) - c0).abs() <= 1e-7 * c0.abs());
    }
    let sol = calibrate3(&h0).unwrap();
    assert!((sol.coupled().unwrap().phase.c_const - c0).abs() < 1e-12);
}
