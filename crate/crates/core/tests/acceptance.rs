//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::Instant;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wegner_flow::closed3::{calibrate3, calibrate3_with, eval3_many, phases_many, DegenerateRule, Exact3Solution};
use wegner_flow::numeric::{eigen_drift, integrate, FlowTrajectory, IntegrationPlan};
use wegner_flow::spectra::{eigh, exponents, gate_coefficients, ExponentSet, Side};
use wegner_flow::tridiag::{build_from_parameters, calibrate_tridiag, eval_tridiag, ff_residual};
use wegner_flow::verify4::{refinement_study, residuals_general};
use wegner_flow::{GeneratorKind, HermitianMatrix};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn exact_vs_rk4(traj: &FlowTrajectory, exact: &[HermitianMatrix]) -> f64 {
    traj.samples.iter().zip(exact).map(|((_, n), e)| n.max_abs_diff(e)).fold(0.0, f64::max)
}

/// `|b||c|/|g| sin(φ_g - φ_b - φ_c)`, conserved by the 3×3 flow.
fn phase_constant(h: &HermitianMatrix) -> f64 {
    let (b, c, g) = (h.get(0, 1), h.get(1, 2), h.get(0, 2));
    b.norm() * c.norm() / g.norm() * (g.arg() - b.arg() - c.arg()).sin()
}

fn rotated(rng: &mut ChaCha8Rng, values: [f64; 3], complex: bool) -> HermitianMatrix {
    let q = eigh(&random_hermitian(rng, 3, 1.0, complex)).unwrap().vectors;
    HermitianMatrix::from_upper(3, |i, j| (0..3).map(|k| q[(i, k)] * values[k] * q[(j, k)].conj()).sum()).unwrap()
}

fn criterion_1() -> Outcome {
    let sol = calibrate3(&app_d_symmetric()).unwrap();
    let c = sol.coupled().unwrap();
    let cal = c.calibration;
    let du = (cal.u1 - 3.0).abs().max((cal.u2 + 2.0).abs());
    let e1 = &c.eta1;
    let e2 = &c.eta2;
    let k1 = e1.coefficient_at(-1.0);
    let k2 = e2.coefficient_at(1.0);
    let mut worst: f64 = 0.0;
    for (e, w) in [(3.0, 1.0), (-2.0, 4.0), (-1.0, 1.0)] {
        worst = worst.max(rel(e1.coefficient_at(e) / k1, w));
    }
    for (e, w) in [(-3.0, 289.0 / 25.0), (2.0, 121.0 / 25.0), (1.0, 1.0)] {
        worst = worst.max(rel(e2.coefficient_at(e) / k2, w));
    }
    let pass = du <= 1e-10 && worst <= 1e-9 && e1.len() == 3 && e2.len() == 3;
    outcome(pass, format!("|du| = {du:.1e}, max coefficient deviation {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let sol = calibrate3(&app_d_hermitian()).unwrap();
    let view = sol.coupled().unwrap().corner_view().unwrap();
    let norm = (58.0f64 / 5.0).sqrt() / 3.0;
    let mut worst = rel(view.eta1.eval(0.0).unwrap(), norm).max(rel(view.eta2.eval(0.0).unwrap(), norm));
    let printed1 = [(2.796, 0.1625), (-2.464, 0.5942), (-0.3324, 0.3786)];
    let printed2 = [(-2.796, 0.8158), (2.464, 0.2857), (0.3324, 0.03381)];
    for (eta, printed) in [(&view.eta1, printed1), (&view.eta2, printed2)] {
        for (e, p) in printed {
            let t = eta.terms().iter().min_by(|a, b| (a.1 - e).abs().total_cmp(&(b.1 - e).abs())).unwrap();
            worst = worst.max(rel(t.1, e)).max(rel(t.0, p));
        }
    }
    outcome(worst <= 5e-4, format!("max relative deviation from printed values {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let u = ExponentSet { u: APP_E_U.to_vec() };
    let (_, h0) = build_from_parameters(APP_E_TRACE, &u, &APP_E_P1).unwrap();
    let printed = app_e();
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        for j in i..5 {
            let want = printed.get(i, j).re;
            let got = h0.get(i, j);
            let dev = if want == 0.0 { got.norm() } else { (got.re - want).abs() / want.abs() + got.im.abs() };
            worst = worst.max(dev);
        }
    }
    let ff = ff_residual(&u, &APP_E_P1).unwrap();
    outcome(worst <= 1e-10 && ff <= 1e-10, format!("max relative entry deviation {worst:.1e}, FF residual {ff:.1e}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut entry, mut phase) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let h0 = random_gapped(&mut rng, 3, 2.0, true, 1e-2);
        let sol = calibrate3(&h0).unwrap();
        let traj = rk4(&h0, 5.0, 5000, 25);
        let pts = traj.s_values();
        let exact = eval3_many(&sol, &pts).unwrap();
        entry = entry.max(exact_vs_rk4(&traj, &exact));
        let phases = phases_many(&sol, &pts).unwrap();
        for ((_, num), (pb, pc, pg)) in traj.samples.iter().zip(phases) {
            for ((i, j), phi) in [((0, 1), pb), ((1, 2), pc), ((0, 2), pg)] {
                let z = num.get(i, j);
                // The argument of a vanishing entry is undefined.
                if z.norm() >= 1e-4 {
                    phase = phase.max(angle_diff(z.arg(), phi).abs());
                }
            }
        }
    }
    outcome(
        entry <= 1e-6 && phase <= 1e-6,
        format!("500 matrices: max entry deviation {entry:.1e}, max phase deviation {phase:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let n = 3 + k % 5;
        let h0 = random_tridiagonal(&mut rng, n, k % 2 == 1, 0.1);
        let sol = calibrate_tridiag(&h0).unwrap();
        let traj = rk4(&h0, 4.0, 4000, 20);
        let exact: Vec<_> = traj.s_values().iter().map(|&s| eval_tridiag(&sol, s).unwrap()).collect();
        worst = worst.max(exact_vs_rk4(&traj, &exact));
    }
    outcome(worst <= 1e-6, format!("200 matrices, n = 3..7: max entry deviation {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut trace, mut eig, mut cc) = (0.0f64, 0.0f64, 0.0f64);
    let mut check = |h0: &HermitianMatrix, traj: &FlowTrajectory| {
        let t0 = h0.trace();
        for (_, h) in &traj.samples {
            trace = trace.max((h.trace() - t0).abs() / (1.0 + t0.abs()));
        }
        eig = eig.max(eigen_drift(traj).unwrap());
    };
    for k in 0..100 {
        let h0 = random_gapped(&mut rng, 3, 2.0, true, 1e-2);
        let traj = rk4(&h0, 5.0, 5000, 25);
        check(&h0, &traj);
        let c0 = phase_constant(&h0);
        for (_, h) in &traj.samples {
            // Restricted to samples where all three couplings are resolvable.
            if [h.get(0, 1), h.get(1, 2), h.get(0, 2)].iter().all(|z| z.norm() >= 1e-3) {
                cc = cc.max((phase_constant(h) - c0).abs() / c0.abs());
            }
        }
        let n = 3 + k % 5;
        let tri = random_tridiagonal(&mut rng, n, true, 0.1);
        check(&tri, &rk4(&tri, 4.0, 4000, 20));
    }
    for n in [4, 5, 6] {
        let h0 = random_hermitian(&mut rng, n, 1.0, true);
        let steps = IntegrationPlan::reference_steps(&h0, 3.0, GeneratorKind::Wegner).max(3000);
        let plan = IntegrationPlan::uniform(3.0, steps, steps / 100, GeneratorKind::Wegner).unwrap();
        check(&h0, &integrate(&h0, &plan).unwrap());
    }
    let pass = trace <= 1e-9 && eig <= 1e-8 && cc <= 1e-7;
    outcome(pass, format!("trace drift {trace:.1e} (relative to 1+|Tr|), eigenvalue drift {eig:.1e}, C drift {cc:.1e}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (mut value_dev, mut off_ratio, mut unsorted) = (0.0f64, 0.0f64, 0usize);
    let mut check = |h0: &HermitianMatrix, far: HermitianMatrix| {
        let d = far.diag();
        if d.windows(2).any(|w| w[0] < w[1]) {
            unsorted += 1;
        }
        let w = eigh(h0).unwrap().values;
        value_dev = value_dev.max(d.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        off_ratio = off_ratio.max(far.offdiag_sq_norm() / h0.offdiag_sq_norm());
    };
    for k in 0..100 {
        let h0 = random_gapped(&mut rng, 3, 2.0, k % 2 == 0, 0.1);
        let s = 40.0 / eigh(&h0).unwrap().min_gap();
        let sol = calibrate3(&h0).unwrap();
        check(&h0, eval3_many(&sol, &[s]).unwrap().pop().unwrap());
        let tri = random_tridiagonal(&mut rng, 3 + k % 5, k % 2 == 1, 0.1);
        let s = 40.0 / eigh(&tri).unwrap().min_gap();
        check(&tri, eval_tridiag(&calibrate_tridiag(&tri).unwrap(), s).unwrap());
    }
    let pass = unsorted == 0 && value_dev <= 1e-6 && off_ratio <= 1e-6;
    outcome(pass, format!("200 matrices: {unsorted} unsorted, eigenvalue deviation {value_dev:.1e}, off-diagonal ratio {off_ratio:.1e}"))
}

fn unit_sum_gap(eta: &wegner_flow::ExpSum, exps: impl Iterator<Item = f64>, gates: &[f64]) -> f64 {
    let total = eta.coefficient_sum();
    exps.zip(gates).map(|(e, g)| (eta.coefficient_at(e) / total - g).abs()).fold(0.0, f64::max)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst: f64 = 0.0;
    for k in 0..300 {
        let h0 = random_gapped(&mut rng, 3, 2.0, k % 3 != 0, 1e-3);
        let spec = eigh(&h0).unwrap();
        let u = exponents(&spec, h0.trace()).u;
        let first = gate_coefficients(&spec, Side::First).unwrap();
        let last = gate_coefficients(&spec, Side::Last).unwrap();
        let sol = calibrate3(&h0).unwrap();
        let c = sol.coupled().unwrap();
        worst = worst.max(unit_sum_gap(&c.eta1, u.iter().copied(), &first));
        worst = worst.max(unit_sum_gap(&c.eta2, u.iter().map(|x| -x), &last));
    }
    for k in 0..200 {
        let n = 3 + k % 5;
        let h0 = random_tridiagonal(&mut rng, n, k % 2 == 0, 0.1);
        let spec = eigh(&h0).unwrap();
        let u = exponents(&spec, h0.trace()).u;
        let first = gate_coefficients(&spec, Side::First).unwrap();
        let last = gate_coefficients(&spec, Side::Last).unwrap();
        let sol = calibrate_tridiag(&h0).unwrap();
        worst = worst.max(unit_sum_gap(&sol.etas[0], u.iter().copied(), &first));
        worst = worst.max(unit_sum_gap(&sol.etas[n - 2], u.iter().map(|x| -x), &last));
    }
    outcome(worst <= 1e-7, format!("500 matrices: max gate coefficient deviation {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let (mut kept, mut rejected) = (0.0f64, f64::INFINITY);
    let mut all_degenerate = true;
    let patterns = [[2.0, -1.0, -1.0], [1.0, 1.0, -2.0], [3.0, 0.5, 0.5], [-0.2, -0.2, 1.7], [0.4, -1.3, -1.3]];
    for (k, values) in patterns.iter().cycle().take(20).enumerate() {
        let h0 = rotated(&mut rng, *values, k % 2 == 1);
        let traj = rk4(&h0, 5.0, 5000, 25);
        let sol = calibrate3(&h0).unwrap();
        all_degenerate &= sol.is_degenerate();
        kept = kept.max(exact_vs_rk4(&traj, &eval3_many(&sol, &traj.s_values()).unwrap()));
        let other = calibrate3_with(&h0, DegenerateRule::POverQ)
            .and_then(|alt| eval3_many(&alt, &traj.s_values()))
            .map(|ex| exact_vs_rk4(&traj, &ex))
            .unwrap_or(f64::INFINITY);
        rejected = rejected.min(other);
    }
    let pass = all_degenerate && kept <= 1e-6;
    outcome(
        pass,
        format!("20 matrices: u = -3Q/P survives (max deviation {kept:.1e}); u = -3P/Q rejected (min deviation {rejected:.1e})"),
    )
}

fn random_symmetric4(rng: &mut ChaCha8Rng) -> HermitianMatrix {
    loop {
        let h = random_hermitian(rng, 4, 1.0, false);
        if eigh(&h).unwrap().min_gap() >= 0.1 {
            return h;
        }
    }
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let (mut gamma, mut beta, mut fit) = (0.0f64, 0.0f64, 0.0f64);
    let plan = IntegrationPlan::uniform(2.0, 2000, 1, GeneratorKind::Mielke).unwrap();
    for _ in 0..100 {
        let h0 = random_symmetric4(&mut rng);
        let r = residuals_general(&h0, &plan).unwrap();
        gamma = gamma.max(r.max_gamma_product_drift);
        beta = beta.max(r.max_beta_residuals.into_iter().fold(0.0, f64::max));
        fit = fit.max(r.eta2_fit_residual);
    }
    // Step refinement: the γ-product drift is set by RK4 and must fall as
    // the step shrinks until it reaches the roundoff floor.
    let mut refined = true;
    let mut table = Vec::new();
    for _ in 0..3 {
        let h0 = random_symmetric4(&mut rng);
        let study = refinement_study(&h0, 2.0, 500, 3).unwrap();
        let g: Vec<f64> = study.iter().map(|(_, r)| r.max_gamma_product_drift).collect();
        refined &= g.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-11);
        table.push(g.iter().map(|x| format!("{x:.0e}")).collect::<Vec<_>>().join("/"));
    }
    let pass = gamma <= 1e-5 && beta <= 1e-4 && fit <= 1e-5 && refined;
    outcome(
        pass,
        format!(
            "100 matrices: gamma drift {gamma:.1e}, beta residual {beta:.1e}, eta2 fit {fit:.1e}; refinement 500/1000/2000 steps: {}",
            table.join(", ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let h0 = HermitianMatrix::from_real(&[vec![1.0, 0.5, 0.0], vec![0.5, 0.2, -0.8], vec![0.0, -0.8, -0.6]]).unwrap();
    let corner = |kind: GeneratorKind| {
        let plan = IntegrationPlan::uniform(2.0, 4000, 10, kind).unwrap();
        integrate(&h0, &plan).unwrap().samples.iter().map(|(_, h)| h.get(0, 2).norm()).fold(0.0, f64::max)
    };
    let (mielke, wegner) = (corner(GeneratorKind::Mielke), corner(GeneratorKind::Wegner));
    let exact = match calibrate3(&h0).unwrap() {
        Exact3Solution::Coupled(c) => c.big_a == 0.0,
        _ => false,
    };
    outcome(mielke <= 1e-10 && wegner > 1e-4 && exact, format!("max |g|: Mielke {mielke:.1e}, Wegner {wegner:.1e}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("symmetric 3x3 golden", criterion_1),
        ("Hermitian 3x3 golden", criterion_2),
        ("tridiagonal build golden", criterion_3),
        ("3x3 exact vs RK4", criterion_4),
        ("tridiagonal exact vs RK4", criterion_5),
        ("conservation", criterion_6),
        ("sorted limit", criterion_7),
        ("gate coefficients", criterion_8),
        ("degenerate branch", criterion_9),
        ("4x4 residual harness", criterion_10),
        ("corner entry control", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {}: {} ({}; {:.1}s)",
            k + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
