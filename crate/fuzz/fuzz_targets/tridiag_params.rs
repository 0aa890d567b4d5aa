#![no_main]
use libfuzzer_sys::fuzz_target;
use wegner_flow::io::parse_real_list;
use wegner_flow::spectra::ExponentSet;
use wegner_flow::tridiag::{build_from_parameters, eval_tridiag, ff_rescale};

// Input: "trace;exponents;coefficients", lists as accepted by the CLI.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut parts = text.splitn(3, ';');
    let (Some(t), Some(e), Some(c)) = (parts.next(), parts.next(), parts.next()) else { return };
    let Ok(trace) = t.trim().parse::<f64>() else { return };
    let (Ok(u), Ok(p)) = (parse_real_list(e), parse_real_list(c)) else { return };
    if !trace.is_finite() || u.len() != p.len() || u.len() > 10 {
        return;
    }
    let u = ExponentSet { u };
    let Ok((_, p)) = ff_rescale(&u, &p) else { return };
    let Ok((sol, h0)) = build_from_parameters(trace, &u, &p) else { return };
    assert!(h0.is_tridiagonal(0.0));
    let _ = eval_tridiag(&sol, 1.0);
});
