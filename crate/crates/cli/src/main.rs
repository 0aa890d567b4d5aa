use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wegner_flow::exact::{solve_exact, ExactSolution};
use wegner_flow::io::{format_f64, matrix_file_json, parse_matrix_file, parse_real_list, write_csv};
use wegner_flow::numeric::{eigen_drift, integrate, FlowTrajectory, IntegrationPlan};
use wegner_flow::spectra::{cubic_roots, depressed_cubic, eigh, exponents, ExponentSet};
use wegner_flow::tridiag::{build_from_parameters, ff_rescale, ff_residual, FF_TOL};
use wegner_flow::verify4::{residuals_general, Residual4Report};
use wegner_flow::{Error, GeneratorKind, HermitianMatrix};

const BETA_LIMIT: f64 = 1e-4;
const GAMMA_LIMIT: f64 = 1e-5;
const FIT_LIMIT: f64 = 1e-5;

#[derive(Parser)]
#[command(
    name = "wegner-flow",
    version,
    about = "Exact and RK4 solutions of the Wegner flow with the Mielke generator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Generator {
    Mielke,
    Wegner,
}

impl From<Generator> for GeneratorKind {
    fn from(g: Generator) -> Self {
        match g {
            Generator::Mielke => GeneratorKind::Mielke,
            Generator::Wegner => GeneratorKind::Wegner,
        }
    }
}

#[derive(clap::Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 5.0, value_parser = positive)]
    s_max: f64,
    /// RK4 steps over [0, s-max].
    #[arg(long, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    /// Output intervals over [0, s-max].
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
}

impl RunArgs {
    fn points(&self) -> Vec<f64> {
        let m = self.samples as usize;
        (0..=m).map(|k| self.s_max * k as f64 / m as f64).collect()
    }

    fn numeric(&self, h0: &HermitianMatrix, generator: GeneratorKind) -> Result<FlowTrajectory, Failure> {
        let plan = IntegrationPlan::new(self.s_max, self.steps as usize, &self.points(), generator)?;
        Ok(integrate(h0, &plan)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and flow exponents.
    Eig { file: PathBuf },
    /// Writes a trajectory as CSV.
    Flow {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        #[arg(long, value_enum, default_value = "mielke")]
        generator: Generator,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact solution against RK4.
    Compare {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1e-6, value_parser = positive)]
        tolerance: f64,
    },
    /// Builds H(0) of a tridiagonal flow from its parameters.
    TridiagBuild {
        #[arg(long, allow_hyphen_values = true)]
        trace: f64,
        /// Exponents u_i, e.g. "2,1.5,1,-0.5,-4".
        #[arg(long, allow_hyphen_values = true)]
        exponents: String,
        /// First-row coefficients, fractions allowed.
        #[arg(long)]
        coeffs: String,
        /// Rescale the coefficients onto the normalization constraint.
        #[arg(long)]
        rescale: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural residuals of a 4x4 real symmetric flow.
    Verify4 {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsupportedExactCase(_) | Error::DimensionCap { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn load(path: &Path) -> Result<HermitianMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(parse_matrix_file(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| input_error(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Rounds to 12 significant digits, then prints the shortest form.
fn show(x: f64) -> String {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format_f64(if r == 0.0 { 0.0 } else { r })
}

fn show_all(xs: &[f64]) -> String {
    xs.iter().map(|x| show(*x)).collect::<Vec<_>>().join(" ")
}

fn cmd_eig(file: &Path) -> Result<u8, Failure> {
    let h = load(file)?;
    let spec = eigh(&h)?;
    println!("eigenvalues: {}", show_all(&spec.values));
    println!("exponents: {}", show_all(&exponents(&spec, h.trace()).u));
    if h.dim() == 3 {
        let cubic = depressed_cubic(&h.principal_invariants()?);
        println!("P: {}", show(cubic.p));
        println!("Q: {}", show(cubic.q));
        println!("cubic roots: {}", show_all(&cubic_roots(cubic)?));
    }
    Ok(0)
}

fn cmd_flow(
    file: &Path,
    method: Method,
    generator: Generator,
    run: &RunArgs,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let h0 = load(file)?;
    let csv = match method {
        Method::Numeric => write_csv(&run.numeric(&h0, generator.into())?.samples, None)?,
        Method::Exact => {
            if generator == Generator::Wegner {
                return Err(
                    Error::UnsupportedExactCase("the exact method covers the Mielke generator only".into()).into()
                );
            }
            let sol = solve_exact(&h0)?;
            let points = run.points();
            let samples: Vec<_> = points.iter().copied().zip(sol.eval_many(&points)?).collect();
            let phases = match sol.phases(&points) {
                Some(p) if !h0.is_real() => Some(p?),
                _ => None,
            };
            write_csv(&samples, phases.as_deref())?
        }
    };
    emit(out, &csv)?;
    Ok(0)
}

fn cmd_compare(file: &Path, run: &RunArgs, tolerance: f64) -> Result<u8, Failure> {
    let h0 = load(file)?;
    let sol: ExactSolution = solve_exact(&h0)?;
    let traj = run.numeric(&h0, GeneratorKind::Mielke)?;
    let exact = sol.eval_many(&traj.s_values())?;
    let (mut worst, mut at) = (0.0f64, 0.0);
    let mut trace_drift = 0.0f64;
    for ((s, num), ex) in traj.samples.iter().zip(&exact) {
        let d = num.max_abs_diff(ex);
        if d > worst {
            (worst, at) = (d, *s);
        }
        trace_drift = trace_drift.max((num.trace() - h0.trace()).abs());
    }
    println!("max deviation: {} at s = {}", format_f64(worst), format_f64(at));
    println!("trace drift: {}", format_f64(trace_drift));
    println!("eigenvalue drift: {}", format_f64(eigen_drift(&traj)?));
    let pass = worst <= tolerance;
    println!("{} (tolerance {})", if pass { "PASS" } else { "FAIL" }, format_f64(tolerance));
    Ok(if pass { 0 } else { 1 })
}

fn cmd_tridiag_build(
    trace: f64,
    exponents: &str,
    coeffs: &str,
    rescale: bool,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    if !trace.is_finite() {
        return Err(input_error("trace must be finite"));
    }
    let u = parse_real_list(exponents)?;
    let p = parse_real_list(coeffs)?;
    if u.len() != p.len() {
        return Err(input_error(format!("{} exponents but {} coefficients", u.len(), p.len())));
    }
    let mut pairs: Vec<(f64, f64)> = u.into_iter().zip(p).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let u = ExponentSet { u: pairs.iter().map(|x| x.0).collect() };
    let mut p: Vec<f64> = pairs.iter().map(|x| x.1).collect();

    let residual = ff_residual(&u, &p)?;
    let mut report = vec![format!("normalization residual: {}", format_f64(residual))];
    if residual > FF_TOL {
        if !rescale {
            return Err(Error::FFViolation(residual).into());
        }
        let (lambda, scaled) = ff_rescale(&u, &p)?;
        report.push(format!("rescaled coefficients by {}", format_f64(lambda)));
        p = scaled;
    }
    let (sol, h0) = build_from_parameters(trace, &u, &p)?;
    let counts: Vec<String> = sol.term_counts().iter().map(|c| c.to_string()).collect();
    report.push(format!("eta term counts: {}", counts.join(" ")));
    let spec = eigh(&h0)?;
    let n = u.u.len() as f64;
    let gap = spec.values.iter().zip(&u.u).map(|(w, x)| (w - (trace / n + x / 2.0)).abs()).fold(0.0, f64::max);
    report.push(format!("spectrum check: max deviation {}", format_f64(gap)));

    let json = matrix_file_json(&h0);
    match out {
        Some(path) => {
            emit(Some(path), &json)?;
            report.iter().for_each(|l| println!("{l}"));
        }
        None => {
            report.iter().for_each(|l| eprintln!("{l}"));
            print!("{json}");
        }
    }
    Ok(0)
}

fn print_report(r: &Residual4Report, corner_free: bool) -> bool {
    let mut pass = true;
    let mut line = |name: &str, v: f64, limit: Option<f64>| {
        let ok = limit.is_none_or(|l| v <= l);
        pass &= ok;
        let verdict = match limit {
            Some(l) => format!(" (limit {}, {})", format_f64(l), if ok { "ok" } else { "FAIL" }),
            None => String::new(),
        };
        println!("{name}: {}{verdict}", format_f64(v));
    };
    line("gamma product drift", r.max_gamma_product_drift, Some(GAMMA_LIMIT));
    for (k, b) in r.max_beta_residuals.iter().enumerate() {
        line(&format!("beta{} residual", k + 1), *b, Some(BETA_LIMIT));
    }
    for (k, d) in r.max_delta_ratio_drift.iter().enumerate() {
        line(&format!("delta{} ratio drift", k + 1), *d, corner_free.then_some(BETA_LIMIT));
    }
    for (k, c) in r.rho_condition_residuals.iter().enumerate() {
        line(&format!("rho{} condition", k + 1), *c, Some(BETA_LIMIT));
    }
    line("eta2 fit residual", r.eta2_fit_residual, Some(FIT_LIMIT));
    line("eta2 fit condition", r.eta2_fit_condition, None);
    pass
}

fn cmd_verify4(file: &Path, run: &RunArgs) -> Result<u8, Failure> {
    let h0 = load(file)?;
    let plan = IntegrationPlan::uniform(run.s_max, run.steps as usize, 1, GeneratorKind::Mielke)?;
    let report = residuals_general(&h0, &plan)?;
    let pass = print_report(&report, h0.get(0, 3).norm() == 0.0);
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Eig { file } => cmd_eig(&file),
        Command::Flow { file, method, generator, run, out } => cmd_flow(&file, method, generator, &run, out.as_deref()),
        Command::Compare { file, run, tolerance } => cmd_compare(&file, &run, tolerance),
        Command::TridiagBuild { trace, exponents, coeffs, rescale, out } => {
            cmd_tridiag_build(trace, &exponents, &coeffs, rescale, out.as_deref())
        }
        Command::Verify4 { file, run } => cmd_verify4(&file, &run),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
