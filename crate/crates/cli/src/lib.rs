//! Command line for the `masterfield` crate.
//!
//! Data goes to stdout (CSV or `key value` lines), the run report and
//! diagnostics go to stderr. Exit codes: 0 success, 2 usage, 3 parse or
//! validation, 4 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use masterfield::equilibrium::{solve_equilibrium, CRITICAL_AREA};
use masterfield::loop_model::parse_loop_spec;
use masterfield::master::MasterField;
use masterfield::oracle::{charsum_moments, mcmc_chain, mcmc_moment, BetaEnsembleState, CharacterSumConfig};
use masterfield::simple_field::{phi_planar, spectral_density_simple, SimpleField, SimpleMethod};
use masterfield::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Independent MCMC chains used by `verify`; `--threads` only sets how many run at once.
pub const CHAINS: u64 = 4;

#[derive(Debug, Parser)]
#[command(name = "masterfield", version, about = "Master field of Yang-Mills theory on the sphere")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Agreement threshold between methods.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for stochastic commands.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0: one per available core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium density on a grid: CSV `x,rho`.
    Density {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// `φ_T(n, a1, T − a1)` by every available method.
    Simple {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        a1: f64,
    },
    /// Master field of a loop read from a loop-spec file.
    Loop {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = LoopMethod::Recursion)]
        method: LoopMethod,
        /// Distinguished face for the contour formula (1-based).
        #[arg(long, default_value_t = 1)]
        face: usize,
    },
    /// Finite-N check: character sum, MCMC estimate and the large-N value.
    Verify {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        a1: f64,
        /// Matrix size N.
        #[arg(long = "particles", short = 'N')]
        particles: usize,
        #[arg(long, default_value_t = 1)]
        n: i64,
        /// Sweeps per chain after burn-in.
        #[arg(long, default_value_t = 100_000)]
        sweeps: usize,
        #[arg(long, default_value_t = 5_000)]
        burn_in: usize,
    },
    /// Spectral density of a simple-loop holonomy: CSV `theta,density`.
    Spectral {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        a1: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Gap to the planar limit along a ladder of T: CSV `T,phi_T,phi_planar,gap`.
    Planar {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        ladder: Vec<f64>,
    },
    /// Midpoint duality and its round trip: CSV `theta,rho_star,residual`.
    Duality {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoopMethod {
    Recursion,
    Contour,
    Both,
}

/// Echo of one invocation, written to stderr.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<(String, String)>,
    pub tol: f64,
    pub seed: Option<u64>,
    pub threads: usize,
    pub wall_seconds: f64,
}

impl RunReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# command: {}", self.command);
        let inputs: Vec<String> = self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "# inputs: {}", inputs.join(" "));
        let _ = write!(s, "# tol={} threads={}", self.tol, self.threads);
        if let Some(seed) = self.seed {
            let _ = write!(s, " seed={seed}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "# wall time: {:.3} s", self.wall_seconds);
        s
    }
}

// CSV numbers use `{:?}`: shortest round-trip digits, exponent form for
// very small or large magnitudes.

/// Failure of a command: message and exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Validation(_) => EXIT_PARSE,
            Error::Domain(_) | Error::Guard(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Self { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let threads = if cli.global.threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        cli.global.threads
    };
    let started = Instant::now();
    let mut report = RunReport {
        command: String::new(),
        inputs: Vec::new(),
        tol: cli.global.tol,
        seed: None,
        threads,
        wall_seconds: 0.0,
    };
    let mut buf = Vec::new();
    let result = dispatch(&cli, threads, &mut report, &mut buf, err);
    report.wall_seconds = started.elapsed().as_secs_f64();
    let _ = err.write_all(report.render().as_bytes());
    match result {
        Ok(()) => {
            let _ = out.write_all(&buf);
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn input(report: &mut RunReport, key: &str, value: impl ToString) {
    report.inputs.push((key.into(), value.to_string()));
}

fn dispatch(cli: &Cli, threads: usize, report: &mut RunReport, out: &mut Vec<u8>, err: &mut dyn Write) -> Outcome {
    let tol = cli.global.tol;
    if !(tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    match &cli.command {
        Command::Density { t, points } => {
            report.command = "density".into();
            input(report, "T", t);
            input(report, "points", points);
            cmd_density(*t, *points, out)
        }
        Command::Simple { t, n, a1 } => {
            report.command = "simple".into();
            input(report, "T", t);
            input(report, "n", n);
            input(report, "a1", a1);
            cmd_simple(*t, *n, *a1, tol, out)
        }
        Command::Loop { spec, method, face } => {
            report.command = "loop".into();
            input(report, "spec", spec.display());
            input(report, "method", format!("{method:?}").to_lowercase());
            input(report, "face", face);
            cmd_loop(spec, *method, *face, tol, out, err)
        }
        Command::Verify { t, a1, particles, n, sweeps, burn_in } => {
            report.command = "verify".into();
            report.seed = Some(cli.global.seed);
            input(report, "T", t);
            input(report, "a1", a1);
            input(report, "N", particles);
            input(report, "n", n);
            input(report, "sweeps", sweeps);
            input(report, "burn_in", burn_in);
            input(report, "chains", CHAINS);
            let v = VerifyArgs { t: *t, a1: *a1, big_n: *particles, n: *n, sweeps: *sweeps, burn_in: *burn_in };
            cmd_verify(&v, cli.global.seed, threads, out, err)
        }
        Command::Spectral { t, a1, points } => {
            report.command = "spectral".into();
            input(report, "T", t);
            input(report, "a1", a1);
            input(report, "points", points);
            cmd_spectral(*t, *a1, *points, out)
        }
        Command::Planar { n, t, ladder } => {
            report.command = "planar".into();
            input(report, "n", n);
            input(report, "t", t);
            let l: Vec<String> = ladder.iter().map(f64::to_string).collect();
            input(report, "ladder", l.join(","));
            cmd_planar(*n, *t, ladder, out)
        }
        Command::Duality { t, points } => {
            report.command = "duality".into();
            input(report, "T", t);
            input(report, "points", points);
            cmd_duality(*t, *points, tol, out)
        }
    }
}

fn check_area(t: f64) -> Outcome {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!("T must be positive and finite, got {t}")))
    }
}

pub fn cmd_density(t: f64, points: usize, out: &mut Vec<u8>) -> Outcome {
    check_area(t)?;
    if points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    let eq = solve_equilibrium(t)?;
    let (lo, hi) = (-eq.beta - 0.1, eq.beta + 0.1);
    let _ = writeln!(out, "x,rho");
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let _ = writeln!(out, "{x:?},{:?}", eq.density(x));
    }
    Ok(())
}

pub fn cmd_simple(t: f64, n: i64, a1: f64, tol: f64, out: &mut Vec<u8>) -> Outcome {
    check_area(t)?;
    if n == 0 {
        return Err(Failure::usage("--n must be nonzero"));
    }
    let sf = SimpleField::new(t)?;
    let mut values = Vec::new();
    for (name, method) in
        [("quadrature", SimpleMethod::Quadrature), ("series", SimpleMethod::SubcriticalSeries), ("contour", SimpleMethod::Contour)]
    {
        if method == SimpleMethod::SubcriticalSeries && t > CRITICAL_AREA {
            let _ = writeln!(out, "{name:<11} n/a");
            continue;
        }
        let v = sf.value(n, a1, method)?.value;
        values.push(v);
        let _ = writeln!(out, "{name:<11} {v:.15}");
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let _ = writeln!(out, "{:<11} {spread:.3e}", "spread");
    let _ = writeln!(out, "{:<11} {}", "agreement", if spread <= tol { "ok" } else { "EXCEEDS TOL" });
    Ok(())
}

pub fn cmd_loop(spec: &PathBuf, method: LoopMethod, face: usize, tol: f64, out: &mut Vec<u8>, err: &mut dyn Write) -> Outcome {
    let text = std::fs::read_to_string(spec).map_err(|e| Failure::usage(format!("{}: {e}", spec.display())))?;
    let (l, areas) = parse_loop_spec(&text).map_err(|e| {
        let mut f = Failure::from(e.clone());
        f.message = match e {
            Error::Parse { line, column, message } => format!("{}:{line}:{column}: {message}", spec.display()),
            other => format!("{}: {other}", spec.display()),
        };
        f
    })?;
    if face == 0 || face > l.face_count() {
        return Err(Failure::usage(format!("--face must lie in 1..={}", l.face_count())));
    }
    let mf = MasterField::new(areas.total())?;
    let _ = writeln!(out, "{:<10} {}", "T", areas.total());
    let _ = writeln!(out, "{:<10} {}", "crossings", l.n_self());
    let mut recursion = None;
    if method != LoopMethod::Contour {
        let v = mf.value(&l, &areas)?;
        let _ = writeln!(out, "{:<10} {:.15}  err {:.1e}  depth {}", "recursion", v.value, v.err_est, v.depth);
        recursion = Some(v.value);
    }
    if method != LoopMethod::Recursion {
        match mf.splittable_contour_value(&l, &areas, face - 1) {
            Ok(c) => {
                let _ = writeln!(out, "{:<10} {:.15}  err {:.1e}", "contour", c.value, c.err_est);
                if let Some(r) = recursion {
                    let delta = (r - c.value).abs();
                    let _ = writeln!(out, "{:<10} {delta:.3e}  {}", "delta", if delta <= tol { "ok" } else { "EXCEEDS TOL" });
                }
            }
            Err(e @ (Error::NotSplittable | Error::Guard(_))) => {
                let _ = writeln!(err, "warning: contour formula unavailable: {e}");
                if recursion.is_none() {
                    let v = mf.value(&l, &areas)?;
                    let _ = writeln!(out, "{:<10} {:.15}  err {:.1e}  depth {}", "recursion", v.value, v.err_est, v.depth);
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

pub struct VerifyArgs {
    pub t: f64,
    pub a1: f64,
    pub big_n: usize,
    pub n: i64,
    pub sweeps: usize,
    pub burn_in: usize,
}

/// Run the chains, at most `threads` at a time. The samples do not depend
/// on `threads`.
pub fn run_chains(big_n: usize, t: f64, sweeps: usize, burn_in: usize, seed: u64, threads: usize) -> Result<Vec<BetaEnsembleState>, Error> {
    let streams: Vec<u64> = (0..CHAINS).collect();
    let mut results: Vec<Result<Vec<BetaEnsembleState>, Error>> = Vec::new();
    for group in streams.chunks(threads.max(1)) {
        let batch: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> =
                group.iter().map(|&c| s.spawn(move || mcmc_chain(big_n, t, sweeps, burn_in, seed, c))).collect();
            handles.into_iter().map(|h| h.join().expect("chain thread")).collect()
        });
        results.extend(batch);
    }
    let mut states = Vec::new();
    for r in results {
        states.extend(r?);
    }
    Ok(states)
}

pub fn cmd_verify(v: &VerifyArgs, seed: u64, threads: usize, out: &mut Vec<u8>, err: &mut dyn Write) -> Outcome {
    check_area(v.t)?;
    if !(v.a1 > 0.0 && v.a1 < v.t) {
        return Err(Failure::usage("--a1 must lie strictly between 0 and T"));
    }
    if v.n == 0 {
        return Err(Failure::usage("--n must be nonzero"));
    }
    if v.big_n < 2 {
        return Err(Failure::usage("-N must be at least 2"));
    }
    if v.sweeps < v.big_n || v.burn_in == 0 {
        return Err(Failure::usage("--sweeps must be at least N and --burn-in at least 1"));
    }
    let a2 = v.t - v.a1;
    let exact = match charsum_moments(&CharacterSumConfig::new(v.big_n, v.t, v.a1)?, &[(0, v.n)]) {
        Ok(c) => {
            let c = c[0];
            let _ = writeln!(out, "{:<10} {:.15}  cutoff {}  terms {}  tail {:.1e}", "charsum", c.value, c.cutoff, c.terms, c.tail_estimate);
            if c.tail_warning() {
                let _ = writeln!(err, "warning: character-sum tail estimate {:.1e}", c.tail_estimate);
            }
            Some(c.value)
        }
        Err(Error::Guard(msg)) => {
            let _ = writeln!(out, "{:<10} refused ({msg})", "charsum");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let states = run_chains(v.big_n, v.t, v.sweeps, v.burn_in, seed, threads)?;
    let (mean, se) = mcmc_moment(&states, 0, v.n, v.a1, a2)?;
    let _ = writeln!(out, "{:<10} {mean:.15} +- {se:.3e}  samples {}", "mcmc", states.len());
    let limit = SimpleField::new(v.t)?.phi(v.n, v.a1)?;
    let _ = writeln!(out, "{:<10} {limit:.15}", "phi_simple");
    match exact {
        Some(x) => {
            let z = (mean - x).abs() / se;
            let _ = writeln!(out, "{:<10} {}  ({z:.2} standard errors)", "result", if z <= 3.0 { "PASS" } else { "FAIL" });
        }
        None => {
            let _ = writeln!(out, "{:<10} n/a", "result");
        }
    }
    Ok(())
}

pub fn cmd_spectral(t: f64, a1: f64, points: usize, out: &mut Vec<u8>) -> Outcome {
    check_area(t)?;
    if points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    let _ = writeln!(out, "theta,density");
    for i in 0..points {
        let theta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / (points - 1) as f64;
        let _ = writeln!(out, "{theta:?},{:?}", spectral_density_simple(t, a1, theta)?);
    }
    Ok(())
}

pub fn cmd_planar(n: i64, t: f64, ladder: &[f64], out: &mut Vec<u8>) -> Outcome {
    if n < 1 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    if ladder.is_empty() {
        return Err(Failure::usage("--ladder is empty"));
    }
    let planar = phi_planar(n, t)?;
    let _ = writeln!(out, "T,phi_T,phi_planar,gap");
    for &big_t in ladder {
        check_area(big_t)?;
        if t > big_t {
            return Err(Failure::usage(format!("t = {t} exceeds T = {big_t}")));
        }
        let sf = SimpleField::new(big_t)?;
        let direct =
            if sf.contour_condition(n, t) < sf.quadrature_condition(n, t) { sf.contour_phi(n, t)? } else { sf.phi(n, t)? };
        let _ = writeln!(out, "{big_t:?},{direct:?},{planar:?},{:?}", sf.planar_gap(n, t)?);
    }
    Ok(())
}

pub fn cmd_duality(t: f64, points: usize, tol: f64, out: &mut Vec<u8>) -> Outcome {
    check_area(t)?;
    if points < 1 {
        return Err(Failure::usage("--points must be at least 1"));
    }
    let eq = solve_equilibrium(t)?;
    // the grid spans the range of πρ_T
    let top = std::f64::consts::PI * eq.density_local(0.0);
    let _ = writeln!(out, "theta,rho_star,residual");
    let mut worst = 0.0f64;
    for i in 1..=points {
        let theta = top * i as f64 / (points + 1) as f64;
        let r = eq.midpoint_spectral_density(theta)?;
        let residual = (std::f64::consts::PI * eq.density(std::f64::consts::PI * r) - theta).abs();
        worst = worst.max(residual);
        let _ = writeln!(out, "{theta:?},{r:?},{residual:?}");
    }
    if worst > tol {
        return Err(Failure { code: EXIT_NUMERIC, message: format!("round-trip residual {worst:e} exceeds --tol") });
    }
    Ok(())
}
