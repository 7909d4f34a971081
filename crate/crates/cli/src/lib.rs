//! Command-line front end for the `pud` engine.
//!
//! [`run`] parses arguments, dispatches one subcommand and returns what to
//! print together with the exit status, so the binary is a thin wrapper and
//! tests can drive the whole front end in-process.

pub mod config;
pub mod plot;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pud::classify::classify;
use pud::detsol::{gen_det_m, gen_det_n, DetMParams, DetNParams};
use pud::evolution::{evolve_simul, evolve_single};
use pud::families::{generate, validate_window, Family, FamilyKind, Windowed};
use pud::perturbed::{gen_perturbed, perturb_and_run, PerturbBase, PerturbSpec};
use pud::qlimit::{default_precision, verify_limit_at};
use pud::{Amplitude, Params, ParityValue, Rational, Sign, State, Termination, Trajectory};

pub use plot::emit_plot;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INDEFINITE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] pud::Error),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Parser, Debug)]
#[command(name = "pud", version, args_override_self = true, about = "Ultradiscrete Painleve II with parity variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub out: Format,
    /// Write the output here instead of standard output.
    #[arg(long = "out-path", global = true)]
    pub out_path: Option<PathBuf>,
    /// Append the segmentation to JSON output and draw it in SVG output.
    #[arg(long, global = true)]
    pub classify: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    #[arg(long = "Q", allow_hyphen_values = true)]
    pub q: Amplitude,
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Amplitude,
}

impl SystemArgs {
    fn params(&self) -> Result<Params, CliError> {
        Ok(Params::new(self.q, self.a)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct DetArgs {
    /// `N` for the first determinant family, `M` for the second.
    #[arg(long = "case", value_parser = ["N", "M"])]
    pub case: String,
    #[arg(long = "N", allow_hyphen_values = true)]
    pub n: Option<i64>,
    #[arg(long = "M", allow_hyphen_values = true)]
    pub m: Option<i64>,
    #[arg(long = "Q", allow_hyphen_values = true)]
    pub q: Amplitude,
    #[arg(long, allow_hyphen_values = true)]
    pub m0: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub k0: i64,
    #[arg(long = "C", allow_hyphen_values = true)]
    pub c: Amplitude,
    #[arg(long, allow_hyphen_values = true, default_value = "+1")]
    pub chi: Sign,
}

enum Det {
    N(DetNParams),
    M(DetMParams),
}

impl DetArgs {
    fn build(&self) -> Result<Det, CliError> {
        match self.case.as_str() {
            "N" => {
                let n = self.n.ok_or_else(|| CliError::Usage("--case N needs --N".into()))?;
                Ok(Det::N(DetNParams::new(n, self.q, self.m0, self.k0, self.c, self.chi)?))
            }
            _ => {
                let m = self.m.ok_or_else(|| CliError::Usage("--case M needs --M".into()))?;
                Ok(Det::M(DetMParams::new(m, self.q, self.m0, self.k0, self.c, self.chi)?))
            }
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the simultaneous system (or the single equation) from one state.
    Evolve {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        /// `(ζ, Z)` at `m`, e.g. `+1:29` or `-1:0-1/8E`.
        #[arg(long, allow_hyphen_values = true)]
        z: ParityValue,
        /// `(η, Y)` at `m`; with `--single`, `(ζ, Z)` at `m - 1` instead.
        #[arg(long, allow_hyphen_values = true)]
        y: ParityValue,
        #[arg(long, default_value_t = 10)]
        fwd: usize,
        #[arg(long, default_value_t = 10)]
        bwd: usize,
        /// Use the single equation; `--y` is then read as `Z[m-1]`.
        #[arg(long)]
        single: bool,
    },
    /// Evaluate one of the six families on its window.
    Generate {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true)]
        family: FamilyKind,
        #[arg(long = "m-prime", allow_hyphen_values = true)]
        m_prime: i64,
        /// Number of extra periods `K` of the windowed families.
        #[arg(long, default_value_t = 1)]
        k: i64,
        #[arg(long = "C", allow_hyphen_values = true)]
        c: Option<Amplitude>,
        #[arg(long = "D", allow_hyphen_values = true)]
        d: Option<Amplitude>,
        #[arg(long, allow_hyphen_values = true)]
        d1: Option<Amplitude>,
        #[arg(long, allow_hyphen_values = true)]
        d2: Option<Amplitude>,
        /// `c[m'-2],c[m'-1],c[m']` for `--`.
        #[arg(long = "c3", allow_hyphen_values = true, value_delimiter = ',', num_args = 3)]
        c3: Option<Vec<Amplitude>>,
        #[arg(long, allow_hyphen_values = true, default_value = "+1")]
        eta: Sign,
        #[arg(long, allow_hyphen_values = true, default_value = "+1")]
        zeta: Sign,
        /// Length of the unbounded side of `++` and `--`.
        #[arg(long, default_value_t = 10)]
        span: i64,
        /// Skip the window conditions.
        #[arg(long = "no-validate")]
        no_validate: bool,
    },
    /// Tabulate a determinant-type solution.
    Detsol {
        #[command(flatten)]
        det: DetArgs,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<i64>,
    },
    /// Perturb a determinant-type solution by ±ε and run, or tabulate the
    /// perturbed closed forms with `--closed-form`.
    Perturb {
        #[command(flatten)]
        det: DetArgs,
        /// Sign of ε.
        #[arg(long, allow_hyphen_values = true, default_value = "+1")]
        eps: Sign,
        /// A concrete `|ε|` instead of the formal infinitesimal.
        #[arg(long = "eps-size", allow_hyphen_values = true)]
        eps_size: Option<Amplitude>,
        #[arg(long, default_value_t = 20)]
        fwd: usize,
        #[arg(long, default_value_t = 10)]
        bwd: usize,
        #[arg(long = "closed-form")]
        closed_form: bool,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<i64>,
    },
    /// Segment a trajectory file into family types.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Check a trajectory file against the equations.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Check the single equation on `Z` instead of the simultaneous system.
        #[arg(long)]
        single: bool,
    },
    /// Compare a trajectory file with the numerically iterated q-system.
    VerifyQlimit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1/10,1/20,1/40")]
        eps: Vec<String>,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        /// Starting precision in bits (defaults to the environment setting or 256).
        #[arg(long)]
        precision: Option<usize>,
    },
}

/// What to print and how to exit.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Outcome {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: msg.into() }
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv = config::expand(argv.into_iter().map(Into::into).collect())?;
    Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_or_exit(argv: Vec<String>) -> Result<Cli, Outcome> {
    let argv = config::expand(argv).map_err(|e| Outcome::usage(format!("error: {e}\n")))?;
    Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            Outcome { code: 0, stdout: e.to_string(), stderr: String::new() }
        }
        _ => Outcome::usage(e.to_string()),
    })
}

fn read_trajectory(path: &PathBuf) -> Result<Trajectory, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(Trajectory::from_json(&text)?)
}

fn render(cli: &Cli, t: &Trajectory) -> String {
    let seg = cli.classify.then(|| classify(t, &t.params));
    match cli.out {
        Format::Csv => t.to_csv(),
        Format::Svg => emit_plot(t, seg.as_ref()),
        Format::Json => match seg {
            None => t.to_json() + "\n",
            Some(seg) => {
                let mut v: serde_json::Value = serde_json::from_str(&t.to_json()).expect("own json");
                v["segmentation"] = seg.to_json();
                serde_json::to_string_pretty(&v).expect("json") + "\n"
            }
        },
    }
}

fn family(cmd: &Command) -> Result<Family, CliError> {
    let Command::Generate { family, m_prime, k, c, d, d1, d2, c3, eta, zeta, .. } = cmd else { unreachable!() };
    let need = |v: &Option<Amplitude>, name: &str| {
        v.ok_or_else(|| CliError::Usage(format!("--family {family} needs --{name}")))
    };
    let (m_prime, eta, zeta) = (*m_prime, *eta, *zeta);
    Ok(match family {
        FamilyKind::PlusPlus => Family::PlusPlus { m_prime, d1: need(d1, "d1")?, d2: need(d2, "d2")?, eta, zeta },
        FamilyKind::MinusMinus => {
            let c3 = c3.as_ref().ok_or_else(|| CliError::Usage("--family -- needs --c3".into()))?;
            Family::minus_minus(m_prime, [c3[0], c3[1], c3[2]], eta, zeta)?
        }
        kind => {
            let w = Windowed { m_prime, k: *k, c: need(c, "C")?, d: need(d, "D")?, eta, zeta };
            match kind {
                FamilyKind::MinusA => Family::MinusA(w),
                FamilyKind::MinusB => Family::MinusB(w),
                FamilyKind::PlusA => Family::PlusA(w),
                _ => Family::PlusB(w),
            }
        }
    })
}

fn det_window(det: &Det) -> (i64, i64) {
    match det {
        Det::N(d) => (d.m0 - 2 * d.n - 6, d.m0 + d.n + 6),
        Det::M(d) => (d.m0 + d.m - 6, d.m0 - 2 * d.m + 6),
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    match &cli.command {
        Command::Evolve { sys, m, z, y, fwd, bwd, single } => {
            let p = sys.params()?;
            let t = if *single {
                evolve_single(&p, *m, *y, *z, *fwd, *bwd)
            } else {
                evolve_simul(&p, State { m: *m, z: *z, y: *y }, *fwd, *bwd)
            };
            out.stdout = render(cli, &t);
            for (dir, term) in [("forward", &t.forward), ("backward", &t.backward)] {
                if let Termination::Indefinite { index, var, constraint } = term {
                    out.code = EXIT_INDEFINITE;
                    out.stderr += &format!("{dir}: {var}[{index}] is not determined: {constraint:?}\n");
                }
            }
        }
        cmd @ Command::Generate { sys, span, no_validate, .. } => {
            let p = sys.params()?;
            let f = family(cmd)?;
            if !no_validate {
                validate_window(&p, &f)?;
            }
            out.stdout = render(cli, &generate(&p, &f, *span));
        }
        Command::Detsol { det, lo, hi } => {
            let det = det.build()?;
            let (dl, dh) = det_window(&det);
            let (lo, hi) = (lo.unwrap_or(dl), hi.unwrap_or(dh));
            let t = match &det {
                Det::N(d) => gen_det_n(d, lo, hi),
                Det::M(d) => gen_det_m(d, lo, hi),
            };
            out.stdout = render(cli, &t);
        }
        Command::Perturb { det, eps, eps_size, fwd, bwd, closed_form, lo, hi } => {
            let base = match det.build()? {
                Det::N(d) => PerturbBase::N(d),
                Det::M(d) => PerturbBase::M(d),
            };
            let spec = PerturbSpec { base, eps_sign: *eps, size: *eps_size };
            let t = if *closed_form {
                let (y_end, z_end) = spec.closed_form_end();
                gen_perturbed(&spec, lo.unwrap_or(spec.init_index() - 6), hi.unwrap_or(y_end.max(z_end)))?
            } else {
                let mut t = perturb_and_run(&spec, *fwd, *bwd);
                if lo.is_some() || hi.is_some() {
                    let (rl, rh) = t.range().unwrap_or((0, 0));
                    t.restrict(lo.unwrap_or(rl), hi.unwrap_or(rh));
                }
                t
            };
            out.stdout = render(cli, &t);
        }
        Command::Classify { input } => {
            let t = read_trajectory(input)?;
            let seg = classify(&t, &t.params);
            out.stdout = match cli.out {
                Format::Svg => emit_plot(&t, Some(&seg)),
                Format::Csv => {
                    let mut s = String::from("start,end,label,joined\n");
                    for g in &seg.segments {
                        s += &format!("{},{},{},{}\n", g.start, g.end, g.label, g.joined);
                    }
                    s
                }
                Format::Json => serde_json::to_string_pretty(&seg.to_json()).expect("json") + "\n",
            };
        }
        Command::Check { input, single } => {
            let t = read_trajectory(input)?;
            let v = if *single { t.single_violations() } else { t.violations() };
            out.stdout = serde_json::to_string_pretty(&serde_json::json!({ "violations": v })).expect("json") + "\n";
            if !v.is_empty() {
                out.code = EXIT_VIOLATION;
                out.stderr = format!("{} equation(s) fail\n", v.len());
            }
        }
        Command::VerifyQlimit { input, eps, steps, precision } => {
            let t = read_trajectory(input)?;
            let eps: Vec<Rational> = eps
                .iter()
                .map(|s| {
                    let a: Amplitude = s.parse()?;
                    if a.is_standard() {
                        Ok(a.re())
                    } else {
                        Err(CliError::Usage(format!("--eps {s}: expected a rational")))
                    }
                })
                .collect::<Result<_, CliError>>()?;
            let r = verify_limit_at(&t, &eps, *steps, precision.unwrap_or_else(default_precision))?;
            out.stdout = match cli.out {
                Format::Json => r.to_json() + "\n",
                Format::Csv => r.to_csv(),
                Format::Svg => return Ok(Outcome::usage("verify-qlimit has no plot; use --out json or csv\n")),
            };
            for run in &r.runs {
                out.stderr += &format!(
                    "eps {:>6}  bits {:>5}  max error {:.3e}  signs {}{}\n",
                    run.epsilon,
                    run.precision_bits,
                    run.max_error,
                    if run.signs_agree() { "agree" } else { "DIFFER" },
                    run.failure.as_deref().map(|f| format!("  stopped: {f}")).unwrap_or_default(),
                );
            }
        }
    }
    if let Some(path) = &cli.out_path {
        std::fs::write(path, &out.stdout).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        out.stdout.clear();
    }
    Ok(out)
}

/// Parse `argv` (program name first) and run it.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let cli = match parse_or_exit(argv.into_iter().map(Into::into).collect()) {
        Ok(cli) => cli,
        Err(o) => return o,
    };
    match execute(&cli) {
        Ok(o) => o,
        Err(e) => Outcome::usage(format!("error: {e}\n")),
    }
}
