//! Command-line front end: parses a run configuration, executes the matching
//! verification suites and writes a JSON or CSV report.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for bad input
//! or an unwritable report path.

pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use qjc::qcalculus::{QuadratureSettings, XiChoice};
use qjc::qnumbers::QKind;

use report::{emit_report, Format, Report};
use suites::{Ctx, Part, QValue};

pub const OUTPUT_DIR_VAR: &str = "QJC_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "qjc", version, about = "Verification suites for the q-deformed Jaynes-Cummings model")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Comma-separated deformation values; `symbolic` keeps q as a formal symbol.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_q, default_value = "0.5")]
    pub q: Vec<QValue>,
    /// Boson cutoff.
    #[arg(long, global = true, default_value_t = 40)]
    pub nb: usize,
    /// Fermion cutoff.
    #[arg(long, global = true, default_value_t = 6)]
    pub mf: usize,
    /// Override every suite tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Tighten all tolerances 100x.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long, global = true, default_value_t = 256)]
    pub lattice_depth: usize,
    /// Upper limit of the Euler integrals: `auto` or a number.
    #[arg(long, global = true, value_parser = parse_xi, default_value = "auto")]
    pub xi: XiChoice,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report path. Defaults to `$QJC_OUTPUT_DIR/<command>.<format>` when that variable is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Boson,
    Fermion,
}

impl From<KindArg> for QKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Boson => QKind::Boson,
            KindArg::Fermion => QKind::Fermion,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate a q-integer.
    Qnum {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: u32,
    },
    /// Lattice moments of the q-exponential against q-factorials.
    Euler {
        /// Restrict to one kind; both by default.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
    },
    /// Deformed commutation relations on the truncated space.
    FockVerify,
    /// Normal-order an operator expression.
    Rewrite { expr: String },
    /// Coherent-state overlaps against the closed form.
    ScsOverlap {
        /// Single pair instead of the default 5x5 grid (complex, e.g. `0.3+0.1i`).
        #[arg(long, requires = "z2")]
        z1: Option<Complex64>,
        #[arg(long, requires = "z1")]
        z2: Option<Complex64>,
        #[arg(long, default_value = "0.05+0.02i")]
        psi1: Complex64,
        #[arg(long, default_value = "-0.03+0.06i")]
        psi2: Complex64,
    },
    /// Resolution of the identity by coherent states.
    Complete,
    /// Direct against phase-space trace of H.
    JcTrace {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Spectrum of H with scalar coupling.
    JcSpectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Compare with the undeformed model (needs `--mf 2`).
        #[arg(long)]
        classical: bool,
    },
    /// Every suite at its fixed cutoffs.
    All,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 0.5)]
    pub omega1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub omega2: f64,
    #[arg(long, default_value = "0.1")]
    pub g: Complex64,
}

fn parse_q(s: &str) -> Result<QValue, String> {
    let s = s.trim();
    if s == "symbolic" {
        return Ok(QValue::Symbolic);
    }
    let q: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(q > 0.0 && q.is_finite()) {
        return Err(format!("q must be positive and finite, got {s}"));
    }
    Ok(QValue::Num(q))
}

fn parse_xi(s: &str) -> Result<XiChoice, String> {
    if s == "auto" {
        return Ok(XiChoice::Auto);
    }
    let xi: f64 = s.parse().map_err(|_| format!("expected `auto` or a number, got {s}"))?;
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(format!("xi must be positive, got {s}"));
    }
    Ok(XiChoice::Fixed(xi))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Qnum { .. } => "qnum",
            Command::Euler { .. } => "euler",
            Command::FockVerify => "fock-verify",
            Command::Rewrite { .. } => "rewrite",
            Command::ScsOverlap { .. } => "scs-overlap",
            Command::Complete => "complete",
            Command::JcTrace { .. } => "jc-trace",
            Command::JcSpectrum { .. } => "jc-spectrum",
            Command::All => "all",
        }
    }

    fn config(&self) -> Vec<(String, String)> {
        let mut v: Vec<(&str, String)> = Vec::new();
        match self {
            Command::Qnum { kind, n } => {
                v.push(("kind", QKind::from(*kind).label().into()));
                v.push(("n", n.to_string()));
            }
            Command::Euler { kind, n_max } => {
                v.push(("kind", kind.map_or("both".into(), |k| QKind::from(k).label().to_string())));
                v.push(("n_max", n_max.to_string()));
            }
            Command::Rewrite { expr } => v.push(("expr", expr.clone())),
            Command::ScsOverlap { z1, z2, psi1, psi2 } => {
                v.push(("z1", z1.map_or("grid".into(), |z| z.to_string())));
                v.push(("z2", z2.map_or("grid".into(), |z| z.to_string())));
                v.push(("psi1", psi1.to_string()));
                v.push(("psi2", psi2.to_string()));
            }
            Command::JcTrace { model } => model.echo(&mut v),
            Command::JcSpectrum { model, classical } => {
                model.echo(&mut v);
                v.push(("classical", classical.to_string()));
            }
            Command::FockVerify | Command::Complete | Command::All => {}
        }
        v.into_iter().map(|(k, s)| (k.to_string(), s)).collect()
    }
}

impl ModelArgs {
    fn echo(&self, v: &mut Vec<(&str, String)>) {
        v.push(("omega1", self.omega1.to_string()));
        v.push(("omega2", self.omega2.to_string()));
        v.push(("g", self.g.to_string()));
    }
}

/// Parsed configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub ctx: Ctx,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, String> {
        let g = cli.global;
        if g.q.is_empty() {
            return Err("--q needs at least one value".into());
        }
        if g.nb == 0 || g.mf == 0 {
            return Err("--nb and --mf must be at least 1".into());
        }
        if let Some(t) = g.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--tol must be positive, got {t}"));
            }
        }
        if g.lattice_depth == 0 {
            return Err("--lattice-depth must be at least 1".into());
        }
        Ok(Self {
            command: cli.command,
            ctx: Ctx {
                qs: g.q,
                nb: g.nb,
                mf: g.mf,
                tol: g.tol,
                strict: g.strict,
                quad: QuadratureSettings {
                    lattice_depth: g.lattice_depth,
                    xi: g.xi,
                },
            },
            format: g.format,
            out: g.out,
        })
    }

    /// Ordered echo of the configuration. The output path is left out so that
    /// reports written to different places compare equal.
    pub fn echo(&self) -> Vec<(String, String)> {
        let c = &self.ctx;
        let qs: Vec<String> = c.qs.iter().map(QValue::label).collect();
        let mut v = vec![
            ("command".to_string(), self.command.name().to_string()),
            ("q".into(), qs.join(",")),
            ("nb".into(), c.nb.to_string()),
            ("mf".into(), c.mf.to_string()),
            ("tol".into(), c.tol.map_or("default".into(), |t| t.to_string())),
            ("strict".into(), c.strict.to_string()),
            ("lattice_depth".into(), c.quad.lattice_depth.to_string()),
            (
                "xi".into(),
                match c.quad.xi {
                    XiChoice::Auto => "auto".into(),
                    XiChoice::Fixed(x) => x.to_string(),
                },
            ),
            ("format".into(), self.format.label().into()),
        ];
        v.extend(self.command.config());
        v
    }

    fn destination(&self, output_dir: Option<&Path>) -> Option<PathBuf> {
        self.out.clone().or_else(|| {
            output_dir.map(|d| d.join(format!("{}.{}", self.command.name(), self.format.extension())))
        })
    }
}

/// Run every suite, as `all` does.
pub fn run_all(ctx: &Ctx) -> Result<Part, String> {
    let mut part = Part::default();
    let overlap_pairs: Vec<(Complex64, Complex64)> = {
        let g = suites::overlap_grid();
        g.iter().flat_map(|a| g.iter().map(move |b| (*a, *b))).collect()
    };
    part.extend(suites::qnum_suite(ctx)?);
    part.extend(suites::fock(ctx, 8, 6)?);
    part.extend(suites::derivations(ctx)?);
    part.extend(suites::euler(ctx, &[QKind::Boson, QKind::Fermion], 8)?);
    part.extend(suites::overlap(
        ctx,
        40,
        6,
        &overlap_pairs,
        Complex64::new(0.05, 0.02),
        Complex64::new(-0.03, 0.06),
    )?);
    part.extend(suites::complete(ctx, 6, 4)?);
    part.extend(suites::hamiltonian_suite(ctx)?);
    part.extend(suites::classical_suite(ctx)?);
    Ok(part)
}

pub fn execute(cfg: &RunConfig) -> Result<Part, String> {
    let ctx = &cfg.ctx;
    match &cfg.command {
        Command::Qnum { kind, n } => suites::qnum(ctx, (*kind).into(), *n),
        Command::Euler { kind, n_max } => {
            let kinds: Vec<QKind> = match kind {
                Some(k) => vec![(*k).into()],
                None => vec![QKind::Boson, QKind::Fermion],
            };
            suites::euler(ctx, &kinds, *n_max)
        }
        Command::FockVerify => suites::fock(ctx, ctx.nb, ctx.mf),
        Command::Rewrite { expr } => suites::rewrite(ctx, expr),
        Command::ScsOverlap { z1, z2, psi1, psi2 } => {
            let pairs = match (z1, z2) {
                (Some(a), Some(b)) => vec![(*a, *b)],
                _ => {
                    let g = suites::overlap_grid();
                    g.iter().flat_map(|a| g.iter().map(move |b| (*a, *b))).collect()
                }
            };
            suites::overlap(ctx, ctx.nb, ctx.mf, &pairs, *psi1, *psi2)
        }
        Command::Complete => suites::complete(ctx, ctx.nb, ctx.mf),
        Command::JcTrace { model } => suites::jc_trace(ctx, ctx.nb, ctx.mf, model.omega1, model.omega2, model.g),
        Command::JcSpectrum { model, classical } => {
            suites::jc_spectrum(ctx, ctx.nb, ctx.mf, model.omega1, model.omega2, model.g, *classical)
        }
        Command::All => run_all(ctx),
    }
}

/// Entry point used by the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let dir = std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from);
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, dir.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}

/// Same as [`run`] with the output directory and streams made explicit.
pub fn run_with<I, T>(args: I, output_dir: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let part = match execute(&cfg) {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let report = Report {
        command: cfg.command.name().to_string(),
        config: cfg.echo(),
        sections: part.sections,
        checks: part.checks,
    };
    for line in &part.lines {
        let _ = writeln!(out, "{line}");
    }
    if let Some(path) = cfg.destination(output_dir) {
        if let Err(e) = emit_report(&report, cfg.format, &path) {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    }
    if report.passed() {
        0
    } else {
        for c in report.failures() {
            let _ = writeln!(
                err,
                "FAIL [{}] {}: {} (value {:e}, tol {:e})",
                c.suite, c.name, c.relation, c.value, c.tol
            );
        }
        1
    }
}
