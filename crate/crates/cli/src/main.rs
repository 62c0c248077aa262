//! Experiment driver: emits CSV tables and JSON audit reports.

mod commands;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cfsgeom::Tolerances;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cfsgeom", version, about = "Spin geometry experiments on causal fermion systems")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by all subcommands; each command reads the ones it needs.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Mass parameter(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub mass: Vec<f64>,
    /// Regularization length(s), comma separated; 0 selects the unregularized kernel.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Log-spaced grid `start:end:count`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Step counts, comma separated.
    #[arg(long = "N", global = true, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file; standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "tol-real", global = true)]
    pub tol_real: Option<f64>,
    #[arg(long = "tol-rank", global = true)]
    pub tol_rank: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Connection phases phi and kappa against m sqrt(xi^2).
    PhasePlot,
    /// Im(alpha conj(beta)) of the vacuum kernel against z = m sqrt(xi^2).
    BesselCheck,
    /// Deviation of the composed transport from the identity for several step counts.
    Convergence(ConvergenceArgs),
    /// Causal axioms, symmetry flags and pair classification of a point set.
    AuditSystem(AuditArgs),
    /// Eigenvalues nu_12 and nu_34 of the regularized fermion matrix.
    NuTable,
    /// Curvature correction along a sampled curvature field.
    CurvedCorrection(CurvedArgs),
}

#[derive(Args, Debug)]
pub struct ConvergenceArgs {
    /// Proper length of the straight segment; defaults to 1/m.
    #[arg(long)]
    pub length: Option<f64>,
    /// Direction of the segment `t,x,y,z`, rescaled to unit proper speed.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.6, 0.0, 0.0])]
    pub velocity: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Backend::Analytic)]
    pub backend: Backend,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Analytic,
    Generic,
    Spliced,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// System file with fields `f`, `points` (row-major `[re, im]` entries) and `weights`.
    #[arg(long, conflicts_with_all = ["minkowski", "f"])]
    pub system: Option<PathBuf>,
    /// Audit random Minkowski events instead of an ambient system.
    #[arg(long)]
    pub minkowski: bool,
    /// Dimension of the random ambient system.
    #[arg(long)]
    pub f: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
}

#[derive(Args, Debug)]
pub struct CurvedArgs {
    /// Sampled curvature field (JSON).
    #[arg(long)]
    pub field: PathBuf,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numeric(String),
    Io(io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<cfsgeom::Error> for Failure {
    fn from(e: cfsgeom::Error) -> Self {
        match e {
            cfsgeom::Error::OutOfDomain(_) | cfsgeom::Error::NotAdmissible(_) => Failure::Validation(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Common {
    pub fn tolerances(&self) -> Result<Tolerances, Failure> {
        let mut tol = Tolerances::default();
        for (name, v) in [("tol-real", self.tol_real), ("tol-rank", self.tol_rank)] {
            if let Some(t) = v {
                if !(t > 0.0 && t < 1.0) {
                    return Err(Failure::Validation(format!("--{name} must lie in (0, 1), got {t}")));
                }
            }
        }
        if let Some(t) = self.tol_real {
            tol = tol.with_real(t);
        }
        if let Some(t) = self.tol_rank {
            tol = tol.with_rank(t);
        }
        Ok(tol)
    }

    /// Masses, or `default` if none given; all must be positive.
    pub fn masses(&self, default: &[f64]) -> Result<Vec<f64>, Failure> {
        let m = if self.mass.is_empty() { default.to_vec() } else { self.mass.clone() };
        if let Some(bad) = m.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            return Err(Failure::Validation(format!("mass must be positive, got {bad}")));
        }
        Ok(m)
    }

    pub fn single_mass(&self) -> Result<f64, Failure> {
        match self.masses(&[1.0])?.as_slice() {
            [m] => Ok(*m),
            _ => Err(Failure::Validation("this command takes a single --mass".into())),
        }
    }

    pub fn eps_list(&self, default: &[f64]) -> Result<Vec<f64>, Failure> {
        let e = if self.eps.is_empty() { default.to_vec() } else { self.eps.clone() };
        if let Some(bad) = e.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Failure::Validation(format!("eps must be nonnegative, got {bad}")));
        }
        Ok(e)
    }

    pub fn steps(&self, default: &[usize]) -> Result<Vec<usize>, Failure> {
        let n = if self.n.is_empty() { default.to_vec() } else { self.n.clone() };
        if n.contains(&0) {
            return Err(Failure::Validation("step counts must be at least 1".into()));
        }
        Ok(n)
    }

    pub fn grid(&self, default: &str) -> Result<Vec<f64>, Failure> {
        parse_grid(self.grid.as_deref().unwrap_or(default))
    }

    pub fn writer(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

/// `start:end:count`, log-spaced and including both ends.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Validation(format!("grid must be start:end:count with 0 < start <= end, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, count] = parts.as_slice() else { return Err(bad()) };
    let (start, end): (f64, f64) = (start.trim().parse().map_err(|_| bad())?, end.trim().parse().map_err(|_| bad())?);
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if !(start > 0.0 && end >= start && end.is_finite()) {
        return Err(bad());
    }
    Ok(match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n).map(|i| (start.ln() + (end.ln() - start.ln()) * i as f64 / (n - 1) as f64).exp()).collect(),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    c.tolerances()?;
    match cli.command {
        Command::PhasePlot => commands::phase_plot(c),
        Command::BesselCheck => commands::bessel_check(c),
        Command::Convergence(a) => commands::convergence(c, &a),
        Command::AuditSystem(a) => commands::audit_system(c, &a),
        Command::NuTable => commands::nu_table(c),
        Command::CurvedCorrection(a) => commands::curved_correction(c, &a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cfsgeom: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
