//! Command-line front end for the biharmonic Dirichlet toolkit.
//!
//! Exit codes: 0 success, 1 bound violated or hypothesis gate failed,
//! 2 input error, 3 quadrature or root-finding failure.

pub mod problem;
pub mod report;
pub mod selftest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use biharm_core::bounds::{boundary_schwarz_estimate, default_schwarz_radii, grid_verify};
use biharm_core::landau::{aa_radii, landau_solve};
use biharm_core::lipschitz::modulus_estimate;
use biharm_core::quadrature::refine_until;
use biharm_core::solver::{solve_eval, solve_gradient};
use biharm_core::{
    BidegreePoly, BoundId, BoundaryFourier, Complex64, DiskRule, DiskRuleParams, LandauInput,
    Majorant, PolarGrid, ProblemSpec,
};
use clap::{Args, Parser, Subcommand};

use crate::problem::{load_problem, ProblemError};
use crate::report::{Format, GradTable, Render, RenderError, SolveRow, SolveTable};

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "BIHARM_THREADS";

/// Root tolerance for `landau` when `--tol` is absent.
pub const LANDAU_TOL: f64 = 1e-14;

/// Doublings allowed when `--tol` requests adaptive refinement.
pub const MAX_DOUBLINGS: usize = 3;

#[derive(Debug, Parser)]
#[command(
    name = "biharm",
    version,
    about = "Biharmonic Dirichlet problem on the unit disk"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format: text, csv or json.
    #[arg(long, global = true, default_value = "text")]
    pub format: Format,
    /// Worker threads for grid sweeps.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub rule: RuleArgs,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct RuleArgs {
    /// Trapezoid nodes in angle.
    #[arg(long, global = true, default_value_t = DiskRuleParams::default().angular_nodes)]
    pub angular_nodes: usize,
    /// Gauss panels covering radii in [1/2, 1].
    #[arg(long, global = true, default_value_t = DiskRuleParams::default().radial_panels)]
    pub radial_panels: usize,
    /// Gauss points per radial panel.
    #[arg(long, global = true, default_value_t = DiskRuleParams::default().panel_order)]
    pub panel_order: usize,
    /// Dyadic panels towards the centre.
    #[arg(long, global = true, default_value_t = DiskRuleParams::default().grading_levels)]
    pub grading_levels: usize,
    /// Refine the rule until successive values differ by less than this.
    /// For `landau` it is the root tolerance instead.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

impl RuleArgs {
    pub fn params(&self) -> DiskRuleParams {
        DiskRuleParams {
            angular_nodes: self.angular_nodes,
            radial_panels: self.radial_panels,
            panel_order: self.panel_order,
            grading_levels: self.grading_levels,
        }
    }
}

/// Polar grid size written `RxT` (radii by angles).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize {
    pub radial: usize,
    pub angular: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (r, t) = s
            .split_once(['x', 'X', '×'])
            .ok_or_else(|| format!("grid '{s}' is not of the form RxT"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("grid '{s}': {e}"))
        };
        let size = GridSize {
            radial: parse(r)?,
            angular: parse(t)?,
        };
        if size.radial == 0 || size.angular == 0 {
            return Err(format!("grid '{s}' must have positive sizes"));
        }
        Ok(size)
    }
}

/// A point written `re,im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub Complex64);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (re, im) = s.split_once(',').unwrap_or((s, "0"));
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("point '{s}': {e}"))
        };
        Ok(Point(Complex64::new(parse(re)?, parse(im)?)))
    }
}

/// Sample points: explicit `--at` values, or a polar grid.
#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// Evaluation point `re,im`; may be repeated.
    #[arg(long = "at", allow_hyphen_values = true)]
    pub at: Vec<Point>,
    /// Grid used when no `--at` is given.
    #[arg(long, default_value = "20x48")]
    pub grid: GridSize,
    #[arg(long, default_value_t = 0.95)]
    pub r_max: f64,
}

impl PointArgs {
    fn points(&self) -> Result<Vec<Complex64>, CliError> {
        if self.at.is_empty() {
            Ok(grid(self.grid, self.r_max)?.points())
        } else {
            Ok(self.at.iter().map(|p| p.0).collect())
        }
    }
}

fn grid(size: GridSize, r_max: f64) -> Result<PolarGrid, CliError> {
    if !(0.0..1.0).contains(&r_max) {
        return Err(CliError::Usage(format!(
            "--r-max must lie in [0, 1), got {r_max}"
        )));
    }
    Ok(PolarGrid::new(size.radial, size.angular, r_max))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the solution.
    Solve {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        points: PointArgs,
    },
    /// Evaluate the Wirtinger derivatives of the solution.
    Grad {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        points: PointArgs,
    },
    /// Check the kernels against closed forms.
    KernelsSelftest,
    /// Sweep one inequality over a polar grid.
    CheckBounds {
        #[arg(long)]
        bound: BoundId,
        /// Problem file; not needed for green-mass and grad-green-mass.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value = "20x48")]
        grid: GridSize,
        #[arg(long, default_value_t = 0.95)]
        r_max: f64,
    },
    /// Estimate the boundary Schwarz quotient along a ray.
    BoundarySchwarz {
        #[arg(long)]
        spec: PathBuf,
        /// Boundary angle in radians.
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        /// Comma-separated radii; defaults to 1 - 2^-k for k = 4..16.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Univalence radius from harmonic-part bounds.
    Landau {
        #[arg(long, required_unless_present = "aa")]
        m1: Option<f64>,
        #[arg(long, required_unless_present = "aa")]
        m2: Option<f64>,
        #[arg(long, required_unless_present = "aa")]
        m3: Option<f64>,
        /// Print the comparison radii instead.
        #[arg(long, conflicts_with_all = ["m1", "m2", "m3"], requires = "m")]
        aa: bool,
        #[arg(long, requires = "aa")]
        m: Option<f64>,
    },
    /// Estimate the ω-Lipschitz modulus of the solution.
    Lipschitz {
        #[arg(long)]
        spec: PathBuf,
        /// `linear:a`, `arctan` or `table:FILE`.
        #[arg(long, default_value = "linear:1")]
        majorant: String,
        #[arg(long, default_value_t = 2000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] biharm_core::Error),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use biharm_core::Error as E;
        match self {
            CliError::Core(E::Hypothesis { .. }) => 1,
            CliError::Core(E::NonConvergence { .. } | E::Bracket(_) | E::NonFinite { .. }) => 3,
            CliError::Core(_) | CliError::Problem(_) | CliError::Usage(_) => 2,
            CliError::Render(_) | CliError::Io(_) => 2,
        }
    }
}

/// Rendered output together with the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

impl Outcome {
    fn new(output: String, ok: bool) -> Self {
        Outcome {
            output,
            code: if ok { 0 } else { 1 },
        }
    }
}

fn load(path: &Path) -> Result<ProblemSpec, CliError> {
    Ok(load_problem(path)?)
}

/// Parses `linear:a`, `arctan` or `table:FILE`.
pub fn parse_majorant(text: &str) -> Result<Majorant, CliError> {
    let (kind, arg) = text.split_once(':').unwrap_or((text, ""));
    match kind.trim() {
        "linear" => {
            let a = if arg.is_empty() {
                1.0
            } else {
                arg.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("majorant '{text}': {e}")))?
            };
            Ok(Majorant::Linear { a })
        }
        "arctan" if arg.is_empty() => Ok(Majorant::Arctan),
        "table" if !arg.is_empty() => read_table(Path::new(arg)),
        _ => Err(CliError::Usage(format!(
            "majorant '{text}' is not one of linear:a, arctan, table:FILE"
        ))),
    }
}

/// Reads a two-column table `t value`, separated by whitespace or commas.
fn read_table(path: &Path) -> Result<Majorant, CliError> {
    let text = fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split([',', ' ', '\t'])
            .filter(|f| !f.is_empty())
            .collect();
        let bad = || CliError::Usage(format!("{}:{}: expected 't value'", path.display(), i + 1));
        if fields.len() != 2 {
            return Err(bad());
        }
        ts.push(fields[0].parse::<f64>().map_err(|_| bad())?);
        values.push(fields[1].parse::<f64>().map_err(|_| bad())?);
    }
    Ok(Majorant::Table { ts, values })
}

/// Problem with no data, used by bounds that only involve the kernels.
fn empty_spec() -> ProblemSpec {
    ProblemSpec::new(
        BoundaryFourier::zero(),
        BoundaryFourier::zero(),
        BidegreePoly::zero(),
    )
}

/// Runs one parsed command and renders its result.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let format = cli.global.format;
    let rule_args = cli.global.rule;
    let rule = DiskRule::new(rule_args.params())?;
    if let Some(tol) = rule_args.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {tol}"
            )));
        }
    }

    match &cli.command {
        Command::Solve { spec, points } => {
            let spec = load(spec)?;
            let pts = points.points()?;
            let rows = pts
                .iter()
                .map(|&z| {
                    let (f, est_error) = match rule_args.tol {
                        Some(tol) => {
                            let r = refine_until(
                                rule.clone(),
                                |r| solve_eval(&spec, z, r),
                                tol,
                                MAX_DOUBLINGS,
                            )?;
                            (r.value, Some(r.est_error))
                        }
                        None => (solve_eval(&spec, z, &rule)?, None),
                    };
                    Ok(SolveRow {
                        z_re: z.re,
                        z_im: z.im,
                        f_re: f.re,
                        f_im: f.im,
                        est_error,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Outcome::new(SolveTable { rows }.render(format)?, true))
        }
        Command::Grad { spec, points } => {
            let spec = load(spec)?;
            let pts = points.points()?;
            let rows = pts
                .iter()
                .map(|&z| {
                    let g = match rule_args.tol {
                        Some(tol) => {
                            let r = refine_until(
                                rule.clone(),
                                |r| solve_gradient(&spec, z, r).map(|g| g.f_z),
                                tol,
                                MAX_DOUBLINGS,
                            )?;
                            solve_gradient(&spec, z, &r.rule)?
                        }
                        None => solve_gradient(&spec, z, &rule)?,
                    };
                    Ok((z, g))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Outcome::new(GradTable { rows }.render(format)?, true))
        }
        Command::KernelsSelftest => {
            let table = selftest::run(&rule)?;
            let ok = table.all_pass();
            Ok(Outcome::new(table.render(format)?, ok))
        }
        Command::CheckBounds {
            bound,
            spec,
            grid: size,
            r_max,
        } => {
            let kernel_only = matches!(bound, BoundId::GreenMass | BoundId::GradGreenMass);
            let spec = match spec {
                Some(path) => load(path)?,
                None if kernel_only => empty_spec(),
                None => {
                    return Err(CliError::Usage(format!(
                        "--spec is required for bound {bound}"
                    )))
                }
            };
            if *bound == BoundId::BoundarySchwarz {
                return Err(CliError::Usage(
                    "use the boundary-schwarz subcommand for this bound".into(),
                ));
            }
            let grid = grid(*size, *r_max)?;
            let report = grid_verify(*bound, &spec, &grid, &rule)?;
            let ok = !report.violated;
            Ok(Outcome::new(report.render(format)?, ok))
        }
        Command::BoundarySchwarz { spec, eta, radii } => {
            let spec = load(spec)?;
            let radii = radii.clone().unwrap_or_else(default_schwarz_radii);
            let est =
                boundary_schwarz_estimate(&spec, Complex64::from_polar(1.0, *eta), &radii, &rule)?;
            let ok = est.pass;
            Ok(Outcome::new(est.render(format)?, ok))
        }
        Command::Landau { m1, m2, m3, aa, m } => {
            if *aa {
                let m = m.ok_or_else(|| CliError::Usage("--aa needs --m".into()))?;
                let radii = aa_radii(m)?;
                return Ok(Outcome::new(radii.render(format)?, true));
            }
            let (Some(m1), Some(m2), Some(m3)) = (*m1, *m2, *m3) else {
                return Err(CliError::Usage("landau needs --m1, --m2 and --m3".into()));
            };
            let input = LandauInput::new(m1, m2, m3)?;
            let result = landau_solve(&input, rule_args.tol.unwrap_or(LANDAU_TOL))?;
            Ok(Outcome::new(result.render(format)?, true))
        }
        Command::Lipschitz {
            spec,
            majorant,
            pairs,
            seed,
        } => {
            let majorant = parse_majorant(majorant)?;
            let spec = load(spec)?;
            let report = modulus_estimate(&spec, &majorant, *pairs, *seed, &rule)?;
            let ok = report.pass;
            Ok(Outcome::new(report.render(format)?, ok))
        }
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else {
        return Ok(());
    };
    if n == 0 {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

/// Parses arguments, runs the command, prints output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads(cli.global.threads).and_then(|()| execute(&cli));
    match result {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(outcome.output.as_bytes())
                .and_then(|()| out.flush())
                .is_err()
            {
                return 2;
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("biharm: {e}");
            e.exit_code()
        }
    }
}
