mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{num, Config};
use elastrf_core::covariance::{kernel, validate_f, CovarianceError};
use elastrf_core::estimate::{mc_estimate, EstimateError};
use elastrf_core::groups::{orbit_strata, GroupId};
use elastrf_core::rep::{fixed_point_basis, host_basis, isotypic_decomposition, BasisSet};
use elastrf_core::simulate::{sample_realization, SimulateError, SimulationPlan};
use elastrf_core::Vec3;
use std::fmt::Write as _;
use std::process::ExitCode;
use thiserror::Error;

/// Gaussian random fields of elasticity tensors.
#[derive(Parser)]
#[command(name = "elastrf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group metadata: class, order, host dimension, irreps, strata.
    Groups {
        #[arg(long)]
        group: Option<GroupId>,
        #[arg(long)]
        out: Option<String>,
    },
    /// A basis of the group as CSV, one row per tensor.
    Basis {
        #[arg(long)]
        group: GroupId,
        #[arg(long, value_enum, default_value_t = BasisKind::Fixed)]
        kind: BasisKind,
        #[arg(long)]
        out: Option<String>,
    },
    /// Checks every density of a field file.
    Validate(Common),
    /// Two-point correlation tensors at pairs of points, as CSV.
    Kernel(Common),
    /// One realization on a grid.
    Simulate(Common),
    /// Monte Carlo estimates against the analytic values, gated at |z| <= 5.
    Estimate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisKind {
    /// Fixed points of the group.
    Fixed,
    /// The space the field takes values in.
    Host,
    /// Host basis adapted to the isotypic decomposition.
    Isotypic,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Bin,
}

#[derive(Args)]
struct Common {
    /// Field configuration file.
    #[arg(long)]
    spec: String,
    /// Must agree with the group of the field file.
    #[arg(long)]
    group: Option<GroupId>,
    /// Point file or `lattice:nx,ny,nz,h`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lmax: Option<usize>,
    /// Realizations.
    #[arg(long)]
    n: Option<usize>,
    /// File of pairs, one `x y z x' y' z'` per line.
    #[arg(long)]
    pairs: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Print the parsed configuration with the command-line overrides and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<CovarianceError> for CliError {
    fn from(e: CovarianceError) -> Self {
        match e {
            CovarianceError::InvalidDensity { .. } | CovarianceError::Weight { .. } | CovarianceError::Stratum { .. } => {
                CliError::Failed(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SimulateError> for CliError {
    fn from(e: SimulateError) -> Self {
        match e {
            SimulateError::Spec(c) => c.into(),
            SimulateError::EmptyGrid => CliError::Config(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::Simulate(s) => s.into(),
            EstimateError::TooFew(_) => CliError::Config(e.to_string()),
        }
    }
}

fn emit(out: &Option<String>, bytes: &[u8]) -> Result<(), CliError> {
    use std::io::Write;
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Config(format!("{p}: {e}"))),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Config(e.to_string())),
    }
}

/// The field file with command-line overrides applied to its plan.
fn load(c: &Common) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(&c.spec).map_err(|e| CliError::Config(format!("{}: {e}", c.spec)))?;
    let mut cfg = config::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", c.spec)))?;
    if let Some(g) = c.group {
        if g != cfg.spec.group {
            return Err(CliError::Config(format!("--group {g} disagrees with {} in {}", cfg.spec.group, c.spec)));
        }
    }
    let p = &mut cfg.plan;
    p.seed = c.seed.or(p.seed);
    p.l_max = c.lmax.or(p.l_max);
    p.n = c.n.or(p.n);
    if c.grid.is_some() {
        p.grid.clone_from(&c.grid);
    }
    if let Some(f) = &c.pairs {
        p.pairs = output::parse_pairs(f).map_err(CliError::Config)?;
    }
    Ok(cfg)
}

fn plan(cfg: &Config, points: Vec<Vec3>) -> SimulationPlan {
    let mut p = SimulationPlan::new(points, cfg.plan.seed.unwrap_or(0));
    if let Some(l) = cfg.plan.l_max {
        p.l_max = l;
    }
    p.tolerance = cfg.plan.tolerance;
    p
}

fn pairs(cfg: &Config) -> Result<&[(Vec3, Vec3)], CliError> {
    if cfg.plan.pairs.is_empty() {
        return Err(CliError::Config("no pairs: give --pairs or `pair` lines in [plan]".into()));
    }
    Ok(&cfg.plan.pairs)
}

fn groups(group: Option<GroupId>) -> String {
    let mut s = String::new();
    let list = group.map_or(GroupId::ALL.to_vec(), |g| vec![g]);
    for k in list {
        writeln!(s, "[{k}]").unwrap();
        writeln!(s, "group {}", k.group_name()).unwrap();
        writeln!(s, "class {}", k.class().name()).unwrap();
        writeln!(s, "order {}", k.order().map_or("infinite".to_string(), |o| o.to_string())).unwrap();
        writeln!(s, "host_dim {}", k.host_dim()).unwrap();
        writeln!(s, "fixed_dim {}", k.trivial_multiplicity()).unwrap();
        let irreps: Vec<String> = k.irreps().iter().map(|r| format!("{}x{}(dim {})", r.multiplicity, r.label, r.dim)).collect();
        writeln!(s, "irreps {}", irreps.join(" + ")).unwrap();
        for st in orbit_strata(k) {
            writeln!(s, "stratum {} {} | isotropy {} ({})", st.index, st.chart, st.isotropy.schoenflies(), st.isotropy.table_label).unwrap();
        }
        s.push('\n');
    }
    s
}

fn basis_csv(b: &BasisSet) -> String {
    let mut s = String::from("index,irrep,copy,row");
    for c in output::component_names() {
        write!(s, ",c{c}").unwrap();
    }
    s.push('\n');
    for (n, (v, l)) in b.vectors.iter().zip(&b.labels).enumerate() {
        write!(s, "{n},{},{},{}", l.irrep, l.copy, l.row).unwrap();
        for x in v.to_elas().components() {
            write!(s, ",{}", num(*x)).unwrap();
        }
        s.push('\n');
    }
    s
}

/// The check table, and the violations if any.
fn validate(cfg: &Config) -> Result<(String, Vec<String>), CliError> {
    let spec = &cfg.spec;
    let mut s = String::from("atom,stratum,check,defect,tolerance,status\n");
    let mut bad = Vec::new();
    for (n, a) in spec.atoms.iter().enumerate() {
        if !(a.weight.is_finite() && a.weight >= 0.0) {
            bad.push(format!("atom {n}: weight {} is negative or not finite", a.weight));
        }
        let r = validate_f(spec.group, &a.p, &a.f)?;
        if let Some(st) = a.stratum.filter(|&st| st != r.stratum) {
            bad.push(format!("atom {n}: declared stratum {st}, the point lies in stratum {}", r.stratum));
        }
        for c in &r.checks {
            let ok = c.passed();
            writeln!(s, "{n},{},{},{},{},{}", r.stratum, c.name, num(c.defect), num(c.tol), if ok { "ok" } else { "FAIL" }).unwrap();
            if !ok {
                bad.push(format!("atom {n}: violates {} (defect {:.3e})", c.name, c.defect));
            }
        }
    }
    match spec.validate() {
        Ok(_) => Ok((s, bad)),
        Err(CovarianceError::InvalidDensity { .. } | CovarianceError::Weight { .. } | CovarianceError::Stratum { .. }) => Ok((s, bad)),
        Err(e) => Err(e.into()),
    }
}

fn kernel_csv(cfg: &Config) -> Result<String, CliError> {
    let mut s = String::from("pair,row,col,value\n");
    for (n, (x, y)) in pairs(cfg)?.iter().enumerate() {
        let k = kernel(&cfg.spec, x, y)?;
        for i in 0..k.nrows() {
            for j in 0..k.ncols() {
                writeln!(s, "{n},{i},{j},{}", num(k[(i, j)])).unwrap();
            }
        }
    }
    Ok(s)
}

fn simulate(cfg: &Config, c: &Common) -> Result<(), CliError> {
    let grid = cfg.plan.grid.as_deref().ok_or_else(|| CliError::Config("no grid: give --grid or `grid` in [plan]".into()))?;
    let points = output::parse_grid(grid).map_err(CliError::Config)?;
    let p = plan(cfg, points);
    let field = sample_realization(&cfg.spec, &p, 0)?;
    match c.format.unwrap_or(if c.out.is_some() { Format::Bin } else { Format::Csv }) {
        Format::Csv => emit(&c.out, output::realization_csv(&field, &p.points).as_bytes()),
        Format::Bin => {
            let out = c.out.as_ref().ok_or_else(|| CliError::Config("binary output needs --out".into()))?;
            emit(&c.out, &output::realization_bytes(&field))?;
            emit(&Some(format!("{out}.json")), output::sidecar(&field, cfg.spec.group, grid).as_bytes())
        }
    }
}

fn estimate(cfg: &Config) -> Result<(String, bool, String), CliError> {
    let n = cfg.plan.n.unwrap_or(2000);
    let r = mc_estimate(&cfg.spec, &plan(cfg, vec![]), n, pairs(cfg)?)?;
    let mut s = String::from("kind,pair,row,col,estimate,stderr,expected,z\n");
    for i in 0..r.mean.len() {
        writeln!(s, "mean,,{i},,{},{},{},{}", num(r.mean[i]), num(r.mean_stderr[i]), num(r.mean_expected[i]), num(r.mean_z[i])).unwrap();
    }
    for (k, p) in r.pairs.iter().enumerate() {
        for i in 0..p.estimate.nrows() {
            for j in 0..p.estimate.ncols() {
                writeln!(
                    s,
                    "cov,{k},{i},{j},{},{},{},{}",
                    num(p.estimate[(i, j)]),
                    num(p.stderr[(i, j)]),
                    num(p.expected[(i, j)]),
                    num(p.z[(i, j)])
                )
                .unwrap();
            }
        }
    }
    let pass = r.passes(5.0);
    let summary = format!(
        "{n} realizations, z_max {:.3} (mean {:.3}, covariance {:.3}), {} entries above 4: {}",
        r.z_max,
        r.mean_z_max,
        r.cov_z_max,
        r.flagged.len(),
        if pass { "pass" } else { "FAIL" }
    );
    Ok((s, pass, summary))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Groups { group, out } => emit(&out, groups(group).as_bytes()),
        Command::Basis { group, kind, out } => {
            let b = match kind {
                BasisKind::Fixed => fixed_point_basis(&group.spec()),
                BasisKind::Host => host_basis(group),
                BasisKind::Isotypic => isotypic_decomposition(group).map_err(|e| CliError::Config(e.to_string()))?.1,
            };
            emit(&out, basis_csv(&b).as_bytes())
        }
        Command::Validate(c) | Command::Kernel(c) | Command::Simulate(c) | Command::Estimate(c) if c.dump_config => {
            let cfg = load(&c)?;
            emit(&c.out, config::dump(&cfg).as_bytes())
        }
        Command::Validate(c) => {
            let cfg = load(&c)?;
            let (s, bad) = validate(&cfg)?;
            emit(&c.out, s.as_bytes())?;
            if bad.is_empty() {
                Ok(())
            } else {
                Err(CliError::Failed(bad.join("\n")))
            }
        }
        Command::Kernel(c) => {
            let cfg = load(&c)?;
            emit(&c.out, kernel_csv(&cfg)?.as_bytes())
        }
        Command::Simulate(c) => simulate(&load(&c)?, &c),
        Command::Estimate(c) => {
            let cfg = load(&c)?;
            let (csv, pass, summary) = estimate(&cfg)?;
            emit(&c.out, csv.as_bytes())?;
            eprintln!("{summary}");
            if pass {
                Ok(())
            } else {
                Err(CliError::Failed("estimate outside |z| <= 5".into()))
            }
        }
    }
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("ELASTRF_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config(format!("ELASTRF_THREADS=`{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("elastrf: {e}");
            ExitCode::from(e.code())
        }
    }
}
