//! Command-line front end: `solve`, `hom` and `verify`.
//!
//! Settings resolve as flag, then config file, then built-in default. Config
//! files hold one `key = value` per line with keys named after the long
//! flags; `#` starts a comment. Every output is written next to a JSON
//! manifest holding the resolved settings.

use crate::config::{Method, SimConfig};
use crate::error::Error;
use crate::fock::{number_state, thermal_state, DensityMatrix, Mode, TwoModeSpace};
use crate::observables::{coincidence_rate, diagnostics, hom_sweep, linspace, mode_occupation, time_grid, CoincidenceGrid};
use crate::solver::Evolution;
use crate::verify;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Largest share of invalid sweep cells tolerated before `hom` fails.
pub const MAX_INVALID_FRACTION: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(name = "coupled-modes", version, about = "Two coupled lossy bosonic modes in a thermal reservoir")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one initial state and tabulate diagnostics and observables.
    Solve(SolveArgs),
    /// Sweep the coincidence rate from |1,1⟩ over time and γ₁/g.
    Hom(HomArgs),
    /// Run the invariant suites and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Mode coupling; rates are in units of g when omitted (g = 1).
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,
    /// Reservoir occupation; `hom` accepts a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub nbar: Vec<f64>,
    /// Per-mode Fock cutoff.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// auto, diagonalized or direct.
    #[arg(long)]
    pub method: Option<Method>,
    /// Output file (`solve`, `verify`) or directory (`hom`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` settings file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps; parallel sweeps are off unless set.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Initial state: `N1 N2` for a number state or `thermal NBAR0`.
    #[arg(long, num_args = 2, value_names = ["N1|thermal", "N2|NBAR0"], allow_hyphen_values = true)]
    pub state: Option<Vec<String>>,
    /// Final time (default π/4g).
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of equal intervals on [0, tmax].
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct HomArgs {
    #[command(flatten)]
    pub common: Common,
    /// Final time (default π/g).
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub t_points: Option<usize>,
    #[arg(long)]
    pub gamma1_max: Option<f64>,
    #[arg(long)]
    pub gamma1_points: Option<usize>,
    /// Also write a heatmap image (format from the extension, e.g. .png).
    #[arg(long)]
    pub render: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Replaces every suite tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Failure classes and their exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad arguments or violated preconditions (exit 2).
    Usage(String),
    /// Computation or I/O failed, or results did not meet the bar (exit 1).
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) | Error::DimensionMismatch { .. } | Error::InvalidState(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Settings read from a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

const KNOWN_KEYS: [&str; 17] = [
    "g",
    "gamma1",
    "gamma2",
    "nbar",
    "cutoff",
    "method",
    "out",
    "seed",
    "jobs",
    "state",
    "tmax",
    "steps",
    "t-points",
    "gamma1-max",
    "gamma1-points",
    "render",
    "tol",
];

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", n + 1)));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("config key '{key}': cannot parse '{v}'"))))
            .transpose()
    }

    pub fn list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("config key '{key}': cannot parse '{x}'")))
                    })
                    .collect()
            })
            .transpose()
    }
}

/// Flag, else config file, else default.
fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> CliResult<T> {
    Ok(match flag {
        Some(v) => v,
        None => file.get(key)?.unwrap_or(default),
    })
}

fn pick_opt<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> CliResult<Option<T>> {
    Ok(match flag {
        Some(v) => Some(v),
        None => file.get(key)?,
    })
}

/// Resolved shared settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub g: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub nbar: Vec<f64>,
    pub cutoff: usize,
    pub method: Method,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl Resolved {
    fn new(c: &Common, file: &ConfigFile, default_nbar: &[f64], default_cutoff: usize) -> CliResult<Self> {
        let nbar = if !c.nbar.is_empty() {
            c.nbar.clone()
        } else {
            file.list("nbar")?.unwrap_or_else(|| default_nbar.to_vec())
        };
        Ok(Self {
            g: pick(c.g, file, "g", 1.0)?,
            gamma1: pick(c.gamma1, file, "gamma1", 0.0)?,
            gamma2: pick(c.gamma2, file, "gamma2", 0.0)?,
            nbar,
            cutoff: pick(c.cutoff, file, "cutoff", default_cutoff)?,
            method: pick(c.method, file, "method", Method::Auto)?,
            out: pick_opt(c.out.clone(), file, "out")?,
            seed: pick(c.seed, file, "seed", verify::DEFAULT_SEED)?,
            jobs: pick_opt(c.jobs, file, "jobs")?,
        })
    }

    fn sim_config(&self, nbar: f64) -> CliResult<SimConfig> {
        Ok(SimConfig::new(self.g, self.gamma1, self.gamma2, nbar, self.cutoff)?.with_method(self.method))
    }
}

fn load_file(c: &Common) -> CliResult<ConfigFile> {
    match &c.config {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

/// Written next to every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub arguments: Vec<String>,
    pub settings: Resolved,
    pub configs: Vec<SimConfig>,
    pub grids: BTreeMap<&'static str, Vec<f64>>,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub details: BTreeMap<&'static str, serde_json::Value>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    fn new(command: &str, settings: &Resolved) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            settings: settings.clone(),
            configs: Vec::new(),
            grids: BTreeMap::new(),
            seed: settings.seed,
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            details: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    fn write(&self, path: &Path) -> CliResult<()> {
        let json = serde_json::to_string_pretty(self).map_err(|e| CliError::Failure(e.to_string()))?;
        write_file(path, &(json + "\n"))
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Failure(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

/// Locale-independent decimal with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Initial state named by `--state`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialState {
    Number { n1: usize, n2: usize },
    /// Product thermal state truncated two quanta below the cutoff.
    Thermal { nbar: f64 },
}

impl InitialState {
    pub fn parse(words: &[String]) -> CliResult<Self> {
        let bad = || CliError::Usage(format!("--state expects `N1 N2` or `thermal NBAR0`, got '{}'", words.join(" ")));
        match words {
            [kind, x] if kind == "thermal" => {
                let nbar: f64 = x.parse().map_err(|_| bad())?;
                if !(nbar >= 0.0 && nbar.is_finite()) {
                    return Err(CliError::Usage(format!("thermal occupation must be ≥ 0, got {x}")));
                }
                Ok(InitialState::Thermal { nbar })
            }
            [a, b] => Ok(InitialState::Number { n1: a.parse().map_err(|_| bad())?, n2: b.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }

    pub fn density_matrix(&self, cutoff: usize) -> CliResult<DensityMatrix> {
        let space = TwoModeSpace::new(cutoff)?;
        match *self {
            InitialState::Number { n1, n2 } => {
                if n1.max(n2) > cutoff {
                    return Err(CliError::Usage(format!("state |{n1},{n2}⟩ exceeds cutoff {cutoff}")));
                }
                Ok(number_state(space, n1, n2)?.projector())
            }
            InitialState::Thermal { nbar } => {
                let inner = cutoff.checked_sub(crate::solver::CUTOFF_MARGIN).ok_or_else(|| {
                    CliError::Usage(format!("a thermal initial state needs cutoff ≥ {}", crate::solver::CUTOFF_MARGIN))
                })?;
                Ok(thermal_state(TwoModeSpace::new(inner)?, nbar)?.embed(space)?)
            }
        }
    }
}

/// `k·tmax/steps` for `k = 0..=steps`; just `[0]` when `tmax = 0`.
pub fn solve_grid(tmax: f64, steps: usize) -> CliResult<Vec<f64>> {
    if !(tmax >= 0.0 && tmax.is_finite()) {
        return Err(CliError::Usage(format!("--tmax must be ≥ 0, got {tmax}")));
    }
    if tmax == 0.0 {
        return Ok(vec![0.0]);
    }
    if steps == 0 {
        return Err(CliError::Usage("--steps must be ≥ 1".into()));
    }
    Ok(linspace(tmax, steps + 1))
}

pub const SOLVE_HEADER: &str = "t,trace,min_eigenvalue,leakage,P11,n1_occ,n2_occ";
pub const HOM_HEADER: &str = "t,gamma1_over_g,P11,valid_flag";

pub fn cmd_solve(args: &SolveArgs) -> CliResult<()> {
    let file = load_file(&args.common)?;
    let settings = Resolved::new(&args.common, &file, &[0.0], SimConfig::default().cutoff)?;
    let nbar = match settings.nbar.as_slice() {
        [n] => *n,
        _ => return Err(CliError::Usage("solve takes a single --nbar".into())),
    };
    let config = settings.sim_config(nbar)?;
    let words = match &args.state {
        Some(w) => w.clone(),
        None => match file.raw("state") {
            Some(s) => s.split_whitespace().map(String::from).collect(),
            None => vec!["1".into(), "1".into()],
        },
    };
    let state = InitialState::parse(&words)?;
    let tmax = pick(args.tmax, &file, "tmax", PI / (4.0 * config.g))?;
    let steps = pick(args.steps, &file, "steps", 100)?;
    let times = solve_grid(tmax, steps)?;

    let rho0 = state.density_matrix(config.cutoff)?;
    let evolution = Evolution::new(&rho0, &config)?;
    let mut csv = String::from(SOLVE_HEADER);
    csv.push('\n');
    for &t in &times {
        let rho = evolution.at(t)?;
        let d = diagnostics(&rho);
        let fields = [
            t,
            crate::linalg::trace(rho.matrix()).re,
            d.min_eigenvalue,
            d.leakage,
            coincidence_rate(&rho)?,
            mode_occupation(&rho, Mode::One),
            mode_occupation(&rho, Mode::Two),
        ];
        let _ = writeln!(csv, "{}", fields.map(fmt_num).join(","));
    }

    let out = settings.out.clone().unwrap_or_else(|| PathBuf::from("solve.csv"));
    write_file(&out, &csv)?;
    let mut manifest = RunManifest::new("solve", &settings);
    manifest.configs.push(config);
    manifest.grids.insert("t", times);
    manifest.details.insert("initial_state", serde_json::json!(state));
    manifest.details.insert("working_cutoff", serde_json::json!(evolution.working_space().cutoff()));
    manifest.details.insert("path", serde_json::json!(format!("{:?}", evolution.path()).to_lowercase()));
    manifest.outputs.push(out.clone());
    manifest.write(&manifest_path(&out))?;
    Ok(())
}

/// `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// File name of one `hom` panel.
pub fn hom_file_name(nbar: f64) -> String {
    format!("hom_nbar_{nbar}.csv")
}

pub fn hom_csv(grid: &CoincidenceGrid) -> String {
    let mut csv = String::from(HOM_HEADER);
    csv.push('\n');
    for (t, gm, p, ok) in grid.rows() {
        let _ = writeln!(csv, "{},{},{},{}", fmt_num(t), fmt_num(gm), fmt_num(p), u8::from(ok));
    }
    csv
}

pub fn cmd_hom(args: &HomArgs) -> CliResult<()> {
    let file = load_file(&args.common)?;
    let settings = Resolved::new(&args.common, &file, &[0.0, 0.01], SimConfig::default().cutoff)?;
    if settings.nbar.is_empty() {
        return Err(CliError::Usage("hom needs at least one --nbar".into()));
    }
    let g = settings.g;
    let tmax = pick(args.tmax, &file, "tmax", PI / g)?;
    let t_points = pick(args.t_points, &file, "t-points", 201)?;
    let gmax = pick(args.gamma1_max, &file, "gamma1-max", 1.0)?;
    let g_points = pick(args.gamma1_points, &file, "gamma1-points", 101)?;
    let render = pick_opt(args.render.clone(), &file, "render")?;
    if !(tmax >= 0.0 && tmax.is_finite()) || t_points == 0 {
        return Err(CliError::Usage("time grid needs --tmax ≥ 0 and --t-points ≥ 1".into()));
    }
    if !(gmax >= 0.0 && gmax.is_finite()) || g_points == 0 {
        return Err(CliError::Usage("γ₁ grid needs --gamma1-max ≥ 0 and --gamma1-points ≥ 1".into()));
    }
    let times = time_grid(tmax, t_points, g);
    let gammas = if gmax == 0.0 { vec![0.0] } else { linspace(gmax, g_points) };

    let parallel = settings.jobs.is_some_and(|j| j != 1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.unwrap_or(1))
        .build()
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let configs: Vec<SimConfig> = settings.nbar.iter().map(|&n| settings.sim_config(n)).collect::<CliResult<_>>()?;
    let grids: Vec<CoincidenceGrid> = configs
        .iter()
        .map(|c| pool.install(|| hom_sweep(c, &times, &gammas, parallel)))
        .collect::<Result<_, _>>()?;

    let dir = settings.out.clone().unwrap_or_else(|| PathBuf::from("hom_out"));
    let mut manifest = RunManifest::new("hom", &settings);
    manifest.configs = configs;
    manifest.grids.insert("t", times.clone());
    manifest.grids.insert("gamma1_over_g", gammas.clone());
    let mut invalid = 0;
    let mut cells = 0;
    for grid in &grids {
        let path = dir.join(hom_file_name(grid.nbar));
        write_file(&path, &hom_csv(grid))?;
        manifest.outputs.push(path);
        invalid += grid.invalid_cells();
        cells += grid.cells();
    }
    manifest.details.insert("invalid_cells", serde_json::json!(invalid));
    manifest.details.insert(
        "working_cutoffs",
        serde_json::json!(grids
            .iter()
            .map(|gr| gr.diagnostics.iter().map(|d| d.map(|d| d.working_cutoff)).collect::<Vec<_>>())
            .collect::<Vec<_>>()),
    );
    if let Some(path) = &render {
        crate::render::render(&grids, path)?;
        manifest.outputs.push(path.clone());
    }
    manifest.write(&dir.join("manifest.json"))?;
    let fraction = if cells == 0 { 0.0 } else { invalid as f64 / cells as f64 };
    if fraction > MAX_INVALID_FRACTION {
        return Err(CliError::Failure(format!(
            "{invalid} of {cells} cells invalid ({:.2}% > {:.0}%)",
            100.0 * fraction,
            100.0 * MAX_INVALID_FRACTION
        )));
    }
    Ok(())
}

/// Runs the suites, prints the table and returns whether all passed.
pub fn cmd_verify(args: &VerifyArgs) -> CliResult<bool> {
    let file = load_file(&args.common)?;
    let settings = Resolved::new(&args.common, &file, &[0.0], SimConfig::default().cutoff)?;
    let tol = pick_opt(args.tol, &file, "tol")?;
    if let Some(t) = tol {
        if t.is_nan() || t < 0.0 {
            return Err(CliError::Usage(format!("--tol must be ≥ 0, got {t}")));
        }
    }
    let report = verify::run_all(settings.seed, tol);
    let table = report.table();
    print!("{table}");
    if let Some(out) = &settings.out {
        write_file(out, &table)?;
        let mut manifest = RunManifest::new("verify", &settings);
        manifest.details.insert("tolerance_override", serde_json::json!(tol));
        manifest.details.insert("report", serde_json::json!(report));
        manifest.outputs.push(out.clone());
        manifest.write(&manifest_path(out))?;
    }
    Ok(report.passed())
}

/// Parses `std::env::args`, runs the subcommand and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a).map(|_| true),
        Command::Hom(a) => cmd_hom(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let f = ConfigFile::parse("# rates\ng = 2\ngamma1=0.5 # trailing\n\nnbar = 0, 0.01\n").unwrap();
        assert_eq!(f.get::<f64>("g").unwrap(), Some(2.0));
        assert_eq!(f.get::<f64>("gamma1").unwrap(), Some(0.5));
        assert_eq!(f.list("nbar").unwrap(), Some(vec![0.0, 0.01]));
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("g 1").is_err());
        assert!(f.get::<usize>("g").is_ok());
        assert!(ConfigFile::parse("cutoff = x").unwrap().get::<usize>("cutoff").is_err());
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = ConfigFile::parse("g = 2\ngamma2 = 0.3\ncutoff = 9").unwrap();
        let common = Common { gamma2: Some(0.7), ..Common::default() };
        let r = Resolved::new(&common, &file, &[0.0], 6).unwrap();
        assert_eq!((r.g, r.gamma1, r.gamma2, r.cutoff), (2.0, 0.0, 0.7, 9));
        assert_eq!(r.nbar, vec![0.0]);
        assert_eq!(r.method, Method::Auto);
    }

    #[test]
    fn state_parsing() {
        let w = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
        assert_eq!(InitialState::parse(&w("1 1")).unwrap(), InitialState::Number { n1: 1, n2: 1 });
        assert_eq!(InitialState::parse(&w("thermal 0.5")).unwrap(), InitialState::Thermal { nbar: 0.5 });
        assert!(matches!(InitialState::parse(&w("a b")), Err(CliError::Usage(_))));
        assert!(matches!(InitialState::parse(&w("thermal -1")), Err(CliError::Usage(_))));
        assert!(matches!(InitialState::Number { n1: 7, n2: 0 }.density_matrix(5), Err(CliError::Usage(_))));
    }

    #[test]
    fn thermal_initial_state_leaves_margin() {
        let rho = InitialState::Thermal { nbar: 0.3 }.density_matrix(6).unwrap();
        assert_eq!(rho.max_mode_occupation(), 4);
        assert!((crate::linalg::trace(rho.matrix()).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn grids_and_formatting() {
        assert_eq!(solve_grid(0.0, 10).unwrap(), vec![0.0]);
        assert_eq!(solve_grid(1.0, 4).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(solve_grid(1.0, 0).is_err());
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(1.0).parse::<f64>().unwrap(), 1.0);
        assert_eq!(manifest_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.manifest.json"));
        assert_eq!(hom_file_name(0.01), "hom_nbar_0.01.csv");
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(Error::Config("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::Truncation("x".into())).exit_code(), 1);
    }
}
