//! Command-line front end: flag/config resolution, dispatch and table output.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::perturbation_bounds;
use crate::dynamics::{
    converge_to_qre, discrete_q_learning, ConvergenceBudget, IntegratorOptions, Perturbation,
    PerturbationKind, PerturbationSpec, QLearningConfig,
};
use crate::error::Error;
use crate::game::{nash_equilibria, GameParams};
use crate::inequalities::inequality_suite;
use crate::mechanism::{build_schedule, run_mechanism, MechanismOptions, ScheduleMode};
use crate::qre::{critical_temperature, find_qre, upper_fold};
use crate::sweep::{sweep_correspondence, temperature_grid};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Nash,
    Qre,
    Tc,
    Sweep,
    Simulate,
    Qlearn,
    Mechanism,
    Perturb,
    Inequalities,
}

impl Subcommand {
    fn name(self) -> &'static str {
        match self {
            Subcommand::Nash => "nash",
            Subcommand::Qre => "qre",
            Subcommand::Tc => "tc",
            Subcommand::Sweep => "sweep",
            Subcommand::Simulate => "simulate",
            Subcommand::Qlearn => "qlearn",
            Subcommand::Mechanism => "mechanism",
            Subcommand::Perturb => "perturb",
            Subcommand::Inequalities => "inequalities",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    SmoothRandom,
    ConstantBias,
    EdgeDamped,
    /// Knots come from the config key `eps_table`.
    UserTable,
}

#[derive(Debug, Parser)]
#[command(
    name = "catlab",
    version,
    about = "QRE, fold detection and catastrophe schedules for Q-learning population games"
)]
struct Args {
    #[arg(value_enum)]
    subcommand: Option<Subcommand>,
    /// Normalized cost in (0, 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// Network-effect exponent, at least 1.
    #[arg(long)]
    alpha: Option<f64>,
    /// Control level (exploration temperature).
    #[arg(long)]
    temp: Option<f64>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    tstep: Option<f64>,
    /// Initial share of adopters.
    #[arg(long)]
    x0: Option<f64>,
    /// Perturbation amplitude.
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Schedule shape: minimal or ramp.
    #[arg(long)]
    mode: Option<ScheduleMode>,
    /// How far the schedule peak sits above the threshold.
    #[arg(long)]
    margin: Option<f64>,
    /// Ramp levels, Q-learning iterations or inequality grid size.
    #[arg(long)]
    steps: Option<usize>,
    /// Q-learning rate.
    #[arg(long)]
    delta: Option<f64>,
    /// Time limit for `simulate`.
    #[arg(long)]
    horizon: Option<f64>,
    /// Perturbation family.
    #[arg(long, value_enum)]
    kind: Option<NoiseKind>,
    /// Output path (default catlab_<subcommand>.<format>).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Config file schema: every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    subcommand: Option<Subcommand>,
    gamma: Option<f64>,
    alpha: Option<f64>,
    temp: Option<f64>,
    tmin: Option<f64>,
    tmax: Option<f64>,
    tstep: Option<f64>,
    x0: Option<f64>,
    eps0: Option<f64>,
    seed: Option<u64>,
    mode: Option<ScheduleMode>,
    margin: Option<f64>,
    steps: Option<usize>,
    delta: Option<f64>,
    horizon: Option<f64>,
    kind: Option<NoiseKind>,
    eps_table: Option<Vec<(f64, f64)>>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

/// Fully resolved run configuration, echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub gamma: f64,
    pub alpha: f64,
    pub temp: f64,
    pub tmin: f64,
    pub tmax: f64,
    pub tstep: f64,
    pub x0: f64,
    pub eps0: Option<f64>,
    pub seed: u64,
    pub mode: ScheduleMode,
    pub margin: f64,
    pub steps: usize,
    pub delta: f64,
    pub horizon: Option<f64>,
    pub kind: NoiseKind,
    pub eps_table: Option<Vec<(f64, f64)>>,
    pub out: PathBuf,
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn load_config(path: &Path) -> CliResult<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("config: cannot read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let key = e.path().to_string();
        CliError::Validation(format!("config: {key}: {}", e.inner()))
    })
}

fn resolve(args: Args) -> CliResult<RunConfig> {
    let file = match &args.config {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    };
    let subcommand = args
        .subcommand
        .or(file.subcommand)
        .ok_or_else(|| CliError::Validation("subcommand: missing".into()))?;
    let steps_default = match subcommand {
        Subcommand::Qlearn => 100_000,
        Subcommand::Inequalities => 10_000,
        _ => 7,
    };
    let eps0_default = (subcommand == Subcommand::Perturb).then_some(0.05);
    let format = args.format.or(file.format).unwrap_or_default();
    let out = args
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from(format!("catlab_{}.{}", subcommand.name(), format.extension())));
    let cfg = RunConfig {
        subcommand,
        gamma: args.gamma.or(file.gamma).unwrap_or(0.185),
        alpha: args.alpha.or(file.alpha).unwrap_or(2.0),
        temp: args.temp.or(file.temp).unwrap_or(0.25),
        tmin: args.tmin.or(file.tmin).unwrap_or(0.0),
        tmax: args.tmax.or(file.tmax).unwrap_or(0.5),
        tstep: args.tstep.or(file.tstep).unwrap_or(0.005),
        x0: args.x0.or(file.x0).unwrap_or(0.999),
        eps0: args.eps0.or(file.eps0).or(eps0_default),
        seed: args.seed.or(file.seed).unwrap_or(0),
        mode: args.mode.or(file.mode).unwrap_or_default(),
        margin: args.margin.or(file.margin).unwrap_or(crate::mechanism::DEFAULT_MARGIN),
        steps: args.steps.or(file.steps).unwrap_or(steps_default),
        delta: args.delta.or(file.delta).unwrap_or(0.01),
        horizon: args.horizon.or(file.horizon),
        kind: args.kind.or(file.kind).unwrap_or_default(),
        eps_table: file.eps_table,
        out,
        format,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> CliResult<()> {
    let finite = [
        ("gamma", cfg.gamma),
        ("alpha", cfg.alpha),
        ("temp", cfg.temp),
        ("tmin", cfg.tmin),
        ("tmax", cfg.tmax),
        ("tstep", cfg.tstep),
        ("x0", cfg.x0),
        ("margin", cfg.margin),
        ("delta", cfg.delta),
    ];
    for (name, v) in finite {
        if !v.is_finite() {
            return Err(CliError::Validation(format!("{name}: must be finite")));
        }
    }
    GameParams::new(cfg.gamma, cfg.alpha)?;
    if cfg.temp < 0.0 {
        return Err(CliError::Validation("temp: must be >= 0".into()));
    }
    if !(0.0..=1.0).contains(&cfg.x0) {
        return Err(CliError::Validation("x0: must lie in [0, 1]".into()));
    }
    if cfg.kind == NoiseKind::UserTable && cfg.eps_table.is_none() {
        return Err(CliError::Validation("eps_table: required for kind user_table".into()));
    }
    Ok(())
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Writes `table` as CSV (LF endings, 17 significant digits) or as JSON
/// `{meta, rows}`.
pub fn write_table(table: &Table, path: &Path, format: Format, meta: &Value) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_path(path)?;
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            w.flush()
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj = table
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, c)| (k.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let doc = json!({ "meta": meta, "rows": rows });
            let mut text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
            text.push('\n');
            fs::write(path, text)
        }
    }
}

fn perturbation(cfg: &RunConfig) -> CliResult<Option<Perturbation>> {
    let Some(eps0) = cfg.eps0 else {
        return Ok(None);
    };
    let kind = match cfg.kind {
        NoiseKind::SmoothRandom => PerturbationKind::SmoothRandom,
        NoiseKind::ConstantBias => PerturbationKind::ConstantBias,
        NoiseKind::EdgeDamped => PerturbationKind::EdgeDamped,
        NoiseKind::UserTable => PerturbationKind::UserTable(cfg.eps_table.clone().unwrap_or_default()),
    };
    let spec = PerturbationSpec {
        eps0,
        seed: cfg.seed,
        kind,
    };
    Ok(Some(spec.realize()?))
}

/// Runs one subcommand, returning its table and summary line.
pub fn execute(cfg: &RunConfig) -> CliResult<(Table, String)> {
    let p = GameParams::new(cfg.gamma, cfg.alpha)?;
    match cfg.subcommand {
        Subcommand::Nash => {
            let prof = nash_equilibria(&p)?;
            let rows = prof
                .equilibria
                .iter()
                .map(|e| vec![e.x.into(), e.average_payoff.into(), e.ess.as_str().into()])
                .collect();
            let summary = format!(
                "nash: {} equilibria{}",
                prof.equilibria.len(),
                prof.mixed().map_or(String::new(), |m| format!(", mixed x={:.6}", m.x))
            );
            Ok((
                Table {
                    header: vec!["x", "average_payoff", "ess"],
                    rows,
                },
                summary,
            ))
        }
        Subcommand::Qre => {
            let set = find_qre(cfg.temp, &p)?;
            let rows = set
                .points
                .iter()
                .map(|q| vec![cfg.temp.into(), q.x.into(), q.stability.as_str().into()])
                .collect();
            let summary = format!(
                "qre: {} points at T={}{}",
                set.len(),
                cfg.temp,
                if set.at_fold { " (at fold)" } else { "" }
            );
            Ok((
                Table {
                    header: vec!["T", "x", "stability"],
                    rows,
                },
                summary,
            ))
        }
        Subcommand::Tc => {
            let cp = if p.is_bilinear() {
                critical_temperature(p.gamma)?
            } else {
                upper_fold(&p)?.ok_or_else(|| {
                    CliError::Numerical(format!("alpha: no upper fold for alpha = {}", p.alpha))
                })?
            };
            let summary = format!("T_c={:.6}, x_fold={:.6}", cp.t_c, cp.x_fold);
            Ok((
                Table {
                    header: vec!["gamma", "T_c", "x_fold"],
                    rows: vec![vec![cp.gamma.into(), cp.t_c.into(), cp.x_fold.into()]],
                },
                summary,
            ))
        }
        Subcommand::Sweep => {
            let grid = temperature_grid(cfg.tmin, cfg.tmax, cfg.tstep)?;
            let sweep = sweep_correspondence(&p, &grid)?;
            let mut rows = Vec::new();
            for s in &sweep.slices {
                for (q, b) in s.qre.points.iter().zip(&s.branches) {
                    rows.push(vec![
                        s.temperature.into(),
                        (*b).into(),
                        q.x.into(),
                        q.stability.as_str().into(),
                    ]);
                }
            }
            let summary = format!(
                "sweep: {} levels, {} points, {} branches",
                sweep.slices.len(),
                rows.len(),
                sweep.branch_count
            );
            Ok((
                Table {
                    header: vec!["T", "branch_id", "x", "stability"],
                    rows,
                },
                summary,
            ))
        }
        Subcommand::Simulate => {
            let pert = perturbation(cfg)?;
            let budget = match cfg.horizon {
                Some(h) => {
                    if !(h > 0.0 && h.is_finite()) {
                        return Err(CliError::Validation("horizon: must be positive".into()));
                    }
                    ConvergenceBudget {
                        t_start: h.min(1e2),
                        t_limit: h,
                    }
                }
                None => ConvergenceBudget::default(),
            };
            let c = converge_to_qre(
                cfg.x0,
                cfg.temp,
                &p,
                pert.as_ref(),
                &IntegratorOptions::default(),
                &budget,
            )?;
            let rows = c
                .trajectory
                .samples
                .iter()
                .map(|s| vec![s.t.into(), s.x.into()])
                .collect();
            let summary = format!(
                "terminal_x={:.6}, converged={}, speed={:.3e}",
                c.terminal_x, c.converged, c.certificate.speed
            );
            Ok((
                Table {
                    header: vec!["t", "x"],
                    rows,
                },
                summary,
            ))
        }
        Subcommand::Qlearn => {
            let qc = QLearningConfig {
                delta: cfg.delta,
                steps: cfg.steps,
                ..QLearningConfig::default()
            };
            let tr = discrete_q_learning(cfg.x0, cfg.temp, &p, &qc)?;
            let rows = tr
                .samples
                .iter()
                .map(|s| vec![(s.t as usize).into(), s.x.into()])
                .collect();
            let summary = format!(
                "terminal_x={:.6}, converged={}",
                tr.terminal_x,
                tr.terminal == crate::dynamics::Terminal::Converged
            );
            Ok((
                Table {
                    header: vec!["step", "x"],
                    rows,
                },
                summary,
            ))
        }
        Subcommand::Mechanism => {
            let pert = perturbation(cfg)?;
            let schedule = build_schedule(&p, cfg.mode, cfg.margin, cfg.steps, cfg.eps0)?;
            let r = run_mechanism(cfg.x0, &schedule, &p, pert.as_ref(), &MechanismOptions::default())?;
            let rows = r
                .phases
                .iter()
                .enumerate()
                .map(|(i, ph)| {
                    vec![
                        i.into(),
                        ph.temperature.into(),
                        ph.start_x.into(),
                        ph.terminal_x.into(),
                        ph.converged.into(),
                    ]
                })
                .collect();
            let mut summary = format!("final_x={:.6}, hysteresis={}", r.final_x, r.hysteresis_confirmed);
            if let Some(j) = r.jump {
                summary.push_str(&format!(", jump={:.6}->{:.6}", j.x_before, j.x_after));
            }
            for n in &r.notes {
                summary.push_str(&format!(" [{n}]"));
            }
            Ok((
                Table {
                    header: vec!["phase", "T", "start_x", "terminal_x", "converged"],
                    rows,
                },
                summary,
            ))
        }
        Subcommand::Perturb => {
            let eps0 = cfg.eps0.unwrap_or(0.05);
            if !p.is_bilinear() {
                return Err(CliError::Validation("alpha: perturbation bounds need alpha = 2".into()));
            }
            let b = perturbation_bounds(cfg.x0, cfg.temp, p.gamma, eps0)?;
            let summary = format!(
                "root_interval=[{:.6}, {:.6}], T_c upper bound={:.6}",
                b.root_interval.0, b.root_interval.1, b.tc_upper_bound
            );
            Ok((
                Table {
                    header: vec![
                        "eps0",
                        "gamma",
                        "T",
                        "x",
                        "f_low",
                        "f_high",
                        "root_lo",
                        "root_hi",
                        "displacement_bound",
                        "tc_upper_bound",
                        "t_shift_bound",
                    ],
                    rows: vec![vec![
                        b.eps0.into(),
                        b.gamma.into(),
                        b.temperature.into(),
                        b.x_query.into(),
                        b.f_low.into(),
                        b.f_high.into(),
                        b.root_interval.0.into(),
                        b.root_interval.1.into(),
                        b.displacement_bound.into(),
                        b.tc_upper_bound.into(),
                        b.t_shift_bound.into(),
                    ]],
                },
                summary,
            ))
        }
        Subcommand::Inequalities => {
            let suite = inequality_suite(cfg.steps)?;
            let passed = suite.iter().filter(|c| c.passed).count();
            let rows = suite
                .iter()
                .map(|c| {
                    vec![
                        c.name.into(),
                        c.samples.into(),
                        c.worst_margin.into(),
                        c.equality_gap.into(),
                        c.passed.into(),
                    ]
                })
                .collect();
            let summary = format!("inequalities: {passed}/{} passed", suite.len());
            Ok((
                Table {
                    header: vec!["name", "samples", "worst_margin", "equality_gap", "passed"],
                    rows,
                },
                summary,
            ))
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("CATLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Validation(format!("CATLAB_THREADS: invalid thread count {v:?}")))?;
    // A pool that is already set up (e.g. a second in-process run) is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run_inner<I, T>(argv: I) -> CliResult<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                CliError::Validation(String::new())
            }
            _ => CliError::Validation(e.to_string()),
        }
    })?;
    configure_threads()?;
    let cfg = resolve(args)?;
    let (table, summary) = execute(&cfg)?;
    let meta = json!({ "tool": "catlab", "version": VERSION, "config": cfg });
    write_table(&table, &cfg.out, cfg.format, &meta)
        .map_err(|e| CliError::Numerical(format!("out: cannot write {}: {e}", cfg.out.display())))?;
    let failed = cfg.subcommand == Subcommand::Inequalities
        && table.rows.iter().any(|r| r.last() == Some(&Cell::Flag(false)));
    if failed {
        return Err(CliError::Numerical(summary));
    }
    Ok(summary)
}

/// Parses `argv`, runs, prints the summary and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run_inner(argv) {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(CliError::Validation(m)) if m.is_empty() => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message().trim_end());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> CliResult<RunConfig> {
        let argv = std::iter::once("catlab").chain(args.iter().copied());
        resolve(Args::try_parse_from(argv).map_err(|e| CliError::Validation(e.to_string()))?)
    }

    #[test]
    fn defaults() {
        let c = parse(&["sweep"]).unwrap();
        assert_eq!(c.gamma, 0.185);
        assert_eq!(c.tstep, 0.005);
        assert_eq!(c.out, PathBuf::from("catlab_sweep.csv"));
        assert_eq!(c.eps0, None);
        assert_eq!(parse(&["perturb"]).unwrap().eps0, Some(0.05));
        let j = parse(&["tc", "--format", "json"]).unwrap();
        assert_eq!(j.out, PathBuf::from("catlab_tc.json"));
    }

    #[test]
    fn rejects_bad_values() {
        let e = parse(&["nash", "--alpha", "0.5"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_VALIDATION);
        assert!(e.message().starts_with("alpha: subadditive regime unsupported"));
        assert!(parse(&["nash", "--gamma", "1.5"]).is_err());
        assert!(parse(&["nash", "--x0", "2"]).is_err());
        assert!(parse(&[]).is_err());
    }

    #[test]
    fn csv_cells() {
        assert_eq!(Cell::Num(0.3).csv(), "2.9999999999999999e-1");
        assert_eq!(Cell::Missing.csv(), "");
        assert_eq!(Cell::Num(f64::NAN).json(), Value::Null);
        let v: f64 = Cell::Num(0.1 + 0.2).csv().parse().unwrap();
        assert_eq!(v, 0.1 + 0.2);
    }

    #[test]
    fn numerical_errors_map_to_exit_three() {
        let e: CliError = Error::StepUnderflow {
            t: 0.0,
            x: 0.5,
            h_min: 1e-9,
        }
        .into();
        assert_eq!(e.exit_code(), EXIT_NUMERICAL);
    }
}
