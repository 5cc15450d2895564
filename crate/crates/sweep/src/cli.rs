//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use blockade::spectra::{
    cpb_detunings, first_manifold, first_manifold_numeric, is_resonant, second_manifold, second_manifold_numeric,
    tpb_detunings,
};
use blockade::{Error, ModelParams, Param, Truncation};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{load_config, Format, Method, SweepConfig};
use crate::presets::{preset_info, PRESET_NAMES};
use crate::run::{run_sweep, solve_point, Column};
use crate::svg::write_svg_plot;
use crate::table::write_csv;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "blockade", version, about = "Photon-blockade spectra, steady states and parameter sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dressed-state frequencies and blockade conditions
    Eigen(Common),
    /// Solve one parameter point and print its observables
    Steady(Common),
    /// Run the grid described by --config (or --preset)
    Sweep(Common),
    /// Run a figure preset
    Fig(Common),
    /// List the figure presets
    Presets,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Direct,
    Evolve,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML sweep configuration
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Figure preset (see `blockade presets`)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output path; the extension is replaced per format
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Fock levels kept in every cavity mode
    #[arg(long, value_name = "N")]
    trunc: Option<usize>,
    /// Atomic decay rate in units of κ
    #[arg(long, value_name = "X")]
    gamma: Option<f64>,
    /// Worker threads (overrides BLOCKADE_THREADS)
    #[arg(long, value_name = "K")]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Override a model parameter, e.g. --set g=8 --set J=2
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config { .. } | Error::UnknownPreset(_) | Error::InvalidParameter { .. } | Error::Truncation { .. } => EXIT_CONFIG,
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_SOLVER,
        };
        let category = match code {
            EXIT_CONFIG => "config error",
            EXIT_IO => "i/o error",
            _ => "solver error",
        };
        Failure { code, message: format!("{category}: {e}") }
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit status.
pub fn cli_main<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}\n{}", schema_help());
            }
            return code;
        }
    };
    let res = match cli.command {
        Command::Eigen(c) => eigen(&c, out),
        Command::Steady(c) => steady(&c, out),
        Command::Sweep(c) => sweep(&c, false, out),
        Command::Fig(c) => sweep(&c, true, out),
        Command::Presets => presets(out),
    };
    match res {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn schema_help() -> &'static str {
    "config files are TOML with sections [model] (parameter names: delta_a delta_b delta_c delta_sigma J g \
F_a F_b F_c kappa_a kappa_b kappa_c gamma nbar_a nbar_b nbar_c nbar_sigma), [sweep] (axis1_param axis1_start \
axis1_stop axis1_points, optional axis2_*, links = [\"delta_b = 2/3 * delta_a\"]), [solver] (trunc | n_a n_b n_c, \
method, tolerance, evolve_rate, t_max, threads) and [output] (path, format, columns); an optional top-level \
preset = \"fig3a\" supplies defaults"
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: format!("usage error: {}\n{}", message.into(), schema_help()) }
}

/// The scenario selected by --config/--preset with the command-line overrides
/// applied, together with the axis coordinates of its reference point.
struct Scenario {
    config: Option<SweepConfig>,
    coords: Vec<f64>,
    base: ModelParams,
}

fn scenario(c: &Common) -> Result<Scenario, Failure> {
    let (mut config, coords) = match (&c.config, &c.preset) {
        (Some(_), Some(_)) => return Err(usage("give either --config or --preset, not both")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::from(Error::io(path, e)))?;
            let cfg = load_config(&text)?;
            let coords = cfg.axes().iter().map(|a| cfg.base.get(a.param)).collect();
            (Some(cfg), coords)
        }
        (None, Some(name)) => {
            let p = preset_info(name)?;
            (Some(p.config), p.feature)
        }
        (None, None) => (None, Vec::new()),
    };
    let mut base = config.as_ref().map_or_else(ModelParams::default, |c| c.base);
    let mut coords = coords;
    for item in &c.set {
        let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("--set expects KEY=VALUE, got {item:?}")))?;
        let param: Param = k.trim().parse()?;
        let value: f64 = v.trim().parse().map_err(|_| usage(format!("--set {k}: {v:?} is not a number")))?;
        base.set(param, value);
        if let Some(cfg) = &config {
            for (axis, x) in cfg.axes().iter().zip(coords.iter_mut()) {
                if axis.param == param {
                    *x = value;
                }
            }
        }
    }
    if let Some(g) = c.gamma {
        base.gamma = g;
    }
    if let Some(cfg) = config.as_mut() {
        cfg.base = base;
        if let Some(n) = c.trunc {
            cfg.solver.truncation = Truncation::uniform(n);
        }
        if let Some(t) = c.threads {
            cfg.solver.threads = Some(t);
        }
        if let Some(s) = c.solver {
            cfg.solver.method = match s {
                SolverArg::Direct => Method::Direct,
                SolverArg::Evolve => Method::Evolve,
            };
        }
        if let Some(f) = c.format {
            cfg.output.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Svg => Format::Svg,
                FormatArg::Both => Format::Both,
            };
        }
        if let Some(o) = &c.out {
            cfg.output.path = Some(o.clone());
        }
        cfg.validate()?;
    } else if let Some(n) = c.trunc {
        base.truncation = Truncation::uniform(n);
    }
    Ok(Scenario { config, coords, base })
}

impl Scenario {
    fn params(&self) -> ModelParams {
        match &self.config {
            Some(cfg) => cfg.point(&self.coords),
            None => self.base,
        }
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join("  ")
}

fn eigen(c: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let p = scenario(c)?.params();
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(|e| Failure::from(Error::io(Path::new("<stdout>"), e)));
    w(out, format!("g = {}, J = {}, delta_a = {}, resonant = {}", p.g, p.j, p.delta_a, is_resonant(&p)))?;
    let n1 = first_manifold_numeric(&p).sorted_ascending();
    let n2 = second_manifold_numeric(&p).sorted_ascending();
    let m1 = first_manifold(&p);
    let m2 = second_manifold(&p);
    w(out, format!("first manifold  ({:?}): {}", m1.method, fmt_list(&m1.sorted_ascending())))?;
    w(out, format!("first manifold  (Numeric): {}", fmt_list(&n1)))?;
    w(out, format!("second manifold ({:?}): {}", m2.method, fmt_list(&m2.sorted_ascending())))?;
    w(out, format!("second manifold (Numeric): {}", fmt_list(&n2)))?;
    let (cp, cm) = cpb_detunings(p.g, p.j);
    w(out, format!("CPB conditions: delta_a = {cp:.6}, {cm:.6}"))?;
    let t = tpb_detunings(p.g, p.j);
    w(out, format!("2PB conditions: delta_a1 = ±{:.6}, delta_a2 = ±{:.6}", t.delta_a1, t.delta_a2))?;
    Ok(())
}

fn steady(c: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let sc = scenario(c)?;
    let p = sc.params();
    let solver = sc.config.as_ref().map(|c| c.solver.clone()).unwrap_or_else(|| crate::config::SolverProfile {
        truncation: sc.base.truncation,
        method: match c.solver {
            Some(SolverArg::Evolve) => Method::Evolve,
            _ => Method::Direct,
        },
        ..Default::default()
    });
    let o = solve_point(&p, &solver)?;
    let io = |e| Failure::from(Error::io(Path::new("<stdout>"), e));
    writeln!(
        out,
        "delta_a = {}, delta_b = {}, delta_c = {}, delta_sigma = {}, g = {}, J = {}, F = ({}, {}, {}), gamma = {}, truncation {}",
        p.delta_a, p.delta_b, p.delta_c, p.delta_sigma, p.g, p.j, p.f_a, p.f_b, p.f_c, p.gamma, solver.truncation
    )
    .map_err(io)?;
    writeln!(out, "{}", o.observables).map_err(io)?;
    writeln!(out, "residual {:e}", o.residual).map_err(io)?;
    Ok(())
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn sweep(c: &Common, figure: bool, out: &mut dyn Write) -> Result<(), Failure> {
    if figure && c.preset.is_none() {
        return Err(usage("fig needs --preset NAME"));
    }
    if !figure && c.config.is_none() && c.preset.is_none() {
        return Err(usage("sweep needs --config PATH or --preset NAME"));
    }
    let sc = scenario(c)?;
    let cfg = sc.config.expect("config or preset given");
    let result = run_sweep(&cfg)?;
    let stem = cfg
        .output
        .path
        .clone()
        .unwrap_or_else(|| PathBuf::from(cfg.name.clone().unwrap_or_else(|| "sweep".into())).with_extension("csv"));
    let io = |e| Failure::from(Error::io(Path::new("<stdout>"), e));
    if matches!(cfg.output.format, Format::Csv | Format::Both) {
        let path = if cfg.output.format == Format::Both { with_extension(&stem, "csv") } else { stem.clone() };
        write_csv(&result, &path)?;
        writeln!(out, "wrote {} ({} rows)", path.display(), result.records.len()).map_err(io)?;
    }
    if matches!(cfg.output.format, Format::Svg | Format::Both) {
        let path = with_extension(&stem, "svg");
        let cols = if cfg.output.columns.is_empty() {
            vec![Column::G2A]
        } else {
            cfg.output.columns.iter().map(|s| s.parse()).collect::<Result<Vec<Column>, _>>()?
        };
        let warnings = write_svg_plot(&result, &cols, &path)?;
        writeln!(out, "wrote {}", path.display()).map_err(io)?;
        for w in warnings {
            writeln!(out, "warning: {w}").map_err(io)?;
        }
    }
    let failed = result.failed_indices();
    if !failed.is_empty() {
        let detail: Vec<String> = result
            .records
            .iter()
            .filter_map(|r| r.outcome.as_ref().err().map(|e| format!("  {}: {e}", r.index)))
            .collect();
        return Err(Failure {
            code: EXIT_SOLVER,
            message: format!("solver error: {} of {} grid points failed: {:?}\n{}", failed.len(), result.records.len(), failed, detail.join("\n")),
        });
    }
    Ok(())
}

fn presets(out: &mut dyn Write) -> Result<(), Failure> {
    for name in PRESET_NAMES {
        let p = preset_info(name)?;
        let axes: Vec<String> = p
            .config
            .axes()
            .iter()
            .map(|a| format!("{} in [{}, {}] x{}", a.param, a.start, a.stop, a.points))
            .collect();
        writeln!(out, "{name:6}  {}  ({})", p.description, axes.join(", "))
            .map_err(|e| Failure::from(Error::io(Path::new("<stdout>"), e)))?;
    }
    Ok(())
}
