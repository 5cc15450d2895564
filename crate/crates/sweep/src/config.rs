//! Sweep configuration and its TOML form.
//!
//! ```toml
//! preset = "fig3a"          # optional; the sections below override it
//!
//! [model]                   # any ModelParams name, in units of κ
//! g = 11
//! J = 2
//!
//! [sweep]
//! axis1_param = "delta_a"
//! axis1_start = -20
//! axis1_stop = 20
//! axis1_points = 201
//! links = ["delta_b = 2/3 * delta_a", "delta_c = delta_a - delta_b", "delta_sigma = delta_a"]
//!
//! [solver]
//! trunc = 5                 # or n_a / n_b / n_c
//! method = "direct"         # or "evolve"
//! tolerance = 1e-10
//! threads = 1
//!
//! [output]
//! path = "fig3a.csv"
//! format = "csv"            # csv, svg or both
//! columns = ["g2_a", "g2_b", "g2_c"]
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use blockade::{Error, ModelParams, Param, Result, Truncation};
use serde::Deserialize;

use crate::link::Link;
use crate::presets;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(param: Param, start: f64, stop: f64, points: usize) -> Self {
        Axis { param, start, stop, points }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn validate(&self, which: &str) -> Result<()> {
        if self.points < 2 {
            return Err(config_err(format!("{which}_points must be at least 2, got {}", self.points)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(config_err(format!("{which} bounds must be finite")));
        }
        if self.start == self.stop {
            return Err(config_err(format!("{which}_start and {which}_stop are both {}", self.start)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Direct,
    Evolve,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "evolve" => Ok(Method::Evolve),
            other => Err(config_err(format!("unknown solver method {other:?} (expected direct or evolve)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Evolve => "evolve",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverProfile {
    pub truncation: Truncation,
    pub method: Method,
    /// Records whose `‖L vec ρ‖/‖L‖_F` exceeds this are marked failed.
    pub tolerance: f64,
    /// Convergence threshold on `‖dρ/dt‖` for the evolve method.
    pub evolve_rate: f64,
    pub t_max: f64,
    /// `None` reads `BLOCKADE_THREADS`, falling back to the available cores.
    pub threads: Option<usize>,
}

impl Default for SolverProfile {
    fn default() -> Self {
        SolverProfile {
            truncation: Truncation::default(),
            method: Method::Direct,
            tolerance: 1e-10,
            evolve_rate: 1e-9,
            t_max: 5000.0,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Svg,
    Both,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            "both" => Ok(Format::Both),
            other => Err(config_err(format!("unknown output format {other:?} (expected csv, svg or both)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
    /// Columns drawn in SVG output.
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub name: Option<String>,
    pub base: ModelParams,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub links: Vec<Link>,
    pub solver: SolverProfile,
    pub output: OutputSpec,
}

impl SweepConfig {
    pub fn new(base: ModelParams, axis1: Axis) -> Self {
        SweepConfig {
            name: None,
            base,
            axis1,
            axis2: None,
            links: Vec::new(),
            solver: SolverProfile::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn axes(&self) -> Vec<&Axis> {
        std::iter::once(&self.axis1).chain(self.axis2.as_ref()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.axis1.validate("axis1")?;
        if let Some(a2) = &self.axis2 {
            a2.validate("axis2")?;
            if a2.param == self.axis1.param {
                return Err(config_err(format!("both axes sweep {}", a2.param)));
            }
        }
        for (k, link) in self.links.iter().enumerate() {
            if self.axes().iter().any(|a| a.param == link.target) {
                return Err(config_err(format!("{} is both a swept axis and a link target", link.target)));
            }
            if self.links[..k].iter().any(|l| l.target == link.target) {
                return Err(config_err(format!("{} is linked twice", link.target)));
            }
            if self.links[k..].iter().any(|l| link.depends_on(l.target)) {
                return Err(config_err(format!("link {link} uses a parameter that is linked later")));
            }
        }
        if !(self.solver.tolerance > 0.0) || !(self.solver.evolve_rate > 0.0) || !(self.solver.t_max > 0.0) {
            return Err(config_err("solver tolerances and t_max must be > 0"));
        }
        if self.solver.threads == Some(0) {
            return Err(config_err("threads must be at least 1"));
        }
        self.point(&vec![self.axis1.start; self.axes().len()]).validate()
    }

    /// Parameters at one grid point: base, then axis values, then links in order.
    pub fn point(&self, coords: &[f64]) -> ModelParams {
        let mut p = self.base;
        for (axis, v) in self.axes().iter().zip(coords) {
            p.set(axis.param, *v);
        }
        for l in &self.links {
            l.apply(&mut p);
        }
        p.truncation = self.solver.truncation;
        p
    }

    /// Grid coordinates in output order, axis 2 varying slowest.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let v1 = self.axis1.values();
        match &self.axis2 {
            None => v1.into_iter().map(|x| vec![x]).collect(),
            Some(a2) => a2
                .values()
                .into_iter()
                .flat_map(|y| v1.iter().map(move |&x| vec![x, y]))
                .collect(),
        }
    }
}

fn config_err(message: impl Into<String>) -> Error {
    Error::Config { line: None, message: message.into() }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    preset: Option<String>,
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawModel {
    delta_a: Option<f64>,
    delta_b: Option<f64>,
    delta_c: Option<f64>,
    delta_sigma: Option<f64>,
    #[serde(rename = "J")]
    j: Option<f64>,
    g: Option<f64>,
    #[serde(rename = "F_a")]
    f_a: Option<f64>,
    #[serde(rename = "F_b")]
    f_b: Option<f64>,
    #[serde(rename = "F_c")]
    f_c: Option<f64>,
    kappa_a: Option<f64>,
    kappa_b: Option<f64>,
    kappa_c: Option<f64>,
    gamma: Option<f64>,
    nbar_a: Option<f64>,
    nbar_b: Option<f64>,
    nbar_c: Option<f64>,
    nbar_sigma: Option<f64>,
}

impl RawModel {
    fn entries(&self) -> [(Param, Option<f64>); 17] {
        [
            (Param::DeltaA, self.delta_a),
            (Param::DeltaB, self.delta_b),
            (Param::DeltaC, self.delta_c),
            (Param::DeltaSigma, self.delta_sigma),
            (Param::J, self.j),
            (Param::G, self.g),
            (Param::FA, self.f_a),
            (Param::FB, self.f_b),
            (Param::FC, self.f_c),
            (Param::KappaA, self.kappa_a),
            (Param::KappaB, self.kappa_b),
            (Param::KappaC, self.kappa_c),
            (Param::Gamma, self.gamma),
            (Param::NbarA, self.nbar_a),
            (Param::NbarB, self.nbar_b),
            (Param::NbarC, self.nbar_c),
            (Param::NbarSigma, self.nbar_sigma),
        ]
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis1_param: Option<String>,
    axis1_start: Option<f64>,
    axis1_stop: Option<f64>,
    axis1_points: Option<usize>,
    axis2_param: Option<String>,
    axis2_start: Option<f64>,
    axis2_stop: Option<f64>,
    axis2_points: Option<usize>,
    links: Option<Vec<String>>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    trunc: Option<usize>,
    n_a: Option<usize>,
    n_b: Option<usize>,
    n_c: Option<usize>,
    method: Option<String>,
    tolerance: Option<f64>,
    evolve_rate: Option<f64>,
    t_max: Option<f64>,
    threads: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<String>,
    columns: Option<Vec<String>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a TOML sweep document. Unknown keys, unknown
/// parameter names and invariant violations are errors.
pub fn load_config(text: &str) -> Result<SweepConfig> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| Error::Config {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    build(raw)
}

fn parse_param(key: &str, value: &str) -> Result<Param> {
    value.parse().map_err(|_| config_err(format!("{key}: unknown parameter {value:?}")))
}

fn merge_axis(
    which: &str,
    existing: Option<Axis>,
    param: Option<String>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
) -> Result<Option<Axis>> {
    let any = param.is_some() || start.is_some() || stop.is_some() || points.is_some();
    if !any {
        return Ok(existing);
    }
    let mut axis = match (existing, &param) {
        (Some(a), _) => a,
        (None, Some(_)) => Axis::new(Param::DeltaA, f64::NAN, f64::NAN, 201),
        (None, None) => return Err(config_err(format!("{which}_param is required"))),
    };
    if let Some(p) = param {
        axis.param = parse_param(&format!("{which}_param"), &p)?;
    }
    let missing = |k: &str| config_err(format!("{which}_{k} is required"));
    axis.start = start.or(Some(axis.start).filter(|v| !v.is_nan())).ok_or_else(|| missing("start"))?;
    axis.stop = stop.or(Some(axis.stop).filter(|v| !v.is_nan())).ok_or_else(|| missing("stop"))?;
    if let Some(n) = points {
        axis.points = n;
    }
    Ok(Some(axis))
}

fn build(raw: RawDocument) -> Result<SweepConfig> {
    let preset = match &raw.preset {
        Some(name) => Some(presets::preset(name)?),
        None => None,
    };
    let mut base = preset.as_ref().map_or_else(ModelParams::default, |p| p.base);
    for (p, v) in raw.model.entries() {
        if let Some(v) = v {
            base.set(p, v);
        }
    }
    let s = raw.sweep;
    let axis1 = merge_axis("axis1", preset.as_ref().map(|p| p.axis1.clone()), s.axis1_param, s.axis1_start, s.axis1_stop, s.axis1_points)?
        .ok_or_else(|| config_err("[sweep] axis1_param is required"))?;
    let axis2 = merge_axis("axis2", preset.as_ref().and_then(|p| p.axis2.clone()), s.axis2_param, s.axis2_start, s.axis2_stop, s.axis2_points)?;
    let links = match s.links {
        Some(list) => list
            .iter()
            .map(|t| t.parse::<Link>().map_err(|e| config_err(format!("links: {e}"))))
            .collect::<Result<Vec<_>>>()?,
        None => preset.as_ref().map_or_else(Vec::new, |p| p.links.clone()),
    };

    let mut solver = preset.as_ref().map_or_else(SolverProfile::default, |p| p.solver.clone());
    let r = raw.solver;
    if let Some(n) = r.trunc {
        solver.truncation = Truncation::uniform(n);
    }
    if let Some(n) = r.n_a {
        solver.truncation.a = n;
    }
    if let Some(n) = r.n_b {
        solver.truncation.b = n;
    }
    if let Some(n) = r.n_c {
        solver.truncation.c = n;
    }
    if let Some(m) = r.method {
        solver.method = m.parse()?;
    }
    if let Some(t) = r.tolerance {
        solver.tolerance = t;
    }
    if let Some(t) = r.evolve_rate {
        solver.evolve_rate = t;
    }
    if let Some(t) = r.t_max {
        solver.t_max = t;
    }
    if r.threads.is_some() {
        solver.threads = r.threads;
    }

    let mut output = preset.as_ref().map_or_else(OutputSpec::default, |p| p.output.clone());
    if let Some(p) = raw.output.path {
        output.path = Some(p);
    }
    if let Some(f) = raw.output.format {
        output.format = f.parse()?;
    }
    if let Some(c) = raw.output.columns {
        output.columns = c;
    }

    let cfg = SweepConfig {
        name: raw.preset.clone(),
        base,
        axis1,
        axis2,
        links,
        solver,
        output,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
g = 11
J = 2

[sweep]
axis1_param = "delta_a"
axis1_start = -20
axis1_stop = 20
axis1_points = 5
"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = load_config(MINIMAL).unwrap();
        assert_eq!(cfg.base.g, 11.0);
        assert_eq!(cfg.base.j, 2.0);
        assert_eq!((cfg.base.kappa_a, cfg.base.kappa_b, cfg.base.kappa_c), (1.0, 1.0, 1.0));
        assert_eq!(cfg.base.gamma, 1.0);
        assert_eq!((cfg.base.nbar_a, cfg.base.nbar_sigma), (0.0, 0.0));
        assert_eq!(cfg.solver.truncation, Truncation::uniform(5));
        assert_eq!(cfg.axis1.values(), vec![-20.0, -10.0, 0.0, 10.0, 20.0]);
        assert_eq!(cfg.grid().len(), 5);
    }

    #[test]
    fn unknown_key_names_the_key_and_line() {
        let text = "[model]\ng = 1\ndelta_q = 3\n";
        match load_config(text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, Some(3));
                assert!(message.contains("delta_q"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(load_config("[solvers]\ntrunc = 3\n").is_err());
    }

    #[test]
    fn invariant_violations() {
        let bad_points = MINIMAL.replace("axis1_points = 5", "axis1_points = 1");
        assert!(matches!(load_config(&bad_points), Err(Error::Config { .. })));
        let same_ends = MINIMAL.replace("axis1_stop = 20", "axis1_stop = -20");
        assert!(load_config(&same_ends).is_err());
        let linked_axis = format!("{MINIMAL}links = [\"delta_a = 2 * g\"]\n");
        assert!(load_config(&linked_axis).unwrap_err().to_string().contains("link target"));
        let unknown_axis = MINIMAL.replace("\"delta_a\"", "\"delta_z\"");
        assert!(load_config(&unknown_axis).is_err());
        let no_axis = "[model]\ng = 1\n";
        assert!(load_config(no_axis).is_err());
    }

    #[test]
    fn preset_reference_expands_and_overrides() {
        let cfg = load_config("preset = \"fig3a\"\n[model]\ngamma = 0.5\n[solver]\ntrunc = 4\n").unwrap();
        assert_eq!((cfg.base.g, cfg.base.j, cfg.base.f_a, cfg.base.f_b, cfg.base.f_c), (11.0, 2.0, 0.1, 0.05, 0.05));
        assert_eq!(cfg.base.gamma, 0.5);
        assert_eq!(cfg.solver.truncation, Truncation::uniform(4));
        assert_eq!(cfg.axis1.param, Param::DeltaA);
        let p = cfg.point(&[7.5]);
        assert_eq!(p.delta_sigma, 7.5);
        assert_eq!(p.delta_b + p.delta_c, 7.5);
        assert!(load_config("preset = \"fig9\"\n").is_err());
    }

    #[test]
    fn second_axis_varies_slowest() {
        let text = format!("{MINIMAL}axis2_param = \"J\"\naxis2_start = 1\naxis2_stop = 2\naxis2_points = 2\n");
        let cfg = load_config(&text).unwrap();
        let grid = cfg.grid();
        assert_eq!(grid.len(), 10);
        assert_eq!(grid[0], vec![-20.0, 1.0]);
        assert_eq!(grid[5], vec![-20.0, 2.0]);
        assert_eq!(cfg.point(&grid[7]).j, 2.0);
    }

    #[test]
    fn solver_and_output_sections() {
        let text = format!(
            "{MINIMAL}[solver]\nn_a = 6\nn_b = 3\nmethod = \"evolve\"\nthreads = 2\n[output]\npath = \"x.csv\"\nformat = \"both\"\ncolumns = [\"g2_a\"]\n"
        );
        let cfg = load_config(&text).unwrap();
        assert_eq!(cfg.solver.truncation, Truncation { a: 6, b: 3, c: 5 });
        assert_eq!(cfg.solver.method, Method::Evolve);
        assert_eq!(cfg.solver.threads, Some(2));
        assert_eq!(cfg.output.format, Format::Both);
        assert_eq!(cfg.output.columns, vec!["g2_a".to_string()]);
        assert!(load_config(&format!("{MINIMAL}[solver]\nmethod = \"lu\"\n")).is_err());
        assert!(load_config(&format!("{MINIMAL}[solver]\ntrunc = 1\n")).is_err());
    }
}
