//! Command-line and config-file options, merged into a [`RunConfig`].

use std::ffi::OsString;
use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dipolecav::analysis::{Geometry, Placement, SweepSpec, XGrid};
use dipolecav::channel::{ChannelGeometry, ModeSet};
use dipolecav::planar::PlanarGeometry;
use dipolecav::tensor::Component;
use dipolecav::SumControl;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "dipolecav", version, about = "Dipole-dipole coupling tensors in free space and ideal cavities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Separation sweep in 3D free space.
    Free3d(Options),
    /// Separation sweep of the 2D layer coupling.
    Free2d(Options),
    /// Separation sweep of the 1D wire coupling.
    Free1d(Options),
    /// Separation sweep in a planar cavity.
    Planar(Options),
    /// Separation sweep in a rectangular channel.
    Channel(Options),
    /// Separation sweep for the geometry named by --geometry.
    Sweep(Options),
    /// Local exponents only.
    Exponent(Options),
    /// Cavity over free-space magnitude ratio.
    Enhance(Options),
    /// Closed form against quadrature on seeded random configurations.
    Oracle(Options),
}

/// Every option is kept as text until merging, so flags and config entries
/// go through the same parser. Lengths accept the suffixes `pi_over_p`
/// (units of pi/p), `over_p`, `L`, `a` and `b`; a bare number is in units
/// of 1/p.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// TOML file with the same keys as the long flags (`-` written as `_`).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// free3d, free2d, free1d, planar or channel.
    #[arg(long)]
    pub geometry: Option<String>,
    /// Exciton wavenumber.
    #[arg(long)]
    pub p: Option<String>,
    /// Permittivity.
    #[arg(long)]
    pub eps: Option<String>,
    /// Plate separation (planar) or layer thickness (free2d).
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<String>,
    /// Channel or wire width along y.
    #[arg(long)]
    pub a: Option<String>,
    /// Channel or wire width along z.
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long = "yA")]
    #[serde(rename = "yA")]
    pub y_a: Option<String>,
    #[arg(long = "zA")]
    #[serde(rename = "zA")]
    pub z_a: Option<String>,
    #[arg(long = "yD")]
    #[serde(rename = "yD")]
    pub y_d: Option<String>,
    #[arg(long = "zD")]
    #[serde(rename = "zD")]
    pub z_d: Option<String>,
    #[arg(long)]
    pub xmin: Option<String>,
    #[arg(long)]
    pub xmax: Option<String>,
    #[arg(long)]
    pub points: Option<String>,
    /// Comma-separated subset of xx,yy,zz,xy,xz,yz (or any ij).
    #[arg(long)]
    pub components: Option<String>,
    /// Points in the local-exponent window (odd, at least 3).
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub rel_tol: Option<String>,
    #[arg(long)]
    pub exp_cutoff: Option<String>,
    #[arg(long)]
    pub max_terms: Option<String>,
    #[arg(long)]
    pub tol_res: Option<String>,
    /// Imaginary shift of p for quadrature, relative to p.
    #[arg(long)]
    pub eps_imag: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Number of random configurations for `oracle`.
    #[arg(long)]
    pub count: Option<String>,
    /// Channel oracle mode functions: transverse or flipped-tm.
    #[arg(long)]
    pub modes: Option<String>,
    /// Largest acceptable oracle relative error.
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

impl Options {
    /// Fields set here win over `file`.
    fn over(self, file: Options) -> Options {
        Options {
            config: self.config,
            geometry: self.geometry.or(file.geometry),
            p: self.p.or(file.p),
            eps: self.eps.or(file.eps),
            l: self.l.or(file.l),
            a: self.a.or(file.a),
            b: self.b.or(file.b),
            y_a: self.y_a.or(file.y_a),
            z_a: self.z_a.or(file.z_a),
            y_d: self.y_d.or(file.y_d),
            z_d: self.z_d.or(file.z_d),
            xmin: self.xmin.or(file.xmin),
            xmax: self.xmax.or(file.xmax),
            points: self.points.or(file.points),
            components: self.components.or(file.components),
            window: self.window.or(file.window),
            rel_tol: self.rel_tol.or(file.rel_tol),
            exp_cutoff: self.exp_cutoff.or(file.exp_cutoff),
            max_terms: self.max_terms.or(file.max_terms),
            tol_res: self.tol_res.or(file.tol_res),
            eps_imag: self.eps_imag.or(file.eps_imag),
            seed: self.seed.or(file.seed),
            count: self.count.or(file.count),
            modes: self.modes.or(file.modes),
            tol: self.tol.or(file.tol),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleGeometry {
    Planar,
    Channel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    pub geometry: OracleGeometry,
    pub p: f64,
    pub permittivity: f64,
    pub seed: u64,
    pub count: usize,
    pub components: Vec<Component>,
    pub ctrl: SumControl,
    pub modes: ModeSet,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Sweep(SweepSpec),
    Exponent(SweepSpec),
    Enhance(SweepSpec),
    Oracle(OracleSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn stringify(key: &str, v: toml::Value) -> Result<toml::Value, CliError> {
    let text = match v {
        toml::Value::String(s) => s,
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .into_iter()
            .map(|i| match i {
                toml::Value::String(s) => Ok(s),
                other => Err(usage(format!("config key '{key}': expected strings, got {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        other => return Err(usage(format!("config key '{key}': unsupported value {other}"))),
    };
    Ok(toml::Value::String(text))
}

/// Reads a TOML config; any key that is not an option is an error naming it.
pub fn read_config_file(path: &std::path::Path) -> Result<Options, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut flat = toml::Table::new();
    for (k, v) in table {
        let v = stringify(&k, v)?;
        flat.insert(k, v);
    }
    Options::deserialize(toml::Value::Table(flat)).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn number(key: &str, s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| usage(format!("--{key}: cannot parse '{s}' as a number")))
}

fn integer<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, CliError> {
    let t = s.trim();
    t.parse::<T>()
        .or_else(|_| match t.parse::<f64>() {
            Ok(f) if f.fract() == 0.0 && f >= 0.0 => format!("{f:.0}").parse::<T>().map_err(|_| ()),
            _ => Err(()),
        })
        .map_err(|_| usage(format!("--{key}: cannot parse '{s}' as a non-negative integer")))
}

/// Known length scales for suffix resolution.
#[derive(Debug, Clone, Copy)]
struct Scales {
    p: f64,
    l: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
}

fn length(key: &str, s: &str, sc: &Scales) -> Result<f64, CliError> {
    let t = s.trim();
    let table: [(&str, Option<f64>); 5] =
        [("pi_over_p", Some(PI / sc.p)), ("over_p", Some(1.0 / sc.p)), ("L", sc.l), ("a", sc.a), ("b", sc.b)];
    for (suffix, unit) in table {
        if let Some(head) = t.strip_suffix(suffix) {
            let unit = unit.ok_or_else(|| usage(format!("--{key} '{s}': '{suffix}' is not defined here")))?;
            let factor = if head.is_empty() { 1.0 } else { number(key, head)? };
            return Ok(factor * unit);
        }
    }
    Ok(number(key, t)? / sc.p)
}

fn required<'a>(key: &str, v: &'a Option<String>, cmd: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| usage(format!("{cmd} requires --{key}")))
}

fn parse_components(s: &str) -> Result<Vec<Component>, CliError> {
    let list: Vec<Component> = s
        .split(',')
        .filter(|c| !c.trim().is_empty())
        .map(|c| c.parse::<Component>().map_err(|e| usage(format!("--components: {e}"))))
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(usage("--components: empty list"));
    }
    Ok(list)
}

fn core(e: dipolecav::Error) -> CliError {
    usage(e.to_string())
}

fn build_geometry(name: &str, o: &Options, sc: &mut Scales, eps: f64) -> Result<Geometry, CliError> {
    let length_of = |key: &str, v: &Option<String>, sc: &Scales| -> Result<f64, CliError> {
        length(key, required(key, v, name)?, sc)
    };
    Ok(match name {
        "free3d" => Geometry::Free3d { permittivity: eps },
        "free2d" => {
            let l = length_of("L", &o.l, sc)?;
            sc.l = Some(l);
            Geometry::Free2d { l, permittivity: eps }
        }
        "free1d" => {
            let (a, b) = (length_of("a", &o.a, sc)?, length_of("b", &o.b, sc)?);
            sc.a = Some(a);
            sc.b = Some(b);
            Geometry::Free1d { a, b, permittivity: eps }
        }
        "planar" => {
            let l = length_of("L", &o.l, sc)?;
            sc.l = Some(l);
            Geometry::Planar(PlanarGeometry::new(l, eps).map_err(core)?)
        }
        "channel" => {
            let (a, b) = (length_of("a", &o.a, sc)?, length_of("b", &o.b, sc)?);
            sc.a = Some(a);
            sc.b = Some(b);
            Geometry::Channel(ChannelGeometry::new(a, b, eps).map_err(core)?)
        }
        other => return Err(usage(format!("unknown geometry '{other}'"))),
    })
}

fn build_ctrl(o: &Options, mut ctrl: SumControl) -> Result<SumControl, CliError> {
    if let Some(v) = &o.rel_tol {
        ctrl.rel_tol = number("rel-tol", v)?;
    }
    if let Some(v) = &o.exp_cutoff {
        ctrl.exp_cutoff = number("exp-cutoff", v)?;
    }
    if let Some(v) = &o.max_terms {
        ctrl.max_terms = integer("max-terms", v)?;
    }
    if let Some(v) = &o.tol_res {
        ctrl.tol_res = number("tol-res", v)?;
    }
    if let Some(v) = &o.eps_imag {
        ctrl.eps_imag = number("eps-imag", v)?;
    }
    ctrl.validate().map_err(core)?;
    Ok(ctrl)
}

fn build_sweep(name: &str, o: &Options, p: f64, eps: f64) -> Result<SweepSpec, CliError> {
    let mut sc = Scales { p, l: None, a: None, b: None };
    let geometry = build_geometry(name, o, &mut sc, eps)?;
    let mut placement = Placement::centered(&geometry);
    for (key, v, slot) in [
        ("yA", &o.y_a, &mut placement.y_a),
        ("zA", &o.z_a, &mut placement.z_a),
        ("yD", &o.y_d, &mut placement.y_d),
        ("zD", &o.z_d, &mut placement.z_d),
    ] {
        if let Some(s) = v {
            *slot = length(key, s, &sc)?;
        }
    }
    let x_grid = XGrid {
        min: o.xmin.as_deref().map_or(Ok(0.01 / p), |s| length("xmin", s, &sc))?,
        max: o.xmax.as_deref().map_or(Ok(100.0 / p), |s| length("xmax", s, &sc))?,
        count: o.points.as_deref().map_or(Ok(200), |s| integer("points", s))?,
    };
    let spec = SweepSpec {
        geometry,
        p,
        placement,
        x_grid,
        components: parse_components(o.components.as_deref().unwrap_or("xx,yy,zz"))?,
        ctrl: build_ctrl(o, SumControl::default())?,
        window: o.window.as_deref().map_or(Ok(5), |s| integer("window", s))?,
    };
    spec.validate().map_err(core)?;
    Ok(spec)
}

fn build_oracle(o: &Options, p: f64, eps: f64) -> Result<OracleSpec, CliError> {
    let geometry = match o.geometry.as_deref().unwrap_or("planar") {
        "planar" => OracleGeometry::Planar,
        "channel" => OracleGeometry::Channel,
        other => return Err(usage(format!("oracle supports planar and channel, not '{other}'"))),
    };
    let base = match geometry {
        OracleGeometry::Planar => SumControl { exp_cutoff: 25.0, rel_tol: 1e-9, ..SumControl::default() },
        OracleGeometry::Channel => SumControl { exp_cutoff: 20.0, rel_tol: 1e-8, eps_imag: 1e-8, ..SumControl::default() },
    };
    let default_components = match geometry {
        OracleGeometry::Planar => "xx,yy,zz,xy,xz,yz",
        OracleGeometry::Channel => "xx",
    };
    let modes = match o.modes.as_deref().unwrap_or("transverse") {
        "transverse" => ModeSet::Transverse,
        "flipped-tm" => ModeSet::FlippedTm,
        other => return Err(usage(format!("--modes: expected transverse or flipped-tm, got '{other}'"))),
    };
    Ok(OracleSpec {
        geometry,
        p,
        permittivity: eps,
        seed: o.seed.as_deref().map_or(Ok(1), |s| integer("seed", s))?,
        count: o.count.as_deref().map_or(Ok(10), |s| integer("count", s))?,
        components: parse_components(o.components.as_deref().unwrap_or(default_components))?,
        ctrl: build_ctrl(o, base)?,
        modes,
        tol: o.tol.as_deref().map_or(Ok(1e-4), |s| number("tol", s))?,
    })
}

/// Parses `argv` (program name first), merging in `--config` if given.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let (name, opts) = match cli.command {
        Command::Free3d(o) => ("free3d", o),
        Command::Free2d(o) => ("free2d", o),
        Command::Free1d(o) => ("free1d", o),
        Command::Planar(o) => ("planar", o),
        Command::Channel(o) => ("channel", o),
        Command::Sweep(o) => ("sweep", o),
        Command::Exponent(o) => ("exponent", o),
        Command::Enhance(o) => ("enhance", o),
        Command::Oracle(o) => ("oracle", o),
    };
    let opts = match &opts.config {
        Some(path) => {
            let file = read_config_file(path)?;
            opts.over(file)
        }
        None => opts,
    };
    build(name, &opts)
}

/// Builds the run from merged options.
pub fn build(name: &str, o: &Options) -> Result<RunConfig, CliError> {
    let p = o.p.as_deref().map_or(Ok(1.0), |s| number("p", s))?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(usage(format!("--p must be positive, got {p}")));
    }
    let eps = o.eps.as_deref().map_or(Ok(1.0), |s| number("eps", s))?;
    let format = match o.format.as_deref().unwrap_or("csv") {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(usage(format!("--format: expected csv or json, got '{other}'"))),
    };
    let named = |cmd: &str| -> Result<String, CliError> {
        o.geometry.clone().ok_or_else(|| usage(format!("{cmd} requires --geometry")))
    };
    let task = match name {
        "sweep" => Task::Sweep(build_sweep(&named(name)?, o, p, eps)?),
        "exponent" => Task::Exponent(build_sweep(&named(name)?, o, p, eps)?),
        "enhance" => Task::Enhance(build_sweep(&named(name)?, o, p, eps)?),
        "oracle" => Task::Oracle(build_oracle(o, p, eps)?),
        geometry => {
            if o.geometry.as_deref().is_some_and(|g| g != geometry) {
                return Err(usage(format!("--geometry conflicts with the {geometry} subcommand")));
            }
            Task::Sweep(build_sweep(geometry, o, p, eps)?)
        }
    };
    Ok(RunConfig { task, out: o.out.clone(), format })
}
