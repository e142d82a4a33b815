//! Run configuration: built-in defaults, then a `key = value` file, then
//! command-line flags. Every value remembers where it came from so parse
//! errors can point at the offending line or flag.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::filters::{appendix_family, FilterFamily, WitnessCharFn};
use crate::fock::{DensityMatrix, FockSpace, DEFAULT_TAIL_TOL};
use crate::point::ComplexPoint;
use crate::transform::QuadConfig;

pub const KEYS: &[&str] = &[
    "state",
    "nbar",
    "eta",
    "dim",
    "tail_tol",
    "w",
    "w_min",
    "w_max",
    "w_step",
    "w_tol",
    "widths",
    "nbars",
    "alpha_re",
    "alpha_im",
    "grid",
    "grid_extent",
    "filter",
    "quad_radial",
    "quad_angular",
    "quad_tol",
    "quad_doublings",
    "format",
    "out",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    File { path: PathBuf, line: usize },
    Flag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn locate(key: &str, source: &Source) -> String {
    match source {
        Source::File { path, line } => format!("{}:{line}, field `{key}`", path.display()),
        Source::Flag => format!("flag --{}", key.replace('_', "-")),
    }
}

/// Raw settings before validation.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, (String, Source)>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            location: path.display().to_string(),
            message: format!("cannot read config file: {e}"),
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let mut settings = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let here = || format!("{}:{line}", path.display());
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
                location: here(),
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError {
                    location: here(),
                    message: format!("unknown field `{key}`"),
                });
            }
            let source = Source::File {
                path: path.to_path_buf(),
                line,
            };
            settings.values.insert(key, (value.trim().to_string(), source));
        }
        Ok(settings)
    }

    pub fn set_flag(&mut self, key: &str, value: impl ToString) {
        debug_assert!(KEYS.contains(&key));
        self.values
            .insert(key.to_string(), (value.to_string(), Source::Flag));
    }

    fn raw(&self, key: &str) -> Option<&(String, Source)> {
        self.values.get(key)
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((v, src)) => v.parse::<T>().map(Some).map_err(|e| ConfigError {
                location: locate(key, src),
                message: format!("cannot parse `{v}`: {e}"),
            }),
        }
    }

    fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, src)) => v
                .split(',')
                .map(|x| {
                    x.trim().parse::<f64>().map_err(|e| ConfigError {
                        location: locate(key, src),
                        message: format!("cannot parse `{x}` in list: {e}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let location = match self.raw(key) {
            Some((_, src)) => locate(key, src),
            None => format!("field `{key}`"),
        };
        ConfigError {
            location,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateSpec {
    Vacuum,
    Fock { n: usize },
    Coherent { re: f64, im: f64 },
    Thermal { nbar: f64 },
    Spats { nbar: f64, eta: f64 },
}

impl StateSpec {
    pub fn build(&self, space: &FockSpace) -> crate::Result<DensityMatrix> {
        match *self {
            StateSpec::Vacuum => Ok(space.vacuum()),
            StateSpec::Fock { n } => space.fock(n),
            StateSpec::Coherent { re, im } => space.coherent(ComplexPoint::new(re, im)?),
            StateSpec::Thermal { nbar } => space.thermal(nbar),
            StateSpec::Spats { nbar, eta } => space.spats(nbar, eta),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Vacuum => write!(f, "vacuum"),
            StateSpec::Fock { n } => write!(f, "fock:{n}"),
            StateSpec::Coherent { re, im } => write!(f, "coherent:{re},{im}"),
            StateSpec::Thermal { nbar } => write!(f, "thermal:{nbar}"),
            StateSpec::Spats { nbar, eta } => write!(f, "spats:{nbar},{eta}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterChoice {
    Disc,
    DiscNormalized,
    Reference,
    Appendix,
}

impl FilterChoice {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "disc" => Some(Self::Disc),
            "disc-normalized" => Some(Self::DiscNormalized),
            "reference" => Some(Self::Reference),
            "appendix" => Some(Self::Appendix),
            _ => None,
        }
    }

    pub fn family(&self) -> FilterFamily {
        match self {
            Self::Disc => FilterFamily::disc(),
            Self::DiscNormalized => FilterFamily::disc_normalized(),
            Self::Reference => FilterFamily::reference(),
            Self::Appendix => appendix_family(
                &WitnessCharFn::disc(1.0).expect("unit width is valid"),
                &FilterFamily::reference(),
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Validated configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub state: StateSpec,
    pub dim: usize,
    pub tail_tol: f64,
    pub w: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub w_step: f64,
    pub w_tol: f64,
    pub widths: Vec<f64>,
    pub nbars: Vec<f64>,
    pub eta: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub grid: usize,
    pub grid_extent: f64,
    pub filter: FilterChoice,
    pub quad: QuadConfig,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Per-command defaults that differ between subcommands.
#[derive(Clone, Copy, Debug)]
pub struct Defaults {
    pub dim: usize,
    pub filter: FilterChoice,
    pub eta: f64,
    pub state_required: bool,
}

fn parse_state(settings: &Settings, nbar: Option<f64>, eta: Option<f64>) -> Result<StateSpec, ConfigError> {
    let Some((text, _)) = settings.raw("state") else {
        return Err(settings.error("state", "no state given (use --state KIND[:PARAMS])"));
    };
    let (kind, params) = match text.split_once(':') {
        Some((k, p)) => (k.trim(), Some(p.trim())),
        None => (text.trim(), None),
    };
    let numbers: Vec<f64> = match params {
        None => Vec::new(),
        Some(p) => p
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| settings.error("state", format!("bad parameters `{p}`: {e}")))?,
    };
    let arity = |n: usize| -> Result<(), ConfigError> {
        if numbers.len() > n {
            Err(settings.error("state", format!("`{kind}` takes at most {n} parameter(s)")))
        } else {
            Ok(())
        }
    };
    let need_nbar = |pos: usize| -> Result<f64, ConfigError> {
        numbers.get(pos).copied().or(nbar).ok_or_else(|| {
            settings.error(
                "state",
                format!("`{kind}` needs a mean photon number (spec `{kind}:NBAR` or --nbar)"),
            )
        })
    };
    match kind {
        "vacuum" => {
            arity(0)?;
            Ok(StateSpec::Vacuum)
        }
        "fock" => {
            arity(1)?;
            let n = numbers
                .first()
                .copied()
                .ok_or_else(|| settings.error("state", "`fock` needs a photon number, e.g. fock:1"))?;
            if n < 0.0 || n.fract() != 0.0 {
                return Err(settings.error(
                    "state",
                    format!("photon number {n} must be a nonnegative integer"),
                ));
            }
            Ok(StateSpec::Fock { n: n as usize })
        }
        "coherent" => {
            arity(2)?;
            let re = numbers.first().copied().unwrap_or(0.0);
            let im = numbers.get(1).copied().unwrap_or(0.0);
            Ok(StateSpec::Coherent { re, im })
        }
        "thermal" => {
            arity(1)?;
            Ok(StateSpec::Thermal { nbar: need_nbar(0)? })
        }
        "spats" => {
            arity(2)?;
            let nbar = need_nbar(0)?;
            let eta = numbers.get(1).copied().or(eta).unwrap_or(1.0);
            Ok(StateSpec::Spats { nbar, eta })
        }
        other => Err(settings.error(
            "state",
            format!("unknown state kind `{other}` (vacuum, fock, coherent, thermal, spats)"),
        )),
    }
}

impl RunConfig {
    pub fn resolve(settings: &Settings, defaults: Defaults) -> Result<Self, ConfigError> {
        let nbar: Option<f64> = settings.get("nbar")?;
        let eta_opt: Option<f64> = settings.get("eta")?;
        let state = if defaults.state_required || settings.raw("state").is_some() {
            parse_state(settings, nbar, eta_opt)?
        } else {
            StateSpec::Vacuum
        };
        let positive = |key: &str, v: f64| -> Result<f64, ConfigError> {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(settings.error(key, format!("must be positive and finite, got {v}")))
            }
        };
        let finite = |key: &str, v: f64| -> Result<f64, ConfigError> {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(settings.error(key, format!("must be finite, got {v}")))
            }
        };

        let dim: usize = settings.get("dim")?.unwrap_or(defaults.dim);
        if dim == 0 {
            return Err(settings.error("dim", "must be at least 1"));
        }
        let tail_tol = positive("tail_tol", settings.get("tail_tol")?.unwrap_or(DEFAULT_TAIL_TOL))?;
        let w = positive("w", settings.get("w")?.unwrap_or(1.0))?;
        let w_min = positive("w_min", settings.get("w_min")?.unwrap_or(0.5))?;
        let w_max = positive("w_max", settings.get("w_max")?.unwrap_or(6.0))?;
        let w_step = positive("w_step", settings.get("w_step")?.unwrap_or(0.1))?;
        if w_max < w_min {
            return Err(settings.error("w_max", format!("w_max {w_max} is below w_min {w_min}")));
        }
        let w_tol = positive("w_tol", settings.get("w_tol")?.unwrap_or(1e-4))?;
        let widths = settings
            .get_list("widths")?
            .unwrap_or_else(|| vec![1.0, 1.5, 2.0, 4.0]);
        for &v in &widths {
            positive("widths", v)?;
        }
        let nbars = settings.get_list("nbars")?.unwrap_or_else(|| vec![0.8, 1.0, 1.2]);
        for &v in &nbars {
            if !(v >= 0.0) {
                return Err(settings.error("nbars", format!("mean photon numbers must be >= 0, got {v}")));
            }
        }
        let eta = eta_opt.unwrap_or(defaults.eta);
        if !(0.0..=1.0).contains(&eta) {
            return Err(settings.error("eta", format!("efficiency {eta} outside [0, 1]")));
        }
        if let Some(n) = nbar {
            if !(n >= 0.0) {
                return Err(settings.error("nbar", format!("mean photon number {n} must be >= 0")));
            }
        }
        let alpha_re = finite("alpha_re", settings.get("alpha_re")?.unwrap_or(0.0))?;
        let alpha_im = finite("alpha_im", settings.get("alpha_im")?.unwrap_or(0.0))?;
        let grid: usize = settings.get("grid")?.unwrap_or(13);
        if grid == 0 {
            return Err(settings.error("grid", "must be at least 1"));
        }
        let grid_extent = positive("grid_extent", settings.get("grid_extent")?.unwrap_or(3.0))?;
        let filter = match settings.raw("filter") {
            None => defaults.filter,
            Some((v, _)) => FilterChoice::parse(v).ok_or_else(|| {
                settings.error(
                    "filter",
                    format!("unknown filter `{v}` (disc, disc-normalized, reference, appendix)"),
                )
            })?,
        };
        let base = QuadConfig::default();
        let quad = QuadConfig {
            radial: settings.get("quad_radial")?.unwrap_or(base.radial),
            angular: settings.get("quad_angular")?.unwrap_or(base.angular),
            tol: positive("quad_tol", settings.get("quad_tol")?.unwrap_or(base.tol))?,
            max_doublings: settings.get("quad_doublings")?.unwrap_or(base.max_doublings),
        };
        if quad.radial < 2 || quad.angular < 4 {
            return Err(settings.error("quad_radial", "quadrature orders too small"));
        }
        let format = match settings.raw("format").map(|(v, _)| v.as_str()) {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => {
                return Err(settings.error("format", format!("unknown format `{other}` (csv, json)")))
            }
        };
        let out = settings.raw("out").map(|(v, _)| PathBuf::from(v));
        Ok(Self {
            state,
            dim,
            tail_tol,
            w,
            w_min,
            w_max,
            w_step,
            w_tol,
            widths,
            nbars,
            eta,
            alpha_re,
            alpha_im,
            grid,
            grid_extent,
            filter,
            quad,
            format,
            out,
        })
    }

    pub fn space(&self) -> crate::Result<FockSpace> {
        Ok(FockSpace::new(self.dim)?.with_tail_tol(self.tail_tol))
    }

    pub fn alpha(&self) -> ComplexPoint {
        ComplexPoint {
            re: self.alpha_re,
            im: self.alpha_im,
        }
    }

    /// `w_min, w_min + step, …` up to `w_max` inclusive (within rounding).
    pub fn w_grid(&self) -> Vec<f64> {
        let count = ((self.w_max - self.w_min) / self.w_step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.w_min + self.w_step * i as f64).collect()
    }
}
