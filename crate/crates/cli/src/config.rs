//! Job configuration (TOML).
//!
//! ```toml
//! samples = 512
//! labels = "all"            # or [0, 1]
//!
//! [family]
//! builtin = "NonSymB"
//! alpha = [1.0, 0.0]        # complex numbers are [re, im]
//! beta = [2.0, 0.0]
//!
//! [[curve]]
//! kind = "circle"
//! center = [0.0, 0.0]
//! radius = 1.0
//! ```

use std::path::{Path, PathBuf};

use holonomy::family::{Monomial, PolyEntry, PolynomialFamily, MAX_POLY_DEGREE};
use holonomy::{example_family, CurveSpec, Example, MatrixFamily, C64};
use serde::Deserialize;

use crate::CliError;

pub type Complex = [f64; 2];

fn cx(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Phase,
    Curvature,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub family: FamilyConfig,
    #[serde(default, deserialize_with = "one_or_many")]
    pub curve: Vec<CurveConfig>,
    #[serde(default)]
    pub labels: Labels,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Commands this job may run; all of them when absent.
    pub commands: Option<Vec<Command>>,
    #[serde(default)]
    pub output: OutputConfig,
    pub curvature: Option<CurvatureConfig>,
    pub sweep: Option<SweepConfig>,
    /// Seed for the gauge-perturbation self-test of `phase`.
    pub seed: Option<u64>,
}

fn default_samples() -> usize {
    512
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<CurveConfig>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(Box<CurveConfig>),
        Many(Vec<CurveConfig>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(c) => vec![*c],
        OneOrMany::Many(v) => v,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub enum Labels {
    #[default]
    All,
    List(Vec<usize>),
}

impl<'de> Deserialize<'de> for Labels {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            List(Vec<usize>),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "all" => Ok(Labels::All),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("labels must be \"all\" or a list, got \"{w}\""))),
            Raw::List(v) => Ok(Labels::List(v)),
        }
    }
}

impl Labels {
    pub fn resolve(&self, dim: usize) -> Result<Vec<usize>, CliError> {
        match self {
            Labels::All => Ok((0..dim).collect()),
            Labels::List(v) => {
                if let Some(&bad) = v.iter().find(|&&l| l >= dim) {
                    return Err(CliError::Config(format!("label {bad} out of range for a {dim}x{dim} family")));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub builtin: Option<String>,
    pub alpha: Option<Complex>,
    pub beta: Option<Complex>,
    pub gamma: Option<f64>,
    pub polynomial: Option<PolynomialConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialConfig {
    #[serde(default = "two")]
    pub param_dim: usize,
    /// Row-major matrix of entries.
    pub entries: Vec<Vec<EntryConfig>>,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EntryConfig {
    /// Coefficients of a polynomial in `z = x0 + i x1`, constant term first.
    InZ(Vec<Complex>),
    Monomials(Vec<MonomialConfig>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialConfig {
    pub coeff: Complex,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationConfig {
    #[default]
    Positive,
    Negative,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub kind: String,
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub u: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub points: Option<Vec<Vec<f64>>>,
    pub coeffs: Option<Vec<Vec<f64>>>,
    #[serde(default = "yes")]
    pub closed: bool,
    #[serde(default)]
    pub orientation: OrientationConfig,
    pub period: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodsConfig {
    #[default]
    Sos,
    Ed,
    Both,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureConfig {
    /// `[min, max, n]` along the first axis.
    pub x: (f64, f64, usize),
    pub y: (f64, f64, usize),
    /// Coordinates that span the grid.
    #[serde(default = "default_axes")]
    pub axes: [usize; 2],
    /// Full parameter point; the grid overwrites the two axes.
    pub base: Option<Vec<f64>>,
    #[serde(default)]
    pub methods: MethodsConfig,
}

fn default_axes() -> [usize; 2] {
    [0, 1]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub durations: Vec<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_rel_tol() -> f64 {
    1e-10
}

pub const MIN_SAMPLES: usize = 8;

impl JobConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: JobConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.samples < MIN_SAMPLES {
            return Err(CliError::Config(format!("samples must be at least {MIN_SAMPLES}, got {}", self.samples)));
        }
        let family = self.build_family()?;
        for (i, c) in self.curve.iter().enumerate() {
            let curve = c.build().map_err(|e| CliError::Config(format!("curve {i}: {e}")))?;
            if curve.dim() != family.param_dim() {
                return Err(CliError::Config(format!(
                    "curve {i} lives in {} coordinates, the family takes {}",
                    curve.dim(),
                    family.param_dim()
                )));
            }
        }
        self.labels.resolve(family.dim())?;
        if let Some(g) = &self.curvature {
            if g.x.2 == 0 || g.y.2 == 0 {
                return Err(CliError::Config("curvature grid needs at least one point per axis".into()));
            }
            let d = family.param_dim();
            if g.axes[0] >= d || g.axes[1] >= d || g.axes[0] == g.axes[1] {
                return Err(CliError::Config(format!("curvature axes {:?} invalid for {d} coordinates", g.axes)));
            }
            if g.base.as_ref().is_some_and(|b| b.len() != d) {
                return Err(CliError::Config(format!("curvature base point needs {d} coordinates")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.durations.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                return Err(CliError::Config("sweep durations must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn allows(&self, cmd: Command) -> bool {
        self.commands.as_ref().is_none_or(|c| c.contains(&cmd))
    }

    pub fn build_family(&self) -> Result<Box<dyn MatrixFamily>, CliError> {
        self.family.build()
    }

    pub fn build_curves(&self) -> Result<Vec<CurveSpec>, CliError> {
        self.curve
            .iter()
            .enumerate()
            .map(|(i, c)| c.build().map_err(|e| CliError::Config(format!("curve {i}: {e}"))))
            .collect()
    }
}

impl FamilyConfig {
    pub fn build(&self) -> Result<Box<dyn MatrixFamily>, CliError> {
        let cfg = |m: String| CliError::Config(m);
        match (&self.builtin, &self.polynomial) {
            (Some(_), Some(_)) => Err(cfg("family takes either `builtin` or `polynomial`, not both".into())),
            (None, None) => Err(cfg("family needs `builtin` or `polynomial`".into())),
            (Some(name), None) => {
                let need_gamma = || self.gamma.ok_or_else(|| cfg(format!("{name} needs `gamma`")));
                let kind = match name.as_str() {
                    "H1" => Example::SquareRoot,
                    "H2block" => Example::Block3,
                    "SymA" => Example::SymA,
                    "SymB" => Example::SymB,
                    "NonSymA" => Example::NonSymA,
                    "NonSymB" => Example::NonSymB {
                        alpha: cx(self.alpha.ok_or_else(|| cfg("NonSymB needs `alpha`".into()))?),
                        beta: cx(self.beta.ok_or_else(|| cfg("NonSymB needs `beta`".into()))?),
                    },
                    "ThreeParam" => Example::ThreeParam { gamma: need_gamma()? },
                    "ThreeParamSlice" => Example::ThreeParamSlice { gamma: need_gamma()? },
                    "SpinHalf" => Example::SpinHalf,
                    other => return Err(cfg(format!("unknown builtin family `{other}`"))),
                };
                let f = example_family(kind).map_err(|e| cfg(e.to_string()))?;
                Ok(Box::new(f))
            }
            (None, Some(p)) => {
                let entries = p
                    .entries
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| match e {
                                EntryConfig::InZ(c) => {
                                    if c.len() > MAX_POLY_DEGREE + 1 {
                                        return Err(cfg(format!("polynomial degree exceeds {MAX_POLY_DEGREE}")));
                                    }
                                    Ok(PolyEntry::InZ(c.iter().copied().map(cx).collect()))
                                }
                                EntryConfig::Monomials(ms) => Ok(PolyEntry::Monomials(
                                    ms.iter().map(|m| Monomial { coeff: cx(m.coeff), powers: m.powers.clone() }).collect(),
                                )),
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let f = PolynomialFamily::new(p.param_dim, entries).map_err(|e| cfg(e.to_string()))?;
                Ok(Box::new(f))
            }
        }
    }
}

impl CurveConfig {
    pub fn build(&self) -> Result<CurveSpec, String> {
        let need = |v: &Option<f64>, what: &str| v.ok_or_else(|| format!("{} curve needs `{what}`", self.kind));
        let needv = |v: &Option<Vec<f64>>, what: &str| v.clone().ok_or_else(|| format!("{} curve needs `{what}`", self.kind));
        let curve = match self.kind.as_str() {
            "circle" => CurveSpec::circle(needv(&self.center, "center")?, need(&self.radius, "radius")?),
            "ellipse" => CurveSpec::ellipse(
                needv(&self.center, "center")?,
                needv(&self.u, "u")?,
                needv(&self.v, "v")?,
                need(&self.a, "a")?,
                need(&self.b, "b")?,
            ),
            "polyline" => CurveSpec::polyline(self.points.clone().ok_or("polyline curve needs `points`")?, self.closed),
            "polynomial" => {
                let coeffs = self.coeffs.clone().ok_or("polynomial curve needs `coeffs`")?;
                if coeffs.iter().any(|c| c.len() > MAX_POLY_DEGREE + 1) {
                    return Err(format!("polynomial degree exceeds {MAX_POLY_DEGREE}"));
                }
                CurveSpec::polynomial(coeffs, self.closed)
            }
            other => return Err(format!("unknown curve kind `{other}`")),
        }
        .map_err(|e| e.to_string())?;
        let curve = match self.period {
            Some(p) => curve.with_period(p).map_err(|e| e.to_string())?,
            None => curve,
        };
        Ok(match self.orientation {
            OrientationConfig::Positive => curve,
            OrientationConfig::Negative => curve.reversed(),
        })
    }
}
