//! Run configuration: TOML sections `[case]`, `[functions]`, `[grid]`,
//! `[integrate]`, `[check]`, `[canon]` and `[output]`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use lielorentz::fieldgen::{
    build_case_a, build_case_b, build_case_b_raw, build_case_c, build_case_c_raw, build_case_d,
    faraday_complete_case_a, faraday_complete_case_d, FieldFamily, FreeFunctions, PlanarExpr, LAB_VARS,
};
use lielorentz::symcore::{CanonicalMap, Interval, SymmetryParams, TimeFn, DEFAULT_CACHE_NODES};
use lielorentz::verify::{Axis, GridSpec, DEFAULT_FARADAY_TOL, DEFAULT_TOL};
use lielorentz::{Expression, PLANE_VARS};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Current config schema version.
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "version")]
    pub version: u32,
    pub case: CaseSection,
    #[serde(default)]
    pub functions: Functions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrate: Option<IntegrateSection>,
    #[serde(default)]
    pub check: CheckSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canon: Option<CanonSection>,
    #[serde(default)]
    pub output: OutputSection,
}

fn version() -> u32 {
    VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseKind {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSection {
    pub kind: CaseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Constant rotation rate of case B.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub interval: [f64; 2],
    #[serde(default = "cache_nodes")]
    pub cache_nodes: usize,
}

fn cache_nodes() -> usize {
    DEFAULT_CACHE_NODES
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Functions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_bar: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1_bar: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2_bar: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_bar: Option<String>,
    #[serde(default)]
    pub complete_faraday: bool,
}

/// `[min, max, count]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec(pub f64, pub f64, pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x: AxisSpec,
    pub y: AxisSpec,
    #[serde(default = "single_time")]
    pub t: AxisSpec,
}

fn single_time() -> AxisSpec {
    AxisSpec(0.0, 0.0, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameChoice {
    Lab,
    Canonical,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateSection {
    pub t0: f64,
    pub t1: f64,
    #[serde(default = "step")]
    pub step: f64,
    /// `[x, y, vx, vy]` at `t0`.
    pub initial: [f64; 4],
    #[serde(default = "lab")]
    pub frame: FrameChoice,
    #[serde(default = "yes")]
    pub estimate_error: bool,
    #[serde(default)]
    pub plot: bool,
}

fn step() -> f64 {
    lielorentz::dynamics::DEFAULT_STEP
}

fn lab() -> FrameChoice {
    FrameChoice::Lab
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    #[serde(default = "tol")]
    pub tol: f64,
    #[serde(default = "yes")]
    pub faraday: bool,
    #[serde(default = "faraday_tol")]
    pub faraday_tol: f64,
    #[serde(default)]
    pub orbit: bool,
    #[serde(default = "epsilon")]
    pub epsilon: f64,
    #[serde(default = "orbit_states")]
    pub orbit_states: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_span: Option<[f64; 2]>,
    #[serde(default = "step")]
    pub orbit_step: f64,
    /// Lab-frame expression in (x, y, t) added to E₂ before checking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt_e2: Option<String>,
}

fn tol() -> f64 {
    DEFAULT_TOL
}

fn faraday_tol() -> f64 {
    DEFAULT_FARADAY_TOL
}

fn epsilon() -> f64 {
    1e-3
}

fn orbit_states() -> usize {
    10
}

impl Default for CheckSection {
    fn default() -> Self {
        CheckSection {
            tol: tol(),
            faraday: true,
            faraday_tol: faraday_tol(),
            orbit: false,
            epsilon: epsilon(),
            orbit_states: orbit_states(),
            orbit_span: None,
            orbit_step: step(),
            corrupt_e2: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToCanonical,
    FromCanonical,
}

fn to_canonical() -> Direction {
    Direction::ToCanonical
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonSection {
    #[serde(default = "to_canonical")]
    pub direction: Direction,
    #[serde(default)]
    pub points: Vec<[f64; 3]>,
    /// CSV trajectory (`t,q1,q2,v1,v2`) to transform, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    /// Canonical TOML form; parsing it yields an equal config.
    pub fn normalized(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != VERSION {
            return Err(config_err(format!(
                "version: unsupported config version {}",
                self.version
            )));
        }
        let c = &self.case;
        let f = &self.functions;
        let [start, end] = c.interval;
        if !(start < end) {
            return Err(config_err("case.interval: start must be below end"));
        }
        if c.cache_nodes < 2 {
            return Err(config_err("case.cache_nodes: need at least 2"));
        }
        let forbid = |present: bool, key: &str| -> Result<(), CliError> {
            if present {
                Err(config_err(format!("{key}: not used by case {:?}", c.kind)))
            } else {
                Ok(())
            }
        };
        let require = |present: bool, key: &str| -> Result<(), CliError> {
            if present {
                Ok(())
            } else {
                Err(config_err(format!("{key}: required for case {:?}", c.kind)))
            }
        };
        match c.kind {
            CaseKind::A => {
                require(f.rho.is_some(), "functions.rho")?;
                forbid(c.omega.is_some(), "case.omega")?;
                forbid(f.a1.is_some() || f.a2.is_some(), "functions.a1/a2")?;
                forbid(f.psi.is_some() || f.v_bar.is_some(), "functions.psi/v_bar")?;
                forbid(
                    f.complete_faraday && f.e2_bar.is_some(),
                    "functions.e2_bar (completed from b_bar and e1_bar)",
                )?;
            }
            CaseKind::B => {
                require(c.omega.is_some(), "case.omega")?;
                forbid(c.k.is_some(), "case.k")?;
                forbid(f.rho.is_some() || f.omega.is_some(), "functions.rho/omega")?;
                forbid(f.alpha1.is_some() || f.alpha2.is_some(), "functions.alpha1/alpha2")?;
                forbid(f.v_bar.is_some(), "functions.v_bar")?;
                forbid(
                    f.psi.is_some() && (f.b_bar.is_some() || f.e2_bar.is_some()),
                    "functions.b_bar/e2_bar (derived from psi)",
                )?;
                forbid(
                    f.complete_faraday && f.psi.is_none(),
                    "functions.complete_faraday (give psi instead)",
                )?;
            }
            CaseKind::C => {
                require(f.a2.is_some(), "functions.a2")?;
                forbid(c.k.is_some() || c.omega.is_some(), "case.k/omega")?;
                forbid(f.rho.is_some() || f.omega.is_some(), "functions.rho/omega")?;
                forbid(f.alpha1.is_some() || f.alpha2.is_some(), "functions.alpha1/alpha2")?;
                forbid(
                    f.psi.is_some() != f.v_bar.is_some(),
                    "functions.psi without v_bar (give both)",
                )?;
                forbid(
                    f.psi.is_some() && (f.b_bar.is_some() || f.e1_bar.is_some() || f.e2_bar.is_some()),
                    "functions.b_bar/e1_bar/e2_bar (derived from psi and v_bar)",
                )?;
                forbid(
                    f.complete_faraday && f.psi.is_none(),
                    "functions.complete_faraday (give psi and v_bar instead)",
                )?;
            }
            CaseKind::D => {
                require(c.k.is_some_and(|k| k != 0.0), "case.k (nonzero)")?;
                forbid(c.omega.is_some(), "case.omega")?;
                forbid(f.rho.is_some(), "functions.rho")?;
                forbid(f.alpha1.is_some() || f.alpha2.is_some(), "functions.alpha1/alpha2")?;
                forbid(f.psi.is_some() || f.v_bar.is_some(), "functions.psi/v_bar")?;
                forbid(
                    f.complete_faraday && f.b_bar.is_some(),
                    "functions.b_bar (completed from e1_bar and e2_bar)",
                )?;
            }
        }
        // every expression must parse against its variable set
        for (key, src) in [
            ("rho", &f.rho),
            ("omega", &f.omega),
            ("alpha1", &f.alpha1),
            ("alpha2", &f.alpha2),
            ("a1", &f.a1),
            ("a2", &f.a2),
        ] {
            if let Some(s) = src {
                TimeFn::parse(s).map_err(|e| config_err(format!("functions.{key}: {e}")))?;
            }
        }
        for (key, src) in [
            ("b_bar", &f.b_bar),
            ("e1_bar", &f.e1_bar),
            ("e2_bar", &f.e2_bar),
            ("psi", &f.psi),
            ("v_bar", &f.v_bar),
        ] {
            if let Some(s) = src {
                plane(key, s)?;
            }
        }
        if let Some(g) = &self.grid {
            self.grid_spec_of(g)?;
        }
        if let Some(i) = &self.integrate {
            if !(i.t0 < i.t1) || !(i.step > 0.0) {
                return Err(config_err("integrate: need t0 < t1 and step > 0"));
            }
        }
        let k = &self.check;
        if !(k.tol > 0.0 && k.faraday_tol > 0.0 && k.epsilon > 0.0 && k.orbit_step > 0.0) {
            return Err(config_err("check: tolerances, epsilon and orbit_step must be positive"));
        }
        if let Some(src) = &k.corrupt_e2 {
            Expression::parse(src, &LAB_VARS).map_err(|e| config_err(format!("check.corrupt_e2: {e}")))?;
        }
        Ok(())
    }

    fn grid_spec_of(&self, g: &GridSection) -> Result<GridSpec, CliError> {
        let axis =
            |name: &str, a: AxisSpec| Axis::new(a.0, a.1, a.2).map_err(|e| config_err(format!("grid.{name}: {e}")));
        Ok(GridSpec {
            x: axis("x", g.x)?,
            y: axis("y", g.y)?,
            t: axis("t", g.t)?,
        })
    }

    pub fn grid_spec(&self) -> Result<GridSpec, CliError> {
        let g = self.grid.as_ref().ok_or_else(|| config_err("grid: section required"))?;
        self.grid_spec_of(g)
    }

    pub fn params(&self) -> Result<SymmetryParams, CliError> {
        let c = &self.case;
        let f = &self.functions;
        let iv = Interval::new(c.interval[0], c.interval[1])?;
        let tf = |src: &Option<String>| TimeFn::parse(src.as_deref().unwrap_or("0"));
        let p = match c.kind {
            CaseKind::A => SymmetryParams::case_a(
                c.k.unwrap_or(0.0),
                tf(&f.rho)?,
                tf(&f.omega)?,
                tf(&f.alpha1)?,
                tf(&f.alpha2)?,
                iv,
            )?,
            CaseKind::B => SymmetryParams::case_b(c.omega.unwrap_or_default(), tf(&f.a1)?, tf(&f.a2)?, iv)?,
            CaseKind::C => SymmetryParams::case_c(tf(&f.a1)?, tf(&f.a2)?, iv)?,
            CaseKind::D => SymmetryParams::case_d(c.k.unwrap_or_default(), tf(&f.omega)?, tf(&f.a1)?, tf(&f.a2)?, iv)?,
        };
        Ok(p)
    }

    pub fn map(&self) -> Result<Arc<CanonicalMap>, CliError> {
        let p = Arc::new(self.params()?);
        Ok(Arc::new(CanonicalMap::with_cache_nodes(p, self.case.cache_nodes)?))
    }

    /// Field family described by `[functions]`. With `complete` the case's
    /// Faraday helper fills in the derived free function.
    pub fn family(&self, complete: bool) -> Result<FieldFamily, CliError> {
        let f = &self.functions;
        let map = self.map()?;
        let get = |key: &str, src: &Option<String>| plane(key, src.as_deref().unwrap_or("0"));
        let complete = complete || f.complete_faraday;
        let fam = match self.case.kind {
            CaseKind::A if complete => {
                let (b, e1) = (get("b_bar", &f.b_bar)?, get("e1_bar", &f.e1_bar)?);
                let e2 = faraday_complete_case_a(map.params().k(), &b, &e1)?;
                let free = FreeFunctions::new(PlanarExpr::new(b)?.shared(), PlanarExpr::new(e1)?.shared(), e2);
                build_case_a(map, free)?
            }
            CaseKind::A => build_case_a(map, self.raw_free()?)?,
            CaseKind::B => match &f.psi {
                Some(psi) => build_case_b(map, &plane("psi", psi)?, &get("e1_bar", &f.e1_bar)?)?,
                None if complete => return Err(config_err("functions.psi: required to complete case B")),
                None => build_case_b_raw(map, self.raw_free()?)?,
            },
            CaseKind::C => match (&f.psi, &f.v_bar) {
                (Some(psi), Some(v)) => build_case_c(map, &plane("psi", psi)?, &plane("v_bar", v)?)?,
                _ if complete => {
                    return Err(config_err(
                        "functions.psi, functions.v_bar: required to complete case C",
                    ))
                }
                _ => build_case_c_raw(map, self.raw_free()?)?,
            },
            CaseKind::D if complete => {
                let (e1, e2) = (get("e1_bar", &f.e1_bar)?, get("e2_bar", &f.e2_bar)?);
                let b = faraday_complete_case_d(map.params(), &e1, &e2)?;
                let free = FreeFunctions::new(b, PlanarExpr::new(e1)?.shared(), PlanarExpr::new(e2)?.shared());
                build_case_d(map, free)?
            }
            CaseKind::D => build_case_d(map, self.raw_free()?)?,
        };
        Ok(fam)
    }

    fn raw_free(&self) -> Result<FreeFunctions, CliError> {
        let f = &self.functions;
        let get = |key: &str, src: &Option<String>| plane(key, src.as_deref().unwrap_or("0"));
        Ok(FreeFunctions::from_exprs(
            &get("b_bar", &f.b_bar)?,
            &get("e1_bar", &f.e1_bar)?,
            &get("e2_bar", &f.e2_bar)?,
        )?)
    }

    /// Output directory: the flag wins over `[output] dir`, relative paths
    /// resolve against the config file's directory.
    pub fn out_dir(&self, flag: Option<&Path>, config_path: &Path) -> PathBuf {
        match (flag, &self.output.dir) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(d)) => relative_to(config_path, d),
            (None, None) => PathBuf::from("."),
        }
    }
}

pub fn relative_to(config_path: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        return p.to_path_buf();
    }
    config_path
        .parent()
        .map(|d| d.join(p))
        .unwrap_or_else(|| p.to_path_buf())
}

fn plane(key: &str, src: &str) -> Result<Expression, CliError> {
    Expression::parse(src, &PLANE_VARS).map_err(|e| config_err(format!("functions.{key}: {e}")))
}
