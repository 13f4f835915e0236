//! Experiment configuration: flat `[section]` blocks of `key = value` lines.
//!
//! ```text
//! [run]
//! grid = 512
//! p = 1, 2, 3
//!
//! [body]
//! name = bump
//! family = cosine_perturbed
//! a = 0.01
//! k = 2
//! ```
//!
//! `[body]` may repeat. `#` and `;` start comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use affine_lab_core::flow::StepController;
use affine_lab_core::stability::{JOHN_C1, JOHN_C2};
use thiserror::Error;

use crate::family::Family;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown family `{name}` (known: disk, ellipse, cosine_perturbed, superellipse, file)")]
    UnknownFamily { line: usize, name: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// One value together with the line it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

pub type Params = BTreeMap<String, Entry>;

pub(crate) fn parse_value<T: std::str::FromStr>(
    entry: &Entry,
    key: &str,
) -> Result<T, ConfigError> {
    entry.value.parse().map_err(|_| ConfigError::Syntax {
        line: entry.line,
        message: format!("cannot parse `{}` as a value for `{key}`", entry.value),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodySpec {
    pub name: String,
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSettings {
    pub t_end: f64,
    pub snapshots: usize,
    pub controller: StepController,
    /// `(inner, outer)` body names whose traces are compared for nesting.
    pub pairs: Vec<(String, String)>,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            t_end: 0.1,
            snapshots: 64,
            controller: StepController::default(),
            pairs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub c1: f64,
    pub c2: f64,
    pub snapshots: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            c1: JOHN_C1,
            c2: JOHN_C2,
            snapshots: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: String,
    /// Parameters held fixed across the sweep.
    pub fixed: Params,
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub count: usize,
    pub geometric: bool,
    pub bootstrap: usize,
    pub line: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.from];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / last;
                if self.geometric {
                    self.from * (self.to / self.from).powf(f)
                } else {
                    self.from + (self.to - self.from) * f
                }
            })
            .collect()
    }

    pub fn family_at(&self, value: f64) -> Result<Family, ConfigError> {
        let mut params = self.fixed.clone();
        params.insert(
            self.param.clone(),
            Entry {
                value: format!("{value:e}"),
                line: self.line,
            },
        );
        Family::from_params(&self.family, &params, self.line, Path::new("."))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Relative slack for inequality checks on quadratures.
    pub quadrature: f64,
    /// Allowed relative residual of the area ODE.
    pub area_ode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: 1e-8,
            area_ode: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: usize,
    pub p_list: Vec<f64>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub bodies: Vec<BodySpec>,
    pub flow: FlowSettings,
    pub verify: VerifySettings,
    pub sweep: Option<SweepSpec>,
    pub tolerance: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: 512,
            p_list: vec![2.0],
            seed: 0,
            jobs: None,
            bodies: Vec::new(),
            flow: FlowSettings::default(),
            verify: VerifySettings::default(),
            sweep: None,
            tolerance: Tolerances::default(),
        }
    }
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<(String, Entry)>,
}

fn split_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split(['#', ';']).next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("unterminated section header `{content}`"),
            })?;
            sections.push(Section {
                name: name.trim().to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let current = sections.last_mut().ok_or_else(|| ConfigError::Syntax {
            line,
            message: "key outside of any section".into(),
        })?;
        current.entries.push((
            key.trim().to_string(),
            Entry {
                value: value.trim().to_string(),
                line,
            },
        ));
    }
    Ok(sections)
}

fn parse_list(entry: &Entry, key: &str) -> Result<Vec<f64>, ConfigError> {
    entry
        .value
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| {
            parse_value(
                &Entry {
                    value: s.to_string(),
                    line: entry.line,
                },
                key,
            )
        })
        .collect()
}

fn unknown(section: &Section, key: &str, entry: &Entry) -> ConfigError {
    ConfigError::UnknownKey {
        line: entry.line,
        section: section.name.clone(),
        key: key.to_string(),
    }
}

fn to_params(section: &Section) -> Result<Params, ConfigError> {
    let mut params = Params::new();
    for (key, entry) in &section.entries {
        if params.insert(key.clone(), entry.clone()).is_some() {
            return Err(ConfigError::Syntax {
                line: entry.line,
                message: format!("duplicate key `{key}`"),
            });
        }
    }
    Ok(params)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Self::parse(&text, &base)
    }

    /// Parses config text; `file` bodies are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for section in split_sections(text)? {
            match section.name.as_str() {
                "run" => cfg.read_run(&section)?,
                "body" => {
                    let mut params = to_params(&section)?;
                    let name = params
                        .remove("name")
                        .map(|e| e.value)
                        .unwrap_or_else(|| format!("body{}", cfg.bodies.len() + 1));
                    let family = params.remove("family").ok_or_else(|| ConfigError::Syntax {
                        line: section.line,
                        message: "[body] needs a `family`".into(),
                    })?;
                    let family = Family::from_params(&family.value, &params, family.line, base)?;
                    cfg.bodies.push(BodySpec { name, family });
                }
                "flow" => cfg.read_flow(&section)?,
                "verify" => cfg.read_verify(&section)?,
                "sweep" => cfg.sweep = Some(read_sweep(&section)?),
                "tolerance" => cfg.read_tolerance(&section)?,
                other => {
                    return Err(ConfigError::Syntax {
                        line: section.line,
                        message: format!("unknown section [{other}]"),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn read_run(&mut self, section: &Section) -> Result<(), ConfigError> {
        for (key, entry) in &section.entries {
            match key.as_str() {
                "grid" => self.grid = parse_value(entry, key)?,
                "p" => self.p_list = parse_list(entry, key)?,
                "seed" => self.seed = parse_value(entry, key)?,
                "jobs" => self.jobs = Some(parse_value(entry, key)?),
                _ => return Err(unknown(section, key, entry)),
            }
        }
        Ok(())
    }

    fn read_flow(&mut self, section: &Section) -> Result<(), ConfigError> {
        let flow = &mut self.flow;
        for (key, entry) in &section.entries {
            match key.as_str() {
                "t_end" => flow.t_end = parse_value(entry, key)?,
                "snapshots" => flow.snapshots = parse_value(entry, key)?,
                "safety" => flow.controller.safety = parse_value(entry, key)?,
                "max_rel_change" => flow.controller.max_rel_change = parse_value(entry, key)?,
                "dt_min" => flow.controller.dt_min = parse_value(entry, key)?,
                "t_max" => flow.controller.t_max = parse_value(entry, key)?,
                "pair" => {
                    let names: Vec<&str> = entry.value.split(',').map(str::trim).collect();
                    if names.len() != 2 || names.iter().any(|n| n.is_empty()) {
                        return Err(ConfigError::Syntax {
                            line: entry.line,
                            message: "`pair` takes `inner, outer`".into(),
                        });
                    }
                    flow.pairs
                        .push((names[0].to_string(), names[1].to_string()));
                }
                _ => return Err(unknown(section, key, entry)),
            }
        }
        Ok(())
    }

    fn read_verify(&mut self, section: &Section) -> Result<(), ConfigError> {
        for (key, entry) in &section.entries {
            match key.as_str() {
                "c1" => self.verify.c1 = parse_value(entry, key)?,
                "c2" => self.verify.c2 = parse_value(entry, key)?,
                "snapshots" => self.verify.snapshots = parse_value(entry, key)?,
                _ => return Err(unknown(section, key, entry)),
            }
        }
        Ok(())
    }

    fn read_tolerance(&mut self, section: &Section) -> Result<(), ConfigError> {
        for (key, entry) in &section.entries {
            match key.as_str() {
                "quadrature" => self.tolerance.quadrature = parse_value(entry, key)?,
                "area_ode" => self.tolerance.area_ode = parse_value(entry, key)?,
                _ => return Err(unknown(section, key, entry)),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid < 8 || !self.grid.is_multiple_of(2) {
            return Err(ConfigError::Invalid(format!(
                "grid size {} must be even and >= 8",
                self.grid
            )));
        }
        if self.p_list.is_empty() || self.p_list.iter().any(|p| !(*p >= 1.0) || !p.is_finite()) {
            return Err(ConfigError::Invalid(
                "p list must be non-empty with every p >= 1".into(),
            ));
        }
        if self.flow.snapshots < 3 || self.verify.snapshots < 2 {
            return Err(ConfigError::Invalid(
                "flow needs >= 3 snapshots, verify >= 2".into(),
            ));
        }
        if !(self.flow.t_end > 0.0) {
            return Err(ConfigError::Invalid("flow t_end must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(ConfigError::Invalid("jobs must be >= 1".into()));
        }
        for (inner, outer) in &self.flow.pairs {
            for name in [inner, outer] {
                if !self.bodies.iter().any(|b| &b.name == name) {
                    return Err(ConfigError::Invalid(format!(
                        "pair refers to unknown body `{name}`"
                    )));
                }
            }
        }
        let mut names: Vec<&str> = self.bodies.iter().map(|b| b.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(ConfigError::Invalid(format!(
                "duplicate body name `{}`",
                w[0]
            )));
        }
        Ok(())
    }
}

fn read_sweep(section: &Section) -> Result<SweepSpec, ConfigError> {
    let mut params = to_params(section)?;
    let mut take = |key: &str| params.remove(key);
    let family = take("family").ok_or_else(|| ConfigError::Syntax {
        line: section.line,
        message: "[sweep] needs a `family`".into(),
    })?;
    let param = take("param").ok_or_else(|| ConfigError::Syntax {
        line: section.line,
        message: "[sweep] needs a `param` to vary".into(),
    })?;
    let from = take("from").map(|e| parse_value(&e, "from")).transpose()?;
    let to = take("to").map(|e| parse_value(&e, "to")).transpose()?;
    let count = take("count")
        .map(|e| parse_value(&e, "count"))
        .transpose()?
        .unwrap_or(12);
    let scale = take("scale");
    let geometric = match scale.as_ref().map(|e| e.value.as_str()) {
        None | Some("geometric") => true,
        Some("linear") => false,
        Some(other) => {
            return Err(ConfigError::Syntax {
                line: scale.as_ref().map_or(section.line, |e| e.line),
                message: format!("scale must be `geometric` or `linear`, got `{other}`"),
            })
        }
    };
    let bootstrap = take("bootstrap")
        .map(|e| parse_value(&e, "bootstrap"))
        .transpose()?
        .unwrap_or(1000);
    let (from, to) = match (from, to) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(ConfigError::Syntax {
                line: section.line,
                message: "[sweep] needs `from` and `to`".into(),
            })
        }
    };
    let spec = SweepSpec {
        family: family.value,
        fixed: params,
        param: param.value,
        from,
        to,
        count,
        geometric,
        bootstrap,
        line: family.line,
    };
    if spec.count == 0 || !(spec.from <= spec.to) || (spec.geometric && !(spec.from > 0.0)) {
        return Err(ConfigError::Invalid(format!(
            "sweep range {}..{} with {} points is empty or invalid",
            spec.from, spec.to, spec.count
        )));
    }
    // fail early on unknown families or parameters
    spec.family_at(spec.from)?;
    Ok(spec)
}
