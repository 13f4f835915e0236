//! Named body families and their parameters.

use std::path::{Path, PathBuf};

use affine_lab_core::generators::{cosine_perturbed, disk, ellipse_body, superellipse};
use affine_lab_core::{AngularGrid, ConvexBody};

use crate::bodyio;
use crate::config::{parse_value, ConfigError, Params};

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64, phi: f64 },
    CosinePerturbed { a: f64, k: u32 },
    Superellipse { q: f64 },
    File { path: PathBuf },
}

fn allowed(params: &Params, family: &str, keys: &[&str]) -> Result<(), ConfigError> {
    for (key, entry) in params {
        if !keys.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey {
                line: entry.line,
                section: format!("body: {family}"),
                key: key.clone(),
            });
        }
    }
    Ok(())
}

fn get<T: std::str::FromStr>(
    params: &Params,
    key: &str,
    default: Option<T>,
    line: usize,
) -> Result<T, ConfigError> {
    match params.get(key) {
        Some(entry) => parse_value(entry, key),
        None => default.ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("missing parameter `{key}`"),
        }),
    }
}

impl Family {
    pub fn from_params(
        name: &str,
        params: &Params,
        line: usize,
        base: &Path,
    ) -> Result<Self, ConfigError> {
        let family = match name {
            "disk" => {
                allowed(params, name, &["radius"])?;
                Family::Disk {
                    radius: get(params, "radius", Some(1.0), line)?,
                }
            }
            "ellipse" => {
                allowed(params, name, &["a", "b", "phi"])?;
                Family::Ellipse {
                    a: get(params, "a", None, line)?,
                    b: get(params, "b", Some(1.0), line)?,
                    phi: get(params, "phi", Some(0.0), line)?,
                }
            }
            "cosine_perturbed" => {
                allowed(params, name, &["a", "k"])?;
                Family::CosinePerturbed {
                    a: get(params, "a", None, line)?,
                    k: get(params, "k", Some(2), line)?,
                }
            }
            "superellipse" => {
                allowed(params, name, &["q"])?;
                Family::Superellipse {
                    q: get(params, "q", None, line)?,
                }
            }
            "file" => {
                allowed(params, name, &["path"])?;
                let path: String = get(params, "path", None, line)?;
                Family::File {
                    path: base.join(path),
                }
            }
            other => {
                return Err(ConfigError::UnknownFamily {
                    line,
                    name: other.to_string(),
                })
            }
        };
        Ok(family)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Disk { .. } => "disk",
            Family::Ellipse { .. } => "ellipse",
            Family::CosinePerturbed { .. } => "cosine_perturbed",
            Family::Superellipse { .. } => "superellipse",
            Family::File { .. } => "file",
        }
    }

    /// Parameters as `key=value` pairs joined by `;`.
    pub fn parameters(&self) -> String {
        match self {
            Family::Disk { radius } => format!("radius={radius}"),
            Family::Ellipse { a, b, phi } => format!("a={a};b={b};phi={phi}"),
            Family::CosinePerturbed { a, k } => format!("a={a};k={k}"),
            Family::Superellipse { q } => format!("q={q}"),
            Family::File { path } => format!("path={}", path.display()),
        }
    }

    /// Samples the body on `grid`; file bodies on another grid are resampled.
    pub fn build(&self, grid: &AngularGrid) -> Result<ConvexBody, String> {
        let body = match self {
            Family::Disk { radius } => disk(grid, *radius),
            Family::Ellipse { a, b, phi } => ellipse_body(grid, *a, *b, *phi),
            Family::CosinePerturbed { a, k } => cosine_perturbed(grid, *a, *k),
            Family::Superellipse { q } => superellipse(grid, *q),
            Family::File { path } => {
                let body = bodyio::read_body(path).map_err(|e| e.to_string())?;
                if body.grid().len() == grid.len() {
                    Ok(body)
                } else {
                    body.resampled(grid)
                }
            }
        };
        body.map_err(|e| format!("{} ({}): {e}", self.name(), self.parameters()))
    }
}
