//! Plain-text support samples: an `n=<N>` header, then one value per line.

use std::fmt::Write as _;
use std::path::Path;

use affine_lab_core::{AngularGrid, ConvexBody};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BodyIoError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Body {
        path: String,
        #[source]
        source: affine_lab_core::Error,
    },
}

pub fn format_body(body: &ConvexBody) -> String {
    let mut out = format!("n={}\n", body.grid().len());
    for v in body.support() {
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}

pub fn parse_body(text: &str, path: &str) -> Result<ConvexBody, BodyIoError> {
    let bad = |line: usize, message: String| BodyIoError::Format {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| bad(hline, format!("expected `n=<N>` header, found `{header}`")))?;
    let mut values = Vec::with_capacity(n);
    for (line, raw) in lines {
        let v: f64 = raw
            .parse()
            .map_err(|_| bad(line, format!("not a number: `{raw}`")))?;
        values.push(v);
    }
    if values.len() != n {
        return Err(bad(
            hline,
            format!("header says {n} samples, found {}", values.len()),
        ));
    }
    let body_err = |source| BodyIoError::Body {
        path: path.to_string(),
        source,
    };
    let grid = AngularGrid::new(n).map_err(body_err)?;
    ConvexBody::from_samples(&grid, &values).map_err(body_err)
}

pub fn read_body(path: &Path) -> Result<ConvexBody, BodyIoError> {
    let text = std::fs::read_to_string(path).map_err(|source| BodyIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_body(&text, &path.display().to_string())
}
