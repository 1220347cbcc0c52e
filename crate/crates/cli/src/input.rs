//! Input documents: a single matrix, or a list of dwell-time regimes.

use dwellcut::{Regime, SpectralItem, Spectrum, SwitchedSystem, SystemMatrix};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::failure::{CliResult, Failure};
use crate::report::InputDigest;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub matrix: Vec<Vec<f64>>,
    /// Overrides the computed eigenstructure.
    #[serde(default)]
    pub spectrum: Option<Vec<SpectralItemDocument>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralItemDocument {
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "one")]
    pub block_size: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub regimes: Vec<RegimeDocument>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeDocument {
    pub label: String,
    pub matrix: Vec<Vec<f64>>,
    pub m: f64,
    #[serde(rename = "M", default)]
    pub max_dwell: Option<f64>,
}

pub struct Loaded<T> {
    pub doc: T,
    pub digest: InputDigest,
}

fn read(path: &str) -> CliResult<(String, InputDigest)> {
    let bytes = std::fs::read(path).map_err(|e| Failure::io(path, &e))?;
    let sha = Sha256::digest(&bytes);
    let sha256 = sha.iter().map(|b| format!("{b:02x}")).collect();
    let text = String::from_utf8(bytes)
        .map_err(|e| Failure::new("malformed_input", crate::failure::EXIT_INPUT, e.to_string()).at(path))?;
    Ok((
        text,
        InputDigest {
            path: path.to_string(),
            sha256,
        },
    ))
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &str) -> CliResult<Loaded<T>> {
    let (text, digest) = read(path)?;
    let doc = serde_json::from_str(&text).map_err(|e| Failure::malformed(path, &e))?;
    Ok(Loaded { doc, digest })
}

pub fn system_matrix(rows: &[Vec<f64>], path: &str) -> CliResult<SystemMatrix<f64>> {
    SystemMatrix::from_rows(rows).map_err(|e| Failure::from(e).at(path))
}

impl MatrixDocument {
    pub fn spectrum_override(&self, path: &str) -> CliResult<Option<Spectrum<f64>>> {
        let Some(items) = &self.spectrum else {
            return Ok(None);
        };
        let items = items
            .iter()
            .map(|it| SpectralItem::new(it.alpha, it.beta, it.block_size))
            .collect();
        Spectrum::from_items(items).map(Some).map_err(|e| Failure::from(e).at(path))
    }
}

impl SystemDocument {
    pub fn build(&self, path: &str) -> CliResult<SwitchedSystem<f64>> {
        let regimes = self
            .regimes
            .iter()
            .map(|r| {
                let m = SystemMatrix::from_rows(&r.matrix)
                    .map_err(|e| Failure::from(e).at(path))
                    .map_err(|mut f| {
                        f.message = format!("regime '{}': {}", r.label, f.message);
                        f
                    })?;
                Ok(Regime::new(r.label.clone(), m, r.m, r.max_dwell))
            })
            .collect::<CliResult<Vec<_>>>()?;
        SwitchedSystem::new(regimes).map_err(|e| Failure::from(e).at(path))
    }
}
