//! Sample-set manifests.
//!
//! One sample per line: the parameter components, then either a single
//! snapshot-matrix path (decomposed by POD on load) or three paths holding
//! the spatial basis, the singular values and the temporal basis. Relative
//! paths are resolved against the manifest's directory. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grassmann::OrthonormalBasis;
use crate::io::read_matrix;
use crate::itsgm::{SampleSet, SvdTriple};
use crate::pod::{compute_pod_with, PodOptions};

#[derive(Clone, Debug, PartialEq)]
pub enum SampleSource {
    Snapshots(PathBuf),
    Triple { spatial: PathBuf, sigma: PathBuf, temporal: PathBuf },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    pub params: Vec<f64>,
    pub source: SampleSource,
}

/// Parses manifest text; `dir` anchors relative paths and `origin` names
/// the file in error messages.
pub fn parse_manifest(text: &str, dir: &Path, origin: &Path) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let split = tokens.iter().position(|t| t.parse::<f64>().is_err()).unwrap_or(tokens.len());
        let params: Vec<f64> = tokens[..split].iter().map(|t| t.parse().unwrap()).collect();
        let paths: Vec<PathBuf> = tokens[split..].iter().map(|t| dir.join(t)).collect();
        let fail = |msg: String| Error::format(origin, format!("line {}: {msg}", n + 1));
        if params.is_empty() {
            return Err(fail("missing parameter values".into()));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(fail("non-finite parameter".into()));
        }
        let source = match <[PathBuf; 3]>::try_from(paths) {
            Ok([spatial, sigma, temporal]) => SampleSource::Triple { spatial, sigma, temporal },
            Err(paths) if paths.len() == 1 => SampleSource::Snapshots(paths.into_iter().next().unwrap()),
            Err(paths) => {
                return Err(fail(format!("expected 1 or 3 paths after the parameters, found {}", paths.len())))
            }
        };
        entries.push(ManifestEntry { params, source });
    }
    if entries.is_empty() {
        return Err(Error::format(origin, "manifest lists no samples"));
    }
    Ok(entries)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, dir, path)
}

/// Manifest text with paths written relative to `dir` where possible.
pub fn format_manifest(entries: &[ManifestEntry], dir: &Path) -> String {
    let rel = |p: &Path| p.strip_prefix(dir).unwrap_or(p).display().to_string();
    let mut out = String::new();
    for e in entries {
        let params: Vec<String> = e.params.iter().map(|p| format!("{p:e}")).collect();
        let paths = match &e.source {
            SampleSource::Snapshots(p) => rel(p),
            SampleSource::Triple { spatial, sigma, temporal } => {
                format!("{} {} {}", rel(spatial), rel(sigma), rel(temporal))
            }
        };
        let _ = writeln!(out, "{} {}", params.join(" "), paths);
    }
    out
}

/// Reads a vector stored as a one-row or one-column matrix.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(Error::format(path, format!("expected a vector, found a {}x{} matrix", m.rows(), m.cols())));
    }
    Ok(m.into_vec())
}

fn load_basis(path: &Path) -> Result<OrthonormalBasis> {
    OrthonormalBasis::new(read_matrix(path)?).map_err(|e| Error::format(path, e.to_string()))
}

/// Loads every sample of a manifest. Snapshot entries are decomposed with
/// `pod`.
pub fn load_samples(path: &Path, pod: &PodOptions) -> Result<SampleSet> {
    let entries = read_manifest(path)?;
    let mut params = Vec::with_capacity(entries.len());
    let mut triples = Vec::with_capacity(entries.len());
    for e in entries {
        let triple = match &e.source {
            SampleSource::Snapshots(p) => {
                let r = compute_pod_with(&read_matrix(p)?, pod)?;
                SvdTriple::new(r.modes, r.singular_values, OrthonormalBasis::new(r.temporal)?)?
            }
            SampleSource::Triple { spatial, sigma, temporal } => {
                SvdTriple::new(load_basis(spatial)?, read_vector(sigma)?, load_basis(temporal)?)?
            }
        };
        params.push(e.params);
        triples.push(triple);
    }
    SampleSet::new(params, triples)
}
