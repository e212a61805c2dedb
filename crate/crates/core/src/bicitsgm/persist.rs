//! Model directories.
//!
//! ```text
//! manifest.txt            parameters and sample files
//! sample_<i>.modes/.sv/.temporal
//! velocity_spatial_<i>.bin, velocity_temporal_<i>.bin
//! sigma.bin               N_p×q singular-value table
//! meta.txt                key=value metadata
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{AnchorPolicy, BiConfig, BiRomModel, Calibration};
use crate::error::{Error, Result};
use crate::io::{read_matrix, write_matrix};
use crate::itsgm::{RefPolicy, SampleSet, TangentCache};
use crate::linalg::Matrix;
use crate::manifest::{format_manifest, load_samples, ManifestEntry, SampleSource};
use crate::pod::{PodOptions, TruncationRule};

const MANIFEST: &str = "manifest.txt";
const META: &str = "meta.txt";
const SIGMA: &str = "sigma.bin";

impl BiRomModel {
    /// Writes the model into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let s = &self.samples;
        let mut entries = Vec::with_capacity(s.len());
        for (i, (p, t)) in s.params().iter().zip(s.triples()).enumerate() {
            let spatial = dir.join(format!("sample_{i}.modes"));
            let sigma = dir.join(format!("sample_{i}.sv"));
            let temporal = dir.join(format!("sample_{i}.temporal"));
            write_matrix(&spatial, t.spatial.matrix())?;
            write_matrix(&sigma, &Matrix::from_row_major(t.sigma.len(), 1, t.sigma.clone())?)?;
            write_matrix(&temporal, t.temporal.matrix())?;
            entries
                .push(ManifestEntry { params: p.clone(), source: SampleSource::Triple { spatial, sigma, temporal } });
        }
        write_text(&dir.join(MANIFEST), &format_manifest(&entries, dir))?;

        for (family, cache) in [("spatial", self.spatial_cache()), ("temporal", self.temporal_cache())] {
            for (i, v) in cache.velocities().iter().enumerate() {
                write_matrix(dir.join(format!("velocity_{family}_{i}.bin")), v.delta())?;
            }
        }
        let rows: Vec<Vec<f64>> = self.sigma_table().iter().map(|r| r.to_vec()).collect();
        write_matrix(dir.join(SIGMA), &Matrix::from_rows(&rows)?)?;

        let mut meta = String::new();
        for (k, v) in self.metadata() {
            let _ = writeln!(meta, "{k}={v}");
        }
        write_text(&dir.join(META), &meta)
    }

    fn metadata(&self) -> Vec<(&'static str, String)> {
        let s = &self.samples;
        vec![
            ("N", s.spatial_dim().to_string()),
            ("N_t", s.temporal_dim().to_string()),
            ("q", s.rank().to_string()),
            ("N_p", s.len().to_string()),
            ("d", s.param_dim().to_string()),
            ("ref_policy", self.config.reference.to_string()),
            ("ref_index", self.ref_index().to_string()),
            ("anchor_policy", self.config.anchor.to_string()),
            ("calibration", self.config.calibration.to_string()),
        ]
    }

    /// Reads a directory written by [`BiRomModel::save`]. The cached
    /// velocities are taken from disk, not recomputed.
    pub fn load(dir: &Path) -> Result<Self> {
        let meta_path = dir.join(META);
        let text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let mut meta = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::format(&meta_path, format!("line {}: expected key=value", n + 1)))?;
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| meta.get(k).cloned().ok_or_else(|| Error::format(&meta_path, format!("missing key {k}")));
        let bad = |k: &str| Error::format(&meta_path, format!("invalid value for {k}"));
        let ref_index: usize = get("ref_index")?.parse().map_err(|_| bad("ref_index"))?;
        let config = BiConfig {
            reference: get("ref_policy")?.parse::<RefPolicy>().map_err(|_| bad("ref_policy"))?,
            anchor: get("anchor_policy")?.parse::<AnchorPolicy>().map_err(|_| bad("anchor_policy"))?,
            calibration: get("calibration")?.parse::<Calibration>().map_err(|_| bad("calibration"))?,
        };

        // Triples carry no snapshot entries, so the rule is never applied.
        let samples = load_samples(&dir.join(MANIFEST), &PodOptions::new(TruncationRule::Energy(1.0)))?;
        for (k, actual) in [
            ("N", samples.spatial_dim()),
            ("N_t", samples.temporal_dim()),
            ("q", samples.rank()),
            ("N_p", samples.len()),
            ("d", samples.param_dim()),
        ] {
            if get(k)? != actual.to_string() {
                return Err(Error::format(
                    &meta_path,
                    format!("{k}={} disagrees with the stored samples ({actual})", get(k)?),
                ));
            }
        }
        if ref_index >= samples.len() {
            return Err(bad("ref_index"));
        }
        let spatial = load_cache(dir, "spatial", &samples, ref_index)?;
        let temporal = load_cache(dir, "temporal", &samples, ref_index)?;
        BiRomModel::from_caches(samples, config, spatial, temporal)
    }
}

fn load_cache(dir: &Path, family: &str, samples: &SampleSet, ref_index: usize) -> Result<TangentCache> {
    let bases = match family {
        "spatial" => samples.spatial_bases(),
        _ => samples.temporal_bases(),
    };
    let deltas = (0..samples.len())
        .map(|i| read_matrix(dir.join(format!("velocity_{family}_{i}.bin"))))
        .collect::<Result<Vec<_>>>()?;
    TangentCache::from_velocities(bases[ref_index].clone(), ref_index, deltas)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
