//! Run configuration: `key = value` lines grouped in `[section]`s.
//!
//! ```text
//! [family]
//! kind = pulse
//! grid_points = 512
//!
//! [samples]
//! gammas = 0.2, 0.35, 0.5, 0.65, 0.8
//!
//! [ga]
//! target_gamma = 0.6
//! ```
//!
//! Unknown sections and keys are rejected with their line number. Relative
//! paths are resolved against the directory of the configuration file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use grassmann_rom::bicitsgm::{AnchorPolicy, BiConfig, Calibration};
use grassmann_rom::ga::GaConfig;
use grassmann_rom::interp::TangentInterpolator;
use grassmann_rom::itsgm::RefPolicy;
use grassmann_rom::pod::{PodOptions, TruncationRule};
use grassmann_rom::toyflow::{self, ToyFamily};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Pulse,
    Rotating,
}

impl FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pulse" => Ok(FamilyKind::Pulse),
            "rotating" => Ok(FamilyKind::Rotating),
            _ => Err(format!("unknown family {s:?} (pulse or rotating)")),
        }
    }
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FamilyKind::Pulse => "pulse",
            FamilyKind::Rotating => "rotating",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySection {
    pub kind: FamilyKind,
    pub grid_points: usize,
    pub timesteps: usize,
    pub width: f64,
    /// Subspace dimension of the rotating family.
    pub rank: usize,
}

impl FamilySection {
    pub fn build(&self) -> grassmann_rom::Result<ToyFamily> {
        match self.kind {
            FamilyKind::Pulse => ToyFamily::pulse(self.grid_points, self.timesteps, self.width),
            FamilyKind::Rotating => ToyFamily::rotating(self.grid_points, self.rank),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplesSection {
    pub gammas: Vec<f64>,
    /// Load samples from a manifest instead of generating the family.
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolatorSection {
    pub method: TangentInterpolator,
    pub bi: BiConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaSection {
    pub params: GaConfig,
    /// Empty means the family's parameter range.
    pub bounds: Vec<(f64, f64)>,
    pub target: Option<PathBuf>,
    pub target_gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: FamilySection,
    pub samples: SamplesSection,
    pub interpolator: InterpolatorSection,
    pub pod: PodOptions,
    pub ga: GaSection,
    pub bench_queries: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut ga = GaConfig::new(Vec::new());
        ga.population_size = 30;
        ga.generations = 40;
        Self {
            family: FamilySection {
                kind: FamilyKind::Pulse,
                grid_points: toyflow::DEFAULT_GRID_POINTS,
                timesteps: toyflow::DEFAULT_TIMESTEPS,
                width: toyflow::DEFAULT_PULSE_WIDTH,
                rank: toyflow::DEFAULT_RANK,
            },
            samples: SamplesSection { gammas: vec![0.2, 0.35, 0.5, 0.65, 0.8], manifest: None },
            interpolator: InterpolatorSection { method: TangentInterpolator::Lagrange, bi: BiConfig::default() },
            pod: PodOptions::new(TruncationRule::Rank(toyflow::DEFAULT_RANK)),
            ga: GaSection { params: ga, bounds: Vec::new(), target: None, target_gamma: None },
            bench_queries: 10,
            out: PathBuf::from("."),
        }
    }
}

fn parse<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("invalid value {value:?}: {e}"))
}

pub fn parse_list(value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse::<f64>).collect()
}

fn parse_bounds(value: &str) -> Result<Vec<(f64, f64)>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (lo, hi) = pair.split_once(':').ok_or_else(|| format!("bounds entry {pair:?} is not low:high"))?;
            Ok((parse(lo.trim())?, parse(hi.trim())?))
        })
        .collect()
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("invalid boolean {value:?}")),
    }
}

/// Comma-separated values, as read by the list keys.
pub fn format_list(values: &[f64]) -> String {
    join(values)
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> CliResult<Self> {
        let base = origin.parent().unwrap_or(Path::new("."));
        let mut cfg = RunConfig::default();
        let mut section: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let fail = |message: String| CliError::Config { path: origin.to_path_buf(), line: n + 1, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !matches!(name, "family" | "samples" | "interpolator" | "pod" | "ga" | "bench" | "paths") {
                    return Err(fail(format!("unknown section [{name}]")));
                }
                section = Some(name.to_owned());
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| fail(format!("expected key = value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(sec) = section.as_deref() else {
                return Err(fail(format!("key {key:?} appears before any [section]")));
            };
            cfg.set(sec, key, value, base).map_err(fail)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, section: &str, key: &str, value: &str, base: &Path) -> Result<(), String> {
        let ga = &mut self.ga.params;
        match (section, key) {
            ("family", "kind") => self.family.kind = parse(value)?,
            ("family", "grid_points") => self.family.grid_points = parse(value)?,
            ("family", "timesteps") => self.family.timesteps = parse(value)?,
            ("family", "width") => self.family.width = parse(value)?,
            ("family", "rank") => self.family.rank = parse(value)?,
            ("samples", "gammas") => self.samples.gammas = parse_list(value)?,
            ("samples", "manifest") => self.samples.manifest = Some(base.join(value)),
            ("interpolator", "method") => self.interpolator.method = parse(value)?,
            ("interpolator", "reference") => self.interpolator.bi.reference = parse::<RefPolicy>(value)?,
            ("interpolator", "anchor") => self.interpolator.bi.anchor = parse::<AnchorPolicy>(value)?,
            ("interpolator", "calibration") => self.interpolator.bi.calibration = parse::<Calibration>(value)?,
            ("pod", "rule") => self.pod.rule = parse(value)?,
            ("pod", "center") => self.pod.center = parse_bool(value)?,
            ("ga", "population_size") => ga.population_size = parse(value)?,
            ("ga", "generations") => ga.generations = parse(value)?,
            ("ga", "crossover_rate") => ga.crossover_rate = parse(value)?,
            ("ga", "mutation_rate") => ga.mutation_rate = parse(value)?,
            ("ga", "mutation_sigma") => ga.mutation_sigma = parse(value)?,
            ("ga", "elitism_count") => ga.elitism_count = parse(value)?,
            ("ga", "tournament_size") => ga.tournament_size = parse(value)?,
            ("ga", "blend_alpha") => ga.blend_alpha = parse(value)?,
            ("ga", "seed") => ga.rng_seed = parse(value)?,
            ("ga", "stagnation") => ga.stagnation = Some(parse(value)?),
            ("ga", "bounds") => self.ga.bounds = parse_bounds(value)?,
            ("ga", "target") => self.ga.target = Some(base.join(value)),
            ("ga", "target_gamma") => self.ga.target_gamma = Some(parse(value)?),
            ("bench", "queries") => self.bench_queries = parse(value)?,
            ("paths", "out") => self.out = base.join(value),
            _ => return Err(format!("unknown key {key:?} in [{section}]")),
        }
        Ok(())
    }

    /// The configuration in its own file format; parsing it back yields an
    /// equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f = &self.family;
        let _ = writeln!(s, "[family]");
        let _ = writeln!(s, "kind = {}", f.kind);
        let _ = writeln!(s, "grid_points = {}", f.grid_points);
        let _ = writeln!(s, "timesteps = {}", f.timesteps);
        let _ = writeln!(s, "width = {}", f.width);
        let _ = writeln!(s, "rank = {}", f.rank);

        let _ = writeln!(s, "\n[samples]");
        let _ = writeln!(s, "gammas = {}", join(&self.samples.gammas));
        if let Some(m) = &self.samples.manifest {
            let _ = writeln!(s, "manifest = {}", m.display());
        }

        let i = &self.interpolator;
        let _ = writeln!(s, "\n[interpolator]");
        let _ = writeln!(s, "method = {}", i.method);
        let _ = writeln!(s, "reference = {}", i.bi.reference);
        let _ = writeln!(s, "anchor = {}", i.bi.anchor);
        let _ = writeln!(s, "calibration = {}", i.bi.calibration);

        let _ = writeln!(s, "\n[pod]");
        let _ = writeln!(s, "rule = {}", self.pod.rule);
        let _ = writeln!(s, "center = {}", self.pod.center);

        let g = &self.ga.params;
        let _ = writeln!(s, "\n[ga]");
        let _ = writeln!(s, "population_size = {}", g.population_size);
        let _ = writeln!(s, "generations = {}", g.generations);
        let _ = writeln!(s, "crossover_rate = {}", g.crossover_rate);
        let _ = writeln!(s, "mutation_rate = {}", g.mutation_rate);
        let _ = writeln!(s, "mutation_sigma = {}", g.mutation_sigma);
        let _ = writeln!(s, "elitism_count = {}", g.elitism_count);
        let _ = writeln!(s, "tournament_size = {}", g.tournament_size);
        let _ = writeln!(s, "blend_alpha = {}", g.blend_alpha);
        let _ = writeln!(s, "seed = {}", g.rng_seed);
        if let Some(p) = g.stagnation {
            let _ = writeln!(s, "stagnation = {p}");
        }
        if !self.ga.bounds.is_empty() {
            let b: Vec<String> = self.ga.bounds.iter().map(|(lo, hi)| format!("{lo}:{hi}")).collect();
            let _ = writeln!(s, "bounds = {}", b.join(", "));
        }
        if let Some(t) = &self.ga.target {
            let _ = writeln!(s, "target = {}", t.display());
        }
        if let Some(t) = self.ga.target_gamma {
            let _ = writeln!(s, "target_gamma = {t}");
        }

        let _ = writeln!(s, "\n[bench]");
        let _ = writeln!(s, "queries = {}", self.bench_queries);

        let _ = writeln!(s, "\n[paths]");
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }
}
