//! Run configuration: a flat `key = value` file whose keys match the CLI's
//! long flag names. Later assignments win, so flags applied after the file
//! override it.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ingest::Label;
use crate::pca::ScoreMode;
use crate::sigmap::WeightTable;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub time_col: String,
    pub marker_col: Option<String>,
    pub exclude: Vec<String>,
    pub population: usize,
    /// `None` selects `3 * csm_max / population`.
    pub delta: Option<f64>,
    pub f_min: u32,
    pub f_max: u32,
    pub weights: WeightTable,
    pub segments: Option<usize>,
    pub boundaries: Option<Vec<usize>>,
    pub labels: Option<Vec<Label>>,
    pub thresholds: Option<Vec<f64>>,
    pub grid: usize,
    pub merge_threshold: f64,
    /// Strict merging: also require the rank-sum p-value to exceed this.
    pub merge_min_p: Option<f64>,
    pub score_mode: ScoreMode,
    /// Retained components; `None` keeps enough for 90% of the variance.
    pub components: Option<usize>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            time_col: "time".into(),
            marker_col: None,
            exclude: Vec::new(),
            population: 100,
            delta: None,
            f_min: 15,
            f_max: 100,
            weights: WeightTable::default(),
            segments: None,
            boundaries: None,
            labels: None,
            thresholds: None,
            grid: 41,
            merge_threshold: 0.95,
            merge_min_p: None,
            score_mode: ScoreMode::Subspace,
            components: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

pub const KEYS: &[&str] = &[
    "input",
    "time-col",
    "marker-col",
    "exclude",
    "population",
    "delta",
    "fmin",
    "fmax",
    "weights",
    "segments",
    "boundaries",
    "labels",
    "thresholds",
    "grid",
    "merge-threshold",
    "merge-min-p",
    "score-mode",
    "components",
    "out-dir",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}`")))
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

impl RunConfig {
    /// Sets one key. Underscores and dashes are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "input" => self.input = Some(PathBuf::from(v)),
            "time-col" => self.time_col = v.to_string(),
            "marker-col" => self.marker_col = (!v.is_empty()).then(|| v.to_string()),
            "exclude" => {
                self.exclude = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "population" => self.population = num(&key, v)?,
            "delta" => self.delta = Some(num(&key, v)?),
            "fmin" => self.f_min = num(&key, v)?,
            "fmax" => self.f_max = num(&key, v)?,
            "weights" => {
                self.weights = v
                    .parse()
                    .map_err(|e: Error| Error::Config(format!("`weights`: {e}")))?
            }
            "segments" => self.segments = Some(num(&key, v)?),
            "boundaries" => self.boundaries = Some(list(&key, v)?),
            "labels" => {
                self.labels = Some(
                    v.split(',')
                        .map(|s| s.parse().map_err(|e: Error| Error::Config(format!("`labels`: {e}"))))
                        .collect::<Result<_>>()?,
                )
            }
            "thresholds" => self.thresholds = Some(list(&key, v)?),
            "grid" => self.grid = num(&key, v)?,
            "merge-threshold" => self.merge_threshold = num(&key, v)?,
            "merge-min-p" => self.merge_min_p = Some(num(&key, v)?),
            "score-mode" => {
                self.score_mode = v
                    .parse()
                    .map_err(|e: Error| Error::Config(format!("`score-mode`: {e}")))?
            }
            "components" => self.components = Some(num(&key, v)?),
            "out-dir" => self.out_dir = PathBuf::from(v),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// Like [`RunConfig::apply_text`]; a relative `input` is resolved
    /// against the config file's directory.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let before = self.input.clone();
        self.apply_text(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if self.input != before {
            if let (Some(input), Some(dir)) = (&self.input, path.parent()) {
                if input.is_relative() {
                    self.input = Some(dir.join(input));
                }
            }
        }
        Ok(())
    }

    /// Checks cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 {
            return Err(Error::Config("population must be at least 1".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Config(format!("delta must be positive, got {d}")));
            }
        }
        if self.f_min == 0 {
            return Err(Error::Config("fmin must be at least 1".into()));
        }
        if self.f_min >= self.effective_f_max() {
            return Err(Error::Config(format!(
                "need fmin < min(fmax, population), got fmin {} fmax {} population {}",
                self.f_min, self.f_max, self.population
            )));
        }
        if let Some(b) = &self.boundaries {
            if b.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config("boundaries must be strictly increasing".into()));
            }
        }
        if let Some(n) = self.segments {
            if n < 2 {
                return Err(Error::Config("segments must be at least 2".into()));
            }
        }
        if !(self.merge_threshold > 0.0 && self.merge_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "merge-threshold must be in (0, 1], got {}",
                self.merge_threshold
            )));
        }
        if let Some(p) = self.merge_min_p {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Config(format!("merge-min-p must be in [0, 1), got {p}")));
            }
        }
        if self.grid == 0 && self.thresholds.is_none() {
            return Err(Error::Config("grid must be at least 1".into()));
        }
        if let Some(t) = &self.thresholds {
            if t.is_empty() || t.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config("thresholds must be a non-empty list of reals".into()));
            }
        }
        if self.components == Some(0) {
            return Err(Error::Config("components must be at least 1".into()));
        }
        Ok(())
    }

    /// Antigen copies per second cannot exceed the population.
    pub fn effective_f_max(&self) -> u32 {
        let cap = u32::try_from(self.population).unwrap_or(u32::MAX);
        self.f_max.min(cap)
    }

    pub fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::Config("no input file given".into()))
    }
}
