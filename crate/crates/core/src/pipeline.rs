//! The end-to-end stages behind the `stats`, `analyse` and `run` commands.

use std::fmt;

use crate::config::RunConfig;
use crate::dca::{self, KAlphaSeries};
use crate::error::{Error, Result};
use crate::eval::{self, RocCurve, SegmentPrediction};
use crate::ingest::{self, AttributeStats, Label, RawTable, ResampledTable, SegmentMap};
use crate::pca::{self, MergeCandidate, PcaResult, VariabilityRanking};
use crate::prep::NormalisedTable;
use crate::sigmap::{self, AntigenStream, CategoryRanking, SignalAssignment, SignalStream};

/// Target cumulative explained variance for the default component count.
pub const RETAINED_VARIANCE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Prep,
    Pca,
    Sigmap,
    Segment,
    Dca,
    Eval,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Prep => "prep",
            Stage::Pca => "pca",
            Stage::Sigmap => "sigmap",
            Stage::Segment => "segment",
            Stage::Dca => "dca",
            Stage::Eval => "eval",
            Stage::Output => "output",
        })
    }
}

/// An [`Error`] tagged with the stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        self.error.exit_code()
    }
}

pub(crate) trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

pub struct StatsReport {
    pub raw: Vec<AttributeStats>,
    pub resampled: Vec<AttributeStats>,
}

fn load(cfg: &RunConfig) -> Result<(RawTable, ResampledTable), StageError> {
    let raw = ingest::load_csv(cfg.input().at(Stage::Config)?, &cfg.time_col).at(Stage::Ingest)?;
    let resampled = ingest::resample_average(&raw);
    Ok((raw, resampled))
}

pub fn stats(cfg: &RunConfig) -> Result<StatsReport, StageError> {
    let (raw, resampled) = load(cfg)?;
    let describe_all = |cols: &ingest::Columns| {
        cols.iter()
            .map(|(name, values)| ingest::describe(name, values))
            .collect::<Result<Vec<_>>>()
    };
    Ok(StatsReport {
        raw: describe_all(&raw.columns).at(Stage::Ingest)?,
        resampled: describe_all(&resampled.columns).at(Stage::Ingest)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeDecision {
    pub candidate: MergeCandidate,
    pub merged: bool,
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub resampled: ResampledTable,
    /// Signal attributes after merging; excludes the marker.
    pub table: NormalisedTable,
    pub marker: Option<Vec<f64>>,
    pub merges: Vec<MergeDecision>,
    pub pca: PcaResult,
    pub ranking: VariabilityRanking,
    pub categories: CategoryRanking,
    pub assignment: SignalAssignment,
}

/// Name for a merged attribute: the words both names share, else `a+b`.
pub fn merged_name(a: &str, b: &str) -> String {
    let words = |s: &str| -> Vec<String> {
        s.split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(String::from)
            .collect()
    };
    let wb: Vec<String> = words(b).iter().map(|w| w.to_lowercase()).collect();
    let common: Vec<String> = words(a)
        .into_iter()
        .filter(|w| wb.contains(&w.to_lowercase()))
        .collect();
    if common.is_empty() {
        format!("{a}+{b}")
    } else {
        common.join("_")
    }
}

fn run_pca(table: &NormalisedTable) -> Result<PcaResult> {
    let names = table.columns.names().to_vec();
    pca::pca(&pca::covariance(table, &names)?)
}

pub fn analyse(cfg: &RunConfig) -> Result<Analysis, StageError> {
    cfg.validate().at(Stage::Config)?;
    let (_, mut resampled) = load(cfg)?;
    for name in &cfg.exclude {
        resampled.columns.remove(name).at(Stage::Ingest)?;
    }

    let mut table = NormalisedTable::from_resampled(&resampled).at(Stage::Prep)?;
    let marker = match &cfg.marker_col {
        Some(m) => Some(table.remove(m).at(Stage::Prep)?),
        None => None,
    };

    // Merge until no pair qualifies; each round re-runs PCA on the result.
    let mut merges = Vec::new();
    let mut pca = run_pca(&table).at(Stage::Pca)?;
    loop {
        let mut candidates =
            pca::find_merge_candidates(&pca, cfg.merge_threshold, &table).at(Stage::Pca)?;
        candidates.sort_by(|x, y| y.similarity.total_cmp(&x.similarity));
        let mut used: Vec<String> = Vec::new();
        let mut merged_any = false;
        for c in candidates {
            let gated = cfg.merge_min_p.is_none_or(|level| c.p_value > level);
            let free = !used.contains(&c.a) && !used.contains(&c.b);
            let mut name = merged_name(&c.a, &c.b);
            if name != c.a && name != c.b && table.columns.index_of(&name).is_some() {
                name = format!("{}+{}", c.a, c.b);
            }
            let merged = gated && free && table.columns.width() > 2;
            if merged {
                table.merge(&c.a, &c.b, &name).at(Stage::Prep)?;
                used.push(c.a.clone());
                used.push(c.b.clone());
                merged_any = true;
            }
            merges.push(MergeDecision {
                candidate: c,
                merged,
                name,
            });
        }
        if !merged_any {
            break;
        }
        pca = run_pca(&table).at(Stage::Pca)?;
    }

    let k = match cfg.components {
        Some(k) => k,
        None => pca.components_for(RETAINED_VARIANCE),
    };
    let ranking = pca::variability_scores(&pca, k, cfg.score_mode).at(Stage::Pca)?;
    let categories = sigmap::category_ranking(&cfg.weights);
    let assignment = sigmap::assign_categories(&ranking, &categories).at(Stage::Sigmap)?;

    Ok(Analysis {
        resampled,
        table,
        marker,
        merges,
        pca,
        ranking,
        categories,
        assignment,
    })
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub analysis: Analysis,
    pub population: usize,
    pub delta: f64,
    pub f_min: u32,
    pub f_max: u32,
    pub signals: SignalStream,
    pub antigens: AntigenStream,
    pub series: KAlphaSeries,
    pub segments: SegmentMap,
    pub roc: RocCurve,
    /// Segment predictions per ROC row, same order.
    pub predictions: Vec<Vec<SegmentPrediction>>,
}

fn segment_map(cfg: &RunConfig, analysis: &Analysis) -> Result<SegmentMap> {
    let len = analysis.table.len();
    let map = match (&cfg.boundaries, &analysis.marker) {
        (Some(b), _) => SegmentMap::from_boundaries(len, b.clone())?,
        (None, Some(marker)) => ingest::detect_segments(marker, cfg.segments.unwrap_or(7))?,
        (None, None) => {
            return Err(Error::Config(
                "segmentation needs either `boundaries` or a `marker-col`".into(),
            ))
        }
    };
    let labels = match &cfg.labels {
        Some(l) => l.clone(),
        None if map.segment_count() == Label::DRIVING_ROUTE.len() => Label::DRIVING_ROUTE.to_vec(),
        None => {
            return Err(Error::Config(format!(
                "{} segments need an explicit `labels` pattern",
                map.segment_count()
            )))
        }
    };
    map.apply_labels(&labels)
}

pub fn run(cfg: &RunConfig) -> Result<RunResult, StageError> {
    let analysis = analyse(cfg)?;
    let segments = segment_map(cfg, &analysis).at(Stage::Segment)?;

    let f_max = cfg.effective_f_max();
    let (signals, antigens) =
        sigmap::build_streams(&analysis.table, &analysis.assignment, cfg.f_min, f_max)
            .at(Stage::Sigmap)?;

    let delta = cfg
        .delta
        .unwrap_or_else(|| dca::default_delta(cfg.population, &cfg.weights));
    let series =
        dca::run(&signals, &antigens, cfg.population, delta, cfg.weights).at(Stage::Dca)?;

    let thresholds = match &cfg.thresholds {
        Some(t) => t.clone(),
        None => eval::default_thresholds(&series, cfg.grid),
    };
    let roc = eval::roc_curve(&series, &segments, &thresholds).at(Stage::Eval)?;
    let predictions = roc
        .rows
        .iter()
        .map(|r| eval::classify_segments(&series, &segments, r.threshold))
        .collect::<Result<Vec<_>>>()
        .at(Stage::Eval)?;

    Ok(RunResult {
        analysis,
        population: cfg.population,
        delta,
        f_min: cfg.f_min,
        f_max,
        signals,
        antigens,
        series,
        segments,
        roc,
        predictions,
    })
}
