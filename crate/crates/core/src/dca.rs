//! Deterministic Dendritic Cell Algorithm.
//!
//! Every cell sees every signal instance; cells differ only in their
//! migration threshold (`index * delta`). Antigen copies are dealt to cells
//! round-robin. A migrating cell presents what it holds together with its
//! accumulated `k`, and `K_alpha` for a type is the mean `k` over all of its
//! presented copies.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sigmap::{AntigenStream, SignalStream, Signals, WeightTable};

/// `(csm, k)` for one signal instance.
pub fn transform_signals(w: &WeightTable, s: Signals) -> (f64, f64) {
    let v = [s.pamp, s.danger, s.safe];
    let dot = |row: &[f64; 3]| row.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
    (dot(&w.csm), dot(&w.k))
}

/// `3 * csm_max / n`: two thirds of the population outlasts one instance.
pub fn default_delta(population: usize, w: &WeightTable) -> f64 {
    3.0 * w.csm_max() / population as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct DendriticCell {
    /// 1-based.
    pub index: usize,
    pub migration_threshold: f64,
    pub csm_acc: f64,
    pub k_acc: f64,
    pub antigen_store: BTreeMap<usize, u32>,
    /// Times the cell reached its threshold, with or without antigen.
    pub resets: u64,
}

impl DendriticCell {
    fn reset(&mut self) -> BTreeMap<usize, u32> {
        self.csm_acc = 0.0;
        self.k_acc = 0.0;
        self.resets += 1;
        std::mem::take(&mut self.antigen_store)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub k: f64,
    pub counts: BTreeMap<usize, u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Engine {
    cells: Vec<DendriticCell>,
    cursor: usize,
    log: Vec<Presentation>,
    weights: WeightTable,
}

impl Engine {
    pub fn new(population: usize, delta: f64, weights: WeightTable) -> Result<Self> {
        if population == 0 {
            return Err(Error::InvalidArgument("population must be at least 1".into()));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "threshold step must be positive, got {delta}"
            )));
        }
        if weights.csm.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidArgument(
                "csm weights must be non-negative so accumulators only grow".into(),
            ));
        }
        let cells = (1..=population)
            .map(|index| DendriticCell {
                index,
                migration_threshold: index as f64 * delta,
                csm_acc: 0.0,
                k_acc: 0.0,
                antigen_store: BTreeMap::new(),
                resets: 0,
            })
            .collect();
        Ok(Engine {
            cells,
            cursor: 0,
            log: Vec::new(),
            weights,
        })
    }

    pub fn cells(&self) -> &[DendriticCell] {
        &self.cells
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn presentations(&self) -> &[Presentation] {
        &self.log
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    /// One second: deal `multiplicity` copies of `antigen`, accumulate the
    /// fused signals in every cell, then migrate every cell at threshold.
    pub fn step(&mut self, antigen: usize, multiplicity: u32, signals: Signals) -> Result<()> {
        if multiplicity == 0 {
            return Err(Error::InvalidArgument(format!(
                "antigen {antigen} has multiplicity 0"
            )));
        }
        for v in [signals.pamp, signals.danger, signals.safe] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "signal value {v} at antigen {antigen} outside [0, 1]"
                )));
            }
        }

        let n = self.cells.len();
        for _ in 0..multiplicity {
            *self.cells[self.cursor].antigen_store.entry(antigen).or_insert(0) += 1;
            self.cursor = (self.cursor + 1) % n;
        }

        let (csm, k) = transform_signals(&self.weights, signals);
        for cell in &mut self.cells {
            cell.csm_acc += csm;
            cell.k_acc += k;
            if cell.csm_acc >= cell.migration_threshold {
                let k = cell.k_acc;
                let counts = cell.reset();
                if !counts.is_empty() {
                    self.log.push(Presentation { k, counts });
                }
            }
        }
        Ok(())
    }

    /// Forces every cell still holding antigen to present it.
    pub fn flush(&mut self) {
        for cell in &mut self.cells {
            if !cell.antigen_store.is_empty() {
                let k = cell.k_acc;
                let counts = cell.reset();
                self.log.push(Presentation { k, counts });
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KAlpha {
    pub antigen: usize,
    pub k_alpha: f64,
    pub presented: u64,
}

/// Per-type anomaly scores, ordered by antigen type.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KAlphaSeries {
    pub entries: Vec<KAlpha>,
}

impl KAlphaSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.k_alpha)
    }

    /// Scores of the antigen types in `range`.
    pub fn in_range(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        let lo = self.entries.partition_point(|e| e.antigen < range.start);
        let hi = self.entries.partition_point(|e| e.antigen < range.end);
        self.entries[lo..hi].iter().map(|e| e.k_alpha).collect()
    }
}

/// Count-weighted mean context per antigen type.
pub fn k_alpha(log: &[Presentation]) -> KAlphaSeries {
    let mut acc: BTreeMap<usize, (f64, u64)> = BTreeMap::new();
    for p in log {
        for (&antigen, &c) in &p.counts {
            let e = acc.entry(antigen).or_insert((0.0, 0));
            e.0 += p.k * f64::from(c);
            e.1 += u64::from(c);
        }
    }
    KAlphaSeries {
        entries: acc
            .into_iter()
            .map(|(antigen, (sum, presented))| KAlpha {
                antigen,
                k_alpha: sum / presented as f64,
                presented,
            })
            .collect(),
    }
}

/// Full run: step through every second, flush, score.
pub fn run_engine(
    signals: &SignalStream,
    antigens: &AntigenStream,
    population: usize,
    delta: f64,
    weights: WeightTable,
) -> Result<Engine> {
    if signals.len() != antigens.len() {
        return Err(Error::LengthMismatch(format!(
            "{} signal seconds but {} antigen seconds",
            signals.len(),
            antigens.len()
        )));
    }
    if signals.is_empty() {
        return Err(Error::InsufficientData("empty input streams".into()));
    }
    let mut engine = Engine::new(population, delta, weights)?;
    for (t, (s, &f)) in signals.iter().zip(antigens).enumerate() {
        engine.step(t, f, *s)?;
    }
    engine.flush();
    Ok(engine)
}

pub fn run(
    signals: &SignalStream,
    antigens: &AntigenStream,
    population: usize,
    delta: f64,
    weights: WeightTable,
) -> Result<KAlphaSeries> {
    let engine = run_engine(signals, antigens, population, delta, weights)?;
    Ok(k_alpha(engine.presentations()))
}
