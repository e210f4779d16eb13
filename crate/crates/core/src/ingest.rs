//! CSV loading, 1 Hz resampling, descriptive statistics and marker-based
//! segmentation.

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Named real-valued columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Columns {
    names: Vec<String>,
    data: Vec<Vec<f64>>,
}

impl Columns {
    pub fn new(names: Vec<String>, data: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != data.len() {
            return Err(Error::Schema(format!(
                "{} names for {} columns",
                names.len(),
                data.len()
            )));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Schema(format!("duplicate column name `{n}`")));
            }
        }
        if let Some(first) = data.first() {
            if let Some((i, c)) = data.iter().enumerate().find(|(_, c)| c.len() != first.len()) {
                return Err(Error::LengthMismatch(format!(
                    "column `{}` has {} values, expected {}",
                    names[i],
                    c.len(),
                    first.len()
                )));
            }
        }
        Ok(Columns { names, data })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn width(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Result<&[f64]> {
        self.index_of(name)
            .map(|i| self.data[i].as_slice())
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.data.iter().map(Vec::as_slice))
    }

    pub(crate) fn remove(&mut self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        self.names.remove(i);
        Ok(self.data.remove(i))
    }

    pub(crate) fn replace(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        self.data[i] = values;
        Ok(())
    }
}

/// Raw samples as read from disk; timestamps in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub timestamps: Vec<f64>,
    pub columns: Columns,
}

impl RawTable {
    pub fn new(timestamps: Vec<f64>, columns: Columns) -> Result<Self> {
        if timestamps.is_empty() {
            return Err(Error::InsufficientData("table has no rows".into()));
        }
        if columns.width() > 0 && columns.len() != timestamps.len() {
            return Err(Error::LengthMismatch(format!(
                "{} timestamps for {} rows",
                timestamps.len(),
                columns.len()
            )));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Schema(format!(
                "timestamps decrease at row {}",
                i + 1
            )));
        }
        Ok(RawTable {
            timestamps,
            columns,
        })
    }

    pub fn describe(&self, column: &str) -> Result<AttributeStats> {
        describe(column, self.columns.get(column)?)
    }
}

/// One row per whole second, re-indexed contiguously from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledTable {
    /// Absolute second (`floor(t / 1000)`) each row was built from.
    pub source_seconds: Vec<i64>,
    pub columns: Columns,
}

impl ResampledTable {
    pub fn len(&self) -> usize {
        self.source_seconds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_seconds.is_empty()
    }

    pub fn describe(&self, column: &str) -> Result<AttributeStats> {
        describe(column, self.columns.get(column)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeStats {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub mean: f64,
    pub stdev: f64,
}

/// Reads a comma-separated file whose header names every column. The column
/// called `time_col` becomes the timestamp vector.
pub fn load_csv(path: &Path, time_col: &str) -> Result<RawTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, time_col)
}

pub fn parse_csv(text: &str, time_col: &str) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(Error::Schema("empty file, no header row".into())),
        Some(r) => r.map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?,
    };
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    let mut seen = HashSet::new();
    for n in &names {
        if n.is_empty() {
            return Err(Error::Schema("empty column name in header".into()));
        }
        if !seen.insert(n.as_str()) {
            return Err(Error::Schema(format!("duplicate column name `{n}`")));
        }
    }
    let time_idx = names
        .iter()
        .position(|n| n == time_col)
        .ok_or_else(|| Error::Schema(format!("time column `{time_col}` not in header")))?;

    let mut data = vec![Vec::new(); names.len()];
    for rec in records {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != names.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", names.len(), rec.len()),
            });
        }
        for (i, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("non-numeric value `{cell}` in column `{}`", names[i]),
            })?;
            data[i].push(v);
        }
    }
    if data[0].is_empty() {
        return Err(Error::Schema("header present but no data rows".into()));
    }

    let timestamps = data.remove(time_idx);
    let mut names = names;
    names.remove(time_idx);
    RawTable::new(timestamps, Columns::new(names, data)?)
}

/// Averages every column within each whole second `[s*1000, (s+1)*1000)`.
/// Seconds without samples are skipped and the rest re-indexed from 0.
pub fn resample_average(raw: &RawTable) -> ResampledTable {
    let mut source_seconds = Vec::new();
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); raw.columns.width()];
    let mut sums = vec![0.0; raw.columns.width()];
    let mut count = 0usize;
    let mut current: Option<i64> = None;

    let mut flush = |sec: i64, sums: &mut [f64], count: usize, data: &mut Vec<Vec<f64>>| {
        source_seconds.push(sec);
        for (col, s) in data.iter_mut().zip(sums.iter_mut()) {
            col.push(*s / count as f64);
            *s = 0.0;
        }
    };

    for (row, &t) in raw.timestamps.iter().enumerate() {
        let sec = (t / 1000.0).floor() as i64;
        if let Some(cur) = current {
            if cur != sec {
                flush(cur, &mut sums, count, &mut data);
                count = 0;
            }
        }
        current = Some(sec);
        for (i, s) in sums.iter_mut().enumerate() {
            *s += raw.columns.column(i)[row];
        }
        count += 1;
    }
    if let Some(cur) = current {
        flush(cur, &mut sums, count, &mut data);
    }

    ResampledTable {
        source_seconds,
        columns: Columns {
            names: raw.columns.names.clone(),
            data,
        },
    }
}

/// Min, max, median, mean and sample standard deviation (n - 1).
pub fn describe(name: &str, values: &[f64]) -> Result<AttributeStats> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "column `{name}` has {n} values, need at least 2"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mean = values.iter().sum::<f64>() / n as f64;
    // Clamp guards the invariant against rounding in the summed mean.
    let mean = mean.clamp(sorted[0], sorted[n - 1]);
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(AttributeStats {
        name: name.to_string(),
        min: sorted[0],
        max: sorted[n - 1],
        median,
        mean,
        stdev: var.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Anomalous,
    Normal,
}

impl Label {
    /// Rest, City, Highway, City, Highway, City, Rest.
    pub const DRIVING_ROUTE: [Label; 7] = [
        Label::Normal,
        Label::Anomalous,
        Label::Normal,
        Label::Anomalous,
        Label::Normal,
        Label::Anomalous,
        Label::Normal,
    ];
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Anomalous => "anomalous",
            Label::Normal => "normal",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "anomalous" | "a" | "1" => Ok(Label::Anomalous),
            "normal" | "n" | "0" => Ok(Label::Normal),
            other => Err(Error::InvalidArgument(format!("unknown label `{other}`"))),
        }
    }
}

/// Contiguous segments over `[0, len)`, split at `boundaries`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMap {
    len: usize,
    boundaries: Vec<usize>,
    labels: Option<Vec<Label>>,
}

impl SegmentMap {
    pub fn from_boundaries(len: usize, boundaries: Vec<usize>) -> Result<Self> {
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "segment boundaries must be strictly increasing".into(),
            ));
        }
        if let Some(&b) = boundaries.iter().find(|&&b| b == 0 || b >= len) {
            return Err(Error::InvalidArgument(format!(
                "boundary {b} outside the timeline (0, {len})"
            )));
        }
        Ok(SegmentMap {
            len,
            boundaries,
            labels: None,
        })
    }

    pub fn timeline_len(&self) -> usize {
        self.len
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn segment_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut starts = vec![0];
        starts.extend_from_slice(&self.boundaries);
        let mut ends = self.boundaries.clone();
        ends.push(self.len);
        starts.into_iter().zip(ends).map(|(s, e)| s..e).collect()
    }

    pub fn apply_labels(mut self, pattern: &[Label]) -> Result<Self> {
        if pattern.len() != self.segment_count() {
            return Err(Error::LengthMismatch(format!(
                "{} labels for {} segments",
                pattern.len(),
                self.segment_count()
            )));
        }
        self.labels = Some(pattern.to_vec());
        Ok(self)
    }
}

/// Picks the `n_segments - 1` highest strict local maxima of `marker`, keeping
/// chosen peaks at least `len / (2 * n_segments)` indices apart. Equal heights
/// prefer the earlier index.
pub fn detect_segments(marker: &[f64], n_segments: usize) -> Result<SegmentMap> {
    if n_segments < 2 {
        return Err(Error::InvalidArgument("need at least 2 segments".into()));
    }
    if marker.len() < n_segments {
        return Err(Error::InsufficientData(format!(
            "marker has {} values for {n_segments} segments",
            marker.len()
        )));
    }
    let wanted = n_segments - 1;
    let min_sep = (marker.len() / (2 * n_segments)).max(1);

    let mut candidates: Vec<usize> = (1..marker.len() - 1)
        .filter(|&i| marker[i] > marker[i - 1] && marker[i] > marker[i + 1])
        .collect();
    candidates.sort_by(|&a, &b| marker[b].total_cmp(&marker[a]).then(a.cmp(&b)));

    let mut chosen: Vec<usize> = Vec::with_capacity(wanted);
    for c in candidates {
        if chosen.iter().all(|&p| p.abs_diff(c) >= min_sep) {
            chosen.push(c);
            if chosen.len() == wanted {
                break;
            }
        }
    }
    if chosen.len() < wanted {
        return Err(Error::Detection {
            wanted,
            found: chosen.len(),
        });
    }
    chosen.sort_unstable();
    SegmentMap::from_boundaries(marker.len(), chosen)
}
