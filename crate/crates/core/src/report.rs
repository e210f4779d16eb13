//! CSV artefacts and the human-readable run summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dca::KAlphaSeries;
use crate::error::Result;
use crate::eval::{RocCurve, SegmentPrediction};
use crate::fmt::{sig6, write_atomic};
use crate::ingest::AttributeStats;
use crate::pipeline::{Analysis, RunResult, StatsReport};

pub fn stats_csv(stats: &[AttributeStats]) -> String {
    let mut out = String::from("name,min,max,median,mean,stdev\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.name,
            sig6(s.min),
            sig6(s.max),
            sig6(s.median),
            sig6(s.mean),
            sig6(s.stdev)
        );
    }
    out
}

/// `attribute,pc1..pcN,score,rank`, rows in PCA input order.
pub fn loadings_csv(a: &Analysis) -> String {
    let p = &a.pca;
    let mut out = String::from("attribute");
    for j in 0..p.order() {
        let _ = write!(out, ",pc{}", j + 1);
    }
    out.push_str(",score,rank\n");
    for (i, name) in p.names.iter().enumerate() {
        out.push_str(name);
        for j in 0..p.order() {
            let _ = write!(out, ",{}", sig6(p.loading(i, j)));
        }
        let (rank, entry) = a
            .ranking
            .attributes
            .iter()
            .enumerate()
            .find(|(_, r)| r.column == i)
            .expect("every attribute is ranked");
        let _ = writeln!(out, ",{},{}", sig6(entry.score), rank + 1);
    }
    out
}

pub fn assignment_csv(a: &Analysis) -> String {
    let mut out = String::from("attribute,rank,score,role,inverted\n");
    for (rank, r) in a.ranking.attributes.iter().enumerate() {
        let role = a.assignment.role(&r.name).unwrap_or_else(|| "unused".into());
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.name,
            rank + 1,
            sig6(r.score),
            role,
            a.assignment.is_inverted(&r.name)
        );
    }
    out
}

pub fn merges_csv(a: &Analysis) -> String {
    let mut out = String::from("a,b,similarity,u,p_value,merged,name\n");
    for m in &a.merges {
        let c = &m.candidate;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.a,
            c.b,
            sig6(c.similarity),
            sig6(c.u_statistic),
            sig6(c.p_value),
            m.merged,
            m.name
        );
    }
    out
}

pub fn k_alpha_csv(series: &KAlphaSeries, source_seconds: &[i64]) -> String {
    let mut out = String::from("type,seconds,k_alpha,presented_count\n");
    for e in &series.entries {
        let seconds = source_seconds.get(e.antigen).copied().unwrap_or(e.antigen as i64);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            e.antigen,
            seconds,
            sig6(e.k_alpha),
            e.presented
        );
    }
    out
}

pub fn roc_csv(roc: &RocCurve) -> String {
    let mut out = String::from("threshold,tp_rate,fp_rate\n");
    for r in &roc.rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            sig6(r.threshold),
            sig6(r.tp_rate),
            sig6(r.fp_rate)
        );
    }
    let _ = writeln!(out, "# auc={}", sig6(roc.auc));
    out
}

pub fn segments_csv(preds: &[SegmentPrediction]) -> String {
    let mut out = String::from("segment,start,end,true_label,L,predicted_label\n");
    for p in preds {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.segment,
            p.start,
            p.end,
            p.truth,
            sig6(p.l),
            p.predicted
        );
    }
    out
}

fn analysis_summary(a: &Analysis, out: &mut String) {
    let _ = writeln!(out, "seconds: {}", a.table.len());
    let merged: Vec<String> = a
        .merges
        .iter()
        .filter(|m| m.merged)
        .map(|m| format!("{} + {} -> {}", m.candidate.a, m.candidate.b, m.name))
        .collect();
    let _ = writeln!(
        out,
        "merged: {}",
        if merged.is_empty() { "none".into() } else { merged.join("; ") }
    );
    let _ = writeln!(
        out,
        "ranking ({}, {} components): {}",
        a.ranking.mode,
        a.ranking.retained,
        a.ranking.names().join(", ")
    );
    let cats: Vec<String> = a
        .categories
        .order
        .iter()
        .zip(a.categories.magnitudes)
        .map(|(c, m)| format!("{c} ({})", sig6(m)))
        .collect();
    let _ = writeln!(out, "categories: {}", cats.join(", "));
    let _ = writeln!(out, "antigen: {}", a.assignment.antigen);
    for (cat, attrs) in &a.assignment.groups {
        let attrs: Vec<String> = attrs
            .iter()
            .map(|n| {
                if a.assignment.is_inverted(n) {
                    format!("inverted {n}")
                } else {
                    n.clone()
                }
            })
            .collect();
        let _ = writeln!(out, "{cat}: {}", attrs.join(", "));
    }
}

pub fn analysis_summary_text(a: &Analysis) -> String {
    let mut out = String::new();
    analysis_summary(a, &mut out);
    out
}

pub fn run_summary_text(r: &RunResult) -> String {
    let mut out = String::new();
    analysis_summary(&r.analysis, &mut out);
    let _ = writeln!(out, "population: {}", r.population);
    let _ = writeln!(out, "delta: {}", sig6(r.delta));
    let _ = writeln!(out, "antigen frequency: {}..={}", r.f_min, r.f_max);
    let b: Vec<String> = r.segments.boundaries().iter().map(|b| b.to_string()).collect();
    let _ = writeln!(out, "boundaries: {}", b.join(","));
    if let Some(labels) = r.segments.labels() {
        let l: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "labels: {}", l.join(","));
    }
    let _ = writeln!(out, "threshold,tp_rate,fp_rate");
    for row in &r.roc.rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            sig6(row.threshold),
            sig6(row.tp_rate),
            sig6(row.fp_rate)
        );
    }
    let _ = writeln!(out, "auc: {}", sig6(r.roc.auc));
    out
}

fn put(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    write_atomic(&path, contents.as_bytes())?;
    written.push(path);
    Ok(())
}

pub fn write_stats(r: &StatsReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut w = Vec::new();
    put(dir, "stats_raw.csv", &stats_csv(&r.raw), &mut w)?;
    put(dir, "stats_resampled.csv", &stats_csv(&r.resampled), &mut w)?;
    Ok(w)
}

pub fn write_analysis(a: &Analysis, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut w = Vec::new();
    put(dir, "loadings.csv", &loadings_csv(a), &mut w)?;
    put(dir, "assignment.csv", &assignment_csv(a), &mut w)?;
    put(dir, "merges.csv", &merges_csv(a), &mut w)?;
    Ok(w)
}

pub fn write_run(r: &RunResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut w = write_analysis(&r.analysis, dir)?;
    put(
        dir,
        "k_alpha.csv",
        &k_alpha_csv(&r.series, &r.analysis.table.source_seconds),
        &mut w,
    )?;
    put(dir, "roc.csv", &roc_csv(&r.roc), &mut w)?;
    for (i, (row, preds)) in r.roc.rows.iter().zip(&r.predictions).enumerate() {
        let name = format!("segments_{:02}_th{}.csv", i, sig6(row.threshold));
        put(dir, &name, &segments_csv(preds), &mut w)?;
    }
    put(dir, "summary.txt", &run_summary_text(r), &mut w)?;
    Ok(w)
}
