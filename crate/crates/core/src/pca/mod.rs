//! Covariance, eigendecomposition, attribute variability ranking and
//! detection of attributes that carry the same information.

mod jacobi;
mod wilcoxon;

pub use jacobi::{jacobi_eigen, SymMatrix};
pub use wilcoxon::{wilcoxon_rank_sum, RankSum};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::prep::NormalisedTable;

/// Sample covariance of a set of named attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    pub names: Vec<String>,
    pub matrix: SymMatrix,
}

impl CovMatrix {
    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.order()).map(|i| self.matrix.get(i, i)).sum()
    }
}

/// Covariance over `attributes` with an `n - 1` denominator. Each pair is
/// computed once and mirrored.
pub fn covariance(table: &NormalisedTable, attributes: &[String]) -> Result<CovMatrix> {
    let cols = attributes
        .iter()
        .map(|a| table.columns.get(a))
        .collect::<Result<Vec<_>>>()?;
    covariance_of(attributes.to_vec(), &cols)
}

pub fn covariance_of(names: Vec<String>, cols: &[&[f64]]) -> Result<CovMatrix> {
    if cols.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} attributes, PCA needs at least 2",
            cols.len()
        )));
    }
    let n = cols[0].len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} rows, need at least 2")));
    }
    if cols.iter().any(|c| c.len() != n) {
        return Err(Error::LengthMismatch("attribute columns differ in length".into()));
    }
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let p = cols.len();
    let mut m = SymMatrix::zeros(p);
    for i in 0..p {
        for j in i..p {
            let s: f64 = cols[i]
                .iter()
                .zip(cols[j])
                .map(|(x, y)| (x - means[i]) * (y - means[j]))
                .sum();
            m.set_sym(i, j, s / (n - 1) as f64);
        }
    }
    Ok(CovMatrix { names, matrix: m })
}

/// Eigenpairs sorted by eigenvalue, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub names: Vec<String>,
    pub eigenvalues: Vec<f64>,
    /// `components[j][i]` is the loading of attribute `i` on component `j`.
    pub components: Vec<Vec<f64>>,
}

impl PcaResult {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn loading(&self, attribute: usize, component: usize) -> f64 {
        self.components[component][attribute]
    }

    pub fn explained_fractions(&self) -> Vec<f64> {
        let total: f64 = self.eigenvalues.iter().map(|l| l.max(0.0)).sum();
        self.eigenvalues
            .iter()
            .map(|l| if total > 0.0 { l.max(0.0) / total } else { 0.0 })
            .collect()
    }

    /// Smallest component count whose cumulative explained fraction is at
    /// least `target`.
    pub fn components_for(&self, target: f64) -> usize {
        let mut acc = 0.0;
        for (k, f) in self.explained_fractions().iter().enumerate() {
            acc += f;
            if acc >= target - 1e-12 {
                return k + 1;
            }
        }
        self.order()
    }
}

pub fn pca(cov: &CovMatrix) -> Result<PcaResult> {
    let eig = jacobi_eigen(&cov.matrix)?;
    Ok(PcaResult {
        names: cov.names.clone(),
        eigenvalues: eig.values,
        components: eig.vectors,
    })
}

/// How an attribute's share of the data scatter is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreMode {
    /// Variance the attribute contributes to the retained subspace,
    /// `sum_j lambda_j * v_ij^2`.
    #[default]
    Subspace,
    /// Magnitude of the attribute's loading on the first component.
    Pc1,
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreMode::Subspace => "subspace",
            ScoreMode::Pc1 => "pc1",
        })
    }
}

impl FromStr for ScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "subspace" => Ok(ScoreMode::Subspace),
            "pc1" => Ok(ScoreMode::Pc1),
            other => Err(Error::InvalidArgument(format!(
                "unknown score mode `{other}` (expected subspace or pc1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedAttribute {
    pub name: String,
    /// Position in the PCA input.
    pub column: usize,
    pub score: f64,
}

/// Attributes ordered by variability, highest first.
#[derive(Debug, Clone, PartialEq)]
pub struct VariabilityRanking {
    pub retained: usize,
    pub mode: ScoreMode,
    pub attributes: Vec<RankedAttribute>,
}

impl VariabilityRanking {
    pub fn names(&self) -> Vec<&str> {
        self.attributes.iter().map(|a| a.name.as_str()).collect()
    }
}

/// Scores every attribute over the first `k` components and sorts them.
/// Equal scores keep input column order.
pub fn variability_scores(p: &PcaResult, k: usize, mode: ScoreMode) -> Result<VariabilityRanking> {
    if k == 0 || k > p.order() {
        return Err(Error::InvalidArgument(format!(
            "retained components {k} outside 1..={}",
            p.order()
        )));
    }
    let mut attributes: Vec<RankedAttribute> = (0..p.order())
        .map(|i| {
            let score = match mode {
                ScoreMode::Subspace => (0..k)
                    .map(|j| p.eigenvalues[j] * p.loading(i, j).powi(2))
                    .sum(),
                ScoreMode::Pc1 => p.loading(i, 0).abs(),
            };
            RankedAttribute {
                name: p.names[i].clone(),
                column: i,
                score,
            }
        })
        .collect();
    attributes.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(VariabilityRanking {
        retained: k,
        mode,
        attributes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeCandidate {
    pub a: String,
    pub b: String,
    pub similarity: f64,
    pub u_statistic: f64,
    pub p_value: f64,
}

/// Attribute pairs pointing the same way in the PC1-PC2 plane. Each pair's
/// direction is its biplot arrow, the loadings scaled by `sqrt(lambda)`, so
/// a zero-variance component cannot split duplicated attributes apart.
pub fn find_merge_candidates(
    p: &PcaResult,
    threshold: f64,
    table: &NormalisedTable,
) -> Result<Vec<MergeCandidate>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "merge threshold {threshold} outside (0, 1]"
        )));
    }
    let dims = p.order().min(2);
    let arrow = |i: usize| -> Vec<f64> {
        (0..dims)
            .map(|j| p.eigenvalues[j].max(0.0).sqrt() * p.loading(i, j))
            .collect()
    };
    let mut out = Vec::new();
    for i in 0..p.order() {
        for j in i + 1..p.order() {
            let similarity = cosine(&arrow(i), &arrow(j));
            if similarity >= threshold {
                let rs = wilcoxon_rank_sum(
                    table.columns.get(&p.names[i])?,
                    table.columns.get(&p.names[j])?,
                )?;
                out.push(MergeCandidate {
                    a: p.names[i].clone(),
                    b: p.names[j].clone(),
                    similarity,
                    u_statistic: rs.u,
                    p_value: rs.p_value,
                });
            }
        }
    }
    Ok(out)
}

fn cosine(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    (dot / (nx * ny)).clamp(-1.0, 1.0)
}
