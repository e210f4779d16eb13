//! Maps PCA-ranked attributes onto the antigen and the three signal
//! categories, then builds the per-second streams the DCA consumes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pca::VariabilityRanking;
use crate::prep::NormalisedTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Pamp,
    Danger,
    Safe,
}

impl Category {
    /// Column order of the weight table, also the tie-break order.
    pub const ALL: [Category; 3] = [Category::Pamp, Category::Danger, Category::Safe];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Pamp => "PAMP",
            Category::Danger => "Danger",
            Category::Safe => "Safe",
        })
    }
}

/// Signal transformation weights, indexed PAMP, Danger, Safe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightTable {
    pub csm: [f64; 3],
    pub k: [f64; 3],
}

impl Default for WeightTable {
    fn default() -> Self {
        WeightTable {
            csm: [2.0, 1.0, 2.0],
            k: [2.0, 1.0, -3.0],
        }
    }
}

impl WeightTable {
    pub fn new(csm: [f64; 3], k: [f64; 3]) -> Result<Self> {
        for (row, name) in [(&csm, "csm"), (&k, "k")] {
            if row.iter().any(|w| !w.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite {name} weight")));
            }
            if row.iter().all(|w| *w == 0.0) {
                return Err(Error::InvalidArgument(format!("{name} weights are all zero")));
            }
        }
        Ok(WeightTable { csm, k })
    }

    /// Largest csm a single instance can produce, `sum |w_csm|`.
    pub fn csm_max(&self) -> f64 {
        self.csm.iter().map(|w| w.abs()).sum()
    }
}

impl fmt::Display for WeightTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &[f64; 3]| {
            r.iter()
                .map(|w| crate::fmt::sig6(*w))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{};{}", row(&self.csm), row(&self.k))
    }
}

/// Parses `"csm_p,csm_d,csm_s;k_p,k_d,k_s"`.
impl FromStr for WeightTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "weights `{s}`: expected two `;`-separated rows"
            )));
        }
        let parse_row = |r: &str| -> Result<[f64; 3]> {
            let v = r
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad weight `{x}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            v.try_into()
                .map_err(|_| Error::InvalidArgument(format!("weight row `{r}` needs 3 values")))
        };
        WeightTable::new(parse_row(rows[0])?, parse_row(rows[1])?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRanking {
    /// Most significant first.
    pub order: [Category; 3],
    /// Magnitudes aligned with `order`.
    pub magnitudes: [f64; 3],
}

/// Ranks categories by `|w_csm| + |w_k|`, ties resolved PAMP, Danger, Safe.
pub fn category_ranking(w: &WeightTable) -> CategoryRanking {
    let mut cats = Category::ALL.map(|c| (c, w.csm[c.index()].abs() + w.k[c.index()].abs()));
    cats.sort_by(|a, b| b.1.total_cmp(&a.1));
    CategoryRanking {
        order: cats.map(|c| c.0),
        magnitudes: cats.map(|c| c.1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalAssignment {
    pub antigen: String,
    /// One group per category, in category-ranking order.
    pub groups: Vec<(Category, Vec<String>)>,
}

impl SignalAssignment {
    pub fn attributes(&self, cat: Category) -> &[String] {
        self.groups
            .iter()
            .find(|(c, _)| *c == cat)
            .map(|(_, a)| a.as_slice())
            .unwrap_or(&[])
    }

    /// Safe-signal attributes enter the DCA complemented.
    pub fn is_inverted(&self, attribute: &str) -> bool {
        self.attributes(Category::Safe).iter().any(|a| a == attribute)
    }

    /// Role of an attribute: `antigen`, a category name, or `None`.
    pub fn role(&self, attribute: &str) -> Option<String> {
        if attribute == self.antigen {
            return Some("antigen".into());
        }
        self.groups
            .iter()
            .find(|(_, attrs)| attrs.iter().any(|a| a == attribute))
            .map(|(c, _)| c.to_string())
    }
}

/// The top-ranked attribute becomes the antigen source. The remaining `m`
/// attributes are cut, in rank order, into three contiguous groups of
/// `m / 3` assigned along `cats`, with any remainder going to the middle
/// group.
pub fn assign_categories(
    ranking: &VariabilityRanking,
    cats: &CategoryRanking,
) -> Result<SignalAssignment> {
    let names = ranking.names();
    if names.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} ranked attributes, need at least 4 (antigen plus one per category)",
            names.len()
        )));
    }
    let rest = &names[1..];
    let base = rest.len() / 3;
    let sizes = [base, rest.len() - 2 * base, base];
    let mut groups = Vec::with_capacity(3);
    let mut at = 0;
    for (cat, size) in cats.order.iter().zip(sizes) {
        groups.push((
            *cat,
            rest[at..at + size].iter().map(|s| s.to_string()).collect(),
        ));
        at += size;
    }
    Ok(SignalAssignment {
        antigen: names[0].to_string(),
        groups,
    })
}

/// `round_half_up(f_min + (f_max - f_min) * x)`.
pub fn antigen_frequency(x: f64, f_min: u32, f_max: u32) -> Result<u32> {
    if f_min >= f_max {
        return Err(Error::InvalidArgument(format!(
            "antigen frequency bounds need F_min < F_max, got {f_min} and {f_max}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "antigen value {x} outside [0, 1]"
        )));
    }
    let f = f64::from(f_min) + f64::from(f_max - f_min) * x;
    Ok(((f + 0.5).floor() as u32).clamp(f_min, f_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Signals {
    pub pamp: f64,
    pub danger: f64,
    pub safe: f64,
}

impl Signals {
    pub fn new(pamp: f64, danger: f64, safe: f64) -> Self {
        Signals { pamp, danger, safe }
    }

    fn set(&mut self, cat: Category, v: f64) {
        match cat {
            Category::Pamp => self.pamp = v,
            Category::Danger => self.danger = v,
            Category::Safe => self.safe = v,
        }
    }
}

/// One `Signals` per second.
pub type SignalStream = Vec<Signals>;

/// Antigen multiplicity per second; the antigen type id is the index.
pub type AntigenStream = Vec<u32>;

/// Averages each category's attributes per second (Safe ones complemented)
/// and derives the antigen multiplicity from the antigen attribute.
pub fn build_streams(
    table: &NormalisedTable,
    a: &SignalAssignment,
    f_min: u32,
    f_max: u32,
) -> Result<(SignalStream, AntigenStream)> {
    let mut signals = vec![Signals::default(); table.len()];
    for (cat, attrs) in &a.groups {
        if attrs.is_empty() {
            continue;
        }
        let cols = attrs
            .iter()
            .map(|n| table.columns.get(n))
            .collect::<Result<Vec<_>>>()?;
        let invert = *cat == Category::Safe;
        for (t, s) in signals.iter_mut().enumerate() {
            let sum: f64 = cols
                .iter()
                .map(|c| if invert { 1.0 - c[t] } else { c[t] })
                .sum();
            s.set(*cat, sum / cols.len() as f64);
        }
    }
    let antigen = table
        .columns
        .get(&a.antigen)?
        .iter()
        .map(|&x| antigen_frequency(x, f_min, f_max))
        .collect::<Result<Vec<_>>>()?;
    Ok((signals, antigen))
}
