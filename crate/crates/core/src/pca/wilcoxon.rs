use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Pooled sizes up to this use exact enumeration.
const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSum {
    /// Mann-Whitney U of the first sample.
    pub u: f64,
    /// Two-sided p-value, at most 1.
    pub p_value: f64,
    pub exact: bool,
}

/// Wilcoxon rank-sum test with mid-ranks for ties.
///
/// Small pooled samples enumerate every assignment of the observed ranks to
/// the first sample; larger ones use the tie-corrected normal approximation
/// with continuity correction.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSum> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("rank-sum test needs two non-empty samples".into()));
    }
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, tie_sizes) = mid_ranks(&pooled);

    let offset = (na * (na + 1)) as f64 / 2.0;
    let u = ranks[..na].iter().sum::<f64>() - offset;
    let mean = (na * nb) as f64 / 2.0;

    if n <= EXACT_LIMIT {
        let observed = (u - mean).abs();
        let mut total = 0u32;
        let mut extreme = 0u32;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != na {
                continue;
            }
            let r: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
            total += 1;
            if ((r - offset) - mean).abs() >= observed - 1e-9 {
                extreme += 1;
            }
        }
        return Ok(RankSum {
            u,
            p_value: (extreme as f64 / total as f64).min(1.0),
            exact: true,
        });
    }

    let nf = n as f64;
    let ties: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = (na * nb) as f64 / 12.0 * ((nf + 1.0) - ties / (nf * (nf - 1.0)));
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(RankSum {
        u,
        p_value,
        exact: false,
    })
}

/// 1-based ranks with tied values sharing their average rank, plus the size
/// of every tie group.
fn mid_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn separated_pairs() {
        let r = wilcoxon_rank_sum(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.u, 0.0);
        assert!((r.p_value - 2.0 / 6.0).abs() < 1e-15);
        assert!(r.exact);
    }

    #[test]
    fn identical_samples() {
        let r = wilcoxon_rank_sum(&[5.0; 3], &[5.0; 3]).unwrap();
        assert_eq!(r.u, 4.5);
        assert_eq!(r.p_value, 1.0);
        let big = vec![5.0; 20];
        let r = wilcoxon_rank_sum(&big, &big).unwrap();
        assert_eq!(r.u, 200.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.exact);
    }

    #[test]
    fn singletons() {
        let r = wilcoxon_rank_sum(&[1.0], &[2.0]).unwrap();
        assert_eq!(r.u, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn empty_sample_rejected() {
        assert!(wilcoxon_rank_sum(&[], &[1.0]).is_err());
        assert!(wilcoxon_rank_sum(&[1.0], &[]).is_err());
    }

    #[test]
    fn mid_ranks_average_ties() {
        let (r, t) = mid_ranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(t, vec![2]);
    }

    #[test]
    fn normal_approximation_reference() {
        // scipy.stats.mannwhitneyu(range(10), range(5, 15),
        //     alternative='two-sided', method='asymptotic')
        let a: Vec<f64> = (0..10).map(f64::from).collect();
        let b: Vec<f64> = (5..15).map(f64::from).collect();
        let r = wilcoxon_rank_sum(&a, &b).unwrap();
        assert_eq!(r.u, 12.5);
        assert!((r.p_value - 0.005075392315273923).abs() < 1e-12, "{}", r.p_value);
    }

    proptest! {
        #[test]
        fn swapping_samples_mirrors_u(
            a in prop::collection::vec(0u8..6, 1..9),
            b in prop::collection::vec(0u8..6, 1..9),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let ab = wilcoxon_rank_sum(&a, &b).unwrap();
            let ba = wilcoxon_rank_sum(&b, &a).unwrap();
            prop_assert!((ab.u + ba.u - (a.len() * b.len()) as f64).abs() < 1e-9);
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
            prop_assert!(ab.p_value > 0.0 && ab.p_value <= 1.0);
        }
    }
}
