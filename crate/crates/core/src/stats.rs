//! Rank statistics: tie-averaged ranks, the Friedman test and the Nemenyi
//! critical difference.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Studentized range statistic divided by sqrt(2) at alpha = 0.05, for 2 to
/// 10 strategies.
const NEMENYI_Q_005: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];

/// Ranks within one row, 1 = best, ties share the mean of their positions.
pub fn rank_row(row: &[f64], lower_is_better: bool) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = row[a].total_cmp(&row[b]);
        if lower_is_better {
            ord
        } else {
            ord.reverse()
        }
    });
    let mut ranks = vec![0.0; row.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && row[idx[end]] == row[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

pub fn rank_rows(scores: &[Vec<f64>], lower_is_better: bool) -> Vec<Vec<f64>> {
    scores.iter().map(|r| rank_row(r, lower_is_better)).collect()
}

fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let s = rows.first().map_or(0, Vec::len);
    let mut sums = vec![0.0; s];
    for row in rows {
        for (acc, v) in sums.iter_mut().zip(row) {
            *acc += v;
        }
    }
    let k = rows.len().max(1) as f64;
    sums.into_iter().map(|x| x / k).collect()
}

/// Mean rank of each strategy (column) across datasets (rows).
pub fn average_ranks(scores: &[Vec<f64>], lower_is_better: bool) -> Vec<f64> {
    column_means(&rank_rows(scores, lower_is_better))
}

/// Friedman statistic over a K × S rank matrix and its chi-squared p-value
/// with S − 1 degrees of freedom.
pub fn friedman_test(ranks: &[Vec<f64>]) -> Result<(f64, f64)> {
    let k = ranks.len();
    if k < 2 {
        return Err(Error::TooFew { what: "datasets", needed: 2, got: k });
    }
    let s = ranks[0].len();
    if s < 3 {
        return Err(Error::TooFew { what: "strategies", needed: 3, got: s });
    }
    if ranks.iter().any(|r| r.len() != s) {
        return Err(Error::Shape("rank rows differ in length"));
    }
    let avg = column_means(ranks);
    let (kf, sf) = (k as f64, s as f64);
    let sum_sq: f64 = avg.iter().map(|r| r * r).sum();
    let stat = 12.0 * kf / (sf * (sf + 1.0)) * (sum_sq - sf * (sf + 1.0) * (sf + 1.0) / 4.0);
    let stat = stat.max(0.0);
    Ok((stat, chi_squared_sf(stat, sf - 1.0)))
}

/// Nemenyi critical difference in average rank for `strategies` compared on
/// `datasets`. Only alpha = 0.05 is tabulated.
pub fn nemenyi_cd(strategies: usize, datasets: usize, alpha: f64) -> Result<f64> {
    if alpha != 0.05 {
        return Err(Error::Unsupported(format!("alpha {alpha} (only 0.05)")));
    }
    if !(2..=10).contains(&strategies) {
        return Err(Error::Unsupported(format!("{strategies} strategies (2 to 10)")));
    }
    if datasets == 0 {
        return Err(Error::TooFew { what: "datasets", needed: 1, got: 0 });
    }
    let s = strategies as f64;
    let q = NEMENYI_Q_005[strategies - 2];
    Ok(q * libm::sqrt(s * (s + 1.0) / (6.0 * datasets as f64)))
}

/// Upper tail of the chi-squared distribution.
pub fn chi_squared_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(df / 2.0, x / 2.0)
}

/// Q(a, x) = Γ(a, x) / Γ(a): series below a + 1, continued fraction above.
fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-15;
    const ITER: usize = 1000;
    let ln_prefix = a * libm::log(x) - x - libm::lgamma(a);
    if x < a + 1.0 {
        let (mut ap, mut del) = (a, 1.0 / a);
        let mut sum = del;
        for _ in 0..ITER {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if libm::fabs(del) < libm::fabs(sum) * EPS {
                break;
            }
        }
        (1.0 - sum * libm::exp(ln_prefix)).clamp(0.0, 1.0)
    } else {
        // modified Lentz
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if libm::fabs(d) < tiny {
                d = tiny;
            }
            c = b + an / c;
            if libm::fabs(c) < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if libm::fabs(del - 1.0) < EPS {
                break;
            }
        }
        (libm::exp(ln_prefix) * h).clamp(0.0, 1.0)
    }
}
