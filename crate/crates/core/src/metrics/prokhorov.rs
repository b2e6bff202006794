use serde::{Deserialize, Serialize};

use super::matching::hopcroft_karp;
use super::DistanceMatrix;
use crate::error::{Error, Result};

/// Value of an empirical distance together with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    /// Optimal expansion radius (Prokhorov only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Pairs `(i, j)` of the optimal partial coupling (Prokhorov only).
    pub matching_pairs: Vec<(usize, usize)>,
    /// Row indices left uncoupled (Prokhorov only).
    pub unmatched: Vec<usize>,
    /// Optimal test-function values on the pooled points (bounded-Lipschitz only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_function: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality_gap: Option<f64>,
}

impl MetricResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metric results always serialise")
    }
}

/// Largest `m` with `m / n <= eps`, evaluated with the same floating-point
/// division used to build the candidate radii.
fn allowed_defect(eps: f64, n: usize) -> usize {
    let nf = n as f64;
    let mut m = ((eps * nf).floor().max(0.0) as usize).min(n);
    while m < n && ((m + 1) as f64 / nf) <= eps {
        m += 1;
    }
    while m > 0 && (m as f64 / nf) > eps {
        m -= 1;
    }
    m
}

fn threshold_matching(d: &DistanceMatrix, eps: f64) -> Vec<Option<usize>> {
    let adj: Vec<Vec<usize>> = (0..d.rows())
        .map(|i| (0..d.cols()).filter(|&j| d.get(i, j) <= eps).collect())
        .collect();
    hopcroft_karp(&adj, d.cols())
}

/// Exact Prokhorov distance between two uniform empirical measures of equal
/// size `N`.
///
/// `rho <= eps` holds iff the graph `{(i, j) : d_ij <= eps}` has a matching
/// of size at least `N - floor(N eps)`. Feasibility only changes at the
/// candidates `{d_ij} U {m / N}`, so a binary search over the sorted
/// candidates returns the exact minimum.
pub fn prokhorov_empirical(d: &DistanceMatrix) -> Result<MetricResult> {
    let n = d.rows();
    if d.cols() != n {
        return Err(Error::UnequalSampleSizes {
            left: n,
            right: d.cols(),
        });
    }
    let mut candidates: Vec<f64> = (0..=n).map(|m| m as f64 / n as f64).collect();
    candidates.extend((0..n).flat_map(|i| d.row(i).iter().copied()).filter(|&x| x <= 1.0));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |eps: f64| {
        let m = threshold_matching(d, eps);
        let size = m.iter().flatten().count();
        (size + allowed_defect(eps, n) >= n, m)
    };

    // candidates ends with 1.0, which is always feasible
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    let mut best = feasible(candidates[hi]).1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let (ok, m) = feasible(candidates[mid]);
        if ok {
            hi = mid;
            best = m;
        } else {
            lo = mid + 1;
        }
    }
    let eps = candidates[hi];
    let matching_pairs = best
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|j| (i, j)))
        .collect();
    let unmatched = best
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.is_none().then_some(i))
        .collect();
    Ok(MetricResult {
        value: eps,
        epsilon: Some(eps),
        matching_pairs,
        unmatched,
        test_function: None,
        duality_gap: None,
    })
}
