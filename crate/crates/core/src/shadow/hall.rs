use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::matching::{alternating_reach, hopcroft_karp};
use crate::metrics::DistanceMatrix;

/// Relation on `n + k` indices per side. Indices `0..n` are real cells,
/// `n..n + k` are slack and related to everything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackRelation {
    n: usize,
    k: usize,
    /// `real[i]` lists the real columns related to real row `i`, ascending.
    real: Vec<Vec<usize>>,
}

impl SlackRelation {
    pub fn new(n: usize, k: usize, mut real: Vec<Vec<usize>>) -> Result<Self> {
        if real.len() != n {
            return Err(Error::InvalidParameter(format!("{} adjacency rows for n = {n}", real.len())));
        }
        for row in &mut real {
            row.sort_unstable();
            row.dedup();
            if row.last().is_some_and(|&j| j >= n) {
                return Err(Error::InvalidParameter("real adjacency column out of range".into()));
            }
        }
        Ok(Self { n, k, real })
    }

    /// Real cell `i` of X is related to real cell `j` of Y iff the closest
    /// pair of their points is nearer than `threshold`.
    pub fn from_cells(
        cells_x: &[Vec<usize>],
        cells_y: &[Vec<usize>],
        cross: &DistanceMatrix,
        threshold: f64,
        k: usize,
    ) -> Result<Self> {
        if cells_x.len() != cells_y.len() {
            return Err(Error::InvalidParameter(format!(
                "cell counts differ: {} and {}",
                cells_x.len(),
                cells_y.len()
            )));
        }
        let real = cells_x
            .iter()
            .map(|cx| {
                (0..cells_y.len())
                    .filter(|&j| {
                        cx.iter()
                            .any(|&a| cells_y[j].iter().any(|&b| cross.get(a, b) < threshold))
                    })
                    .collect()
            })
            .collect();
        Self::new(cells_x.len(), k, real)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.n + self.k
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        i >= self.n || j >= self.n || self.real[i].binary_search(&j).is_ok()
    }

    /// Full adjacency lists over all `n + k` rows.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.size()).collect();
        (0..self.size())
            .map(|i| {
                if i < self.n {
                    let mut row = self.real[i].clone();
                    row.extend(self.n..self.size());
                    row
                } else {
                    all.clone()
                }
            })
            .collect()
    }
}

/// Perfect matching of a slack relation, as `phi[i]` for every row.
///
/// A maximum real-to-real matching of size `r` extends to a perfect matching
/// iff `r >= n - k`: unmatched real rows take slack columns, unmatched real
/// columns take slack rows, and the leftover slack pairs up. On failure the
/// error carries a row set `A` with `|N(A)| < |A|`.
pub fn hall_matching(rel: &SlackRelation) -> Result<Vec<usize>> {
    let (n, k) = (rel.n, rel.k);
    let real = hopcroft_karp(&rel.real, n);
    let r = real.iter().flatten().count();
    if r + k < n {
        let adj = rel.adjacency();
        let full = hopcroft_karp(&adj, rel.size());
        let (violating_set, neighborhood) = alternating_reach(&adj, rel.size(), &full);
        return Err(Error::NoPerfectMatching {
            set_size: violating_set.len(),
            neighborhood_size: neighborhood.len(),
            violating_set,
            neighborhood,
        });
    }
    let mut phi = vec![usize::MAX; n + k];
    let mut col_used = vec![false; n + k];
    for (i, m) in real.iter().enumerate() {
        if let Some(j) = *m {
            phi[i] = j;
            col_used[j] = true;
        }
    }
    let mut slack_cols = n..n + k;
    for p in phi.iter_mut().take(n).filter(|p| **p == usize::MAX) {
        let j = slack_cols.next().expect("r + k >= n");
        *p = j;
        col_used[j] = true;
    }
    let mut slack_rows = n..n + k;
    for j in (0..n).filter(|&j| !col_used[j]) {
        let i = slack_rows.next().expect("as many free real columns as free real rows");
        phi[i] = j;
    }
    for (i, j) in slack_rows.zip(slack_cols) {
        phi[i] = j;
    }
    debug_assert!(phi.iter().all(|&j| j != usize::MAX));
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_perfect(rel: &SlackRelation, phi: &[usize]) {
        let mut seen = vec![false; rel.size()];
        for (i, &j) in phi.iter().enumerate() {
            assert!(rel.related(i, j), "{i} -> {j} not related");
            assert!(!seen[j]);
            seen[j] = true;
        }
    }

    #[test]
    fn identity_relation() {
        let rel = SlackRelation::new(4, 0, (0..4).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(hall_matching(&rel).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn complete_relation() {
        let rel = SlackRelation::new(2, 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let phi = hall_matching(&rel).unwrap();
        assert_perfect(&rel, &phi);
    }

    #[test]
    fn slack_absorbs_missing_edges() {
        let rel = SlackRelation::new(3, 1, vec![vec![], vec![1], vec![2]]).unwrap();
        let phi = hall_matching(&rel).unwrap();
        assert_perfect(&rel, &phi);
        assert_eq!(phi, vec![3, 1, 2, 0]);
    }

    #[test]
    fn violation_certificate() {
        let rel = SlackRelation::new(3, 0, vec![vec![0], vec![0], vec![1, 2]]).unwrap();
        match hall_matching(&rel) {
            Err(Error::NoPerfectMatching {
                violating_set,
                neighborhood,
                set_size,
                neighborhood_size,
            }) => {
                assert!(neighborhood_size < set_size);
                assert_eq!(violating_set, vec![0, 1]);
                assert_eq!(neighborhood, vec![0]);
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }
}
