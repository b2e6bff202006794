use serde::{Deserialize, Serialize};

use super::hall::{hall_matching, SlackRelation};
use super::partition::{partition_sample, CellPartition, CellSizePolicy};
use crate::error::{Error, Result};
use crate::metrics::{pairwise_distances, prokhorov_empirical, DistanceMatrix, EmpiricalSample};

/// Bijection `i -> assignment[i]` from sample X to sample Y with the feature
/// distance of every pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMap {
    pub assignment: Vec<usize>,
    pub per_pair_distance: Vec<f64>,
}

impl CouplingMap {
    pub fn new(assignment: Vec<usize>, cross: &DistanceMatrix) -> Result<Self> {
        let n = assignment.len();
        if cross.rows() != n || cross.cols() != n {
            return Err(Error::UnequalSampleSizes {
                left: cross.rows(),
                right: cross.cols(),
            });
        }
        let mut seen = vec![false; n];
        for &j in &assignment {
            if j >= n || seen[j] {
                return Err(Error::InvalidParameter("assignment is not a bijection".into()));
            }
            seen[j] = true;
        }
        let per_pair_distance = assignment.iter().enumerate().map(|(i, &j)| cross.get(i, j)).collect();
        Ok(Self {
            assignment,
            per_pair_distance,
        })
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.len()];
        self.assignment
            .iter()
            .all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
    }

    /// Fraction of pairs with distance strictly greater than `beta`.
    pub fn exceedance(&self, beta: f64) -> f64 {
        let bad = self.per_pair_distance.iter().filter(|&&d| d > beta).count();
        bad as f64 / self.len() as f64
    }

    /// `(beta, exceedance(beta))` on an even grid of `points` values in `[0, beta_max]`.
    pub fn exceedance_curve(&self, beta_max: f64, points: usize) -> Vec<(f64, f64)> {
        let steps = points.max(2) - 1;
        (0..=steps)
            .map(|s| {
                let b = beta_max * s as f64 / steps as f64;
                (b, self.exceedance(b))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakShadowingReport {
    pub beta: f64,
    pub exceedance: f64,
    pub pass: bool,
    /// `(i, assignment[i], distance)` above `beta`; empty on a pass.
    pub offending: Vec<(usize, usize, f64)>,
}

/// Passes iff the fraction of pairs farther apart than `beta` is strictly
/// below `beta`.
pub fn verify_weak_shadowing(map: &CouplingMap, beta: f64) -> WeakShadowingReport {
    let exceedance = map.exceedance(beta);
    let pass = exceedance < beta;
    let offending = if pass {
        Vec::new()
    } else {
        map.per_pair_distance
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d > beta)
            .map(|(i, &d)| (i, map.assignment[i], d))
            .collect()
    };
    WeakShadowingReport {
        beta,
        exceedance,
        pass,
        offending,
    }
}

/// Everything produced by the construction, for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowMap {
    pub map: CouplingMap,
    /// Prokhorov distance between the two samples.
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub k: usize,
    pub n_cells: usize,
    pub partition_x: CellPartition,
    pub partition_y: CellPartition,
    /// Cell matching over real and slack indices.
    pub cell_matching: Vec<usize>,
}

impl ShadowMap {
    /// Upper bound on `exceedance(alpha + 3 epsilon)` implied by the
    /// construction: slack-matched cells plus the remainder.
    pub fn bound(&self) -> f64 {
        self.k as f64 * self.delta + self.epsilon
    }
}

/// Partitions both sides with a common cell size and the same number of
/// cells. Tries the finer of the two preferred sizes first and falls back to
/// smaller sizes.
fn common_partitions(
    x: &EmpiricalSample,
    y: &EmpiricalSample,
    epsilon: f64,
    policy: CellSizePolicy,
) -> Result<(CellPartition, CellPartition)> {
    let px = partition_sample(x, epsilon, policy)?;
    let py = partition_sample(y, epsilon, policy)?;
    let mut last_err = None;
    for m in (1..=px.cell_size.min(py.cell_size)).rev() {
        let fixed = CellSizePolicy::Fixed(m);
        let (mut px, mut py) = match (
            partition_sample(x, epsilon, fixed),
            partition_sample(y, epsilon, fixed),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                last_err = Some(e);
                continue;
            }
        };
        let n_cells = px.cells.len().min(py.cells.len());
        px.truncate(n_cells);
        py.truncate(n_cells);
        if px.remainder_mass() < epsilon && py.remainder_mass() < epsilon {
            return Ok((px, py));
        }
        last_err = Some(Error::InfeasiblePartition(format!(
            "equalising cell counts at m = {m} leaves remainder mass {} >= epsilon = {epsilon}",
            px.remainder_mass().max(py.remainder_mass())
        )));
    }
    Err(last_err.expect("m = 1 is always tried"))
}

/// Builds a bijection between two equal-size samples of projected points
/// whose exceedance at `alpha + 3 epsilon` is below `alpha + 3 epsilon`,
/// where `alpha` is their Prokhorov distance.
///
/// Both samples are cut into cells of `m` points with diameter below
/// `epsilon`. Cells are matched within the relation "closest points nearer
/// than `alpha + epsilon`" padded with `k = ceil((alpha + epsilon) / delta)`
/// slack cells per side. Points of matched cells are paired in slicing
/// order, everything else by ascending index.
pub fn build_shadow_map(
    x: &EmpiricalSample,
    y: &EmpiricalSample,
    epsilon: f64,
    policy: CellSizePolicy,
) -> Result<ShadowMap> {
    if x.len() != y.len() {
        return Err(Error::UnequalSampleSizes {
            left: x.len(),
            right: y.len(),
        });
    }
    let cross = pairwise_distances(x, y)?;
    let alpha = prokhorov_empirical(&cross)?.value;
    build_shadow_map_with(x, y, &cross, alpha, epsilon, policy)
}

/// As [`build_shadow_map`] with a precomputed cross-distance matrix and
/// `alpha`. An `alpha` below the true distance may produce a Hall violation.
pub fn build_shadow_map_with(
    x: &EmpiricalSample,
    y: &EmpiricalSample,
    cross: &DistanceMatrix,
    alpha: f64,
    epsilon: f64,
    policy: CellSizePolicy,
) -> Result<ShadowMap> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be non-negative")));
    }
    let (px, py) = common_partitions(x, y, epsilon, policy)?;
    let n = px.cells.len();
    let delta = px.delta();
    let k = ((alpha + epsilon) / delta).ceil() as usize;
    let rel = SlackRelation::from_cells(&px.cells, &py.cells, cross, alpha + epsilon, k)?;
    let phi_bar = hall_matching(&rel)?;

    // keep real-to-real pairs, fill the rest with the lowest free real cell
    let mut phi: Vec<Option<usize>> = phi_bar[..n].iter().map(|&j| (j < n).then_some(j)).collect();
    let mut taken = vec![false; n];
    for j in phi.iter().flatten() {
        taken[*j] = true;
    }
    let mut free = (0..n).filter(|&j| !taken[j]);
    let phi: Vec<usize> = phi
        .iter_mut()
        .map(|p| *p.get_or_insert_with(|| free.next().expect("phi_bar is a bijection")))
        .collect();

    let mut assignment = vec![usize::MAX; x.len()];
    for (i, &j) in phi.iter().enumerate() {
        for (&a, &b) in px.cells[i].iter().zip(&py.cells[j]) {
            assignment[a] = b;
        }
    }
    for (&a, &b) in px.remainder.iter().zip(&py.remainder) {
        assignment[a] = b;
    }
    let map = CouplingMap::new(assignment, cross)?;
    Ok(ShadowMap {
        map,
        alpha,
        epsilon,
        delta,
        k,
        n_cells: n,
        partition_x: px,
        partition_y: py,
        cell_matching: phi_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> EmpiricalSample {
        EmpiricalSample::features(
            (0..n)
                .map(|_| vec![rng.sample(StandardNormal), rng.sample(StandardNormal)])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_samples_pair_within_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = gaussian(40, &mut rng);
        for eps in [0.05, 0.1, 0.5] {
            let s = build_shadow_map(&x, &x, eps, CellSizePolicy::Finest).unwrap();
            assert_eq!(s.alpha, 0.0);
            assert!(s.map.is_bijection());
            assert_eq!(s.map.exceedance(3.0 * eps), 0.0);
            assert!(s.map.per_pair_distance.iter().all(|&d| d < eps));
        }
    }

    #[test]
    fn constant_shift() {
        // X all at 0 and Y all at 0.3: alpha = 0.3 and every pair is 0.3 apart
        let x = EmpiricalSample::features(vec![vec![0.0]; 40]).unwrap();
        let y = EmpiricalSample::features(vec![vec![0.3]; 40]).unwrap();
        let s = build_shadow_map(&x, &y, 0.05, CellSizePolicy::Finest).unwrap();
        assert_eq!(s.alpha, 0.3);
        assert!(s.map.per_pair_distance.iter().all(|&d| (d - 0.3).abs() < 1e-15));
        assert_eq!(s.map.exceedance(s.alpha + 0.15), 0.0);
    }

    #[test]
    fn single_point_is_infeasible() {
        let x = EmpiricalSample::scalars(&[0.0]).unwrap();
        let y = EmpiricalSample::scalars(&[0.3]).unwrap();
        assert!(matches!(
            build_shadow_map(&x, &y, 0.05, CellSizePolicy::Finest),
            Err(Error::InfeasiblePartition(_))
        ));
    }

    #[test]
    fn random_pairs_meet_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x = gaussian(64, &mut rng);
            let y = gaussian(64, &mut rng);
            for policy in [CellSizePolicy::Finest, CellSizePolicy::Coarsest] {
                let s = build_shadow_map(&x, &y, 0.1, policy).unwrap();
                let beta = s.alpha + 3.0 * s.epsilon;
                assert!(s.map.is_bijection());
                assert!(s.map.exceedance(beta) < s.bound());
                assert!(verify_weak_shadowing(&s.map, beta).pass);
            }
        }
    }

    #[test]
    fn underestimated_alpha_reports_violation() {
        let x = EmpiricalSample::scalars(&(0..20).map(|i| i as f64 * 0.01).collect::<Vec<_>>()).unwrap();
        let y = x.translated(&[5.0]);
        let cross = pairwise_distances(&x, &y).unwrap();
        let e = build_shadow_map_with(&x, &y, &cross, 0.0, 0.1, CellSizePolicy::Finest).unwrap_err();
        assert!(matches!(e, Error::NoPerfectMatching { .. }));
    }

    #[test]
    fn weak_shadowing_boundaries() {
        let zero = DistanceMatrix::from_rows(vec![vec![0.0; 4]; 4], crate::metrics::MetricTag::Euclidean).unwrap();
        let m = CouplingMap::new(vec![0, 1, 2, 3], &zero).unwrap();
        let r = verify_weak_shadowing(&m, 0.1);
        assert!(r.pass && r.exceedance == 0.0);

        let mut rows = vec![vec![0.0; 100]; 100];
        rows[17][17] = 1e300;
        let d = DistanceMatrix::from_rows(rows, crate::metrics::MetricTag::Euclidean).unwrap();
        let m = CouplingMap::new((0..100).collect(), &d).unwrap();
        let r = verify_weak_shadowing(&m, 0.05);
        assert!(r.pass);
        assert_eq!(r.exceedance, 0.01);

        // exceedance exactly beta fails
        let r = verify_weak_shadowing(&m, 0.01);
        assert!(!r.pass);
        assert_eq!(r.offending, vec![(17, 17, 1e300)]);
    }

    #[test]
    fn rejects_non_bijection() {
        let zero = DistanceMatrix::from_rows(vec![vec![0.0; 2]; 2], crate::metrics::MetricTag::Euclidean).unwrap();
        assert!(CouplingMap::new(vec![0, 0], &zero).is_err());
    }
}
