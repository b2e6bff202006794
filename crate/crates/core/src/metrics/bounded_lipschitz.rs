//! Bounded-Lipschitz distance between uniform empirical measures.
//!
//! The program `max (1/N_A) sum g(a_i) - (1/N_B) sum g(b_j)` subject to
//! `max|g| + Lip(g) <= 1` over the pooled points is solved through its dual.
//! For a fixed Lipschitz budget `L` (and bound `1 - L`) the inner maximum is
//! the optimal transport cost under the truncated metric
//! `c_L = min(L d, 2 (1 - L))`, and `V(L)` is concave in `L`. The outer
//! problem is a one-dimensional concave maximisation driven by the
//! supergradients that optimal transport plans provide; the bracketing
//! tangents give a duality gap at every iteration.

use super::assignment::{solve_assignment, Assignment};
use super::{pairwise_distances, DistanceMatrix, EmpiricalSample, MetricResult};
use crate::error::{Error, Result};

/// Iteration budget of the outer search.
pub const MAX_ITERATIONS: usize = 100_000;
/// Largest replicated assignment size used for unequal sample sizes.
pub const MAX_ASSIGNMENT_SIZE: usize = 720;
const GAP_TOLERANCE: f64 = 1e-9;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct Problem<'a> {
    pooled: &'a DistanceMatrix,
    n_a: usize,
    n_b: usize,
    size: usize,
    rep_a: usize,
    rep_b: usize,
}

struct Probe {
    budget: f64,
    value: f64,
    slope: f64,
    plan: Assignment,
}

impl Problem<'_> {
    fn cross(&self, row: usize, col: usize) -> f64 {
        self.pooled.get(row / self.rep_a, self.n_a + col / self.rep_b)
    }

    fn truncated(budget: f64, d: f64) -> f64 {
        (budget * d).min(2.0 * (1.0 - budget))
    }

    fn probe(&self, budget: f64) -> Probe {
        let plan = solve_assignment(self.size, |i, j| Self::truncated(budget, self.cross(i, j)));
        let k = self.size as f64;
        let value = plan.cost / k;
        // derivative of each active branch; at a tie the left branch is used
        let slope = plan
            .row_to_col
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let d = self.cross(i, j);
                if budget * d <= 2.0 * (1.0 - budget) {
                    d
                } else {
                    -2.0
                }
            })
            .sum::<f64>()
            / k;
        Probe {
            budget,
            value,
            slope,
            plan,
        }
    }

    /// Test function from the transport duals by a c-transform over the
    /// pooled points, centred so that `|g| <= 1 - L`.
    fn certificate(&self, probe: &Probe) -> Vec<f64> {
        let budget = probe.budget;
        let total = self.n_a + self.n_b;
        let f: Vec<f64> = (0..total)
            .map(|x| {
                (0..self.size)
                    .map(|c| {
                        let d = self.pooled.get(x, self.n_a + c / self.rep_b);
                        Self::truncated(budget, d) - probe.plan.col_potential[c]
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
        let centre = 0.5 * (hi + lo);
        f.into_iter().map(|x| x - centre).collect()
    }
}

/// Value of the test function `g` in the program objective.
pub fn bl_objective(g: &[f64], n_a: usize) -> f64 {
    let (a, b) = g.split_at(n_a);
    a.iter().sum::<f64>() / a.len() as f64 - b.iter().sum::<f64>() / b.len() as f64
}

/// `max|g| + max_{x != y} |g(x) - g(y)| / d(x, y)` over the pooled points;
/// coincident points with different values give infinity.
pub fn bl_norm(g: &[f64], pooled: &DistanceMatrix) -> f64 {
    let sup = g.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut lip: f64 = 0.0;
    for i in 0..g.len() {
        for j in 0..g.len() {
            let diff = (g[i] - g[j]).abs();
            if diff == 0.0 {
                continue;
            }
            let d = pooled.get(i, j);
            lip = lip.max(if d > 0.0 { diff / d } else { f64::INFINITY });
        }
    }
    sup + lip
}

/// Bounded-Lipschitz distance from the distance matrix of the pooled
/// sample `A ++ B`, whose first `n_a` points belong to `A`.
pub fn bl_distance_empirical(pooled: &DistanceMatrix, n_a: usize) -> Result<MetricResult> {
    let total = pooled.rows();
    if pooled.cols() != total {
        return Err(Error::InvalidParameter("pooled distance matrix must be square".into()));
    }
    if n_a == 0 || n_a >= total {
        return Err(Error::InvalidParameter(format!(
            "split {n_a} leaves one side of the pooled sample empty"
        )));
    }
    let n_b = total - n_a;
    let size = n_a / gcd(n_a, n_b) * n_b;
    if size > MAX_ASSIGNMENT_SIZE {
        return Err(Error::InvalidParameter(format!(
            "sample sizes {n_a} and {n_b} need a {size}-point assignment (limit {MAX_ASSIGNMENT_SIZE})"
        )));
    }
    let problem = Problem {
        pooled,
        n_a,
        n_b,
        size,
        rep_a: size / n_a,
        rep_b: size / n_b,
    };

    let mut lo = problem.probe(0.0);
    let mut hi = problem.probe(1.0);
    let mut best_is_lo = true;
    let mut gap = f64::INFINITY;
    let mut best_value = lo.value.max(hi.value);

    for iter in 0..MAX_ITERATIONS {
        if lo.slope <= 0.0 {
            best_is_lo = true;
            gap = 0.0;
            break;
        }
        if hi.slope >= 0.0 {
            best_is_lo = false;
            gap = 0.0;
            break;
        }
        // intersection of the two bracketing tangents bounds the optimum
        let cross = ((hi.value - lo.value) + lo.slope * lo.budget - hi.slope * hi.budget)
            / (lo.slope - hi.slope);
        let cross = cross.clamp(lo.budget, hi.budget);
        let bound = (lo.value + lo.slope * (cross - lo.budget))
            .min(hi.value + hi.slope * (cross - hi.budget));
        best_value = lo.value.max(hi.value);
        best_is_lo = lo.value >= hi.value;
        gap = (bound - best_value).max(0.0);
        if gap <= GAP_TOLERANCE * 1e-3 || hi.budget - lo.budget <= f64::EPSILON {
            break;
        }
        let width = hi.budget - lo.budget;
        let next = if iter % 2 == 0 && cross > lo.budget + 1e-3 * width && cross < hi.budget - 1e-3 * width {
            cross
        } else {
            lo.budget + 0.5 * width
        };
        let p = problem.probe(next);
        if p.slope > 0.0 {
            lo = p;
        } else if p.slope < 0.0 {
            hi = p;
        } else {
            lo = p;
            best_is_lo = true;
            gap = 0.0;
            break;
        }
    }
    if gap > GAP_TOLERANCE {
        return Err(Error::NonConvergence { gap });
    }
    let best = if best_is_lo { &lo } else { &hi };
    best_value = best_value.max(best.value);
    let g = problem.certificate(best);
    Ok(MetricResult {
        value: best_value,
        epsilon: None,
        matching_pairs: Vec::new(),
        unmatched: Vec::new(),
        test_function: Some(g),
        duality_gap: Some(gap),
    })
}

/// Convenience wrapper pooling the two samples.
pub fn bl_distance(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<MetricResult> {
    let pooled = a.pooled(b)?;
    let d = pairwise_distances(&pooled, &pooled)?;
    bl_distance_empirical(&d, a.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix4, Vector4};

    fn scalars(v: &[f64]) -> EmpiricalSample {
        EmpiricalSample::scalars(v).unwrap()
    }

    /// Exhaustive grid search over (g_a, g_b) for two unit masses at distance t.
    fn grid_two_points(t: f64) -> f64 {
        let steps = 2000;
        let mut best: f64 = 0.0;
        for i in 0..=steps {
            let ga = -1.0 + 2.0 * i as f64 / steps as f64;
            for j in 0..=steps {
                let gb = -1.0 + 2.0 * j as f64 / steps as f64;
                if ga.abs().max(gb.abs()) + (ga - gb).abs() / t <= 1.0 + 1e-12 {
                    best = best.max(ga - gb);
                }
            }
        }
        best
    }

    /// Vertex enumeration of the linear program for three pooled points
    /// (variables g_1, g_2, g_3, L with bound 1 - L).
    fn vertex_oracle(pooled: &DistanceMatrix, n_a: usize) -> f64 {
        let mut rows: Vec<([f64; 4], f64)> = Vec::new();
        for i in 0..3 {
            let mut e = [0.0; 4];
            e[i] = 1.0;
            e[3] = 1.0;
            rows.push((e, 1.0)); // g_i + L <= 1
            let mut e = [0.0; 4];
            e[i] = -1.0;
            e[3] = 1.0;
            rows.push((e, 1.0)); // -g_i + L <= 1
            for j in 0..3 {
                if i != j {
                    let mut e = [0.0; 4];
                    e[i] = 1.0;
                    e[j] = -1.0;
                    e[3] = -pooled.get(i, j);
                    rows.push((e, 0.0));
                }
            }
        }
        rows.push(([0.0, 0.0, 0.0, -1.0], 0.0));
        rows.push(([0.0, 0.0, 0.0, 1.0], 1.0));
        let n_b = 3 - n_a;
        let c: Vec<f64> = (0..3)
            .map(|i| if i < n_a { 1.0 / n_a as f64 } else { -1.0 / n_b as f64 })
            .collect();
        let m = rows.len();
        let mut best = f64::NEG_INFINITY;
        for a in 0..m {
            for b in a + 1..m {
                for cc in b + 1..m {
                    for d in cc + 1..m {
                        let idx = [a, b, cc, d];
                        let mat = Matrix4::from_fn(|r, k| rows[idx[r]].0[k]);
                        let rhs = Vector4::from_fn(|r, _| rows[idx[r]].1);
                        let Some(x) = mat.lu().solve(&rhs) else { continue };
                        if rows.iter().all(|(e, r)| {
                            e.iter().zip(x.iter()).map(|(u, v)| u * v).sum::<f64>() <= r + 1e-9
                        }) {
                            best = best.max(c[0] * x[0] + c[1] * x[1] + c[2] * x[2]);
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn identical_samples() {
        let a = scalars(&[0.0, 1.0, 3.0]);
        let r = bl_distance(&a, &a).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn two_unit_masses() {
        for t in [0.3, 1.0, 2.0, 3.5] {
            let r = bl_distance(&scalars(&[0.0]), &scalars(&[t])).unwrap();
            let closed = 2.0 * t / (2.0 + t);
            assert!((r.value - closed).abs() < 1e-9, "t = {t}: {} vs {closed}", r.value);
            assert!((r.value - grid_two_points(t)).abs() < 2e-3);
        }
        let r = bl_distance(&scalars(&[0.0]), &scalars(&[2.0])).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_points_match_vertex_enumeration() {
        let cases: [(&[f64], &[f64]); 5] = [
            (&[0.0, 1.0], &[0.5]),
            (&[0.0, 3.0], &[0.2]),
            (&[0.0], &[0.7, 4.0]),
            (&[1.0, 1.0], &[0.0]),
            (&[0.0, 0.1], &[2.5]),
        ];
        for (a, b) in cases {
            let pooled = scalars(a).pooled(&scalars(b)).unwrap();
            let d = pairwise_distances(&pooled, &pooled).unwrap();
            let r = bl_distance_empirical(&d, a.len()).unwrap();
            let oracle = vertex_oracle(&d, a.len());
            assert!((r.value - oracle).abs() < 1e-9, "{a:?} {b:?}: {} vs {oracle}", r.value);
        }
    }

    #[test]
    fn certificate_is_feasible_and_optimal() {
        let a = EmpiricalSample::features(vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![0.2, 2.0]]).unwrap();
        let b = EmpiricalSample::features(vec![vec![0.3, 0.1], vec![1.5, 1.5], vec![-1.0, 0.4]]).unwrap();
        let pooled = a.pooled(&b).unwrap();
        let d = pairwise_distances(&pooled, &pooled).unwrap();
        let r = bl_distance_empirical(&d, 3).unwrap();
        let g = r.test_function.as_ref().unwrap();
        assert!(bl_norm(g, &d) <= 1.0 + 1e-9);
        assert!((bl_objective(g, 3) - r.value).abs() < 1e-9);
        assert!(r.duality_gap.unwrap() <= 1e-9);
    }

    #[test]
    fn unequal_sizes_are_supported() {
        let r = bl_distance(&scalars(&[0.0, 0.0]), &scalars(&[0.0, 0.0, 1.0])).unwrap();
        // mass 1/3 must travel distance 1: value 2t/(2+t) scaled by 1/3
        assert!((r.value - (2.0 / 3.0) / 3.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn bad_split() {
        let d = pairwise_distances(&scalars(&[0.0, 1.0]), &scalars(&[0.0, 1.0])).unwrap();
        assert!(bl_distance_empirical(&d, 0).is_err());
        assert!(bl_distance_empirical(&d, 2).is_err());
    }
}
