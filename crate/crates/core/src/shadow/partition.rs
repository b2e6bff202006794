use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::EmpiricalSample;

/// How the common cell count `m` (so cell mass `m / N`) is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CellSizePolicy {
    /// Smallest feasible `m`; gives the tightest coupling bound.
    #[default]
    Finest,
    /// Largest feasible `m`; fewest, coarsest cells.
    Coarsest,
    Fixed(usize),
}

/// Equal-count cells of a sample, each inside one covering ball, plus a
/// small remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellPartition {
    /// Point indices of each cell, in slicing order.
    pub cells: Vec<Vec<usize>>,
    /// Indices not in any cell, ascending.
    pub remainder: Vec<usize>,
    pub epsilon: f64,
    pub cell_size: usize,
    pub n_points: usize,
}

impl CellPartition {
    /// Mass of one cell, `m / N`.
    pub fn delta(&self) -> f64 {
        self.cell_size as f64 / self.n_points as f64
    }

    pub fn remainder_mass(&self) -> f64 {
        self.remainder.len() as f64 / self.n_points as f64
    }

    /// Checks equal cell counts, disjoint cover, image diameter below epsilon,
    /// remainder mass below epsilon, and cell mass below epsilon.
    pub fn check(&self, sample: &EmpiricalSample) -> std::result::Result<(), String> {
        let n = sample.len();
        if n != self.n_points {
            return Err(format!("partition of {} points applied to {n}", self.n_points));
        }
        let mut seen = vec![false; n];
        for &i in self.cells.iter().flatten().chain(&self.remainder) {
            if i >= n || seen[i] {
                return Err(format!("index {i} repeated or out of range"));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err("cells and remainder do not cover the sample".into());
        }
        for (c, cell) in self.cells.iter().enumerate() {
            if cell.len() != self.cell_size {
                return Err(format!("cell {c} has {} points, expected {}", cell.len(), self.cell_size));
            }
            for &a in cell {
                for &b in cell {
                    let d = sample.distance(a, sample, b).map_err(|e| e.to_string())?;
                    if d >= self.epsilon {
                        return Err(format!("cell {c} has diameter {d} >= {}", self.epsilon));
                    }
                }
            }
        }
        if self.remainder_mass() >= self.epsilon {
            return Err(format!("remainder mass {} >= {}", self.remainder_mass(), self.epsilon));
        }
        if self.delta() >= self.epsilon {
            return Err(format!("cell mass {} >= {}", self.delta(), self.epsilon));
        }
        Ok(())
    }

    /// Moves the last cells into the remainder so that `n_cells` remain.
    pub(crate) fn truncate(&mut self, n_cells: usize) {
        while self.cells.len() > n_cells {
            let cell = self.cells.pop().expect("len > n_cells");
            self.remainder.extend(cell);
        }
        self.remainder.sort_unstable();
    }
}

/// Disjoint covering sets: the open ball of radius `epsilon / 2` about each
/// point in index order, minus all earlier balls. Each set is sorted by the
/// slicing key with index tie-breaking.
pub fn covering_sets(sample: &EmpiricalSample, epsilon: f64) -> Result<Vec<Vec<usize>>> {
    let n = sample.len();
    let mut assigned = vec![false; n];
    let mut sets = Vec::new();
    for centre in 0..n {
        let mut set = Vec::new();
        for (i, done) in assigned.iter_mut().enumerate() {
            if !*done && sample.distance(centre, sample, i)? < 0.5 * epsilon {
                *done = true;
                set.push(i);
            }
        }
        if !set.is_empty() {
            set.sort_by(|&a, &b| {
                sample
                    .slice_key(a)
                    .total_cmp(&sample.slice_key(b))
                    .then(a.cmp(&b))
            });
            sets.push(set);
        }
    }
    Ok(sets)
}

fn slice(sets: &[Vec<usize>], m: usize, epsilon: f64, n: usize) -> CellPartition {
    let mut cells = Vec::new();
    let mut remainder = Vec::new();
    for set in sets {
        let full = set.len() / m * m;
        cells.extend(set[..full].chunks(m).map(<[usize]>::to_vec));
        remainder.extend_from_slice(&set[full..]);
    }
    remainder.sort_unstable();
    CellPartition {
        cells,
        remainder,
        epsilon,
        cell_size: m,
        n_points: n,
    }
}

fn feasible(p: &CellPartition) -> bool {
    p.delta() < p.epsilon && p.remainder_mass() < p.epsilon
}

/// Partitions a sample of projected points into cells of equal count with
/// image diameter below `epsilon`, cell mass below `epsilon` and remainder
/// mass below `epsilon`.
pub fn partition_sample(
    sample: &EmpiricalSample,
    epsilon: f64,
    policy: CellSizePolicy,
) -> Result<CellPartition> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    let n = sample.len();
    if 1.0 / n as f64 >= epsilon {
        return Err(Error::InfeasiblePartition(format!(
            "cell mass 1/N = {} is not below epsilon = {epsilon}; need more than 1/epsilon points",
            1.0 / n as f64
        )));
    }
    let sets = covering_sets(sample, epsilon)?;
    let candidates: Box<dyn Iterator<Item = usize>> = match policy {
        CellSizePolicy::Finest => Box::new(1..=n),
        CellSizePolicy::Coarsest => Box::new((1..=n).rev()),
        CellSizePolicy::Fixed(m) if m >= 1 && m <= n => Box::new(std::iter::once(m)),
        CellSizePolicy::Fixed(m) => {
            return Err(Error::InvalidParameter(format!("cell size {m} outside 1..={n}")))
        }
    };
    let mut last = None;
    for m in candidates {
        let p = slice(&sets, m, epsilon, n);
        if feasible(&p) {
            return Ok(p);
        }
        last = Some(p);
    }
    let p = last.expect("at least one candidate size");
    let reason = if p.delta() >= epsilon {
        format!("cell mass {} is not below epsilon = {epsilon}", p.delta())
    } else {
        format!("remainder mass {} is not below epsilon = {epsilon}", p.remainder_mass())
    };
    Err(Error::InfeasiblePartition(reason))
}
