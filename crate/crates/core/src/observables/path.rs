use crate::error::{Error, Result};
use crate::md::SystemState;

/// Piecewise-linear path in `R^k` on the uniform grid `t_n = n * dt`, `t_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPL {
    dt: f64,
    dim: usize,
    data: Vec<f64>,
}

impl PathPL {
    /// `nodes` are the values at the grid times; at least two are required.
    pub fn new(dt: f64, nodes: Vec<Vec<f64>>) -> Result<Self> {
        let dim = nodes.first().map(|v| v.len()).unwrap_or(0);
        if nodes.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter("path nodes have mixed dimensions".into()));
        }
        Self::from_flat(dt, dim, nodes.into_iter().flatten().collect())
    }

    pub fn from_flat(dt: f64, dim: usize, data: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing {dt} must be positive")));
        }
        if dim == 0 || !data.len().is_multiple_of(dim) || data.len() / dim < 2 {
            return Err(Error::InvalidParameter("a path needs at least two nodes".into()));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("path values must be finite".into()));
        }
        Ok(Self { dt, dim, data })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Final time `T = (len - 1) * dt`.
    pub fn horizon(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    pub fn node(&self, n: usize) -> &[f64] {
        &self.data[n * self.dim..(n + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    /// Linear interpolation at time `t`, clamped to `[0, T]`.
    pub fn at(&self, t: f64) -> Vec<f64> {
        let last = self.len() - 1;
        let x = (t / self.dt).clamp(0.0, last as f64);
        let idx = (x.floor() as usize).min(last - 1);
        let s = x - idx as f64;
        let a = self.node(idx);
        let b = self.node(idx + 1);
        a.iter().zip(b).map(|(a, b)| a + (b - a) * s).collect()
    }

    /// Same path on a grid `factor` times finer; exact for piecewise-linear paths.
    pub fn refine(&self, factor: usize) -> Self {
        if factor <= 1 {
            return self.clone();
        }
        let mut data = Vec::with_capacity(((self.len() - 1) * factor + 1) * self.dim);
        for n in 0..self.len() - 1 {
            let (a, b) = (self.node(n), self.node(n + 1));
            for j in 0..factor {
                let s = j as f64 / factor as f64;
                data.extend(a.iter().zip(b).map(|(a, b)| a + (b - a) * s));
            }
        }
        data.extend_from_slice(self.node(self.len() - 1));
        Self {
            dt: self.dt / factor as f64,
            dim: self.dim,
            data,
        }
    }

    /// Adds a constant vector to every node.
    pub fn shifted(&self, c: &[f64]) -> Self {
        let mut out = self.clone();
        for chunk in out.data.chunks_exact_mut(self.dim) {
            for (x, d) in chunk.iter_mut().zip(c) {
                *x += d;
            }
        }
        out
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= lambda);
        out
    }
}

/// Unwrapped displacement `Q` of one particle: `Q^0 = 0` and
/// `Q^n = dt * sum_{i<n} p^i`, linearly interpolated.
pub fn unwrap_displacement(states: &[SystemState], particle: usize, dt: f64) -> Result<PathPL> {
    if states.len() < 2 {
        return Err(Error::InvalidParameter("need at least two recorded states".into()));
    }
    if let Some(s) = states.iter().find(|s| particle >= s.len()) {
        return Err(Error::IndexOutOfRange {
            index: particle,
            len: s.len(),
        });
    }
    let mut data = Vec::with_capacity(2 * states.len());
    let (mut sx, mut sy) = (0.0, 0.0);
    data.extend([0.0, 0.0]);
    for s in &states[..states.len() - 1] {
        sx += s.p[particle].x;
        sy += s.p[particle].y;
        data.extend([dt * sx, dt * sy]);
    }
    PathPL::from_flat(dt, 2, data)
}

fn align(a: &PathPL, b: &PathPL) -> Result<(PathPL, PathPL)> {
    if a.dim != b.dim {
        return Err(Error::GridMismatch(format!("dimensions {} and {}", a.dim, b.dim)));
    }
    if a.len() == b.len() && (a.dt - b.dt).abs() <= 1e-12 * a.dt {
        return Ok((a.clone(), b.clone()));
    }
    let (coarse, fine, swapped) = if a.dt > b.dt { (a, b, false) } else { (b, a, true) };
    let ratio = (coarse.dt / fine.dt).round();
    let consistent = ratio >= 1.0
        && (ratio * fine.dt - coarse.dt).abs() <= 1e-9 * coarse.dt
        && (coarse.len() - 1) * ratio as usize == fine.len() - 1;
    if !consistent {
        return Err(Error::GridMismatch(format!(
            "grids ({} nodes, dt {}) and ({} nodes, dt {}) are not nested",
            a.len(),
            a.dt,
            b.len(),
            b.dt
        )));
    }
    let refined = coarse.refine(ratio as usize);
    Ok(if swapped { (fine.clone(), refined) } else { (refined, fine.clone()) })
}

/// `sup_t |a(t) - b(t)|` with the Euclidean norm. Nested grids are aligned by
/// exact refinement of the coarser path; the difference is then linear on
/// every segment, so its norm peaks at a node.
pub fn sup_distance(a: &PathPL, b: &PathPL) -> Result<f64> {
    let (a, b) = align(a, b)?;
    Ok(a.nodes()
        .zip(b.nodes())
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md::{BoxSpec, PotentialSpec, Vec2};

    fn path(dt: f64, pts: &[[f64; 2]]) -> PathPL {
        PathPL::new(dt, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn states(ps: &[[f64; 2]], offset: f64) -> Vec<SystemState> {
        let b = BoxSpec::new(11.5, &PotentialSpec::default()).unwrap();
        ps.iter()
            .map(|p| {
                SystemState::new(
                    vec![Vec2::new(1.0 + offset, 2.0), Vec2::new(5.0, 5.0 + offset)],
                    vec![Vec2::new(p[0], p[1]), Vec2::zeros()],
                    &b,
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn unwrap_examples() {
        let z = unwrap_displacement(&states(&[[0.0, 0.0]; 4], 0.0), 0, 0.1).unwrap();
        assert!(z.nodes().all(|n| n == [0.0, 0.0]));
        let c = unwrap_displacement(&states(&[[1.0, 0.0]; 11], 0.0), 0, 0.1).unwrap();
        assert_eq!(c.node(10), &[1.0, 0.0]);
        assert!((c.horizon() - 1.0).abs() < 1e-15);
        assert!(unwrap_displacement(&states(&[[1.0, 0.0]], 0.0), 0, 0.1).is_err());
        assert!(unwrap_displacement(&states(&[[1.0, 0.0]; 3], 0.0), 2, 0.1).is_err());
    }

    #[test]
    fn unwrap_ignores_positions() {
        let ps = [[0.3, -0.2], [0.1, 0.5], [-0.7, 0.2], [0.0, 0.9]];
        let a = unwrap_displacement(&states(&ps, 0.0), 0, 0.05).unwrap();
        let b = unwrap_displacement(&states(&ps, 3.3), 0, 0.05).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sup_distance_examples() {
        let a = path(0.5, &[[0.0, 0.0], [1.0, 2.0], [-1.0, 0.5]]);
        assert_eq!(sup_distance(&a, &a).unwrap(), 0.0);
        let b = a.shifted(&[3.0, 4.0]);
        assert!((sup_distance(&a, &b).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn sup_distance_matches_dense_sampling() {
        let a = path(0.7, &[[0.1, -0.3], [1.2, 0.4], [-0.6, 0.9]]);
        let b = path(0.7, &[[-0.2, 0.5], [0.3, -1.1], [0.8, 0.2]]);
        let t_end = a.horizon();
        let dense = (0..=10_000)
            .map(|i| {
                let t = t_end * i as f64 / 10_000.0;
                let (x, y) = (a.at(t), b.at(t));
                ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max);
        assert!((sup_distance(&a, &b).unwrap() - dense).abs() < 1e-12);
    }

    #[test]
    fn nested_grids_are_aligned() {
        let coarse = path(0.5, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        let fine = coarse.refine(5);
        assert_eq!(fine.len(), 11);
        assert!(sup_distance(&coarse, &fine).unwrap() < 1e-15);
        assert!(sup_distance(&fine, &coarse).unwrap() < 1e-15);
        let other = path(0.3, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(sup_distance(&coarse, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn at_interpolates() {
        let a = path(0.5, &[[0.0, 0.0], [1.0, 2.0]]);
        assert_eq!(a.at(0.25), vec![0.5, 1.0]);
        assert_eq!(a.at(9.0), vec![1.0, 2.0]);
    }
}
