use super::{BoxSpec, Vec2};

/// Square cell decomposition of the periodic box with cell edge at least
/// the interaction cutoff.
///
/// For every cell the sorted union of particle indices in its 3x3 periodic
/// neighbourhood is precomputed, so neighbour iteration always runs in
/// ascending particle index.
#[derive(Debug, Clone)]
pub struct CellList {
    cells_per_side: usize,
    cell_of: Vec<usize>,
    candidates: Vec<Vec<usize>>,
}

impl CellList {
    pub fn build(q: &[Vec2], box_spec: &BoxSpec, r_cutoff: f64) -> Self {
        let side = box_spec.side();
        let cells_per_side = ((side / r_cutoff).floor() as usize).max(1);
        let width = side / cells_per_side as f64;
        let num_cells = cells_per_side * cells_per_side;

        let coord = |x: f64| ((x / width).floor() as usize).min(cells_per_side - 1);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_cells];
        let cell_of: Vec<usize> = q
            .iter()
            .enumerate()
            .map(|(i, qi)| {
                let c = coord(qi.y) * cells_per_side + coord(qi.x);
                members[c].push(i);
                c
            })
            .collect();

        let ncs = cells_per_side as isize;
        let candidates = (0..num_cells)
            .map(|c| {
                let cx = (c % cells_per_side) as isize;
                let cy = (c / cells_per_side) as isize;
                let mut neighbours: Vec<usize> = Vec::with_capacity(9);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let nx = (cx + dx).rem_euclid(ncs) as usize;
                        let ny = (cy + dy).rem_euclid(ncs) as usize;
                        neighbours.push(ny * cells_per_side + nx);
                    }
                }
                neighbours.sort_unstable();
                neighbours.dedup();
                let mut list: Vec<usize> = neighbours
                    .iter()
                    .flat_map(|&n| members[n].iter().copied())
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();

        Self {
            cells_per_side,
            cell_of,
            candidates,
        }
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    /// Candidate partners of particle `i` (excluding `i`) in ascending order.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.candidates[self.cell_of[i]]
            .iter()
            .copied()
            .filter(move |&j| j != i)
    }
}
