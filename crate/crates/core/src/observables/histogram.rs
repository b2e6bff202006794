use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `bins` equal-width bins covering `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl BinSpec {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || bins == 0 {
            return Err(Error::InvalidParameter(format!(
                "bin range [{lo}, {hi}] with {bins} bins is invalid"
            )));
        }
        Ok(Self { lo, hi, bins })
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.bins as f64;
        let mut e: Vec<f64> = (0..self.bins).map(|i| self.lo + i as f64 * w).collect();
        e.push(self.hi);
        e
    }
}

/// Bin counts over half-open bins `[e_i, e_{i+1})`, the last bin closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.counts.iter().sum::<u64>()
    }

    /// CSV with header `bin_left,bin_right,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.edges[i], self.edges[i + 1], c);
        }
        out
    }
}

pub fn histogram(values: &[f64], spec: &BinSpec) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("histogram of an empty sample".into()));
    }
    let spec = BinSpec::new(spec.lo, spec.hi, spec.bins)?;
    let edges = spec.edges();
    let mut counts = vec![0u64; spec.bins];
    let (mut underflow, mut overflow) = (0, 0);
    for &v in values {
        if v.is_nan() {
            return Err(Error::InvalidParameter("NaN value in histogram input".into()));
        }
        if v < spec.lo {
            underflow += 1;
        } else if v > spec.hi {
            overflow += 1;
        } else if v == spec.hi {
            counts[spec.bins - 1] += 1;
        } else {
            // number of edges <= v, so values on an interior edge go right
            let k = edges.partition_point(|&e| e <= v);
            counts[k - 1] += 1;
        }
    }
    Ok(Histogram {
        edges,
        counts,
        underflow,
        overflow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_assignment() {
        let spec = BinSpec::new(0.0, 1.0, 4).unwrap();
        let h = histogram(&[0.125], &spec).unwrap();
        assert_eq!(h.counts, vec![1, 0, 0, 0]);
        let h = histogram(&[0.5], &spec).unwrap();
        assert_eq!(h.counts, vec![0, 0, 1, 0]);
        let h = histogram(&[1.0, 0.0, -0.1, 1.5], &spec).unwrap();
        assert_eq!(h.counts, vec![1, 0, 0, 1]);
        assert_eq!((h.underflow, h.overflow), (1, 1));
        assert_eq!(h.total(), 4);
    }

    #[test]
    fn uniform_grid_fills_bins_evenly() {
        let values: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let h = histogram(&values, &BinSpec::new(0.0, 1.0, 10).unwrap()).unwrap();
        assert_eq!(h.counts, vec![10; 10]);
    }

    #[test]
    fn csv_layout() {
        let h = histogram(&[0.2, 0.7], &BinSpec::new(0.0, 1.0, 2).unwrap()).unwrap();
        assert_eq!(h.to_csv(), "bin_left,bin_right,count\n0,0.5,1\n0.5,1,1\n");
    }

    #[test]
    fn errors() {
        assert!(histogram(&[], &BinSpec { lo: 0.0, hi: 1.0, bins: 2 }).is_err());
        assert!(BinSpec::new(1.0, 0.0, 3).is_err());
        assert!(histogram(&[f64::NAN], &BinSpec { lo: 0.0, hi: 1.0, bins: 2 }).is_err());
    }
}
