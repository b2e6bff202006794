use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{sup_distance, PathPL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricTag {
    /// Euclidean distance between feature vectors.
    Euclidean,
    /// Sup-norm distance between piecewise-linear paths.
    Sup,
}

/// Equally weighted points of a metric space.
#[derive(Debug, Clone, PartialEq)]
pub enum EmpiricalSample {
    Features(Vec<Vec<f64>>),
    Paths(Vec<PathPL>),
}

impl EmpiricalSample {
    pub fn features(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| {
            Error::InvalidParameter("an empirical sample needs at least one point".into())
        })?;
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::MetricMismatch("feature vectors have mixed dimensions".into()));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite feature value".into()));
        }
        Ok(Self::Features(points))
    }

    pub fn paths(paths: Vec<PathPL>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::InvalidParameter(
                "an empirical sample needs at least one point".into(),
            ));
        }
        Ok(Self::Paths(paths))
    }

    /// Points on the real line.
    pub fn scalars(values: &[f64]) -> Result<Self> {
        Self::features(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Features(p) => p.len(),
            Self::Paths(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tag(&self) -> MetricTag {
        match self {
            Self::Features(_) => MetricTag::Euclidean,
            Self::Paths(_) => MetricTag::Sup,
        }
    }

    /// Distance between point `i` of `self` and point `j` of `other`.
    pub fn distance(&self, i: usize, other: &Self, j: usize) -> Result<f64> {
        let d = match (self, other) {
            (Self::Features(a), Self::Features(b)) => {
                if a[i].len() != b[j].len() {
                    return Err(Error::MetricMismatch(format!(
                        "feature dimensions {} and {}",
                        a[i].len(),
                        b[j].len()
                    )));
                }
                a[i].iter()
                    .zip(&b[j])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            }
            (Self::Paths(a), Self::Paths(b)) => sup_distance(&a[i], &b[j])?,
            _ => {
                return Err(Error::MetricMismatch(format!(
                    "{:?} vs {:?}",
                    self.tag(),
                    other.tag()
                )))
            }
        };
        if !d.is_finite() {
            return Err(Error::NonFiniteDistance { i, j });
        }
        Ok(d)
    }

    /// Key used to order points inside a partition cell: the first feature
    /// coordinate, or the final x-value of a path.
    pub fn slice_key(&self, i: usize) -> f64 {
        match self {
            Self::Features(p) => p[i][0],
            Self::Paths(p) => p[i].node(p[i].len() - 1)[0],
        }
    }

    /// Concatenation of two samples with the same metric.
    pub fn pooled(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Features(a), Self::Features(b)) => {
                Self::features(a.iter().chain(b).cloned().collect())
            }
            (Self::Paths(a), Self::Paths(b)) => Self::paths(a.iter().chain(b).cloned().collect()),
            _ => Err(Error::MetricMismatch(format!(
                "{:?} vs {:?}",
                self.tag(),
                other.tag()
            ))),
        }
    }

    /// Applies a rigid translation to feature samples; paths are returned unchanged.
    pub fn translated(&self, shift: &[f64]) -> Self {
        match self {
            Self::Features(p) => Self::Features(
                p.iter()
                    .map(|x| x.iter().zip(shift).map(|(a, b)| a + b).collect())
                    .collect(),
            ),
            Self::Paths(p) => Self::Paths(p.iter().map(|x| x.shifted(shift)).collect()),
        }
    }
}

/// Row-major `rows x cols` matrix of distances between two samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    tag: MetricTag,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>, tag: MetricTag) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameter("distance matrix must be non-empty and rectangular".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::NonFiniteDistance { i, j });
                }
            }
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
            tag,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tag(&self) -> MetricTag {
        self.tag
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
            tag: self.tag,
        }
    }
}

/// `d[i][j] = metric(a_i, b_j)`.
pub fn pairwise_distances(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<DistanceMatrix> {
    if a.tag() != b.tag() {
        return Err(Error::MetricMismatch(format!("{:?} vs {:?}", a.tag(), b.tag())));
    }
    let (rows, cols) = (a.len(), b.len());
    let data = (0..rows * cols)
        .into_par_iter()
        .map(|k| a.distance(k / cols, b, k % cols))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DistanceMatrix {
        rows,
        cols,
        data,
        tag: a.tag(),
    })
}
