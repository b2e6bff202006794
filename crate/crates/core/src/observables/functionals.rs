use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::PathPL;
use crate::error::{Error, Result};

/// Scalar functionals of a planar path on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FunctionalId {
    /// `Q_x(T)`
    F1,
    /// `(1/T) * integral of Q_x(t) sin(2 pi t / T)`
    F2,
    /// `max_t |Q(t)|`
    F3,
    /// First time `|Q(t)| >= 1`, or `T` if the unit disc is never left.
    F4,
    /// Cosine of the angle between the last two increments of length `tau`.
    F5 { tau: f64 },
}

impl FunctionalId {
    pub const DEFAULT_TAU: f64 = 0.1;

    pub fn all(tau: f64) -> [FunctionalId; 5] {
        [Self::F1, Self::F2, Self::F3, Self::F4, Self::F5 { tau }]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::F1 => "F1",
            Self::F2 => "F2",
            Self::F3 => "F3",
            Self::F4 => "F4",
            Self::F5 { .. } => "F5",
        }
    }

    pub fn parse(name: &str, tau: f64) -> Option<Self> {
        match name.trim() {
            "F1" | "f1" => Some(Self::F1),
            "F2" | "f2" => Some(Self::F2),
            "F3" | "f3" => Some(Self::F3),
            "F4" | "f4" => Some(Self::F4),
            "F5" | "f5" => Some(Self::F5 { tau }),
            _ => None,
        }
    }
}

impl fmt::Display for FunctionalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn eval_functional(id: FunctionalId, path: &PathPL) -> Result<f64> {
    match id {
        FunctionalId::F1 => Ok(path.node(path.len() - 1)[0]),
        FunctionalId::F2 => Ok(sine_moment(path)),
        FunctionalId::F3 => Ok(path.nodes().map(norm).fold(0.0, f64::max)),
        FunctionalId::F4 => Ok(first_exit(path, 1.0)),
        FunctionalId::F5 { tau } => last_turn_cosine(path, tau),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Integral of the x-component against `sin(2 pi t / T)`, exact on each
/// linear segment, divided by `T`.
fn sine_moment(path: &PathPL) -> f64 {
    let horizon = path.horizon();
    let w = 2.0 * PI / horizon;
    let mut total = 0.0;
    for n in 0..path.len() - 1 {
        let (t0, t1) = (path.time(n), path.time(n + 1));
        let h = t1 - t0;
        let y0 = path.node(n)[0];
        let slope = (path.node(n + 1)[0] - y0) / h;
        let mid = 0.5 * w * (t0 + t1);
        let half = 0.5 * w * h;
        // integral of sin(wt) over the segment, written to avoid cancellation
        let i_sin = 2.0 * mid.sin() * half.sin() / w;
        // integral of (t - t0) sin(wt)
        let i_lin = -h * (w * t1).cos() / w + 2.0 * mid.cos() * half.sin() / (w * w);
        total += y0 * i_sin + slope * i_lin;
    }
    total / horizon
}

/// First time the path reaches norm `radius`, by exact root-finding of the
/// quadratic `|a + s d|^2 = radius^2` on each segment.
fn first_exit(path: &PathPL, radius: f64) -> f64 {
    let r2 = radius * radius;
    if norm(path.node(0)) >= radius {
        return 0.0;
    }
    for n in 0..path.len() - 1 {
        let a = path.node(n);
        let b = path.node(n + 1);
        if norm(b) < radius {
            continue;
        }
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        let qa: f64 = d.iter().map(|x| x * x).sum();
        let qb: f64 = a.iter().zip(&d).map(|(x, y)| x * y).sum();
        let qc: f64 = a.iter().map(|x| x * x).sum::<f64>() - r2;
        // qc < 0 here, so exactly one root lies in (0, 1]
        let disc = (qb * qb - qa * qc).max(0.0).sqrt();
        let s = if qb >= 0.0 { -qc / (qb + disc) } else { (disc - qb) / qa };
        return path.time(n) + s.clamp(0.0, 1.0) * path.dt();
    }
    path.horizon()
}

fn last_turn_cosine(path: &PathPL, tau: f64) -> Result<f64> {
    let horizon = path.horizon();
    if !(tau > 0.0) || horizon < 2.0 * tau {
        return Err(Error::InvalidParameter(format!(
            "F5 needs 0 < 2 tau <= T (tau = {tau}, T = {horizon})"
        )));
    }
    let end = path.node(path.len() - 1).to_vec();
    let mid = path.at(horizon - tau);
    let start = path.at(horizon - 2.0 * tau);
    let late: Vec<f64> = end.iter().zip(&mid).map(|(x, y)| x - y).collect();
    let early: Vec<f64> = mid.iter().zip(&start).map(|(x, y)| x - y).collect();
    let (nl, ne) = (norm(&late), norm(&early));
    if nl == 0.0 || ne == 0.0 {
        return Err(Error::DegenerateAngle);
    }
    let dot: f64 = late.iter().zip(&early).map(|(x, y)| x * y).sum();
    Ok((dot / (nl * ne)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(dt: f64, pts: &[[f64; 2]]) -> PathPL {
        PathPL::new(dt, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn generic() -> PathPL {
        path(0.3, &[[0.0, 0.0], [0.4, -0.2], [0.9, 0.5], [0.2, 1.3], [-0.5, 0.6]])
    }

    #[test]
    fn zero_path() {
        let z = path(0.5, &[[0.0, 0.0]; 5]);
        assert_eq!(eval_functional(FunctionalId::F1, &z).unwrap(), 0.0);
        assert_eq!(eval_functional(FunctionalId::F3, &z).unwrap(), 0.0);
        assert_eq!(eval_functional(FunctionalId::F4, &z).unwrap(), 2.0);
        assert_eq!(
            eval_functional(FunctionalId::F5 { tau: 0.1 }, &z),
            Err(Error::DegenerateAngle)
        );
    }

    #[test]
    fn straight_line_has_unit_cosine() {
        let l = PathPL::new(0.05, (0..21).map(|i| vec![i as f64 * 0.05, 0.0]).collect()).unwrap();
        let c = eval_functional(FunctionalId::F5 { tau: 0.1 }, &l).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_x_has_zero_sine_moment() {
        let c = path(0.25, &[[2.0, 0.0], [2.0, 1.0], [2.0, -1.0], [2.0, 3.0], [2.0, 0.0]]);
        assert!(eval_functional(FunctionalId::F2, &c).unwrap().abs() < 1e-14);
    }

    #[test]
    fn f5_requires_room() {
        let p = path(0.05, &[[0.0, 0.0], [0.1, 0.0], [0.2, 0.1]]);
        assert!(eval_functional(FunctionalId::F5 { tau: 0.1 }, &p).is_err());
    }

    #[test]
    fn f4_starts_outside() {
        let p = path(0.5, &[[2.0, 0.0], [0.0, 0.0]]);
        assert_eq!(eval_functional(FunctionalId::F4, &p).unwrap(), 0.0);
    }

    /// Dense sampling with 10^5 intervals (nodes fall on the sample grid).
    #[test]
    fn generic_path_matches_dense_oracle() {
        let p = generic();
        let t_end = p.horizon();
        let m = 100_000;
        let ts: Vec<f64> = (0..=m).map(|i| t_end * i as f64 / m as f64).collect();
        let vals: Vec<Vec<f64>> = ts.iter().map(|&t| p.at(t)).collect();

        let w = 2.0 * PI / t_end;
        let h = t_end / m as f64;
        let g: Vec<f64> = ts.iter().zip(&vals).map(|(t, v)| v[0] * (w * t).sin()).collect();
        let trap = h * (g.iter().sum::<f64>() - 0.5 * (g[0] + g[m]));
        let f2 = trap / t_end;

        let f3 = vals.iter().map(|v| norm(v)).fold(0.0, f64::max);

        // bracket the exit on the dense grid, then bisect the interpolant
        let k = vals.iter().position(|v| norm(v) >= 1.0).unwrap();
        let (mut lo, mut hi) = (ts[k - 1], ts[k]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm(&p.at(mid)) >= 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let f4 = hi;

        let (e, m1, s) = (p.at(t_end), p.at(t_end - 0.1), p.at(t_end - 0.2));
        let u = [e[0] - m1[0], e[1] - m1[1]];
        let v = [m1[0] - s[0], m1[1] - s[1]];
        let f5 = (u[0] * v[0] + u[1] * v[1]) / (norm(&u) * norm(&v));

        let got = |id| eval_functional(id, &p).unwrap();
        assert!((got(FunctionalId::F1) - -0.5).abs() < 1e-15);
        assert!((got(FunctionalId::F2) - f2).abs() < 1e-8, "{} {}", got(FunctionalId::F2), f2);
        assert!((got(FunctionalId::F3) - f3).abs() < 1e-8);
        assert!((got(FunctionalId::F4) - f4).abs() < 1e-8);
        assert!((got(FunctionalId::F5 { tau: 0.1 }) - f5).abs() < 1e-8);
    }

    #[test]
    fn homogeneity() {
        let p = generic();
        let q = p.scaled(2.5);
        let f = |id, x: &PathPL| eval_functional(id, x).unwrap();
        assert!((f(FunctionalId::F1, &q) - 2.5 * f(FunctionalId::F1, &p)).abs() < 1e-12);
        assert!((f(FunctionalId::F2, &q) - 2.5 * f(FunctionalId::F2, &p)).abs() < 1e-12);
        assert!((f(FunctionalId::F3, &q) - 2.5 * f(FunctionalId::F3, &p)).abs() < 1e-12);
        let tau = FunctionalId::F5 { tau: 0.1 };
        assert!((f(tau, &q) - f(tau, &p)).abs() < 1e-12);
        assert!(f(FunctionalId::F4, &q) <= f(FunctionalId::F4, &p));
    }
}
