use super::Vec2;
use crate::error::{Error, Result};

/// Smoothly truncated Lennard-Jones potential
/// `scale * (r^-12 - r^-6) * exp(1 / (r - r_cutoff))` for `r < r_cutoff`, zero beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    r_cutoff: f64,
    well_depth_scale: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            r_cutoff: 2.5,
            well_depth_scale: 4.0,
        }
    }
}

impl PotentialSpec {
    pub fn new(r_cutoff: f64, well_depth_scale: f64) -> Result<Self> {
        // the cutoff has to sit beyond the Lennard-Jones minimum at 2^(1/6)
        if !(r_cutoff.is_finite() && r_cutoff > 2f64.powf(1.0 / 6.0)) {
            return Err(Error::InvalidParameter(format!(
                "r_cutoff {r_cutoff} must exceed 2^(1/6)"
            )));
        }
        if !(well_depth_scale.is_finite() && well_depth_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "well_depth_scale {well_depth_scale} must be positive"
            )));
        }
        Ok(Self {
            r_cutoff,
            well_depth_scale,
        })
    }

    pub fn r_cutoff(&self) -> f64 {
        self.r_cutoff
    }

    pub fn well_depth_scale(&self) -> f64 {
        self.well_depth_scale
    }

    /// Potential at `r`, with `r > 0` already checked.
    pub(crate) fn energy_unchecked(&self, r: f64) -> f64 {
        if r >= self.r_cutoff {
            return 0.0;
        }
        let smooth = (1.0 / (r - self.r_cutoff)).exp();
        if smooth == 0.0 {
            return 0.0;
        }
        let inv6 = (1.0 / (r * r)).powi(3);
        self.well_depth_scale * (inv6 * inv6 - inv6) * smooth
    }

    /// `-V'(r) / r` for `0 < r^2`; multiplying by the separation vector gives
    /// the pair force.
    pub(crate) fn force_over_r(&self, r2: f64) -> f64 {
        let r = r2.sqrt();
        if r >= self.r_cutoff {
            return 0.0;
        }
        let x = r - self.r_cutoff;
        let smooth = (1.0 / x).exp();
        if smooth == 0.0 {
            return 0.0;
        }
        let inv_r2 = 1.0 / r2;
        let inv6 = inv_r2 * inv_r2 * inv_r2;
        let inv12 = inv6 * inv6;
        // d/dr of the bare part plus d/dr of the exponential factor
        self.well_depth_scale
            * smooth
            * ((12.0 * inv12 - 6.0 * inv6) * inv_r2 + (inv12 - inv6) / (x * x * r))
    }
}

pub fn lj_potential(r: f64, spec: &PotentialSpec) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidSeparation(r));
    }
    Ok(spec.energy_unchecked(r))
}

/// Force on particle `i` from particle `j`, where `delta = q_i - q_j` is the
/// minimum-image separation.
pub fn lj_force_pair(delta: Vec2, spec: &PotentialSpec) -> Result<Vec2> {
    let r2 = delta.norm_squared();
    if !(r2 > 0.0) {
        return Err(Error::InvalidSeparation(r2.sqrt()));
    }
    Ok(delta * spec.force_over_r(r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_examples() {
        let spec = PotentialSpec::default();
        assert_eq!(lj_potential(1.0, &spec).unwrap(), 0.0);
        assert_eq!(lj_potential(2.5, &spec).unwrap(), 0.0);
        assert_eq!(lj_potential(3.0, &spec).unwrap(), 0.0);
        // 40-digit evaluation of the closed form at r = 2^(1/6)
        let v = lj_potential(2f64.powf(1.0 / 6.0), &spec).unwrap();
        assert!((v - -0.483_872_995_450_951_43).abs() < 1e-14, "{v}");
    }

    #[test]
    fn potential_rejects_nonpositive() {
        let spec = PotentialSpec::default();
        assert_eq!(lj_potential(0.0, &spec), Err(Error::InvalidSeparation(0.0)));
        assert!(lj_potential(-1.0, &spec).is_err());
    }

    #[test]
    fn potential_vanishes_smoothly_at_cutoff() {
        let spec = PotentialSpec::default();
        for eps in [1e-2, 1e-3, 1e-4] {
            let v = lj_potential(2.5 - eps, &spec).unwrap();
            assert!(v.abs() < 1e-20, "{v}");
        }
    }

    #[test]
    fn pair_force_examples() {
        let spec = PotentialSpec::default();
        assert_eq!(lj_force_pair(Vec2::new(3.0, 0.0), &spec).unwrap(), Vec2::zeros());
        let d = Vec2::new(1.3, -0.4);
        let f = lj_force_pair(d, &spec).unwrap();
        let g = lj_force_pair(-d, &spec).unwrap();
        assert_eq!(f, -g);
        assert!(lj_force_pair(Vec2::zeros(), &spec).is_err());
    }

    #[test]
    fn pair_force_matches_central_difference() {
        let spec = PotentialSpec::default();
        let h = 1e-6;
        let r: f64 = 1.2;
        let fd = -(lj_potential(r + h, &spec).unwrap() - lj_potential(r - h, &spec).unwrap())
            / (2.0 * h);
        let f = lj_force_pair(Vec2::new(r, 0.0), &spec).unwrap();
        assert!((f.x - fd).abs() <= 1e-6 * fd.abs(), "{} vs {}", f.x, fd);
        assert_eq!(f.y, 0.0);
    }

    #[test]
    fn spec_validation() {
        assert!(PotentialSpec::new(1.0, 4.0).is_err());
        assert!(PotentialSpec::new(2.5, 0.0).is_err());
        assert!(PotentialSpec::new(2.5, 4.0).is_ok());
    }
}
