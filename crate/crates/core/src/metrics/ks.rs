use crate::error::{Error, Result};
use crate::observables::Histogram;

/// Largest absolute difference of the normalised cumulative counts of two
/// histograms over identical bins. Under- and overflow slots are treated as
/// the outermost bins.
pub fn ks_distance(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.edges != b.edges {
        return Err(Error::EdgeMismatch);
    }
    let (ta, tb) = (a.total() as f64, b.total() as f64);
    if ta == 0.0 || tb == 0.0 {
        return Err(Error::InvalidParameter("empty histogram".into()));
    }
    let (mut ca, mut cb) = (a.underflow as f64, b.underflow as f64);
    let mut worst = (ca / ta - cb / tb).abs();
    for (x, y) in a.counts.iter().zip(&b.counts) {
        ca += *x as f64;
        cb += *y as f64;
        worst = worst.max((ca / ta - cb / tb).abs());
    }
    Ok(worst)
}

/// Two-sample Kolmogorov-Smirnov statistic of the raw values.
pub fn ks_distance_samples(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("NaN in sample".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        worst = worst.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(worst)
}

/// Asymptotic critical value of the two-sample statistic at level `alpha`:
/// `sqrt(-ln(alpha / 2) / 2) * sqrt((n + m) / (n m))`.
pub fn ks_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{histogram, BinSpec};

    #[test]
    fn identical_and_disjoint() {
        let spec = BinSpec::new(0.0, 1.0, 10).unwrap();
        let a = histogram(&[0.1, 0.2, 0.3], &spec).unwrap();
        assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
        let b = histogram(&[0.8, 0.9], &spec).unwrap();
        assert_eq!(ks_distance(&a, &b).unwrap(), 1.0);
        let other = histogram(&[0.8], &BinSpec::new(0.0, 2.0, 10).unwrap()).unwrap();
        assert_eq!(ks_distance(&a, &other), Err(Error::EdgeMismatch));
    }

    #[test]
    fn shifted_uniform_matches_direct_cdf() {
        let spec = BinSpec::new(0.0, 2.0, 20).unwrap();
        let a_vals: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let b_vals: Vec<f64> = a_vals.iter().map(|x| x + 0.3).collect();
        let a = histogram(&a_vals, &spec).unwrap();
        let b = histogram(&b_vals, &spec).unwrap();
        // CDFs at the bin edges 0.1 k
        let cdf = |v: &[f64], x: f64| v.iter().filter(|&&y| y < x).count() as f64 / v.len() as f64;
        let direct = (0..=20)
            .map(|k| {
                let x = 0.1 * k as f64 + 1e-12;
                (cdf(&a_vals, x) - cdf(&b_vals, x)).abs()
            })
            .fold(0.0, f64::max);
        assert!((ks_distance(&a, &b).unwrap() - direct).abs() < 1e-12);
        assert!((direct - 0.3).abs() < 1e-12);
    }

    #[test]
    fn raw_sample_statistic() {
        assert_eq!(ks_distance_samples(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_distance_samples(&[0.0, 1.0], &[5.0]).unwrap(), 1.0);
        assert_eq!(ks_distance_samples(&[0.0, 1.0, 2.0, 3.0], &[1.5, 2.5]).unwrap(), 0.5);
    }

    #[test]
    fn critical_value_for_two_hundred() {
        let c = ks_critical_value(200, 200, 0.05);
        assert!((c - 0.1358).abs() < 1e-4, "{c}");
    }
}
