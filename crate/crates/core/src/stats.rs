//! Small statistical helpers shared by tests and diagnostics.

use num_complex::Complex64;

/// Empirical characteristic function (1/N) sum e^{i xi X_j}.
pub fn empirical_cf(samples: &[f64], xi: f64) -> Complex64 {
    let n = samples.len() as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for &x in samples {
        let (s, c) = (xi * x).sin_cos();
        re += c;
        im += s;
    }
    Complex64::new(re / n, im / n)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    while i < a.len() || j < b.len() {
        let va = a.get(i).copied().unwrap_or(f64::INFINITY);
        let vb = b.get(j).copied().unwrap_or(f64::INFINITY);
        let v = va.min(vb);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (unbiased).
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_samples_is_zero() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
    }

    #[test]
    fn ks_disjoint_samples_is_one() {
        let a = vec![0.0, 1.0];
        let b = vec![5.0, 6.0];
        assert_eq!(ks_two_sample(&a, &b), 1.0);
    }

    #[test]
    fn empirical_cf_of_point_mass() {
        let xs = vec![2.0; 100];
        let cf = empirical_cf(&xs, 0.7);
        assert!((cf - Complex64::from_polar(1.0, 1.4)).norm() < 1e-12);
    }
}
