//! Histogram estimation of collision-count distributions and the reduced
//! transform `ñ = (n − n_c)/√(Δ²n_c)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::CollisionKind;

/// Bin-width rule for count histograms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binning<F> {
    /// Freedman–Diaconis on the reduced variable (default).
    FreedmanDiaconis,
    /// Fixed width in ñ, for cross-run comparability of figure data.
    FixedReducedWidth(F),
}

/// A density histogram: `edges.len() == density.len() + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<F> {
    pub edges: Vec<F>,
    pub density: Vec<F>,
}

impl<F: Scalar> Histogram<F> {
    pub fn centers(&self) -> Vec<F> {
        self.edges.windows(2).map(|w| (w[0] + w[1]) * F::half()).collect()
    }

    pub fn widths(&self) -> Vec<F> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// ∫ density dn over the binned range.
    pub fn integral(&self) -> F {
        self.edges
            .windows(2)
            .zip(&self.density)
            .map(|(w, &d)| (w[1] - w[0]) * d)
            .fold(F::zero(), |a, b| a + b)
    }
}

/// Reduced-coordinate histogram; degenerate samples collapse to a point
/// mass where the transform is undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum ReducedHistogram<F> {
    PointMass { at: F },
    Binned(Histogram<F>),
}

/// Empirical estimate of the collision distribution at one probe time.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionEstimate<F> {
    pub time: F,
    pub kind: CollisionKind,
    /// Histogram over the raw integer counts.
    pub histogram: Histogram<F>,
    /// The same histogram in reduced coordinates.
    pub reduced: ReducedHistogram<F>,
    pub mean: F,
    pub variance: F,
    pub fourth_central: F,
    pub n_samples: usize,
}

impl<F: Scalar> DistributionEstimate<F> {
    /// Maps a raw count to reduced coordinates.
    pub fn reduce(&self, n: F) -> F {
        (n - self.mean) / self.variance.sqrt()
    }

    /// Standardized kurtosis `Δ⁴n_c/(Δ²n_c)²` of the sample.
    pub fn kurtosis(&self) -> Result<F> {
        if self.variance <= F::zero() {
            return Err(Error::DegenerateVariance);
        }
        Ok(self.fourth_central / (self.variance * self.variance))
    }
}

/// Estimates the count distribution from at least 100 raw samples.
pub fn estimate_distribution<F: Scalar>(
    counts: &[u64],
    time: F,
    kind: CollisionKind,
    binning: Binning<F>,
) -> Result<DistributionEstimate<F>> {
    if counts.len() < 100 {
        return Err(Error::NotEnoughSamples { have: counts.len(), need: 100 });
    }
    let n = counts.len();
    let n_f = F::from_usize(n).unwrap();

    let mut sums = crate::ensemble::PowerSums::default();
    for &c in counts {
        let c = c as u128;
        let c2 = c * c;
        sums.s1 += c;
        sums.s2 += c2;
        sums.s3 += c2 * c;
        sums.s4 += c2 * c2;
    }
    let mean = F::from_u128(sums.s1).unwrap() / n_f;
    let variance = (F::from_u128(sums.s2).unwrap() / n_f - mean * mean).max(F::zero());
    let s3 = F::from_u128(sums.s3).unwrap() / n_f;
    let s2 = F::from_u128(sums.s2).unwrap() / n_f;
    let s4 = F::from_u128(sums.s4).unwrap() / n_f;
    let fourth_central = (s4 - F::four() * mean * s3 + F::lit(6.0) * mean * mean * s2
        - F::lit(3.0) * mean.powi(4))
    .max(F::zero());

    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let k_min = sorted[0];
    let k_max = sorted[n - 1];

    if variance == F::zero() {
        // All counts equal: report the point mass and a single unit bin.
        let at = mean;
        let histogram = Histogram {
            edges: vec![at - F::half(), at + F::half()],
            density: vec![F::one()],
        };
        return Ok(DistributionEstimate {
            time,
            kind,
            histogram,
            reduced: ReducedHistogram::PointMass { at },
            mean,
            variance,
            fourth_central,
            n_samples: n,
        });
    }

    let sigma = variance.sqrt();
    let width_n = match binning {
        Binning::FreedmanDiaconis => {
            let q1 = sorted[n / 4] as f64;
            let q3 = sorted[(3 * n) / 4] as f64;
            let iqr = (q3 - q1).max(1.0);
            F::lit(2.0 * iqr / (n as f64).cbrt())
        }
        Binning::FixedReducedWidth(w) => w * sigma,
    };
    // Counts are integers: align bins to half-integers and keep the width a
    // whole number so no bin can alias between counts.
    let width = width_n.round().max(F::one());
    let width_u = width.as_f64() as u64;
    let n_bins = ((k_max - k_min) / width_u + 1) as usize;

    let lo = F::from_count(k_min) - F::half();
    let mut hits = vec![0u64; n_bins];
    for &c in counts {
        hits[((c - k_min) / width_u) as usize] += 1;
    }
    let edges: Vec<F> = (0..=n_bins).map(|i| lo + F::from_usize(i).unwrap() * width).collect();
    let density: Vec<F> = hits.iter().map(|&h| F::from_u64(h).unwrap() / (n_f * width)).collect();
    let histogram = Histogram { edges, density };

    let reduced_edges: Vec<F> = histogram.edges.iter().map(|&e| (e - mean) / sigma).collect();
    let reduced_density: Vec<F> = histogram.density.iter().map(|&d| d * sigma).collect();
    let reduced = ReducedHistogram::Binned(Histogram { edges: reduced_edges, density: reduced_density });

    Ok(DistributionEstimate { time, kind, histogram, reduced, mean, variance, fourth_central, n_samples: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gaussian_counts(n: usize, mean: f64, sigma: f64, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                // Box-Muller.
                let u1: f64 = rng.gen::<f64>().max(1e-12);
                let u2: f64 = rng.gen();
                let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
                (mean + sigma * z).round().max(0.0) as u64
            })
            .collect()
    }

    #[test]
    fn requires_100_samples() {
        let counts = vec![5u64; 99];
        assert!(matches!(
            estimate_distribution(&counts, 1.0, CollisionKind::Wall, Binning::<f64>::FreedmanDiaconis),
            Err(Error::NotEnoughSamples { have: 99, need: 100 })
        ));
    }

    #[test]
    fn density_normalizes_and_reduced_moments_are_standard() {
        let counts = gaussian_counts(50_000, 400.0, 25.0, 1);
        let est = estimate_distribution(&counts, 10.0, CollisionKind::Wall, Binning::<f64>::FreedmanDiaconis).unwrap();
        assert!((est.histogram.integral() - 1.0).abs() < 1e-6);
        let ReducedHistogram::Binned(red) = &est.reduced else {
            panic!("expected binned reduced histogram")
        };
        assert!((red.integral() - 1.0).abs() < 1e-6);
        // Reduced mean/variance recomputed from the bins agree with the
        // definitional 0 and 1 up to binning resolution.
        let centers = red.centers();
        let widths = red.widths();
        let mean: f64 = centers
            .iter()
            .zip(&red.density)
            .zip(&widths)
            .map(|((&c, &d), &w)| c * d * w)
            .sum();
        assert!(mean.abs() < 0.05, "reduced mean {mean}");
        let var: f64 = centers
            .iter()
            .zip(&red.density)
            .zip(&widths)
            .map(|((&c, &d), &w)| (c - mean).powi(2) * d * w)
            .sum();
        assert!((var - 1.0).abs() < 0.05, "reduced variance {var}");
        assert_relative_eq!(est.mean, 400.0, max_relative = 0.01);
        assert_relative_eq!(est.variance.sqrt(), 25.0, max_relative = 0.05);
    }

    #[test]
    fn constant_counts_become_point_mass() {
        let counts = vec![42u64; 500];
        let est = estimate_distribution(&counts, 3.0, CollisionKind::Disk, Binning::<f64>::FreedmanDiaconis).unwrap();
        assert_eq!(est.variance, 0.0);
        assert!(matches!(est.reduced, ReducedHistogram::PointMass { at } if at == 42.0));
        assert!(est.kurtosis().is_err());
        assert_relative_eq!(est.histogram.integral(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn fixed_width_binning_spans_bins_of_requested_reduced_size() {
        let counts = gaussian_counts(20_000, 300.0, 18.0, 7);
        let est =
            estimate_distribution(&counts, 5.0, CollisionKind::Wall, Binning::FixedReducedWidth(0.5f64)).unwrap();
        let ReducedHistogram::Binned(red) = &est.reduced else { panic!() };
        let w = red.widths()[0];
        assert!((w - 0.5).abs() < 0.1, "reduced width {w}");
    }

    #[test]
    fn narrow_distributions_keep_integer_bins() {
        // σ < 1: bins must not alias between the integer counts.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let counts: Vec<u64> = (0..5_000).map(|_| 100 + (rng.gen::<f64>() * 2.0) as u64).collect();
        let est = estimate_distribution(&counts, 2.0, CollisionKind::Wall, Binning::<f64>::FreedmanDiaconis).unwrap();
        for w in est.histogram.widths() {
            assert!(w >= 1.0 - 1e-12);
        }
        assert!((est.histogram.integral() - 1.0).abs() < 1e-9);
    }
}
