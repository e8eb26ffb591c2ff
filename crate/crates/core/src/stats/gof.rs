//! Goodness-of-fit machinery: Kolmogorov–Smirnov distances (with the
//! continuity handling integer count data needs), Kolmogorov p-values, and
//! Pearson chi-squared tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::scalar::Scalar;
use crate::stats::distribution::{DistributionEstimate, ReducedHistogram};

/// Classic two-sided KS statistic for continuous samples (`samples` sorted).
pub fn ks_statistic_continuous<F: Scalar>(samples: &[F], cdf: impl Fn(F) -> F) -> F {
    let n = F::from_usize(samples.len()).unwrap();
    let mut d = F::zero();
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        let lo = F::from_usize(i).unwrap() / n;
        let hi = F::from_usize(i + 1).unwrap() / n;
        d = d.max((c - lo).abs()).max((hi - c).abs());
    }
    d
}

/// KS statistic for integer counts against a continuous model CDF.
///
/// Integer data cannot resolve the model inside a unit step, so the
/// comparison is made at half-integers (the usual continuity correction):
/// `D = sup_h |F_emp(h) − F_model(h)|` over half-integer points `h`.
pub fn ks_statistic_counts<F: Scalar>(counts: &[u64], cdf: impl Fn(F) -> F) -> F {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let n = F::from_usize(sorted.len()).unwrap();

    let mut d = F::zero();
    let mut i = 0usize;
    while i < sorted.len() {
        let k = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == k {
            j += 1;
        }
        let below = F::from_usize(i).unwrap() / n;
        let upto = F::from_usize(j).unwrap() / n;
        let k_f = F::from_count(k);
        d = d.max((below - cdf(k_f - F::half())).abs());
        d = d.max((upto - cdf(k_f + F::half())).abs());
        i = j;
    }
    d
}

/// KS statistic for integer counts against a discrete model CDF evaluated
/// at integers (used with exact count oracles).
pub fn ks_statistic_discrete<F: Scalar>(counts: &[u64], cdf_at: impl Fn(i64) -> F) -> F {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let n = F::from_usize(sorted.len()).unwrap();
    let k_lo = sorted[0] as i64 - 2;
    let k_hi = sorted[sorted.len() - 1] as i64 + 2;

    let mut d = F::zero();
    let mut idx = 0usize;
    for k in k_lo..=k_hi {
        while idx < sorted.len() && (sorted[idx] as i64) <= k {
            idx += 1;
        }
        let emp = F::from_usize(idx).unwrap() / n;
        d = d.max((emp - cdf_at(k)).abs());
    }
    d
}

/// Asymptotic Kolmogorov survival function `Q(λ) = 2Σ (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.18 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// P-value of a KS distance at sample size `n` (Stephens' finite-n scaling).
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    kolmogorov_q(d * (sqrt_n + 0.12 + 0.11 / sqrt_n))
}

/// Critical KS distance at significance `alpha` and sample size `n`.
pub fn ks_critical_value(alpha: f64, n: usize) -> f64 {
    // Invert Q(c) = alpha by bisection; Q is monotone decreasing.
    let (mut lo, mut hi) = (0.2, 3.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_q(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let sqrt_n = (n as f64).sqrt();
    c / (sqrt_n + 0.12 + 0.11 / sqrt_n)
}

/// Pearson chi-squared test; adjacent bins are pooled until every expected
/// count reaches 5. Returns (statistic, dof, p-value).
pub fn chi_squared_gof(observed: &[f64], expected: &[f64]) -> Result<(f64, usize, f64)> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::InvalidArgument("chi-squared needs matching non-empty bins".into()));
    }
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut acc_o, mut acc_e) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        acc_o += o;
        acc_e += e;
        if acc_e >= 5.0 {
            pooled.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        if let Some(last) = pooled.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            pooled.push((acc_o, acc_e));
        }
    }
    if pooled.len() < 2 {
        return Err(Error::InvalidArgument("chi-squared needs at least two populated bins".into()));
    }
    let stat: f64 = pooled.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    let dof = pooled.len() - 1;
    let p = ChiSquared::new(dof as f64).map_or(f64::NAN, |dist| dist.sf(stat));
    Ok((stat, dof, p))
}

/// Goodness-of-fit summary between an empirical count distribution and a
/// closed-form reduced density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison<F> {
    pub ks: F,
    pub ks_p: F,
    pub chi2: F,
    pub chi2_dof: usize,
    pub chi2_p: F,
}

/// Compares raw counts against a reduced-coordinate density `D̃(ñ)` (KS on
/// the counts via the continuity-corrected statistic; chi-squared on the
/// reduced histogram with bin expectations integrated by quadrature).
pub fn compare_to_oracle<F: Scalar>(
    counts: &[u64],
    est: &DistributionEstimate<F>,
    density: impl Fn(F) -> F,
) -> Result<OracleComparison<F>> {
    let ReducedHistogram::Binned(reduced) = &est.reduced else {
        return Err(Error::DegenerateVariance);
    };
    let sigma = est.variance.sqrt();

    // CDF of the reduced density by cumulative quadrature from far in the
    // left tail, cached on the half-integer query grid.
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let k_lo = sorted[0];
    let k_hi = sorted[sorted.len() - 1];
    let mut grid: Vec<F> = Vec::with_capacity((k_hi - k_lo + 2) as usize);
    for k in k_lo..=k_hi + 1 {
        grid.push((F::from_count(k) - F::half() - est.mean) / sigma);
    }
    let anchor = grid[0].min(F::lit(-12.0));
    let tol = F::lit(1e-10);
    let mut cum = Vec::with_capacity(grid.len());
    let mut running = integrate(&density, anchor, grid[0], tol);
    cum.push(running);
    for w in grid.windows(2) {
        running = running + integrate(&density, w[0], w[1], tol);
        cum.push(running);
    }
    let cdf = |x: F| -> F {
        // x is always one of the grid points by construction.
        let idx = ((x - grid[0]) * sigma).round().as_f64() as usize;
        cum[idx.min(cum.len() - 1)]
    };
    let ks = ks_statistic_counts(&sorted, |h: F| cdf((h - est.mean) / sigma));
    let ks_p = F::lit(ks_p_value(ks.as_f64(), sorted.len()));

    // Chi-squared on the reduced histogram.
    let n = F::from_usize(est.n_samples).unwrap();
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    for (w, &d) in reduced.edges.windows(2).zip(&reduced.density) {
        let width = w[1] - w[0];
        observed.push((d * width * n).as_f64());
        expected.push((integrate(&density, w[0], w[1], tol) * n).as_f64());
    }
    let (chi2, chi2_dof, chi2_p) = chi_squared_gof(&observed, &expected)?;

    Ok(OracleComparison {
        ks,
        ks_p,
        chi2: F::lit(chi2),
        chi2_dof,
        chi2_p: F::lit(chi2_p),
    })
}
