//! Least-squares fits: the diffusion exponent from variance growth, and the
//! heavy-tail exponent of the reduced disk-collision distribution.

use serde::{Deserialize, Serialize};

use crate::ensemble::{ProbeMoments, TauNormalization};
use crate::error::{Error, Result};
use crate::geometry::{BilliardConfig, HorizonClass};
use crate::scalar::Scalar;
use crate::stats::distribution::{DistributionEstimate, ReducedHistogram};
use crate::stats::CollisionKind;

/// Ordinary least-squares line fit with the usual slope standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit<F> {
    pub slope: F,
    pub intercept: F,
    pub slope_stderr: F,
    pub r_squared: F,
    pub n_points: usize,
}

pub fn linear_fit<F: Scalar>(xs: &[F], ys: &[F]) -> Result<LineFit<F>> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::NotEnoughSamples { have: n.min(ys.len()), need: 2 });
    }
    let n_f = F::from_usize(n).unwrap();
    let mean_x = xs.iter().copied().sum::<F>() / n_f;
    let mean_y = ys.iter().copied().sum::<F>() / n_f;
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    let mut syy = F::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx == F::zero() {
        return Err(Error::InvalidArgument("degenerate abscissae in linear fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr = (syy - slope * sxy).max(F::zero());
    let slope_stderr = if n > 2 {
        (ssr / (F::from_usize(n - 2).unwrap() * sxx)).sqrt()
    } else {
        F::zero()
    };
    let r_squared = if syy > F::zero() { F::one() - ssr / syy } else { F::one() };
    Ok(LineFit { slope, intercept, slope_stderr, r_squared, n_points: n })
}

/// Diffusion-exponent fit from the growth of collision-count variance,
/// `Δ²n_c(t) ~ (t/τ_c)^{2/z}`.
///
/// The headline `z` comes from the wall counts; the disk-count and
/// displacement-variance fits are reported alongside, with the stochastic
/// link `Δ²n^(w) = (2/τ_w²)·⟨Δ²r⟩` quantified by `variance_ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionFit<F> {
    pub z: F,
    pub z_stderr: F,
    pub wall: LineFit<F>,
    pub disk: Option<LineFit<F>>,
    pub displacement: LineFit<F>,
    pub z_disk: Option<F>,
    pub z_displacement: F,
    /// Median over the window of `Δ²n^(w) / ((2/τ_w²)·⟨Δ²r⟩)`.
    pub variance_ratio: F,
    pub window: (F, F),
    pub normalization: TauNormalization,
}

pub fn fit_diffusion_exponent<F: Scalar>(
    probes: &[ProbeMoments<F>],
    cfg: &BilliardConfig<F>,
    window: (F, F),
    normalization: TauNormalization,
) -> Result<DiffusionFit<F>> {
    let in_window: Vec<&ProbeMoments<F>> =
        probes.iter().filter(|p| p.time >= window.0 && p.time <= window.1).collect();
    if in_window.len() < 5 {
        return Err(Error::NotEnoughSamples { have: in_window.len(), need: 5 });
    }

    let mut log_t = Vec::with_capacity(in_window.len());
    let mut log_var_wall = Vec::with_capacity(in_window.len());
    let mut log_var_disk = Vec::with_capacity(in_window.len());
    let mut log_var_disp = Vec::with_capacity(in_window.len());
    let mut ratios = Vec::with_capacity(in_window.len());
    let tau_w = cfg.tau_wall();

    for probe in &in_window {
        let wall = probe.moments.kind_moments(CollisionKind::Wall)?;
        if wall.variance <= F::zero() {
            return Err(Error::DegenerateVariance);
        }
        log_t.push(probe.time.ln());
        log_var_wall.push(wall.variance.ln());

        let disp = probe.moments.displacement_variance();
        if disp > F::zero() {
            log_var_disp.push(disp.ln());
            ratios.push(wall.variance / (F::two() / (tau_w * tau_w) * disp));
        }
        if cfg.radius() > F::zero() {
            let disk = probe.moments.kind_moments(CollisionKind::Disk)?;
            if disk.variance > F::zero() {
                log_var_disk.push(disk.variance.ln());
            }
        }
    }

    let wall = linear_fit(&log_t, &log_var_wall)?;
    if wall.slope <= F::zero() {
        return Err(Error::NoScalingRegime { slope: wall.slope.as_f64() });
    }
    let z = F::two() / wall.slope;
    // z = 2/m propagates to σ_z = 2·σ_m/m².
    let z_stderr = F::two() * wall.slope_stderr / (wall.slope * wall.slope);

    let displacement = if log_var_disp.len() == log_t.len() {
        linear_fit(&log_t, &log_var_disp)?
    } else {
        return Err(Error::DegenerateVariance);
    };
    let z_displacement = F::two() / displacement.slope;

    let (disk, z_disk) = if log_var_disk.len() == log_t.len() {
        let fit = linear_fit(&log_t, &log_var_disk)?;
        let zd = F::two() / fit.slope;
        (Some(fit), Some(zd))
    } else {
        (None, None)
    };

    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let variance_ratio = ratios[ratios.len() / 2];

    Ok(DiffusionFit {
        z,
        z_stderr,
        wall,
        disk,
        displacement,
        z_disk,
        z_displacement,
        variance_ratio,
        window,
        normalization,
    })
}

/// Standardized kurtosis `ζ₄ = Δ⁴n_c/(Δ²n_c)²` of one count kind; the
/// Gaussian value is 3.
pub fn kurtosis_ratio<F: Scalar>(
    moments: &crate::ensemble::EnsembleMoments<F>,
    kind: CollisionKind,
) -> Result<F> {
    let m = moments.kind_moments(kind)?;
    if m.variance <= F::zero() {
        return Err(Error::DegenerateVariance);
    }
    Ok(m.fourth_central / (m.variance * m.variance))
}

/// Power-law fit of the reduced distribution tail `D̃(ñ) ∝ |ñ|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyTailFit<F> {
    pub exponent: F,
    pub stderr: F,
    /// Free amplitude of the fitted `amplitude·|ñ|^exponent`.
    pub amplitude: F,
    /// Diffusion exponent implied by `p = 2/z − 5`.
    pub implied_z: F,
    pub n_bins: usize,
    pub window: (F, F),
}

/// Fits the long-jump tail of a disk-collision distribution over the window
/// `|ñ| ∈ [tail_start, max populated]`. Requires the all-corridors-open
/// geometry (`R < √2·L/4`) where the Lévy-flight mechanism operates.
pub fn fit_levy_tail<F: Scalar>(
    est: &DistributionEstimate<F>,
    cfg: &BilliardConfig<F>,
    tail_start: F,
) -> Result<LevyTailFit<F>> {
    if cfg.horizon() != HorizonClass::InfiniteAllCorridors {
        return Err(Error::InvalidArgument(
            "Levy tail fit needs the infinite-horizon geometry R < sqrt(2)L/4".into(),
        ));
    }
    let ReducedHistogram::Binned(reduced) = &est.reduced else {
        return Err(Error::DegenerateVariance);
    };

    let centers = reduced.centers();
    let widths = reduced.widths();
    let n = F::from_usize(est.n_samples).unwrap();
    let mut log_x = Vec::new();
    let mut log_y = Vec::new();
    let mut max_abs = tail_start;
    // Walk outward from the window start on each side and stop at the first
    // bin with fewer than 5 samples: sparser bins carry too much Poisson
    // noise in log space, and keeping only a contiguous run avoids
    // selecting isolated upward fluctuations from the far tail.
    let populated = |i: usize| {
        let count = reduced.density[i] * widths[i] * n;
        count >= F::lit(5.0)
    };
    for side in [false, true] {
        let mut indexed: Vec<usize> = (0..centers.len())
            .filter(|&i| {
                let c = centers[i];
                c.abs() >= tail_start && ((side && c > F::zero()) || (!side && c < F::zero()))
            })
            .collect();
        indexed.sort_by(|&a, &b| centers[a].abs().partial_cmp(&centers[b].abs()).unwrap());
        for i in indexed {
            if !populated(i) {
                break;
            }
            log_x.push(centers[i].abs().ln());
            log_y.push(reduced.density[i].ln());
            max_abs = max_abs.max(centers[i].abs());
        }
    }
    if log_x.len() < 5 {
        return Err(Error::InsufficientTail { populated: log_x.len(), needed: 5 });
    }
    let fit = linear_fit(&log_x, &log_y)?;
    Ok(LevyTailFit {
        exponent: fit.slope,
        stderr: fit.slope_stderr,
        amplitude: fit.intercept.exp(),
        implied_z: crate::oracles::z_from_tail_exponent(fit.slope),
        n_bins: fit.n_points,
        window: (tail_start, max_abs),
    })
}
