//! Closed-form reference statistics: square-billiard wall collisions, the
//! Gaussian limit, Lévy jump densities, and the velocity-dispersion curves.
//!
//! Every density here is checked by quadrature in the tests; the
//! square-billiard distribution is additionally derived from the
//! change-of-variables definition `D₀ = (4/π)|∂θ/∂n|` rather than trusting a
//! printed prefactor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Square-billiard (R = 0) wall-collision statistics.
///
/// For a launch angle θ the wall-collision count grows deterministically as
/// `n₀(θ, t) = (t/L)(cosθ + sinθ)`; averaging over the Liouville measure
/// gives mean `n_c0 = t/τ_c0` with `τ_c0 = πL/4` and relative variance
/// `κ = π²/16 + π/8 − 1`.
#[derive(Debug, Clone, Copy)]
pub struct SquareBilliardOracle<F> {
    side: F,
    tau_c0: F,
}

impl<F: Scalar> SquareBilliardOracle<F> {
    pub fn new(side: F) -> Result<Self> {
        if !side.is_finite() || side <= F::zero() {
            return Err(Error::InvalidGeometry(format!("side L = {side} must be positive")));
        }
        Ok(Self { side, tau_c0: F::PI() * side / F::four() })
    }

    #[inline]
    pub fn side(&self) -> F {
        self.side
    }

    /// Mean collision time `τ_c0 = πL/4`.
    #[inline]
    pub fn tau_c0(&self) -> F {
        self.tau_c0
    }

    /// Relative variance coefficient `κ = π²/16 + π/8 − 1`.
    #[inline]
    pub fn variance_coefficient(&self) -> F {
        let pi = F::PI();
        pi * pi / F::lit(16.0) + pi / F::lit(8.0) - F::one()
    }

    /// Mean wall-collision count `n_c0(t) = t/τ_c0 = 4t/(πL)`.
    #[inline]
    pub fn mean_count(&self, t: F) -> F {
        t / self.tau_c0
    }

    /// Deterministic per-orbit count `n₀(θ, t)`. Angles outside the
    /// fundamental domain `[0, π/4]` fold in by the square symmetry.
    #[inline]
    pub fn wall_collision_count(&self, theta: F, t: F) -> F {
        (t / self.side) * (theta.cos().abs() + theta.sin().abs())
    }

    /// Characteristic time of the orbit: `1/t_c(θ) = (cosθ + sinθ)/L`.
    #[inline]
    pub fn characteristic_time(&self, theta: F) -> F {
        self.side / (theta.cos().abs() + theta.sin().abs())
    }

    /// Support of the continuous count distribution at time `t`:
    /// `n/n_c0 ∈ (π/4, π√2/4)`.
    pub fn support(&self, t: F) -> (F, F) {
        (t / self.side, F::SQRT_2() * t / self.side)
    }

    /// Continuous wall-collision distribution `D₀(n, t)`.
    ///
    /// Derived from `D₀ = (4/π)|∂θ/∂n|` with
    /// `θ(n) = ½·arcsin[(nL/t)² − 1]`, which evaluates to
    /// `(4/π)·(L/t)/√(2 − (nL/t)²)` on the support and 0 outside.
    pub fn density(&self, n: F, t: F) -> F {
        let (lo, hi) = self.support(t);
        if n <= lo || n >= hi {
            return F::zero();
        }
        let u = n * self.side / t;
        (F::four() / F::PI()) * (self.side / t) / (F::two() - u * u).sqrt()
    }

    /// CDF of `D₀`: `(2/π)·arcsin((nL/t)² − 1)` clipped to the support.
    pub fn cdf(&self, n: F, t: F) -> F {
        let (lo, hi) = self.support(t);
        if n <= lo {
            return F::zero();
        }
        if n >= hi {
            return F::one();
        }
        let u = n * self.side / t;
        (F::two() / F::PI()) * (u * u - F::one()).asin()
    }

    /// Exact distribution of the *integer* wall-crossing count at time `t`,
    /// for initial conditions drawn from the Liouville measure.
    ///
    /// Along an orbit with angle θ the crossing counts per axis are
    /// `⌊φ + a⌋` with uniform phase φ and `a = (t/L)·cos θ` (resp. sin θ),
    /// so each integer count mixes the two neighbouring values of the
    /// continuous `n₀(θ, t)`. The θ-integral is done exactly piecewise
    /// between the angles where either axis count increments.
    pub fn count_distribution(&self, t: F) -> CountDistribution<F> {
        let c = t / self.side;
        let quarter_pi = F::FRAC_PI_4();

        // Angles in (0, π/4) where (t/L)cosθ or (t/L)sinθ crosses an integer.
        let mut cuts: Vec<F> = vec![F::zero(), quarter_pi];
        let c_diag = c / F::SQRT_2();
        let mut m = c_diag.ceil();
        while m <= c {
            if m > c_diag {
                cuts.push((m / c).acos());
            }
            m = m + F::one();
        }
        let mut m = F::one();
        while m < c_diag {
            cuts.push((m / c).asin());
            m = m + F::one();
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let min_k = c.floor().as_f64() as i64 - 1;
        let max_k = (F::SQRT_2() * c).floor().as_f64() as i64 + 2;
        let mut pmf = vec![F::zero(); (max_k - min_k + 1) as usize];

        for pair in cuts.windows(2) {
            let (ta, tb) = (pair[0], pair[1]);
            if tb - ta <= F::zero() {
                continue;
            }
            let mid = (ta + tb) * F::half();
            let ax = (c * mid.cos()).floor();
            let ay = (c * mid.sin()).floor();
            let base = ax.as_f64() as i64 + ay.as_f64() as i64;

            // Primitive integrals on [ta, tb].
            let i1 = tb - ta;
            let ic = tb.sin() - ta.sin();
            let is = ta.cos() - tb.cos();
            let isc = (tb.sin() * tb.sin() - ta.sin() * ta.sin()) * F::half();
            // ∫ (A + B cosθ)(C + D sinθ) dθ
            let prod = |a: F, b: F, cc: F, d: F| a * cc * i1 + a * d * is + b * cc * ic + b * d * isc;

            // fx = c·cosθ − ax, 1−fx = (1+ax) − c·cosθ; same for y with sin.
            let w_lo = prod(F::one() + ax, -c, F::one() + ay, -c);
            let w_mid = prod(-ax, c, F::one() + ay, -c) + prod(F::one() + ax, -c, -ay, c);
            let w_hi = prod(-ax, c, -ay, c);

            let at = |k: i64| (k - min_k) as usize;
            pmf[at(base)] = pmf[at(base)] + w_lo;
            pmf[at(base + 1)] = pmf[at(base + 1)] + w_mid;
            pmf[at(base + 2)] = pmf[at(base + 2)] + w_hi;
        }

        let norm = F::four() / F::PI();
        for p in &mut pmf {
            *p = *p * norm;
        }
        CountDistribution { min_k, pmf }
    }
}

/// Discrete probability mass function over integer collision counts.
#[derive(Debug, Clone)]
pub struct CountDistribution<F> {
    min_k: i64,
    pmf: Vec<F>,
}

impl<F: Scalar> CountDistribution<F> {
    pub fn min_count(&self) -> i64 {
        self.min_k
    }

    pub fn pmf(&self, k: i64) -> F {
        if k < self.min_k {
            return F::zero();
        }
        self.pmf.get((k - self.min_k) as usize).copied().unwrap_or_else(F::zero)
    }

    /// P(count ≤ k).
    pub fn cdf(&self, k: i64) -> F {
        if k < self.min_k {
            return F::zero();
        }
        let end = ((k - self.min_k) as usize + 1).min(self.pmf.len());
        self.pmf[..end].iter().copied().fold(F::zero(), |a, b| a + b)
    }

    pub fn total_mass(&self) -> F {
        self.pmf.iter().copied().fold(F::zero(), |a, b| a + b)
    }

    pub fn mean(&self) -> F {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, &p)| F::from_i64(self.min_k + i as i64).unwrap() * p)
            .fold(F::zero(), |a, b| a + b)
    }

    pub fn variance(&self) -> F {
        let mu = self.mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let d = F::from_i64(self.min_k + i as i64).unwrap() - mu;
                d * d * p
            })
            .fold(F::zero(), |a, b| a + b)
    }
}

/// Normal collision distribution `D₂(n, t)` of the finite-horizon regime.
pub fn gaussian_density<F: Scalar>(n: F, mean: F, variance: F) -> F {
    let two_pi = F::two() * F::PI();
    let d = n - mean;
    (-(d * d) / (F::two() * variance)).exp() / (two_pi * variance).sqrt()
}

/// Unit-variance reduced form `(1/√(2π))·exp(−ñ²/2)`.
pub fn gaussian_reduced_density<F: Scalar>(x: F) -> F {
    gaussian_density(x, F::zero(), F::one())
}

/// Gaussian CDF, used for goodness-of-fit comparisons.
pub fn gaussian_cdf<F: Scalar>(x: F, mean: F, variance: F) -> F {
    let arg = (x - mean).as_f64() / (2.0 * variance.as_f64()).sqrt();
    F::lit(0.5 * (1.0 + statrs::function::erf::erf(arg)))
}

/// Lévy jump-length statistics of the infinite-horizon regime: the
/// long-flight density `Λ_s(r) ∝ r^(2/z − 5)` normalized on `[r_min, ∞)`,
/// together with the ballistic time-of-flight coupling `r = t`.
#[derive(Debug, Clone, Copy)]
pub struct LevyJumpDensity<F> {
    z: F,
    r_min: F,
    amplitude: F,
}

impl<F: Scalar> LevyJumpDensity<F> {
    /// Requires a superdiffusive exponent `1 < z < 2`, for which the tail
    /// exponent `2/z − 5 < −1` makes the density normalizable.
    pub fn new(z: F, r_min: F) -> Result<Self> {
        if !(z > F::one() && z < F::two()) {
            return Err(Error::InvalidArgument(format!("z = {z} must lie in (1, 2)")));
        }
        if !r_min.is_finite() || r_min <= F::zero() {
            return Err(Error::InvalidArgument(format!("r_min = {r_min} must be positive")));
        }
        // ∫_{r_min}^∞ C·r^p dr = 1 with p = 2/z − 5.
        let decay = F::four() - F::two() / z;
        let amplitude = decay * r_min.powf(decay);
        Ok(Self { z, r_min, amplitude })
    }

    #[inline]
    pub fn tail_exponent(&self) -> F {
        F::two() / self.z - F::lit(5.0)
    }

    #[inline]
    pub fn r_min(&self) -> F {
        self.r_min
    }

    /// Jump-length density `Λ_s(r)`.
    pub fn density(&self, r: F) -> F {
        if r < self.r_min {
            F::zero()
        } else {
            self.amplitude * r.powf(self.tail_exponent())
        }
    }

    /// The waiting-time density `Ψ(r, t) = Λ_s(r)·δ(r − t)` collapses onto
    /// the line `r = t` for unit-speed flights; this returns that exact
    /// coupling as (jump length, density weight).
    pub fn ballistic_jump(&self, t: F) -> (F, F) {
        (t, self.density(t))
    }
}

/// Implied diffusion exponent from a fitted tail exponent `p = 2/z − 5`.
pub fn z_from_tail_exponent<F: Scalar>(p: F) -> F {
    F::two() / (p + F::lit(5.0))
}

/// Square-billiard dispersion value σ(0) = 0.29 used by the bouncing-ball
/// curve.
pub const SIGMA0: f64 = 0.29;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DispersionVariant {
    /// σ(R) = √(1 − 2R/L) / (12√5·(R₂/L)²) with R₂ = L/2.
    QuasiChaotic,
    /// Bouncing-ball form σ(R) = σ(0)·√((4/π)·arcsin(w/√(1+w²)) / (1 − π(R/L)²)),
    /// with w = 1 − 2R/L.
    BouncingBall,
}

/// Velocity-dispersion parameter σ(R). Outside the domain (R ≥ L/2) the
/// curves vanish by continuity and the value is flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSigma<F> {
    pub value: F,
    pub in_domain: bool,
}

pub fn dispersion_sigma<F: Scalar>(radius: F, side: F, variant: DispersionVariant) -> DispersionSigma<F> {
    let ratio = radius / side;
    if ratio >= F::half() {
        return DispersionSigma { value: F::zero(), in_domain: false };
    }
    let w = F::one() - F::two() * ratio;
    let value = match variant {
        DispersionVariant::QuasiChaotic => {
            let r2_sq = F::half() * F::half();
            w.sqrt() / (F::lit(12.0) * F::lit(5.0).sqrt() * r2_sq)
        }
        DispersionVariant::BouncingBall => {
            let arg = w / (F::one() + w * w).sqrt();
            let num = (F::four() / F::PI()) * arg.asin();
            let den = F::one() - F::PI() * ratio * ratio;
            F::lit(SIGMA0) * (num / den).sqrt()
        }
    };
    DispersionSigma { value, in_domain: true }
}

/// Printed short form of the bouncing-ball curve,
/// σ(0)·√((1 − 2R/L)/(1 − π(R/L)²)), kept for cross-checking against the
/// full arcsin expression.
pub fn bouncing_ball_sigma_approx<F: Scalar>(radius: F, side: F) -> F {
    let ratio = radius / side;
    if ratio >= F::half() {
        return F::zero();
    }
    let w = F::one() - F::two() * ratio;
    F::lit(SIGMA0) * (w / (F::one() - F::PI() * ratio * ratio)).sqrt()
}

/// Truncated-normal distribution of the reduced normal-to-wall velocity,
/// `g_σ(v)` on `v ∈ [0, 1]`, normalized by `erf(1/(2√2σ))`.
pub fn velocity_dispersion_density<F: Scalar>(v: F, sigma: F) -> F {
    let s = sigma.as_f64();
    let norm = statrs::function::erf::erf(1.0 / (2.0 * std::f64::consts::SQRT_2 * s));
    let d = v.as_f64() - 0.5;
    let raw = (-d * d / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
    F::lit(raw / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, integrate_to_infinity};
    use approx::assert_relative_eq;

    const TAU_C0: f64 = std::f64::consts::PI / 4.0;

    fn oracle() -> SquareBilliardOracle<f64> {
        SquareBilliardOracle::new(1.0).unwrap()
    }

    #[test]
    fn variance_coefficient_value() {
        // κ = π²/16 + π/8 − 1
        assert_relative_eq!(oracle().variance_coefficient(), 0.00954936, epsilon = 5e-9);
    }

    #[test]
    fn per_orbit_counts() {
        let o = oracle();
        assert_relative_eq!(o.wall_collision_count(0.0, 10.0), 10.0, max_relative = 1e-15);
        assert_relative_eq!(
            o.wall_collision_count(std::f64::consts::FRAC_PI_4, 10.0),
            10.0 * 2.0f64.sqrt(),
            max_relative = 1e-15
        );
        // Angles outside [0, π/4] fold by symmetry.
        assert_relative_eq!(
            o.wall_collision_count(std::f64::consts::PI - 0.3, 7.0),
            o.wall_collision_count(0.3, 7.0),
            max_relative = 1e-13
        );
        assert_relative_eq!(o.characteristic_time(0.0), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn liouville_average_of_per_orbit_count() {
        // (4/π)·∫_0^{π/4} n₀(θ, t) dθ = 4t/(πL).
        let o = oracle();
        let t = 10.0;
        let avg = integrate(|th: f64| o.wall_collision_count(th, t), 0.0, std::f64::consts::FRAC_PI_4, 1e-12)
            * 4.0
            / std::f64::consts::PI;
        assert_relative_eq!(avg, o.mean_count(t), max_relative = 1e-10);
        assert_relative_eq!(o.mean_count(t), 4.0 * t / std::f64::consts::PI, max_relative = 1e-15);
    }

    #[test]
    fn density_selfconsistent_by_quadrature() {
        let o = oracle();
        let t = 100.0 * TAU_C0;
        let nc0 = o.mean_count(t);
        let (lo, hi) = o.support(t);

        let norm = integrate(|n| o.density(n, t), lo, hi, 1e-12);
        assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");

        let mean = integrate(|n| n * o.density(n, t), lo, hi, 1e-12);
        assert!((mean / nc0 - 1.0).abs() < 1e-6, "mean {mean}");

        let var = integrate(|n| (n - nc0).powi(2) * o.density(n, t), lo, hi, 1e-12);
        let expected = o.variance_coefficient() * nc0 * nc0;
        assert!((var / expected - 1.0).abs() < 1e-6, "var {var} vs {expected}");
    }

    #[test]
    fn density_support_and_endpoint_divergence() {
        let o = oracle();
        let t = 100.0 * TAU_C0;
        let nc0 = o.mean_count(t);
        assert_eq!(o.density(0.70 * nc0, t), 0.0);
        assert_eq!(o.density(1.20 * nc0, t), 0.0);
        // Divergent but integrable at the upper endpoint.
        let (_, hi) = o.support(t);
        assert!(o.density(hi - 1e-9, t) > 1e3);
        let tail = integrate(|n| o.density(n, t), hi - 1.0, hi, 1e-10);
        assert!(tail.is_finite() && tail < 0.2, "tail mass {tail}");
    }

    #[test]
    fn cdf_matches_density_quadrature() {
        let o = oracle();
        let t = 100.0 * TAU_C0;
        let (lo, _) = o.support(t);
        for frac in [0.2, 0.5, 0.9] {
            let n = lo + frac * (o.support(t).1 - lo);
            let by_quad = integrate(|x| o.density(x, t), lo, n, 1e-12);
            assert_relative_eq!(o.cdf(n, t), by_quad, epsilon = 1e-8);
        }
    }

    #[test]
    fn count_distribution_is_exact() {
        let o = oracle();
        let t = 100.0 * TAU_C0;
        let d = o.count_distribution(t);
        assert!((d.total_mass() - 1.0).abs() < 1e-12, "mass {}", d.total_mass());
        // The phase average preserves the continuous mean exactly.
        assert_relative_eq!(d.mean(), o.mean_count(t), epsilon = 1e-9);
        // Integer phases add at most Var(εx) + Var(εy) ≤ 1/2 on top of the
        // continuous variance.
        let kappa = o.variance_coefficient();
        let var0 = kappa * 100.0 * 100.0;
        assert!(d.variance() >= var0 - 1e-9 && d.variance() <= var0 + 0.5, "var {}", d.variance());
        // Integer counts can undershoot the continuous support by one.
        assert!(d.min_count() >= 77);
        assert!(d.pmf(100) > 0.0);
        assert_eq!(d.pmf(70), 0.0);
    }

    #[test]
    fn gaussian_density_shape() {
        let var = 4.0;
        let peak = gaussian_density(0.0, 0.0, var);
        assert_relative_eq!(peak, 1.0 / (2.0 * std::f64::consts::PI * var).sqrt(), max_relative = 1e-15);
        let at_sigma = gaussian_density(2.0, 0.0, var);
        assert_relative_eq!(at_sigma / peak, (-0.5f64).exp(), max_relative = 1e-12);
        let norm = integrate(|x| gaussian_density(x, 1.0, var), -30.0, 30.0, 1e-12);
        assert!((norm - 1.0).abs() < 1e-8);
        assert_relative_eq!(gaussian_reduced_density(0.0), 0.3989422804014327, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_cdf_reference_points() {
        assert_relative_eq!(gaussian_cdf(0.0, 0.0, 1.0), 0.5, max_relative = 1e-14);
        assert_relative_eq!(gaussian_cdf(1.959963984540054, 0.0, 1.0), 0.975, epsilon = 1e-9);
    }

    #[test]
    fn levy_density_normalizes_and_exposes_exponent() {
        let levy = LevyJumpDensity::<f64>::new(1.5, 0.6311).unwrap();
        assert_relative_eq!(levy.tail_exponent(), -11.0 / 3.0, max_relative = 1e-14);
        let norm = integrate_to_infinity(|r| levy.density(r), levy.r_min(), 1e-12);
        assert!((norm - 1.0).abs() < 1e-8, "norm {norm}");

        let nearly_two = LevyJumpDensity::<f64>::new(1.999999, 1.0).unwrap();
        assert_relative_eq!(nearly_two.tail_exponent(), -4.0, epsilon = 1e-5);

        assert!(LevyJumpDensity::<f64>::new(1.0, 1.0).is_err());
        assert!(LevyJumpDensity::<f64>::new(2.0, 1.0).is_err());
        assert!(LevyJumpDensity::<f64>::new(1.5, 0.0).is_err());

        let (r, w) = levy.ballistic_jump(3.0);
        assert_eq!(r, 3.0);
        assert_relative_eq!(w, levy.density(3.0), max_relative = 1e-15);
        assert_eq!(levy.density(0.5), 0.0);
    }

    #[test]
    fn implied_z_from_tail() {
        assert_relative_eq!(z_from_tail_exponent(-11.0 / 3.0), 1.5, max_relative = 1e-14);
    }

    #[test]
    fn dispersion_curves() {
        let bb0 = dispersion_sigma(0.0, 1.0, DispersionVariant::BouncingBall);
        assert!(bb0.in_domain);
        assert_relative_eq!(bb0.value, SIGMA0, max_relative = 1e-12);

        let qc0 = dispersion_sigma(0.0, 1.0, DispersionVariant::QuasiChaotic);
        assert_relative_eq!(qc0.value, 1.0 / (3.0 * 5.0f64.sqrt()), max_relative = 1e-12);

        for variant in [DispersionVariant::QuasiChaotic, DispersionVariant::BouncingBall] {
            let near = dispersion_sigma(0.5 - 1e-12, 1.0, variant);
            assert!(near.value < 1e-5, "{variant:?} does not vanish at L/2");
            let out = dispersion_sigma(0.5, 1.0, variant);
            assert_eq!(out.value, 0.0);
            assert!(!out.in_domain);
        }
    }

    #[test]
    fn bouncing_ball_full_vs_printed_approximation() {
        // The printed short form tracks the arcsin expression only loosely:
        // the worst absolute gap on R/L ∈ [0, 0.45] is ≈ 0.0228 (≈ 8% of
        // σ(0), 11% relative) near R/L ≈ 0.36. Assert that measured bound.
        let mut worst = 0.0f64;
        for i in 0..=450 {
            let r = i as f64 / 1000.0;
            let full = dispersion_sigma(r, 1.0, DispersionVariant::BouncingBall).value;
            let approx = bouncing_ball_sigma_approx(r, 1.0);
            worst = worst.max((full - approx).abs());
        }
        assert!(worst < 0.0234, "worst deviation {worst}");
        assert!(worst > 0.020, "deviation suspiciously small: {worst}");
    }

    #[test]
    fn velocity_dispersion_density_properties() {
        let sigma = 0.14f64;
        let norm = integrate(|v| velocity_dispersion_density(v, sigma), 0.0, 1.0, 1e-12);
        assert!((norm - 1.0).abs() < 1e-8, "norm {norm}");
        // Symmetric about v = 1/2.
        for u in [0.1, 0.25, 0.4] {
            assert_relative_eq!(
                velocity_dispersion_density(0.5 + u, sigma),
                velocity_dispersion_density(0.5 - u, sigma),
                max_relative = 1e-12
            );
        }
        // Mean count identity: ∫ 2v·g_σ(v) dv = 1, so n_cσ(t) = t/τ_c^(w).
        let mean = integrate(|v| 2.0 * v * velocity_dispersion_density(v, sigma), 0.0, 1.0, 1e-12);
        assert!((mean - 1.0).abs() < 1e-8, "mean {mean}");
    }

    #[test]
    fn count_distribution_works_in_f32() {
        let o = SquareBilliardOracle::<f32>::new(1.0).unwrap();
        let d = o.count_distribution(20.0 * std::f32::consts::FRAC_PI_4);
        assert!((d.total_mass() - 1.0).abs() < 1e-4);
    }
}
