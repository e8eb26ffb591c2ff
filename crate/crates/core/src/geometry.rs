//! Billiard/Lorentz-gas parameterization: accessible area, collision
//! perimeters, mean collision times, and horizon classification.
//!
//! The unit cell is the square `[0, L]²` with a disk of radius `R` at its
//! center. For `R < L/2` the disk sits fully inside the cell; for
//! `L/2 ≤ R < L/√2` neighboring disks of the lattice overlap the cell and
//! each other, and the area/perimeter expressions carry the circular-segment
//! corrections so the mean collision times `τ = πA/P` keep referring to the
//! accessible region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Horizon regime of the periodic Lorentz gas.
///
/// Corridor crossovers sit at `r₁ = √2·L/4` (diagonal corridors close) and
/// `r₂ = L/2` (all corridors close). Boundary radii classify into the
/// more-closed regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HorizonClass {
    /// `R < √2·L/4`: diagonal and nondiagonal corridors open.
    InfiniteAllCorridors,
    /// `√2·L/4 ≤ R < L/2`: only nondiagonal corridors remain.
    InfiniteNondiagonalOnly,
    /// `R ≥ L/2`: no free-motion corridors.
    Finite,
}

/// Static geometry of one lattice cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilliardConfig<F> {
    side: F,
    radius: F,
    area: F,
    wall_perimeter: F,
    disk_perimeter: F,
    tau_wall: F,
    tau_disk: F,
    tau_total: F,
}

impl<F: Scalar> BilliardConfig<F> {
    /// Builds the configuration for cell side `L` and disk radius `R`.
    ///
    /// Rejects `L ≤ 0`, `R < 0` and `R ≥ L/√2` (the disk would cover the
    /// cell corners and disconnect the accessible region).
    pub fn new(side: F, radius: F) -> Result<Self> {
        if !side.is_finite() || side <= F::zero() {
            return Err(Error::InvalidGeometry(format!("side L = {side} must be positive")));
        }
        if !radius.is_finite() || radius < F::zero() {
            return Err(Error::InvalidGeometry(format!("radius R = {radius} must be non-negative")));
        }
        if radius >= side / F::SQRT_2() {
            return Err(Error::InvalidGeometry(format!(
                "radius R = {radius} covers the cell corners (R/L must stay below 1/sqrt(2))"
            )));
        }

        let pi = F::PI();
        let half_side = side * F::half();
        let (area, wall_perimeter, disk_perimeter) = if radius < half_side {
            (side * side - pi * radius * radius, F::four() * side, F::two() * pi * radius)
        } else {
            // Overlapping-disk corrections: one circular segment of the disk
            // pokes through each cell edge.
            let chord_half = (radius * radius - half_side * half_side).sqrt();
            let seg_angle = (half_side / radius).acos();
            let segment = radius * radius * seg_angle - half_side * chord_half;
            let area = side * side - pi * radius * radius + F::four() * segment;
            let wall = F::four() * (side - F::two() * chord_half);
            let disk = F::two() * radius * (pi - F::four() * seg_angle);
            (area, wall, disk)
        };

        let tau_wall = pi * area / wall_perimeter;
        let (tau_disk, tau_total) = if radius > F::zero() {
            let tau_disk = pi * area / disk_perimeter;
            let tau_total = pi * area / (wall_perimeter + disk_perimeter);
            (tau_disk, tau_total)
        } else {
            // Square billiard: the disk never collides; keep the sentinel
            // explicit so R = 0 runs cleanly.
            (F::infinity(), tau_wall)
        };

        Ok(Self { side, radius, area, wall_perimeter, disk_perimeter, tau_wall, tau_disk, tau_total })
    }

    #[inline]
    pub fn side(&self) -> F {
        self.side
    }

    #[inline]
    pub fn radius(&self) -> F {
        self.radius
    }

    /// Accessible table area `A`.
    #[inline]
    pub fn area(&self) -> F {
        self.area
    }

    /// Accessible wall perimeter `P_w`.
    #[inline]
    pub fn wall_perimeter(&self) -> F {
        self.wall_perimeter
    }

    /// Accessible scatterer arc length `P_s`.
    #[inline]
    pub fn disk_perimeter(&self) -> F {
        self.disk_perimeter
    }

    /// Mean wall-collision time `τ_c^(w) = πA/P_w`.
    #[inline]
    pub fn tau_wall(&self) -> F {
        self.tau_wall
    }

    /// Mean disk-collision time `τ_c^(s) = πA/P_s`; infinite for `R = 0`.
    #[inline]
    pub fn tau_disk(&self) -> F {
        self.tau_disk
    }

    /// Combined mean collision time: `1/τ_c = 1/τ_c^(w) + 1/τ_c^(s)`.
    #[inline]
    pub fn tau_total(&self) -> F {
        self.tau_total
    }

    /// `τ_c^(s)/τ_c^(w) = P_w/P_s`, the expected ratio of wall to disk
    /// collision numbers. Equals `2L/(πR)` exactly while `R < L/2`.
    pub fn collision_ratio(&self) -> Result<F> {
        if self.radius == F::zero() {
            return Err(Error::NoScatterer);
        }
        Ok(self.tau_disk / self.tau_wall)
    }

    /// Whether disks protrude through the cell edges (`R ≥ L/2`), which
    /// makes the four edge-adjacent disks reachable from inside the cell.
    #[inline]
    pub fn disks_protrude(&self) -> bool {
        self.radius >= self.side * F::half()
    }

    pub fn horizon(&self) -> HorizonClass {
        let r1 = self.side * F::SQRT_2() / F::four();
        let r2 = self.side * F::half();
        if self.radius < r1 {
            HorizonClass::InfiniteAllCorridors
        } else if self.radius < r2 {
            HorizonClass::InfiniteNondiagonalOnly
        } else {
            HorizonClass::Finite
        }
    }

    /// Center of the disk belonging to lattice cell `(i, j)`.
    #[inline]
    pub fn disk_center(&self, cell: [i64; 2]) -> [F; 2] {
        [
            (F::from_i64(cell[0]).unwrap() + F::half()) * self.side,
            (F::from_i64(cell[1]).unwrap() + F::half()) * self.side,
        ]
    }

    /// True if `point` lies strictly inside any disk that intersects the
    /// cell `(i, j)`: the cell's own disk, plus the four edge neighbors
    /// once disks protrude.
    pub fn inside_any_disk(&self, cell: [i64; 2], point: [F; 2]) -> bool {
        if self.radius == F::zero() {
            return false;
        }
        let r2 = self.radius * self.radius;
        let center = self.disk_center(cell);
        let mut candidates = [[F::zero(); 2]; 5];
        candidates[0] = center;
        let mut count = 1;
        if self.disks_protrude() {
            for (dx, dy) in [(1i8, 0i8), (-1, 0), (0, 1), (0, -1)] {
                candidates[count] = [
                    center[0] + F::from_i8(dx).unwrap() * self.side,
                    center[1] + F::from_i8(dy).unwrap() * self.side,
                ];
                count += 1;
            }
        }
        candidates[..count].iter().any(|c| {
            let dx = point[0] - c[0];
            let dy = point[1] - c[1];
            dx * dx + dy * dy < r2
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(l: f64, r: f64) -> BilliardConfig<f64> {
        BilliardConfig::new(l, r).unwrap()
    }

    #[test]
    fn square_billiard_times() {
        let c = cfg(1.0, 0.0);
        assert_relative_eq!(c.tau_wall(), std::f64::consts::PI / 4.0, max_relative = 1e-15);
        assert_eq!(c.disk_perimeter(), 0.0);
        assert!(c.tau_disk().is_infinite());
        assert_eq!(c.tau_total(), c.tau_wall());
    }

    #[test]
    fn quarter_radius_geometry() {
        let c = cfg(1.0, 0.25);
        assert_relative_eq!(c.area(), 1.0 - std::f64::consts::PI / 16.0, max_relative = 1e-15);
        assert_relative_eq!(c.area(), 0.803650459150638, max_relative = 1e-12);
        assert_relative_eq!(c.tau_wall(), 0.631185594630427, max_relative = 1e-12);
        assert_relative_eq!(c.tau_disk(), 1.607300918301276, max_relative = 1e-12);
    }

    #[test]
    fn overlapping_branch_matches_closed_forms() {
        // Values from the segment-corrected formulas, cross-checked by the
        // Monte Carlo area oracle below.
        let c = cfg(1.0, 0.6);
        assert_relative_eq!(c.area(), 0.049088869214891867, max_relative = 1e-12);
        assert_relative_eq!(c.wall_perimeter(), 1.346700167715680, max_relative = 1e-12);
        assert_relative_eq!(c.disk_perimeter(), 0.958620575713428, max_relative = 1e-12);
        assert_relative_eq!(c.tau_wall(), 0.114514896927742, max_relative = 1e-12);
        assert_relative_eq!(c.tau_disk(), 0.160874108907753, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BilliardConfig::new(0.0, 0.1).is_err());
        assert!(BilliardConfig::new(-1.0, 0.1).is_err());
        assert!(BilliardConfig::new(1.0, -0.1).is_err());
        assert!(BilliardConfig::new(1.0, 0.8).is_err());
        assert!(BilliardConfig::new(1.0, 1.0 / 2.0f64.sqrt()).is_err());
        assert!(BilliardConfig::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn horizon_classification() {
        assert_eq!(cfg(1.0, 0.30).horizon(), HorizonClass::InfiniteAllCorridors);
        assert_eq!(cfg(1.0, 0.40).horizon(), HorizonClass::InfiniteNondiagonalOnly);
        assert_eq!(cfg(1.0, 0.50).horizon(), HorizonClass::Finite);
        // Boundary radii land in the more-closed regime.
        let r1 = 2.0f64.sqrt() / 4.0;
        assert_eq!(cfg(1.0, r1).horizon(), HorizonClass::InfiniteNondiagonalOnly);
        assert_eq!(cfg(1.0, 0.60).horizon(), HorizonClass::Finite);
    }

    #[test]
    fn collision_ratio_small_radius() {
        let c = cfg(1.0, 0.25);
        assert_relative_eq!(c.collision_ratio().unwrap(), 8.0 / std::f64::consts::PI, max_relative = 1e-14);
        assert_eq!(cfg(1.0, 0.0).collision_ratio(), Err(Error::NoScatterer));
        // Diverges as R -> 0+.
        assert!(cfg(1.0, 1e-6).collision_ratio().unwrap() > 1e5);
    }

    #[test]
    fn collision_ratio_corrected_branch_differs_from_naive() {
        // At R = 2/π the naive 2L/(πR) says exactly 1; the corrected
        // perimeters give a larger ratio because the protruding segments
        // shrink P_s faster than P_w.
        let r = 2.0 / std::f64::consts::PI;
        let c = cfg(1.0, r);
        let naive = 2.0 / (std::f64::consts::PI * r);
        assert_relative_eq!(naive, 1.0, max_relative = 1e-15);
        assert_relative_eq!(c.collision_ratio().unwrap(), 1.410937207669355, max_relative = 1e-12);
    }

    #[test]
    fn area_and_tau_wall_monotone_in_radius() {
        let mut prev_area = f64::INFINITY;
        for i in 0..70 {
            let r = i as f64 * 0.01;
            let c = cfg(1.0, r);
            assert!(c.area() < prev_area, "area not strictly decreasing at R = {r}");
            prev_area = c.area();
        }
        let mut prev_tau = f64::INFINITY;
        for i in 0..50 {
            let r = i as f64 * 0.01;
            let c = cfg(1.0, r);
            assert!(c.tau_wall() < prev_tau, "tau_wall not strictly decreasing at R = {r}");
            prev_tau = c.tau_wall();
        }
    }

    #[test]
    fn branch_formulas_continuous_at_half_side() {
        let below = cfg(1.0, 0.5 - 1e-9);
        let at = cfg(1.0, 0.5);
        assert_relative_eq!(below.area(), at.area(), epsilon = 1e-7);
        assert_relative_eq!(below.wall_perimeter(), at.wall_perimeter(), epsilon = 1e-3);
        assert_relative_eq!(below.disk_perimeter(), at.disk_perimeter(), epsilon = 1e-3);
    }

    #[test]
    fn collision_frequencies_add_up() {
        for i in 1..70 {
            let c = cfg(1.0, i as f64 * 0.01);
            let lhs = 1.0 / c.tau_total();
            let rhs = 1.0 / c.tau_wall() + 1.0 / c.tau_disk();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }

    #[test]
    fn area_matches_monte_carlo_rejection_oracle() {
        // Independent accessible-area estimate: uniform points in the cell,
        // rejected inside any disk overlapping it.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a4ea);
        let n = 10_000_000u64;
        for r in [0.1, 0.3, 0.45, 0.55, 0.6] {
            let c = cfg(1.0, r);
            let mut accepted = 0u64;
            for _ in 0..n {
                let p = [rng.gen::<f64>(), rng.gen::<f64>()];
                if !c.inside_any_disk([0, 0], p) {
                    accepted += 1;
                }
            }
            let p_hat = accepted as f64 / n as f64;
            let p_true = c.area();
            let sigma = (p_true * (1.0 - p_true) / n as f64).sqrt();
            assert!(
                (p_hat - p_true).abs() < 3.0 * sigma,
                "R = {r}: MC area {p_hat} vs analytic {p_true} (3σ = {})",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn f32_geometry_agrees_with_f64() {
        let c32 = BilliardConfig::<f32>::new(1.0, 0.25).unwrap();
        let c64 = cfg(1.0, 0.25);
        assert!((c32.area() as f64 - c64.area()).abs() < 1e-6);
        assert!((c32.tau_wall() as f64 - c64.tau_wall()).abs() < 1e-6);
    }
}
