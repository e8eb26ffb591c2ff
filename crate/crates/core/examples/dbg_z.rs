use std::time::Instant;

use sinai::ensemble::{run_ensemble, EnsembleSpec, TauNormalization};
use sinai::geometry::BilliardConfig;
use sinai::stats::{
    estimate_distribution, fit_diffusion_exponent, fit_levy_tail, kurtosis_ratio, Binning, CollisionKind,
};

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(42);
    let probes = EnsembleSpec::log_spaced_probes(10.0, 200.0, 16);

    for &r in &[0.0, 0.1, 0.2, 0.25, 0.3, 0.36, 0.42, 0.48, 0.5, 0.6] {
        let cfg = BilliardConfig::new(1.0, r).unwrap();
        let norm = if r >= 0.5 { TauNormalization::ByTotalTau } else { TauNormalization::ByWallTau };
        let spec = EnsembleSpec::in_tau_units(cfg, n, 200.0, &probes, seed, norm).unwrap();
        let t0 = Instant::now();
        let run = run_ensemble(&spec, 0).unwrap();
        let elapsed = t0.elapsed().as_secs_f64();
        let tau = spec.tau_unit;
        let window = (50.0 * tau, 200.0 * tau * 1.0000001);
        let fit = fit_diffusion_exponent(&run.probes, &cfg, window, norm);
        let last = run.probes.last().unwrap();
        let z4w = kurtosis_ratio(&last.moments, CollisionKind::Wall).unwrap_or(f64::NAN);
        let z4d = kurtosis_ratio(&last.moments, CollisionKind::Disk).unwrap_or(f64::NAN);
        match fit {
            Ok(f) => {
                println!(
                    "R={r:<5} z={:.3}±{:.3} (r2={:.4}) z_disk={:?} z_disp={:.3} ratio={:.3} zeta4_w={z4w:.3} zeta4_d={z4d:.3}  [{elapsed:.1}s]",
                    f.z,
                    f.z_stderr,
                    f.wall.r_squared,
                    f.z_disk.map(|z| (z * 1000.0).round() / 1000.0),
                    f.z_displacement,
                    f.variance_ratio,
                );
            }
            Err(e) => println!("R={r}: fit failed: {e}  [{elapsed:.1}s]"),
        }
        if (r - 0.25).abs() < 1e-9 {
            // Levy tail probe on the disk counts at the final probe.
            let counts = run.counts_at(run.probes.len() - 1, CollisionKind::Disk);
            for width in [0.1f64, 0.2] {
                match estimate_distribution(&counts, last.time, CollisionKind::Disk, Binning::FixedReducedWidth(width))
                {
                    Ok(est) => match fit_levy_tail(&est, &cfg, 2.0) {
                        Ok(tail) => println!(
                            "   levy(width={width}): p={:.3}±{:.3} A={:.3} implied_z={:.3} bins={} window=({:.1},{:.1})",
                            tail.exponent,
                            tail.stderr,
                            tail.amplitude,
                            tail.implied_z,
                            tail.n_bins,
                            tail.window.0,
                            tail.window.1
                        ),
                        Err(e) => println!("   levy(width={width}): {e}"),
                    },
                    Err(e) => println!("   levy(width={width}): {e}"),
                }
            }
        }
    }
}
