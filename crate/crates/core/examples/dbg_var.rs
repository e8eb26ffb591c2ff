use sinai::ensemble::{run_ensemble, EnsembleSpec, TauNormalization};
use sinai::geometry::BilliardConfig;
use sinai::stats::CollisionKind;

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let probes = EnsembleSpec::log_spaced_probes(10.0, 300.0, 20);

    for &r in &[0.1, 0.2, 0.3, 0.5, 0.6] {
        let cfg = BilliardConfig::<f64>::new(1.0, r).unwrap();
        let norm = if r >= 0.5 { TauNormalization::ByTotalTau } else { TauNormalization::ByWallTau };
        let spec = EnsembleSpec::in_tau_units(cfg, n, 300.0, &probes, 42, norm).unwrap();
        let run = run_ensemble(&spec, 0).unwrap();
        println!("== R = {r} (tau_unit {:.4}, tau_w {:.4}, tau_tot {:.4}) ==", spec.tau_unit, cfg.tau_wall(), cfg.tau_total());
        let mut prev: Option<(f64, f64)> = None;
        for p in &run.probes {
            let w = p.moments.kind_moments(CollisionKind::Wall).unwrap();
            let t_tau = p.time / spec.tau_unit;
            let local = prev.map(|(lt, lv): (f64, f64)| (w.variance.ln() - lv) / (p.time.ln() - lt));
            println!(
                "  t/tau={:7.2}  var_w={:12.3}  local_slope={}  z_loc={}",
                t_tau,
                w.variance,
                local.map_or("   -  ".into(), |s| format!("{s:6.3}")),
                local.map_or("  -  ".into(), |s| format!("{:5.3}", 2.0 / s)),
            );
            prev = Some((p.time.ln(), w.variance.ln()));
        }
    }
}
