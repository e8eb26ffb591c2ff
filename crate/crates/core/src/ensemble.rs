//! Liouville-measure sampling and deterministic parallel ensemble runs.
//!
//! Each particle owns a counter-based RNG substream derived purely from
//! `(master_seed, particle_index)`, and per-particle results are collected
//! in particle order before any accumulation, so a run is bit-identical for
//! any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{simulate_until, FlightRules, ParticleState, ProbeSample};
use crate::error::{Error, Result};
use crate::geometry::BilliardConfig;
use crate::scalar::Scalar;

/// Which mean collision time sets the unit for observation times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TauNormalization {
    ByWallTau,
    ByDiskTau,
    ByTotalTau,
}

impl TauNormalization {
    pub fn resolve<F: Scalar>(self, cfg: &BilliardConfig<F>) -> F {
        match self {
            TauNormalization::ByWallTau => cfg.tau_wall(),
            TauNormalization::ByDiskTau => cfg.tau_disk(),
            TauNormalization::ByTotalTau => cfg.tau_total(),
        }
    }
}

/// Full description of one ensemble experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec<F> {
    pub config: BilliardConfig<F>,
    pub n_particles: u64,
    /// Final observation time (absolute units).
    pub t_obs: F,
    /// Sorted probe times in `(0, t_obs]` (absolute units).
    pub probe_times: Vec<F>,
    pub master_seed: u64,
    pub normalization: TauNormalization,
    /// Resolved normalization time the τ-unit inputs referred to.
    pub tau_unit: F,
    pub rules: FlightRules<F>,
}

impl<F: Scalar> EnsembleSpec<F> {
    /// Builds a spec with `t_obs` and probes given in units of the chosen
    /// mean collision time. The probe schedule must be sorted, lie in
    /// `(0, t_obs]`, and reach the steady-state window `t ≥ 50·τ_c`.
    pub fn in_tau_units(
        config: BilliardConfig<F>,
        n_particles: u64,
        t_obs_tau: F,
        probes_tau: &[F],
        master_seed: u64,
        normalization: TauNormalization,
    ) -> Result<Self> {
        let tau_unit = normalization.resolve(&config);
        if !tau_unit.is_finite() {
            return Err(Error::InvalidSpec(
                "disk-time normalization is undefined for R = 0 (no scatterer)".into(),
            ));
        }
        let t_obs = t_obs_tau * tau_unit;
        let probe_times: Vec<F> = probes_tau.iter().map(|&p| p * tau_unit).collect();
        Self::new(config, n_particles, t_obs, probe_times, master_seed, normalization, tau_unit)
    }

    pub fn new(
        config: BilliardConfig<F>,
        n_particles: u64,
        t_obs: F,
        probe_times: Vec<F>,
        master_seed: u64,
        normalization: TauNormalization,
        tau_unit: F,
    ) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidSpec("need at least one particle".into()));
        }
        if !(t_obs > F::zero()) {
            return Err(Error::InvalidSpec("t_obs must be positive".into()));
        }
        if probe_times.is_empty() {
            return Err(Error::InvalidSpec("need at least one probe time".into()));
        }
        for pair in probe_times.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::InvalidSpec("probe times must be strictly increasing".into()));
            }
        }
        if probe_times.iter().any(|&p| p <= F::zero() || p > t_obs) {
            return Err(Error::InvalidSpec("probe times must lie in (0, t_obs]".into()));
        }
        let last = *probe_times.last().unwrap();
        if last < F::lit(50.0) * tau_unit * (F::one() - F::lit(1e-9)) {
            return Err(Error::InvalidSpec(
                "probe schedule must reach the steady-state window t >= 50 tau_c".into(),
            ));
        }
        Ok(Self { config, n_particles, t_obs, probe_times, master_seed, normalization, tau_unit, rules: FlightRules::default() })
    }

    /// Default probe schedule: `count` log-spaced times from `lo` to `hi`
    /// (in τ units).
    pub fn log_spaced_probes(lo: F, hi: F, count: usize) -> Vec<F> {
        let ratio = hi / lo;
        (0..count)
            .map(|k| lo * ratio.powf(F::from_usize(k).unwrap() / F::from_usize(count - 1).unwrap()))
            .collect()
    }
}

/// The RNG substream owned by one particle: a pure function of
/// `(master_seed, particle_index)`.
pub fn particle_rng(master_seed: u64, particle_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(particle_index);
    rng
}

/// Draws an initial condition from the Liouville measure: position uniform
/// on the accessible region (by rejection), direction angle uniform on
/// `[0, 2π)`.
pub fn sample_initial_state<F: Scalar>(cfg: &BilliardConfig<F>, rng: &mut ChaCha8Rng) -> Result<ParticleState<F>> {
    const MAX_ATTEMPTS: u64 = 1_000_000;
    let side = cfg.side();
    let mut attempts = 0;
    let position = loop {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::RejectionFailure(MAX_ATTEMPTS));
        }
        let p = [F::lit(rng.gen::<f64>()) * side, F::lit(rng.gen::<f64>()) * side];
        if !cfg.inside_any_disk([0, 0], p) {
            break p;
        }
    };
    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
    ParticleState::new(position, [F::lit(theta.cos()), F::lit(theta.sin())], cfg)
}

/// Mergeable raw-moment accumulator for one probe time.
///
/// Collision-count power sums are exact integers, so merging is exactly
/// associative and commutative for them; displacement sums are plain f-sums
/// and merge up to rounding. Runs are nevertheless bit-identical across
/// worker counts because accumulation always happens in particle order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleMoments<F> {
    pub count: u64,
    wall: PowerSums,
    disk: PowerSums,
    sum_dx: F,
    sum_dy: F,
    sum_dr2: F,
}

impl<F: Scalar> Default for EnsembleMoments<F> {
    fn default() -> Self {
        Self {
            count: 0,
            wall: PowerSums::default(),
            disk: PowerSums::default(),
            sum_dx: F::zero(),
            sum_dy: F::zero(),
            sum_dr2: F::zero(),
        }
    }
}

/// Exact sums of the first four powers of an integer count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PowerSums {
    pub s1: u128,
    pub s2: u128,
    pub s3: u128,
    pub s4: u128,
}

impl PowerSums {
    #[inline]
    fn push(&mut self, n: u64) {
        let n = n as u128;
        let n2 = n * n;
        self.s1 += n;
        self.s2 += n2;
        self.s3 += n2 * n;
        self.s4 += n2 * n2;
    }

    fn merge(&mut self, other: &Self) {
        self.s1 += other.s1;
        self.s2 += other.s2;
        self.s3 += other.s3;
        self.s4 += other.s4;
    }
}

/// Mean, variance and fourth central moment of one collision kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KindMoments<F> {
    pub mean: F,
    pub variance: F,
    pub fourth_central: F,
}

impl<F: Scalar> EnsembleMoments<F> {
    pub fn push(&mut self, n_wall: u64, n_disk: u64, dx: F, dy: F) {
        self.count += 1;
        self.wall.push(n_wall);
        self.disk.push(n_disk);
        self.sum_dx += dx;
        self.sum_dy += dy;
        self.sum_dr2 += dx * dx + dy * dy;
    }

    pub fn push_sample(&mut self, sample: &ProbeSample<F>) {
        self.push(sample.n_wall, sample.n_disk, sample.displacement[0], sample.displacement[1]);
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.wall.merge(&other.wall);
        self.disk.merge(&other.disk);
        self.sum_dx += other.sum_dx;
        self.sum_dy += other.sum_dy;
        self.sum_dr2 += other.sum_dr2;
    }

    pub fn merged(mut self, other: &Self) -> Self {
        self.merge(other);
        self
    }

    fn kind_sums(&self, kind: crate::stats::CollisionKind) -> &PowerSums {
        match kind {
            crate::stats::CollisionKind::Wall => &self.wall,
            crate::stats::CollisionKind::Disk => &self.disk,
        }
    }

    /// Central moments of the requested count kind.
    pub fn kind_moments(&self, kind: crate::stats::CollisionKind) -> Result<KindMoments<F>> {
        if self.count == 0 {
            return Err(Error::NotEnoughSamples { have: 0, need: 1 });
        }
        let sums = self.kind_sums(kind);
        let n = F::from_u64(self.count).unwrap();
        let s1 = F::from_u128(sums.s1).unwrap();
        let s2 = F::from_u128(sums.s2).unwrap();
        let s3 = F::from_u128(sums.s3).unwrap();
        let s4 = F::from_u128(sums.s4).unwrap();
        let mu = s1 / n;
        let m2 = s2 / n - mu * mu;
        let m4 = s4 / n - F::four() * mu * s3 / n + F::lit(6.0) * mu * mu * s2 / n
            - F::lit(3.0) * mu * mu * mu * mu;
        Ok(KindMoments { mean: mu, variance: m2.max(F::zero()), fourth_central: m4.max(F::zero()) })
    }

    /// Ensemble-mean displacement vector `⟨Δr⟩`.
    pub fn mean_displacement(&self) -> [F; 2] {
        let n = F::from_u64(self.count.max(1)).unwrap();
        [self.sum_dx / n, self.sum_dy / n]
    }

    /// Displacement variance `⟨Δ²r⟩ = ⟨|Δr|²⟩ − |⟨Δr⟩|²`.
    pub fn displacement_variance(&self) -> F {
        let n = F::from_u64(self.count.max(1)).unwrap();
        let mean = self.mean_displacement();
        (self.sum_dr2 / n - mean[0] * mean[0] - mean[1] * mean[1]).max(F::zero())
    }

    /// Mean squared displacement `⟨|Δr|²⟩`.
    pub fn mean_squared_displacement(&self) -> F {
        let n = F::from_u64(self.count.max(1)).unwrap();
        self.sum_dr2 / n
    }
}

/// Moments at one probe time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeMoments<F> {
    pub time: F,
    pub moments: EnsembleMoments<F>,
}

/// Raw per-probe counts of one particle (probe index implied by position).
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleRecord<F> {
    pub samples: Vec<ProbeSample<F>>,
    pub events: u64,
    pub corner_nudges: u64,
}

/// A particle whose trajectory exceeded the event budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbortedParticle {
    pub index: u64,
    pub master_seed: u64,
    pub detail: String,
}

/// Result of [`run_ensemble`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRun<F> {
    pub probes: Vec<ProbeMoments<F>>,
    /// One record per completed particle, in particle order (`None` marks
    /// aborted trajectories).
    pub records: Vec<Option<ParticleRecord<F>>>,
    pub aborted: Vec<AbortedParticle>,
    pub warnings: Vec<String>,
}

impl<F: Scalar> EnsembleRun<F> {
    /// Raw counts of one kind at probe index `probe`, for histogramming.
    pub fn counts_at(&self, probe: usize, kind: crate::stats::CollisionKind) -> Vec<u64> {
        self.records
            .iter()
            .flatten()
            .map(|rec| match kind {
                crate::stats::CollisionKind::Wall => rec.samples[probe].n_wall,
                crate::stats::CollisionKind::Disk => rec.samples[probe].n_disk,
            })
            .collect()
    }
}

/// Runs the ensemble on `workers` rayon threads (0 = rayon default).
///
/// Event-budget aborts do not fail the run; they are reported per particle
/// with the seed needed to reproduce them, and excluded from the moments.
pub fn run_ensemble<F: Scalar>(spec: &EnsembleSpec<F>, workers: usize) -> Result<EnsembleRun<F>> {
    let simulate_one = |index: u64| -> std::result::Result<ParticleRecord<F>, AbortedParticle> {
        let mut rng = particle_rng(spec.master_seed, index);
        let state = sample_initial_state(&spec.config, &mut rng).map_err(|e| AbortedParticle {
            index,
            master_seed: spec.master_seed,
            detail: e.to_string(),
        })?;
        match simulate_until(&state, &spec.config, spec.t_obs, &spec.probe_times, &spec.rules, None) {
            Ok(traj) => Ok(ParticleRecord {
                samples: traj.samples,
                events: traj.events,
                corner_nudges: traj.final_state.corner_nudges,
            }),
            Err(e) => Err(AbortedParticle { index, master_seed: spec.master_seed, detail: e.to_string() }),
        }
    };

    let outcomes: Vec<std::result::Result<ParticleRecord<F>, AbortedParticle>> = if workers == 1 {
        (0..spec.n_particles).map(simulate_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
        pool.install(|| (0..spec.n_particles).into_par_iter().map(simulate_one).collect())
    };

    let mut records = Vec::with_capacity(outcomes.len());
    let mut aborted = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(rec) => records.push(Some(rec)),
            Err(ab) => {
                aborted.push(ab);
                records.push(None);
            }
        }
    }

    // Accumulate in particle order: identical for every worker count.
    let mut probes: Vec<ProbeMoments<F>> = spec
        .probe_times
        .iter()
        .map(|&t| ProbeMoments { time: t, moments: EnsembleMoments::default() })
        .collect();
    for rec in records.iter().flatten() {
        for (probe, sample) in probes.iter_mut().zip(&rec.samples) {
            probe.moments.push_sample(sample);
        }
    }

    let warnings = rate_sanity_warnings(spec, &probes);
    for w in &warnings {
        log::warn!("{w}");
    }

    Ok(EnsembleRun { probes, records, aborted, warnings })
}

/// Mean collision rates must track 1/τ; deviations beyond 5σ are reported
/// as warnings, not failures, since small ensembles legitimately fluctuate.
fn rate_sanity_warnings<F: Scalar>(spec: &EnsembleSpec<F>, probes: &[ProbeMoments<F>]) -> Vec<String> {
    let mut warnings = Vec::new();
    let five = F::lit(5.0);
    for probe in probes {
        let m = &probe.moments;
        if m.count < 2 {
            continue;
        }
        let sqrt_n = F::from_u64(m.count).unwrap().sqrt();
        let checks = [
            (crate::stats::CollisionKind::Wall, spec.config.tau_wall(), "wall"),
            (crate::stats::CollisionKind::Disk, spec.config.tau_disk(), "disk"),
        ];
        for (kind, tau, label) in checks {
            if !tau.is_finite() {
                continue;
            }
            let km = match m.kind_moments(kind) {
                Ok(km) => km,
                Err(_) => continue,
            };
            let expected = probe.time / tau;
            let se = (km.variance.max(F::zero())).sqrt() / sqrt_n;
            if se > F::zero() && (km.mean - expected).abs() > five * se {
                warnings.push(format!(
                    "{label} count mean {} deviates from t/tau = {} by more than 5 sigma at t = {}",
                    km.mean, expected, probe.time
                ));
            }
        }
    }
    warnings
}
