//! Event-driven propagation through the unfolded periodic Lorentz gas.
//!
//! The particle flies in the infinite lattice plane: straight segments,
//! cell-boundary crossings (which correspond one-to-one to wall reflections
//! of the folded Sinai-billiard orbit) and specular disk reflections, the
//! only velocity changes. Working unfolded keeps the displacement Δr exact
//! and makes wall-collision counting a matter of incrementing a step
//! counter; [`fold_position`] recovers the in-cell orbit when needed.

use crate::error::{Error, Result};
use crate::geometry::BilliardConfig;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Straight crossing into an adjacent lattice cell (a wall reflection
    /// of the folded orbit).
    WallCrossing,
    /// Specular reflection off a scatterer disk.
    DiskReflection,
}

/// Per-axis signed cell-crossing counters (s_x⁺, s_x⁻, s_y⁺, s_y⁻).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub x_pos: u64,
    pub x_neg: u64,
    pub y_pos: u64,
    pub y_neg: u64,
}

impl StepCounts {
    /// Total wall-collision count: n^(w) = s_x⁺ + s_x⁻ + s_y⁺ + s_y⁻.
    #[inline]
    pub fn total(&self) -> u64 {
        self.x_pos + self.x_neg + self.y_pos + self.y_neg
    }
}

/// State of one particle in the unfolded plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState<F> {
    pub position: [F; 2],
    /// Unit velocity direction (unit speed throughout).
    pub direction: [F; 2],
    time: F,
    time_comp: F,
    pub cell: [i64; 2],
    pub steps: StepCounts,
    pub disk_collisions: u64,
    pub corner_nudges: u64,
    pub cusp_escapes: u64,
    zero_flight_run: u32,
}

impl<F: Scalar> ParticleState<F> {
    /// Creates a state at `position` with the given direction (normalized
    /// here). The lattice cell is derived from the position; the position
    /// must lie outside every scatterer disk.
    pub fn new(position: [F; 2], direction: [F; 2], cfg: &BilliardConfig<F>) -> Result<Self> {
        if !(position[0].is_finite() && position[1].is_finite()) {
            return Err(Error::InvalidArgument("non-finite initial position".into()));
        }
        let norm = (direction[0] * direction[0] + direction[1] * direction[1]).sqrt();
        if !norm.is_finite() || norm == F::zero() {
            return Err(Error::InvalidArgument("zero or non-finite initial direction".into()));
        }
        let direction = [direction[0] / norm, direction[1] / norm];
        let cell = [
            (position[0] / cfg.side()).floor().as_f64() as i64,
            (position[1] / cfg.side()).floor().as_f64() as i64,
        ];
        if cfg.inside_any_disk(cell, position) {
            return Err(Error::InvalidArgument("initial position inside a scatterer".into()));
        }
        Ok(Self {
            position,
            direction,
            time: F::zero(),
            time_comp: F::zero(),
            cell,
            steps: StepCounts::default(),
            disk_collisions: 0,
            corner_nudges: 0,
            cusp_escapes: 0,
            zero_flight_run: 0,
        })
    }

    /// Convenience constructor from a launch angle.
    pub fn from_angle(position: [F; 2], theta: F, cfg: &BilliardConfig<F>) -> Result<Self> {
        Self::new(position, [theta.cos(), theta.sin()], cfg)
    }

    /// Elapsed time (total arc length at unit speed), compensated so that
    /// flight times add without drift.
    #[inline]
    pub fn time(&self) -> F {
        self.time + self.time_comp
    }

    #[inline]
    fn add_time(&mut self, dt: F) {
        // Neumaier summation.
        let sum = self.time + dt;
        if self.time.abs() >= dt.abs() {
            self.time_comp += (self.time - sum) + dt;
        } else {
            self.time_comp += (dt - sum) + self.time;
        }
        self.time = sum;
    }

    #[inline]
    fn force_time(&mut self, t: F) {
        self.time = t;
        self.time_comp = F::zero();
    }

    /// Reverses the direction of motion in place.
    pub fn reverse(&mut self) {
        self.direction = [-self.direction[0], -self.direction[1]];
    }
}

/// Numerical conventions of the event loop. Grazing disk hits below the
/// discriminant tolerance are skipped (measure-zero), crossings within
/// `corner_eps` of a lattice vertex are nudged along the boundary, and
/// candidate events closer than `min_flight` are rejected so degenerate
/// impacts cannot stall the loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightRules<F> {
    pub tangency_eps: F,
    pub min_flight: F,
    pub corner_eps: F,
    pub corner_nudge: F,
    pub unit_tol: F,
    /// Surface band (in squared length) inside which an approaching
    /// particle reflects immediately instead of being advanced by a
    /// sub-`min_flight` root. Keeps cusp chattering (tangent disks at
    /// R = L/2) from tunnelling through a scatterer.
    pub contact_eps: F,
    /// Consecutive zero-length flights tolerated before the cusp escape
    /// (exact velocity reversal) fires.
    pub cusp_escape_after: u32,
    pub event_budget: u64,
}

impl<F: Scalar> Default for FlightRules<F> {
    fn default() -> Self {
        Self {
            tangency_eps: F::lit(1e-12),
            min_flight: F::lit(1e-13),
            corner_eps: F::lit(1e-12),
            corner_nudge: F::lit(1e-10),
            unit_tol: F::lit(1e-12),
            contact_eps: F::lit(1e-11),
            cusp_escape_after: 8,
            event_budget: 100_000_000,
        }
    }
}

/// One committed collision event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent<F> {
    pub kind: EventKind,
    /// Time stamp of the event (elapsed trajectory time).
    pub time: F,
    /// Impact point folded into the base cell.
    pub folded_position: [F; 2],
    /// Normal component of the incoming velocity at impact.
    pub incidence: F,
}

/// Ordered event log of one trajectory.
#[derive(Debug, Clone, Default)]
pub struct CollisionRecord<F> {
    pub events: Vec<CollisionEvent<F>>,
}

/// Counts and exact displacement reported at one probe time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample<F> {
    pub time: F,
    pub n_wall: u64,
    pub n_disk: u64,
    pub displacement: [F; 2],
}

/// Result of [`simulate_until`].
#[derive(Debug, Clone)]
pub struct Trajectory<F> {
    pub final_state: ParticleState<F>,
    pub samples: Vec<ProbeSample<F>>,
    pub events: u64,
}

#[derive(Debug, Clone, Copy)]
struct PlannedEvent<F> {
    kind: EventKind,
    dt: F,
    /// Disk center for reflections; crossed axis and direction for crossings.
    disk_center: [F; 2],
    axis: usize,
    positive: bool,
}

fn plan_event<F: Scalar>(state: &ParticleState<F>, cfg: &BilliardConfig<F>, rules: &FlightRules<F>) -> PlannedEvent<F> {
    let l = cfg.side();
    let p = state.position;
    let v = state.direction;

    // Exit through the current cell's boundaries.
    let mut t_wall = F::infinity();
    let mut axis = 0usize;
    let mut positive = false;
    for k in 0..2 {
        if v[k] == F::zero() {
            continue;
        }
        let target = if v[k] > F::zero() {
            F::from_i64(state.cell[k] + 1).unwrap() * l
        } else {
            F::from_i64(state.cell[k]).unwrap() * l
        };
        let t = (target - p[k]) / v[k];
        if t >= F::zero() && t < t_wall {
            t_wall = t;
            axis = k;
            positive = v[k] > F::zero();
        }
    }

    // Earliest scatterer hit among the disks reachable from this cell.
    let mut t_disk = F::infinity();
    let mut disk_center = [F::zero(); 2];
    if cfg.radius() > F::zero() {
        let r2 = cfg.radius() * cfg.radius();
        let own = cfg.disk_center(state.cell);
        let neighbors = [(0i64, 0i64), (1, 0), (-1, 0), (0, 1), (0, -1)];
        let n_candidates = if cfg.disks_protrude() { 5 } else { 1 };
        for &(dx, dy) in neighbors.iter().take(n_candidates) {
            let c = [
                own[0] + F::from_i64(dx).unwrap() * l,
                own[1] + F::from_i64(dy).unwrap() * l,
            ];
            let d = [p[0] - c[0], p[1] - c[1]];
            let b = d[0] * v[0] + d[1] * v[1];
            let c2 = d[0] * d[0] + d[1] * d[1] - r2;
            let disc = b * b - c2;
            if disc < rules.tangency_eps {
                continue;
            }
            let t = -b - disc.sqrt();
            if t > rules.min_flight && t < t_disk {
                t_disk = t;
                disk_center = c;
            }
        }
    }

    if t_disk < t_wall {
        PlannedEvent { kind: EventKind::DiskReflection, dt: t_disk, disk_center, axis: 0, positive: false }
    } else {
        PlannedEvent { kind: EventKind::WallCrossing, dt: t_wall, disk_center, axis, positive }
    }
}

fn commit_event<F: Scalar>(
    state: &mut ParticleState<F>,
    cfg: &BilliardConfig<F>,
    rules: &FlightRules<F>,
    planned: &PlannedEvent<F>,
) -> CollisionEvent<F> {
    let l = cfg.side();
    let dt = planned.dt;
    let v = state.direction;
    let mut q = [state.position[0] + dt * v[0], state.position[1] + dt * v[1]];

    let incidence;
    match planned.kind {
        EventKind::DiskReflection => {
            let c = planned.disk_center;
            let mut n = [q[0] - c[0], q[1] - c[1]];
            let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
            n = [n[0] / len, n[1] / len];
            let vn = v[0] * n[0] + v[1] * n[1];
            incidence = -vn;
            let mut w = [v[0] - F::two() * vn * n[0], v[1] - F::two() * vn * n[1]];
            let wlen = (w[0] * w[0] + w[1] * w[1]).sqrt();
            w = [w[0] / wlen, w[1] / wlen];
            state.direction = w;
            state.disk_collisions += 1;
        }
        EventKind::WallCrossing => {
            let axis = planned.axis;
            let other = 1 - axis;
            let boundary = if planned.positive {
                F::from_i64(state.cell[axis] + 1).unwrap() * l
            } else {
                F::from_i64(state.cell[axis]).unwrap() * l
            };
            q[axis] = boundary;
            // Crossings that land on a lattice vertex are displaced along
            // the boundary; vertex splitting is measure-zero and any fixed
            // convention is admissible.
            let lo = F::from_i64(state.cell[other]).unwrap() * l;
            let hi = lo + l;
            if (q[other] - lo).abs() < rules.corner_eps {
                q[other] = lo + rules.corner_nudge;
                state.corner_nudges += 1;
            } else if (q[other] - hi).abs() < rules.corner_eps {
                q[other] = hi - rules.corner_nudge;
                state.corner_nudges += 1;
            }
            incidence = v[axis].abs();
            if planned.positive {
                state.cell[axis] += 1;
                match axis {
                    0 => state.steps.x_pos += 1,
                    _ => state.steps.y_pos += 1,
                }
            } else {
                state.cell[axis] -= 1;
                match axis {
                    0 => state.steps.x_neg += 1,
                    _ => state.steps.y_neg += 1,
                }
            }
        }
    }

    state.position = q;
    state.add_time(dt);

    debug_assert!(
        (state.direction[0] * state.direction[0] + state.direction[1] * state.direction[1] - F::one()).abs()
            < rules.unit_tol,
        "direction drifted off the unit circle"
    );

    CollisionEvent {
        kind: planned.kind,
        time: state.time(),
        folded_position: fold_position(cfg, state.cell, state.position),
        incidence,
    }
}

/// Computes the next collision event without committing it, returning the
/// event kind, the free-flight time, and the post-event state.
pub fn next_event<F: Scalar>(
    state: &ParticleState<F>,
    cfg: &BilliardConfig<F>,
    rules: &FlightRules<F>,
) -> (EventKind, F, ParticleState<F>) {
    let planned = plan_event(state, cfg, rules);
    let mut next = *state;
    commit_event(&mut next, cfg, rules, &planned);
    (planned.kind, planned.dt, next)
}

/// Propagates a particle until `t_end`, sampling counts and the exact
/// unfolded displacement at each probe time (interpolated along the current
/// free-flight segment). Pass a [`CollisionRecord`] to keep the full event
/// log; ensemble runs skip it to bound memory.
pub fn simulate_until<F: Scalar>(
    initial: &ParticleState<F>,
    cfg: &BilliardConfig<F>,
    t_end: F,
    probes: &[F],
    rules: &FlightRules<F>,
    mut record: Option<&mut CollisionRecord<F>>,
) -> Result<Trajectory<F>> {
    if !(t_end > F::zero()) {
        return Err(Error::InvalidArgument(format!("t_end = {t_end} must be positive")));
    }
    for pair in probes.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::InvalidArgument("probe times must be sorted".into()));
        }
    }
    if probes.iter().any(|&t| t <= F::zero() || t > t_end) {
        return Err(Error::InvalidArgument("probe times must lie in (0, t_end]".into()));
    }

    let mut state = *initial;
    let origin = initial.position;
    let mut samples = Vec::with_capacity(probes.len());
    let mut probe_idx = 0usize;
    let mut events = 0u64;

    loop {
        let planned = plan_event(&state, cfg, rules);
        let t_now = state.time();
        let t_event = t_now + planned.dt;

        while probe_idx < probes.len() && probes[probe_idx] <= t_event {
            let tp = probes[probe_idx];
            let lead = tp - t_now;
            let pos = [
                state.position[0] + lead * state.direction[0],
                state.position[1] + lead * state.direction[1],
            ];
            samples.push(ProbeSample {
                time: tp,
                n_wall: state.steps.total(),
                n_disk: state.disk_collisions,
                displacement: [pos[0] - origin[0], pos[1] - origin[1]],
            });
            probe_idx += 1;
        }

        if t_event > t_end {
            let lead = t_end - t_now;
            state.position = [
                state.position[0] + lead * state.direction[0],
                state.position[1] + lead * state.direction[1],
            ];
            state.force_time(t_end);
            break;
        }

        let event = commit_event(&mut state, cfg, rules, &planned);
        events += 1;
        if let Some(rec) = record.as_deref_mut() {
            rec.events.push(event);
        }
        if events >= rules.event_budget {
            return Err(Error::EventBudgetExceeded { budget: rules.event_budget, time: state.time().as_f64() });
        }
    }

    Ok(Trajectory { final_state: state, samples, events })
}

/// Folds an unfolded position back into the base cell `[0, L]²` by mirror
/// reflection across the crossed walls (cell-index parity per axis).
pub fn fold_position<F: Scalar>(cfg: &BilliardConfig<F>, cell: [i64; 2], position: [F; 2]) -> [F; 2] {
    let l = cfg.side();
    let mut folded = [F::zero(); 2];
    for k in 0..2 {
        let local = position[k] - F::from_i64(cell[k]).unwrap() * l;
        folded[k] = if cell[k].rem_euclid(2) == 0 { local } else { l - local };
    }
    folded
}

/// Folds a full state: in-cell position plus the direction of the
/// equivalent Sinai-billiard orbit (sign-flipped on odd-parity axes).
pub fn fold_state<F: Scalar>(cfg: &BilliardConfig<F>, state: &ParticleState<F>) -> ([F; 2], [F; 2]) {
    let position = fold_position(cfg, state.cell, state.position);
    let mut direction = state.direction;
    for k in 0..2 {
        if state.cell[k].rem_euclid(2) != 0 {
            direction[k] = -direction[k];
        }
    }
    (position, direction)
}
