//! Shot selection by forward simulation.
//!
//! The imagined scene is copied once per candidate shot. Candidates form a
//! two-level tree (angle, then tap time). Every copy is run to the horizon
//! or until the scene settles, and angles are ranked by the mean score of
//! their neighbourhood so that isolated lucky outcomes lose to broad ones.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::physics::{self, PhysicsError, StepEvents};
use crate::world::{self, flight_time_to_ground, BirdType, Scene, Shot, TraceHasher, WorldError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub angle_count: usize,
    pub angle_step: f64,
    pub angle_min: f64,
    pub tap_count: usize,
    /// Simulated seconds per shot.
    pub horizon: f64,
    pub dt: f64,
    /// Half width `k` of the scoring window over neighbouring angles.
    pub window: usize,
    /// Kept for reference only; an offline engine is not racing a clock.
    pub speed_factor: f64,
    /// Also average over neighbouring tap times.
    pub robust_over_taps: bool,
    /// Worker threads for the fan-out; 0 uses the ambient rayon pool.
    pub workers: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            angle_count: 106,
            angle_step: 0.01,
            angle_min: 0.05,
            tap_count: 5,
            horizon: 15.0,
            dt: 1.0 / 60.0,
            window: 1,
            speed_factor: 3.0,
            robust_over_taps: false,
            workers: 0,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        let bad = |m: &str| Err(PlannerError::InvalidConfig(m.to_string()));
        if self.angle_count == 0 {
            return bad("angle_count must be at least 1");
        }
        if !(self.angle_step > 0.0) || self.angle_min < 0.0 {
            return bad("angle_step must be positive and angle_min non-negative");
        }
        if self.angle(self.angle_count - 1) > std::f64::consts::FRAC_PI_2 + 1e-12 {
            return bad("angle sweep exceeds pi/2");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("dt and horizon must be positive");
        }
        Ok(())
    }

    pub fn angle(&self, i: usize) -> f64 {
        self.angle_min + i as f64 * self.angle_step
    }
}

/// A candidate shot with its position in the tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub angle_index: usize,
    pub tap_index: Option<usize>,
    pub shot: Shot,
}

/// Tap times strictly inside `(0.15 T, 0.9 T)`, evenly spaced.
pub fn tap_times(count: usize, flight_time: f64) -> Vec<f64> {
    let (lo, hi) = (0.15 * flight_time, 0.9 * flight_time);
    (0..count)
        .map(|j| lo + (j + 1) as f64 * (hi - lo) / (count + 1) as f64)
        .collect()
}

/// The full candidate tree for the next bird. Red birds get one candidate
/// per angle; the others get `tap_count` per angle.
pub fn build_shots(cfg: &PlannerConfig, bird: BirdType, scene: &Scene) -> Vec<Candidate> {
    let g = -scene.gravity.y;
    let height = scene.slingshot.y - scene.ground_top();
    let mut out = Vec::new();
    for i in 0..cfg.angle_count {
        let angle = cfg.angle(i);
        if !bird.has_ability() || cfg.tap_count == 0 {
            out.push(Candidate { angle_index: i, tap_index: None, shot: Shot::new(angle) });
            continue;
        }
        let t = if g > 0.0 {
            flight_time_to_ground(angle, scene.launch_speed, g, height).min(cfg.horizon)
        } else {
            cfg.horizon
        };
        for (j, tap) in tap_times(cfg.tap_count, t).into_iter().enumerate() {
            out.push(Candidate { angle_index: i, tap_index: Some(j), shot: Shot::with_tap(angle, tap) });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub candidate: Candidate,
    pub score: i64,
    pub pigs_killed: usize,
    pub destroyed: usize,
    pub steps: u64,
    pub settled: bool,
    pub tapped: bool,
    pub trace_hash: u64,
}

impl SimOutcome {
    pub fn shot(&self) -> Shot {
        self.candidate.shot
    }
}

/// One row of a per-step trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: u64,
    pub time: f64,
    pub score: i64,
    pub alive_pigs: usize,
    pub active_bodies: usize,
    pub destroyed: Vec<usize>,
    pub state_hash: u64,
}

/// Runs one shot on a copy of `imagined`.
pub fn run_simulation(imagined: &Scene, candidate: Candidate, cfg: &PlannerConfig) -> Result<SimOutcome, PlannerError> {
    run_simulation_traced(imagined, candidate, cfg, |_, _| {})
}

/// Like [`run_simulation`], calling `observe` after every step.
pub fn run_simulation_traced(
    imagined: &Scene,
    candidate: Candidate,
    cfg: &PlannerConfig,
    mut observe: impl FnMut(&Scene, &StepEvents),
) -> Result<SimOutcome, PlannerError> {
    let mut scene = imagined.clone();
    let pigs_before = scene.dead_pigs();
    let mut hasher = TraceHasher::default();
    let outcome = execute_shot(&mut scene, candidate.shot, cfg.dt, cfg.horizon, |scene, events| {
        for &id in &events.destroyed {
            hasher.write_u64(scene.steps);
            hasher.write_u64(id as u64);
        }
        observe(scene, events);
    })?;
    hasher.write_scene(&scene);
    Ok(SimOutcome {
        candidate,
        score: world::current_score(&scene),
        pigs_killed: scene.dead_pigs() - pigs_before,
        destroyed: outcome.destroyed,
        steps: outcome.steps,
        settled: outcome.settled,
        tapped: outcome.tapped,
        trace_hash: hasher.finish(),
    })
}

/// What happened while one shot played out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotReport {
    pub steps: u64,
    pub settled: bool,
    pub tapped: bool,
    pub destroyed: usize,
}

/// Launches the next bird, taps at the step nearest the tap time, and steps
/// until the scene settles or the horizon runs out.
pub fn execute_shot(
    scene: &mut Scene,
    shot: Shot,
    dt: f64,
    horizon: f64,
    mut observe: impl FnMut(&Scene, &StepEvents),
) -> Result<ShotReport, PlannerError> {
    world::launch(scene, &shot)?;
    let tap_step = shot.tap_time.map(|t| ((t / dt).round() as u64).max(1));
    let mut report = ShotReport { steps: 0, settled: false, tapped: false, destroyed: 0 };
    let max_steps = (horizon / dt).round() as u64;
    for k in 1..=max_steps {
        let mut events = physics::step(scene, dt)?;
        if tap_step == Some(k) {
            if let Ok(tap_events) = world::tap(scene) {
                report.tapped = true;
                events.merge(tap_events);
            }
        }
        report.destroyed += events.destroyed.len();
        report.steps = k;
        observe(scene, &events);
        if scene.is_settled() {
            report.settled = true;
            break;
        }
    }
    Ok(report)
}

/// Windowed means: `r[i]` averages `raw` over `[i - k, i + k]`, truncated at
/// the ends.
pub fn robust_scores(raw: &[f64], k: usize) -> Vec<f64> {
    let n = raw.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(k);
            let hi = (i + k).min(n - 1);
            raw[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub chosen: Shot,
    pub angle_index: usize,
    pub raw_score: i64,
    pub robust_score: f64,
    /// Best tap per angle, in angle order.
    pub per_angle: Vec<SimOutcome>,
    pub robust: Vec<f64>,
}

impl Decision {
    /// Per-angle sweep as CSV: `angle,raw_score,robust_score,pigs_killed,trace_hash`.
    pub fn sweep_csv(&self) -> String {
        let mut out = String::from("angle,raw_score,robust_score,pigs_killed,trace_hash\n");
        for (o, r) in self.per_angle.iter().zip(&self.robust) {
            let _ = writeln!(
                out,
                "{:.4},{},{:.4},{},{:016x}",
                o.candidate.shot.angle, o.score, r, o.pigs_killed, o.trace_hash
            );
        }
        out
    }

    /// Index of the highest raw score (first on ties).
    pub fn raw_argmax(&self) -> usize {
        argmax_first(self.per_angle.iter().map(|o| o.score as f64))
    }
}

fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Picks the best tap per angle, then the angle with the best windowed
/// score. Ties go to the higher raw score, then the lower angle.
///
/// `outcomes` must be in candidate order, as produced by [`build_shots`].
pub fn select(outcomes: &[SimOutcome], cfg: &PlannerConfig) -> Decision {
    assert!(!outcomes.is_empty(), "select needs at least one outcome");
    let n = outcomes.iter().map(|o| o.candidate.angle_index).max().unwrap_or(0) + 1;
    let mut by_angle: Vec<Vec<&SimOutcome>> = vec![Vec::new(); n];
    for o in outcomes {
        by_angle[o.candidate.angle_index].push(o);
    }

    let (per_angle, robust): (Vec<SimOutcome>, Vec<f64>) = if cfg.robust_over_taps {
        let taps = by_angle.iter().map(Vec::len).max().unwrap_or(1);
        let k = cfg.window;
        let score = |i: usize, j: usize| by_angle[i].get(j).map(|o| o.score as f64);
        by_angle
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let windowed = |j: usize| {
                    let mut sum = 0.0;
                    let mut count = 0.0;
                    for a in i.saturating_sub(k)..=(i + k).min(n - 1) {
                        for t in j.saturating_sub(k)..=(j + k).min(taps - 1) {
                            if let Some(s) = score(a, t) {
                                sum += s;
                                count += 1.0;
                            }
                        }
                    }
                    sum / count
                };
                let j = argmax_first((0..row.len()).map(windowed));
                (row[j].clone(), windowed(j))
            })
            .unzip()
    } else {
        let per_angle: Vec<SimOutcome> = by_angle
            .iter()
            .map(|row| row[argmax_first(row.iter().map(|o| o.score as f64))].clone())
            .collect();
        let raw: Vec<f64> = per_angle.iter().map(|o| o.score as f64).collect();
        let robust = robust_scores(&raw, cfg.window);
        (per_angle, robust)
    };

    let mut best = 0;
    for i in 1..n {
        let (r, b) = (robust[i], robust[best]);
        if r > b || (r == b && per_angle[i].score > per_angle[best].score) {
            best = i;
        }
    }
    Decision {
        chosen: per_angle[best].candidate.shot,
        angle_index: best,
        raw_score: per_angle[best].score,
        robust_score: robust[best],
        per_angle,
        robust,
    }
}

/// Runs every candidate for the next bird of `imagined` and selects a shot.
/// The result does not depend on the number of workers.
pub fn plan(imagined: &Scene, cfg: &PlannerConfig) -> Result<Decision, PlannerError> {
    cfg.validate()?;
    let bird = *imagined.bird_queue().first().ok_or(WorldError::NoBirdsLeft)?;
    let candidates = build_shots(cfg, bird, imagined);
    let run = || {
        candidates
            .par_iter()
            .map(|&c| run_simulation(imagined, c, cfg))
            .collect::<Result<Vec<_>, _>>()
    };
    let outcomes = if cfg.workers == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| PlannerError::InvalidConfig(format!("thread pool: {e}")))?
            .install(run)?
    };
    Ok(select(&outcomes, cfg))
}
