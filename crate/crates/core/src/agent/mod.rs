//! Agents that play levels from rendered class maps, the episode loop that
//! runs them against the ground-truth world, and the benchmark harness.

mod bench;
mod config;

pub use bench::{bench, BenchConfig, BenchReport, BenchRow};
pub use config::{parse_config, ConfigError};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::perception::{perceive, to_scene, ObjectKind, PerceptionConfig, PerceptionError, SceneTemplate};
use crate::planner::{execute_shot, plan, Decision, PlannerConfig, PlannerError};
use crate::render::{rasterize, PixelGrid, DEFAULT_HEIGHT, DEFAULT_WIDTH};
use crate::world::{current_score, solve_launch_angles, Scene, Shot};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error(transparent)]
    Perception(#[from] PerceptionError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
}

/// Everything an agent is configured with. None of it is read from the
/// ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub planner: PlannerConfig,
    pub perception: PerceptionConfig,
    pub template: SceneTemplate,
    pub width: u32,
    pub height: u32,
    /// Safety cap on shots per episode.
    pub max_shots: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            planner: PlannerConfig::default(),
            perception: PerceptionConfig::default(),
            template: SceneTemplate::default(),
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            max_shots: 32,
        }
    }
}

/// A chosen shot, with the planner's reasoning when there is any.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub shot: Shot,
    pub decision: Option<Decision>,
}

pub trait Agent {
    fn name(&self) -> &'static str;
    /// Chooses the next shot from the current screen.
    fn decide(&mut self, grid: &PixelGrid) -> Result<Choice, AgentError>;
}

/// Perceives the screen, rebuilds the scene and plans by simulation.
#[derive(Debug, Clone)]
pub struct SimAgent {
    pub config: AgentConfig,
}

impl SimAgent {
    pub fn new(config: AgentConfig) -> Self {
        Self { config }
    }
}

impl Agent for SimAgent {
    fn name(&self) -> &'static str {
        "sim"
    }

    fn decide(&mut self, grid: &PixelGrid) -> Result<Choice, AgentError> {
        let rec = perceive(grid, &self.config.perception)?;
        let imagined = to_scene(&rec, &self.config.template);
        let decision = plan(&imagined, &self.config.planner)?;
        Ok(Choice { shot: decision.chosen, decision: Some(decision) })
    }
}

/// Picks a visible pig at random and fires the low ballistic arc at it,
/// or `pi/4` when it is out of reach. Never taps.
#[derive(Debug, Clone)]
pub struct NaiveAgent {
    pub config: AgentConfig,
    rng: SplitMix64,
    /// Pig index drawn for each shot, for inspection.
    pub picks: Vec<usize>,
}

impl NaiveAgent {
    pub fn new(config: AgentConfig, seed: u64) -> Self {
        Self { config, rng: SplitMix64::seed_from_u64(seed), picks: Vec::new() }
    }
}

/// Low-arc launch angle at a target offset, clamped to `[0, pi/2]`, or
/// `pi/4` when the target cannot be reached.
pub fn naive_angle(dx: f64, dy: f64, speed: f64, g: f64) -> f64 {
    match solve_launch_angles(dx, dy, speed, g) {
        Ok((low, _)) => low.clamp(0.0, std::f64::consts::FRAC_PI_2),
        Err(_) => std::f64::consts::FRAC_PI_4,
    }
}

impl Agent for NaiveAgent {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn decide(&mut self, grid: &PixelGrid) -> Result<Choice, AgentError> {
        let rec = perceive(grid, &self.config.perception)?;
        let pigs: Vec<_> = rec.objects.iter().filter(|o| o.kind == ObjectKind::Pig).collect();
        if pigs.is_empty() {
            return Ok(Choice { shot: Shot::new(std::f64::consts::FRAC_PI_4), decision: None });
        }
        let pick = (self.rng.next_u64() % pigs.len() as u64) as usize;
        self.picks.push(pick);
        let target = pigs[pick].shape.center() - rec.slingshot;
        let t = &self.config.template;
        let angle = naive_angle(target.x, target.y, t.launch_speed, -t.gravity.y);
        Ok(Choice { shot: Shot::new(angle), decision: None })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpisodeOutcome {
    /// No pigs left.
    Won,
    /// Pigs left, no birds left, world at rest.
    Lost,
    /// Pigs left, no birds left, world still moving at the horizon, or the
    /// shot cap was hit.
    Timeout,
    /// The agent could not act.
    Aborted(String),
}

impl EpisodeOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            EpisodeOutcome::Won => "won",
            EpisodeOutcome::Lost => "lost",
            EpisodeOutcome::Timeout => "timeout",
            EpisodeOutcome::Aborted(_) => "aborted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotLog {
    pub shot: Shot,
    pub score_before: i64,
    pub score_after: i64,
    /// Planner scores at the chosen angle, for the sim agent.
    pub predicted: Option<(i64, f64)>,
    pub settled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub level: String,
    pub agent: String,
    pub score: i64,
    pub birds_used: usize,
    pub pigs_remaining: usize,
    pub failed: bool,
    pub outcome: EpisodeOutcome,
    pub shots: Vec<ShotLog>,
}

/// Plays `truth` to the end with `agent`. The agent only ever sees
/// rasterized frames; `on_shot` receives each frame and choice.
pub fn play_episode(
    level: &str,
    mut truth: Scene,
    agent: &mut dyn Agent,
    cfg: &AgentConfig,
    mut on_shot: impl FnMut(usize, &PixelGrid, &Choice),
) -> EpisodeResult {
    let mut shots = Vec::new();
    let mut last_settled = true;
    let outcome = loop {
        if truth.alive_pigs() == 0 {
            break EpisodeOutcome::Won;
        }
        if truth.queue.is_empty() {
            break if last_settled { EpisodeOutcome::Lost } else { EpisodeOutcome::Timeout };
        }
        if shots.len() >= cfg.max_shots {
            break EpisodeOutcome::Timeout;
        }
        let grid = rasterize(&truth, cfg.width, cfg.height);
        let choice = match agent.decide(&grid) {
            Ok(c) => c,
            Err(e) => break EpisodeOutcome::Aborted(e.to_string()),
        };
        on_shot(shots.len(), &grid, &choice);
        let score_before = current_score(&truth);
        let dt = truth.physics.dt;
        let report = match execute_shot(&mut truth, choice.shot, dt, cfg.planner.horizon, |_, _| {}) {
            Ok(r) => r,
            Err(e) => break EpisodeOutcome::Aborted(e.to_string()),
        };
        truth.clear_missiles();
        last_settled = report.settled;
        shots.push(ShotLog {
            shot: choice.shot,
            score_before,
            score_after: current_score(&truth),
            predicted: choice.decision.as_ref().map(|d| (d.raw_score, d.robust_score)),
            settled: report.settled,
        });
    };
    let pigs_remaining = truth.alive_pigs();
    EpisodeResult {
        level: level.to_string(),
        agent: agent.name().to_string(),
        score: current_score(&truth),
        birds_used: shots.len(),
        pigs_remaining,
        failed: pigs_remaining > 0,
        outcome,
        shots,
    }
}

pub fn sim_agent_play(level: &str, truth: Scene, cfg: &AgentConfig) -> EpisodeResult {
    play_episode(level, truth, &mut SimAgent::new(cfg.clone()), cfg, |_, _, _| {})
}

pub fn naive_agent_play(level: &str, truth: Scene, cfg: &AgentConfig, seed: u64) -> EpisodeResult {
    play_episode(level, truth, &mut NaiveAgent::new(cfg.clone(), seed), cfg, |_, _, _| {})
}
