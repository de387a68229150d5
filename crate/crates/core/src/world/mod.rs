//! Game domain model: scenes, the bird queue, launching, tap abilities and
//! scoring.

mod ballistics;
mod level;

pub use ballistics::{flight_time_to_ground, solve_launch_angles, trajectory_point, BallisticsError};
pub use level::{load_level, load_level_with, LevelError};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::geometry::{CircleShape, Point2, Shape, Vec2};
use crate::physics::{self, Body, BodyId, BodyKind, MaterialKind, PhysicsConfig, StepEvents};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("no birds left in the queue")]
    NoBirdsLeft,
    #[error("a bird is already in flight")]
    BirdInFlight,
    #[error("no bird in flight to tap")]
    InvalidTap,
    #[error("shot angle {0} outside [0, pi/2]")]
    InvalidAngle(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BirdType {
    Red,
    Yellow,
    Blue,
    Black,
    White,
}

impl BirdType {
    pub const ALL: [BirdType; 5] = [BirdType::Red, BirdType::Yellow, BirdType::Blue, BirdType::Black, BirdType::White];

    pub fn name(self) -> &'static str {
        match self {
            BirdType::Red => "red",
            BirdType::Yellow => "yellow",
            BirdType::Blue => "blue",
            BirdType::Black => "black",
            BirdType::White => "white",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        BirdType::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn radius(self) -> f64 {
        match self {
            BirdType::Red | BirdType::Yellow => 8.0,
            BirdType::Blue => 5.0,
            BirdType::Black | BirdType::White => 10.0,
        }
    }

    /// The tap ability of this bird type; red birds have none.
    pub fn ability(self, cfg: &AbilityConfig) -> Option<Ability> {
        match self {
            BirdType::Red => None,
            BirdType::Yellow => Some(Ability::Boost { factor: cfg.boost_factor }),
            BirdType::Blue => Some(Ability::Split { count: cfg.split_count, spread: cfg.split_spread }),
            BirdType::Black => Some(Ability::Blast { radius: cfg.blast_radius, strength: cfg.blast_strength }),
            BirdType::White => Some(Ability::Egg { speed: cfg.egg_speed, kick: cfg.egg_kick }),
        }
    }

    pub fn has_ability(self) -> bool {
        self != BirdType::Red
    }
}

impl fmt::Display for BirdType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ability {
    Boost { factor: f64 },
    Split { count: usize, spread: f64 },
    Blast { radius: f64, strength: f64 },
    Egg { speed: f64, kick: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbilityConfig {
    pub boost_factor: f64,
    pub split_count: usize,
    pub split_spread: f64,
    pub blast_radius: f64,
    pub blast_strength: f64,
    pub egg_speed: f64,
    pub egg_kick: f64,
    pub egg_radius: f64,
}

impl Default for AbilityConfig {
    fn default() -> Self {
        Self {
            boost_factor: 1.6,
            split_count: 3,
            split_spread: 0.15,
            blast_radius: 40.0,
            blast_strength: 300.0,
            egg_speed: 300.0,
            egg_kick: 200.0,
            egg_radius: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreConfig {
    pub pig_points: i64,
    pub block_points: BTreeMap<MaterialKind, i64>,
    pub unused_bird_points: i64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            pig_points: 5000,
            block_points: MaterialKind::BLOCKS.iter().map(|&m| (m, 500)).collect(),
            unused_bird_points: 10000,
        }
    }
}

impl ScoreConfig {
    pub fn block(&self, material: MaterialKind) -> i64 {
        self.block_points.get(&material).copied().unwrap_or(0)
    }

    /// Points awarded when this body is destroyed.
    pub fn points_for(&self, body: &Body) -> i64 {
        match body.kind {
            BodyKind::Pig => self.pig_points,
            BodyKind::Block => self.block(body.material.kind),
            _ => 0,
        }
    }
}

/// A shot: launch angle above the horizontal and optional tap time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    pub angle: f64,
    pub tap_time: Option<f64>,
}

impl Shot {
    pub fn new(angle: f64) -> Self {
        Self { angle, tap_time: None }
    }

    pub fn with_tap(angle: f64, tap_time: f64) -> Self {
        Self { angle, tap_time: Some(tap_time) }
    }
}

/// The bird currently launched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flight {
    pub bird: BodyId,
    pub bird_type: BirdType,
    /// Cleared on the bird's first contact.
    pub airborne: bool,
    pub tapped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub bodies: Vec<Body>,
    pub gravity: Vec2,
    pub slingshot: Point2,
    pub launch_speed: f64,
    /// Bodies of the birds waiting beside the slingshot; the head is next.
    pub queue: Vec<BodyId>,
    pub scoring: ScoreConfig,
    pub abilities: AbilityConfig,
    pub physics: PhysicsConfig,
    pub time: f64,
    pub steps: u64,
    pub quiet_frames: u32,
    /// Body poses when the current run of quiet frames began.
    pub rest_anchor: Vec<(Point2, Option<f64>)>,
    pub flight: Option<Flight>,
}

impl Scene {
    pub fn new(
        gravity: Vec2,
        slingshot: Point2,
        launch_speed: f64,
        physics: PhysicsConfig,
        abilities: AbilityConfig,
        scoring: ScoreConfig,
    ) -> Self {
        Self {
            bodies: Vec::new(),
            gravity,
            slingshot,
            launch_speed,
            queue: Vec::new(),
            scoring,
            abilities,
            physics,
            time: 0.0,
            steps: 0,
            quiet_frames: 0,
            rest_anchor: Vec::new(),
            flight: None,
        }
    }

    /// Appends a body made of `material`, assigning the next id.
    pub fn add_body(&mut self, shape: Shape, material: MaterialKind, kind: BodyKind) -> BodyId {
        let id = self.bodies.len();
        let mut mat = *self.physics.materials.get(material);
        mat.break_score = match kind {
            BodyKind::Pig => self.scoring.pig_points,
            BodyKind::Block => self.scoring.block(material),
            _ => 0,
        };
        self.bodies.push(Body::new(id, shape, mat, kind));
        id
    }

    /// Adds the ground as a wide static slab whose top surface is at `top`.
    pub fn add_ground(&mut self, top: f64) -> BodyId {
        let slab = crate::geometry::OrientedRect::new(Point2::new(0.0, top - 1000.0), 100_000.0, 1000.0, 0.0);
        self.add_body(Shape::Rect(slab), MaterialKind::Ground, BodyKind::Ground)
    }

    /// Adds a waiting bird at the back of the queue, resting on the ground
    /// at horizontal position `x`.
    pub fn add_queued_bird(&mut self, bird: BirdType, x: f64) -> BodyId {
        let center = Point2::new(x, self.ground_top() + bird.radius());
        let shape = Shape::Circle(CircleShape { center, radius: bird.radius() });
        let id = self.add_body(shape, MaterialKind::Bird, BodyKind::Bird(bird));
        self.queue.push(id);
        id
    }

    /// Bird types in queue order.
    pub fn bird_queue(&self) -> Vec<BirdType> {
        self.queue
            .iter()
            .filter_map(|&id| match self.bodies[id].kind {
                BodyKind::Bird(t) => Some(t),
                _ => None,
            })
            .collect()
    }

    pub fn ground(&self) -> Option<&Body> {
        self.bodies.iter().find(|b| b.is_ground())
    }

    /// Height of the ground surface.
    pub fn ground_top(&self) -> f64 {
        match self.ground().map(|g| g.shape) {
            Some(Shape::Rect(r)) => r.center.y + r.half_h,
            _ => 0.0,
        }
    }

    pub fn pigs(&self) -> impl Iterator<Item = &Body> {
        self.bodies.iter().filter(|b| b.kind == BodyKind::Pig)
    }

    pub fn alive_pigs(&self) -> usize {
        self.pigs().filter(|b| b.alive).count()
    }

    pub fn dead_pigs(&self) -> usize {
        self.pigs().filter(|b| !b.alive).count()
    }

    /// Steps the physics with the configured time step.
    pub fn step(&mut self) -> Result<StepEvents, physics::PhysicsError> {
        let dt = self.physics.dt;
        physics::step(self, dt)
    }

    pub fn is_settled(&self) -> bool {
        physics::is_settled(self)
    }

    /// Removes launched birds and their spawn without scoring them.
    pub fn clear_missiles(&mut self) {
        for b in self.bodies.iter_mut() {
            if b.kind.is_missile() && !self.queue.contains(&b.id) {
                b.alive = false;
            }
        }
        self.flight = None;
    }
}

/// Puts the head of the queue on the slingshot with velocity
/// `launch_speed * (cos angle, sin angle)`.
pub fn launch(scene: &mut Scene, shot: &Shot) -> Result<BodyId, WorldError> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&shot.angle) {
        return Err(WorldError::InvalidAngle(shot.angle));
    }
    if scene.flight.is_some_and(|f| scene.bodies[f.bird].alive) {
        return Err(WorldError::BirdInFlight);
    }
    if scene.queue.is_empty() {
        return Err(WorldError::NoBirdsLeft);
    }
    let id = scene.queue.remove(0);
    let body = &mut scene.bodies[id];
    let BodyKind::Bird(bird_type) = body.kind else {
        unreachable!("queue holds bird bodies only");
    };
    body.shape.set_center(scene.slingshot);
    body.active = true;
    body.angular_velocity = 0.0;
    body.velocity = Vec2::from_angle(shot.angle) * scene.launch_speed;
    scene.flight = Some(Flight { bird: id, bird_type, airborne: true, tapped: false });
    scene.quiet_frames = 0;
    Ok(id)
}

/// Triggers the in-flight bird's ability.
pub fn tap(scene: &mut Scene) -> Result<StepEvents, WorldError> {
    let flight = match scene.flight {
        Some(f) if f.airborne && !f.tapped && scene.bodies[f.bird].alive => f,
        _ => return Err(WorldError::InvalidTap),
    };
    if let Some(f) = scene.flight.as_mut() {
        f.tapped = true;
    }
    let mut events = StepEvents::default();
    let Some(ability) = flight.bird_type.ability(&scene.abilities) else {
        return Ok(events);
    };
    let bird = scene.bodies[flight.bird].clone();
    let pos = bird.center();
    match ability {
        Ability::Boost { factor } => {
            scene.bodies[flight.bird].velocity = bird.velocity * factor;
        }
        Ability::Split { count, spread } => {
            scene.bodies[flight.bird].alive = false;
            let speed = bird.velocity.length();
            let heading = bird.velocity.y.atan2(bird.velocity.x);
            let mid = (count as f64 - 1.0) / 2.0;
            for i in 0..count {
                let angle = heading + (i as f64 - mid) * spread;
                let id = scene.add_body(bird.shape, MaterialKind::Bird, bird.kind);
                let child = &mut scene.bodies[id];
                child.active = true;
                child.velocity = Vec2::from_angle(angle) * speed;
                events.spawned.push(id);
            }
            if let (Some(f), Some(&first)) = (scene.flight.as_mut(), events.spawned.get(count / 2)) {
                f.bird = first;
            }
        }
        Ability::Blast { radius, strength } => {
            scene.bodies[flight.bird].alive = false;
            events = physics::apply_radial_impulse(scene, pos, radius, strength);
        }
        Ability::Egg { speed, kick } => {
            let egg = Shape::Circle(CircleShape { center: pos, radius: scene.abilities.egg_radius });
            let id = scene.add_body(egg, MaterialKind::Egg, BodyKind::Projectile);
            scene.bodies[id].active = true;
            scene.bodies[id].velocity = Vec2::new(0.0, -speed);
            events.spawned.push(id);
            let b = &mut scene.bodies[flight.bird];
            b.velocity = b.velocity + Vec2::new(0.0, kick);
        }
    }
    scene.quiet_frames = 0;
    Ok(events)
}

/// Points for destroyed pigs and blocks, plus the unused-bird bonus once
/// every pig is dead.
pub fn current_score(scene: &Scene) -> i64 {
    let destroyed: i64 = scene
        .bodies
        .iter()
        .filter(|b| !b.alive)
        .map(|b| scene.scoring.points_for(b))
        .sum();
    let pigs_total = scene.pigs().count();
    let bonus = if pigs_total > 0 && scene.alive_pigs() == 0 {
        scene.scoring.unused_bird_points * scene.queue.len() as i64
    } else {
        0
    };
    destroyed + bonus
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a accumulator used for trace hashes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceHasher(u64);

impl Default for TraceHasher {
    fn default() -> Self {
        Self(FNV_OFFSET)
    }
}

impl TraceHasher {
    pub fn write_u64(&mut self, v: u64) {
        for byte in v.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn write_f64(&mut self, v: f64) {
        self.write_u64(v.to_bits());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }

    /// Folds every body's kinematic and damage state into the hash.
    pub fn write_scene(&mut self, scene: &Scene) {
        self.write_u64(scene.bodies.len() as u64);
        for b in &scene.bodies {
            let c = b.center();
            self.write_f64(c.x);
            self.write_f64(c.y);
            if let Shape::Rect(r) = b.shape {
                self.write_f64(r.angle);
            }
            self.write_f64(b.velocity.x);
            self.write_f64(b.velocity.y);
            self.write_f64(b.angular_velocity);
            self.write_f64(b.damage);
            self.write_u64(u64::from(b.active) | (u64::from(b.alive) << 1));
        }
    }
}

/// Hash of the full body state of a scene.
pub fn state_hash(scene: &Scene) -> u64 {
    let mut h = TraceHasher::default();
    h.write_scene(scene);
    h.finish()
}
