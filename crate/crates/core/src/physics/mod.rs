//! Deterministic fixed-timestep rigid-body engine.
//!
//! Every body starts inactive and stays exactly where it is until it touches
//! an already active body. The launched bird is the first active body, so a
//! scene is stable until something hits it.

mod body;
mod collide;

pub use body::{Body, BodyId, BodyKind, Material, MaterialKind, MaterialTable};
pub use collide::{collide, Contact, Manifold};

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::geometry::{cross_sv, Point2, Shape, Vec2};
use crate::world::Scene;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("physics contract violation: {0}")]
    ContractViolation(String),
}

/// Engine constants. Defaults are tuned for 1 world unit = 1 pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsConfig {
    pub dt: f64,
    pub solver_passes: usize,
    /// Fraction of penetration removed by positional projection each step.
    pub position_correction: f64,
    /// Approach speeds below this bounce with zero restitution.
    pub restitution_threshold: f64,
    pub v_sleep: f64,
    pub w_sleep: f64,
    pub sleep_frames: u32,
    /// Per-second decay of spin for circles in contact.
    pub rolling_resistance: f64,
    /// Damage per unit of blast impulse.
    pub blast_damage_factor: f64,
    pub materials: MaterialTable,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            dt: 1.0 / 60.0,
            solver_passes: 4,
            position_correction: 0.8,
            restitution_threshold: 1.0,
            v_sleep: 0.5,
            w_sleep: 0.05,
            sleep_frames: 30,
            rolling_resistance: 2.0,
            blast_damage_factor: 1.0,
            materials: MaterialTable::default(),
        }
    }
}

/// What happened during one step (or one ability trigger).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepEvents {
    /// `(a, b, total normal impulse)` per touching pair.
    pub collisions: Vec<(BodyId, BodyId, f64)>,
    pub destroyed: Vec<BodyId>,
    pub activated: Vec<BodyId>,
    /// `(body, impulse magnitude)` from explosions.
    pub blasted: Vec<(BodyId, f64)>,
    pub spawned: Vec<BodyId>,
}

impl StepEvents {
    pub fn is_empty(&self) -> bool {
        self.collisions.is_empty()
            && self.destroyed.is_empty()
            && self.activated.is_empty()
            && self.blasted.is_empty()
            && self.spawned.is_empty()
    }

    pub fn merge(&mut self, other: StepEvents) {
        self.collisions.extend(other.collisions);
        self.destroyed.extend(other.destroyed);
        self.activated.extend(other.activated);
        self.blasted.extend(other.blasted);
        self.spawned.extend(other.spawned);
    }
}

struct PairManifold {
    a: BodyId,
    b: BodyId,
    m: Manifold,
    normal_impulse: f64,
}

fn pair_mut(bodies: &mut [Body], i: usize, j: usize) -> (&mut Body, &mut Body) {
    debug_assert!(i < j);
    let (lo, hi) = bodies.split_at_mut(j);
    (&mut lo[i], &mut hi[0])
}

fn check_scene(scene: &Scene) -> Result<(), PhysicsError> {
    let grounds = scene.bodies.iter().filter(|b| b.is_ground()).count();
    if grounds != 1 {
        return Err(PhysicsError::ContractViolation(format!(
            "scene must have exactly one ground body, found {grounds}"
        )));
    }
    if let Some((i, b)) = scene.bodies.iter().enumerate().find(|(i, b)| b.id != *i) {
        return Err(PhysicsError::ContractViolation(format!(
            "body at index {i} carries id {}",
            b.id
        )));
    }
    Ok(())
}

fn detect(bodies: &[Body]) -> Vec<PairManifold> {
    let mut out = Vec::new();
    for i in 0..bodies.len() {
        let a = &bodies[i];
        if !a.alive {
            continue;
        }
        for b in &bodies[i + 1..] {
            if !b.alive || !(a.active || b.active) {
                continue;
            }
            if a.kind.is_missile() && b.kind.is_missile() {
                continue;
            }
            if let Some(m) = collide(&a.shape, &b.shape) {
                out.push(PairManifold { a: a.id, b: b.id, m, normal_impulse: 0.0 });
            }
        }
    }
    out
}

/// Sequential impulses. Each application only ever removes approach or
/// sliding velocity, so no pass can add kinetic energy.
fn solve_velocities(bodies: &mut [Body], pairs: &mut [PairManifold], cfg: &PhysicsConfig) {
    for _ in 0..cfg.solver_passes {
        for pair in pairs.iter_mut() {
            let (a, b) = pair_mut(bodies, pair.a, pair.b);
            let n = pair.m.normal;
            let e = a.material.restitution.min(b.material.restitution);
            let mu = (a.material.friction * b.material.friction).sqrt();
            let (ima, imb) = (a.inv_mass(), b.inv_mass());
            let (iia, iib) = (a.inv_inertia(), b.inv_inertia());
            for &(p, _) in pair.m.points() {
                let ra = p - a.center();
                let rb = p - b.center();
                let rel = |a: &Body, b: &Body| {
                    (b.velocity + cross_sv(b.angular_velocity, rb))
                        - (a.velocity + cross_sv(a.angular_velocity, ra))
                };
                let vrel = rel(a, b);
                let vn = vrel.dot(n);
                if vn >= 0.0 {
                    continue;
                }
                let (ran, rbn) = (ra.cross(n), rb.cross(n));
                let k = ima + imb + ran * ran * iia + rbn * rbn * iib;
                let bounce = if -vn > cfg.restitution_threshold { e } else { 0.0 };
                let jn = -(1.0 + bounce) * vn / k;
                a.apply_impulse(-(n * jn), p);
                b.apply_impulse(n * jn, p);
                pair.normal_impulse += jn;

                let vrel = rel(a, b);
                let vt_vec = vrel - n * vrel.dot(n);
                let vt_len = vt_vec.length();
                if vt_len <= 1e-12 || mu == 0.0 {
                    continue;
                }
                let t = vt_vec * (1.0 / vt_len);
                let (rat, rbt) = (ra.cross(t), rb.cross(t));
                let kt = ima + imb + rat * rat * iia + rbt * rbt * iib;
                let jt = (vt_len / kt).min(mu * jn);
                a.apply_impulse(t * jt, p);
                b.apply_impulse(-(t * jt), p);
            }
        }
    }
}

fn project_positions(bodies: &mut [Body], pairs: &[PairManifold], cfg: &PhysicsConfig) {
    for pair in pairs {
        let (a, b) = pair_mut(bodies, pair.a, pair.b);
        let pen = pair.m.max_penetration();
        let (ima, imb) = (a.inv_mass(), b.inv_mass());
        if pen <= 0.0 || ima + imb == 0.0 {
            continue;
        }
        let corr = pair.m.normal * (cfg.position_correction * pen / (ima + imb));
        if a.is_dynamic() {
            a.shape.set_center(a.center() - corr * ima);
        }
        if b.is_dynamic() {
            b.shape.set_center(b.center() + corr * imb);
        }
    }
}

fn integrate(body: &mut Body, gravity: Vec2, dt: f64) {
    body.velocity = body.velocity + gravity * dt;
    body.shape.set_center(body.center() + body.velocity * dt);
    if let Shape::Rect(r) = &mut body.shape {
        r.angle = crate::geometry::canonical_angle(r.angle + body.angular_velocity * dt);
    }
}

/// Advances the scene by `dt` seconds.
///
/// Phases, in fixed order: integrate active bodies; detect contacts;
/// activate inactive bodies touching active ones; resolve contacts; apply
/// damage; remove destroyed bodies.
pub fn step(scene: &mut Scene, dt: f64) -> Result<StepEvents, PhysicsError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PhysicsError::ContractViolation(format!("invalid time step {dt}")));
    }
    check_scene(scene)?;
    let cfg = scene.physics.clone();
    let gravity = scene.gravity;
    let mut events = StepEvents::default();
    if scene.quiet_frames == 0 || scene.rest_anchor.len() != scene.bodies.len() {
        scene.quiet_frames = 0;
        scene.rest_anchor = scene.bodies.iter().map(pose).collect();
    }

    for body in scene.bodies.iter_mut().filter(|b| b.is_dynamic()) {
        integrate(body, gravity, dt);
    }

    let mut pairs = detect(&scene.bodies);

    for pair in &pairs {
        let (a, b) = pair_mut(&mut scene.bodies, pair.a, pair.b);
        if a.active && !b.active && !b.is_ground() {
            b.active = true;
            events.activated.push(b.id);
        } else if b.active && !a.active && !a.is_ground() {
            a.active = true;
            events.activated.push(a.id);
        }
    }
    events.activated.sort_unstable();
    events.activated.dedup();

    if let Some(flight) = scene.flight.as_mut() {
        if pairs.iter().any(|p| p.a == flight.bird || p.b == flight.bird) {
            flight.airborne = false;
        }
    }

    solve_velocities(&mut scene.bodies, &mut pairs, &cfg);
    project_positions(&mut scene.bodies, &pairs, &cfg);

    let mut touching = vec![false; scene.bodies.len()];
    for pair in &pairs {
        touching[pair.a] = true;
        touching[pair.b] = true;
        if pair.normal_impulse > 0.0 {
            events.collisions.push((pair.a, pair.b, pair.normal_impulse));
        }
        for id in [pair.a, pair.b] {
            let body = &mut scene.bodies[id];
            let excess = pair.normal_impulse - body.material.damage_threshold;
            if body.alive && body.add_damage(excess) {
                body.alive = false;
                events.destroyed.push(id);
            }
        }
    }

    let spin_keep = (1.0 - cfg.rolling_resistance * dt).max(0.0);
    for body in scene.bodies.iter_mut() {
        if touching[body.id] && body.is_dynamic() && matches!(body.shape, Shape::Circle(_)) {
            body.angular_velocity *= spin_keep;
        }
    }

    scene.time += dt;
    scene.steps += 1;
    // Judged on mean speed since the quiet run began: deep stacks keep a
    // residual solver velocity that the projection cancels, with an
    // occasional hundredth-of-a-pixel slip.
    let elapsed = f64::from(scene.quiet_frames + 1) * dt;
    let quiet = scene.bodies.iter().filter(|b| b.is_dynamic()).all(|b| {
        let (p0, a0) = scene.rest_anchor[b.id];
        let (p1, a1) = pose(b);
        let spin = match (a0, a1) {
            (Some(a0), Some(a1)) => ((a1 - a0 + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2).abs() / elapsed,
            _ => b.angular_velocity.abs(),
        };
        (p1 - p0).length() / elapsed < cfg.v_sleep && spin < cfg.w_sleep
    });
    scene.quiet_frames = if quiet { scene.quiet_frames.saturating_add(1) } else { 0 };
    Ok(events)
}

fn pose(b: &Body) -> (Point2, Option<f64>) {
    match b.shape {
        Shape::Rect(r) => (r.center, Some(r.angle)),
        Shape::Circle(c) => (c.center, None),
    }
}

/// True when no body is active, or all active bodies have stayed below the
/// sleep thresholds for `sleep_frames` consecutive steps, speed being
/// measured as distance from where the run began over elapsed time.
pub fn is_settled(scene: &Scene) -> bool {
    !scene.bodies.iter().any(Body::is_dynamic) || scene.quiet_frames >= scene.physics.sleep_frames
}

/// Explosion: every alive non-ground body whose center lies within `radius`
/// receives an outward impulse `strength * (1 - d / radius)`, is activated
/// and takes damage in proportion to the impulse. A body exactly at the
/// center is pushed straight up.
pub fn apply_radial_impulse(scene: &mut Scene, center: Point2, radius: f64, strength: f64) -> StepEvents {
    let mut events = StepEvents::default();
    let factor = scene.physics.blast_damage_factor;
    for body in scene.bodies.iter_mut() {
        if !body.alive || body.is_ground() {
            continue;
        }
        let offset = body.center() - center;
        let d = offset.length();
        if d >= radius {
            continue;
        }
        let dir = if d > 0.0 { offset * (1.0 / d) } else { Vec2::new(0.0, 1.0) };
        let magnitude = strength * (1.0 - d / radius);
        if !body.active {
            body.active = true;
            events.activated.push(body.id);
        }
        body.velocity = body.velocity + dir * (magnitude * body.inv_mass());
        events.blasted.push((body.id, magnitude));
        if body.add_damage(magnitude * factor) {
            body.alive = false;
            events.destroyed.push(body.id);
        }
    }
    scene.quiet_frames = 0;
    events
}

/// Kinetic plus gravitational potential energy of all alive non-ground
/// bodies.
pub fn total_energy(scene: &Scene) -> f64 {
    scene
        .bodies
        .iter()
        .filter(|b| b.alive && !b.is_ground())
        .map(|b| b.kinetic_energy() - b.mass() * scene.gravity.dot(b.center()))
        .sum()
}

pub fn linear_momentum(scene: &Scene) -> Vec2 {
    scene
        .bodies
        .iter()
        .filter(|b| b.is_dynamic())
        .fold(Vec2::ZERO, |acc, b| acc + b.velocity * b.mass())
}

/// All contact points in the current configuration, in pair order.
pub fn detect_contacts(scene: &Scene) -> Vec<Contact> {
    detect(&scene.bodies)
        .into_iter()
        .flat_map(|p| {
            p.m.points()
                .iter()
                .map(|&(point, penetration)| Contact {
                    body_a: p.a,
                    body_b: p.b,
                    point,
                    normal: p.m.normal,
                    penetration,
                })
                .collect::<Vec<_>>()
        })
        .collect()
}
