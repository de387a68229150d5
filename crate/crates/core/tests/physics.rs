mod common;

use birdsim::geometry::{CircleShape, OrientedRect, Point2, Shape, Vec2};
use birdsim::physics::{
    apply_radial_impulse, is_settled, linear_momentum, step, total_energy, BodyId, BodyKind, MaterialKind,
    PhysicsConfig,
};
use birdsim::planner::execute_shot;
use birdsim::world::{launch, state_hash, AbilityConfig, BirdType, Scene, ScoreConfig, Shot};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn open_scene(gravity: f64, physics: PhysicsConfig) -> Scene {
    let mut s = Scene::new(
        Vec2::new(0.0, gravity),
        Point2::new(0.0, 0.0),
        170.0,
        physics,
        AbilityConfig::default(),
        ScoreConfig::default(),
    );
    s.add_ground(0.0);
    s
}

fn circle(x: f64, y: f64, r: f64) -> Shape {
    Shape::Circle(CircleShape { center: Point2::new(x, y), radius: r })
}

fn rect(x: f64, y: f64, w: f64, h: f64, angle: f64) -> Shape {
    Shape::Rect(OrientedRect::new(Point2::new(x, y), w / 2.0, h / 2.0, angle))
}

fn activate(scene: &mut Scene, id: BodyId, v: Vec2) {
    scene.bodies[id].active = true;
    scene.bodies[id].velocity = v;
}

#[test]
fn free_fall_matches_the_semi_implicit_sum() {
    let mut scene = open_scene(-100.0, PhysicsConfig::default());
    let id = scene.add_body(circle(0.0, 1000.0, 5.0), MaterialKind::Wood, BodyKind::Block);
    activate(&mut scene, id, Vec2::ZERO);
    let (dt, n) = (0.01, 100u32);
    for _ in 0..n {
        step(&mut scene, dt).unwrap();
    }
    // Each step adds -g dt to v and then v dt to y: y_n = -g dt^2 n(n+1)/2.
    let expected = -100.0 * dt * dt * f64::from(n * (n + 1)) / 2.0;
    assert!((expected + 50.5).abs() < 1e-12);
    let dy = scene.bodies[id].center().y - 1000.0;
    assert!((dy - expected).abs() < 1e-9, "{dy}");
}

#[test]
fn equal_discs_exchange_velocities_in_an_elastic_hit() {
    let mut phys = PhysicsConfig::default();
    phys.materials.wood.restitution = 1.0;
    phys.materials.wood.friction = 0.0;
    let mut scene = open_scene(0.0, phys);
    let a = scene.add_body(circle(100.0, 100.0, 10.0), MaterialKind::Wood, BodyKind::Block);
    let b = scene.add_body(circle(125.0, 100.0, 10.0), MaterialKind::Wood, BodyKind::Block);
    activate(&mut scene, a, Vec2::new(60.0, 0.0));
    activate(&mut scene, b, Vec2::new(-30.0, 0.0));
    let mut hit = false;
    for _ in 0..60 {
        let ev = step(&mut scene, 1.0 / 60.0).unwrap();
        if !ev.collisions.is_empty() {
            hit = true;
            break;
        }
    }
    assert!(hit);
    let (va, vb) = (scene.bodies[a].velocity, scene.bodies[b].velocity);
    assert!((va - Vec2::new(-30.0, 0.0)).length() < 1e-9, "{va:?}");
    assert!((vb - Vec2::new(60.0, 0.0)).length() < 1e-9, "{vb:?}");
}

#[test]
fn frictionless_contacts_conserve_momentum() {
    let mut phys = PhysicsConfig::default();
    phys.materials.stone.friction = 0.0;
    phys.materials.ice.friction = 0.0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scene = open_scene(0.0, phys.clone());
        let a = scene.add_body(
            rect(200.0, 200.0, rng.gen_range(10.0..40.0), rng.gen_range(6.0..20.0), rng.gen_range(-1.5..1.5)),
            MaterialKind::Stone,
            BodyKind::Block,
        );
        let b = scene.add_body(
            circle(260.0, 200.0 + rng.gen_range(-5.0..5.0), rng.gen_range(4.0..12.0)),
            MaterialKind::Ice,
            BodyKind::Block,
        );
        activate(&mut scene, a, Vec2::new(rng.gen_range(0.0..40.0), rng.gen_range(-10.0..10.0)));
        activate(&mut scene, b, Vec2::new(-rng.gen_range(40.0..80.0), rng.gen_range(-2.0..2.0)));
        scene.bodies[a].angular_velocity = rng.gen_range(-2.0..2.0);
        let p0 = linear_momentum(&scene);
        let mut touched = false;
        for _ in 0..120 {
            let ev = step(&mut scene, 1.0 / 60.0).unwrap();
            touched |= !ev.collisions.is_empty();
            let p = linear_momentum(&scene);
            assert!((p - p0).length() <= 1e-9 * p0.length(), "seed {seed}: {p:?} vs {p0:?}");
        }
        assert!(touched, "seed {seed}: bodies never met");
    }
}

/// A pile of moving boxes and discs dropped over the ground.
fn collision_scene(seed: u64, gravity: f64, physics: PhysicsConfig) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scene = open_scene(gravity, physics);
    let mats = [MaterialKind::Wood, MaterialKind::Ice, MaterialKind::Stone, MaterialKind::Pig];
    for i in 0..8 {
        let (x, y) = (100.0 + 35.0 * i as f64, rng.gen_range(20.0..120.0));
        let shape = if rng.gen_bool(0.5) {
            circle(x, y, rng.gen_range(5.0..14.0))
        } else {
            rect(x, y, rng.gen_range(10.0..30.0), rng.gen_range(6.0..20.0), rng.gen_range(-1.5..1.5))
        };
        let id = scene.add_body(shape, mats[rng.gen_range(0..mats.len())], BodyKind::Block);
        activate(&mut scene, id, Vec2::new(rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..20.0)));
    }
    scene
}

fn assert_energy_never_grows(mut scene: Scene, seed: u64) {
    let e0 = total_energy(&scene);
    let mut prev = e0;
    let mut contacts = 0;
    for k in 0..300 {
        let ev = step(&mut scene, 1.0 / 60.0).unwrap();
        contacts += ev.collisions.len();
        let e = total_energy(&scene);
        assert!(e <= prev + 1e-6 * e0.abs(), "seed {seed} step {k}: {prev} -> {e}");
        prev = e;
    }
    assert!(contacts > 0);
}

/// Positional projection lifts sunken bodies and so adds potential energy;
/// the impulse solver on its own must never add any.
#[test]
fn energy_never_grows_without_position_projection() {
    for seed in 0..20 {
        let phys = PhysicsConfig { position_correction: 0.0, ..PhysicsConfig::default() };
        assert_energy_never_grows(collision_scene(seed, -50.0, phys), seed);
    }
}

#[test]
fn kinetic_energy_never_grows_in_zero_gravity() {
    for seed in 0..20 {
        assert_energy_never_grows(collision_scene(seed, 0.0, PhysicsConfig::default()), seed);
    }
}

#[test]
fn inactive_bodies_do_not_move_until_touched() {
    let mut scene = common::level("level02");
    let before = scene.clone();
    launch(&mut scene, &Shot::new(0.3)).unwrap();
    let mut was_active = vec![false; scene.bodies.len()];
    for _ in 0..900 {
        step(&mut scene, 1.0 / 60.0).unwrap();
        for (i, b) in scene.bodies.iter().enumerate() {
            if i >= before.bodies.len() {
                continue;
            }
            assert!(!(was_active[i] && !b.active), "body {i} went back to inactive");
            was_active[i] = b.active;
            if !b.active {
                assert_eq!(b.shape, before.bodies[i].shape);
                assert_eq!(b.velocity, before.bodies[i].velocity);
                assert_eq!(b.angular_velocity, before.bodies[i].angular_velocity);
            }
        }
    }
    assert!(was_active.iter().filter(|&&a| a).count() > 2, "the shot should disturb the house");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projectiles_do_not_tunnel_through_thin_walls(speed in 20.0..=400.0f64, phase in 0.0..1.0f64, dy in -20.0..20.0f64) {
        let mut scene = open_scene(0.0, PhysicsConfig::default());
        let wall = scene.add_body(rect(300.0, 200.0, 6.0, 80.0, 0.0), MaterialKind::Stone, BodyKind::Block);
        let dt = 1.0 / 60.0;
        // Start so the bird's first step ends `phase` of a step short of the wall.
        let start = 300.0 - 3.0 - 5.0 - speed * dt * (1.0 + phase);
        let bird = scene.add_body(circle(start, 200.0 + dy, 5.0), MaterialKind::Bird, BodyKind::Bird(BirdType::Blue));
        activate(&mut scene, bird, Vec2::new(speed, 0.0));
        let mut hit = false;
        for _ in 0..10 {
            let ev = step(&mut scene, dt).unwrap();
            hit |= ev.collisions.iter().any(|&(a, b, _)| (a, b) == (wall, bird));
        }
        prop_assert!(hit);
        prop_assert!(scene.bodies[bird].center().x < scene.bodies[wall].center().x);
    }
}

#[test]
fn blast_falls_off_linearly_with_distance() {
    let mut scene = open_scene(0.0, PhysicsConfig::default());
    let r = 40.0;
    let dirs = [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(-1.0, 0.0), Vec2::new(0.0, -1.0), Vec2::ZERO];
    let ids: Vec<BodyId> = [r / 4.0, r / 2.0, 3.0 * r / 4.0, r, 0.0]
        .iter()
        .zip(dirs)
        .map(|(&d, dir)| {
            let c = Point2::new(400.0, 200.0) + dir * d;
            scene.add_body(circle(c.x, c.y, 2.0), MaterialKind::Stone, BodyKind::Block)
        })
        .collect();
    let ev = apply_radial_impulse(&mut scene, Point2::new(400.0, 200.0), r, 300.0);
    let got = |id: BodyId| ev.blasted.iter().find(|b| b.0 == id).map(|b| b.1);
    let (j1, j2, j3) = (got(ids[0]).unwrap(), got(ids[1]).unwrap(), got(ids[2]).unwrap());
    assert!((j1 / j3 - 3.0).abs() < 1e-12 && (j2 / j3 - 2.0).abs() < 1e-12);
    assert_eq!(got(ids[3]), None, "the rim gets nothing");
    assert_eq!(scene.bodies[ids[3]].velocity, Vec2::ZERO);
    let up = scene.bodies[ids[4]].velocity;
    assert!(up.x == 0.0 && up.y > 0.0, "{up:?}");
    for (&id, dir) in ids[..3].iter().zip(dirs) {
        let v = scene.bodies[id].velocity;
        assert!(v.cross(dir).abs() < 1e-9 && v.dot(dir) > 0.0);
        assert!(scene.bodies[id].active);
    }
}

#[test]
fn settledness_follows_activity() {
    let mut scene = open_scene(-50.0, PhysicsConfig::default());
    let id = scene.add_body(circle(0.0, 300.0, 5.0), MaterialKind::Wood, BodyKind::Block);
    assert!(is_settled(&scene));
    activate(&mut scene, id, Vec2::ZERO);
    step(&mut scene, 1.0 / 60.0).unwrap();
    assert!(!is_settled(&scene));
}

#[test]
fn a_toppled_tower_comes_to_rest_within_the_horizon() {
    let mut scene = common::level("test/collapse");
    let report = execute_shot(&mut scene, Shot::new(0.35), 1.0 / 60.0, 15.0, |_, _| {}).unwrap();
    assert!(scene.bodies.iter().filter(|b| b.kind == BodyKind::Block).any(|b| b.active));
    assert!(report.settled, "still moving after {} steps", report.steps);
    assert!(report.steps < 900);
}

#[test]
fn identical_states_step_identically() {
    let run = || {
        let mut scene = common::level("level08");
        launch(&mut scene, &Shot::new(0.5)).unwrap();
        (0..600)
            .map(|_| {
                step(&mut scene, 1.0 / 60.0).unwrap();
                state_hash(&scene)
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn a_scene_without_ground_is_rejected() {
    let mut scene = open_scene(0.0, PhysicsConfig::default());
    scene.bodies.clear();
    assert!(step(&mut scene, 1.0 / 60.0).is_err());
    let mut scene = open_scene(0.0, PhysicsConfig::default());
    assert!(step(&mut scene, 0.0).is_err());
}
