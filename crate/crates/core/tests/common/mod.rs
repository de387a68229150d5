#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use birdsim::geometry::{CircleShape, OrientedRect, Point2, Shape};
use birdsim::physics::MaterialKind;
use birdsim::world::{load_level, Scene};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Also included by the cli crate's tests, hence the detour through `..`.
pub fn levels_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/levels")
}

pub fn level_text(name: &str) -> String {
    let path = levels_dir().join(format!("{name}.level"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn level(name: &str) -> Scene {
    load_level(&level_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The nine benchmark levels, in order.
pub fn bundled() -> Vec<(String, Scene)> {
    (1..=9).map(|i| format!("level{i:02}")).map(|n| (n.clone(), level(&n))).collect()
}

/// Smallest area of an enclosing rectangle over angles `0, step, 2 step, ..`
/// up to a quarter turn.
pub fn sweep_min_area(points: &[Point2], step_deg: f64) -> f64 {
    let n = (90.0 / step_deg).round() as usize;
    (0..=n)
        .map(|i| {
            let a = (i as f64 * step_deg).to_radians();
            let (c, s) = (a.cos(), a.sin());
            let (mut lu, mut hu, mut lv, mut hv) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for p in points {
                let u = p.x * c + p.y * s;
                let v = -p.x * s + p.y * c;
                lu = lu.min(u);
                hu = hu.max(u);
                lv = lv.min(v);
                hv = hv.max(v);
            }
            (hu - lu) * (hv - lv)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point2> {
    let (cx, cy) = (rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
    let (sx, sy) = (rng.gen_range(1.0..40.0), rng.gen_range(1.0..40.0));
    let rot: f64 = rng.gen_range(0.0..PI);
    (0..n)
        .map(|_| {
            let (x, y) = (rng.gen_range(-sx..sx), rng.gen_range(-sy..sy));
            Point2::new(cx + x * rot.cos() - y * rot.sin(), cy + x * rot.sin() + y * rot.cos())
        })
        .collect()
}

/// Block sizes used by the scene generator. No two are within the
/// equalization tolerance of each other.
pub const SIZES: [(f64, f64); 5] = [(40.0, 20.0), (60.0, 12.0), (24.0, 24.0), (50.0, 30.0), (16.0, 16.0)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truth {
    Block(MaterialKind, Shape),
    Pig(CircleShape),
}

impl Truth {
    pub fn shape(&self) -> Shape {
        match *self {
            Truth::Block(_, s) => s,
            Truth::Pig(c) => Shape::Circle(c),
        }
    }
}

/// A scene of 6 to 12 non-overlapping objects at least 10 px across, each
/// clear of the others by at least 3 px.
pub fn generated_scene(seed: u64) -> (Scene, Vec<Truth>) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = rng.gen_range(6..=12);
    let mut placed: Vec<(Truth, (Point2, Point2))> = Vec::new();
    let mut tries = 0;
    while placed.len() < target && tries < 2000 {
        tries += 1;
        let center = Point2::new(rng.gen_range(230.0..800.0), rng.gen_range(60.0..440.0));
        let roll: f64 = if placed.is_empty() { 0.0 } else { rng.gen() };
        let truth = if roll < 0.2 {
            Truth::Pig(CircleShape { center, radius: rng.gen_range(6.0..14.0) })
        } else {
            let mat = MaterialKind::BLOCKS[rng.gen_range(0..3)];
            if roll < 0.3 {
                Truth::Block(mat, Shape::Circle(CircleShape { center, radius: rng.gen_range(6.0..14.0) }))
            } else {
                let (w, h) = SIZES[rng.gen_range(0..SIZES.len())];
                let angle = if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(-PI / 2.0..PI / 2.0) };
                Truth::Block(mat, Shape::Rect(OrientedRect::new(center, w / 2.0, h / 2.0, angle)))
            }
        };
        let (lo, hi) = truth.shape().aabb();
        let clear = |a: &(Point2, Point2)| {
            hi.x + 3.0 < a.0.x || a.1.x + 3.0 < lo.x || hi.y + 3.0 < a.0.y || a.1.y + 3.0 < lo.y
        };
        if lo.y < 44.0 || hi.y > 476.0 || hi.x > 836.0 || !placed.iter().all(|(_, b)| clear(b)) {
            continue;
        }
        placed.push((truth, (lo, hi)));
    }
    let truths: Vec<Truth> = placed.into_iter().map(|(t, _)| t).collect();
    let mut text = String::from("gravity 0 -50\nslingshot 140 70\nspeed 170\nground 40\nbird red\nbird yellow\n");
    for t in &truths {
        let line = match *t {
            Truth::Block(m, Shape::Rect(r)) => format!(
                "block {} rect {} {} {} {} {}",
                m.name(),
                r.center.x,
                r.center.y,
                2.0 * r.half_w,
                2.0 * r.half_h,
                r.angle.to_degrees()
            ),
            Truth::Block(m, Shape::Circle(c)) => format!("block {} circle {} {} {}", m.name(), c.center.x, c.center.y, c.radius),
            Truth::Pig(c) => format!("pig {} {} {}", c.center.x, c.center.y, c.radius),
        };
        text.push_str(&line);
        text.push('\n');
    }
    (load_level(&text).unwrap(), truths)
}

/// Distance between two angles modulo a quarter turn.
pub fn angle_err_quarter(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI / 2.0);
    d.min(PI / 2.0 - d)
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct RoundTrip {
    pub objects: usize,
    pub detected: usize,
    pub kind_correct: usize,
    pub max_center_err: f64,
    pub max_angle_err: f64,
    pub max_dim_err: f64,
}

impl RoundTrip {
    pub fn detection_rate(&self) -> f64 {
        self.detected as f64 / self.objects as f64
    }

    pub fn kind_accuracy(&self) -> f64 {
        self.kind_correct as f64 / self.detected.max(1) as f64
    }
}

/// Renders each generated scene, perceives it and matches every true object
/// to the nearest reconstruction of the same class within 6 px.
pub fn round_trip(seeds: std::ops::Range<u64>) -> RoundTrip {
    use birdsim::perception::{perceive, ObjectKind, PerceptionConfig};
    use birdsim::render::{rasterize, DEFAULT_HEIGHT, DEFAULT_WIDTH};

    let mut rt = RoundTrip::default();
    for seed in seeds {
        let (scene, truths) = generated_scene(seed);
        let grid = rasterize(&scene, DEFAULT_WIDTH, DEFAULT_HEIGHT);
        let rec = perceive(&grid, &PerceptionConfig::default()).unwrap();
        for t in &truths {
            rt.objects += 1;
            let (kind, shape) = match *t {
                Truth::Block(m, s) => (ObjectKind::Block(m), s),
                Truth::Pig(c) => (ObjectKind::Pig, Shape::Circle(c)),
            };
            let found = rec
                .objects
                .iter()
                .filter(|o| o.kind == kind)
                .map(|o| ((o.shape.center() - shape.center()).length(), o))
                .filter(|(d, _)| *d <= 6.0)
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let Some((d, obj)) = found else { continue };
            rt.detected += 1;
            rt.max_center_err = rt.max_center_err.max(d);
            match (shape, obj.shape) {
                (Shape::Rect(a), Shape::Rect(b)) => {
                    rt.kind_correct += 1;
                    rt.max_angle_err = rt.max_angle_err.max(angle_err_quarter(a.angle, b.angle));
                    let dw = (2.0 * (a.half_w - b.half_w)).abs();
                    let dh = (2.0 * (a.half_h - b.half_h)).abs();
                    rt.max_dim_err = rt.max_dim_err.max(dw).max(dh);
                }
                (Shape::Circle(a), Shape::Circle(b)) => {
                    rt.kind_correct += 1;
                    rt.max_dim_err = rt.max_dim_err.max((2.0 * (a.radius - b.radius)).abs());
                }
                _ => {}
            }
        }
    }
    rt
}
