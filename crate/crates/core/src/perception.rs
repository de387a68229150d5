//! Rebuilds a simulatable scene from a class map: connected components,
//! convex hulls, minimum-area rectangles, circle detection and equalization
//! of similar blocks.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{
    classify_shape, convex_hull, equalize_dimensions, flood_fill_components, min_area_rect,
    CircleShape, GeometryConfig, Hull, OrientedRect, PixelSet, Point2, Shape, ShapeKind, Vec2,
};
use crate::physics::{BodyKind, MaterialKind, PhysicsConfig};
use crate::render::{ClassKind, Palette, PixelGrid, RgbImage, SLINGSHOT_GAP};
use crate::world::{AbilityConfig, BirdType, Scene, ScoreConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerceptionError {
    #[error("empty class map")]
    EmptyGrid,
    #[error("no slingshot visible")]
    NoSlingshot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionConfig {
    pub geometry: GeometryConfig,
    /// Components with fewer pixels are treated as noise.
    pub min_pixels: usize,
    /// Relative tolerance for snapping similar blocks to a common size.
    pub equalize_tol: f64,
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        Self { geometry: GeometryConfig::default(), min_pixels: 6, equalize_tol: 0.08 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    Block(MaterialKind),
    Pig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedObject {
    pub kind: ObjectKind,
    pub shape: Shape,
    /// Hull of the component's pixel centers, kept for diagnostics.
    pub hull: Hull,
    pub pixel_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedScene {
    pub width: u32,
    pub height: u32,
    pub objects: Vec<ReconstructedObject>,
    pub slingshot: Point2,
    pub ground_top: f64,
    /// Waiting birds, next first, with their horizontal positions.
    pub birds: Vec<(BirdType, f64)>,
    pub notes: Vec<String>,
}

impl ReconstructedScene {
    pub fn bird_queue(&self) -> Vec<BirdType> {
        self.birds.iter().map(|&(b, _)| b).collect()
    }

    pub fn pig_count(&self) -> usize {
        self.objects.iter().filter(|o| o.kind == ObjectKind::Pig).count()
    }
}

fn centers(grid: &PixelGrid, set: &PixelSet) -> Vec<Point2> {
    set.pixels.iter().map(|&(c, r)| grid.pixel_center(c, r)).collect()
}

fn centroid(points: &[Point2]) -> Point2 {
    let sum = points.iter().fold(Vec2::ZERO, |acc, &p| acc + p);
    sum * (1.0 / points.len() as f64)
}

/// Grows a rectangle fitted to pixel centers so its area matches the pixel
/// count. Pixel centers sit up to half a pixel inside the true outline.
fn inflate_to_area(rect: OrientedRect, pixels: usize) -> OrientedRect {
    let (w, h) = (2.0 * rect.half_w, 2.0 * rect.half_h);
    let n = pixels as f64;
    let b = w + h;
    let disc = b * b - 4.0 * (w * h - n);
    let delta = if disc >= 0.0 { ((disc.sqrt() - b) / 4.0).clamp(0.0, 1.0) } else { 0.0 };
    OrientedRect::new(rect.center, rect.half_w + delta, rect.half_h + delta, rect.angle)
}

const REFINE_STEPS: i32 = 40;
const REFINE_STEP: f64 = 0.1 * std::f64::consts::PI / 180.0;

/// Calipers pick a hull edge, and on small blobs the staircase outline can
/// hide a rotation of a few degrees. Keeps the fitted size, centers it on
/// the pixel centroid and tries nearby angles, keeping the one that best
/// explains the blob's pixels.
fn refine_rect(grid: &PixelGrid, set: &PixelSet, center: Point2, rect: OrientedRect) -> OrientedRect {
    let (min_c, max_c) = set.pixels.iter().fold((u32::MAX, 0), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let (min_r, max_r) = set.pixels.iter().fold((u32::MAX, 0), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let pad = 3 + (0.1 * (max_c - min_c).max(max_r - min_r) as f64) as u32;
    let c0 = min_c.saturating_sub(pad);
    let r0 = min_r.saturating_sub(pad);
    let c1 = (max_c + pad).min(grid.width - 1);
    let r1 = (max_r + pad).min(grid.height - 1);
    let w = (c1 - c0 + 1) as usize;
    let mut member = vec![false; w * (r1 - r0 + 1) as usize];
    for &(c, r) in &set.pixels {
        member[(r - r0) as usize * w + (c - c0) as usize] = true;
    }
    // Coverage of each pixel approximated by a linear ramp across the
    // candidate's outline, compared with the blob's membership.
    let mismatch = |cand: &OrientedRect| {
        let (u, v) = cand.axes();
        let mut total = 0.0;
        for r in r0..=r1 {
            for c in c0..=c1 {
                let d = grid.pixel_center(c, r) - cand.center;
                let sd = (d.dot(u).abs() - cand.half_w).max(d.dot(v).abs() - cand.half_h);
                let cover = (0.5 - sd).clamp(0.0, 1.0);
                let want = if member[(r - r0) as usize * w + (c - c0) as usize] { 1.0 } else { 0.0 };
                total += (cover - want).abs();
            }
        }
        total
    };
    let at = |step: i32| OrientedRect::new(center, rect.half_w, rect.half_h, rect.angle + step as f64 * REFINE_STEP);
    let mut best = (mismatch(&at(0)), 0);
    for i in 1..=REFINE_STEPS {
        for step in [i, -i] {
            let m = mismatch(&at(step));
            if m < best.0 {
                best = (m, step);
            }
        }
    }
    at(best.1)
}

fn fit(grid: &PixelGrid, set: &PixelSet, force_circle: bool, cfg: &GeometryConfig) -> (Shape, Hull) {
    let pts = centers(grid, set);
    let hull = convex_hull(&pts);
    let rect = min_area_rect(&hull, cfg);
    let circle = force_circle || classify_shape(&hull, &rect, cfg) == ShapeKind::Circle;
    let shape = if circle {
        let radius = (set.len() as f64 / std::f64::consts::PI).sqrt();
        Shape::Circle(CircleShape { center: centroid(&pts), radius })
    } else {
        Shape::Rect(refine_rect(grid, set, centroid(&pts), inflate_to_area(rect, set.len())))
    };
    (shape, hull)
}

/// Reconstructs every block, pig, waiting bird, the ground and the slingshot
/// visible in `grid`.
pub fn perceive(grid: &PixelGrid, cfg: &PerceptionConfig) -> Result<ReconstructedScene, PerceptionError> {
    if grid.is_empty() || grid.width == 0 || grid.height == 0 {
        return Err(PerceptionError::EmptyGrid);
    }
    let h = grid.height as f64;
    let mut notes = Vec::new();

    let ground_top = grid
        .data
        .iter()
        .position(|&c| c == Palette::GROUND)
        .map(|i| h - (i / grid.width as usize) as f64)
        .unwrap_or_else(|| {
            notes.push("no ground visible; assuming the bottom edge".to_string());
            0.0
        });

    let sling = flood_fill_components(grid, Palette::SLINGSHOT)
        .into_iter()
        .max_by_key(|s| s.len())
        .ok_or(PerceptionError::NoSlingshot)?;
    let sling_pts = centers(grid, &sling);
    let sling_x = centroid(&sling_pts).x;
    let sling_top = sling_pts.iter().map(|p| p.y).fold(f64::MIN, f64::max) + 0.5;
    let slingshot = Point2::new(sling_x, sling_top + SLINGSHOT_GAP);

    let mut objects = Vec::new();
    let mut birds = Vec::new();
    for class in 0..Palette::CLASS_COUNT {
        let kind = match Palette::kind(class) {
            Some(ClassKind::Block(m)) => ObjectKind::Block(m),
            Some(ClassKind::Pig) => ObjectKind::Pig,
            Some(ClassKind::Bird(b)) => {
                for set in flood_fill_components(grid, class) {
                    if set.len() >= cfg.min_pixels {
                        birds.push((b, centroid(&centers(grid, &set)).x));
                    }
                }
                continue;
            }
            _ => continue,
        };
        let mut batch = Vec::new();
        for set in flood_fill_components(grid, class) {
            if set.len() < cfg.min_pixels {
                notes.push(format!("dropped {}-pixel {} fragment", set.len(), Palette::name(class)));
                continue;
            }
            let (shape, hull) = fit(grid, &set, kind == ObjectKind::Pig, &cfg.geometry);
            batch.push(ReconstructedObject { kind, shape, hull, pixel_count: set.len() });
        }
        equalize_batch(&mut batch, cfg.equalize_tol);
        objects.extend(batch);
    }
    birds.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(ReconstructedScene {
        width: grid.width,
        height: grid.height,
        objects,
        slingshot,
        ground_top,
        birds,
        notes,
    })
}

/// Snaps the rectangles of one material to shared sizes.
fn equalize_batch(batch: &mut [ReconstructedObject], tol: f64) {
    let idx: Vec<usize> = (0..batch.len()).filter(|&i| matches!(batch[i].shape, Shape::Rect(_))).collect();
    let rects: Vec<OrientedRect> = idx
        .iter()
        .map(|&i| match batch[i].shape {
            Shape::Rect(r) => r,
            Shape::Circle(_) => unreachable!(),
        })
        .collect();
    for (&i, r) in idx.iter().zip(equalize_dimensions(&rects, tol)) {
        batch[i].shape = Shape::Rect(r);
    }
}

/// What the agent believes about the world beyond what it can see.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneTemplate {
    pub gravity: Vec2,
    pub launch_speed: f64,
    pub scoring: ScoreConfig,
    pub physics: PhysicsConfig,
    pub abilities: AbilityConfig,
}

impl Default for SceneTemplate {
    fn default() -> Self {
        Self {
            gravity: Vec2::new(0.0, -50.0),
            launch_speed: 170.0,
            scoring: ScoreConfig::default(),
            physics: PhysicsConfig::default(),
            abilities: AbilityConfig::default(),
        }
    }
}

/// Turns a reconstruction into the agent's imagined world. Every body starts
/// inactive.
pub fn to_scene(rec: &ReconstructedScene, template: &SceneTemplate) -> Scene {
    let mut scene = Scene::new(
        template.gravity,
        rec.slingshot,
        template.launch_speed,
        template.physics.clone(),
        template.abilities.clone(),
        template.scoring.clone(),
    );
    scene.add_ground(rec.ground_top);
    for &(bird, x) in &rec.birds {
        scene.add_queued_bird(bird, x);
    }
    for obj in &rec.objects {
        match obj.kind {
            ObjectKind::Block(m) => scene.add_body(obj.shape, m, BodyKind::Block),
            ObjectKind::Pig => scene.add_body(obj.shape, MaterialKind::Pig, BodyKind::Pig),
        };
    }
    scene
}

/// Color rendering of the class map with every reconstructed outline drawn
/// on top.
pub fn overlay(grid: &PixelGrid, rec: &ReconstructedScene) -> RgbImage {
    let mut img = RgbImage::from_grid(grid);
    for obj in &rec.objects {
        img.draw_shape(&obj.shape, [255, 0, 255]);
        for w in obj.hull.vertices.windows(2) {
            img.draw_line(w[0], w[1], [0, 160, 0]);
        }
    }
    let s = rec.slingshot;
    img.draw_line(s - Vec2::new(4.0, 0.0), s + Vec2::new(4.0, 0.0), [255, 0, 0]);
    img.draw_line(s - Vec2::new(0.0, 4.0), s + Vec2::new(0.0, 4.0), [255, 0, 0]);
    img
}

/// Plain-text listing of a reconstruction.
pub fn report(rec: &ReconstructedScene) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "image {}x{}", rec.width, rec.height);
    let _ = writeln!(out, "slingshot {:.2} {:.2}", rec.slingshot.x, rec.slingshot.y);
    let _ = writeln!(out, "ground {:.2}", rec.ground_top);
    let queue: Vec<&str> = rec.birds.iter().map(|(b, _)| b.name()).collect();
    let _ = writeln!(out, "birds {}", queue.join(" "));
    for obj in &rec.objects {
        let name = match obj.kind {
            ObjectKind::Block(m) => m.name(),
            ObjectKind::Pig => "pig",
        };
        let _ = match obj.shape {
            Shape::Rect(r) => writeln!(
                out,
                "{name} rect center=({:.2}, {:.2}) size={:.2}x{:.2} angle={:.2}deg hull={} pixels={}",
                r.center.x,
                r.center.y,
                2.0 * r.half_w,
                2.0 * r.half_h,
                r.angle.to_degrees(),
                obj.hull.len(),
                obj.pixel_count
            ),
            Shape::Circle(c) => writeln!(
                out,
                "{name} circle center=({:.2}, {:.2}) radius={:.2} hull={} pixels={}",
                c.center.x,
                c.center.y,
                c.radius,
                obj.hull.len(),
                obj.pixel_count
            ),
        };
    }
    for note in &rec.notes {
        let _ = writeln!(out, "note {note}");
    }
    out
}
