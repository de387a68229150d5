//! Rasterizes scenes into class-indexed pixel grids, the agent's only view
//! of the world.

mod pnm;

pub use pnm::{decode_classmap, decode_image, encode_classmap, encode_image, read_classmap, read_image, write_classmap, write_image, PnmError};

use crate::geometry::{OrientedRect, Point2, Shape};
use crate::physics::{Body, BodyKind, MaterialKind};
use crate::world::{BirdType, Scene};

pub const DEFAULT_WIDTH: u32 = 840;
pub const DEFAULT_HEIGHT: u32 = 480;

/// Half width of the slingshot post.
pub const SLINGSHOT_HALF_WIDTH: f64 = 3.0;
/// Vertical gap between the top of the post and the launch point.
pub const SLINGSHOT_GAP: f64 = 4.0;

/// Row-major grid of class ids. Row 0 is the top of the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelGrid {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl PixelGrid {
    /// All-background grid.
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height, data: vec![Palette::BACKGROUND; width as usize * height as usize] }
    }

    fn index(&self, col: u32, row: u32) -> usize {
        row as usize * self.width as usize + col as usize
    }

    pub fn get(&self, col: u32, row: u32) -> u8 {
        self.data[self.index(col, row)]
    }

    pub fn set(&mut self, col: u32, row: u32, class: u8) {
        let i = self.index(col, row);
        self.data[i] = class;
    }

    pub fn count(&self, class: u8) -> usize {
        self.data.iter().filter(|&&c| c == class).count()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// World coordinates of a pixel center.
    pub fn pixel_center(&self, col: u32, row: u32) -> Point2 {
        Point2::new(col as f64 + 0.5, self.height as f64 - (row as f64 + 0.5))
    }
}

/// Class id to (kind, material) to color mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Palette;

/// What a class id denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Background,
    Ground,
    Block(MaterialKind),
    Pig,
    Bird(BirdType),
    Slingshot,
    Egg,
}

impl Palette {
    pub const BACKGROUND: u8 = 0;
    pub const GROUND: u8 = 1;
    pub const WOOD: u8 = 2;
    pub const ICE: u8 = 3;
    pub const STONE: u8 = 4;
    pub const PIG: u8 = 5;
    /// First bird class; bird types follow in declaration order.
    pub const BIRD_BASE: u8 = 6;
    pub const SLINGSHOT: u8 = 11;
    pub const EGG: u8 = 12;
    pub const CLASS_COUNT: u8 = 13;

    const COLORS: [[u8; 3]; 13] = [
        [200, 230, 255], // background
        [110, 80, 40],   // ground
        [190, 140, 70],  // wood
        [160, 220, 240], // ice
        [128, 128, 128], // stone
        [90, 200, 60],   // pig
        [220, 30, 30],   // red
        [250, 220, 40],  // yellow
        [60, 110, 230],  // blue
        [30, 30, 30],    // black
        [245, 245, 245], // white
        [90, 50, 20],    // slingshot
        [240, 240, 200], // egg
    ];

    pub fn is_valid(class: u8) -> bool {
        class < Self::CLASS_COUNT
    }

    pub fn kind(class: u8) -> Option<ClassKind> {
        Some(match class {
            Self::BACKGROUND => ClassKind::Background,
            Self::GROUND => ClassKind::Ground,
            Self::WOOD => ClassKind::Block(MaterialKind::Wood),
            Self::ICE => ClassKind::Block(MaterialKind::Ice),
            Self::STONE => ClassKind::Block(MaterialKind::Stone),
            Self::PIG => ClassKind::Pig,
            c if (Self::BIRD_BASE..Self::BIRD_BASE + 5).contains(&c) => {
                ClassKind::Bird(BirdType::ALL[(c - Self::BIRD_BASE) as usize])
            }
            Self::SLINGSHOT => ClassKind::Slingshot,
            Self::EGG => ClassKind::Egg,
            _ => return None,
        })
    }

    pub fn block_class(material: MaterialKind) -> Option<u8> {
        match material {
            MaterialKind::Wood => Some(Self::WOOD),
            MaterialKind::Ice => Some(Self::ICE),
            MaterialKind::Stone => Some(Self::STONE),
            _ => None,
        }
    }

    pub fn bird_class(bird: BirdType) -> u8 {
        Self::BIRD_BASE + bird.index()
    }

    pub fn class_of(body: &Body) -> u8 {
        match body.kind {
            BodyKind::Ground => Self::GROUND,
            BodyKind::Block => Self::block_class(body.material.kind).unwrap_or(Self::WOOD),
            BodyKind::Pig => Self::PIG,
            BodyKind::Bird(b) => Self::bird_class(b),
            BodyKind::Projectile => Self::EGG,
        }
    }

    pub fn rgb(class: u8) -> Option<[u8; 3]> {
        Self::COLORS.get(class as usize).copied()
    }

    pub fn class_of_rgb(rgb: [u8; 3]) -> Option<u8> {
        Self::COLORS.iter().position(|&c| c == rgb).map(|i| i as u8)
    }

    pub fn name(class: u8) -> &'static str {
        match Self::kind(class) {
            Some(ClassKind::Background) => "background",
            Some(ClassKind::Ground) => "ground",
            Some(ClassKind::Block(m)) => m.name(),
            Some(ClassKind::Pig) => "pig",
            Some(ClassKind::Bird(b)) => b.name(),
            Some(ClassKind::Slingshot) => "slingshot",
            Some(ClassKind::Egg) => "egg",
            None => "unknown",
        }
    }
}

/// The slingshot post as drawn: standing on the ground, ending just below
/// the launch point.
pub fn slingshot_post(scene: &Scene) -> OrientedRect {
    let ground = scene.ground_top();
    let top = scene.slingshot.y - SLINGSHOT_GAP;
    let half_h = ((top - ground) / 2.0).max(0.5);
    OrientedRect::new(
        Point2::new(scene.slingshot.x, top - half_h),
        SLINGSHOT_HALF_WIDTH,
        half_h,
        0.0,
    )
}

fn paint(grid: &mut PixelGrid, shape: &Shape, class: u8) {
    let (lo, hi) = shape.aabb();
    let h = grid.height as f64;
    let clamp_col = |x: f64| x.clamp(0.0, grid.width as f64) as u32;
    let clamp_row = |y: f64| y.clamp(0.0, h) as u32;
    let (c0, c1) = (clamp_col(lo.x.floor()), clamp_col(hi.x.ceil()));
    let (r0, r1) = (clamp_row((h - hi.y).floor()), clamp_row((h - lo.y).ceil()));
    for row in r0..r1 {
        for col in c0..c1 {
            if shape.contains(grid.pixel_center(col, row)) {
                grid.set(col, row, class);
            }
        }
    }
}

/// Paints the ground band, the slingshot, then every alive body in id order.
/// World y points up; image rows point down.
pub fn rasterize(scene: &Scene, width: u32, height: u32) -> PixelGrid {
    let mut grid = PixelGrid::new(width, height);
    paint(&mut grid, &Shape::Rect(slingshot_post(scene)), Palette::SLINGSHOT);
    for body in scene.bodies.iter().filter(|b| b.alive) {
        paint(&mut grid, &body.shape, Palette::class_of(body));
    }
    grid
}

/// Color image, used for viewing and overlays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn from_grid(grid: &PixelGrid) -> Self {
        let data = grid
            .data
            .iter()
            .flat_map(|&c| Palette::rgb(c).unwrap_or([255, 0, 255]))
            .collect();
        Self { width: grid.width, height: grid.height, data }
    }

    pub fn put(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = 3 * (y as usize * self.width as usize + x as usize);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Line between two world points.
    pub fn draw_line(&mut self, a: Point2, b: Point2, rgb: [u8; 3]) {
        let h = self.height as f64;
        let (ax, ay) = (a.x - 0.5, h - a.y - 0.5);
        let (bx, by) = (b.x - 0.5, h - b.y - 0.5);
        let steps = (bx - ax).abs().max((by - ay).abs()).ceil().max(1.0) as usize;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            self.put((ax + (bx - ax) * t).round() as i64, (ay + (by - ay) * t).round() as i64, rgb);
        }
    }

    pub fn draw_shape(&mut self, shape: &Shape, rgb: [u8; 3]) {
        match shape {
            Shape::Rect(r) => {
                let c = r.corners();
                for i in 0..4 {
                    self.draw_line(c[i], c[(i + 1) % 4], rgb);
                }
            }
            Shape::Circle(c) => {
                let n = 48;
                for i in 0..n {
                    let t0 = i as f64 / n as f64 * std::f64::consts::TAU;
                    let t1 = (i + 1) as f64 / n as f64 * std::f64::consts::TAU;
                    let p = |t: f64| c.center + Point2::from_angle(t) * c.radius;
                    self.draw_line(p(t0), p(t1), rgb);
                }
            }
        }
    }
}
