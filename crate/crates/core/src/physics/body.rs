use crate::geometry::{Point2, Shape, Vec2};
use crate::world::BirdType;

pub type BodyId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MaterialKind {
    Wood,
    Ice,
    Stone,
    Pig,
    Bird,
    Egg,
    Ground,
}

impl MaterialKind {
    pub const BLOCKS: [MaterialKind; 3] = [MaterialKind::Wood, MaterialKind::Ice, MaterialKind::Stone];

    pub fn name(self) -> &'static str {
        match self {
            MaterialKind::Wood => "wood",
            MaterialKind::Ice => "ice",
            MaterialKind::Stone => "stone",
            MaterialKind::Pig => "pig",
            MaterialKind::Bird => "bird",
            MaterialKind::Egg => "egg",
            MaterialKind::Ground => "ground",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "wood" => MaterialKind::Wood,
            "ice" => MaterialKind::Ice,
            "stone" => MaterialKind::Stone,
            "pig" => MaterialKind::Pig,
            "bird" => MaterialKind::Bird,
            "egg" => MaterialKind::Egg,
            "ground" => MaterialKind::Ground,
            _ => return None,
        })
    }

    pub fn is_block(self) -> bool {
        Self::BLOCKS.contains(&self)
    }
}

/// Physical properties shared by every body made of one material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub kind: MaterialKind,
    /// Mass per unit area.
    pub density: f64,
    pub restitution: f64,
    pub friction: f64,
    /// Damage capacity; infinite for indestructible materials.
    pub health: f64,
    /// Per-contact impulse absorbed without damage.
    pub damage_threshold: f64,
    pub break_score: i64,
}

/// Default material parameters, keyed by kind.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialTable {
    pub wood: Material,
    pub ice: Material,
    pub stone: Material,
    pub pig: Material,
    pub bird: Material,
    pub egg: Material,
    pub ground: Material,
}

impl MaterialTable {
    pub fn get(&self, kind: MaterialKind) -> &Material {
        match kind {
            MaterialKind::Wood => &self.wood,
            MaterialKind::Ice => &self.ice,
            MaterialKind::Stone => &self.stone,
            MaterialKind::Pig => &self.pig,
            MaterialKind::Bird => &self.bird,
            MaterialKind::Egg => &self.egg,
            MaterialKind::Ground => &self.ground,
        }
    }

    pub fn get_mut(&mut self, kind: MaterialKind) -> &mut Material {
        match kind {
            MaterialKind::Wood => &mut self.wood,
            MaterialKind::Ice => &mut self.ice,
            MaterialKind::Stone => &mut self.stone,
            MaterialKind::Pig => &mut self.pig,
            MaterialKind::Bird => &mut self.bird,
            MaterialKind::Egg => &mut self.egg,
            MaterialKind::Ground => &mut self.ground,
        }
    }
}

impl Default for MaterialTable {
    fn default() -> Self {
        let m = |kind, density, restitution, friction, health, damage_threshold| Material {
            kind,
            density,
            restitution,
            friction,
            health,
            damage_threshold,
            break_score: 0,
        };
        let inf = f64::INFINITY;
        Self {
            wood: m(MaterialKind::Wood, 0.0015, 0.2, 0.6, 120.0, 15.0),
            ice: m(MaterialKind::Ice, 0.001, 0.1, 0.3, 60.0, 5.0),
            stone: m(MaterialKind::Stone, 0.003, 0.1, 0.8, 400.0, 40.0),
            pig: m(MaterialKind::Pig, 0.0015, 0.3, 0.5, 20.0, 3.0),
            bird: m(MaterialKind::Bird, 0.008, 0.3, 0.5, inf, inf),
            egg: m(MaterialKind::Egg, 0.02, 0.1, 0.5, inf, inf),
            ground: m(MaterialKind::Ground, 0.0, 0.1, 0.8, inf, inf),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BodyKind {
    Block,
    Pig,
    Bird(BirdType),
    Ground,
    /// Spawned by an ability (eggs).
    Projectile,
}

impl BodyKind {
    /// Launched birds and their spawn do not collide with each other.
    pub fn is_missile(self) -> bool {
        matches!(self, BodyKind::Bird(_) | BodyKind::Projectile)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    pub id: BodyId,
    pub shape: Shape,
    pub material: Material,
    pub kind: BodyKind,
    pub velocity: Vec2,
    pub angular_velocity: f64,
    pub damage: f64,
    pub active: bool,
    pub alive: bool,
    mass: f64,
    inertia: f64,
}

impl Body {
    /// A new inactive, undamaged, resting body.
    pub fn new(id: BodyId, shape: Shape, material: Material, kind: BodyKind) -> Self {
        let (mass, inertia) = if kind == BodyKind::Ground {
            (f64::INFINITY, f64::INFINITY)
        } else {
            let m = material.density * shape.area();
            let i = match shape {
                Shape::Rect(r) => m * (r.half_w * r.half_w + r.half_h * r.half_h) / 3.0,
                Shape::Circle(c) => m * c.radius * c.radius / 2.0,
            };
            (m, i)
        };
        Self {
            id,
            shape,
            material,
            kind,
            velocity: Vec2::ZERO,
            angular_velocity: 0.0,
            damage: 0.0,
            active: false,
            alive: true,
            mass,
            inertia,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    /// Zero for the ground (static); inactive bodies are never solved.
    pub fn inv_mass(&self) -> f64 {
        if self.kind == BodyKind::Ground {
            0.0
        } else {
            1.0 / self.mass
        }
    }

    pub fn inv_inertia(&self) -> f64 {
        if self.kind == BodyKind::Ground {
            0.0
        } else {
            1.0 / self.inertia
        }
    }

    pub fn center(&self) -> Point2 {
        self.shape.center()
    }

    pub fn is_ground(&self) -> bool {
        self.kind == BodyKind::Ground
    }

    /// Participates in integration and the solver.
    pub fn is_dynamic(&self) -> bool {
        self.alive && self.active && !self.is_ground()
    }

    pub fn kinetic_energy(&self) -> f64 {
        if !self.is_dynamic() {
            return 0.0;
        }
        0.5 * self.mass * self.velocity.length_sq()
            + 0.5 * self.inertia * self.angular_velocity * self.angular_velocity
    }

    /// Applies an impulse at a world-space point.
    pub fn apply_impulse(&mut self, impulse: Vec2, at: Point2) {
        let r = at - self.center();
        self.velocity = self.velocity + impulse * self.inv_mass();
        self.angular_velocity += r.cross(impulse) * self.inv_inertia();
    }

    /// Adds damage, clamped to health. Returns true if this kills the body.
    pub fn add_damage(&mut self, amount: f64) -> bool {
        if amount <= 0.0 || !self.material.health.is_finite() {
            return false;
        }
        self.damage = (self.damage + amount).min(self.material.health);
        self.damage >= self.material.health
    }
}
