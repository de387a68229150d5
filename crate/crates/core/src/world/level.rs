//! Line-oriented level files.
//!
//! ```text
//! gravity 0 -50
//! slingshot 140 70
//! speed 170
//! score pig 5000 block wood 500 block ice 500 block stone 500 bird 10000
//! bird red
//! ground 40
//! block wood rect 400 60 40 20 0
//! block stone circle 450 55 15
//! pig 500 50 10
//! ```

use thiserror::Error;

use crate::geometry::{CircleShape, OrientedRect, Point2, Shape, Vec2};
use crate::physics::{BodyKind, MaterialKind, PhysicsConfig};

use super::{AbilityConfig, BirdType, Scene, ScoreConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid level: {0}")]
    Semantic(String),
}

/// Horizontal gap between waiting birds.
pub const QUEUE_SPACING: f64 = 24.0;
/// Gap between the slingshot and the last waiting bird.
pub const QUEUE_OFFSET: f64 = 20.0;

enum Item {
    Block(MaterialKind, Shape),
    Pig(CircleShape),
}

struct Parsed {
    gravity: Option<Vec2>,
    slingshot: Option<Point2>,
    speed: Option<f64>,
    ground: Option<f64>,
    score: ScoreConfig,
    birds: Vec<BirdType>,
    items: Vec<Item>,
}

pub fn load_level(text: &str) -> Result<Scene, LevelError> {
    load_level_with(text, &PhysicsConfig::default(), &AbilityConfig::default())
}

pub fn load_level_with(text: &str, physics: &PhysicsConfig, abilities: &AbilityConfig) -> Result<Scene, LevelError> {
    let p = parse(text)?;
    let missing = |what: &str| LevelError::Semantic(format!("missing `{what}` directive"));
    let gravity = p.gravity.ok_or_else(|| missing("gravity"))?;
    let slingshot = p.slingshot.ok_or_else(|| missing("slingshot"))?;
    let speed = p.speed.ok_or_else(|| missing("speed"))?;
    let ground = p.ground.ok_or_else(|| missing("ground"))?;
    if p.birds.is_empty() {
        return Err(LevelError::Semantic("no birds".into()));
    }
    if !p.items.iter().any(|i| matches!(i, Item::Pig(_))) {
        return Err(LevelError::Semantic("no pigs".into()));
    }

    let mut scene = Scene::new(gravity, slingshot, speed, physics.clone(), abilities.clone(), p.score);
    scene.add_ground(ground);
    let n = p.birds.len();
    for (i, &bird) in p.birds.iter().enumerate() {
        let x = slingshot.x - QUEUE_OFFSET - QUEUE_SPACING * (n - 1 - i) as f64;
        scene.add_queued_bird(bird, x);
    }
    for item in p.items {
        match item {
            Item::Block(m, shape) => scene.add_body(shape, m, BodyKind::Block),
            Item::Pig(c) => scene.add_body(Shape::Circle(c), MaterialKind::Pig, BodyKind::Pig),
        };
    }
    Ok(scene)
}

fn parse(text: &str) -> Result<Parsed, LevelError> {
    let mut p = Parsed {
        gravity: None,
        slingshot: None,
        speed: None,
        ground: None,
        score: ScoreConfig::default(),
        birds: Vec::new(),
        items: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| LevelError::Parse { line, msg };
        let toks: Vec<&str> = content.split_whitespace().collect();
        let num = |i: usize| -> Result<f64, LevelError> {
            let t = toks.get(i).ok_or_else(|| err(format!("`{}` expects more arguments", toks[0])))?;
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("invalid number `{t}`")))
        };
        let arity = |n: usize| -> Result<(), LevelError> {
            if toks.len() == n {
                Ok(())
            } else {
                Err(err(format!("`{}` takes {} arguments, got {}", toks[0], n - 1, toks.len() - 1)))
            }
        };
        let once = |set: bool| -> Result<(), LevelError> {
            if set {
                Err(err(format!("duplicate `{}` directive", toks[0])))
            } else {
                Ok(())
            }
        };
        match toks[0] {
            "gravity" => {
                arity(3)?;
                once(p.gravity.is_some())?;
                p.gravity = Some(Vec2::new(num(1)?, num(2)?));
            }
            "slingshot" => {
                arity(3)?;
                once(p.slingshot.is_some())?;
                p.slingshot = Some(Point2::new(num(1)?, num(2)?));
            }
            "speed" => {
                arity(2)?;
                once(p.speed.is_some())?;
                let v = num(1)?;
                if v <= 0.0 {
                    return Err(err("speed must be positive".into()));
                }
                p.speed = Some(v);
            }
            "ground" => {
                arity(2)?;
                once(p.ground.is_some())?;
                p.ground = Some(num(1)?);
            }
            "bird" => {
                arity(2)?;
                let b = BirdType::parse(toks[1]).ok_or_else(|| err(format!("unknown bird type `{}`", toks[1])))?;
                p.birds.push(b);
            }
            "score" => p.score = parse_score(&toks[1..]).map_err(err)?,
            "pig" => {
                arity(4)?;
                let r = num(3)?;
                if r <= 0.0 {
                    return Err(err("pig radius must be positive".into()));
                }
                p.items.push(Item::Pig(CircleShape { center: Point2::new(num(1)?, num(2)?), radius: r }));
            }
            "block" => {
                let material = toks
                    .get(1)
                    .and_then(|m| MaterialKind::parse(m))
                    .filter(|m| m.is_block())
                    .ok_or_else(|| err(format!("unknown block material `{}`", toks.get(1).unwrap_or(&""))))?;
                let shape = match toks.get(2).copied() {
                    Some("rect") => {
                        arity(8)?;
                        let (w, h) = (num(5)?, num(6)?);
                        if w <= 0.0 || h <= 0.0 {
                            return Err(err("block dimensions must be positive".into()));
                        }
                        let c = Point2::new(num(3)?, num(4)?);
                        Shape::Rect(OrientedRect::new(c, w / 2.0, h / 2.0, num(7)?.to_radians()))
                    }
                    Some("circle") => {
                        arity(6)?;
                        let r = num(5)?;
                        if r <= 0.0 {
                            return Err(err("block radius must be positive".into()));
                        }
                        Shape::Circle(CircleShape { center: Point2::new(num(3)?, num(4)?), radius: r })
                    }
                    other => return Err(err(format!("unknown block shape `{}`", other.unwrap_or("")))),
                };
                p.items.push(Item::Block(material, shape));
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    Ok(p)
}

fn parse_score(toks: &[&str]) -> Result<ScoreConfig, String> {
    let mut score = ScoreConfig::default();
    let int = |t: Option<&&str>| -> Result<i64, String> {
        let t = t.ok_or("score: missing value")?;
        t.parse::<i64>()
            .ok()
            .filter(|v| *v >= 0)
            .ok_or_else(|| format!("score: invalid points `{t}`"))
    };
    let mut i = 0;
    while i < toks.len() {
        match toks[i] {
            "pig" => {
                score.pig_points = int(toks.get(i + 1))?;
                i += 2;
            }
            "bird" => {
                score.unused_bird_points = int(toks.get(i + 1))?;
                i += 2;
            }
            "block" => {
                let m = toks
                    .get(i + 1)
                    .and_then(|m| MaterialKind::parse(m))
                    .filter(|m| m.is_block())
                    .ok_or_else(|| format!("score: unknown block material `{}`", toks.get(i + 1).unwrap_or(&"")))?;
                score.block_points.insert(m, int(toks.get(i + 2))?);
                i += 3;
            }
            other => return Err(format!("score: unexpected `{other}`")),
        }
    }
    Ok(score)
}
