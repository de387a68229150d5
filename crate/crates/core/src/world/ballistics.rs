//! Point-mass projectile formulas (no drag).

use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BallisticsError {
    #[error("target out of range for this launch speed")]
    Unreachable,
    #[error("target is not in front of the launch point")]
    OutOfSector,
}

/// Both launch angles whose trajectories pass through `(dx, dy)` relative
/// to the launch point, as `(low, high)`.
pub fn solve_launch_angles(dx: f64, dy: f64, speed: f64, g: f64) -> Result<(f64, f64), BallisticsError> {
    if dx <= 0.0 {
        return Err(BallisticsError::OutOfSector);
    }
    let v2 = speed * speed;
    let disc = v2 * v2 - g * (g * dx * dx + 2.0 * dy * v2);
    if disc < 0.0 {
        return Err(BallisticsError::Unreachable);
    }
    let root = disc.sqrt();
    let low = ((v2 - root) / (g * dx)).atan();
    let high = ((v2 + root) / (g * dx)).atan();
    Ok((low, high))
}

/// Position at time `t` relative to the launch point.
pub fn trajectory_point(angle: f64, speed: f64, g: f64, t: f64) -> Point2 {
    Point2::new(speed * angle.cos() * t, speed * angle.sin() * t - 0.5 * g * t * t)
}

/// Time until a projectile launched `height` above the ground lands.
pub fn flight_time_to_ground(angle: f64, speed: f64, g: f64, height: f64) -> f64 {
    let vy = speed * angle.sin();
    (vy + (vy * vy + 2.0 * g * height.max(0.0)).sqrt()) / g
}
