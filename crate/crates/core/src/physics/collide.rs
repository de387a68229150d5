//! Narrow-phase contact generation between circles and oriented rectangles.

use crate::geometry::{CircleShape, OrientedRect, Point2, Shape, Vec2};

use super::BodyId;

/// One contact point between two bodies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub body_a: BodyId,
    pub body_b: BodyId,
    pub point: Point2,
    /// Unit normal pointing from `body_a` towards `body_b`.
    pub normal: Vec2,
    pub penetration: f64,
}

/// Up to two contact points sharing one normal (from A to B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manifold {
    pub normal: Vec2,
    pub points: [(Point2, f64); 2],
    pub count: usize,
}

impl Manifold {
    fn single(normal: Vec2, point: Point2, penetration: f64) -> Self {
        Self {
            normal,
            points: [(point, penetration), (point, 0.0)],
            count: 1,
        }
    }

    pub fn points(&self) -> &[(Point2, f64)] {
        &self.points[..self.count]
    }

    pub fn max_penetration(&self) -> f64 {
        self.points().iter().map(|p| p.1).fold(0.0, f64::max)
    }

    fn flipped(mut self) -> Self {
        self.normal = -self.normal;
        self
    }
}

pub fn aabb_overlap(a: &Shape, b: &Shape) -> bool {
    let (amin, amax) = a.aabb();
    let (bmin, bmax) = b.aabb();
    amin.x <= bmax.x && bmin.x <= amax.x && amin.y <= bmax.y && bmin.y <= amax.y
}

/// Contact manifold between two shapes, normal from `a` to `b`.
pub fn collide(a: &Shape, b: &Shape) -> Option<Manifold> {
    if !aabb_overlap(a, b) {
        return None;
    }
    match (a, b) {
        (Shape::Circle(ca), Shape::Circle(cb)) => circle_circle(ca, cb),
        (Shape::Circle(c), Shape::Rect(r)) => circle_rect(c, r).map(Manifold::flipped),
        (Shape::Rect(r), Shape::Circle(c)) => circle_rect(c, r),
        (Shape::Rect(ra), Shape::Rect(rb)) => rect_rect(ra, rb),
    }
}

fn circle_circle(a: &CircleShape, b: &CircleShape) -> Option<Manifold> {
    let d = b.center - a.center;
    let dist = d.length();
    let reach = a.radius + b.radius;
    if dist >= reach {
        return None;
    }
    let normal = if dist > 0.0 { d * (1.0 / dist) } else { Vec2::new(0.0, 1.0) };
    let pen = reach - dist;
    let point = a.center + normal * (a.radius - pen / 2.0);
    Some(Manifold::single(normal, point, pen))
}

/// Normal points from the rectangle to the circle.
fn circle_rect(c: &CircleShape, r: &OrientedRect) -> Option<Manifold> {
    let (u, v) = r.axes();
    let d = c.center - r.center;
    let (lx, ly) = (d.dot(u), d.dot(v));
    let inside = lx.abs() <= r.half_w && ly.abs() <= r.half_h;
    if inside {
        let sign = |x: f64| if x < 0.0 { -1.0 } else { 1.0 };
        let (dx, dy) = (r.half_w - lx.abs(), r.half_h - ly.abs());
        let (normal, depth) = if dx < dy { (u * sign(lx), dx) } else { (v * sign(ly), dy) };
        return Some(Manifold::single(normal, c.center, c.radius + depth));
    }
    let closest = r.center + u * lx.clamp(-r.half_w, r.half_w) + v * ly.clamp(-r.half_h, r.half_h);
    let delta = c.center - closest;
    let dist = delta.length();
    if dist >= c.radius {
        return None;
    }
    Some(Manifold::single(delta * (1.0 / dist), closest, c.radius - dist))
}

/// Separating-axis test over both rectangles' face normals, then clipping of
/// the incident face against the reference face.
fn rect_rect(a: &OrientedRect, b: &OrientedRect) -> Option<Manifold> {
    let (ua, va) = a.axes();
    let (ub, vb) = b.axes();
    let d = b.center - a.center;
    let ext_a = |n: Vec2| a.half_w * ua.dot(n).abs() + a.half_h * va.dot(n).abs();
    let ext_b = |n: Vec2| b.half_w * ub.dot(n).abs() + b.half_h * vb.dot(n).abs();

    let mut best_a = (f64::MIN, 0);
    for (i, (n, h)) in [(ua, a.half_w), (va, a.half_h)].into_iter().enumerate() {
        let s = d.dot(n).abs() - h - ext_b(n);
        if s > 0.0 {
            return None;
        }
        if s > best_a.0 {
            best_a = (s, i);
        }
    }
    let mut best_b = (f64::MIN, 0);
    for (i, (n, h)) in [(ub, b.half_w), (vb, b.half_h)].into_iter().enumerate() {
        let s = d.dot(n).abs() - h - ext_a(n);
        if s > 0.0 {
            return None;
        }
        if s > best_b.0 {
            best_b = (s, i);
        }
    }

    // Prefer A's faces unless B's are clearly better, for frame coherence.
    let flip = best_b.0 > 0.95 * best_a.0 + 0.01;
    let (reference, incident, axis) = if flip { (b, a, best_b.1) } else { (a, b, best_a.1) };

    let (ru, rv) = reference.axes();
    let raxes = [ru, rv];
    let rh = [reference.half_w, reference.half_h];
    let n_axis = raxes[axis];
    let n = if (incident.center - reference.center).dot(n_axis) >= 0.0 { n_axis } else { -n_axis };
    let side = raxes[1 - axis];
    let side_h = rh[1 - axis];
    let face_offset = rh[axis];

    // Incident face: the one whose outward normal opposes `n` the most.
    let (iu, iv) = incident.axes();
    let faces = [
        (iu, incident.half_w, iv, incident.half_h),
        (-iu, incident.half_w, iv, incident.half_h),
        (iv, incident.half_h, iu, incident.half_w),
        (-iv, incident.half_h, iu, incident.half_w),
    ];
    let (fnorm, fdist, fdir, flen) = faces
        .into_iter()
        .min_by(|x, y| x.0.dot(n).total_cmp(&y.0.dot(n)))
        .expect("four faces");
    let fc = incident.center + fnorm * fdist;
    let (p0, p1) = (fc - fdir * flen, fc + fdir * flen);

    let (p0, p1) = clip_segment(p0, p1, side, reference.center, side_h)?;

    let mut m = Manifold {
        normal: if flip { -n } else { n },
        points: [(p0, 0.0); 2],
        count: 0,
    };
    for p in [p0, p1] {
        let sep = (p - reference.center).dot(n) - face_offset;
        if sep <= 0.0 && m.count < 2 {
            m.points[m.count] = (p, -sep);
            m.count += 1;
        }
    }
    if m.count == 2 && m.points[0].0 == m.points[1].0 {
        m.count = 1;
    }
    (m.count > 0).then_some(m)
}

/// Clips a segment to the slab `|(p - origin) . dir| <= half`.
fn clip_segment(
    mut p0: Point2,
    mut p1: Point2,
    dir: Vec2,
    origin: Point2,
    half: f64,
) -> Option<(Point2, Point2)> {
    for sign in [1.0, -1.0] {
        let s0 = sign * (p0 - origin).dot(dir) - half;
        let s1 = sign * (p1 - origin).dot(dir) - half;
        if s0 > 0.0 && s1 > 0.0 {
            return None;
        }
        if s0 > 0.0 {
            p0 = p0 + (p1 - p0) * (s0 / (s0 - s1));
        } else if s1 > 0.0 {
            p1 = p1 + (p0 - p1) * (s1 / (s1 - s0));
        }
    }
    Some((p0, p1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(x: f64, y: f64, hw: f64, hh: f64, a: f64) -> Shape {
        Shape::Rect(OrientedRect::new(Point2::new(x, y), hw, hh, a))
    }

    fn circle(x: f64, y: f64, r: f64) -> Shape {
        Shape::Circle(CircleShape { center: Point2::new(x, y), radius: r })
    }

    #[test]
    fn box_resting_on_box_has_two_points() {
        let ground = rect(0.0, -10.0, 100.0, 10.0, 0.0);
        let b = rect(0.0, 4.9, 5.0, 5.0, 0.0);
        let m = collide(&ground, &b).unwrap();
        assert_eq!(m.count, 2);
        assert!((m.normal.y - 1.0).abs() < 1e-12);
        for &(_, pen) in m.points() {
            assert!((pen - 0.1).abs() < 1e-9);
        }
    }

    #[test]
    fn normal_points_from_a_to_b() {
        let a = rect(0.0, 0.0, 5.0, 5.0, 0.3);
        let b = rect(9.0, 0.5, 5.0, 2.0, -0.2);
        let m = collide(&a, &b).unwrap();
        assert!(m.normal.dot(Vec2::new(1.0, 0.0)) > 0.0);
        let m2 = collide(&b, &a).unwrap();
        assert!(m2.normal.dot(Vec2::new(1.0, 0.0)) < 0.0);
    }

    #[test]
    fn separated_shapes_have_no_contact() {
        assert!(collide(&rect(0.0, 0.0, 5.0, 5.0, 0.7), &rect(20.0, 0.0, 5.0, 5.0, 0.1)).is_none());
        assert!(collide(&circle(0.0, 0.0, 1.0), &circle(2.5, 0.0, 1.0)).is_none());
        assert!(collide(&circle(7.0, 7.0, 2.5), &rect(0.0, 0.0, 5.0, 5.0, 0.0)).is_none());
    }

    #[test]
    fn circle_against_rect_corner() {
        let m = collide(&circle(6.0, 6.0, 2.0), &rect(0.0, 0.0, 5.0, 5.0, 0.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.normal.x + s).abs() < 1e-12 && (m.normal.y + s).abs() < 1e-12);
        assert!((m.points[0].1 - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn circle_centre_inside_rect() {
        let m = collide(&rect(0.0, 0.0, 5.0, 5.0, 0.0), &circle(0.0, 4.0, 1.0)).unwrap();
        assert_eq!(m.normal, Vec2::new(0.0, 1.0));
        assert!((m.points[0].1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn concentric_circles_push_up() {
        let m = collide(&circle(0.0, 0.0, 1.0), &circle(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(m.normal, Vec2::new(0.0, 1.0));
    }
}
