//! Computational-geometry kernels used by perception: connected components,
//! convex hulls, minimum-area rectangles, shape classification and
//! dimension equalization.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Neg, Sub};

use crate::render::PixelGrid;

/// A point (or free vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// Vectors and points share a representation.
pub type Vec2 = Point2;

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn length_sq(self) -> f64 {
        self.dot(self)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Self {
        let l = self.length();
        Self::new(self.x / l, self.y / l)
    }

    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Cross product of scalar angular velocity with a vector: `w × r`.
pub fn cross_sv(w: f64, r: Vec2) -> Vec2 {
    Vec2::new(-w * r.y, w * r.x)
}

/// A maximal 4-connected set of pixels sharing one class id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelSet {
    /// `(col, row)` pairs, sorted row-major.
    pub pixels: Vec<(u32, u32)>,
    pub class_id: u8,
}

impl PixelSet {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// `(min row, min col)` over the component.
    pub fn min_row_col(&self) -> (u32, u32) {
        let min_row = self.pixels.iter().map(|p| p.1).min().unwrap_or(0);
        let min_col = self.pixels.iter().map(|p| p.0).min().unwrap_or(0);
        (min_row, min_col)
    }
}

/// Counter-clockwise convex polygon starting at its lexicographically
/// smallest vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Hull {
    pub vertices: Vec<Point2>,
}

impl Hull {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Enclosed area (shoelace); zero for fewer than three vertices.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let twice: f64 = (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum();
        twice.abs() / 2.0
    }

    /// Directed edges `(a, b)` in counter-clockwise order. A two-vertex hull
    /// yields the segment in both directions; a single vertex yields none.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        let count = if n < 2 { 0 } else { n };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Rectangle with arbitrary rotation, in canonical form: `half_w >= half_h`
/// and `angle` in `[-pi/2, pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Point2,
    pub half_w: f64,
    pub half_h: f64,
    pub angle: f64,
}

impl OrientedRect {
    /// Builds a canonical rectangle from arbitrary half extents and angle.
    pub fn new(center: Point2, half_w: f64, half_h: f64, angle: f64) -> Self {
        let (hw, hh, a) = if half_w < half_h {
            (half_h, half_w, angle + FRAC_PI_2)
        } else {
            (half_w, half_h, angle)
        };
        Self {
            center,
            half_w: hw,
            half_h: hh,
            angle: canonical_angle(a),
        }
    }

    /// Unit vectors along the width and height directions.
    pub fn axes(&self) -> (Vec2, Vec2) {
        let u = Vec2::from_angle(self.angle);
        (u, u.perp())
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_w * self.half_h
    }

    pub fn corners(&self) -> [Point2; 4] {
        let (u, v) = self.axes();
        let (a, b) = (u * self.half_w, v * self.half_h);
        let c = self.center;
        [c - a - b, c + a - b, c + a + b, c - a + b]
    }

    /// Point-in-rectangle test with an outward tolerance.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let (u, v) = self.axes();
        let d = p - self.center;
        d.dot(u).abs() <= self.half_w + tol && d.dot(v).abs() <= self.half_h + tol
    }
}

/// Wraps an angle into `[-pi/2, pi/2)`; rectangles are symmetric under a
/// half turn.
pub fn canonical_angle(a: f64) -> f64 {
    let mut r = a - PI * ((a + FRAC_PI_2) / PI).floor();
    if r >= FRAC_PI_2 {
        r -= PI;
    }
    if r < -FRAC_PI_2 {
        r += PI;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleShape {
    pub center: Point2,
    pub radius: f64,
}

impl CircleShape {
    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        (p - self.center).length() <= self.radius + tol
    }
}

/// Solid geometry of a body or a reconstructed object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Rect(OrientedRect),
    Circle(CircleShape),
}

impl Shape {
    pub fn center(&self) -> Point2 {
        match self {
            Shape::Rect(r) => r.center,
            Shape::Circle(c) => c.center,
        }
    }

    pub fn set_center(&mut self, p: Point2) {
        match self {
            Shape::Rect(r) => r.center = p,
            Shape::Circle(c) => c.center = p,
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Shape::Rect(r) => r.area(),
            Shape::Circle(c) => c.area(),
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            Shape::Rect(_) => ShapeKind::Rectangle,
            Shape::Circle(_) => ShapeKind::Circle,
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Shape::Rect(r) => r.contains(p, 0.0),
            Shape::Circle(c) => c.contains(p, 0.0),
        }
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn aabb(&self) -> (Point2, Point2) {
        match self {
            Shape::Rect(r) => {
                let (u, v) = r.axes();
                let ex = r.half_w * u.x.abs() + r.half_h * v.x.abs();
                let ey = r.half_w * u.y.abs() + r.half_h * v.y.abs();
                let e = Vec2::new(ex, ey);
                (r.center - e, r.center + e)
            }
            Shape::Circle(c) => {
                let e = Vec2::new(c.radius, c.radius);
                (c.center - e, c.center + e)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Rectangle,
    Circle,
}

/// Tunables for rectangle fitting and shape classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig {
    /// Lower bound for half extents of degenerate (thin) hulls.
    pub min_half_thickness: f64,
    /// Circles need at least this many hull vertices.
    pub min_circle_vertices: usize,
    /// Circles need `half_w / half_h` below this.
    pub max_circle_aspect: f64,
    /// Circles need hull area over rectangle area below this. Rasterized
    /// disks of radius 5 px and up measure at most 0.901, boxes at least
    /// 0.913.
    pub max_circle_fill: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            min_half_thickness: 0.5,
            min_circle_vertices: 6,
            max_circle_aspect: 1.3,
            max_circle_fill: 0.907,
        }
    }
}

const COLLINEAR_EPS: f64 = 1e-9;

/// Partitions all pixels of `class_id` into maximal 4-connected components,
/// ordered by `(min row, min col)`.
pub fn flood_fill_components(grid: &PixelGrid, class_id: u8) -> Vec<PixelSet> {
    let (w, h) = (grid.width as usize, grid.height as usize);
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if seen[start] || grid.data[start] != class_id {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            let (col, row) = (i % w, i / w);
            pixels.push((col as u32, row as u32));
            let mut visit = |j: usize| {
                if !seen[j] && grid.data[j] == class_id {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if col > 0 {
                visit(i - 1);
            }
            if col + 1 < w {
                visit(i + 1);
            }
            if row > 0 {
                visit(i - w);
            }
            if row + 1 < h {
                visit(i + w);
            }
        }
        pixels.sort_unstable_by_key(|&(c, r)| (r, c));
        out.push(PixelSet { pixels, class_id });
    }
    out.sort_by_key(|s| s.min_row_col());
    out
}

/// Andrew's monotone chain. Collinear points are pruned; the result starts
/// at the lexicographically smallest point and runs counter-clockwise.
///
/// Panics if `points` is empty.
pub fn convex_hull(points: &[Point2]) -> Hull {
    assert!(!points.is_empty(), "convex_hull needs at least one point");
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Hull { vertices: pts };
    }

    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= COLLINEAR_EPS
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= COLLINEAR_EPS
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // All points collinear: both chains collapse to the two extremes.
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    Hull { vertices: lower }
}

/// Minimum-area enclosing rectangle among the rectangles aligned with each
/// hull edge (rotating calipers). Degenerate hulls are thickened to
/// `min_half_thickness`.
///
/// Panics if the hull is empty.
pub fn min_area_rect(hull: &Hull, cfg: &GeometryConfig) -> OrientedRect {
    assert!(!hull.is_empty(), "min_area_rect needs a non-empty hull");
    let min_half = cfg.min_half_thickness;
    if hull.len() == 1 {
        return OrientedRect::new(hull.vertices[0], min_half, min_half, 0.0);
    }

    let mut best: Option<(f64, Point2, f64, f64, f64)> = None;
    for (a, b) in hull.edges() {
        let u = (b - a).normalized();
        let v = u.perp();
        let (mut lo_u, mut hi_u, mut lo_v, mut hi_v) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &p in &hull.vertices {
            let d = p - a;
            let (pu, pv) = (d.dot(u), d.dot(v));
            lo_u = lo_u.min(pu);
            hi_u = hi_u.max(pu);
            lo_v = lo_v.min(pv);
            hi_v = hi_v.max(pv);
        }
        let area = (hi_u - lo_u) * (hi_v - lo_v);
        if best.is_none_or(|b| area < b.0) {
            let center = a + u * ((lo_u + hi_u) / 2.0) + v * ((lo_v + hi_v) / 2.0);
            let angle = u.y.atan2(u.x);
            best = Some((area, center, (hi_u - lo_u) / 2.0, (hi_v - lo_v) / 2.0, angle));
        }
    }
    let (_, center, hw, hh, angle) = best.expect("hull with two or more vertices has edges");
    OrientedRect::new(center, hw.max(min_half), hh.max(min_half), angle)
}

/// A disk fills about `pi/4` of its bounding square, a box nearly all of
/// its rectangle. Hulls with few vertices are always rectangles.
pub fn classify_shape(hull: &Hull, rect: &OrientedRect, cfg: &GeometryConfig) -> ShapeKind {
    let aspect = rect.half_w / rect.half_h;
    let fill = hull.area() / rect.area();
    if hull.len() >= cfg.min_circle_vertices && aspect < cfg.max_circle_aspect && fill < cfg.max_circle_fill {
        ShapeKind::Circle
    } else {
        ShapeKind::Rectangle
    }
}

/// Circle implied by a fitted rectangle.
pub fn circle_from_rect(rect: &OrientedRect) -> CircleShape {
    CircleShape {
        center: rect.center,
        radius: (rect.half_w + rect.half_h) / 2.0,
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn similar(a: &OrientedRect, b: &OrientedRect, rel_tol: f64) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= rel_tol * x.min(y);
    close(a.half_w, b.half_w) && close(a.half_h, b.half_h)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn equalize_pass(rects: &[OrientedRect], rel_tol: f64) -> Vec<OrientedRect> {
    let n = rects.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if similar(&rects[i], &rects[j], rel_tol) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        clusters[root].push(i);
    }
    let mut out = rects.to_vec();
    for members in clusters.into_iter().filter(|m| !m.is_empty()) {
        let mut ws: Vec<f64> = members.iter().map(|&i| rects[i].half_w).collect();
        let mut hs: Vec<f64> = members.iter().map(|&i| rects[i].half_h).collect();
        let (mw, mh) = (median(&mut ws), median(&mut hs));
        for i in members {
            out[i].half_w = mw;
            out[i].half_h = mh;
        }
    }
    out
}

/// Snaps the dimensions of similar rectangles to their cluster median.
///
/// Clusters are the connected groups of the "both half extents within
/// `rel_tol` of each other" relation, so the result does not depend on
/// input order. Passes repeat until nothing changes, so the result is a
/// fixed point.
pub fn equalize_dimensions(rects: &[OrientedRect], rel_tol: f64) -> Vec<OrientedRect> {
    let mut cur = rects.to_vec();
    for _ in 0..=rects.len() {
        let next = equalize_pass(&cur, rel_tol);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Number of distinct clusters `equalize_dimensions` settles on.
pub fn count_dimension_clusters(rects: &[OrientedRect]) -> usize {
    let mut dims: Vec<(u64, u64)> = rects
        .iter()
        .map(|r| (r.half_w.to_bits(), r.half_h.to_bits()))
        .collect();
    dims.sort_unstable();
    dims.dedup();
    dims.len()
}
