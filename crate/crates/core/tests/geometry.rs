mod common;

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use birdsim::geometry::{
    classify_shape, convex_hull, count_dimension_clusters, equalize_dimensions, flood_fill_components, min_area_rect,
    GeometryConfig, OrientedRect, Point2, ShapeKind,
};
use birdsim::render::PixelGrid;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point() -> impl Strategy<Value = Point2> {
    (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn cloud() -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec(point(), 3..40)
}

fn inside_all_edges(points: &[Point2], hull: &[Point2]) -> bool {
    let n = hull.len();
    (0..n).all(|i| {
        let (a, b) = (hull[i], hull[(i + 1) % n]);
        points.iter().all(|&p| (b - a).cross(p - a) >= -1e-9 * 200.0)
    })
}

/// Pixel centers of a disk drawn on a small grid.
fn disk_pixels(radius: f64) -> Vec<Point2> {
    let size = (2.0 * radius).ceil() as u32 + 4;
    let c = size as f64 / 2.0;
    let mut out = Vec::new();
    for row in 0..size {
        for col in 0..size {
            let p = Point2::new(col as f64 + 0.5, row as f64 + 0.5);
            if (p - Point2::new(c, c)).length() <= radius {
                out.push(p);
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn every_point_lies_left_of_every_hull_edge(points in cloud()) {
        let hull = convex_hull(&points);
        prop_assert!(inside_all_edges(&points, &hull.vertices));
        for w in 0..hull.len() {
            let n = hull.len();
            let (a, b, c) = (hull.vertices[w], hull.vertices[(w + 1) % n], hull.vertices[(w + 2) % n]);
            if n >= 3 {
                prop_assert!((b - a).cross(c - b) > 0.0, "hull must be strictly convex and counter-clockwise");
            }
        }
    }

    #[test]
    fn calipers_rect_is_no_larger_than_a_dense_sweep(points in cloud()) {
        let hull = convex_hull(&points);
        // The thickness clamp is applied after the search and would inflate
        // near-collinear hulls past the sweep; it has its own example.
        let cfg = GeometryConfig { min_half_thickness: 0.0, ..GeometryConfig::default() };
        let rect = min_area_rect(&hull, &cfg);
        prop_assume!(hull.len() >= 3);
        let oracle = common::sweep_min_area(&hull.vertices, 0.05);
        prop_assert!(rect.area() <= oracle + 1e-6, "{} > {oracle}", rect.area());
        for &v in &hull.vertices {
            prop_assert!(rect.contains(v, 1e-6));
        }
    }

    #[test]
    fn fitted_rects_are_canonical(points in cloud()) {
        let rect = min_area_rect(&convex_hull(&points), &GeometryConfig::default());
        prop_assert!(rect.half_w >= rect.half_h);
        prop_assert!((-FRAC_PI_2..FRAC_PI_2).contains(&rect.angle));
    }

    #[test]
    fn constructed_rects_are_canonical(w in 0.5..50.0f64, h in 0.5..50.0f64, angle in -10.0..10.0f64) {
        let r = OrientedRect::new(Point2::new(0.0, 0.0), w, h, angle);
        prop_assert!(r.half_w >= r.half_h);
        prop_assert!((-FRAC_PI_2..FRAC_PI_2).contains(&r.angle));
        // Same set of points as the input rectangle.
        let u = Point2::from_angle(angle);
        let corner = u * w + u.perp() * h;
        prop_assert!(r.contains(corner, 1e-9));
    }

    #[test]
    fn flood_fill_partitions_each_class(cells in prop::collection::vec(0u8..3, 12 * 9)) {
        let grid = PixelGrid { width: 12, height: 9, data: cells };
        for class in 0..3u8 {
            let comps = flood_fill_components(&grid, class);
            let mut seen = HashSet::new();
            for c in &comps {
                prop_assert!(!c.is_empty());
                for &p in &c.pixels {
                    prop_assert!(seen.insert(p), "pixel {p:?} in two components");
                    prop_assert_eq!(grid.get(p.0, p.1), class);
                }
            }
            prop_assert_eq!(seen.len(), grid.count(class));
            // Maximality: no 4-neighbour of a component carries the class
            // while sitting in another component.
            for c in &comps {
                let own: HashSet<_> = c.pixels.iter().copied().collect();
                for &(col, row) in &c.pixels {
                    let nbrs = [(col.wrapping_sub(1), row), (col + 1, row), (col, row.wrapping_sub(1)), (col, row + 1)];
                    for (nc, nr) in nbrs {
                        if nc < 12 && nr < 9 && grid.get(nc, nr) == class {
                            prop_assert!(own.contains(&(nc, nr)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equalization_is_idempotent(dims in prop::collection::vec((1.0..30.0f64, 1.0..30.0f64), 1..25), tol in 0.0..0.3f64) {
        let rects: Vec<_> = dims
            .iter()
            .enumerate()
            .map(|(i, &(w, h))| OrientedRect::new(Point2::new(i as f64, 0.0), w, h, 0.0))
            .collect();
        let once = equalize_dimensions(&rects, tol);
        prop_assert_eq!(equalize_dimensions(&once, tol), once.clone());
        for (a, b) in rects.iter().zip(&once) {
            prop_assert_eq!((a.center, a.angle), (b.center, b.angle));
        }
    }
}

#[test]
fn calipers_beat_the_sweep_on_seeded_hulls() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(5..=40);
        let points = common::random_points(&mut rng, n);
        let hull = convex_hull(&points);
        let rect = min_area_rect(&hull, &GeometryConfig::default());
        assert!(rect.area() <= common::sweep_min_area(&hull.vertices, 0.05) + 1e-6);
        assert!(hull.vertices.iter().all(|&v| rect.contains(v, 1e-6)));
    }
}

#[test]
fn diamond_fits_a_square_of_area_eight() {
    let pts = [(0.0, 0.0), (2.0, 2.0), (4.0, 0.0), (2.0, -2.0)].map(|(x, y)| Point2::new(x, y));
    let rect = min_area_rect(&convex_hull(&pts), &GeometryConfig::default());
    let oracle = common::sweep_min_area(&pts, 0.05);
    assert!((oracle - 8.0).abs() < 1e-9);
    assert!((rect.area() - 8.0).abs() < 1e-9);
    assert!((rect.angle.abs() - PI / 4.0).abs() < 1e-9);
    assert!((rect.center - Point2::new(2.0, 0.0)).length() < 1e-9);
}

#[test]
fn disk_and_box_classify_by_shape() {
    let cfg = GeometryConfig::default();
    let disk = convex_hull(&disk_pixels(20.0));
    assert!(disk.len() >= 12, "{} hull vertices", disk.len());
    assert_eq!(classify_shape(&disk, &min_area_rect(&disk, &cfg), &cfg), ShapeKind::Circle);

    let boxed: Vec<Point2> = (0..40)
        .flat_map(|c| (0..20).map(move |r| Point2::new(c as f64 + 0.5, r as f64 + 0.5)))
        .collect();
    let hull = convex_hull(&boxed);
    assert_eq!(hull.len(), 4);
    assert_eq!(classify_shape(&hull, &min_area_rect(&hull, &cfg), &cfg), ShapeKind::Rectangle);

    let dot = convex_hull(&[Point2::new(3.5, 3.5)]);
    assert_eq!(classify_shape(&dot, &min_area_rect(&dot, &cfg), &cfg), ShapeKind::Rectangle);
}

#[test]
fn small_disks_are_still_circles() {
    let cfg = GeometryConfig::default();
    for r in [5.0, 6.0, 7.5, 9.0, 12.0, 14.0] {
        let hull = convex_hull(&disk_pixels(r));
        assert_eq!(classify_shape(&hull, &min_area_rect(&hull, &cfg), &cfg), ShapeKind::Circle, "r = {r}");
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 }
}

/// Each true size class must come back as one cluster snapped to exactly the
/// median of its own noisy members.
#[test]
fn noisy_sizes_recover_three_clusters() {
    let truth = [(20.0, 5.0), (12.0, 8.0), (30.0, 6.0)];
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rects: Vec<_> = (0..30)
            .map(|i| {
                let (w, h) = truth[i % 3];
                let jitter = |rng: &mut ChaCha8Rng, v: f64| v * (1.0 + rng.gen_range(-0.05..0.05));
                OrientedRect::new(Point2::new(i as f64 * 50.0, 0.0), jitter(&mut rng, w), jitter(&mut rng, h), 0.0)
            })
            .collect();
        let snapped = equalize_dimensions(&rects, 0.1);
        assert_eq!(count_dimension_clusters(&snapped), 3, "seed {seed}");
        for (g, &(w, h)) in truth.iter().enumerate() {
            let members: Vec<usize> = (g..30).step_by(3).collect();
            let mw = median(members.iter().map(|&i| rects[i].half_w).collect());
            let mh = median(members.iter().map(|&i| rects[i].half_h).collect());
            for &i in &members {
                assert_eq!((snapped[i].half_w, snapped[i].half_h), (mw, mh), "seed {seed}");
            }
            // The sample median of ten draws stays well inside the noise band.
            assert!((mw - w).abs() <= 0.05 * w && (mh - h).abs() <= 0.05 * h);
        }
    }
}
