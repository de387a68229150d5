mod common;

use birdsim::geometry::{convex_hull, flood_fill_components, Hull, PixelSet, Shape};
use birdsim::perception::{perceive, to_scene, ObjectKind, PerceptionConfig, SceneTemplate};
use birdsim::render::{rasterize, Palette, PixelGrid, DEFAULT_HEIGHT, DEFAULT_WIDTH};

fn hull_of(grid: &PixelGrid, set: &PixelSet) -> Hull {
    let pts: Vec<_> = set.pixels.iter().map(|&(c, r)| grid.pixel_center(c, r)).collect();
    convex_hull(&pts)
}

#[test]
fn generated_scenes_round_trip() {
    let rt = common::round_trip(0..30);
    println!("{rt:?}");
    assert!(rt.objects >= 30 * 6);
    assert!(rt.detection_rate() >= 0.95);
    assert!(rt.max_center_err <= 1.5);
    assert!(rt.max_angle_err <= 3f64.to_radians());
    assert!(rt.max_dim_err <= 2.0);
    assert!(rt.kind_accuracy() >= 0.98);
}

#[test]
fn bundled_levels_rebuild_with_the_same_bodies() {
    let template = SceneTemplate::default();
    for (name, truth) in common::bundled() {
        let grid = rasterize(&truth, DEFAULT_WIDTH, DEFAULT_HEIGHT);
        let rec = perceive(&grid, &PerceptionConfig::default()).unwrap();
        let imagined = to_scene(&rec, &template);
        assert_eq!(imagined.bodies.len(), truth.bodies.len(), "{name}");
        assert_eq!(imagined.bird_queue(), truth.bird_queue(), "{name}");
        assert_eq!(imagined.alive_pigs(), truth.alive_pigs(), "{name}");
        assert!((imagined.ground_top() - truth.ground_top()).abs() < 1e-9, "{name}");
        assert!((imagined.slingshot - truth.slingshot).length() < 1.0, "{name}");
        assert!(imagined.bodies.iter().all(|b| !b.active), "{name}");
        assert_eq!(to_scene(&rec, &template), imagined, "{name}");
    }
}

#[test]
fn removing_an_object_only_changes_that_object() {
    let cfg = PerceptionConfig::default();
    for seed in 100..110 {
        let (scene, _) = common::generated_scene(seed);
        let grid = rasterize(&scene, DEFAULT_WIDTH, DEFAULT_HEIGHT);
        let full = perceive(&grid, &cfg).unwrap();
        for victim in 0..full.objects.len() {
            let gone = &full.objects[victim];
            let class = match gone.kind {
                ObjectKind::Block(m) => Palette::block_class(m).unwrap(),
                ObjectKind::Pig => Palette::PIG,
            };
            let blob = flood_fill_components(&grid, class)
                .into_iter()
                .find(|c| c.len() == gone.pixel_count && hull_of(&grid, c) == gone.hull)
                .expect("component of a perceived object");
            let mut cut = grid.clone();
            for &(col, row) in &blob.pixels {
                cut.set(col, row, Palette::BACKGROUND);
            }
            let part = perceive(&cut, &cfg).unwrap();
            assert_eq!(part.objects.len(), full.objects.len() - 1);
            for (i, o) in full.objects.iter().enumerate().filter(|(i, _)| *i != victim) {
                let twin = part.objects.iter().find(|p| p.hull == o.hull).unwrap_or_else(|| panic!("seed {seed}: object {i} lost"));
                assert_eq!(twin.kind, o.kind);
                assert_eq!(twin.pixel_count, o.pixel_count);
                match (o.shape, twin.shape) {
                    (Shape::Rect(a), Shape::Rect(b)) => {
                        assert_eq!((a.center, a.angle), (b.center, b.angle));
                        assert!((a.half_w - b.half_w).abs() <= cfg.equalize_tol * a.half_w);
                        assert!((a.half_h - b.half_h).abs() <= cfg.equalize_tol * a.half_h);
                    }
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }
}
