//! Python bindings: load and render levels, perceive class maps, plan and
//! play shots.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use birdsim::agent::{self, AgentConfig, EpisodeResult};
use birdsim::geometry::{self, GeometryConfig, Point2, Shape};
use birdsim::perception::{self, ObjectKind, PerceptionConfig, SceneTemplate};
use birdsim::planner::{self, Decision, PlannerConfig};
use birdsim::render::{self, PixelGrid};
use birdsim::world::{self, load_level, Shot};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A game world: bodies, bird queue and physics settings.
#[pyclass(name = "Scene", module = "birdsim_py", skip_from_py_object)]
#[derive(Clone)]
struct PyScene {
    inner: world::Scene,
}

#[pymethods]
impl PyScene {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: load_level(text).map_err(value_err)? })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| PyIOError::new_err(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// The scene the agent rebuilds from its own rendering of this one.
    fn perceived(&self) -> PyResult<Self> {
        let grid = render::rasterize(&self.inner, render::DEFAULT_WIDTH, render::DEFAULT_HEIGHT);
        let rec = perception::perceive(&grid, &PerceptionConfig::default()).map_err(value_err)?;
        Ok(Self { inner: perception::to_scene(&rec, &SceneTemplate::default()) })
    }

    #[getter]
    fn body_count(&self) -> usize {
        self.inner.bodies.len()
    }

    #[getter]
    fn alive_pigs(&self) -> usize {
        self.inner.alive_pigs()
    }

    #[getter]
    fn score(&self) -> i64 {
        world::current_score(&self.inner)
    }

    #[getter]
    fn birds(&self) -> Vec<&'static str> {
        self.inner.bird_queue().iter().map(|b| b.name()).collect()
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time
    }

    fn state_hash(&self) -> u64 {
        world::state_hash(&self.inner)
    }

    /// Launches the next bird and runs until the world settles or the
    /// horizon passes. Returns the number of steps taken.
    #[pyo3(signature = (angle, tap_time=None, horizon=15.0))]
    fn shoot(&mut self, py: Python<'_>, angle: f64, tap_time: Option<f64>, horizon: f64) -> PyResult<u64> {
        let shot = Shot { angle, tap_time };
        let dt = self.inner.physics.dt;
        let scene = &mut self.inner;
        let report = py
            .detach(|| planner::execute_shot(scene, shot, dt, horizon, |_, _| {}))
            .map_err(value_err)?;
        self.inner.clear_missiles();
        Ok(report.steps)
    }

    #[pyo3(signature = (width=render::DEFAULT_WIDTH, height=render::DEFAULT_HEIGHT))]
    fn rasterize(&self, width: u32, height: u32) -> Classmap {
        Classmap { inner: render::rasterize(&self.inner, width, height) }
    }

    fn __repr__(&self) -> String {
        format!(
            "Scene(bodies={}, pigs={}, birds={:?}, score={})",
            self.inner.bodies.len(),
            self.inner.alive_pigs(),
            self.birds(),
            self.score()
        )
    }
}

/// A grid of class ids, row 0 at the top.
#[pyclass(module = "birdsim_py", skip_from_py_object)]
#[derive(Clone)]
struct Classmap {
    inner: PixelGrid,
}

#[pymethods]
impl Classmap {
    #[staticmethod]
    fn from_pgm(data: &[u8]) -> PyResult<Self> {
        Ok(Self { inner: render::decode_classmap(data).map_err(value_err)? })
    }

    fn to_pgm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &render::encode_classmap(&self.inner))
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.width
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height
    }

    /// Row-major class ids.
    #[getter]
    fn data<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.data)
    }

    fn count(&self, class_id: u8) -> usize {
        self.inner.count(class_id)
    }

    /// Pigs and blocks found in the image.
    fn perceive(&self, py: Python<'_>) -> PyResult<Vec<PerceivedObject>> {
        let grid = &self.inner;
        let rec = py
            .detach(|| perception::perceive(grid, &PerceptionConfig::default()))
            .map_err(value_err)?;
        Ok(rec.objects.iter().map(PerceivedObject::from).collect())
    }
}

#[pyclass(module = "birdsim_py", get_all, skip_from_py_object)]
#[derive(Clone)]
struct PerceivedObject {
    kind: &'static str,
    material: Option<&'static str>,
    center: (f64, f64),
    /// Full width and height; equal to the diameter for circles.
    size: (f64, f64),
    angle: f64,
    circle: bool,
    pixel_count: usize,
}

impl From<&perception::ReconstructedObject> for PerceivedObject {
    fn from(o: &perception::ReconstructedObject) -> Self {
        let (kind, material) = match o.kind {
            ObjectKind::Pig => ("pig", None),
            ObjectKind::Block(m) => ("block", Some(m.name())),
        };
        let c = o.shape.center();
        let (size, angle, circle) = match o.shape {
            Shape::Circle(s) => ((2.0 * s.radius, 2.0 * s.radius), 0.0, true),
            Shape::Rect(r) => ((2.0 * r.half_w, 2.0 * r.half_h), r.angle, false),
        };
        Self { kind, material, center: (c.x, c.y), size, angle, circle, pixel_count: o.pixel_count }
    }
}

#[pymethods]
impl PerceivedObject {
    fn __repr__(&self) -> String {
        format!("PerceivedObject({} {:?} at ({:.1}, {:.1}))", self.kind, self.material, self.center.0, self.center.1)
    }
}

/// The planner's choice with its per-angle sweep.
#[pyclass(name = "Decision", module = "birdsim_py")]
struct PyDecision {
    inner: Decision,
}

#[pymethods]
impl PyDecision {
    #[getter]
    fn angle(&self) -> f64 {
        self.inner.chosen.angle
    }

    #[getter]
    fn tap_time(&self) -> Option<f64> {
        self.inner.chosen.tap_time
    }

    #[getter]
    fn raw_score(&self) -> i64 {
        self.inner.raw_score
    }

    #[getter]
    fn robust_score(&self) -> f64 {
        self.inner.robust_score
    }

    /// `(angle, raw score, robust score)` for every angle in the sweep.
    #[getter]
    fn sweep(&self) -> Vec<(f64, i64, f64)> {
        self.inner.per_angle.iter().zip(&self.inner.robust).map(|(o, &r)| (o.candidate.shot.angle, o.score, r)).collect()
    }

    fn raw_argmax_angle(&self) -> f64 {
        self.inner.per_angle[self.inner.raw_argmax()].candidate.shot.angle
    }

    fn sweep_csv(&self) -> String {
        self.inner.sweep_csv()
    }

    fn __repr__(&self) -> String {
        format!("Decision(angle={:.4}, raw={}, robust={:.1})", self.angle(), self.raw_score(), self.robust_score())
    }
}

/// Runs the simulation planner on `scene` for its next bird.
#[pyfunction]
#[pyo3(signature = (scene, window=1, angle_count=106, workers=0))]
fn plan(py: Python<'_>, scene: &PyScene, window: usize, angle_count: usize, workers: usize) -> PyResult<PyDecision> {
    let cfg = PlannerConfig { window, angle_count, workers, ..PlannerConfig::default() };
    let scene = &scene.inner;
    let inner = py.detach(|| planner::plan(scene, &cfg)).map_err(value_err)?;
    Ok(PyDecision { inner })
}

#[pyclass(name = "Episode", module = "birdsim_py", get_all)]
struct PyEpisode {
    level: String,
    agent: String,
    score: i64,
    birds_used: usize,
    pigs_remaining: usize,
    failed: bool,
    outcome: &'static str,
    /// `(angle, tap time)` of every shot.
    shots: Vec<(f64, Option<f64>)>,
}

impl From<EpisodeResult> for PyEpisode {
    fn from(r: EpisodeResult) -> Self {
        Self {
            outcome: r.outcome.name(),
            shots: r.shots.iter().map(|s| (s.shot.angle, s.shot.tap_time)).collect(),
            level: r.level,
            agent: r.agent,
            score: r.score,
            birds_used: r.birds_used,
            pigs_remaining: r.pigs_remaining,
            failed: r.failed,
        }
    }
}

#[pymethods]
impl PyEpisode {
    fn __repr__(&self) -> String {
        format!("Episode({} by {}: {} with score {})", self.level, self.agent, self.outcome, self.score)
    }
}

/// Plays a level to the end with the `"sim"` or `"naive"` agent.
#[pyfunction]
#[pyo3(signature = (scene, agent="sim", seed=0, name="level"))]
fn play(py: Python<'_>, scene: &PyScene, agent: &str, seed: u64, name: &str) -> PyResult<PyEpisode> {
    let cfg = AgentConfig::default();
    let truth = scene.inner.clone();
    let result = match agent {
        "sim" => py.detach(|| agent::sim_agent_play(name, truth, &cfg)),
        "naive" => py.detach(|| agent::naive_agent_play(name, truth, &cfg, seed)),
        other => return Err(PyValueError::new_err(format!("unknown agent {other:?}, expected \"sim\" or \"naive\""))),
    };
    Ok(result.into())
}

/// Low and high launch angles through `(dx, dy)`, or `None` when out of reach.
#[pyfunction]
fn solve_launch_angles(dx: f64, dy: f64, speed: f64, gravity: f64) -> Option<(f64, f64)> {
    world::solve_launch_angles(dx, dy, speed, gravity).ok()
}

#[pyfunction]
fn convex_hull(points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let pts: Vec<Point2> = points.iter().map(|&(x, y)| Point2::new(x, y)).collect();
    geometry::convex_hull(&pts).vertices.iter().map(|p| (p.x, p.y)).collect()
}

/// Smallest enclosing rectangle of a point set as
/// `(center, (width, height), angle)`.
#[pyfunction]
fn min_area_rect(points: Vec<(f64, f64)>) -> PyResult<((f64, f64), (f64, f64), f64)> {
    if points.is_empty() {
        return Err(PyValueError::new_err("need at least one point"));
    }
    let pts: Vec<Point2> = points.iter().map(|&(x, y)| Point2::new(x, y)).collect();
    let r = geometry::min_area_rect(&geometry::convex_hull(&pts), &GeometryConfig::default());
    Ok(((r.center.x, r.center.y), (2.0 * r.half_w, 2.0 * r.half_h), r.angle))
}

#[pymodule]
fn birdsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScene>()?;
    m.add_class::<Classmap>()?;
    m.add_class::<PerceivedObject>()?;
    m.add_class::<PyDecision>()?;
    m.add_class::<PyEpisode>()?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(play, m)?)?;
    m.add_function(wrap_pyfunction!(solve_launch_angles, m)?)?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(min_area_rect, m)?)?;
    Ok(())
}
